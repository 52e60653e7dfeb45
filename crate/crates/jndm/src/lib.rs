//! An event-sourced, machine-rated journal engine.
//!
//! Anyone may submit, review, and rate articles. Publication decisions come
//! from a naive Bayes model over each reviewer's track record against the
//! reader majority, reviewer standing is measured by the precision of their
//! accept recommendations, and every mutation is an append-only log event
//! that replays deterministically. A seeded agent-based simulator exercises
//! the whole mechanism, honest reviewers and adversaries alike.

pub mod decision;
pub mod ids;
pub mod journal;
pub mod rational;
pub mod reputation;
pub mod sim;
pub mod store;

pub use decision::{EngineConfig, PriorMode, Smoothing};
pub use ids::{AccountId, ArticleId, EffectiveReviewerId, Facet, ReaderId, ReviewerId, SubmissionId};
pub use journal::{Epoch, JournalConfig, JournalError, JournalState};
pub use rational::Rat;
pub use store::{EventLog, Journal, StoreError};
