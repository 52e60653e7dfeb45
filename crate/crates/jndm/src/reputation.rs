//! Reviewer precision and the lead-reviewer leaderboard.
//!
//! Only accept recommendations can be scored: rejected submissions are
//! never read, so there is nothing to learn about the votes that kept them
//! out. A reviewer's precision is tp/(tp+fp) over their accept votes on
//! published articles that currently carry a reader-majority label, and it
//! is recomputed from the live labels on every query.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ids::{AccountId, EffectiveReviewerId, Facet};
use crate::journal::{JournalState, Label};

/// Accept-vote tallies for one reviewer identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrecisionRecord {
    pub reviewer: EffectiveReviewerId,
    /// Accept votes on articles currently labeled acceptable.
    pub tp: u32,
    /// Accept votes on articles currently labeled unacceptable.
    pub fp: u32,
}

impl PrecisionRecord {
    pub fn rated(&self) -> u32 {
        self.tp + self.fp
    }

    /// `None` when the reviewer has no rated accept votes.
    pub fn precision(&self) -> Option<f64> {
        if self.rated() == 0 {
            None
        } else {
            Some(f64::from(self.tp) / f64::from(self.rated()))
        }
    }
}

/// The identity a review is scored under: the plain account, or its
/// self-work/others-work facet when pseudo-reviewers are enabled.
pub fn effective_reviewer_id(
    reviewer: &AccountId,
    submission_author: &AccountId,
    pseudo_enabled: bool,
) -> EffectiveReviewerId {
    if !pseudo_enabled {
        EffectiveReviewerId::plain(reviewer.clone())
    } else if reviewer == submission_author {
        EffectiveReviewerId::faceted(reviewer.clone(), Facet::SelfWork)
    } else {
        EffectiveReviewerId::faceted(reviewer.clone(), Facet::OthersWork)
    }
}

/// Precision of one reviewer identity against the current labels.
pub fn precision_of(state: &JournalState, identity: &EffectiveReviewerId) -> PrecisionRecord {
    let mut tp = 0;
    let mut fp = 0;
    for article in state.articles() {
        let label = state.label_of(&article.id).expect("article exists").label;
        if label == Label::Unlabeled {
            continue;
        }
        let vote = state
            .reviews_of(&article.submission)
            .and_then(|votes| votes.get(identity.base()));
        let accepted = matches!(vote, Some(v) if v.vote);
        if !accepted {
            continue;
        }
        let facet_matches = match identity.facet() {
            None => true,
            Some(Facet::SelfWork) => article.author == *identity.base(),
            Some(Facet::OthersWork) => article.author != *identity.base(),
        };
        if !facet_matches {
            continue;
        }
        if label == Label::Acceptable {
            tp += 1;
        } else {
            fp += 1;
        }
    }
    PrecisionRecord {
        reviewer: identity.clone(),
        tp,
        fp,
    }
}

/// Plain (unsplit) precision for an account.
pub fn reviewer_precision(state: &JournalState, reviewer: &AccountId) -> PrecisionRecord {
    precision_of(state, &EffectiveReviewerId::plain(reviewer.clone()))
}

/// Precision of one facet of a reviewer's split identity.
pub fn pseudo_precision(
    state: &JournalState,
    reviewer: &AccountId,
    facet: Facet,
) -> PrecisionRecord {
    precision_of(state, &EffectiveReviewerId::faceted(reviewer.clone(), facet))
}

/// The top `k` reviewer identities by precision.
///
/// Candidates need at least `min_rated` rated accept votes (so precision is
/// always defined on the board). Ordering: precision descending, then rated
/// count descending, then id ascending. When the journal runs with
/// pseudo-reviewers the board ranks the split identities.
pub fn lead_reviewers(
    state: &JournalState,
    k: usize,
    min_rated: u32,
) -> Vec<(EffectiveReviewerId, PrecisionRecord)> {
    let pseudo = state.config().engine.pseudo_reviewers;
    let mut identities: BTreeSet<EffectiveReviewerId> = BTreeSet::new();
    for article in state.articles() {
        if let Some(votes) = state.reviews_of(&article.submission) {
            for reviewer in votes.keys() {
                identities.insert(effective_reviewer_id(reviewer, &article.author, pseudo));
            }
        }
    }

    let mut board: Vec<(EffectiveReviewerId, PrecisionRecord)> = identities
        .into_iter()
        .map(|id| {
            let record = precision_of(state, &id);
            (id, record)
        })
        .filter(|(_, r)| r.rated() >= min_rated.max(1))
        .collect();

    board.sort_by(|(id_a, a), (id_b, b)| {
        // precision compared exactly: tp_a/rated_a vs tp_b/rated_b.
        let lhs = u64::from(a.tp) * u64::from(b.rated());
        let rhs = u64::from(b.tp) * u64::from(a.rated());
        rhs.cmp(&lhs)
            .then_with(|| b.rated().cmp(&a.rated()))
            .then_with(|| id_a.cmp(id_b))
    });
    board.truncate(k);
    board
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::ArticleId;
    use crate::journal::{JournalConfig, JournalState};
    use crate::rational::Rat;

    fn acct(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    /// Rebuild the worked four-reviewer history as real journal state:
    /// A1 and A2 labeled acceptable, A3 unacceptable.
    pub(crate) fn table1_state() -> JournalState {
        let mut state = JournalState::new(JournalConfig::default());
        for name in ["author", "r1", "r2", "r3", "r4", "e1"] {
            state.create_account(acct(name), 0).unwrap();
        }
        let (s1, _) = state.submit_article(&acct("author"), None, 0).unwrap();
        let (s2, _) = state.submit_article(&acct("author"), None, 0).unwrap();
        let (s3, _) = state.submit_article(&acct("author"), None, 0).unwrap();
        let votes: [(&str, &[(&str, bool)]); 3] = [
            ("s1", &[("r1", true), ("r2", true), ("r3", false), ("r4", false)]),
            ("s2", &[("r2", false), ("r4", false)]),
            ("s3", &[("r2", true), ("r3", false), ("r4", true)]),
        ];
        for (name, entries) in votes {
            let id = match name {
                "s1" => s1,
                "s2" => s2,
                _ => s3,
            };
            for (reviewer, vote) in entries {
                state.record_review(id, &acct(reviewer), *vote, 1).unwrap();
            }
        }
        // Publish all three by decision epoch with a permissive threshold.
        let mut config = state.config().clone();
        config.engine.threshold = Rat::new(2, 5);
        state.run_decision_epoch(3, &config).unwrap();
        for (article, opinion) in [(1, true), (2, true), (3, false)] {
            state
                .record_opinion(ArticleId::new(article), &acct("e1"), opinion, 4)
                .unwrap();
        }
        state
    }

    #[test]
    fn precision_counts_accepts_against_current_labels() {
        let state = table1_state();
        let r1 = reviewer_precision(&state, &acct("r1"));
        assert_eq!((r1.tp, r1.fp), (1, 0));
        assert_eq!(r1.precision(), Some(1.0));

        let r2 = reviewer_precision(&state, &acct("r2"));
        assert_eq!((r2.tp, r2.fp), (1, 1));
        assert_eq!(r2.precision(), Some(0.5));

        // r3 never recommended acceptance: undefined.
        let r3 = reviewer_precision(&state, &acct("r3"));
        assert_eq!(r3.rated(), 0);
        assert_eq!(r3.precision(), None);

        let r4 = reviewer_precision(&state, &acct("r4"));
        assert_eq!((r4.tp, r4.fp), (0, 1));
        assert_eq!(r4.precision(), Some(0.0));
    }

    #[test]
    fn leaderboard_ranks_and_excludes_undefined() {
        let state = table1_state();
        let board = lead_reviewers(&state, 3, 1);
        let names: Vec<String> = board.iter().map(|(id, _)| id.to_string()).collect();
        assert_eq!(names, ["r1", "r2", "r4"]);
        assert!(lead_reviewers(&state, 0, 1).is_empty());
    }

    #[test]
    fn leaderboard_ties_break_on_rated_count() {
        // Same precision 1.0, different volume: the larger history ranks
        // first.
        let mut state = JournalState::new(JournalConfig::default());
        for name in ["a", "x", "y", "e"] {
            state.create_account(acct(name), 0).unwrap();
        }
        let mut subs = Vec::new();
        for _ in 0..3 {
            let (s, _) = state.submit_article(&acct("a"), None, 0).unwrap();
            subs.push(s);
        }
        for s in &subs {
            state.record_review(*s, &acct("x"), true, 1).unwrap();
            state.record_review(*s, &acct("y"), true, 1).unwrap();
        }
        // y only reviewed the first submission.
        state.withdraw_review(subs[1], &acct("y"), 1).unwrap();
        state.withdraw_review(subs[2], &acct("y"), 1).unwrap();
        let mut config = state.config().clone();
        config.min_reviews = 1;
        config.engine.threshold = Rat::new(2, 5);
        state.run_decision_epoch(3, &config).unwrap();
        for n in 1..=3 {
            state
                .record_opinion(ArticleId::new(n), &acct("e"), true, 4)
                .unwrap();
        }
        let board = lead_reviewers(&state, 2, 1);
        assert_eq!(board[0].0.to_string(), "x");
        assert_eq!(board[0].1.rated(), 3);
        assert_eq!(board[1].0.to_string(), "y");
    }

    #[test]
    fn effective_id_passthrough_and_facets() {
        let r = acct("r1");
        let a = acct("author");
        assert_eq!(
            effective_reviewer_id(&r, &a, false),
            EffectiveReviewerId::plain(r.clone())
        );
        assert_eq!(
            effective_reviewer_id(&r, &r, true),
            EffectiveReviewerId::faceted(r.clone(), Facet::SelfWork)
        );
        assert_eq!(
            effective_reviewer_id(&r, &a, true),
            EffectiveReviewerId::faceted(r.clone(), Facet::OthersWork)
        );
    }

    #[test]
    fn facet_precision_sums_to_plain_precision() {
        // One reviewer accepts their own article and someone else's.
        let mut state = JournalState::new(JournalConfig::default());
        for name in ["a", "r", "e"] {
            state.create_account(acct(name), 0).unwrap();
        }
        let (s1, _) = state.submit_article(&acct("r"), None, 0).unwrap(); // own
        let (s2, _) = state.submit_article(&acct("a"), None, 0).unwrap();
        for s in [s1, s2] {
            state.record_review(s, &acct("r"), true, 1).unwrap();
            state.record_review(s, &acct("a"), false, 1).unwrap();
        }
        let mut config = state.config().clone();
        config.engine.threshold = Rat::new(2, 5);
        state.run_decision_epoch(3, &config).unwrap();
        state
            .record_opinion(ArticleId::new(1), &acct("e"), false, 4)
            .unwrap();
        state
            .record_opinion(ArticleId::new(2), &acct("e"), true, 4)
            .unwrap();

        let plain = reviewer_precision(&state, &acct("r"));
        let own = pseudo_precision(&state, &acct("r"), Facet::SelfWork);
        let others = pseudo_precision(&state, &acct("r"), Facet::OthersWork);
        assert_eq!((own.tp, own.fp), (0, 1));
        assert_eq!((others.tp, others.fp), (1, 0));
        assert_eq!(own.rated() + others.rated(), plain.rated());
    }
}
