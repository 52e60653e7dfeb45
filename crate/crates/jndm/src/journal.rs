//! Journal lifecycle state machine.
//!
//! State is an event-derived value: every mutation is expressed as an
//! [`Event`], validated and folded in by [`JournalState::apply`]. Command
//! methods (`create_account`, `submit_article`, ...) construct the event,
//! apply it, and hand it back for persistence, so live execution and log
//! replay share a single code path.
//!
//! Time is a logical epoch counter. A submission is decided the first time
//! a decision epoch runs at or past its due date: with fewer than the
//! configured minimum number of reviews it is rejected without prejudice
//! (and may be resubmitted), otherwise the classifier posterior decides
//! publication. Published articles collect reader opinions, which are
//! retallied into acceptable/unacceptable labels at every decision epoch.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::decision::{
    self, decide, Decision, EngineConfig, NbError, Posterior,
};
use crate::ids::{AccountId, ArticleId, EffectiveReviewerId, SubmissionId};
use crate::rational::Rat;

/// Logical time: a monotone epoch counter, never wall-clock.
pub type Epoch = u64;

/// Journal-level configuration: the review window, the minimum review
/// count, and the decision engine settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalConfig {
    /// Epochs between submission and its decision due date.
    #[serde(default = "default_review_window")]
    pub review_window: Epoch,
    /// Fewer live reviews than this at the due date means rejection
    /// without prejudice.
    #[serde(default = "default_min_reviews")]
    pub min_reviews: u32,
    #[serde(default)]
    pub engine: EngineConfig,
}

fn default_review_window() -> Epoch {
    3
}

fn default_min_reviews() -> u32 {
    2
}

impl Default for JournalConfig {
    fn default() -> Self {
        JournalConfig {
            review_window: default_review_window(),
            min_reviews: default_min_reviews(),
            engine: EngineConfig::default(),
        }
    }
}

/// A reader-majority label for a published article.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Acceptable,
    Unacceptable,
    /// No opinions recorded yet.
    Unlabeled,
}

/// Tally of an article's live reader opinions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MajorityTally {
    pub n: usize,
    pub positives: usize,
    pub label: Label,
}

/// Strict simple majority: acceptable iff positives > n/2. Empty input is
/// unlabeled; an exact tie is unacceptable.
pub fn tally_majority<I: IntoIterator<Item = bool>>(opinions: I) -> MajorityTally {
    let mut n = 0usize;
    let mut positives = 0usize;
    for opinion in opinions {
        n += 1;
        if opinion {
            positives += 1;
        }
    }
    let label = if n == 0 {
        Label::Unlabeled
    } else if 2 * positives > n {
        Label::Acceptable
    } else {
        Label::Unacceptable
    };
    MajorityTally { n, positives, label }
}

/// A live review vote on an undecided submission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReviewVote {
    /// true = recommend acceptance.
    pub vote: bool,
    pub recorded_at: Epoch,
}

/// A live reader opinion on a published article.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReaderOpinion {
    /// true = the article was acceptable.
    pub opinion: bool,
    pub recorded_at: Epoch,
    /// Set when this reader also reviewed the article and the opinion
    /// contradicts their final review vote. Flagged opinions still count.
    pub inconsistent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SubmissionStatus {
    Open,
    Published { article: ArticleId },
    Rejected,
    RejectedWithoutPrejudice,
}

impl SubmissionStatus {
    pub fn is_open(&self) -> bool {
        matches!(self, SubmissionStatus::Open)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Submission {
    pub id: SubmissionId,
    pub author: AccountId,
    pub submitted_at: Epoch,
    pub decision_due_at: Epoch,
    #[serde(flatten)]
    pub status: SubmissionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predecessor: Option<SubmissionId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArticleRecord {
    pub id: ArticleId,
    pub submission: SubmissionId,
    pub author: AccountId,
    pub published_at: Epoch,
}

/// Outcome of one submission's decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionOutcome {
    Published,
    Rejected,
    RejectedWithoutPrejudice,
}

/// Everything `run_decision_epoch` concluded about one due submission.
#[derive(Debug, Clone)]
pub struct DecisionRecord {
    pub submission: SubmissionId,
    pub outcome: DecisionOutcome,
    /// Minted id when published.
    pub article: Option<ArticleId>,
    /// Absent for rejections without prejudice (no posterior is computed).
    pub posterior: Option<Posterior>,
    pub eligible: BTreeSet<EffectiveReviewerId>,
    pub training_digest: String,
    pub review_count: usize,
}

/// One journal event. `epoch` is the logical time the event was recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub epoch: Epoch,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    AccountCreated {
        account: AccountId,
    },
    Submitted {
        submission: SubmissionId,
        author: AccountId,
        due: Epoch,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        predecessor: Option<SubmissionId>,
    },
    ReviewRecorded {
        submission: SubmissionId,
        reviewer: AccountId,
        /// 1 = recommend acceptance, 0 = recommend rejection.
        vote: u8,
    },
    ReviewWithdrawn {
        submission: SubmissionId,
        reviewer: AccountId,
    },
    OpinionRecorded {
        article: ArticleId,
        reader: AccountId,
        /// 1 = acceptable, 0 = unacceptable.
        opinion: u8,
    },
    DecisionEpochRun {
        config: JournalConfig,
        training_digest: String,
    },
    DecisionTaken {
        submission: SubmissionId,
        outcome: DecisionOutcome,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        article: Option<ArticleId>,
        /// Exact rational, e.g. "2/11"; absent for rejection without
        /// prejudice.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        posterior: Option<Rat>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        degenerate: bool,
        eligible: Vec<EffectiveReviewerId>,
        review_count: u32,
        training_digest: String,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum JournalError {
    #[error("unknown account `{0}`")]
    UnknownAccount(AccountId),
    #[error("account `{0}` already exists")]
    DuplicateAccount(AccountId),
    #[error("unknown submission `{0}`")]
    UnknownSubmission(SubmissionId),
    #[error("a decision has already been taken for submission `{0}`")]
    DecisionTaken(SubmissionId),
    #[error("unknown article `{0}`")]
    UnknownArticle(ArticleId),
    #[error("no live review by `{reviewer}` on submission `{submission}`")]
    NoSuchReview {
        submission: SubmissionId,
        reviewer: AccountId,
    },
    #[error("submission `{0}` is not rejected-without-prejudice; cannot resubmit it")]
    InvalidPredecessor(SubmissionId),
    #[error("event at epoch {event} precedes current epoch {current}")]
    TimeRegression { event: Epoch, current: Epoch },
    #[error("corrupt event: {0}")]
    CorruptEvent(String),
    #[error("invalid engine config: {0}")]
    InvalidConfig(String),
}

impl JournalError {
    /// Stable machine-parseable error code.
    pub fn code(&self) -> &'static str {
        match self {
            JournalError::UnknownAccount(_) => "UNKNOWN_ACCOUNT",
            JournalError::DuplicateAccount(_) => "DUPLICATE_ACCOUNT",
            JournalError::UnknownSubmission(_) => "UNKNOWN_SUBMISSION",
            JournalError::DecisionTaken(_) => "DECISION_TAKEN",
            JournalError::UnknownArticle(_) => "UNKNOWN_ARTICLE",
            JournalError::NoSuchReview { .. } => "NO_SUCH_REVIEW",
            JournalError::InvalidPredecessor(_) => "INVALID_PREDECESSOR",
            JournalError::TimeRegression { .. } => "TIME_REGRESSION",
            JournalError::CorruptEvent(_) => "CORRUPT_EVENT",
            JournalError::InvalidConfig(_) => "INVALID_CONFIG",
        }
    }
}

/// Full journal state. Snapshots are plain values: clone freely and query
/// from any thread; all mutation flows through [`JournalState::apply`] in
/// event order.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalState {
    config: JournalConfig,
    epoch: Epoch,
    accounts: BTreeSet<AccountId>,
    submissions: BTreeMap<SubmissionId, Submission>,
    reviews: BTreeMap<SubmissionId, BTreeMap<AccountId, ReviewVote>>,
    articles: BTreeMap<ArticleId, ArticleRecord>,
    opinions: BTreeMap<ArticleId, BTreeMap<AccountId, ReaderOpinion>>,
}

impl JournalState {
    pub fn new(config: JournalConfig) -> Self {
        JournalState {
            config,
            epoch: 0,
            accounts: BTreeSet::new(),
            submissions: BTreeMap::new(),
            reviews: BTreeMap::new(),
            articles: BTreeMap::new(),
            opinions: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> &JournalConfig {
        &self.config
    }

    pub fn epoch(&self) -> Epoch {
        self.epoch
    }

    pub fn accounts(&self) -> &BTreeSet<AccountId> {
        &self.accounts
    }

    pub fn submissions(&self) -> impl Iterator<Item = &Submission> {
        self.submissions.values()
    }

    pub fn submission(&self, id: &SubmissionId) -> Option<&Submission> {
        self.submissions.get(id)
    }

    pub fn articles(&self) -> impl Iterator<Item = &ArticleRecord> {
        self.articles.values()
    }

    pub fn article(&self, id: &ArticleId) -> Option<&ArticleRecord> {
        self.articles.get(id)
    }

    /// Live review votes on a submission, keyed by reviewer account.
    pub fn reviews_of(&self, id: &SubmissionId) -> Option<&BTreeMap<AccountId, ReviewVote>> {
        self.reviews.get(id)
    }

    /// Live reader opinions on a published article.
    pub fn opinions_of(&self, id: &ArticleId) -> Option<&BTreeMap<AccountId, ReaderOpinion>> {
        self.opinions.get(id)
    }

    /// Current reader-majority tally for a published article.
    pub fn label_of(&self, id: &ArticleId) -> Option<MajorityTally> {
        if !self.articles.contains_key(id) {
            return None;
        }
        let opinions = self.opinions.get(id);
        Some(tally_majority(
            opinions
                .into_iter()
                .flat_map(|m| m.values())
                .map(|o| o.opinion),
        ))
    }

    fn next_submission_id(&self) -> SubmissionId {
        SubmissionId::new(self.submissions.len() as u32 + 1)
    }

    fn next_article_id(&self) -> ArticleId {
        ArticleId::new(self.articles.len() as u32 + 1)
    }

    // ----- commands ------------------------------------------------------

    pub fn create_account(
        &mut self,
        account: AccountId,
        now: Epoch,
    ) -> Result<Event, JournalError> {
        let event = Event {
            epoch: now,
            kind: EventKind::AccountCreated { account },
        };
        self.apply(&event)?;
        Ok(event)
    }

    /// Submit a new article; `predecessor` links a resubmission to an
    /// earlier rejection-without-prejudice.
    pub fn submit_article(
        &mut self,
        author: &AccountId,
        predecessor: Option<SubmissionId>,
        now: Epoch,
    ) -> Result<(SubmissionId, Event), JournalError> {
        let id = self.next_submission_id();
        let event = Event {
            epoch: now,
            kind: EventKind::Submitted {
                submission: id,
                author: author.clone(),
                due: now + self.config.review_window,
                predecessor,
            },
        };
        self.apply(&event)?;
        Ok((id, event))
    }

    /// Record or replace a reviewer's vote on an undecided submission.
    pub fn record_review(
        &mut self,
        submission: SubmissionId,
        reviewer: &AccountId,
        vote: bool,
        now: Epoch,
    ) -> Result<Event, JournalError> {
        let event = Event {
            epoch: now,
            kind: EventKind::ReviewRecorded {
                submission,
                reviewer: reviewer.clone(),
                vote: vote as u8,
            },
        };
        self.apply(&event)?;
        Ok(event)
    }

    /// Delete a reviewer's vote; same precondition as recording one.
    pub fn withdraw_review(
        &mut self,
        submission: SubmissionId,
        reviewer: &AccountId,
        now: Epoch,
    ) -> Result<Event, JournalError> {
        let event = Event {
            epoch: now,
            kind: EventKind::ReviewWithdrawn {
                submission,
                reviewer: reviewer.clone(),
            },
        };
        self.apply(&event)?;
        Ok(event)
    }

    /// Record or replace a reader's opinion on a published article.
    pub fn record_opinion(
        &mut self,
        article: ArticleId,
        reader: &AccountId,
        opinion: bool,
        now: Epoch,
    ) -> Result<Event, JournalError> {
        let event = Event {
            epoch: now,
            kind: EventKind::OpinionRecorded {
                article,
                reader: reader.clone(),
                opinion: opinion as u8,
            },
        };
        self.apply(&event)?;
        Ok(event)
    }

    /// Open submissions ordered by urgency: closest decision date first,
    /// ties broken by submission time, then id.
    pub fn review_queue(&self) -> Vec<SubmissionId> {
        let mut open: Vec<&Submission> = self
            .submissions
            .values()
            .filter(|s| s.status.is_open())
            .collect();
        open.sort_by_key(|s| (s.decision_due_at, s.submitted_at, s.id));
        open.into_iter().map(|s| s.id).collect()
    }

    /// Run one decision epoch at `now`: retally labels, rebuild the
    /// training set, and decide every open submission due by `now`.
    ///
    /// The supplied config (normally the journal's own, possibly with
    /// per-run overrides) is recorded in the emitted events so that replays
    /// can re-verify the decisions. Degenerate inputs never error: when the
    /// engine has no usable data the posterior falls back to 1/2, flagged.
    pub fn run_decision_epoch(
        &mut self,
        now: Epoch,
        config: &JournalConfig,
    ) -> Result<(Vec<DecisionRecord>, Vec<Event>), JournalError> {
        config
            .engine
            .validate()
            .map_err(|e| JournalError::InvalidConfig(e.to_string()))?;
        // Labels are computed live, so the retally and the training set
        // rebuild are one step.
        let training = decision::build_training_set(self, &config.engine);
        let training_digest = training.digest();

        let mut events = Vec::new();
        let mut records = Vec::new();

        let epoch_event = Event {
            epoch: now,
            kind: EventKind::DecisionEpochRun {
                config: config.clone(),
                training_digest: training_digest.clone(),
            },
        };
        self.apply(&epoch_event)?;
        events.push(epoch_event);

        let due: Vec<SubmissionId> = self
            .review_queue()
            .into_iter()
            .filter(|id| self.submissions[id].decision_due_at <= now)
            .collect();

        for id in due {
            let submission = &self.submissions[&id];
            let author = submission.author.clone();
            let votes = self.reviews.get(&id).cloned().unwrap_or_default();
            let review_count = votes.len();

            let record = if review_count < config.min_reviews as usize {
                DecisionRecord {
                    submission: id,
                    outcome: DecisionOutcome::RejectedWithoutPrejudice,
                    article: None,
                    posterior: None,
                    eligible: BTreeSet::new(),
                    training_digest: training_digest.clone(),
                    review_count,
                }
            } else {
                let vector = decision::ReviewVector::from_reviews(
                    &votes,
                    &author,
                    config.engine.pseudo_reviewers,
                );
                let posterior =
                    match decision::posterior_acceptable(&training, &vector, &config.engine) {
                        Ok(p) => p,
                        // Frequency prior over an empty training set: no
                        // usable data, fall back to the neutral posterior.
                        Err(NbError::NoData) => Posterior::degenerate_half(),
                    };
                let (outcome, article) =
                    match decide(&posterior.p_acceptable, &config.engine.threshold) {
                        Decision::Publish => {
                            (DecisionOutcome::Published, Some(self.next_article_id()))
                        }
                        Decision::Reject => (DecisionOutcome::Rejected, None),
                    };
                DecisionRecord {
                    submission: id,
                    outcome,
                    article,
                    eligible: posterior.eligible.clone(),
                    posterior: Some(posterior),
                    training_digest: training_digest.clone(),
                    review_count,
                }
            };

            let event = Event {
                epoch: now,
                kind: EventKind::DecisionTaken {
                    submission: id,
                    outcome: record.outcome,
                    article: record.article,
                    posterior: record.posterior.as_ref().map(|p| p.p_acceptable.clone()),
                    degenerate: record.posterior.as_ref().is_some_and(|p| p.degenerate),
                    eligible: record.eligible.iter().cloned().collect(),
                    review_count: review_count as u32,
                    training_digest: training_digest.clone(),
                },
            };
            self.apply(&event)?;
            events.push(event);
            records.push(record);
        }

        Ok((records, events))
    }

    // ----- replay --------------------------------------------------------

    /// Validate and fold one event into the state. All command methods go
    /// through here, so replaying a log reproduces live execution exactly.
    pub fn apply(&mut self, event: &Event) -> Result<(), JournalError> {
        if event.epoch < self.epoch {
            return Err(JournalError::TimeRegression {
                event: event.epoch,
                current: self.epoch,
            });
        }
        match &event.kind {
            EventKind::AccountCreated { account } => {
                if !self.accounts.insert(account.clone()) {
                    return Err(JournalError::DuplicateAccount(account.clone()));
                }
            }
            EventKind::Submitted {
                submission,
                author,
                due,
                predecessor,
            } => {
                if !self.accounts.contains(author) {
                    return Err(JournalError::UnknownAccount(author.clone()));
                }
                if *submission != self.next_submission_id() {
                    return Err(JournalError::CorruptEvent(format!(
                        "submission id {submission} is not the next id {}",
                        self.next_submission_id()
                    )));
                }
                if *due < event.epoch {
                    return Err(JournalError::CorruptEvent(format!(
                        "submission {submission} due {due} precedes its submission epoch"
                    )));
                }
                if let Some(prev) = predecessor {
                    match self.submissions.get(prev).map(|s| s.status) {
                        Some(SubmissionStatus::RejectedWithoutPrejudice) => {}
                        Some(_) => return Err(JournalError::InvalidPredecessor(*prev)),
                        None => return Err(JournalError::UnknownSubmission(*prev)),
                    }
                }
                self.submissions.insert(
                    *submission,
                    Submission {
                        id: *submission,
                        author: author.clone(),
                        submitted_at: event.epoch,
                        decision_due_at: *due,
                        status: SubmissionStatus::Open,
                        predecessor: *predecessor,
                    },
                );
            }
            EventKind::ReviewRecorded {
                submission,
                reviewer,
                vote,
            } => {
                let vote = decode_bit(*vote, "vote")?;
                self.check_open(submission)?;
                if !self.accounts.contains(reviewer) {
                    return Err(JournalError::UnknownAccount(reviewer.clone()));
                }
                self.reviews.entry(*submission).or_default().insert(
                    reviewer.clone(),
                    ReviewVote {
                        vote,
                        recorded_at: event.epoch,
                    },
                );
            }
            EventKind::ReviewWithdrawn {
                submission,
                reviewer,
            } => {
                self.check_open(submission)?;
                let removed = self
                    .reviews
                    .get_mut(submission)
                    .and_then(|m| m.remove(reviewer));
                if removed.is_none() {
                    return Err(JournalError::NoSuchReview {
                        submission: *submission,
                        reviewer: reviewer.clone(),
                    });
                }
            }
            EventKind::OpinionRecorded {
                article,
                reader,
                opinion,
            } => {
                let opinion = decode_bit(*opinion, "opinion")?;
                let record = self
                    .articles
                    .get(article)
                    .ok_or(JournalError::UnknownArticle(*article))?;
                if !self.accounts.contains(reader) {
                    return Err(JournalError::UnknownAccount(reader.clone()));
                }
                let inconsistent = self
                    .reviews
                    .get(&record.submission)
                    .and_then(|m| m.get(reader))
                    .is_some_and(|review| review.vote != opinion);
                self.opinions.entry(*article).or_default().insert(
                    reader.clone(),
                    ReaderOpinion {
                        opinion,
                        recorded_at: event.epoch,
                        inconsistent,
                    },
                );
            }
            EventKind::DecisionEpochRun { config, .. } => {
                config
                    .engine
                    .validate()
                    .map_err(|e| JournalError::InvalidConfig(e.to_string()))?;
            }
            EventKind::DecisionTaken {
                submission,
                outcome,
                article,
                ..
            } => {
                let current = self
                    .submissions
                    .get(submission)
                    .ok_or(JournalError::UnknownSubmission(*submission))?;
                if !current.status.is_open() {
                    return Err(JournalError::CorruptEvent(format!(
                        "decision recorded twice for {submission}"
                    )));
                }
                let status = match (outcome, article) {
                    (DecisionOutcome::Published, Some(id)) => {
                        if *id != self.next_article_id() {
                            return Err(JournalError::CorruptEvent(format!(
                                "article id {id} is not the next id {}",
                                self.next_article_id()
                            )));
                        }
                        self.articles.insert(
                            *id,
                            ArticleRecord {
                                id: *id,
                                submission: *submission,
                                author: current.author.clone(),
                                published_at: event.epoch,
                            },
                        );
                        SubmissionStatus::Published { article: *id }
                    }
                    (DecisionOutcome::Published, None) => {
                        return Err(JournalError::CorruptEvent(format!(
                            "publication of {submission} without an article id"
                        )));
                    }
                    (DecisionOutcome::Rejected, None) => SubmissionStatus::Rejected,
                    (DecisionOutcome::RejectedWithoutPrejudice, None) => {
                        SubmissionStatus::RejectedWithoutPrejudice
                    }
                    (_, Some(id)) => {
                        return Err(JournalError::CorruptEvent(format!(
                            "rejection of {submission} carries article id {id}"
                        )));
                    }
                };
                self.submissions.get_mut(submission).expect("checked").status = status;
            }
        }
        self.epoch = event.epoch;
        Ok(())
    }

    fn check_open(&self, submission: &SubmissionId) -> Result<(), JournalError> {
        match self.submissions.get(submission) {
            None => Err(JournalError::UnknownSubmission(*submission)),
            Some(s) if s.status.is_open() => Ok(()),
            Some(_) => Err(JournalError::DecisionTaken(*submission)),
        }
    }

    // ----- canonical form ------------------------------------------------

    /// Canonical JSON serialization of the full state, including live
    /// labels. Identical states serialize identically.
    pub fn canonical_json(&self) -> String {
        #[derive(Serialize)]
        struct SubmissionView<'a> {
            #[serde(flatten)]
            submission: &'a Submission,
            reviews: BTreeMap<&'a AccountId, &'a ReviewVote>,
        }
        #[derive(Serialize)]
        struct ArticleView<'a> {
            #[serde(flatten)]
            article: &'a ArticleRecord,
            label: MajorityTally,
            opinions: BTreeMap<&'a AccountId, &'a ReaderOpinion>,
        }
        #[derive(Serialize)]
        struct StateView<'a> {
            config: &'a JournalConfig,
            epoch: Epoch,
            accounts: &'a BTreeSet<AccountId>,
            submissions: Vec<SubmissionView<'a>>,
            articles: Vec<ArticleView<'a>>,
        }

        let view = StateView {
            config: &self.config,
            epoch: self.epoch,
            accounts: &self.accounts,
            submissions: self
                .submissions
                .values()
                .map(|s| SubmissionView {
                    submission: s,
                    reviews: self
                        .reviews
                        .get(&s.id)
                        .map(|m| m.iter().collect())
                        .unwrap_or_default(),
                })
                .collect(),
            articles: self
                .articles
                .values()
                .map(|a| ArticleView {
                    article: a,
                    label: self.label_of(&a.id).expect("article exists"),
                    opinions: self
                        .opinions
                        .get(&a.id)
                        .map(|m| m.iter().collect())
                        .unwrap_or_default(),
                })
                .collect(),
        };
        serde_json::to_string(&view).expect("state serialization cannot fail")
    }

    /// SHA-256 over [`JournalState::canonical_json`], lowercase hex.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        hex_encode(&hasher.finalize())
    }
}

fn decode_bit(value: u8, field: &str) -> Result<bool, JournalError> {
    match value {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(JournalError::CorruptEvent(format!(
            "{field} must be 0 or 1, got {other}"
        ))),
    }
}

pub(crate) fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
