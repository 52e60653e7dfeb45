//! The publication decision engine.
//!
//! A submission is published when the probability that its readers would
//! find it acceptable, conditioned on the reviews and estimated by naive
//! Bayes over each reviewer's track record, strictly exceeds the threshold.
//! Per-reviewer conditionals come from the reviewer's votes on previously
//! published articles, split by the article's current reader-majority
//! label, under one of three estimators:
//!
//! * `frequency` — raw counts `c/N`; collapses to 0 on any unseen vote and
//!   is undefined on empty history, so it is for analysis, not production.
//! * `paper-laplace` — `(c+1)/(N+1)`; an empty history yields 1.
//! * `lidstone` — `(c+λ)/(N+2λ)`; an empty history yields 1/2. The default,
//!   with λ = 1.
//!
//! Scores are exact rationals; the floating view is evaluated in log space
//! with exact handling of zero factors, so normalization holds to well
//! under 1e-12.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ids::{AccountId, ArticleId, EffectiveReviewerId};
use crate::journal::{hex_encode, JournalState, Label, ReviewVote};
use crate::rational::Rat;
use crate::reputation::effective_reviewer_id;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    Frequency,
    PaperLaplace,
    Lidstone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMode {
    /// Fraction of labeled published articles that are acceptable.
    Frequency,
    /// Add-one smoothed fraction; 1/2 on an empty journal.
    Smoothed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub smoothing: Smoothing,
    /// Lidstone parameter; must be positive. Ignored by the other modes.
    pub lambda: Rat,
    pub prior: PriorMode,
    /// Publish strictly above this; must lie in (0, 1).
    pub threshold: Rat,
    /// Reviews on published articles required before a reviewer's votes
    /// contribute classifier factors.
    pub min_prior_reviews: u32,
    /// Split each reviewer into self-work/others-work identities.
    pub pseudo_reviewers: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            smoothing: Smoothing::Lidstone,
            lambda: Rat::one(),
            prior: PriorMode::Smoothed,
            threshold: Rat::new(1, 2),
            min_prior_reviews: 2,
            pseudo_reviewers: false,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("lidstone lambda must be positive, got {0}")]
    NonPositiveLambda(Rat),
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    ThresholdOutOfRange(Rat),
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.smoothing == Smoothing::Lidstone && !self.lambda.is_positive() {
            return Err(ConfigError::NonPositiveLambda(self.lambda.clone()));
        }
        if !self.threshold.is_positive() || &Rat::one() - &self.threshold == Rat::zero()
            || (&Rat::one() - &self.threshold) < Rat::zero()
        {
            return Err(ConfigError::ThresholdOutOfRange(self.threshold.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NbError {
    /// Frequency estimation over an empty history or empty training set.
    #[error("no historical data for a frequency estimate")]
    NoData,
}

/// One labeled training row: a published article, its current label, and
/// the votes its reviewers cast before the decision.
#[derive(Debug, Clone, Serialize)]
pub struct TrainingRow {
    pub article: ArticleId,
    /// true = acceptable.
    pub acceptable: bool,
    pub votes: BTreeMap<EffectiveReviewerId, bool>,
}

/// Labeled training data plus the review counts that gate eligibility.
///
/// Rows hold exactly the published articles with at least one reader
/// opinion; `published_review_counts` counts votes on every published
/// article, labeled or not, because eligibility only asks that the article
/// was published.
#[derive(Debug, Clone, Default, Serialize)]
pub struct TrainingSet {
    pub rows: Vec<TrainingRow>,
    pub published_review_counts: BTreeMap<EffectiveReviewerId, u32>,
}

impl TrainingSet {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn acceptable_count(&self) -> usize {
        self.rows.iter().filter(|r| r.acceptable).count()
    }

    /// Votes `reviewer` cast within one label class, as (matching `true`
    /// votes, total votes).
    pub fn class_counts(&self, reviewer: &EffectiveReviewerId, acceptable: bool) -> (usize, usize) {
        let mut ones = 0;
        let mut total = 0;
        for row in self.rows.iter().filter(|r| r.acceptable == acceptable) {
            if let Some(vote) = row.votes.get(reviewer) {
                total += 1;
                if *vote {
                    ones += 1;
                }
            }
        }
        (ones, total)
    }

    pub fn class_history(&self, reviewer: &EffectiveReviewerId, acceptable: bool) -> Vec<bool> {
        self.rows
            .iter()
            .filter(|r| r.acceptable == acceptable)
            .filter_map(|r| r.votes.get(reviewer).copied())
            .collect()
    }

    /// SHA-256 of the canonical serialization, recorded in decision events
    /// for audit.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(
            serde_json::to_string(self)
                .expect("training set serialization cannot fail")
                .as_bytes(),
        );
        hex_encode(&hasher.finalize())
    }
}

/// The votes cast on the submission under decision, keyed by the identity
/// the classifier scores them under.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReviewVector {
    entries: BTreeMap<EffectiveReviewerId, bool>,
}

impl ReviewVector {
    pub fn new() -> Self {
        ReviewVector::default()
    }

    pub fn insert(&mut self, reviewer: EffectiveReviewerId, vote: bool) {
        self.entries.insert(reviewer, vote);
    }

    pub fn from_reviews(
        reviews: &BTreeMap<AccountId, ReviewVote>,
        author: &AccountId,
        pseudo: bool,
    ) -> Self {
        let entries = reviews
            .iter()
            .map(|(reviewer, review)| {
                (effective_reviewer_id(reviewer, author, pseudo), review.vote)
            })
            .collect();
        ReviewVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EffectiveReviewerId, bool)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }
}

/// One reviewer's contribution to the posterior, kept for audit output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReviewerFactor {
    pub reviewer: EffectiveReviewerId,
    /// The vote this factor conditions on (1 = accept).
    pub vote: bool,
    pub p_given_acceptable: Rat,
    pub p_given_unacceptable: Rat,
}

/// Normalized acceptance posterior with its audit trail.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub p_acceptable: Rat,
    pub p_unacceptable: Rat,
    pub p_acceptable_f64: f64,
    pub p_unacceptable_f64: f64,
    pub prior_acceptable: Rat,
    pub eligible: BTreeSet<EffectiveReviewerId>,
    pub factors: Vec<ReviewerFactor>,
    /// Both unnormalized scores vanished (frequency mode) or no prior was
    /// computable; the posterior fell back to the prior or to 1/2.
    pub degenerate: bool,
}

impl Posterior {
    /// The defined fallback when not even a prior can be estimated.
    pub fn degenerate_half() -> Self {
        Posterior {
            p_acceptable: Rat::new(1, 2),
            p_unacceptable: Rat::new(1, 2),
            p_acceptable_f64: 0.5,
            p_unacceptable_f64: 0.5,
            prior_acceptable: Rat::new(1, 2),
            eligible: BTreeSet::new(),
            factors: Vec::new(),
            degenerate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Publish,
    Reject,
}

/// Publish iff the posterior strictly exceeds the threshold. Compared on
/// exact rationals, so a posterior of exactly 1/2 against the default
/// threshold rejects.
pub fn decide(posterior: &Rat, threshold: &Rat) -> Decision {
    if posterior > threshold {
        Decision::Publish
    } else {
        Decision::Reject
    }
}

/// Build the training data from the journal's published articles.
///
/// Articles with no opinions are unlabeled and contribute no row, but
/// their reviews still count toward eligibility.
pub fn build_training_set(state: &JournalState, engine: &EngineConfig) -> TrainingSet {
    let pseudo = engine.pseudo_reviewers;
    let mut rows = Vec::new();
    let mut counts: BTreeMap<EffectiveReviewerId, u32> = BTreeMap::new();

    for article in state.articles() {
        let reviews = state.reviews_of(&article.submission);
        let mut votes = BTreeMap::new();
        if let Some(reviews) = reviews {
            for (reviewer, review) in reviews {
                let key = effective_reviewer_id(reviewer, &article.author, pseudo);
                *counts.entry(key.clone()).or_insert(0) += 1;
                votes.insert(key, review.vote);
            }
        }
        match state.label_of(&article.id).expect("article exists").label {
            Label::Acceptable => rows.push(TrainingRow {
                article: article.id,
                acceptable: true,
                votes,
            }),
            Label::Unacceptable => rows.push(TrainingRow {
                article: article.id,
                acceptable: false,
                votes,
            }),
            Label::Unlabeled => {}
        }
    }

    TrainingSet {
        rows,
        published_review_counts: counts,
    }
}

/// Smoothed probability that one reviewer casts `vote` within a class,
/// given their votes in that class.
pub fn class_conditional(
    history: &[bool],
    vote: bool,
    engine: &EngineConfig,
) -> Result<Rat, NbError> {
    let ones = history.iter().filter(|v| **v).count();
    let matching = if vote { ones } else { history.len() - ones };
    conditional_from_counts(matching, history.len(), engine)
}

fn conditional_from_counts(c: usize, n: usize, engine: &EngineConfig) -> Result<Rat, NbError> {
    let c = Rat::from_usize(c);
    let n = Rat::from_usize(n);
    match engine.smoothing {
        Smoothing::Frequency => {
            if n.is_zero() {
                Err(NbError::NoData)
            } else {
                Ok(&c / &n)
            }
        }
        Smoothing::PaperLaplace => Ok(&(&c + &Rat::one()) / &(&n + &Rat::one())),
        Smoothing::Lidstone => {
            let two_lambda = &engine.lambda + &engine.lambda;
            Ok(&(&c + &engine.lambda) / &(&n + &two_lambda))
        }
    }
}

/// The journal's acceptance prior over the labeled training rows.
pub fn class_prior(training: &TrainingSet, mode: PriorMode) -> Result<Rat, NbError> {
    let acceptable = training.acceptable_count();
    let total = training.len();
    match mode {
        PriorMode::Frequency => {
            if total == 0 {
                Err(NbError::NoData)
            } else {
                Ok(&Rat::from_usize(acceptable) / &Rat::from_usize(total))
            }
        }
        PriorMode::Smoothed => Ok(&(&Rat::from_usize(acceptable) + &Rat::one())
            / &(&Rat::from_usize(total) + &Rat::from_int(2))),
    }
}

/// The reviewers in the vector with at least `min_prior_reviews` recorded
/// votes on published articles.
pub fn eligible_reviewers(
    training: &TrainingSet,
    vector: &ReviewVector,
    min_prior_reviews: u32,
) -> BTreeSet<EffectiveReviewerId> {
    vector
        .iter()
        .filter(|(reviewer, _)| {
            training
                .published_review_counts
                .get(reviewer)
                .copied()
                .unwrap_or(0)
                >= min_prior_reviews
        })
        .map(|(reviewer, _)| reviewer.clone())
        .collect()
}

/// Evaluate the normalized acceptance posterior for one review vector.
///
/// Each eligible reviewer contributes a per-class conditional for their
/// vote. Under the smoothed estimators an empty history in one class still
/// contributes that class's zero-history factor; under frequency counts a
/// reviewer with an empty history in either class carries no usable signal
/// and is dropped from both sides. If both unnormalized scores are exactly
/// zero (only possible with frequency counts) the posterior falls back to
/// the prior and is flagged degenerate.
pub fn posterior_acceptable(
    training: &TrainingSet,
    vector: &ReviewVector,
    engine: &EngineConfig,
) -> Result<Posterior, NbError> {
    let prior_acceptable = class_prior(training, engine.prior)?;
    let prior_unacceptable = &Rat::one() - &prior_acceptable;
    let eligible = eligible_reviewers(training, vector, engine.min_prior_reviews);

    let mut factors = Vec::new();
    for (reviewer, vote) in vector.iter() {
        if !eligible.contains(reviewer) {
            continue;
        }
        let (acc_ones, acc_n) = training.class_counts(reviewer, true);
        let (unacc_ones, unacc_n) = training.class_counts(reviewer, false);
        if engine.smoothing == Smoothing::Frequency && (acc_n == 0 || unacc_n == 0) {
            continue;
        }
        let count_matching = |ones: usize, n: usize| if vote { ones } else { n - ones };
        let p_given_acceptable =
            conditional_from_counts(count_matching(acc_ones, acc_n), acc_n, engine)
                .expect("empty frequency histories were skipped above");
        let p_given_unacceptable =
            conditional_from_counts(count_matching(unacc_ones, unacc_n), unacc_n, engine)
                .expect("empty frequency histories were skipped above");
        factors.push(ReviewerFactor {
            reviewer: reviewer.clone(),
            vote,
            p_given_acceptable,
            p_given_unacceptable,
        });
    }

    let mut score_acceptable = prior_acceptable.clone();
    let mut score_unacceptable = prior_unacceptable.clone();
    for factor in &factors {
        score_acceptable = &score_acceptable * &factor.p_given_acceptable;
        score_unacceptable = &score_unacceptable * &factor.p_given_unacceptable;
    }

    let degenerate = score_acceptable.is_zero() && score_unacceptable.is_zero();
    let (p_acceptable, p_unacceptable) = if degenerate {
        (prior_acceptable.clone(), prior_unacceptable.clone())
    } else {
        let total = &score_acceptable + &score_unacceptable;
        (&score_acceptable / &total, &score_unacceptable / &total)
    };

    let (p_acceptable_f64, p_unacceptable_f64) = if degenerate {
        (prior_acceptable.to_f64(), prior_unacceptable.to_f64())
    } else {
        log_space_normalize(&prior_acceptable, &prior_unacceptable, &factors)
    };

    Ok(Posterior {
        p_acceptable,
        p_unacceptable,
        p_acceptable_f64,
        p_unacceptable_f64,
        prior_acceptable,
        eligible,
        factors,
        degenerate,
    })
}

/// Normalize the two class scores in log space. Exact zeros short-circuit
/// rather than passing -inf through the arithmetic.
fn log_space_normalize(
    prior_acceptable: &Rat,
    prior_unacceptable: &Rat,
    factors: &[ReviewerFactor],
) -> (f64, f64) {
    let acc_zero =
        prior_acceptable.is_zero() || factors.iter().any(|f| f.p_given_acceptable.is_zero());
    let unacc_zero =
        prior_unacceptable.is_zero() || factors.iter().any(|f| f.p_given_unacceptable.is_zero());
    match (acc_zero, unacc_zero) {
        (true, false) => return (0.0, 1.0),
        (false, true) => return (1.0, 0.0),
        (true, true) => unreachable!("degenerate scores are handled by the caller"),
        (false, false) => {}
    }

    let mut log_acc = prior_acceptable.to_f64().ln();
    let mut log_unacc = prior_unacceptable.to_f64().ln();
    for factor in factors {
        log_acc += factor.p_given_acceptable.to_f64().ln();
        log_unacc += factor.p_given_unacceptable.to_f64().ln();
    }
    let max = log_acc.max(log_unacc);
    let exp_acc = (log_acc - max).exp();
    let exp_unacc = (log_unacc - max).exp();
    let total = exp_acc + exp_unacc;
    (exp_acc / total, exp_unacc / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::Facet;
    use crate::journal::{JournalConfig, JournalState};

    fn acct(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    fn rid(s: &str) -> EffectiveReviewerId {
        EffectiveReviewerId::plain(acct(s))
    }

    fn engine(smoothing: Smoothing) -> EngineConfig {
        EngineConfig {
            smoothing,
            prior: PriorMode::Frequency,
            min_prior_reviews: 0,
            ..EngineConfig::default()
        }
    }

    /// The worked pedagogical history: three labeled articles, four
    /// reviewers, and the pending vector r = (0, 1, 0, 1).
    ///
    /// ```text
    ///            r1   r2   r3   r4   label
    /// A1          1    1    0    0   acceptable
    /// A2          -    0    -    0   acceptable
    /// A3          -    1    0    1   unacceptable
    /// ```
    pub(crate) fn table1_training() -> TrainingSet {
        let row = |article: u32, acceptable: bool, votes: &[(&str, bool)]| TrainingRow {
            article: ArticleId::new(article),
            acceptable,
            votes: votes
                .iter()
                .map(|(name, vote)| (rid(name), *vote))
                .collect(),
        };
        let rows = vec![
            row(1, true, &[("r1", true), ("r2", true), ("r3", false), ("r4", false)]),
            row(2, true, &[("r2", false), ("r4", false)]),
            row(3, false, &[("r2", true), ("r3", false), ("r4", true)]),
        ];
        let mut counts = BTreeMap::new();
        for row in &rows {
            for reviewer in row.votes.keys() {
                *counts.entry(reviewer.clone()).or_insert(0) += 1;
            }
        }
        TrainingSet {
            rows,
            published_review_counts: counts,
        }
    }

    pub(crate) fn table1_vector() -> ReviewVector {
        let mut vector = ReviewVector::new();
        vector.insert(rid("r1"), false);
        vector.insert(rid("r2"), true);
        vector.insert(rid("r3"), false);
        vector.insert(rid("r4"), true);
        vector
    }

    #[test]
    fn conditional_frequency_and_laplace_examples() {
        let freq = engine(Smoothing::Frequency);
        // r2 within the acceptable class voted {1, 0}.
        assert_eq!(
            class_conditional(&[true, false], true, &freq).unwrap(),
            Rat::new(1, 2)
        );
        // r4 within the acceptable class voted {0, 0}.
        assert_eq!(
            class_conditional(&[false, false], true, &freq).unwrap(),
            Rat::zero()
        );
        // r2 within the unacceptable class voted {1}.
        assert_eq!(
            class_conditional(&[true], true, &freq).unwrap(),
            Rat::one()
        );
        let laplace = engine(Smoothing::PaperLaplace);
        assert_eq!(
            class_conditional(&[false, false], true, &laplace).unwrap(),
            Rat::new(1, 3)
        );
        let lidstone = engine(Smoothing::Lidstone);
        assert_eq!(
            class_conditional(&[false, false], true, &lidstone).unwrap(),
            Rat::new(1, 4)
        );
        // Empty history: frequency has no data, the others smooth.
        assert_eq!(class_conditional(&[], true, &freq), Err(NbError::NoData));
        assert_eq!(class_conditional(&[], true, &laplace).unwrap(), Rat::one());
        assert_eq!(
            class_conditional(&[], false, &lidstone).unwrap(),
            Rat::new(1, 2)
        );
    }

    #[test]
    fn prior_examples() {
        let training = table1_training();
        assert_eq!(
            class_prior(&training, PriorMode::Frequency).unwrap(),
            Rat::new(2, 3)
        );
        assert_eq!(
            class_prior(&training, PriorMode::Smoothed).unwrap(),
            Rat::new(3, 5)
        );
        let empty = TrainingSet::default();
        assert_eq!(
            class_prior(&empty, PriorMode::Frequency),
            Err(NbError::NoData)
        );
        assert_eq!(
            class_prior(&empty, PriorMode::Smoothed).unwrap(),
            Rat::new(1, 2)
        );
        let all_acceptable = TrainingSet {
            rows: table1_training()
                .rows
                .into_iter()
                .map(|mut r| {
                    r.acceptable = true;
                    r
                })
                .collect(),
            published_review_counts: BTreeMap::new(),
        };
        assert_eq!(
            class_prior(&all_acceptable, PriorMode::Frequency).unwrap(),
            Rat::one()
        );
    }

    #[test]
    fn eligibility_counts_prior_published_reviews() {
        let training = table1_training();
        let vector = table1_vector();
        let eligible = eligible_reviewers(&training, &vector, 2);
        // r1 reviewed only one published article.
        let expected: BTreeSet<_> = [rid("r2"), rid("r3"), rid("r4")].into_iter().collect();
        assert_eq!(eligible, expected);
        assert_eq!(eligible_reviewers(&training, &vector, 0).len(), 4);
        assert!(eligible_reviewers(&training, &ReviewVector::new(), 0).is_empty());
    }

    #[test]
    fn posterior_paper_laplace_matches_hand_evaluation() {
        let training = table1_training();
        let vector = table1_vector();
        let p = posterior_acceptable(&training, &vector, &engine(Smoothing::PaperLaplace)).unwrap();
        assert_eq!(p.p_acceptable, Rat::new(2, 11));
        assert_eq!(p.p_unacceptable, Rat::new(9, 11));
        assert!((p.p_acceptable_f64 - 2.0 / 11.0).abs() < 1e-12);
        assert!(!p.degenerate);
        assert_eq!(p.factors.len(), 4);
        assert_eq!(decide(&p.p_acceptable, &Rat::new(1, 2)), Decision::Reject);
    }

    #[test]
    fn posterior_lidstone_matches_hand_evaluation() {
        let training = table1_training();
        let vector = table1_vector();
        let p = posterior_acceptable(&training, &vector, &engine(Smoothing::Lidstone)).unwrap();
        assert_eq!(p.p_acceptable, Rat::new(3, 11));
        assert!((p.p_acceptable_f64 - 3.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_frequency_collapses_to_zero() {
        let training = table1_training();
        let vector = table1_vector();
        let p = posterior_acceptable(&training, &vector, &engine(Smoothing::Frequency)).unwrap();
        assert_eq!(p.p_acceptable, Rat::zero());
        assert_eq!(p.p_unacceptable, Rat::one());
        assert_eq!(p.p_acceptable_f64, 0.0);
        assert!(!p.degenerate);
        // r1 has no votes on unacceptable articles, so frequency mode
        // drops r1 from both sides: three factors remain.
        assert_eq!(p.factors.len(), 3);
    }

    #[test]
    fn posterior_of_empty_vector_is_the_prior() {
        let training = table1_training();
        let p = posterior_acceptable(
            &training,
            &ReviewVector::new(),
            &engine(Smoothing::PaperLaplace),
        )
        .unwrap();
        assert_eq!(p.p_acceptable, Rat::new(2, 3));
        let empty = TrainingSet::default();
        let err = posterior_acceptable(
            &empty,
            &ReviewVector::new(),
            &engine(Smoothing::PaperLaplace),
        )
        .unwrap_err();
        assert_eq!(err, NbError::NoData);
    }

    #[test]
    fn degenerate_double_zero_falls_back_to_prior() {
        // One reviewer who voted 0 in both classes; a vote of 1 matches
        // neither history and zeroes both frequency products.
        let row = |article: u32, acceptable: bool| TrainingRow {
            article: ArticleId::new(article),
            acceptable,
            votes: [(rid("r1"), false)].into_iter().collect(),
        };
        let training = TrainingSet {
            rows: vec![row(1, true), row(2, false)],
            published_review_counts: [(rid("r1"), 2)].into_iter().collect(),
        };
        let mut vector = ReviewVector::new();
        vector.insert(rid("r1"), true);
        let p = posterior_acceptable(&training, &vector, &engine(Smoothing::Frequency)).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.p_acceptable, Rat::new(1, 2)); // the frequency prior
        assert_eq!(p.p_acceptable_f64, 0.5);
    }

    #[test]
    fn decide_is_strict() {
        assert_eq!(
            decide(&Rat::new(2, 11), &Rat::new(1, 2)),
            Decision::Reject
        );
        assert_eq!(decide(&Rat::new(1, 2), &Rat::new(1, 2)), Decision::Reject);
        assert_eq!(
            decide(&Rat::new(51, 100), &Rat::new(1, 2)),
            Decision::Publish
        );
    }

    #[test]
    fn training_set_from_state_excludes_unlabeled_articles() {
        let mut state = JournalState::new(JournalConfig::default());
        for name in ["a", "r1", "r2"] {
            state.create_account(acct(name), 0).unwrap();
        }
        let (s1, _) = state.submit_article(&acct("a"), None, 0).unwrap();
        let (s2, _) = state.submit_article(&acct("a"), None, 0).unwrap();
        for s in [s1, s2] {
            state.record_review(s, &acct("r1"), true, 1).unwrap();
            state.record_review(s, &acct("r2"), true, 1).unwrap();
        }
        let mut config = state.config().clone();
        config.engine.threshold = Rat::new(2, 5);
        state.run_decision_epoch(3, &config).unwrap();

        // Tie opinions: labeled unacceptable, still included.
        let a1 = ArticleId::new(1);
        state.record_opinion(a1, &acct("r1"), true, 4).unwrap();
        state.record_opinion(a1, &acct("r2"), false, 4).unwrap();
        // A2 gets no opinions: excluded but still counted for eligibility.
        let training = build_training_set(&state, &EngineConfig::default());
        assert_eq!(training.len(), 1);
        assert!(!training.rows[0].acceptable);
        assert_eq!(training.published_review_counts[&rid("r1")], 2);

        let empty = build_training_set(
            &JournalState::new(JournalConfig::default()),
            &EngineConfig::default(),
        );
        assert!(empty.is_empty());
    }

    #[test]
    fn pseudo_reviewers_split_training_identities() {
        let mut state = JournalState::new(JournalConfig::default());
        for name in ["a", "r1"] {
            state.create_account(acct(name), 0).unwrap();
        }
        let (s1, _) = state.submit_article(&acct("a"), None, 0).unwrap();
        state.record_review(s1, &acct("a"), true, 1).unwrap(); // self-review
        state.record_review(s1, &acct("r1"), true, 1).unwrap();
        let mut config = state.config().clone();
        config.engine.threshold = Rat::new(2, 5);
        state.run_decision_epoch(3, &config).unwrap();
        state
            .record_opinion(ArticleId::new(1), &acct("r1"), true, 4)
            .unwrap();

        let mut engine = EngineConfig::default();
        engine.pseudo_reviewers = true;
        let training = build_training_set(&state, &engine);
        let self_key = EffectiveReviewerId::faceted(acct("a"), Facet::SelfWork);
        let others_key = EffectiveReviewerId::faceted(acct("r1"), Facet::OthersWork);
        assert_eq!(training.published_review_counts[&self_key], 1);
        assert_eq!(training.published_review_counts[&others_key], 1);
        assert!(training.rows[0].votes.contains_key(&self_key));
    }
}
