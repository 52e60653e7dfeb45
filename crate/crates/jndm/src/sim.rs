//! Seeded agent-based simulation of the whole journal mechanism.
//!
//! Articles are opaque quality bits drawn from a Bernoulli prior; agents
//! are reviewers, readers, or both, each with a strategy and a competence
//! (the probability of voting an article's true quality). Each epoch the
//! simulator generates submissions, assigns reviewers round-robin over the
//! review queue, lets strategic agents push extra reviews, collects reader
//! opinions on published articles, and runs a decision epoch. Everything is
//! driven by one seeded RNG over fixed iteration orders, so a config fully
//! determines the event log.
//!
//! Automatic reviewers plug in through [`ReviewerAgent`]; a plugin
//! registered as privileged additionally sees counterfactual reader labels
//! for rejected submissions, and every such lookup is recorded in the run's
//! access trail (never in the public event log).

use std::cell::RefCell;
use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::EngineConfig;
use crate::ids::{AccountId, SubmissionId};
use crate::journal::{
    DecisionOutcome, Epoch, EventKind, JournalConfig, JournalError, JournalState, Label,
    SubmissionStatus,
};
use crate::reputation;
use crate::store::{EventLog, Journal};

/// How faithfully the structured quality signal shown to plugin reviewers
/// tracks an article's true quality.
pub const PLUGIN_SIGNAL_FIDELITY: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Reviewer,
    Reader,
    Both,
}

impl Role {
    pub fn reviews(&self) -> bool {
        matches!(self, Role::Reviewer | Role::Both)
    }

    pub fn reads(&self) -> bool {
        matches!(self, Role::Reader | Role::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Honest,
    Random,
    Contrarian,
    SelfPromoter,
    Colluder,
    Plugin,
}

/// A resolved agent strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Votes the true quality with probability `competence`.
    Honest,
    /// Votes accept with probability 1/2, regardless of quality.
    Random,
    /// Votes against the true quality with probability `competence`.
    Contrarian,
    /// Accepts own submissions unconditionally, otherwise honest.
    SelfPromoter,
    /// Accepts submissions authored inside the clique, otherwise honest.
    Colluder(u32),
    /// Delegates to a registered automatic reviewer.
    Plugin(String),
}

impl Strategy {
    /// Stable label used to group per-strategy metrics.
    pub fn label(&self) -> String {
        match self {
            Strategy::Honest => "honest".to_string(),
            Strategy::Random => "random".to_string(),
            Strategy::Contrarian => "contrarian".to_string(),
            Strategy::SelfPromoter => "self-promoter".to_string(),
            Strategy::Colluder(_) => "colluder".to_string(),
            Strategy::Plugin(name) => format!("plugin:{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentProfile {
    pub role: Role,
    pub strategy: Strategy,
    pub competence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: AccountId,
    pub profile: AgentProfile,
    pub group: usize,
}

/// One population group in a simulation config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationGroup {
    pub count: u32,
    pub role: Role,
    pub strategy: StrategyKind,
    /// Probability of voting the true quality; defaults to 1.
    #[serde(default = "default_competence")]
    pub competence: f64,
    /// Required for colluder groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clique: Option<u32>,
    /// Required for plugin groups: a registered reviewer name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plugin: Option<String>,
    /// Account id prefix; defaults to the strategy name plus group index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn default_competence() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub epochs: Epoch,
    pub submissions_per_epoch: u32,
    pub reviews_per_submission: u32,
    pub readers_per_article: u32,
    /// Probability that a generated submission is truly acceptable.
    pub article_quality_prior: f64,
    pub population: Vec<PopulationGroup>,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default = "default_review_window")]
    pub review_window: Epoch,
    #[serde(default = "default_min_reviews")]
    pub min_reviews: u32,
    /// Exclude decisions taken before any reviewer reached eligibility
    /// from the decision metrics.
    #[serde(default = "default_true")]
    pub exclude_warmup: bool,
    /// Optional cap on round-robin review assignments per agent per epoch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reviewer_capacity: Option<u32>,
}

fn default_review_window() -> Epoch {
    3
}

fn default_min_reviews() -> u32 {
    2
}

fn default_true() -> bool {
    true
}

impl SimConfig {
    pub fn journal_config(&self) -> JournalConfig {
        JournalConfig {
            review_window: self.review_window,
            min_reviews: self.min_reviews,
            engine: self.engine.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(SimError::InvalidConfig(format!(
                    "{name} must lie in [0, 1], got {p}"
                )))
            }
        };
        prob("article_quality_prior", self.article_quality_prior)?;
        for (index, group) in self.population.iter().enumerate() {
            prob(&format!("population[{index}].competence"), group.competence)?;
            if group.strategy == StrategyKind::Colluder && group.clique.is_none() {
                return Err(SimError::InvalidConfig(format!(
                    "population[{index}]: colluder groups need a clique id"
                )));
            }
            if group.strategy == StrategyKind::Plugin && group.plugin.is_none() {
                return Err(SimError::InvalidConfig(format!(
                    "population[{index}]: plugin groups need a plugin name"
                )));
            }
        }
        self.engine
            .validate()
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("unknown plugin `{0}`")]
    UnknownPlugin(String),
    #[error("ground truth is missing submission {0}")]
    GroundTruthMismatch(SubmissionId),
    #[error(transparent)]
    Journal(#[from] JournalError),
    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
}

// ----- automatic reviewers ---------------------------------------------------

/// Counterfactual reader labels for rejected submissions. Handed only to
/// plugins registered as privileged; every lookup lands in the access
/// trail.
#[derive(Debug, Default)]
pub struct PrivilegedDataView {
    labels: BTreeMap<SubmissionId, bool>,
    accesses: RefCell<Vec<PrivilegedAccess>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivilegedAccess {
    pub epoch: Epoch,
    pub agent: AccountId,
    pub submission: SubmissionId,
}

impl PrivilegedDataView {
    /// What the readers would have said about a rejected submission.
    pub fn rejected_label(
        &self,
        agent: &AccountId,
        submission: SubmissionId,
        epoch: Epoch,
    ) -> Option<bool> {
        self.accesses.borrow_mut().push(PrivilegedAccess {
            epoch,
            agent: agent.clone(),
            submission,
        });
        self.labels.get(&submission).copied()
    }

    fn record_rejection(&mut self, submission: SubmissionId, quality: bool) {
        self.labels.insert(submission, quality);
    }

    fn take_accesses(&mut self) -> Vec<PrivilegedAccess> {
        self.accesses.get_mut().drain(..).collect()
    }
}

/// Everything an automatic reviewer sees when asked to review one
/// submission: structured features and the public journal state, plus the
/// privileged view when the plugin is registered for it.
pub struct ReviewContext<'a> {
    pub submission: SubmissionId,
    pub author: &'a AccountId,
    pub reviewer: &'a AccountId,
    pub epoch: Epoch,
    /// Noisy indicator of the submission's true quality
    /// (see [`PLUGIN_SIGNAL_FIDELITY`]).
    pub quality_signal: bool,
    pub state: &'a JournalState,
    privileged: Option<&'a PrivilegedDataView>,
}

impl ReviewContext<'_> {
    /// Counterfactual label of a rejected submission, when this reviewer
    /// is privileged. The lookup is recorded.
    pub fn privileged_label(&self, submission: SubmissionId) -> Option<bool> {
        self.privileged?
            .rejected_label(self.reviewer, submission, self.epoch)
    }

    pub fn is_privileged(&self) -> bool {
        self.privileged.is_some()
    }
}

/// An automatic reviewer competing alongside human strategies.
pub trait ReviewerAgent {
    /// Recommend acceptance (`Some(true)`), rejection (`Some(false)`), or
    /// abstain (`None`). Must be deterministic in the context.
    fn review(&mut self, ctx: &ReviewContext<'_>) -> Option<bool>;
}

type PluginFactory = Box<dyn Fn() -> Box<dyn ReviewerAgent>>;

/// Named automatic-reviewer constructors; plugin population groups resolve
/// against this.
pub struct PluginRegistry {
    entries: BTreeMap<String, (bool, PluginFactory)>,
}

impl PluginRegistry {
    pub fn empty() -> Self {
        PluginRegistry {
            entries: BTreeMap::new(),
        }
    }

    /// The built-in reviewers: `author-stats` votes from the author's
    /// public track record; `privileged-author-stats` additionally counts
    /// counterfactual labels of the author's rejected submissions.
    pub fn with_builtins() -> Self {
        let mut registry = PluginRegistry::empty();
        registry.register("author-stats", || Box::new(AuthorStats));
        registry.register_privileged("privileged-author-stats", || Box::new(PrivilegedAuthorStats));
        registry
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn() -> Box<dyn ReviewerAgent> + 'static,
    {
        self.entries
            .insert(name.to_string(), (false, Box::new(factory)));
    }

    pub fn register_privileged<F>(&mut self, name: &str, factory: F)
    where
        F: Fn() -> Box<dyn ReviewerAgent> + 'static,
    {
        self.entries
            .insert(name.to_string(), (true, Box::new(factory)));
    }

    fn instantiate(&self, name: &str) -> Option<(bool, Box<dyn ReviewerAgent>)> {
        self.entries
            .get(name)
            .map(|(privileged, factory)| (*privileged, factory()))
    }
}

/// Votes accept when the author's labeled published articles are mostly
/// acceptable; falls back to the quality signal for unseen authors.
struct AuthorStats;

fn author_public_record(ctx: &ReviewContext<'_>) -> (u32, u32) {
    let mut acceptable = 0;
    let mut labeled = 0;
    for article in ctx.state.articles() {
        if article.author != *ctx.author {
            continue;
        }
        match ctx.state.label_of(&article.id).expect("article exists").label {
            Label::Acceptable => {
                acceptable += 1;
                labeled += 1;
            }
            Label::Unacceptable => labeled += 1,
            Label::Unlabeled => {}
        }
    }
    (acceptable, labeled)
}

impl ReviewerAgent for AuthorStats {
    fn review(&mut self, ctx: &ReviewContext<'_>) -> Option<bool> {
        let (acceptable, labeled) = author_public_record(ctx);
        if labeled == 0 {
            Some(ctx.quality_signal)
        } else {
            Some(2 * acceptable >= labeled)
        }
    }
}

/// Like [`AuthorStats`], plus counterfactual labels of the author's
/// rejected submissions from the privileged view.
struct PrivilegedAuthorStats;

impl ReviewerAgent for PrivilegedAuthorStats {
    fn review(&mut self, ctx: &ReviewContext<'_>) -> Option<bool> {
        let (mut acceptable, mut labeled) = author_public_record(ctx);
        for submission in ctx.state.submissions() {
            if submission.author != *ctx.author || submission.id == ctx.submission {
                continue;
            }
            let rejected = matches!(
                submission.status,
                SubmissionStatus::Rejected | SubmissionStatus::RejectedWithoutPrejudice
            );
            if rejected {
                if let Some(label) = ctx.privileged_label(submission.id) {
                    labeled += 1;
                    if label {
                        acceptable += 1;
                    }
                }
            }
        }
        if labeled == 0 {
            Some(ctx.quality_signal)
        } else {
            Some(2 * acceptable >= labeled)
        }
    }
}

// ----- population ------------------------------------------------------------

/// Expand the population spec into concrete agents. Deterministic: the
/// same config always yields the same agent list.
pub fn generate_population(config: &SimConfig) -> Result<Vec<Agent>, SimError> {
    let mut agents = Vec::new();
    let mut labels = std::collections::BTreeSet::new();
    for (group, spec) in config.population.iter().enumerate() {
        let label = spec.name.clone().unwrap_or_else(|| {
            let kind = match spec.strategy {
                StrategyKind::Honest => "honest",
                StrategyKind::Random => "random",
                StrategyKind::Contrarian => "contrarian",
                StrategyKind::SelfPromoter => "promoter",
                StrategyKind::Colluder => "colluder",
                StrategyKind::Plugin => "plugin",
            };
            format!("{kind}{group}")
        });
        if !labels.insert(label.clone()) {
            return Err(SimError::InvalidConfig(format!(
                "duplicate population group label `{label}`"
            )));
        }
        let strategy = match spec.strategy {
            StrategyKind::Honest => Strategy::Honest,
            StrategyKind::Random => Strategy::Random,
            StrategyKind::Contrarian => Strategy::Contrarian,
            StrategyKind::SelfPromoter => Strategy::SelfPromoter,
            StrategyKind::Colluder => Strategy::Colluder(
                spec.clique
                    .ok_or_else(|| SimError::InvalidConfig("colluder without clique".into()))?,
            ),
            StrategyKind::Plugin => Strategy::Plugin(
                spec.plugin
                    .clone()
                    .ok_or_else(|| SimError::InvalidConfig("plugin without name".into()))?,
            ),
        };
        for i in 0..spec.count {
            let id = AccountId::new(format!("{label}-{i}"))
                .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
            agents.push(Agent {
                id,
                profile: AgentProfile {
                    role: spec.role,
                    strategy: strategy.clone(),
                    competence: spec.competence,
                },
                group,
            });
        }
    }
    Ok(agents)
}

// ----- metrics ---------------------------------------------------------------

/// Per-agent facts the simulator knows and the journal does not.
#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    /// True quality of every generated submission.
    pub qualities: BTreeMap<SubmissionId, bool>,
    /// Strategy label and role per agent.
    pub agents: BTreeMap<AccountId, AgentTag>,
    pub exclude_warmup: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentTag {
    pub strategy: String,
    pub role: Role,
}

/// Mechanism-performance metrics over one run. Undefined quantities are
/// absent, never zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    /// Fraction of classifier-decided submissions whose outcome matches
    /// their true quality.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision_accuracy: Option<f64>,
    /// Mean precision of honest reviewers minus mean precision of random
    /// reviewers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaderboard_alignment: Option<f64>,
    /// Publish rate of classifier-decided submissions per author strategy.
    pub per_strategy_publish_rate: BTreeMap<String, f64>,
    /// Self-promoter own-article publish rate minus the honest-author
    /// baseline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploit_gain: Option<f64>,
}

/// Recompute metrics from a persisted log plus the run's ground truth.
pub fn compute_metrics(log: &EventLog, truth: &GroundTruth) -> Result<SimMetrics, SimError> {
    struct Decided {
        epoch: Epoch,
        submission: SubmissionId,
        published: bool,
        with_prejudice: bool,
        informed: bool,
    }

    let mut decisions = Vec::new();
    for record in log.events() {
        if let EventKind::DecisionTaken {
            submission,
            outcome,
            eligible,
            ..
        } = &record.kind
        {
            decisions.push(Decided {
                epoch: record.epoch,
                submission: *submission,
                published: *outcome == DecisionOutcome::Published,
                with_prejudice: *outcome != DecisionOutcome::RejectedWithoutPrejudice,
                informed: !eligible.is_empty(),
            });
        }
    }

    let warmup_end = decisions.iter().find(|d| d.informed).map(|d| d.epoch);
    let counted: Vec<&Decided> = decisions
        .iter()
        .filter(|d| d.with_prejudice)
        .filter(|d| {
            !truth.exclude_warmup || warmup_end.is_some_and(|end| d.epoch >= end)
        })
        .collect();

    let mut correct = 0usize;
    let mut per_strategy: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let state = log.replay()?;
    for decided in &counted {
        let quality = truth
            .qualities
            .get(&decided.submission)
            .copied()
            .ok_or(SimError::GroundTruthMismatch(decided.submission))?;
        if decided.published == quality {
            correct += 1;
        }
        let author = &state
            .submission(&decided.submission)
            .ok_or(SimError::GroundTruthMismatch(decided.submission))?
            .author;
        if let Some(tag) = truth.agents.get(author) {
            let entry = per_strategy.entry(tag.strategy.clone()).or_insert((0, 0));
            entry.1 += 1;
            if decided.published {
                entry.0 += 1;
            }
        }
    }

    let decision_accuracy = if counted.is_empty() {
        None
    } else {
        Some(correct as f64 / counted.len() as f64)
    };
    let per_strategy_publish_rate: BTreeMap<String, f64> = per_strategy
        .iter()
        .map(|(k, (published, total))| (k.clone(), *published as f64 / *total as f64))
        .collect();
    let exploit_gain = match (
        per_strategy_publish_rate.get("self-promoter"),
        per_strategy_publish_rate.get("honest"),
    ) {
        (Some(promoter), Some(honest)) => Some(promoter - honest),
        _ => None,
    };

    let group_mean_precision = |label: &str| -> Option<f64> {
        let precisions: Vec<f64> = truth
            .agents
            .iter()
            .filter(|(_, tag)| tag.strategy == label && tag.role.reviews())
            .filter_map(|(id, _)| reputation::reviewer_precision(&state, id).precision())
            .collect();
        if precisions.is_empty() {
            None
        } else {
            Some(precisions.iter().sum::<f64>() / precisions.len() as f64)
        }
    };
    let leaderboard_alignment = match (group_mean_precision("honest"), group_mean_precision("random"))
    {
        (Some(honest), Some(random)) => Some(honest - random),
        _ => None,
    };

    Ok(SimMetrics {
        decision_accuracy,
        leaderboard_alignment,
        per_strategy_publish_rate,
        exploit_gain,
    })
}

// ----- the run ---------------------------------------------------------------

/// Output of one simulation run.
pub struct SimRun {
    pub log: EventLog,
    pub final_state: JournalState,
    pub metrics: SimMetrics,
    pub truth: GroundTruth,
    /// Privileged-view lookups made during the run; empty unless a
    /// privileged plugin participated.
    pub privileged_accesses: Vec<PrivilegedAccess>,
}

/// Run a simulation with the built-in plugin registry.
pub fn simulate(config: &SimConfig) -> Result<SimRun, SimError> {
    simulate_with(config, &PluginRegistry::with_builtins())
}

pub fn simulate_with(config: &SimConfig, registry: &PluginRegistry) -> Result<SimRun, SimError> {
    config.validate()?;
    let agents = generate_population(config)?;

    let mut plugins: BTreeMap<AccountId, Box<dyn ReviewerAgent>> = BTreeMap::new();
    let mut privileged_agents: std::collections::BTreeSet<AccountId> = Default::default();
    for agent in &agents {
        if let Strategy::Plugin(name) = &agent.profile.strategy {
            let (privileged, instance) = registry
                .instantiate(name)
                .ok_or_else(|| SimError::UnknownPlugin(name.clone()))?;
            plugins.insert(agent.id.clone(), instance);
            if privileged {
                privileged_agents.insert(agent.id.clone());
            }
        }
    }

    let journal_config = config.journal_config();
    let mut journal = Journal::new(journal_config.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut truth = GroundTruth {
        qualities: BTreeMap::new(),
        agents: agents
            .iter()
            .map(|a| {
                (
                    a.id.clone(),
                    AgentTag {
                        strategy: a.profile.strategy.label(),
                        role: a.profile.role,
                    },
                )
            })
            .collect(),
        exclude_warmup: config.exclude_warmup,
    };
    let mut privileged_view = PrivilegedDataView::default();
    let mut signals: BTreeMap<SubmissionId, bool> = BTreeMap::new();
    let cliques: BTreeMap<AccountId, u32> = agents
        .iter()
        .filter_map(|a| match a.profile.strategy {
            Strategy::Colluder(c) => Some((a.id.clone(), c)),
            _ => None,
        })
        .collect();

    let reviewer_indices: Vec<usize> = agents
        .iter()
        .enumerate()
        .filter(|(_, a)| a.profile.role.reviews())
        .map(|(i, _)| i)
        .collect();
    let reader_indices: Vec<usize> = agents
        .iter()
        .enumerate()
        .filter(|(_, a)| a.profile.role.reads())
        .map(|(i, _)| i)
        .collect();
    let mut review_cursor = 0usize;
    let mut reader_cursor = 0usize;

    if config.epochs > 0 {
        for agent in &agents {
            journal.create_account(agent.id.clone(), 0)?;
        }
    }

    for epoch in 0..config.epochs {
        // New submissions: author drawn uniformly, quality from the prior.
        for _ in 0..config.submissions_per_epoch {
            if agents.is_empty() {
                break;
            }
            let author = &agents[rng.gen_range(0..agents.len())];
            let quality = rng.gen_bool(config.article_quality_prior);
            let signal = if rng.gen_bool(PLUGIN_SIGNAL_FIDELITY) {
                quality
            } else {
                !quality
            };
            let id = journal.submit_article(&author.id, None, epoch)?;
            truth.qualities.insert(id, quality);
            signals.insert(id, signal);
        }

        // Round-robin review assignment over the queue, most urgent first.
        if !reviewer_indices.is_empty() {
            let mut assigned_this_epoch: BTreeMap<AccountId, u32> = BTreeMap::new();
            for submission in journal.state().review_queue() {
                let existing = journal
                    .state()
                    .reviews_of(&submission)
                    .map(|m| m.len() as u32)
                    .unwrap_or(0);
                let mut missing = config.reviews_per_submission.saturating_sub(existing);
                let mut attempts = 0;
                while missing > 0 && attempts < reviewer_indices.len() {
                    let agent = &agents[reviewer_indices[review_cursor % reviewer_indices.len()]];
                    review_cursor += 1;
                    attempts += 1;
                    let already_voted = journal
                        .state()
                        .reviews_of(&submission)
                        .is_some_and(|m| m.contains_key(&agent.id));
                    if already_voted {
                        continue;
                    }
                    if let Some(cap) = config.reviewer_capacity {
                        if assigned_this_epoch.get(&agent.id).copied().unwrap_or(0) >= cap {
                            continue;
                        }
                    }
                    let vote = cast_review_vote(
                        agent,
                        submission,
                        epoch,
                        &truth,
                        &signals,
                        &cliques,
                        journal.state(),
                        &mut plugins,
                        &privileged_agents,
                        &privileged_view,
                        &mut rng,
                    );
                    if let Some(vote) = vote {
                        journal.record_review(submission, &agent.id, vote, epoch)?;
                        *assigned_this_epoch.entry(agent.id.clone()).or_insert(0) += 1;
                        missing -= 1;
                    }
                }
            }
        }

        // Strategic extra reviews: self-promoters push their own work,
        // colluders push their clique's.
        for submission in journal.state().review_queue() {
            let author = journal
                .state()
                .submission(&submission)
                .expect("queued submission exists")
                .author
                .clone();
            let author_clique = cliques.get(&author).copied();
            for index in &reviewer_indices {
                let agent = &agents[*index];
                let pushes = match &agent.profile.strategy {
                    Strategy::SelfPromoter => agent.id == author,
                    Strategy::Colluder(c) => author_clique == Some(*c),
                    _ => false,
                };
                if !pushes {
                    continue;
                }
                let current = journal
                    .state()
                    .reviews_of(&submission)
                    .and_then(|m| m.get(&agent.id))
                    .map(|r| r.vote);
                if current != Some(true) {
                    journal.record_review(submission, &agent.id, true, epoch)?;
                }
            }
        }

        // Reader opinions on published articles, round-robin until each
        // article gains up to `readers_per_article` new opinions.
        if !reader_indices.is_empty() {
            let articles: Vec<(crate::ids::ArticleId, SubmissionId)> = journal
                .state()
                .articles()
                .map(|a| (a.id, a.submission))
                .collect();
            for (article, submission) in articles {
                let quality = truth.qualities[&submission];
                let mut added = 0;
                let mut attempts = 0;
                while added < config.readers_per_article && attempts < reader_indices.len() {
                    let agent = &agents[reader_indices[reader_cursor % reader_indices.len()]];
                    reader_cursor += 1;
                    attempts += 1;
                    let already = journal
                        .state()
                        .opinions_of(&article)
                        .is_some_and(|m| m.contains_key(&agent.id));
                    if already {
                        continue;
                    }
                    let opinion = cast_reader_opinion(agent, quality, &mut rng);
                    journal.record_opinion(article, &agent.id, opinion, epoch)?;
                    added += 1;
                }
            }
        }

        // Decide everything due this epoch.
        let records = journal.run_decision_epoch(epoch, &journal_config)?;
        for record in &records {
            if record.outcome != DecisionOutcome::Published {
                privileged_view
                    .record_rejection(record.submission, truth.qualities[&record.submission]);
            }
        }
    }

    let metrics = compute_metrics(journal.log(), &truth)?;
    let privileged_accesses = privileged_view.take_accesses();
    let final_state = journal.state().clone();
    Ok(SimRun {
        log: journal.into_log(),
        final_state,
        metrics,
        truth,
        privileged_accesses,
    })
}

fn vote_with_competence(truth: bool, competence: f64, rng: &mut ChaCha8Rng) -> bool {
    if rng.gen_bool(competence) {
        truth
    } else {
        !truth
    }
}

#[allow(clippy::too_many_arguments)]
fn cast_review_vote(
    agent: &Agent,
    submission: SubmissionId,
    epoch: Epoch,
    truth: &GroundTruth,
    signals: &BTreeMap<SubmissionId, bool>,
    cliques: &BTreeMap<AccountId, u32>,
    state: &JournalState,
    plugins: &mut BTreeMap<AccountId, Box<dyn ReviewerAgent>>,
    privileged_agents: &std::collections::BTreeSet<AccountId>,
    privileged_view: &PrivilegedDataView,
    rng: &mut ChaCha8Rng,
) -> Option<bool> {
    let quality = truth.qualities[&submission];
    let author = &state
        .submission(&submission)
        .expect("submission exists")
        .author
        .clone();
    let competence = agent.profile.competence;
    match &agent.profile.strategy {
        Strategy::Honest => Some(vote_with_competence(quality, competence, rng)),
        Strategy::Random => Some(rng.gen_bool(0.5)),
        Strategy::Contrarian => Some(vote_with_competence(!quality, competence, rng)),
        Strategy::SelfPromoter => {
            if agent.id == *author {
                Some(true)
            } else {
                Some(vote_with_competence(quality, competence, rng))
            }
        }
        Strategy::Colluder(clique) => {
            if cliques.get(author) == Some(clique) {
                Some(true)
            } else {
                Some(vote_with_competence(quality, competence, rng))
            }
        }
        Strategy::Plugin(_) => {
            let ctx = ReviewContext {
                submission,
                author,
                reviewer: &agent.id,
                epoch,
                quality_signal: signals[&submission],
                state,
                privileged: privileged_agents
                    .contains(&agent.id)
                    .then_some(privileged_view),
            };
            plugins
                .get_mut(&agent.id)
                .expect("plugin instantiated at startup")
                .review(&ctx)
        }
    }
}

fn cast_reader_opinion(agent: &Agent, quality: bool, rng: &mut ChaCha8Rng) -> bool {
    let competence = agent.profile.competence;
    match &agent.profile.strategy {
        Strategy::Random => rng.gen_bool(0.5),
        Strategy::Contrarian => vote_with_competence(!quality, competence, rng),
        _ => vote_with_competence(quality, competence, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(count: u32, role: Role, strategy: StrategyKind, competence: f64) -> PopulationGroup {
        PopulationGroup {
            count,
            role,
            strategy,
            competence,
            clique: None,
            plugin: None,
            name: None,
        }
    }

    fn tiny_config() -> SimConfig {
        SimConfig {
            seed: 7,
            epochs: 5,
            submissions_per_epoch: 2,
            reviews_per_submission: 2,
            readers_per_article: 2,
            article_quality_prior: 1.0,
            population: vec![group(4, Role::Both, StrategyKind::Honest, 1.0)],
            engine: EngineConfig {
                threshold: crate::rational::Rat::new(9, 20),
                ..EngineConfig::default()
            },
            review_window: 1,
            min_reviews: 2,
            exclude_warmup: true,
            reviewer_capacity: None,
        }
    }

    #[test]
    fn population_is_deterministic_and_counted() {
        let config = SimConfig {
            population: vec![group(5, Role::Reviewer, StrategyKind::Honest, 1.0)],
            ..tiny_config()
        };
        let population = generate_population(&config).unwrap();
        assert_eq!(population.len(), 5);
        assert!(population
            .iter()
            .all(|a| a.profile.competence == 1.0 && a.profile.strategy == Strategy::Honest));
        let again = generate_population(&config).unwrap();
        assert_eq!(population, again);

        let empty = SimConfig {
            population: vec![],
            ..tiny_config()
        };
        assert!(generate_population(&empty).unwrap().is_empty());
    }

    #[test]
    fn zero_epochs_yield_an_empty_run_with_absent_metrics() {
        let config = SimConfig {
            epochs: 0,
            ..tiny_config()
        };
        let run = simulate(&config).unwrap();
        assert!(run.log.is_empty());
        assert_eq!(run.metrics.decision_accuracy, None);
        assert_eq!(run.metrics.leaderboard_alignment, None);
        assert_eq!(run.metrics.exploit_gain, None);
        assert!(run.metrics.per_strategy_publish_rate.is_empty());
    }

    #[test]
    fn same_seed_reproduces_the_log_byte_for_byte() {
        let config = tiny_config();
        let a = simulate(&config).unwrap();
        let b = simulate(&config).unwrap();
        assert_eq!(a.log.to_string(), b.log.to_string());
        assert_eq!(a.final_state.digest(), b.final_state.digest());
        assert_eq!(a.metrics, b.metrics);
    }

    /// Hand-checked tiny run: four perfect reviewer-readers, every article
    /// truly acceptable. Decisions before eligibility publish on the
    /// smoothed prior (threshold 9/20); once reviewers have two published
    /// reviews their factors only push the posterior higher, so every
    /// decision publishes and accuracy is exactly 1.
    #[test]
    fn perfect_agents_reach_full_accuracy_after_warmup() {
        let run = simulate(&tiny_config()).unwrap();
        let published = run
            .final_state
            .articles()
            .count();
        let decided: Vec<_> = run
            .final_state
            .submissions()
            .filter(|s| !s.status.is_open())
            .collect();
        assert_eq!(decided.len(), 8); // submissions from epochs 0..=3
        assert_eq!(published, 8); // all published: q = 1 and permissive threshold
        assert_eq!(run.metrics.decision_accuracy, Some(1.0));
        // Warm-up ends once some reviewer has two published reviews.
        assert!(run.truth.exclude_warmup);
    }

    #[test]
    fn replay_reproduces_the_simulated_state() {
        let run = simulate(&tiny_config()).unwrap();
        let replayed = run.log.replay().unwrap();
        assert_eq!(replayed.digest(), run.final_state.digest());
        let verified = run.log.replay_verified().unwrap();
        assert_eq!(verified.digest(), run.final_state.digest());
    }

    #[test]
    fn metrics_arithmetic_on_constructed_runs() {
        // Two decided submissions, both correct: accuracy 1.0.
        let mut config = tiny_config();
        config.epochs = 3;
        let run = simulate(&config).unwrap();
        let recomputed = compute_metrics(&run.log, &run.truth).unwrap();
        assert_eq!(recomputed, run.metrics);
        // No self-promoters in the population: exploit gain is absent.
        assert_eq!(run.metrics.exploit_gain, None);
    }

    #[test]
    fn invalid_configs_are_rejected_before_running() {
        let mut config = tiny_config();
        config.article_quality_prior = 1.5;
        assert!(matches!(
            simulate(&config),
            Err(SimError::InvalidConfig(_))
        ));

        let mut config = tiny_config();
        config.population[0].competence = -0.1;
        assert!(simulate(&config).is_err());

        let mut config = tiny_config();
        config.population.push(PopulationGroup {
            count: 1,
            role: Role::Reviewer,
            strategy: StrategyKind::Colluder,
            competence: 1.0,
            clique: None,
            plugin: None,
            name: None,
        });
        assert!(matches!(
            simulate(&config),
            Err(SimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn unknown_plugins_are_reported() {
        let mut config = tiny_config();
        config.population.push(PopulationGroup {
            count: 1,
            role: Role::Reviewer,
            strategy: StrategyKind::Plugin,
            competence: 1.0,
            clique: None,
            plugin: Some("no-such-reviewer".to_string()),
            name: None,
        });
        assert!(matches!(simulate(&config), Err(SimError::UnknownPlugin(_))));
    }

    #[test]
    fn privileged_access_trail_is_empty_without_privileged_plugins() {
        let mut config = tiny_config();
        config.article_quality_prior = 0.5;
        config.population.push(PopulationGroup {
            count: 1,
            role: Role::Reviewer,
            strategy: StrategyKind::Plugin,
            competence: 1.0,
            clique: None,
            plugin: Some("author-stats".to_string()),
            name: None,
        });
        let run = simulate(&config).unwrap();
        assert!(run.privileged_accesses.is_empty());
    }

    #[test]
    fn privileged_plugin_lookups_are_recorded() {
        let mut config = tiny_config();
        config.epochs = 10;
        config.reviews_per_submission = 3;
        config.article_quality_prior = 0.0; // every decision is a rejection to peek at
        config.population[0].count = 3;
        config.engine.threshold = crate::rational::Rat::new(1, 2);
        config.population.push(PopulationGroup {
            count: 1,
            role: Role::Reviewer,
            strategy: StrategyKind::Plugin,
            competence: 1.0,
            clique: None,
            plugin: Some("privileged-author-stats".to_string()),
            name: None,
        });
        let run = simulate(&config).unwrap();
        assert!(!run.privileged_accesses.is_empty());
        let agent = &run.privileged_accesses[0].agent;
        assert!(agent.as_str().starts_with("plugin1-"));
        // The access trail never enters the public log.
        assert!(!run.log.to_string().contains("privileged"));
    }
}
