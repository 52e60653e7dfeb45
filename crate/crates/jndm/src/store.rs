//! Append-only event log persistence and deterministic replay.
//!
//! A journal file (`.jnl`) is UTF-8 JSON Lines: the first line is a header
//! carrying the schema version and the journal configuration, and every
//! following line is one event with a dense `seq` starting at 1. Records
//! are immutable once appended. Posteriors and thresholds are serialized as
//! exact rational strings, never floats, so replaying a log on any machine
//! reproduces the state bit for bit.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{AccountId, SubmissionId};
use crate::journal::{
    DecisionRecord, Epoch, Event, EventKind, JournalConfig, JournalError, JournalState,
};

/// Schema tag written into every log header.
pub const SCHEMA: &str = "jndm-journal/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema: String,
    pub config: JournalConfig,
}

/// One persisted event: a dense sequence number plus the journal event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    pub epoch: Epoch,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl EventRecord {
    pub fn event(&self) -> Event {
        Event {
            epoch: self.epoch,
            kind: self.kind.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {source}")]
    Malformed {
        line: usize,
        source: serde_json::Error,
    },
    #[error("missing header record")]
    MissingHeader,
    #[error("unsupported schema `{0}`, expected `{SCHEMA}`")]
    SchemaMismatch(String),
    #[error("corrupt log: expected seq {expected}, got {got}")]
    SequenceError { expected: u64, got: u64 },
    #[error("replay failed at seq {seq}: {source}")]
    Replay { seq: u64, source: JournalError },
    #[error("verification failed at seq {seq}: {reason}")]
    VerifyMismatch { seq: u64, reason: String },
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::Io(_) => "IO_ERROR",
            StoreError::Malformed { .. } => "MALFORMED_RECORD",
            StoreError::MissingHeader => "MISSING_HEADER",
            StoreError::SchemaMismatch(_) => "SCHEMA_MISMATCH",
            StoreError::SequenceError { .. } => "SEQUENCE_ERROR",
            StoreError::Replay { .. } => "REPLAY_ERROR",
            StoreError::VerifyMismatch { .. } => "VERIFY_MISMATCH",
        }
    }
}

/// An in-memory event log: header plus dense, immutable records.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    header: LogHeader,
    events: Vec<EventRecord>,
}

impl EventLog {
    pub fn new(config: JournalConfig) -> Self {
        EventLog {
            header: LogHeader {
                schema: SCHEMA.to_string(),
                config,
            },
            events: Vec::new(),
        }
    }

    pub fn header(&self) -> &LogHeader {
        &self.header
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    fn next_seq(&self) -> u64 {
        self.events.len() as u64 + 1
    }

    /// Append a pre-sequenced record; its seq must be exactly last+1.
    pub fn append_record(&mut self, record: EventRecord) -> Result<(), StoreError> {
        if record.seq != self.next_seq() {
            return Err(StoreError::SequenceError {
                expected: self.next_seq(),
                got: record.seq,
            });
        }
        self.events.push(record);
        Ok(())
    }

    /// Append a journal event, assigning the next sequence number.
    pub fn push(&mut self, event: Event) -> &EventRecord {
        let record = EventRecord {
            seq: self.next_seq(),
            epoch: event.epoch,
            kind: event.kind,
        };
        self.events.push(record);
        self.events.last().expect("just pushed")
    }

    /// Fold the log into journal state. Pure: identical logs produce
    /// identical states.
    pub fn replay(&self) -> Result<JournalState, StoreError> {
        let mut state = JournalState::new(self.header.config.clone());
        for record in &self.events {
            state
                .apply(&record.event())
                .map_err(|source| StoreError::Replay {
                    seq: record.seq,
                    source,
                })?;
        }
        Ok(state)
    }

    /// Replay and additionally recompute every decision epoch from the
    /// state preceding it, checking that the recorded decisions (outcomes,
    /// posteriors, eligibility, digests) match what the engine derives
    /// from the recorded configuration. Detects tampered votes, opinions,
    /// or decisions.
    pub fn replay_verified(&self) -> Result<JournalState, StoreError> {
        let mut state = JournalState::new(self.header.config.clone());
        let mut index = 0;
        while index < self.events.len() {
            let record = &self.events[index];
            match &record.kind {
                EventKind::DecisionEpochRun { config, .. } => {
                    let mut recomputed = state.clone();
                    let (_, expected) = recomputed
                        .run_decision_epoch(record.epoch, config)
                        .map_err(|source| StoreError::Replay {
                            seq: record.seq,
                            source,
                        })?;
                    for event in &expected {
                        let actual = self.events.get(index).ok_or_else(|| {
                            StoreError::VerifyMismatch {
                                seq: self.events.len() as u64,
                                reason: "log ends inside a decision epoch".to_string(),
                            }
                        })?;
                        if actual.event() != *event {
                            return Err(StoreError::VerifyMismatch {
                                seq: actual.seq,
                                reason: format!(
                                    "recorded decision diverges from recomputation: {} != {}",
                                    serde_json::to_string(&actual.event()).unwrap_or_default(),
                                    serde_json::to_string(event).unwrap_or_default(),
                                ),
                            });
                        }
                        index += 1;
                    }
                    state = recomputed;
                }
                EventKind::DecisionTaken { .. } => {
                    return Err(StoreError::VerifyMismatch {
                        seq: record.seq,
                        reason: "decision recorded outside a decision epoch".to_string(),
                    });
                }
                _ => {
                    state
                        .apply(&record.event())
                        .map_err(|source| StoreError::Replay {
                            seq: record.seq,
                            source,
                        })?;
                    index += 1;
                }
            }
        }
        Ok(state)
    }

    // ----- serialization ---------------------------------------------------

    pub fn to_writer<W: Write>(&self, mut w: W) -> Result<(), StoreError> {
        let mut line = serde_json::to_string(&self.header).expect("header serializes");
        line.push('\n');
        w.write_all(line.as_bytes())?;
        for record in &self.events {
            let mut line = serde_json::to_string(record).expect("record serializes");
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_string(&self) -> String {
        let mut buf = Vec::new();
        self.to_writer(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("log lines are UTF-8")
    }

    pub fn from_reader<R: Read>(r: R) -> Result<Self, StoreError> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines().enumerate();
        let header: LogHeader = match lines.next() {
            None => return Err(StoreError::MissingHeader),
            Some((line, text)) => {
                let text = text?;
                serde_json::from_str(&text)
                    .map_err(|source| StoreError::Malformed { line: line + 1, source })?
            }
        };
        if header.schema != SCHEMA {
            return Err(StoreError::SchemaMismatch(header.schema));
        }
        let mut log = EventLog {
            header,
            events: Vec::new(),
        };
        for (line, text) in lines {
            let text = text?;
            if text.is_empty() {
                continue;
            }
            let record: EventRecord = serde_json::from_str(&text)
                .map_err(|source| StoreError::Malformed { line: line + 1, source })?;
            log.append_record(record)?;
        }
        Ok(log)
    }

    pub fn save(&self, path: &Path) -> Result<(), StoreError> {
        let file = File::create(path)?;
        self.to_writer(file)
    }

    pub fn load(path: &Path) -> Result<Self, StoreError> {
        let file = File::open(path)?;
        EventLog::from_reader(file)
    }

    /// Append only the given records to an existing log file.
    pub fn append_to_file(path: &Path, records: &[EventRecord]) -> Result<(), StoreError> {
        let mut file = OpenOptions::new().append(true).open(path)?;
        for record in records {
            let mut line = serde_json::to_string(record).expect("record serializes");
            line.push('\n');
            file.write_all(line.as_bytes())?;
        }
        file.flush()?;
        Ok(())
    }
}

/// A live journal: state plus its log, kept in lockstep. Commands validate
/// against the state, then append the produced events.
#[derive(Debug, Clone)]
pub struct Journal {
    log: EventLog,
    state: JournalState,
}

impl Journal {
    pub fn new(config: JournalConfig) -> Self {
        Journal {
            state: JournalState::new(config.clone()),
            log: EventLog::new(config),
        }
    }

    /// Rebuild the live journal from a persisted log.
    pub fn from_log(log: EventLog) -> Result<Self, StoreError> {
        let state = log.replay()?;
        Ok(Journal { log, state })
    }

    pub fn state(&self) -> &JournalState {
        &self.state
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn into_log(self) -> EventLog {
        self.log
    }

    /// Events appended after `mark` (a previous `log().len()`).
    pub fn records_since(&self, mark: usize) -> &[EventRecord] {
        &self.log.events()[mark..]
    }

    pub fn create_account(&mut self, account: AccountId, now: Epoch) -> Result<(), JournalError> {
        let event = self.state.create_account(account, now)?;
        self.log.push(event);
        Ok(())
    }

    pub fn submit_article(
        &mut self,
        author: &AccountId,
        predecessor: Option<SubmissionId>,
        now: Epoch,
    ) -> Result<SubmissionId, JournalError> {
        let (id, event) = self.state.submit_article(author, predecessor, now)?;
        self.log.push(event);
        Ok(id)
    }

    pub fn record_review(
        &mut self,
        submission: SubmissionId,
        reviewer: &AccountId,
        vote: bool,
        now: Epoch,
    ) -> Result<(), JournalError> {
        let event = self.state.record_review(submission, reviewer, vote, now)?;
        self.log.push(event);
        Ok(())
    }

    pub fn withdraw_review(
        &mut self,
        submission: SubmissionId,
        reviewer: &AccountId,
        now: Epoch,
    ) -> Result<(), JournalError> {
        let event = self.state.withdraw_review(submission, reviewer, now)?;
        self.log.push(event);
        Ok(())
    }

    pub fn record_opinion(
        &mut self,
        article: crate::ids::ArticleId,
        reader: &AccountId,
        opinion: bool,
        now: Epoch,
    ) -> Result<(), JournalError> {
        let event = self.state.record_opinion(article, reader, opinion, now)?;
        self.log.push(event);
        Ok(())
    }

    pub fn run_decision_epoch(
        &mut self,
        now: Epoch,
        config: &JournalConfig,
    ) -> Result<Vec<DecisionRecord>, JournalError> {
        let (records, events) = self.state.run_decision_epoch(now, config)?;
        for event in events {
            self.log.push(event);
        }
        Ok(records)
    }
}
