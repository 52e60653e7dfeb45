//! Identifier types for accounts, submissions, and published articles.
//!
//! Submission and article ids are minted sequentially by the state machine
//! (`S1`, `S2`, ... and `A1`, `A2`, ...) so that replays are stable; account
//! ids are chosen by users at registration. One account identifier may act
//! as author, reviewer, and reader.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdError {
    #[error("identifier must be non-empty")]
    Empty,
    #[error("identifier `{0}` contains whitespace, `#`, or control characters")]
    InvalidCharacter(String),
    #[error("expected an identifier like `{prefix}7`, got `{got}`")]
    BadFormat { prefix: char, got: String },
}

/// A registered user account; the same account may author, review, and read.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AccountId(String);

/// Role alias: an account acting as a reviewer.
pub type ReviewerId = AccountId;
/// Role alias: an account acting as a reader.
pub type ReaderId = AccountId;

impl AccountId {
    pub fn new(s: impl Into<String>) -> Result<Self, IdError> {
        let s = s.into();
        if s.is_empty() {
            return Err(IdError::Empty);
        }
        if s.chars().any(|c| c.is_whitespace() || c.is_control() || c == '#') {
            return Err(IdError::InvalidCharacter(s));
        }
        Ok(AccountId(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for AccountId {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AccountId::new(s)
    }
}

impl<'de> Deserialize<'de> for AccountId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        AccountId::new(s).map_err(de::Error::custom)
    }
}

macro_rules! sequential_id {
    ($(#[$doc:meta])* $name:ident, $prefix:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(u32);

        impl $name {
            pub fn new(n: u32) -> Self {
                $name(n)
            }

            pub fn index(&self) -> u32 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{}", $prefix, self.0)
            }
        }

        impl FromStr for $name {
            type Err = IdError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let bad = || IdError::BadFormat {
                    prefix: $prefix,
                    got: s.to_string(),
                };
                let digits = s.strip_prefix($prefix).ok_or_else(bad)?;
                let n: u32 = digits.parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                Ok($name(n))
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(de::Error::custom)
            }
        }
    };
}

sequential_id!(
    /// A submitted article awaiting or past its publication decision.
    SubmissionId,
    'S'
);
sequential_id!(
    /// A published article.
    ArticleId,
    'A'
);

/// Which side of a reviewer's split identity a review falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Facet {
    /// Reviews of the reviewer's own submissions.
    SelfWork,
    /// Reviews of everyone else's submissions.
    OthersWork,
}

impl Facet {
    fn as_str(&self) -> &'static str {
        match self {
            Facet::SelfWork => "self",
            Facet::OthersWork => "others",
        }
    }
}

/// The identity a review is credited to inside the classifier and the
/// reputation tables.
///
/// With pseudo-reviewers disabled this is the plain account id. With them
/// enabled, each reviewer splits into a `self`-work and an `others`-work
/// identity (rendered `r1#self` / `r1#others`) that accumulate history and
/// precision independently.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EffectiveReviewerId {
    base: AccountId,
    facet: Option<Facet>,
}

impl EffectiveReviewerId {
    pub fn plain(base: AccountId) -> Self {
        EffectiveReviewerId { base, facet: None }
    }

    pub fn faceted(base: AccountId, facet: Facet) -> Self {
        EffectiveReviewerId {
            base,
            facet: Some(facet),
        }
    }

    pub fn base(&self) -> &AccountId {
        &self.base
    }

    pub fn facet(&self) -> Option<Facet> {
        self.facet
    }
}

impl fmt::Display for EffectiveReviewerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.facet {
            None => write!(f, "{}", self.base),
            Some(facet) => write!(f, "{}#{}", self.base, facet.as_str()),
        }
    }
}

impl FromStr for EffectiveReviewerId {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('#') {
            None => Ok(EffectiveReviewerId::plain(AccountId::new(s)?)),
            Some((base, "self")) => Ok(EffectiveReviewerId::faceted(
                AccountId::new(base)?,
                Facet::SelfWork,
            )),
            Some((base, "others")) => Ok(EffectiveReviewerId::faceted(
                AccountId::new(base)?,
                Facet::OthersWork,
            )),
            Some(_) => Err(IdError::InvalidCharacter(s.to_string())),
        }
    }
}

impl Serialize for EffectiveReviewerId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EffectiveReviewerId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
