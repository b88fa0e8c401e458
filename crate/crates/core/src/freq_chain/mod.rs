//! Frequency-chain description language and evaluator.
//!
//! A chain is a DAG of frequency-transforming nodes written one per line in
//! topological order:
//!
//! ```text
//! # offset lock of LD2 on LD1
//! source   ld1      192.1THz
//! source   ld2      192.103284THz
//! beat     nu12     ld1 ld2
//! source   synth    1.562GHz
//! double   synth_x2 synth
//! beat     nu_int   nu12 synth_x2
//! check    nu_int   160MHz tol=1Hz
//! ```
//!
//! Every edge carries a [`FreqSet`], the set of spectral components present at
//! that point. Frequencies are exact integers in millihertz, so lock checks on
//! the chains in `chains/` are exact.

mod eval;
mod parse;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use eval::{check_locks, evaluate, evaluate_with_cap, CheckReport, DEFAULT_COMPONENT_CAP};
pub use parse::parse_chain;

/// Offset lock of the cooling laser on the repump reference, with the AOM gap.
pub const COOLING_CHAIN: &str = include_str!("../../chains/cooling_chain.fc");
/// Raman laser chain: 60 MHz AOM and 6.775 GHz fiber EOM.
pub const RAMAN_CHAIN: &str = include_str!("../../chains/raman_chain.fc");

/// Frequency in integer millihertz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Freq(pub u64);

impl Freq {
    pub const fn from_millihertz(millihertz: u64) -> Self {
        Freq(millihertz)
    }

    pub const fn from_hz(hz: u64) -> Self {
        Freq(hz * 1000)
    }

    pub fn millihertz(self) -> u64 {
        self.0
    }

    pub fn as_hz(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (int, frac) = (self.0 / 1000, self.0 % 1000);
        if frac == 0 {
            write!(f, "{int} Hz")
        } else {
            write!(f, "{int}.{frac:03} Hz")
        }
    }
}

/// Spectral components present at a node.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FreqSet(pub BTreeSet<Freq>);

impl FreqSet {
    pub fn single(f: Freq) -> Self {
        FreqSet(BTreeSet::from([f]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, f: Freq) -> bool {
        self.0.contains(&f)
    }

    pub fn iter(&self) -> impl Iterator<Item = Freq> + '_ {
        self.0.iter().copied()
    }

    /// Component closest to `target`; ties resolve to the lower frequency.
    pub fn nearest(&self, target: Freq) -> Option<Freq> {
        self.iter().min_by_key(|f| f.0.abs_diff(target.0))
    }
}

impl FromIterator<Freq> for FreqSet {
    fn from_iter<I: IntoIterator<Item = Freq>>(iter: I) -> Self {
        FreqSet(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Source {
        freq: Freq,
    },
    Vco {
        freq: Freq,
    },
    Double {
        input: String,
    },
    /// Frequency shift in signed millihertz; results below zero clamp to 0.
    Shift {
        input: String,
        delta: i64,
    },
    /// Components at `f + k·offset` for every order `k`; negative results fold
    /// to their magnitude.
    Sideband {
        input: String,
        offset: Freq,
        orders: Vec<i64>,
    },
    /// Photodetector beat: difference frequencies only.
    Beat {
        a: String,
        b: String,
    },
    /// RF mixer: sum and difference frequencies.
    Mix {
        a: String,
        b: String,
    },
    /// Keeps components strictly below the cutoff.
    LowPass {
        input: String,
        cutoff: Freq,
    },
    Divide {
        input: String,
        n: u64,
    },
}

impl NodeKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            NodeKind::Source { .. } => "source",
            NodeKind::Vco { .. } => "vco",
            NodeKind::Double { .. } => "double",
            NodeKind::Shift { .. } => "shift",
            NodeKind::Sideband { .. } => "sideband",
            NodeKind::Beat { .. } => "beat",
            NodeKind::Mix { .. } => "mix",
            NodeKind::LowPass { .. } => "lowpass",
            NodeKind::Divide { .. } => "divide",
        }
    }

    pub fn inputs(&self) -> Vec<&str> {
        match self {
            NodeKind::Source { .. } | NodeKind::Vco { .. } => vec![],
            NodeKind::Double { input }
            | NodeKind::Shift { input, .. }
            | NodeKind::Sideband { input, .. }
            | NodeKind::LowPass { input, .. }
            | NodeKind::Divide { input, .. } => vec![input],
            NodeKind::Beat { a, b } | NodeKind::Mix { a, b } => vec![a, b],
        }
    }

    fn invariant_violation(&self) -> Option<String> {
        match self {
            NodeKind::Divide { n: 0, .. } => Some("divide ratio must be ≥ 1".into()),
            NodeKind::LowPass { cutoff, .. } if cutoff.0 == 0 => {
                Some("low-pass cutoff must be > 0".into())
            }
            NodeKind::Sideband { orders, .. } if orders.is_empty() => {
                Some("sideband needs at least one order".into())
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainNode {
    pub id: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LockCheck {
    pub id: String,
    pub expected: Freq,
    pub tolerance: Freq,
}

/// A validated chain: ids are unique and every input refers to an earlier node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqChain {
    nodes: Vec<ChainNode>,
    checks: Vec<LockCheck>,
}

impl FreqChain {
    pub fn new(nodes: Vec<ChainNode>, checks: Vec<LockCheck>) -> Result<Self, ChainError> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if seen.contains_key(node.id.as_str()) {
                return Err(ChainError::DuplicateId(node.id.clone()));
            }
            for input in node.kind.inputs() {
                if !seen.contains_key(input) {
                    return Err(ChainError::UndefinedRef {
                        node: node.id.clone(),
                        input: input.to_string(),
                    });
                }
            }
            if let Some(reason) = node.kind.invariant_violation() {
                return Err(ChainError::InvalidNode {
                    id: node.id.clone(),
                    reason,
                });
            }
            seen.insert(&node.id, i);
        }
        Ok(FreqChain { nodes, checks })
    }

    pub fn nodes(&self) -> &[ChainNode] {
        &self.nodes
    }

    pub fn checks(&self) -> &[LockCheck] {
        &self.checks
    }

    pub fn node(&self, id: &str) -> Option<&ChainNode> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown node kind `{0}`")]
    UnknownKind(String),
    #[error("duplicate id `{id}` (first defined on line {first_line})")]
    DuplicateId { id: String, first_line: usize },
    #[error("`{0}` is not defined on an earlier line")]
    UndefinedRef(String),
    #[error("malformed frequency literal `{0}`")]
    MalformedFrequency(String),
    #[error("{keyword} expects {expected} arguments, found {found}")]
    WrongArity {
        keyword: String,
        expected: usize,
        found: usize,
    },
    #[error("bad argument `{token}`: {reason}")]
    BadArgument { token: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("node `{node}` references undefined or later node `{input}`")]
    UndefinedRef { node: String, input: String },
    #[error("node `{id}`: {reason}")]
    InvalidNode { id: String, reason: String },
    #[error("check references unknown node `{0}`")]
    UnknownCheck(String),
    #[error("node `{id}` has {count} components, above the cap of {cap}")]
    TooManyComponents {
        id: String,
        count: usize,
        cap: usize,
    },
    #[error("frequency overflow at node `{0}`")]
    Overflow(String),
}
