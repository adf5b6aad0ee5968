//! Verdicts, laws and counterexample witnesses shared by every checker.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// A point of a domain or a value of a codomain.
///
/// Finite lattices and bare label sets use dense indices; the implicit real
/// chain carries the number itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Elem(u32),
    Real(f64),
}

impl Value {
    pub fn as_elem(self) -> Option<u32> {
        match self {
            Value::Elem(e) => Some(e),
            Value::Real(_) => None,
        }
    }

    pub fn as_real(self) -> Option<f64> {
        match self {
            Value::Real(r) => Some(r),
            Value::Elem(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Passed on every sample drawn; never an exhaustive claim.
    SampledPass,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        !matches!(self, Verdict::Fail)
    }

    pub(crate) fn passing(exhaustive: bool) -> Self {
        if exhaustive {
            Verdict::Pass
        } else {
            Verdict::SampledPass
        }
    }

    /// Worst of two passing-or-failing verdicts.
    pub(crate) fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::SampledPass, _) | (_, Verdict::SampledPass) => Verdict::SampledPass,
            _ => Verdict::Pass,
        }
    }

    /// The verdict of a check that agreed with its counterpart: sampled
    /// stays sampled, anything else passes.
    pub(crate) fn min_pass(self) -> Verdict {
        if self == Verdict::SampledPass {
            Verdict::SampledPass
        } else {
            Verdict::Pass
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::SampledPass => "sampled-pass",
        })
    }
}

/// Identifier of the law a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    LatticeAxioms,
    MeetCommutative,
    JoinCommutative,
    MeetIdempotent,
    JoinIdempotent,
    MeetAssociative,
    JoinAssociative,
    MeetAbsorption,
    JoinAbsorption,
    Distributive,
    BirkhoffEmbedding,

    MedianDuality,
    MedianSymmetry,
    MedianSorted,
    MedianChain,
    MedianSwap,
    MedianExtend,
    MedianFastPath,

    Symmetry,
    JoinHomomorphism,
    MeetHomomorphism,
    ToiDefinition,
    ToiSwap,
    ToiPairs,
    ToiPrefix,
    ToiEquivalence,
    DiagonalMeet,
    DiagonalJoin,
    DiagonalHomomorphism,
    NHomomorphism,

    Sandwich,
    KusraevBound,
    KusraevTwoVariable,
    AlgLemma,
}

impl Law {
    pub fn name(self) -> String {
        // serde's kebab-case rendering is the canonical name
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A concrete input on which a law fails.
///
/// `inputs` holds the raw points (replayable), `rendered` the same points as
/// labels. `params` carries slot indices, `k`, `m` and similar, all 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub law: Law,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    pub inputs: Vec<Vec<Value>>,
    pub rendered: Vec<Vec<String>>,
    pub params: BTreeMap<String, usize>,
    pub lhs: Value,
    pub rhs: Value,
    pub lhs_label: String,
    pub rhs_label: String,
}

impl Witness {
    pub fn param(&self, key: &str) -> Option<usize> {
        self.params.get(key).copied()
    }

    pub fn with_map(mut self, description: impl Into<String>) -> Self {
        self.map = Some(description.into());
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.law)?;
        if let Some(map) = &self.map {
            write!(f, " map {map}")?;
        }
        for t in &self.rendered {
            write!(f, " ({})", t.join(","))?;
        }
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        write!(f, " lhs={} rhs={}", self.lhs_label, self.rhs_label)
    }
}

/// Outcome of one checker run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub law: Law,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Law instances examined. On failure this counts instances up to and
    /// including the witness, in enumeration order.
    pub examined: u64,
}

impl CheckReport {
    pub fn pass(law: Law, examined: u64, exhaustive: bool) -> Self {
        CheckReport {
            law,
            verdict: Verdict::passing(exhaustive),
            witness: None,
            examined,
        }
    }

    pub fn fail(law: Law, examined: u64, witness: Witness) -> Self {
        CheckReport {
            law,
            verdict: Verdict::Fail,
            witness: Some(witness),
            examined,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ({} examined)", self.law, self.verdict, self.examined)?;
        if let Some(w) = &self.witness {
            write!(f, "\n  witness {w}")?;
        }
        Ok(())
    }
}
