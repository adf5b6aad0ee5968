use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Lattice;
use crate::error::{Error, Result};
use crate::report::Value;

/// Absolute tolerance for comparing real-valued map outputs.
pub const REAL_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainDomain {
    NonnegRationals,
    NonnegFloats,
}

/// The nonnegative reals under min/max. Only ever sample-checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ImplicitChain {
    pub domain: ChainDomain,
}

impl Default for ImplicitChain {
    fn default() -> Self {
        ImplicitChain {
            domain: ChainDomain::NonnegFloats,
        }
    }
}

impl Lattice for ImplicitChain {
    type Elem = f64;

    fn meet(&self, a: f64, b: f64) -> f64 {
        a.min(b)
    }

    fn join(&self, a: f64, b: f64) -> f64 {
        a.max(b)
    }

    fn leq(&self, a: f64, b: f64) -> bool {
        a <= b
    }

    fn validate(&self, e: f64) -> Result<()> {
        if e.is_finite() && e >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!("{e} is not a finite nonnegative real")))
        }
    }

    fn render(&self, e: f64) -> String {
        format!("{e}")
    }

    fn to_value(&self, e: f64) -> Value {
        Value::Real(e)
    }

    fn from_value(&self, v: Value) -> Result<f64> {
        let r = match v {
            Value::Real(r) => r,
            Value::Elem(i) => i as f64,
        };
        self.validate(r).map(|_| r)
    }
}

impl ImplicitChain {
    /// `{2^a 3^b : -6 <= a, b <= 6}` in ascending order.
    pub fn grid() -> Vec<f64> {
        let mut g: Vec<f64> = (-6..=6)
            .flat_map(|a| (-6..=6).map(move |b| 2f64.powi(a) * 3f64.powi(b)))
            .collect();
        g.sort_by(f64::total_cmp);
        g
    }

    /// Tuples of length `len` to check: the plan's probes of that length,
    /// then `plan.samples` seeded draws mixing grid points and random
    /// positives in `[1e-3, 1e3]`.
    pub fn sample_tuples(&self, len: usize, plan: &SamplePlan) -> Vec<Vec<f64>> {
        let grid = Self::grid();
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        let mut out: Vec<Vec<f64>> = plan.probes.iter().filter(|p| p.len() == len).cloned().collect();
        out.reserve(plan.samples);
        for _ in 0..plan.samples {
            let t = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        grid[rng.gen_range(0..grid.len())]
                    } else {
                        10f64.powf(rng.gen_range(-3.0..3.0))
                    }
                })
                .collect();
            out.push(t);
        }
        out
    }

    pub fn values_equal(a: f64, b: f64) -> bool {
        (a - b).abs() <= REAL_TOLERANCE
    }
}

/// How sampled checks on the implicit chain draw their tuples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub samples: usize,
    /// Tuples examined before any random draw, in order.
    pub probes: Vec<Vec<f64>>,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            seed: 0,
            samples: DEFAULT_SAMPLES,
            probes: Vec::new(),
        }
    }
}

impl SamplePlan {
    pub fn with_seed(seed: u64) -> Self {
        SamplePlan {
            seed,
            ..Self::default()
        }
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn probe(mut self, tuple: Vec<f64>) -> Self {
        self.probes.push(tuple);
        self
    }
}
