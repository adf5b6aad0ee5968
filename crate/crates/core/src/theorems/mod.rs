//! Named verification procedures. Each replays one identity or equivalence
//! over a lattice (or lattice pair) and a source of maps, and returns a
//! [`VerificationRun`] whose witnesses can be replayed.

mod medians;
mod multihom;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{make_chain, make_divisor, make_powerset, make_product, FiniteLattice, SamplePlan, DEFAULT_SAMPLES};
use crate::maps::{Codomain, Domain, HomFilter, MultiMap};
use crate::report::{Verdict, Witness};

pub use medians::{
    replay_median, verify_fast_path, verify_lemma_extend, verify_lemma_swap, verify_median_duality,
    verify_prop_medians, FastPathSample, Hypothesis,
};
pub use multihom::{
    alg_instance, kusraev_bound_instance, kusraev_two_variable_instance, replay_map, sandwich_instance,
    verify_alg, verify_charsoftoi, verify_diags, verify_kusraev, verify_multihom_toi, verify_sandwich,
};

/// Most witnesses a run keeps; the count of failures is in `counts`.
pub const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    PropMedians,
    LemmaSwap,
    LemmaExtend,
    MedianDuality,
    FastPath,
    Charsoftoi,
    MultihomToi,
    Sandwich,
    Kusraev,
    Alg,
    Diags,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::PropMedians,
        TheoremId::LemmaSwap,
        TheoremId::LemmaExtend,
        TheoremId::MedianDuality,
        TheoremId::FastPath,
        TheoremId::Charsoftoi,
        TheoremId::MultihomToi,
        TheoremId::Sandwich,
        TheoremId::Kusraev,
        TheoremId::Alg,
        TheoremId::Diags,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::PropMedians => "prop-medians",
            TheoremId::LemmaSwap => "lemma-swap",
            TheoremId::LemmaExtend => "lemma-extend",
            TheoremId::MedianDuality => "median-duality",
            TheoremId::FastPath => "fast-path",
            TheoremId::Charsoftoi => "charsoftoi",
            TheoremId::MultihomToi => "multihom-toi",
            TheoremId::Sandwich => "sandwich",
            TheoremId::Kusraev => "kusraev",
            TheoremId::Alg => "alg",
            TheoremId::Diags => "diags",
        }
    }

    /// Whether the run takes a single lattice and a maximal tuple length,
    /// rather than a domain, codomain and map arity.
    pub fn is_median_law(self) -> bool {
        matches!(
            self,
            TheoremId::PropMedians
                | TheoremId::LemmaSwap
                | TheoremId::LemmaExtend
                | TheoremId::MedianDuality
                | TheoremId::FastPath
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::format(format!("unknown theorem id {s:?}")))
    }
}

/// The outcome of one verifier on one matrix entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRun {
    pub theorem: TheoremId,
    /// The lattice, or `domain^arity->codomain`.
    pub matrix: String,
    pub arity: Vec<usize>,
    pub source: String,
    pub instances: u64,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub counts: BTreeMap<String, u64>,
}

impl VerificationRun {
    pub(crate) fn new(theorem: TheoremId, matrix: String, arity: Vec<usize>, source: impl Into<String>) -> Self {
        VerificationRun {
            theorem,
            matrix,
            arity,
            source: source.into(),
            instances: 0,
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
            counts: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub(crate) fn count(&mut self, key: &str, by: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += by;
    }

    /// Folds one check's verdict into the run.
    pub(crate) fn absorb(&mut self, verdict: Verdict, witness: Option<Witness>) {
        match verdict {
            Verdict::Fail => {
                self.verdict = Verdict::Fail;
                self.count("failures", 1);
                if let Some(w) = witness {
                    if self.witnesses.len() < MAX_WITNESSES {
                        self.witnesses.push(w);
                    }
                }
            }
            Verdict::SampledPass if self.verdict == Verdict::Pass => self.verdict = Verdict::SampledPass,
            _ => {}
        }
    }
}

impl fmt::Display for VerificationRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on {} [{}] {}: {} instances",
            self.theorem, self.matrix, self.source, self.verdict, self.instances
        )?;
        for (k, v) in &self.counts {
            write!(f, " {k}={v}")?;
        }
        for w in &self.witnesses {
            write!(f, "\n  witness {w}")?;
        }
        Ok(())
    }
}

/// Where a map-based verifier gets its maps.
#[derive(Debug, Clone)]
pub enum MapSource {
    /// Every table map, lexicographically.
    AllTables,
    /// Uniformly random table maps from a seeded generator.
    RandomTables { count: usize, seed: u64 },
    /// Projections, medians and the two constants.
    Builtins,
    /// The enumerated lattice n-homomorphisms.
    Enumerated(HomFilter),
    Given(Vec<MultiMap>),
}

impl fmt::Display for MapSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSource::AllTables => f.write_str("all tables"),
            MapSource::RandomTables { count, seed } => write!(f, "{count} random tables, seed {seed}"),
            MapSource::Builtins => f.write_str("builtins"),
            MapSource::Enumerated(HomFilter::All) => f.write_str("enumerated homs"),
            MapSource::Enumerated(HomFilter::SymmetricOnly) => f.write_str("enumerated symmetric homs"),
            MapSource::Given(maps) if maps.len() == 1 => write!(f, "{}", maps[0]),
            MapSource::Given(maps) => write!(f, "{} given maps", maps.len()),
        }
    }
}

/// A domain, codomain and arity for map-based verifiers.
#[derive(Debug, Clone)]
pub struct Target {
    pub domain: Domain,
    pub codomain: Codomain,
    pub arity: usize,
}

impl Target {
    pub fn finite(domain: &Arc<FiniteLattice>, codomain: &Arc<FiniteLattice>, arity: usize) -> Self {
        Target {
            domain: Domain::Finite(domain.clone()),
            codomain: Codomain::Lattice(codomain.clone()),
            arity,
        }
    }

    pub fn describe(&self) -> String {
        format!("{}^{}->{}", self.domain.name(), self.arity, self.codomain.name())
    }

    /// Both sides must be distributive lattices.
    pub(crate) fn require_distributive(&self) -> Result<()> {
        self.domain.require_distributive()?;
        match &self.codomain {
            Codomain::Lattice(m) => m.require_distributive(),
            Codomain::Chain(_) => Ok(()),
            Codomain::Set(_) => Err(Error::precondition("the codomain must be a lattice")),
        }
    }

    /// Resolves a map source against this target, with any counts the
    /// source itself produces.
    pub fn maps(&self, source: &MapSource) -> Result<(Vec<MultiMap>, BTreeMap<String, u64>)> {
        let mut counts = BTreeMap::new();
        let finite = || {
            self.domain
                .finite()
                .ok_or_else(|| Error::precondition("table maps need a finite domain"))
        };
        let maps = match source {
            MapSource::AllTables => crate::maps::all_table_maps(finite()?, &self.codomain, self.arity)?,
            MapSource::RandomTables { count, seed } => {
                crate::maps::random_table_maps(finite()?, &self.codomain, self.arity, *count, *seed)?
            }
            MapSource::Builtins => {
                let mut out = Vec::new();
                let n = self.arity;
                let same = match (&self.domain, &self.codomain) {
                    (Domain::Finite(a), Codomain::Lattice(b)) => a.labels() == b.labels(),
                    (Domain::Chain(_), Codomain::Chain(_)) => true,
                    _ => false,
                };
                if same {
                    for i in 1..=n {
                        out.push(MultiMap::projection(self.domain.clone(), n, i)?);
                    }
                    for k in 1..=n {
                        out.push(MultiMap::median(self.domain.clone(), n, k)?);
                    }
                }
                if let Codomain::Lattice(m) = &self.codomain {
                    for c in [m.bottom(), m.top()] {
                        out.push(MultiMap::constant(self.domain.clone(), self.codomain.clone(), n, c.into())?);
                    }
                }
                out
            }
            MapSource::Enumerated(filter) => {
                let m = self
                    .codomain
                    .lattice()
                    .ok_or_else(|| Error::precondition("enumeration needs a finite codomain lattice"))?;
                let e = crate::maps::enumerate_homs(finite()?, m, self.arity, *filter)?;
                counts.insert("table_space".to_string(), e.table_space);
                counts.insert("search_nodes".to_string(), e.nodes);
                counts.insert("homs".to_string(), e.homs as u64);
                e.maps
            }
            MapSource::Given(maps) => maps.clone(),
        };
        Ok((maps, counts))
    }
}

/// Knobs shared by every verifier.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    /// Longest tuple for the median identities.
    pub n_max: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            samples: DEFAULT_SAMPLES,
            n_max: 4,
        }
    }
}

impl VerifyConfig {
    pub fn plan(&self) -> SamplePlan {
        // the paper's pair for the weighted geometric mean is tried first
        SamplePlan::with_seed(self.seed).samples(self.samples).probe(vec![1.0, 8.0])
    }
}

/// The lattices every median identity is checked on by default.
pub fn default_median_matrix() -> Result<Vec<Arc<FiniteLattice>>> {
    let mut out = Vec::new();
    for n in 2..=5 {
        out.push(make_chain(n)?);
    }
    out.push(make_powerset(&["a", "b"])?);
    out.push(make_powerset(&["a", "b", "c"])?);
    out.push(make_divisor(36)?);
    out.push(make_product(&make_chain(3)?, &make_chain(2)?)?);
    Ok(out.into_iter().map(Arc::new).collect())
}

/// The weighted geometric mean `x^(1/3) y^(2/3)` on the nonnegative reals.
pub fn weighted_geomean_example() -> MultiMap {
    MultiMap::weighted_geomean(vec![1.0 / 3.0, 2.0 / 3.0]).expect("weights are valid")
}

/// The default map-based matrix for a theorem.
pub fn default_map_matrix(id: TheoremId, cfg: &VerifyConfig) -> Result<Vec<(Target, MapSource)>> {
    let c2 = Arc::new(make_chain(2)?);
    let c3 = Arc::new(make_chain(3)?);
    let sym = MapSource::Enumerated(HomFilter::SymmetricOnly);
    let real = {
        let b = weighted_geomean_example();
        Target {
            domain: b.domain().clone(),
            codomain: b.codomain().clone(),
            arity: 2,
        }
    };
    let given = || MapSource::Given(vec![weighted_geomean_example()]);
    Ok(match id {
        TheoremId::Charsoftoi => vec![
            (Target::finite(&c2, &c2, 2), MapSource::AllTables),
            (
                Target::finite(&c3, &c3, 2),
                MapSource::RandomTables {
                    count: 500,
                    seed: cfg.seed,
                },
            ),
            (
                Target::finite(&c2, &c2, 3),
                MapSource::RandomTables {
                    count: 200,
                    seed: cfg.seed,
                },
            ),
            (Target::finite(&c3, &c3, 3), MapSource::Builtins),
        ],
        TheoremId::MultihomToi => vec![
            (Target::finite(&c2, &c2, 2), MapSource::Enumerated(HomFilter::All)),
            (Target::finite(&c3, &c3, 2), MapSource::Enumerated(HomFilter::All)),
            (real, given()),
        ],
        TheoremId::Sandwich => vec![
            (Target::finite(&c2, &c2, 2), sym.clone()),
            (Target::finite(&c3, &c3, 2), sym.clone()),
            (Target::finite(&c2, &c2, 3), sym),
            (Target::finite(&c3, &c3, 3), MapSource::Builtins),
        ],
        TheoremId::Kusraev | TheoremId::Alg => vec![
            (Target::finite(&c2, &c2, 2), sym.clone()),
            (Target::finite(&c3, &c3, 2), sym.clone()),
            (Target::finite(&c2, &c2, 3), sym),
        ],
        TheoremId::Diags => vec![
            (Target::finite(&c2, &c2, 2), sym.clone()),
            (Target::finite(&c3, &c3, 2), sym.clone()),
            (Target::finite(&c2, &c2, 3), sym),
            (real, given()),
        ],
        _ => Vec::new(),
    })
}

/// Runs a median identity on one lattice.
pub fn verify_median_law(id: TheoremId, lat: &FiniteLattice, cfg: &VerifyConfig) -> Result<VerificationRun> {
    match id {
        TheoremId::PropMedians => verify_prop_medians(lat, cfg.n_max),
        TheoremId::LemmaSwap => verify_lemma_swap(lat, cfg.n_max),
        TheoremId::LemmaExtend => verify_lemma_extend(lat, cfg.n_max),
        TheoremId::MedianDuality => verify_median_duality(lat, cfg.n_max, Hypothesis::Checked),
        TheoremId::FastPath => verify_fast_path(lat, cfg.n_max, None),
        _ => Err(Error::precondition(format!("{id} is not a median identity"))),
    }
}

/// Runs a map-based theorem on one target.
pub fn verify_map_theorem(
    id: TheoremId,
    target: &Target,
    source: &MapSource,
    cfg: &VerifyConfig,
) -> Result<VerificationRun> {
    let plan = cfg.plan();
    match id {
        TheoremId::Charsoftoi => verify_charsoftoi(target, source, &plan),
        TheoremId::MultihomToi => verify_multihom_toi(target, source, &plan),
        TheoremId::Sandwich => verify_sandwich(target, source, &plan),
        TheoremId::Kusraev => verify_kusraev(target, source, &plan),
        TheoremId::Alg => verify_alg(target, source, &plan),
        TheoremId::Diags => verify_diags(target, source, &plan),
        _ => Err(Error::precondition(format!("{id} is not a map theorem"))),
    }
}

/// Runs one theorem over its default matrix.
pub fn verify_default(id: TheoremId, cfg: &VerifyConfig) -> Result<Vec<VerificationRun>> {
    if id.is_median_law() {
        let mut runs = Vec::new();
        for lat in default_median_matrix()? {
            runs.push(verify_median_law(id, &lat, cfg)?);
        }
        if id == TheoremId::FastPath {
            let p3 = make_powerset(&["a", "b", "c"])?;
            let sample = FastPathSample {
                n: 100,
                count: 10_000,
                seed: cfg.seed,
            };
            runs.push(verify_fast_path(&p3, 0, Some(sample))?);
        }
        return Ok(runs);
    }
    default_map_matrix(id, cfg)?
        .iter()
        .map(|(target, source)| verify_map_theorem(id, target, source, cfg))
        .collect()
}

/// Every theorem over its default matrix, in [`TheoremId::ALL`] order.
pub fn verify_all(cfg: &VerifyConfig) -> Result<Vec<VerificationRun>> {
    let mut runs = Vec::new();
    for id in TheoremId::ALL {
        runs.extend(verify_default(id, cfg)?);
    }
    Ok(runs)
}

#[cfg(test)]
mod tests;
