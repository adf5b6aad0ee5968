//! Finite distributive lattices: construction, validation and the order.
//!
//! Elements are dense indices into a lattice's label list. Chains and
//! powersets compute meet/join in closed form (min/max, bitwise AND/OR);
//! every other kind precomputes full `size × size` tables.

mod birkhoff;
mod build;
mod chain;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use birkhoff::BirkhoffEmbedding;
pub use build::{make_m3, make_n5};
pub use chain::{ChainDomain, ImplicitChain, SamplePlan, DEFAULT_SAMPLES, REAL_TOLERANCE};

use crate::error::{Error, Result};
use crate::report::{CheckReport, Law, Value, Witness};
use crate::search;

/// Element cap for non-powerset lattices unless `LATMED_MAX_ELEMS` overrides it.
pub const DEFAULT_MAX_ELEMENTS: usize = 4096;
pub const MAX_POWERSET_GENERATORS: usize = 16;

pub fn max_elements() -> usize {
    std::env::var("LATMED_MAX_ELEMS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or(DEFAULT_MAX_ELEMENTS)
}

/// Returns both sides of a violated law instance.
type LawCheck<'a> = dyn Fn(&[Element]) -> Option<(Element, Element)> + Sync + 'a;

/// Operations shared by finite lattices and the implicit real chain.
///
/// Methods are infallible; callers validate their inputs first with
/// [`Lattice::validate`].
pub trait Lattice: Sync {
    type Elem: Copy + PartialEq + fmt::Debug + Send + Sync;

    fn meet(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn join(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;

    fn leq(&self, a: Self::Elem, b: Self::Elem) -> bool {
        self.meet(a, b) == a
    }

    fn validate(&self, _e: Self::Elem) -> Result<()> {
        Ok(())
    }

    fn render(&self, e: Self::Elem) -> String;

    fn to_value(&self, e: Self::Elem) -> Value;

    fn from_value(&self, v: Value) -> Result<Self::Elem>;

    fn meet_all(&self, xs: &[Self::Elem]) -> Self::Elem {
        xs.iter()
            .copied()
            .reduce(|a, b| self.meet(a, b))
            .expect("meet of an empty tuple")
    }

    fn join_all(&self, xs: &[Self::Elem]) -> Self::Elem {
        xs.iter()
            .copied()
            .reduce(|a, b| self.join(a, b))
            .expect("join of an empty tuple")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Element(pub u32);

impl Element {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<Element> for Value {
    fn from(e: Element) -> Value {
        Value::Elem(e.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Chain,
    Powerset,
    Divisor,
    Product,
    Downset,
    Explicit,
}

#[derive(Debug, Clone)]
enum Ops {
    Table { meet: Vec<u32>, join: Vec<u32> },
    Chain,
    Powerset,
}

#[derive(Debug, Clone)]
pub struct FiniteLattice {
    name: String,
    labels: Vec<String>,
    index: HashMap<String, u32>,
    ops: Ops,
    kind: LatticeKind,
    bottom: Element,
    top: Element,
    birkhoff: Option<Arc<BirkhoffEmbedding>>,
}

impl FiniteLattice {
    fn assemble(name: String, labels: Vec<String>, ops: Ops, kind: LatticeKind) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as u32).is_some() {
                return Err(Error::format(format!("duplicate element label {l:?}")));
            }
        }
        let mut lat = FiniteLattice {
            name,
            labels,
            index,
            ops,
            kind,
            bottom: Element(0),
            top: Element(0),
            birkhoff: None,
        };
        let all: Vec<Element> = lat.elements().collect();
        lat.bottom = lat.meet_all(&all);
        lat.top = lat.join_all(&all);
        Ok(lat)
    }

    /// Builds a lattice from explicit meet and join tables.
    ///
    /// Only the table shape and index ranges are checked here; run
    /// [`FiniteLattice::validate_lattice`] for the lattice axioms.
    pub fn from_tables(labels: Vec<String>, meet: Vec<Vec<u32>>, join: Vec<Vec<u32>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::format("a lattice needs at least one element"));
        }
        let cap = max_elements();
        if n > cap {
            return Err(Error::capacity(format!("{n} elements exceeds the cap of {cap}")));
        }
        let flatten = |name: &str, rows: Vec<Vec<u32>>| -> Result<Vec<u32>> {
            if rows.len() != n {
                return Err(Error::format(format!("{name} table has {} rows, expected {n}", rows.len())));
            }
            let mut flat = Vec::with_capacity(n * n);
            for (i, row) in rows.into_iter().enumerate() {
                if row.len() != n {
                    return Err(Error::format(format!(
                        "{name} table row {i} has {} entries, expected {n}",
                        row.len()
                    )));
                }
                if let Some(bad) = row.iter().find(|&&v| v as usize >= n) {
                    return Err(Error::format(format!("{name} table entry {bad} out of range in row {i}")));
                }
                flat.extend(row);
            }
            Ok(flat)
        };
        let meet = flatten("meet", meet)?;
        let join = flatten("join", join)?;
        Self::assemble(
            format!("explicit({n})"),
            labels,
            Ops::Table { meet, join },
            LatticeKind::Explicit,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.labels.len() as u32).map(Element)
    }

    pub fn bottom(&self) -> Element {
        self.bottom
    }

    pub fn top(&self) -> Element {
        self.top
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: Element) -> &str {
        &self.labels[e.index()]
    }

    pub fn element(&self, index: usize) -> Result<Element> {
        if index < self.size() {
            Ok(Element(index as u32))
        } else {
            Err(Error::InvalidElement(format!(
                "index {index} out of range for {} ({} elements)",
                self.name,
                self.size()
            )))
        }
    }

    /// Looks an element up by label. `∅` is accepted for `{}` and whitespace
    /// inside the label is ignored when the literal lookup fails.
    pub fn parse_element(&self, label: &str) -> Result<Element> {
        let label = label.trim();
        if let Some(&i) = self.index.get(label) {
            return Ok(Element(i));
        }
        let squashed: String = label.chars().filter(|c| !c.is_whitespace()).collect();
        let squashed = if squashed == "∅" { "{}".to_string() } else { squashed };
        self.index
            .get(&squashed)
            .map(|&i| Element(i))
            .ok_or_else(|| Error::InvalidElement(format!("no element labelled {label:?} in {}", self.name)))
    }

    pub fn checked_meet(&self, a: Element, b: Element) -> Result<Element> {
        Lattice::validate(self, a)?;
        Lattice::validate(self, b)?;
        Ok(Lattice::meet(self, a, b))
    }

    pub fn checked_join(&self, a: Element, b: Element) -> Result<Element> {
        Lattice::validate(self, a)?;
        Lattice::validate(self, b)?;
        Ok(Lattice::join(self, a, b))
    }

    pub fn checked_leq(&self, a: Element, b: Element) -> Result<bool> {
        Lattice::validate(self, a)?;
        Lattice::validate(self, b)?;
        Ok(Lattice::leq(self, a, b))
    }

    pub fn birkhoff(&self) -> Option<&BirkhoffEmbedding> {
        self.birkhoff.as_deref()
    }

    /// Computes and attaches the Birkhoff embedding.
    ///
    /// Fails with a precondition error when the lattice is not distributive.
    pub fn with_birkhoff(mut self) -> Result<Self> {
        if self.birkhoff.is_none() {
            self.birkhoff = Some(Arc::new(birkhoff_embed(&self)?));
        }
        Ok(self)
    }

    fn witness(&self, law: Law, xs: &[Element], lhs: Element, rhs: Element) -> Witness {
        Witness {
            law,
            map: None,
            inputs: vec![xs.iter().map(|&e| e.into()).collect()],
            rendered: vec![xs.iter().map(|&e| self.label(e).to_string()).collect()],
            params: BTreeMap::new(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            lhs_label: self.label(lhs).to_string(),
            rhs_label: self.label(rhs).to_string(),
        }
    }

    /// Exhaustively scans all `len`-tuples for a violation of `law`.
    fn scan_law<F>(&self, law: Law, len: usize, check: F) -> Result<CheckReport>
    where
        F: Fn(&[Element]) -> Option<(Element, Element)> + Sync + Send,
    {
        let n = self.size();
        let total = search::tuple_count(n, len)?;
        let (examined, witness) = search::first_failure(total, |idx| {
            let mut raw = [0u32; 3];
            search::decode_tuple(idx, n, &mut raw[..len]);
            let xs: Vec<Element> = raw[..len].iter().map(|&r| Element(r)).collect();
            Ok(check(&xs).map(|(l, r)| self.witness(law, &xs, l, r)))
        })?;
        Ok(match witness {
            Some(w) => CheckReport::fail(law, examined, w),
            None => CheckReport::pass(law, examined, true),
        })
    }

    /// Checks commutativity, idempotence, associativity and absorption of both
    /// operations. The failing report names the first violated law.
    pub fn validate_lattice(&self) -> Result<CheckReport> {
        let eq = |a: Element, b: Element| (a != b).then_some((a, b));
        let m = |a, b| Lattice::meet(self, a, b);
        let j = |a, b| Lattice::join(self, a, b);
        let checks: [(Law, usize, &LawCheck); 8] = [
            (Law::MeetCommutative, 2, &|x| eq(m(x[0], x[1]), m(x[1], x[0]))),
            (Law::JoinCommutative, 2, &|x| eq(j(x[0], x[1]), j(x[1], x[0]))),
            (Law::MeetIdempotent, 1, &|x| eq(m(x[0], x[0]), x[0])),
            (Law::JoinIdempotent, 1, &|x| eq(j(x[0], x[0]), x[0])),
            (Law::MeetAbsorption, 2, &|x| eq(m(x[0], j(x[0], x[1])), x[0])),
            (Law::JoinAbsorption, 2, &|x| eq(j(x[0], m(x[0], x[1])), x[0])),
            (Law::MeetAssociative, 3, &|x| eq(m(m(x[0], x[1]), x[2]), m(x[0], m(x[1], x[2])))),
            (Law::JoinAssociative, 3, &|x| eq(j(j(x[0], x[1]), x[2]), j(x[0], j(x[1], x[2])))),
        ];
        let mut examined = 0;
        for (law, len, check) in checks {
            let report = self.scan_law(law, len, check)?;
            examined += report.examined;
            if let Some(w) = report.witness {
                return Ok(CheckReport::fail(Law::LatticeAxioms, examined, w));
            }
        }
        Ok(CheckReport::pass(Law::LatticeAxioms, examined, true))
    }

    /// Brute-force scan of `x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)` over all triples.
    pub fn check_distributive(&self) -> Result<CheckReport> {
        let valid = self.validate_lattice()?;
        if !valid.passed() {
            return Err(Error::precondition(format!(
                "{} is not a lattice: {}",
                self.name,
                valid.witness.map(|w| w.to_string()).unwrap_or_default()
            )));
        }
        self.scan_law(Law::Distributive, 3, |x| {
            let lhs = Lattice::meet(self, x[0], Lattice::join(self, x[1], x[2]));
            let rhs = Lattice::join(
                self,
                Lattice::meet(self, x[0], x[1]),
                Lattice::meet(self, x[0], x[2]),
            );
            (lhs != rhs).then_some((lhs, rhs))
        })
    }

    /// Validates the axioms and distributivity, returning a precondition
    /// error naming the witness when either fails. A lattice carrying a
    /// Birkhoff embedding is distributive already.
    pub fn require_distributive(&self) -> Result<()> {
        if self.birkhoff.is_some() {
            return Ok(());
        }
        let report = self.check_distributive()?;
        if report.passed() {
            Ok(())
        } else {
            Err(Error::precondition(format!(
                "{} is not distributive: {}",
                self.name,
                report.witness.map(|w| w.to_string()).unwrap_or_default()
            )))
        }
    }
}

impl Lattice for FiniteLattice {
    type Elem = Element;

    #[inline]
    fn meet(&self, a: Element, b: Element) -> Element {
        match &self.ops {
            Ops::Table { meet, .. } => Element(meet[a.index() * self.labels.len() + b.index()]),
            Ops::Chain => a.min(b),
            Ops::Powerset => Element(a.0 & b.0),
        }
    }

    #[inline]
    fn join(&self, a: Element, b: Element) -> Element {
        match &self.ops {
            Ops::Table { join, .. } => Element(join[a.index() * self.labels.len() + b.index()]),
            Ops::Chain => a.max(b),
            Ops::Powerset => Element(a.0 | b.0),
        }
    }

    fn validate(&self, e: Element) -> Result<()> {
        self.element(e.index()).map(|_| ())
    }

    fn render(&self, e: Element) -> String {
        self.label(e).to_string()
    }

    fn to_value(&self, e: Element) -> Value {
        e.into()
    }

    fn from_value(&self, v: Value) -> Result<Element> {
        match v {
            Value::Elem(i) => self.element(i as usize),
            Value::Real(r) => Err(Error::InvalidElement(format!("{r} is not an element of {}", self.name))),
        }
    }
}

/// Computes the Birkhoff embedding of a distributive lattice.
pub fn birkhoff_embed(lattice: &FiniteLattice) -> Result<BirkhoffEmbedding> {
    BirkhoffEmbedding::build(lattice)
}

pub fn make_chain(n: usize) -> Result<FiniteLattice> {
    build::chain(n)
}

pub fn make_powerset<S: AsRef<str>>(ground: &[S]) -> Result<FiniteLattice> {
    build::powerset(ground)
}

pub fn make_divisor(n: u64) -> Result<FiniteLattice> {
    build::divisor(n)
}

pub fn make_product(a: &FiniteLattice, b: &FiniteLattice) -> Result<FiniteLattice> {
    build::product(a, b)
}

/// Lattice of downsets of the poset generated by `covers` (`[lower, upper]`
/// pairs over `elements`).
pub fn make_downset<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<FiniteLattice> {
    build::downset(elements, covers)
}

#[cfg(test)]
mod tests;
