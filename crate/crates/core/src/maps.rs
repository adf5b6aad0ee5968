//! n-ary maps between lattices: evaluation, symmetry, the lattice
//! n-homomorphism laws, diagonals and homomorphism enumeration.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{Element, FiniteLattice, ImplicitChain, Lattice, SamplePlan};
use crate::median::MedianOps;
use crate::report::{CheckReport, Law, Value, Witness};
use crate::search;

/// The domain lattice of a map.
#[derive(Debug, Clone)]
pub enum Domain {
    Finite(Arc<FiniteLattice>),
    Chain(ImplicitChain),
}

/// The codomain of a map. Bare label sets only support equality.
#[derive(Debug, Clone)]
pub enum Codomain {
    Lattice(Arc<FiniteLattice>),
    Set(Arc<Vec<String>>),
    Chain(ImplicitChain),
}

/// Tuples a checker visits: every tuple of a finite domain in lexicographic
/// order, or a fixed list of samples on the implicit chain.
pub enum TupleSpace {
    Exhaustive { base: usize, len: usize, total: u64 },
    Sampled(Vec<Vec<f64>>),
}

impl TupleSpace {
    pub fn total(&self) -> u64 {
        match self {
            TupleSpace::Exhaustive { total, .. } => *total,
            TupleSpace::Sampled(s) => s.len() as u64,
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, TupleSpace::Exhaustive { .. })
    }

    pub fn tuple(&self, i: u64) -> Vec<Value> {
        match self {
            TupleSpace::Exhaustive { base, len, .. } => {
                let mut raw = vec![0u32; *len];
                search::decode_tuple(i, *base, &mut raw);
                raw.into_iter().map(Value::Elem).collect()
            }
            TupleSpace::Sampled(s) => s[i as usize].iter().map(|&r| Value::Real(r)).collect(),
        }
    }
}

fn finite_elem(v: Value) -> Element {
    Element(v.as_elem().expect("finite lattice point"))
}

fn real(v: Value) -> f64 {
    v.as_real().expect("real chain point")
}

impl Domain {
    pub fn name(&self) -> String {
        match self {
            Domain::Finite(l) => l.name().to_string(),
            Domain::Chain(_) => "R+".to_string(),
        }
    }

    pub fn finite(&self) -> Option<&Arc<FiniteLattice>> {
        match self {
            Domain::Finite(l) => Some(l),
            Domain::Chain(_) => None,
        }
    }

    pub fn as_codomain(&self) -> Codomain {
        match self {
            Domain::Finite(l) => Codomain::Lattice(l.clone()),
            Domain::Chain(c) => Codomain::Chain(*c),
        }
    }

    pub fn contains(&self, v: Value) -> Result<()> {
        match self {
            Domain::Finite(l) => l.from_value(v).map(|_| ()),
            Domain::Chain(c) => match v {
                Value::Real(r) => c.validate(r),
                Value::Elem(_) => Err(Error::InvalidElement("expected a real number".into())),
            },
        }
    }

    pub fn meet(&self, a: Value, b: Value) -> Value {
        match self {
            Domain::Finite(l) => l.meet(finite_elem(a), finite_elem(b)).into(),
            Domain::Chain(c) => Value::Real(c.meet(real(a), real(b))),
        }
    }

    pub fn join(&self, a: Value, b: Value) -> Value {
        match self {
            Domain::Finite(l) => l.join(finite_elem(a), finite_elem(b)).into(),
            Domain::Chain(c) => Value::Real(c.join(real(a), real(b))),
        }
    }

    pub fn median(&self, xs: &[Value], k: usize) -> Result<Value> {
        match self {
            Domain::Finite(l) => {
                let es: Vec<Element> = xs.iter().map(|&v| finite_elem(v)).collect();
                l.median(&es, k).map(Value::from)
            }
            Domain::Chain(c) => {
                let rs: Vec<f64> = xs.iter().map(|&v| real(v)).collect();
                c.median(&rs, k).map(Value::Real)
            }
        }
    }

    /// `M_{k,m}`: the k-th median of `x_1..x_m`.
    pub fn median_relative(&self, xs: &[Value], k: usize, m: usize) -> Result<Value> {
        if m == 0 || m > xs.len() {
            return Err(Error::Index(format!("m = {m} outside 1..={}", xs.len())));
        }
        if k == 0 || k > m {
            return Err(Error::Index(format!("k = {k} outside 1..={m}")));
        }
        self.median(&xs[..m], k)
    }

    pub fn total_orderization(&self, xs: &[Value]) -> Result<Vec<Value>> {
        match self {
            Domain::Finite(l) => {
                let es: Vec<Element> = xs.iter().map(|&v| finite_elem(v)).collect();
                Ok(l.total_orderization(&es)?.0.into_iter().map(Value::from).collect())
            }
            Domain::Chain(c) => {
                let rs: Vec<f64> = xs.iter().map(|&v| real(v)).collect();
                Ok(c.total_orderization(&rs)?.0.into_iter().map(Value::Real).collect())
            }
        }
    }

    pub fn render(&self, v: Value) -> String {
        match (self, v) {
            (Domain::Finite(l), Value::Elem(e)) if (e as usize) < l.size() => l.label(Element(e)).to_string(),
            (_, Value::Real(r)) => format!("{r}"),
            (_, Value::Elem(e)) => format!("#{e}"),
        }
    }

    /// All `len`-tuples (finite) or the plan's samples (chain).
    pub fn tuples(&self, len: usize, plan: &SamplePlan) -> Result<TupleSpace> {
        match self {
            Domain::Finite(l) => Ok(TupleSpace::Exhaustive {
                base: l.size(),
                len,
                total: search::tuple_count(l.size(), len)?,
            }),
            Domain::Chain(c) => Ok(TupleSpace::Sampled(c.sample_tuples(len, plan))),
        }
    }

    pub fn require_distributive(&self) -> Result<()> {
        match self {
            Domain::Finite(l) => l.require_distributive(),
            Domain::Chain(_) => Ok(()),
        }
    }
}

impl Codomain {
    pub fn name(&self) -> String {
        match self {
            Codomain::Lattice(l) => l.name().to_string(),
            Codomain::Set(s) => format!("set({})", s.len()),
            Codomain::Chain(_) => "R+".to_string(),
        }
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            Codomain::Lattice(l) => Some(l.size()),
            Codomain::Set(s) => Some(s.len()),
            Codomain::Chain(_) => None,
        }
    }

    pub fn lattice(&self) -> Option<&Arc<FiniteLattice>> {
        match self {
            Codomain::Lattice(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_lattice(&self) -> bool {
        !matches!(self, Codomain::Set(_))
    }

    pub fn contains(&self, v: Value) -> Result<()> {
        match (self, v) {
            (Codomain::Chain(c), Value::Real(r)) => c.validate(r),
            (Codomain::Chain(_), Value::Elem(_)) => Err(Error::InvalidElement("expected a real number".into())),
            (_, Value::Elem(e)) if (e as usize) < self.size().unwrap_or(0) => Ok(()),
            _ => Err(Error::InvalidElement(format!("value {v:?} outside codomain {}", self.name()))),
        }
    }

    /// Equality of map outputs; real values compare within `1e-9`.
    pub fn eq(&self, a: Value, b: Value) -> bool {
        match (a, b) {
            (Value::Real(x), Value::Real(y)) => ImplicitChain::values_equal(x, y),
            _ => a == b,
        }
    }

    fn require_lattice(&self) -> Result<()> {
        if self.is_lattice() {
            Ok(())
        } else {
            Err(Error::precondition(format!(
                "codomain {} is a bare set without lattice operations",
                self.name()
            )))
        }
    }

    pub fn meet(&self, a: Value, b: Value) -> Result<Value> {
        self.require_lattice()?;
        Ok(match self {
            Codomain::Lattice(l) => l.meet(finite_elem(a), finite_elem(b)).into(),
            _ => Value::Real(real(a).min(real(b))),
        })
    }

    pub fn join(&self, a: Value, b: Value) -> Result<Value> {
        self.require_lattice()?;
        Ok(match self {
            Codomain::Lattice(l) => l.join(finite_elem(a), finite_elem(b)).into(),
            _ => Value::Real(real(a).max(real(b))),
        })
    }

    /// Order on outputs; on the real chain `a <= b + 1e-9`.
    pub fn leq(&self, a: Value, b: Value) -> Result<bool> {
        self.require_lattice()?;
        Ok(match self {
            Codomain::Lattice(l) => l.leq(finite_elem(a), finite_elem(b)),
            _ => real(a) <= real(b) + crate::lattice::REAL_TOLERANCE,
        })
    }

    pub fn render(&self, v: Value) -> String {
        match (self, v) {
            (Codomain::Lattice(l), Value::Elem(e)) if (e as usize) < l.size() => l.label(Element(e)).to_string(),
            (Codomain::Set(s), Value::Elem(e)) if (e as usize) < s.len() => s[e as usize].clone(),
            (_, Value::Real(r)) => format!("{r}"),
            (_, Value::Elem(e)) => format!("#{e}"),
        }
    }

    pub fn parse_value(&self, label: &str) -> Result<Value> {
        match self {
            Codomain::Lattice(l) => l.parse_element(label).map(Value::from),
            Codomain::Set(s) => s
                .iter()
                .position(|x| x == label.trim())
                .map(|i| Value::Elem(i as u32))
                .ok_or_else(|| Error::InvalidElement(format!("no value labelled {label:?} in the codomain set"))),
            Codomain::Chain(c) => {
                let r: f64 = label
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidElement(format!("{label:?} is not a real number")))?;
                c.validate(r)?;
                Ok(Value::Real(r))
            }
        }
    }
}

/// How a map computes its value.
#[derive(Debug, Clone)]
pub enum Body {
    /// Row-major table of codomain indices over the domain power.
    Table(Vec<u32>),
    /// Returns the given (0-based) slot.
    Projection(usize),
    /// The k-th median of the arguments.
    Median(usize),
    Constant(Value),
    /// `∏ x_i^{w_i}` on the real chain.
    WeightedGeomean(Vec<f64>),
    /// `outer ∘ inner`, with `outer` a unary table on the inner codomain.
    Compose { outer: Vec<u32>, inner: Box<MultiMap> },
    /// `x ↦ T(x, …, x)`.
    Diagonal(Box<MultiMap>),
}

#[derive(Debug, Clone)]
pub struct MultiMap {
    arity: usize,
    domain: Domain,
    codomain: Codomain,
    body: Body,
}

impl MultiMap {
    pub fn new(arity: usize, domain: Domain, codomain: Codomain, body: Body) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Arity("maps need arity >= 1".into()));
        }
        match (&body, &domain) {
            (Body::Table(t), Domain::Finite(l)) => {
                let cells = search::tuple_count(l.size(), arity)?;
                if t.len() as u64 != cells {
                    return Err(Error::format(format!(
                        "table has {} entries, expected {}^{arity} = {cells}",
                        t.len(),
                        l.size()
                    )));
                }
                if codomain.size().is_none() {
                    return Err(Error::format("table maps need a finite codomain"));
                }
                for &v in t {
                    codomain.contains(Value::Elem(v))?;
                }
            }
            (Body::Table(_), Domain::Chain(_)) => {
                return Err(Error::format("table maps need a finite domain"));
            }
            (Body::Projection(i), _) => {
                if *i >= arity {
                    return Err(Error::Index(format!("projection slot {} outside 1..={arity}", i + 1)));
                }
                same_lattice(&domain, &codomain)?;
            }
            (Body::Median(k), _) => {
                if *k == 0 || *k > arity {
                    return Err(Error::Index(format!("median k = {k} outside 1..={arity}")));
                }
                same_lattice(&domain, &codomain)?;
            }
            (Body::Constant(v), _) => codomain.contains(*v)?,
            (Body::WeightedGeomean(w), Domain::Chain(_)) => {
                if !matches!(codomain, Codomain::Chain(_)) {
                    return Err(Error::format("weighted-geomean maps into the real chain"));
                }
                if w.len() != arity {
                    return Err(Error::Arity(format!("{} weights for arity {arity}", w.len())));
                }
                if w.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
                    return Err(Error::format("weights must be positive"));
                }
                let sum: f64 = w.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::format(format!("weights sum to {sum}, expected 1")));
                }
            }
            (Body::WeightedGeomean(_), Domain::Finite(_)) => {
                return Err(Error::format("weighted-geomean is only defined on the real chain"));
            }
            (Body::Compose { outer, inner }, _) => {
                if inner.arity != arity {
                    return Err(Error::Arity("composed map arity differs".into()));
                }
                let via = inner
                    .codomain
                    .lattice()
                    .ok_or_else(|| Error::format("composition needs a finite inner codomain"))?;
                if outer.len() != via.size() {
                    return Err(Error::format(format!(
                        "outer table has {} entries, expected {}",
                        outer.len(),
                        via.size()
                    )));
                }
                for &v in outer {
                    codomain.contains(Value::Elem(v))?;
                }
            }
            (Body::Diagonal(inner), _) => {
                if arity != 1 {
                    return Err(Error::Arity("a diagonal is unary".into()));
                }
                let _ = inner;
            }
        }
        Ok(MultiMap {
            arity,
            domain,
            codomain,
            body,
        })
    }

    pub fn table(domain: Arc<FiniteLattice>, codomain: Codomain, arity: usize, values: Vec<u32>) -> Result<Self> {
        Self::new(arity, Domain::Finite(domain), codomain, Body::Table(values))
    }

    /// Projection onto the 1-based slot `i`.
    pub fn projection(domain: Domain, arity: usize, i: usize) -> Result<Self> {
        let codomain = domain.as_codomain();
        let slot = i.checked_sub(1).ok_or_else(|| Error::Index("projection slots are 1-based".into()))?;
        Self::new(arity, domain, codomain, Body::Projection(slot))
    }

    pub fn median(domain: Domain, arity: usize, k: usize) -> Result<Self> {
        let codomain = domain.as_codomain();
        Self::new(arity, domain, codomain, Body::Median(k))
    }

    pub fn constant(domain: Domain, codomain: Codomain, arity: usize, value: Value) -> Result<Self> {
        Self::new(arity, domain, codomain, Body::Constant(value))
    }

    pub fn weighted_geomean(weights: Vec<f64>) -> Result<Self> {
        let chain = ImplicitChain::default();
        Self::new(
            weights.len(),
            Domain::Chain(chain),
            Codomain::Chain(chain),
            Body::WeightedGeomean(weights),
        )
    }

    pub fn compose(outer: Vec<u32>, inner: MultiMap, codomain: Codomain) -> Result<Self> {
        Self::new(
            inner.arity,
            inner.domain.clone(),
            codomain,
            Body::Compose {
                outer,
                inner: Box::new(inner),
            },
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn codomain(&self) -> &Codomain {
        &self.codomain
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    /// Table maps only: the stored value table.
    pub fn table_values(&self) -> Option<&[u32]> {
        match &self.body {
            Body::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[Value]) -> Result<Value> {
        if x.len() != self.arity {
            return Err(Error::Arity(format!("got {} arguments, arity is {}", x.len(), self.arity)));
        }
        for &v in x {
            self.domain.contains(v)?;
        }
        self.eval_unchecked(x)
    }

    /// Evaluates without validating the arguments against the domain.
    pub fn eval_unchecked(&self, x: &[Value]) -> Result<Value> {
        match &self.body {
            Body::Table(t) => {
                let base = self.domain.finite().expect("validated").size();
                let idx = x.iter().fold(0usize, |acc, &v| acc * base + finite_elem(v).index());
                Ok(Value::Elem(t[idx]))
            }
            Body::Projection(i) => Ok(x[*i]),
            Body::Median(k) => self.domain.median(x, *k),
            Body::Constant(v) => Ok(*v),
            Body::WeightedGeomean(w) => Ok(Value::Real(
                x.iter().zip(w).map(|(&v, &wi)| real(v).powf(wi)).product(),
            )),
            Body::Compose { outer, inner } => {
                let mid = inner.eval_unchecked(x)?;
                Ok(Value::Elem(outer[finite_elem(mid).index()]))
            }
            Body::Diagonal(inner) => inner.eval_unchecked(&vec![x[0]; inner.arity]),
        }
    }

    pub(crate) fn witness(
        &self,
        law: Law,
        inputs: Vec<Vec<Value>>,
        params: &[(&str, usize)],
        lhs: Value,
        rhs: Value,
    ) -> Witness {
        Witness {
            law,
            map: Some(self.to_string()),
            rendered: inputs
                .iter()
                .map(|t| t.iter().map(|&v| self.domain.render(v)).collect())
                .collect(),
            inputs,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
            lhs,
            rhs,
            lhs_label: self.codomain.render(lhs),
            rhs_label: self.codomain.render(rhs),
        }
    }

    /// Runs `probe` on every tuple of length `len`; `probe` returns the first
    /// violated instance for that tuple, if any.
    pub(crate) fn scan<F>(&self, law: Law, len: usize, plan: &SamplePlan, probe: F) -> Result<CheckReport>
    where
        F: Fn(&[Value]) -> Result<Option<Witness>> + Sync + Send,
    {
        let space = self.domain.tuples(len, plan)?;
        let (examined, witness) = search::first_failure(space.total(), |i| probe(&space.tuple(i)))?;
        Ok(match witness {
            Some(w) => CheckReport::fail(law, examined, w),
            None => CheckReport::pass(law, examined, space.is_exhaustive()),
        })
    }

    /// `P_T(x) = T(x, …, x)`. Refused unless the map is symmetric.
    pub fn diagonal(&self, plan: &SamplePlan) -> Result<MultiMap> {
        let sym = is_symmetric(self, plan)?;
        if !sym.passed() {
            return Err(Error::precondition(format!(
                "diagonal is defined for symmetric maps; {}",
                sym.witness.map(|w| w.to_string()).unwrap_or_default()
            )));
        }
        if self.arity == 1 {
            return Ok(self.clone());
        }
        MultiMap::new(
            1,
            self.domain.clone(),
            self.codomain.clone(),
            Body::Diagonal(Box::new(self.clone())),
        )
    }
}

fn same_lattice(domain: &Domain, codomain: &Codomain) -> Result<()> {
    let ok = match (domain, codomain) {
        (Domain::Finite(a), Codomain::Lattice(b)) => Arc::ptr_eq(a, b) || a.labels() == b.labels(),
        (Domain::Chain(_), Codomain::Chain(_)) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::format("projection and median maps take values in their domain"))
    }
}

impl fmt::Display for MultiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Table(t) => write!(f, "table[{}]", t.iter().join(",")),
            Body::Projection(i) => write!(f, "projection({})", i + 1),
            Body::Median(k) => write!(f, "median({k})"),
            Body::Constant(v) => write!(f, "constant({})", self.codomain.render(*v)),
            Body::WeightedGeomean(w) => write!(f, "weighted-geomean({})", w.iter().join(",")),
            Body::Compose { outer, inner } => write!(f, "[{}]∘{inner}", outer.iter().join(",")),
            Body::Diagonal(inner) => write!(f, "diag({inner})"),
        }?;
        write!(f, ":{}^{}->{}", self.domain.name(), self.arity, self.codomain.name())
    }
}

/// Expands `(value, multiplicity)` blocks into a tuple of length `arity`.
pub fn power_tuple(blocks: &[(Value, usize)], arity: usize) -> Result<Vec<Value>> {
    let total: usize = blocks.iter().map(|&(_, m)| m).sum();
    if total != arity {
        return Err(Error::Arity(format!("multiplicities sum to {total}, expected {arity}")));
    }
    Ok(blocks
        .iter()
        .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
        .collect())
}

/// `(T(x), T(x with slots i, i+1 swapped))`, `i` 0-based.
pub fn symmetry_instance(map: &MultiMap, x: &[Value], slot: usize) -> Result<(Value, Value)> {
    let mut swapped = x.to_vec();
    swapped.swap(slot, slot + 1);
    Ok((map.eval_unchecked(x)?, map.eval_unchecked(&swapped)?))
}

/// One instance of the n-homomorphism law in `slot` (0-based).
/// Join: `(T(…, x_i ∨ y, …), T(x) ∨ T(…, y, …))`; meet is dual.
pub fn hom_instance(map: &MultiMap, x: &[Value], y: Value, slot: usize, join: bool) -> Result<(Value, Value)> {
    let dom = map.domain();
    let cod = map.codomain();
    let mut with_y = x.to_vec();
    with_y[slot] = y;
    let mut combined = x.to_vec();
    combined[slot] = if join { dom.join(x[slot], y) } else { dom.meet(x[slot], y) };
    let (tx, ty) = (map.eval_unchecked(x)?, map.eval_unchecked(&with_y)?);
    let rhs = if join { cod.join(tx, ty)? } else { cod.meet(tx, ty)? };
    Ok((map.eval_unchecked(&combined)?, rhs))
}

/// `(T((x∧y)^n), T(x^n) ∧ T(y^n))`, or the join version.
pub fn diagonal_instance(map: &MultiMap, x: Value, y: Value, join: bool) -> Result<(Value, Value)> {
    let dom = map.domain();
    let cod = map.codomain();
    let n = map.arity();
    let z = if join { dom.join(x, y) } else { dom.meet(x, y) };
    let (pz, px, py) = (
        map.eval_unchecked(&vec![z; n])?,
        map.eval_unchecked(&vec![x; n])?,
        map.eval_unchecked(&vec![y; n])?,
    );
    let rhs = if join { cod.join(px, py)? } else { cod.meet(px, py)? };
    Ok((pz, rhs))
}

/// `T(xσ) = T(x)` for every adjacent transposition `σ`; these generate the
/// symmetric group.
pub fn is_symmetric(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    let n = map.arity();
    let cod = map.codomain();
    map.scan(Law::Symmetry, n, plan, |x| {
        for slot in 0..n.saturating_sub(1) {
            let (lhs, rhs) = symmetry_instance(map, x, slot)?;
            if !cod.eq(lhs, rhs) {
                return Ok(Some(map.witness(Law::Symmetry, vec![x.to_vec()], &[("slot", slot + 1)], lhs, rhs)));
            }
        }
        Ok(None)
    })
}

/// Symmetry under every permutation; `n!` per tuple, so only an oracle for
/// small arities.
pub fn is_symmetric_all_permutations(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    let n = map.arity();
    let cod = map.codomain();
    map.scan(Law::Symmetry, n, plan, |x| {
        let lhs = map.eval_unchecked(x)?;
        for perm in (0..n).permutations(n) {
            let permuted: Vec<Value> = perm.iter().map(|&i| x[i]).collect();
            let rhs = map.eval_unchecked(&permuted)?;
            if !cod.eq(lhs, rhs) {
                return Ok(Some(map.witness(Law::Symmetry, vec![x.to_vec(), permuted], &[], lhs, rhs)));
            }
        }
        Ok(None)
    })
}

/// Both lattice n-homomorphism laws in every slot. Tuples are `(x_1..x_n, y)`.
pub fn is_n_homomorphism(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    let n = map.arity();
    let cod = map.codomain();
    cod.require_lattice()?;
    map.scan(Law::NHomomorphism, n + 1, plan, |xy| {
        let (x, y) = xy.split_at(n);
        for slot in 0..n {
            for (join, law) in [(true, Law::JoinHomomorphism), (false, Law::MeetHomomorphism)] {
                let (lhs, rhs) = hom_instance(map, x, y[0], slot, join)?;
                if !cod.eq(lhs, rhs) {
                    return Ok(Some(map.witness(law, vec![x.to_vec(), y.to_vec()], &[("slot", slot + 1)], lhs, rhs)));
                }
            }
        }
        Ok(None)
    })
}

/// `T((x∧y)^n) = T(x^n) ∧ T(y^n)` and `T((x∨y)^n) = T(x^n) ∨ T(y^n)`: the
/// diagonal is a lattice homomorphism. No symmetry requirement.
pub fn check_diagonal_identities(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    let cod = map.codomain();
    cod.require_lattice()?;
    map.scan(Law::DiagonalHomomorphism, 2, plan, |xy| {
        for (join, law) in [(false, Law::DiagonalMeet), (true, Law::DiagonalJoin)] {
            let (lhs, rhs) = diagonal_instance(map, xy[0], xy[1], join)?;
            if !cod.eq(lhs, rhs) {
                return Ok(Some(map.witness(law, vec![xy.to_vec()], &[], lhs, rhs)));
            }
        }
        Ok(None)
    })
}

/// Which enumerated homomorphisms to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomFilter {
    All,
    SymmetricOnly,
}

/// Raw table freedom `|L|^n · log2 |M|` allowed for enumeration.
pub const MAX_ENUMERATION_BITS: f64 = 32.0;

#[derive(Debug, Clone)]
pub struct HomEnumeration {
    pub maps: Vec<MultiMap>,
    /// `|M|^(|L|^n)`, the number of candidate tables.
    pub table_space: u64,
    /// Search nodes visited after pruning.
    pub nodes: u64,
    /// n-homomorphisms found before filtering.
    pub homs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Constraint {
    Join { out: usize, a: usize, b: usize },
    Meet { out: usize, a: usize, b: usize },
}

/// All table maps `L^n → M` that are lattice n-homomorphisms, in
/// lexicographic table order.
///
/// Backtracks cell by cell in row-major order and checks each law instance
/// as soon as its last cell is assigned; the instances with `x_i ≤ y` are
/// exactly slotwise monotonicity, so non-monotone prefixes die early.
pub fn enumerate_homs(
    domain: &Arc<FiniteLattice>,
    codomain: &Arc<FiniteLattice>,
    arity: usize,
    filter: HomFilter,
) -> Result<HomEnumeration> {
    if arity == 0 {
        return Err(Error::Arity("arity must be >= 1".into()));
    }
    let (l, m) = (domain.size(), codomain.size());
    let cells = search::tuple_count(l, arity)? as usize;
    let bits = cells as f64 * (m as f64).log2();
    if bits > MAX_ENUMERATION_BITS {
        return Err(Error::capacity(format!(
            "enumeration of {}^{arity} -> {} needs {bits:.1} bits of table freedom, limit is {MAX_ENUMERATION_BITS}",
            domain.name(),
            codomain.name()
        )));
    }
    let table_space = (m as u64).pow(cells as u32);

    let mut buckets: Vec<Vec<Constraint>> = vec![Vec::new(); cells];
    let mut seen = HashSet::new();
    let mut x = vec![0u32; arity];
    for cell in 0..cells {
        search::decode_tuple(cell as u64, l, &mut x);
        for slot in 0..arity {
            for y in 0..l as u32 {
                let at = |v: u32| {
                    let mut t = x.clone();
                    t[slot] = v;
                    t.iter().fold(0usize, |acc, &e| acc * l + e as usize)
                };
                let b = at(y);
                let xi = Element(x[slot]);
                let join_out = at(domain.join(xi, Element(y)).0);
                let meet_out = at(domain.meet(xi, Element(y)).0);
                for c in [
                    Constraint::Join { out: join_out, a: cell, b },
                    Constraint::Meet { out: meet_out, a: cell, b },
                ] {
                    if seen.insert(c) {
                        let (Constraint::Join { out, a, b } | Constraint::Meet { out, a, b }) = c;
                        buckets[out.max(a).max(b)].push(c);
                    }
                }
            }
        }
    }

    struct Search<'a> {
        buckets: &'a [Vec<Constraint>],
        codomain: &'a FiniteLattice,
        table: Vec<u32>,
        nodes: u64,
        found: Vec<Vec<u32>>,
    }
    impl Search<'_> {
        fn ok(&self, cell: usize) -> bool {
            let t = &self.table;
            self.buckets[cell].iter().all(|c| match *c {
                Constraint::Join { out, a, b } => {
                    self.codomain.join(Element(t[a]), Element(t[b])).0 == t[out]
                }
                Constraint::Meet { out, a, b } => {
                    self.codomain.meet(Element(t[a]), Element(t[b])).0 == t[out]
                }
            })
        }

        fn go(&mut self, cell: usize) {
            if cell == self.table.len() {
                self.found.push(self.table.clone());
                return;
            }
            for v in 0..self.codomain.size() as u32 {
                self.nodes += 1;
                self.table[cell] = v;
                if self.ok(cell) {
                    self.go(cell + 1);
                }
            }
        }
    }
    let mut s = Search {
        buckets: &buckets,
        codomain,
        table: vec![0; cells],
        nodes: 0,
        found: Vec::new(),
    };
    s.go(0);

    let homs = s.found.len();
    let mut maps = Vec::with_capacity(homs);
    for t in s.found {
        let map = MultiMap::table(domain.clone(), Codomain::Lattice(codomain.clone()), arity, t)?;
        if filter == HomFilter::SymmetricOnly && !is_symmetric(&map, &SamplePlan::default())?.passed() {
            continue;
        }
        maps.push(map);
    }
    Ok(HomEnumeration {
        maps,
        table_space,
        nodes: s.nodes,
        homs,
    })
}

/// Every table map `L^n → M`, in lexicographic order. Capped at `2^20` maps.
pub fn all_table_maps(domain: &Arc<FiniteLattice>, codomain: &Codomain, arity: usize) -> Result<Vec<MultiMap>> {
    let cells = search::tuple_count(domain.size(), arity)? as u32;
    let m = codomain
        .size()
        .ok_or_else(|| Error::format("table maps need a finite codomain"))? as u64;
    let count = m
        .checked_pow(cells)
        .filter(|&c| c <= 1 << 20)
        .ok_or_else(|| Error::capacity(format!("{m}^{cells} tables exceeds 2^20")))?;
    (0..count)
        .map(|i| {
            let mut t = vec![0u32; cells as usize];
            search::decode_tuple(i, m as usize, &mut t);
            MultiMap::table(domain.clone(), codomain.clone(), arity, t)
        })
        .collect()
}

/// `count` uniformly random table maps from a seeded generator.
pub fn random_table_maps(
    domain: &Arc<FiniteLattice>,
    codomain: &Codomain,
    arity: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<MultiMap>> {
    let cells = search::tuple_count(domain.size(), arity)? as usize;
    let m = codomain
        .size()
        .ok_or_else(|| Error::format("table maps need a finite codomain"))? as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t = (0..cells).map(|_| rng.gen_range(0..m)).collect();
            MultiMap::table(domain.clone(), codomain.clone(), arity, t)
        })
        .collect()
}
