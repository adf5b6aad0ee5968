use std::collections::HashMap;

use super::{max_elements, FiniteLattice, LatticeKind, Ops, MAX_POWERSET_GENERATORS};
use crate::error::{Error, Result};

/// Divisor lattices factor `n` by trial division, so `n` is bounded.
pub const MAX_DIVISOR_N: u64 = 1 << 40;

/// Downsets are bitmasks over the poset's elements.
pub const MAX_POSET_ELEMENTS: usize = 64;

fn check_cap(n: usize, what: &str) -> Result<()> {
    let cap = max_elements();
    if n > cap {
        Err(Error::capacity(format!("{what} has {n} elements, cap is {cap}")))
    } else {
        Ok(())
    }
}

fn check_atom_label(label: &str) -> Result<()> {
    if label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '(' | ')' | '∅'))
    {
        Err(Error::format(format!(
            "label {label:?} must be nonempty without whitespace, commas, braces or parentheses"
        )))
    } else {
        Ok(())
    }
}

fn set_label<S: AsRef<str>>(names: &[S], mask: u64) -> String {
    let members: Vec<&str> = names
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, s)| s.as_ref())
        .collect();
    format!("{{{}}}", members.join(","))
}

pub(super) fn chain(n: usize) -> Result<FiniteLattice> {
    if n == 0 {
        return Err(Error::format("chain size must be at least 1"));
    }
    check_cap(n, "chain")?;
    let labels = (0..n).map(|i| i.to_string()).collect();
    FiniteLattice::assemble(format!("C{n}"), labels, Ops::Chain, LatticeKind::Chain)?.with_birkhoff()
}

pub(super) fn powerset<S: AsRef<str>>(ground: &[S]) -> Result<FiniteLattice> {
    if ground.is_empty() {
        return Err(Error::format("powerset ground set must be nonempty"));
    }
    if ground.len() > MAX_POWERSET_GENERATORS {
        return Err(Error::capacity(format!(
            "powerset of {} generators exceeds the cap of {MAX_POWERSET_GENERATORS}",
            ground.len()
        )));
    }
    for (i, g) in ground.iter().enumerate() {
        check_atom_label(g.as_ref())?;
        if ground[..i].iter().any(|h| h.as_ref() == g.as_ref()) {
            return Err(Error::format(format!("duplicate ground label {:?}", g.as_ref())));
        }
    }
    let size = 1usize << ground.len();
    let labels = (0..size as u64).map(|m| set_label(ground, m)).collect();
    let names: Vec<&str> = ground.iter().map(AsRef::as_ref).collect();
    FiniteLattice::assemble(
        format!("powerset({})", names.join(",")),
        labels,
        Ops::Powerset,
        LatticeKind::Powerset,
    )?
    .with_birkhoff()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(super) fn divisor(n: u64) -> Result<FiniteLattice> {
    if n == 0 {
        return Err(Error::format("divisor lattice needs n >= 1"));
    }
    if n > MAX_DIVISOR_N {
        return Err(Error::capacity(format!("divisor lattice of {n} exceeds n <= {MAX_DIVISOR_N}")));
    }
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            divs.push(d);
            if d * d != n {
                divs.push(n / d);
            }
        }
        d += 1;
    }
    divs.sort_unstable();
    check_cap(divs.len(), "divisor lattice")?;
    let pos: HashMap<u64, u32> = divs.iter().enumerate().map(|(i, &d)| (d, i as u32)).collect();
    let size = divs.len();
    let mut meet = Vec::with_capacity(size * size);
    let mut join = Vec::with_capacity(size * size);
    for &a in &divs {
        for &b in &divs {
            let g = gcd(a, b);
            meet.push(pos[&g]);
            join.push(pos[&(a / g * b)]);
        }
    }
    let labels = divs.iter().map(|d| d.to_string()).collect();
    FiniteLattice::assemble(format!("divisor({n})"), labels, Ops::Table { meet, join }, LatticeKind::Divisor)?
        .with_birkhoff()
}

pub(super) fn product(a: &FiniteLattice, b: &FiniteLattice) -> Result<FiniteLattice> {
    use super::Lattice;
    let (na, nb) = (a.size(), b.size());
    let size = na
        .checked_mul(nb)
        .ok_or_else(|| Error::capacity("product size overflows"))?;
    check_cap(size, "product")?;
    let split = |i: usize| (super::Element((i / nb) as u32), super::Element((i % nb) as u32));
    let fuse = |x: super::Element, y: super::Element| x.0 * nb as u32 + y.0;
    let mut meet = Vec::with_capacity(size * size);
    let mut join = Vec::with_capacity(size * size);
    for i in 0..size {
        let (x1, y1) = split(i);
        for j in 0..size {
            let (x2, y2) = split(j);
            meet.push(fuse(a.meet(x1, x2), b.meet(y1, y2)));
            join.push(fuse(a.join(x1, x2), b.join(y1, y2)));
        }
    }
    let labels = (0..size)
        .map(|i| {
            let (x, y) = split(i);
            format!("({},{})", a.label(x), b.label(y))
        })
        .collect();
    let lat = FiniteLattice::assemble(
        format!("{}x{}", a.name(), b.name()),
        labels,
        Ops::Table { meet, join },
        LatticeKind::Product,
    )?;
    // a product is distributive iff both factors are
    if a.birkhoff().is_some() && b.birkhoff().is_some() {
        lat.with_birkhoff()
    } else {
        Ok(lat)
    }
}

pub(super) fn downset<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<FiniteLattice> {
    let p = elements.len();
    if p > MAX_POSET_ELEMENTS {
        return Err(Error::capacity(format!(
            "poset has {p} elements, cap is {MAX_POSET_ELEMENTS}"
        )));
    }
    let mut pos = HashMap::new();
    for (i, e) in elements.iter().enumerate() {
        check_atom_label(e.as_ref())?;
        if pos.insert(e.as_ref(), i).is_some() {
            return Err(Error::format(format!("duplicate poset element {:?}", e.as_ref())));
        }
    }
    let lookup = |s: &S| {
        pos.get(s.as_ref())
            .copied()
            .ok_or_else(|| Error::format(format!("cover names unknown element {:?}", s.as_ref())))
    };
    // below[x] = {y : y <= x}, reflexive-transitive closure of the covers
    let mut below: Vec<u64> = (0..p).map(|i| 1u64 << i).collect();
    let mut edges = Vec::with_capacity(covers.len());
    for (lo, hi) in covers {
        let (lo, hi) = (lookup(lo)?, lookup(hi)?);
        if lo == hi {
            return Err(Error::format(format!("cover relation has a loop at {:?}", elements[lo].as_ref())));
        }
        edges.push((lo, hi));
    }
    loop {
        let mut changed = false;
        for &(lo, hi) in &edges {
            let merged = below[hi] | below[lo];
            if merged != below[hi] {
                below[hi] = merged;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for x in 0..p {
        for y in 0..p {
            if x != y && below[x] >> y & 1 == 1 && below[y] >> x & 1 == 1 {
                return Err(Error::format(format!(
                    "cover relation is cyclic through {:?} and {:?}",
                    elements[x].as_ref(),
                    elements[y].as_ref()
                )));
            }
        }
    }

    // strict predecessors come first in this order
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by_key(|&x| (below[x].count_ones(), x));
    let cap = max_elements();
    let mut downsets = Vec::new();
    fn grow(
        i: usize,
        current: u64,
        order: &[usize],
        below: &[u64],
        cap: usize,
        out: &mut Vec<u64>,
    ) -> Result<()> {
        if i == order.len() {
            if out.len() == cap {
                return Err(Error::capacity(format!("downset lattice exceeds the cap of {cap} elements")));
            }
            out.push(current);
            return Ok(());
        }
        let x = order[i];
        grow(i + 1, current, order, below, cap, out)?;
        let strict = below[x] & !(1u64 << x);
        if strict & !current == 0 {
            grow(i + 1, current | 1u64 << x, order, below, cap, out)?;
        }
        Ok(())
    }
    grow(0, 0, &order, &below, cap, &mut downsets)?;
    downsets.sort_by_key(|&m| (m.count_ones(), m));

    let index: HashMap<u64, u32> = downsets.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
    let size = downsets.len();
    let mut meet = Vec::with_capacity(size * size);
    let mut join = Vec::with_capacity(size * size);
    for &a in &downsets {
        for &b in &downsets {
            meet.push(index[&(a & b)]);
            join.push(index[&(a | b)]);
        }
    }
    let labels = downsets.iter().map(|&m| set_label(elements, m)).collect();
    FiniteLattice::assemble(
        format!("downset({p})"),
        labels,
        Ops::Table { meet, join },
        LatticeKind::Downset,
    )?
    .with_birkhoff()
}

/// Builds meet/join tables from an order relation, failing if some pair lacks
/// a greatest lower or least upper bound.
pub(super) fn from_order(name: &str, labels: &[&str], leq: impl Fn(usize, usize) -> bool) -> Result<FiniteLattice> {
    let n = labels.len();
    let bound = |a: usize, b: usize, lower: bool| -> Result<u32> {
        let cands: Vec<usize> = (0..n)
            .filter(|&c| if lower { leq(c, a) && leq(c, b) } else { leq(a, c) && leq(b, c) })
            .collect();
        cands
            .iter()
            .copied()
            .find(|&c| cands.iter().all(|&d| if lower { leq(d, c) } else { leq(c, d) }))
            .map(|c| c as u32)
            .ok_or_else(|| Error::format(format!("{} and {} have no {}", labels[a], labels[b], if lower { "meet" } else { "join" })))
    };
    let mut meet = vec![vec![0; n]; n];
    let mut join = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            meet[a][b] = bound(a, b, true)?;
            join[a][b] = bound(a, b, false)?;
        }
    }
    let mut lat = FiniteLattice::from_tables(labels.iter().map(|s| s.to_string()).collect(), meet, join)?;
    lat.name = name.to_string();
    Ok(lat)
}

/// The diamond M3: `0 < a, b, c < 1` with `a`, `b`, `c` pairwise incomparable.
/// Not distributive; kept as a negative fixture.
pub fn make_m3() -> FiniteLattice {
    let labels = ["0", "a", "b", "c", "1"];
    from_order("M3", &labels, |x, y| x == y || x == 0 || y == 4).expect("M3 is a lattice")
}

/// The pentagon N5: `0 < a < b < 1` and `0 < c < 1`. Not distributive.
pub fn make_n5() -> FiniteLattice {
    let labels = ["0", "a", "b", "c", "1"];
    from_order("N5", &labels, |x, y| x == y || x == 0 || y == 4 || (x == 1 && y == 2))
        .expect("N5 is a lattice")
}
