//! k-th medians and total orderizations.
//!
//! `M_k(x_1..x_n)` is the join, over all `(n+1-k)`-element index subsets, of
//! the meet of the subset. On a distributive lattice it equals the meet over
//! all `k`-element subsets of their joins, and on a chain it is the k-th
//! smallest entry. The bit-counting form works on Birkhoff codes: an
//! irreducible lies below `M_k` iff it lies below at least `n+1-k` entries.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Element, FiniteLattice, ImplicitChain, Lattice};
use crate::search::fold_combinations;

/// Largest tuple length the subset formulas accept (`C(25, 12)` subsets).
pub const MAX_DIRECT_ARITY: usize = 25;

fn check_args<L: Lattice + ?Sized>(lat: &L, xs: &[L::Elem], k: usize) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Arity("a median needs at least one entry".into()));
    }
    if k == 0 || k > xs.len() {
        return Err(Error::Index(format!("k = {k} outside 1..={}", xs.len())));
    }
    xs.iter().try_for_each(|&x| lat.validate(x))
}

fn check_direct<L: Lattice + ?Sized>(lat: &L, xs: &[L::Elem], k: usize) -> Result<()> {
    check_args(lat, xs, k)?;
    if xs.len() > MAX_DIRECT_ARITY {
        return Err(Error::capacity(format!(
            "subset formula refused for n = {} > {MAX_DIRECT_ARITY}; use the fast path",
            xs.len()
        )));
    }
    Ok(())
}

/// Join over `(n+1-k)`-subsets of their meets.
pub fn median_k_direct<L: Lattice + ?Sized>(lat: &L, xs: &[L::Elem], k: usize) -> Result<L::Elem> {
    check_direct(lat, xs, k)?;
    let n = xs.len();
    if k == 1 {
        return Ok(lat.meet_all(xs));
    }
    if k == n {
        return Ok(lat.join_all(xs));
    }
    let mut acc: Option<L::Elem> = None;
    fold_combinations(
        n,
        n + 1 - k,
        &|i| xs[i],
        &|m, i| lat.meet(m, xs[i]),
        &mut |m| acc = Some(acc.map_or(m, |a| lat.join(a, m))),
    );
    Ok(acc.expect("at least one subset"))
}

/// Meet over `k`-subsets of their joins.
pub fn median_k_dual<L: Lattice + ?Sized>(lat: &L, xs: &[L::Elem], k: usize) -> Result<L::Elem> {
    check_direct(lat, xs, k)?;
    let n = xs.len();
    if k == 1 {
        return Ok(lat.meet_all(xs));
    }
    if k == n {
        return Ok(lat.join_all(xs));
    }
    let mut acc: Option<L::Elem> = None;
    fold_combinations(
        n,
        k,
        &|i| xs[i],
        &|j, i| lat.join(j, xs[i]),
        &mut |j| acc = Some(acc.map_or(j, |a| lat.meet(a, j))),
    );
    Ok(acc.expect("at least one subset"))
}

/// Per-irreducible counts of how many entries lie above it.
fn bit_counts(lat: &FiniteLattice, xs: &[Element]) -> Result<Vec<u32>> {
    let emb = lat.birkhoff().ok_or_else(|| {
        Error::precondition(format!("{} has no Birkhoff embedding attached", lat.name()))
    })?;
    let mut counts = vec![0u32; emb.irreducibles().len()];
    for &x in xs {
        for (w, &word) in emb.encode(x).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                counts[w * 64 + b] += 1;
                bits &= bits - 1;
            }
        }
    }
    Ok(counts)
}

fn decode_threshold(lat: &FiniteLattice, counts: &[u32], need: u32) -> Result<Element> {
    let emb = lat.birkhoff().expect("checked by bit_counts");
    let mut code = vec![0u64; emb.words()];
    for (j, &c) in counts.iter().enumerate() {
        if c >= need {
            code[j / 64] |= 1 << (j % 64);
        }
    }
    emb.decode(&code).ok_or_else(|| {
        Error::Internal(format!(
            "thresholded code is not a downset of {}'s irreducibles",
            lat.name()
        ))
    })
}

/// Bit-counting median through the Birkhoff embedding. `O(n · |J|)`, no cap
/// on `n`.
pub fn median_k_fast(lat: &FiniteLattice, xs: &[Element], k: usize) -> Result<Element> {
    check_args(lat, xs, k)?;
    let counts = bit_counts(lat, xs)?;
    decode_threshold(lat, &counts, (xs.len() + 1 - k) as u32)
}

/// `(M_1(x), …, M_n(x))`, a nondecreasing chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalOrderization<E>(pub Vec<E>);

impl<E: Copy> TotalOrderization<E> {
    pub fn as_slice(&self) -> &[E] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<E> {
        self.0
    }

    pub fn is_chain<L: Lattice<Elem = E> + ?Sized>(&self, lat: &L) -> bool {
        self.0.windows(2).all(|w| lat.leq(w[0], w[1]))
    }
}

/// Lattices with a preferred median strategy.
pub trait MedianOps: Lattice {
    fn median(&self, xs: &[Self::Elem], k: usize) -> Result<Self::Elem>;

    fn total_orderization(&self, xs: &[Self::Elem]) -> Result<TotalOrderization<Self::Elem>> {
        (1..=xs.len())
            .map(|k| self.median(xs, k))
            .collect::<Result<Vec<_>>>()
            .map(TotalOrderization)
    }
}

impl MedianOps for FiniteLattice {
    /// Bit counting when an embedding is attached, the subset formula otherwise.
    fn median(&self, xs: &[Element], k: usize) -> Result<Element> {
        if self.birkhoff().is_some() {
            median_k_fast(self, xs, k)
        } else {
            median_k_direct(self, xs, k)
        }
    }

    fn total_orderization(&self, xs: &[Element]) -> Result<TotalOrderization<Element>> {
        if self.birkhoff().is_none() {
            return (1..=xs.len())
                .map(|k| median_k_direct(self, xs, k))
                .collect::<Result<Vec<_>>>()
                .map(TotalOrderization);
        }
        check_args(self, xs, 1)?;
        let counts = bit_counts(self, xs)?;
        let n = xs.len() as u32;
        (1..=n)
            .map(|k| decode_threshold(self, &counts, n + 1 - k))
            .collect::<Result<Vec<_>>>()
            .map(TotalOrderization)
    }
}

impl MedianOps for ImplicitChain {
    /// k-th smallest; the chain laws make this the k-th median.
    fn median(&self, xs: &[f64], k: usize) -> Result<f64> {
        check_args(self, xs, k)?;
        let mut sorted = xs.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Ok(sorted[k - 1])
    }

    fn total_orderization(&self, xs: &[f64]) -> Result<TotalOrderization<f64>> {
        check_args(self, xs, 1)?;
        let mut sorted = xs.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Ok(TotalOrderization(sorted))
    }
}

/// `M_{k,m}`: the k-th median of the prefix `x_1..x_m`.
pub fn median_relative<L: MedianOps + ?Sized>(lat: &L, xs: &[L::Elem], k: usize, m: usize) -> Result<L::Elem> {
    if m == 0 || m > xs.len() {
        return Err(Error::Index(format!("m = {m} outside 1..={}", xs.len())));
    }
    if k == 0 || k > m {
        return Err(Error::Index(format!("k = {k} outside 1..={m}")));
    }
    lat.median(&xs[..m], k)
}

pub fn total_orderization<L: MedianOps + ?Sized>(lat: &L, xs: &[L::Elem]) -> Result<TotalOrderization<L::Elem>> {
    lat.total_orderization(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_chain, make_divisor, make_m3, make_powerset};

    fn el(lat: &FiniteLattice, labels: &[&str]) -> Vec<Element> {
        labels.iter().map(|l| lat.parse_element(l).unwrap()).collect()
    }

    #[test]
    fn divisor_36_median_of_4_6_9() {
        let d = make_divisor(36).unwrap();
        let x = el(&d, &["4", "6", "9"]);
        // pairwise gcds 2, 1, 3 join to 6; pairwise lcms 12, 36, 18 meet to 6
        for f in [median_k_direct::<FiniteLattice>, median_k_dual::<FiniteLattice>] {
            assert_eq!(d.label(f(&d, &x, 2).unwrap()), "6");
        }
        assert_eq!(d.label(median_k_fast(&d, &x, 2).unwrap()), "6");
    }

    #[test]
    fn chain_median_is_order_statistic() {
        let c = make_chain(5).unwrap();
        let x = el(&c, &["3", "0", "2"]);
        assert_eq!(median_k_direct(&c, &x, 2).unwrap(), Element(2));
        assert_eq!(median_k_fast(&c, &x, 2).unwrap(), Element(2));
        let to = total_orderization(&c, &x).unwrap();
        assert_eq!(to.0, vec![Element(0), Element(2), Element(3)]);
        let sorted = el(&c, &["1", "2", "3"]);
        assert_eq!(total_orderization(&c, &sorted).unwrap().0, sorted);
    }

    #[test]
    fn powerset_examples() {
        let p = make_powerset(&["a", "b", "c"]).unwrap();
        let x = el(&p, &["{a}", "{b}", "{a,b}"]);
        assert_eq!(p.label(median_k_direct(&p, &x, 2).unwrap()), "{a,b}");
        assert_eq!(p.label(median_k_dual(&p, &x, 2).unwrap()), "{a,b}");
        let to = total_orderization(&p, &x).unwrap();
        let labels: Vec<&str> = to.0.iter().map(|&e| p.label(e)).collect();
        assert_eq!(labels, ["{}", "{a,b}", "{a,b}"]);

        let q = make_powerset(&["a", "b"]).unwrap();
        let x = el(&q, &["{a}", "{a}", "{b}"]);
        assert_eq!(q.label(median_k_fast(&q, &x, 2).unwrap()), "{a}");
    }

    #[test]
    fn singleton_median_is_identity() {
        let d = make_divisor(36).unwrap();
        for e in d.elements() {
            assert_eq!(median_k_direct(&d, &[e], 1).unwrap(), e);
            assert_eq!(median_k_dual(&d, &[e], 1).unwrap(), e);
            assert_eq!(median_k_fast(&d, &[e], 1).unwrap(), e);
        }
    }

    #[test]
    fn relative_median() {
        let c = make_chain(4).unwrap();
        let x = el(&c, &["3", "1", "2"]);
        assert_eq!(median_relative(&c, &x, 2, 2).unwrap(), Element(3));
        assert_eq!(median_relative(&c, &x, 2, 3).unwrap(), Element(2));
        let d = make_divisor(36).unwrap();
        let x = el(&d, &["4", "6", "9"]);
        assert_eq!(d.label(median_relative(&d, &x, 1, 2).unwrap()), "2");
        assert!(matches!(median_relative(&d, &x, 3, 2), Err(Error::Index(_))));
        assert!(matches!(median_relative(&d, &x, 1, 4), Err(Error::Index(_))));
    }

    #[test]
    fn error_paths() {
        let c = make_chain(3).unwrap();
        assert!(matches!(median_k_direct(&c, &[Element(0)], 2), Err(Error::Index(_))));
        assert!(matches!(median_k_direct(&c, &[Element(0)], 0), Err(Error::Index(_))));
        assert!(matches!(median_k_direct(&c, &[], 1), Err(Error::Arity(_))));
        assert!(matches!(median_k_dual(&c, &[Element(7)], 1), Err(Error::InvalidElement(_))));
        let long = vec![Element(1); 26];
        assert!(matches!(median_k_direct(&c, &long, 13), Err(Error::Capacity(_))));
        assert_eq!(median_k_fast(&c, &long, 13).unwrap(), Element(1));
        // M3 has no embedding, so the fast path refuses it
        let m3 = make_m3();
        assert!(matches!(median_k_fast(&m3, &[Element(1)], 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn m3_breaks_duality() {
        let m3 = make_m3();
        let x = el(&m3, &["a", "b", "c"]);
        assert_eq!(m3.label(median_k_direct(&m3, &x, 2).unwrap()), "0");
        assert_eq!(m3.label(median_k_dual(&m3, &x, 2).unwrap()), "1");
    }

    #[test]
    fn implicit_chain_sorts() {
        let r = ImplicitChain::default();
        let x = [2.5, 0.5, 1.0];
        assert_eq!(r.median(&x, 2).unwrap(), 1.0);
        assert_eq!(median_k_direct(&r, &x, 2).unwrap(), 1.0);
        assert_eq!(r.total_orderization(&x).unwrap().0, vec![0.5, 1.0, 2.5]);
        assert!(r.median(&[-1.0], 1).is_err());
    }
}
