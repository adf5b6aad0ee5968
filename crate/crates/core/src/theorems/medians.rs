use std::collections::BTreeMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{TheoremId, VerificationRun};
use crate::error::{Error, Result};
use crate::lattice::{Element, FiniteLattice, Lattice};
use crate::median::{median_k_direct, median_k_dual, median_k_fast, MAX_DIRECT_ARITY};
use crate::report::{Law, Verdict, Witness};
use crate::search;

/// Whether a verifier insists on a distributive lattice first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Checked,
    /// Negative controls only: runs on whatever lattice it is given.
    Unchecked,
}

/// Random long tuples for the fast-path comparison.
#[derive(Debug, Clone, Copy)]
pub struct FastPathSample {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
}

fn witness(lat: &FiniteLattice, law: Law, inputs: Vec<Vec<Element>>, params: &[(&str, usize)], lhs: Element, rhs: Element) -> Witness {
    Witness {
        law,
        map: None,
        rendered: inputs
            .iter()
            .map(|t| t.iter().map(|&e| lat.label(e).to_string()).collect())
            .collect(),
        inputs: inputs
            .into_iter()
            .map(|t| t.into_iter().map(Into::into).collect())
            .collect(),
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
        lhs: lhs.into(),
        rhs: rhs.into(),
        lhs_label: lat.label(lhs).to_string(),
        rhs_label: lat.label(rhs).to_string(),
    }
}

/// Scans every tuple of each length in `lengths`; `per_tuple` is the number
/// of law instances each tuple contributes.
fn scan_lengths<F>(
    run: &mut VerificationRun,
    lat: &FiniteLattice,
    lengths: impl IntoIterator<Item = usize>,
    per_tuple: impl Fn(usize) -> u64,
    probe: F,
) -> Result<()>
where
    F: Fn(&[Element]) -> Result<Option<Witness>> + Sync + Send,
{
    for n in lengths {
        let total = search::tuple_count(lat.size(), n)?;
        let (examined, w) = search::first_failure(total, |i| {
            let mut raw = vec![0u32; n];
            search::decode_tuple(i, lat.size(), &mut raw);
            let x: Vec<Element> = raw.into_iter().map(Element).collect();
            probe(&x)
        })?;
        run.count("tuples", examined);
        run.instances += examined * per_tuple(n);
        let verdict = if w.is_some() { Verdict::Fail } else { Verdict::Pass };
        run.absorb(verdict, w);
    }
    Ok(())
}

fn medians(lat: &FiniteLattice, x: &[Element]) -> Result<Vec<Element>> {
    (1..=x.len()).map(|k| median_k_direct(lat, x, k)).collect()
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Symmetry, sorted inputs and the chain property of the medians, plus
/// idempotence of the total orderization, for every tuple with `n <= n_max`.
pub fn verify_prop_medians(lat: &FiniteLattice, n_max: usize) -> Result<VerificationRun> {
    lat.require_distributive()?;
    let mut run = VerificationRun::new(TheoremId::PropMedians, lat.name().to_string(), (1..=n_max).collect(), "all tuples");
    scan_lengths(&mut run, lat, 1..=n_max, |n| n as u64 * factorial(n), |x| {
        let n = x.len();
        let med = medians(lat, x)?;
        for perm in (0..n).permutations(n).skip(1) {
            let y: Vec<Element> = perm.iter().map(|&i| x[i]).collect();
            for k in 1..=n {
                let m = median_k_direct(lat, &y, k)?;
                if m != med[k - 1] {
                    return Ok(Some(witness(lat, Law::MedianSymmetry, vec![x.to_vec(), y], &[("k", k)], med[k - 1], m)));
                }
            }
        }
        for k in 1..n {
            if !lat.leq(med[k - 1], med[k]) {
                return Ok(Some(witness(lat, Law::MedianChain, vec![x.to_vec()], &[("k", k)], med[k - 1], med[k])));
            }
        }
        let sorted = x.windows(2).all(|w| lat.leq(w[0], w[1]));
        if sorted {
            for k in 1..=n {
                if med[k - 1] != x[k - 1] {
                    return Ok(Some(witness(lat, Law::MedianSorted, vec![x.to_vec()], &[("k", k)], med[k - 1], x[k - 1])));
                }
            }
        }
        // to(to(x)) = to(x)
        for k in 1..=n {
            let again = median_k_direct(lat, &med, k)?;
            if again != med[k - 1] {
                return Ok(Some(witness(lat, Law::MedianSorted, vec![med.clone()], &[("k", k)], again, med[k - 1])));
            }
        }
        Ok(None)
    })?;
    Ok(run)
}

/// `M_k(x) = M_k(x1∧x2, x1∨x2, x3, …)` for every `k <= n <= n_max`.
pub fn verify_lemma_swap(lat: &FiniteLattice, n_max: usize) -> Result<VerificationRun> {
    lat.require_distributive()?;
    let mut run = VerificationRun::new(TheoremId::LemmaSwap, lat.name().to_string(), (2..=n_max).collect(), "all tuples");
    scan_lengths(&mut run, lat, 2..=n_max, |n| n as u64, |x| {
        let mut y = x.to_vec();
        y[0] = lat.meet(x[0], x[1]);
        y[1] = lat.join(x[0], x[1]);
        for k in 1..=x.len() {
            let (lhs, rhs) = (median_k_direct(lat, x, k)?, median_k_direct(lat, &y, k)?);
            if lhs != rhs {
                return Ok(Some(witness(lat, Law::MedianSwap, vec![x.to_vec()], &[("k", k)], lhs, rhs)));
            }
        }
        Ok(None)
    })?;
    Ok(run)
}

/// `M_{k,m} ∧ (M_{k-1,m} ∨ x_{m+1}) = M_{k,m+1}` for `2 <= k <= m < n <= n_max`.
/// The `k = 1` instances would need an undefined `M_{0,m}` and are counted
/// as skipped.
pub fn verify_lemma_extend(lat: &FiniteLattice, n_max: usize) -> Result<VerificationRun> {
    lat.require_distributive()?;
    let mut run = VerificationRun::new(TheoremId::LemmaExtend, lat.name().to_string(), (3..=n_max).collect(), "all tuples");
    // for each m in 2..n: m-1 checked values of k, one skipped
    let checked = |n: usize| (2..n).map(|m| m as u64 - 1).sum::<u64>();
    for n in 3..=n_max {
        let skipped = search::tuple_count(lat.size(), n)? * (n as u64 - 2);
        run.count("skipped_k1", skipped);
    }
    scan_lengths(&mut run, lat, 3..=n_max, checked, |x| {
        for m in 2..x.len() {
            for k in 2..=m {
                let (lhs, rhs) = extend_instance(lat, x, k, m)?;
                if lhs != rhs {
                    return Ok(Some(witness(lat, Law::MedianExtend, vec![x.to_vec()], &[("k", k), ("m", m)], lhs, rhs)));
                }
            }
        }
        Ok(None)
    })?;
    Ok(run)
}

fn extend_instance(lat: &FiniteLattice, x: &[Element], k: usize, m: usize) -> Result<(Element, Element)> {
    let prefix = &x[..m];
    let lhs = lat.meet(
        median_k_direct(lat, prefix, k)?,
        lat.join(median_k_direct(lat, prefix, k - 1)?, x[m]),
    );
    Ok((lhs, median_k_direct(lat, &x[..m + 1], k)?))
}

/// Direct and dual median formulas agree on every tuple with `n <= n_max`.
/// With [`Hypothesis::Unchecked`] this runs on non-distributive lattices,
/// where it is expected to fail.
pub fn verify_median_duality(lat: &FiniteLattice, n_max: usize, hypothesis: Hypothesis) -> Result<VerificationRun> {
    if hypothesis == Hypothesis::Checked {
        lat.require_distributive()?;
    }
    let source = match hypothesis {
        Hypothesis::Checked => "all tuples",
        Hypothesis::Unchecked => "all tuples, hypothesis unchecked",
    };
    let mut run = VerificationRun::new(TheoremId::MedianDuality, lat.name().to_string(), (1..=n_max).collect(), source);
    scan_lengths(&mut run, lat, 1..=n_max, |n| n as u64, |x| {
        for k in 1..=x.len() {
            let (lhs, rhs) = (median_k_direct(lat, x, k)?, median_k_dual(lat, x, k)?);
            if lhs != rhs {
                return Ok(Some(witness(lat, Law::MedianDuality, vec![x.to_vec()], &[("k", k)], lhs, rhs)));
            }
        }
        Ok(None)
    })?;
    Ok(run)
}

/// Sorts a tuple with meet/join compare-exchanges. On a distributive lattice
/// the result is the total orderization.
fn exchange_sort(lat: &FiniteLattice, x: &[Element]) -> Vec<Element> {
    let mut y = x.to_vec();
    for i in 0..y.len() {
        for j in i + 1..y.len() {
            let (a, b) = (y[i], y[j]);
            y[i] = lat.meet(a, b);
            y[j] = lat.join(a, b);
        }
    }
    y
}

/// Bit-counting medians agree with the subset formula on every tuple with
/// `n <= n_max`; on the optional random long tuples, where the subset
/// formula is refused, they agree with an exchange sort instead.
pub fn verify_fast_path(lat: &FiniteLattice, n_max: usize, sample: Option<FastPathSample>) -> Result<VerificationRun> {
    lat.require_distributive()?;
    if lat.birkhoff().is_none() {
        return Err(Error::precondition(format!("{} has no Birkhoff embedding attached", lat.name())));
    }
    let mut arity: Vec<usize> = (1..=n_max).collect();
    arity.extend(sample.map(|s| s.n));
    let source = match sample {
        None => "all tuples".to_string(),
        Some(s) => format!("all tuples; {} random {}-tuples, seed {}, exchange-sort oracle", s.count, s.n, s.seed),
    };
    let mut run = VerificationRun::new(TheoremId::FastPath, lat.name().to_string(), arity, source);
    scan_lengths(&mut run, lat, 1..=n_max, |n| n as u64, |x| {
        for k in 1..=x.len() {
            let (lhs, rhs) = (median_k_fast(lat, x, k)?, median_k_direct(lat, x, k)?);
            if lhs != rhs {
                return Ok(Some(witness(lat, Law::MedianFastPath, vec![x.to_vec()], &[("k", k)], lhs, rhs)));
            }
        }
        Ok(None)
    })?;
    if let Some(s) = sample {
        if s.n == 0 {
            return Err(Error::Arity("sampled tuples need n >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let size = lat.size() as u32;
        let tuples: Vec<Vec<Element>> = (0..s.count)
            .map(|_| (0..s.n).map(|_| Element(rng.gen_range(0..size))).collect())
            .collect();
        let (examined, w) = search::first_failure(tuples.len() as u64, |i| {
            let x = &tuples[i as usize];
            let sorted = exchange_sort(lat, x);
            for k in 1..=x.len() {
                let fast = median_k_fast(lat, x, k)?;
                if fast != sorted[k - 1] {
                    return Ok(Some(witness(lat, Law::MedianFastPath, vec![x.clone()], &[("k", k)], fast, sorted[k - 1])));
                }
            }
            Ok(None)
        })?;
        run.count("sampled_tuples", examined);
        run.instances += examined * s.n as u64;
        run.absorb(if w.is_some() { Verdict::Fail } else { Verdict::SampledPass }, w);
    }
    Ok(run)
}

fn k_param(w: &Witness, n: usize) -> Result<usize> {
    w.param("k")
        .filter(|&k| (1..=n).contains(&k))
        .ok_or_else(|| Error::Index("witness k out of range".into()))
}

/// Re-evaluates a median-identity witness and returns its two sides.
pub fn replay_median(lat: &FiniteLattice, w: &Witness) -> Result<(Element, Element)> {
    let tuples: Vec<Vec<Element>> = w
        .inputs
        .iter()
        .map(|t| t.iter().map(|&v| lat.from_value(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let x = tuples.first().ok_or_else(|| Error::format("witness has no inputs"))?;
    let n = x.len();
    match w.law {
        Law::MedianDuality => {
            let k = k_param(w, n)?;
            Ok((median_k_direct(lat, x, k)?, median_k_dual(lat, x, k)?))
        }
        Law::MedianFastPath => {
            let k = k_param(w, n)?;
            let oracle = if n <= MAX_DIRECT_ARITY.min(12) {
                median_k_direct(lat, x, k)?
            } else {
                exchange_sort(lat, x)[k - 1]
            };
            Ok((median_k_fast(lat, x, k)?, oracle))
        }
        Law::MedianSymmetry => {
            let k = k_param(w, n)?;
            let y = tuples.get(1).ok_or_else(|| Error::format("symmetry witness needs the permuted tuple"))?;
            Ok((median_k_direct(lat, x, k)?, median_k_direct(lat, y, k)?))
        }
        Law::MedianSorted => {
            let k = k_param(w, n)?;
            Ok((median_k_direct(lat, x, k)?, x[k - 1]))
        }
        Law::MedianChain => {
            let k = w
                .param("k")
                .filter(|&k| k >= 1 && k < n)
                .ok_or_else(|| Error::Index("witness k out of range".into()))?;
            Ok((median_k_direct(lat, x, k)?, median_k_direct(lat, x, k + 1)?))
        }
        Law::MedianSwap => {
            let k = k_param(w, n)?;
            if n < 2 {
                return Err(Error::Arity("swap needs two entries".into()));
            }
            let mut y = x.clone();
            y[0] = lat.meet(x[0], x[1]);
            y[1] = lat.join(x[0], x[1]);
            Ok((median_k_direct(lat, x, k)?, median_k_direct(lat, &y, k)?))
        }
        Law::MedianExtend => {
            let (k, m) = (w.param("k").unwrap_or(0), w.param("m").unwrap_or(0));
            if !(2 <= k && k <= m && m < n) {
                return Err(Error::Index("witness needs 2 <= k <= m < n".into()));
            }
            extend_instance(lat, x, k, m)
        }
        other => Err(Error::format(format!("{other} is not a median identity"))),
    }
}
