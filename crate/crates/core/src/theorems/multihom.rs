use super::{MapSource, Target, TheoremId, VerificationRun};
use crate::error::{Error, Result};
use crate::lattice::SamplePlan;
use crate::maps::{check_diagonal_identities, is_n_homomorphism, is_symmetric, power_tuple, MultiMap};
use crate::report::{CheckReport, Law, Value, Verdict, Witness};
use crate::toi;

fn require_binary(target: &Target) -> Result<()> {
    if target.arity < 2 {
        return Err(Error::precondition("the multi-homomorphism results need arity >= 2"));
    }
    Ok(())
}

fn start(id: TheoremId, target: &Target, source: &MapSource) -> Result<(VerificationRun, Vec<MultiMap>)> {
    let (maps, counts) = target.maps(source)?;
    let mut run = VerificationRun::new(id, target.describe(), vec![target.arity], source.to_string());
    run.counts.extend(counts);
    run.count("maps", maps.len() as u64);
    Ok((run, maps))
}

fn record(run: &mut VerificationRun, report: &CheckReport) {
    run.instances += report.examined;
    run.absorb(report.verdict, report.witness.clone());
}

/// The lattice n-homomorphisms in the source, each with whether it is
/// symmetric. Enumerated sources are homomorphisms already.
fn homs(run: &mut VerificationRun, maps: Vec<MultiMap>, source: &MapSource, plan: &SamplePlan) -> Result<Vec<(MultiMap, bool)>> {
    let enumerated = matches!(source, MapSource::Enumerated(_));
    let mut out = Vec::new();
    for map in maps {
        if !enumerated {
            let hom = is_n_homomorphism(&map, plan)?;
            run.instances += hom.examined;
            if !hom.passed() {
                run.count("non_homs", 1);
                continue;
            }
            run.absorb(hom.verdict, None);
            run.count("homs", 1);
        }
        let sym = is_symmetric(&map, plan)?;
        run.instances += sym.examined;
        if sym.passed() {
            run.count("symmetric", 1);
        }
        out.push((map, sym.passed()));
    }
    Ok(out)
}

fn symmetric_homs(run: &mut VerificationRun, maps: Vec<MultiMap>, source: &MapSource, plan: &SamplePlan) -> Result<Vec<MultiMap>> {
    Ok(homs(run, maps, source, plan)?
        .into_iter()
        .filter_map(|(m, sym)| sym.then_some(m))
        .collect())
}

/// For each map, the four characterisations of total orderization
/// invariance return the same verdict.
pub fn verify_charsoftoi(target: &Target, source: &MapSource, plan: &SamplePlan) -> Result<VerificationRun> {
    require_binary(target)?;
    target.domain.require_distributive()?;
    let (mut run, maps) = start(TheoremId::Charsoftoi, target, source)?;
    for map in &maps {
        let cc = toi::cross_check(map, plan)?;
        run.count(if cc.is_toi() { "toi" } else { "not_toi" }, 1);
        if !cc.agree() {
            run.count("disagreements", 1);
        }
        record(&mut run, &cc.to_report());
    }
    Ok(run)
}

/// For each lattice n-homomorphism, TOI iff symmetric.
pub fn verify_multihom_toi(target: &Target, source: &MapSource, plan: &SamplePlan) -> Result<VerificationRun> {
    require_binary(target)?;
    target.require_distributive()?;
    let (mut run, maps) = start(TheoremId::MultihomToi, target, source)?;
    for (map, symmetric) in homs(&mut run, maps, source, plan)? {
        let def = toi::check_toi_def(&map, plan)?;
        run.instances += def.examined;
        if def.passed() {
            run.count("toi", 1);
        }
        if def.passed() == symmetric {
            run.absorb(def.verdict.min_pass(), None);
            continue;
        }
        run.count("mismatches", 1);
        let w = match def.witness {
            Some(w) => w,
            None => is_symmetric(&map, plan)?.witness.expect("symmetry failed"),
        };
        run.absorb(Verdict::Fail, Some(w));
    }
    Ok(run)
}

/// `(lower, T(x))` or `(T(x), upper)` where the bounds are
/// `T(x1,x1,x3,…) ∧/∨ T(x2,x2,x3,…)`.
pub fn sandwich_instance(map: &MultiMap, x: &[Value], upper: bool) -> Result<(Value, Value)> {
    let cod = map.codomain();
    let mut a = x.to_vec();
    a[1] = x[0];
    let mut b = x.to_vec();
    b[0] = x[1];
    let (ta, tb, t) = (map.eval_unchecked(&a)?, map.eval_unchecked(&b)?, map.eval_unchecked(x)?);
    Ok(if upper { (t, cod.join(ta, tb)?) } else { (cod.meet(ta, tb)?, t) })
}

fn diag(map: &MultiMap, x: Value) -> Result<Value> {
    map.eval_unchecked(&vec![x; map.arity()])
}

/// `(⋀ P_T(x_i), T(x))` or `(T(x), ⋁ P_T(x_i))`.
pub fn kusraev_bound_instance(map: &MultiMap, x: &[Value], upper: bool) -> Result<(Value, Value)> {
    let cod = map.codomain();
    let t = map.eval_unchecked(x)?;
    let mut acc = diag(map, x[0])?;
    for &xi in &x[1..] {
        let p = diag(map, xi)?;
        acc = if upper { cod.join(acc, p)? } else { cod.meet(acc, p)? };
    }
    Ok(if upper { (t, acc) } else { (acc, t) })
}

/// `(P_T(x) ∧ P_T(y), T(x^k, y^(n-k)))` or `(T(x^k, y^(n-k)), P_T(x) ∨ P_T(y))`.
pub fn kusraev_two_variable_instance(map: &MultiMap, x: Value, y: Value, k: usize, upper: bool) -> Result<(Value, Value)> {
    let n = map.arity();
    let cod = map.codomain();
    let t = map.eval_unchecked(&power_tuple(&[(x, k), (y, n - k)], n)?)?;
    let (px, py) = (diag(map, x)?, diag(map, y)?);
    Ok(if upper { (t, cod.join(px, py)?) } else { (cod.meet(px, py)?, t) })
}

/// Both sides of
/// `⋁_{i=m..p} T(x^i, y^(n-i-j), (x∧y)^j) = ⋁_{i=m-1..p} T(x^i, y^(n-i-j-1), (x∧y)^(j+1))`.
pub fn alg_instance(map: &MultiMap, x: Value, y: Value, j: usize, m: usize, p: usize) -> Result<(Value, Value)> {
    let n = map.arity();
    if !(1 <= m && m <= p && p + j < n) {
        return Err(Error::Index(format!("need 1 <= m <= p <= p + j <= n - 1, got j={j} m={m} p={p}")));
    }
    let cod = map.codomain();
    let xy = map.domain().meet(x, y);
    let side = |lo: usize, extra: usize| -> Result<Value> {
        let mut acc: Option<Value> = None;
        for i in lo..=p {
            let t = map.eval_unchecked(&power_tuple(&[(x, i), (y, n - i - j - extra), (xy, j + extra)], n)?)?;
            acc = Some(match acc {
                None => t,
                Some(a) => cod.join(a, t)?,
            });
        }
        Ok(acc.expect("nonempty range"))
    };
    Ok((side(m, 0)?, side(m - 1, 1)?))
}

fn leq_witness(map: &MultiMap, law: Law, inputs: Vec<Vec<Value>>, params: &[(&str, usize)], lhs: Value, rhs: Value) -> Result<Option<Witness>> {
    Ok((!map.codomain().leq(lhs, rhs)?).then(|| map.witness(law, inputs, params, lhs, rhs)))
}

pub(super) fn check_sandwich(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    map.scan(Law::Sandwich, map.arity(), plan, |x| {
        for upper in [false, true] {
            let (lhs, rhs) = sandwich_instance(map, x, upper)?;
            if let Some(w) = leq_witness(map, Law::Sandwich, vec![x.to_vec()], &[("upper", upper as usize)], lhs, rhs)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    })
}

/// For each symmetric n-homomorphism,
/// `T(x1,x1,x3,…) ∧ T(x2,x2,x3,…) <= T(x) <= T(x1,x1,x3,…) ∨ T(x2,x2,x3,…)`.
pub fn verify_sandwich(target: &Target, source: &MapSource, plan: &SamplePlan) -> Result<VerificationRun> {
    require_binary(target)?;
    target.require_distributive()?;
    let (mut run, maps) = start(TheoremId::Sandwich, target, source)?;
    for map in symmetric_homs(&mut run, maps, source, plan)? {
        record(&mut run, &check_sandwich(&map, plan)?);
    }
    Ok(run)
}

pub(super) fn check_kusraev_bound(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    map.scan(Law::KusraevBound, map.arity(), plan, |x| {
        for upper in [false, true] {
            let (lhs, rhs) = kusraev_bound_instance(map, x, upper)?;
            if let Some(w) = leq_witness(map, Law::KusraevBound, vec![x.to_vec()], &[("upper", upper as usize)], lhs, rhs)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    })
}

pub(super) fn check_kusraev_two_variable(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    map.scan(Law::KusraevTwoVariable, 2, plan, |xy| {
        for k in 1..map.arity() {
            for upper in [false, true] {
                let (lhs, rhs) = kusraev_two_variable_instance(map, xy[0], xy[1], k, upper)?;
                let params = [("k", k), ("upper", upper as usize)];
                if let Some(w) = leq_witness(map, Law::KusraevTwoVariable, vec![xy.to_vec()], &params, lhs, rhs)? {
                    return Ok(Some(w));
                }
            }
        }
        Ok(None)
    })
}

/// For each symmetric n-homomorphism: the diagonal is a lattice
/// homomorphism, iff the n-fold diagonal bound holds, iff the two-variable
/// power bound holds.
pub fn verify_kusraev(target: &Target, source: &MapSource, plan: &SamplePlan) -> Result<VerificationRun> {
    require_binary(target)?;
    target.require_distributive()?;
    let (mut run, maps) = start(TheoremId::Kusraev, target, source)?;
    for map in symmetric_homs(&mut run, maps, source, plan)? {
        let reports = [
            check_diagonal_identities(&map, plan)?,
            check_kusraev_bound(&map, plan)?,
            check_kusraev_two_variable(&map, plan)?,
        ];
        for (key, r) in ["diagonal_hom", "bound", "two_variable"].iter().zip(&reports) {
            run.instances += r.examined;
            if r.passed() {
                run.count(key, 1);
            }
        }
        if reports.iter().all(|r| r.passed() == reports[0].passed()) {
            run.absorb(reports.iter().map(|r| r.verdict).fold(Verdict::Pass, |a, v| a.combine(v)).min_pass(), None);
        } else {
            run.count("disagreements", 1);
            let w = reports.iter().find_map(|r| r.witness.clone());
            run.absorb(Verdict::Fail, w);
        }
    }
    Ok(run)
}

pub(super) fn check_alg(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    let n = map.arity();
    let cod = map.codomain();
    map.scan(Law::AlgLemma, 2, plan, |xy| {
        for m in 1..n {
            for p in m..n {
                for j in 0..n - p {
                    let (lhs, rhs) = alg_instance(map, xy[0], xy[1], j, m, p)?;
                    if !cod.eq(lhs, rhs) {
                        let params = [("j", j), ("m", m), ("p", p)];
                        return Ok(Some(map.witness(Law::AlgLemma, vec![xy.to_vec()], &params, lhs, rhs)));
                    }
                }
            }
        }
        Ok(None)
    })
}

/// For each symmetric n-homomorphism and every admissible `(j, m, p)`, the
/// two suprema agree.
pub fn verify_alg(target: &Target, source: &MapSource, plan: &SamplePlan) -> Result<VerificationRun> {
    require_binary(target)?;
    target.require_distributive()?;
    let (mut run, maps) = start(TheoremId::Alg, target, source)?;
    for map in symmetric_homs(&mut run, maps, source, plan)? {
        record(&mut run, &check_alg(&map, plan)?);
    }
    Ok(run)
}

/// For each symmetric n-homomorphism, the diagonal is a lattice
/// homomorphism. Non-symmetric homomorphisms are checked too and counted,
/// but only the symmetric ones decide the verdict.
pub fn verify_diags(target: &Target, source: &MapSource, plan: &SamplePlan) -> Result<VerificationRun> {
    require_binary(target)?;
    target.require_distributive()?;
    let (mut run, maps) = start(TheoremId::Diags, target, source)?;
    for (map, symmetric) in homs(&mut run, maps, source, plan)? {
        let d = check_diagonal_identities(&map, plan)?;
        if symmetric {
            record(&mut run, &d);
        } else {
            run.instances += d.examined;
            if d.passed() {
                run.count("nonsymmetric_with_hom_diagonal", 1);
            }
        }
    }
    Ok(run)
}

/// Re-evaluates any map witness, including the theorem-specific laws, and
/// returns its two sides.
pub fn replay_map(map: &MultiMap, w: &Witness) -> Result<(Value, Value)> {
    let x = w.inputs.first().ok_or_else(|| Error::format("witness has no inputs"))?;
    for &v in x {
        map.domain().contains(v)?;
    }
    let upper = || match w.param("upper") {
        Some(0) => Ok(false),
        Some(1) => Ok(true),
        _ => Err(Error::format("witness is missing the upper flag")),
    };
    let pair = || {
        if x.len() == 2 {
            Ok((x[0], x[1]))
        } else {
            Err(Error::format("witness needs a pair (x, y)"))
        }
    };
    let full = || {
        if x.len() == map.arity() && map.arity() >= 2 {
            Ok(())
        } else {
            Err(Error::Arity("witness tuple does not match the map arity".into()))
        }
    };
    match w.law {
        Law::Sandwich => {
            full()?;
            sandwich_instance(map, x, upper()?)
        }
        Law::KusraevBound => {
            full()?;
            kusraev_bound_instance(map, x, upper()?)
        }
        Law::KusraevTwoVariable => {
            let (a, b) = pair()?;
            let k = w
                .param("k")
                .filter(|&k| k >= 1 && k < map.arity())
                .ok_or_else(|| Error::Index("k outside 1..n-1".into()))?;
            kusraev_two_variable_instance(map, a, b, k, upper()?)
        }
        Law::AlgLemma => {
            let (a, b) = pair()?;
            let get = |key| w.param(key).ok_or_else(|| Error::format(format!("missing {key}")));
            alg_instance(map, a, b, get("j")?, get("m")?, get("p")?)
        }
        _ => toi::replay(map, w),
    }
}
