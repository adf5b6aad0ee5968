//! Total orderization invariance: the definition and its three equivalent
//! reformulations, each as an exhaustive (or sampled) checker.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::SamplePlan;
use crate::maps::{self, MultiMap};
use crate::report::{CheckReport, Law, Value, Verdict, Witness};

/// Which characterisation to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `T(x) = T(to(x))`.
    Def,
    /// Symmetry plus `T(x1, x2, …) = T(x1∧x2, x1∨x2, …)`.
    C2,
    /// `T(…x_i…x_j…) = T(…x_i∧x_j…x_i∨x_j…)` for every pair of slots.
    C3,
    /// `T(x) = T(to(x_1..x_m), x_{m+1}, …)` for every prefix length `m ≥ 2`.
    C4,
    All,
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "def" => Condition::Def,
            "c2" => Condition::C2,
            "c3" => Condition::C3,
            "c4" => Condition::C4,
            "all" => Condition::All,
            _ => return Err(Error::format(format!("unknown condition {s:?}; expected def, c2, c3, c4 or all"))),
        })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Def => "def",
            Condition::C2 => "c2",
            Condition::C3 => "c3",
            Condition::C4 => "c4",
            Condition::All => "all",
        })
    }
}

/// `(T(x), T(to(x)))`.
pub fn def_instance(map: &MultiMap, x: &[Value]) -> Result<(Value, Value)> {
    let sorted = map.domain().total_orderization(x)?;
    Ok((map.eval_unchecked(x)?, map.eval_unchecked(&sorted)?))
}

/// `(T(x), T(x1∧x2, x1∨x2, x3, …))`.
pub fn swap_instance(map: &MultiMap, x: &[Value]) -> Result<(Value, Value)> {
    pairs_instance(map, x, 0, 1)
}

/// `(T(x), T(x with x_i ↦ x_i∧x_j, x_j ↦ x_i∨x_j))`, slots 0-based.
pub fn pairs_instance(map: &MultiMap, x: &[Value], i: usize, j: usize) -> Result<(Value, Value)> {
    let dom = map.domain();
    let mut y = x.to_vec();
    y[i] = dom.meet(x[i], x[j]);
    y[j] = dom.join(x[i], x[j]);
    Ok((map.eval_unchecked(x)?, map.eval_unchecked(&y)?))
}

/// `(T(x), T(to(x_1..x_m), x_{m+1}, …))`.
pub fn prefix_instance(map: &MultiMap, x: &[Value], m: usize) -> Result<(Value, Value)> {
    let mut y = map.domain().total_orderization(&x[..m])?;
    y.extend_from_slice(&x[m..]);
    Ok((map.eval_unchecked(x)?, map.eval_unchecked(&y)?))
}

fn require_binary(map: &MultiMap, what: &str) -> Result<()> {
    if map.arity() < 2 {
        Err(Error::precondition(format!("{what} is only defined for arity >= 2")))
    } else {
        Ok(())
    }
}

pub fn check_toi_def(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    let cod = map.codomain();
    map.scan(Law::ToiDefinition, map.arity(), plan, |x| {
        let (lhs, rhs) = def_instance(map, x)?;
        Ok((!cod.eq(lhs, rhs)).then(|| map.witness(Law::ToiDefinition, vec![x.to_vec()], &[], lhs, rhs)))
    })
}

pub fn check_toi_cond2(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    require_binary(map, "condition 2")?;
    let n = map.arity();
    let cod = map.codomain();
    map.scan(Law::ToiSwap, n, plan, |x| {
        for slot in 0..n - 1 {
            let (lhs, rhs) = maps::symmetry_instance(map, x, slot)?;
            if !cod.eq(lhs, rhs) {
                return Ok(Some(map.witness(Law::Symmetry, vec![x.to_vec()], &[("slot", slot + 1)], lhs, rhs)));
            }
        }
        let (lhs, rhs) = swap_instance(map, x)?;
        Ok((!cod.eq(lhs, rhs)).then(|| map.witness(Law::ToiSwap, vec![x.to_vec()], &[], lhs, rhs)))
    })
}

pub fn check_toi_cond3(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    require_binary(map, "condition 3")?;
    let n = map.arity();
    let cod = map.codomain();
    map.scan(Law::ToiPairs, n, plan, |x| {
        for i in 0..n {
            for j in i + 1..n {
                let (lhs, rhs) = pairs_instance(map, x, i, j)?;
                if !cod.eq(lhs, rhs) {
                    let params = [("i", i + 1), ("j", j + 1)];
                    return Ok(Some(map.witness(Law::ToiPairs, vec![x.to_vec()], &params, lhs, rhs)));
                }
            }
        }
        Ok(None)
    })
}

pub fn check_toi_cond4(map: &MultiMap, plan: &SamplePlan) -> Result<CheckReport> {
    require_binary(map, "condition 4")?;
    let n = map.arity();
    let cod = map.codomain();
    map.scan(Law::ToiPrefix, n, plan, |x| {
        for m in 2..=n {
            let (lhs, rhs) = prefix_instance(map, x, m)?;
            if !cod.eq(lhs, rhs) {
                return Ok(Some(map.witness(Law::ToiPrefix, vec![x.to_vec()], &[("m", m)], lhs, rhs)));
            }
        }
        Ok(None)
    })
}

pub fn check(map: &MultiMap, condition: Condition, plan: &SamplePlan) -> Result<Vec<CheckReport>> {
    Ok(match condition {
        Condition::Def => vec![check_toi_def(map, plan)?],
        Condition::C2 => vec![check_toi_cond2(map, plan)?],
        Condition::C3 => vec![check_toi_cond3(map, plan)?],
        Condition::C4 => vec![check_toi_cond4(map, plan)?],
        Condition::All => cross_check(map, plan)?.reports,
    })
}

/// The four verdicts for one map, in the order cond2, cond3, def, cond4.
#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub reports: Vec<CheckReport>,
}

impl CrossCheck {
    pub fn agree(&self) -> bool {
        self.reports.iter().all(|r| r.passed() == self.reports[0].passed())
    }

    /// Whether every condition passed.
    pub fn is_toi(&self) -> bool {
        self.reports.iter().all(CheckReport::passed)
    }

    pub fn examined(&self) -> u64 {
        self.reports.iter().map(|r| r.examined).sum()
    }

    /// Passes iff the four verdicts agree; a disagreement carries the first
    /// witness found.
    pub fn to_report(&self) -> CheckReport {
        if self.agree() {
            let exhaustive = self.reports.iter().all(|r| r.verdict != Verdict::SampledPass);
            return CheckReport::pass(Law::ToiEquivalence, self.examined(), exhaustive);
        }
        let w = self
            .reports
            .iter()
            .find_map(|r| r.witness.clone())
            .expect("a disagreement includes a failing condition");
        CheckReport::fail(Law::ToiEquivalence, self.examined(), w)
    }
}

/// Runs all four characterisations on a map over a distributive domain.
pub fn cross_check(map: &MultiMap, plan: &SamplePlan) -> Result<CrossCheck> {
    require_binary(map, "the cross-check")?;
    map.domain().require_distributive()?;
    Ok(CrossCheck {
        reports: vec![
            check_toi_cond2(map, plan)?,
            check_toi_cond3(map, plan)?,
            check_toi_def(map, plan)?,
            check_toi_cond4(map, plan)?,
        ],
    })
}

fn slot(w: &Witness, key: &str) -> Result<usize> {
    w.param(key)
        .and_then(|v| v.checked_sub(1))
        .ok_or_else(|| Error::format(format!("witness is missing the 1-based parameter {key:?}")))
}

fn first_input(w: &Witness) -> Result<&[Value]> {
    w.inputs
        .first()
        .map(Vec::as_slice)
        .ok_or_else(|| Error::format("witness has no inputs"))
}

/// Re-evaluates the law instance recorded in a map witness and returns its
/// two sides.
pub fn replay(map: &MultiMap, w: &Witness) -> Result<(Value, Value)> {
    let x = first_input(w)?;
    let expect = |len: usize| {
        if len == map.arity() {
            Ok(())
        } else {
            Err(Error::Arity(format!("witness tuple has {len} entries, map arity is {}", map.arity())))
        }
    };
    for t in &w.inputs {
        for &v in t {
            map.domain().contains(v)?;
        }
    }
    match w.law {
        Law::Symmetry if w.inputs.len() == 2 => {
            expect(x.len())?;
            expect(w.inputs[1].len())?;
            Ok((map.eval_unchecked(x)?, map.eval_unchecked(&w.inputs[1])?))
        }
        Law::Symmetry => {
            expect(x.len())?;
            let s = slot(w, "slot")?;
            if s + 1 >= x.len() {
                return Err(Error::Index("symmetry slot out of range".into()));
            }
            maps::symmetry_instance(map, x, s)
        }
        Law::JoinHomomorphism | Law::MeetHomomorphism => {
            expect(x.len())?;
            let y = w.inputs.get(1).and_then(|t| t.first()).ok_or_else(|| Error::format("missing y"))?;
            let s = slot(w, "slot")?;
            if s >= x.len() {
                return Err(Error::Index("slot out of range".into()));
            }
            maps::hom_instance(map, x, *y, s, w.law == Law::JoinHomomorphism)
        }
        Law::DiagonalMeet | Law::DiagonalJoin => {
            if x.len() != 2 {
                return Err(Error::format("diagonal witnesses carry a pair"));
            }
            maps::diagonal_instance(map, x[0], x[1], w.law == Law::DiagonalJoin)
        }
        Law::ToiDefinition => {
            expect(x.len())?;
            def_instance(map, x)
        }
        Law::ToiSwap => {
            expect(x.len())?;
            require_binary(map, "condition 2")?;
            swap_instance(map, x)
        }
        Law::ToiPairs => {
            expect(x.len())?;
            let (i, j) = (slot(w, "i")?, slot(w, "j")?);
            if i >= j || j >= x.len() {
                return Err(Error::Index("pair slots out of range".into()));
            }
            pairs_instance(map, x, i, j)
        }
        Law::ToiPrefix => {
            expect(x.len())?;
            let m = w.param("m").ok_or_else(|| Error::format("missing m"))?;
            if !(2..=x.len()).contains(&m) {
                return Err(Error::Index("prefix length out of range".into()));
            }
            prefix_instance(map, x, m)
        }
        other => Err(Error::format(format!("{other} is not a map law"))),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lattice::{make_chain, make_powerset, FiniteLattice};
    use crate::maps::{Codomain, Domain};

    fn c(n: usize) -> Arc<FiniteLattice> {
        Arc::new(make_chain(n).unwrap())
    }

    fn elems(xs: &[u32]) -> Vec<Value> {
        xs.iter().map(|&e| Value::Elem(e)).collect()
    }

    fn plan() -> SamplePlan {
        SamplePlan::default()
    }

    #[test]
    fn median_is_toi_by_every_condition() {
        let m = MultiMap::median(Domain::Finite(c(3)), 3, 2).unwrap();
        let cc = cross_check(&m, &plan()).unwrap();
        assert!(cc.is_toi() && cc.agree());
        assert_eq!(cc.reports[0].law, Law::ToiSwap);
        assert_eq!(cc.reports[2].examined, 27);
    }

    #[test]
    fn projection_fails_with_least_witness() {
        let p = MultiMap::projection(Domain::Finite(c(2)), 2, 1).unwrap();
        let def = check_toi_def(&p, &plan()).unwrap();
        let w = def.witness.as_ref().unwrap();
        assert_eq!(w.inputs[0], elems(&[1, 0]));
        assert_eq!((w.lhs, w.rhs), (Value::Elem(1), Value::Elem(0)));
        assert_eq!(def.examined, 3);

        let c2 = check_toi_cond2(&p, &plan()).unwrap();
        let w2 = c2.witness.unwrap();
        assert_eq!((w2.law, w2.inputs[0].clone()), (Law::Symmetry, elems(&[0, 1])));

        let c3 = check_toi_cond3(&p, &plan()).unwrap();
        let w3 = c3.witness.unwrap();
        assert_eq!(w3.inputs[0], elems(&[1, 0]));
        assert_eq!((w3.param("i"), w3.param("j")), (Some(1), Some(2)));

        let c4 = check_toi_cond4(&p, &plan()).unwrap();
        assert_eq!(c4.witness.unwrap().param("m"), Some(2));

        let cc = cross_check(&p, &plan()).unwrap();
        assert!(cc.agree() && !cc.is_toi());
        assert!(cc.to_report().passed());
    }

    #[test]
    fn meet_on_powerset_passes_cond2() {
        let l = Arc::new(make_powerset(&["a", "b"]).unwrap());
        let m = MultiMap::median(Domain::Finite(l), 2, 1).unwrap();
        assert!(check_toi_cond2(&m, &plan()).unwrap().passed());
    }

    #[test]
    fn constant_on_bare_set_is_toi() {
        let set = Codomain::Set(Arc::new(vec!["red".into(), "blue".into()]));
        let k = MultiMap::constant(Domain::Finite(c(3)), set, 2, Value::Elem(1)).unwrap();
        assert!(check_toi_def(&k, &plan()).unwrap().passed());
        assert!(cross_check(&k, &plan()).unwrap().is_toi());
    }

    #[test]
    fn arity_one_policy() {
        let id = MultiMap::projection(Domain::Finite(c(3)), 1, 1).unwrap();
        assert!(check_toi_def(&id, &plan()).unwrap().passed());
        for r in [check_toi_cond2(&id, &plan()), check_toi_cond3(&id, &plan()), check_toi_cond4(&id, &plan())] {
            assert!(matches!(r, Err(Error::Precondition(_))));
        }
    }

    #[test]
    fn non_distributive_domain_is_refused() {
        let m3 = Arc::new(crate::lattice::make_m3());
        let k = MultiMap::constant(Domain::Finite(m3.clone()), Codomain::Lattice(m3), 2, Value::Elem(0)).unwrap();
        assert!(matches!(cross_check(&k, &plan()), Err(Error::Precondition(_))));
    }

    #[test]
    fn prefix_m_equals_n_matches_definition() {
        let l = c(3);
        let t = MultiMap::table(l.clone(), Codomain::Lattice(l), 2, vec![0, 1, 2, 2, 0, 1, 1, 2, 0]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let x = elems(&[a, b]);
                assert_eq!(prefix_instance(&t, &x, 2).unwrap(), def_instance(&t, &x).unwrap());
            }
        }
    }

    #[test]
    fn witnesses_replay() {
        let p = MultiMap::projection(Domain::Finite(c(3)), 3, 2).unwrap();
        for r in cross_check(&p, &plan()).unwrap().reports {
            let w = r.witness.unwrap();
            assert_eq!(replay(&p, &w).unwrap(), (w.lhs, w.rhs));
        }
    }

    #[test]
    fn condition_parsing() {
        assert_eq!("c3".parse::<Condition>().unwrap(), Condition::C3);
        assert!("c5".parse::<Condition>().is_err());
        assert_eq!(Condition::All.to_string(), "all");
    }
}
