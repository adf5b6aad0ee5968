use proptest::prelude::*;

use super::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn el(l: &FiniteLattice, label: &str) -> Element {
    l.parse_element(label).unwrap()
}

fn value(l: &FiniteLattice, e: Element) -> u64 {
    l.label(e).parse().unwrap()
}

#[test]
fn chain_examples() {
    let c4 = make_chain(4).unwrap();
    assert_eq!(c4.meet(el(&c4, "2"), el(&c4, "3")), el(&c4, "2"));
    assert_eq!(c4.join(el(&c4, "2"), el(&c4, "3")), el(&c4, "3"));
    assert!(c4.leq(el(&c4, "1"), el(&c4, "3")));
    assert_eq!(make_chain(3).unwrap().size(), 3);
}

#[test]
fn powerset_examples() {
    let p = make_powerset(&["a", "b", "c"]).unwrap();
    assert_eq!(p.meet(el(&p, "{a,b}"), el(&p, "{b,c}")), el(&p, "{b}"));
    assert_eq!(p.join(el(&p, "{a}"), el(&p, "{b}")), el(&p, "{a,b}"));
    assert_eq!(el(&p, "∅"), p.bottom());
    assert_eq!(el(&p, "{ a , b }"), el(&p, "{a,b}"));

    let p2 = make_powerset(&["a", "b"]).unwrap();
    assert_eq!(p2.size(), 4);
    assert!(!p2.leq(el(&p2, "{a}"), el(&p2, "{b}")));
}

#[test]
fn divisor_matches_arithmetic() {
    for n in [1u64, 12, 36, 60, 97, 210] {
        let l = make_divisor(n).unwrap();
        let mut got: Vec<u64> = l.elements().map(|e| value(&l, e)).collect();
        got.sort();
        assert_eq!(got, divisors(n));
        for a in l.elements() {
            for b in l.elements() {
                let (x, y) = (value(&l, a), value(&l, b));
                assert_eq!(value(&l, l.meet(a, b)), gcd(x, y));
                assert_eq!(value(&l, l.join(a, b)), lcm(x, y));
                assert_eq!(l.leq(a, b), y % x == 0);
            }
        }
    }
    let d = make_divisor(36).unwrap();
    assert_eq!(d.meet(el(&d, "4"), el(&d, "6")), el(&d, "2"));
    assert_eq!(d.join(el(&d, "4"), el(&d, "6")), el(&d, "12"));
    assert!(d.leq(el(&d, "4"), el(&d, "12")));
}

#[test]
fn builtins_are_distributive_lattices() {
    let lats = [
        make_chain(1).unwrap(),
        make_chain(5).unwrap(),
        make_powerset(&["a", "b", "c"]).unwrap(),
        make_divisor(36).unwrap(),
        make_product(&make_chain(3).unwrap(), &make_chain(2).unwrap()).unwrap(),
        make_downset(&["p", "q", "r"], &[("p", "q")]).unwrap(),
    ];
    for l in &lats {
        assert!(l.validate_lattice().unwrap().passed(), "{}", l.name());
        assert!(l.check_distributive().unwrap().passed(), "{}", l.name());
        assert!(l.birkhoff().is_some(), "{}", l.name());
    }
}

#[test]
fn corrupted_table_is_caught() {
    let labels = vec!["0".to_string(), "1".to_string()];
    let meet = vec![vec![0, 1], vec![0, 1]];
    let join = vec![vec![0, 1], vec![1, 1]];
    let l = FiniteLattice::from_tables(labels, meet, join).unwrap();
    let r = l.validate_lattice().unwrap();
    assert_eq!(r.law, Law::LatticeAxioms);
    let w = r.witness.unwrap();
    assert_eq!(w.law, Law::MeetCommutative);
    assert_eq!(w.inputs[0], vec![Value::Elem(0), Value::Elem(1)]);
    assert!(matches!(l.check_distributive(), Err(Error::Precondition(_))));
}

#[test]
fn malformed_tables_are_format_errors() {
    let labels = || vec!["0".to_string(), "1".to_string()];
    let ok = || vec![vec![0, 0], vec![0, 1]];
    assert!(matches!(
        FiniteLattice::from_tables(labels(), vec![vec![0, 0]], ok()),
        Err(Error::Format(_))
    ));
    assert!(matches!(
        FiniteLattice::from_tables(labels(), vec![vec![0, 2], vec![0, 1]], ok()),
        Err(Error::Format(_))
    ));
    assert!(matches!(
        FiniteLattice::from_tables(vec!["x".into(), "x".into()], ok(), ok()),
        Err(Error::Format(_))
    ));
}

#[test]
fn m3_and_n5_are_not_distributive() {
    let m3 = make_m3();
    assert!(m3.validate_lattice().unwrap().passed());
    let r = m3.check_distributive().unwrap();
    let w = r.witness.unwrap();
    assert_eq!(w.rendered[0], vec!["a", "b", "c"]);
    assert_eq!((w.lhs_label.as_str(), w.rhs_label.as_str()), ("a", "0"));

    let n5 = make_n5();
    assert!(n5.validate_lattice().unwrap().passed());
    let w = n5.check_distributive().unwrap().witness.unwrap();
    let x: Vec<Element> = w.inputs[0].iter().map(|v| Element(v.as_elem().unwrap())).collect();
    assert_ne!(
        n5.meet(x[0], n5.join(x[1], x[2])),
        n5.join(n5.meet(x[0], x[1]), n5.meet(x[0], x[2]))
    );

    assert!(matches!(birkhoff_embed(&m3), Err(Error::Precondition(_))));
    assert!(matches!(birkhoff_embed(&n5), Err(Error::Precondition(_))));
    assert!(matches!(m3.require_distributive(), Err(Error::Precondition(_))));
}

#[test]
fn invalid_elements() {
    let c = make_chain(3).unwrap();
    assert!(matches!(c.checked_meet(Element(0), Element(3)), Err(Error::InvalidElement(_))));
    assert!(matches!(c.parse_element("7"), Err(Error::InvalidElement(_))));
    assert!(c.element(2).is_ok());
}

#[test]
fn size_caps() {
    assert!(matches!(make_chain(0), Err(Error::Format(_)) | Err(Error::Capacity(_))));
    assert!(matches!(make_chain(DEFAULT_MAX_ELEMENTS + 1), Err(Error::Capacity(_))));
    let ground: Vec<String> = (0..17).map(|i| format!("g{i}")).collect();
    assert!(matches!(make_powerset(&ground), Err(Error::Capacity(_))));
    assert!(make_powerset(&ground[..16]).is_ok());
}

#[test]
fn cyclic_covers_are_rejected() {
    let r = make_downset(&["a", "b"], &[("a", "b"), ("b", "a")]);
    assert!(matches!(r, Err(Error::Format(_))));
}

#[test]
fn chain_birkhoff_is_thermometer() {
    let c4 = make_chain(4).unwrap();
    let b = c4.birkhoff().unwrap();
    assert_eq!(b.irreducibles().len(), 3);
    for e in c4.elements() {
        assert_eq!(b.bits(e), (0..e.index()).collect::<Vec<_>>());
    }
}

#[test]
fn powerset_birkhoff_is_characteristic() {
    let p = make_powerset(&["a", "b", "c"]).unwrap();
    let b = p.birkhoff().unwrap();
    let irr: Vec<&str> = b.irreducibles().iter().map(|&e| p.label(e)).collect();
    assert_eq!(irr, vec!["{a}", "{b}", "{c}"]);
    assert_eq!(b.bits(el(&p, "{a,c}")), vec![0, 2]);
}

#[test]
fn divisor_birkhoff_uses_prime_powers() {
    let d = make_divisor(36).unwrap();
    let b = d.birkhoff().unwrap();
    let mut irr: Vec<u64> = b.irreducibles().iter().map(|&e| value(&d, e)).collect();
    irr.sort();
    assert_eq!(irr, vec![2, 3, 4, 9]);
    let mut six: Vec<u64> = b.bits(el(&d, "6")).into_iter().map(|j| value(&d, b.irreducibles()[j])).collect();
    six.sort();
    assert_eq!(six, vec![2, 3]);
}

#[test]
fn downset_recovers_its_poset() {
    // p < r, q < r, q < s
    let covers = [("p", "r"), ("q", "r"), ("q", "s")];
    let l = make_downset(&["p", "q", "r", "s"], &covers).unwrap();
    let b = l.birkhoff().unwrap();
    let irr = b.irreducibles();
    assert_eq!(irr.len(), 4);
    // irreducible downsets are principal: {p}, {q}, {p,q,r}, {q,s}
    let mut labels: Vec<&str> = irr.iter().map(|&e| l.label(e)).collect();
    labels.sort();
    assert_eq!(labels, vec!["{p,q,r}", "{p}", "{q,s}", "{q}"]);
    let below = |a: &str, c: &str| l.leq(el(&l, a), el(&l, c));
    assert!(below("{p}", "{p,q,r}"));
    assert!(below("{q}", "{p,q,r}"));
    assert!(below("{q}", "{q,s}"));
    assert!(!below("{p}", "{q,s}"));
    assert!(!below("{q,s}", "{p,q,r}"));
}

#[test]
fn product_labels_and_order() {
    let p = make_product(&make_chain(3).unwrap(), &make_chain(2).unwrap()).unwrap();
    assert_eq!(p.size(), 6);
    assert!(p.leq(el(&p, "(0,1)"), el(&p, "(2,1)")));
    assert!(!p.leq(el(&p, "(1,0)"), el(&p, "(0,1)")));
    assert_eq!(p.join(el(&p, "(1,0)"), el(&p, "(0,1)")), el(&p, "(1,1)"));
}

#[test]
fn implicit_chain_rejects_bad_reals() {
    let c = ImplicitChain::default();
    assert!(c.validate(0.0).is_ok());
    assert!(c.validate(-1.0).is_err());
    assert!(c.validate(f64::NAN).is_err());
    assert!(c.validate(f64::INFINITY).is_err());
}

#[test]
fn sampling_is_seeded_and_probes_come_first() {
    let c = ImplicitChain::default();
    let plan = SamplePlan::with_seed(3).samples(50).probe(vec![1.0, 8.0]).probe(vec![1.0]);
    let a = c.sample_tuples(2, &plan);
    assert_eq!(a.len(), 51);
    assert_eq!(a[0], vec![1.0, 8.0]);
    assert_eq!(a, c.sample_tuples(2, &plan));
    assert_ne!(a, c.sample_tuples(2, &SamplePlan::with_seed(4).samples(50).probe(vec![1.0, 8.0])));
    assert!(a.iter().flatten().all(|&x| (1e-3..=1e3).contains(&x) || ImplicitChain::grid().contains(&x)));
}

fn small_lattice() -> impl Strategy<Value = FiniteLattice> {
    prop_oneof![
        (1usize..7).prop_map(|n| make_chain(n).unwrap()),
        (1usize..4).prop_map(|g| {
            let ground: Vec<String> = (0..g).map(|i| format!("g{i}")).collect();
            make_powerset(&ground).unwrap()
        }),
        (1u64..200).prop_map(|n| make_divisor(n).unwrap()),
        ((1usize..4), (1usize..4)).prop_map(|(a, b)| {
            make_product(&make_chain(a).unwrap(), &make_chain(b).unwrap()).unwrap()
        }),
    ]
}

proptest! {
    #[test]
    fn order_from_meet_agrees_with_order_from_join(l in small_lattice()) {
        for a in l.elements() {
            for b in l.elements() {
                prop_assert_eq!(l.meet(a, b) == a, l.join(a, b) == b);
            }
        }
    }

    #[test]
    fn birkhoff_round_trips_and_preserves_ops(l in small_lattice()) {
        let b = l.birkhoff().unwrap();
        for x in l.elements() {
            prop_assert_eq!(b.decode(b.encode(x)), Some(x));
            for y in l.elements() {
                let and: Vec<u64> = b.encode(x).iter().zip(b.encode(y)).map(|(p, q)| p & q).collect();
                let or: Vec<u64> = b.encode(x).iter().zip(b.encode(y)).map(|(p, q)| p | q).collect();
                prop_assert_eq!(b.decode(&and), Some(l.meet(x, y)));
                prop_assert_eq!(b.decode(&or), Some(l.join(x, y)));
            }
        }
    }

    #[test]
    fn irreducibles_have_one_lower_cover(l in small_lattice()) {
        let b = l.birkhoff().unwrap();
        for x in l.elements() {
            let below: Vec<Element> = l.elements().filter(|&y| y != x && l.leq(y, x)).collect();
            let covers = below
                .iter()
                .filter(|&&y| !below.iter().any(|&z| z != y && l.leq(y, z)))
                .count();
            prop_assert_eq!(b.irreducibles().contains(&x), covers == 1);
        }
    }

    #[test]
    fn divisor_lattices_are_distributive(n in 1u64..400) {
        let l = make_divisor(n).unwrap();
        prop_assert!(l.check_distributive().unwrap().passed());
    }
}
