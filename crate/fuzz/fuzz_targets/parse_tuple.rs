#![no_main]

use latmed::io::{parse_lattice, parse_tuple};
use libfuzzer_sys::fuzz_target;

/// The first byte picks the domain, the rest is the tuple text.
const DOMAINS: [&str; 4] = [
    r#"{"kind":"divisor","n":36}"#,
    r#"{"kind":"powerset","ground":["a","b","c"]}"#,
    r#"{"kind":"product","factors":[{"kind":"chain","size":3},{"kind":"chain","size":2}]}"#,
    r#"{"kind":"implicit-chain"}"#,
];

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let domain = parse_lattice(DOMAINS[pick as usize % DOMAINS.len()]).unwrap();
    if let Ok(xs) = parse_tuple(&domain, text) {
        assert!(!xs.is_empty());
        for x in &xs {
            assert!(domain.contains(*x).is_ok());
        }
        if domain.require_distributive().is_ok() {
            let to = domain.total_orderization(&xs).unwrap();
            assert_eq!(to.len(), xs.len());
        }
    }
});
