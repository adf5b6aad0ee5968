#![no_main]

use latmed::io::parse_lattice;
use latmed::Domain;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(Domain::Finite(l)) = parse_lattice(text) {
        assert!(l.size() >= 1);
        for e in l.elements() {
            assert_eq!(l.parse_element(l.label(e)).ok(), Some(e));
        }
    }
});
