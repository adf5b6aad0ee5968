#![no_main]

use latmed::io::parse_map;
use latmed::lattice::make_chain;
use latmed::{Domain, Value};
use libfuzzer_sys::fuzz_target;
use std::sync::Arc;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let fallback = Domain::Finite(Arc::new(make_chain(3).unwrap()));
    let Ok(map) = parse_map(text, Some(&fallback)) else { return };
    if map.arity() > 8 {
        return;
    }
    let x = match map.domain() {
        Domain::Finite(l) => vec![Value::from(l.top()); map.arity()],
        Domain::Chain(_) => vec![Value::Real(1.0); map.arity()],
    };
    let _ = map.eval(&x);
});
