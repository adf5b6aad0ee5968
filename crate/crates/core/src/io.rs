//! JSON file formats for lattices and maps, and tuple parsing.
//!
//! A lattice file is a tagged object:
//!
//! ```json
//! {"kind": "chain", "size": 4}
//! {"kind": "powerset", "ground": ["a", "b", "c"]}
//! {"kind": "divisor", "n": 36}
//! {"kind": "product", "factors": [{"kind": "chain", "size": 3}, {"kind": "chain", "size": 2}]}
//! {"kind": "downset", "elements": ["p", "q"], "covers": [["p", "q"]]}
//! {"kind": "explicit", "labels": ["0", "1"], "meet": [[0, 0], [0, 1]], "join": [[0, 1], [1, 1]]}
//! {"kind": "implicit-chain", "domain": "nonneg-floats"}
//! ```
//!
//! A map file names its arity, domain, codomain and body:
//!
//! ```json
//! {"arity": 2, "domain": {"kind": "chain", "size": 2}, "body": {"table": [0, 0, 0, 1]}}
//! {"arity": 3, "body": {"builtin": "median", "k": 2}}
//! {"body": {"builtin": "weighted-geomean", "w": [0.25, 0.75]}}
//! ```
//!
//! The domain may be omitted when the caller supplies one. The codomain
//! defaults to the domain and may also be `{"kind": "set", "labels": [...]}`.
//! Table entries are codomain indices or labels.

use std::sync::Arc;

use serde::Deserialize;
use serde_json::Value as Json;

use crate::error::{Error, Result};
use crate::lattice::{
    make_chain, make_divisor, make_downset, make_m3, make_n5, make_powerset, make_product, ChainDomain,
    FiniteLattice, ImplicitChain,
};
use crate::maps::{Body, Codomain, Domain, MultiMap};
use crate::report::Value;

/// Nesting cap for products and compositions.
pub const MAX_DEPTH: usize = 8;
/// Largest arity a map file may declare.
pub const MAX_ARITY: usize = 4096;
/// Longest tuple `parse_tuple` accepts.
pub const MAX_TUPLE_LEN: usize = 4096;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum LatticeFile {
    Chain {
        size: usize,
    },
    Powerset {
        ground: Vec<String>,
    },
    Divisor {
        n: u64,
    },
    Product {
        factors: Vec<Json>,
    },
    Downset {
        elements: Vec<String>,
        #[serde(default)]
        covers: Vec<(String, String)>,
    },
    Explicit {
        labels: Vec<String>,
        meet: Vec<Vec<u32>>,
        join: Vec<Vec<u32>>,
    },
    ImplicitChain {
        #[serde(default)]
        domain: Option<String>,
    },
    M3,
    N5,
}

/// Parses a lattice file.
pub fn parse_lattice(text: &str) -> Result<Domain> {
    let json: Json = serde_json::from_str(text)?;
    lattice_from_json(json, 0)
}

/// Parses a lattice file that must describe a finite lattice.
pub fn parse_finite_lattice(text: &str) -> Result<Arc<FiniteLattice>> {
    match parse_lattice(text)? {
        Domain::Finite(l) => Ok(l),
        Domain::Chain(_) => Err(Error::format("expected a finite lattice, found the implicit chain")),
    }
}

fn lattice_from_json(json: Json, depth: usize) -> Result<Domain> {
    if depth > MAX_DEPTH {
        return Err(Error::capacity(format!("lattice nesting deeper than {MAX_DEPTH}")));
    }
    let file: LatticeFile = serde_json::from_value(json)?;
    let lattice = match file {
        LatticeFile::Chain { size } => make_chain(size)?,
        LatticeFile::Powerset { ground } => make_powerset(&ground)?,
        LatticeFile::Divisor { n } => make_divisor(n)?,
        LatticeFile::Product { factors } => {
            let mut factors = factors.into_iter();
            let first = factors
                .next()
                .ok_or_else(|| Error::format("a product needs at least one factor"))?;
            let mut acc = finite_factor(first, depth)?;
            for f in factors {
                acc = make_product(&acc, &finite_factor(f, depth)?)?;
            }
            acc
        }
        LatticeFile::Downset { elements, covers } => make_downset(&elements, &covers)?,
        LatticeFile::Explicit { labels, meet, join } => {
            let lat = FiniteLattice::from_tables(labels, meet, join)?;
            // keep malformed or non-distributive tables so they can be diagnosed
            if lat.validate_lattice()?.passed() {
                match lat.clone().with_birkhoff() {
                    Ok(l) => l,
                    Err(Error::Precondition(_)) => lat,
                    Err(e) => return Err(e),
                }
            } else {
                lat
            }
        }
        LatticeFile::ImplicitChain { domain } => {
            let domain = match domain.as_deref() {
                None | Some("nonneg-floats") => ChainDomain::NonnegFloats,
                Some("nonneg-rationals") => ChainDomain::NonnegRationals,
                Some(other) => return Err(Error::format(format!("unknown chain domain {other:?}"))),
            };
            return Ok(Domain::Chain(ImplicitChain { domain }));
        }
        LatticeFile::M3 => make_m3(),
        LatticeFile::N5 => make_n5(),
    };
    Ok(Domain::Finite(Arc::new(lattice)))
}

fn finite_factor(json: Json, depth: usize) -> Result<FiniteLattice> {
    match lattice_from_json(json, depth + 1)? {
        Domain::Finite(l) => Ok(Arc::unwrap_or_clone(l)),
        Domain::Chain(_) => Err(Error::format("product factors must be finite")),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    #[serde(default)]
    arity: Option<usize>,
    #[serde(default)]
    domain: Option<Json>,
    #[serde(default)]
    codomain: Option<Json>,
    body: Json,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Index(u32),
    Label(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableBody {
    table: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "builtin", rename_all = "kebab-case", deny_unknown_fields)]
enum Builtin {
    Median { k: usize },
    Projection { i: usize },
    Constant { value: Entry },
    WeightedGeomean { w: Vec<f64> },
    Compose { via: Json, outer: Vec<Entry>, inner: Json },
}

/// Parses a map file. `default_domain` is used when the file has no domain.
pub fn parse_map(text: &str, default_domain: Option<&Domain>) -> Result<MultiMap> {
    let file: MapFile = serde_json::from_str(text)?;
    // the weighted geometric mean always lives on the real chain
    let real_only = file.body.get("builtin").and_then(Json::as_str) == Some("weighted-geomean");
    let domain = match file.domain {
        Some(d) => Some(lattice_from_json(d, 0)?),
        None if real_only => None,
        None => default_domain.cloned(),
    };
    let codomain = file.codomain.map(|c| codomain_from_json(c, 0)).transpose()?;
    map_from_parts(file.arity, domain, codomain, file.body, 0)
}

fn codomain_from_json(json: Json, depth: usize) -> Result<Codomain> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct SetFile {
        kind: String,
        labels: Vec<String>,
    }
    if json.get("kind").and_then(Json::as_str) == Some("set") {
        let set: SetFile = serde_json::from_value(json)?;
        debug_assert_eq!(set.kind, "set");
        if set.labels.is_empty() {
            return Err(Error::format("a codomain set needs at least one label"));
        }
        if set.labels.len() > crate::lattice::max_elements() {
            return Err(Error::capacity("codomain set is too large"));
        }
        for (i, l) in set.labels.iter().enumerate() {
            if set.labels[..i].contains(l) {
                return Err(Error::format(format!("duplicate codomain label {l:?}")));
            }
        }
        return Ok(Codomain::Set(Arc::new(set.labels)));
    }
    Ok(lattice_from_json(json, depth)?.as_codomain())
}

fn map_from_parts(
    arity: Option<usize>,
    domain: Option<Domain>,
    codomain: Option<Codomain>,
    body: Json,
    depth: usize,
) -> Result<MultiMap> {
    if depth > MAX_DEPTH {
        return Err(Error::capacity(format!("composition deeper than {MAX_DEPTH}")));
    }
    if let Some(a) = arity {
        if a > MAX_ARITY {
            return Err(Error::capacity(format!("arity {a} exceeds the cap of {MAX_ARITY}")));
        }
    }
    if body.get("table").is_some() {
        let TableBody { table } = serde_json::from_value(body)?;
        let domain = domain.ok_or_else(|| Error::format("a table map needs a domain"))?;
        let lattice = domain
            .finite()
            .cloned()
            .ok_or_else(|| Error::format("table maps need a finite domain"))?;
        let codomain = codomain.unwrap_or_else(|| domain.as_codomain());
        let arity = match arity {
            Some(a) => a,
            None => infer_arity(lattice.size(), table.len())?,
        };
        let values = table
            .iter()
            .map(|e| entry_index(&codomain, e))
            .collect::<Result<Vec<_>>>()?;
        return MultiMap::table(lattice, codomain, arity, values);
    }

    let builtin: Builtin = serde_json::from_value(body)?;
    if let Builtin::WeightedGeomean { w } = builtin {
        let chain = match domain {
            None => ImplicitChain::default(),
            Some(Domain::Chain(c)) => c,
            Some(Domain::Finite(_)) => {
                return Err(Error::format("weighted-geomean is only defined on the real chain"))
            }
        };
        if let Some(a) = arity {
            if a != w.len() {
                return Err(Error::Arity(format!("{} weights for arity {a}", w.len())));
            }
        }
        let codomain = codomain.unwrap_or(Codomain::Chain(chain));
        return MultiMap::new(w.len(), Domain::Chain(chain), codomain, Body::WeightedGeomean(w));
    }

    let domain = domain.ok_or_else(|| Error::format("map file has no domain"))?;
    let arity = arity.ok_or_else(|| Error::format("map file has no arity"))?;
    match builtin {
        Builtin::Median { k } => {
            let codomain = codomain.unwrap_or_else(|| domain.as_codomain());
            MultiMap::new(arity, domain, codomain, Body::Median(k))
        }
        Builtin::Projection { i } => {
            let codomain = codomain.unwrap_or_else(|| domain.as_codomain());
            let slot = i
                .checked_sub(1)
                .ok_or_else(|| Error::Index("projection slots are 1-based".into()))?;
            MultiMap::new(arity, domain, codomain, Body::Projection(slot))
        }
        Builtin::Constant { value } => {
            let codomain = codomain.unwrap_or_else(|| domain.as_codomain());
            let v = match (&codomain, &value) {
                (Codomain::Chain(_), Entry::Index(i)) => Value::Real(f64::from(*i)),
                _ => Value::Elem(entry_index(&codomain, &value)?),
            };
            MultiMap::new(arity, domain, codomain, Body::Constant(v))
        }
        Builtin::Compose { via, outer, inner } => {
            let via = codomain_from_json(via, depth + 1)?;
            let inner = map_from_parts(Some(arity), Some(domain), Some(via.clone()), inner, depth + 1)?;
            let codomain = codomain.unwrap_or(via);
            let outer = outer
                .iter()
                .map(|e| entry_index(&codomain, e))
                .collect::<Result<Vec<_>>>()?;
            MultiMap::compose(outer, inner, codomain)
        }
        Builtin::WeightedGeomean { .. } => unreachable!("handled above"),
    }
}

fn entry_index(codomain: &Codomain, entry: &Entry) -> Result<u32> {
    let v = match entry {
        Entry::Index(i) => {
            let v = Value::Elem(*i);
            codomain.contains(v)?;
            v
        }
        Entry::Label(s) => codomain.parse_value(s)?,
    };
    match v {
        Value::Elem(i) => Ok(i),
        Value::Real(_) => Err(Error::format("table entries must be finite codomain values")),
    }
}

/// Recovers `n` from a table of `size^n` entries.
fn infer_arity(size: usize, len: usize) -> Result<usize> {
    let mismatch = || Error::format(format!("a table of {len} entries is not a power of {size}"));
    if size < 2 {
        return Err(Error::format("cannot infer arity over a one-element domain"));
    }
    let (mut cells, mut n) = (size, 1);
    while cells < len {
        cells = cells.checked_mul(size).ok_or_else(mismatch)?;
        n += 1;
    }
    if cells == len {
        Ok(n)
    } else {
        Err(mismatch())
    }
}

/// Splits a tuple such as `4,6,9` or `{a},{a,b}` at top-level commas and
/// parses each part as an element of `domain`. Commas nested inside braces or
/// parentheses stay with their element.
pub fn parse_tuple(domain: &Domain, text: &str) -> Result<Vec<Value>> {
    let parts = split_top_level(text)?;
    if parts.len() > MAX_TUPLE_LEN {
        return Err(Error::capacity(format!(
            "tuple of {} entries exceeds the cap of {MAX_TUPLE_LEN}",
            parts.len()
        )));
    }
    let codomain = domain.as_codomain();
    parts.into_iter().map(|p| codomain.parse_value(p)).collect()
}

fn split_top_level(text: &str) -> Result<Vec<&str>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::format("empty tuple"));
    }
    let mut parts = Vec::new();
    let mut stack = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '{' | '(' => stack.push(c),
            '}' | ')' => {
                let open = if c == '}' { '{' } else { '(' };
                if stack.pop() != Some(open) {
                    return Err(Error::format(format!("unbalanced {c:?} at byte {i}")));
                }
            }
            ',' if stack.is_empty() => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(Error::format("unclosed bracket in tuple"));
    }
    parts.push(text[start..].trim());
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::format("empty tuple entry"));
    }
    Ok(parts)
}
