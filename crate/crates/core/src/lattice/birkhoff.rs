//! Birkhoff representation: a finite distributive lattice as the downsets of
//! its join-irreducibles, encoded as bit-vectors so that meet and join become
//! bitwise AND and OR.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{Element, FiniteLattice, Lattice, Ops};
use crate::error::{Error, Result};

/// Pairwise re-verification of the encoding is skipped above this size.
const VERIFY_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
pub struct BirkhoffEmbedding {
    irreducibles: Vec<Element>,
    words: usize,
    codes: Vec<u64>,
    decode: HashMap<Box<[u64]>, Element>,
}

impl BirkhoffEmbedding {
    pub(super) fn build(lat: &FiniteLattice) -> Result<Self> {
        let n = lat.size();
        let irreducibles: Vec<Element> = match lat.ops {
            Ops::Chain => (1..n as u32).map(Element).collect(),
            Ops::Powerset => (0..n.trailing_zeros()).map(|j| Element(1 << j)).collect(),
            Ops::Table { .. } => join_irreducibles(lat),
        };
        let words = irreducibles.len().div_ceil(64).max(1);
        let mut codes = vec![0u64; n * words];
        match lat.ops {
            Ops::Powerset => {
                for (x, code) in codes.chunks_mut(words).enumerate() {
                    code[0] = x as u64;
                }
            }
            _ => {
                codes.par_chunks_mut(words).enumerate().for_each(|(x, code)| {
                    let x = Element(x as u32);
                    for (j, &irr) in irreducibles.iter().enumerate() {
                        if lat.leq(irr, x) {
                            code[j / 64] |= 1 << (j % 64);
                        }
                    }
                });
            }
        }
        let mut decode = HashMap::with_capacity(n);
        for (x, code) in codes.chunks(words).enumerate() {
            if decode.insert(code.into(), Element(x as u32)).is_some() {
                return Err(Error::precondition(format!(
                    "Birkhoff encoding of {} is not injective",
                    lat.name()
                )));
            }
        }
        let emb = BirkhoffEmbedding {
            irreducibles,
            words,
            codes,
            decode,
        };
        if n <= VERIFY_LIMIT {
            emb.verify(lat)?;
        }
        Ok(emb)
    }

    /// Checks that encode sends meets to AND and joins to OR on every pair.
    /// The join law fails exactly when the lattice is not distributive.
    fn verify(&self, lat: &FiniteLattice) -> Result<()> {
        let n = lat.size();
        let bad = (0..n as u32).into_par_iter().find_map_first(|a| {
            let a = Element(a);
            let mut scratch = vec![0u64; self.words];
            for b in 0..n as u32 {
                let b = Element(b);
                let (ca, cb) = (self.encode(a), self.encode(b));
                for w in 0..self.words {
                    scratch[w] = ca[w] & cb[w];
                }
                if scratch != self.encode(lat.meet(a, b)) {
                    return Some((a, b, "meet"));
                }
                for w in 0..self.words {
                    scratch[w] = ca[w] | cb[w];
                }
                if scratch != self.encode(lat.join(a, b)) {
                    return Some((a, b, "join"));
                }
            }
            None
        });
        match bad {
            None => Ok(()),
            Some((a, b, op)) => Err(Error::precondition(format!(
                "{} has no Birkhoff embedding ({op} of {} and {} is not preserved); it is not distributive",
                lat.name(),
                lat.label(a),
                lat.label(b)
            ))),
        }
    }

    pub fn irreducibles(&self) -> &[Element] {
        &self.irreducibles
    }

    /// Number of `u64` words per code.
    pub fn words(&self) -> usize {
        self.words
    }

    pub fn encode(&self, e: Element) -> &[u64] {
        &self.codes[e.index() * self.words..(e.index() + 1) * self.words]
    }

    pub fn decode(&self, code: &[u64]) -> Option<Element> {
        self.decode.get(code).copied()
    }

    /// Positions of the irreducibles below `e`.
    pub fn bits(&self, e: Element) -> Vec<usize> {
        let code = self.encode(e);
        (0..self.irreducibles.len())
            .filter(|&j| code[j / 64] >> (j % 64) & 1 == 1)
            .collect()
    }
}

/// Elements that are not the join of the elements strictly below them; in a
/// finite lattice these are exactly the elements with one lower cover.
fn join_irreducibles(lat: &FiniteLattice) -> Vec<Element> {
    let bottom = lat.bottom();
    lat.elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|&x| {
            x != bottom
                && lat
                    .elements()
                    .filter(|&y| y != x && lat.leq(y, x))
                    .fold(bottom, |acc, y| lat.join(acc, y))
                    != x
        })
        .collect()
}
