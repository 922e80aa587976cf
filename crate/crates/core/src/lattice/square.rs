//! Square lattice of the XXZZ toric code.
//!
//! Site `(i, j)` has id `i + L * j`. Plaquette `(i, j)` has corners
//! 1 = (i, j), 2 = (i+1, j+1), 3 = (i+1, j), 4 = (i, j+1), so its stabilizer
//! `X_1 X_2 Z_3 Z_4` puts X on one diagonal and Z on the other. Plaquettes
//! with `i + j` even are black.

use serde::{Deserialize, Serialize};

use super::{Diagnostics, Validate};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shade {
    Black,
    White,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaquette {
    pub origin: [usize; 2],
    /// Corners 1..4 in the stabilizer's order.
    pub corners: [usize; 4],
    pub shade: Shade,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareLattice {
    pub l: usize,
    pub plaquettes: Vec<Plaquette>,
}

pub fn build_square(l: usize) -> Result<SquareLattice> {
    if l < 2 || !l.is_multiple_of(2) {
        return Err(Error::InvalidLattice(format!(
            "L must be even and \u{2265} 2 for a proper chessboard colouring, got {l}"
        )));
    }
    let id = |i: usize, j: usize| (i % l) + l * (j % l);
    let mut plaquettes = Vec::with_capacity(l * l);
    for j in 0..l {
        for i in 0..l {
            plaquettes.push(Plaquette {
                origin: [i, j],
                corners: [id(i, j), id(i + 1, j + 1), id(i + 1, j), id(i, j + 1)],
                shade: if (i + j) % 2 == 0 {
                    Shade::Black
                } else {
                    Shade::White
                },
            });
        }
    }
    Ok(SquareLattice { l, plaquettes })
}

impl SquareLattice {
    pub fn num_sites(&self) -> usize {
        self.l * self.l
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl Validate for SquareLattice {
    fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let l = self.l;
        if !l.is_multiple_of(2) {
            d.push("size", format!("L = {l} is odd"), Vec::new());
        }
        d.expect_eq("count", "plaquettes", self.plaquettes.len(), l * l);
        if d.is_ok() {
            for p in &self.plaquettes {
                let [i, j] = p.origin;
                for (di, dj) in [(1, 0), (0, 1)] {
                    let q = &self.plaquettes[(i + di) % l + l * ((j + dj) % l)];
                    if q.shade == p.shade {
                        d.push(
                            "chessboard",
                            format!("plaquettes {:?} and {:?} share a shade", p.origin, q.origin),
                            p.corners.to_vec(),
                        );
                    }
                }
                let mut c = p.corners;
                c.sort_unstable();
                if c.windows(2).any(|w| w[0] == w[1]) || c[3] >= l * l {
                    d.push(
                        "corners",
                        format!("plaquette {:?} has bad corners", p.origin),
                        p.corners.to_vec(),
                    );
                }
            }
        }
        d
    }
}
