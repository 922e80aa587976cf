//! Lattices on the torus: the ruby lattice of the two-body model, its
//! triangle-contracted honeycomb 2-colex, and the square lattice of the toric
//! code.

mod colex;
mod ruby;
mod square;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use colex::{contract_triangles, ColexEdge, ColexFace, ColexVertex, TwoColex};
pub use ruby::{
    build_ruby, Hexagon, RubyEdge, RubyLattice, RubySite, Square, Triangle, VertexKind, CELL_EDGES,
    CELL_HEXAGONS, CELL_SITES, CELL_SQUARES, CELL_TRIANGLES,
};
pub use square::{build_square, Plaquette, Shade, SquareLattice};

/// Three-coloring label used for ruby edges, hexagons and colex edges/faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Color {
        Color::ALL[i % 3]
    }

    /// The color different from both arguments. Panics if they are equal.
    pub fn third(a: Color, b: Color) -> Color {
        assert_ne!(a, b, "third color of two equal colors");
        Color::from_index(3 - a.index() - b.index())
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One failed lattice check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub message: String,
    pub sites: Vec<usize>,
}

/// Result of [`Validate::validate`]; empty means every invariant holds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, check: &str, message: impl Into<String>, sites: Vec<usize>) {
        self.violations.push(Violation {
            check: check.to_string(),
            message: message.into(),
            sites,
        });
    }

    pub fn count(&self, check: &str) -> usize {
        self.violations.iter().filter(|v| v.check == check).count()
    }

    pub(crate) fn expect_eq(&mut self, check: &str, what: &str, got: usize, want: usize) {
        if got != want {
            self.push(
                check,
                format!("{what}: got {got}, expected {want}"),
                Vec::new(),
            );
        }
    }
}

/// Full invariant check of a lattice structure.
pub trait Validate {
    fn validate(&self) -> Diagnostics;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_color() {
        assert_eq!(Color::third(Color::Red, Color::Green), Color::Blue);
        assert_eq!(Color::third(Color::Blue, Color::Red), Color::Green);
        assert_eq!(Color::third(Color::Blue, Color::Green), Color::Red);
    }
}
