//! Ruby lattice on the torus.
//!
//! Built from a honeycomb with primitive vertices A(m,n), B(m,n): every
//! honeycomb vertex becomes a blue triangle and every honeycomb edge a square,
//! leaving one hexagon per honeycomb face. A ruby site is a (vertex, face)
//! corner.
//!
//! Conventions:
//! - Honeycomb face F(m,n) has colour (m - n) mod 3 and corners, counter-clockwise
//!   from 30 degrees: B(m+1,n), A(m,n+1), B(m,n), A(m,n), B(m+1,n-1), A(m+1,n).
//! - Hexagon boundary edge k joins corners k and k+1; it is red for even k and
//!   green for odd k, so every site has one red and one green edge.
//! - The periodic cell is spanned by L1 = (1,1) and L2 = (-1,2) in (m,n) units
//!   and holds three faces (one of each colour), six triangles and 18 sites.
//! - Cells are indexed row-major, `cell = x + lx * y`. Triangle `v = 6*cell +
//!   2*r + kind` (kind 0 = A, 1 = B), hexagon `cell*3 + r`, site `3*v + c` where
//!   `c` is the colour of the site's hexagon.
//! - Edge wrap offsets count torus periods crossed from `a` to `b`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Color, Diagnostics, Validate};
use crate::error::{Error, Result};

pub const CELL_SITES: usize = 18;
pub const CELL_EDGES: usize = 36;
pub const CELL_TRIANGLES: usize = 6;
pub const CELL_SQUARES: usize = 9;
pub const CELL_HEXAGONS: usize = 3;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const A1: [f64; 2] = [SQRT3, 0.0];
const A2: [f64; 2] = [SQRT3 / 2.0, 1.5];
const CORNER_SHRINK: f64 = 0.35;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RubySite {
    pub id: usize,
    pub cell: [usize; 2],
    /// Index 0..18 within the cell.
    pub sublattice: usize,
    pub triangle: usize,
    pub hexagon: usize,
    pub position: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubyEdge {
    pub a: usize,
    pub b: usize,
    pub color: Color,
    pub wrap: [i32; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub sites: [usize; 3],
    pub edges: [usize; 3],
    pub cell: [usize; 2],
    pub kind: VertexKind,
    pub position: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Square {
    /// Cyclic order: A corner and B corner in the first hexagon, then B and A
    /// in the second.
    pub sites: [usize; 4],
    /// `sites[k] -> sites[k+1]`: hexagon edge, blue, hexagon edge, blue.
    pub edges: [usize; 4],
    /// The A-type and B-type triangle.
    pub triangles: [usize; 2],
    pub hexagons: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hexagon {
    /// Counter-clockwise from the 30 degree corner.
    pub sites: [usize; 6],
    /// Edge `k` joins `sites[k]` and `sites[k+1]`.
    pub edges: [usize; 6],
    pub triangles: [usize; 6],
    pub color: Color,
    pub cell: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RubyLattice {
    pub lx: usize,
    pub ly: usize,
    /// Torus periods in the plane, for plotting.
    pub periods: [[f64; 2]; 2],
    pub sites: Vec<RubySite>,
    pub edges: Vec<RubyEdge>,
    pub triangles: Vec<Triangle>,
    pub squares: Vec<Square>,
    pub hexagons: Vec<Hexagon>,
}

/// Supercell coordinates of honeycomb face F(m,n): `(r, X, Y)` with
/// `m = r + X - Y`, `n = X + 2Y`.
fn reduce(m: i64, n: i64) -> (usize, i64, i64) {
    let r = (m - n).rem_euclid(3);
    let y = (r - (m - n)) / 3;
    let x = n - 2 * y;
    debug_assert_eq!(r + x - y, m);
    debug_assert_eq!(x + 2 * y, n);
    (r as usize, x, y)
}

fn primitive(r: usize, x: i64, y: i64) -> (i64, i64) {
    (r as i64 + x - y, x + 2 * y)
}

fn face_center(m: i64, n: i64) -> [f64; 2] {
    let (m, n) = (m as f64, n as f64);
    [m * A1[0] + n * A2[0], m * A1[1] + n * A2[1]]
}

fn corner_dir(k: usize) -> [f64; 2] {
    let ang = (30.0 + 60.0 * k as f64).to_radians();
    [ang.cos(), ang.sin()]
}

/// Corners of F(m,n) as (kind, m, n).
fn face_corners(m: i64, n: i64) -> [(VertexKind, i64, i64); 6] {
    use VertexKind::{A, B};
    [
        (B, m + 1, n),
        (A, m, n + 1),
        (B, m, n),
        (A, m, n),
        (B, m + 1, n - 1),
        (A, m + 1, n),
    ]
}

struct Torus {
    lx: usize,
    ly: usize,
}

impl Torus {
    fn cell_index(&self, x: usize, y: usize) -> usize {
        x + self.lx * y
    }

    /// Canonical cell and number of periods for unwrapped supercell coordinates.
    fn wrap(&self, x: i64, y: i64) -> ([usize; 2], [i32; 2]) {
        let (lx, ly) = (self.lx as i64, self.ly as i64);
        (
            [x.rem_euclid(lx) as usize, y.rem_euclid(ly) as usize],
            [x.div_euclid(lx) as i32, y.div_euclid(ly) as i32],
        )
    }

    fn vertex(&self, kind: VertexKind, m: i64, n: i64) -> (usize, [usize; 2], [i32; 2], usize) {
        let (r, x, y) = reduce(m, n);
        let (cell, offset) = self.wrap(x, y);
        let k = match kind {
            VertexKind::A => 0,
            VertexKind::B => 1,
        };
        let id = 6 * self.cell_index(cell[0], cell[1]) + 2 * r + k;
        (id, cell, offset, r)
    }
}

/// Build the ruby lattice with `lx * ly` periodic cells.
pub fn build_ruby(lx: usize, ly: usize) -> Result<RubyLattice> {
    if lx == 0 {
        return Err(Error::InvalidLattice("Lx must be \u{2265} 1".into()));
    }
    if ly == 0 {
        return Err(Error::InvalidLattice("Ly must be \u{2265} 1".into()));
    }
    let torus = Torus { lx, ly };
    let cells = lx * ly;
    let nv = CELL_TRIANGLES * cells;
    let nsite = CELL_SITES * cells;

    let l1 = [A1[0] + A2[0], A1[1] + A2[1]];
    let l2 = [2.0 * A2[0] - A1[0], 2.0 * A2[1] - A1[1]];
    let periods = [
        [lx as f64 * l1[0], lx as f64 * l1[1]],
        [ly as f64 * l2[0], ly as f64 * l2[1]],
    ];

    // Triangles (honeycomb vertices).
    let mut triangles = Vec::with_capacity(nv);
    for y in 0..ly {
        for x in 0..lx {
            for r in 0..3 {
                for kind in [VertexKind::A, VertexKind::B] {
                    let (m, n) = primitive(r, x as i64, y as i64);
                    let c = face_center(m, n);
                    let d = corner_dir(if kind == VertexKind::A { 3 } else { 2 });
                    let v = triangles.len();
                    triangles.push(Triangle {
                        sites: [3 * v, 3 * v + 1, 3 * v + 2],
                        edges: [0; 3],
                        cell: [x, y],
                        kind,
                        position: [c[0] + d[0], c[1] + d[1]],
                    });
                }
            }
        }
    }

    let mut sites: Vec<Option<RubySite>> = vec![None; nsite];
    let mut hexagons = Vec::with_capacity(CELL_HEXAGONS * cells);
    // Per hexagon: corner offsets (in periods) and the honeycomb edge key of
    // each boundary edge.
    let mut hex_offsets = Vec::new();
    let mut hex_edge_keys = Vec::new();
    for y in 0..ly {
        for x in 0..lx {
            for r in 0..3 {
                let h = hexagons.len();
                let color = Color::from_index(r);
                let (m, n) = primitive(r, x as i64, y as i64);
                let corners = face_corners(m, n);
                let mut hsites = [0; 6];
                let mut htri = [0; 6];
                let mut offsets = [[0i32; 2]; 6];
                for (k, &(kind, vm, vn)) in corners.iter().enumerate() {
                    let (v, vcell, off, _) = torus.vertex(kind, vm, vn);
                    let s = 3 * v + r;
                    let canon = canonical_primitive(&torus, vm, vn);
                    let vc = face_center(canon.0, canon.1);
                    let vd = corner_dir(if kind == VertexKind::A { 3 } else { 2 });
                    let cd = corner_dir(k);
                    sites[s] = Some(RubySite {
                        id: s,
                        cell: vcell,
                        sublattice: s % CELL_SITES,
                        triangle: v,
                        hexagon: h,
                        position: [
                            vc[0] + vd[0] - CORNER_SHRINK * cd[0],
                            vc[1] + vd[1] - CORNER_SHRINK * cd[1],
                        ],
                    });
                    hsites[k] = s;
                    htri[k] = v;
                    offsets[k] = off;
                }
                let mut keys = [(0usize, 0u8); 6];
                for k in 0..6 {
                    keys[k] = honeycomb_edge_key(&torus, corners[k], corners[(k + 1) % 6]);
                }
                hexagons.push(Hexagon {
                    sites: hsites,
                    edges: [0; 6],
                    triangles: htri,
                    color,
                    cell: [x, y],
                });
                hex_offsets.push(offsets);
                hex_edge_keys.push(keys);
            }
        }
    }
    let sites: Vec<RubySite> = sites
        .into_iter()
        .map(|s| s.expect("every corner belongs to exactly one hexagon"))
        .collect();

    // Blue edges, three per triangle.
    let mut edges = Vec::with_capacity(CELL_EDGES * cells);
    let mut blue_index = HashMap::new();
    for (v, tri) in triangles.iter_mut().enumerate() {
        let s = [3 * v, 3 * v + 1, 3 * v + 2];
        for (slot, (i, j)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
            blue_index.insert((s[i], s[j]), edges.len());
            tri.edges[slot] = edges.len();
            edges.push(RubyEdge {
                a: s[i],
                b: s[j],
                color: Color::Blue,
                wrap: [0, 0],
            });
        }
    }

    // Hexagon boundary edges, alternating red/green.
    for (h, hex) in hexagons.iter_mut().enumerate() {
        for k in 0..6 {
            let k1 = (k + 1) % 6;
            let off = &hex_offsets[h];
            hex.edges[k] = edges.len();
            edges.push(RubyEdge {
                a: hex.sites[k],
                b: hex.sites[k1],
                color: if k % 2 == 0 { Color::Red } else { Color::Green },
                wrap: [off[k1][0] - off[k][0], off[k1][1] - off[k][1]],
            });
        }
    }

    // Squares: each honeycomb edge is bordered by exactly two hexagons.
    let mut by_key: HashMap<(usize, u8), Vec<(usize, usize)>> = HashMap::new();
    for (h, keys) in hex_edge_keys.iter().enumerate() {
        for (k, key) in keys.iter().enumerate() {
            by_key.entry(*key).or_default().push((h, k));
        }
    }
    let mut keys: Vec<_> = by_key.keys().copied().collect();
    keys.sort_unstable();
    let blue = |a: usize, b: usize| blue_index[&(a.min(b), a.max(b))];
    let mut squares = Vec::with_capacity(CELL_SQUARES * cells);
    for key in keys {
        let sides = &by_key[&key];
        if sides.len() != 2 {
            return Err(Error::Invariant(format!(
                "honeycomb edge {key:?} borders {} hexagons",
                sides.len()
            )));
        }
        // Orient each side as (A corner, B corner).
        let side = |(h, k): (usize, usize)| {
            let hex = &hexagons[h];
            let (s0, s1) = (hex.sites[k], hex.sites[(k + 1) % 6]);
            if triangles[sites[s0].triangle].kind == VertexKind::A {
                (s0, s1)
            } else {
                (s1, s0)
            }
        };
        let (a1, b1) = side(sides[0]);
        let (a2, b2) = side(sides[1]);
        let (h1, k1) = sides[0];
        let (h2, k2) = sides[1];
        squares.push(Square {
            sites: [a1, b1, b2, a2],
            edges: [
                hexagons[h1].edges[k1],
                blue(b1, b2),
                hexagons[h2].edges[k2],
                blue(a2, a1),
            ],
            triangles: [sites[a1].triangle, sites[b1].triangle],
            hexagons: [h1, h2],
        });
    }

    Ok(RubyLattice {
        lx,
        ly,
        periods,
        sites,
        edges,
        triangles,
        squares,
        hexagons,
    })
}

/// Primitive coordinates of the copy of F(m,n) inside the periodic cell.
fn canonical_primitive(torus: &Torus, m: i64, n: i64) -> (i64, i64) {
    let (r, x, y) = reduce(m, n);
    let (cell, _) = torus.wrap(x, y);
    primitive(r, cell[0] as i64, cell[1] as i64)
}

/// Identify a honeycomb edge by its A endpoint (canonical triangle id) and
/// direction: 0 to B(m,n), 1 to B(m,n-1), 2 to B(m+1,n-1).
fn honeycomb_edge_key(
    torus: &Torus,
    p: (VertexKind, i64, i64),
    q: (VertexKind, i64, i64),
) -> (usize, u8) {
    let (a, b) = if p.0 == VertexKind::A { (p, q) } else { (q, p) };
    debug_assert!(a.0 == VertexKind::A && b.0 == VertexKind::B);
    let dir = match (b.1 - a.1, b.2 - a.2) {
        (0, 0) => 0,
        (0, -1) => 1,
        (1, -1) => 2,
        d => unreachable!("not a honeycomb edge: offset {d:?}"),
    };
    let (id, _, _, _) = torus.vertex(VertexKind::A, a.1, a.2);
    (id, dir)
}

impl RubyLattice {
    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn num_cells(&self) -> usize {
        self.lx * self.ly
    }

    /// Triangles of hexagon `h`'s ring, which together carry its plaquette
    /// operators.
    pub fn hexagon_neighborhood(&self, h: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.hexagons[h]
            .triangles
            .iter()
            .flat_map(|&t| self.triangles[t].sites)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of edges of each colour incident to every site.
    pub fn color_degrees(&self) -> Vec<[usize; 3]> {
        let mut deg = vec![[0usize; 3]; self.sites.len()];
        for e in &self.edges {
            for s in [e.a, e.b] {
                if s < deg.len() {
                    deg[s][e.color.index()] += 1;
                }
            }
        }
        deg
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl Validate for RubyLattice {
    fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let cells = self.lx * self.ly;
        let n = self.sites.len();
        d.expect_eq("count", "sites", n, CELL_SITES * cells);
        d.expect_eq("count", "edges", self.edges.len(), CELL_EDGES * cells);
        d.expect_eq(
            "count",
            "triangles",
            self.triangles.len(),
            CELL_TRIANGLES * cells,
        );
        d.expect_eq("count", "squares", self.squares.len(), CELL_SQUARES * cells);
        d.expect_eq(
            "count",
            "hexagons",
            self.hexagons.len(),
            CELL_HEXAGONS * cells,
        );

        for (i, e) in self.edges.iter().enumerate() {
            if e.a >= n || e.b >= n || e.a == e.b {
                d.push(
                    "edge-endpoints",
                    format!("edge {i} has bad endpoints"),
                    vec![e.a, e.b],
                );
            }
        }

        for (s, deg) in self.color_degrees().iter().enumerate() {
            if *deg != [1, 1, 2] {
                d.push(
                    "degree-color",
                    format!("site {s} has red/green/blue degree {deg:?}, expected [1, 1, 2]"),
                    vec![s],
                );
            }
        }

        // Blue triangles partition the sites and carry the blue edges.
        let mut owner = vec![0usize; n];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &s in &tri.sites {
                if s < n {
                    owner[s] += 1;
                }
            }
            for &ei in &tri.edges {
                let ok = self.edges.get(ei).is_some_and(|e| {
                    e.color == Color::Blue && tri.sites.contains(&e.a) && tri.sites.contains(&e.b)
                });
                if !ok {
                    d.push(
                        "triangle-edges",
                        format!("triangle {t} edge {ei} is not a blue edge of its sites"),
                        tri.sites.to_vec(),
                    );
                }
            }
        }
        for (s, &c) in owner.iter().enumerate() {
            if c != 1 {
                d.push(
                    "triangle-partition",
                    format!("site {s} lies in {c} triangles"),
                    vec![s],
                );
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.color == Color::Blue
                && e.a < n
                && e.b < n
                && self.sites[e.a].triangle != self.sites[e.b].triangle
            {
                d.push(
                    "blue-edge",
                    format!("blue edge {i} joins two triangles"),
                    vec![e.a, e.b],
                );
            }
        }

        let faces = self.triangles.len() + self.squares.len() + self.hexagons.len();
        let chi = n as i64 - self.edges.len() as i64 + faces as i64;
        if chi != 0 {
            d.push(
                "euler",
                format!("V - E + F = {chi}, expected 0"),
                Vec::new(),
            );
        }

        for (q, sq) in self.squares.iter().enumerate() {
            let [h1, h2] = sq.hexagons;
            if h1 < self.hexagons.len()
                && h2 < self.hexagons.len()
                && self.hexagons[h1].color == self.hexagons[h2].color
            {
                d.push(
                    "hexagon-coloring",
                    format!("square {q} joins hexagons {h1} and {h2} of equal colour"),
                    sq.sites.to_vec(),
                );
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cell_counts() {
        let lat = build_ruby(1, 1).unwrap();
        assert_eq!(lat.sites.len(), 18);
        assert_eq!(lat.edges.len(), 36);
        assert_eq!(lat.triangles.len(), 6);
        assert_eq!(lat.squares.len(), 9);
        assert_eq!(lat.hexagons.len(), 3);
        let by_color = |c| lat.edges.iter().filter(|e| e.color == c).count();
        assert_eq!(
            (
                by_color(Color::Red),
                by_color(Color::Green),
                by_color(Color::Blue)
            ),
            (9, 9, 18)
        );
        assert!(lat.validate().is_ok(), "{:?}", lat.validate());
    }

    #[test]
    fn degrees_are_four() {
        let lat = build_ruby(1, 1).unwrap();
        assert!(lat
            .color_degrees()
            .iter()
            .all(|d| d.iter().sum::<usize>() == 4));
    }

    #[test]
    fn zero_size_rejected() {
        let err = build_ruby(0, 1).unwrap_err();
        assert_eq!(
            err.to_string(),
            "invalid lattice parameters: Lx must be \u{2265} 1"
        );
        assert!(build_ruby(1, 0).is_err());
    }

    #[test]
    fn reduce_round_trips() {
        for m in -7..7 {
            for n in -7..7 {
                let (r, x, y) = reduce(m, n);
                assert_eq!(primitive(r, x, y), (m, n));
            }
        }
    }

    #[test]
    fn squares_have_one_red_one_green() {
        let lat = build_ruby(2, 1).unwrap();
        for sq in &lat.squares {
            let colors: Vec<Color> = sq.edges.iter().map(|&e| lat.edges[e].color).collect();
            assert_eq!(colors[1], Color::Blue);
            assert_eq!(colors[3], Color::Blue);
            let mut rg = [colors[0], colors[2]];
            rg.sort();
            assert_eq!(rg, [Color::Red, Color::Green]);
        }
    }

    #[test]
    fn wraps_cancel_around_hexagons() {
        let lat = build_ruby(2, 3).unwrap();
        for hex in &lat.hexagons {
            let total = hex.edges.iter().fold([0, 0], |acc, &e| {
                let w = lat.edges[e].wrap;
                [acc[0] + w[0], acc[1] + w[1]]
            });
            assert_eq!(total, [0, 0]);
        }
        assert!(lat.edges.iter().any(|e| e.wrap != [0, 0]));
    }

    #[test]
    fn recolored_edge_flags_two_sites() {
        let mut lat = build_ruby(1, 1).unwrap();
        let e = lat
            .edges
            .iter()
            .position(|e| e.color == Color::Red)
            .unwrap();
        lat.edges[e].color = Color::Green;
        let diag = lat.validate();
        assert_eq!(diag.count("degree-color"), 2);
        let mut flagged: Vec<usize> = diag
            .violations
            .iter()
            .filter(|v| v.check == "degree-color")
            .flat_map(|v| v.sites.clone())
            .collect();
        flagged.sort_unstable();
        let mut expected = vec![lat.edges[e].a, lat.edges[e].b];
        expected.sort_unstable();
        assert_eq!(flagged, expected);
    }
}
