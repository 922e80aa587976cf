//! Integrals of motion of the two-body model.
//!
//! Every operator here is found by solving the commutation constraints over
//! GF(2) on a chosen support, then checked against the full Hamiltonian.
//!
//! Supports that wrap around a small torus are handled in the covering
//! plane: the sites of a contractible region get their own copies, a term
//! with both ends in the region stays two-body, and a term leaving it only
//! constrains its end inside. This keeps local operators local even when the
//! region covers the whole 1x1 torus.
//!
//! Labels:
//! - Plaquette operators on a hexagon are C (Z on the six corners), A
//!   (mostly X) and B (mostly Y), each the `+` tensor product of letters.
//! - The three operators on a non-contractible strip are coloured by the
//!   corner colour of their single-Z triangles; the operator without any
//!   single-Z triangle takes the remaining colour. With this labelling two
//!   strings crossing once anticommute exactly when their colours differ.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::hamiltonian::HamiltonianTerms;
use crate::lattice::{Color, RubyLattice, TwoColex};
use crate::pauli::{PauliKind, PauliOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaquetteLabel {
    A,
    B,
    C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Provenance {
    Plaquette {
        face: usize,
        label: PlaquetteLabel,
    },
    String {
        /// `None` for contractible loops, which carry no colour.
        color: Option<Color>,
        homology: [u8; 2],
        /// Colex vertices (ruby triangles) visited by the closed walk.
        path: Vec<usize>,
    },
    Stringnet {
        components: Vec<String>,
    },
    Logical {
        name: String,
        color: Color,
        homology: [u8; 2],
        path: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralOfMotion {
    pub op: PauliOperator,
    pub provenance: Provenance,
}

impl IntegralOfMotion {
    pub fn name(&self) -> String {
        match &self.provenance {
            Provenance::Plaquette { face, label } => format!("{label:?}{face}"),
            Provenance::String {
                color, homology, ..
            } => match color {
                Some(c) => format!("{c}[{}{}]", homology[0], homology[1]),
                None => format!("loop[{}{}]", homology[0], homology[1]),
            },
            Provenance::Stringnet { components } => components.join("*"),
            Provenance::Logical { name, .. } => name.clone(),
        }
    }
}

/// Outcome of checking one operator against a Hamiltonian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IomCheck {
    pub commutes_with_all_terms: bool,
    pub anticommuting_terms: Vec<usize>,
    pub hermitian: bool,
    pub squares_to_identity: bool,
}

impl IomCheck {
    pub fn ok(&self) -> bool {
        self.commutes_with_all_terms && self.hermitian && self.squares_to_identity
    }
}

pub fn check_iom(h: &HamiltonianTerms, op: &PauliOperator) -> Result<IomCheck> {
    if op.n() != h.n() {
        return Err(Error::SizeMismatch {
            left: h.n(),
            right: op.n(),
        });
    }
    let anticommuting_terms: Vec<usize> = h
        .terms()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.op.anticommutes_unchecked(op))
        .map(|(i, _)| i)
        .collect();
    Ok(IomCheck {
        commutes_with_all_terms: anticommuting_terms.is_empty(),
        anticommuting_terms,
        hermitian: op.is_hermitian(),
        squares_to_identity: op.square().is_identity(),
    })
}

/// Serialisable view of one verified IOM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IomReport {
    pub name: String,
    pub provenance: Provenance,
    pub pauli_text: String,
    pub weight: usize,
    pub check: IomCheck,
}

pub fn iom_report(h: &HamiltonianTerms, iom: &IntegralOfMotion) -> Result<IomReport> {
    Ok(IomReport {
        name: iom.name(),
        provenance: iom.provenance.clone(),
        pauli_text: iom.op.to_text(),
        weight: iom.op.weight(),
        check: check_iom(h, &iom.op)?,
    })
}

/// Commutation constraints on a set of slots: each row is a Pauli's
/// symplectic vector `[x | z]` restricted to the slots.
fn nullspace_ops(k: usize, rows: Vec<BitVec>) -> Vec<BitVec> {
    // P commutes with T iff P.x . T.z + P.z . T.x = 0, so swap halves.
    let swapped: Vec<BitVec> = rows
        .iter()
        .map(|r| r.slice(k, k).concat(&r.slice(0, k)))
        .collect();
    BitMatrix::from_rows(2 * k, swapped).nullspace()
}

/// Basis of the Pauli operators supported on `support` that commute with
/// every term of `h`, as Hermitian `+` representatives in row-reduced order
/// over the sorted support.
pub fn find_local_ioms(h: &HamiltonianTerms, support: &[usize]) -> Result<Vec<PauliOperator>> {
    let n = h.n();
    let mut sites = support.to_vec();
    sites.sort_unstable();
    sites.dedup();
    if let Some(&s) = sites.iter().find(|&&s| s >= n) {
        return Err(Error::SiteOutOfRange { site: s, n });
    }
    let k = sites.len();
    let rows = h
        .terms()
        .iter()
        .filter(|t| sites.iter().any(|&s| t.op.kind_at(s).is_some()))
        .map(|t| {
            let mut row = BitVec::zeros(2 * k);
            for (i, &s) in sites.iter().enumerate() {
                row.set(i, t.op.xbits().get(s));
                row.set(k + i, t.op.zbits().get(s));
            }
            row
        })
        .collect();
    Ok(nullspace_ops(k, rows)
        .iter()
        .map(|v| lift(n, &sites, v))
        .collect())
}

fn lift(n: usize, sites: &[usize], v: &BitVec) -> PauliOperator {
    let k = sites.len();
    let letters = sites
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| PauliKind::from_bits(v.get(i), v.get(k + i)).map(|kind| (s, kind)));
    PauliOperator::from_sparse(n, letters).expect("slots map to distinct sites")
}

/// Pauli letter of the two-body term on each ruby edge, checking that `h`
/// has one term per edge in edge order.
fn edge_letters(lat: &RubyLattice, h: &HamiltonianTerms) -> Result<Vec<PauliKind>> {
    if h.n() != lat.num_sites() || h.len() != lat.edges.len() {
        return Err(Error::InvalidArgument(
            "Hamiltonian is not a two-body Hamiltonian of this lattice".into(),
        ));
    }
    lat.edges
        .iter()
        .zip(h.terms())
        .enumerate()
        .map(|(i, (e, t))| {
            let ka = t.op.kind_at(e.a);
            if t.op.weight() != 2 || ka.is_none() || ka != t.op.kind_at(e.b) {
                return Err(Error::InvalidArgument(format!(
                    "term {i} does not match edge ({}, {})",
                    e.a, e.b
                )));
            }
            Ok(ka.expect("checked above"))
        })
        .collect()
}

/// A contractible set of triangles lifted to the covering plane.
struct CoverPatch {
    /// Torus site of every slot.
    slots: Vec<usize>,
    /// Constraint rows over the slots.
    rows: Vec<BitVec>,
}

impl CoverPatch {
    fn new(
        lat: &RubyLattice,
        h: &HamiltonianTerms,
        triangles: &[(usize, [i32; 2])],
    ) -> Result<Self> {
        let letters = edge_letters(lat, h)?;
        let mut index: HashMap<(usize, [i32; 2]), usize> = HashMap::new();
        let mut slots = Vec::new();
        for &(t, off) in triangles {
            for s in lat.triangles[t].sites {
                index.entry((s, off)).or_insert_with(|| {
                    slots.push(s);
                    slots.len() - 1
                });
            }
        }
        let mut torus_sites = slots.clone();
        torus_sites.sort_unstable();
        torus_sites.dedup();
        if torus_sites.len() != slots.len() {
            return Err(Error::InvalidArgument(
                "region overlaps its own periodic image".into(),
            ));
        }
        let offsets: Vec<[i32; 2]> = {
            let mut o = vec![[0; 2]; slots.len()];
            for (&(_, off), &i) in &index {
                o[i] = off;
            }
            o
        };
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); lat.num_sites()];
        for (i, e) in lat.edges.iter().enumerate() {
            incident[e.a].push(i);
            incident[e.b].push(i);
        }
        let k = slots.len();
        let mut rows = Vec::new();
        let set = |row: &mut BitVec, slot: usize, kind: PauliKind| {
            let (x, z) = kind.bits();
            row.set(slot, x);
            row.set(k + slot, z);
        };
        for (i, &s) in slots.iter().enumerate() {
            for &ei in &incident[s] {
                let e = &lat.edges[ei];
                let (other, off) = if e.a == s {
                    (e.b, [offsets[i][0] + e.wrap[0], offsets[i][1] + e.wrap[1]])
                } else {
                    (e.a, [offsets[i][0] - e.wrap[0], offsets[i][1] - e.wrap[1]])
                };
                let mut row = BitVec::zeros(2 * k);
                set(&mut row, i, letters[ei]);
                match index.get(&(other, off)) {
                    Some(&j) if j < i => continue,
                    Some(&j) => set(&mut row, j, letters[ei]),
                    None => {}
                }
                rows.push(row);
            }
        }
        Ok(CoverPatch { slots, rows })
    }

    fn ioms(&self, n: usize) -> Vec<PauliOperator> {
        nullspace_ops(self.slots.len(), self.rows.clone())
            .iter()
            .map(|v| lift(n, &self.slots, v))
            .collect()
    }
}

/// Cover offsets of the corners of hexagon `hx`, walking its boundary.
fn hexagon_triangle_offsets(lat: &RubyLattice, hx: usize) -> Vec<(usize, [i32; 2])> {
    let hex = &lat.hexagons[hx];
    let mut off = [0i32; 2];
    let mut out = Vec::with_capacity(6);
    for k in 0..6 {
        out.push((hex.triangles[k], off));
        let w = lat.edges[hex.edges[k]].wrap;
        off = [off[0] + w[0], off[1] + w[1]];
    }
    out
}

/// The 2-dimensional space of a hexagon's plaquette operators, labelled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteIoms {
    pub face: usize,
    pub a: IntegralOfMotion,
    pub b: IntegralOfMotion,
    pub c: IntegralOfMotion,
    /// GF(2) rank of the local solution space on the hexagon's triangles.
    pub local_rank: usize,
}

impl PlaquetteIoms {
    pub fn ops(&self) -> [&PauliOperator; 3] {
        [&self.a.op, &self.b.op, &self.c.op]
    }
}

/// Discover and label the plaquette operators of hexagon `face`.
pub fn plaquette_ioms(
    lat: &RubyLattice,
    h: &HamiltonianTerms,
    face: usize,
) -> Result<PlaquetteIoms> {
    if face >= lat.hexagons.len() {
        return Err(Error::InvalidArgument(format!(
            "face {face} out of range ({} hexagons)",
            lat.hexagons.len()
        )));
    }
    let patch = CoverPatch::new(lat, h, &hexagon_triangle_offsets(lat, face))?;
    let basis = patch.ioms(h.n());
    if basis.len() != 2 {
        return Err(Error::Invariant(format!(
            "hexagon {face} has {} independent local operators, expected 2",
            basis.len()
        )));
    }
    let ab = (&basis[0] * &basis[1]).hermitian_representative();
    let mut a = None;
    let mut b = None;
    let mut c = None;
    for op in [basis[0].clone(), basis[1].clone(), ab] {
        let (nx, ny, nz) = (
            op.count_kind(PauliKind::X),
            op.count_kind(PauliKind::Y),
            op.count_kind(PauliKind::Z),
        );
        let slot = if nx == 0 && ny == 0 && nz > 0 {
            &mut c
        } else if nx > ny {
            &mut a
        } else if ny > nx {
            &mut b
        } else {
            return Err(Error::Invariant(format!(
                "cannot label plaquette operator {op}"
            )));
        };
        if slot.replace(op).is_some() {
            return Err(Error::Invariant(format!(
                "hexagon {face} has an ambiguous plaquette labelling"
            )));
        }
    }
    let mk = |op: Option<PauliOperator>, label| IntegralOfMotion {
        op: op.expect("each label assigned exactly once"),
        provenance: Provenance::Plaquette { face, label },
    };
    Ok(PlaquetteIoms {
        face,
        a: mk(a, PlaquetteLabel::A),
        b: mk(b, PlaquetteLabel::B),
        c: mk(c, PlaquetteLabel::C),
        local_rank: basis.len(),
    })
}

/// Plaquette operators of every hexagon, in parallel.
pub fn all_plaquette_ioms(lat: &RubyLattice, h: &HamiltonianTerms) -> Result<Vec<PlaquetteIoms>> {
    use rayon::prelude::*;
    (0..lat.hexagons.len())
        .into_par_iter()
        .map(|f| plaquette_ioms(lat, h, f))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    L1,
    L2,
}

/// Closed walk in the 2-colex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColexCycle {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// Net number of torus periods crossed.
    pub winding: [i32; 2],
}

impl ColexCycle {
    /// Follow `edges` from `start`; the walk must return to `start`.
    pub fn from_edges(colex: &TwoColex, start: usize, edges: Vec<usize>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidArgument("empty path".into()));
        }
        let mut v = start;
        let mut winding = [0i32; 2];
        let mut vertices = Vec::with_capacity(edges.len());
        for &ei in &edges {
            let e = colex
                .edges
                .get(ei)
                .ok_or_else(|| Error::InvalidArgument(format!("edge {ei} out of range")))?;
            vertices.push(v);
            if e.a == v {
                winding = [winding[0] + e.wrap[0], winding[1] + e.wrap[1]];
                v = e.b;
            } else if e.b == v {
                winding = [winding[0] - e.wrap[0], winding[1] - e.wrap[1]];
                v = e.a;
            } else {
                return Err(Error::InvalidArgument(format!(
                    "edge {ei} is not incident to vertex {v}"
                )));
            }
        }
        if v != start {
            return Err(Error::InvalidArgument(format!(
                "open path from {start} to {v}; strings must be closed"
            )));
        }
        Ok(ColexCycle {
            vertices,
            edges,
            winding,
        })
    }

    /// Boundary of face `f`.
    pub fn around_face(colex: &TwoColex, f: usize) -> Result<Self> {
        let face = colex
            .faces
            .get(f)
            .ok_or_else(|| Error::InvalidArgument(format!("face {f} out of range")))?;
        ColexCycle::from_edges(colex, face.vertices[0], face.edges.clone())
    }

    /// Straight non-contractible cycle through the faces of colour
    /// `path_color` in row (L1) or column (L2) `index`. Inside each face it
    /// follows the lower (`side = 0`) or upper (`side = 1`) half of the
    /// boundary and then hops along an edge of colour `path_color` to the
    /// next face.
    pub fn straight(
        colex: &TwoColex,
        path_color: Color,
        dir: Direction,
        index: usize,
        side: usize,
    ) -> Result<Self> {
        let (lx, ly) = (colex.lx, colex.ly);
        let r = path_color.index();
        // Corner indices counter-clockwise from 30 degrees.
        let route: [usize; 4] = match (dir, side) {
            (Direction::L1, 0) => [3, 4, 5, 0],
            (Direction::L1, 1) => [3, 2, 1, 0],
            (Direction::L2, 0) => [4, 5, 0, 1],
            (Direction::L2, 1) => [4, 3, 2, 1],
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "side must be 0 or 1, got {side}"
                )))
            }
        };
        let faces: Vec<usize> = match dir {
            Direction::L1 if index < ly => (0..lx).map(|x| (x + lx * index) * 3 + r).collect(),
            Direction::L2 if index < lx => (0..ly).map(|y| (index + lx * y) * 3 + r).collect(),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "row/column {index} out of range"
                )))
            }
        };
        let mut edges = Vec::new();
        for (i, &f) in faces.iter().enumerate() {
            let face = &colex.faces[f];
            for w in route.windows(2) {
                let k = if w[1] == (w[0] + 1) % 6 { w[0] } else { w[1] };
                edges.push(face.edges[k]);
            }
            let next = &colex.faces[faces[(i + 1) % faces.len()]];
            let (u, v) = (face.vertices[route[3]], next.vertices[route[0]]);
            let hop: Vec<usize> = (0..colex.edges.len())
                .filter(|&e| {
                    let ed = &colex.edges[e];
                    ed.color == path_color && ((ed.a == u && ed.b == v) || (ed.a == v && ed.b == u))
                })
                .collect();
            if hop.len() != 1 {
                return Err(Error::Invariant(format!(
                    "expected one {path_color} edge between {u} and {v}, found {}",
                    hop.len()
                )));
            }
            edges.push(hop[0]);
        }
        let start = colex.faces[faces[0]].vertices[route[0]];
        let cycle = ColexCycle::from_edges(colex, start, edges)?;
        let expected = match dir {
            Direction::L1 => [1, 0],
            Direction::L2 => [0, 1],
        };
        if cycle.winding != expected {
            return Err(Error::Invariant(format!(
                "straight cycle has winding {:?}, expected {expected:?}",
                cycle.winding
            )));
        }
        Ok(cycle)
    }

    pub fn homology(&self) -> [u8; 2] {
        [
            self.winding[0].rem_euclid(2) as u8,
            self.winding[1].rem_euclid(2) as u8,
        ]
    }

    pub fn is_contractible(&self) -> bool {
        self.winding == [0, 0]
    }

    /// Triangles visited, with their offsets in the covering plane.
    fn cover_triangles(&self, colex: &TwoColex) -> Vec<(usize, [i32; 2])> {
        let mut off = [0i32; 2];
        let mut out = Vec::new();
        for (&v, &ei) in self.vertices.iter().zip(&self.edges) {
            let t = colex.vertices[v].triangle;
            if !out.contains(&(t, off)) {
                out.push((t, off));
            }
            let e = &colex.edges[ei];
            let sign = if e.a == v { 1 } else { -1 };
            off = [off[0] + sign * e.wrap[0], off[1] + sign * e.wrap[1]];
        }
        out
    }

    fn triangles(&self, colex: &TwoColex) -> Vec<usize> {
        let mut t: Vec<usize> = self
            .vertices
            .iter()
            .map(|&v| colex.vertices[v].triangle)
            .collect();
        t.sort_unstable();
        t.dedup();
        t
    }
}

/// Colour label of a string operator from its single-Z triangles.
fn single_z_colors(lat: &RubyLattice, op: &PauliOperator) -> Vec<Color> {
    let mut out = Vec::new();
    for tri in &lat.triangles {
        let letters: Vec<(usize, PauliKind)> = tri
            .sites
            .iter()
            .filter_map(|&s| op.kind_at(s).map(|k| (s, k)))
            .collect();
        if let [(s, PauliKind::Z)] = letters[..] {
            let c = lat.hexagons[lat.sites[s].hexagon].color;
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// The three string operators carried by the strip of triangles along a
/// closed colex walk. Non-contractible walks give one operator per colour,
/// ordered red, green, blue. Contractible walks give the GF(2) basis and
/// its product, uncoloured.
pub fn string_ioms(
    lat: &RubyLattice,
    colex: &TwoColex,
    h: &HamiltonianTerms,
    cycle: &ColexCycle,
) -> Result<[IntegralOfMotion; 3]> {
    let basis = if cycle.is_contractible() {
        CoverPatch::new(lat, h, &cycle.cover_triangles(colex))?.ioms(h.n())
    } else {
        let sites: Vec<usize> = cycle
            .triangles(colex)
            .iter()
            .flat_map(|&t| lat.triangles[t].sites)
            .collect();
        find_local_ioms(h, &sites)?
    };
    if basis.len() != 2 {
        return Err(Error::Invariant(format!(
            "strip carries {} independent operators, expected 2",
            basis.len()
        )));
    }
    let ops = [
        basis[0].clone(),
        basis[1].clone(),
        (&basis[0] * &basis[1]).hermitian_representative(),
    ];
    let homology = cycle.homology();
    let path = cycle.vertices.clone();
    let mk = |op: PauliOperator, color| IntegralOfMotion {
        op,
        provenance: Provenance::String {
            color,
            homology,
            path: path.clone(),
        },
    };
    if cycle.is_contractible() {
        let [a, b, c] = ops;
        return Ok([mk(a, None), mk(b, None), mk(c, None)]);
    }
    let labels: Vec<Vec<Color>> = ops.iter().map(|op| single_z_colors(lat, op)).collect();
    let mut by_color: [Option<PauliOperator>; 3] = [None, None, None];
    let mut unlabelled = None;
    for (op, cols) in ops.into_iter().zip(&labels) {
        match cols[..] {
            [c] if by_color[c.index()].is_none() => by_color[c.index()] = Some(op),
            [] if unlabelled.is_none() => unlabelled = Some(op),
            _ => {
                return Err(Error::Invariant(format!(
                    "cannot colour string operators (single-Z colours {labels:?})"
                )))
            }
        }
    }
    let missing: Vec<usize> = (0..3).filter(|&i| by_color[i].is_none()).collect();
    match (&missing[..], unlabelled) {
        (&[i], Some(op)) => by_color[i] = Some(op),
        _ => {
            return Err(Error::Invariant(format!(
                "cannot colour string operators (single-Z colours {labels:?})"
            )))
        }
    }
    let [r, g, b] = by_color;
    Ok([
        mk(r.expect("filled"), Some(Color::Red)),
        mk(g.expect("filled"), Some(Color::Green)),
        mk(b.expect("filled"), Some(Color::Blue)),
    ])
}

/// The string operator of colour `color` on a non-contractible walk.
pub fn string_iom(
    lat: &RubyLattice,
    colex: &TwoColex,
    h: &HamiltonianTerms,
    cycle: &ColexCycle,
    color: Color,
) -> Result<IntegralOfMotion> {
    if cycle.is_contractible() {
        return Err(Error::InvalidArgument(
            "contractible loops carry no string colour".into(),
        ));
    }
    let [r, g, b] = string_ioms(lat, colex, h, cycle)?;
    Ok(match color {
        Color::Red => r,
        Color::Green => g,
        Color::Blue => b,
    })
}

/// Product of IOMs, recorded as a string-net.
pub fn stringnet(components: &[&IntegralOfMotion]) -> Result<IntegralOfMotion> {
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty string-net".into()))?;
    let mut op = PauliOperator::identity(first.op.n());
    for c in components {
        op = op.multiply(&c.op)?;
    }
    Ok(IntegralOfMotion {
        op,
        provenance: Provenance::Stringnet {
            components: components.iter().map(|c| c.name()).collect(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringNetReport {
    pub pauli_text: String,
    pub check: IomCheck,
    /// Is the operator, up to sign, a product of plaquette operators?
    pub in_plaquette_span: bool,
    /// Plaquette factors (e.g. `A3`) whose product equals the operator.
    pub decomposition: Option<Vec<String>>,
    /// `+1` or `-1`: operator = sign * product of `decomposition`.
    pub sign: Option<i8>,
}

/// Check a string-net against the Hamiltonian and try to write it as a
/// product of plaquette operators.
pub fn stringnet_verify(
    h: &HamiltonianTerms,
    net: &IntegralOfMotion,
    plaquettes: &[PlaquetteIoms],
) -> Result<StringNetReport> {
    let check = check_iom(h, &net.op)?;
    let generators: Vec<&IntegralOfMotion> = plaquettes.iter().flat_map(|p| [&p.a, &p.b]).collect();
    let span = BitMatrix::from_rows(
        2 * h.n(),
        generators.iter().map(|g| g.op.symplectic()).collect(),
    );
    let (decomposition, sign) = match span.solve_combination(&net.op.symplectic()) {
        Some(combo) => {
            let mut prod = PauliOperator::identity(h.n());
            let mut names = Vec::new();
            for i in combo.iter_ones() {
                prod = &prod * &generators[i].op;
                names.push(generators[i].name());
            }
            let ratio = net.op.multiply(&prod.adjoint())?;
            let sign = ratio.phase().sign().map(|s| s as i8);
            (Some(names), sign)
        }
        None => (None, None),
    };
    Ok(StringNetReport {
        pauli_text: net.op.to_text(),
        check,
        in_plaquette_span: decomposition.is_some(),
        decomposition,
        sign,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaquetteRelation {
    pub factors: Vec<String>,
    /// Sign of the product of `factors` (a multiple of identity).
    pub sign: i8,
}

/// GF(2) relations among the A and B plaquette operators.
pub fn plaquette_relations(plaquettes: &[PlaquetteIoms]) -> Vec<PlaquetteRelation> {
    let generators: Vec<&IntegralOfMotion> = plaquettes.iter().flat_map(|p| [&p.a, &p.b]).collect();
    let Some(first) = generators.first() else {
        return Vec::new();
    };
    let n = first.op.n();
    let m = BitMatrix::from_rows(
        2 * n,
        generators.iter().map(|g| g.op.symplectic()).collect(),
    );
    m.echelon()
        .relations
        .iter()
        .map(|combo| {
            let mut prod = PauliOperator::identity(n);
            let mut factors = Vec::new();
            for i in combo.iter_ones() {
                prod = &prod * &generators[i].op;
                factors.push(generators[i].name());
            }
            let sign = prod.phase().sign().map_or(0, |s| s as i8);
            PlaquetteRelation { factors, sign }
        })
        .collect()
}

/// Product over all faces of the operator with the given label.
pub fn plaquette_product(
    plaquettes: &[PlaquetteIoms],
    label: PlaquetteLabel,
) -> Option<PauliOperator> {
    let mut ops = plaquettes.iter().map(|p| match label {
        PlaquetteLabel::A => &p.a.op,
        PlaquetteLabel::B => &p.b.op,
        PlaquetteLabel::C => &p.c.op,
    });
    let first = ops.next()?.clone();
    Some(ops.fold(first, |acc, op| &acc * op))
}

/// The four torus string operators forming two logical qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalAlgebra {
    pub x1: IntegralOfMotion,
    pub z1: IntegralOfMotion,
    pub x2: IntegralOfMotion,
    pub z2: IntegralOfMotion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub holds: bool,
}

impl LogicalAlgebra {
    pub fn ops(&self) -> [(&'static str, &IntegralOfMotion); 4] {
        [
            ("X1", &self.x1),
            ("Z1", &self.z1),
            ("X2", &self.x2),
            ("Z2", &self.z2),
        ]
    }

    /// The two-qubit Pauli relations: pairs commute except (X1, Z1) and
    /// (X2, Z2), which anticommute; each operator squares to identity.
    pub fn relations(&self) -> Vec<Relation> {
        let ops = self.ops();
        let mut out = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let (ni, a) = ops[i];
                let (nj, b) = ops[j];
                let anti = a.op.anticommutes_unchecked(&b.op);
                let want_anti = matches!((ni, nj), ("X1", "Z1") | ("X2", "Z2"));
                out.push(Relation {
                    name: if want_anti {
                        format!("{{{ni},{nj}}} = 0")
                    } else {
                        format!("[{ni},{nj}] = 0")
                    },
                    holds: anti == want_anti,
                });
            }
        }
        for (name, a) in ops {
            out.push(Relation {
                name: format!("{name}^2 = 1"),
                holds: a.op.square().is_identity(),
            });
        }
        out
    }
}

fn logical(name: &str, iom: IntegralOfMotion) -> IntegralOfMotion {
    let (color, homology, path) = match iom.provenance {
        Provenance::String {
            color: Some(c),
            homology,
            path,
        } => (c, homology, path),
        _ => unreachable!("logicals are built from coloured strings"),
    };
    IntegralOfMotion {
        op: iom.op,
        provenance: Provenance::Logical {
            name: name.to_string(),
            color,
            homology,
            path,
        },
    }
}

/// Logical operators built from strings through the red faces of row 0
/// (L1) and column 0 (L2): X1 = red string along L1, Z1 = green along L2,
/// X2 = green along L1, Z2 = red along L2.
pub fn logical_algebra(
    lat: &RubyLattice,
    colex: &TwoColex,
    h: &HamiltonianTerms,
) -> Result<LogicalAlgebra> {
    let l1 = ColexCycle::straight(colex, Color::Red, Direction::L1, 0, 0)?;
    let l2 = ColexCycle::straight(colex, Color::Red, Direction::L2, 0, 0)?;
    let [r1, g1, _] = string_ioms(lat, colex, h, &l1)?;
    let [r2, g2, _] = string_ioms(lat, colex, h, &l2)?;
    let alg = LogicalAlgebra {
        x1: logical("X1", r1),
        z1: logical("Z1", g2),
        x2: logical("X2", g1),
        z2: logical("Z2", r2),
    };
    if let Some(r) = alg.relations().iter().find(|r| !r.holds) {
        return Err(Error::Invariant(format!(
            "logical relation {} fails",
            r.name
        )));
    }
    for (name, iom) in alg.ops() {
        if !h.commutes_with(&iom.op)? {
            return Err(Error::Invariant(format!(
                "logical {name} does not commute with H"
            )));
        }
    }
    Ok(alg)
}
