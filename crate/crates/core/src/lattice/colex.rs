//! Honeycomb 2-colex obtained by shrinking every blue triangle to a point.

use serde::{Deserialize, Serialize};

use super::{Color, Diagnostics, RubyLattice, Validate};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColexVertex {
    pub triangle: usize,
    pub position: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColexEdge {
    pub a: usize,
    pub b: usize,
    /// Colour of the two faces the edge connects (not the ones it borders).
    pub color: Color,
    pub wrap: [i32; 2],
    /// The ruby square this edge came from.
    pub square: usize,
    /// The two faces bordering the edge.
    pub faces: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColexFace {
    /// Counter-clockwise, matching the ruby hexagon.
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub color: Color,
    pub hexagon: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoColex {
    pub lx: usize,
    pub ly: usize,
    pub genus: u32,
    pub vertices: Vec<ColexVertex>,
    pub edges: Vec<ColexEdge>,
    pub faces: Vec<ColexFace>,
    /// Ruby triangle id to colex vertex id.
    pub triangle_to_vertex: Vec<usize>,
    /// Ruby hexagon id to colex face id.
    pub hexagon_to_face: Vec<usize>,
}

/// Contract the blue triangles of a valid ruby lattice.
pub fn contract_triangles(lat: &RubyLattice) -> Result<TwoColex> {
    let diag = lat.validate();
    if !diag.is_ok() {
        return Err(Error::InvalidLattice(format!(
            "ruby lattice fails {} check(s), first: {}",
            diag.violations.len(),
            diag.violations[0].message
        )));
    }
    let vertices = lat
        .triangles
        .iter()
        .enumerate()
        .map(|(t, tri)| ColexVertex {
            triangle: t,
            position: tri.position,
        })
        .collect();
    let triangle_to_vertex: Vec<usize> = (0..lat.triangles.len()).collect();
    let hexagon_to_face: Vec<usize> = (0..lat.hexagons.len()).collect();

    let mut edge_of_ruby_edge = vec![usize::MAX; lat.edges.len()];
    let mut edges = Vec::with_capacity(lat.squares.len());
    for (q, sq) in lat.squares.iter().enumerate() {
        let [h1, h2] = sq.hexagons;
        let hex_edge = &lat.edges[sq.edges[0]];
        // Wrap from the A corner to the B corner of the first hexagon edge.
        let wrap = if hex_edge.a == sq.sites[0] {
            hex_edge.wrap
        } else {
            [-hex_edge.wrap[0], -hex_edge.wrap[1]]
        };
        edge_of_ruby_edge[sq.edges[0]] = edges.len();
        edge_of_ruby_edge[sq.edges[2]] = edges.len();
        edges.push(ColexEdge {
            a: triangle_to_vertex[sq.triangles[0]],
            b: triangle_to_vertex[sq.triangles[1]],
            color: Color::third(lat.hexagons[h1].color, lat.hexagons[h2].color),
            wrap,
            square: q,
            faces: [hexagon_to_face[h1], hexagon_to_face[h2]],
        });
    }

    let faces = lat
        .hexagons
        .iter()
        .enumerate()
        .map(|(h, hex)| ColexFace {
            vertices: hex
                .triangles
                .iter()
                .map(|&t| triangle_to_vertex[t])
                .collect(),
            edges: hex.edges.iter().map(|&e| edge_of_ruby_edge[e]).collect(),
            color: hex.color,
            hexagon: h,
        })
        .collect();

    Ok(TwoColex {
        lx: lat.lx,
        ly: lat.ly,
        genus: 1,
        vertices,
        edges,
        faces,
        triangle_to_vertex,
        hexagon_to_face,
    })
}

impl TwoColex {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Distinct vertices of face `f` in ascending order.
    pub fn face_support(&self, f: usize) -> Vec<usize> {
        let mut v = self.faces[f].vertices.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl Validate for TwoColex {
    fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let nv = self.vertices.len();
        let mut by_color = vec![[0usize; 3]; nv];
        for (i, e) in self.edges.iter().enumerate() {
            if e.a >= nv || e.b >= nv {
                d.push(
                    "edge-endpoints",
                    format!("edge {i} has bad endpoints"),
                    vec![e.a, e.b],
                );
                continue;
            }
            by_color[e.a][e.color.index()] += 1;
            by_color[e.b][e.color.index()] += 1;
            let [f1, f2] = e.faces;
            match (self.faces.get(f1), self.faces.get(f2)) {
                (Some(p), Some(q)) => {
                    if p.color == q.color {
                        d.push(
                            "face-coloring",
                            format!("edge {i} borders faces {f1} and {f2} of equal colour"),
                            vec![e.a, e.b],
                        );
                    } else if Color::third(p.color, q.color) != e.color {
                        d.push(
                            "edge-color",
                            format!(
                                "edge {i} is {} but borders {} and {}",
                                e.color, p.color, q.color
                            ),
                            vec![e.a, e.b],
                        );
                    }
                }
                _ => d.push(
                    "edge-faces",
                    format!("edge {i} has bad faces"),
                    vec![e.a, e.b],
                ),
            }
        }
        for (v, c) in by_color.iter().enumerate() {
            if *c != [1, 1, 1] {
                d.push(
                    "vertex-colors",
                    format!("vertex {v} has red/green/blue degree {c:?}, expected [1, 1, 1]"),
                    vec![v],
                );
            }
        }
        let chi = nv as i64 - self.edges.len() as i64 + self.faces.len() as i64;
        if chi != 2 - 2 * self.genus as i64 {
            d.push(
                "euler",
                format!("V - E + F = {chi} for genus {}", self.genus),
                Vec::new(),
            );
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_ruby;

    #[test]
    fn contract_unit_cell() {
        let colex = contract_triangles(&build_ruby(1, 1).unwrap()).unwrap();
        assert_eq!(
            (colex.vertices.len(), colex.edges.len(), colex.faces.len()),
            (6, 9, 3)
        );
        assert!(colex.validate().is_ok(), "{:?}", colex.validate());
        // On the smallest torus every face touches every vertex.
        for f in 0..3 {
            assert_eq!(colex.face_support(f), (0..6).collect::<Vec<_>>());
        }
    }

    #[test]
    fn contract_two_by_two() {
        let colex = contract_triangles(&build_ruby(2, 2).unwrap()).unwrap();
        assert_eq!(
            (colex.vertices.len(), colex.edges.len(), colex.faces.len()),
            (24, 36, 12)
        );
        assert!(colex.validate().is_ok());
    }

    #[test]
    fn invalid_ruby_rejected() {
        let mut lat = build_ruby(1, 1).unwrap();
        lat.edges[20].color = Color::Blue;
        assert!(matches!(
            contract_triangles(&lat),
            Err(Error::InvalidLattice(_))
        ));
    }
}
