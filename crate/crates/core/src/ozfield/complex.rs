use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite abstract simplicial complex, optionally with vertex positions.
///
/// Maximal simplices are stored as sorted vertex lists. Listed simplices that
/// are faces of other listed simplices are dropped, and vertices not covered by
/// any simplex become 0-simplices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "ComplexRepr")]
pub struct SimplicialComplex {
    vertex_count: usize,
    maximal_simplices: Vec<Vec<usize>>,
    positions: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    vertices: usize,
    simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<Vec<f64>>>,
}

impl TryFrom<ComplexRepr> for SimplicialComplex {
    type Error = Error;

    fn try_from(r: ComplexRepr) -> Result<Self> {
        let c = SimplicialComplex::new(r.vertices, r.simplices)?;
        match r.positions {
            Some(p) => c.with_positions(p),
            None => Ok(c),
        }
    }
}

impl From<SimplicialComplex> for ComplexRepr {
    fn from(c: SimplicialComplex) -> Self {
        ComplexRepr {
            vertices: c.vertex_count,
            simplices: c.maximal_simplices,
            positions: c.positions,
        }
    }
}

fn is_face(small: &[usize], big: &[usize]) -> bool {
    small.len() < big.len() && small.iter().all(|v| big.binary_search(v).is_ok())
}

impl SimplicialComplex {
    pub fn new(vertex_count: usize, simplices: Vec<Vec<usize>>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::invalid("vertices", "complex needs at least one vertex"));
        }
        let mut normalized = BTreeSet::new();
        for (i, s) in simplices.into_iter().enumerate() {
            let sorted: BTreeSet<usize> = s.iter().copied().collect();
            if s.is_empty() {
                return Err(Error::invalid(format!("simplices[{i}]"), "empty simplex"));
            }
            if sorted.len() != s.len() {
                return Err(Error::invalid(format!("simplices[{i}]"), "repeated vertex"));
            }
            if let Some(&v) = sorted.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::invalid(
                    format!("simplices[{i}]"),
                    format!("vertex {v} out of range (vertex count {vertex_count})"),
                ));
            }
            normalized.insert(sorted.into_iter().collect::<Vec<_>>());
        }
        let listed: Vec<Vec<usize>> = normalized.into_iter().collect();
        let mut maximal: Vec<Vec<usize>> = listed
            .iter()
            .filter(|s| !listed.iter().any(|t| is_face(s, t)))
            .cloned()
            .collect();
        let covered: BTreeSet<usize> = maximal.iter().flatten().copied().collect();
        maximal.extend((0..vertex_count).filter(|v| !covered.contains(v)).map(|v| vec![v]));
        maximal.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(SimplicialComplex {
            vertex_count,
            maximal_simplices: maximal,
            positions: None,
        })
    }

    /// Attaches one coordinate vector per vertex, all of the same length.
    pub fn with_positions(mut self, positions: Vec<Vec<f64>>) -> Result<Self> {
        if positions.len() != self.vertex_count {
            return Err(Error::invalid(
                "positions",
                format!("expected {} positions, got {}", self.vertex_count, positions.len()),
            ));
        }
        let dim = positions.first().map_or(0, Vec::len);
        if let Some(i) = positions.iter().position(|p| p.len() != dim || p.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid(format!("positions[{i}]"), "inconsistent or non-finite coordinates"));
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn maximal_simplices(&self) -> &[Vec<usize>] {
        &self.maximal_simplices
    }

    pub fn positions(&self) -> Option<&[Vec<f64>]> {
        self.positions.as_deref()
    }

    pub fn dimension(&self) -> usize {
        self.maximal_simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    /// Every simplex, ordered by size and then lexicographically. The
    /// 0-simplices come first, in vertex order.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut all = BTreeSet::new();
        for s in &self.maximal_simplices {
            for mask in 1u64..(1u64 << s.len()) {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                all.insert((face.len(), face));
            }
        }
        all.into_iter().map(|(_, f)| f).collect()
    }

    /// Vertices sharing a simplex with `v`, excluding `v`.
    pub fn neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut out = vec![BTreeSet::new(); self.vertex_count];
        for s in &self.maximal_simplices {
            for &a in s {
                for &b in s {
                    if a != b {
                        out[a].insert(b);
                    }
                }
            }
        }
        out
    }

    /// A path with one edge: vertices 0, 1.
    pub fn edge() -> Self {
        Self::new(2, vec![vec![0, 1]])
            .and_then(|c| c.with_positions(vec![vec![0.0], vec![1.0]]))
            .expect("valid fixture")
    }

    /// Cycle on `n ≥ 3` vertices placed at angles `2πj/n` on the unit circle.
    pub fn circle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        let simplices = (0..n).map(|j| vec![j, (j + 1) % n]).collect();
        let positions = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        Self::new(n, simplices)
            .and_then(|c| c.with_positions(positions))
            .expect("valid fixture")
    }

    /// Boundary of the octahedron, vertices `±e₁, ±e₂, ±e₃`.
    pub fn octahedron() -> Self {
        // 0: +x, 1: −x, 2: +y, 3: −y, 4: +z, 5: −z
        let mut simplices = Vec::new();
        for x in [0, 1] {
            for y in [2, 3] {
                for z in [4, 5] {
                    simplices.push(vec![x, y, z]);
                }
            }
        }
        let mut positions = Vec::new();
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut p = vec![0.0; 3];
                p[axis] = sign;
                positions.push(p);
            }
        }
        Self::new(6, simplices)
            .and_then(|c| c.with_positions(positions))
            .expect("valid fixture")
    }

    /// The solid 2-simplex.
    pub fn triangle() -> Self {
        Self::new(3, vec![vec![0, 1, 2]])
            .and_then(|c| c.with_positions(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]))
            .expect("valid fixture")
    }
}

/// Color per vertex; same-colored vertices never share a simplex when proper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexColoring {
    pub colors: Vec<usize>,
    pub color_count: usize,
}

impl VertexColoring {
    pub fn new(colors: Vec<usize>) -> Self {
        let color_count = colors.iter().map(|c| c + 1).max().unwrap_or(0);
        VertexColoring { colors, color_count }
    }

    /// Fails on a size mismatch or on two same-colored vertices in one simplex.
    pub fn check_proper(&self, complex: &SimplicialComplex) -> Result<()> {
        if self.colors.len() != complex.vertex_count() {
            return Err(Error::invalid(
                "coloring",
                format!("{} colors for {} vertices", self.colors.len(), complex.vertex_count()),
            ));
        }
        if let Some(&c) = self.colors.iter().find(|&&c| c >= self.color_count) {
            return Err(Error::invalid("coloring", format!("color {c} exceeds color count")));
        }
        for s in complex.maximal_simplices() {
            for (i, &a) in s.iter().enumerate() {
                for &b in &s[i + 1..] {
                    if self.colors[a] == self.colors[b] {
                        return Err(Error::invalid(
                            "coloring",
                            format!("adjacent vertices {a} and {b} share color {}", self.colors[a]),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Vertices of color `k`, ascending.
    pub fn class(&self, k: usize) -> Vec<usize> {
        (0..self.colors.len()).filter(|&v| self.colors[v] == k).collect()
    }
}

/// Smallest-available-color greedy coloring in vertex order.
///
/// Proper, but may use more than `dimension + 1` colors.
pub fn greedy_coloring(complex: &SimplicialComplex) -> VertexColoring {
    let neighbors = complex.neighbors();
    let mut colors: Vec<Option<usize>> = vec![None; complex.vertex_count()];
    for v in 0..complex.vertex_count() {
        let used: BTreeSet<usize> = neighbors[v].iter().filter_map(|&w| colors[w]).collect();
        colors[v] = (0..).find(|c| !used.contains(c));
    }
    VertexColoring::new(colors.into_iter().map(|c| c.unwrap_or(0)).collect())
}

/// Barycentric subdivision with its coloring by face dimension.
///
/// Vertices of the result are the faces of `complex` in [`SimplicialComplex::faces`]
/// order, so original vertex `v` keeps id `v`. Maximal simplices are the
/// complete flags inside each maximal simplex. Positions, when present, move to
/// face barycenters.
pub fn barycentric_subdivide(complex: &SimplicialComplex) -> (SimplicialComplex, VertexColoring) {
    let faces = complex.faces();
    let index: BTreeMap<&[usize], usize> =
        faces.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();

    let mut flags = Vec::new();
    for top in complex.maximal_simplices() {
        let mut chain = Vec::with_capacity(top.len());
        collect_flags(top, &index, &mut chain, &mut flags);
    }
    let colors = faces.iter().map(|f| f.len() - 1).collect();
    let mut sub = SimplicialComplex::new(faces.len(), flags).expect("flags of a valid complex");
    if let Some(pos) = complex.positions() {
        let bary = faces
            .iter()
            .map(|f| {
                let mut p = vec![0.0; pos[0].len()];
                for &v in f {
                    for (acc, x) in p.iter_mut().zip(&pos[v]) {
                        *acc += x;
                    }
                }
                p.iter().map(|x| x / f.len() as f64).collect()
            })
            .collect();
        sub = sub.with_positions(bary).expect("barycenters are finite");
    }
    (sub, VertexColoring::new(colors))
}

// Chains σ_top ⊃ … ⊃ {v}, built by removing one vertex at a time.
fn collect_flags(
    face: &[usize],
    index: &BTreeMap<&[usize], usize>,
    chain: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    chain.push(index[face]);
    if face.len() == 1 {
        out.push(chain.clone());
    } else {
        for skip in 0..face.len() {
            let smaller: Vec<usize> = face
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            collect_flags(&smaller, index, chain, out);
        }
    }
    chain.pop();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_colorable(c: &SimplicialComplex) -> bool {
        // BFS 2-coloring of the 1-skeleton.
        let nb = c.neighbors();
        let mut side = vec![None; c.vertex_count()];
        for start in 0..c.vertex_count() {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &nb[v] {
                    match side[w] {
                        None => {
                            side[w] = Some(!side[v].unwrap());
                            queue.push_back(w);
                        }
                        Some(s) if s == side[v].unwrap() => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    #[test]
    fn edge_subdivides_to_path() {
        let (sub, col) = barycentric_subdivide(&SimplicialComplex::edge());
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.maximal_simplices(), &[vec![0, 2], vec![1, 2]]);
        assert_eq!(col.colors, vec![0, 0, 1]);
        assert_eq!(col.color_count, 2);
        assert_eq!(sub.positions().unwrap()[2], vec![0.5]);
    }

    #[test]
    fn three_cycle_becomes_six_cycle() {
        let c = SimplicialComplex::circle(3);
        assert!(!two_colorable(&c));
        let (sub, col) = barycentric_subdivide(&c);
        assert_eq!(sub.vertex_count(), 6);
        assert_eq!(sub.maximal_simplices().len(), 6);
        assert!(sub.neighbors().iter().all(|n| n.len() == 2));
        assert!(two_colorable(&sub));
        col.check_proper(&sub).unwrap();
        assert_eq!(col.color_count, 2);
    }

    #[test]
    fn solid_triangle_has_seven_faces() {
        let (sub, col) = barycentric_subdivide(&SimplicialComplex::triangle());
        assert_eq!(sub.vertex_count(), 7);
        assert_eq!(sub.maximal_simplices().len(), 6);
        assert_eq!(col.color_count, 3);
        assert_eq!(sub.dimension(), 2);
        col.check_proper(&sub).unwrap();
    }

    #[test]
    fn octahedron_counts() {
        let c = SimplicialComplex::octahedron();
        assert_eq!(c.faces().len(), 6 + 12 + 8);
        let (sub, col) = barycentric_subdivide(&c);
        assert_eq!(sub.maximal_simplices().len(), 48);
        assert_eq!(col.color_count, 3);
        col.check_proper(&sub).unwrap();
    }

    #[test]
    fn normalization_drops_faces_and_adds_isolated_vertices() {
        let c = SimplicialComplex::new(4, vec![vec![1, 0], vec![0, 1, 2], vec![2]]).unwrap();
        assert_eq!(c.maximal_simplices(), &[vec![3], vec![0, 1, 2]]);
        assert!(SimplicialComplex::new(2, vec![vec![0, 2]]).is_err());
        assert!(SimplicialComplex::new(2, vec![vec![0, 0]]).is_err());
    }

    #[test]
    fn greedy_on_odd_cycle_needs_three() {
        let col = greedy_coloring(&SimplicialComplex::circle(5));
        col.check_proper(&SimplicialComplex::circle(5)).unwrap();
        assert_eq!(col.color_count, 3);
        let bad = VertexColoring::new(vec![0, 0, 1]);
        assert!(bad.check_proper(&SimplicialComplex::circle(3)).is_err());
    }

    #[test]
    fn json_shape() {
        let c: SimplicialComplex =
            serde_json::from_str(r#"{"vertices": 3, "simplices": [[0,1],[1,2]]}"#).unwrap();
        assert_eq!(c.dimension(), 1);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"vertices":3,"simplices":[[0,1],[1,2]]}"#);
        assert!(serde_json::from_str::<SimplicialComplex>(r#"{"vertices": 1, "simplices": [[0,1]]}"#).is_err());
    }
}
