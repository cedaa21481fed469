//! Triangulated tori and the flags (vertex ⊂ edge ⊂ triangle) over which
//! Deligne cocycles are integrated.
//!
//! Refinement r triangulates T² on a (3r) × (3r) grid, each grid cell split
//! along the v01–v10 diagonal into two counterclockwise triangles. Every
//! simplex is assigned a chart of the 9-chart cover by the cell of the
//! standard 1/3-partition containing its barycenter; the assignment is
//! computed in exact integer arithmetic on grid coordinates, so the two
//! triangles sharing an edge always agree on the edge's chart, including
//! across the torus seams.

use crate::cover::ChartId;
use serde::{Deserialize, Serialize};

/// Barycenter-to-chart rule. The two rules differ only for simplices whose
/// barycenter lies exactly on a 1/3-line (corner vertices and the edges
/// along cell boundaries); such simplices sit inside both candidate charts,
/// so either choice yields a valid flag decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexMap {
    /// Boundary barycenters go to the chart on their upper/right side.
    LowerLeft,
    /// Boundary barycenters go to the chart on their lower/left side.
    UpperRight,
}

impl IndexMap {
    /// Cell index (0..3) of the exact rational coordinate num/den on the
    /// circle.
    fn cell(self, num: i64, den: i64) -> u8 {
        let q = 3 * num;
        let c = match self {
            IndexMap::LowerLeft => q.div_euclid(den),
            IndexMap::UpperRight => (q + den - 1).div_euclid(den) - 1,
        };
        c.rem_euclid(3) as u8
    }

    /// Chart of the barycenter (s_num/s_den, t_num/t_den); s picks the
    /// column, t the row.
    fn chart(self, s_num: i64, s_den: i64, t_num: i64, t_den: i64) -> ChartId {
        ChartId::new(self.cell(t_num, t_den) + 1, self.cell(s_num, s_den) + 1)
    }
}

/// A vertex of a flag: position (unwrapped coordinates in [0, 1]²), its
/// chart, and its sign in the flag sum (−1 for the initial vertex of the
/// oriented edge, +1 for the terminal one).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexFlag {
    pub pos: (f64, f64),
    pub chart: ChartId,
    pub sign: i8,
}

/// An edge of a triangle carrying the orientation induced from the
/// counterclockwise triangle boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFlag {
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub chart: ChartId,
    pub verts: [VertexFlag; 2],
}

/// One triangle with its full flag data.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleFlag {
    /// Counterclockwise vertex positions, unwrapped within the grid cell.
    pub verts: [(f64, f64); 3],
    pub chart: ChartId,
    pub edges: [EdgeFlag; 3],
    /// Grid coordinates of the vertices (for exact dedup across the seam).
    pub grid: [(i64, i64); 3],
}

/// The standard triangulation of T² at refinement r ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusMesh {
    r: usize,
    n: usize,
}

impl TorusMesh {
    pub fn new(r: usize) -> Self {
        assert!(r >= 1, "mesh refinement must be at least 1");
        Self { r, n: 3 * r }
    }

    pub fn refinement(&self) -> usize {
        self.r
    }

    /// Grid resolution per axis (= 3r).
    pub fn grid(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        9 * self.r * self.r
    }

    pub fn edge_count(&self) -> usize {
        27 * self.r * self.r
    }

    pub fn triangle_count(&self) -> usize {
        18 * self.r * self.r
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    fn pos(&self, v: (i64, i64)) -> (f64, f64) {
        (v.0 as f64 / self.n as f64, v.1 as f64 / self.n as f64)
    }

    /// All triangles with their flag data under the given index map.
    pub fn flags(&self, map: IndexMap) -> Vec<TriangleFlag> {
        let n = self.n as i64;
        let mut out = Vec::with_capacity(self.triangle_count());
        for b in 0..n {
            for a in 0..n {
                let v00 = (a, b);
                let v10 = (a + 1, b);
                let v01 = (a, b + 1);
                let v11 = (a + 1, b + 1);
                for tri in [[v00, v10, v01], [v10, v11, v01]] {
                    out.push(self.triangle_flag(tri, map));
                }
            }
        }
        out
    }

    fn triangle_flag(&self, tri: [(i64, i64); 3], map: IndexMap) -> TriangleFlag {
        let n = self.n as i64;
        let chart = map.chart(
            tri.iter().map(|v| v.0).sum(),
            3 * n,
            tri.iter().map(|v| v.1).sum(),
            3 * n,
        );
        let edges = [[tri[0], tri[1]], [tri[1], tri[2]], [tri[2], tri[0]]].map(|[u, v]| {
            let e_chart = map.chart(u.0 + v.0, 2 * n, u.1 + v.1, 2 * n);
            let vert = |w: (i64, i64), sign: i8| VertexFlag {
                pos: self.pos(w),
                chart: map.chart(w.0, n, w.1, n),
                sign,
            };
            EdgeFlag {
                from: self.pos(u),
                to: self.pos(v),
                chart: e_chart,
                verts: [vert(u, -1), vert(v, 1)],
            }
        });
        TriangleFlag { verts: tri.map(|v| self.pos(v)), chart, edges, grid: tri }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::GoodCover;
    use std::collections::{BTreeMap, BTreeSet};

    fn wrap(v: (i64, i64), n: i64) -> (i64, i64) {
        (v.0.rem_euclid(n), v.1.rem_euclid(n))
    }

    fn edge_key(u: (i64, i64), v: (i64, i64), n: i64) -> ((i64, i64), (i64, i64)) {
        let (a, b) = (wrap(u, n), wrap(v, n));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    #[test]
    fn flag_counts() {
        for r in [1usize, 2, 3] {
            let mesh = TorusMesh::new(r);
            let flags = mesh.flags(IndexMap::LowerLeft);
            assert_eq!(flags.len(), 18 * r * r);
            let edge_flags: usize = flags.iter().map(|t| t.edges.len()).sum();
            assert_eq!(edge_flags, 54 * r * r);
            let vert_flags: usize =
                flags.iter().flat_map(|t| &t.edges).map(|e| e.verts.len()).sum();
            assert_eq!(vert_flags, 108 * r * r);
        }
    }

    #[test]
    fn distinct_simplices_and_euler() {
        for r in [1usize, 2] {
            let mesh = TorusMesh::new(r);
            let n = mesh.grid() as i64;
            let flags = mesh.flags(IndexMap::LowerLeft);
            let mut verts = BTreeSet::new();
            let mut edges = BTreeSet::new();
            for t in &flags {
                for &v in &t.grid {
                    verts.insert(wrap(v, n));
                }
                for pair in [[t.grid[0], t.grid[1]], [t.grid[1], t.grid[2]], [t.grid[2], t.grid[0]]]
                {
                    edges.insert(edge_key(pair[0], pair[1], n));
                }
            }
            assert_eq!(verts.len(), mesh.vertex_count());
            assert_eq!(edges.len(), mesh.edge_count());
            assert_eq!(mesh.euler_characteristic(), 0);
        }
    }

    #[test]
    fn triangles_are_counterclockwise() {
        let mesh = TorusMesh::new(2);
        for t in mesh.flags(IndexMap::LowerLeft) {
            let [a, b, c] = t.verts;
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            assert!(cross > 0.0, "triangle {:?} not CCW", t.verts);
        }
    }

    #[test]
    fn per_chart_distribution_at_r1() {
        // At r = 1 each chart receives exactly 1 vertex, 3 edges and 2
        // triangles under the default map.
        let mesh = TorusMesh::new(1);
        let n = mesh.grid() as i64;
        let mut tri_per: BTreeMap<ChartId, usize> = BTreeMap::new();
        let mut edge_per: BTreeMap<ChartId, BTreeSet<_>> = BTreeMap::new();
        let mut vert_per: BTreeMap<ChartId, BTreeSet<_>> = BTreeMap::new();
        for t in mesh.flags(IndexMap::LowerLeft) {
            *tri_per.entry(t.chart).or_default() += 1;
            for (k, e) in t.edges.iter().enumerate() {
                let pair = match k {
                    0 => [t.grid[0], t.grid[1]],
                    1 => [t.grid[1], t.grid[2]],
                    _ => [t.grid[2], t.grid[0]],
                };
                edge_per.entry(e.chart).or_default().insert(edge_key(pair[0], pair[1], n));
                for (v, g) in e.verts.iter().zip([pair[0], pair[1]]) {
                    vert_per.entry(v.chart).or_default().insert(wrap(g, n));
                }
            }
        }
        assert_eq!(tri_per.len(), 9);
        for (&chart, &count) in &tri_per {
            assert_eq!(count, 2, "chart {chart}");
            assert_eq!(edge_per[&chart].len(), 3, "chart {chart}");
            assert_eq!(vert_per[&chart].len(), 1, "chart {chart}");
        }
    }

    #[test]
    fn shared_edges_get_consistent_charts() {
        for map in [IndexMap::LowerLeft, IndexMap::UpperRight] {
            let mesh = TorusMesh::new(2);
            let n = mesh.grid() as i64;
            let mut seen: BTreeMap<_, ChartId> = BTreeMap::new();
            for t in mesh.flags(map) {
                for (k, e) in t.edges.iter().enumerate() {
                    let pair = match k {
                        0 => [t.grid[0], t.grid[1]],
                        1 => [t.grid[1], t.grid[2]],
                        _ => [t.grid[2], t.grid[0]],
                    };
                    let key = edge_key(pair[0], pair[1], n);
                    if let Some(prev) = seen.insert(key, e.chart) {
                        assert_eq!(prev, e.chart, "edge {key:?} under {map:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn oriented_edges_cancel_pairwise() {
        // Every undirected interior edge appears in exactly two triangles
        // with opposite induced orientations.
        let mesh = TorusMesh::new(1);
        let n = mesh.grid() as i64;
        let mut signed: BTreeMap<_, i64> = BTreeMap::new();
        for t in mesh.flags(IndexMap::LowerLeft) {
            for (k, _) in t.edges.iter().enumerate() {
                let pair = match k {
                    0 => [t.grid[0], t.grid[1]],
                    1 => [t.grid[1], t.grid[2]],
                    _ => [t.grid[2], t.grid[0]],
                };
                let (a, b) = (wrap(pair[0], n), wrap(pair[1], n));
                let (key, sign) = if a <= b { ((a, b), 1) } else { ((b, a), -1) };
                *signed.entry(key).or_default() += sign;
            }
        }
        assert!(signed.values().all(|&v| v == 0));
    }

    #[test]
    fn simplices_lie_inside_their_charts() {
        // Validity of the flag formula requires every simplex to be
        // contained in the chart its barycenter rule picks.
        let cover = GoodCover::standard();
        for map in [IndexMap::LowerLeft, IndexMap::UpperRight] {
            for r in [1usize, 2] {
                for t in TorusMesh::new(r).flags(map) {
                    for &(s, tt) in &t.verts {
                        assert!(cover.contains(t.chart, s, tt));
                    }
                    for e in &t.edges {
                        for u in [0.0, 0.25, 0.5, 0.75, 1.0] {
                            let s = e.from.0 + u * (e.to.0 - e.from.0);
                            let tt = e.from.1 + u * (e.to.1 - e.from.1);
                            assert!(cover.contains(e.chart, s, tt));
                        }
                        for v in &e.verts {
                            assert!(cover.contains(v.chart, v.pos.0, v.pos.1));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn index_maps_agree_off_boundaries() {
        // Triangle barycenters never land on a 1/3-line, so the two rules
        // assign the same chart to every triangle.
        let mesh = TorusMesh::new(2);
        let a = mesh.flags(IndexMap::LowerLeft);
        let b = mesh.flags(IndexMap::UpperRight);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.chart, y.chart);
        }
    }
}
