//! Triangulated surfaces of revolution about the `z`-axis.

use std::collections::HashMap;

use serde::Serialize;

use super::{EndpointKind, ProfileCurve};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// Number of leading vertices that are apexes on the axis.
    pub apex_count: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("need at least 3 angular and 2 profile samples")]
    TooCoarse,
    #[error("profile has zero length")]
    Degenerate,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl Mesh {
    /// Builds a mesh from rings of radius `x` at height `z`. Rings with
    /// `x = 0` at either end collapse to a single apex vertex.
    pub fn from_rings(rings: &[(f64, f64)], n_angular: usize) -> Result<Mesh, MeshError> {
        if n_angular < 3 || rings.len() < 2 {
            return Err(MeshError::TooCoarse);
        }
        let n = rings.len();
        let apex_first = rings[0].0 == 0.0;
        let apex_last = rings[n - 1].0 == 0.0 && n > 1;
        let mut vertices = Vec::new();
        let mut apex_index = [None, None];
        if apex_first {
            apex_index[0] = Some(vertices.len());
            vertices.push([0.0, 0.0, rings[0].1]);
        }
        if apex_last {
            apex_index[1] = Some(vertices.len());
            vertices.push([0.0, 0.0, rings[n - 1].1]);
        }
        let apex_count = vertices.len();
        let mut ring_start = vec![usize::MAX; n];
        for (i, &(x, z)) in rings.iter().enumerate() {
            if (i == 0 && apex_first) || (i == n - 1 && apex_last) {
                continue;
            }
            ring_start[i] = vertices.len();
            for j in 0..n_angular {
                let phi = std::f64::consts::TAU * j as f64 / n_angular as f64;
                vertices.push([x * phi.cos(), x * phi.sin(), z]);
            }
        }
        let at = |i: usize, j: usize| -> usize {
            if i == 0 && apex_first {
                apex_index[0].unwrap()
            } else if i == n - 1 && apex_last {
                apex_index[1].unwrap()
            } else {
                ring_start[i] + j % n_angular
            }
        };
        let mut triangles = Vec::new();
        for i in 0..n - 1 {
            for j in 0..n_angular {
                let a = at(i, j);
                let b = at(i + 1, j);
                let c = at(i, j + 1);
                let d = at(i + 1, j + 1);
                if a != c {
                    triangles.push([a, b, c]);
                }
                if b != d {
                    triangles.push([b, d, c]);
                }
            }
        }
        Ok(Mesh {
            vertices,
            triangles,
            apex_count,
        })
    }

    /// Unnormalised face normal (twice the area vector).
    pub fn face_normal(&self, t: usize) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let (a, b, c) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        cross(sub(b, a), sub(c, a))
    }

    /// Area-weighted unit vertex normals.
    pub fn vertex_normals(&self) -> Vec<[f64; 3]> {
        let mut acc = vec![[0.0; 3]; self.vertices.len()];
        for t in 0..self.triangles.len() {
            let n = self.face_normal(t);
            for &v in &self.triangles[t] {
                for k in 0..3 {
                    acc[v][k] += n[k];
                }
            }
        }
        acc.into_iter()
            .map(|n| {
                let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                if len > 0.0 {
                    [n[0] / len, n[1] / len, n[2] / len]
                } else {
                    n
                }
            })
            .collect()
    }

    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let e = self.edge_counts().len() as i64;
        self.vertices.len() as i64 - e + self.triangles.len() as i64
    }

    /// Number of closed loops formed by edges with a single incident face.
    pub fn boundary_loops(&self) -> usize {
        let boundary: Vec<(usize, usize)> = self
            .edge_counts()
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(e, _)| e)
            .collect();
        // Union-find over boundary vertices.
        let mut parent: HashMap<usize, usize> = HashMap::new();
        fn find(p: &mut HashMap<usize, usize>, v: usize) -> usize {
            let up = *p.entry(v).or_insert(v);
            if up == v {
                v
            } else {
                let r = find(p, up);
                p.insert(v, r);
                r
            }
        }
        for &(a, b) in &boundary {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent.insert(ra, rb);
            }
        }
        let keys: Vec<usize> = parent.keys().copied().collect();
        let mut roots: Vec<usize> = keys.into_iter().map(|v| find(&mut parent, v)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn is_closed(&self) -> bool {
        self.edge_counts().values().all(|&c| c == 2)
    }
}

/// Revolves a profile about the `z`-axis using `n_profile` samples spaced
/// uniformly in arc length. Ends on the axis (singular or smooth) become apex
/// vertices; triangles are oriented along the unit normal
/// `(-sin theta, cos theta)` of the profile.
pub fn mesh_of_revolution(p: &ProfileCurve, n_angular: usize, n_profile: usize) -> Result<Mesh, MeshError> {
    if n_angular < 3 || n_profile < 2 || p.samples.len() < 2 {
        return Err(MeshError::TooCoarse);
    }
    let s0 = p.samples[0].s;
    let s1 = p.samples[p.samples.len() - 1].s;
    if !(s1 > s0) {
        return Err(MeshError::Degenerate);
    }
    let scale = p.samples.iter().map(|q| q.x).fold(0.0, f64::max);
    let axis_tol = 1e-6 * scale;
    let mut rings = Vec::with_capacity(n_profile);
    let mut k = 0;
    for i in 0..n_profile {
        let s = s0 + (s1 - s0) * i as f64 / (n_profile - 1) as f64;
        while k + 2 < p.samples.len() && p.samples[k + 1].s < s {
            k += 1;
        }
        let (a, b) = (&p.samples[k], &p.samples[k + 1]);
        let w = if b.s > a.s { ((s - a.s) / (b.s - a.s)).clamp(0.0, 1.0) } else { 0.0 };
        rings.push((a.x + w * (b.x - a.x), a.z + w * (b.z - a.z)));
    }
    let n = rings.len();
    let axis_end = |end: &EndpointKind, x: f64| {
        matches!(end, EndpointKind::AxisSingularity { .. }) || x <= axis_tol
    };
    if axis_end(&p.left_end, rings[0].0) {
        rings[0].0 = 0.0;
    }
    if axis_end(&p.right_end, rings[n - 1].0) {
        rings[n - 1].0 = 0.0;
    }
    Mesh::from_rings(&rings, n_angular)
}
