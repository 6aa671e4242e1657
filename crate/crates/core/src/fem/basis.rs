//! Barycentric geometry and lowest-order edge basis functions.

use crate::mesh::{cross, dot, sub, LOCAL_EDGES};

#[derive(Debug, Clone, Copy)]
pub struct TetGeometry {
    pub volume: f64,
    /// Gradients of the four barycentric coordinates.
    pub grads: [[f64; 3]; 4],
}

impl TetGeometry {
    /// Returns `None` for non-positive signed volume.
    pub fn new(p: [[f64; 3]; 4]) -> Option<Self> {
        let e1 = sub(p[1], p[0]);
        let e2 = sub(p[2], p[0]);
        let e3 = sub(p[3], p[0]);
        let det = dot(e1, cross(e2, e3));
        if !(det > 0.0) {
            return None;
        }
        let g1 = scale(cross(e2, e3), 1.0 / det);
        let g2 = scale(cross(e3, e1), 1.0 / det);
        let g3 = scale(cross(e1, e2), 1.0 / det);
        let g0 = [-(g1[0] + g2[0] + g3[0]), -(g1[1] + g2[1] + g3[1]), -(g1[2] + g2[2] + g3[2])];
        Some(Self { volume: det / 6.0, grads: [g0, g1, g2, g3] })
    }

    /// Curl of the local edge function on edge `e`, without orientation sign.
    pub fn edge_curl(&self, e: usize) -> [f64; 3] {
        let (a, b) = LOCAL_EDGES[e];
        scale(cross(self.grads[a], self.grads[b]), 2.0)
    }

    /// Value of the local edge function on edge `e` at barycentric point `l`.
    pub fn edge_value(&self, e: usize, l: &[f64]) -> [f64; 3] {
        let (a, b) = LOCAL_EDGES[e];
        let ga = self.grads[a];
        let gb = self.grads[b];
        [
            l[a] * gb[0] - l[b] * ga[0],
            l[a] * gb[1] - l[b] * ga[1],
            l[a] * gb[2] - l[b] * ga[2],
        ]
    }
}

/// Triangle geometry with surface gradients of its barycentric coordinates.
#[derive(Debug, Clone, Copy)]
pub struct FaceGeometry {
    pub area: f64,
    /// Unit normal pointing away from the owning tetrahedron.
    pub normal: [f64; 3],
    pub grads: [[f64; 3]; 3],
}

impl FaceGeometry {
    pub fn new(q: [[f64; 3]; 3], opposite: [f64; 3]) -> Self {
        let n = cross(sub(q[1], q[0]), sub(q[2], q[0]));
        let twice_area = dot(n, n).sqrt();
        let mut nu = scale(n, 1.0 / twice_area);
        let edges = [sub(q[2], q[1]), sub(q[0], q[2]), sub(q[1], q[0])];
        let grads = edges.map(|e| scale(cross(nu, e), 1.0 / twice_area));
        if dot(sub(opposite, q[0]), nu) > 0.0 {
            nu = scale(nu, -1.0);
        }
        Self { area: 0.5 * twice_area, normal: nu, grads }
    }

    /// Tangential trace of the edge function on face edge `(a, b)`.
    pub fn edge_trace(&self, a: usize, b: usize, l: &[f64]) -> [f64; 3] {
        let ga = self.grads[a];
        let gb = self.grads[b];
        [
            l[a] * gb[0] - l[b] * ga[0],
            l[a] * gb[1] - l[b] * ga[1],
            l[a] * gb[2] - l[b] * ga[2],
        ]
    }
}

/// Face-local edges; vertices are stored in increasing id order so these all
/// run in the global direction.
pub const FACE_EDGES: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

#[inline]
pub(crate) fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn tangential(v: [f64; 3], nu: [f64; 3]) -> [f64; 3] {
    let vn = dot(v, nu);
    [v[0] - vn * nu[0], v[1] - vn * nu[1], v[2] - vn * nu[2]]
}

pub(crate) fn point_at(p: &[[f64; 3]], l: &[f64]) -> [f64; 3] {
    let mut x = [0.0; 3];
    for (pi, li) in p.iter().zip(l) {
        for c in 0..3 {
            x[c] += li * pi[c];
        }
    }
    x
}
