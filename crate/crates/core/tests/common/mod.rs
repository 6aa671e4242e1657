//! Reference computations written without the library's element code:
//! barycentrics from a 4x4 solve, derivatives by finite differences of
//! affine functions, and collapsed Gauss-Legendre product rules.
#![allow(dead_code)]

use maxlab_core::mesh::Mesh;
use maxlab_core::sparse::CsrMatrix;
use nalgebra::{DMatrix, Matrix4, Vector4};

pub type V3 = [f64; 3];

/// Barycentric coordinates of `x` in the tetrahedron `p`.
pub fn bary(p: &[V3; 4], x: V3) -> [f64; 4] {
    let m = Matrix4::from_fn(|r, c| if r == 0 { 1.0 } else { p[c][r - 1] });
    let l = m.lu().solve(&Vector4::new(1.0, x[0], x[1], x[2])).expect("non-degenerate tetrahedron");
    [l[0], l[1], l[2], l[3]]
}

/// Central differences with unit step; exact for affine `f` up to rounding.
pub fn jacobian(f: impl Fn(V3) -> V3, x: V3) -> [[f64; 3]; 3] {
    let mut j = [[0.0; 3]; 3];
    for d in 0..3 {
        let (mut xp, mut xm) = (x, x);
        xp[d] += 1.0;
        xm[d] -= 1.0;
        let (fp, fm) = (f(xp), f(xm));
        for c in 0..3 {
            j[c][d] = (fp[c] - fm[c]) / 2.0;
        }
    }
    j
}

pub fn grad_bary(p: &[V3; 4]) -> [V3; 4] {
    let c = p.iter().fold([0.0; 3], |a, v| [a[0] + v[0] / 4.0, a[1] + v[1] / 4.0, a[2] + v[2] / 4.0]);
    std::array::from_fn(|i| {
        let j = jacobian(|x| [bary(p, x)[i], 0.0, 0.0], c);
        j[0]
    })
}

/// Whitney function of local edge `(a, b)`, oriented from `a` to `b`.
pub fn whitney(p: &[V3; 4], a: usize, b: usize, x: V3) -> V3 {
    let l = bary(p, x);
    let g = grad_bary(p);
    std::array::from_fn(|c| l[a] * g[b][c] - l[b] * g[a][c])
}

pub fn curl(f: impl Fn(V3) -> V3, x: V3) -> V3 {
    let j = jacobian(f, x);
    [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]]
}

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    // Newton on the Legendre recurrence.
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            ((1.0 - x) / 2.0, 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Collapsed product rule on the tetrahedron: barycentrics and weights
/// summing to one.
pub fn tet_rule(n: usize) -> Vec<([f64; 4], f64)> {
    let gl = gauss_legendre(n);
    let mut out = Vec::new();
    for &(u, wu) in &gl {
        for &(v, wv) in &gl {
            for &(w, ww) in &gl {
                let l1 = u;
                let l2 = (1.0 - u) * v;
                let l3 = (1.0 - u) * (1.0 - v) * w;
                let jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
                out.push(([1.0 - l1 - l2 - l3, l1, l2, l3], 6.0 * wu * wv * ww * jac));
            }
        }
    }
    out
}

/// Collapsed product rule on the triangle, weights summing to one.
pub fn tri_rule(n: usize) -> Vec<([f64; 3], f64)> {
    let gl = gauss_legendre(n);
    let mut out = Vec::new();
    for &(u, wu) in &gl {
        for &(v, wv) in &gl {
            let l1 = u;
            let l2 = (1.0 - u) * v;
            out.push(([1.0 - l1 - l2, l1, l2], 2.0 * wu * wv * (1.0 - u)));
        }
    }
    out
}

pub fn combine<const N: usize>(pts: &[V3; N], l: &[f64; N]) -> V3 {
    let mut x = [0.0; 3];
    for (p, w) in pts.iter().zip(l) {
        for c in 0..3 {
            x[c] += w * p[c];
        }
    }
    x
}

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn tet_points(mesh: &Mesh, t: usize) -> [V3; 4] {
    mesh.tets[t].map(|v| mesh.vertices[v])
}

/// Global edge index and orientation sign (edges run from the lower to the
/// higher vertex id) of local edge `(a, b)` of tetrahedron `t`.
pub fn global_edge(mesh: &Mesh, t: usize, a: usize, b: usize) -> (usize, f64) {
    let (va, vb) = (mesh.tets[t][a], mesh.tets[t][b]);
    let key = [va.min(vb), va.max(vb)];
    let e = mesh.edges.iter().position(|x| *x == key).expect("edge listed");
    (e, if va < vb { 1.0 } else { -1.0 })
}

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Outward normal of the face of the centred cube `[-scale/2, scale/2]^3`
/// containing the triangle `q`.
pub fn cube_normal(q: &[V3; 3], scale: f64) -> V3 {
    let half = scale / 2.0;
    for c in 0..3 {
        if q.iter().all(|p| (p[c] + half).abs() < 1e-14) {
            let mut n = [0.0; 3];
            n[c] = -1.0;
            return n;
        }
        if q.iter().all(|p| (p[c] - half).abs() < 1e-14) {
            let mut n = [0.0; 3];
            n[c] = 1.0;
            return n;
        }
    }
    panic!("triangle {q:?} not on the outer boundary")
}

pub fn dense(a: &CsrMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a.get(i, j))
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
