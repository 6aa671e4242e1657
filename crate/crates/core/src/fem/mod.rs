//! Lowest-order edge-element assembly of the scattering problem and of the
//! nodal auxiliary operators.
//!
//! All matrices are returned on free degrees of freedom: edges and vertices
//! on the scatterer surface carry the homogeneous tangential condition and
//! are eliminated.

pub mod basis;
pub mod quadrature;
pub mod source;

use std::path::Path;

use maxlab_sparse::{mm, CsrMatrix, TripletBuilder};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::{dot, sub, BoundaryTag, EntityTag, Mesh, LOCAL_EDGES};
use basis::{point_at, tangential, FaceGeometry, TetGeometry, FACE_EDGES};
pub use source::{CVec3, FieldFn, IncidentField, SourceSpec, VolumeFn};

#[derive(Debug, Clone)]
pub struct Material {
    /// Relative permittivity per tetrahedron.
    pub eps_r: Vec<f64>,
    /// Relative permeability per tetrahedron.
    pub mu_r: Vec<f64>,
    pub k: f64,
    pub lambda_imp: f64,
}

impl Material {
    pub fn homogeneous(mesh: &Mesh, k: f64) -> Self {
        let nt = mesh.tets.len();
        Self { eps_r: vec![1.0; nt], mu_r: vec![1.0; nt], k, lambda_imp: 1.0 }
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        let nt = mesh.tets.len();
        if self.eps_r.len() != nt || self.mu_r.len() != nt {
            return Err(Error::Config(format!(
                "material arrays must have one entry per tetrahedron ({nt})"
            )));
        }
        if self.eps_r.iter().chain(&self.mu_r).any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Config("eps_r and mu_r must be positive".into()));
        }
        // k = 0 is accepted so the static limit can be assembled
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::Config(format!("wavenumber must be non-negative, got {}", self.k)));
        }
        if !(self.lambda_imp >= 0.0 && self.lambda_imp.is_finite()) {
            return Err(Error::Config("impedance coefficient must be non-negative".into()));
        }
        Ok(())
    }
}

/// Old-to-new maps from mesh entities to free unknowns.
#[derive(Debug, Clone)]
pub struct DofMaps {
    pub free_edge: Vec<Option<usize>>,
    pub free_vertex: Vec<Option<usize>>,
    /// New-to-old lists.
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl DofMaps {
    pub fn new(mesh: &Mesh) -> Self {
        let (free_edge, edges) = compact(&mesh.edge_tags);
        let (free_vertex, vertices) = compact(&mesh.vertex_tags);
        Self { free_edge, free_vertex, edges, vertices }
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
}

fn compact(tags: &[EntityTag]) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut map = vec![None; tags.len()];
    let mut list = Vec::new();
    for (i, t) in tags.iter().enumerate() {
        if *t != EntityTag::Gamma {
            map[i] = Some(list.len());
            list.push(i);
        }
    }
    (map, list)
}

#[derive(Debug, Clone)]
pub struct AssembledProblem {
    pub c: CsrMatrix<f64>,
    pub m: CsrMatrix<f64>,
    pub b: CsrMatrix<f64>,
    pub s_r: Vec<f64>,
    pub s_i: Vec<f64>,
    pub g: CsrMatrix<f64>,
    pub p_curl: CsrMatrix<f64>,
    pub l_vec: CsrMatrix<f64>,
    pub m_vec: CsrMatrix<f64>,
    pub lap_scalar: CsrMatrix<f64>,
    pub maps: DofMaps,
    pub k: f64,
    /// Whether some vertex was eliminated; without one the scalar Laplacian
    /// is singular.
    pub has_dirichlet: bool,
}

impl AssembledProblem {
    pub fn n_edges(&self) -> usize {
        self.maps.n_edges()
    }

    /// Writes `C.mtx`, `M.mtx`, `B.mtx`, `G.mtx` and `Pcurl.mtx` into `dir`.
    pub fn export_matrix_market(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, a) in [("C", &self.c), ("M", &self.m), ("B", &self.b), ("G", &self.g), ("Pcurl", &self.p_curl)] {
            mm::write(a, dir.join(format!("{name}.mtx")))?;
        }
        Ok(())
    }
}

pub fn assemble(mesh: &Mesh, material: &Material, source: &SourceSpec) -> Result<AssembledProblem> {
    material.validate(mesh)?;
    source.validate()?;
    let maps = DofMaps::new(mesh);
    let geo = geometries(mesh)?;
    let c = curl_curl(mesh, material, &maps, &geo);
    let m = mass(mesh, material, &maps, &geo);
    let b = boundary(mesh, material, &maps);
    let (s_r, s_i) = rhs(mesh, material, source, &maps, &geo);
    let g = gradient(mesh, &maps);
    let p_curl = interpolation(mesh, &maps);
    let (l_vec, m_vec, lap_scalar) = aux_laplacians(mesh, material, &maps, &geo);
    Ok(AssembledProblem {
        c,
        m,
        b,
        s_r,
        s_i,
        g,
        p_curl,
        l_vec,
        m_vec,
        lap_scalar,
        has_dirichlet: maps.n_vertices() < mesh.vertices.len(),
        maps,
        k: material.k,
    })
}

fn geometries(mesh: &Mesh) -> Result<Vec<TetGeometry>> {
    (0..mesh.tets.len())
        .map(|t| {
            TetGeometry::new(mesh.tet_points(t))
                .ok_or(Error::DegenerateElement { tet: t, volume: mesh.tet_volume(t) })
        })
        .collect()
}

/// Scatters a symmetric local edge matrix, pushing `(i, j)` and `(j, i)` with
/// the same value so the assembled matrix is bitwise symmetric.
fn scatter_edges(tb: &mut TripletBuilder<f64>, maps: &DofMaps, ids: &[usize; 6], local: &[[f64; 6]; 6]) {
    for e in 0..6 {
        let Some(i) = maps.free_edge[ids[e]] else { continue };
        for f in 0..6 {
            let Some(j) = maps.free_edge[ids[f]] else { continue };
            let v = if e <= f { local[e][f] } else { local[f][e] };
            tb.push(i, j, v);
        }
    }
}

fn curl_curl(mesh: &Mesh, mat: &Material, maps: &DofMaps, geo: &[TetGeometry]) -> CsrMatrix<f64> {
    let n = maps.n_edges();
    let mut tb = TripletBuilder::with_capacity(n, n, 36 * mesh.tets.len());
    for (t, g) in geo.iter().enumerate() {
        let signs = mesh.tet_edge_signs[t];
        let curls: [[f64; 3]; 6] = std::array::from_fn(|e| g.edge_curl(e));
        let w = g.volume / mat.mu_r[t];
        let mut local = [[0.0; 6]; 6];
        for e in 0..6 {
            for f in e..6 {
                local[e][f] = w * signs[e] * signs[f] * dot(curls[e], curls[f]);
            }
        }
        scatter_edges(&mut tb, maps, &mesh.tet_edges[t], &local);
    }
    tb.build()
}

fn mass(mesh: &Mesh, mat: &Material, maps: &DofMaps, geo: &[TetGeometry]) -> CsrMatrix<f64> {
    let n = maps.n_edges();
    let rule = quadrature::tet_degree2();
    let k2 = mat.k * mat.k;
    let mut tb = TripletBuilder::with_capacity(n, n, 36 * mesh.tets.len());
    for (t, g) in geo.iter().enumerate() {
        let signs = mesh.tet_edge_signs[t];
        let coef = k2 * mat.eps_r[t] * g.volume;
        let mut local = [[0.0; 6]; 6];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let phi: [[f64; 3]; 6] = std::array::from_fn(|e| g.edge_value(e, l));
            for e in 0..6 {
                for f in e..6 {
                    local[e][f] += coef * w * signs[e] * signs[f] * dot(phi[e], phi[f]);
                }
            }
        }
        scatter_edges(&mut tb, maps, &mesh.tet_edges[t], &local);
    }
    tb.build()
}

fn face_geometry(mesh: &Mesh, face: &crate::mesh::BoundaryFace) -> (FaceGeometry, [[f64; 3]; 3]) {
    let q = face.vertices.map(|v| mesh.vertices[v]);
    let opposite = mesh.tets[face.tet]
        .iter()
        .find(|v| !face.vertices.contains(v))
        .map(|&v| mesh.vertices[v])
        .expect("tetrahedron has a vertex off its face");
    (FaceGeometry::new(q, opposite), q)
}

fn face_edge_ids(mesh: &Mesh, face: &crate::mesh::BoundaryFace) -> [usize; 3] {
    FACE_EDGES.map(|(a, b)| {
        mesh.edges
            .binary_search(&[face.vertices[a], face.vertices[b]])
            .expect("face edge present in edge list")
    })
}

fn sigma_faces(mesh: &Mesh) -> impl Iterator<Item = &crate::mesh::BoundaryFace> {
    mesh.boundary_faces.iter().filter(|f| f.tag == BoundaryTag::Sigma)
}

fn boundary(mesh: &Mesh, mat: &Material, maps: &DofMaps) -> CsrMatrix<f64> {
    let n = maps.n_edges();
    let rule = quadrature::triangle_degree2();
    let mut tb = TripletBuilder::new(n, n);
    for face in sigma_faces(mesh) {
        let (fg, _) = face_geometry(mesh, face);
        debug_assert!(off_face_traces_vanish(mesh, face, &fg));
        let ids = face_edge_ids(mesh, face);
        let coef = mat.k * mat.lambda_imp * fg.area;
        let mut local = [[0.0; 3]; 3];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let tr: [[f64; 3]; 3] = std::array::from_fn(|e| fg.edge_trace(FACE_EDGES[e].0, FACE_EDGES[e].1, l));
            for e in 0..3 {
                for f in e..3 {
                    local[e][f] += coef * w * dot(tr[e], tr[f]);
                }
            }
        }
        for e in 0..3 {
            let Some(i) = maps.free_edge[ids[e]] else { continue };
            for f in 0..3 {
                let Some(j) = maps.free_edge[ids[f]] else { continue };
                tb.push(i, j, if e <= f { local[e][f] } else { local[f][e] });
            }
        }
    }
    tb.build()
}

/// Edge functions of the owning tetrahedron whose edge leaves the face have
/// zero tangential trace on it.
fn off_face_traces_vanish(mesh: &Mesh, face: &crate::mesh::BoundaryFace, fg: &FaceGeometry) -> bool {
    let tet = mesh.tets[face.tet];
    let Some(g) = TetGeometry::new(mesh.tet_points(face.tet)) else { return false };
    let mut l = [0.0; 4];
    for (i, v) in tet.iter().enumerate() {
        if face.vertices.contains(v) {
            l[i] = 1.0 / 3.0;
        }
    }
    LOCAL_EDGES.iter().enumerate().all(|(e, (a, b))| {
        if face.vertices.contains(&tet[*a]) && face.vertices.contains(&tet[*b]) {
            return true;
        }
        let t = tangential(g.edge_value(e, &l), fg.normal);
        let scale = g.grads.iter().map(|v| dot(*v, *v).sqrt()).fold(0.0, f64::max);
        dot(t, t).sqrt() <= 1e-10 * scale
    })
}

fn rhs(
    mesh: &Mesh,
    mat: &Material,
    src: &SourceSpec,
    maps: &DofMaps,
    geo: &[TetGeometry],
) -> (Vec<f64>, Vec<f64>) {
    let n = maps.n_edges();
    let mut s_r = vec![0.0; n];
    let mut s_i = vec![0.0; n];
    if let Some(f) = &src.volume {
        let rule = quadrature::tet_degree2();
        for (t, g) in geo.iter().enumerate() {
            let pts = mesh.tet_points(t);
            let signs = mesh.tet_edge_signs[t];
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let fx = f(point_at(&pts, l));
                let fr = fx.map(|c| c.re);
                let fi = fx.map(|c| c.im);
                for e in 0..6 {
                    let Some(i) = maps.free_edge[mesh.tet_edges[t][e]] else { continue };
                    let phi = g.edge_value(e, l);
                    let ww = w * g.volume * signs[e];
                    s_r[i] += ww * dot(fr, phi);
                    s_i[i] += ww * dot(fi, phi);
                }
            }
        }
    }
    if let Some(inc) = &src.incident {
        // the incident data oscillates, so this uses a degree-5 rule
        let rule = quadrature::grundmann_moller(2, 2);
        let k = mat.k;
        for face in sigma_faces(mesh) {
            let (fg, q) = face_geometry(mesh, face);
            let ids = face_edge_ids(mesh, face);
            let nu = fg.normal;
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let (e, curl) = inc.eval(k, point_at(&q, l));
                let er = tangential(e.map(|c| c.re), nu);
                let ei = tangential(e.map(|c| c.im), nu);
                let cr = crate::mesh::cross(curl.map(|c| c.re), nu);
                let ci = crate::mesh::cross(curl.map(|c| c.im), nu);
                let gr: [f64; 3] = std::array::from_fn(|c| cr[c] + k * ei[c]);
                let gi: [f64; 3] = std::array::from_fn(|c| ci[c] - k * er[c]);
                for (le, (a, b)) in FACE_EDGES.iter().enumerate() {
                    let Some(i) = maps.free_edge[ids[le]] else { continue };
                    let tr = fg.edge_trace(*a, *b, l);
                    s_r[i] += w * fg.area * dot(gr, tr);
                    s_i[i] += w * fg.area * dot(gi, tr);
                }
            }
        }
    }
    (s_r, s_i)
}

fn gradient(mesh: &Mesh, maps: &DofMaps) -> CsrMatrix<f64> {
    let mut tb = TripletBuilder::with_capacity(maps.n_edges(), maps.n_vertices(), 2 * maps.n_edges());
    for (i, &e) in maps.edges.iter().enumerate() {
        let [a, b] = mesh.edges[e];
        if let Some(va) = maps.free_vertex[a] {
            tb.push(i, va, -1.0);
        }
        if let Some(vb) = maps.free_vertex[b] {
            tb.push(i, vb, 1.0);
        }
    }
    tb.build()
}

/// Columns are component-blocked: component `c` of free vertex `v` is column
/// `c * n_vertices + v`.
fn interpolation(mesh: &Mesh, maps: &DofMaps) -> CsrMatrix<f64> {
    let nv = maps.n_vertices();
    let mut tb = TripletBuilder::with_capacity(maps.n_edges(), 3 * nv, 6 * maps.n_edges());
    for (i, &e) in maps.edges.iter().enumerate() {
        let [a, b] = mesh.edges[e];
        let t = mesh.edge_vector(e);
        for c in 0..3 {
            for v in [a, b] {
                if let Some(fv) = maps.free_vertex[v] {
                    tb.push(i, c * nv + fv, 0.5 * t[c]);
                }
            }
        }
    }
    tb.build()
}

fn aux_laplacians(
    mesh: &Mesh,
    mat: &Material,
    maps: &DofMaps,
    geo: &[TetGeometry],
) -> (CsrMatrix<f64>, CsrMatrix<f64>, CsrMatrix<f64>) {
    let nv = maps.n_vertices();
    let cap = 16 * mesh.tets.len();
    let mut lap = TripletBuilder::with_capacity(nv, nv, cap);
    let mut lvec = TripletBuilder::with_capacity(3 * nv, 3 * nv, 3 * cap);
    let mut mvec = TripletBuilder::with_capacity(3 * nv, 3 * nv, 3 * cap);
    for (t, g) in geo.iter().enumerate() {
        let tet = mesh.tets[t];
        let mut stiff = [[0.0; 4]; 4];
        let mut mass = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in a..4 {
                stiff[a][b] = g.volume * dot(g.grads[a], g.grads[b]);
                stiff[b][a] = stiff[a][b];
                mass[a][b] = g.volume * if a == b { 0.1 } else { 0.05 };
                mass[b][a] = mass[a][b];
            }
        }
        for a in 0..4 {
            let Some(i) = maps.free_vertex[tet[a]] else { continue };
            for b in 0..4 {
                let Some(j) = maps.free_vertex[tet[b]] else { continue };
                lap.push(i, j, mat.eps_r[t] * stiff[a][b]);
                for c in 0..3 {
                    lvec.push(c * nv + i, c * nv + j, stiff[a][b] / mat.mu_r[t]);
                    mvec.push(c * nv + i, c * nv + j, mat.eps_r[t] * mass[a][b]);
                }
            }
        }
    }
    (lvec.build(), mvec.build(), lap.build())
}

/// Edge degrees of freedom of a field: its circulation along each free edge,
/// integrated with three-point Gauss–Legendre.
pub fn edge_interpolant(mesh: &Mesh, maps: &DofMaps, field: impl Fn([f64; 3]) -> CVec3) -> Vec<Complex64> {
    let (nodes, weights) = quadrature::gauss_legendre3_unit();
    maps.edges
        .iter()
        .map(|&e| {
            let [a, b] = mesh.edges[e];
            let xa = mesh.vertices[a];
            let t = sub(mesh.vertices[b], xa);
            nodes
                .iter()
                .zip(weights)
                .map(|(s, w)| {
                    let x = [xa[0] + s * t[0], xa[1] + s * t[1], xa[2] + s * t[2]];
                    let f = field(x);
                    (f[0] * t[0] + f[1] * t[1] + f[2] * t[2]) * w
                })
                .sum()
        })
        .collect()
}

/// `|| curl E - curl E_h ||_{L2}` for edge coefficients `coeffs` on free
/// edges, with a degree-7 volume rule.
pub fn curl_error(
    mesh: &Mesh,
    maps: &DofMaps,
    coeffs: &[Complex64],
    curl_exact: impl Fn([f64; 3]) -> CVec3,
) -> Result<f64> {
    let rule = quadrature::grundmann_moller(3, 3);
    let geo = geometries(mesh)?;
    let mut total = 0.0;
    for (t, g) in geo.iter().enumerate() {
        let mut ch = [Complex64::default(); 3];
        for e in 0..6 {
            if let Some(i) = maps.free_edge[mesh.tet_edges[t][e]] {
                let curl = g.edge_curl(e);
                for c in 0..3 {
                    ch[c] += coeffs[i] * mesh.tet_edge_signs[t][e] * curl[c];
                }
            }
        }
        let pts = mesh.tet_points(t);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let ce = curl_exact(point_at(&pts, l));
            let err: f64 = (0..3).map(|c| (ce[c] - ch[c]).norm_sqr()).sum();
            total += w * g.volume * err;
        }
    }
    Ok(total.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cube_mesh, MeshConfig};

    fn setup(n: usize, scatterer: bool, k: f64) -> (Mesh, AssembledProblem) {
        let mesh = build_cube_mesh(MeshConfig::new(n, 1.0, scatterer)).unwrap();
        let mat = Material::homogeneous(&mesh, k);
        let ap = assemble(&mesh, &mat, &SourceSpec::default_plane_wave()).unwrap();
        (mesh, ap)
    }

    #[test]
    fn matrices_symmetric_exactly() {
        let (_, ap) = setup(4, true, 2.0);
        assert!(ap.c.is_symmetric());
        assert!(ap.m.is_symmetric());
        assert!(ap.b.is_symmetric());
    }

    #[test]
    fn zero_wavenumber_mass_vanishes() {
        let (_, ap) = setup(4, true, 0.0);
        assert_eq!(ap.m.max_abs(), 0.0);
        assert_eq!(ap.b.max_abs(), 0.0);
    }

    #[test]
    fn mass_linear_in_permittivity() {
        let mesh = build_cube_mesh(MeshConfig::new(4, 1.0, true)).unwrap();
        let mut mat = Material::homogeneous(&mesh, 1.5);
        let src = SourceSpec::default();
        let m1 = assemble(&mesh, &mat, &src).unwrap().m;
        mat.eps_r.iter_mut().for_each(|e| *e = 2.0);
        let m2 = assemble(&mesh, &mat, &src).unwrap().m;
        assert_eq!(m2.max_abs_diff(&m1.scaled(2.0)), 0.0);
    }

    #[test]
    fn boundary_linear_in_impedance() {
        let mesh = build_cube_mesh(MeshConfig::new(4, 1.0, false)).unwrap();
        let mut mat = Material::homogeneous(&mesh, 1.5);
        let src = SourceSpec::default();
        let b1 = assemble(&mesh, &mat, &src).unwrap().b;
        mat.lambda_imp = 2.0;
        let b2 = assemble(&mesh, &mat, &src).unwrap().b;
        assert_eq!(b2.max_abs_diff(&b1.scaled(2.0)), 0.0);
    }

    #[test]
    fn boundary_rows_vanish_off_sigma() {
        let (mesh, ap) = setup(4, false, 1.0);
        for (i, &e) in ap.maps.edges.iter().enumerate() {
            let (cols, _) = ap.b.row(i);
            if mesh.edge_tags[e] != EntityTag::Sigma {
                assert!(cols.is_empty());
            }
        }
    }

    #[test]
    fn zero_source_gives_zero_rhs() {
        let mesh = build_cube_mesh(MeshConfig::new(4, 1.0, true)).unwrap();
        let mat = Material::homogeneous(&mesh, 1.0);
        let src = SourceSpec::plane_wave([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let ap = assemble(&mesh, &mat, &src).unwrap();
        assert!(ap.s_r.iter().chain(&ap.s_i).all(|&v| v == 0.0));
    }

    #[test]
    fn real_incident_field_only_feeds_imaginary_part() {
        // a real curl-free incident field leaves only the -k E_RT term
        let mesh = build_cube_mesh(MeshConfig::new(4, 1.0, false)).unwrap();
        let mat = Material::homogeneous(&mesh, 1.0);
        let field: FieldFn = std::sync::Arc::new(|_x| {
            let c = |v: f64| Complex64::new(v, 0.0);
            ([c(0.0), c(0.0), c(1.0)], [c(0.0); 3])
        });
        let src = SourceSpec { incident: Some(IncidentField::Custom(field)), volume: None };
        let ap = assemble(&mesh, &mat, &src).unwrap();
        assert!(ap.s_r.iter().all(|&v| v == 0.0));
        assert!(ap.s_i.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn gradient_rows() {
        let (mesh, ap) = setup(4, false, 1.0);
        let u: Vec<f64> = ap.maps.vertices.iter().map(|&v| mesh.vertices[v][0]).collect();
        let gu = ap.g.mul_vec(&u).unwrap();
        for (i, &e) in ap.maps.edges.iter().enumerate() {
            assert!((gu[i] - mesh.edge_vector(e)[0]).abs() < 1e-14);
            let (cols, vals) = ap.g.row(i);
            let [a, b] = mesh.edges[e];
            assert_eq!(cols, &[a, b]);
            assert_eq!(vals, &[-1.0, 1.0]);
        }
    }

    #[test]
    fn interpolation_of_constant_field() {
        let (mesh, ap) = setup(4, true, 1.0);
        let nv = ap.maps.n_vertices();
        let mut w = vec![0.0; 3 * nv];
        w[..nv].iter_mut().for_each(|v| *v = 1.0);
        let pw = ap.p_curl.mul_vec(&w).unwrap();
        for (i, &e) in ap.maps.edges.iter().enumerate() {
            let [a, b] = mesh.edges[e];
            let both_free = ap.maps.free_vertex[a].is_some() && ap.maps.free_vertex[b].is_some();
            if both_free {
                assert!((pw[i] - mesh.edge_vector(e)[0]).abs() < 1e-15);
            }
        }
        assert!(ap.p_curl.mul_vec(&vec![0.0; 3 * nv]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scalar_laplacian_annihilates_constants() {
        let (_, ap) = setup(4, false, 1.0);
        assert!(!ap.has_dirichlet);
        let one = vec![1.0; ap.maps.n_vertices()];
        let r = ap.lap_scalar.mul_vec(&one).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn invalid_material_rejected() {
        let mesh = build_cube_mesh(MeshConfig::new(4, 1.0, false)).unwrap();
        let mut mat = Material::homogeneous(&mesh, 1.0);
        mat.eps_r[3] = 0.0;
        assert!(assemble(&mesh, &mat, &SourceSpec::default()).is_err());
        let mut mat = Material::homogeneous(&mesh, 1.0);
        mat.k = -1.0;
        assert!(assemble(&mesh, &mat, &SourceSpec::default()).is_err());
    }

    #[test]
    fn interpolant_of_constant_is_circulation() {
        let (mesh, ap) = setup(4, true, 1.0);
        let c = |v: f64| Complex64::new(v, 0.0);
        let dofs = edge_interpolant(&mesh, &ap.maps, |_| [c(1.0), c(-2.0), c(0.5)]);
        for (i, &e) in ap.maps.edges.iter().enumerate() {
            let t = mesh.edge_vector(e);
            assert!((dofs[i].re - (t[0] - 2.0 * t[1] + 0.5 * t[2])).abs() < 1e-15);
        }
    }
}
