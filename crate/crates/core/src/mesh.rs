//! Structured Kuhn tetrahedral mesh of the cube `[-s/2, s/2]^3` with an
//! optional L-shaped scatterer cut out of the middle.
//!
//! The scatterer occupies `[-s/4, s/4]^3` minus the quarter block
//! `[-s/4, s/4] x [-s/4, 0] x [-s/4, 0]`. Its faces lie on mesh planes whenever
//! the subdivision count is a multiple of four, so removing every cell whose
//! centroid falls inside it yields a conforming boundary.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};

/// Local vertex pairs of the six tetrahedron edges.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Local vertex triples of the four tetrahedron faces; face `i` is opposite
/// vertex `i`.
pub const LOCAL_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshConfig {
    /// Subdivisions per axis; must be a positive multiple of 4.
    pub n: usize,
    pub scale: f64,
    pub scatterer: bool,
}

impl MeshConfig {
    pub fn new(n: usize, scale: f64, scatterer: bool) -> Self {
        Self { n, scale, scatterer }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 4 != 0 {
            return Err(Error::Config(format!(
                "mesh subdivisions must be a positive multiple of 4, got {}",
                self.n
            )));
        }
        if !(self.scale > 0.0) {
            return Err(Error::Config(format!("mesh scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.scale / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Perfectly conducting scatterer surface.
    Gamma,
    /// Exterior impedance surface.
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntityTag {
    Interior,
    Gamma,
    Sigma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace {
    /// Vertex ids in increasing order.
    pub vertices: [usize; 3],
    /// The single tetrahedron owning this face.
    pub tet: usize,
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub config: MeshConfig,
    pub vertices: Vec<[f64; 3]>,
    /// Lattice coordinates `(i, j, k)` of each vertex.
    pub lattice: Vec<[usize; 3]>,
    pub tets: Vec<[usize; 4]>,
    /// Global edges, oriented from the lower to the higher vertex id.
    pub edges: Vec<[usize; 2]>,
    /// Per tetrahedron, the global edge id of each local edge in
    /// [`LOCAL_EDGES`] order.
    pub tet_edges: Vec<[usize; 6]>,
    /// `+1` when the local edge runs in the global direction, `-1` otherwise.
    pub tet_edge_signs: Vec<[f64; 6]>,
    pub boundary_faces: Vec<BoundaryFace>,
    pub edge_tags: Vec<EntityTag>,
    pub vertex_tags: Vec<EntityTag>,
    /// Volume of the cells removed for the scatterer.
    pub removed_volume: f64,
}

/// Unit-cube coordinate of lattice index `i` out of `n`.
fn unit_coord(i: usize, n: usize) -> f64 {
    -0.5 + i as f64 / n as f64
}

fn in_scatterer(c: [f64; 3]) -> bool {
    let inside_cube = c.iter().all(|v| v.abs() < 0.25);
    let in_notch = c[1] < 0.0 && c[2] < 0.0;
    inside_cube && !in_notch
}

pub fn signed_volume(p: [[f64; 3]; 4]) -> f64 {
    let a = sub(p[1], p[0]);
    let b = sub(p[2], p[0]);
    let c = sub(p[3], p[0]);
    dot(a, cross(b, c)) / 6.0
}

#[inline]
pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
#[inline]
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
#[inline]
pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Kuhn subdivision of the cube: six tetrahedra sharing the main diagonal,
/// one per permutation of the axes.
const AXIS_PERMUTATIONS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub fn build_cube_mesh(cfg: MeshConfig) -> Result<Mesh> {
    cfg.validate()?;
    let n = cfg.n;
    let np = n + 1;
    let lattice_id = |i: usize, j: usize, k: usize| i + np * (j + np * k);

    let mut lattice_tets = Vec::with_capacity(6 * n * n * n);
    let mut removed_cells = 0usize;
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                if cfg.scatterer {
                    let c = [
                        unit_coord(i, n) + 0.5 / n as f64,
                        unit_coord(j, n) + 0.5 / n as f64,
                        unit_coord(k, n) + 0.5 / n as f64,
                    ];
                    if in_scatterer(c) {
                        removed_cells += 1;
                        continue;
                    }
                }
                for perm in AXIS_PERMUTATIONS {
                    let mut corner = [i, j, k];
                    let mut t = [0usize; 4];
                    t[0] = lattice_id(corner[0], corner[1], corner[2]);
                    for (step, &axis) in perm.iter().enumerate() {
                        corner[axis] += 1;
                        t[step + 1] = lattice_id(corner[0], corner[1], corner[2]);
                    }
                    lattice_tets.push(t);
                }
            }
        }
    }

    // keep only referenced lattice points, preserving (z, y, x) order
    let mut new_id = vec![usize::MAX; np * np * np];
    for t in &lattice_tets {
        for &v in t {
            new_id[v] = 0;
        }
    }
    let mut vertices = Vec::new();
    let mut lattice = Vec::new();
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                let l = lattice_id(i, j, k);
                if new_id[l] == 0 {
                    new_id[l] = vertices.len();
                    let s = cfg.scale;
                    vertices.push([s * unit_coord(i, n), s * unit_coord(j, n), s * unit_coord(k, n)]);
                    lattice.push([i, j, k]);
                }
            }
        }
    }

    let mut tets: Vec<[usize; 4]> = lattice_tets
        .iter()
        .map(|t| [new_id[t[0]], new_id[t[1]], new_id[t[2]], new_id[t[3]]])
        .collect();
    for (idx, t) in tets.iter_mut().enumerate() {
        let vol = signed_volume([vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]]);
        if vol < 0.0 {
            t.swap(2, 3);
        } else if vol == 0.0 {
            return Err(Error::DegenerateElement { tet: idx, volume: vol });
        }
    }

    // edges
    let mut edges: Vec<[usize; 2]> = Vec::with_capacity(tets.len() * 2);
    for t in &tets {
        for (a, b) in LOCAL_EDGES {
            let (u, v) = (t[a].min(t[b]), t[a].max(t[b]));
            edges.push([u, v]);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let edge_id = |u: usize, v: usize| -> usize {
        edges.binary_search(&[u.min(v), u.max(v)]).expect("edge registered")
    };
    let mut tet_edges = Vec::with_capacity(tets.len());
    let mut tet_edge_signs = Vec::with_capacity(tets.len());
    for t in &tets {
        let mut ids = [0usize; 6];
        let mut signs = [0f64; 6];
        for (e, (a, b)) in LOCAL_EDGES.iter().enumerate() {
            ids[e] = edge_id(t[*a], t[*b]);
            signs[e] = if t[*a] < t[*b] { 1.0 } else { -1.0 };
        }
        tet_edges.push(ids);
        tet_edge_signs.push(signs);
    }

    // boundary faces: faces owned by exactly one tetrahedron
    let mut face_owner: HashMap<[usize; 3], (usize, usize)> = HashMap::with_capacity(tets.len() * 2);
    for (ti, t) in tets.iter().enumerate() {
        for f in LOCAL_FACES {
            let mut key = [t[f[0]], t[f[1]], t[f[2]]];
            key.sort_unstable();
            face_owner.entry(key).and_modify(|e| e.0 += 1).or_insert((1, ti));
        }
    }
    let mut boundary_faces: Vec<BoundaryFace> = face_owner
        .into_iter()
        .filter(|(_, (count, _))| *count == 1)
        .map(|(key, (_, tet))| {
            let on_hull = (0..3).any(|axis| {
                let c = lattice[key[0]][axis];
                (c == 0 || c == n) && key.iter().all(|&v| lattice[v][axis] == c)
            });
            let tag = if on_hull { BoundaryTag::Sigma } else { BoundaryTag::Gamma };
            BoundaryFace { vertices: key, tet, tag }
        })
        .collect();
    boundary_faces.sort_unstable_by_key(|f| f.vertices);

    let mut vertex_tags = vec![EntityTag::Interior; vertices.len()];
    let mut edge_tags = vec![EntityTag::Interior; edges.len()];
    for f in &boundary_faces {
        let tag = match f.tag {
            BoundaryTag::Gamma => EntityTag::Gamma,
            BoundaryTag::Sigma => EntityTag::Sigma,
        };
        for &v in &f.vertices {
            vertex_tags[v] = tag;
        }
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            edge_tags[edge_id(f.vertices[a], f.vertices[b])] = tag;
        }
    }

    let h = cfg.h();
    Ok(Mesh {
        config: cfg,
        vertices,
        lattice,
        tets,
        edges,
        tet_edges,
        tet_edge_signs,
        boundary_faces,
        edge_tags,
        vertex_tags,
        removed_volume: removed_cells as f64 * h * h * h,
    })
}

impl Mesh {
    pub fn tet_points(&self, t: usize) -> [[f64; 3]; 4] {
        let v = self.tets[t];
        [self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]], self.vertices[v[3]]]
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        signed_volume(self.tet_points(t))
    }

    pub fn edge_vector(&self, e: usize) -> [f64; 3] {
        let [a, b] = self.edges[e];
        sub(self.vertices[b], self.vertices[a])
    }

    pub fn has_gamma(&self) -> bool {
        self.boundary_faces.iter().any(|f| f.tag == BoundaryTag::Gamma)
    }

    /// Plain-text dump: a counts line, then vertices, tetrahedra and tagged
    /// boundary faces, one per line.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "{} {} {}",
            self.vertices.len(),
            self.tets.len(),
            self.boundary_faces.len()
        )?;
        for v in &self.vertices {
            writeln!(out, "{:?} {:?} {:?}", v[0], v[1], v[2])?;
        }
        for t in &self.tets {
            writeln!(out, "{} {} {} {}", t[0], t[1], t[2], t[3])?;
        }
        for f in &self.boundary_faces {
            let tag = match f.tag {
                BoundaryTag::Gamma => "gamma",
                BoundaryTag::Sigma => "sigma",
            };
            writeln!(out, "{} {} {} {}", f.vertices[0], f.vertices[1], f.vertices[2], tag)?;
        }
        Ok(())
    }
}

/// Smallest multiple of 4 whose spacing `scale / n` resolves the wavelength
/// `2 pi / k` with at least `ppw` points.
pub fn points_per_wavelength_to_n(k: f64, ppw: f64, scale: f64) -> usize {
    assert!(k > 0.0 && ppw > 0.0 && scale > 0.0);
    let h_max = 2.0 * PI / k / ppw;
    let mut n = 4;
    // relative slack absorbs rounding in h_max (e.g. 1/12 vs 2pi/(2pi*12))
    while scale / n as f64 > h_max * (1.0 + 1e-12) {
        n += 4;
    }
    n
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshStats {
    pub vertices: usize,
    pub edges: usize,
    pub tets: usize,
    pub gamma_faces: usize,
    pub sigma_faces: usize,
    pub gamma_edges: usize,
    pub sigma_edges: usize,
    pub gamma_vertices: usize,
    pub sigma_vertices: usize,
    pub min_volume: f64,
    pub max_volume: f64,
    pub total_volume: f64,
}

pub fn mesh_stats(m: &Mesh) -> MeshStats {
    let vols: Vec<f64> = (0..m.tets.len()).map(|t| m.tet_volume(t)).collect();
    let count = |tags: &[EntityTag], t: EntityTag| tags.iter().filter(|&&x| x == t).count();
    MeshStats {
        vertices: m.vertices.len(),
        edges: m.edges.len(),
        tets: m.tets.len(),
        gamma_faces: m.boundary_faces.iter().filter(|f| f.tag == BoundaryTag::Gamma).count(),
        sigma_faces: m.boundary_faces.iter().filter(|f| f.tag == BoundaryTag::Sigma).count(),
        gamma_edges: count(&m.edge_tags, EntityTag::Gamma),
        sigma_edges: count(&m.edge_tags, EntityTag::Sigma),
        gamma_vertices: count(&m.vertex_tags, EntityTag::Gamma),
        sigma_vertices: count(&m.vertex_tags, EntityTag::Sigma),
        min_volume: vols.iter().copied().fold(f64::INFINITY, f64::min),
        max_volume: vols.iter().copied().fold(0.0, f64::max),
        total_volume: vols.iter().sum(),
    }
}
