//! Solver strategies behind one trait, created by name from a registry.
//!
//! A strategy spec is a name followed by colon-separated parameters, e.g.
//! `spai:0.01:0.05:3`, `ras:4:2`, `hx:precond` or `blr:1e-5`.

use std::collections::BTreeMap;
use std::time::Instant;

use maxlab_sparse::{Complex64, LuFactor};

use crate::error::{Error, Result};
use crate::fem::{assemble, AssembledProblem, Material, SourceSpec};
use crate::krylov::{fgmres, gmres, KrylovConfig, SolveReport};
use crate::mesh::{build_cube_mesh, Mesh, MeshConfig};
use crate::precond::blr::{blr_factor, BlrConfig};
use crate::precond::hx::{build_hx, HxBlockPreconditioner, HxMode};
use crate::precond::ras::{build_ras, RasConfig};
use crate::precond::spai::{build_spai, SpaiConfig};
use crate::systems::{build_complex, build_split, complex_residual, split_to_complex, ComplexSystem, SplitSystem};

/// Mesh, material and source of one scattering problem.
#[derive(Debug, Clone)]
pub struct ProblemConfig {
    pub mesh: MeshConfig,
    pub k: f64,
    pub source: SourceSpec,
}

pub struct Problem {
    pub mesh: Mesh,
    pub assembled: AssembledProblem,
    pub complex: ComplexSystem,
    pub split: SplitSystem,
    pub assembly_time: f64,
}

impl Problem {
    pub fn build(cfg: &ProblemConfig) -> Result<Self> {
        let start = Instant::now();
        let mesh = build_cube_mesh(cfg.mesh)?;
        let material = Material::homogeneous(&mesh, cfg.k);
        let assembled = assemble(&mesh, &material, &cfg.source)?;
        let complex = build_complex(&assembled)?;
        let split = build_split(&assembled)?;
        Ok(Self { mesh, assembled, complex, split, assembly_time: start.elapsed().as_secs_f64() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Complex,
    Split,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    /// Solution of the complex system (split solutions are converted).
    pub solution: Vec<Complex64>,
    pub report: SolveReport,
    /// Size of the system the strategy worked on.
    pub dofs: usize,
    /// Direct solvers report no iterations.
    pub iterative: bool,
    pub extras: Vec<(String, String)>,
}

pub trait SolverStrategy: Send + Sync {
    fn name(&self) -> String;
    fn system(&self) -> SystemKind;
    fn solve(&self, problem: &Problem, krylov: &KrylovConfig) -> Result<Outcome>;
}

type Factory = Box<dyn Fn(&[&str]) -> Result<Box<dyn SolverStrategy>> + Send + Sync>;

pub struct StrategyRegistry {
    factories: BTreeMap<String, Factory>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register("lu", |args| {
            no_args("lu", args)?;
            Ok(Box::new(DirectLu))
        });
        r.register("blr-direct", |args| {
            let epsilon = parse_or(args, 0, "blr-direct", 0.0)?;
            Ok(Box::new(BlrDirect { cfg: BlrConfig::with_epsilon(epsilon) }))
        });
        r.register("gmres", |args| {
            let system = match args.first().copied() {
                None | Some("split") => SystemKind::Split,
                Some("complex") => SystemKind::Complex,
                Some(other) => return Err(Error::Config(format!("gmres: unknown system '{other}'"))),
            };
            Ok(Box::new(PlainGmres { system }))
        });
        r.register("spai", |args| {
            let d = SpaiConfig::default();
            let cfg = SpaiConfig {
                thresh: parse_or(args, 0, "spai", d.thresh)?,
                filter: parse_or(args, 1, "spai", d.filter)?,
                m: parse_or(args, 2, "spai", d.m)?,
            };
            Ok(Box::new(SpaiGmres { cfg }))
        });
        r.register("ras", |args| {
            let cfg = RasConfig {
                n_subdomains: parse_or(args, 0, "ras", 4)?,
                overlap: parse_or(args, 1, "ras", 2)?,
            };
            Ok(Box::new(RasGmres { cfg }))
        });
        r.register("hx", |args| {
            let mode = match args.first().copied() {
                None | Some("precond") => HxMode::Precond,
                Some("solver") => HxMode::Solver,
                Some(other) => return Err(Error::Config(format!("hx: unknown mode '{other}'"))),
            };
            Ok(Box::new(HxFgmres { mode }))
        });
        r.register("blr", |args| {
            let epsilon = parse_or(args, 0, "blr", 1e-5)?;
            let block_size = parse_or(args, 1, "blr", BlrConfig::default().block_size)?;
            Ok(Box::new(BlrFgmres { cfg: BlrConfig { epsilon, block_size, ..BlrConfig::default() } }))
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&[&str]) -> Result<Box<dyn SolverStrategy>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn create(&self, spec: &str) -> Result<Box<dyn SolverStrategy>> {
        let mut parts = spec.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownStrategy(spec.to_string()))?;
        factory(&args)
    }
}

fn no_args(name: &str, args: &[&str]) -> Result<()> {
    if args.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} takes no parameters")))
    }
}

fn parse_or<V: std::str::FromStr>(args: &[&str], i: usize, name: &str, default: V) -> Result<V> {
    match args.get(i) {
        None | Some(&"") => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|_| Error::Config(format!("{name}: cannot parse parameter {} '{s}'", i + 1))),
    }
}

fn direct_report(problem: &Problem, x: &[Complex64], setup: f64, solve: f64, rtol: f64) -> Result<SolveReport> {
    let res = complex_residual(&problem.complex, x)?.value;
    Ok(SolveReport {
        iterations: 0,
        converged: res <= rtol,
        residual_history: vec![res],
        final_true_residual: res,
        setup_time: setup,
        solve_time: solve,
    })
}

struct DirectLu;

impl SolverStrategy for DirectLu {
    fn name(&self) -> String {
        "lu".into()
    }
    fn system(&self) -> SystemKind {
        SystemKind::Complex
    }
    fn solve(&self, problem: &Problem, krylov: &KrylovConfig) -> Result<Outcome> {
        let t = Instant::now();
        let f = LuFactor::factor(&problem.complex.a)?;
        let setup = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let x = f.solve(&problem.complex.b)?;
        let report = direct_report(problem, &x, setup, t.elapsed().as_secs_f64(), krylov.rtol)?;
        Ok(Outcome {
            solution: x,
            report,
            dofs: problem.complex.n(),
            iterative: false,
            extras: vec![("factor_nnz".into(), f.nnz().to_string())],
        })
    }
}

struct BlrDirect {
    cfg: BlrConfig,
}

impl SolverStrategy for BlrDirect {
    fn name(&self) -> String {
        format!("blr-direct:{:e}", self.cfg.epsilon)
    }
    fn system(&self) -> SystemKind {
        SystemKind::Complex
    }
    fn solve(&self, problem: &Problem, krylov: &KrylovConfig) -> Result<Outcome> {
        let f = blr_factor(&problem.complex.a, &self.cfg)?;
        let t = Instant::now();
        let x = f.solve(&problem.complex.b)?;
        let report = direct_report(problem, &x, f.report.setup_time, t.elapsed().as_secs_f64(), krylov.rtol)?;
        Ok(Outcome {
            solution: x,
            report,
            dofs: problem.complex.n(),
            iterative: false,
            extras: vec![("compression".into(), format!("{:.3}", f.compression_ratio()))],
        })
    }
}

struct PlainGmres {
    system: SystemKind,
}

impl SolverStrategy for PlainGmres {
    fn name(&self) -> String {
        match self.system {
            SystemKind::Split => "gmres".into(),
            SystemKind::Complex => "gmres:complex".into(),
        }
    }
    fn system(&self) -> SystemKind {
        self.system
    }
    fn solve(&self, problem: &Problem, krylov: &KrylovConfig) -> Result<Outcome> {
        match self.system {
            SystemKind::Split => {
                let s = &problem.split;
                let (x, report) = gmres(&s.a_hat, &s.rhs, None, krylov)?;
                Ok(split_outcome(x, report, vec![]))
            }
            SystemKind::Complex => {
                let s = &problem.complex;
                let (x, report) = gmres(&s.a, &s.b, None, krylov)?;
                Ok(Outcome { dofs: x.len(), solution: x, report, iterative: true, extras: vec![] })
            }
        }
    }
}

fn split_outcome(x: Vec<f64>, report: SolveReport, extras: Vec<(String, String)>) -> Outcome {
    Outcome { dofs: x.len(), solution: split_to_complex(&x), report, iterative: true, extras }
}

struct SpaiGmres {
    cfg: SpaiConfig,
}

impl SolverStrategy for SpaiGmres {
    fn name(&self) -> String {
        format!("spai:{}:{}:{}", self.cfg.thresh, self.cfg.filter, self.cfg.m)
    }
    fn system(&self) -> SystemKind {
        SystemKind::Split
    }
    fn solve(&self, problem: &Problem, krylov: &KrylovConfig) -> Result<Outcome> {
        let s = &problem.split;
        let p = build_spai(&s.a_hat, &self.cfg)?;
        let (x, mut report) = gmres(&s.a_hat, &s.rhs, Some(&p), krylov)?;
        report.setup_time = p.report.setup_time;
        Ok(split_outcome(x, report, vec![("nnz_H".into(), p.h.nnz().to_string())]))
    }
}

struct RasGmres {
    cfg: RasConfig,
}

impl SolverStrategy for RasGmres {
    fn name(&self) -> String {
        format!("ras:{}:{}", self.cfg.n_subdomains, self.cfg.overlap)
    }
    fn system(&self) -> SystemKind {
        SystemKind::Complex
    }
    fn solve(&self, problem: &Problem, krylov: &KrylovConfig) -> Result<Outcome> {
        let s = &problem.complex;
        let p = build_ras(&s.a, &self.cfg)?;
        let (x, mut report) = gmres(&s.a, &s.b, Some(&p), krylov)?;
        report.setup_time = p.report.setup_time;
        Ok(Outcome { dofs: x.len(), solution: x, report, iterative: true, extras: vec![] })
    }
}

struct HxFgmres {
    mode: HxMode,
}

impl SolverStrategy for HxFgmres {
    fn name(&self) -> String {
        match self.mode {
            HxMode::Precond => "hx:precond".into(),
            HxMode::Solver => "hx:solver".into(),
        }
    }
    fn system(&self) -> SystemKind {
        SystemKind::Split
    }
    fn solve(&self, problem: &Problem, krylov: &KrylovConfig) -> Result<Outcome> {
        let s = &problem.split;
        let hx = build_hx(&problem.assembled)?;
        let setup = hx.report.setup_time;
        let p = HxBlockPreconditioner::new(hx, self.mode);
        let (x, mut report) = fgmres(&s.a_hat, &s.rhs, &p, krylov)?;
        report.setup_time = setup;
        let mut extras = Vec::new();
        if self.mode == HxMode::Precond {
            let (a, b) = p.inner_iterations();
            extras.push(("cg".into(), format!("{a}+{b}")));
        }
        Ok(split_outcome(x, report, extras))
    }
}

struct BlrFgmres {
    cfg: BlrConfig,
}

impl SolverStrategy for BlrFgmres {
    fn name(&self) -> String {
        format!("blr:{:e}", self.cfg.epsilon)
    }
    fn system(&self) -> SystemKind {
        SystemKind::Complex
    }
    fn solve(&self, problem: &Problem, krylov: &KrylovConfig) -> Result<Outcome> {
        let s = &problem.complex;
        let f = blr_factor(&s.a, &self.cfg)?;
        let (x, mut report) = fgmres(&s.a, &s.b, &f, krylov)?;
        report.setup_time = f.report.setup_time;
        Ok(Outcome {
            dofs: x.len(),
            solution: x,
            report,
            iterative: true,
            extras: vec![("compression".into(), format!("{:.3}", f.compression_ratio()))],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        let r = StrategyRegistry::with_defaults();
        assert_eq!(r.create("spai:0.001:0.01").unwrap().name(), "spai:0.001:0.01:3");
        assert_eq!(r.create("ras:8:1").unwrap().name(), "ras:8:1");
        assert_eq!(r.create("hx:solver").unwrap().name(), "hx:solver");
        assert_eq!(r.create("hx").unwrap().name(), "hx:precond");
        assert_eq!(r.create("blr:1e-3").unwrap().name(), "blr:1e-3");
        assert_eq!(r.create("gmres").unwrap().system(), SystemKind::Split);
        assert!(matches!(r.create("amg"), Err(Error::UnknownStrategy(_))));
        assert!(r.create("ras:x").is_err());
        assert!(r.create("lu:1").is_err());
    }

    #[test]
    fn custom_registration() {
        let mut r = StrategyRegistry::empty();
        r.register("direct", |_| Ok(Box::new(DirectLu)));
        assert_eq!(r.names().collect::<Vec<_>>(), vec!["direct"]);
        assert_eq!(r.create("direct").unwrap().name(), "lu");
    }
}
