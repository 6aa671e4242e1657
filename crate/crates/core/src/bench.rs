//! Benchmark cases, the named suites and their table output.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::fem::SourceSpec;
use crate::krylov::KrylovConfig;
use crate::mesh::{points_per_wavelength_to_n, MeshConfig};
use crate::strategy::{Problem, ProblemConfig, StrategyRegistry};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCase {
    pub k: f64,
    pub ppw: f64,
    pub scale: f64,
    /// Explicit subdivision count; derived from `ppw` when absent.
    pub n: Option<usize>,
    pub scatterer: bool,
    pub solver: String,
    pub krylov: KrylovConfig,
    /// When false, failing to converge does not count as a failure.
    pub expect_convergence: bool,
    /// Row and column labels in the suite's table.
    pub row: String,
    pub column: String,
}

impl BenchCase {
    pub fn new(k: f64, ppw: f64, scale: f64, solver: &str) -> Self {
        Self {
            k,
            ppw,
            scale,
            n: None,
            scatterer: true,
            solver: solver.to_string(),
            krylov: KrylovConfig::default(),
            expect_convergence: true,
            row: String::new(),
            column: solver.to_string(),
        }
    }

    /// Case on an explicit mesh; `ppw` is filled in from the spacing.
    pub fn with_n(k: f64, n: usize, scale: f64, solver: &str) -> Self {
        let ppw = 2.0 * PI / k / (scale / n as f64);
        Self { n: Some(n), ..Self::new(k, ppw, scale, solver) }
    }

    /// Panics on non-positive `k`, `ppw` or `scale` when `n` is absent; see
    /// [`BenchCase::validate`].
    pub fn resolved_n(&self) -> usize {
        self.n.unwrap_or_else(|| points_per_wavelength_to_n(self.k, self.ppw, self.scale))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.scale) || !(self.k >= 0.0) || (self.n.is_none() && !(positive(self.k) && positive(self.ppw))) {
            return Err(Error::Config(format!(
                "case needs scale > 0 and either n or k, ppw > 0 (k={}, ppw={}, scale={})",
                self.k, self.ppw, self.scale
            )));
        }
        self.krylov.validate()
    }

    fn at(mut self, row: impl Into<String>, column: impl Into<String>) -> Self {
        self.row = row.into();
        self.column = column.into();
        self
    }

    fn may_fail(mut self) -> Self {
        self.expect_convergence = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub case: BenchCase,
    pub n: usize,
    pub dofs: usize,
    /// `None` for direct solvers.
    pub iterations: Option<usize>,
    pub converged: bool,
    pub setup_time: f64,
    pub solve_time: f64,
    pub true_residual: f64,
    pub extras: Vec<(String, String)>,
    pub error: Option<String>,
}

impl BenchResult {
    /// Converged, or allowed not to.
    pub fn ok(&self) -> bool {
        self.error.is_none() && (self.converged || !self.case.expect_convergence)
    }

    pub fn maxed(&self) -> bool {
        self.error.is_none() && self.iterations.is_some() && !self.converged
    }

    /// Iteration count, `>max*` when the limit was hit, `direct` for direct
    /// solves.
    pub fn iteration_cell(&self) -> String {
        if self.error.is_some() {
            return "failed".into();
        }
        match self.iterations {
            None if self.converged => "direct".into(),
            None => "direct*".into(),
            Some(it) if self.converged => it.to_string(),
            Some(_) => format!(">{}*", self.case.krylov.max_iter),
        }
    }

    /// Final residual in parentheses for non-converged runs.
    pub fn residual_note(&self) -> String {
        if self.error.is_none() && !self.converged {
            format!("({:.1e})", self.true_residual)
        } else {
            String::new()
        }
    }
}

pub fn run_case(case: &BenchCase) -> BenchResult {
    run_case_with(&StrategyRegistry::with_defaults(), case)
}

/// Runs one case; setup and solve failures are recorded in the result.
pub fn run_case_with(registry: &StrategyRegistry, case: &BenchCase) -> BenchResult {
    let n = if case.validate().is_ok() { case.resolved_n() } else { case.n.unwrap_or(0) };
    let mut result = BenchResult {
        case: case.clone(),
        n,
        dofs: 0,
        iterations: None,
        converged: false,
        setup_time: 0.0,
        solve_time: 0.0,
        true_residual: f64::NAN,
        extras: Vec::new(),
        error: None,
    };
    let outcome = (|| {
        case.validate()?;
        let strategy = registry.create(&case.solver)?;
        let problem = Problem::build(&ProblemConfig {
            mesh: MeshConfig::new(n, case.scale, case.scatterer),
            k: case.k,
            source: SourceSpec::default_plane_wave(),
        })?;
        strategy.solve(&problem, &case.krylov)
    })();
    match outcome {
        Ok(o) => {
            result.dofs = o.dofs;
            result.iterations = o.iterative.then_some(o.report.iterations);
            result.converged = o.report.converged;
            result.setup_time = o.report.setup_time;
            result.solve_time = o.report.solve_time;
            result.true_residual = o.report.final_true_residual;
            result.extras = o.extras;
        }
        Err(e) => result.error = Some(e.to_string()),
    }
    result
}

/// Runs cases on up to `threads` worker threads; results keep the order of
/// `cases`.
pub fn run_cases(registry: &StrategyRegistry, cases: &[BenchCase], threads: usize) -> Vec<BenchResult> {
    let threads = threads.clamp(1, cases.len().max(1));
    if threads == 1 {
        return cases.iter().map(|c| run_case_with(registry, c)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<BenchResult>>> = Mutex::new(vec![None; cases.len()]);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(case) = cases.get(i) else { break };
                let r = run_case_with(registry, case);
                slots.lock().expect("result slots")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots")
        .into_iter()
        .map(|r| r.expect("every case ran"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(Error::Config(format!("unknown table format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// One line per case.
    List,
    /// Cases arranged by their row and column labels.
    Grid,
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub name: String,
    pub cases: Vec<BenchCase>,
    pub layout: Layout,
}

pub const SUITE_NAMES: [&str; 6] = ["spai-table", "ras-table", "hx-k1", "hx-k2pi", "blr-table", "hx-vs-blr"];

pub fn suite(name: &str) -> Result<Suite> {
    let two_pi = 2.0 * PI;
    let (cases, layout) = match name {
        "spai-table" => {
            let mut cases = Vec::new();
            for thresh in [0.001, 0.01] {
                for filter in [0.01, 0.05] {
                    let spec = format!("spai:{thresh}:{filter}:3");
                    cases.push(
                        BenchCase::with_n(two_pi, 8, 1.0, &spec)
                            .at(format!("thresh={thresh}"), format!("filter={filter}")),
                    );
                }
            }
            (cases, Layout::Grid)
        }
        "ras-table" => {
            let mut cases = Vec::new();
            for delta in [1, 2, 3] {
                for parts in [2, 4, 8] {
                    cases.push(
                        BenchCase::with_n(two_pi, 8, 1.0, &format!("ras:{parts}:{delta}"))
                            .at(format!("delta={delta}"), format!("N={parts}")),
                    );
                }
            }
            (cases, Layout::Grid)
        }
        "hx-k1" => (mesh_sweep(1.0, &[25.0, 50.0, 75.0]), Layout::Grid),
        "hx-k2pi" => (mesh_sweep(two_pi, &[8.0, 12.0, 16.0]), Layout::Grid),
        "blr-table" => {
            let mut cases: Vec<BenchCase> = [5e-3, 1e-3, 1e-5, 1e-9]
                .iter()
                .map(|eps| BenchCase::with_n(two_pi, 12, 1.0, &format!("blr:{eps:e}")).at(format!("eps={eps:e}"), "blr"))
                .collect();
            cases.push(BenchCase::with_n(two_pi, 12, 1.0, "blr:0").at("FR", "blr"));
            (cases, Layout::List)
        }
        "hx-vs-blr" => {
            let mut cases = Vec::new();
            for scale in [1.0, 4.0] {
                for solver in ["hx:precond", "blr:1e-5", "blr:1e-3"] {
                    cases.push(BenchCase::new(1.0, 10.0, scale, solver).at(format!("scale={scale}"), solver));
                }
            }
            (cases, Layout::Grid)
        }
        other => {
            return Err(Error::Config(format!(
                "unknown suite '{other}', expected one of {}",
                SUITE_NAMES.join(", ")
            )))
        }
    };
    Ok(Suite { name: name.to_string(), cases, layout })
}

/// Mesh refinements at fixed `k`, each with direct, unpreconditioned and
/// both HX variants. Direct LU is skipped above 12 subdivisions.
fn mesh_sweep(k: f64, ppws: &[f64]) -> Vec<BenchCase> {
    let mut cases = Vec::new();
    for &ppw in ppws {
        let n = points_per_wavelength_to_n(k, ppw, 1.0);
        let row = format!("n={n}");
        if n <= 12 {
            cases.push(BenchCase::new(k, ppw, 1.0, "lu").at(row.clone(), "direct"));
        }
        cases.push(BenchCase::new(k, ppw, 1.0, "gmres").at(row.clone(), "none").may_fail());
        cases.push(BenchCase::new(k, ppw, 1.0, "hx:precond").at(row.clone(), "hx:precond"));
        cases.push(BenchCase::new(k, ppw, 1.0, "hx:solver").at(row, "hx:solver"));
    }
    cases
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub suite: Suite,
    pub results: Vec<BenchResult>,
}

impl SuiteResult {
    pub fn all_ok(&self) -> bool {
        self.results.iter().all(BenchResult::ok)
    }
}

pub fn run_suite(name: &str, threads: usize) -> Result<SuiteResult> {
    run_suite_with(&StrategyRegistry::with_defaults(), suite(name)?, threads)
}

pub fn run_suite_with(registry: &StrategyRegistry, suite: Suite, threads: usize) -> Result<SuiteResult> {
    let results = run_cases(registry, &suite.cases, threads);
    Ok(SuiteResult { suite, results })
}

const BASE_COLUMNS: [&str; 13] = [
    "row", "column", "k", "ppw", "scale", "n", "dofs", "solver", "iterations", "converged", "setup_time", "solve_time",
    "true_residual",
];

/// One line per result with a fixed column order; solver-specific extras
/// follow in order of first appearance and are omitted when none exist.
pub fn emit_table(results: &[BenchResult], format: TableFormat) -> String {
    let mut extra_keys: Vec<String> = Vec::new();
    for r in results {
        for (k, _) in &r.extras {
            if !extra_keys.contains(k) {
                extra_keys.push(k.clone());
            }
        }
    }
    let mut header: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(extra_keys.iter().cloned());
    header.push("error".into());
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut iters = r.iteration_cell();
            if format == TableFormat::Markdown && r.maxed() {
                iters = format!("{iters} {}", r.residual_note());
            }
            let mut row = vec![
                r.case.row.clone(),
                r.case.column.clone(),
                format!("{}", r.case.k),
                format!("{:.2}", r.case.ppw),
                format!("{}", r.case.scale),
                r.n.to_string(),
                r.dofs.to_string(),
                r.case.solver.clone(),
                iters,
                r.converged.to_string(),
                format!("{:.3}", r.setup_time),
                format!("{:.3}", r.solve_time),
                format!("{:.3e}", r.true_residual),
            ];
            for k in &extra_keys {
                row.push(r.extras.iter().find(|(x, _)| x == k).map(|(_, v)| v.clone()).unwrap_or_default());
            }
            row.push(r.error.clone().unwrap_or_default());
            row
        })
        .collect();
    render(&header, &rows, format)
}

/// Iteration cells arranged by the cases' row and column labels.
pub fn emit_grid(result: &SuiteResult, format: TableFormat) -> String {
    let mut rows: Vec<&str> = Vec::new();
    let mut cols: Vec<&str> = Vec::new();
    for c in &result.suite.cases {
        if !rows.contains(&c.row.as_str()) {
            rows.push(&c.row);
        }
        if !cols.contains(&c.column.as_str()) {
            cols.push(&c.column);
        }
    }
    let mut header = vec![String::new()];
    header.extend(cols.iter().map(|c| c.to_string()));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut line = vec![row.to_string()];
            for col in &cols {
                let cell = result
                    .results
                    .iter()
                    .find(|r| r.case.row == *row && r.case.column == *col)
                    .map(grid_cell)
                    .unwrap_or_default();
                line.push(cell);
            }
            line
        })
        .collect();
    render(&header, &body, format)
}

fn grid_cell(r: &BenchResult) -> String {
    let mut cell = r.iteration_cell();
    if r.maxed() {
        cell = format!("{cell} {}", r.residual_note());
    }
    if !r.extras.is_empty() {
        let extras: Vec<String> = r.extras.iter().map(|(k, v)| format!("{k}={v}")).collect();
        cell = format!("{cell} [{}]", extras.join(" "));
    }
    cell
}

fn render(header: &[String], rows: &[Vec<String>], format: TableFormat) -> String {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("writing to memory");
            for r in rows {
                w.write_record(r).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 output")
        }
        TableFormat::Markdown => {
            let mut out = format!("| {} |\n", header.join(" | "));
            out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
            for r in rows {
                out.push_str(&format!("| {} |\n", r.join(" | ")));
            }
            out
        }
    }
}
