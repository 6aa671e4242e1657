//! End-to-end acceptance checks. Runs sequentially and prints one line per
//! criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use maxlab_core::bench::{run_case, run_suite, BenchCase, BenchResult};
use maxlab_core::fem::{curl_error, edge_interpolant, CVec3, IncidentField, SourceSpec};
use maxlab_core::krylov::{fgmres, gmres, KrylovConfig};
use maxlab_core::mesh::MeshConfig;
use maxlab_core::precond::blr::{blr_factor, BlrConfig};
use maxlab_core::precond::ras::{build_ras, RasConfig};
use maxlab_core::precond::spai::{build_spai, SpaiConfig};
use maxlab_core::sparse::{CsrMatrix, LuFactor};
use maxlab_core::strategy::{Problem, ProblemConfig, StrategyRegistry};
use maxlab_core::systems::split_to_complex;
use maxlab_core::Complex64;

const TWO_PI: f64 = 2.0 * PI;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn problem(n: usize, k: f64, scatterer: bool, source: SourceSpec) -> Problem {
    Problem::build(&ProblemConfig { mesh: MeshConfig::new(n, 1.0, scatterer), k, source }).expect("problem assembles")
}

fn default_problem(n: usize, k: f64) -> Problem {
    problem(n, k, true, SourceSpec::default_plane_wave())
}

fn iters(r: &BenchResult) -> usize {
    r.iterations.unwrap_or(0)
}

fn discrete_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [4, 8, 12] {
        let ap = default_problem(n, TWO_PI).assembled;
        let cg = ap.c.matmul(&ap.g).unwrap();
        worst = worst.max(cg.max_abs() / ap.c.max_abs());
        let gmg = ap.g.transpose().matmul(&ap.m).unwrap().matmul(&ap.g).unwrap();
        let diff = gmg.add(&ap.lap_scalar, 1.0, -TWO_PI * TWO_PI).unwrap();
        worst = worst.max(diff.max_abs() / gmg.max_abs());
    }
    check(worst <= 1e-12, format!("max relative defect {worst:.1e}"))
}

fn split_complex_equivalence() -> Outcome {
    let p = default_problem(8, TWO_PI);
    let xs = LuFactor::factor(&p.split.a_hat).unwrap().solve(&p.split.rhs).unwrap();
    let xc = LuFactor::factor(&p.complex.a).unwrap().solve(&p.complex.b).unwrap();
    let e = split_to_complex(&xs);
    let diff: f64 = e.iter().zip(&xc).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let norm: f64 = xc.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let rel = diff / norm;
    check(rel <= 1e-6, format!("relative difference {rel:.1e}"))
}

fn exactness_degenerations() -> Outcome {
    let p = default_problem(4, TWO_PI);
    let cfg = KrylovConfig::default();
    let ras = build_ras(&p.complex.a, &RasConfig { n_subdomains: 1, overlap: 2 }).unwrap();
    let (_, r1) = gmres(&p.complex.a, &p.complex.b, Some(&ras), &cfg).unwrap();
    let blr = blr_factor(&p.complex.a, &BlrConfig::with_epsilon(0.0)).unwrap();
    let (_, r2) = fgmres(&p.complex.a, &p.complex.b, &blr, &cfg).unwrap();
    let d: Vec<f64> = (0..50).map(|i| 1.0 + i as f64 * 0.37).collect();
    let diag = CsrMatrix::from_diagonal(&d);
    let spai = build_spai(&diag, &SpaiConfig::default()).unwrap();
    let b: Vec<f64> = (0..50).map(|i| (i as f64).sin() + 2.0).collect();
    let (_, r3) = gmres(&diag, &b, Some(&spai), &cfg).unwrap();
    let pass = r1.converged && r1.iterations <= 2 && r2.converged && r2.iterations == 1 && r3.converged && r3.iterations == 1;
    check(pass, format!("RAS N=1: {} it, BLR eps=0: {} it, SPAI diagonal: {} it", r1.iterations, r2.iterations, r3.iterations))
}

fn blr_tradeoff(results: &[BenchResult]) -> Outcome {
    let its: Vec<usize> = results.iter().map(iters).collect();
    let ratio: Vec<f64> = results
        .iter()
        .map(|r| r.extras.iter().find(|(k, _)| k == "compression").map_or(f64::NAN, |(_, v)| v.parse().unwrap()))
        .collect();
    let pass = results.iter().all(|r| r.converged)
        && its.windows(2).all(|w| w[0] <= w[1])
        && ratio.windows(2).all(|w| w[0] <= w[1])
        && its[0] <= 5;
    check(pass, format!("eps 1e-9..5e-3: iterations {its:?}, compression {ratio:?}"))
}

fn hx_mesh_robustness(pre: &[BenchResult]) -> Outcome {
    let mut its: Vec<usize> = pre.iter().map(iters).collect();
    let shown = its.clone();
    its.sort_unstable();
    let median = its[its.len() / 2] as f64;
    let within = its.iter().all(|&i| (i as f64 - median).abs() <= 0.25 * median);
    let conv = pre.iter().all(|r| r.converged && r.true_residual <= 1e-8);
    check(within && conv, format!("n=8,12,16 outer iterations {shown:?}, median {median}"))
}

fn hx_mode_ordering(pre: &[BenchResult], sol: &[BenchResult]) -> Outcome {
    let a: Vec<usize> = pre.iter().map(iters).collect();
    let b: Vec<usize> = sol.iter().map(iters).collect();
    let pass = pre.iter().chain(sol).all(|r| r.error.is_none()) && a.iter().zip(&b).all(|(p, s)| s >= p);
    check(pass, format!("precond {a:?} vs solver {b:?}"))
}

fn hx_k_degradation(k2: &BenchResult, k4: &BenchResult) -> Outcome {
    let pass = k2.converged && k4.converged && iters(k4) > iters(k2);
    check(pass, format!("ppw=10: k=2pi (n={}) {} it, k=4pi (n={}) {} it", k2.n, iters(k2), k4.n, iters(k4)))
}

/// Weak monotonicity with at most one inversion of at most 10%.
fn weakly_monotone(v: &[usize], increasing: bool) -> bool {
    let mut inversions = 0;
    for w in v.windows(2) {
        let (a, b) = if increasing { (w[0], w[1]) } else { (w[1], w[0]) };
        if b < a {
            inversions += 1;
            if (a - b) as f64 > 0.1 * a as f64 {
                return false;
            }
        }
    }
    inversions <= 1
}

fn ras_trends(table: &[BenchResult]) -> Outcome {
    let find = |parts: usize, delta: usize| {
        let spec = format!("ras:{parts}:{delta}");
        table.iter().find(|r| r.case.solver == spec).map(iters).unwrap_or(usize::MAX)
    };
    let by_n: Vec<usize> = [2, 4, 8].iter().map(|&p| find(p, 2)).collect();
    let by_delta: Vec<usize> = [1, 2, 3].iter().map(|&d| find(4, d)).collect();
    let conv = table.iter().all(|r| r.converged);
    let pass = conv && weakly_monotone(&by_n, true) && weakly_monotone(&by_delta, false);
    check(pass, format!("delta=2 over N=2,4,8: {by_n:?}; N=4 over delta=1,2,3: {by_delta:?}"))
}

fn spai_trend(tight: &BenchResult, loose: &BenchResult) -> Outcome {
    let pass = tight.converged && (!loose.converged || iters(loose) >= iters(tight));
    check(
        pass,
        format!("(0.001, 0.01): {}; (0.01, 0.05): {}", tight.iteration_cell(), loose.iteration_cell()),
    )
}

fn unpreconditioned_failure(plain: &BenchResult, preconditioned: &[&BenchResult]) -> Outcome {
    let failing: Vec<String> = preconditioned
        .iter()
        .filter(|r| r.case.expect_convergence && !r.converged)
        .map(|r| format!("{} n={}", r.case.solver, r.n))
        .collect();
    let pass = plain.error.is_none() && !plain.converged && failing.is_empty();
    check(
        pass,
        format!(
            "plain GMRES n={}: {} {}; unconverged preconditioned runs: {failing:?}",
            plain.n,
            plain.iteration_cell(),
            plain.residual_note()
        ),
    )
}

type RealField = fn([f64; 3]) -> [f64; 3];

/// Real incident field with its curl, plus a volume source.
fn field_source(e: RealField, curl: RealField, f: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static) -> SourceSpec {
    SourceSpec {
        incident: Some(IncidentField::Custom(Arc::new(move |x| (c(e(x)), c(curl(x)))))),
        volume: Some(Arc::new(move |x| c(f(x)))),
    }
}

fn c(v: [f64; 3]) -> CVec3 {
    v.map(|x| Complex64::new(x, 0.0))
}

fn patch_and_refinement() -> Outcome {
    // constant field: zero curl, so only the mass term carries the source
    let k = 1.0;
    let ec = [0.3, -1.2, 0.7];
    let incident = IncidentField::Custom(Arc::new(move |_| (c(ec), [Complex64::default(); 3])));
    let src = SourceSpec { incident: Some(incident), volume: Some(Arc::new(move |_| c(ec.map(|v| -k * k * v)))) };
    let p = problem(4, k, false, src);
    let x = LuFactor::factor(&p.complex.a).unwrap().solve(&p.complex.b).unwrap();
    let exact = edge_interpolant(&p.mesh, &p.assembled.maps, |_| ec.map(|v| Complex64::new(v, 0.0)));
    let diff: f64 = x.iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let norm: f64 = exact.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let patch = diff / norm;

    // E = (sin pi y, sin pi z, sin pi x), curl curl E = pi^2 E
    let e: RealField = |x| [(PI * x[1]).sin(), (PI * x[2]).sin(), (PI * x[0]).sin()];
    let curl: RealField = |x| [-PI * (PI * x[2]).cos(), -PI * (PI * x[0]).cos(), -PI * (PI * x[1]).cos()];
    let cfg = KrylovConfig::new(1e-10, 1000);
    let registry = StrategyRegistry::with_defaults();
    let mut errors = Vec::new();
    for n in [8, 16] {
        let src = field_source(e, curl, move |x| e(x).map(|v| (PI * PI - k * k) * v));
        let p = problem(n, k, false, src);
        let out = registry.create("hx:precond").unwrap().solve(&p, &cfg).unwrap();
        let err = curl_error(&p.mesh, &p.assembled.maps, &out.solution, |x| curl(x).map(|v| Complex64::new(v, 0.0)))
            .unwrap();
        errors.push((err, out.report.converged));
    }
    let ratio = errors[0].0 / errors[1].0;
    let pass = patch <= 1e-8 && errors.iter().all(|e| e.1) && (1.7..=2.3).contains(&ratio);
    check(pass, format!("patch error {patch:.1e}; curl errors {:.3e} -> {:.3e}, ratio {ratio:.3}", errors[0].0, errors[1].0))
}

fn determinism(first: &[BenchResult]) -> Outcome {
    let again = run_suite("ras-table", 1).unwrap().results;
    let parallel = run_suite("ras-table", 2).unwrap().results;
    let its = |rs: &[BenchResult]| -> Vec<(Option<usize>, u64)> {
        rs.iter().map(|r| (r.iterations, r.true_residual.to_bits())).collect()
    };
    let same = its(first) == its(&again);
    let same_parallel = its(&again) == its(&parallel);
    check(same && same_parallel, format!("ras-table rerun identical: {same}; with 2 threads: {same_parallel}"))
}

fn main() {
    let mut failed = Vec::new();
    let mut report = |id: usize, name: &str, limit: Option<f64>, start: Instant, o: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        let in_time = limit.is_none_or(|l| secs <= l);
        let pass = o.pass && in_time;
        let limit_note = limit.map(|l| format!(" (limit {l:.0}s)")).unwrap_or_default();
        println!(
            "criterion {id:>2} {}: {name}: {} [{secs:.1}s{limit_note}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !pass {
            failed.push(id);
        }
    };

    let t = Instant::now();
    report(1, "discrete identities", Some(30.0), t, discrete_identities());
    let t = Instant::now();
    report(2, "split/complex equivalence", Some(60.0), t, split_complex_equivalence());
    let t = Instant::now();
    report(3, "exactness degenerations", Some(60.0), t, exactness_degenerations());

    let t = Instant::now();
    let blr: Vec<BenchResult> = ["1e-9", "1e-5", "1e-3", "5e-3"]
        .iter()
        .map(|eps| run_case(&BenchCase::with_n(TWO_PI, 12, 1.0, &format!("blr:{eps}"))))
        .collect();
    report(4, "BLR trade-off", Some(300.0), t, blr_tradeoff(&blr));

    let t = Instant::now();
    let pre: Vec<BenchResult> =
        [8, 12, 16].iter().map(|&n| run_case(&BenchCase::with_n(TWO_PI, n, 1.0, "hx:precond"))).collect();
    report(5, "HX mesh robustness", Some(600.0), t, hx_mesh_robustness(&pre));
    let t = Instant::now();
    let sol: Vec<BenchResult> =
        [8, 12, 16].iter().map(|&n| run_case(&BenchCase::with_n(TWO_PI, n, 1.0, "hx:solver"))).collect();
    report(6, "HX mode ordering", None, t, hx_mode_ordering(&pre, &sol));

    let t = Instant::now();
    // ppw=10 at k=2pi resolves to n=12, already run above
    let k2 = pre[1].clone();
    assert_eq!(k2.n, BenchCase::new(TWO_PI, 10.0, 1.0, "hx:precond").resolved_n());
    let k4 = run_case(&BenchCase::new(2.0 * TWO_PI, 10.0, 1.0, "hx:precond"));
    report(7, "HX k-degradation", None, t, hx_k_degradation(&k2, &k4));

    let t = Instant::now();
    let ras = run_suite("ras-table", 1).unwrap().results;
    report(8, "RAS trends", Some(300.0), t, ras_trends(&ras));

    let t = Instant::now();
    let tight = run_case(&BenchCase::with_n(TWO_PI, 8, 1.0, "spai:0.001:0.01:3"));
    let mut loose_case = BenchCase::with_n(TWO_PI, 8, 1.0, "spai:0.01:0.05:3");
    loose_case.expect_convergence = false;
    let loose = run_case(&loose_case);
    report(9, "SPAI trend", None, t, spai_trend(&tight, &loose));

    let t = Instant::now();
    let plain = run_case(&BenchCase::with_n(TWO_PI, 8, 1.0, "gmres"));
    let preconditioned: Vec<&BenchResult> =
        blr.iter().chain(&pre).chain(&sol).chain([&k4]).chain(&ras).chain([&tight, &loose]).collect();
    report(10, "unpreconditioned failure", None, t, unpreconditioned_failure(&plain, &preconditioned));

    let t = Instant::now();
    report(11, "patch test and refinement", Some(600.0), t, patch_and_refinement());
    let t = Instant::now();
    report(12, "determinism", None, t, determinism(&ras));

    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
