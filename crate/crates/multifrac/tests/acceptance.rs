//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use multifrac::analysis::{
    gaussian_abs_moment, holder_bounds_audit, lass_covariance_limit, lrd_increment_audit,
    lrd_process_audit, memory_classification, prop2_constants, quasi_helix_audit,
    small_increment_ratio, x_displacement_variance,
};
use multifrac::hurst::HurstFunction;
use multifrac::kernels::{
    cov_bfbm, cov_ext, cov_fbm, cov_mbm, decomposition_residual, ProcessSpec,
};
use multifrac::rng::NormalStream;
use multifrac::simulate::{
    assemble_covariance, check_psd, cholesky_with_jitter, empirical_cov, sample_paths,
    JitterPolicy, TimeGrid,
};
use std::time::Instant;

struct Criterion {
    name: &'static str,
    budget_s: f64,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, budget_s: f64) -> Self {
        Self { name, budget_s, start: Instant::now() }
    }

    fn pass(self, detail: String) {
        let elapsed = self.start.elapsed().as_secs_f64();
        println!("ACCEPTANCE {}: PASS ({elapsed:.2}s) {detail}", self.name);
        assert!(
            elapsed <= self.budget_s,
            "{} exceeded its runtime budget: {elapsed:.2}s > {}s",
            self.name,
            self.budget_s
        );
    }
}

fn random_builtin_hurst(u: &mut NormalStream) -> HurstFunction {
    let lo = 0.1 + 0.3 * u.next_uniform();
    let hi = 0.55 + 0.35 * u.next_uniform();
    match (u.next_uniform() * 4.0) as usize {
        0 => HurstFunction::constant(lo + (hi - lo) * u.next_uniform()),
        1 => HurstFunction::sine(lo, hi, 0.5 + 3.5 * u.next_uniform(), std::f64::consts::TAU * u.next_uniform()),
        2 => HurstFunction::linear(lo, (hi - lo) * (2.0 * u.next_uniform() - 1.0), lo, hi),
        _ => HurstFunction::logistic(lo, hi, 5.0 * u.next_uniform(), 0.5 + 4.0 * u.next_uniform()),
    }
    .expect("in-range parameters")
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    TimeGrid::log_spaced(lo, hi, n).unwrap().points().to_vec()
}

#[test]
fn criterion_01_psd_witness() {
    let c = Criterion::new("1 psd-witness", 30.0);
    let mut u = NormalStream::new(20_260_810, 1);
    let ks = [0.3, 0.6, 1.0];
    let mut worst_rel = f64::INFINITY;
    for i in 0..50 {
        let hf = random_builtin_hurst(&mut u);
        let spec = ProcessSpec::ext_bfbm(hf, ks[i % 3]).unwrap();
        let n = 16 + (u.next_uniform() * 112.0) as usize;
        let lo = if i % 5 == 0 { 0.0 } else { 0.05 + 0.5 * u.next_uniform() };
        let grid = TimeGrid::regular(lo, 10.0, n.max(2) - 1).unwrap();
        let cov = assemble_covariance(&spec, &grid).unwrap();
        let rep = check_psd(&cov, 1e-10).unwrap();
        let scale = rep.trace / rep.n as f64;
        worst_rel = worst_rel.min(rep.min_eigenvalue / scale);
        assert!(
            rep.min_eigenvalue >= -1e-10 * scale,
            "config {i}: min eigenvalue {:e} below -1e-10 * {scale:e}",
            rep.min_eigenvalue
        );
    }
    c.pass(format!("50 configs, worst min-eig/(trace/n) = {worst_rel:.3e}"));
}

#[test]
fn criterion_02_reduction_lattice() {
    let c = Criterion::new("2 reduction-lattice", 1.0);
    let mut u = NormalStream::new(20_260_810, 2);
    let sine = HurstFunction::sine(0.3, 0.7, 2.0, 0.5).unwrap();
    let mut worst = 0.0f64;
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1e-300);
    for _ in 0..1000 {
        let (t, s) = (20.0 * u.next_uniform(), 20.0 * u.next_uniform());
        let h = 0.05 + 0.9 * u.next_uniform();
        let k = 0.05 + 0.9 * u.next_uniform();
        let const_hf = HurstFunction::constant(h).unwrap();

        worst = worst.max(rel(
            cov_ext(t, s, &const_hf, k).unwrap(),
            cov_bfbm(t, s, h, k).unwrap(),
        ));
        worst = worst.max(rel(
            cov_ext(t, s, &sine, 1.0).unwrap(),
            cov_mbm(t, s, &sine).unwrap(),
        ));
        worst = worst.max(rel(cov_bfbm(t, s, h, 1.0).unwrap(), cov_fbm(t, s, h).unwrap()));
        assert!(worst <= 1e-13, "reduction mismatch {worst:e} at t={t}, s={s}, H={h}, K={k}");
    }
    c.pass(format!("worst relative mismatch {worst:.3e} over 1000 points x 3 reductions"));
}

#[test]
fn criterion_03_decomposition_identity() {
    let c = Criterion::new("3 decomposition-identity", 1.0);
    let mut u = NormalStream::new(20_260_810, 3);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let hf = if i % 2 == 0 {
            HurstFunction::sine(0.3, 0.7, 2.0, std::f64::consts::TAU * u.next_uniform()).unwrap()
        } else {
            random_builtin_hurst(&mut u)
        };
        let (t, s) = (20.0 * u.next_uniform(), 20.0 * u.next_uniform());
        let k = 0.05 + 0.9 * u.next_uniform();
        let r = decomposition_residual(t, s, &hf, k).unwrap();
        worst = worst.max(r);
        assert!(r <= 1e-12, "residual {r:e} at t={t}, s={s}, K={k}");
    }
    c.pass(format!("worst relative residual {worst:.3e} over 1000 tuples"));
}

#[test]
fn criterion_04_quasi_helix() {
    let c = Criterion::new("4 quasi-helix", 5.0);
    let mut u = NormalStream::new(20_260_810, 4);
    let grid = TimeGrid::regular(0.0, 10.0, 63).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let h = 0.05 + 0.9 * u.next_uniform();
        let k = 0.05 + 0.95 * u.next_uniform();
        let rep = quasi_helix_audit(h, k.min(1.0), &grid).unwrap();
        assert!(rep.pass, "H={h} K={k}: {:?}", rep.measured);
        worst = worst.max(rep.key_measurement());
    }
    c.pass(format!("20 random (H,K), worst relative violation {worst:.3e}"));
}

#[test]
fn criterion_05_small_increment_limit() {
    let c = Criterion::new("5 small-increment-limit", 1.0);
    let mut u = NormalStream::new(20_260_810, 5);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let h = 0.1 + 0.75 * u.next_uniform();
        let k = 0.1 + 0.9 * u.next_uniform();
        let t = 0.5 + 4.5 * u.next_uniform();
        let ladder: Vec<f64> = (0..14).map(|j| 1e-2 * t / 2f64.powi(j)).collect();
        let r = small_increment_ratio(h, k, t, &ladder).unwrap();
        let target = 2f64.powf(1.0 - k);
        let err = (r.limit - target).abs() / target;
        worst = worst.max(err);
        assert!(err <= 1e-4, "limit {} vs {target} at H={h}, K={k}, t={t}", r.limit);
    }
    c.pass(format!("10 random (H,K,t), worst relative limit error {worst:.3e}"));
}

#[test]
fn criterion_06_prop2_bound() {
    let c = Criterion::new("6 prop2-bound", 30.0);
    let (a, b, alpha, gamma, k) = (0.05, 2.0, 0.3, 0.8, 0.5);
    let consts = prop2_constants(a, b, alpha, gamma, k).unwrap();
    assert!(consts.c1 > 0.0 && consts.c1.is_finite());
    assert!(consts.c2 > 0.0 && consts.c2.is_finite());
    assert!(consts.c3 > 0.0 && consts.c3.is_finite());
    let bound = consts.c_final();

    let mut u = NormalStream::new(20_260_810, 6);
    let mut tightest = f64::INFINITY;
    for _ in 0..100 {
        let t = a + (b - a) * u.next_uniform();
        let h = alpha + (gamma - alpha) * u.next_uniform();
        let h2 = alpha + (gamma - alpha) * u.next_uniform();
        let lhs = x_displacement_variance(t, h, h2, k).unwrap();
        let rhs = bound * (h - h2) * (h - h2);
        if rhs > 0.0 {
            tightest = tightest.min(rhs / lhs.max(1e-300));
        }
        assert!(
            lhs <= rhs * (1.0 + 1e-9) + 1e-18,
            "bound violated at t={t}, H={h}, H'={h2}: {lhs:e} > {rhs:e}"
        );
    }
    c.pass(format!(
        "c1={:.3e} c2={:.3e} c3={:.3e}; bound/lhs >= {tightest:.2} on 100 draws",
        consts.c1, consts.c2, consts.c3
    ));
}

#[test]
fn criterion_07_holder_bounds() {
    let c = Criterion::new("7 holder-bounds", 10.0);
    let hf = HurstFunction::sine(0.3, 0.7, 1.0, 0.0).unwrap();
    let mut u = NormalStream::new(20_260_810, 7);
    let pairs: Vec<(f64, f64)> =
        (0..10_000).map(|_| (u.next_uniform(), u.next_uniform())).collect();
    let mut detail = String::new();
    for k in [0.5, 0.9] {
        let rep = holder_bounds_audit(&hf, k, &pairs).unwrap();
        assert!(rep.pass, "K={k}: {:?}", rep.measured);
        let get = |name: &str| rep.measured.iter().find(|m| m.0 == name).unwrap().1;
        assert!(get("c_hat").is_finite() && get("c_hat") > 0.0);
        assert!(get("m_hat") > 0.0);
        assert!(get("c_hat") <= get("c4"));
        detail.push_str(&format!(
            "K={k}: C^={:.3} <= C4={:.3e}, M^={:.3e}; ",
            get("c_hat"),
            get("c4"),
            get("m_hat")
        ));
    }
    c.pass(detail);
}

#[test]
fn criterion_08_lass_limit() {
    let c = Criterion::new("8 lass-limit", 5.0);
    let ladder: Vec<f64> = (0..12).map(|j| 1e-2 / 2f64.powi(j)).collect();
    let u_grid = [0.5, 1.0, 2.0];
    let configs: [(HurstFunction, f64, f64); 3] = [
        (HurstFunction::constant(0.6).unwrap(), 0.5, 2.0),
        (HurstFunction::constant(0.7).unwrap(), 1.0, 1.0),
        (HurstFunction::sine(0.3, 0.7, 4.0, 0.0).unwrap(), 0.6, 1.0),
    ];
    let mut worst = 0.0f64;
    for (hf, k, t) in configs {
        let out = lass_covariance_limit(&hf, k, t, &u_grid, &ladder).unwrap();
        assert!(out.report.pass, "K={k}, t={t}: {:?}", out.report.measured);
        worst = worst.max(out.report.key_measurement());
    }
    c.pass(format!("3 configs, worst entrywise relative error {worst:.3e}"));
}

#[test]
fn criterion_09_lrd_exponents() {
    let c = Criterion::new("9 lrd-exponents", 30.0);
    let grid = log_grid(1e2, 1e5, 25);
    let mut detail = String::new();

    // process-level regimes: K(H+H) above and below 1, plus the mixed case
    for (h, k) in [(0.8, 0.8), (0.3, 0.5), (0.6, 0.7)] {
        let spec = ProcessSpec::bfbm(h, k).unwrap();
        let rep = lrd_process_audit(&spec, 1.0, &grid).unwrap();
        assert!(rep.pass, "process H={h} K={k}: {:?}", rep.measured);
        detail.push_str(&format!("proc({h},{k}) dev {:.3}; ", rep.key_measurement()));
    }
    // a genuinely time-varying Hurst exponent, settled at large t
    let linear = HurstFunction::linear(0.55, 0.01, 0.55, 0.75).unwrap();
    let spec = ProcessSpec::ext_bfbm(linear, 0.9).unwrap();
    let rep = lrd_process_audit(&spec, 1.0, &grid).unwrap();
    assert!(rep.pass, "linear ext: {:?}", rep.measured);

    // increment-level regimes: KL above and below 1
    let logi = HurstFunction::logistic(0.35, 0.75, 1.5, 3.0).unwrap();
    for k in [0.9, 0.4] {
        let spec = ProcessSpec::ext_bfbm(logi.clone(), k).unwrap();
        let rep = lrd_increment_audit(&spec, 1.0, &grid).unwrap();
        assert!(rep.pass, "increments K={k}: {:?} {}", rep.measured, rep.notes);
        detail.push_str(&format!("incr(K={k}) dev {:.3}; ", rep.key_measurement()));
    }
    let sine = HurstFunction::sine(0.3, 0.7, 1e7, 0.0).unwrap();
    let rep =
        lrd_increment_audit(&ProcessSpec::ext_bfbm(sine, 0.4).unwrap(), 1.0, &grid).unwrap();
    assert!(rep.pass, "sine increments: {:?}", rep.measured);

    // memory dichotomy away from the boundary |2HK - 1| > 0.05
    for (h, k, want) in
        [(0.9, 0.7, "LONG"), (0.3, 0.5, "SHORT"), (0.75, 0.8, "LONG"), (0.5, 1.0, "SHORT")]
    {
        let spec = ProcessSpec::bfbm(h, k).unwrap();
        let rep = memory_classification(&spec, 1.0, 1.0, 2000).unwrap();
        assert!(rep.pass, "memory H={h} K={k}: {}", rep.notes);
        assert!(
            rep.notes.contains(&format!("classification: {want}")),
            "H={h} K={k}: {}",
            rep.notes
        );
        detail.push_str(&format!("mem({h},{k})={want}; "));
    }
    c.pass(detail);
}

#[test]
fn criterion_10_monte_carlo_exactness() {
    let c = Criterion::new("10 monte-carlo-exactness", 60.0);
    let hf = HurstFunction::sine(0.3, 0.7, 1.0, 0.0).unwrap();
    let spec = ProcessSpec::ext_bfbm(hf, 0.6).unwrap();
    let grid = TimeGrid::regular(1.0 / 16.0, 1.0, 15).unwrap();
    let cov = assemble_covariance(&spec, &grid).unwrap();
    let factor = cholesky_with_jitter(&cov, &JitterPolicy::default()).unwrap();
    let m = 10_000usize;
    let ensemble = sample_paths(&factor, m, 20_260_810);
    let emp = empirical_cov(&ensemble).unwrap();

    // entrywise CLT bands from the kernel covariance (Wishart variance)
    let n = grid.len();
    let mut max_z = 0.0f64;
    let mut sum_z2 = 0.0f64;
    let mut count = 0usize;
    for i in 0..n {
        for j in 0..=i {
            let truth = cov.entries[(i, j)];
            let se = ((cov.entries[(i, i)] * cov.entries[(j, j)] + truth * truth)
                / (m - 1) as f64)
                .sqrt();
            let z = (emp.cov[(i, j)] - truth) / se;
            max_z = max_z.max(z.abs());
            sum_z2 += z * z;
            count += 1;
        }
    }
    assert!(max_z <= 4.0, "entrywise deviation {max_z:.2} standard errors");
    let mean_z2 = sum_z2 / count as f64;
    assert!(mean_z2 <= 1.5, "chi-square-style aggregate too large: {mean_z2:.3}");

    // absolute moments at t = 1 against the Gaussian moment identity
    let idx = n - 1;
    let var = cov.entries[(idx, idx)];
    for alpha in [1.0, 2.0, 4.0] {
        let mut acc = 0.0;
        let mut acc_sq = 0.0;
        for p in ensemble.paths() {
            let v = p[idx].abs().powf(alpha);
            acc += v;
            acc_sq += v * v;
        }
        let mean = acc / m as f64;
        let second = acc_sq / m as f64;
        let expect = gaussian_abs_moment(alpha, var).unwrap();
        let se = ((second - mean * mean).max(0.0) / m as f64).sqrt();
        assert!(
            (mean - expect).abs() <= 4.0 * se,
            "E|X|^{alpha}: sampled {mean:.5} vs {expect:.5} (se {se:.2e})"
        );
    }
    c.pass(format!("max |z| = {max_z:.2}, mean z^2 = {mean_z2:.3}, moments ok at t=1"));
}

#[test]
fn criterion_11_estimator_recovery() {
    let c = Criterion::new("11 estimator-recovery", 120.0);
    let n = 4096usize;
    let n_paths = 100usize;
    let window = 257usize;
    let scales = [1usize, 2, 4, 8];
    let t_list: Vec<f64> = (0..6).map(|i| 0.15 + 0.7 * i as f64 / 5.0).collect();

    let run = |spec: &ProcessSpec, seed: u64| {
        let grid = TimeGrid::regular(0.0, 1.0, n - 1).unwrap();
        let cov = assemble_covariance(spec, &grid).unwrap();
        let factor = cholesky_with_jitter(&cov, &JitterPolicy::default()).unwrap();
        let ensemble = sample_paths(&factor, n_paths, seed);
        multifrac::estimate::hurst_profile(&ensemble, &t_list, window, &scales).unwrap()
    };

    // constant Hurst: H = 0.8, K = 0.5 targets HK = 0.4
    let spec = ProcessSpec::bfbm(0.8, 0.5).unwrap();
    let prof = run(&spec, 11);
    let mut worst_const = 0.0f64;
    for e in &prof {
        worst_const = worst_const.max((e.estimate - 0.4).abs());
    }
    assert!(worst_const <= 0.1, "constant-H profile off by {worst_const:.3}");

    // slowly varying sine with K = 1 targets H(t)
    let hf = HurstFunction::sine(0.3, 0.7, 4.0, 0.0).unwrap();
    let spec = ProcessSpec::ext_bfbm(hf.clone(), 1.0).unwrap();
    let prof = run(&spec, 12);
    let mut worst_sine = 0.0f64;
    for e in &prof {
        worst_sine = worst_sine.max((e.estimate - hf.eval(e.t)).abs());
    }
    assert!(worst_sine <= 0.1, "sine profile off by {worst_sine:.3}");

    c.pass(format!(
        "n=4096, 100 paths: max error {worst_const:.3} (constant), {worst_sine:.3} (sine)"
    ));
}

#[test]
fn criterion_12_determinism_across_threads() {
    let c = Criterion::new("12 determinism", 30.0);
    let hf = HurstFunction::sine(0.3, 0.7, 1.0, 0.0).unwrap();
    let spec = ProcessSpec::ext_bfbm(hf, 0.7).unwrap();
    let grid = TimeGrid::regular(0.0, 1.0, 256).unwrap();

    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let cov = assemble_covariance(&spec, &grid).unwrap();
            let factor = cholesky_with_jitter(&cov, &JitterPolicy::default()).unwrap();
            let ensemble = sample_paths(&factor, 100, 42);
            multifrac::cli::ensemble_to_csv(&ensemble)
        })
    };
    let csv1 = run(1);
    let csv8 = run(8);
    assert_eq!(csv1.as_bytes(), csv8.as_bytes(), "CSV bytes differ between 1 and 8 threads");
    c.pass(format!("byte-identical CSV ({} bytes) under 1 and 8 worker threads", csv1.len()));
}
