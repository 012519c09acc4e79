//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::io::Write;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use saabf::bench::{complexity_counts, run_experiment, ExperimentResult, ExperimentSpec, COMPLEXITY_TAGS};
use saabf::generic::{reduced_moments, GenericFilter, GenericMode};
use saabf::linalg::{frobenius, hermitian_eigenvalues, trace_re, CMat, CVec};
use saabf::linear::{exact_moments, exhaustive_moments, wiener_solution, FullRankRls};
use saabf::saabf::{
    expand_psi, psi_moments, psi_regressor, saabf_mmse_fixed_point, OffsetPolicy, PositionBook, SaabfFilter, SaabfMode,
};
use saabf::uwb::{
    build_signatures, generate_batch, generate_channel, generate_spreading_codes, noise_vector, synthesize_noiseless,
    synthesize_received_oracle, ChannelRealization, ClusterProfile, SignatureSet, SpreadingCodes, SymbolStreams,
    SystemConfig,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn report(n: u32, name: &str, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "acceptance {n:>2} {verdict} {name} ({:.2} s): {detail}",
        elapsed.as_secs_f64()
    );
    let _ = out.flush();
}

fn finish(n: u32, name: &str, start: Instant, budget: Duration, pass: bool, detail: String) {
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let detail = if in_time {
        detail
    } else {
        format!("{detail}; over the {} s budget", budget.as_secs())
    };
    report(n, name, pass && in_time, elapsed, &detail);
    assert!(pass && in_time, "criterion {n} failed: {detail}");
}

struct Scenario {
    cfg: SystemConfig,
    codes: SpreadingCodes,
    chan: ChannelRealization,
    sigs: SignatureSet,
}

fn scenario(cfg: SystemConfig, seed: u64) -> Scenario {
    let dims = cfg.dims().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codes = generate_spreading_codes(&dims, &mut rng);
    let chan = generate_channel(&cfg, &ClusterProfile::default(), &mut rng).unwrap();
    let sigs = build_signatures(&cfg, &codes, &chan).unwrap();
    Scenario { cfg, codes, chan, sigs }
}

fn max_gap(a: &CVec, b: &CVec) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm() / x.norm().max(1.0))
        .fold(0.0, f64::max)
}

#[test]
fn criterion_01_dense_saabf_tracks_generic_scheme() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let s = scenario(SystemConfig::desk(4, 15.0), 11);
    let m = s.sigs.dims.m;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let batch = generate_batch(&s.sigs, 500, &mut rng).unwrap();
    let book = Arc::new(PositionBook::dense(m, 3).unwrap());
    let mut worst: f64 = 0.0;
    let pairs = [
        (
            GenericFilter::new_lms(m, 3, 0.02, 0.02, 1).unwrap(),
            SaabfFilter::new_lms(book.clone(), 0.02, 0.02).unwrap(),
        ),
        (
            GenericFilter::new_rls(m, 3, 0.998, 10.0, 10.0, 1).unwrap(),
            SaabfFilter::new_rls(book.clone(), 0.998, 10.0, 10.0).unwrap(),
        ),
    ];
    for (mut generic, mut dense) in pairs {
        // Common starting point for both recursions.
        dense.psi = generic.t.clone();
        for (r, d) in &batch.samples {
            let d = Complex64::new(*d, 0.0);
            let e_generic = generic.step(r, d).unwrap();
            let e_dense = dense.step(r, d).unwrap().e;
            worst = worst
                .max((e_generic - e_dense).norm())
                .max(max_gap(&generic.w_bar, &dense.w_bar))
                .max(max_gap(&generic.t, &dense.psi));
        }
    }
    finish(
        1,
        "dense SAABF(1,3,M) equals generic scheme",
        start,
        Duration::from_secs(10),
        worst <= 1e-12,
        format!("largest deviation {worst:.2e} over 500 symbols, LMS and RLS (limit 1e-12)"),
    );
}

fn small_system(k: usize) -> SystemConfig {
    // N_c = 4, L = 4 taps: M = 8, G = 1.
    let mut cfg = SystemConfig::desk(k, 12.0);
    cfg.spreading_gain = 4;
    cfg.user_energies = vec![0.25; k];
    cfg.symbol_duration = 4.0 * cfg.chip_duration;
    cfg.delay_spread = 4.0 * cfg.tap_spacing;
    cfg
}

#[test]
fn criterion_02_fixed_point_mmse_equals_wiener() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let s = scenario(small_system(2), 21);
    let dims = s.sigs.dims;
    assert_eq!((dims.m, dims.k, dims.g), (8, 2, 1));
    let moments = exhaustive_moments(&s.sigs).unwrap();
    let (_, wiener) = wiener_solution(&moments).unwrap();
    let book = PositionBook::new(dims.m, 1, dims.m, 1).unwrap();
    let fp = saabf_mmse_fixed_point(&moments, &book).unwrap();
    let gap = (fp.mmse - wiener).abs();
    finish(
        2,
        "SAABF(1,1,M) fixed-point MMSE equals Wiener MMSE",
        start,
        Duration::from_secs(5),
        gap <= 1e-9,
        format!(
            "fixed point {:.12}, Wiener {:.12}, gap {gap:.2e} (limit 1e-9)",
            fp.mmse, wiener
        ),
    );
}

#[test]
fn criterion_03_matrix_model_matches_waveform_oracle() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut long, mut short, mut worst) = (0, 0, 0.0f64);
    for n in 0..100 {
        let nu = rng.random_range(1..=2usize);
        let n_c = rng.random_range(2..=6usize);
        let ns = n_c * nu;
        // Alternate between taps that stay within one symbol and taps that
        // spill over more than one.
        let l_taps = if n % 2 == 0 {
            nu * rng.random_range(1..=ns / nu)
        } else {
            nu * rng.random_range((ns + 2).div_ceil(nu)..=3 * ns / nu)
        };
        let k = rng.random_range(1..=3usize);
        let tau = 0.25e-9;
        let mut cfg = SystemConfig::desk(k, 10.0);
        cfg.tap_spacing = tau;
        cfg.chip_duration = nu as f64 * tau;
        cfg.spreading_gain = n_c;
        cfg.symbol_duration = (n_c * nu) as f64 * tau;
        cfg.delay_spread = l_taps as f64 * tau;
        cfg.user_energies = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let s = scenario(cfg, 1000 + n);
        let dims = s.sigs.dims;
        if dims.l > ns + 1 {
            long += 1;
        } else if dims.l < ns + 1 {
            short += 1;
        }
        let symbols = SymbolStreams::random(&dims, 3, &mut rng);
        let noise = noise_vector(0.1, dims.m, &mut rng);
        let oversample = rng.random_range(1..=3usize);
        for i in 0..3 {
            let matrix = synthesize_noiseless(&s.sigs, &symbols, i).unwrap() + &noise;
            let oracle =
                synthesize_received_oracle(&s.cfg, &s.codes, &s.chan, &symbols, i, &noise, oversample).unwrap();
            worst = worst.max((&matrix - &oracle).norm() / oracle.norm());
        }
    }
    finish(
        3,
        "matrix signal model matches waveform oracle",
        start,
        Duration::from_secs(30),
        worst <= 1e-8 && long >= 30 && short >= 30,
        format!("worst relative error {worst:.2e} (limit 1e-8); {long} configs with L > T_s/T_tau + 1, {short} with L < T_s/T_tau + 1"),
    );
}

fn rel_inverse_error(p: &CMat, acc: CMat) -> f64 {
    let direct = acc.try_inverse().expect("regularized correlation is invertible");
    frobenius(&(p - &direct)) / frobenius(&direct)
}

#[test]
fn criterion_04_rls_inverses_match_direct_inverses() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let (lambda, delta, n) = (0.998, 10.0, 300);
    let s = scenario(SystemConfig::desk(4, 15.0), 41);
    let m = s.sigs.dims.m;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let batch = generate_batch(&s.sigs, n, &mut rng).unwrap();
    let eye = |k: usize| CMat::identity(k, k) * Complex64::new(delta, 0.0);
    let decay = Complex64::new(lambda, 0.0);

    let mut full = FullRankRls::new(m, lambda, delta).unwrap();
    let mut acc_full = eye(m);
    let mut generic = GenericFilter::new_rls(m, 3, lambda, delta, delta, 1).unwrap();
    let (mut acc_gw, mut acc_gt) = (eye(3), eye(3 * m));
    let book = Arc::new(PositionBook::with_policy(m, 3, 3, 8, OffsetPolicy::Wrap).unwrap());
    let mut switched = SaabfFilter::new_rls(book.clone(), lambda, delta, delta).unwrap();
    let (mut acc_sw, mut acc_sp) = (eye(3), eye(9));

    for (r, d) in &batch.samples {
        let d = Complex64::new(*d, 0.0);
        full.step(r, d).unwrap();
        acc_full = acc_full * decay + r * r.adjoint();

        let r_bar = generic.reduce(r).unwrap();
        generic.step(r, d).unwrap();
        let r_t = saabf::generic::input_matrix_adjoint(r, &generic.w_bar);
        acc_gw = acc_gw * decay + &r_bar * r_bar.adjoint();
        acc_gt = acc_gt * decay + &r_t * r_t.adjoint();

        let branch = switched.select_branch(r, d).branch;
        let r_bar = switched.reduce(branch, r);
        switched.step(r, d).unwrap();
        let r_psi = psi_regressor(&book, branch, r, &switched.w_bar);
        acc_sw = acc_sw * decay + &r_bar * r_bar.adjoint();
        acc_sp = acc_sp * decay + &r_psi * r_psi.adjoint();
    }
    let GenericMode::Rls {
        inverse_w: gw,
        inverse_t: gt,
    } = &generic.mode
    else {
        unreachable!()
    };
    let SaabfMode::Rls {
        inverse_w: sw,
        inverse_psi: sp,
    } = &switched.mode
    else {
        unreachable!()
    };
    let errors = [
        ("full-rank", rel_inverse_error(&full.inverse.p, acc_full)),
        ("generic w", rel_inverse_error(&gw.p, acc_gw)),
        ("generic t", rel_inverse_error(&gt.p, acc_gt)),
        ("SAABF w", rel_inverse_error(&sw.p, acc_sw)),
        ("SAABF psi", rel_inverse_error(&sp.p, acc_sp)),
    ];
    let worst = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    let detail = errors
        .iter()
        .map(|(n, e)| format!("{n} {e:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    finish(
        4,
        "RLS inverses match direct regularized inverses",
        start,
        Duration::from_secs(10),
        worst < 1e-6,
        format!("{detail} after {n} steps (limit 1e-6)"),
    );
}

#[test]
fn criterion_05_hessians_are_positive_semidefinite() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let s = scenario(SystemConfig::desk(4, 15.0), 51);
    let m = s.sigs.dims.m;
    let moments = exact_moments(&s.sigs);
    let book = PositionBook::with_policy(m, 3, 3, 8, OffsetPolicy::Wrap).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let batch = generate_batch(&s.sigs, 200, &mut rng).unwrap();
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let w = noise_vector(1.0, 3, &mut rng);
        let psi = noise_vector(1.0, 9, &mut rng);
        let c = rng.random_range(0..book.branches());
        let mut sampled_w = CMat::zeros(3, 3);
        let mut sampled_psi = CMat::zeros(9, 9);
        for (r, _) in &batch.samples {
            let r_bar = saabf::saabf::project(&book, c, &psi, r);
            let r_psi = psi_regressor(&book, c, r, &w);
            sampled_w += &r_bar * r_bar.adjoint();
            sampled_psi += &r_psi * r_psi.adjoint();
        }
        let expected_w = reduced_moments(&moments, &expand_psi(&book, c, &psi), 3).unwrap().r;
        let expected_psi = psi_moments(&moments, &book, c, &w).r;
        for h in [sampled_w, sampled_psi, expected_w, expected_psi] {
            let mut h = h;
            saabf::linalg::hermitize(&mut h);
            worst = worst.min(hermitian_eigenvalues(&h)[0] / trace_re(&h));
        }
    }
    finish(
        5,
        "Hessians in w and psi are positive semidefinite",
        start,
        Duration::from_secs(5),
        worst >= -1e-10,
        format!("smallest eigenvalue / trace {worst:.2e} over 100 states (limit -1e-10)"),
    );
}

/// The operation counts as printed in the complexity table.
fn printed(tag: &str, m: u64, d: u64, q: u64, c: u64) -> (u64, u64) {
    match tag {
        "full-lms" => (2 * m, 2 * m + 1),
        "full-rls" => (3 * m * m + m, 4 * (m * m + m)),
        "mswf-lms" => (d * m * m + (d + 2) * m, (d + 1) * m * m + (3 * d + 2) * m + 2 * d + 1),
        "mswf-rls" => (
            d * m * m + (d + 2) * m + 3 * d * d - d,
            (d + 1) * m * m + (3 * d + 2) * m + 4 * (d * d + d),
        ),
        "avf" => ((3 * d + 1) * m * m + m - 2 * d - 1, (5 * d + 2) * m * m + (d + 1) * m),
        "saabf-lms" => (q * d * (c + 1) - c * d + c + d, d * m + 2 * d * q * (c + 1) + d + 2),
        "saabf-rls" => (
            4 * (q * d) * (q * d) + c * d * (q - 1) + 3 * d * d + c + d,
            d * m + 5 * (q * d) * (q * d) + 2 * c * d * q + 4 * d * d + 3 * d * q + 3 * d,
        ),
        "generic-lms" => printed("saabf-lms", m, d, m, 1),
        "generic-rls" => printed("saabf-rls", m, d, m, 1),
        other => panic!("no printed form for {other}"),
    }
}

#[test]
fn criterion_06_complexity_table() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut mismatches = 0;
    for _ in 0..50 {
        let (m, d, q, c) = (
            rng.random_range(1..=256u64),
            rng.random_range(1..=16u64),
            rng.random_range(1..=16u64),
            rng.random_range(1..=16u64),
        );
        for tag in COMPLEXITY_TAGS {
            let ops = complexity_counts(tag, m as usize, d as usize, q as usize, c as usize).unwrap();
            if (ops.adds, ops.mults) != printed(tag, m, d, q, c) {
                mismatches += 1;
            }
        }
    }
    let lms = complexity_counts("full-lms", 112, 1, 1, 1).unwrap();
    let spot = (lms.adds, lms.mults) == (224, 225);
    finish(
        6,
        "complexity counts match the printed table",
        start,
        Duration::from_secs(1),
        mismatches == 0 && spot,
        format!(
            "{mismatches} mismatches over 50 tuples x {} tags; full-rank LMS at M = 112 gives ({}, {})",
            COMPLEXITY_TAGS.len(),
            lms.adds,
            lms.mults
        ),
    );
}

fn run(text: &str) -> ExperimentResult {
    run_experiment(&ExperimentSpec::from_toml(text).unwrap()).unwrap()
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[test]
fn criterion_07_convergence_ordering() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let result = run(r#"
        name = "convergence"
        num_users = 4
        snr_db = 15.0
        num_trials = 200
        num_training_symbols = 500
        window = 50
        seed = 7
        offset_policy = "wrap"
        algorithms = [
            "full-lms mu=0.075",
            "saabf-lms C=8 D=3 q=3 mu_w=0.05 mu_psi=0.05",
            "saabf-rls C=8 D=3 q=3 lambda=0.998 delta_w=10 delta_psi=10",
        ]
        "#);
    let p = &result.points[0];
    let (full, lms, rls) = (&p.algorithms[0], &p.algorithms[1], &p.algorithms[2]);
    let gap = db(rls.final_mse) - db(p.mean_mmse);
    let ordered = rls.final_mse <= lms.final_mse && lms.final_mse <= full.final_mse;
    finish(
        7,
        "SAABF-RLS <= SAABF-LMS <= full-rank LMS, RLS within 3 dB of MMSE",
        start,
        Duration::from_secs(300),
        ordered && gap <= 3.0,
        format!(
            "final MSE: SAABF-RLS {:.4}, SAABF-LMS {:.4}, full-rank LMS {:.4}; MMSE {:.4}; SAABF-RLS is {gap:.2} dB above MMSE",
            rls.final_mse, lms.final_mse, full.final_mse, p.mean_mmse
        ),
    );
}

#[test]
fn criterion_08_branch_count_behaviour() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut algorithms: Vec<String> = (1..=8).map(|c| format!("\"saabf-rls C={c} D=3 q=3\"")).collect();
    let gammas = [0.5, 1.0, 3.0];
    for g in gammas {
        algorithms.push(format!("\"saabf-rls C=12 D=3 q=3 c_min=6 c_max=12 gamma_db={g}\""));
    }
    let result = run(&format!(
        r#"
        name = "branches"
        num_users = 4
        snr_db = 15.0
        num_trials = 200
        num_training_symbols = 500
        window = 50
        seed = 8
        offset_policy = "wrap"
        algorithms = [{}]
        "#,
        algorithms.join(", ")
    ));
    let a = &result.points[0].algorithms;
    let mut monotone = true;
    let mut steps = Vec::new();
    for w in a[..8].windows(2) {
        let tol = w[0].final_mse_stderr.max(w[1].final_mse_stderr);
        monotone &= w[1].final_mse <= w[0].final_mse + tol;
        steps.push(format!("{:.4}", w[0].final_mse));
    }
    steps.push(format!("{:.4}", a[7].final_mse));
    let means: Vec<f64> = a[8..].iter().map(|x| x.mean_branches_evaluated().unwrap()).collect();
    let bounded = means.iter().all(|&c| (6.0..=12.0).contains(&c));
    let falling = means.windows(2).all(|w| w[1] <= w[0]);
    finish(
        8,
        "more branches never hurt; mean C_r falls with gamma",
        start,
        Duration::from_secs(300),
        monotone && bounded && falling,
        format!(
            "final MSE for C = 1..8: [{}]; mean C_r at gamma = {gammas:?} dB: {:.2?}",
            steps.join(", "),
            means
        ),
    );
}

#[test]
fn criterion_09_order_adaptation_dominance() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let result = run(r#"
        name = "orders"
        num_users = 4
        snr_db = 15.0
        num_trials = 200
        num_training_symbols = 500
        window = 50
        seed = 9
        offset_policy = "wrap"
        algorithms = [
            "saabf-rls C=5 D=3 q=3 d_min=3 d_max=8 lambda_d=0.998 label=rank-adaptive",
            "saabf-rls C=5 D=3 q=3 label=D=3",
            "saabf-rls C=5 D=8 q=3 label=D=8",
            "saabf-rls C=5 D=3 q=3 q_min=3 q_max=8 lambda_q=0.998 label=q-adaptive",
            "saabf-rls C=5 D=3 q=3 label=q=3",
            "saabf-rls C=5 D=3 q=8 label=q=8",
        ]
        "#);
    let a = &result.points[0].algorithms;
    let mut pass = true;
    let mut detail = Vec::new();
    for (adaptive, lo, hi) in [(&a[0], &a[1], &a[2]), (&a[3], &a[4], &a[5])] {
        let (better, worse) = if lo.final_mse <= hi.final_mse {
            (lo, hi)
        } else {
            (hi, lo)
        };
        let tol = better.final_mse_stderr.max(adaptive.final_mse_stderr);
        let ok = adaptive.final_mse <= worse.final_mse && adaptive.final_mse <= better.final_mse + tol;
        pass &= ok;
        detail.push(format!(
            "{} {:.4} vs {} {:.4} / {} {:.4} (SE {:.4})",
            adaptive.label, adaptive.final_mse, better.label, better.final_mse, worse.label, worse.final_mse, tol
        ));
    }
    finish(
        9,
        "order-adaptive runs match the better fixed order",
        start,
        Duration::from_secs(300),
        pass,
        detail.join("; "),
    );
}

#[test]
fn criterion_10_frozen_unit_blocks() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let result = run(r#"
        name = "decimation"
        num_users = 4
        snr_db = 15.0
        num_trials = 50
        num_training_symbols = 500
        window = 50
        seed = 10
        algorithms = [
            "saabf-lms C=8 D=3 q=1 mu_w=0.05 freeze_psi=true",
            "saabf-rls C=8 D=3 q=1 freeze_psi=true",
        ]
        "#);
    let mut pass = true;
    let mut detail = Vec::new();
    for (a, tag) in result.points[0].algorithms.iter().zip(["saabf-lms", "saabf-rls"]) {
        // Initial and final values are both taken over a `window`-symbol span.
        let initial = a.mse_curve[..50].iter().sum::<f64>() / 50.0;
        let mults = a.complexity.unwrap().mults;
        let table = printed(tag, 28, 3, 1, 8).1;
        pass &= a.final_mse <= 0.5 * initial && mults == table;
        detail.push(format!(
            "{tag}: windowed MSE {initial:.3} -> {:.3} (ratio {:.2}, first symbol {:.3}), {mults} mults/bit (table {table})",
            a.final_mse,
            a.final_mse / initial,
            a.mse_curve[0],
        ));
    }
    finish(
        10,
        "SAABF(C,D,1) with frozen psi converges",
        start,
        Duration::from_secs(60),
        pass,
        detail.join("; "),
    );
}
