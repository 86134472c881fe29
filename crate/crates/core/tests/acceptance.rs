//! Acceptance criteria. Each test prints one `ACCEPTANCE PASS|FAIL` line
//! and then asserts it; run with `--nocapture` to see every line.

use std::path::Path;
use std::time::Instant;

use cpass::channel::{build_layout, determinant_factors, effective_channel, user_distances};
use cpass::config::{Architecture, Deployment, Side};
use cpass::experiment::{
    gain_sweep_counts, replay, run_and_emit, run_capacity_vs_n, OutputFormat, RunManifest, SweepRequest,
};
use cpass::linalg::Mat2;
use cpass::metrics::{
    capacity, capacity_expanded, default_dof_grid, estimate_dof, gain_decomposition, integral_bounds,
    integral_bounds_series, simplified_gains_quarterwave,
};
use cpass::scalar::reduced_phase;
use cpass::tuner::{align_side, deploy, deployed_channel};
use cpass::units::LinkBudget;
use cpass::{SplitterSetting, SystemConfig};
use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(name: &str, pass: bool, detail: String) {
    println!("ACCEPTANCE {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

#[test]
fn dof_slopes() {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [4, 8, 16] {
        for (arch, lo, hi) in [(Architecture::Center, 1.95, 2.00), (Architecture::End, 0.98, 1.02)] {
            let cfg = SystemConfig::default()
                .with_n_per_side(n)
                .unwrap()
                .with_architecture(arch);
            let slope = estimate_dof(&cfg, &default_dof_grid()).unwrap().slope;
            ok &= (lo..=hi).contains(&slope);
            detail.push(format!("{}/N={n}: {slope:.6}", arch.as_str()));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        "dof-slopes",
        ok && secs < 5.0,
        format!("{} ({secs:.2} s)", detail.join(", ")),
    );
}

#[test]
fn rank_structure() {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst_end: f64 = 0.0;
    for _ in 0..100 {
        let mut cfg = SystemConfig::default()
            .with_n_per_side(rng.gen_range(1..=64))
            .unwrap()
            .with_architecture(Architecture::End)
            .with_deployment(if rng.gen_bool(0.5) {
                Deployment::Tuned
            } else {
                Deployment::Uniform
            });
        cfg.l_pa = rng.gen_range(0.2..2.0);
        cfg.delta_max = rng.gen_range(0.0..0.4) * cfg.l_pa;
        cfg.l_in = rng.gen_range(0.0..0.1);
        cfg.y_f = rng.gen_range(1.0..60.0);
        cfg.y_b = rng.gen_range(1.0..60.0);
        cfg.validate().unwrap();
        let h = deployed_channel(&cfg).unwrap().h;
        worst_end = worst_end.max(h.det().norm() / h.frobenius_sq());
    }
    let mut worst_center = f64::INFINITY;
    for n in [1, 2, 4, 8, 16, 32, 64] {
        for dep in [Deployment::Uniform, Deployment::Tuned] {
            let mut cfg = SystemConfig::default().with_n_per_side(n).unwrap().with_deployment(dep);
            cfg.beta = SplitterSetting::equal();
            cfg.l_in = 1.25 * cfg.wave.lambda_g;
            assert_ne!(cfg.y_f, cfg.y_b);
            let h = deployed_channel(&cfg).unwrap().h;
            worst_center = worst_center.min(h.det().norm() / h.frobenius_sq());
        }
    }
    report(
        "rank-structure",
        worst_end <= 1e-12 && worst_center > 1e-6,
        format!("end max |det|/||H||^2 = {worst_end:.2e}, center min = {worst_center:.2e}"),
    );
}

#[test]
fn signal_model_oracle() {
    use cpass::waveguide::{propagate_chain, radiated_closed_form, RadiationProfile};
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(3);
    let k_g = SystemConfig::default().wave.k_g;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=64);
        let delta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        // Multiples of 2^-20 m keep every cumulative distance exact.
        let spacings: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0..(2u64 << 20)) as f64 / (1u64 << 20) as f64)
            .collect();
        let beta: f64 = rng.gen_range(0.05..=1.0);
        let x_in = C::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(-3.0..3.0));
        let profile = RadiationProfile::from_deltas(delta).unwrap();
        let steps = propagate_chain(x_in * beta.sqrt(), &profile, &spacings, k_g).unwrap();
        let mut d = 0.0;
        for (i, step) in steps.iter().enumerate() {
            d += spacings[i];
            let closed = radiated_closed_form(x_in, beta, &profile, d, i, k_g).unwrap();
            if closed.norm() > 0.0 {
                worst = worst.max((step.radiated - closed).norm() / closed.norm());
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        "signal-model-oracle",
        worst <= 1e-12 && secs < 2.0,
        format!("max relative error {worst:.2e} over 1000 instances ({secs:.2} s)"),
    );
}

#[test]
fn capacity_identity() {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let scale = 10f64.powf(rng.gen_range(-6.0..0.0));
        let mut e = || C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
        let h = Mat2::new([[e(), e()], [e(), e()]]);
        let s = 10f64.powf(rng.gen_range(-3.0..6.0)) / h.frobenius_sq();
        let budget = LinkBudget::new(2.0 * s, 1.0).unwrap();
        let (a, b) = (capacity(&h, &budget), capacity_expanded(&h, &budget));
        worst = worst.max((a - b).abs() / b);
    }
    report(
        "capacity-identity",
        worst <= 1e-12,
        format!("max relative difference {worst:.2e}"),
    );
}

#[test]
fn gain_reduction_at_quarter_wave() {
    let mut worst: f64 = 0.0;
    let mut worst_cos: f64 = 0.0;
    for k in 0..3 {
        for n in [1, 8, 50] {
            let mut cfg = SystemConfig::default().with_n_per_side(n).unwrap();
            cfg.beta = SplitterSetting::equal();
            cfg.l_in = cfg.wave.lambda_g / 4.0 * (1 + 2 * k) as f64;
            worst_cos = worst_cos.max(reduced_phase(cfg.wave.k_g, cfg.l_in).cos().abs());
            let ch = deployed_channel(&cfg).unwrap();
            let full = gain_decomposition(&ch.h, &cfg.budget);
            let reduced = simplified_gains_quarterwave(&ch.branches, &cfg.budget, &cfg).unwrap();
            worst = worst
                .max((full.g_array - reduced.g_array).abs() / full.g_array)
                .max((full.g_mux - reduced.g_mux).abs() / full.g_mux);
        }
    }
    report(
        "gain-reduction",
        worst <= 1e-12 && worst_cos <= 1e-9,
        format!("max relative difference {worst:.2e}, max |cos(k_g l_in)| {worst_cos:.2e}"),
    );
}

#[test]
fn distance_sum_sandwich() {
    let t = Instant::now();
    let mut ok = true;
    for y in [35.0, 40.0] {
        ok &= integral_bounds_series(10_000, y, 1.0)
            .unwrap()
            .iter()
            .all(|b| b.holds());
    }
    let b = integral_bounds::<f64>(10, 35.0, 1.0).unwrap();
    let spot =
        (b.s_n - 0.281398).abs() <= 1e-5 && (b.lower - 0.28082).abs() <= 1e-4 && (b.upper - 0.28204).abs() <= 1e-4;
    let secs = t.elapsed().as_secs_f64();
    report(
        "sandwich",
        ok && spot && secs < 1.0,
        format!(
            "all N <= 1e4 bounded: {ok}; S_10 = {:.7}, bounds {:.6}/{:.6} ({secs:.2} s)",
            b.s_n, b.lower, b.upper
        ),
    );
}

#[test]
fn scaling_order() {
    let t = Instant::now();
    let base = SystemConfig::default();
    let mut array = (f64::INFINITY, 0.0f64);
    let mut mux = (f64::INFINITY, 0.0f64);
    for n in gain_sweep_counts(10, 2000).unwrap() {
        let cfg = base.clone().with_n_per_side(n).unwrap();
        let g = gain_decomposition(&deployed_channel(&cfg).unwrap().h, &cfg.budget);
        let (nf, ln) = (n as f64, (n as f64).ln());
        let ra = g.g_array / (ln * ln / nf);
        let rm = g.g_mux / (cfg.budget.p_t_watt * ln.powi(4) / (nf * nf));
        array = (array.0.min(ra), array.1.max(ra));
        mux = (mux.0.min(rm), mux.1.max(rm));
    }
    let (band_a, band_m) = (array.1 / array.0, mux.1 / mux.0);
    let secs = t.elapsed().as_secs_f64();
    report(
        "scaling-order",
        band_a <= 2.0 && band_m <= 2.0 && secs < 30.0,
        format!("max/min over N in [10, 2000]: array ratio {band_a:.2}, mux ratio {band_m:.2} ({secs:.2} s)"),
    );
}

#[test]
fn tuning_feasibility() {
    let mut worst_res: f64 = 0.0;
    let mut worst_off: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for n in 1..=200 {
        let cfg = SystemConfig::default().with_n_per_side(n).unwrap();
        for side in Side::BOTH {
            let a = align_side(&cfg, side, side, cfg.delta_max).unwrap();
            worst_res = worst_res.max(a.max_abs_residual());
            worst_off = worst_off.max(a.offsets.iter().fold(0.0, |m, d| m.max(d.abs())));
        }
        let layout = deploy(&cfg).unwrap();
        let ch = effective_channel(&cfg, &layout).unwrap();
        let geo = user_distances(&cfg, &layout);
        for side in Side::BOTH {
            let coherent = cfg.wave.eta / (n as f64).sqrt() * geo.r(side, side).iter().map(|r| 1.0 / r).sum::<f64>();
            let got = ch.branches.get(side, side).norm();
            worst_sum = worst_sum.max((got - coherent).abs() / coherent);
        }
    }
    report(
        "tuning-feasibility",
        worst_res <= 1e-9 && worst_off <= 0.01 && worst_sum <= 1e-10,
        format!("N <= 200: max residual {worst_res:.2e} rad, max |offset| {worst_off:.2e} m, coherent-sum error {worst_sum:.2e}"),
    );
}

#[test]
fn capacity_comparison_headline() {
    let cfg = SystemConfig::default();
    let ds = run_capacity_vs_n(&cfg, &(1..=100).collect::<Vec<_>>(), &[0.0, 30.0]).unwrap();
    let find = |n: f64, p: f64, arch: &str| {
        (0..ds.rows().len())
            .find(|&i| {
                ds.real(i, "n_per_side") == Some(n)
                    && ds.real(i, "p_dbm") == Some(p)
                    && ds.text(i, "architecture").unwrap() == arch
                    && ds.text(i, "scheme").unwrap() == "tuned"
            })
            .expect("row present")
    };
    let mut headline = None;
    let mut all_better = true;
    for n in 1..=100 {
        for p in [0.0, 30.0] {
            let (ic, ie) = (find(n as f64, p, "center"), find(n as f64, p, "end"));
            let (cc, ce) = (
                ds.real(ic, "capacity_bits").unwrap(),
                ds.real(ie, "capacity_bits").unwrap(),
            );
            all_better &= cc > ce;
            if n == 50 && p == 30.0 {
                headline = Some((ds.real(ic, "gain_improvement_db").unwrap(), 10.0 * (cc / ce).log10()));
            }
        }
    }
    let (gain_db, cap_db) = headline.expect("N = 50, 30 dBm row present");
    report(
        "capacity-comparison",
        (gain_db - 3.59).abs() <= 1.5 && all_better,
        format!(
            "effective-gain improvement {gain_db:.2} dB (target 3.59 +/- 1.5), capacity ratio {cap_db:.2} dB, \
             center above end in every tuned row: {all_better}"
        ),
    );
}

fn emit_in_pool(threads: usize, req: &SweepRequest, format: OutputFormat, dir: &Path) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let (paths, _) = pool
        .install(|| run_and_emit(&SystemConfig::default(), req, format, dir))
        .unwrap();
    std::fs::read(&paths[0]).unwrap()
}

#[test]
fn determinism() {
    let requests = [
        SweepRequest::Power {
            p_min: 0.0,
            p_max: 100.0,
            p_step: 10.0,
            n_values: vec![1, 4, 8, 16],
        },
        SweepRequest::Gains {
            n_min: 1,
            n_max: 300,
            scheme: Deployment::Tuned,
        },
        SweepRequest::Gains {
            n_min: 1,
            n_max: 40,
            scheme: Deployment::Uniform,
        },
        SweepRequest::Capacity {
            n_values: (1..=20).collect(),
            p_values: vec![30.0, 0.0],
        },
        SweepRequest::Table1,
    ];
    let root = tempfile::tempdir().unwrap();
    let mut ok = true;
    for (i, req) in requests.iter().enumerate() {
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let (seq_dir, par_dir) = (root.path().join(format!("s{i}")), root.path().join(format!("p{i}")));
            let seq = emit_in_pool(1, req, format, &seq_dir);
            let par = emit_in_pool(4, req, format, &par_dir);
            let ds = replay(&RunManifest::load(seq_dir.join(format!("{}.manifest.json", manifest_stem(req)))).unwrap());
            let rep = match format {
                OutputFormat::Csv => ds.unwrap().to_csv().into_bytes(),
                OutputFormat::Json => ds.unwrap().to_json().into_bytes(),
            };
            ok &= seq == par && seq == rep;
        }
    }
    report(
        "determinism",
        ok,
        format!(
            "{} sweeps x 2 formats: sequential, parallel and replayed outputs identical: {ok}",
            requests.len()
        ),
    );
}

fn manifest_stem(req: &SweepRequest) -> String {
    match req {
        SweepRequest::Gains { scheme, .. } => format!("gains_{}", scheme.as_str()),
        other => other.kind().as_str().to_string(),
    }
}

#[test]
fn center_determinant_factor_nonzero_at_default() {
    // companion to rank-structure: the splitter factor is 1 at l_in = 1.25 lambda_g
    let cfg = SystemConfig::default();
    let ch = effective_channel(&cfg, &build_layout(&cfg, None).unwrap()).unwrap();
    let (_, f2) = determinant_factors(&ch, &cfg.beta, &cfg).unwrap();
    assert!((f2 - C::new(1.0, 0.0)).norm() < 1e-12);
}
