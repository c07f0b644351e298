//! Acceptance checks. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::panic;
use std::process::ExitCode;

use gse_core::analysis::{find_dips, half_depth_width, refine_extremum};
use gse_core::anisotropy::{angular_factor, resonance_full, resonance_simple, AnisotropyParams, ANGULAR_SPAN};
use gse_core::fitting::{
    fit, fit_global_geometry, FitData, FitModel, FitOptions, FitProblem, GeometryDataset, GeometryProblem,
    MagnitudeScale, ParamSpec,
};
use gse_core::lamb_pv::{assemble_point_rates, pv_closed, pv_quadrature, Branch};
use gse_core::model::{Emitter, FrequencyGrid, Topology, Waveguide};
use gse_core::multipoint::{build_effective, s_matrix};
use gse_core::nested::{
    coupling_from_phases, eigen_traces, map_nested_vs_detuning, nested_response, s21_nested_matrix, FitFormParams,
    NestedModel, NestedParams,
};
use gse_core::single::{giant_decay, lamb_shift, s21_at, s21_single, PhaseMode, SingleGseParams};
use gse_core::synth::add_complex_noise;
use gse_core::{presets, GseError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn wg() -> Waveguide {
    Waveguide::new(presets::SPEED).unwrap()
}

fn inner(f_res: f64, beta: f64) -> SingleGseParams {
    SingleGseParams::new(presets::KAPPA_I, beta, presets::L_I, f_res, wg()).unwrap()
}

fn outer(f_res: f64, beta: f64) -> SingleGseParams {
    SingleGseParams::new(presets::KAPPA_O, beta, presets::L_O, f_res, wg()).unwrap()
}

/// Outer contacts at 0 and `L_o`, inner contacts centred between them.
fn nested_topology(f_i: f64, f_o: f64, beta_i: f64, beta_o: f64) -> Topology {
    let left = 0.5 * (presets::L_O - presets::L_I);
    Topology::new(vec![
        Emitter::two_point("outer", f_o, beta_o, presets::KAPPA_O, 0.0, presets::L_O).unwrap(),
        Emitter::two_point("inner", f_i, beta_i, presets::KAPPA_I, left, presets::L_I).unwrap(),
    ])
    .unwrap()
}

fn criterion_1() -> Verdict {
    // Every contact separation is a multiple of the quarter outer span, so at
    // this frequency all four contacts radiate in phase.
    let quarter = 0.25 * presets::L_O;
    let f = 5.0 * presets::SPEED / quarter;
    let t = nested_topology(f, f, 0.0, 0.0);
    let m = build_effective(&t, &wg()).unwrap();
    let gamma = m.coupling(0, 1).gamma;
    let kig = m.radiative_rate(1);
    let kog = m.radiative_rate(0);
    let checks = [
        (gamma, 2.89e6, 0.02),
        (kig, 2.98e6, 0.025),
        (kog, 2.78e6, 0.025),
    ];
    let pass = checks.iter().all(|&(v, t, tol)| rel(v, t) <= tol);
    Verdict::new(
        pass,
        format!(
            "Gamma {:.4} MHz vs 2.89 ({:.2}%), kappa_iG {:.4} vs 2.98 ({:.2}%), kappa_oG {:.4} vs 2.78 ({:.2}%)",
            gamma / 1e6,
            100.0 * rel(gamma, 2.89e6),
            kig / 1e6,
            100.0 * rel(kig, 2.98e6),
            kog / 1e6,
            100.0 * rel(kog, 2.78e6)
        ),
    )
}

fn criterion_2() -> Verdict {
    let p = inner(4.0e9, presets::BETA_I);
    let f_pi = 23.0 * presets::SPEED / (2.0 * presets::L_I);
    let decay = giant_decay(&p, f_pi) / p.kappa;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = (presets::KAPPA_I * presets::KAPPA_O).sqrt();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let phi1: f64 = rng.random_range(0.0..20.0);
        // Outer span 2φ1 + φ2 ≡ π with the inner pair centred.
        let turns = (2.0 * phi1 / TAU).ceil();
        let phi2 = PI + turns * TAU - 2.0 * phi1;
        let c = coupling_from_phases(presets::KAPPA_I, presets::KAPPA_O, phi1, phi2, phi1);
        worst = worst.max(c.gamma.abs() / g);
    }
    let pass = decay.abs() <= 1e-12 && worst <= 1e-12;
    Verdict::new(
        pass,
        format!(
            "kappa_G/kappa at phase 23pi = {decay:.1e}; max |Gamma|/sqrt(kappa_i kappa_o) over 1000 phi1 = {worst:.1e} \
             (fitted near-zero values 1.26e-4 and 3.28e-4 MHz)"
        ),
    )
}

fn criterion_3() -> Verdict {
    let bound = 2.0 * (presets::KAPPA_I * presets::KAPPA_O).sqrt();
    let table = presets::coherent_point();
    // Equal total damping on both modes makes the real splitting exactly 2J.
    let damping = 0.5 * (table.total_inner() + table.total_outer());
    let p = FitFormParams {
        beta_i: damping - table.kappa_ig,
        beta_o: damping - table.kappa_og,
        gamma: 0.0,
        ..table
    };
    let split = eigen_traces(&p, &[p.f_i]).unwrap().real_splitting(0);
    let with_table_damping = eigen_traces(&FitFormParams { gamma: 0.0, ..table }, &[table.f_i])
        .unwrap()
        .real_splitting(0);
    let pass = table.j.abs() <= bound && (split - 2.0 * table.j).abs() <= 1e-6 * 2.0 * table.j;
    Verdict::new(
        pass,
        format!(
            "|J| = {:.3} <= {:.4} MHz; splitting {:.9} MHz at equal damping (fitted dampings give {:.4} MHz)",
            table.j / 1e6,
            bound / 1e6,
            split / 1e6,
            with_table_damping / 1e6
        ),
    )
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_rate: f64 = 0.0;
    let mut worst_coupling: f64 = 0.0;
    for _ in 0..100 {
        let lo: f64 = rng.random_range(0.05..0.3);
        let li = lo * rng.random_range(0.2..0.9);
        let a = (lo - li) * rng.random_range(0.05..0.95);
        // Spans as the engine sees them after placing contacts at absolute positions.
        let li = (a + li) - a;
        let (ki, ko) = (rng.random_range(0.1e6..2e6), rng.random_range(0.1e6..2e6));
        let (fi, fo) = (rng.random_range(3.5e9..5.5e9), rng.random_range(3.5e9..5.5e9));
        let (bi, bo) = (rng.random_range(0.0..2e6), rng.random_range(0.0..2e6));
        let t = Topology::new(vec![
            Emitter::two_point("outer", fo, bo, ko, 0.0, lo).unwrap(),
            Emitter::two_point("inner", fi, bi, ki, a, li).unwrap(),
        ])
        .unwrap();
        let m = build_effective(&t, &wg()).unwrap();
        let so = SingleGseParams::new(ko, bo, lo, fo, wg()).unwrap();
        let si = SingleGseParams::new(ki, bi, li, fi, wg()).unwrap();
        for (j, s) in [(0, &so), (1, &si)] {
            worst_rate = worst_rate
                .max((m.radiative_rate(j) - giant_decay(s, s.f_res)).abs() / s.kappa)
                .max((m.lamb_shift(j) - lamb_shift(s, s.f_res)).abs() / s.kappa);
        }
        let k = TAU * 0.5 * (fi + fo) / presets::SPEED;
        let c = coupling_from_phases(ki, ko, k * a, k * li, k * (lo - (a + li)));
        let e = m.coupling(0, 1);
        let g = (ki * ko).sqrt();
        worst_coupling = worst_coupling.max((e.j - c.j).abs() / g).max((e.gamma - c.gamma).abs() / g);
    }

    let (fi, fo) = (4.35e9, 4.36e9);
    let m = build_effective(&nested_topology(fi, fo, presets::BETA_I, presets::BETA_O), &wg()).unwrap();
    let p = NestedParams::symmetric(inner(fi, presets::BETA_I), outer(fo, presets::BETA_O)).unwrap();
    let grid = FrequencyGrid::new(4.33e9, 4.38e9, 2001).unwrap();
    let engine = s_matrix(&m, &grid, PhaseMode::Resonance).unwrap();
    let closed = s21_nested_matrix(&p, &grid, PhaseMode::Resonance).unwrap();
    let mut worst_s: f64 = 0.0;
    for (k, f) in grid.frequencies().into_iter().enumerate() {
        let (_, r) = nested_response(&p, f, PhaseMode::Resonance).unwrap();
        worst_s = worst_s
            .max((engine.transmission.s21[k] - closed.s21[k]).norm())
            .max((engine.reflection[k] - r).norm());
    }
    let pass = worst_rate <= 1e-12 && worst_coupling <= 1e-12 && worst_s <= 1e-12;
    Verdict::new(
        pass,
        format!(
            "100 geometries: rate error {worst_rate:.1e}, coupling error {worst_coupling:.1e} (relative); \
             S-matrix deviation over 2001 points {worst_s:.1e}"
        ),
    )
}

fn random_lossless_topology(rng: &mut ChaCha8Rng) -> Topology {
    loop {
        let emitters: Vec<Emitter> = (0..3)
            .map(|j| {
                let n = rng.random_range(2..=3);
                let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.3)).collect();
                x.sort_by(f64::total_cmp);
                let kappas = (0..n).map(|_| rng.random_range(0.1e6..1.5e6)).collect();
                Emitter::new(format!("e{j}"), rng.random_range(4.2e9..4.5e9), 0.0, kappas, x).unwrap()
            })
            .collect();
        if let Ok(t) = Topology::new(emitters) {
            return t;
        }
    }
}

fn criterion_5() -> Verdict {
    let grid = FrequencyGrid::new(4.25e9, 4.45e9, 2001).unwrap();
    let mut worst_single: f64 = 0.0;
    let p = inner(4.35e9, 0.0);
    for mode in [PhaseMode::Resonance, PhaseMode::Probe] {
        for f in grid.frequencies() {
            let t = s21_at(&p, f, mode).unwrap();
            worst_single = worst_single.max((t.norm_sqr() + (t - 1.0).norm_sqr() - 1.0).abs());
        }
    }
    let q = NestedParams::symmetric(inner(4.35e9, 0.0), outer(4.36e9, 0.0)).unwrap();
    let mut worst_nested: f64 = 0.0;
    for f in grid.frequencies() {
        let (t, r) = nested_response(&q, f, PhaseMode::Probe).unwrap();
        worst_nested = worst_nested.max((t.norm_sqr() + r.norm_sqr() - 1.0).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_general: f64 = 0.0;
    for _ in 0..10 {
        let m = build_effective(&random_lossless_topology(&mut rng), &wg()).unwrap();
        let s = s_matrix(&m, &grid, PhaseMode::Probe).unwrap();
        for (t, r) in s.transmission.s21.iter().zip(&s.reflection) {
            worst_general = worst_general.max((t.norm_sqr() + r.norm_sqr() - 1.0).abs());
        }
    }
    let pass = worst_single <= 1e-12 && worst_nested <= 1e-12 && worst_general <= 1e-12;
    Verdict::new(
        pass,
        format!("max ||t|^2+|r|^2-1|: single {worst_single:.1e}, nested {worst_nested:.1e}, 10 general {worst_general:.1e}"),
    )
}

fn criterion_6() -> Verdict {
    let p = inner(4.35e9, presets::BETA_I);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let f = 3.0e9 + 3.0e6 * k as f64;
        let x = giant_decay(&p, f) / (2.0 * p.kappa) - 1.0;
        let y = lamb_shift(&p, f) / p.kappa;
        worst = worst.max((x * x + y * y - 1.0).abs());
    }
    Verdict::new(worst <= 1e-12, format!("max circle residual over 1000 frequencies {worst:.1e}"))
}

fn criterion_7() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for k in 0..100 {
        let x = 0.5 + 49.5 * k as f64 / 99.0;
        for branch in [Branch::Plus, Branch::Minus] {
            let c = pv_closed(x, branch).unwrap();
            match pv_quadrature(x, branch) {
                Ok(q) => worst = worst.max((c.a - q.a).abs()).max((c.b - q.b).abs()),
                Err(_) => failures += 1,
            }
        }
    }
    let kappa = presets::KAPPA_I;
    let mut assembly: f64 = 0.0;
    for k in 0..1000 {
        let phi = 0.05 * k as f64;
        let (decay, shift) = assemble_point_rates(&[(0.0, kappa), (phi, kappa)]);
        assembly = assembly
            .max((decay - 2.0 * kappa * (1.0 + phi.cos())).abs() / kappa)
            .max((shift - kappa * phi.sin()).abs() / kappa);
    }
    let pass = failures == 0 && worst <= 1e-6 && assembly <= 1e-12;
    Verdict::new(
        pass,
        format!(
            "closed vs quadrature max abs error {worst:.1e} over 100 x in [0.5, 50] x 2 branches ({failures} quadrature failures); \
             assembly error {assembly:.1e}"
        ),
    )
}

fn criterion_8() -> Verdict {
    let theta_min = 0.5 * (-1.0f64 / 3.0).acos();
    let max = angular_factor(0.0);
    let min = angular_factor(theta_min);
    let mut scan_lo = f64::INFINITY;
    let mut scan_hi = f64::NEG_INFINITY;
    for k in 0..=100_000 {
        let v = angular_factor(PI * k as f64 / 100_000.0);
        scan_lo = scan_lo.min(v);
        scan_hi = scan_hi.max(v);
    }
    let extrema_ok = (max - 2.0).abs() <= 1e-12
        && (min + 4.0 / 3.0).abs() <= 1e-12
        && (max - min - 10.0 / 3.0).abs() <= 1e-12
        && (ANGULAR_SPAN - 10.0 / 3.0).abs() <= 1e-12
        && scan_hi <= 2.0 + 1e-12
        && scan_lo >= -4.0 / 3.0 - 1e-12;

    let ha = AnisotropyParams::anisotropy_for_span(330e6, 28e9);
    let p = AnisotropyParams::new(0.155, ha).unwrap();
    let thetas: Vec<f64> = (0..=3600).map(|k| PI * k as f64 / 3600.0).collect();
    let span = |law: &dyn Fn(f64) -> f64| {
        let v: Vec<f64> = thetas.iter().map(|&t| law(t)).collect();
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let simple_span = span(&|t| resonance_simple(&p, t));
    let full_span = span(&|t| resonance_full(&p, t).unwrap());

    let errors: Vec<f64> = [0.02, 0.01, 0.005, 0.0025]
        .iter()
        .map(|&ratio| {
            let q = AnisotropyParams::new(0.155, ratio * 0.155).unwrap();
            thetas
                .iter()
                .map(|&t| (resonance_full(&q, t).unwrap() - resonance_simple(&q, t)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let quadratic = orders.iter().all(|o| (o - 2.0).abs() <= 0.1);
    let pass = extrema_ok && rel(simple_span, 330e6) <= 0.01 && rel(full_span, 330e6) <= 0.01 && quadratic;
    Verdict::new(
        pass,
        format!(
            "extrema {max:.15} / {min:.15}; H_A = {:.4} mT gives span {:.3} MHz (first-order law), {:.3} MHz (full law); \
             convergence orders {:?}",
            ha * 1e3,
            simple_span / 1e6,
            full_span / 1e6,
            orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_9() -> Verdict {
    let f_res = 11.0 * presets::SPEED / presets::L_I;
    let p = inner(f_res, presets::BETA_I);
    let width = giant_decay(&p, f_res) + p.beta;
    let grid = FrequencyGrid::centered(f_res, 20.0 * width, 2001).unwrap();
    let clean = s21_single(&p, &grid, PhaseMode::Resonance).unwrap();
    let single = |data: FitData, k0: f64, b0: f64| {
        let model = FitModel::Single { base: p.clone(), mode: PhaseMode::Resonance };
        fit(&FitProblem::new(data, model, vec![ParamSpec::new("kappa", k0), ParamSpec::new("beta", b0)]))
    };

    let r = single(FitData::complex(&clean).unwrap(), 1.3 * p.kappa, 0.7 * p.beta).unwrap();
    let noiseless = rel(r.value("kappa").unwrap(), p.kappa).max(rel(r.value("beta").unwrap(), p.beta));

    let mut within = 0;
    for seed in 0..100u64 {
        let noisy = add_complex_noise(&clean, 0.01, seed).unwrap();
        if let Ok(r) = single(FitData::complex(&noisy).unwrap(), 1.5 * p.kappa, 1.5 * p.beta) {
            if rel(r.value("kappa").unwrap(), p.kappa) < 0.05 && rel(r.value("beta").unwrap(), p.beta) < 0.05 {
                within += 1;
            }
        }
    }

    let datasets: Vec<GeometryDataset> = (0..8)
        .map(|k| {
            let f = 4.0e9 + 0.1e9 * k as f64;
            let g = FrequencyGrid::centered(f, 20e6, 801).unwrap();
            let s = s21_single(&inner(f, presets::BETA_I), &g, PhaseMode::Resonance).unwrap();
            GeometryDataset { f_res: f, data: FitData::complex(&s).unwrap() }
        })
        .collect();
    let geometry = |extra: ParamSpec| {
        fit_global_geometry(&GeometryProblem {
            datasets: datasets.clone(),
            base: inner(4.0e9, presets::BETA_I),
            mode: PhaseMode::Resonance,
            free: vec![
                ParamSpec::new("kappa", 0.9 * presets::KAPPA_I),
                ParamSpec::new("beta", 1.1 * presets::BETA_I),
                extra,
            ],
            scale: MagnitudeScale::Linear,
            options: FitOptions::default(),
        })
    };
    let length = geometry(ParamSpec::new("length", 0.997 * presets::L_I)).unwrap().value("length").unwrap();
    let speed = geometry(ParamSpec::new("speed", 1.003 * presets::SPEED)).unwrap().value("speed").unwrap();
    let joint = fit_global_geometry(&GeometryProblem {
        datasets: datasets.clone(),
        base: inner(4.0e9, presets::BETA_I),
        mode: PhaseMode::Resonance,
        free: vec![
            ParamSpec::new("kappa", presets::KAPPA_I),
            ParamSpec::new("length", presets::L_I),
            ParamSpec::new("speed", presets::SPEED),
        ],
        scale: MagnitudeScale::Linear,
        options: FitOptions::default(),
    });
    let joint_flagged = matches!(joint, Err(GseError::Unidentifiable { .. }));

    let pass = noiseless <= 1e-8
        && within >= 95
        && rel(length, presets::L_I) <= 1e-6
        && rel(speed, presets::SPEED) <= 1e-6
        && joint_flagged;
    Verdict::new(
        pass,
        format!(
            "noiseless error {noiseless:.1e}; {within}/100 noisy fits within 5%; L = {length:.9} m, v = {speed:.6e} m/s \
             (each fitted with the other held); joint L and v reported unidentifiable: {joint_flagged}"
        ),
    )
}

fn detuning_map(p: &FitFormParams, half_span: f64) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let grid = FrequencyGrid::centered(p.f_i, half_span, 4001).unwrap();
    let f_o: Vec<f64> = (0..201).map(|k| p.f_i - 10e6 + 0.1e6 * k as f64).collect();
    let map = map_nested_vs_detuning(&NestedModel::FitForm(*p), &f_o, &grid).unwrap();
    let mags = map.columns.iter().map(|c| c.spectrum.magnitude()).collect();
    (f_o, mags, grid.frequencies())
}

fn criterion_10a() -> Verdict {
    let p = presets::coherent_point();
    let (f_o, columns, freqs) = detuning_map(&p, 15e6);
    let mut min_sep = f64::INFINITY;
    let mut with_two = 0;
    let mut two_at_crossing = false;
    for (mags, &fo) in columns.iter().zip(&f_o) {
        let dips = find_dips(&freqs, mags, 0.02);
        if dips.len() < 2 {
            continue;
        }
        with_two += 1;
        two_at_crossing |= (fo - p.f_i).abs() < 1.0;
        let a = refine_extremum(&freqs, mags, dips[0].index);
        let b = refine_extremum(&freqs, mags, dips[1].index);
        min_sep = min_sep.min((a - b).abs());
    }
    let target = 2.0 * p.j;
    let pass = two_at_crossing && rel(min_sep, target) <= 0.05;
    Verdict::new(
        pass,
        format!(
            "two dips in {with_two}/{} columns, including zero detuning: {two_at_crossing}; minimum dip separation {:.4} MHz vs 2J = {:.2} MHz ({:.1}%, tolerance 5%)",
            columns.len(),
            min_sep / 1e6,
            target / 1e6,
            100.0 * rel(min_sep, target)
        ),
    )
}

fn criterion_10b() -> Verdict {
    let p = presets::dissipative_point();
    let grid = FrequencyGrid::centered(p.f_i, 40e6, 8001).unwrap();
    let freqs = grid.frequencies();
    let mags = gse_core::nested::s21_nested_fitform(&p, &grid).unwrap().magnitude();
    let dips = find_dips(&freqs, &mags, 0.02);
    let width = dips.first().and_then(|d| half_depth_width(&freqs, &mags, d.index, 1.0)).unwrap_or(0.0);
    let sum = p.kappa_ig + p.kappa_og + p.beta_i + p.beta_o;
    let pass = dips.len() == 1 && width >= 0.9 * sum;
    Verdict::new(
        pass,
        format!(
            "{} dip(s) at zero detuning; full width at half depth {:.3} MHz vs kappa_iG + kappa_oG + beta_i + beta_o = {:.2} MHz",
            dips.len(),
            width / 1e6,
            sum / 1e6
        ),
    )
}

/// The command-line example for the same map: `map --sweep detuning` at the
/// coherent point, dip splitting read back from the emitted CSV at zero detuning.
fn cli_detuning_example() -> Verdict {
    use gse_cli::args::Cli;
    use gse_cli::clap::Parser;

    let dir = std::env::temp_dir().join(format!("gse-acceptance-{}", std::process::id()));
    let cli = Cli::parse_from([
        "gse", "map", "--sweep", "detuning", "--values=-2MHz:2MHz:5", "--span", "15MHz", "--points", "4001",
        "--out", dir.to_str().unwrap(),
    ]);
    let run = gse_cli::run::run(&cli);
    let csv = std::fs::read_to_string(dir.join("map.csv"));
    let _ = std::fs::remove_dir_all(&dir);
    let (Ok(_), Ok(csv)) = (run, csv) else {
        return Verdict::new(false, "command failed".into());
    };
    let (mut f, mut m) = (Vec::new(), Vec::new());
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if v[0] == 0.0 {
            f.push(v[1]);
            m.push(v[2]);
        }
    }
    let dips = find_dips(&f, &m, 0.02);
    if dips.len() < 2 {
        return Verdict::new(false, format!("{} dip(s) at zero detuning", dips.len()));
    }
    let split = (refine_extremum(&f, &m, dips[0].index) - refine_extremum(&f, &m, dips[1].index)).abs();
    let target = 2.0 * presets::coherent_point().j;
    Verdict::new(
        rel(split, target) <= 0.05,
        format!(
            "dip splitting at zero detuning {:.4} MHz vs 2J = {:.2} MHz ({:.1}%, tolerance 5%)",
            split / 1e6,
            target / 1e6,
            100.0 * rel(split, target)
        ),
    )
}

fn main() -> ExitCode {
    let checks: [(&str, &str, fn() -> Verdict); 12] = [
        ("1", "pure-point coupling values", criterion_1),
        ("2", "decoupling identities", criterion_2),
        ("3", "coherent-coupling bound and eigen splitting", criterion_3),
        ("4", "multipoint engine vs closed forms", criterion_4),
        ("5", "unitarity without intrinsic loss", criterion_5),
        ("6", "decay/shift circle", criterion_6),
        ("7", "principal-value integrals", criterion_7),
        ("8", "anisotropy tuning", criterion_8),
        ("9", "fit round trips", criterion_9),
        ("10a", "level repulsion map at 4.35 GHz", criterion_10a),
        ("10b", "merged dip at 4.96 GHz", criterion_10b),
        ("cli", "map --sweep detuning example", cli_detuning_example),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, check) in checks {
        let verdict = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::new(false, format!("panicked: {msg}"))
        });
        if !verdict.pass {
            failed += 1;
        }
        println!(
            "criterion {id:<3} {} {title}: {}",
            if verdict.pass { "PASS" } else { "FAIL" },
            verdict.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
