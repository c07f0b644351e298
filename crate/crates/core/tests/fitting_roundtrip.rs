use gse_core::fitting::{
    decay_curve_period, extract_decay_curve, fit, fit_global_geometry, initial_guess_single, FitData, FitModel,
    FitOptions, FitProblem, GeometryDataset, GeometryProblem, LorentzianParams, MagnitudeScale, ParamSpec,
};
use gse_core::model::{FrequencyGrid, Waveguide};
use gse_core::nested::s21_nested_fitform;
use gse_core::single::{giant_decay, s21_single, PhaseMode, SingleGseParams};
use gse_core::synth::add_complex_noise;
use gse_core::{presets, GseError};

fn inner(f_res: f64) -> SingleGseParams {
    SingleGseParams::new(presets::KAPPA_I, presets::BETA_I, presets::L_I, f_res, Waveguide::new(presets::SPEED).unwrap())
        .unwrap()
}

/// Resonance where the two contacts add in phase.
fn bright_resonance() -> f64 {
    11.0 * presets::SPEED / presets::L_I
}

fn linewidth(p: &SingleGseParams) -> f64 {
    giant_decay(p, p.f_res) + p.beta
}

fn single_fit(p: &SingleGseParams, data: FitData, kappa0: f64, beta0: f64) -> gse_core::Result<gse_core::fitting::FitResult> {
    let model = FitModel::Single { base: p.clone(), mode: PhaseMode::Resonance };
    fit(&FitProblem::new(data, model, vec![ParamSpec::new("kappa", kappa0), ParamSpec::new("beta", beta0)]))
}

#[test]
fn noisy_single_round_trips_mostly_within_five_percent() {
    let p = inner(bright_resonance());
    let grid = FrequencyGrid::centered(p.f_res, 20.0 * linewidth(&p), 2001).unwrap();
    let clean = s21_single(&p, &grid, PhaseMode::Resonance).unwrap();
    let mut passed = 0;
    for seed in 0..100u64 {
        let noisy = add_complex_noise(&clean, 0.01, seed).unwrap();
        let r = single_fit(&p, FitData::complex(&noisy).unwrap(), 1.5 * p.kappa, 1.5 * p.beta).unwrap();
        let ok = (r.value("kappa").unwrap() / p.kappa - 1.0).abs() < 0.05
            && (r.value("beta").unwrap() / p.beta - 1.0).abs() < 0.05;
        passed += ok as usize;
    }
    assert!(passed >= 95, "{passed}/100 within 5%");
}

#[test]
fn nested_dissipative_point_recovers_gamma_and_j() {
    let truth = presets::dissipative_point();
    let grid = FrequencyGrid::centered(truth.f_i, 30e6, 2001).unwrap();
    let clean = s21_nested_fitform(&truth, &grid).unwrap();
    for (sigma, seed) in [(0.0, 0), (0.01, 11)] {
        let data = FitData::complex(&add_complex_noise(&clean, sigma, seed).unwrap()).unwrap();
        let start = gse_core::nested::FitFormParams { j: 0.3e6, gamma: 2.0e6, ..truth };
        let free = vec![ParamSpec::new("gamma", 2.0e6), ParamSpec::new("j", 0.3e6)];
        let r = fit(&FitProblem::new(data, FitModel::Nested(start), free)).unwrap();
        assert!((r.value("gamma").unwrap() / 2.89e6 - 1.0).abs() < 0.02, "sigma {sigma}");
        assert!(r.value("j").unwrap().abs() < 0.05e6, "sigma {sigma}");
    }
}

#[test]
fn nested_coherent_point_round_trip() {
    let truth = presets::coherent_point();
    let grid = FrequencyGrid::centered(truth.f_i, 30e6, 2001).unwrap();
    let data = FitData::complex(&s21_nested_fitform(&truth, &grid).unwrap()).unwrap();
    let start = gse_core::nested::FitFormParams { j: 0.8e6, kappa_ig: 1.4e6, ..truth };
    let free = vec![ParamSpec::new("j", 0.8e6), ParamSpec::new("kappa_ig", 1.4e6)];
    let r = fit(&FitProblem::new(data, FitModel::Nested(start), free)).unwrap();
    assert!((r.value("j").unwrap() / truth.j - 1.0).abs() < 1e-8);
    assert!((r.value("kappa_ig").unwrap() / truth.kappa_ig - 1.0).abs() < 1e-8);
}

fn geometry_datasets(sigma: f64, frequencies: &[f64]) -> Vec<GeometryDataset> {
    frequencies
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let p = inner(f);
            let grid = FrequencyGrid::centered(f, 20e6, 801).unwrap();
            let s = add_complex_noise(&s21_single(&p, &grid, PhaseMode::Resonance).unwrap(), sigma, 100 + k as u64).unwrap();
            GeometryDataset { f_res: f, data: FitData::complex(&s).unwrap() }
        })
        .collect()
}

fn eight_resonances() -> Vec<f64> {
    (0..8).map(|k| 4.0e9 + 0.1e9 * k as f64).collect()
}

fn geometry_problem(datasets: Vec<GeometryDataset>, free: Vec<ParamSpec>) -> GeometryProblem {
    GeometryProblem {
        datasets,
        base: inner(4.0e9),
        mode: PhaseMode::Resonance,
        free,
        scale: MagnitudeScale::Linear,
        options: FitOptions::default(),
    }
}

#[test]
fn geometry_fit_recovers_length_and_speed_with_one_anchor() {
    let data = geometry_datasets(0.0, &eight_resonances());
    let rates = || vec![ParamSpec::new("kappa", 0.9 * presets::KAPPA_I), ParamSpec::new("beta", 1.1 * presets::BETA_I)];

    let mut free = rates();
    free.push(ParamSpec::new("speed", 1.003 * presets::SPEED));
    let r = fit_global_geometry(&geometry_problem(data.clone(), free)).unwrap();
    assert!((r.value("speed").unwrap() / presets::SPEED - 1.0).abs() < 1e-6);
    assert_eq!(r.dataset_residuals.len(), 8);

    let mut free = rates();
    free.push(ParamSpec::new("length", 0.997 * presets::L_I));
    let r = fit_global_geometry(&geometry_problem(data, free)).unwrap();
    assert!((r.value("length").unwrap() / presets::L_I - 1.0).abs() < 1e-6);
}

#[test]
fn geometry_fit_with_noise_stays_within_one_percent() {
    let data = geometry_datasets(0.01, &eight_resonances());
    let free = vec![
        ParamSpec::new("kappa", presets::KAPPA_I),
        ParamSpec::new("beta", presets::BETA_I),
        ParamSpec::new("speed", 1.003 * presets::SPEED),
    ];
    let r = fit_global_geometry(&geometry_problem(data, free)).unwrap();
    assert!((r.value("speed").unwrap() / presets::SPEED - 1.0).abs() < 0.01);
}

#[test]
fn geometry_fit_rejects_degenerate_inputs() {
    let free = || vec![ParamSpec::new("kappa", presets::KAPPA_I), ParamSpec::new("length", presets::L_I)];
    let same = geometry_datasets(0.0, &[4.2e9; 4]);
    assert!(matches!(fit_global_geometry(&geometry_problem(same, free())), Err(GseError::Degenerate(_))));
    let narrow = geometry_datasets(0.0, &[4.2e9, 4.25e9, 4.3e9]);
    assert!(matches!(fit_global_geometry(&geometry_problem(narrow, free())), Err(GseError::Degenerate(_))));
    let two = geometry_datasets(0.0, &[4.0e9, 4.5e9]);
    assert!(matches!(fit_global_geometry(&geometry_problem(two, free())), Err(GseError::InvalidInput(_))));

    let all = vec![
        ParamSpec::new("kappa", presets::KAPPA_I),
        ParamSpec::new("beta", presets::BETA_I),
        ParamSpec::new("length", presets::L_I),
        ParamSpec::new("speed", presets::SPEED),
    ];
    match fit_global_geometry(&geometry_problem(geometry_datasets(0.0, &eight_resonances()), all)) {
        Err(GseError::Unidentifiable { names }) => {
            assert!(names.iter().any(|n| n == "length") && names.iter().any(|n| n == "speed"));
        }
        other => panic!("expected unidentifiable, got {other:?}"),
    }
}

#[test]
fn rates_scale_with_frequency_axis() {
    let p = inner(bright_resonance());
    let grid = FrequencyGrid::centered(p.f_res, 20.0 * linewidth(&p), 1001).unwrap();
    let noisy = add_complex_noise(&s21_single(&p, &grid, PhaseMode::Resonance).unwrap(), 0.01, 5).unwrap();
    let base = single_fit(&p, FitData::complex(&noisy).unwrap(), p.kappa, p.beta).unwrap();

    let factor = 10.0;
    let stretched: Vec<f64> = noisy.frequencies.iter().map(|f| p.f_res + factor * (f - p.f_res)).collect();
    let data = FitData::new(stretched, gse_core::fitting::Observations::Complex(noisy.s21.clone())).unwrap();
    let q = SingleGseParams { kappa: factor * p.kappa, beta: factor * p.beta, ..p.clone() };
    let scaled = single_fit(&q, data, q.kappa, q.beta).unwrap();
    for name in ["kappa", "beta"] {
        let ratio = scaled.value(name).unwrap() / base.value(name).unwrap();
        assert!((ratio / factor - 1.0).abs() < 1e-6, "{name}: {ratio}");
    }
}

#[test]
fn sigmas_shrink_as_inverse_root_n() {
    let p = inner(bright_resonance());
    let half_span = 20.0 * linewidth(&p);
    let sigma_at = |n: usize| {
        let grid = FrequencyGrid::centered(p.f_res, half_span, n).unwrap();
        let noisy = add_complex_noise(&s21_single(&p, &grid, PhaseMode::Resonance).unwrap(), 0.01, n as u64).unwrap();
        let r = single_fit(&p, FitData::complex(&noisy).unwrap(), p.kappa, p.beta).unwrap();
        r.sigma("kappa").unwrap()
    };
    let s: Vec<f64> = [500, 2000, 8000].iter().map(|&n| sigma_at(n)).collect();
    for w in s.windows(2) {
        assert!((w[0] / w[1] / 2.0 - 1.0).abs() < 0.2, "{s:?}");
    }
}

#[test]
fn decay_curve_follows_interference_law() {
    let reference = inner(4.0e9);
    let fits: Vec<(f64, gse_core::fitting::FitResult)> = (0..81)
        .map(|k| {
            let f_res = 3.6e9 + 25e6 * k as f64;
            let p = inner(f_res);
            let grid = FrequencyGrid::centered(f_res, 25e6, 801).unwrap();
            let data = FitData::complex(&s21_single(&p, &grid, PhaseMode::Resonance).unwrap()).unwrap();
            let g = initial_guess_single(&data, p.length, p.waveguide.speed).unwrap();
            let start = LorentzianParams { f_center: g.f_dip, kappa_g: g.kappa_g.max(1e3), beta: g.beta };
            let free = vec![
                ParamSpec::new("f_center", start.f_center),
                ParamSpec::new("kappa_g", start.kappa_g),
                ParamSpec::new("beta", start.beta),
            ];
            (f_res, fit(&FitProblem::new(data, FitModel::Lorentzian(start), free)).unwrap())
        })
        .collect();
    let rows = extract_decay_curve(&fits, &reference).unwrap();
    for row in &rows {
        assert!((row.kappa_g - row.predicted).abs() < 1e-6 * 4.0 * presets::KAPPA_I, "{row:?}");
    }
    let period = decay_curve_period(&rows).unwrap();
    assert!((period / reference.period() - 1.0).abs() < 0.02, "{period}");
}
