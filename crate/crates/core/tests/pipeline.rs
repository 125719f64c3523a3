use boundmoments::closed_form::{morse_exact, pt_exact, pt_k_from_kappa, quartic_k_at_level};
use boundmoments::moments::{choose_gamma, moment_estimate};
use boundmoments::oracle::solve_eigen;
use boundmoments::quantize::{count_bound_states, quantize, Order};
use boundmoments::wavefield::{default_grid, normalize_field, synthesize};
use boundmoments::{Error, Potential};
use num_complex::Complex64;

fn eps1(p: &Potential, k: f64, n: usize) -> (f64, f64) {
    let eps0 = quantize(p, k, n, Order::Zero, 1.0).unwrap().eps0;
    let gamma = choose_gamma(p, eps0).unwrap();
    (quantize(p, k, n, Order::One, gamma).unwrap().eps1, gamma)
}

#[test]
fn poschl_teller_levels_against_closed_form() {
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(8.9);
    assert_eq!(count_bound_states(&p, k, None).unwrap(), 9);
    for n in 0..9 {
        let exact = pt_exact(k, n).unwrap();
        let e0 = quantize(&p, k, n, Order::Zero, 1.0).unwrap().eps0;
        let (e1, _) = eps1(&p, k, n);
        assert!((e1 - exact).abs() < (e0 - exact).abs() / 100.0, "n = {n}");
    }
}

#[test]
fn oracle_reproduces_morse_levels() {
    let p = Potential::morse();
    let k = 12.0;
    for n in 0..5 {
        let s = solve_eigen(&p, k, n, 1e-11).unwrap();
        assert!((s.eps - morse_exact(k, n).unwrap()).abs() < 1e-9, "n = {n}");
    }
}

#[test]
fn quartic_width_correction_shrinks_error() {
    let p = Potential::quartic();
    for n in [3, 6] {
        let k = quartic_k_at_level(1.0, n);
        let exact = solve_eigen(&p, k, n, 1e-11).unwrap().rms_width();
        let (e, gamma) = eps1(&p, k, n);
        let (w0, w2) = moment_estimate(&p, e, k, gamma).unwrap().rms_width();
        assert!((w2 - exact).abs() < (w0 - exact).abs() / 5.0, "n = {n}");
    }
}

#[test]
fn even_potential_gives_symmetric_field() {
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(8.9);
    for n in [2, 3] {
        let (e, gamma) = eps1(&p, k, n);
        let half = default_grid(&p, e, k, gamma, 101).unwrap();
        let reach = half[0].abs().max(half[100].abs());
        let grid: Vec<f64> = (0..201)
            .map(|i| -reach + 2.0 * reach * i as f64 / 200.0)
            .collect();
        let w = normalize_field(&synthesize(&p, e, k, gamma, 2, &grid).unwrap()).unwrap();
        let peak = w.peak();
        for ((x, u), mirror) in grid.iter().zip(&w.values).zip(w.values.iter().rev()) {
            assert!(
                (u.norm() - mirror.norm()).abs() < 1e-6 * peak,
                "n = {n}, x = {x}"
            );
        }
    }
}

#[test]
fn field_tracks_oracle_for_low_level() {
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(8.9);
    let (e, gamma) = eps1(&p, k, 1);
    let state = solve_eigen(&p, k, 1, 1e-10).unwrap().fine;
    let stride = (state.grid.len() / 500).max(1);
    let grid: Vec<f64> = state.grid.iter().step_by(stride).copied().collect();
    let reference: Vec<f64> = state.u.iter().step_by(stride).copied().collect();
    let nr = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    // One minus the overlap of the unit-normalised samples.
    let infidelity = |order: u8| {
        let w = synthesize(&p, e, k, gamma, order, &grid).unwrap();
        let nw = w.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let overlap: Complex64 = w
            .values
            .iter()
            .zip(&reference)
            .map(|(a, b)| a.conj() * b)
            .sum();
        1.0 - overlap.norm() / (nw * nr)
    };
    let (i0, i2) = (infidelity(0), infidelity(2));
    assert!(i0 < 1e-2 && i2 < i0, "{i0} {i2}");
}

#[test]
fn bad_inputs_are_rejected() {
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(8.9);
    assert!(matches!(
        quantize(&p, k, 20, Order::Zero, 1.0),
        Err(Error::NoBoundState(20))
    ));
    assert!(quantize(&p, k, 0, Order::One, -1.0).is_err());
    assert!(matches!(
        "wobble(1)".parse::<Potential>(),
        Err(Error::UnknownFamily(_))
    ));
    assert!(matches!(
        "poly()".parse::<Potential>(),
        Err(Error::EmptyPolynomial)
    ));
    // An energy between levels does not close the superposition.
    let e = 0.5 * (pt_exact(k, 2).unwrap() + pt_exact(k, 3).unwrap());
    let grid = default_grid(&p, e, k, 1.0, 64).unwrap();
    assert!(matches!(
        synthesize(&p, e, k, 1.0, 0, &grid),
        Err(Error::PhaseMismatch(_))
    ));
}
