use std::f64::consts::PI;

use painleve::asymptotics::predict_poles;
use painleve::harness::{fit_params, run_compare, AsymParams, Preset};
use painleve::io::{read_trajectory, write_grid, write_trajectory};
use painleve::ode::{integrate, IntegratorConfig, LaurentSeries, PoleData, Start, State, Trajectory};
use painleve::stokes::{classify_s2, invert_osc, invert_sing, sing_params, SolutionClass, DEFAULT_CLASSIFY_TOL};

// y, y' of the y(0) = y'(0) = 0 solution from a 30-digit Taylor integrator
const ZERO_IC_REFERENCE: [(f64, f64, f64); 4] = [
    (-1.0, -0.16372821373320165225, 0.47667899192065914982),
    (-2.0, -0.8008771425174338327, 0.28854495281316945049),
    (-5.0, -0.73368511793080761508, -0.32025490840811864845),
    (-10.0, -1.2359892546800032898, -0.68000838084400565751),
];

#[test]
fn zero_ic_matches_reference() {
    let cfg = IntegratorConfig::default();
    for &(x, y, dy) in &ZERO_IC_REFERENCE {
        let t = integrate(Start::Point(State::new(0.0, 0.0, 0.0)), x, &cfg).unwrap();
        let s = t.last().state;
        assert_eq!(s.x, x);
        assert!((s.y - y).abs() < 1e-9, "x={x}: {} vs {y}", s.y);
        assert!((s.dy - dy).abs() < 1e-9, "x={x}: {} vs {dy}", s.dy);
    }
}

#[test]
fn zero_pole_count_matches_lattice() {
    let cfg = IntegratorConfig::default();
    let t = integrate(Preset::ZeroPole.start(), -30.0, &cfg).unwrap();
    let p = sing_params(Preset::ZeroPole.s2()).unwrap();
    let predicted = predict_poles(&p, 1, 40)
        .unwrap()
        .into_iter()
        .filter(|&(_, x)| x > -30.0)
        .count();
    assert!(
        t.crossings.len().abs_diff(predicted) <= 1,
        "{} vs {predicted}",
        t.crossings.len()
    );
    assert!(t.crossings.iter().all(|c| c.consistent));
}

#[test]
fn crossing_a_pole_is_reversible() {
    let cfg = IntegratorConfig::default();
    let a = integrate(Preset::ZeroPole.start(), -2.0, &cfg).unwrap().last().state;
    let fwd = integrate(Start::Point(a), -3.5, &cfg).unwrap();
    assert_eq!(fwd.crossings.len(), 1);
    let back = integrate(Start::Point(fwd.last().state), -2.0, &cfg).unwrap();
    assert_eq!(back.crossings.len(), 1);
    let c = back.last().state;
    let tol = 100.0 * cfg.rtol;
    assert!((c.y - a.y).abs() <= tol * a.y.abs().max(1.0), "{c:?} {a:?}");
    assert!((c.dy - a.dy).abs() <= tol * a.dy.abs().max(1.0), "{c:?} {a:?}");
}

#[test]
fn hamiltonian_changes_by_minus_integral_of_y() {
    let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
    let t = integrate(Preset::ZeroIc.start(), -40.0, &cfg).unwrap();
    let mut worst: f64 = 0.0;
    for w in t.samples.windows(2) {
        let (a, b) = (&w[0].state, &w[1].state);
        if a.x > -1.0 {
            continue;
        }
        let h = b.x - a.x;
        // trapezoid with endpoint slope correction
        let integral = h / 2.0 * (a.y + b.y) + h * h / 12.0 * (a.dy - b.dy);
        let defect = (w[1].hamiltonian - w[0].hamiltonian + integral).abs();
        worst = worst.max(defect / h.powi(4));
    }
    assert!(worst < 1.0, "{worst}");
}

#[test]
fn hamiltonian_residue_at_poles() {
    let cfg = IntegratorConfig::default();
    let t = integrate(Preset::ZeroPole.start(), -20.0, &cfg).unwrap();
    for c in &t.crossings {
        let pd = c.pole;
        // samples approaching the pole inside the fit band
        let pts: Vec<(f64, f64)> = t.samples[..c.resume_index]
            .iter()
            .map(|s| (s.state.x - pd.p, s.hamiltonian))
            .filter(|&(tt, _)| (0.05..=0.5).contains(&tt))
            .map(|(tt, h)| (tt, tt * (h + 14.0 * pd.h)))
            .collect();
        assert!(pts.len() >= 6, "{} samples near {}", pts.len(), pd.p);
        // g(t) = 1 + g4 t⁴ + g5 t⁵ + ...; extrapolate to t = 0
        let g0 = extrapolate(&pts);
        assert!((g0 - 1.0).abs() < 1e-4, "pole {}: {g0}", pd.p);
    }
    let s = LaurentSeries::new(PoleData::new(-4.0, 1.5), 20).unwrap();
    let dev = |tt: f64| (tt * (s.eval(-4.0 + tt).unwrap().hamiltonian() + 21.0) - 1.0).abs();
    assert!(dev(0.02) < 1e-6 && dev(0.02) < dev(0.1) && dev(0.1) < dev(0.3));
}

fn extrapolate(pts: &[(f64, f64)]) -> f64 {
    // least squares on (1, t⁴, t⁵, t⁶)
    let mut m = [[0.0; 5]; 4];
    for &(t, g) in pts {
        let r = [1.0, t.powi(4), t.powi(5), t.powi(6)];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += r[i] * r[j];
            }
            m[i][4] += r[i] * g;
        }
    }
    for c in 0..4 {
        for i in 0..4 {
            if i != c {
                let f = m[i][c] / m[c][c];
                for j in c..5 {
                    m[i][j] -= f * m[c][j];
                }
            }
        }
    }
    m[0][4] / m[0][0]
}

#[test]
fn compare_is_deterministic() {
    let cfg = IntegratorConfig::default();
    let dump = || {
        let r = run_compare(Preset::ZeroPole, -20.0, &cfg).unwrap();
        let mut grid = Vec::new();
        write_grid(&mut grid, &r.grid).unwrap();
        let mut traj = Vec::new();
        write_trajectory(&mut traj, &r.trajectory).unwrap();
        (grid, traj, r.to_json("t.csv", "g.csv").to_string())
    };
    assert_eq!(dump(), dump());
}

#[test]
fn recovery_improves_with_depth() {
    let cfg = IntegratorConfig::default();
    let err = |x_min: f64| {
        let r = run_compare(Preset::ZeroIc, x_min, &cfg).unwrap();
        let AsymParams::Oscillatory(want) = r.params else {
            panic!()
        };
        let AsymParams::Oscillatory(got) = fit_params(&r.trajectory, r.class).unwrap() else {
            panic!()
        };
        (got.a - want.a).abs()
    };
    assert!(err(-60.0) < err(-30.0));
}

fn via_csv(t: &Trajectory) -> Trajectory {
    let mut buf = Vec::new();
    write_trajectory(&mut buf, t).unwrap();
    Trajectory::from_states(read_trajectory(&buf[..]).unwrap(), IntegratorConfig::default().y_detect).unwrap()
}

#[test]
fn csv_fit_classify_round_trip() {
    let cfg = IntegratorConfig::default();
    let osc = via_csv(&integrate(Preset::ZeroIc.start(), -50.0, &cfg).unwrap());
    let AsymParams::Oscillatory(p) = fit_params(&osc, SolutionClass::Oscillatory).unwrap() else {
        panic!()
    };
    let s2 = invert_osc(&p, PI / 2.0);
    assert_eq!(classify_s2(s2, DEFAULT_CLASSIFY_TOL), SolutionClass::Oscillatory);
    assert!((s2 - Preset::ZeroIc.s2()).norm() < 0.02 * Preset::ZeroIc.s2().norm());

    let sing_traj = integrate(Preset::ZeroPole.start(), -50.0, &cfg).unwrap();
    let sing = via_csv(&sing_traj);
    assert_eq!(sing.crossings.len(), sing_traj.crossings.len());
    let AsymParams::Singular(p) = fit_params(&sing, SolutionClass::Singular).unwrap() else {
        panic!()
    };
    let s2 = invert_sing(&p, -PI / 2.0);
    assert_eq!(classify_s2(s2, DEFAULT_CLASSIFY_TOL), SolutionClass::Singular);
    assert!((s2 - Preset::ZeroPole.s2()).norm() < 0.02 * Preset::ZeroPole.s2().norm());
}
