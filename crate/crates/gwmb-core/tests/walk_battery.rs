//! Battery checks for the walk analytics: the renewal and parity
//! identities across a wide spread of step laws, exact enumeration
//! brackets, agreement between the separable product formulas and the
//! two-boundary solver, and Monte Carlo cross-validation.

use gwmb_core::analytic::SolverConfig;
use gwmb_core::dist::OffspringDistribution as Dist;
use gwmb_core::sim::{simulate_walk_hit, GameConfig};
use gwmb_core::walk::{
    conditioned_quantities, enumeration_brackets, separable_solution, two_boundary_hit,
};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn positive_drift_laws() -> Vec<Dist> {
    let mut laws = Vec::new();
    for i in 0..14 {
        laws.push(Dist::poisson(1.05 + 0.15 * i as f64).unwrap());
    }
    for s in [0.10, 0.15, 0.20, 0.25, 0.30] {
        laws.push(Dist::neg_binomial(0.5, s).unwrap());
    }
    laws.push(Dist::neg_binomial(1.5, 0.5).unwrap());
    for (n, r) in [
        (2, 0.6),
        (2, 0.8),
        (2, 0.9),
        (3, 0.4),
        (3, 0.5),
        (3, 0.6),
        (3, 0.8),
        (5, 0.25),
        (5, 0.3),
        (5, 0.5),
    ] {
        laws.push(Dist::binomial(n, r).unwrap());
    }
    for w in [
        vec![0.3, 0.2, 0.2, 0.3],
        vec![0.25, 0.25, 0.25, 0.25],
        vec![0.2, 0.3, 0.1, 0.4],
        vec![0.35, 0.05, 0.25, 0.35],
        vec![0.4, 0.1, 0.2, 0.3],
        vec![0.3, 0.3, 0.1, 0.3],
    ] {
        laws.push(Dist::finite(w).unwrap());
    }
    laws
}

#[test]
fn renewal_and_parity_identities_across_laws() {
    let laws = positive_drift_laws();
    assert!(laws.len() >= 30);
    for d in &laws {
        assert!(d.mean() > 1.0, "battery law {d} must have positive drift");
        let inc = d.to_increment(-1).unwrap();
        let wq = conditioned_quantities(&inc, &cfg()).unwrap();
        for (name, v) in [
            ("rho", wq.rho),
            ("sigma", wq.sigma),
            ("theta", wq.theta),
            ("rho_odd", wq.rho_odd),
            ("theta_odd", wq.theta_odd),
            ("pi_minus1", wq.pi_minus1),
        ] {
            assert!((0.0..=1.0).contains(&v), "{name} = {v} out of range for {d}");
        }
        // the first passage to -1 is odd at least half the time
        assert!(wq.rho_odd > 0.5, "rho_odd = {} for {d}", wq.rho_odd);

        let split = wq.pi_minus1 + wq.theta + wq.sigma;
        assert!((split - 1.0).abs() < 1e-10, "first-step split fails for {d}");
        assert!(
            (wq.sigma - wq.pi_minus1 * (1.0 - wq.rho) / wq.rho).abs() < 1e-10,
            "renewal form of sigma fails for {d}"
        );
        assert!(
            (wq.theta - (1.0 - wq.pi_minus1 / wq.rho)).abs() < 1e-10,
            "renewal form of theta fails for {d}"
        );
        let z = wq.rho * (1.0 - 2.0 * wq.rho_odd);
        assert!((inc.gamma(z).unwrap() + 1.0).abs() < 1e-9, "parity root fails for {d}");
        let lhs = wq.theta * wq.theta_odd;
        let rhs = wq.pi_minus1 * (1.0 - wq.rho_odd) / (wq.rho * (2.0 * wq.rho_odd - 1.0));
        assert!((lhs - rhs).abs() < 1e-9, "product identity fails for {d}");
    }
}

#[test]
fn enumeration_brackets_across_bounded_laws() {
    for d in positive_drift_laws() {
        if d.max_support().is_none() {
            continue;
        }
        let inc = d.to_increment(-1).unwrap();
        let wq = conditioned_quantities(&inc, &cfg()).unwrap();
        let br = enumeration_brackets(&inc, 18, wq.rho).unwrap();
        assert!(br.rho.contains(wq.rho), "rho bracket misses for {d}");
        assert!(br.sigma.contains(wq.sigma), "sigma bracket misses for {d}");
        assert!(br.theta.contains(wq.theta), "theta bracket misses for {d}");
        assert!(br.rho_odd.contains(wq.rho_odd), "rho_odd bracket misses for {d}");
        assert!(br.rho.width() < 0.05, "rho bracket too wide for {d}");
    }
}

#[test]
fn separable_formulas_match_two_boundary_solver() {
    let mut laws = Vec::new();
    for i in 0..10 {
        laws.push(Dist::poisson(2.2 + 0.2 * i as f64).unwrap());
    }
    for s in [0.10, 0.15, 0.20, 0.25, 0.30] {
        laws.push(Dist::geometric_n0(s).unwrap());
    }
    for d in laws {
        let (p, p_bar) = separable_solution(&d, &cfg()).unwrap();
        let tb1 = two_boundary_hit(&d, 1, &cfg()).unwrap();
        let tb2 = two_boundary_hit(&d, 2, &cfg()).unwrap();
        assert!((p - tb1.h).abs() < 1e-8, "p mismatch for {d}: {p} vs {}", tb1.h);
        assert!((p_bar - tb2.h).abs() < 1e-8, "p_bar mismatch for {d}: {p_bar} vs {}", tb2.h);
    }
}

#[test]
fn monte_carlo_walk_agrees_with_exact_absorption() {
    let d = Dist::poisson(3.0).unwrap();
    let inc = d.to_increment(-2).unwrap();
    let cfg = GameConfig::for_walk(0.42, 200_000, 20260814);
    for (start, truth) in [(1, 0.316_764_472_887_9), (2, 0.149_454_421_656_4)] {
        let est = simulate_walk_hit(&inc, start, &cfg).unwrap();
        let lo = est.ci_lo - est.bias_bound;
        let hi = est.ci_hi + est.bias_bound;
        assert!(lo <= truth && truth <= hi, "start {start}: {est:?} misses {truth}");
    }
}
