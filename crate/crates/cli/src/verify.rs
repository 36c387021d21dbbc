//! Self-test of the invariants that tie the closed-form schemes to the
//! master equation at one parameter point.

use qubit_track::algebra::trace_distance;
use qubit_track::dynamics::{integrate_master, lindblad_rhs, measurement_ops};
use qubit_track::scheme::{eigen_residual, radical_free_residual, PR_TOLERANCE};
use qubit_track::{
    fixed_states, mu_candidates, project, rate_based_occupation, shannon_entropy, steady_state,
    verify_mu, Complex, DensityMatrix, LocalOscillator, Operator2, PureState, SystemParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: worst.is_finite() && worst < tolerance,
            worst,
            tolerance,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<28} worst {:.3e} (tol {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance
        )
    }
}

/// Runs every check; never short-circuits so the report is complete.
pub fn run_checks(p: &SystemParams) -> qubit_track::Result<Vec<Check>> {
    let g = p.gamma();
    let scale2 = g.max(1.0) * g.max(1.0);
    let candidates = mu_candidates(p)?;
    let schemes = qubit_track::find_schemes(p)?;
    let rho_s = steady_state(p);
    let mut checks = Vec::new();

    let mut mus: Vec<Complex> = candidates.iter().map(|m| m.mu).collect();
    mus.push(Complex::new(0.0, 0.0));
    let completeness = mus
        .iter()
        .map(|&mu| {
            let ops = measurement_ops(p, &LocalOscillator::new(mu));
            ops.completeness_defect().max_abs() / (g.max(1.0) * (1.0 + mu.norm_sqr()))
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("operator completeness", completeness, 1e-12));

    let stationarity = lindblad_rhs(rho_s.operator(), p).max_abs() / g.max(1.0);
    let valid = DensityMatrix::new(*rho_s.operator()).is_ok();
    checks.push(Check::new(
        "steady state stationarity",
        if valid { stationarity } else { f64::INFINITY },
        1e-12,
    ));

    let limit = 0.01 / g.max(p.omega().abs());
    let relax_time = 60.0 / g;
    let relaxed = integrate_master(&project(&PureState::excited()), p, relax_time, limit)?;
    checks.push(Check::new(
        "master equation relaxation",
        relaxed.trace_distance(&rho_s),
        1e-6,
    ));

    let eq_residual = candidates
        .iter()
        .map(|m| radical_free_residual(p, m.mu).norm() / scale2)
        .fold(0.0, f64::max);
    checks.push(Check::new("radical-free roots", eq_residual, 1e-10));

    let branch_residual = candidates
        .iter()
        .map(|m| verify_mu(p, m.mu) / g)
        .fold(0.0, f64::max);
    checks.push(Check::new("branch condition", branch_residual, 1e-10));

    let mut eigen = 0.0f64;
    for m in &candidates {
        let k = measurement_ops(p, &LocalOscillator::new(m.mu)).k;
        match fixed_states(p, m.mu) {
            Ok((a, b)) => {
                eigen = eigen
                    .max(eigen_residual(&k, &a) / g)
                    .max(eigen_residual(&k, &b) / g);
            }
            Err(_) => eigen = f64::INFINITY,
        }
    }
    checks.push(Check::new("fixed-state eigen residual", eigen, 1e-10));

    let found = if schemes.is_empty() {
        f64::INFINITY
    } else {
        0.0
    };
    checks.push(Check::new("scheme found", found, 0.5));

    let mut reconstruction = 0.0f64;
    let mut cross = 0.0f64;
    let mut cycle = 0.0f64;
    let mut double_jump = 0.0f64;
    let mut entropy = 0.0f64;
    for s in &schemes {
        let mix = project(&s.pair.psi1)
            .operator()
            .scale(Complex::new(s.p1, 0.0))
            + project(&s.pair.psi2)
                .operator()
                .scale(Complex::new(s.p2, 0.0));
        reconstruction = reconstruction.max((mix - *rho_s.operator()).frobenius_norm());
        cross = match rate_based_occupation(&s.pair, p, s.mu.mu) {
            Ok((q1, _)) => cross.max((q1 - s.p1).abs()),
            Err(_) => f64::INFINITY,
        };
        cycle = cycle.max(1.0 - s.pair.cycle_fidelity);
        let prod = s.ops(true).j * s.ops(false).j;
        let scalar = Operator2::identity().scale(-s.mu.mu * s.mu.mu);
        double_jump = double_jump.max((prod - scalar).max_abs() / (s.mu.mu * s.mu.mu).norm());
        entropy = entropy.max((s.entropy_bits - shannon_entropy(s.p1)).abs());
    }
    checks.push(Check::new(
        "steady-state reconstruction",
        reconstruction,
        PR_TOLERANCE,
    ));
    checks.push(Check::new("occupation cross-check", cross, 1e-9));
    checks.push(Check::new("two-jump cycle", cycle, 1e-9));
    checks.push(Check::new("double jump scalar", double_jump, 1e-10));
    checks.push(Check::new("entropy consistency", entropy, 1e-12));

    let rho_distance = schemes
        .iter()
        .map(|s| {
            let mix = project(&s.pair.psi1)
                .operator()
                .scale(Complex::new(s.p1, 0.0))
                + project(&s.pair.psi2)
                    .operator()
                    .scale(Complex::new(s.p2, 0.0));
            trace_distance(&mix, rho_s.operator())
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("ensemble trace distance", rho_distance, 1e-8));

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass_on_both_regimes() {
        for (g, w) in [
            (1.0, 0.2),
            (1.0, 1.0),
            (1.0, -0.245),
            (3.0, 0.5),
            (1.0, 0.25),
        ] {
            let checks = run_checks(&SystemParams::new(g, w).unwrap()).unwrap();
            for c in &checks {
                assert!(c.passed, "({g}, {w}): {}", c.line());
            }
        }
    }

    #[test]
    fn undriven_is_rejected() {
        assert!(run_checks(&SystemParams::new(1.0, 0.0).unwrap()).is_err());
    }
}
