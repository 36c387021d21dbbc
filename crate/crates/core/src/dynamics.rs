//! Resonance-fluorescence dynamics: the master equation, its stationary
//! state, and the local-oscillator-dependent measurement operators.

use crate::algebra::{c, Complex, DensityMatrix, Operator2, PureState, I};
use crate::error::{Error, Result};

/// Decay rate `gamma` and Rabi frequency `omega` of the driven atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    gamma: f64,
    omega: f64,
}

impl SystemParams {
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        if !gamma.is_finite() || !omega.is_finite() {
            return Err(Error::InvalidParams("rates must be finite"));
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidParams("gamma must be positive"));
        }
        Ok(Self { gamma, omega })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `Ω/γ`
    pub fn ratio(&self) -> f64 {
        self.omega / self.gamma
    }
}

/// Local-oscillator amplitude mixed into the detected field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOscillator {
    pub mu: Complex,
}

impl LocalOscillator {
    pub fn new(mu: Complex) -> Self {
        Self { mu }
    }

    pub fn mu_r(&self) -> f64 {
        self.mu.re
    }

    pub fn mu_i(&self) -> f64 {
        self.mu.im
    }
}

/// No-jump generator `K` and jump operator `J` for one local-oscillator
/// setting.
///
/// Over an interval `dt` the two measurement outcomes are
/// `Ω₀(dt) = 1 − K dt` (no photon) and `Ω₁(dt) = √(γ dt)·J` (photon).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOps {
    pub k: Operator2,
    pub j: Operator2,
    pub gamma: f64,
    pub mu: Complex,
}

impl MeasurementOps {
    /// `K + K† − γ J†J`, which vanishes for a trace-preserving decomposition.
    pub fn completeness_defect(&self) -> Operator2 {
        self.k + self.k.adjoint() - (self.j.adjoint() * self.j).scale(c(self.gamma))
    }
}

/// `ρ̇ = −i(Ω/2)[σ_x, ρ] + (γ/2)([σρ, σ†] + [σ, ρσ†])`
pub fn lindblad_rhs(rho: &Operator2, p: &SystemParams) -> Operator2 {
    let s = Operator2::sigma();
    let sd = s.adjoint();
    let hamiltonian = Operator2::sigma_x()
        .commutator(rho)
        .scale(-I * (p.omega / 2.0));
    let dissipator =
        ((s * *rho).commutator(&sd) + s.commutator(&(*rho * sd))).scale(c(p.gamma / 2.0));
    hamiltonian + dissipator
}

/// Closed-form stationary state of [`lindblad_rhs`].
pub fn steady_state(p: &SystemParams) -> DensityMatrix {
    let (g, w) = (p.gamma, p.omega);
    let norm = 1.0 / (g * g + 2.0 * w * w);
    let coh = Complex::new(0.0, g * w * norm);
    DensityMatrix::new_unchecked(Operator2::new([
        [c(w * w * norm), -coh],
        [coh, c((g * g + w * w) * norm)],
    ]))
}

pub fn measurement_ops(p: &SystemParams, lo: &LocalOscillator) -> MeasurementOps {
    let (g, w, mu) = (p.gamma, p.omega, lo.mu);
    let s = Operator2::sigma();
    let k = Operator2::sigma_x().scale(I * (w / 2.0))
        + (s.adjoint() * s).scale(c(g / 2.0))
        + s.scale(mu.conj() * g)
        + Operator2::identity().scale(c(g * mu.norm_sqr() / 2.0));
    let j = s + Operator2::identity().scale(mu);
    MeasurementOps { k, j, gamma: g, mu }
}

/// Photon detection rate `γ⟨s|J†J|s⟩`.
pub fn jump_rate(s: &PureState, ops: &MeasurementOps, p: &SystemParams) -> f64 {
    p.gamma * ops.j.apply(s).norm_sqr()
}

/// Propagates `s` under `exp(−K dt)`.
///
/// Returns the renormalized state and the squared norm before
/// renormalization, i.e. the probability of seeing no photon during `dt`.
pub fn evolve_nojump(s: &PureState, ops: &MeasurementOps, dt: f64) -> Result<(PureState, f64)> {
    let unnormalized = ops.k.scale(c(-dt)).exp().apply(s);
    let survival = unnormalized.norm_sqr();
    Ok((unnormalized.normalize()?, survival))
}

/// Post-detection state `J s / ‖J s‖`.
pub fn apply_jump(s: &PureState, ops: &MeasurementOps) -> Result<PureState> {
    ops.j.apply(s).normalize()
}

/// RK4 integration of the master equation, used as a reference solution.
///
/// `dt` is an upper bound; the actual step is `t / ceil(t / dt)`.
pub fn integrate_master(
    rho0: &DensityMatrix,
    p: &SystemParams,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    let limit = 0.01 / p.gamma.max(p.omega.abs());
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    if t <= 0.0 {
        return Ok(*rho0);
    }
    let steps = (t / dt).ceil() as usize;
    let h = t / steps as f64;
    let f = |r: &Operator2| lindblad_rhs(r, p);
    let mut rho = *rho0.operator();
    for _ in 0..steps {
        let k1 = f(&rho);
        let k2 = f(&(rho + k1.scale(c(h / 2.0))));
        let k3 = f(&(rho + k2.scale(c(h / 2.0))));
        let k4 = f(&(rho + k3.scale(c(h))));
        let incr = (k1 + k2.scale(c(2.0)) + k3.scale(c(2.0)) + k4).scale(c(h / 6.0));
        rho = rho + incr;
        rho = (rho + rho.adjoint()).scale(c(0.5));
    }
    Ok(DensityMatrix::new_unchecked(rho))
}
