//! Adaptive two-state jumping schemes.
//!
//! A scheme alternates the local oscillator between `+μ` and `−μ` after every
//! detection. The atom then rests in an eigenstate `ψ₁` of `K(μ)` until a
//! photon arrives, jumps to `ψ₂ ∝ J(μ)ψ₁`, which is an eigenstate of `K(−μ)`,
//! and jumps back with `J(−μ)ψ₂ ∝ ψ₁`. Because `J(−μ)J(μ) = −μ²·1`, the cycle
//! closes for any state; what constrains `μ` is that the post-jump state is
//! again stationary, which leaves the roots of
//!
//! ```text
//! 4γ²|μ|⁴μ² + (Ω² − γ²/4)μ² − Ω²/4 = 0
//! ```
//!
//! namely `μ = ±1/2` for every drive, plus the purely imaginary
//! `μ = ±i·√((1 ± √(1 − 16Ω²/γ²))/8)` when `|Ω| ≤ γ/4`.
//!
//! Only pairs whose mixture reproduces the stationary state are kept; the
//! long-run occupations of such a pair fix the Shannon entropy, i.e. the bits
//! per qubit needed to record which state the atom is in.
//!
//! `μ` and `−μ` describe the same scheme with `ψ₁` and `ψ₂` exchanged, so one
//! representative is reported per family: `μ = +1/2` and `Im μ > 0`.

use std::fmt;

use rayon::prelude::*;

use crate::algebra::{c, fidelity, project, Complex, Operator2, PureState, I};
use crate::dynamics::{
    jump_rate, measurement_ops, steady_state, LocalOscillator, MeasurementOps, SystemParams,
};
use crate::error::{Error, Result};

/// Maximum Frobenius residual for a pair to count as reproducing `ρ_s`.
pub const PR_TOLERANCE: f64 = 1e-8;
/// Minimum J-image fidelity for the two-jump cycle to count as closed.
pub const CYCLE_TOLERANCE: f64 = 1e-9;
/// Imaginary candidates closer than this are reported once.
pub const MERGE_TOLERANCE: f64 = 1e-10;
/// Slack on `1 − 16Ω²/γ²` when deciding whether imaginary roots exist.
const EXISTENCE_SLACK: f64 = 1e-12;
/// Grid spacing, in units of γ, for bracketing the large-family pair switch.
pub const CROSSOVER_SCAN_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    RealPlus,
    RealMinus,
    ImagLargePlus,
    ImagLargeMinus,
    ImagSmallPlus,
    ImagSmallMinus,
}

impl Branch {
    pub fn is_representative(self) -> bool {
        matches!(
            self,
            Branch::RealPlus | Branch::ImagLargePlus | Branch::ImagSmallPlus
        )
    }
}

/// Scheme family, one per `±μ` pair of roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Real,
    ImagLarge,
    ImagSmall,
    /// `|Ω| = γ/4`, where the two imaginary families coincide.
    ImagCoincident,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Real,
        Family::ImagLarge,
        Family::ImagSmall,
        Family::ImagCoincident,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Real => "real",
            Family::ImagLarge => "imag-large",
            Family::ImagSmall => "imag-small",
            Family::ImagCoincident => "imag-coincident",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuCandidate {
    pub mu: Complex,
    pub branch: Branch,
    /// Set when the large and small imaginary roots were merged.
    pub coincident: bool,
}

impl MuCandidate {
    pub fn family(&self) -> Family {
        match self.branch {
            Branch::RealPlus | Branch::RealMinus => Family::Real,
            _ if self.coincident => Family::ImagCoincident,
            Branch::ImagLargePlus | Branch::ImagLargeMinus => Family::ImagLarge,
            Branch::ImagSmallPlus | Branch::ImagSmallMinus => Family::ImagSmall,
        }
    }
}

/// Which of the two `K(μ)` eigenstates, `(iγ/2 ± f(μ))|g⟩ + Ω|e⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `ψ₁`, an eigenstate of `K(μ)`, and `ψ₂`, an eigenstate of `K(−μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedStatePair {
    pub mu: Complex,
    pub psi1: PureState,
    pub psi2: PureState,
    pub s1: Sign,
    pub s2: Sign,
    /// `min(F(Ĵ(μ)ψ₁, ψ₂), F(Ĵ(−μ)ψ₂, ψ₁))` with `Ĵ` the normalized jump.
    pub cycle_fidelity: f64,
}

impl FixedStatePair {
    pub fn closes_cycle(&self) -> bool {
        self.cycle_fidelity >= 1.0 - CYCLE_TOLERANCE
    }

    pub fn signs(&self) -> (Sign, Sign) {
        (self.s1, self.s2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpingScheme {
    pub params: SystemParams,
    pub mu: MuCandidate,
    pub pair: FixedStatePair,
    pub p1: f64,
    pub p2: f64,
    pub entropy_bits: f64,
    pub pr_residual: f64,
}

impl JumpingScheme {
    pub fn family(&self) -> Family {
        self.mu.family()
    }

    /// Measurement operators active while resting in `ψ₁` (`+μ`) or `ψ₂` (`−μ`).
    pub fn ops(&self, second: bool) -> MeasurementOps {
        let mu = if second { -self.mu.mu } else { self.mu.mu };
        measurement_ops(&self.params, &LocalOscillator::new(mu))
    }

    /// Jump rates out of `ψ₁` and `ψ₂`.
    pub fn rates(&self) -> (f64, f64) {
        (
            jump_rate(&self.pair.psi1, &self.ops(false), &self.params),
            jump_rate(&self.pair.psi2, &self.ops(true), &self.params),
        )
    }
}

/// `f(μ) = √(Ω² − 2iΩγμ* − γ²/4)`, principal branch.
pub fn f_of_mu(p: &SystemParams, mu: Complex) -> Complex {
    radicand(p, mu).sqrt()
}

fn radicand(p: &SystemParams, mu: Complex) -> Complex {
    let (g, w) = (p.gamma(), p.omega());
    c(w * w - g * g / 4.0) - I * (2.0 * w * g) * mu.conj()
}

/// Left side minus right side of the radical-free stationarity condition.
pub fn radical_free_residual(p: &SystemParams, mu: Complex) -> Complex {
    let (g, w) = (p.gamma(), p.omega());
    let m2 = mu * mu;
    let abs4 = mu.norm_sqr() * mu.norm_sqr();
    m2 * (4.0 * g * g * abs4) + m2 * (w * w - g * g / 4.0) - c(w * w / 4.0)
}

/// All local-oscillator amplitudes admitting two-state jumping.
///
/// Order: real `±1/2`, then the large and small imaginary roots (each `+`
/// before `−`). At `|Ω| = γ/4` the imaginary roots coincide and are returned
/// once, flagged `coincident`.
pub fn mu_candidates(p: &SystemParams) -> Result<Vec<MuCandidate>> {
    if p.omega() == 0.0 {
        return Err(Error::OmegaZero);
    }
    let cand = |mu: Complex, branch, coincident| MuCandidate {
        mu,
        branch,
        coincident,
    };
    let mut out = vec![
        cand(c(0.5), Branch::RealPlus, false),
        cand(c(-0.5), Branch::RealMinus, false),
    ];
    let r = p.ratio();
    let disc = 1.0 - 16.0 * r * r;
    if disc < -EXISTENCE_SLACK {
        return Ok(out);
    }
    let root = disc.max(0.0).sqrt();
    let large = ((1.0 + root) / 8.0).sqrt();
    let small = ((1.0 - root) / 8.0).sqrt();
    if large - small < MERGE_TOLERANCE {
        let mid = 0.5 * (large + small);
        out.push(cand(Complex::new(0.0, mid), Branch::ImagLargePlus, true));
        out.push(cand(Complex::new(0.0, -mid), Branch::ImagLargeMinus, true));
    } else {
        out.push(cand(Complex::new(0.0, large), Branch::ImagLargePlus, false));
        out.push(cand(
            Complex::new(0.0, -large),
            Branch::ImagLargeMinus,
            false,
        ));
        out.push(cand(Complex::new(0.0, small), Branch::ImagSmallPlus, false));
        out.push(cand(
            Complex::new(0.0, -small),
            Branch::ImagSmallMinus,
            false,
        ));
    }
    Ok(out)
}

/// Residual of `f(−μ) = f(μ) − Ω/μ`, minimized over square-root branches.
pub fn verify_mu(p: &SystemParams, mu: Complex) -> f64 {
    let fp = f_of_mu(p, mu);
    let fm = f_of_mu(p, -mu);
    let shift = c(p.omega()) / mu;
    let mut best = f64::INFINITY;
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            best = best.min((fm * a - (fp * b - shift)).norm());
        }
    }
    best
}

/// The two eigenstates `|ψ±⟩ ∝ Ω|e⟩ + (iγ/2 ± f(μ))|g⟩` of `K(μ)`.
pub fn fixed_states(p: &SystemParams, mu: Complex) -> Result<(PureState, PureState)> {
    let f = f_of_mu(p, mu);
    if f.norm() < 1e-12 * p.gamma() {
        return Err(Error::DegenerateEigenstates);
    }
    Ok((
        fixed_state(p, f, Sign::Plus)?,
        fixed_state(p, f, Sign::Minus)?,
    ))
}

fn fixed_state(p: &SystemParams, f: Complex, sign: Sign) -> Result<PureState> {
    let c_g = I * (p.gamma() / 2.0) + f * sign.factor();
    PureState::new(c(p.omega()), c_g).normalize()
}

/// `‖K s − λ s‖` with `λ = ⟨s|K|s⟩`, for normalized `s`.
pub fn eigen_residual(k: &Operator2, s: &PureState) -> f64 {
    let ks = k.apply(s);
    let lambda = s.inner(&ks);
    (ks - s.scale(lambda)).norm()
}

/// The four sign combinations `(ψ^{+μ}_{s1}, ψ^{−μ}_{s2})`, in the order
/// `(+,+)`, `(+,−)`, `(−,−)`, `(−,+)`.
pub fn enumerate_pairs(p: &SystemParams, mu: Complex) -> Result<Vec<FixedStatePair>> {
    let (fwd_plus, fwd_minus) = fixed_states(p, mu)?;
    let (back_plus, back_minus) = fixed_states(p, -mu)?;
    let jump_fwd = measurement_ops(p, &LocalOscillator::new(mu)).j;
    let jump_back = measurement_ops(p, &LocalOscillator::new(-mu)).j;

    let pick = |s: Sign, plus: PureState, minus: PureState| match s {
        Sign::Plus => plus,
        Sign::Minus => minus,
    };
    let combos = [
        (Sign::Plus, Sign::Plus),
        (Sign::Plus, Sign::Minus),
        (Sign::Minus, Sign::Minus),
        (Sign::Minus, Sign::Plus),
    ];
    Ok(combos
        .into_iter()
        .map(|(s1, s2)| {
            let psi1 = pick(s1, fwd_plus, fwd_minus);
            let psi2 = pick(s2, back_plus, back_minus);
            let image_fidelity = |j: &Operator2, from: &PureState, to: &PureState| {
                j.apply(from)
                    .normalize()
                    .map(|img| fidelity(&img, to))
                    .unwrap_or(0.0)
            };
            let cycle_fidelity = image_fidelity(&jump_fwd, &psi1, &psi2)
                .min(image_fidelity(&jump_back, &psi2, &psi1));
            FixedStatePair {
                mu,
                psi1,
                psi2,
                s1,
                s2,
                cycle_fidelity,
            }
        })
        .collect())
}

/// Least-squares weight `p1 ∈ [0, 1]` for `p1·P₁ + (1 − p1)·P₂ ≈ ρ_s`.
///
/// Returns `(p1, p2, residual)` with the Frobenius residual at the optimum.
pub fn solve_occupation(pair: &FixedStatePair, p: &SystemParams) -> (f64, f64, f64) {
    let target = *steady_state(p).operator();
    let p1_proj = *project(&pair.psi1).operator();
    let p2_proj = *project(&pair.psi2).operator();
    let diff = p1_proj - p2_proj;
    let rhs = target - p2_proj;
    let denom = frobenius_inner(&diff, &diff);
    let weight = if denom > 1e-300 {
        (frobenius_inner(&diff, &rhs) / denom).clamp(0.0, 1.0)
    } else {
        0.5
    };
    let residual =
        (p1_proj.scale(c(weight)) + p2_proj.scale(c(1.0 - weight)) - target).frobenius_norm();
    (weight, 1.0 - weight, residual)
}

fn frobenius_inner(a: &Operator2, b: &Operator2) -> f64 {
    a.m.iter()
        .flatten()
        .zip(b.m.iter().flatten())
        .map(|(x, y)| (x.conj() * y).re)
        .sum()
}

/// Stationary occupations of the alternating jump process: the time spent in
/// each state is inversely proportional to its jump rate.
pub fn rate_based_occupation(
    pair: &FixedStatePair,
    p: &SystemParams,
    mu: Complex,
) -> Result<(f64, f64)> {
    let r1 = jump_rate(
        &pair.psi1,
        &measurement_ops(p, &LocalOscillator::new(mu)),
        p,
    );
    let r2 = jump_rate(
        &pair.psi2,
        &measurement_ops(p, &LocalOscillator::new(-mu)),
        p,
    );
    if !(r1 > f64::MIN_POSITIVE) || !(r2 > f64::MIN_POSITIVE) {
        return Err(Error::ZeroRate);
    }
    let total = r1 + r2;
    Ok((r2 / total, r1 / total))
}

/// Binary Shannon entropy in bits, with `0·log 0 = 0`.
pub fn shannon_entropy(p1: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p1) + term(1.0 - p1)
}

/// Every physically realizable two-state scheme, one per family.
pub fn find_schemes(p: &SystemParams) -> Result<Vec<JumpingScheme>> {
    let candidates = mu_candidates(p)?;
    let mut out = Vec::new();
    for cand in candidates
        .into_iter()
        .filter(|m| m.branch.is_representative())
    {
        if let Some(scheme) = scheme_for(p, cand)? {
            out.push(scheme);
        }
    }
    Ok(out)
}

fn scheme_for(p: &SystemParams, cand: MuCandidate) -> Result<Option<JumpingScheme>> {
    let pairs = match enumerate_pairs(p, cand.mu) {
        Ok(pairs) => pairs,
        // Exceptional point of K(±μ): a single eigenvector, no pair to report.
        Err(Error::DegenerateEigenstates) => return Ok(None),
        Err(e) => return Err(e),
    };
    let best = pairs
        .into_iter()
        .filter(FixedStatePair::closes_cycle)
        .map(|pair| (pair, solve_occupation(&pair, p)))
        .filter(|(_, (_, _, res))| *res < PR_TOLERANCE)
        .min_by(|a, b| a.1 .2.total_cmp(&b.1 .2));
    Ok(best.map(|(pair, (p1, p2, pr_residual))| JumpingScheme {
        params: *p,
        mu: cand,
        pair,
        p1,
        p2,
        entropy_bits: shannon_entropy(p1),
        pr_residual,
    }))
}

/// Scheme of a given family, if it exists at these parameters.
///
/// Asking for `ImagLarge` or `ImagSmall` at `|Ω| = γ/4` yields the
/// coincident scheme.
pub fn scheme_for_family(p: &SystemParams, family: Family) -> Result<Option<JumpingScheme>> {
    let schemes = find_schemes(p)?;
    let exact = schemes.iter().find(|s| s.family() == family).copied();
    Ok(exact.or_else(|| match family {
        Family::ImagLarge | Family::ImagSmall => schemes
            .iter()
            .find(|s| s.family() == Family::ImagCoincident)
            .copied(),
        _ => None,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRow {
    pub omega_over_gamma: f64,
    pub family: Family,
    pub mu: Complex,
    pub p1: f64,
    pub p2: f64,
    pub entropy_bits: f64,
    pub pr_residual: f64,
}

/// Scheme entropies over a grid of drive strengths.
///
/// Rows come out in grid order, then family order; families absent at a
/// grid point are skipped. `family = None` keeps all families.
pub fn entropy_curve(
    gamma: f64,
    omega_grid: &[f64],
    family: Option<Family>,
) -> Result<Vec<EntropyRow>> {
    let per_point: Vec<Result<Vec<EntropyRow>>> = omega_grid
        .par_iter()
        .map(|&omega| {
            let p = SystemParams::new(gamma, omega)?;
            let mut rows: Vec<EntropyRow> = find_schemes(&p)?
                .into_iter()
                .filter(|s| family.is_none_or(|f| s.family() == f))
                .map(|s| EntropyRow {
                    omega_over_gamma: p.ratio(),
                    family: s.family(),
                    mu: s.mu.mu,
                    p1: s.p1,
                    p2: s.p2,
                    entropy_bits: s.entropy_bits,
                    pr_residual: s.pr_residual,
                })
                .collect();
            rows.sort_by_key(|r| r.family);
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for rows in per_point {
        out.extend(rows?);
    }
    Ok(out)
}

/// Sign labels of the pair selected for the large imaginary family, if any.
pub fn large_family_signs(p: &SystemParams) -> Result<Option<(Sign, Sign)>> {
    Ok(scheme_for_family(p, Family::ImagLarge)?
        .filter(|s| s.family() == Family::ImagLarge)
        .map(|s| s.pair.signs()))
}

/// Drive strength `Ω/γ` at which the large imaginary family stops selecting
/// `(+,+)`, located by a coarse scan and bisection to `tol` (in units of γ).
///
/// Returns `None` if no switch occurs on `(0, 1/4)`.
pub fn large_family_crossover(gamma: f64, tol: f64) -> Result<Option<f64>> {
    let is_plus_plus = |ratio: f64| -> Result<Option<bool>> {
        let p = SystemParams::new(gamma, ratio * gamma)?;
        Ok(large_family_signs(&p)?.map(|s| s == (Sign::Plus, Sign::Plus)))
    };
    let steps = (0.25 / CROSSOVER_SCAN_STEP).round() as usize;
    let mut last_plus = None;
    for k in 1..steps {
        let ratio = k as f64 * CROSSOVER_SCAN_STEP;
        match is_plus_plus(ratio)? {
            Some(true) => last_plus = Some(ratio),
            Some(false) => {
                let Some(mut lo) = last_plus else { continue };
                let mut hi = ratio;
                while hi - lo > tol {
                    let mid = 0.5 * (lo + hi);
                    match is_plus_plus(mid)? {
                        Some(true) => lo = mid,
                        Some(false) => hi = mid,
                        // Exactly at the exceptional point; nudge off it.
                        None => lo = mid - 0.25 * (mid - lo),
                    }
                }
                return Ok(Some(0.5 * (lo + hi)));
            }
            None => {}
        }
    }
    Ok(None)
}
