//! Two-dimensional complex linear algebra with qubit conventions.
//!
//! Basis ordering is fixed throughout the crate: the excited state is
//! `|e⟩ = (1, 0)ᵀ` and the ground state is `|g⟩ = (0, 1)ᵀ`. The lowering
//! operator is therefore `σ = |g⟩⟨e| = [[0, 0], [1, 0]]`.
//!
//! Bloch coordinates use the Pauli convention `σ_z|e⟩ = +|e⟩`, so the excited
//! state sits at the north pole `(0, 0, 1)` and the ground state at the south
//! pole `(0, 0, -1)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Imaginary unit.
pub const I: Complex = Complex::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// Smallest squared norm accepted by [`PureState::normalize`].
const MIN_NORM: f64 = 1e-300;

/// A two-component complex vector `c_e|e⟩ + c_g|g⟩`.
///
/// Not necessarily normalized; [`PureState::normalize`] produces a unit
/// vector without altering the global phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    pub c_e: Complex,
    pub c_g: Complex,
}

impl PureState {
    pub const fn new(c_e: Complex, c_g: Complex) -> Self {
        Self { c_e, c_g }
    }

    pub fn excited() -> Self {
        Self::new(c(1.0), c(0.0))
    }

    pub fn ground() -> Self {
        Self::new(c(0.0), c(1.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_e.norm_sqr() + self.c_g.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.c_e.norm().hypot(self.c_g.norm())
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > MIN_NORM) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(c(1.0 / n)))
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self::new(self.c_e * k, self.c_g * k)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex {
        self.c_e.conj() * other.c_e + self.c_g.conj() * other.c_g
    }

    pub fn is_finite(&self) -> bool {
        self.c_e.is_finite() && self.c_g.is_finite()
    }
}

impl Add for PureState {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.c_e + rhs.c_e, self.c_g + rhs.c_g)
    }
}

impl Sub for PureState {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.c_e - rhs.c_e, self.c_g - rhs.c_g)
    }
}

/// Normalizes `s`, keeping its global phase.
pub fn normalize(s: &PureState) -> Result<PureState> {
    s.normalize()
}

/// `|⟨a|b⟩|²` for normalized states; insensitive to global phase.
pub fn fidelity(a: &PureState, b: &PureState) -> f64 {
    a.inner(b).norm_sqr()
}

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    pub m: [[Complex; 2]; 2],
}

impl Operator2 {
    pub const fn new(m: [[Complex; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self::new([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    pub fn zero() -> Self {
        Self::from_real([[0.0, 0.0], [0.0, 0.0]])
    }

    pub fn identity() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    /// Lowering operator `σ = |g⟩⟨e|`.
    pub fn sigma() -> Self {
        Self::from_real([[0.0, 0.0], [1.0, 0.0]])
    }

    /// `σ_x = σ + σ†`.
    pub fn sigma_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    /// `|ψ⟩⟨φ|`
    pub fn outer(psi: &PureState, phi: &PureState) -> Self {
        let l = [psi.c_e, psi.c_g];
        let r = [phi.c_e.conj(), phi.c_g.conj()];
        Self::new([[l[0] * r[0], l[0] * r[1]], [l[1] * r[0], l[1] * r[1]]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, k: Complex) -> Self {
        let m = &self.m;
        Self::new([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn apply(&self, s: &PureState) -> PureState {
        let m = &self.m;
        PureState::new(
            m[0][0] * s.c_e + m[0][1] * s.c_g,
            m[1][0] * s.c_e + m[1][1] * s.c_g,
        )
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.is_finite())
    }

    /// Eigenvalues `tr/2 ± q` with `q² = ((a - d)/2)² + bc`, principal root.
    pub fn eigenvalues(&self) -> [Complex; 2] {
        let half_tr = self.trace() * 0.5;
        let q = self.half_gap();
        [half_tr + q, half_tr - q]
    }

    fn half_gap(&self) -> Complex {
        let m = &self.m;
        let half_diff = (m[0][0] - m[1][1]) * 0.5;
        (half_diff * half_diff + m[0][1] * m[1][0]).sqrt()
    }

    /// Matrix exponential.
    ///
    /// With eigenvalues `m ± q`, `exp(A) = c0·I + c1·(A − m·I)` where
    /// `c0 = (e^{m+q} + e^{m−q})/2` and `c1 = (e^{m+q} − e^{m−q})/(2q)`.
    /// Near a degenerate spectrum `c1` is evaluated as `e^m·sinh(q)/q` with a
    /// Taylor series instead of the difference quotient.
    pub fn exp(&self) -> Self {
        let half_tr = self.trace() * 0.5;
        let q = self.half_gap();
        let (c0, c1) = if q.norm() < SERIES_THRESHOLD {
            let em = half_tr.exp();
            (em * q.cosh(), em * sinhc_series(q))
        } else {
            let up = (half_tr + q).exp();
            let down = (half_tr - q).exp();
            ((up + down) * 0.5, (up - down) / (q * 2.0))
        };
        let shifted = *self - Self::identity().scale(half_tr);
        Self::identity().scale(c0) + shifted.scale(c1)
    }
}

/// Below this half-gap the difference quotient in [`Operator2::exp`] loses
/// more than ~1e-13 relative precision, so the series takes over.
const SERIES_THRESHOLD: f64 = 1e-3;

fn sinhc_series(q: Complex) -> Complex {
    let q2 = q * q;
    // 1 + q²/3! + q⁴/5! + q⁶/7!
    c(1.0) + q2 * (c(1.0 / 6.0) + q2 * (c(1.0 / 120.0) + q2 * (1.0 / 5040.0)))
}

impl Add for Operator2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Operator2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Operator2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(c(-1.0))
    }
}

impl Mul for Operator2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[c(0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::new(out)
    }
}

impl Mul<PureState> for Operator2 {
    type Output = PureState;
    fn mul(self, rhs: PureState) -> PureState {
        self.apply(&rhs)
    }
}

const DM_TOL: f64 = 1e-12;

/// A Hermitian, unit-trace, positive semidefinite 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Operator2);

impl DensityMatrix {
    /// Validates `op` against the density-matrix invariants (tolerance 1e-12).
    pub fn new(op: Operator2) -> Result<Self> {
        if !op.is_finite() {
            return Err(Error::NotDensityMatrix("non-finite entry"));
        }
        if (op - op.adjoint()).max_abs() > DM_TOL {
            return Err(Error::NotDensityMatrix("not Hermitian"));
        }
        let tr = op.trace();
        if (tr - c(1.0)).norm() > DM_TOL {
            return Err(Error::NotDensityMatrix("trace differs from one"));
        }
        let dm = Self(op);
        if dm.real_eigenvalues()[1] < -DM_TOL {
            return Err(Error::NotDensityMatrix("negative eigenvalue"));
        }
        Ok(dm)
    }

    pub(crate) fn new_unchecked(op: Operator2) -> Self {
        Self(op)
    }

    pub fn maximally_mixed() -> Self {
        Self(Operator2::from_real([[0.5, 0.0], [0.0, 0.5]]))
    }

    pub fn operator(&self) -> &Operator2 {
        &self.0
    }

    pub fn rho_ee(&self) -> f64 {
        self.0.m[0][0].re
    }

    pub fn rho_gg(&self) -> f64 {
        self.0.m[1][1].re
    }

    /// Coherence `ρ_eg = ⟨e|ρ|g⟩`.
    pub fn rho_eg(&self) -> Complex {
        self.0.m[0][1]
    }

    /// Eigenvalues in descending order, assuming Hermiticity.
    pub fn real_eigenvalues(&self) -> [f64; 2] {
        hermitian_eigenvalues(&self.0)
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        trace_distance(&self.0, &other.0)
    }
}

/// Descending eigenvalues of a Hermitian 2×2 matrix.
pub(crate) fn hermitian_eigenvalues(op: &Operator2) -> [f64; 2] {
    let a = op.m[0][0].re;
    let d = op.m[1][1].re;
    let b = op.m[0][1];
    let mean = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(b.norm());
    [mean + r, mean - r]
}

/// `½‖a − b‖₁` for Hermitian operators.
pub fn trace_distance(a: &Operator2, b: &Operator2) -> f64 {
    let ev = hermitian_eigenvalues(&(*a - *b));
    0.5 * (ev[0].abs() + ev[1].abs())
}

/// `|s⟩⟨s|` for a normalized state.
pub fn project(s: &PureState) -> DensityMatrix {
    DensityMatrix(Operator2::outer(s, s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// `x = 2 Re ρ_eg`, `y = −2 Im ρ_eg`, `z = ρ_ee − ρ_gg`.
pub fn bloch_of(rho: &DensityMatrix) -> BlochVector {
    let eg = rho.rho_eg();
    BlochVector {
        x: 2.0 * eg.re,
        y: -2.0 * eg.im,
        z: rho.rho_ee() - rho.rho_gg(),
    }
}
