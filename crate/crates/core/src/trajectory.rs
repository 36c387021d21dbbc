//! Seeded Monte Carlo quantum-jump trajectories.
//!
//! Jump times are drawn with the waiting-time method: after each jump a
//! uniform `u ∈ (0, 1)` is drawn and the unnormalized state is propagated
//! under `exp(−K t)` until its squared norm (the no-detection probability)
//! falls to `u`. The crossing is bracketed between recording instants and
//! refined by bisection, so the only discretization error is the bisection
//! tolerance on the jump time.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{
    bloch_of, c, fidelity, project, BlochVector, Complex, DensityMatrix, Operator2, PureState,
};
use crate::dynamics::{apply_jump, measurement_ops, LocalOscillator, MeasurementOps, SystemParams};
use crate::error::{Error, Result};
use crate::scheme::JumpingScheme;

/// Fidelity at which a state counts as sitting in a scheme state.
pub const OCCUPANCY_FIDELITY: f64 = 1.0 - 1e-6;
/// Jump-time resolution in units of `1/γ`.
pub const JUMP_TIME_TOLERANCE: f64 = 1e-9;
/// Shortest record, in units of `1/γ`, accepted by [`time_average_rho`].
pub const MIN_AVERAGING_SPAN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    Fixed(Complex),
    /// Flip `μ → −μ` after every detection.
    AdaptiveTwoState(JumpingScheme),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: SystemParams,
    pub policy: Policy,
    pub t_max: f64,
    pub dt_record: f64,
    pub seed: u64,
    pub n_trajectories: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidConfig("t_max must be positive"));
        }
        if !(self.dt_record > 0.0) || !self.dt_record.is_finite() {
            return Err(Error::InvalidConfig("dt_record must be positive"));
        }
        if self.n_trajectories == 0 {
            return Err(Error::InvalidConfig("need at least one trajectory"));
        }
        if let Policy::Fixed(mu) = self.policy {
            if !mu.is_finite() {
                return Err(Error::InvalidConfig("mu must be finite"));
            }
        }
        Ok(())
    }

    /// Default starting state: `|e⟩` for fixed monitoring, `ψ₁` for adaptive.
    pub fn default_initial(&self) -> PureState {
        match self.policy {
            Policy::Fixed(_) => PureState::excited(),
            Policy::AdaptiveTwoState(scheme) => scheme.pair.psi1,
        }
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt_record * (1.0 + 1e-12)).floor() as usize;
        (0..=n).map(|k| k as f64 * self.dt_record).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: PureState,
    pub bloch: BlochVector,
    pub active_mu: Complex,
    pub jumps_so_far: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub t: f64,
    pub pre_state: PureState,
    pub post_state: PureState,
    /// Local-oscillator amplitude that produced the detection.
    pub mu: Complex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// A detection was drawn from a state in the kernel of `J`.
    DarkState {
        t: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub params: SystemParams,
    pub samples: Vec<Sample>,
    pub jumps: Vec<JumpEvent>,
    pub termination: Termination,
    /// Adaptive run started away from both scheme states.
    pub initial_transient: bool,
}

/// Random stream of trajectory `index`, a pure function of `(seed, index)`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw_open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// No-jump propagation from the last jump, kept unnormalized.
struct Segment {
    anchor: PureState,
    t0: f64,
    ops: MeasurementOps,
}

impl Segment {
    fn at(&self, t: f64) -> PureState {
        let tau = (t - self.t0).max(0.0);
        self.ops.k.scale(c(-tau)).exp().apply(&self.anchor)
    }
}

fn ops_for(params: &SystemParams, mu: Complex) -> MeasurementOps {
    measurement_ops(params, &LocalOscillator::new(mu))
}

pub fn simulate_one<R: Rng + ?Sized>(
    cfg: &SimConfig,
    initial: &PureState,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let params = cfg.params;
    let initial = initial.normalize()?;

    let (mut mu, flip, initial_transient) = match cfg.policy {
        Policy::Fixed(mu) => (mu, false, false),
        Policy::AdaptiveTwoState(scheme) => {
            let f1 = fidelity(&initial, &scheme.pair.psi1);
            let f2 = fidelity(&initial, &scheme.pair.psi2);
            let mu = if f2 > f1 { -scheme.mu.mu } else { scheme.mu.mu };
            (mu, true, f1.max(f2) < OCCUPANCY_FIDELITY)
        }
    };
    let tol = JUMP_TIME_TOLERANCE / params.gamma();

    let mut seg = Segment {
        anchor: initial,
        t0: 0.0,
        ops: ops_for(&params, mu),
    };
    let mut u = draw_open_unit(rng);
    let mut samples = Vec::new();
    let mut jumps = Vec::new();
    let mut lower: f64 = 0.0;

    for t in cfg.sample_times() {
        let psi = loop {
            let psi = seg.at(t);
            if psi.norm_sqr() > u {
                break psi;
            }
            let (mut lo, mut hi) = (lower.max(seg.t0), t);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if seg.at(mid).norm_sqr() > u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let pre = seg.at(hi).normalize()?;
            let post = match apply_jump(&pre, &seg.ops) {
                Ok(post) => post,
                Err(_) => {
                    return Ok(TrajectoryRecord {
                        params,
                        samples,
                        jumps,
                        termination: Termination::DarkState { t: hi },
                        initial_transient,
                    })
                }
            };
            jumps.push(JumpEvent {
                t: hi,
                pre_state: pre,
                post_state: post,
                mu,
            });
            if flip {
                mu = -mu;
            }
            seg = Segment {
                anchor: post,
                t0: hi,
                ops: ops_for(&params, mu),
            };
            lower = hi;
            u = draw_open_unit(rng);
        };
        let state = psi.normalize()?;
        samples.push(Sample {
            t,
            state,
            bloch: bloch_of(&project(&state)),
            active_mu: mu,
            jumps_so_far: jumps.len(),
        });
        lower = t;
    }

    Ok(TrajectoryRecord {
        params,
        samples,
        jumps,
        termination: Termination::Completed,
        initial_transient,
    })
}

/// Runs every trajectory of `cfg` on its own stream; output is in index order.
pub fn simulate_batch(cfg: &SimConfig, initial: &PureState) -> Result<Vec<TrajectoryRecord>> {
    cfg.validate()?;
    (0..cfg.n_trajectories)
        .into_par_iter()
        .map(|i| simulate_one(cfg, initial, &mut trajectory_rng(cfg.seed, i as u64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    /// Mean projector over the trajectories that reached each time.
    pub mean_rho: Vec<DensityMatrix>,
    /// Fraction of recorded time spent in `ψ₁` and `ψ₂` (adaptive only).
    pub occupancy: Option<[f64; 2]>,
    pub jump_count_mean: f64,
    pub n_trajectories: usize,
    pub dark_terminations: usize,
}

impl EnsembleStats {
    /// Aggregates records sequentially in the order given.
    pub fn from_records(records: &[TrajectoryRecord], policy: &Policy) -> Self {
        let n_times = records.iter().map(|r| r.samples.len()).max().unwrap_or(0);
        let mut sums = vec![Operator2::zero(); n_times];
        let mut counts = vec![0usize; n_times];
        let mut times = vec![0.0; n_times];
        for rec in records {
            for (k, s) in rec.samples.iter().enumerate() {
                sums[k] = sums[k] + *project(&s.state).operator();
                counts[k] += 1;
                times[k] = s.t;
            }
        }
        let mean_rho = sums
            .iter()
            .zip(&counts)
            .map(|(sum, &n)| {
                let avg = sum.scale(c(1.0 / n as f64));
                DensityMatrix::new_unchecked((avg + avg.adjoint()).scale(c(0.5)))
            })
            .collect();

        let occupancy = match policy {
            Policy::AdaptiveTwoState(scheme) => {
                let mut hits = [0usize; 2];
                let mut total = 0usize;
                for rec in records {
                    let occ = classify_samples(rec, scheme);
                    hits[0] += occ[0];
                    hits[1] += occ[1];
                    total += rec.samples.len();
                }
                let frac = |h: usize| {
                    if total > 0 {
                        h as f64 / total as f64
                    } else {
                        0.0
                    }
                };
                Some([frac(hits[0]), frac(hits[1])])
            }
            Policy::Fixed(_) => None,
        };
        let jump_total: usize = records.iter().map(|r| r.jumps.len()).sum();
        EnsembleStats {
            times,
            mean_rho,
            occupancy,
            jump_count_mean: jump_total as f64 / records.len().max(1) as f64,
            n_trajectories: records.len(),
            dark_terminations: records
                .iter()
                .filter(|r| matches!(r.termination, Termination::DarkState { .. }))
                .count(),
        }
    }
}

pub fn simulate_ensemble(cfg: &SimConfig, initial: &PureState) -> Result<EnsembleStats> {
    let records = simulate_batch(cfg, initial)?;
    Ok(EnsembleStats::from_records(&records, &cfg.policy))
}

fn classify_samples(rec: &TrajectoryRecord, scheme: &JumpingScheme) -> [usize; 2] {
    let mut hits = [0usize; 2];
    for s in &rec.samples {
        if fidelity(&s.state, &scheme.pair.psi1) >= OCCUPANCY_FIDELITY {
            hits[0] += 1;
        } else if fidelity(&s.state, &scheme.pair.psi2) >= OCCUPANCY_FIDELITY {
            hits[1] += 1;
        }
    }
    hits
}

/// Fraction of samples sitting in `ψ₁` and in `ψ₂`.
pub fn occupancy(rec: &TrajectoryRecord, scheme: &JumpingScheme) -> [f64; 2] {
    let hits = classify_samples(rec, scheme);
    let n = rec.samples.len().max(1) as f64;
    [hits[0] as f64 / n, hits[1] as f64 / n]
}

/// Time-weighted mean projector over the record.
pub fn time_average_rho(rec: &TrajectoryRecord) -> Result<DensityMatrix> {
    let required = MIN_AVERAGING_SPAN / rec.params.gamma();
    let span = match (rec.samples.first(), rec.samples.last()) {
        (Some(a), Some(b)) => b.t - a.t,
        _ => 0.0,
    };
    if span < required {
        return Err(Error::RecordTooShort { span, required });
    }
    let mut sum = Operator2::zero();
    for w in rec.samples.windows(2) {
        sum = sum + project(&w[0].state).operator().scale(c(w[1].t - w[0].t));
    }
    let avg = sum.scale(c(1.0 / span));
    DensityMatrix::new((avg + avg.adjoint()).scale(c(0.5)))
}

/// Completed dwell durations between consecutive jumps, split by the
/// local-oscillator setting active during the dwell (`+μ` first).
///
/// The leading partial dwell from `t = 0` and the censored trailing dwell
/// are excluded.
pub fn dwell_times(rec: &TrajectoryRecord, mu: Complex) -> (Vec<f64>, Vec<f64>) {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for w in rec.jumps.windows(2) {
        let dwell = w[1].t - w[0].t;
        if (w[1].mu - mu).norm() < (w[1].mu + mu).norm() {
            plus.push(dwell);
        } else {
            minus.push(dwell);
        }
    }
    (plus, minus)
}

pub fn post_jump_bloch_points(rec: &TrajectoryRecord) -> Vec<BlochVector> {
    rec.jumps
        .iter()
        .map(|j| bloch_of(&project(&j.post_state)))
        .collect()
}

/// Greedy count of points pairwise separated by more than `sep`.
pub fn count_separated(points: &[BlochVector], sep: f64) -> usize {
    let mut kept: Vec<BlochVector> = Vec::new();
    for p in points {
        if kept.iter().all(|q| q.distance(p) > sep) {
            kept.push(*p);
        }
    }
    kept.len()
}

/// Standard error of the time fraction spent in state 1 by a stationary
/// two-state jump process with exit rates `r1`, `r2`, observed for `t`.
///
/// The occupation indicator has variance `p₁p₂` and correlation time
/// `1/(r₁ + r₂)`, giving `σ² ≈ 2p₁p₂ / ((r₁ + r₂)·t)` for long `t`.
pub fn telegraph_std_error(r1: f64, r2: f64, t: f64) -> f64 {
    let total = r1 + r2;
    let p1 = r2 / total;
    (2.0 * p1 * (1.0 - p1) / (total * t)).sqrt()
}
