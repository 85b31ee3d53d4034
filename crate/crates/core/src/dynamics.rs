//! Time evolution: master-equation integration, homodyne trajectories with
//! Markovian feedback, feedback master equations and ensemble statistics.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::{Channel, Generator, LindbladModel};
use crate::linquant::{
    bloch_coordinates, commutator, hermitian_eigen, hermitian_part, is_hermitian, min_eigenvalue, r, trace,
    ComplexMatrix, DensityOperator, SpaceDecomposition, C64, I, TOL_ALG, TOL_TRAJ,
};

/// Deterministic integration aborts below `-100 * tol_traj`.
pub const BLOWUP_EIGENVALUE: f64 = -100.0 * TOL_TRAJ;
/// Stochastic states with a smaller eigenvalue are rejected instead of repaired.
pub const SME_REPAIR_FLOOR: f64 = -TOL_TRAJ;

/// One closed-loop design: measurement `M`, feedback Hamiltonian `F`, free
/// Hamiltonian `H`, constant compensation `H_c` and detection efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackDesign {
    pub measurement: ComplexMatrix,
    pub feedback: ComplexMatrix,
    pub hamiltonian: ComplexMatrix,
    pub compensation: ComplexMatrix,
    pub eta: f64,
}

impl FeedbackDesign {
    pub fn new(measurement: ComplexMatrix, feedback: ComplexMatrix, hamiltonian: ComplexMatrix, compensation: ComplexMatrix, eta: f64) -> Result<Self> {
        let d = measurement.nrows();
        for (name, m) in [("M", &measurement), ("F", &feedback), ("H", &hamiltonian), ("H_c", &compensation)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Dimension(format!("{name} is {}x{}, expected {d}x{d}", m.nrows(), m.ncols())));
            }
        }
        for (name, m) in [("F", &feedback), ("H", &hamiltonian), ("H_c", &compensation)] {
            if !is_hermitian(m, TOL_ALG * crate::linquant::hs_norm(m).max(1.0)) {
                return Err(Error::InvalidParameter(format!("{name} is not Hermitian")));
            }
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("efficiency must lie in (0, 1], got {eta}")));
        }
        Ok(Self {
            measurement,
            feedback: hermitian_part(&feedback),
            hamiltonian: hermitian_part(&hamiltonian),
            compensation: hermitian_part(&compensation),
            eta,
        })
    }

    /// Design with perfect detection and no compensation.
    pub fn ideal(measurement: ComplexMatrix, feedback: ComplexMatrix, hamiltonian: ComplexMatrix) -> Result<Self> {
        let d = measurement.nrows();
        Self::new(measurement, feedback, hamiltonian, ComplexMatrix::zeros(d, d), 1.0)
    }

    pub fn dim(&self) -> usize {
        self.measurement.nrows()
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.measurement.clone(), self.feedback.clone(), self.hamiltonian.clone(), self.compensation.clone(), eta)
    }

    /// `(1 - eta) / eta`.
    pub fn epsilon(&self) -> f64 {
        (1.0 - self.eta) / self.eta
    }

    /// Closed-loop noise operator `M - i F`.
    pub fn closed_loop_operator(&self) -> ComplexMatrix {
        &self.measurement - &self.feedback * I
    }

    /// `H + H_c + (F M + M^dagger F) / 2`.
    pub fn closed_loop_hamiltonian(&self) -> ComplexMatrix {
        let sym = &self.feedback * &self.measurement + self.measurement.adjoint() * &self.feedback;
        hermitian_part(&(&self.hamiltonian + &self.compensation + sym * r(0.5)))
    }
}

/// Feedback master equation of a design; for `eta < 1` the channel
/// `((1 - eta) / eta, F)` is appended.
pub fn build_fme(design: &FeedbackDesign) -> Result<LindbladModel> {
    let mut channels = vec![Channel::new(1.0, design.closed_loop_operator())];
    if design.eta < 1.0 {
        channels.push(Channel::new(design.epsilon(), design.feedback.clone()));
    }
    LindbladModel::new(design.closed_loop_hamiltonian(), channels)
}

/// Sampled evolution. `current_increments[k]` is the photocurrent increment
/// accumulated over `(times[k-1], times[k]]`, zero at `k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
    pub current_increments: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

impl TrajectoryRecord {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, DensityOperator::dim)
    }

    pub fn final_state(&self) -> &DensityOperator {
        self.states.last().expect("records hold at least the initial state")
    }

    /// Largest `|trace(rho) - 1|` along the record.
    pub fn trace_drift(&self) -> f64 {
        self.states.iter().map(|s| (trace(s.matrix()).re - 1.0).abs()).fold(0.0, f64::max)
    }

    /// CSV with header `time,b0,...,b{d^2-1}[,dY]`; Bloch coordinates in the
    /// Hermitian-basis order, numbers in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let d = self.dim();
        let mut header = String::from("time");
        for k in 0..d * d {
            header.push_str(&format!(",b{k}"));
        }
        if self.current_increments.is_some() {
            header.push_str(",dY");
        }
        writeln!(out, "{header}")?;
        for (k, (t, s)) in self.times.iter().zip(&self.states).enumerate() {
            let mut line = format!("{t}");
            for x in bloch_coordinates(s.matrix()) {
                line.push_str(&format!(",{x}"));
            }
            if let Some(dy) = &self.current_increments {
                line.push_str(&format!(",{}", dy[k]));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Discretization of the stochastic master equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmeScheme {
    /// Plain Euler-Maruyama step with eigenvalue clipping; pure states can
    /// leave the state set by `O(dt)` and abort the trajectory.
    #[default]
    EulerMaruyama,
    /// Measurement Kraus operator `I - (iH + M^dagger M / 2) dt + sqrt(eta) M dy`
    /// followed by the feedback unitary `exp(-i F dy / sqrt(eta))`, with
    /// `dy = sqrt(eta) tr(M rho + rho M^dagger) dt + dW`. Same drift and
    /// diffusion to first order, and completely positive by construction.
    Kraus,
}

/// Fixed-step grid, sampling stride and stochastic scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Store every `record_every`-th step (and always the last one).
    pub record_every: usize,
    pub scheme: SmeScheme,
}

impl StepOptions {
    pub fn new(t_final: f64, dt: f64) -> Self {
        Self { t_final, dt, record_every: 1, scheme: SmeScheme::EulerMaruyama }
    }

    pub fn every(mut self, stride: usize) -> Self {
        self.record_every = stride.max(1);
        self
    }

    pub fn with_scheme(mut self, scheme: SmeScheme) -> Self {
        self.scheme = scheme;
        self
    }

    fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!("final time {} is shorter than one step", self.t_final)));
        }
        Ok((self.t_final / self.dt).round() as usize)
    }

    fn records(&self, step: usize, total: usize) -> bool {
        step % self.record_every == 0 || step == total
    }
}

/// `rho -> -i (H_eff rho - rho H_eff^dagger) + sum_k J_k rho J_k^dagger` with `J_k = sqrt(gamma_k) L_k`.
struct PreparedGenerator {
    h_eff: ComplexMatrix,
    h_eff_adj: ComplexMatrix,
    jumps: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl PreparedGenerator {
    fn new(model: &LindbladModel) -> Self {
        let h_eff = model.effective_hamiltonian();
        Self {
            h_eff_adj: h_eff.adjoint(),
            h_eff,
            jumps: model
                .channels()
                .iter()
                .map(|ch| {
                    let j = &ch.op * r(ch.rate.sqrt());
                    let ja = j.adjoint();
                    (j, ja)
                })
                .collect(),
        }
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = (&self.h_eff * rho - rho * &self.h_eff_adj) * (-I);
        for (j, ja) in &self.jumps {
            out += j * rho * ja;
        }
        out
    }
}

pub fn integrate_master(model: &LindbladModel, rho0: &DensityOperator, t_final: f64, dt: f64) -> Result<TrajectoryRecord> {
    integrate_master_with(model, rho0, &StepOptions::new(t_final, dt))
}

/// Classical fixed-step fourth-order Runge-Kutta. Stored states are made
/// Hermitian but not renormalized, so the trace drift stays observable.
pub fn integrate_master_with(model: &LindbladModel, rho0: &DensityOperator, opts: &StepOptions) -> Result<TrajectoryRecord> {
    if rho0.dim() != model.dim() {
        return Err(Error::Dimension(format!("state of dimension {} for a dimension-{} model", rho0.dim(), model.dim())));
    }
    let total = opts.steps()?;
    let gen = PreparedGenerator::new(model);
    let dt = opts.dt;
    let half = r(0.5 * dt);
    let mut rho = rho0.matrix().clone();
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    for step in 1..=total {
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(&rho + &k1 * half));
        let k3 = gen.apply(&(&rho + &k2 * half));
        let k4 = gen.apply(&(&rho + &k3 * r(dt)));
        rho += (k1 + (k2 + k3) * r(2.0) + k4) * r(dt / 6.0);
        rho = hermitian_part(&rho);
        if opts.records(step, total) {
            let t = step as f64 * dt;
            let min = min_eigenvalue(&rho);
            if !(min >= BLOWUP_EIGENVALUE) {
                return Err(Error::StateInvariantViolation { time: t, min_eigenvalue: min });
            }
            times.push(t);
            states.push(DensityOperator::from_unchecked(rho.clone()));
        }
    }
    Ok(TrajectoryRecord {
        times,
        states,
        current_increments: None,
        seed: None,
    })
}

/// Random stream of trajectory `index` under `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Operators reused at every stochastic step.
struct SmeOperators {
    h: ComplexMatrix,
    m: ComplexMatrix,
    m_adj: ComplexMatrix,
    m_dm: ComplexMatrix,
    f: ComplexMatrix,
    f_sq: ComplexMatrix,
    eta: f64,
}

impl SmeOperators {
    fn new(design: &FeedbackDesign) -> Self {
        Self {
            h: &design.hamiltonian + &design.compensation,
            m_adj: design.measurement.adjoint(),
            m_dm: design.measurement.adjoint() * &design.measurement,
            m: design.measurement.clone(),
            f_sq: &design.feedback * &design.feedback,
            f: design.feedback.clone(),
            eta: design.eta,
        }
    }

    /// Drift and diffusion of the combined measurement-feedback increment.
    ///
    /// Drift: `-i[H, rho] + D(M) rho - i[F, M rho + rho M^dagger] + D(F) rho / eta`.
    /// Diffusion: `sqrt(eta) (M rho + rho M^dagger - tr(.) rho) - i [F, rho] / sqrt(eta)`.
    /// Returns the mean-current density `tr(M rho + rho M^dagger)` as well.
    fn increments(&self, rho: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix, f64) {
        let m_rho = &self.m * rho;
        let rho_md = rho * &self.m_adj;
        let meas = &m_rho + &rho_md;
        let expect = trace(&meas).re;
        let f_rho = &self.f * rho;
        let rho_f = rho * &self.f;
        let f_comm = &f_rho - &rho_f;

        let mut drift = commutator(&self.h, rho) * (-I);
        drift += &m_rho * &self.m_adj - (&self.m_dm * rho + rho * &self.m_dm) * r(0.5);
        drift -= commutator(&self.f, &meas) * I;
        drift += (&f_rho * &self.f - (&self.f_sq * rho + rho * &self.f_sq) * r(0.5)) * r(1.0 / self.eta);

        let sqrt_eta = self.eta.sqrt();
        let diffusion = (meas - rho * r(expect)) * r(sqrt_eta) - f_comm * (I * r(1.0 / sqrt_eta));
        (drift, diffusion, expect)
    }
}

/// Precomputed pieces of the Kraus step.
struct KrausOperators {
    /// `I - (i H + M^dagger M / 2) dt`.
    base: ComplexMatrix,
    m: ComplexMatrix,
    m_adj: ComplexMatrix,
    f_values: Vec<f64>,
    f_vectors: ComplexMatrix,
    eta: f64,
    dt: f64,
}

impl KrausOperators {
    fn new(design: &FeedbackDesign, dt: f64) -> Self {
        let d = design.dim();
        let h = &design.hamiltonian + &design.compensation;
        let m_dm = design.measurement.adjoint() * &design.measurement;
        let base = ComplexMatrix::identity(d, d) - (h * I + m_dm * r(0.5)) * r(dt);
        let (f_values, f_vectors) = hermitian_eigen(&design.feedback);
        Self {
            base,
            m_adj: design.measurement.adjoint(),
            m: design.measurement.clone(),
            f_values,
            f_vectors,
            eta: design.eta,
            dt,
        }
    }

    /// One step driven by `dw`; returns the new state and the current increment `dY`.
    fn step(&self, rho: &ComplexMatrix, dw: f64) -> (ComplexMatrix, f64) {
        let sqrt_eta = self.eta.sqrt();
        let expect = trace(&(&self.m * rho + rho * &self.m_adj)).re;
        let dy = sqrt_eta * expect * self.dt + dw;
        let k = &self.base + &self.m * r(sqrt_eta * dy);
        let mut next = &k * rho * k.adjoint();
        if self.eta < 1.0 {
            next += &self.m * rho * &self.m_adj * r((1.0 - self.eta) * self.dt);
        }
        let theta = dy / sqrt_eta;
        let phases = nalgebra::DVector::from_iterator(self.f_values.len(), self.f_values.iter().map(|&f| C64::from_polar(1.0, -f * theta)));
        let u = &self.f_vectors * ComplexMatrix::from_diagonal(&phases) * self.f_vectors.adjoint();
        next = &u * next * u.adjoint();
        let tr = trace(&next).re;
        (hermitian_part(&(next * r(1.0 / tr))), sqrt_eta * dy)
    }
}

/// Clips small negative eigenvalues and renormalizes; rejects larger violations.
fn repair_state(rho: ComplexMatrix, time: f64) -> Result<ComplexMatrix> {
    let rho = hermitian_part(&rho);
    let tr = trace(&rho).re;
    let rho = rho * r(1.0 / tr);
    let (values, vectors) = hermitian_eigen(&rho);
    let min = values.first().copied().unwrap_or(0.0);
    if min >= 0.0 {
        return Ok(rho);
    }
    if !(min > SME_REPAIR_FLOOR) {
        return Err(Error::StateInvariantViolation { time, min_eigenvalue: min });
    }
    let clipped = nalgebra::DVector::from_iterator(values.len(), values.iter().map(|&v| r(v.max(0.0))));
    let fixed = &vectors * ComplexMatrix::from_diagonal(&clipped) * vectors.adjoint();
    let tr = trace(&fixed).re;
    Ok(hermitian_part(&(fixed * r(1.0 / tr))))
}

/// Integration of the homodyne SME with Markovian feedback, Euler-Maruyama
/// unless `opts.scheme` selects the Kraus step.
///
/// The Wiener increment of each step drives both the state update and the
/// emitted current `dY = eta tr(M rho + rho M^dagger) dt + sqrt(eta) dW`.
/// Trajectory `index` of an ensemble uses stream `index` of `seed`.
pub fn simulate_sme(design: &FeedbackDesign, rho0: &DensityOperator, opts: &StepOptions, seed: u64, index: u64) -> Result<TrajectoryRecord> {
    if rho0.dim() != design.dim() {
        return Err(Error::Dimension(format!("state of dimension {} for a dimension-{} design", rho0.dim(), design.dim())));
    }
    let total = opts.steps()?;
    let ops = SmeOperators::new(design);
    let kraus = (opts.scheme == SmeScheme::Kraus).then(|| KrausOperators::new(design, opts.dt));
    let mut rng = trajectory_rng(seed, index);
    let dt = opts.dt;
    let sqrt_dt = dt.sqrt();
    let sqrt_eta = design.eta.sqrt();
    let mut rho = rho0.matrix().clone();
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut currents = vec![0.0];
    let mut pending = 0.0;
    for step in 1..=total {
        let dw = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        if let Some(k) = &kraus {
            let (next, dy) = k.step(&rho, dw);
            pending += dy;
            rho = next;
        } else {
            let (drift, diffusion, expect) = ops.increments(&rho);
            pending += design.eta * expect * dt + sqrt_eta * dw;
            rho += drift * r(dt) + diffusion * r(dw);
        }
        let t = step as f64 * dt;
        rho = repair_state(rho, t)?;
        if opts.records(step, total) {
            times.push(t);
            states.push(DensityOperator::from_unchecked(rho.clone()));
            currents.push(pending);
            pending = 0.0;
        }
    }
    Ok(TrajectoryRecord {
        times,
        states,
        current_increments: Some(currents),
        seed: Some(seed),
    })
}

/// Runs trajectories `0..count` in parallel; output is in index order.
pub fn simulate_ensemble(design: &FeedbackDesign, rho0: &DensityOperator, opts: &StepOptions, seed: u64, count: usize) -> Result<Vec<TrajectoryRecord>> {
    (0..count as u64).into_par_iter().map(|i| simulate_sme(design, rho0, opts, seed, i)).collect()
}

/// Ensemble mean computed in bounded memory: trajectories run in parallel in
/// chunks and are folded in index order, so the result is bit-reproducible.
pub fn simulate_ensemble_mean(design: &FeedbackDesign, rho0: &DensityOperator, opts: &StepOptions, seed: u64, count: usize) -> Result<TrajectoryRecord> {
    if count == 0 {
        return Err(Error::InvalidParameter("ensemble needs at least one trajectory".into()));
    }
    const CHUNK: usize = 256;
    let mut acc: Option<Accumulator> = None;
    for start in (0..count).step_by(CHUNK) {
        let end = (start + CHUNK).min(count);
        let chunk: Vec<TrajectoryRecord> = (start as u64..end as u64).into_par_iter().map(|i| simulate_sme(design, rho0, opts, seed, i)).collect::<Result<_>>()?;
        for rec in &chunk {
            match acc.as_mut() {
                None => acc = Some(Accumulator::start(rec)),
                Some(a) => a.add(rec)?,
            }
        }
    }
    let mut mean = acc.expect("count > 0").finish();
    mean.seed = Some(seed);
    Ok(mean)
}

struct Accumulator {
    times: Vec<f64>,
    sums: Vec<ComplexMatrix>,
    currents: Option<Vec<f64>>,
    count: usize,
}

impl Accumulator {
    fn start(rec: &TrajectoryRecord) -> Self {
        Self {
            times: rec.times.clone(),
            sums: rec.states.iter().map(|s| s.matrix().clone()).collect(),
            currents: rec.current_increments.clone(),
            count: 1,
        }
    }

    fn add(&mut self, rec: &TrajectoryRecord) -> Result<()> {
        if rec.times != self.times || rec.dim() != self.sums[0].nrows() {
            return Err(Error::GridMismatch);
        }
        for (s, x) in self.sums.iter_mut().zip(&rec.states) {
            *s += x.matrix();
        }
        match (&mut self.currents, &rec.current_increments) {
            (Some(acc), Some(dy)) => acc.iter_mut().zip(dy).for_each(|(a, b)| *a += b),
            _ => self.currents = None,
        }
        self.count += 1;
        Ok(())
    }

    fn finish(self) -> TrajectoryRecord {
        let scale = 1.0 / self.count as f64;
        TrajectoryRecord {
            times: self.times,
            states: self.sums.into_iter().map(|s| DensityOperator::from_unchecked(hermitian_part(&(s * r(scale))))).collect(),
            current_increments: self.currents.map(|c| c.into_iter().map(|x| x * scale).collect()),
            seed: None,
        }
    }
}

/// Pointwise average of records on a common grid, folded in input order.
pub fn ensemble_mean(records: &[TrajectoryRecord]) -> Result<TrajectoryRecord> {
    let first = records.first().ok_or_else(|| Error::InvalidParameter("no records to average".into()))?;
    let mut acc = Accumulator::start(first);
    for rec in &records[1..] {
        acc.add(rec)?;
    }
    Ok(acc.finish())
}

/// Lyapunov candidates monitored along a record.
#[derive(Debug, Clone, PartialEq)]
pub enum LyapunovFunction {
    /// `trace(Pi_R rho)`.
    SubspacePopulation(SpaceDecomposition),
    /// `trace(diag(w) rho)`; `None` means `w = (0, 1, ..., d - 1)`.
    EnergyLadder(Option<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSeries {
    pub values: Vec<f64>,
    /// Non-increasing up to `10 * tol_traj`.
    pub monotone: bool,
}

pub fn lyapunov_trace(record: &TrajectoryRecord, v: &LyapunovFunction) -> Result<LyapunovSeries> {
    let d = record.dim();
    let observable = match v {
        LyapunovFunction::SubspacePopulation(decomp) => {
            if decomp.dim() != d {
                return Err(Error::Dimension(format!("decomposition of dimension {} for states of dimension {d}", decomp.dim())));
            }
            decomp.projector_r()
        }
        LyapunovFunction::EnergyLadder(weights) => {
            let w: Vec<f64> = match weights {
                Some(w) if w.len() == d => w.clone(),
                Some(w) => return Err(Error::Dimension(format!("{} ladder weights for dimension {d}", w.len()))),
                None => (0..d).map(|k| k as f64).collect(),
            };
            crate::linquant::diag_real(&w)
        }
    };
    let values: Vec<f64> = record.states.iter().map(|s| trace(&(&observable * s.matrix())).re).collect();
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 10.0 * TOL_TRAJ);
    Ok(LyapunovSeries { values, monotone })
}

/// Drift of the combined increment with the martingale part dropped, as a map.
pub fn sme_drift(design: &FeedbackDesign, rho: &ComplexMatrix) -> ComplexMatrix {
    SmeOperators::new(design).increments(rho).0
}
