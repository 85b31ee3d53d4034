//! Algebraic certification of subsystem properties for a given decomposition.
//!
//! Every check evaluates a list of residual norms, one per condition (and per
//! channel where relevant), and compares them against
//! `tol_alg * max(1, ||H|| + sum_k gamma_k ||L_k||^2)`. Channel residuals that
//! are linear in `L_k` are weighted by `gamma_k ||L_k||` and bilinear ones by
//! `gamma_k`, which makes verdicts invariant under `L -> mu L, gamma -> gamma / mu^2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{stationary_states_from_bloch, Generator, GksModel, LindbladModel};
use crate::linquant::{
    block_decompose, bloch_coordinates, factor_side_residual, hermitian_basis, hs_inner, hs_norm, identity, kron,
    min_eigenvalue, partial_trace, r, system_side_residual, trace, BlockView, ComplexMatrix, ComplexVector,
    DensityOperator, SpaceDecomposition, TraceOut, I, TOL_ALG, TOL_PSD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Invariant,
    InvariantARobust,
    InvariantGammaRobust,
    Ns,
    NsARobust,
    NsGammaRobust,
    NsInitializationFree,
    DfsGammaRobust,
    AttractiveSufficient,
    NotAttractiveObstruction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// One evaluated condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub condition: String,
    pub channel: Option<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsystemReport {
    pub property: Property,
    pub verdict: Verdict,
    pub tolerance: f64,
    /// Every evaluated condition, violated or not.
    pub witnesses: Vec<Witness>,
}

impl SubsystemReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn violations(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(move |w| !(w.residual <= self.tolerance))
    }

    pub fn max_residual(&self) -> f64 {
        self.witnesses.iter().map(|w| w.residual).fold(0.0, f64::max)
    }

    pub fn residual_of(&self, condition: &str) -> f64 {
        self.witnesses.iter().filter(|w| w.condition == condition).map(|w| w.residual).fold(0.0, f64::max)
    }

    /// `Some(true)` for a certified attractive subsystem, `Some(false)` when
    /// attractivity is ruled out, `None` otherwise. Only meaningful for the
    /// attractivity report.
    pub fn attractive(&self) -> Option<bool> {
        match (self.property, self.verdict) {
            (Property::AttractiveSufficient, Verdict::Holds) => Some(true),
            (Property::AttractiveSufficient, Verdict::Fails) => Some(false),
            (Property::NotAttractiveObstruction, Verdict::Holds) => Some(false),
            _ => None,
        }
    }
}

/// Which robustness notion a robust check certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobustMode {
    /// For every admissible GKS matrix over the given operator basis.
    ARobust,
    /// For every admissible spectrum of rates with fixed Lindblad operators.
    GammaRobust,
}

/// Either generator description, for checks that accept both.
#[derive(Debug, Clone, Copy)]
pub enum NoiseModel<'a> {
    Lindblad(&'a LindbladModel),
    Gks(&'a GksModel),
}

impl<'a> From<&'a LindbladModel> for NoiseModel<'a> {
    fn from(m: &'a LindbladModel) -> Self {
        NoiseModel::Lindblad(m)
    }
}

impl<'a> From<&'a GksModel> for NoiseModel<'a> {
    fn from(m: &'a GksModel) -> Self {
        NoiseModel::Gks(m)
    }
}

/// Verdict tolerance for a model of the given scale.
pub fn verdict_tolerance(scale: f64) -> f64 {
    TOL_ALG * scale.max(1.0)
}

struct Collector {
    tolerance: f64,
    witnesses: Vec<Witness>,
}

impl Collector {
    fn new(tolerance: f64) -> Self {
        Self { tolerance, witnesses: Vec::new() }
    }

    fn add(&mut self, condition: &str, channel: Option<usize>, residual: f64) {
        self.witnesses.push(Witness {
            condition: condition.to_string(),
            channel,
            residual,
        });
    }

    fn passes(&self) -> bool {
        self.witnesses.iter().all(|w| w.residual <= self.tolerance)
    }

    fn finish(self, property: Property) -> SubsystemReport {
        let verdict = if self.passes() { Verdict::Holds } else { Verdict::Fails };
        SubsystemReport {
            property,
            verdict,
            tolerance: self.tolerance,
            witnesses: self.witnesses,
        }
    }
}

/// Residual of `H_SF` from the split form `H_S (x) I + I (x) H_F`.
///
/// Gauge: `H_S = trace_F(H_SF) / f - trace(H_SF) / (2 n f) I`, symmetrically for `H_F`.
pub fn hamiltonian_split(h_sf: &ComplexMatrix, n: usize, f: usize) -> Result<(ComplexMatrix, ComplexMatrix, f64)> {
    let shift = trace(h_sf) / r(2.0 * (n * f) as f64);
    let h_s = partial_trace(h_sf, TraceOut::Factor, n, f)? * r(1.0 / f as f64) - identity(n) * shift;
    let h_f = partial_trace(h_sf, TraceOut::System, n, f)? * r(1.0 / n as f64) - identity(f) * shift;
    let resid = hs_norm(&(h_sf - kron(&h_s, &identity(f)) - kron(&identity(n), &h_f)));
    Ok((h_s, h_f, resid))
}

fn check_dims(d: usize, decomp: &SpaceDecomposition) -> Result<()> {
    if d != decomp.dim() {
        return Err(Error::Dimension(format!("model dimension {d}, decomposition dimension {}", decomp.dim())));
    }
    Ok(())
}

struct ChannelBlocks {
    rate: f64,
    norm: f64,
    blocks: BlockView,
}

fn channel_blocks(model: &LindbladModel, decomp: &SpaceDecomposition) -> Result<Vec<ChannelBlocks>> {
    model
        .channels()
        .iter()
        .map(|ch| {
            Ok(ChannelBlocks {
                rate: ch.rate,
                norm: hs_norm(&ch.op),
                blocks: block_decompose(&ch.op, decomp)?,
            })
        })
        .collect()
}

/// `i H_P - 1/2 sum_k gamma_k L_SF,k^dagger L_P,k`, the block that must vanish
/// for invariance when no robustness is required.
pub fn invariance_cross_term(model: &LindbladModel, decomp: &SpaceDecomposition) -> Result<ComplexMatrix> {
    check_dims(model.dim(), decomp)?;
    let h = block_decompose(model.hamiltonian(), decomp)?;
    let mut out = h.p * I;
    for ch in channel_blocks(model, decomp)? {
        out -= ch.blocks.sf.adjoint() * &ch.blocks.p * r(0.5 * ch.rate);
    }
    Ok(out)
}

pub fn check_invariance(model: &LindbladModel, decomp: &SpaceDecomposition) -> Result<SubsystemReport> {
    check_dims(model.dim(), decomp)?;
    let (n, f) = (decomp.n(), decomp.f());
    let mut col = Collector::new(verdict_tolerance(model.scale()));
    let channels = channel_blocks(model, decomp)?;
    for (k, ch) in channels.iter().enumerate() {
        let w = ch.rate * ch.norm;
        col.add("l_q_zero", Some(k), w * hs_norm(&ch.blocks.q));
        let side = system_side_residual(&ch.blocks.sf, n, f)?.min(factor_side_residual(&ch.blocks.sf, n, f)?);
        col.add("l_sf_one_factor_identity", Some(k), w * side);
    }
    let h = block_decompose(model.hamiltonian(), decomp)?;
    col.add("h_sf_split", None, hamiltonian_split(&h.sf, n, f)?.2);
    if decomp.r() > 0 {
        col.add("invariance_cross_term", None, hs_norm(&invariance_cross_term(model, decomp)?));
    }
    Ok(col.finish(Property::Invariant))
}

/// Blocks of the operators that enter a robust check, with residual weights.
struct RobustInput {
    hamiltonian: BlockView,
    ops: Vec<BlockView>,
    /// Weight for conditions linear / bilinear in an operator.
    linear: Vec<f64>,
    bilinear: Vec<f64>,
    scale: f64,
}

fn robust_input(model: NoiseModel<'_>, decomp: &SpaceDecomposition, mode: RobustMode) -> Result<RobustInput> {
    match (model, mode) {
        (NoiseModel::Lindblad(_), RobustMode::ARobust) => {
            Err(Error::Mode("A-robust certification needs a GKS model with an operator basis".into()))
        }
        (NoiseModel::Lindblad(m), RobustMode::GammaRobust) => {
            check_dims(m.dim(), decomp)?;
            let chans = channel_blocks(m, decomp)?;
            Ok(RobustInput {
                hamiltonian: block_decompose(m.hamiltonian(), decomp)?,
                linear: chans.iter().map(|c| c.rate * c.norm).collect(),
                bilinear: chans.iter().map(|c| c.rate).collect(),
                ops: chans.into_iter().map(|c| c.blocks).collect(),
                scale: m.scale(),
            })
        }
        (NoiseModel::Gks(g), RobustMode::GammaRobust) => {
            let lind = g.to_lindblad()?;
            robust_input(NoiseModel::Lindblad(&lind), decomp, mode)
        }
        (NoiseModel::Gks(g), RobustMode::ARobust) => {
            check_dims(g.dim(), decomp)?;
            let ops = g.basis().iter().map(|fk| block_decompose(fk, decomp)).collect::<Result<Vec<_>>>()?;
            let m = ops.len();
            Ok(RobustInput {
                hamiltonian: block_decompose(g.hamiltonian(), decomp)?,
                ops,
                linear: vec![1.0; m],
                bilinear: vec![1.0; m],
                scale: hs_norm(g.hamiltonian()) + trace(g.gks_matrix()).re,
            })
        }
    }
}

/// Adds `F_P,k^dagger X_j = 0` residuals over all pairs or the diagonal only.
fn cross_conditions(col: &mut Collector, input: &RobustInput, mode: RobustMode, x: impl Fn(usize) -> ComplexMatrix) {
    let m = input.ops.len();
    for k in 0..m {
        let pk = input.ops[k].p.adjoint();
        let js: Vec<usize> = match mode {
            RobustMode::ARobust => (0..m).collect(),
            RobustMode::GammaRobust => vec![k],
        };
        let worst = js
            .into_iter()
            .map(|j| (input.bilinear[k] * input.bilinear[j]).sqrt() * hs_norm(&(&pk * x(j))))
            .fold(0.0, f64::max);
        col.add("l_p_cross_l_sf", Some(k), worst);
    }
}

pub fn check_invariance_robust<'a>(
    model: impl Into<NoiseModel<'a>>,
    decomp: &SpaceDecomposition,
    mode: RobustMode,
) -> Result<SubsystemReport> {
    let input = robust_input(model.into(), decomp, mode)?;
    let (n, f) = (decomp.n(), decomp.f());
    let mut col = Collector::new(verdict_tolerance(input.scale));
    for (k, ops) in input.ops.iter().enumerate() {
        col.add("l_q_zero", Some(k), input.linear[k] * hs_norm(&ops.q));
    }
    cross_conditions(&mut col, &input, mode, |j| input.ops[j].sf.clone());
    if decomp.r() > 0 {
        col.add("h_p_zero", None, hs_norm(&input.hamiltonian.p));
    }
    col.add("h_sf_split", None, hamiltonian_split(&input.hamiltonian.sf, n, f)?.2);
    let sys: Vec<f64> = input.ops.iter().map(|o| system_side_residual(&o.sf, n, f)).collect::<Result<_>>()?;
    let fac: Vec<f64> = input.ops.iter().map(|o| factor_side_residual(&o.sf, n, f)).collect::<Result<_>>()?;
    match mode {
        RobustMode::GammaRobust => {
            for k in 0..input.ops.len() {
                col.add("l_sf_one_factor_identity", Some(k), input.linear[k] * sys[k].min(fac[k]));
            }
        }
        RobustMode::ARobust => {
            // the identity side has to be common to every operator
            let weighted = |v: &[f64]| v.iter().zip(&input.linear).map(|(x, w)| x * w).collect::<Vec<_>>();
            let (sys, fac) = (weighted(&sys), weighted(&fac));
            let worst = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
            let chosen = if worst(&sys) <= worst(&fac) { sys } else { fac };
            for (k, res) in chosen.into_iter().enumerate() {
                col.add("l_sf_common_identity_side", Some(k), res);
            }
        }
    }
    let property = match mode {
        RobustMode::ARobust => Property::InvariantARobust,
        RobustMode::GammaRobust => Property::InvariantGammaRobust,
    };
    Ok(col.finish(property))
}

pub fn check_ns(model: &LindbladModel, decomp: &SpaceDecomposition) -> Result<SubsystemReport> {
    check_dims(model.dim(), decomp)?;
    let (n, f) = (decomp.n(), decomp.f());
    let mut col = Collector::new(verdict_tolerance(model.scale()));
    for (k, ch) in channel_blocks(model, decomp)?.iter().enumerate() {
        let w = ch.rate * ch.norm;
        col.add("l_q_zero", Some(k), w * hs_norm(&ch.blocks.q));
        col.add("l_sf_identity_on_system", Some(k), w * factor_side_residual(&ch.blocks.sf, n, f)?);
    }
    let h = block_decompose(model.hamiltonian(), decomp)?;
    col.add("h_sf_split", None, hamiltonian_split(&h.sf, n, f)?.2);
    if decomp.r() > 0 {
        col.add("invariance_cross_term", None, hs_norm(&invariance_cross_term(model, decomp)?));
    }
    Ok(col.finish(Property::Ns))
}

pub fn check_ns_robust<'a>(model: impl Into<NoiseModel<'a>>, decomp: &SpaceDecomposition, mode: RobustMode) -> Result<SubsystemReport> {
    let input = robust_input(model.into(), decomp, mode)?;
    let (n, f) = (decomp.n(), decomp.f());
    let mut col = Collector::new(verdict_tolerance(input.scale));
    for (k, ops) in input.ops.iter().enumerate() {
        col.add("l_q_zero", Some(k), input.linear[k] * hs_norm(&ops.q));
        col.add("l_sf_identity_on_system", Some(k), input.linear[k] * factor_side_residual(&ops.sf, n, f)?);
    }
    // I (x) F_F,j is the factor-side projection of F_SF,j
    let factor_part = |j: usize| -> ComplexMatrix {
        let sf = &input.ops[j].sf;
        let reduced = partial_trace(sf, TraceOut::System, n, f).expect("block has nf x nf shape") * r(1.0 / n as f64);
        kron(&identity(n), &reduced)
    };
    cross_conditions(&mut col, &input, mode, factor_part);
    if decomp.r() > 0 {
        col.add("h_p_zero", None, hs_norm(&input.hamiltonian.p));
    }
    col.add("h_sf_split", None, hamiltonian_split(&input.hamiltonian.sf, n, f)?.2);
    let property = match mode {
        RobustMode::ARobust => Property::NsARobust,
        RobustMode::GammaRobust => Property::NsGammaRobust,
    };
    Ok(col.finish(property))
}

pub fn check_ns_initialization_free(model: &LindbladModel, decomp: &SpaceDecomposition) -> Result<SubsystemReport> {
    check_dims(model.dim(), decomp)?;
    let (n, f) = (decomp.n(), decomp.f());
    let mut col = Collector::new(verdict_tolerance(model.scale()));
    for (k, ch) in channel_blocks(model, decomp)?.iter().enumerate() {
        let w = ch.rate * ch.norm;
        col.add("l_p_zero", Some(k), w * hs_norm(&ch.blocks.p));
        col.add("l_q_zero", Some(k), w * hs_norm(&ch.blocks.q));
        col.add("l_sf_identity_on_system", Some(k), w * factor_side_residual(&ch.blocks.sf, n, f)?);
    }
    let h = block_decompose(model.hamiltonian(), decomp)?;
    if decomp.r() > 0 {
        col.add("h_p_zero", None, hs_norm(&h.p));
    }
    col.add("h_sf_split", None, hamiltonian_split(&h.sf, n, f)?.2);
    Ok(col.finish(Property::NsInitializationFree))
}

/// Per-channel scalars `c_k` of a candidate DFS spanned by orthonormal `vectors`.
pub fn dfs_scalars(model: &LindbladModel, vectors: &[ComplexVector]) -> Vec<crate::linquant::C64> {
    let n = vectors.len() as f64;
    model
        .channels()
        .iter()
        .map(|ch| vectors.iter().map(|v| v.dotc(&(&ch.op * v))).sum::<crate::linquant::C64>() / r(n))
        .collect()
}

fn check_orthonormal(vectors: &[ComplexVector], d: usize) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::Decomposition("empty subspace".into()));
    }
    for (i, u) in vectors.iter().enumerate() {
        if u.len() != d {
            return Err(Error::Dimension(format!("subspace vector {i} has length {}, expected {d}", u.len())));
        }
        for (j, v) in vectors.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            if (u.dotc(v) - r(expected)).norm() > TOL_ALG {
                return Err(Error::Decomposition("subspace vectors are not orthonormal".into()));
            }
        }
    }
    Ok(())
}

/// Block form of the gamma-robust DFS conditions.
pub fn dfs_block_form(model: &LindbladModel, decomp: &SpaceDecomposition) -> Result<SubsystemReport> {
    check_dims(model.dim(), decomp)?;
    if decomp.f() != 1 {
        return Err(Error::Decomposition("DFS conditions need f = 1".into()));
    }
    let n = decomp.n();
    let mut col = Collector::new(verdict_tolerance(model.scale()));
    for (k, ch) in channel_blocks(model, decomp)?.iter().enumerate() {
        let w = ch.rate * ch.norm;
        let c = trace(&ch.blocks.sf) / r(n as f64);
        col.add("l_q_zero", Some(k), w * hs_norm(&ch.blocks.q));
        col.add("l_dfs_scalar", Some(k), w * hs_norm(&(&ch.blocks.sf - identity(n) * c)));
        col.add("l_p_zero_if_shifted", Some(k), ch.rate * c.norm() * hs_norm(&ch.blocks.p));
    }
    if decomp.r() > 0 {
        col.add("h_p_zero", None, hs_norm(&block_decompose(model.hamiltonian(), decomp)?.p));
    }
    Ok(col.finish(Property::DfsGammaRobust))
}

/// Joint-eigenvector form: `L_k phi = c_k phi` and `L_k^dagger L_k phi = |c_k|^2 phi`.
pub fn dfs_eigenvector_form(model: &LindbladModel, vectors: &[ComplexVector]) -> Result<SubsystemReport> {
    check_orthonormal(vectors, model.dim())?;
    let mut col = Collector::new(verdict_tolerance(model.scale()));
    let scalars = dfs_scalars(model, vectors);
    for (k, (ch, &c)) in model.channels().iter().zip(&scalars).enumerate() {
        let w = ch.rate * hs_norm(&ch.op);
        let ldl = ch.op.adjoint() * &ch.op;
        let mut eig = 0.0f64;
        let mut sq = 0.0f64;
        for v in vectors {
            eig = eig.max((&ch.op * v - v * c).norm());
            sq = sq.max((&ldl * v - v * r(c.norm_sqr())).norm());
        }
        col.add("l_eigenvector", Some(k), w * eig);
        col.add("ldl_eigenvector", Some(k), ch.rate * sq);
    }
    // the Hamiltonian must not couple the subspace to its complement
    let h = model.hamiltonian();
    let proj: ComplexMatrix = vectors.iter().fold(ComplexMatrix::zeros(model.dim(), model.dim()), |acc, v| acc + v * v.adjoint());
    let leak = (identity(model.dim()) - &proj) * h * &proj;
    col.add("h_leaves_subspace", None, hs_norm(&leak));
    Ok(col.finish(Property::DfsGammaRobust))
}

/// Evaluates both forms of the gamma-robust DFS conditions and merges them.
///
/// The two forms are equivalent; a disagreement near the tolerance is
/// reported as inconclusive, a clear one as an internal inconsistency.
pub fn check_dfs_gamma_robust(model: &LindbladModel, vectors: &[ComplexVector]) -> Result<SubsystemReport> {
    check_orthonormal(vectors, model.dim())?;
    let decomp = SpaceDecomposition::from_subspace(vectors, model.dim())?;
    let block = dfs_block_form(model, &decomp)?;
    let eigen = dfs_eigenvector_form(model, vectors)?;
    let tol = block.tolerance;
    let verdict = if block.verdict == eigen.verdict {
        block.verdict
    } else {
        let worst = block.max_residual().max(eigen.max_residual());
        if worst <= 1e3 * tol {
            Verdict::Inconclusive
        } else {
            return Err(Error::InternalInconsistency(format!(
                "DFS block form says {:?}, eigenvector form says {:?} (residuals {:.3e} / {:.3e})",
                block.verdict,
                eigen.verdict,
                block.max_residual(),
                eigen.max_residual()
            )));
        }
    };
    let mut witnesses = block.witnesses;
    witnesses.extend(eigen.witnesses);
    Ok(SubsystemReport {
        property: Property::DfsGammaRobust,
        verdict,
        tolerance: tol,
        witnesses,
    })
}

/// Generator induced on the co-factor when `r = 0`: `X -> trace_S(L(I/n (x) X))`.
pub fn factor_generator_bloch(model: &LindbladModel, decomp: &SpaceDecomposition) -> Result<nalgebra::DMatrix<f64>> {
    check_dims(model.dim(), decomp)?;
    let (n, f, nf) = (decomp.n(), decomp.f(), decomp.nf());
    let basis = hermitian_basis(f);
    let mut g = nalgebra::DMatrix::zeros(f * f, f * f);
    for (b, fb) in basis.iter().enumerate() {
        let mut local = ComplexMatrix::zeros(decomp.dim(), decomp.dim());
        local.view_mut((0, 0), (nf, nf)).copy_from(&kron(&(identity(n) * r(1.0 / n as f64)), fb));
        let image = decomp.to_local(&model.apply(&decomp.to_global(&local)));
        let reduced = partial_trace(&image.view((0, 0), (nf, nf)).into_owned(), TraceOut::System, n, f)?;
        for (a, fa) in basis.iter().enumerate() {
            g[(a, b)] = hs_inner(fa, &reduced).re;
        }
    }
    Ok(g)
}

pub fn check_attractivity(model: &LindbladModel, decomp: &SpaceDecomposition) -> Result<SubsystemReport> {
    check_dims(model.dim(), decomp)?;
    let invariance = check_invariance(model, decomp)?;
    let tol = invariance.tolerance;
    let mut witnesses = invariance.witnesses.clone();
    if !invariance.holds() {
        return Ok(SubsystemReport {
            property: Property::AttractiveSufficient,
            verdict: Verdict::Inconclusive,
            tolerance: tol,
            witnesses,
        });
    }
    let chans = channel_blocks(model, decomp)?;
    let rr = decomp.r();
    let report = |property, verdict, witnesses| SubsystemReport {
        property,
        verdict,
        tolerance: tol,
        witnesses,
    };
    if rr > 0 {
        let worst_p = chans.iter().map(|c| c.rate * c.norm * hs_norm(&c.blocks.p)).fold(0.0, f64::max);
        witnesses.push(Witness {
            condition: "l_p_nonzero".into(),
            channel: None,
            residual: worst_p,
        });
        if worst_p <= tol {
            return Ok(report(Property::NotAttractiveObstruction, Verdict::Holds, witnesses));
        }
        if decomp.f() == 1 {
            let mut pump = ComplexMatrix::zeros(rr, rr);
            for c in &chans {
                pump += c.blocks.p.adjoint() * &c.blocks.p * r(c.rate);
            }
            let lambda = min_eigenvalue(&pump);
            witnesses.push(Witness {
                condition: "pumping_min_eigenvalue".into(),
                channel: None,
                residual: lambda,
            });
            if lambda > TOL_PSD {
                return Ok(report(Property::AttractiveSufficient, Verdict::Holds, witnesses));
            }
        }
        return Ok(report(Property::AttractiveSufficient, Verdict::Inconclusive, witnesses));
    }
    let g = factor_generator_bloch(model, decomp)?;
    let ss = stationary_states_from_bloch(decomp.f(), &g)?;
    witnesses.push(Witness {
        condition: "factor_stationary_dimension".into(),
        channel: None,
        residual: ss.kernel.len() as f64,
    });
    let verdict = if ss.unique { Verdict::Holds } else { Verdict::Fails };
    Ok(report(Property::AttractiveSufficient, verdict, witnesses))
}

/// `d/dt trace(Pi_R rho)` for a subspace decomposition, cross-checked against
/// `-trace(sum_k gamma_k L_P,k^dagger L_P,k rho_R)`.
pub fn pumping_rate(model: &LindbladModel, rho: &DensityOperator, decomp: &SpaceDecomposition) -> Result<f64> {
    check_dims(model.dim(), decomp)?;
    if decomp.f() != 1 {
        return Err(Error::Decomposition(format!("pumping rate needs f = 1, got f = {}", decomp.f())));
    }
    if rho.dim() != model.dim() {
        return Err(Error::Dimension("state and model dimensions differ".into()));
    }
    let direct = trace(&(decomp.projector_r() * model.apply(rho.matrix()))).re;
    let rho_r = block_decompose(rho.matrix(), decomp)?.r;
    let mut pump = ComplexMatrix::zeros(decomp.r(), decomp.r());
    for ch in channel_blocks(model, decomp)? {
        pump += ch.blocks.p.adjoint() * &ch.blocks.p * r(ch.rate);
    }
    let formula = -trace(&(pump * rho_r)).re;
    let tol = verdict_tolerance(model.scale());
    if (direct - formula).abs() > tol {
        return Err(Error::NotInvariant(format!("pumping identity off by {:.3e}", (direct - formula).abs())));
    }
    Ok(direct)
}

/// Purity of the reduced state `trace_F(Pi rho Pi)` (normalized) on `H_S`.
pub fn reduced_purity(rho: &ComplexMatrix, decomp: &SpaceDecomposition) -> Result<f64> {
    let blocks = block_decompose(rho, decomp)?;
    let reduced = partial_trace(&blocks.sf, TraceOut::Factor, decomp.n(), decomp.f())?;
    let t = trace(&reduced).re;
    Ok(hs_inner(&reduced, &reduced).re / (t * t))
}

/// `||rho_P|| + ||rho_R||`: weight outside the initialized block.
pub fn leakage(rho: &ComplexMatrix, decomp: &SpaceDecomposition) -> Result<f64> {
    let blocks = block_decompose(rho, decomp)?;
    Ok(hs_norm(&blocks.p) + hs_norm(&blocks.r))
}

/// Bloch coordinates of the reduced system state; convenient for reports.
pub fn reduced_bloch(rho: &ComplexMatrix, decomp: &SpaceDecomposition) -> Result<Vec<f64>> {
    let blocks = block_decompose(rho, decomp)?;
    Ok(bloch_coordinates(&partial_trace(&blocks.sf, TraceOut::Factor, decomp.n(), decomp.f())?))
}
