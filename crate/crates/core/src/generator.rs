//! Markovian generators in diagonal (Lindblad) and GKS form.
//!
//! Both forms implement [`Generator`], which exposes the action on an
//! operator, the column-stacked superoperator and the real matrix in the
//! Hermitian (Gell-Mann) basis. Stationary-state analysis and the
//! trace-shift gauge transformation live here as well.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linquant::{
    anticommutator, commutator, from_bloch_coordinates, hermitian_basis, hermitian_eigen,
    hermitian_part, hs_inner, hs_norm, identity, is_hermitian, kron, max_norm, min_eigenvalue, r, trace,
    vec_col, ComplexMatrix, DensityOperator, Tolerances, C64, I, TOL_ALG, ZERO,
};

/// Channels with a smaller rate are dropped when a model is built.
pub const RATE_CUTOFF: f64 = 1e-14;
/// Relative singular-value threshold defining a numerical kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-9;

/// A Markovian generator acting on `d x d` operators.
pub trait Generator {
    fn dim(&self) -> usize;

    /// `L(x)`; defined for arbitrary (not only Hermitian) `x`.
    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix;

    /// Matrix `S` with `S vec(x) = vec(L(x))` under column stacking.
    fn superoperator(&self) -> ComplexMatrix;

    fn apply_state(&self, rho: &DensityOperator) -> Result<ComplexMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::Dimension(format!("state of dimension {} for a dimension-{} generator", rho.dim(), self.dim())));
        }
        Ok(self.apply(rho.matrix()))
    }

    /// Real `d^2 x d^2` matrix of the generator in [`hermitian_basis`].
    fn bloch_generator(&self) -> DMatrix<f64> {
        bloch_generator_of(self.dim(), |x| self.apply(x))
    }
}

/// Real matrix `G[a][b] = trace(B_a L(B_b))` of any Hermiticity-preserving map.
pub fn bloch_generator_of(d: usize, map: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> DMatrix<f64> {
    let basis = hermitian_basis(d);
    let images: Vec<ComplexMatrix> = basis.iter().map(&map).collect();
    DMatrix::from_fn(d * d, d * d, |a, b| hs_inner(&basis[a], &images[b]).re)
}

/// Superoperator of `x -> a x b` under column stacking: `b^T (x) a`.
fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    kron(&b.transpose(), a)
}

/// One weighted noise channel `gamma * D(L, .)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub rate: f64,
    pub op: ComplexMatrix,
}

impl Channel {
    pub fn new(rate: f64, op: ComplexMatrix) -> Self {
        Self { rate, op }
    }
}

/// Diagonal-form generator `-i[H, .] + sum_k gamma_k D(L_k, .)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    channels: Vec<Channel>,
}

impl LindbladModel {
    pub fn new(hamiltonian: ComplexMatrix, channels: Vec<Channel>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if d == 0 || hamiltonian.ncols() != d {
            return Err(Error::Dimension("Hamiltonian must be square and non-empty".into()));
        }
        if !is_hermitian(&hamiltonian, TOL_ALG * hs_norm(&hamiltonian).max(1.0)) {
            return Err(Error::InvalidParameter("Hamiltonian is not Hermitian".into()));
        }
        for (k, ch) in channels.iter().enumerate() {
            if ch.op.nrows() != d || ch.op.ncols() != d {
                return Err(Error::Dimension(format!("channel {k} operator is {}x{}, expected {d}x{d}", ch.op.nrows(), ch.op.ncols())));
            }
            if !(ch.rate >= 0.0) || !ch.rate.is_finite() {
                return Err(Error::InvalidParameter(format!("channel {k} has invalid rate {}", ch.rate)));
            }
        }
        let channels = channels.into_iter().filter(|ch| ch.rate >= RATE_CUTOFF).collect();
        Ok(Self {
            hamiltonian: hermitian_part(&hamiltonian),
            channels,
        })
    }

    /// Purely Hamiltonian model.
    pub fn unitary(hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Scale `||H|| + sum_k gamma_k ||L_k||^2` used to make tolerances relative.
    pub fn scale(&self) -> f64 {
        hs_norm(&self.hamiltonian) + self.channels.iter().map(|ch| ch.rate * hs_norm(&ch.op).powi(2)).sum::<f64>()
    }

    /// Same channels, Hamiltonian replaced.
    pub fn with_hamiltonian(&self, hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(hamiltonian, self.channels.clone())
    }

    /// Adds a Hermitian term to the Hamiltonian.
    pub fn with_added_hamiltonian(&self, extra: &ComplexMatrix) -> Result<Self> {
        self.with_hamiltonian(&self.hamiltonian + extra)
    }

    /// `H - (i/2) sum_k gamma_k L_k^dagger L_k`.
    pub fn effective_hamiltonian(&self) -> ComplexMatrix {
        let mut h = self.hamiltonian.clone();
        for ch in &self.channels {
            h -= ch.op.adjoint() * &ch.op * (I * r(0.5 * ch.rate));
        }
        h
    }
}

impl Generator for LindbladModel {
    fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = commutator(&self.hamiltonian, x) * (-I);
        for ch in &self.channels {
            let l = &ch.op;
            let ldl = l.adjoint() * l;
            out += (l * x * l.adjoint() - anticommutator(&ldl, x) * r(0.5)) * r(ch.rate);
        }
        out
    }

    fn superoperator(&self) -> ComplexMatrix {
        let d = self.dim();
        let id = identity(d);
        let mut s = (sandwich(&self.hamiltonian, &id) - sandwich(&id, &self.hamiltonian)) * (-I);
        for ch in &self.channels {
            let l = &ch.op;
            let ldl = l.adjoint() * l;
            s += (sandwich(l, &l.adjoint()) - (sandwich(&ldl, &id) + sandwich(&id, &ldl)) * r(0.5)) * r(ch.rate);
        }
        s
    }
}

/// Non-diagonal generator `-i[H, .] + sum_kl a_kl (F_k . F_l^dagger - 1/2 {F_l^dagger F_k, .})`.
#[derive(Debug, Clone, PartialEq)]
pub struct GksModel {
    hamiltonian: ComplexMatrix,
    basis: Vec<ComplexMatrix>,
    gks: ComplexMatrix,
}

impl GksModel {
    /// Validates a (reduced) GKS description: traceless orthonormal basis of
    /// at most `d^2 - 1` elements and a Hermitian positive semidefinite matrix.
    pub fn new(hamiltonian: ComplexMatrix, basis: Vec<ComplexMatrix>, gks: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(hamiltonian, basis, gks, Tolerances::default())
    }

    pub fn with_tolerances(hamiltonian: ComplexMatrix, basis: Vec<ComplexMatrix>, gks: ComplexMatrix, tol: Tolerances) -> Result<Self> {
        let d = hamiltonian.nrows();
        if d == 0 || hamiltonian.ncols() != d {
            return Err(Error::Dimension("Hamiltonian must be square and non-empty".into()));
        }
        if !is_hermitian(&hamiltonian, tol.alg * hs_norm(&hamiltonian).max(1.0)) {
            return Err(Error::InvalidParameter("Hamiltonian is not Hermitian".into()));
        }
        let m = basis.len();
        if m > d * d - 1 {
            return Err(Error::Dimension(format!("{m} basis operators exceed d^2 - 1 = {}", d * d - 1)));
        }
        if gks.nrows() != m || gks.ncols() != m {
            return Err(Error::Dimension(format!("GKS matrix is {}x{}, basis has {m} elements", gks.nrows(), gks.ncols())));
        }
        for (k, fk) in basis.iter().enumerate() {
            if fk.nrows() != d || fk.ncols() != d {
                return Err(Error::Dimension(format!("basis operator {k} has wrong shape")));
            }
            if trace(fk).norm() > tol.alg {
                return Err(Error::InvalidParameter(format!("basis operator {k} is not traceless")));
            }
            for (l, fl) in basis.iter().enumerate() {
                let expected = if k == l { 1.0 } else { 0.0 };
                if (hs_inner(fk, fl) - r(expected)).norm() > tol.alg {
                    return Err(Error::InvalidParameter(format!("basis operators {k}, {l} are not orthonormal")));
                }
            }
        }
        if !is_hermitian(&gks, tol.alg * hs_norm(&gks).max(1.0)) {
            return Err(Error::InvalidParameter("GKS matrix is not Hermitian".into()));
        }
        if m > 0 {
            let min = min_eigenvalue(&gks);
            if min < -tol.psd {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(Self {
            hamiltonian: hermitian_part(&hamiltonian),
            basis,
            gks: hermitian_part(&gks),
        })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn gks_matrix(&self) -> &ComplexMatrix {
        &self.gks
    }

    /// Diagonalizes the GKS matrix, `A = V diag(gamma) V^dagger`, giving
    /// channels `(gamma_j, sum_k V_kj F_k)`; zero-rate channels are dropped.
    pub fn to_lindblad(&self) -> Result<LindbladModel> {
        let d = self.hamiltonian.nrows();
        if self.basis.is_empty() {
            return LindbladModel::unitary(self.hamiltonian.clone());
        }
        let (rates, vectors) = hermitian_eigen(&self.gks);
        if let Some(&min) = rates.first() {
            if min < -Tolerances::default().psd {
                return Err(Error::NotPositive(min));
            }
        }
        let mut channels = Vec::new();
        for (j, &rate) in rates.iter().enumerate() {
            if rate < RATE_CUTOFF {
                continue;
            }
            let mut op = ComplexMatrix::zeros(d, d);
            for (k, fk) in self.basis.iter().enumerate() {
                op += fk * vectors[(k, j)];
            }
            channels.push(Channel::new(rate, op));
        }
        LindbladModel::new(self.hamiltonian.clone(), channels)
    }
}

impl Generator for GksModel {
    fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = commutator(&self.hamiltonian, x) * (-I);
        for (k, fk) in self.basis.iter().enumerate() {
            for (l, fl) in self.basis.iter().enumerate() {
                let a = self.gks[(k, l)];
                if a == ZERO {
                    continue;
                }
                let fl_dag = fl.adjoint();
                let prod = &fl_dag * fk;
                out += (fk * x * &fl_dag - anticommutator(&prod, x) * r(0.5)) * a;
            }
        }
        out
    }

    fn superoperator(&self) -> ComplexMatrix {
        let d = self.dim();
        let id = identity(d);
        let mut s = (sandwich(&self.hamiltonian, &id) - sandwich(&id, &self.hamiltonian)) * (-I);
        for (k, fk) in self.basis.iter().enumerate() {
            for (l, fl) in self.basis.iter().enumerate() {
                let a = self.gks[(k, l)];
                if a == ZERO {
                    continue;
                }
                let fl_dag = fl.adjoint();
                let prod = &fl_dag * fk;
                s += (sandwich(fk, &fl_dag) - (sandwich(&prod, &id) + sandwich(&id, &prod)) * r(0.5)) * a;
            }
        }
        s
    }
}

/// Applies an arbitrary generator to each basis matrix to build its superoperator.
pub fn superoperator_of(d: usize, map: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for col in 0..d * d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(col % d, col / d)] = r(1.0);
        let image = vec_col(&map(&e));
        s.set_column(col, &image);
    }
    s
}

/// Affine form `d rho_v / dt = C / sqrt(d) + D rho_v` of the generator in the
/// Hermitian basis, where `rho_v` omits the constant identity coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochAffineForm {
    pub dim: usize,
    pub c: DVector<f64>,
    pub d: DMatrix<f64>,
}

impl BlochAffineForm {
    pub fn from_bloch_generator(dim: usize, g: &DMatrix<f64>) -> Self {
        let m = dim * dim - 1;
        Self {
            dim,
            c: g.view((1, 0), (m, 1)).column(0).into_owned(),
            d: g.view((1, 1), (m, m)).into_owned(),
        }
    }

    /// Full `d^2 x d^2` real generator with the zero first row restored.
    pub fn full(&self) -> DMatrix<f64> {
        let m = self.dim * self.dim;
        let mut g = DMatrix::zeros(m, m);
        g.view_mut((1, 0), (m - 1, 1)).copy_from(&self.c);
        g.view_mut((1, 1), (m - 1, m - 1)).copy_from(&self.d);
        g
    }

    /// Superoperator rebuilt from `(C, D)` by the change of basis `T G T^dagger`.
    pub fn to_superoperator(&self) -> ComplexMatrix {
        let basis = hermitian_basis(self.dim);
        let t = ComplexMatrix::from_columns(&basis.iter().map(vec_col).collect::<Vec<_>>());
        let g = self.full().map(r);
        &t * g * t.adjoint()
    }

    /// `(1/sqrt(d)) (1, -D^-1 C)` when `D` is invertible.
    pub fn fixed_point(&self) -> Option<Vec<f64>> {
        let scale = 1.0 / (self.dim as f64).sqrt();
        let v = self.d.clone().lu().solve(&self.c)?;
        let mut coords = Vec::with_capacity(self.dim * self.dim);
        coords.push(scale);
        coords.extend(v.iter().map(|x| -x * scale));
        Some(coords)
    }
}

pub fn bloch_affine<G: Generator + ?Sized>(model: &G) -> BlochAffineForm {
    BlochAffineForm::from_bloch_generator(model.dim(), &model.bloch_generator())
}

/// Stationary states of a generator.
#[derive(Debug, Clone)]
pub struct StationaryStates {
    /// Linearly independent density operators spanning the kernel.
    pub states: Vec<DensityOperator>,
    /// Orthonormal Hermitian basis of the numerical kernel.
    pub kernel: Vec<ComplexMatrix>,
    /// True iff the kernel is one-dimensional (equivalently `D` invertible).
    pub unique: bool,
}

pub fn stationary_states<G: Generator + ?Sized>(model: &G) -> Result<StationaryStates> {
    stationary_states_from_bloch(model.dim(), &model.bloch_generator())
}

/// Kernel analysis on the real Hermitian-basis generator of dimension `d`.
pub fn stationary_states_from_bloch(d: usize, g: &DMatrix<f64>) -> Result<StationaryStates> {
    if d == 1 {
        let state = DensityOperator::from_unchecked(identity(1));
        return Ok(StationaryStates {
            states: vec![state],
            kernel: vec![identity(1)],
            unique: true,
        });
    }
    let affine = BlochAffineForm::from_bloch_generator(d, g);
    let g_svd = g.clone().svd(false, false);
    let sigma_max = g_svd.singular_values.max().max(f64::MIN_POSITIVE);
    let threshold = KERNEL_THRESHOLD * sigma_max;
    let d_svd = affine.d.clone().svd(false, false);
    let traceless_kernel = d_svd.singular_values.iter().filter(|&&s| s < threshold).count();
    let psd_tol = Tolerances::default().psd;

    if traceless_kernel == 0 {
        let coords = affine
            .fixed_point()
            .ok_or_else(|| Error::InternalInconsistency("D reported invertible but LU solve failed".into()))?;
        let m = hermitian_part(&from_bloch_coordinates(&coords, d)?);
        let min = min_eigenvalue(&m);
        let kernel = vec![&m * r(1.0 / hs_norm(&m))];
        if min < -psd_tol {
            return Err(Error::NoStationaryState { kernel_dim: 1 });
        }
        return Ok(StationaryStates {
            states: vec![DensityOperator::from_unchecked(m)],
            kernel,
            unique: true,
        });
    }

    let full = g.clone().svd(false, true);
    let v_t = full.v_t.expect("right singular vectors requested");
    let basis = hermitian_basis(d);
    let to_matrix = |coords: &[f64]| -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        for (b, &x) in basis.iter().zip(coords) {
            m += b * r(x);
        }
        m
    };
    let kernel: Vec<ComplexMatrix> = (0..full.singular_values.len())
        .filter(|&k| full.singular_values[k] < threshold)
        .map(|k| to_matrix(v_t.row(k).iter().copied().collect::<Vec<_>>().as_slice()))
        .collect();

    // Positive and negative parts of a stationary Hermitian element are stationary.
    let mut candidates: Vec<ComplexMatrix> = Vec::new();
    for x in &kernel {
        let (values, vectors) = hermitian_eigen(x);
        for sign in [1.0, -1.0] {
            let mut part = ComplexMatrix::zeros(d, d);
            for (k, &lam) in values.iter().enumerate() {
                if sign * lam > 0.0 {
                    let v = vectors.column(k);
                    part += &v * v.adjoint() * r(sign * lam);
                }
            }
            let t = trace(&part).re;
            if t > 1e-8 {
                candidates.push(part * r(1.0 / t));
            }
        }
    }
    // Greedy independent subset (Gram-Schmidt in Hilbert-Schmidt space).
    let mut orth: Vec<ComplexMatrix> = Vec::new();
    let mut states = Vec::new();
    for cand in candidates {
        let mut resid = cand.clone();
        for o in &orth {
            resid -= o * hs_inner(o, &resid);
        }
        let norm = hs_norm(&resid);
        if norm > 1e-6 * hs_norm(&cand) {
            orth.push(resid * r(1.0 / norm));
            states.push(DensityOperator::from_unchecked(hermitian_part(&cand)));
        }
        if states.len() == kernel.len() {
            break;
        }
    }
    if states.is_empty() {
        return Err(Error::NoStationaryState { kernel_dim: kernel.len() });
    }
    let unique = kernel.len() == 1;
    Ok(StationaryStates { states, kernel, unique })
}

/// Applies `L_k -> L_k + c_k I` and returns the gauge-equivalent model
/// together with the Hamiltonian correction
/// `H_c = -(i/2) sum_k gamma_k (c_k^* L_k - c_k L_k^dagger)`, so that the
/// shifted model has Hamiltonian `H + H_c`.
pub fn trace_shift(model: &LindbladModel, shifts: &[C64]) -> Result<(LindbladModel, ComplexMatrix)> {
    if shifts.len() != model.channels().len() {
        return Err(Error::Dimension(format!("{} shifts for {} channels", shifts.len(), model.channels().len())));
    }
    let d = model.dim();
    let mut h_c = ComplexMatrix::zeros(d, d);
    let mut channels = Vec::with_capacity(shifts.len());
    for (ch, &shift) in model.channels().iter().zip(shifts) {
        h_c += (&ch.op * shift.conj() - ch.op.adjoint() * shift) * (-I * r(0.5 * ch.rate));
        channels.push(Channel::new(ch.rate, &ch.op + identity(d) * shift));
    }
    let h_c = hermitian_part(&h_c);
    let shifted = LindbladModel::new(model.hamiltonian() + &h_c, channels)?;
    Ok((shifted, h_c))
}

/// Checks the QDS sanity properties of `L(x)` on Hermitian `x`: Hermitian and traceless.
pub fn output_defect<G: Generator + ?Sized>(model: &G, x: &ComplexMatrix) -> f64 {
    let y = model.apply(x);
    max_norm(&(&y - y.adjoint())).max(trace(&y).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linquant::{c, pauli, vec_col, DensityOperator};
    use crate::models;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_model(rng: &mut ChaCha8Rng, d: usize, k: usize) -> LindbladModel {
        let channels = (0..k).map(|_| Channel::new(rand::Rng::random_range(rng, 0.1..2.0), random::matrix(rng, d, d))).collect();
        LindbladModel::new(random::hermitian(rng, d), channels).unwrap()
    }

    #[test]
    fn spontaneous_emission_initial_slope() {
        let gamma = 0.7;
        let model = models::spontaneous_emission(1.3, gamma);
        let excited = DensityOperator::basis_state(2, 0).unwrap();
        let rate = model.apply_state(&excited).unwrap()[(0, 0)];
        assert!((rate - r(-gamma)).norm() < 1e-14);
    }

    #[test]
    fn hamiltonian_fixes_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let model = LindbladModel::unitary(random::hermitian(&mut rng, 4)).unwrap();
        let out = model.apply(DensityOperator::maximally_mixed(4).matrix());
        assert!(max_norm(&out) < 1e-14);
    }

    #[test]
    fn outputs_are_hermitian_and_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..200 {
            let d = 2 + i % 3;
            let model = random_model(&mut rng, d, 1 + i % 3);
            let rho = random::density(&mut rng, d);
            assert!(output_defect(&model, rho.matrix()) < 1e-12 * model.scale().max(1.0));
        }
    }

    #[test]
    fn superoperator_matches_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 2..5 {
            let model = random_model(&mut rng, d, 2);
            let s = model.superoperator();
            let x = random::matrix(&mut rng, d, d);
            let lhs = &s * vec_col(&x);
            let rhs = vec_col(&model.apply(&x));
            assert!((lhs - rhs).camax() < 1e-12 * model.scale());
            let generic = superoperator_of(d, |y| model.apply(y));
            assert!(max_norm(&(generic - &s)) < 1e-12 * model.scale());
        }
    }

    #[test]
    fn zero_model_has_zero_superoperator() {
        let model = LindbladModel::unitary(ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(model.superoperator(), ComplexMatrix::zeros(9, 9));
    }

    #[test]
    fn spontaneous_emission_spectrum() {
        // Oracle: populations relax at gamma, coherences rotate at 2 omega and
        // decay at gamma / 2, plus the stationary zero mode.
        let (omega, gamma) = (0.8, 1.5);
        let model = models::spontaneous_emission(omega, gamma);
        let mut eig = crate::linquant::eigenvalues(&model.superoperator());
        eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut expected = [c(-gamma, 0.0), c(-gamma / 2.0, -2.0 * omega), c(-gamma / 2.0, 2.0 * omega), c(0.0, 0.0)];
        expected.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        for (a, b) in eig.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn contraction_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let model = random_model(&mut rng, 3, 2);
            let eig = crate::linquant::eigenvalues(&model.superoperator());
            assert!(eig.iter().any(|z| z.norm() < 1e-9 * model.scale()));
            assert!(eig.iter().all(|z| z.re <= 1e-9 * model.scale()));
        }
    }

    #[test]
    fn gks_diagonal_case() {
        let basis: Vec<_> = hermitian_basis(2).into_iter().skip(1).collect();
        let a = crate::linquant::diag_real(&[0.5, 0.0, 2.0]);
        let gks = GksModel::new(pauli::z(), basis.clone(), a).unwrap();
        let lind = gks.to_lindblad().unwrap();
        assert_eq!(lind.channels().len(), 2, "zero-rate channel dropped");
        for ch in lind.channels() {
            let overlap = basis.iter().map(|b| hs_inner(b, &ch.op).norm()).fold(0.0, f64::max);
            assert!((overlap - 1.0).abs() < 1e-12);
        }
        assert!(max_norm(&(gks.superoperator() - lind.superoperator())) < 1e-12);
    }

    #[test]
    fn gks_linear_decoherence_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = models::linear_decoherence_basis(2);
        assert_eq!(basis.len(), 6);
        let a = random::positive(&mut rng, 6);
        let gks = GksModel::new(random::hermitian(&mut rng, 4), basis, a).unwrap();
        let lind = gks.to_lindblad().unwrap();
        assert_eq!(lind.channels().len(), 6);
        for _ in 0..10 {
            let rho = random::density(&mut rng, 4);
            assert!(max_norm(&(gks.apply(rho.matrix()) - lind.apply(rho.matrix()))) < 1e-10);
        }
    }

    #[test]
    fn gks_rejects_negative_matrix() {
        let basis: Vec<_> = hermitian_basis(2).into_iter().skip(1).collect();
        let a = crate::linquant::diag_real(&[1.0, -0.5, 0.0]);
        assert!(matches!(GksModel::new(pauli::z(), basis, a), Err(Error::NotPositive(_))));
    }

    #[test]
    fn bloch_form_of_unitary_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let model = LindbladModel::unitary(random::hermitian(&mut rng, 3)).unwrap();
        let form = bloch_affine(&model);
        assert!(form.c.amax() < 1e-13);
        assert!((&form.d + form.d.transpose()).amax() < 1e-13);
    }

    #[test]
    fn bloch_form_fixed_point_is_ground_state() {
        let model = models::spontaneous_emission(0.0, 1.0);
        let form = bloch_affine(&model);
        let coords = form.fixed_point().unwrap();
        // sigma_z / sqrt(2) coordinate of |1><1| is -1/sqrt(2), i.e. z = -1
        assert!((coords[3] * std::f64::consts::SQRT_2 + 1.0).abs() < 1e-12);
        assert!(coords[1].abs() < 1e-12 && coords[2].abs() < 1e-12);
    }

    #[test]
    fn bloch_form_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 2..5 {
            let model = random_model(&mut rng, d, 2);
            let form = bloch_affine(&model);
            let first_row = model.bloch_generator().row(0).amax();
            assert!(first_row < 1e-12 * model.scale());
            assert!(max_norm(&(form.to_superoperator() - model.superoperator())) < 1e-10);
        }
    }

    #[test]
    fn stationary_state_of_emission_is_ground() {
        let model = models::spontaneous_emission(1.0, 1.0);
        let ss = stationary_states(&model).unwrap();
        assert!(ss.unique);
        let ground = DensityOperator::basis_state(2, 1).unwrap();
        assert!(max_norm(&(ss.states[0].matrix() - ground.matrix())) < 1e-10);
    }

    #[test]
    fn dephasing_has_many_stationary_states() {
        let model = LindbladModel::new(ComplexMatrix::zeros(2, 2), vec![Channel::new(1.0, pauli::z())]).unwrap();
        let ss = stationary_states(&model).unwrap();
        assert!(!ss.unique);
        assert_eq!(ss.kernel.len(), 2);
        assert_eq!(ss.states.len(), 2);
        let mixed = DensityOperator::maximally_mixed(2);
        assert!(max_norm(&model.apply(mixed.matrix())) < 1e-15);
        for s in &ss.states {
            assert!(max_norm(&model.apply(s.matrix())) < 1e-10);
            assert!(min_eigenvalue(s.matrix()) > -1e-10);
        }
    }

    #[test]
    fn compensated_upper_triangular_noise_is_relaxing_to_top_state() {
        let model = models::upper_triangular_noise_compensated();
        let ss = stationary_states(&model).unwrap();
        assert!(ss.unique);
        let target = DensityOperator::basis_state(2, 0).unwrap();
        assert!(max_norm(&(ss.states[0].matrix() - target.matrix())) < 1e-10);
    }

    #[test]
    fn trace_shift_hermitian_real_is_trivial() {
        let model = LindbladModel::new(pauli::z(), vec![Channel::new(1.0, pauli::x())]).unwrap();
        let (_, h_c) = trace_shift(&model, &[r(0.7)]).unwrap();
        assert!(max_norm(&h_c) < 1e-15);
    }

    #[test]
    fn trace_shift_upper_triangular_noise() {
        let l = pauli::z() + pauli::raising();
        let model = LindbladModel::new(pauli::z(), vec![Channel::new(1.0, l.clone())]).unwrap();
        let (shifted, h_c) = trace_shift(&model, &[r(-1.0)]).unwrap();
        // -i (L - L^dagger) = sigma_y; the correction is half of its negative
        assert!(max_norm(&((&l - l.adjoint()) * (-I) - pauli::y())) < 1e-15);
        assert!(max_norm(&(&h_c + pauli::y() * r(0.5))) < 1e-15);
        assert!(max_norm(&(shifted.superoperator() - model.superoperator())) < 1e-14);
        let shifted_op = &shifted.channels()[0].op;
        assert_eq!(shifted_op[(1, 0)], ZERO);
    }

    #[test]
    fn trace_shift_is_gauge() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for i in 0..100 {
            let d = 2 + i % 3;
            let model = random_model(&mut rng, d, 1 + i % 3);
            let shifts: Vec<C64> = (0..model.channels().len()).map(|_| random::matrix(&mut rng, 1, 1)[(0, 0)]).collect();
            let (shifted, _) = trace_shift(&model, &shifts).unwrap();
            let rho = random::density(&mut rng, d);
            assert!(max_norm(&(shifted.apply(rho.matrix()) - model.apply(rho.matrix()))) < 1e-11);
        }
    }

    #[test]
    fn trace_shift_rejects_wrong_count() {
        let model = models::spontaneous_emission(1.0, 1.0);
        assert!(trace_shift(&model, &[]).is_err());
    }

    #[test]
    fn tiny_rates_are_dropped() {
        let model = LindbladModel::new(pauli::z(), vec![Channel::new(1e-16, pauli::x()), Channel::new(1.0, pauli::z())]).unwrap();
        assert_eq!(model.channels().len(), 1);
    }

    proptest::proptest! {
        #[test]
        fn gks_and_diagonal_superoperators_agree(seed in 0u64..5_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let basis: Vec<_> = hermitian_basis(3).into_iter().skip(1).take(5).collect();
            let a = random::positive(&mut rng, 5);
            let gks = GksModel::new(random::hermitian(&mut rng, 3), basis, a).unwrap();
            let lind = gks.to_lindblad().unwrap();
            proptest::prop_assert!(max_norm(&(gks.superoperator() - lind.superoperator())) < 1e-10);
        }
    }
}
