//! Dense complex linear algebra and quantum-state primitives.
//!
//! Everything here works on [`ComplexMatrix`] (a dynamically sized
//! `nalgebra` matrix of `Complex64`). Tensor products use the S-major
//! convention: the basis vector `|s>|phi>` of `H_S (x) H_F` sits at index
//! `s * f + phi`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Tolerance for algebraic identities.
pub const TOL_ALG: f64 = 1e-9;
/// Tolerance for eigenvalue positivity.
pub const TOL_PSD: f64 = 1e-8;
/// Relaxed tolerance applied to states produced by time integration.
pub const TOL_TRAJ: f64 = 1e-6;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Overridable tolerance pair used by validators and certification checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub alg: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            alg: TOL_ALG,
            psd: TOL_PSD,
        }
    }
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a matrix from row-major real entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| r(entries[i * cols + j]))
}

/// Builds a matrix from row-major complex entries.
pub fn complex_matrix(rows: usize, cols: usize, entries: &[C64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j])
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let d = values.len();
    ComplexMatrix::from_fn(d, d, |i, j| if i == j { r(values[i]) } else { ZERO })
}

/// Pauli and ladder matrices in the computational basis `{|0>, |1>}`.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn y() -> ComplexMatrix {
        complex_matrix(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> ComplexMatrix {
        real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    /// `|0><1|`, so that `raising() |1> = |0>`; the state `|0>` is the top level.
    pub fn raising() -> ComplexMatrix {
        real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    /// `|1><0|`.
    pub fn lowering() -> ComplexMatrix {
        real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

/// Hilbert-Schmidt inner product `trace(a^dagger b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus.
pub fn max_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()) * r(0.5)
}

/// Anti-Hermitian part, so that `a = hermitian_part(a) + anti_hermitian_part(a)`.
pub fn anti_hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a - a.adjoint()) * r(0.5)
}

pub fn is_square(a: &ComplexMatrix) -> bool {
    a.nrows() == a.ncols()
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> bool {
    is_square(a) && max_norm(&(a - a.adjoint())) <= tol
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
pub fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let d = a.nrows();
    if d == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(d, d, |row, col| eig.eigenvectors[(row, order[col])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// Eigenvalues of a general square matrix, read off the complex Schur form.
pub fn eigenvalues(a: &ComplexMatrix) -> Vec<C64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let (_, t) = nalgebra::Schur::new(a.clone()).unpack();
    t.diagonal().iter().copied().collect()
}

/// Trace norm `sum |lambda_i|` of the Hermitian part of `a`.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(a).iter().map(|x| x.abs()).sum()
}

/// Trace distance `1/2 ||a - b||_1` between Hermitian operators.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    0.5 * trace_norm(&(a - b))
}

/// Column-stacking vectorization.
pub fn vec_col(a: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_iterator(a.len(), a.iter().copied())
}

/// Inverse of [`vec_col`].
pub fn unvec_col(v: &ComplexVector, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(d, d, v.as_slice())
}

/// Completes a set of orthonormal column vectors to a unitary matrix whose
/// leading columns are the given vectors.
pub fn complete_basis(vectors: &[ComplexVector], d: usize) -> Result<ComplexMatrix> {
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(d);
    for v in vectors {
        if v.len() != d {
            return Err(Error::Dimension(format!("vector of length {} in dimension {d}", v.len())));
        }
        basis.push(v.clone());
    }
    for (a, u) in basis.iter().enumerate() {
        for (b, w) in basis.iter().enumerate() {
            let expected = if a == b { ONE } else { ZERO };
            if (u.dotc(w) - expected).norm() > TOL_ALG {
                return Err(Error::Decomposition("subspace vectors are not orthonormal".into()));
            }
        }
    }
    let mut candidate = 0;
    while basis.len() < d {
        let mut w = ComplexVector::zeros(d);
        w[candidate % d] = ONE;
        candidate += 1;
        // two Gram-Schmidt sweeps
        for _ in 0..2 {
            for u in &basis {
                let proj = u.dotc(&w);
                w -= u * proj;
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            basis.push(w / r(norm));
        }
        if candidate > 2 * d {
            return Err(Error::Decomposition("failed to complete orthonormal basis".into()));
        }
    }
    Ok(ComplexMatrix::from_columns(&basis))
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: Tolerances) -> Result<Self> {
        if !is_square(&matrix) || matrix.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "density operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let skew = max_norm(&(&matrix - matrix.adjoint()));
        if skew > tol.alg {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {skew:.3e})")));
        }
        let tr = trace(&matrix);
        if (tr - ONE).norm() > tol.alg {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = min_eigenvalue(&matrix);
        if min < -tol.psd {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix without validation; the caller vouches for the invariants.
    pub fn from_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi = psi / r(norm);
        Ok(Self {
            matrix: &psi * psi.adjoint(),
        })
    }

    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::Dimension(format!("basis index {k} out of range for dimension {d}")));
        }
        let mut m = zeros(d, d);
        m[(k, k)] = ONE;
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: identity(d) * r(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        hs_inner(&self.matrix, &self.matrix).re
    }
}

/// Dimensions `(n, f, r)` and the unitary realizing `H = (H_S (x) H_F) (+) H_R`.
///
/// Column `s * f + phi` of `basis_change` is the vector `|s>|phi>`; the last
/// `r` columns span `H_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDecomposition {
    n: usize,
    f: usize,
    r: usize,
    basis_change: ComplexMatrix,
}

impl SpaceDecomposition {
    pub fn new(n: usize, f: usize, r: usize, basis_change: ComplexMatrix) -> Result<Self> {
        if n == 0 || f == 0 {
            return Err(Error::Decomposition(format!("n and f must be at least 1 (n={n}, f={f})")));
        }
        let d = n * f + r;
        if basis_change.nrows() != d || basis_change.ncols() != d {
            return Err(Error::Dimension(format!(
                "basis change is {}x{}, decomposition needs {d}x{d}",
                basis_change.nrows(),
                basis_change.ncols()
            )));
        }
        let defect = max_norm(&(basis_change.adjoint() * &basis_change - identity(d)));
        if defect > TOL_ALG {
            return Err(Error::Decomposition(format!("basis change is not unitary (defect {defect:.3e})")));
        }
        Ok(Self { n, f, r, basis_change })
    }

    /// Decomposition in the computational basis.
    pub fn standard(n: usize, f: usize, r: usize) -> Result<Self> {
        Self::new(n, f, r, identity(n * f + r))
    }

    /// Subspace decomposition (`f = 1`) spanned by orthonormal vectors.
    pub fn from_subspace(vectors: &[ComplexVector], d: usize) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Decomposition("empty subspace".into()));
        }
        let u = complete_basis(vectors, d)?;
        Self::new(vectors.len(), 1, d - vectors.len(), u)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn nf(&self) -> usize {
        self.n * self.f
    }

    pub fn dim(&self) -> usize {
        self.n * self.f + self.r
    }

    pub fn basis_change(&self) -> &ComplexMatrix {
        &self.basis_change
    }

    /// Orthogonal projector onto `H_S (x) H_F` in the original basis.
    pub fn projector_sf(&self) -> ComplexMatrix {
        let cols = self.basis_change.columns(0, self.nf());
        &cols * cols.adjoint()
    }

    /// Orthogonal projector onto `H_R` in the original basis.
    pub fn projector_r(&self) -> ComplexMatrix {
        let cols = self.basis_change.columns(self.nf(), self.r);
        &cols * cols.adjoint()
    }

    /// Expresses `x` in the decomposition basis: `U^dagger x U`.
    pub fn to_local(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.basis_change.adjoint() * x * &self.basis_change
    }

    /// Inverse of [`Self::to_local`].
    pub fn to_global(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.basis_change * x * self.basis_change.adjoint()
    }

    /// Embeds `rho_S (x) rho_F` into the full space (zero on `H_R`).
    pub fn embed_product(&self, rho_s: &ComplexMatrix, rho_f: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho_s.nrows() != self.n || rho_f.nrows() != self.f {
            return Err(Error::Dimension("factor states do not match (n, f)".into()));
        }
        let mut local = zeros(self.dim(), self.dim());
        local.view_mut((0, 0), (self.nf(), self.nf())).copy_from(&kron(rho_s, rho_f));
        Ok(self.to_global(&local))
    }
}

/// The four blocks of `U^dagger X U` for a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockView {
    /// `nf x nf` block on `H_S (x) H_F`.
    pub sf: ComplexMatrix,
    /// `nf x r` block mapping `H_R` into `H_S (x) H_F`.
    pub p: ComplexMatrix,
    /// `r x nf` block mapping `H_S (x) H_F` into `H_R`.
    pub q: ComplexMatrix,
    /// `r x r` block on `H_R`.
    pub r: ComplexMatrix,
}

impl BlockView {
    /// Rebuilds the original-basis matrix from the blocks.
    pub fn reassemble(&self, decomp: &SpaceDecomposition) -> ComplexMatrix {
        let nf = decomp.nf();
        let d = decomp.dim();
        let mut local = zeros(d, d);
        local.view_mut((0, 0), (nf, nf)).copy_from(&self.sf);
        local.view_mut((0, nf), (nf, decomp.r())).copy_from(&self.p);
        local.view_mut((nf, 0), (decomp.r(), nf)).copy_from(&self.q);
        local.view_mut((nf, nf), (decomp.r(), decomp.r())).copy_from(&self.r);
        decomp.to_global(&local)
    }
}

pub fn block_decompose(x: &ComplexMatrix, decomp: &SpaceDecomposition) -> Result<BlockView> {
    let d = decomp.dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::Dimension(format!(
            "matrix is {}x{}, decomposition has dimension {d}",
            x.nrows(),
            x.ncols()
        )));
    }
    let local = decomp.to_local(x);
    let nf = decomp.nf();
    let rr = decomp.r();
    Ok(BlockView {
        sf: local.view((0, 0), (nf, nf)).into_owned(),
        p: local.view((0, nf), (nf, rr)).into_owned(),
        q: local.view((nf, 0), (rr, nf)).into_owned(),
        r: local.view((nf, nf), (rr, rr)).into_owned(),
    })
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOut {
    /// `trace_F`: result lives on `H_S`.
    Factor,
    /// `trace_S`: result lives on `H_F`.
    System,
}

pub fn partial_trace(x: &ComplexMatrix, side: TraceOut, n: usize, f: usize) -> Result<ComplexMatrix> {
    if x.nrows() != n * f || x.ncols() != n * f {
        return Err(Error::Dimension(format!(
            "partial trace of a {}x{} matrix over {n}x{f}",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(match side {
        TraceOut::Factor => ComplexMatrix::from_fn(n, n, |s, t| (0..f).map(|phi| x[(s * f + phi, t * f + phi)]).sum()),
        TraceOut::System => ComplexMatrix::from_fn(f, f, |phi, psi| (0..n).map(|s| x[(s * f + phi, s * f + psi)]).sum()),
    })
}

/// One term `weight * system (x) factor` of an operator Schmidt decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtTerm {
    pub weight: f64,
    pub system: ComplexMatrix,
    pub factor: ComplexMatrix,
}

/// Realignment `R[(s, t), (phi, psi)] = X[s f + phi, t f + psi]`, an `n^2 x f^2` matrix.
fn reshuffle(x: &ComplexMatrix, n: usize, f: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n * n, f * f, |row, col| {
        let (s, t) = (row / n, row % n);
        let (phi, psi) = (col / f, col % f);
        x[(s * f + phi, t * f + psi)]
    })
}

/// Operator Schmidt decomposition of `x` on `H_S (x) H_F`, weights non-increasing.
///
/// Terms with zero weight are kept so the factor families stay orthonormal;
/// the number of terms is `min(n^2, f^2)`.
pub fn operator_schmidt(x: &ComplexMatrix, n: usize, f: usize) -> Result<Vec<SchmidtTerm>> {
    if x.nrows() != n * f || x.ncols() != n * f {
        return Err(Error::Dimension(format!(
            "Schmidt decomposition of a {}x{} matrix over {n}x{f}",
            x.nrows(),
            x.ncols()
        )));
    }
    let realigned = reshuffle(x, n, f);
    let svd = realigned.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    Ok(order
        .into_iter()
        .map(|k| SchmidtTerm {
            weight: svd.singular_values[k],
            system: ComplexMatrix::from_fn(n, n, |s, t| u[(s * n + t, k)]),
            factor: ComplexMatrix::from_fn(f, f, |phi, psi| v_t[(k, phi * f + psi)]),
        })
        .collect())
}

/// Outcome of [`classify_factorized`].
#[derive(Debug, Clone, PartialEq)]
pub enum FactorForm {
    /// `X = L_S (x) I_F`; carries `L_S`.
    SystemTensorIdentity(ComplexMatrix),
    /// `X = I_S (x) L_F`; carries `L_F`.
    IdentityTensorFactor(ComplexMatrix),
    /// `X = c I`; carries `c`.
    Both(C64),
    Neither,
}

/// Returns the scalar `c` when `m` is within `tol * ||m||` of `c I`.
fn scalar_multiple_of_identity(m: &ComplexMatrix, tol: f64) -> Option<C64> {
    let d = m.nrows();
    let scalar = trace(m) / r(d as f64);
    let dev = hs_norm(&(m - identity(d) * scalar));
    (dev <= tol * hs_norm(m).max(f64::MIN_POSITIVE)).then_some(scalar)
}

/// Decides whether `x` is `L_S (x) I`, `I (x) L_F`, a multiple of the identity, or none of these.
pub fn classify_factorized(x: &ComplexMatrix, n: usize, f: usize, tol: f64) -> Result<FactorForm> {
    let norm = hs_norm(x);
    if norm == 0.0 {
        return Ok(FactorForm::Both(ZERO));
    }
    let terms = operator_schmidt(x, n, f)?;
    if terms.iter().skip(1).any(|t| t.weight > tol * norm) {
        return Ok(FactorForm::Neither);
    }
    let lead = &terms[0];
    let system_scalar = scalar_multiple_of_identity(&lead.system, tol);
    let factor_scalar = scalar_multiple_of_identity(&lead.factor, tol);
    let w = r(lead.weight);
    Ok(match (system_scalar, factor_scalar) {
        (Some(a), Some(b)) => FactorForm::Both(w * a * b),
        (None, Some(b)) => FactorForm::SystemTensorIdentity(&lead.system * (w * b)),
        (Some(a), None) => FactorForm::IdentityTensorFactor(&lead.factor * (w * a)),
        (None, None) => FactorForm::Neither,
    })
}

/// Distance from `x` to the subspace `{A (x) I_F}`.
pub fn system_side_residual(x: &ComplexMatrix, n: usize, f: usize) -> Result<f64> {
    let reduced = partial_trace(x, TraceOut::Factor, n, f)? * r(1.0 / f as f64);
    Ok(hs_norm(&(x - kron(&reduced, &identity(f)))))
}

/// Distance from `x` to the subspace `{I_S (x) B}`.
pub fn factor_side_residual(x: &ComplexMatrix, n: usize, f: usize) -> Result<f64> {
    let reduced = partial_trace(x, TraceOut::System, n, f)? * r(1.0 / n as f64);
    Ok(hs_norm(&(x - kron(&identity(n), &reduced))))
}

/// Orthonormal Hermitian basis of `d x d` matrices (generalized Gell-Mann).
///
/// Element 0 is `I / sqrt(d)`. Then, for each pair `j < k` in lexicographic
/// order, the symmetric and antisymmetric generators; then the `d - 1`
/// diagonal generators. Every element has unit Hilbert-Schmidt norm, so for
/// `d = 2` the basis is `{I, sigma_x, sigma_y, sigma_z} / sqrt(2)`.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    assert!(d >= 1, "hermitian_basis needs d >= 1");
    let mut basis = Vec::with_capacity(d * d);
    basis.push(identity(d) * r(1.0 / (d as f64).sqrt()));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = zeros(d, d);
            sym[(j, k)] = r(s);
            sym[(k, j)] = r(s);
            basis.push(sym);
            let mut anti = zeros(d, d);
            anti[(j, k)] = c(0.0, -s);
            anti[(k, j)] = c(0.0, s);
            basis.push(anti);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = zeros(d, d);
        for j in 0..l {
            diag[(j, j)] = r(norm);
        }
        diag[(l, l)] = r(-(l as f64) * norm);
        basis.push(diag);
    }
    basis
}

/// Real coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn bloch_coordinates(x: &ComplexMatrix) -> Vec<f64> {
    hermitian_basis(x.nrows()).iter().map(|b| hs_inner(b, x).re).collect()
}

/// Inverse of [`bloch_coordinates`].
pub fn from_bloch_coordinates(coords: &[f64], d: usize) -> Result<ComplexMatrix> {
    if coords.len() != d * d {
        return Err(Error::Dimension(format!("{} coordinates for dimension {d}", coords.len())));
    }
    let mut m = zeros(d, d);
    for (b, &x) in hermitian_basis(d).iter().zip(coords) {
        m += b * r(x);
    }
    Ok(m)
}
