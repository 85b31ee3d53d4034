//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's generator or superoperator code.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qdsynth::generator::{Channel, LindbladModel};
use qdsynth::linquant::{ComplexMatrix, SpaceDecomposition};
use qdsynth::random;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<Complex64>;

pub fn ci(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &M, b: &M) -> M {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    M::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Column-stacked superoperator of `rho -> -i[H, rho] + sum_k g_k (L rho L^+ - {L^+L, rho}/2)`.
pub fn lindblad_super(h: &M, channels: &[(f64, M)]) -> M {
    let d = h.nrows();
    let id = M::identity(d, d);
    let mut s = (kron(&id, h) - kron(&h.transpose(), &id)) * ci(0.0, -1.0);
    for (g, l) in channels {
        let ldl = l.adjoint() * l;
        let term = kron(&l.conjugate(), l) - (kron(&id, &ldl) + kron(&ldl.transpose(), &id)) * ci(0.5, 0.0);
        s += term * ci(*g, 0.0);
    }
    s
}

/// Superoperator of an arbitrary linear map, built column by column.
pub fn super_of(d: usize, map: impl Fn(&M) -> M) -> M {
    let mut s = M::zeros(d * d, d * d);
    for j in 0..d {
        for i in 0..d {
            let mut e = M::zeros(d, d);
            e[(i, j)] = ci(1.0, 0.0);
            let y = map(&e);
            for b in 0..d {
                for a in 0..d {
                    s[(a + b * d, i + j * d)] = y[(a, b)];
                }
            }
        }
    }
    s
}

pub fn model_super(model: &LindbladModel) -> M {
    let ch: Vec<(f64, M)> = model.channels().iter().map(|c| (c.rate, c.op.clone())).collect();
    lindblad_super(model.hamiltonian(), &ch)
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn pauli_x() -> M {
    M::from_row_slice(2, 2, &[ci(0.0, 0.0), ci(1.0, 0.0), ci(1.0, 0.0), ci(0.0, 0.0)])
}

pub fn pauli_y() -> M {
    M::from_row_slice(2, 2, &[ci(0.0, 0.0), ci(0.0, -1.0), ci(0.0, 1.0), ci(0.0, 0.0)])
}

pub fn pauli_z() -> M {
    M::from_row_slice(2, 2, &[ci(1.0, 0.0), ci(0.0, 0.0), ci(0.0, 0.0), ci(-1.0, 0.0)])
}

/// `|0><1|`.
pub fn raising() -> M {
    M::from_row_slice(2, 2, &[ci(0.0, 0.0), ci(1.0, 0.0), ci(0.0, 0.0), ci(0.0, 0.0)])
}

pub fn ket(d: usize, k: usize) -> nalgebra::DVector<Complex64> {
    let mut v = nalgebra::DVector::zeros(d);
    v[k] = ci(1.0, 0.0);
    v
}

/// Trace norm of a Hermitian matrix over two.
pub fn trace_distance(a: &M, b: &M) -> f64 {
    let diff = a - b;
    let h = (&diff + diff.adjoint()) * ci(0.5, 0.0);
    h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>() / 2.0
}

/// Random model certified invariant by construction: `L_Q = 0`, `L_SF` of
/// product form with an identity factor, split `H_SF`, and `H_P` chosen to
/// cancel the cross term. With `ns` the identity always sits on the system side.
pub fn random_invariant_model(rng: &mut ChaCha8Rng, n: usize, f: usize, rr: usize, ns: bool) -> (LindbladModel, SpaceDecomposition) {
    let d = n * f + rr;
    let decomp = SpaceDecomposition::new(n, f, rr, random::unitary(rng, d)).unwrap();
    let nf = n * f;
    let mut channels = Vec::new();
    let mut cross = M::zeros(nf, rr);
    for _ in 0..rng.random_range(1..3) {
        let sf = if ns || rng.random_bool(0.5) {
            kron(&M::identity(n, n), &random::matrix(rng, f, f))
        } else {
            kron(&random::matrix(rng, n, n), &M::identity(f, f))
        };
        let mut local = M::zeros(d, d);
        local.view_mut((0, 0), (nf, nf)).copy_from(&sf);
        let p = random::matrix(rng, nf, rr);
        local.view_mut((0, nf), (nf, rr)).copy_from(&p);
        local.view_mut((nf, nf), (rr, rr)).copy_from(&random::matrix(rng, rr, rr));
        let rate = rng.random_range(0.2..1.5);
        cross += sf.adjoint() * &p * ci(rate, 0.0);
        channels.push(Channel::new(rate, decomp.to_global(&local)));
    }
    let h_sf = kron(&random::hermitian(rng, n), &M::identity(f, f)) + kron(&M::identity(n, n), &random::hermitian(rng, f));
    let mut h = M::zeros(d, d);
    h.view_mut((0, 0), (nf, nf)).copy_from(&h_sf);
    let h_p = cross * ci(0.0, -0.5);
    h.view_mut((0, nf), (nf, rr)).copy_from(&h_p);
    h.view_mut((nf, 0), (rr, nf)).copy_from(&h_p.adjoint());
    h.view_mut((nf, nf), (rr, rr)).copy_from(&random::hermitian(rng, rr));
    (LindbladModel::new(decomp.to_global(&h), channels).unwrap(), decomp)
}

/// Random model with no built-in structure.
pub fn random_model(rng: &mut ChaCha8Rng, d: usize) -> LindbladModel {
    let channels = (0..rng.random_range(1..3)).map(|_| Channel::new(rng.random_range(0.2..1.5), random::matrix(rng, d, d))).collect();
    LindbladModel::new(random::hermitian(rng, d), channels).unwrap()
}

/// `rho_S (x) rho_F` placed in the initialized block.
pub fn initialized_state(rng: &mut ChaCha8Rng, decomp: &SpaceDecomposition) -> ComplexMatrix {
    let (n, f, d) = (decomp.n(), decomp.f(), decomp.dim());
    let block = kron(random::density(rng, n).matrix(), random::density(rng, f).matrix());
    let mut local = M::zeros(d, d);
    local.view_mut((0, 0), (n * f, n * f)).copy_from(&block);
    decomp.to_global(&local)
}
