//! Seeded random ensembles: states, Hermitian matrices, unitaries and
//! Kraus channels. Every generator is deterministic for a given RNG state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::state::{BipartiteState, DensityMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `(G + G†)/2` with standard-Gaussian real and imaginary parts in `G`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    g.hermitian_part()
}

/// `GG†/Tr(GG†)` with `G` a `dim × rank` complex Gaussian matrix.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 {
        return Err(Error::InvalidArgument("dimension and rank must be positive".into()));
    }
    let g: Vec<C64> = (0..dim * rank).map(|_| gaussian(rng)).collect();
    let mut m = ComplexMatrix::from_fn(dim, |i, j| {
        (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum()
    });
    // exact Hermitian symmetry so validation sees only the normalization
    m = m.hermitian_part();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr))
}

/// Random joint state of rank `rank` (full support when `rank = d_s·d_e`).
pub fn random_bipartite<R: Rng + ?Sized>(
    d_s: usize,
    d_e: usize,
    rank: usize,
    rng: &mut R,
) -> Result<BipartiteState> {
    let rho = random_density(d_s * d_e, rank, rng)?;
    BipartiteState::new(rho.into_matrix(), d_s, d_e)
}

/// Random product state `ρS ⊗ ρE` with full-rank factors.
pub fn random_product<R: Rng + ?Sized>(d_s: usize, d_e: usize, rng: &mut R) -> Result<BipartiteState> {
    let rho_s = random_density(d_s, d_s, rng)?;
    let rho_e = random_density(d_e, d_e, rng)?;
    BipartiteState::product(&rho_s, &rho_e)
}

/// Orthonormalizes the columns of a `rows × cols` row-major matrix
/// (modified Gram-Schmidt); requires `rows ≥ cols`.
fn orthonormal_columns(rows: usize, cols: usize, mut a: Vec<C64>) -> Vec<C64> {
    for j in 0..cols {
        for k in 0..j {
            let proj: C64 = (0..rows).map(|i| a[i * cols + k].conj() * a[i * cols + j]).sum();
            for i in 0..rows {
                let v = a[i * cols + k];
                a[i * cols + j] -= proj * v;
            }
        }
        let norm = (0..rows).map(|i| a[i * cols + j].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..rows {
            a[i * cols + j] /= norm;
        }
    }
    a
}

/// Haar-random unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g: Vec<C64> = (0..dim * dim).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_vec(dim, orthonormal_columns(dim, dim, g)).expect("square by construction")
}

/// Random trace-preserving channel with `n_ops` Kraus operators, obtained by
/// slicing a random isometry `C^d → C^{d·n_ops}` into `d × d` blocks.
pub fn random_kraus<R: Rng + ?Sized>(dim: usize, n_ops: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let rows = dim * n_ops;
    let g: Vec<C64> = (0..rows * dim).map(|_| gaussian(rng)).collect();
    let iso = orthonormal_columns(rows, dim, g);
    (0..n_ops)
        .map(|k| ComplexMatrix::from_fn(dim, |i, j| iso[(k * dim + i) * dim + j]))
        .collect()
}

/// Uniform point in the closed unit ball.
pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let radius: f64 = rng.random::<f64>().cbrt();
    if norm == 0.0 {
        return [0.0; 3];
    }
    v.map(|x| x / norm * radius)
}

/// Unit vector drawn uniformly from the sphere in `R^n`.
pub fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random pure state vector.
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        let mut e = vec![ZERO; dim];
        e[0] = C64::new(1.0, 0.0);
        return e;
    }
    v.into_iter().map(|z| z / norm).collect()
}
