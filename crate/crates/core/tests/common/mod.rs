//! Two-qubit reference arithmetic on fixed-size matrices, written without the
//! library's matrix, state or dynamics code.
#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C;

pub type M2 = Matrix2<C>;
pub type M4 = Matrix4<C>;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn kron(a: &M2, b: &M2) -> M4 {
    M4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

pub fn trace_e(x: &M4) -> M2 {
    M2::from_fn(|i, j| x[(2 * i, 2 * j)] + x[(2 * i + 1, 2 * j + 1)])
}

pub fn trace_s(x: &M4) -> M2 {
    M2::from_fn(|i, j| x[(i, j)] + x[(2 + i, 2 + j)])
}

/// Eigenvalues of a 2×2 Hermitian matrix in closed form.
pub fn eig2(a: &M2) -> (f64, f64) {
    let mean = 0.5 * (a[(0, 0)].re + a[(1, 1)].re);
    let half_gap = 0.5 * (a[(0, 0)].re - a[(1, 1)].re);
    let r = (half_gap * half_gap + a[(0, 1)].norm_sqr()).sqrt();
    (mean - r, mean + r)
}

pub fn trace_norm2(a: &M2) -> f64 {
    let (l1, l2) = eig2(a);
    l1.abs() + l2.abs()
}

pub fn sx() -> M2 {
    M2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn sy() -> M2 {
    M2::new(c(0.0), C::new(0.0, -1.0), C::new(0.0, 1.0), c(0.0))
}

pub fn sz() -> M2 {
    M2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

pub fn bloch(r: [f64; 3]) -> M2 {
    (M2::identity() + sx() * c(r[0]) + sy() * c(r[1]) + sz() * c(r[2])) * c(0.5)
}

/// `cos(θ/2) I − i sin(θ/2) n·σ` for a unit axis.
pub fn rotation(axis: [f64; 3], angle: f64) -> M2 {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let ns = sx() * c(axis[0] / n) + sy() * c(axis[1] / n) + sz() * c(axis[2] / n);
    M2::identity() * c((angle / 2.0).cos()) - ns * C::new(0.0, (angle / 2.0).sin())
}

pub fn bell() -> M4 {
    let mut m = M4::zeros();
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] = c(0.5);
    }
    m
}

/// Dephasing model state `(1−a) ρ(rS)⊗ρ(rE) + a |Φ+⟩⟨Φ+|`.
pub fn dephasing_state(a: f64, r_s: [f64; 3], r_e: [f64; 3]) -> M4 {
    kron(&bloch(r_s), &bloch(r_e)) * c(1.0 - a) + bell() * c(a)
}

/// `(g/2) σz⊗σz`.
pub fn zz(g: f64) -> M4 {
    kron(&sz(), &sz()) * c(g / 2.0)
}

/// `exp(−i t (g/2) σz⊗σz)`, diagonal.
pub fn zz_propagator(g: f64, t: f64) -> M4 {
    let mut u = M4::zeros();
    for (k, s) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
        u[(k, k)] = C::from_polar(1.0, -s * g * t / 2.0);
    }
    u
}

pub fn conj(u: &M4, x: &M4) -> M4 {
    u * x * u.adjoint()
}

pub fn local(v: &M2) -> M4 {
    kron(v, &M2::identity())
}

/// `ρ − Tr_E ρ ⊗ Tr_S ρ`.
pub fn mu(rho: &M4) -> M4 {
    rho - kron(&trace_e(rho), &trace_s(rho))
}

/// `½ Tr[sgn(Δ^S) Tr_E(−i[H, Δ])]` for a nondegenerate qubit `Δ^S`.
pub fn analytic_n(h: &M4, delta: &M4) -> f64 {
    let ds = trace_e(delta);
    let deriv = trace_e(&((h * delta - delta * h) * C::new(0.0, -1.0)));
    // traceless 2×2 Hermitian: sgn(Δ^S) = Δ^S / λ₊
    let (_, lp) = eig2(&ds);
    0.5 * (ds * deriv).trace().re / lp
}

/// `½ ‖Tr_E(−i[H, X])‖₁`.
pub fn half_norm_derivative(h: &M4, x: &M4) -> f64 {
    0.5 * trace_norm2(&trace_e(&((h * x - x * h) * C::new(0.0, -1.0))))
}
