//! Modular data of `(B(H), ω_ρ)` and the polar decomposition of transposition.
//!
//! The GNS space is `B(H)` itself with `(ξ, η) = Tr(ξ* η)`, `π(a)ξ = aξ` and
//! cyclic vector `Ω = ρ^{1/2}`. Transposition is taken in the eigenbasis
//! `{x_i}` of `ρ`: with `X` the matrix of eigenvectors,
//! `a^t = X (X* a X)^T X*`. All superoperators act on `vec(ξ)` (row-major)
//! in the computational basis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::choi::{block_positivity, BlockPosVerdict, LinearMapRep};
use crate::error::{Error, Result};
use crate::matkernel::{
    frac_power, herm_eig, inner, psd_min_eig, psd_threshold, ComplexMatrix, I, ONE, ZERO,
};
use crate::rng::{SearchRng, Seed};
use crate::search::SearchParams;
use rand::Rng;

/// Smallest admissible eigenvalue of a faithful state.
pub const FAITHFUL_TOL: f64 = 1e-8;
/// Largest admissible condition number of `ρ`.
pub const MAX_CONDITION: f64 = 1e6;
/// Allowed deviation of `Tr ρ` from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Allowed deviation `|ω∘φ - ω|` before `t_phi` warns.
pub const INVARIANCE_TOL: f64 = 1e-8;

/// A linear or antilinear operator on `B(C^n)`.
///
/// An antilinear operator acts as `vec(ξ) ↦ M conj(vec(ξ))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
    antilinear: bool,
}

impl Superoperator {
    /// Tabulates `f` on the matrix units, which are fixed by conjugation, so
    /// the columns are correct for either linearity type.
    pub fn from_fn(dim: usize, antilinear: bool, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let d2 = dim * dim;
        let mut matrix = ComplexMatrix::zeros(d2, d2);
        for u in 0..d2 {
            let img = f(&ComplexMatrix::unit(dim, u / dim, u % dim));
            matrix.set_col(u, img.as_slice());
        }
        Self {
            dim,
            matrix,
            antilinear,
        }
    }

    pub fn from_matrix(dim: usize, matrix: ComplexMatrix, antilinear: bool) -> Result<Self> {
        if matrix.shape() != (dim * dim, dim * dim) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator {}x{} on B(C^{dim})",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            dim,
            matrix,
            antilinear,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
            antilinear: false,
        }
    }

    /// `ξ ↦ a ξ`.
    pub fn left_mult(a: &ComplexMatrix) -> Self {
        Self::from_fn(a.rows(), false, |e| a * e)
    }

    /// `ξ ↦ ξ a`.
    pub fn right_mult(a: &ComplexMatrix) -> Self {
        Self::from_fn(a.rows(), false, |e| e * a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_antilinear(&self) -> bool {
        self.antilinear
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        if self.antilinear {
            let c: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
            self.matrix.apply(&c)
        } else {
            self.matrix.apply(v)
        }
    }

    pub fn apply(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        let out = self.apply_vec(xi.as_slice());
        ComplexMatrix::from_vec(self.dim, self.dim, out).expect("square output")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let rhs = if self.antilinear {
            other.matrix.conj()
        } else {
            other.matrix.clone()
        };
        Self {
            dim: self.dim,
            matrix: &self.matrix * &rhs,
            antilinear: self.antilinear ^ other.antilinear,
        }
    }

    /// Adjoint: `(Aξ, η) = (ξ, A*η)` for linear `A`, and
    /// `(Aξ, η) = conj((ξ, A*η))` for antilinear `A`.
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: if self.antilinear {
                self.matrix.transpose()
            } else {
                self.matrix.adjoint()
            },
            antilinear: self.antilinear,
        }
    }

    /// `A ⊗ B` on `B(C^m ⊗ C^n) = B(C^m) ⊗ B(C^n)`, with `kron(ξ, η) ↦ kron(Aξ, Bη)`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.antilinear != other.antilinear {
            return Err(Error::DimensionMismatch(
                "tensor product of a linear and an antilinear operator".into(),
            ));
        }
        let (m, n) = (self.dim, other.dim);
        let mn = m * n;
        let mut matrix = ComplexMatrix::zeros(mn * mn, mn * mn);
        for u in 0..mn * mn {
            let (r, c) = (u / mn, u % mn);
            let a = self.apply(&ComplexMatrix::unit(m, r / n, c / n));
            let b = other.apply(&ComplexMatrix::unit(n, r % n, c % n));
            matrix.set_col(u, crate::matkernel::kron(&a, &b).as_slice());
        }
        Ok(Self {
            dim: mn,
            matrix,
            antilinear: self.antilinear,
        })
    }

    /// `A + B` for operators of the same linearity type.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.antilinear != other.antilinear {
            return Err(Error::DimensionMismatch("sum of incompatible superoperators".into()));
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
            antilinear: self.antilinear,
        })
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale_real(s),
            antilinear: self.antilinear,
        }
    }

    /// Real power of a positive linear operator.
    pub fn power(&self, beta: f64) -> Result<Self> {
        if self.antilinear {
            return Err(Error::NotHermitian(f64::INFINITY));
        }
        Ok(Self {
            dim: self.dim,
            matrix: frac_power(&self.matrix, beta)?,
            antilinear: false,
        })
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        let g = &self.matrix.adjoint() * &self.matrix;
        let top = *herm_eig(&g)?.eigenvalues.last().expect("nonempty");
        Ok(top.max(0.0).sqrt())
    }

    /// `sqrt(Σ_u ||(A - B) E_u||² + ||(A - B)(i E_u)||²) / √2` over the matrix
    /// units `E_u`. Equals the Frobenius distance of the matrices when both
    /// operators have the same linearity type.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        if self.antilinear == other.antilinear {
            return (&self.matrix - &other.matrix).frobenius_norm();
        }
        let d2 = self.dim * self.dim;
        let mut s = 0.0;
        for u in 0..d2 {
            for c in [ONE, I] {
                let mut e = vec![ZERO; d2];
                e[u] = c;
                let a = self.apply_vec(&e);
                let b = other.apply_vec(&e);
                s += a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
            }
        }
        (s / 2.0).sqrt()
    }
}

/// GNS and modular data of a faithful state on `B(C^n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnsContext {
    dim: usize,
    rho: ComplexMatrix,
    eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors `x_i`.
    eigenvectors: ComplexMatrix,
    omega: ComplexMatrix,
    rho_inv_half: ComplexMatrix,
    delta: Superoperator,
    jm: Superoperator,
    j: Superoperator,
    u: Superoperator,
    tau: Superoperator,
}

/// Transposition in the orthonormal basis given by the columns of `x`.
pub fn transpose_in_basis(a: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let inner = &(&x.adjoint() * a) * x;
    &(x * &inner.transpose()) * &x.adjoint()
}

/// Checks that `ρ` is a faithful, well-conditioned density matrix.
pub fn validate_state(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotSquare(rho.rows(), rho.cols()));
    }
    let defect = rho.hermitian_defect();
    if defect > 1e-10 * rho.frobenius_norm().max(1.0) {
        return Err(Error::NotAState(format!("Hermiticity defect {defect:.3e}")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::NotAState(format!("trace {} {:+}i", tr.re, tr.im)));
    }
    let eig = herm_eig(rho)?;
    let lo = eig.eigenvalues[0];
    let hi = *eig.eigenvalues.last().expect("nonempty");
    if lo < psd_threshold(rho) {
        return Err(Error::NotAState(format!("negative eigenvalue {lo:.3e}")));
    }
    if lo < FAITHFUL_TOL {
        return Err(Error::NotFaithful(lo));
    }
    if hi / lo > MAX_CONDITION {
        return Err(Error::IllConditioned(hi / lo));
    }
    Ok(())
}

/// Builds the modular data of `ω(a) = Tr(ρ a)`.
pub fn gns_context(rho: &ComplexMatrix) -> Result<GnsContext> {
    validate_state(rho)?;
    let rho = rho.hermitian_part();
    let n = rho.rows();
    let eig = herm_eig(&rho)?;
    let x = eig.eigenvectors.clone();
    let xa = x.adjoint();
    let omega = eig.map_spectrum(f64::sqrt);
    let rho_inv = eig.map_spectrum(|l| 1.0 / l);
    let rho_inv_half = eig.map_spectrum(|l| 1.0 / l.sqrt());

    let delta = Superoperator::from_fn(n, false, |e| &(&rho * e) * &rho_inv);
    let jm = Superoperator::from_fn(n, true, |e| e.adjoint());
    let j = Superoperator::from_fn(n, true, |e| {
        let c = (&(&xa * e) * &x).conj();
        &(&x * &c) * &xa
    });
    let u = Superoperator::from_fn(n, false, |e| transpose_in_basis(e, &x));
    let tau = Superoperator::from_fn(n, false, |e| {
        &transpose_in_basis(&(e * &rho_inv_half), &x) * &omega
    });
    Ok(GnsContext {
        dim: n,
        rho,
        eigenvalues: eig.eigenvalues,
        eigenvectors: x,
        omega,
        rho_inv_half,
        delta,
        jm,
        j,
        u,
        tau,
    })
}

impl GnsContext {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// `Ω = ρ^{1/2}`.
    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    /// `ξ ↦ ρ ξ ρ^{-1}`.
    pub fn delta(&self) -> &Superoperator {
        &self.delta
    }

    /// `ξ ↦ ξ*`.
    pub fn jm(&self) -> &Superoperator {
        &self.jm
    }

    /// Conjugation fixing the units `|x_i><x_j|`.
    pub fn j(&self) -> &Superoperator {
        &self.j
    }

    /// `|x_i><x_j| ↦ |x_j><x_i|`.
    pub fn u(&self) -> &Superoperator {
        &self.u
    }

    /// `aΩ ↦ a^t Ω`.
    pub fn tau(&self) -> &Superoperator {
        &self.tau
    }

    /// `|x_i><x_j|`.
    pub fn unit(&self, i: usize, j: usize) -> ComplexMatrix {
        let xi = ComplexMatrix::column(&self.eigenvectors.col(i));
        let xj = ComplexMatrix::column(&self.eigenvectors.col(j));
        &xi * &xj.adjoint()
    }

    /// Transposition in the eigenbasis of `ρ`.
    pub fn transpose(&self, a: &ComplexMatrix) -> ComplexMatrix {
        transpose_in_basis(a, &self.eigenvectors)
    }

    /// `ρ^β`, defined for every real `β` since `ρ` is invertible.
    pub fn rho_power(&self, beta: f64) -> ComplexMatrix {
        let x = &self.eigenvectors;
        let n = self.dim;
        ComplexMatrix::from_fn(n, n, |r, c| {
            let mut s = ZERO;
            for (t, &l) in self.eigenvalues.iter().enumerate() {
                s += x[(r, t)] * x[(c, t)].conj() * l.powf(beta);
            }
            s
        })
    }

    /// `Δ^β ξ = ρ^β ξ ρ^{-β}`.
    pub fn delta_power_apply(&self, beta: f64, xi: &ComplexMatrix) -> ComplexMatrix {
        &(&self.rho_power(beta) * xi) * &self.rho_power(-beta)
    }

    pub fn delta_power(&self, beta: f64) -> Superoperator {
        let l = self.rho_power(beta);
        let r = self.rho_power(-beta);
        Superoperator::from_fn(self.dim, false, |e| &(&l * e) * &r)
    }

    /// `aΩ`.
    pub fn vector_of(&self, a: &ComplexMatrix) -> ComplexMatrix {
        a * &self.omega
    }

    /// `a` with `ξ = aΩ`.
    pub fn operator_of(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        xi * &self.rho_inv_half
    }

    fn check_shape(&self, xi: &ComplexMatrix) -> Result<()> {
        if xi.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector {}x{} in the GNS space of B(C^{})",
                xi.rows(),
                xi.cols(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// Both sides of `a^t ξ = J a* J ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransposeViaJ {
    pub lhs: ComplexMatrix,
    pub rhs: ComplexMatrix,
    pub defect: f64,
}

pub fn transpose_via_j(ctx: &GnsContext, a: &ComplexMatrix, xi: &ComplexMatrix) -> Result<TransposeViaJ> {
    ctx.check_shape(a)?;
    ctx.check_shape(xi)?;
    let lhs = &ctx.transpose(a) * xi;
    let rhs = ctx.j.apply(&(&a.adjoint() * &ctx.j.apply(xi)));
    let defect = (&lhs - &rhs).frobenius_norm();
    Ok(TransposeViaJ { lhs, rhs, defect })
}

/// Defects of the algebraic relations between `U`, `J`, `J_m` and `Δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryDefects {
    /// `||U² - I||`.
    pub u_involution: f64,
    /// `||U - U*||`.
    pub u_selfadjoint: f64,
    /// `||J - U J_m||`.
    pub j_factorization: f64,
    /// Largest of the three pairwise commutators of `J`, `J_m`, `U`.
    pub commutation: f64,
    /// `||JΔ - ΔJ||`.
    pub j_delta: f64,
    /// `||UΔ - Δ^{-1} U||`.
    pub u_delta: f64,
}

impl UnitaryDefects {
    pub fn max(&self) -> f64 {
        [
            self.u_involution,
            self.u_selfadjoint,
            self.j_factorization,
            self.commutation,
            self.j_delta,
            self.u_delta,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn check_unitary_relations(ctx: &GnsContext) -> UnitaryDefects {
    let (u, j, jm, delta) = (&ctx.u, &ctx.j, &ctx.jm, &ctx.delta);
    let id = Superoperator::identity(ctx.dim);
    let comm = |a: &Superoperator, b: &Superoperator| a.compose(b).distance(&b.compose(a));
    let delta_inv = ctx.delta_power(-1.0);
    UnitaryDefects {
        u_involution: u.compose(u).distance(&id),
        u_selfadjoint: u.distance(&u.adjoint()),
        j_factorization: j.distance(&u.compose(jm)),
        commutation: comm(j, jm).max(comm(j, u)).max(comm(jm, u)),
        j_delta: comm(j, delta),
        u_delta: u.compose(delta).distance(&delta_inv.compose(u)),
    }
}

/// `||τ - U Δ^{1/2}||`.
pub fn check_polar(ctx: &GnsContext) -> f64 {
    ctx.tau.distance(&ctx.u.compose(&ctx.delta_power(0.5)))
}

/// `U A U*` for an operator `A` on the GNS space.
pub fn alpha(ctx: &GnsContext, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d2 = ctx.dim * ctx.dim;
    if a.shape() != (d2, d2) {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} on a {d2}-dimensional GNS space",
            a.rows(),
            a.cols()
        )));
    }
    let u = ctx.u.matrix();
    Ok(&(u * a) * &u.adjoint())
}

/// Largest `||[α(π(a)), π(E_kl)]||` over the matrix units.
pub fn commutant_defect(ctx: &GnsContext, a: &ComplexMatrix) -> Result<f64> {
    ctx.check_shape(a)?;
    let image = alpha(ctx, Superoperator::left_mult(a).matrix())?;
    let n = ctx.dim;
    let mut worst: f64 = 0.0;
    for u in 0..n * n {
        let b = Superoperator::left_mult(&ComplexMatrix::unit(n, u / n, u % n));
        let c = &(&image * b.matrix()) - &(b.matrix() * &image);
        worst = worst.max(c.frobenius_norm());
    }
    Ok(worst)
}

/// Membership of `ξ` in `V_β = {Δ^β a Ω : a ⪰ 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VBetaMembership {
    pub member: bool,
    /// `a = Δ^{-β}ξ Ω^{-1}`.
    pub a: ComplexMatrix,
    /// Hermiticity defect of `a`.
    pub hermitian_defect: f64,
    /// Smallest eigenvalue of the Hermitian part of `a`.
    pub min_eig: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::BetaOutOfRange(beta));
    }
    Ok(())
}

/// Decides `ξ ∈ V_β` by reconstructing `a` and testing `a ⪰ 0`.
pub fn v_beta_member(ctx: &GnsContext, beta: f64, xi: &ComplexMatrix) -> Result<VBetaMembership> {
    check_beta(beta)?;
    ctx.check_shape(xi)?;
    let a = ctx.operator_of(&ctx.delta_power_apply(-beta, xi));
    let scale = a.frobenius_norm().max(1.0);
    let hermitian_defect = a.hermitian_defect();
    let min_eig = psd_min_eig(&a.hermitian_part())?;
    let member = hermitian_defect <= 1e-9 * scale && min_eig >= -1e-9 * scale;
    Ok(VBetaMembership {
        member,
        a,
        hermitian_defect,
        min_eig,
    })
}

/// `Δ^β a Ω`.
pub fn v_beta_element(ctx: &GnsContext, beta: f64, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_beta(beta)?;
    ctx.check_shape(a)?;
    Ok(ctx.delta_power_apply(beta, &ctx.vector_of(a)))
}

/// Random state of random rank: the generator for cone samples.
pub fn random_positive(n: usize, rng: &mut SearchRng) -> ComplexMatrix {
    let rank = rng.random_range(1..=n);
    ComplexMatrix::random_psd(n, rank, rng)
}

/// Random faithful density matrix with condition number at most `1 + 10 n`.
pub fn random_faithful_state(n: usize, rng: &mut SearchRng) -> ComplexMatrix {
    let w = ComplexMatrix::random_psd(n, n, rng);
    let mixed = &w.scale_real(0.9) + &ComplexMatrix::identity(n).scale_real(0.1 / n as f64);
    mixed.hermitian_part()
}

/// Outcome of the sampled duality between `V_β` and `V_{1/2-β}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub beta: f64,
    pub samples: usize,
    /// Smallest `Re (η, ξ)` scaled by `||η|| ||ξ||`.
    pub min_pairing: f64,
    /// Largest `|Im (η, ξ)|` scaled by `||η|| ||ξ||`.
    pub max_imag: f64,
    /// Samples `ξ ∈ V_β` whose image `Uξ` failed membership in `V_{1/2-β}`.
    pub flip_failures: usize,
    /// Smallest reconstructed eigenvalue over the flipped samples.
    pub flip_min_eig: f64,
}

impl DualityReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.min_pairing >= -tol && self.max_imag <= tol && self.flip_failures == 0
    }
}

pub fn v_beta_duality_check(ctx: &GnsContext, beta: f64, samples: usize, seed: Seed) -> Result<DualityReport> {
    check_beta(beta)?;
    let n = ctx.dim;
    let mut report = DualityReport {
        beta,
        samples,
        min_pairing: f64::INFINITY,
        max_imag: 0.0,
        flip_failures: 0,
        flip_min_eig: f64::INFINITY,
    };
    for s in 0..samples {
        let mut rng = seed.child(s as u64).rng();
        let a = random_positive(n, &mut rng);
        let b = random_positive(n, &mut rng);
        let xi = v_beta_element(ctx, beta, &a)?;
        let eta = v_beta_element(ctx, 0.5 - beta, &b)?;
        let p = inner(eta.as_slice(), xi.as_slice());
        let scale = (eta.frobenius_norm() * xi.frobenius_norm()).max(f64::MIN_POSITIVE);
        report.min_pairing = report.min_pairing.min(p.re / scale);
        report.max_imag = report.max_imag.max(p.im.abs() / scale);
        let flipped = v_beta_member(ctx, 0.5 - beta, &ctx.u.apply(&xi))?;
        report.flip_min_eig = report.flip_min_eig.min(flipped.min_eig);
        if !flipped.member {
            report.flip_failures += 1;
        }
    }
    Ok(report)
}

/// The operator `T(aΩ) = φ(a)Ω` induced by a map on `B(C^n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TPhi {
    pub phi: LinearMapRep,
    pub t: Superoperator,
    /// `||φ*(ρ) - ρ||_F`: the distance of `ω∘φ` from `ω`.
    pub invariance_defect: f64,
    /// `||TΔ - ΔT||`.
    pub delta_commutation_defect: f64,
    /// `max(0, ||T|| - 1)`.
    pub contraction_defect: f64,
    /// Largest `||T(E_u Ω) - φ(E_u)Ω||` over the matrix units.
    pub unit_defect: f64,
    pub warnings: Vec<String>,
}

pub fn t_phi(ctx: &GnsContext, phi: &LinearMapRep) -> Result<TPhi> {
    let n = ctx.dim;
    if phi.m() != n || phi.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "map B(C^{}) -> B(C^{}) on the GNS space of B(C^{n})",
            phi.m(),
            phi.n()
        )));
    }
    let apply = |a: &ComplexMatrix| phi.apply(a).expect("shape checked");
    let t = Superoperator::from_fn(n, false, |e| &apply(&ctx.operator_of(e)) * &ctx.omega);

    let mut inv = 0.0;
    let mut unit_defect: f64 = 0.0;
    for u in 0..n * n {
        let e = ComplexMatrix::unit(n, u / n, u % n);
        let img = apply(&e);
        inv += ((&ctx.rho * &img).trace() - (&ctx.rho * &e).trace()).norm_sqr();
        let lhs = t.apply(&ctx.vector_of(&e));
        unit_defect = unit_defect.max((&lhs - &ctx.vector_of(&img)).frobenius_norm());
    }
    let invariance_defect = inv.sqrt();
    let delta_commutation_defect = t.compose(&ctx.delta).distance(&ctx.delta.compose(&t));
    let contraction_defect = (t.operator_norm()? - 1.0).max(0.0);
    let mut warnings = Vec::new();
    if invariance_defect > INVARIANCE_TOL {
        warnings.push(format!(
            "state is not invariant under the map (defect {invariance_defect:.3e})"
        ));
    }
    Ok(TPhi {
        phi: phi.clone(),
        t,
        invariance_defect,
        delta_commutation_defect,
        contraction_defect,
        unit_defect,
        warnings,
    })
}

/// Largest `max(0, -λ_min(φ(a*a) - φ(a)*φ(a)))` over random `a` with `||a||_F = 1`.
/// Sample 0 is `a = E_01` (or `E_00` in dimension one).
pub fn schwarz_check(phi: &LinearMapRep, samples: usize, seed: Seed) -> f64 {
    let m = phi.m();
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let a = if s == 0 {
            ComplexMatrix::unit(m, 0, 1.min(m - 1))
        } else {
            let g = ComplexMatrix::random_gaussian(m, m, &mut seed.child(s as u64).rng());
            let nrm = g.frobenius_norm();
            g.scale_real(1.0 / nrm)
        };
        let lhs = phi.apply(&(&a.adjoint() * &a)).expect("square input");
        let fa = phi.apply(&a).expect("square input");
        let d = (&lhs - &(&fa.adjoint() * &fa)).hermitian_part();
        let lo = psd_min_eig(&d).unwrap_or(f64::NEG_INFINITY);
        worst = worst.max(-lo);
    }
    worst
}

/// The map `φ^β` with `ω(a* φ(b)) = ω(φ^β(a*) b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DbAdjoint {
    pub map: LinearMapRep,
    /// Largest deviation of the defining identity over pairs of matrix units.
    pub defect: f64,
}

impl DbAdjoint {
    /// Block-positivity evidence for `φ^β`.
    pub fn positivity(&self, params: &SearchParams, seed: Seed) -> Result<BlockPosVerdict> {
        let n = self.map.m();
        block_positivity(self.map.choi(), n, self.map.n(), params, seed)
    }
}

/// Tolerance on the defining identity of `φ^β`, relative to the scale of `φ`.
pub const DB_TOL: f64 = 1e-10;

/// Solves `Tr(ρ c φ(b)) = Tr(ρ φ^β(c) b)` for all `b, c`.
///
/// For fixed `c` the left side is `Tr(Z b)` with `Z_lk = Tr(ρ c φ(E_kl))`,
/// so `φ^β(c) = ρ^{-1} Z`.
pub fn db_adjoint(ctx: &GnsContext, phi: &LinearMapRep) -> Result<DbAdjoint> {
    let n = ctx.dim;
    if phi.m() != n || phi.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "map B(C^{}) -> B(C^{}) for a state on B(C^{n})",
            phi.m(),
            phi.n()
        )));
    }
    let rho_inv = ctx.rho_power(-1.0);
    let images: Vec<ComplexMatrix> = (0..n * n)
        .map(|u| phi.apply(&ComplexMatrix::unit(n, u / n, u % n)).expect("shape"))
        .collect();
    let map = LinearMapRep::from_fn(n, n, |c| {
        let rc = &ctx.rho * c;
        let z = ComplexMatrix::from_fn(n, n, |l, k| (&rc * &images[k * n + l]).trace());
        &rho_inv * &z
    });
    let mut defect: f64 = 0.0;
    for cu in 0..n * n {
        let c = ComplexMatrix::unit(n, cu / n, cu % n);
        let lhs_left = &ctx.rho * &c;
        let pb = map.apply(&c)?;
        let rhs_left = &ctx.rho * &pb;
        for (bu, img) in images.iter().enumerate() {
            let b = ComplexMatrix::unit(n, bu / n, bu % n);
            let lhs = (&lhs_left * img).trace();
            let rhs = (&rhs_left * &b).trace();
            defect = defect.max((lhs - rhs).norm());
        }
    }
    let scale = phi.choi().frobenius_norm().max(1.0);
    if defect > DB_TOL * scale {
        return Err(Error::InconsistentSystem(defect));
    }
    Ok(DbAdjoint { map, defect })
}

/// Density matrix of the vector state `a ↦ (ξ, aξ)` of a natural-cone vector.
pub fn cone_state(ctx: &GnsContext, xi: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mem = v_beta_member(ctx, 0.25, xi)?;
    if !mem.member {
        return Err(Error::NotInNaturalCone(mem.min_eig.min(-mem.hermitian_defect)));
    }
    Ok(xi * &xi.adjoint())
}

/// `||ϱ_{Uξ} - (ϱ_ξ)^t||` for a natural-cone vector.
pub fn cone_state_transpose_defect(ctx: &GnsContext, xi: &ComplexMatrix) -> Result<f64> {
    let s = cone_state(ctx, xi)?;
    let su = cone_state(ctx, &ctx.u.apply(xi))?;
    Ok((&su - &ctx.transpose(&s)).frobenius_norm())
}

/// Checks that `UΔ^{1/2}ξ` and `T_φ UΔ^{1/2}ξ` stay in `V_0` for `ξ = aΩ`.
/// Returns the smallest reconstructed eigenvalue over both images.
pub fn v0_invariance(ctx: &GnsContext, t: &TPhi, a: &ComplexMatrix) -> Result<(bool, f64)> {
    let xi = v_beta_element(ctx, 0.0, a)?;
    let first = ctx.u.compose(&ctx.delta_power(0.5)).apply(&xi);
    let second = t.t.apply(&first);
    let m1 = v_beta_member(ctx, 0.0, &first)?;
    let m2 = v_beta_member(ctx, 0.0, &second)?;
    Ok((m1.member && m2.member, m1.min_eig.min(m2.min_eig)))
}

/// Largest defect of every modular identity over sampled inputs, keyed by name.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentitySuite {
    pub defects: std::collections::BTreeMap<String, f64>,
}

impl IdentitySuite {
    pub fn max_defect(&self) -> f64 {
        self.defects.values().fold(0.0, |a, &b| a.max(b))
    }

    fn record(&mut self, name: &str, value: f64) {
        let e = self.defects.entry(name.to_string()).or_insert(0.0);
        *e = e.max(value);
    }

    /// Keeps the larger defect per identity.
    pub fn merge(&mut self, other: &IdentitySuite) {
        for (k, v) in &other.defects {
            self.record(k, *v);
        }
    }
}

/// Runs every identity of the modular picture on one state. Cone-valued
/// statements report `max(0, -λ_min)` of the reconstructed operator.
pub fn identity_suite(ctx: &GnsContext, cone_samples: usize, seed: Seed) -> Result<IdentitySuite> {
    let n = ctx.dim;
    let mut suite = IdentitySuite::default();
    let mut rng = seed.labeled("pointwise").rng();
    for _ in 0..10 {
        let a = ComplexMatrix::random_gaussian(n, n, &mut rng);
        let xi = ComplexMatrix::random_gaussian(n, n, &mut rng);
        let scale = a.frobenius_norm() * xi.frobenius_norm();
        suite.record("transpose_via_j", transpose_via_j(ctx, &a, &xi)?.defect / scale);
    }
    let u = check_unitary_relations(ctx);
    suite.record("u_involution", u.u_involution);
    suite.record("u_selfadjoint", u.u_selfadjoint);
    suite.record("j_equals_u_jm", u.j_factorization);
    suite.record("j_jm_u_commute", u.commutation);
    suite.record("tau_polar", check_polar(ctx));
    suite.record("j_delta_commute", u.j_delta);
    suite.record("u_delta_inverse", u.u_delta);
    for _ in 0..3 {
        let a = ComplexMatrix::random_gaussian(n, n, &mut rng);
        suite.record("alpha_into_commutant", commutant_defect(ctx, &a)? / a.frobenius_norm());
    }
    for beta in [0.0, 0.125, 0.25, 0.375, 0.5] {
        let r = v_beta_duality_check(ctx, beta, cone_samples, seed.labeled("duality").child(beta.to_bits()))?;
        suite.record("v_beta_duality", (-r.min_pairing).max(0.0).max(r.max_imag));
        suite.record("u_maps_v_beta", (-r.flip_min_eig).max(0.0));
    }
    // Transposition in the eigenbasis of ρ; its operator T is τ.
    let tau_map = LinearMapRep::from_fn(n, n, |a| ctx.transpose(a));
    let t_tau = t_phi(ctx, &tau_map)?;
    let t_id = t_phi(ctx, &LinearMapRep::identity(n))?;
    suite.record("t_of_transpose_is_tau", t_tau.t.distance(&ctx.tau));
    let mut crng = seed.labeled("cone").rng();
    for _ in 0..cone_samples {
        let a = random_positive(n, &mut crng);
        for t in [&t_id, &t_tau] {
            let (_, lo) = v0_invariance(ctx, t, &a)?;
            suite.record("v0_invariance", (-lo).max(0.0));
        }
        let xi = v_beta_element(ctx, 0.25, &a)?;
        suite.record("cone_state_transpose", cone_state_transpose_defect(ctx, &xi)? / xi.frobenius_norm().powi(2));
    }
    Ok(suite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag_state(d: &[f64]) -> GnsContext {
        gns_context(&ComplexMatrix::from_real_diag(d)).unwrap()
    }

    fn random_ctx(seed: u64, n: usize) -> GnsContext {
        gns_context(&random_faithful_state(n, &mut Seed(seed).rng())).unwrap()
    }

    #[test]
    fn gns_examples() {
        let ctx = diag_state(&[0.5, 0.5]);
        assert!(ctx.delta().distance(&Superoperator::identity(2)) < 1e-14);

        let ctx = diag_state(&[2.0 / 3.0, 1.0 / 3.0]);
        let want = [1.0, 2.0, 0.5, 1.0];
        for (u, w) in want.iter().enumerate() {
            let e = ComplexMatrix::unit(2, u / 2, u % 2);
            assert!(ctx.delta().apply(&e).approx_eq(&e.scale_real(*w), 1e-14));
        }
        assert!((ctx.omega().frobenius_norm() - 1.0).abs() < 1e-12);

        assert!(matches!(
            gns_context(&ComplexMatrix::from_real_diag(&[1.0, 0.0])),
            Err(Error::NotFaithful(_))
        ));
        assert!(matches!(
            gns_context(&ComplexMatrix::from_real_diag(&[0.5, 0.4])),
            Err(Error::NotAState(_))
        ));
        assert!(matches!(
            gns_context(&ComplexMatrix::from_real_diag(&[1.0 - 1e-7, 1e-7])),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn u_swaps_eigenbasis_units() {
        let ctx = random_ctx(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                assert!(ctx.u().apply(&ctx.unit(i, j)).approx_eq(&ctx.unit(j, i), 1e-13));
                assert!(ctx.j().apply(&ctx.unit(i, j)).approx_eq(&ctx.unit(i, j), 1e-13));
            }
        }
        assert!(ctx.j().apply(ctx.omega()).approx_eq(ctx.omega(), 1e-13));
    }

    #[test]
    fn transpose_via_j_examples() {
        let ctx = diag_state(&[0.5, 0.5]);
        let e12 = ComplexMatrix::unit(2, 0, 1);
        let r = transpose_via_j(&ctx, &e12, ctx.omega()).unwrap();
        let want = ComplexMatrix::unit(2, 1, 0).scale_real(0.5f64.sqrt());
        assert!(r.lhs.approx_eq(&want, 1e-14) && r.rhs.approx_eq(&want, 1e-14));

        let ctx = random_ctx(5, 4);
        let xi = ComplexMatrix::random_gaussian(4, 4, &mut Seed(6).rng());
        let r = transpose_via_j(&ctx, &ComplexMatrix::identity(4), &xi).unwrap();
        assert!(r.lhs.approx_eq(&xi, 1e-13) && r.defect < 1e-12);
    }

    #[test]
    fn unitary_relations_examples() {
        assert!(check_unitary_relations(&diag_state(&[1.0 / 3.0; 3])).max() <= 1e-12);
        assert!(check_unitary_relations(&diag_state(&[0.5, 0.3, 0.2])).max() <= 1e-10);
    }

    #[test]
    fn polar_examples() {
        let ctx = diag_state(&[0.25; 4]);
        assert!(ctx.tau().distance(ctx.u()) < 1e-14);
        assert!(check_polar(&diag_state(&[2.0 / 3.0, 1.0 / 3.0])) <= 1e-12);
        assert!(check_polar(&random_ctx(7, 5)) <= 1e-10);
    }

    #[test]
    fn modular_corpus() {
        for s in 0..50u64 {
            let n = 2 + (s % 5) as usize;
            let ctx = random_ctx(100 + s, n);
            let d = check_unitary_relations(&ctx);
            assert!(d.max() <= 1e-10, "seed {s}: {d:?}");
            assert!(check_polar(&ctx) <= 1e-10);
        }
    }

    #[test]
    fn alpha_examples() {
        let ctx = random_ctx(8, 3);
        let id = ComplexMatrix::identity(9);
        assert!(alpha(&ctx, &id).unwrap().approx_eq(&id, 1e-13));
        assert!(commutant_defect(&ctx, &ComplexMatrix::unit(3, 0, 1)).unwrap() <= 1e-12);
        let a = ComplexMatrix::random_gaussian(9, 9, &mut Seed(9).rng());
        let twice = alpha(&ctx, &alpha(&ctx, &a).unwrap()).unwrap();
        assert!(twice.approx_eq(&a, 1e-12));
        // α(π(a)) is right multiplication by a transposed operator
        let b = ComplexMatrix::random_gaussian(3, 3, &mut Seed(10).rng());
        let img = alpha(&ctx, Superoperator::left_mult(&b).matrix()).unwrap();
        let want = Superoperator::right_mult(&ctx.transpose(&b));
        assert!(img.approx_eq(want.matrix(), 1e-12));
    }

    #[test]
    fn v_beta_examples() {
        let ctx = random_ctx(11, 3);
        for beta in [0.0, 0.1, 0.25, 0.5] {
            let m = v_beta_member(&ctx, beta, ctx.omega()).unwrap();
            assert!(m.member && m.a.approx_eq(&ComplexMatrix::identity(3), 1e-12));
        }
        let e11 = ComplexMatrix::unit(3, 0, 0);
        let xi = v_beta_element(&ctx, 0.25, &e11).unwrap();
        assert!(v_beta_member(&ctx, 0.25, &xi).unwrap().member);
        let anti = &ComplexMatrix::unit(3, 0, 1) - &ComplexMatrix::unit(3, 1, 0);
        let xi = v_beta_element(&ctx, 0.3, &anti).unwrap();
        let m = v_beta_member(&ctx, 0.3, &xi).unwrap();
        assert!(!m.member && m.hermitian_defect > 1.0);
        assert!(matches!(v_beta_member(&ctx, 0.6, &xi), Err(Error::BetaOutOfRange(_))));
    }

    #[test]
    fn duality_examples() {
        let ctx = random_ctx(12, 3);
        let r = v_beta_duality_check(&ctx, 0.25, 100, Seed(13)).unwrap();
        assert!(r.passed(1e-10), "{r:?}");
        let tr = diag_state(&[0.5, 0.5]);
        for s in 0..50 {
            let mut rng = Seed(s).rng();
            let a = random_positive(2, &mut rng);
            let b = random_positive(2, &mut rng);
            let xi = v_beta_element(&tr, 0.0, &a).unwrap();
            let eta = v_beta_element(&tr, 0.5, &b).unwrap();
            let p = inner(eta.as_slice(), xi.as_slice());
            // (b Ω, a Ω) = Tr(b a)/2 at the tracial state
            assert!((p - (&b * &a).trace() * 0.5).norm() < 1e-14 && p.re >= 0.0);
        }
        let r = v_beta_duality_check(&ctx, 0.1, 100, Seed(14)).unwrap();
        assert_eq!(r.flip_failures, 0);
    }

    #[test]
    fn t_phi_examples() {
        let ctx = random_ctx(15, 3);
        let t = t_phi(&ctx, &LinearMapRep::identity(3)).unwrap();
        assert!(t.t.distance(&Superoperator::identity(3)) < 1e-12);
        assert!(t.delta_commutation_defect < 1e-12 && t.contraction_defect < 1e-12);
        assert!(t.warnings.is_empty());

        let tr = diag_state(&[1.0 / 3.0; 3]);
        let t = t_phi(&tr, &LinearMapRep::transpose_map(3)).unwrap();
        assert!(t.t.distance(tr.u()) < 1e-13);

        let rho = ctx.rho().clone();
        let phi = LinearMapRep::from_fn(3, 3, |a| ComplexMatrix::identity(3).scale((&rho * a).trace()));
        let t = t_phi(&ctx, &phi).unwrap();
        let om = ComplexMatrix::column(ctx.omega().as_slice());
        let proj = &om * &om.adjoint();
        assert!(t.t.matrix().approx_eq(&proj, 1e-12));
        assert!(t.contraction_defect < 1e-10 && t.invariance_defect < 1e-12);
        assert!(t.unit_defect < 1e-12);

        let t = t_phi(&ctx, &LinearMapRep::transpose_map(3)).unwrap();
        assert!(!t.warnings.is_empty());
    }

    #[test]
    fn schwarz_examples() {
        assert!(schwarz_check(&LinearMapRep::identity(3), 50, Seed(16)) < 1e-12);
        assert!(schwarz_check(&LinearMapRep::identity(2).scale(2.0), 20, Seed(17)) > 0.1);
        // Transposition: with a = E_01 the defect operator is E_11 - E_00.
        let d = schwarz_check(&LinearMapRep::transpose_map(2), 1, Seed(18));
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn db_adjoint_examples() {
        let ctx = random_ctx(19, 3);
        let r = db_adjoint(&ctx, &LinearMapRep::identity(3)).unwrap();
        assert!(r.map.distance(&LinearMapRep::identity(3)) < 1e-12);

        // Tracial state: <φ^β(X), E> = <X, φ(E)> for Hermiticity-preserving φ.
        let tr = diag_state(&[1.0 / 3.0; 3]);
        let phi = LinearMapRep::from_choi(ComplexMatrix::random_hermitian(9, &mut Seed(20).rng()), 3, 3).unwrap();
        let adj = db_adjoint(&tr, &phi).unwrap().map;
        let x = ComplexMatrix::random_gaussian(3, 3, &mut Seed(21).rng());
        let px = adj.apply(&x).unwrap();
        for u in 0..9 {
            let e = ComplexMatrix::unit(3, u / 3, u % 3);
            let lhs = crate::matkernel::hs_inner(&px, &e).unwrap();
            let rhs = crate::matkernel::hs_inner(&x, &phi.apply(&e).unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }

        let rho = ComplexMatrix::from_real_diag(&[0.5, 0.3, 0.2]);
        let ctx = gns_context(&rho).unwrap();
        let u = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, 0.7 * i as f64 + 0.3)
            } else {
                ZERO
            }
        });
        let phi = LinearMapRep::from_conjugations(3, 3, std::slice::from_ref(&u), &[1.0]).unwrap();
        let want = LinearMapRep::from_conjugations(3, 3, &[u.adjoint()], &[1.0]).unwrap();
        let r = db_adjoint(&ctx, &phi).unwrap();
        assert!(r.map.distance(&want) < 1e-12 && r.defect < 1e-12);
        assert!(r.positivity(&SearchParams::default(), Seed(22)).unwrap().is_evidence());
    }

    #[test]
    fn cone_state_examples() {
        let ctx = random_ctx(23, 3);
        assert!(cone_state(&ctx, ctx.omega()).unwrap().approx_eq(ctx.rho(), 1e-12));
        let tr = diag_state(&[1.0 / 3.0; 3]);
        let a = ComplexMatrix::random_hermitian(3, &mut Seed(24).rng());
        let sym = &(&a + &a.transpose()).scale_real(0.5) + &ComplexMatrix::identity(3).scale_real(10.0);
        let xi = v_beta_element(&tr, 0.25, &sym).unwrap();
        assert!(tr.u().apply(&xi).approx_eq(&xi, 1e-13));
        let s = cone_state(&tr, &xi).unwrap();
        assert!(s.approx_eq(&tr.transpose(&s), 1e-12));
        let xi = v_beta_element(&ctx, 0.25, &random_positive(3, &mut Seed(25).rng())).unwrap();
        assert!(cone_state_transpose_defect(&ctx, &xi).unwrap() <= 1e-10);
        let bad = v_beta_element(&ctx, 0.25, &ComplexMatrix::from_real_diag(&[1.0, -1.0, 0.5])).unwrap();
        assert!(matches!(cone_state(&ctx, &bad), Err(Error::NotInNaturalCone(_))));
    }

    #[test]
    fn v0_invariance_for_identity_and_transposition() {
        for s in 0..20u64 {
            let ctx = random_ctx(300 + s, 3);
            let a = random_positive(3, &mut Seed(s).rng());
            for phi in [LinearMapRep::identity(3), LinearMapRep::transpose_map(3)] {
                let t = t_phi(&ctx, &phi).unwrap();
                assert!(v0_invariance(&ctx, &t, &a).unwrap().0);
            }
        }
    }

    #[test]
    fn identity_suite_on_random_states() {
        for s in 0..5u64 {
            let ctx = random_ctx(500 + s, 2 + s as usize);
            let suite = identity_suite(&ctx, 20, Seed(s)).unwrap();
            assert_eq!(suite.defects.len(), 14);
            assert!(suite.max_defect() <= 1e-9, "{suite:?}");
        }
    }

    #[test]
    fn delta_power_matches_spectral_scaling() {
        for s in 0..10u64 {
            let ctx = random_ctx(400 + s, 4);
            for beta in [-0.5, 0.25, 0.5, 1.0] {
                let via_power = ctx.delta().power(beta).unwrap();
                let x = ctx.eigenvectors();
                let l = ctx.eigenvalues();
                let scaled = Superoperator::from_fn(4, false, |e| {
                    let c = &(&x.adjoint() * e) * x;
                    let c = ComplexMatrix::from_fn(4, 4, |i, j| c[(i, j)] * (l[i] / l[j]).powf(beta));
                    &(x * &c) * &x.adjoint()
                });
                assert!(via_power.distance(&scaled) <= 1e-11, "beta {beta}");
            }
        }
    }

    #[test]
    fn superoperator_composition_rules() {
        let ctx = random_ctx(26, 3);
        let mut rng = Seed(27).rng();
        let xi = ComplexMatrix::random_gaussian(3, 3, &mut rng);
        let ops = [ctx.j().clone(), ctx.u().clone(), ctx.jm().clone(), ctx.delta().clone()];
        for a in &ops {
            for b in &ops {
                let direct = a.apply(&b.apply(&xi));
                assert!(a.compose(b).apply(&xi).approx_eq(&direct, 1e-12));
            }
        }
        // antilinearity
        let c = Complex64::new(0.3, -1.2);
        assert!(ctx.j().apply(&xi.scale(c)).approx_eq(&ctx.j().apply(&xi).scale(c.conj()), 1e-12));
        // adjoint of an antilinear operator
        let eta = ComplexMatrix::random_gaussian(3, 3, &mut rng);
        let j = ctx.j();
        let lhs = inner(j.apply(&xi).as_slice(), eta.as_slice());
        let rhs = inner(xi.as_slice(), j.adjoint().apply(&eta).as_slice()).conj();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn transpose_via_j_pointwise(seed in any::<u64>(), n in 2usize..=5) {
            let mut rng = Seed(seed).rng();
            let ctx = gns_context(&random_faithful_state(n, &mut rng)).unwrap();
            let a = ComplexMatrix::random_gaussian(n, n, &mut rng);
            let xi = ComplexMatrix::random_gaussian(n, n, &mut rng);
            prop_assert!(transpose_via_j(&ctx, &a, &xi).unwrap().defect <= 1e-10);
        }
    }
}
