//! Maps between matrix algebras and their Choi matrices.
//!
//! A map `φ: B(C^m) → B(C^n)` is stored as `h = Σ_ij E_ij ⊗ φ(E_ij)`, an
//! `mn x mn` matrix whose `(i, j)` block of size `n` is `φ(E_ij)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{
    herm_eig, inner, kron_vec, normalize, partial_transpose, psd_threshold, random_unit_vector,
    ComplexMatrix, Side, ONE, ZERO,
};
use crate::par::{argmin_by_value, map_indexed};
use crate::rng::Seed;
use crate::search::SearchParams;
use crate::verdict::{Evidence, Verdict, Witness};

/// Hermiticity-preservation check tolerance on the Choi matrix.
pub const HP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearMapRep {
    m: usize,
    n: usize,
    choi: ComplexMatrix,
}

impl LinearMapRep {
    pub fn from_choi(choi: ComplexMatrix, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 || choi.shape() != (m * n, m * n) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix {}x{} for a map B(C^{m}) -> B(C^{n})",
                choi.rows(),
                choi.cols()
            )));
        }
        Ok(Self { m, n, choi })
    }

    /// From the images of the matrix units, ordered `E_00, E_01, ..., E_(m-1)(m-1)`.
    pub fn from_unit_action(m: usize, n: usize, images: &[ComplexMatrix]) -> Result<Self> {
        if images.len() != m * m {
            return Err(Error::DimensionMismatch(format!(
                "{} unit images for m = {m}",
                images.len()
            )));
        }
        if let Some(bad) = images.iter().find(|a| a.shape() != (n, n)) {
            return Err(Error::DimensionMismatch(format!(
                "unit image {}x{}, expected {n}x{n}",
                bad.rows(),
                bad.cols()
            )));
        }
        let choi = ComplexMatrix::from_fn(m * n, m * n, |r, c| {
            images[(r / n) * m + c / n][(r % n, c % n)]
        });
        Ok(Self { m, n, choi })
    }

    pub fn from_fn(m: usize, n: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let images: Vec<ComplexMatrix> = (0..m * m)
            .map(|u| f(&ComplexMatrix::unit(m, u / m, u % m)))
            .collect();
        Self::from_unit_action(m, n, &images).expect("closure returned wrong shape")
    }

    /// `a ↦ Σ_r w_r K_r a K_r*` with `K_r` of shape `n x m`.
    pub fn from_conjugations(m: usize, n: usize, ops: &[ComplexMatrix], weights: &[f64]) -> Result<Self> {
        if weights.len() != ops.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} operators",
                weights.len(),
                ops.len()
            )));
        }
        if let Some(bad) = ops.iter().find(|k| k.shape() != (n, m)) {
            return Err(Error::DimensionMismatch(format!(
                "conjugation operator {}x{}, expected {n}x{m}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self::from_fn(m, n, |a| {
            let mut out = ComplexMatrix::zeros(n, n);
            for (k, &w) in ops.iter().zip(weights) {
                out += &(&(k * a) * &k.adjoint()).scale_real(w);
            }
            out
        }))
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |a| a.clone())
    }

    /// Transposition in the standard basis.
    pub fn transpose_map(d: usize) -> Self {
        Self::from_fn(d, d, |a| a.transpose())
    }

    /// `a ↦ Tr(a) I_n`.
    pub fn trace_map(m: usize, n: usize) -> Self {
        Self::from_fn(m, n, |a| ComplexMatrix::identity(n).scale(a.trace()))
    }

    pub fn zero(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            choi: ComplexMatrix::zeros(m * n, m * n),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// `φ(E_ij)`.
    pub fn unit_image(&self, i: usize, j: usize) -> ComplexMatrix {
        self.choi.block(self.m, i, j)
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.shape() != (self.m, self.m) {
            return Err(Error::DimensionMismatch(format!(
                "input {}x{} for a map on B(C^{})",
                a.rows(),
                a.cols(),
                self.m
            )));
        }
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..self.m {
            for j in 0..self.m {
                let c = a[(i, j)];
                if c == ZERO {
                    continue;
                }
                for r in 0..n {
                    for s in 0..n {
                        out[(r, s)] += c * self.choi[(i * n + r, j * n + s)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[a_ij] ↦ [φ(a_ij)]` on `M_k(B(C^m))`, blocks indexed by the slow factor.
    pub fn apply_blockwise(&self, a: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
        if a.shape() != (k * self.m, k * self.m) {
            return Err(Error::DimensionMismatch(format!(
                "block matrix {}x{} for k = {k}, m = {}",
                a.rows(),
                a.cols(),
                self.m
            )));
        }
        let n = self.n;
        let mut out = ComplexMatrix::zeros(k * n, k * n);
        for bi in 0..k {
            for bj in 0..k {
                let img = self.apply(&a.block(k, bi, bj))?;
                for r in 0..n {
                    for s in 0..n {
                        out[(bi * n + r, bj * n + s)] = img[(r, s)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `φ ∘ t`: its Choi blocks are `h'_ij = h_ji`.
    pub fn compose_transpose(&self) -> Self {
        Self {
            m: self.m,
            n: self.n,
            choi: partial_transpose(&self.choi, self.m, self.n, Side::First)
                .expect("shape checked at construction"),
        }
    }

    /// `a ↦ W* φ(a) W` for an `n x r` matrix `W`.
    pub fn compress(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.rows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "compression by {}x{} on output dimension {}",
                w.rows(),
                w.cols(),
                self.n
            )));
        }
        let r = w.cols();
        let lift = crate::matkernel::kron(&ComplexMatrix::identity(self.m), w);
        let choi = &(&lift.adjoint() * &self.choi) * &lift;
        Ok(Self {
            m: self.m,
            n: r,
            choi,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::DimensionMismatch(format!(
                "adding maps {}->{} and {}->{}",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(Self {
            m: self.m,
            n: self.n,
            choi: &self.choi + &other.choi,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: self.m,
            n: self.n,
            choi: self.choi.scale_real(s),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.choi.hermitian_defect()
    }

    pub fn is_hermiticity_preserving(&self) -> bool {
        self.hermiticity_defect() <= HP_TOL * self.choi.frobenius_norm().max(1.0)
    }

    pub(crate) fn require_hermiticity_preserving(&self) -> Result<()> {
        if self.is_hermiticity_preserving() {
            Ok(())
        } else {
            Err(Error::NotHermiticityPreserving(self.hermiticity_defect()))
        }
    }

    /// Max Frobenius distance between the unit images of two maps.
    pub fn distance(&self, other: &Self) -> f64 {
        if (self.m, self.n) != (other.m, other.n) {
            return f64::INFINITY;
        }
        (&self.choi - &other.choi).frobenius_norm()
    }
}

/// `h = Σ E_ij ⊗ φ(E_ij)`.
pub fn choi_of_map(phi: &LinearMapRep) -> ComplexMatrix {
    phi.choi().clone()
}

/// Rebuilds the map from `h` through `φ(E_ij) = V_i* h V_j`, `V_x y = x ⊗ y`.
pub fn map_of_choi(h: &ComplexMatrix, m: usize, n: usize) -> Result<LinearMapRep> {
    if h.shape() != (m * n, m * n) {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix {}x{} for m = {m}, n = {n}",
            h.rows(),
            h.cols()
        )));
    }
    let v = |i: usize| {
        let mut e = vec![ZERO; m];
        e[i] = ONE;
        ComplexMatrix::from_fn(m * n, n, |r, c| {
            if r % n == c {
                e[r / n]
            } else {
                ZERO
            }
        })
    };
    let vs: Vec<ComplexMatrix> = (0..m).map(v).collect();
    let mut images = Vec::with_capacity(m * m);
    for vi in &vs {
        let left = &vi.adjoint() * h;
        for vj in &vs {
            images.push(&left * vj);
        }
    }
    LinearMapRep::from_unit_action(m, n, &images)
}

/// The operator `g = Σ_kl g_kl ⊗ F_kl` of the trace representation
/// `φ(a) = Σ_kl Tr(a g_lk) F_kl`.
///
/// Each `g_lk` is recovered from its pairings with the matrix units:
/// `Tr(E_ij g_lk) = (g_lk)_ji = <f_k, φ(E_ij) f_l>`.
pub fn g_of_map(phi: &LinearMapRep) -> ComplexMatrix {
    let (m, n) = (phi.m(), phi.n());
    let images: Vec<ComplexMatrix> = (0..m * m)
        .map(|u| {
            phi.apply(&ComplexMatrix::unit(m, u / m, u % m))
                .expect("unit has the input shape")
        })
        .collect();
    let mut g = ComplexMatrix::zeros(m * n, m * n);
    for k in 0..n {
        for l in 0..n {
            // (g_lk)_ji for all i, j
            for i in 0..m {
                for j in 0..m {
                    let pairing = images[i * m + j][(k, l)];
                    g[(j * n + l, i * n + k)] = pairing;
                }
            }
        }
    }
    g
}

/// `||h - g^t||_F` with `^t` the full transposition in the product basis.
pub fn check_g_h(phi: &LinearMapRep) -> f64 {
    (phi.choi() - &g_of_map(phi).transpose()).frobenius_norm()
}

/// Complete-positivity test from the spectrum of the Choi matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpVerdict {
    pub completely_positive: bool,
    pub min_eig: f64,
    /// Unit eigenvector `z` with `<z, h z> = min_eig`, present when CP fails.
    pub witness: Option<Vec<Complex64>>,
}

pub fn is_cp(phi: &LinearMapRep) -> Result<CpVerdict> {
    phi.require_hermiticity_preserving()?;
    let h = phi.choi();
    let eig = herm_eig(h)?;
    let min_eig = eig.eigenvalues[0];
    let completely_positive = min_eig >= psd_threshold(h);
    Ok(CpVerdict {
        completely_positive,
        min_eig,
        witness: (!completely_positive).then(|| eig.eigenvector(0)),
    })
}

/// Product vector `x ⊗ y` with `<x⊗y, h x⊗y> < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductWitness {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub value: f64,
}

impl Witness for ProductWitness {
    fn value(&self) -> f64 {
        self.value
    }
}

impl ProductWitness {
    pub fn reevaluate(&self, h: &ComplexMatrix) -> f64 {
        product_form(h, &self.x, &self.y)
    }
}

pub type BlockPosVerdict = Verdict<ProductWitness>;

/// `<x⊗y, h x⊗y>` (real part).
pub fn product_form(h: &ComplexMatrix, x: &[Complex64], y: &[Complex64]) -> f64 {
    h.quadratic_form(&kron_vec(x, y)).re
}

/// `(I ⊗ y)* h (I ⊗ y)`, an `m x m` matrix.
fn contract_second(h: &ComplexMatrix, m: usize, n: usize, y: &[Complex64]) -> ComplexMatrix {
    let c = ComplexMatrix::from_fn(m, m, |i, j| {
        let mut s = ZERO;
        for k in 0..n {
            let yk = y[k].conj();
            if yk == ZERO {
                continue;
            }
            for l in 0..n {
                s += yk * h[(i * n + k, j * n + l)] * y[l];
            }
        }
        s
    });
    c.hermitian_part()
}

/// `(x ⊗ I)* h (x ⊗ I)`, an `n x n` matrix.
fn contract_first(h: &ComplexMatrix, m: usize, n: usize, x: &[Complex64]) -> ComplexMatrix {
    let c = ComplexMatrix::from_fn(n, n, |k, l| {
        let mut s = ZERO;
        for i in 0..m {
            let xi = x[i].conj();
            if xi == ZERO {
                continue;
            }
            for j in 0..m {
                s += xi * h[(i * n + k, j * n + l)] * x[j];
            }
        }
        s
    });
    c.hermitian_part()
}

fn min_eigpair(a: &ComplexMatrix) -> Result<(f64, Vec<Complex64>)> {
    let e = herm_eig(a)?;
    Ok((e.eigenvalues[0], e.eigenvector(0)))
}

struct SeeSawRun {
    value: f64,
    x: Vec<Complex64>,
    y: Vec<Complex64>,
    iterations: usize,
}

fn seesaw_product(
    h: &ComplexMatrix,
    m: usize,
    n: usize,
    params: &SearchParams,
    seed: Seed,
) -> Result<SeeSawRun> {
    let mut rng = seed.rng();
    let mut y = random_unit_vector(n, &mut rng);
    let (mut value, mut x) = min_eigpair(&contract_second(h, m, n, &y))?;
    let mut iterations = 0;
    while iterations < params.max_iters {
        iterations += 1;
        let (_, y_new) = min_eigpair(&contract_first(h, m, n, &x))?;
        y = y_new;
        let (v_new, x_new) = min_eigpair(&contract_second(h, m, n, &y))?;
        x = x_new;
        let improved = value - v_new;
        value = v_new;
        if improved < params.improve_tol {
            break;
        }
    }
    normalize(&mut x);
    normalize(&mut y);
    let value = product_form(h, &x, &y);
    Ok(SeeSawRun {
        value,
        x,
        y,
        iterations,
    })
}

/// Searches for a product vector with `<x⊗y, h x⊗y> < 0`.
///
/// Alternates exact minimizations over `x` (for fixed `y`) and `y` (for
/// fixed `x`) from `params.restarts` random starts. Restart `r` uses
/// `seed.child(r)`; the best restart wins, ties to the lowest index.
pub fn block_positivity(
    h: &ComplexMatrix,
    m: usize,
    n: usize,
    params: &SearchParams,
    seed: Seed,
) -> Result<BlockPosVerdict> {
    if h.shape() != (m * n, m * n) {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} for m = {m}, n = {n}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermitian_defect();
    if defect > HP_TOL * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let restarts = params.restarts.max(1);
    let runs = map_indexed(restarts, params.exec, |r| {
        seesaw_product(h, m, n, params, seed.child(r as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let best = argmin_by_value(&runs, |r| r.value).expect("at least one restart");
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let run = &runs[best];
    if run.value < psd_threshold(h) {
        Ok(Verdict::Violation(ProductWitness {
            x: run.x.clone(),
            y: run.y.clone(),
            value: run.value,
        }))
    } else {
        Ok(Verdict::Evidence(Evidence {
            min_value: run.value,
            restarts,
            samples: 0,
            iterations,
            seed,
        }))
    }
}

/// The three quadratic forms whose nonnegativity characterizes block positivity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockposForms {
    /// `<x⊗y, A x⊗y>` with `y = Σ_s conj(λ_s) f_s`.
    ///
    /// With this pairing the block form below agrees with it pointwise;
    /// `y = Σ_s λ_s f_s` would give the block form with `λ_k` and `λ_l` swapped.
    pub product_lambda: f64,
    /// `Σ_kl λ_k conj(λ_l) <x, A_kl x>` with `A = Σ_kl A_kl ⊗ F_kl`.
    pub second_blocks: Complex64,
    /// `<x⊗y, A x⊗y>` with `x = Σ_i conj(μ_i) e_i`.
    pub product_mu: f64,
    /// `Σ_ij μ_i conj(μ_j) <y, A'_ij y>` with `A = Σ_ij E_ij ⊗ A'_ij`.
    pub first_blocks: Complex64,
}

pub fn blockpos_forms(
    h: &ComplexMatrix,
    m: usize,
    n: usize,
    x: &[Complex64],
    lambda: &[Complex64],
    y: &[Complex64],
    mu: &[Complex64],
) -> Result<BlockposForms> {
    if h.shape() != (m * n, m * n) || x.len() != m || lambda.len() != n || y.len() != n || mu.len() != m {
        return Err(Error::DimensionMismatch(
            "blockpos_forms data inconsistent with m, n".into(),
        ));
    }
    // A_kl = (I ⊗ f_k)* A (I ⊗ f_l), A'_ij = (e_i ⊗ I)* A (e_j ⊗ I)
    let a_kl = |k: usize, l: usize| ComplexMatrix::from_fn(m, m, |i, j| h[(i * n + k, j * n + l)]);
    let mut second_blocks = ZERO;
    for k in 0..n {
        for l in 0..n {
            let blk = a_kl(k, l);
            second_blocks += lambda[k] * lambda[l].conj() * inner(x, &blk.apply(x));
        }
    }
    let mut first_blocks = ZERO;
    for i in 0..m {
        for j in 0..m {
            let blk = h.block(m, i, j);
            first_blocks += mu[i] * mu[j].conj() * inner(y, &blk.apply(y));
        }
    }
    let conj = |v: &[Complex64]| v.iter().map(|z| z.conj()).collect::<Vec<_>>();
    Ok(BlockposForms {
        product_lambda: product_form(h, x, &conj(lambda)),
        second_blocks,
        product_mu: product_form(h, &conj(mu), y),
        first_blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{is_psd, kron};
    use crate::par::Exec;
    use proptest::prelude::*;

    pub(crate) fn random_map(m: usize, n: usize, seed: Seed) -> LinearMapRep {
        let h = ComplexMatrix::random_hermitian(m * n, &mut seed.rng());
        LinearMapRep::from_choi(h, m, n).unwrap()
    }

    fn swap(d: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(d * d, d * d, |r, c| {
            if r / d == c % d && r % d == c / d {
                ONE
            } else {
                ZERO
            }
        })
    }

    #[test]
    fn choi_examples() {
        let h = choi_of_map(&LinearMapRep::identity(2));
        let phi = [ONE, ZERO, ZERO, ONE];
        assert_eq!(h, ComplexMatrix::from_fn(4, 4, |i, j| phi[i] * phi[j]));
        assert_eq!(h.trace().re, 2.0);
        assert!(is_psd(&h).unwrap());

        assert_eq!(choi_of_map(&LinearMapRep::transpose_map(2)), swap(2));
        assert_eq!(choi_of_map(&LinearMapRep::trace_map(2, 2)), ComplexMatrix::identity(4));
    }

    #[test]
    fn map_of_choi_examples() {
        let tr = map_of_choi(&ComplexMatrix::identity(4), 2, 2).unwrap();
        let mut rng = Seed(1).rng();
        let a = ComplexMatrix::random_gaussian(2, 2, &mut rng);
        let want = ComplexMatrix::identity(2).scale(a.trace());
        assert!(tr.apply(&a).unwrap().approx_eq(&want, 1e-14));

        let t = map_of_choi(&swap(2), 2, 2).unwrap();
        assert!(t.apply(&a).unwrap().approx_eq(&a.transpose(), 1e-14));
        assert!(matches!(
            map_of_choi(&swap(2), 3, 2),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn g_examples() {
        // identity map: g = h^t = (Σ E_ij ⊗ E_ij)^t = Σ E_ji ⊗ E_ji, the same matrix
        let id = LinearMapRep::identity(2);
        assert!(g_of_map(&id).approx_eq(&choi_of_map(&id).transpose(), 0.0));
        assert!(check_g_h(&id) <= 1e-12);
        // a ↦ Tr(a) I: g_kl = δ_kl I, g = I
        assert_eq!(g_of_map(&LinearMapRep::trace_map(2, 2)), ComplexMatrix::identity(4));
        assert!(check_g_h(&LinearMapRep::transpose_map(2)) <= 1e-12);
        assert!(check_g_h(&random_map(3, 2, Seed(8))) <= 1e-10);
    }

    #[test]
    fn g_reproduces_trace_representation() {
        let phi = random_map(3, 2, Seed(21));
        let g = g_of_map(&phi);
        let (m, n) = (3, 2);
        let a = ComplexMatrix::random_gaussian(m, m, &mut Seed(22).rng());
        // g_lk = (I ⊗ f_l)* g (I ⊗ f_k)
        let g_blk = |l: usize, k: usize| ComplexMatrix::from_fn(m, m, |i, j| g[(i * n + l, j * n + k)]);
        let rebuilt = ComplexMatrix::from_fn(n, n, |k, l| (&a * &g_blk(l, k)).trace());
        assert!(rebuilt.approx_eq(&phi.apply(&a).unwrap(), 1e-12));
    }

    #[test]
    fn is_cp_examples() {
        let v = is_cp(&LinearMapRep::identity(2)).unwrap();
        assert!(v.completely_positive && v.min_eig.abs() < 1e-12 && v.witness.is_none());

        let v = is_cp(&LinearMapRep::transpose_map(2)).unwrap();
        assert!(!v.completely_positive);
        assert!((v.min_eig + 1.0).abs() < 1e-12);
        let z = v.witness.unwrap();
        // antisymmetric: z = (e_01 - e_10)/√2 up to phase
        assert!(z[0].norm() < 1e-12 && z[3].norm() < 1e-12);
        assert!((z[1] + z[2]).norm() < 1e-12);
        assert!((swap(2).quadratic_form(&z).re + 1.0).abs() < 1e-12);

        let v = is_cp(&LinearMapRep::trace_map(2, 2)).unwrap();
        assert!(v.completely_positive && (v.min_eig - 1.0).abs() < 1e-12);

        let skew = LinearMapRep::from_fn(2, 2, |a| a.scale(crate::matkernel::I));
        assert!(matches!(is_cp(&skew), Err(Error::NotHermiticityPreserving(_))));
    }

    #[test]
    fn block_positivity_examples() {
        let p = SearchParams::default();
        let h = ComplexMatrix::random_psd(6, 6, &mut Seed(4).rng());
        let v = block_positivity(&h, 2, 3, &p, Seed(5)).unwrap();
        assert!(v.is_evidence() && v.value() >= -1e-9);

        let v = block_positivity(&swap(2), 2, 2, &p, Seed(6)).unwrap();
        let e = v.evidence().expect("swap is block positive");
        assert!(e.min_value.abs() < 1e-9, "min {}", e.min_value);

        let v = block_positivity(&ComplexMatrix::identity(4).scale_real(-1.0), 2, 2, &p, Seed(7)).unwrap();
        let w = v.witness().expect("-I is not block positive");
        assert!((w.value + 1.0).abs() < 1e-12);
        assert!((w.reevaluate(&-&ComplexMatrix::identity(4)) - w.value).abs() < 1e-12);
    }

    #[test]
    fn swap_minimum_attained_at_orthogonal_pair() {
        let v = block_positivity(&swap(2), 2, 2, &SearchParams::default(), Seed(6)).unwrap();
        let e = v.evidence().unwrap();
        // <x⊗y, swap x⊗y> = |<x,y>|², so the minimum 0 needs x ⊥ y.
        assert!(e.min_value >= -1e-12 && e.min_value < 1e-9);
    }

    #[test]
    fn block_positivity_sequential_matches_parallel() {
        let h = random_map(2, 3, Seed(30)).choi().clone();
        let p = SearchParams::default();
        let a = block_positivity(&h, 2, 3, &p, Seed(31)).unwrap();
        let b = block_positivity(&h, 2, 3, &p.with_exec(Exec::Sequential), Seed(31)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn blockpos_forms_identity() {
        let h = ComplexMatrix::identity(6);
        let mut rng = Seed(2).rng();
        let x = random_unit_vector(2, &mut rng);
        let lam = random_unit_vector(3, &mut rng);
        let y = random_unit_vector(3, &mut rng);
        let mu = random_unit_vector(2, &mut rng);
        let f = blockpos_forms(&h, 2, 3, &x, &lam, &y, &mu).unwrap();
        for v in [f.product_lambda, f.second_blocks.re, f.product_mu, f.first_blocks.re] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transposed_composition_swaps_blocks() {
        for s in 0..20 {
            let phi = random_map(3, 2, Seed(100 + s));
            let phit = phi.compose_transpose();
            let direct = LinearMapRep::from_fn(3, 2, |a| phi.apply(&a.transpose()).unwrap());
            assert!(phit.distance(&direct) < 1e-12);
            for i in 0..3 {
                for j in 0..3 {
                    assert!(phit.unit_image(i, j).approx_eq(&phi.unit_image(j, i), 1e-12));
                }
            }
        }
    }

    #[test]
    fn conjugation_maps() {
        let mut rng = Seed(3).rng();
        let k = ComplexMatrix::random_gaussian(2, 3, &mut rng);
        let phi = LinearMapRep::from_conjugations(3, 2, std::slice::from_ref(&k), &[1.0]).unwrap();
        assert!(is_cp(&phi).unwrap().completely_positive);
        let a = ComplexMatrix::random_gaussian(3, 3, &mut rng);
        assert!(phi.apply(&a).unwrap().approx_eq(&(&(&k * &a) * &k.adjoint()), 1e-12));
        let neg = LinearMapRep::from_conjugations(3, 2, &[k], &[-1.0]).unwrap();
        assert!(!is_cp(&neg).unwrap().completely_positive);
    }

    #[test]
    fn compression_matches_direct() {
        let phi = random_map(2, 3, Seed(40));
        let w = crate::matkernel::haar_isometry(3, 2, &mut Seed(41).rng()).unwrap();
        let c = phi.compress(&w).unwrap();
        let a = ComplexMatrix::random_gaussian(2, 2, &mut Seed(42).rng());
        let direct = &(&w.adjoint() * &phi.apply(&a).unwrap()) * &w;
        assert!(c.apply(&a).unwrap().approx_eq(&direct, 1e-12));
        let _ = kron(&w, &w);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn round_trip_and_g(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=4) {
            let phi = random_map(m, n, Seed(seed));
            let back = map_of_choi(&choi_of_map(&phi), m, n).unwrap();
            prop_assert!(back.distance(&phi) <= 1e-12);
            prop_assert!(check_g_h(&phi) <= 1e-10);
        }

        #[test]
        fn psd_choi_is_never_refuted(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3) {
            let h = ComplexMatrix::random_psd(m * n, 1 + (seed % 3) as usize, &mut Seed(seed).rng());
            let p = SearchParams::default().with_restarts(8);
            prop_assert!(block_positivity(&h, m, n, &p, Seed(seed ^ 1)).unwrap().is_evidence());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn blockpos_forms_agree(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=4) {
            let mut rng = Seed(seed).rng();
            let h = ComplexMatrix::random_hermitian(m * n, &mut rng);
            let x = random_unit_vector(m, &mut rng);
            let lam = random_unit_vector(n, &mut rng);
            let y = random_unit_vector(n, &mut rng);
            let mu = random_unit_vector(m, &mut rng);
            let f = blockpos_forms(&h, m, n, &x, &lam, &y, &mu).unwrap();
            prop_assert!((f.product_lambda - f.second_blocks.re).abs() <= 1e-10);
            prop_assert!(f.second_blocks.im.abs() <= 1e-10);
            prop_assert!((f.product_mu - f.first_blocks.re).abs() <= 1e-10);
            prop_assert!(f.first_blocks.im.abs() <= 1e-10);
        }
    }
}
