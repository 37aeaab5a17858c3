//! k-positivity, k-copositivity and the weak decomposability conditions.
//!
//! A map is k-positive iff `a ↦ pφ(a)p` is completely positive for every
//! projection `p` of rank at most `k`, i.e. iff
//! `λ_min((I ⊗ W)* h (I ⊗ W)) ≥ 0` for every `n x k` isometry `W`.
//! [`k_block_min`] minimizes that quantity by alternating between the
//! minimizing vector and the best isometry for it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::choi::LinearMapRep;
use crate::error::{Error, Result};
use crate::matkernel::{
    haar_isometry, herm_eig, is_psd, kron, orthonormalize_columns, partial_transpose, psd_min_eig,
    psd_threshold, ComplexMatrix, Side, ZERO,
};
use crate::par::{argmin_by_value, map_indexed, Exec};
use crate::rng::{SearchRng, Seed};
use crate::search::{SearchParams, WitnessParams};
use crate::verdict::{Evidence, Verdict, Witness};
use rand::Rng;

/// A rank-`≤k` isometry `W` and a unit vector `z ∈ C^m ⊗ range(W)` with
/// `<z, h z> < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KWitness {
    pub k: usize,
    /// `n x r` isometry, `r ≤ k`.
    pub isometry: ComplexMatrix,
    /// `W W*`.
    pub projection: ComplexMatrix,
    /// Unit vector in `C^m ⊗ C^n`, supported on `C^m ⊗ range(p)`.
    pub z: Vec<Complex64>,
    pub value: f64,
}

impl Witness for KWitness {
    fn value(&self) -> f64 {
        self.value
    }
}

impl KWitness {
    /// `<z, h z>`.
    pub fn reevaluate(&self, h: &ComplexMatrix) -> f64 {
        h.quadratic_form(&self.z).re
    }

    /// Whether this witness refutes `k'`-positivity of the map with Choi
    /// matrix `h`: `p` is a projection of trace at most `k'`, `z` is a unit
    /// vector living on `C^m ⊗ range(p)` and `<z, h z>` is negative.
    pub fn refutes(&self, h: &ComplexMatrix, m: usize, k_prime: usize) -> bool {
        let p = &self.projection;
        let n = p.rows();
        if h.shape() != (m * n, m * n) || self.z.len() != m * n {
            return false;
        }
        let idempotent = (&(p * p) - p).frobenius_norm() <= 1e-9;
        let selfadjoint = p.hermitian_defect() <= 1e-9;
        let rank_ok = p.trace().re <= k_prime as f64 + 1e-9;
        let lifted = kron(&ComplexMatrix::identity(m), p).apply(&self.z);
        let supported = lifted
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            <= 1e-9;
        let unit = (crate::matkernel::norm(&self.z) - 1.0).abs() <= 1e-9;
        let value = self.reevaluate(h);
        idempotent && selfadjoint && rank_ok && supported && unit && value < psd_threshold(h)
    }
}

/// Verdict of a k-positivity search, tagged with `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KVerdict {
    pub k: usize,
    #[serde(flatten)]
    pub verdict: Verdict<KWitness>,
}

impl KVerdict {
    pub fn is_violation(&self) -> bool {
        self.verdict.is_violation()
    }

    pub fn is_evidence(&self) -> bool {
        self.verdict.is_evidence()
    }

    pub fn witness(&self) -> Option<&KWitness> {
        self.verdict.witness()
    }

    pub fn value(&self) -> f64 {
        self.verdict.value()
    }
}

/// `(I_m ⊗ W)* h (I_m ⊗ W)`.
fn compress_choi(h: &ComplexMatrix, m: usize, w: &ComplexMatrix) -> ComplexMatrix {
    let lift = kron(&ComplexMatrix::identity(m), w);
    (&(&lift.adjoint() * h) * &lift).hermitian_part()
}

/// Columns of `U_r diag(g)^{-1/2}` spanning the range of the Hermitian PSD `g`.
fn range_whitener(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(g)?;
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..g.rows())
        .filter(|&j| eig.eigenvalues[j] > 1e-12 * top.max(1e-300))
        .collect();
    Ok(ComplexMatrix::from_fn(g.rows(), keep.len(), |r, c| {
        let j = keep[c];
        eig.eigenvectors[(r, j)] / eig.eigenvalues[j].sqrt()
    }))
}

/// Best isometry for a fixed compressed vector.
///
/// With `Z` the `m x k` coefficient matrix of `z`, the full vector is
/// `v = Σ_i e_i ⊗ W z_i = L vec(W)`. Minimizing `<v, h v> / <v, v>` over
/// `vec(W)` is a generalized eigenproblem with `L* L = I_n ⊗ Z* Z`, solved on
/// the range of `Z* Z`.
fn refit_isometry(h: &ComplexMatrix, m: usize, n: usize, k: usize, zc: &[Complex64]) -> Result<ComplexMatrix> {
    let zmat = ComplexMatrix::from_fn(m, k, |i, a| zc[i * k + a]);
    let l = ComplexMatrix::from_fn(m * n, n * k, |row, col| {
        let (i, r) = (row / n, row % n);
        let (s, a) = (col / k, col % k);
        if r == s {
            zmat[(i, a)]
        } else {
            ZERO
        }
    });
    let a = &(&l.adjoint() * h) * &l;
    let white = range_whitener(&(&zmat.adjoint() * &zmat))?;
    let q = kron(&ComplexMatrix::identity(n), &white);
    let c = (&(&q.adjoint() * &a) * &q).hermitian_part();
    let y = herm_eig(&c)?.eigenvector(0);
    let vec_w = q.apply(&y);
    let w = ComplexMatrix::from_fn(n, k, |r, a| vec_w[r * k + a]);
    Ok(orthonormalize_columns(&w).0)
}

struct KRun {
    value: f64,
    isometry: ComplexMatrix,
    zc: Vec<Complex64>,
    iterations: usize,
}

fn k_seesaw(h: &ComplexMatrix, m: usize, n: usize, k: usize, params: &SearchParams, seed: Seed) -> Result<KRun> {
    let mut w = if k == n {
        ComplexMatrix::identity(n)
    } else {
        haar_isometry(n, k, &mut seed.rng())?
    };
    let eig = herm_eig(&compress_choi(h, m, &w))?;
    let mut value = eig.eigenvalues[0];
    let mut zc = eig.eigenvector(0);
    let mut iterations = 0;
    // With k = n every isometry is unitary and the compressed spectrum is that of h.
    while k < n && iterations < params.max_iters {
        iterations += 1;
        let w_new = refit_isometry(h, m, n, k, &zc)?;
        let eig = herm_eig(&compress_choi(h, m, &w_new))?;
        let v_new = eig.eigenvalues[0];
        if v_new > value {
            break;
        }
        let gain = value - v_new;
        w = w_new;
        value = v_new;
        zc = eig.eigenvector(0);
        if gain < params.improve_tol {
            break;
        }
    }
    Ok(KRun {
        value,
        isometry: w,
        zc,
        iterations,
    })
}

fn check_k(phi: &LinearMapRep, k: usize) -> Result<()> {
    if k == 0 || k > phi.n() {
        return Err(Error::KOutOfRange { k, max: phi.n() });
    }
    phi.require_hermiticity_preserving()
}

/// Minimizes `λ_min((I ⊗ W)* h (I ⊗ W))` over `n x k` isometries `W`.
///
/// A value below the PSD tolerance is returned as a [`KWitness`] whose
/// vector re-evaluates exactly against `h`; otherwise the smallest value seen
/// is reported as evidence.
pub fn k_block_min(phi: &LinearMapRep, k: usize, params: &SearchParams, seed: Seed) -> Result<KVerdict> {
    check_k(phi, k)?;
    let (m, n) = (phi.m(), phi.n());
    let h = phi.choi();
    let restarts = if k == n { 1 } else { params.restarts.max(1) };
    let runs = map_indexed(restarts, params.exec, |r| k_seesaw(h, m, n, k, params, seed.child(r as u64)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let best = argmin_by_value(&runs, |r| r.value).expect("at least one restart");
    let run = &runs[best];
    let z = kron(&ComplexMatrix::identity(m), &run.isometry).apply(&run.zc);
    let value = h.quadratic_form(&z).re;
    let verdict = if value < psd_threshold(h) {
        Verdict::Violation(KWitness {
            k,
            projection: &run.isometry * &run.isometry.adjoint(),
            isometry: run.isometry.clone(),
            z,
            value,
        })
    } else {
        Verdict::Evidence(Evidence {
            min_value: value,
            restarts,
            samples: 0,
            iterations: runs.iter().map(|r| r.iterations).sum(),
            seed,
        })
    };
    Ok(KVerdict { k, verdict })
}

/// k-positivity test. With `k = n` this is exactly the complete-positivity test.
pub fn is_k_positive(phi: &LinearMapRep, k: usize, params: &SearchParams, seed: Seed) -> Result<KVerdict> {
    k_block_min(phi, k, params, seed)
}

/// k-copositivity of `φ` is k-positivity of `φ ∘ t`. A witness refers to the
/// Choi matrix of `φ ∘ t`.
pub fn is_k_copositive(phi: &LinearMapRep, k: usize, params: &SearchParams, seed: Seed) -> Result<KVerdict> {
    check_k(phi, k)?;
    k_block_min(&phi.compose_transpose(), k, params, seed)
}

/// Bisection for the smallest parameter at which a family becomes k-positive.
///
/// `family(λ)` must be k-positive for large `λ` and not for small `λ`. Each
/// step decides its midpoint with [`k_block_min`] under `seed.child(step)`.
pub fn k_positivity_threshold(
    family: impl Fn(f64) -> LinearMapRep,
    k: usize,
    mut lo: f64,
    mut hi: f64,
    steps: usize,
    params: &SearchParams,
    seed: Seed,
) -> Result<f64> {
    for step in 0..steps {
        let mid = 0.5 * (lo + hi);
        if k_block_min(&family(mid), k, params, seed.child(step as u64))?.is_violation() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `a ↦ λ Tr(a) I_d - a` on `B(C^d)`.
pub fn trace_minus_identity(d: usize, lambda: f64) -> LinearMapRep {
    LinearMapRep::from_fn(d, d, |a| {
        &ComplexMatrix::identity(d).scale(a.trace() * lambda) - a
    })
}

/// Choi's positive, non-decomposable map on `B(C^3)`:
/// `X ↦ diag(x11 + x22, x22 + x33, x33 + x11) + diag(X) - X` off the diagonal
/// negated.
pub fn choi_map() -> LinearMapRep {
    LinearMapRep::from_fn(3, 3, |x| {
        let mut y = -x;
        for i in 0..3 {
            let j = (i + 1) % 3;
            y[(i, i)] = x[(i, i)] + x[(j, j)];
        }
        y
    })
}

/// A block matrix `a ∈ M_k(B(C^m))` with `a ⪰ 0` and `[a_ji] ⪰ 0` on which
/// `[φ(a_ij)]` has a negative eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockWitness {
    pub k: usize,
    pub a: ComplexMatrix,
    pub min_eig: f64,
    pub eigvec: Vec<Complex64>,
}

impl Witness for BlockWitness {
    fn value(&self) -> f64 {
        self.min_eig
    }
}

impl BlockWitness {
    /// Re-evaluates `<v, [φ(a_ij)] v>`, or `None` if `a` is not doubly positive.
    pub fn reevaluate(&self, phi: &LinearMapRep) -> Option<f64> {
        let m = phi.m();
        if self.a.rows() != self.k * m || !doubly_positive(&self.a, self.k, m) {
            return None;
        }
        let img = phi.apply_blockwise(&self.a, self.k).ok()?;
        if self.eigvec.len() != img.rows() {
            return None;
        }
        Some(img.quadratic_form(&self.eigvec).re)
    }
}

pub(crate) fn doubly_positive(a: &ComplexMatrix, k: usize, m: usize) -> bool {
    let pt = match partial_transpose(a, k, m, Side::First) {
        Ok(p) => p,
        Err(_) => return false,
    };
    matches!(is_psd(a), Ok(true)) && matches!(is_psd(&pt), Ok(true))
}

/// Largest column count for the Wishart sampler.
const WISHART_MAX_COLS: usize = 200;

/// Draws `a ∈ M_k(B(C^m))` with both block orderings positive.
///
/// Sample 0 is the identity. Afterwards, with probability 1/2, a sum of at
/// most four products `p ⊗ q` of random states; otherwise a Wishart matrix
/// `G G*` whose column count grows with every rejected attempt until the
/// partial transpose is positive.
pub fn sample_doubly_positive(k: usize, m: usize, index: usize, rng: &mut SearchRng) -> ComplexMatrix {
    let d = k * m;
    if index == 0 {
        return ComplexMatrix::identity(d);
    }
    if rng.random_bool(0.5) {
        let terms = rng.random_range(1..=4);
        let mut a = ComplexMatrix::zeros(d, d);
        for _ in 0..terms {
            let p = ComplexMatrix::random_psd(k, rng.random_range(1..=k), rng);
            let q = ComplexMatrix::random_psd(m, rng.random_range(1..=m), rng);
            a += &kron(&p, &q);
        }
        return a.scale_real(1.0 / terms as f64);
    }
    let mut cols = 1;
    loop {
        let a = ComplexMatrix::random_psd(d, cols, rng);
        if doubly_positive(&a, k, m) {
            return a;
        }
        if cols >= WISHART_MAX_COLS {
            return mix_to_ppt(&a, k, m);
        }
        cols = (cols + d.max(1)).min(WISHART_MAX_COLS);
    }
}

/// `(a + c I) / Tr` with the smallest `c ≥ 0` making `a` and its partial
/// transpose on the first factor positive.
pub(crate) fn mix_to_ppt(a: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    let d = d1 * d2;
    let pt = partial_transpose(a, d1, d2, Side::First).expect("square block matrix");
    let lo = psd_min_eig(a).unwrap_or(0.0).min(psd_min_eig(&pt).unwrap_or(0.0));
    // A small relative margin keeps the result inside the PSD tolerance.
    let c = if lo < 0.0 { -lo * (1.0 + 1e-9) + 1e-15 } else { 0.0 };
    let mixed = a + &ComplexMatrix::identity(d).scale_real(c);
    let t = mixed.trace().re;
    mixed.hermitian_part().scale_real(1.0 / t)
}

/// Samples doubly positive block matrices and checks `[φ(a_ij)] ⪰ 0`.
pub fn sk_check(phi: &LinearMapRep, k: usize, samples: usize, exec: Exec, seed: Seed) -> Result<Verdict<BlockWitness>> {
    if k == 0 {
        return Err(Error::KOutOfRange { k, max: usize::MAX });
    }
    phi.require_hermiticity_preserving()?;
    let m = phi.m();
    let samples = samples.max(1);
    let results = map_indexed(samples, exec, |s| -> Result<BlockWitness> {
        let mut rng = seed.child(s as u64).rng();
        let a = sample_doubly_positive(k, m, s, &mut rng);
        let img = phi.apply_blockwise(&a, k)?.hermitian_part();
        let eig = herm_eig(&img)?;
        let eigvec = eig.eigenvector(0);
        let min_eig = img.quadratic_form(&eigvec).re;
        Ok(BlockWitness { k, a, min_eig, eigvec })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let best = argmin_by_value(&results, |w| w.min_eig).expect("at least one sample");
    let w = &results[best];
    let img_norm = phi.apply_blockwise(&w.a, k)?.frobenius_norm();
    if w.min_eig < -1e-9 * img_norm.max(1.0) {
        Ok(Verdict::Violation(w.clone()))
    } else {
        Ok(Verdict::Evidence(Evidence {
            min_value: w.min_eig,
            restarts: 0,
            samples,
            iterations: 0,
            seed,
        }))
    }
}

/// `φ = φ₁ + φ₂` with `φ₁` k-positive and `φ₂` k-copositive, each supported
/// by search evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompCertificate {
    pub k: usize,
    pub phi: LinearMapRep,
    pub phi1: LinearMapRep,
    pub phi2: LinearMapRep,
    pub residual: f64,
    pub positive_evidence: Evidence,
    pub copositive_evidence: Evidence,
}

pub fn dk_compose(
    phi1: &LinearMapRep,
    phi2: &LinearMapRep,
    k: usize,
    params: &SearchParams,
    seed: Seed,
) -> Result<DecompCertificate> {
    let phi = phi1.add(phi2)?;
    let pos = is_k_positive(phi1, k, params, seed.labeled("positive"))?;
    let positive_evidence = match pos.verdict {
        Verdict::Violation(w) => return Err(Error::ComponentNotKPositive { k, value: w.value }),
        Verdict::Evidence(e) => e,
    };
    let copos = is_k_copositive(phi2, k, params, seed.labeled("copositive"))?;
    let copositive_evidence = match copos.verdict {
        Verdict::Violation(w) => return Err(Error::ComponentNotKCopositive { k, value: w.value }),
        Verdict::Evidence(e) => e,
    };
    let residual = (phi.choi() - &(phi1.choi() + phi2.choi())).frobenius_norm();
    Ok(DecompCertificate {
        k,
        phi,
        phi1: phi1.clone(),
        phi2: phi2.clone(),
        residual,
        positive_evidence,
        copositive_evidence,
    })
}

/// A state `w` on `C^m ⊗ C^n` with positive partial transpose and `Tr(w h) < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptWitness {
    pub m: usize,
    pub n: usize,
    pub w: ComplexMatrix,
    pub value: f64,
}

impl Witness for PptWitness {
    fn value(&self) -> f64 {
        self.value
    }
}

impl PptWitness {
    /// `Tr(w h)`, or `None` if `w` is not a PPT state.
    pub fn reevaluate(&self, h: &ComplexMatrix) -> Option<f64> {
        if h.shape() != self.w.shape() || self.w.rows() != self.m * self.n {
            return None;
        }
        if (self.w.trace().re - 1.0).abs() > 1e-9 || !doubly_positive(&self.w, self.m, self.n) {
            return None;
        }
        Some((&self.w * h).trace().re)
    }
}

/// Euclidean projection of a real vector onto the probability simplex.
fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Nearest density matrix in Frobenius norm.
fn project_states(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(&a.hermitian_part())?;
    let p = simplex_projection(&eig.eigenvalues);
    let v = &eig.eigenvectors;
    let n = a.rows();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let mut s = ZERO;
        for (t, &pt) in p.iter().enumerate() {
            if pt > 0.0 {
                s += v[(i, t)] * v[(j, t)].conj() * pt;
            }
        }
        s
    }))
}

const PPT_PROJECTION_ROUNDS: usize = 5;
const MIN_STEP_RATIO: f64 = 1e-6;
const MAX_STEP: f64 = 10.0;
/// Relative progress per unit step below which the step is halved.
const STALL_TOL: f64 = 1e-2;

/// Approximate projection onto PPT states followed by exact feasibility repair.
fn project_ppt(a: &ComplexMatrix, m: usize, n: usize) -> Result<ComplexMatrix> {
    let mut w = a.clone();
    for _ in 0..PPT_PROJECTION_ROUNDS {
        w = project_states(&w)?;
        let pt = partial_transpose(&w, m, n, Side::First)?;
        w = partial_transpose(&project_states(&pt)?, m, n, Side::First)?;
    }
    Ok(mix_to_ppt(&w, m, n))
}

struct PptRun {
    w: ComplexMatrix,
    value: f64,
    iterations: usize,
}

fn ppt_descent(h: &ComplexMatrix, m: usize, n: usize, params: &WitnessParams, start: ComplexMatrix) -> Result<PptRun> {
    let objective = |w: &ComplexMatrix| (w * h).trace().re;
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let direction = h.scale_real(1.0 / scale);
    let mut w = project_ppt(&start, m, n)?;
    let mut value = objective(&w);
    let mut step = params.initial_step;
    let mut iterations = 0;
    while iterations < params.max_iters && step > MIN_STEP_RATIO * params.initial_step {
        iterations += 1;
        let trial = project_ppt(&(&w - &direction.scale_real(step)), m, n)?;
        let v = objective(&trial);
        let gain = value - v;
        if gain > 0.0 {
            w = trial;
            value = v;
        }
        // Negligible progress counts as a failed step.
        if gain <= STALL_TOL * scale * step {
            step *= 0.5;
        } else {
            step = (2.0 * step).min(MAX_STEP);
        }
    }
    Ok(PptRun { w, value, iterations })
}

/// Searches for a PPT state `w` with `Tr(w h) < 0`.
///
/// Projected gradient descent on the linear objective `Tr(w h)` over states
/// with positive partial transpose, moving along `h / ||h||_F` so the step
/// length is measured in trace-class units independent of the scale of `h`. Each projection alternates between the
/// two positivity constraints and then mixes in the identity just enough to
/// make both hold exactly. Restart 0 starts from the maximally mixed state,
/// the others from random states.
pub fn decomposability_witness(
    h: &ComplexMatrix,
    m: usize,
    n: usize,
    params: &WitnessParams,
    seed: Seed,
) -> Result<Verdict<PptWitness>> {
    let d = m * n;
    if h.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} for m = {m}, n = {n}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermitian_defect();
    if defect > crate::choi::HP_TOL * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let h = h.hermitian_part();
    let restarts = params.restarts.max(1);
    // Transposing either factor of a state with one-dimensional factor
    // preserves positivity, so the PPT states are all states and the minimum
    // is the smallest eigenvalue.
    let runs = if m.min(n) == 1 {
        let eig = herm_eig(&h)?;
        let v = ComplexMatrix::column(&eig.eigenvector(0));
        let w = &v * &v.adjoint();
        vec![PptRun {
            value: (&w * &h).trace().re,
            w,
            iterations: 0,
        }]
    } else {
        map_indexed(restarts, params.exec, |r| {
            let start = if r == 0 {
                ComplexMatrix::identity(d).scale_real(1.0 / d as f64)
            } else {
                ComplexMatrix::random_psd(d, d, &mut seed.child(r as u64).rng())
            };
            ppt_descent(&h, m, n, params, start)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
    };
    let best = argmin_by_value(&runs, |r| r.value).expect("at least one restart");
    let run = &runs[best];
    if run.value < psd_threshold(&h) {
        Ok(Verdict::Violation(PptWitness {
            m,
            n,
            w: run.w.clone(),
            value: run.value,
        }))
    } else {
        Ok(Verdict::Evidence(Evidence {
            min_value: run.value,
            restarts: runs.len(),
            samples: 0,
            iterations: runs.iter().map(|r| r.iterations).sum(),
            seed,
        }))
    }
}

/// A compression `a ↦ W* φ(a) W` to a rank-`≤k` corner that is not decomposable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionWitness {
    pub k: usize,
    pub isometry: ComplexMatrix,
    pub ppt: PptWitness,
}

impl Witness for CompressionWitness {
    fn value(&self) -> f64 {
        self.ppt.value
    }
}

impl CompressionWitness {
    pub fn reevaluate(&self, phi: &LinearMapRep) -> Option<f64> {
        let w = &self.isometry;
        if w.rows() != phi.n() || w.cols() > self.k {
            return None;
        }
        if !(&w.adjoint() * w).approx_eq(&ComplexMatrix::identity(w.cols()), 1e-9) {
            return None;
        }
        self.ppt.reevaluate(phi.compress(w).ok()?.choi())
    }
}

/// Samples Haar projections of rank `min(k, n)` and runs
/// [`decomposability_witness`] on each compressed map.
pub fn pk_check(
    phi: &LinearMapRep,
    k: usize,
    projections: usize,
    params: &WitnessParams,
    seed: Seed,
) -> Result<Verdict<CompressionWitness>> {
    if k == 0 {
        return Err(Error::KOutOfRange { k, max: phi.n() });
    }
    phi.require_hermiticity_preserving()?;
    let (m, n) = (phi.m(), phi.n());
    let r = k.min(n);
    let projections = projections.max(1);
    let inner = WitnessParams {
        exec: Exec::Sequential,
        ..*params
    };
    let results = map_indexed(projections, params.exec, |s| -> Result<(ComplexMatrix, Verdict<PptWitness>)> {
        let child = seed.child(s as u64);
        let w = if r == n {
            ComplexMatrix::identity(n)
        } else {
            haar_isometry(n, r, &mut child.rng())?
        };
        let compressed = phi.compress(&w)?;
        let v = decomposability_witness(compressed.choi(), m, r, &inner, child.labeled("ppt"))?;
        Ok((w, v))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let best = argmin_by_value(&results, |(_, v)| v.value()).expect("at least one projection");
    let (w, verdict) = &results[best];
    match verdict {
        Verdict::Violation(ppt) => Ok(Verdict::Violation(CompressionWitness {
            k,
            isometry: w.clone(),
            ppt: ppt.clone(),
        })),
        Verdict::Evidence(e) => Ok(Verdict::Evidence(Evidence {
            min_value: e.min_value,
            restarts: params.restarts,
            samples: projections,
            iterations: results
                .iter()
                .filter_map(|(_, v)| v.evidence().map(|e| e.iterations))
                .sum(),
            seed,
        })),
    }
}

/// Random map `a ↦ Σ K_r a K_r*` with `rank` Gaussian conjugations.
pub fn random_cp_map(m: usize, n: usize, rank: usize, rng: &mut SearchRng) -> LinearMapRep {
    let ops: Vec<ComplexMatrix> = (0..rank)
        .map(|_| ComplexMatrix::random_gaussian(n, m, rng))
        .collect();
    let weights = vec![1.0 / (rank * m * n) as f64; rank];
    LinearMapRep::from_conjugations(m, n, &ops, &weights).expect("shapes agree")
}

/// Random completely copositive map `a ↦ Σ K_r a^t K_r*`.
pub fn random_cocp_map(m: usize, n: usize, rank: usize, rng: &mut SearchRng) -> LinearMapRep {
    random_cp_map(m, n, rank, rng).compose_transpose()
}
