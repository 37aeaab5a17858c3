//! Bipartite natural cones.
//!
//! For faithful states `ρ_A`, `ρ_B` the GNS space of `B(K_A) ⊗ B(K_B)` is
//! `B(K_A ⊗ K_B)` with `Ω = R^{1/2}`, `R = ρ_A ⊗ ρ_B`, and
//! `Δ^β ξ = R^β ξ R^{-β}`. The natural cone is
//! `P = {R^{1/4} a R^{1/4} : a ⪰ 0}`. Block matrices `[a_ij] = Σ a_ij ⊗ F_ij`
//! use the matrix units `F_ij = |f_i><f_j|` of the eigenbasis of `ρ_B`, and
//! `Ũ = I ⊗ U_B` swaps them, so `ŨP = P^τ` consists of the vectors built
//! from `[a_ji]`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::choi::LinearMapRep;
use crate::error::{Error, Result};
use crate::kpos::{doubly_positive, sample_doubly_positive};
use crate::matkernel::{herm_eig, inner, kron, partial_transpose, psd_min_eig, ComplexMatrix, Side};
use crate::modular::{gns_context, random_positive, GnsContext, Superoperator};
use crate::par::{argmin_by_value, map_indexed, Exec};
use crate::rng::{SearchRng, Seed};
use crate::verdict::{Evidence, Verdict, Witness};

/// Relative tolerance of cone membership tests.
pub const CONE_TOL: f64 = 1e-9;
/// Relative tolerance of the inequalities checked on sampled cone vectors.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Largest `dim K_A · dim K_B` accepted by the superoperator-level checks.
pub const MAX_COMPOSITE_DIM: usize = 16;

/// Tensor GNS data of `(B(K_A) ⊗ B(K_B), ω_A ⊗ ω_B)`.
#[derive(Clone, Debug)]
pub struct BipartiteConeContext {
    ctx_a: GnsContext,
    ctx_b: GnsContext,
    /// `I ⊗ X_B`: columns are `e_r ⊗ f_i`.
    lift_b: ComplexMatrix,
    /// `X_A ⊗ X_B`.
    product_basis: ComplexMatrix,
    omega: ComplexMatrix,
    r_quarter: ComplexMatrix,
    r_inv_quarter: ComplexMatrix,
}

pub fn bipartite_context(rho_a: &ComplexMatrix, rho_b: &ComplexMatrix) -> Result<BipartiteConeContext> {
    let ctx_a = gns_context(rho_a)?;
    let ctx_b = gns_context(rho_b)?;
    let da = ctx_a.dim();
    let lift_b = kron(&ComplexMatrix::identity(da), ctx_b.eigenvectors());
    let product_basis = kron(ctx_a.eigenvectors(), ctx_b.eigenvectors());
    let omega = kron(ctx_a.omega(), ctx_b.omega());
    let r_quarter = kron(&ctx_a.rho_power(0.25), &ctx_b.rho_power(0.25));
    let r_inv_quarter = kron(&ctx_a.rho_power(-0.25), &ctx_b.rho_power(-0.25));
    Ok(BipartiteConeContext {
        ctx_a,
        ctx_b,
        lift_b,
        product_basis,
        omega,
        r_quarter,
        r_inv_quarter,
    })
}

/// Context with the tracial state on the second factor.
pub fn tracial_b_context(rho_a: &ComplexMatrix, db: usize) -> Result<BipartiteConeContext> {
    bipartite_context(rho_a, &ComplexMatrix::identity(db).scale_real(1.0 / db as f64))
}

/// Spectral projection of `U_A` or `U_B`: `P = (I + U)/2`, `Q = (I - U)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    P,
    Q,
}

impl Spin {
    fn sign(self) -> f64 {
        match self {
            Spin::P => 1.0,
            Spin::Q => -1.0,
        }
    }
}

impl BipartiteConeContext {
    pub fn ctx_a(&self) -> &GnsContext {
        &self.ctx_a
    }

    pub fn ctx_b(&self) -> &GnsContext {
        &self.ctx_b
    }

    pub fn dim_a(&self) -> usize {
        self.ctx_a.dim()
    }

    pub fn dim_b(&self) -> usize {
        self.ctx_b.dim()
    }

    pub fn dim(&self) -> usize {
        self.dim_a() * self.dim_b()
    }

    /// `Ω = Ω_A ⊗ Ω_B`.
    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    fn check_vector(&self, xi: &ComplexMatrix) -> Result<()> {
        let d = self.dim();
        if xi.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "vector {}x{} in the GNS space of B(C^{}) ⊗ B(C^{})",
                xi.rows(),
                xi.cols(),
                self.dim_a(),
                self.dim_b()
            )));
        }
        Ok(())
    }

    /// `Δ^β ξ`.
    pub fn delta_power_apply(&self, beta: f64, xi: &ComplexMatrix) -> ComplexMatrix {
        let l = kron(&self.ctx_a.rho_power(beta), &self.ctx_b.rho_power(beta));
        let r = kron(&self.ctx_a.rho_power(-beta), &self.ctx_b.rho_power(-beta));
        &(&l * xi) * &r
    }

    /// `Δ^{1/4} a Ω = R^{1/4} a R^{1/4}`.
    pub fn element(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.r_quarter * a) * &self.r_quarter
    }

    /// Inverse of [`Self::element`].
    pub fn reconstruct(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        &(&self.r_inv_quarter * xi) * &self.r_inv_quarter
    }

    /// Block `a_ij ∈ B(K_A)` of `a = Σ a_ij ⊗ F_ij`.
    pub fn b_block(&self, a: &ComplexMatrix, i: usize, j: usize) -> ComplexMatrix {
        let (da, db) = (self.dim_a(), self.dim_b());
        let rot = &(&self.lift_b.adjoint() * a) * &self.lift_b;
        ComplexMatrix::from_fn(da, da, |r, s| rot[(r * db + i, s * db + j)])
    }

    /// `Σ blocks[i][j] ⊗ F_ij`.
    pub fn from_b_blocks(&self, blocks: &[Vec<ComplexMatrix>]) -> ComplexMatrix {
        let (da, db) = (self.dim_a(), self.dim_b());
        let rot = ComplexMatrix::from_fn(da * db, da * db, |r, c| {
            blocks[r % db][c % db][(r / db, c / db)]
        });
        &(&self.lift_b * &rot) * &self.lift_b.adjoint()
    }

    /// `[a_ij] ↦ [a_ji]`.
    pub fn block_transpose(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (self.dim_a(), self.dim_b());
        let rot = &(&self.lift_b.adjoint() * a) * &self.lift_b;
        let pt = partial_transpose(&rot, da, db, Side::Second).expect("composite shape");
        &(&self.lift_b * &pt) * &self.lift_b.adjoint()
    }

    /// `Ũ = I ⊗ U_B`.
    pub fn utilde(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        self.block_transpose(xi)
    }

    /// `U_A ⊗ I`.
    pub fn ua_local(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (self.dim_a(), self.dim_b());
        let lift_a = kron(self.ctx_a.eigenvectors(), &ComplexMatrix::identity(db));
        let rot = &(&lift_a.adjoint() * xi) * &lift_a;
        let pt = partial_transpose(&rot, da, db, Side::First).expect("composite shape");
        &(&lift_a * &pt) * &lift_a.adjoint()
    }

    /// `U_A ⊗ U_B`: transposition in the product eigenbasis.
    pub fn ua_ub(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        crate::modular::transpose_in_basis(xi, &self.product_basis)
    }

    /// `P = (I + Ũ)/2`.
    pub fn p(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        (xi + &self.utilde(xi)).scale_real(0.5)
    }

    /// `Q = (I - Ũ)/2`.
    pub fn q(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        (xi - &self.utilde(xi)).scale_real(0.5)
    }

    /// `P^tot = (I + U_A ⊗ U_B)/2`.
    pub fn ptot(&self, xi: &ComplexMatrix) -> ComplexMatrix {
        (xi + &self.ua_ub(xi)).scale_real(0.5)
    }

    /// `(S_A ⊗ S_B) ξ` for spectral projections of `U_A` and `U_B`.
    pub fn local_projection(&self, sa: Spin, sb: Spin, xi: &ComplexMatrix) -> ComplexMatrix {
        let mut out = xi.clone();
        out += &self.ua_local(xi).scale_real(sa.sign());
        out += &self.utilde(xi).scale_real(sb.sign());
        out += &self.ua_ub(xi).scale_real(sa.sign() * sb.sign());
        out.scale_real(0.25)
    }

    fn superoperator(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Superoperator {
        Superoperator::from_fn(self.dim(), false, f)
    }

    /// Checks the identifications `Δ = Δ_A ⊗ Δ_B`, `J_m = J_A ⊗ J_B` and the
    /// algebra of `P`, `Q`, `Ũ` at the superoperator level.
    pub fn check_structure(&self) -> Result<StructureDefects> {
        if self.dim() > MAX_COMPOSITE_DIM {
            return Err(Error::DimensionMismatch(format!(
                "composite dimension {} above {MAX_COMPOSITE_DIM}",
                self.dim()
            )));
        }
        let (a, b) = (&self.ctx_a, &self.ctx_b);
        let delta = self.superoperator(|e| self.delta_power_apply(1.0, e));
        let jm = Superoperator::from_fn(self.dim(), true, |e| e.adjoint());
        let ut = self.superoperator(|e| self.utilde(e));
        let p = self.superoperator(|e| self.p(e));
        let q = self.superoperator(|e| self.q(e));
        let id = Superoperator::identity(self.dim());
        let ua_ub = self.superoperator(|e| self.ua_ub(e));
        Ok(StructureDefects {
            delta_tensor: delta.distance(&a.delta().tensor(b.delta())?),
            jm_tensor: jm.distance(&a.jm().tensor(b.jm())?),
            utilde_tensor: ut.distance(&Superoperator::identity(a.dim()).tensor(b.u())?),
            ua_ub_tensor: ua_ub.distance(&a.u().tensor(b.u())?),
            utilde_involution: ut.compose(&ut).distance(&id),
            p_plus_q: p.add(&q)?.distance(&id),
            pq_orthogonal: p.compose(&q).matrix().frobenius_norm(),
            p_idempotent: p.compose(&p).distance(&p),
            q_idempotent: q.compose(&q).distance(&q),
        })
    }
}

/// Defects of the tensor identifications and of the `P`/`Q` algebra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureDefects {
    pub delta_tensor: f64,
    pub jm_tensor: f64,
    pub utilde_tensor: f64,
    pub ua_ub_tensor: f64,
    pub utilde_involution: f64,
    pub p_plus_q: f64,
    pub pq_orthogonal: f64,
    pub p_idempotent: f64,
    pub q_idempotent: f64,
}

impl StructureDefects {
    pub fn max(&self) -> f64 {
        [
            self.delta_tensor,
            self.jm_tensor,
            self.utilde_tensor,
            self.ua_ub_tensor,
            self.utilde_involution,
            self.p_plus_q,
            self.pq_orthogonal,
            self.p_idempotent,
            self.q_idempotent,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Membership of a vector in `P`, `P^τ` and their intersection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeMembership {
    pub in_p: bool,
    /// `[a_ij]` with `ξ = Δ^{1/4}[a_ij]Ω`.
    pub blocks: ComplexMatrix,
    pub p_min_eig: f64,
    pub p_hermitian_defect: f64,
    pub in_ptau: bool,
    /// `[a_ji]`, reconstructed from `Ũξ`.
    pub transposed_blocks: ComplexMatrix,
    pub ptau_min_eig: f64,
    /// Distance between `[a_ji]` from `Ũξ` and the block transpose of `[a_ij]`.
    pub route_defect: f64,
    pub in_intersection: bool,
    /// A decomposition into `P + P^τ` is exhibited: `ξ` lies in one of the cones.
    pub in_hull_evidence: bool,
    pub hull_note: String,
}

fn psd_report(a: &ComplexMatrix) -> Result<(bool, f64, f64)> {
    let scale = a.frobenius_norm().max(1.0);
    let defect = a.hermitian_defect();
    let lo = psd_min_eig(&a.hermitian_part())?;
    Ok((defect <= CONE_TOL * scale && lo >= -CONE_TOL * scale, lo, defect))
}

pub fn cone_member(ctx: &BipartiteConeContext, xi: &ComplexMatrix) -> Result<ConeMembership> {
    ctx.check_vector(xi)?;
    let blocks = ctx.reconstruct(xi);
    let (in_p, p_min_eig, p_hermitian_defect) = psd_report(&blocks)?;
    let transposed_blocks = ctx.reconstruct(&ctx.utilde(xi));
    let route_defect = (&transposed_blocks - &ctx.block_transpose(&blocks)).frobenius_norm();
    let (in_ptau, ptau_min_eig, _) = psd_report(&transposed_blocks)?;
    let in_hull_evidence = in_p || in_ptau;
    let hull_note = match (in_p, in_ptau) {
        (true, true) => "member of P ∩ P^τ",
        (true, false) => "member of P",
        (false, true) => "member of P^τ",
        (false, false) => "no decomposition exhibited; use the dual pairing test",
    }
    .to_string();
    Ok(ConeMembership {
        in_p,
        blocks,
        p_min_eig,
        p_hermitian_defect,
        in_ptau,
        transposed_blocks,
        ptau_min_eig,
        route_defect,
        in_intersection: in_p && in_ptau,
        in_hull_evidence,
        hull_note,
    })
}

/// Random `[a_ij] ⪰ 0` of random rank with unit trace.
pub fn sample_psd_block(ctx: &BipartiteConeContext, rng: &mut SearchRng) -> ComplexMatrix {
    random_positive(ctx.dim(), rng)
}

/// Random `[a_ij]` with `[a_ij] ⪰ 0` and `[a_ji] ⪰ 0`. Index 0 gives the identity.
pub fn sample_intersection_block(ctx: &BipartiteConeContext, index: usize, rng: &mut SearchRng) -> ComplexMatrix {
    sample_doubly_positive(ctx.dim_a(), ctx.dim_b(), index, rng)
}

/// Unit vector of `P`: even indices give extreme rays (rank-one blocks),
/// odd indices interior points.
pub fn sample_p_vector(ctx: &BipartiteConeContext, index: usize, rng: &mut SearchRng) -> ComplexMatrix {
    let d = ctx.dim();
    let rank = if index.is_multiple_of(2) { 1 } else { rng.random_range(1..=d) };
    let xi = ctx.element(&ComplexMatrix::random_psd(d, rank, rng));
    let n = xi.frobenius_norm();
    xi.scale_real(1.0 / n)
}

/// Outcome of [`transposed_cone_consistency`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeConsistencyReport {
    pub samples: usize,
    /// Largest `||ŨΔ^{1/4}[a_ij]Ω - Δ^{1/4}[a_ji]Ω||`.
    pub transpose_defect: f64,
    /// Largest distance between `Ũ(x j(x)Ω)` and `x' j(x')Ω` with `x'` the
    /// image of `x` under `I ⊗ α`.
    pub commutant_generator_defect: f64,
    /// Smallest normalized `Re(Ũξ, x' j(x')Ω)`.
    pub commutant_min_pairing: f64,
    /// Smallest normalized `Re(ζ, η)` with `ζ ∈ P ∩ P^τ`, `η ∈ P ∪ P^τ`.
    pub duality_min_pairing: f64,
}

impl ConeConsistencyReport {
    pub fn passed(&self, defect_tol: f64, pairing_tol: f64) -> bool {
        self.transpose_defect <= defect_tol
            && self.commutant_generator_defect <= defect_tol
            && self.commutant_min_pairing >= -pairing_tol
            && self.duality_min_pairing >= -pairing_tol
    }
}

fn normalized_pairing(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let s = (a.frobenius_norm() * b.frobenius_norm()).max(f64::MIN_POSITIVE);
    inner(a.as_slice(), b.as_slice()) / s
}

/// `(Σ_k a_k ⊗ b_k)` as an operator on `K_A ⊗ K_B`.
fn product_sum(pairs: &[(ComplexMatrix, ComplexMatrix)]) -> ComplexMatrix {
    let mut x = kron(&pairs[0].0, &pairs[0].1);
    for (a, b) in &pairs[1..] {
        x += &kron(a, b);
    }
    x
}

pub fn transposed_cone_consistency(ctx: &BipartiteConeContext, samples: usize, seed: Seed) -> ConeConsistencyReport {
    let (da, db) = (ctx.dim_a(), ctx.dim_b());
    let mut report = ConeConsistencyReport {
        samples,
        transpose_defect: 0.0,
        commutant_generator_defect: 0.0,
        commutant_min_pairing: f64::INFINITY,
        duality_min_pairing: f64::INFINITY,
    };
    for s in 0..samples {
        let mut rng = seed.child(s as u64).rng();
        let a = sample_psd_block(ctx, &mut rng);
        let xi = ctx.element(&a);
        let lhs = ctx.utilde(&xi);
        let rhs = ctx.element(&ctx.block_transpose(&a));
        report.transpose_defect = report.transpose_defect.max((&lhs - &rhs).frobenius_norm());

        // Generators x j_m(x) Ω of P and their images under I ⊗ α.
        let terms = rng.random_range(1..=3);
        let pairs: Vec<(ComplexMatrix, ComplexMatrix)> = (0..terms)
            .map(|_| {
                (
                    ComplexMatrix::random_gaussian(da, da, &mut rng),
                    ComplexMatrix::random_gaussian(db, db, &mut rng),
                )
            })
            .collect();
        let x = product_sum(&pairs);
        let generator = &(&x * &ctx.omega) * &x.adjoint();
        // x' acts as ξ ↦ Σ (a_k ⊗ I) ξ (I ⊗ b_k^t).
        let x_prime = |v: &ComplexMatrix| {
            let mut out = ComplexMatrix::zeros(da * db, da * db);
            for (ak, bk) in &pairs {
                let l = kron(ak, &ComplexMatrix::identity(db));
                let r = kron(&ComplexMatrix::identity(da), &ctx.ctx_b.transpose(bk));
                out += &(&(&l * v) * &r);
            }
            out
        };
        let commutant_generator = x_prime(&x_prime(&ctx.omega).adjoint());
        let d = (&ctx.utilde(&generator) - &commutant_generator).frobenius_norm();
        let scale = generator.frobenius_norm().max(1.0);
        report.commutant_generator_defect = report.commutant_generator_defect.max(d / scale);
        let pairing = normalized_pairing(&lhs, &commutant_generator).re;
        report.commutant_min_pairing = report.commutant_min_pairing.min(pairing);

        let zeta = ctx.element(&sample_intersection_block(ctx, s, &mut rng));
        let eta = sample_p_vector(ctx, s, &mut rng);
        for g in [eta.clone(), ctx.utilde(&eta)] {
            let p = normalized_pairing(&zeta, &g).re;
            report.duality_min_pairing = report.duality_min_pairing.min(p);
        }
    }
    report
}

/// `(Pξ, Qξ)`.
pub fn pq_split(ctx: &BipartiteConeContext, xi: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    ctx.check_vector(xi)?;
    Ok((ctx.p(xi), ctx.q(xi)))
}

fn require_two_level_b(ctx: &BipartiteConeContext) -> Result<()> {
    if ctx.dim_b() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "second factor has dimension {}, expected 2",
            ctx.dim_b()
        )));
    }
    Ok(())
}

/// `½ Δ^{1/4} [[0, a_12 - a_21], [a_21 - a_12, 0]] Ω` for a two-level second factor.
pub fn q_closed_form(ctx: &BipartiteConeContext, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_two_level_b(ctx)?;
    ctx.check_vector(a)?;
    let d = &ctx.b_block(a, 0, 1) - &ctx.b_block(a, 1, 0);
    let zero = ComplexMatrix::zeros(ctx.dim_a(), ctx.dim_a());
    let blocks = vec![vec![zero.clone(), d.scale_real(0.5)], vec![d.scale_real(-0.5), zero]];
    Ok(ctx.element(&ctx.from_b_blocks(&blocks)))
}

/// Worst slack and violation count of one sampled inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionStat {
    pub name: String,
    pub min_slack: f64,
    pub violations: usize,
}

/// Sampled inequalities characterizing `P ∩ ŨP`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop64Report {
    pub eta_samples: usize,
    pub conditions: Vec<ConditionStat>,
}

impl Prop64Report {
    pub fn violations(&self) -> usize {
        self.conditions.iter().map(|c| c.violations).sum()
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionStat> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Condition names in report order.
pub const PROP64_CONDITIONS: [&str; 7] = [
    "b_abs_q_le_p",
    "c_nonnegative",
    "c_twice_q_le_total",
    "d_local_projections",
    "e_local_projections",
    "norm_q_le_norm_p",
    "tot_twice_qq_le_ptot",
];

/// Evaluates the inequalities on `ξ` without checking membership first.
pub fn prop64_evaluate(ctx: &BipartiteConeContext, xi: &ComplexMatrix, eta_samples: usize, seed: Seed) -> Result<Prop64Report> {
    ctx.check_vector(xi)?;
    let nrm = xi.frobenius_norm().max(f64::MIN_POSITIVE);
    let xi = xi.scale_real(1.0 / nrm);
    let p = ctx.p(&xi);
    let q = ctx.q(&xi);
    let pp = ctx.local_projection(Spin::P, Spin::P, &xi);
    let qp = ctx.local_projection(Spin::Q, Spin::P, &xi);
    let pq = ctx.local_projection(Spin::P, Spin::Q, &xi);
    let qq = ctx.local_projection(Spin::Q, Spin::Q, &xi);
    let ptot = ctx.ptot(&xi);

    let mut stats: Vec<ConditionStat> = PROP64_CONDITIONS
        .iter()
        .map(|n| ConditionStat {
            name: n.to_string(),
            min_slack: f64::INFINITY,
            violations: 0,
        })
        .collect();
    let mut record = |idx: usize, slack: f64| {
        let s = &mut stats[idx];
        s.min_slack = s.min_slack.min(slack);
        if slack < -INEQUALITY_TOL {
            s.violations += 1;
        }
    };
    record(5, p.frobenius_norm() - q.frobenius_norm());
    for s in 0..eta_samples {
        let eta = sample_p_vector(ctx, s, &mut seed.child(s as u64).rng());
        let ip = |v: &ComplexMatrix| inner(eta.as_slice(), v.as_slice());
        let (e_p, e_q, e_xi) = (ip(&p), ip(&q), ip(&xi));
        record(0, e_p.re - e_q.norm());
        record(1, e_xi.re);
        record(2, e_xi.re - 2.0 * e_q.re);
        let (e_pp, e_qp, e_pq, e_qq) = (ip(&pp).re, ip(&qp).re, ip(&pq).re, ip(&qq).re);
        record(3, (e_pp + e_qp) - (e_pq + e_qq));
        record(4, (e_pp - e_qp) - (-e_pq + e_qq));
        record(6, ip(&ptot).re - 2.0 * e_qq);
    }
    Ok(Prop64Report {
        eta_samples,
        conditions: stats,
    })
}

/// Like [`prop64_evaluate`], but requires `ξ ∈ P ∩ P^τ`.
pub fn prop64_check(ctx: &BipartiteConeContext, xi: &ComplexMatrix, eta_samples: usize, seed: Seed) -> Result<Prop64Report> {
    if !cone_member(ctx, xi)?.in_intersection {
        return Err(Error::NotInIntersection);
    }
    prop64_evaluate(ctx, xi, eta_samples, seed)
}

/// The three equivalent conditions on `ξ ∈ P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop65Flags {
    pub q_in_p: bool,
    pub q_zero: bool,
    pub fixed: bool,
    /// Smallest eigenvalue of the blocks reconstructed from `Qξ`.
    pub q_min_eig: f64,
    pub q_norm: f64,
}

impl Prop65Flags {
    pub fn agree(&self) -> bool {
        self.q_in_p == self.q_zero && self.q_zero == self.fixed
    }
}

fn require_in_p(ctx: &BipartiteConeContext, xi: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = cone_member(ctx, xi)?;
    if !m.in_p {
        return Err(Error::NotInP(m.p_min_eig.min(-m.p_hermitian_defect)));
    }
    Ok(m.blocks)
}

pub fn prop65_check(ctx: &BipartiteConeContext, xi: &ComplexMatrix) -> Result<Prop65Flags> {
    require_in_p(ctx, xi)?;
    let q = ctx.q(xi);
    let scale = xi.frobenius_norm().max(1.0);
    let m = cone_member(ctx, &q)?;
    let q_norm = q.frobenius_norm();
    Ok(Prop65Flags {
        q_in_p: m.in_p,
        q_zero: q_norm <= CONE_TOL * scale,
        fixed: (&ctx.utilde(xi) - xi).frobenius_norm() <= 2.0 * CONE_TOL * scale,
        q_min_eig: m.p_min_eig,
        q_norm,
    })
}

/// `Qξ = Ṽ ξ_b` with `ξ_b ∈ P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QPolar {
    /// `h` with `(a_12 - a_12*)/2 = ih`.
    pub h: ComplexMatrix,
    /// Partial isometry `v` with `ih = v|h|`.
    pub v: ComplexMatrix,
    /// `Ṽ = Δ^{1/4} V Δ^{-1/4}` acts on vectors by left multiplication with this matrix.
    pub v_tilde_left: ComplexMatrix,
    pub xi_b: ComplexMatrix,
    /// `||Qξ - Ṽ ξ_b||`.
    pub reconstruction_defect: f64,
    pub xi_b_in_p: bool,
    /// `h = 0`: both outputs are zero by convention.
    pub degenerate: bool,
}

/// Eigenvalues of `h` below this (relative to `||h||`) count as zero.
pub const POLAR_ZERO_TOL: f64 = 1e-12;

pub fn q_polar(ctx: &BipartiteConeContext, xi: &ComplexMatrix) -> Result<QPolar> {
    require_two_level_b(ctx)?;
    let a = require_in_p(ctx, xi)?;
    let da = ctx.dim_a();
    let a12 = ctx.b_block(&a, 0, 1);
    let b = (&a12 - &a12.adjoint()).scale_real(0.5);
    let h = b.scale(Complex64::new(0.0, -1.0)).hermitian_part();
    let eig = herm_eig(&h)?;
    let cut = POLAR_ZERO_TOL * h.frobenius_norm().max(1.0);
    let degenerate = eig.eigenvalues.iter().all(|l| l.abs() <= cut);
    let sign = |l: f64| if l > cut { 1.0 } else if l < -cut { -1.0 } else { 0.0 };
    let v = eig.map_spectrum(sign).scale(Complex64::new(0.0, 1.0));
    let abs_h = eig.map_spectrum(|l| if l.abs() > cut { l.abs() } else { 0.0 });
    let zero = ComplexMatrix::zeros(da, da);
    let big_v = ctx.from_b_blocks(&[vec![zero.clone(), v.clone()], vec![-&v, zero.clone()]]);
    let abs_b = ctx.from_b_blocks(&[vec![abs_h.clone(), zero.clone()], vec![zero, abs_h]]);
    let v_tilde_left = &(&ctx.r_quarter * &big_v) * &ctx.r_inv_quarter;
    let xi_b = ctx.element(&abs_b);
    let q = ctx.q(xi);
    let reconstruction_defect = (&q - &(&v_tilde_left * &xi_b)).frobenius_norm();
    let xi_b_in_p = cone_member(ctx, &xi_b)?.in_p;
    Ok(QPolar {
        h,
        v,
        v_tilde_left,
        xi_b,
        reconstruction_defect,
        xi_b_in_p,
        degenerate,
    })
}

/// `(φ ⊗ id)(x)` on `B(C^m ⊗ C^n)` with the first factor slowest.
fn apply_first(phi: &LinearMapRep, x: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let m = phi.m();
    let p = phi.n();
    let mut out = ComplexMatrix::zeros(p * n, p * n);
    for i in 0..n {
        for j in 0..n {
            let blk = ComplexMatrix::from_fn(m, m, |r, s| x[(r * n + i, s * n + j)]);
            let img = phi.apply(&blk).expect("square block");
            for r in 0..p {
                for s in 0..p {
                    out[(r * n + i, s * n + j)] = img[(r, s)];
                }
            }
        }
    }
    out
}

/// `(T_φ ⊗ I) ξ` with `T_φ(aΩ_A) = φ(a)Ω_A`.
pub fn t_phi_tensor_id(ctx: &BipartiteConeContext, phi: &LinearMapRep, xi: &ComplexMatrix) -> ComplexMatrix {
    let db = ctx.dim_b();
    let eye = ComplexMatrix::identity(db);
    let omega_a = kron(ctx.ctx_a.omega(), &eye);
    let omega_a_inv = kron(&ctx.ctx_a.rho_power(-0.5), &eye);
    &apply_first(phi, &(xi * &omega_a_inv), db) * &omega_a
}

/// A pair `η ∈ P_n ∩ P_n^τ`, `ξ ∈ P_n` with `Re(η, (T_φ ⊗ I)* ξ) < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeWitness {
    pub n: usize,
    pub rho_a: ComplexMatrix,
    /// Blocks of `η = Δ^{1/4}[a_ij]Ω`, doubly positive.
    pub a: ComplexMatrix,
    /// Blocks of `ξ = Δ^{1/4}[b_ij]Ω`, positive.
    pub b: ComplexMatrix,
    /// `Re((T_φ ⊗ I)η, ξ) / (||η|| ||ξ||)`.
    pub value: f64,
}

impl Witness for ConeWitness {
    fn value(&self) -> f64 {
        self.value
    }
}

impl ConeWitness {
    /// Recomputes the pairing, or `None` if the blocks are not in the cones.
    pub fn reevaluate(&self, phi: &LinearMapRep) -> Option<f64> {
        let ctx = tracial_b_context(&self.rho_a, self.n).ok()?;
        let d = ctx.dim();
        if self.a.shape() != (d, d) || self.b.shape() != (d, d) || phi.m() != ctx.dim_a() || phi.n() != ctx.dim_a() {
            return None;
        }
        if !doubly_positive(&self.a, ctx.dim_a(), self.n) || !matches!(crate::matkernel::is_psd(&self.b), Ok(true)) {
            return None;
        }
        Some(cone_pairing(&ctx, phi, &self.a, &self.b))
    }
}

fn cone_pairing(ctx: &BipartiteConeContext, phi: &LinearMapRep, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let eta = ctx.element(a);
    let xi = ctx.element(b);
    let w = t_phi_tensor_id(ctx, phi, &eta);
    inner(w.as_slice(), xi.as_slice()).re / (eta.frobenius_norm() * xi.frobenius_norm()).max(f64::MIN_POSITIVE)
}

/// `ξ ∈ P` minimizing `Re(w, ξ)`: a rank-one block along the lowest
/// eigenvector of the Hermitian part of `R^{1/4} w* R^{1/4}`.
fn best_p_block(ctx: &BipartiteConeContext, w: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = (&(&ctx.r_quarter * &w.adjoint()) * &ctx.r_quarter).hermitian_part();
    let v = herm_eig(&m)?.eigenvector(0);
    let col = ComplexMatrix::column(&v);
    Ok(&col * &col.adjoint())
}

/// Dual-cone sampling test of `(T_φ ⊗ I)*(P_n) ⊂ co(P_n ∪ P_n^τ)` for
/// `n = 1..=k`, with the tracial state on the second factor.
///
/// Each sampled `η ∈ P_n ∩ P_n^τ` is paired with the `ξ ∈ P_n` minimizing
/// the pairing, so a negative value is an exact refutation.
pub fn weak_kdec_cone_check(
    ctx_a: &GnsContext,
    phi: &LinearMapRep,
    k: usize,
    samples: usize,
    exec: Exec,
    seed: Seed,
) -> Result<Verdict<ConeWitness>> {
    let da = ctx_a.dim();
    if phi.m() != da || phi.n() != da {
        return Err(Error::DimensionMismatch(format!(
            "map B(C^{}) -> B(C^{}) for a state on B(C^{da})",
            phi.m(),
            phi.n()
        )));
    }
    if k == 0 || da * k > MAX_COMPOSITE_DIM {
        return Err(Error::KOutOfRange {
            k,
            max: (MAX_COMPOSITE_DIM / da).max(1),
        });
    }
    phi.require_hermiticity_preserving()?;
    let samples = samples.max(1);
    let mut best: Option<ConeWitness> = None;
    for n in 1..=k {
        let ctx = tracial_b_context(ctx_a.rho(), n)?;
        let level_seed = seed.child(n as u64);
        let results = map_indexed(samples, exec, |s| -> Result<ConeWitness> {
            let mut rng = level_seed.child(s as u64).rng();
            let a = sample_intersection_block(&ctx, s, &mut rng);
            let w = t_phi_tensor_id(&ctx, phi, &ctx.element(&a));
            let b = best_p_block(&ctx, &w)?;
            let value = cone_pairing(&ctx, phi, &a, &b);
            Ok(ConeWitness {
                n,
                rho_a: ctx_a.rho().clone(),
                a,
                b,
                value,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let i = argmin_by_value(&results, |w| w.value).expect("nonempty");
        if best.as_ref().is_none_or(|b| results[i].value < b.value) {
            best = Some(results[i].clone());
        }
    }
    let best = best.expect("k >= 1");
    if best.value < -CONE_TOL {
        Ok(Verdict::Violation(best))
    } else {
        Ok(Verdict::Evidence(Evidence {
            min_value: best.value,
            restarts: 0,
            samples: samples * k,
            iterations: 0,
            seed,
        }))
    }
}

/// `[φ(a_ij)]` for the blocks of a cone witness, in the ordering used by
/// `sk_check`: its smallest eigenvalue, which is negative whenever the
/// pairing is.
pub fn cone_witness_block_min_eig(w: &ConeWitness, phi: &LinearMapRep) -> Result<f64> {
    let da = phi.m();
    let swapped = swap_factors(&w.a, da, w.n);
    let img = phi.apply_blockwise(&swapped, w.n)?;
    psd_min_eig(&img.hermitian_part())
}

/// Reorders `C^p ⊗ C^q` to `C^q ⊗ C^p`.
pub fn swap_factors(a: &ComplexMatrix, p: usize, q: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(p * q, p * q, |r, c| {
        let (ri, rj) = (r / p, r % p);
        let (ci, cj) = (c / p, c % p);
        a[(rj * q + ri, cj * q + ci)]
    })
}

/// Pairing value of the cone test for a doubly positive block given in the
/// `sk_check` ordering (`k` blocks of size `m`, `k` slowest).
pub fn cone_pairing_for_block(ctx_a: &GnsContext, phi: &LinearMapRep, block: &ComplexMatrix, k: usize) -> Result<f64> {
    let ctx = tracial_b_context(ctx_a.rho(), k)?;
    let a = swap_factors(block, k, ctx_a.dim());
    let w = t_phi_tensor_id(&ctx, phi, &ctx.element(&a));
    let b = best_p_block(&ctx, &w)?;
    Ok(cone_pairing(&ctx, phi, &a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kpos::{random_cocp_map, random_cp_map, sk_check};
    use crate::modular::random_faithful_state;

    fn tracial(n: usize) -> ComplexMatrix {
        ComplexMatrix::identity(n).scale_real(1.0 / n as f64)
    }

    fn contexts() -> Vec<BipartiteConeContext> {
        vec![
            bipartite_context(&tracial(2), &tracial(2)).unwrap(),
            bipartite_context(
                &ComplexMatrix::from_real_diag(&[2.0 / 3.0, 1.0 / 3.0]),
                &ComplexMatrix::from_real_diag(&[0.75, 0.25]),
            )
            .unwrap(),
            bipartite_context(
                &random_faithful_state(2, &mut Seed(1).rng()),
                &random_faithful_state(2, &mut Seed(2).rng()),
            )
            .unwrap(),
        ]
    }

    fn max_entangled() -> ComplexMatrix {
        let mut e = ComplexMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            e[(r, c)] = Complex64::new(0.5, 0.0);
        }
        e
    }

    #[test]
    fn context_examples() {
        let ctx = &contexts()[0];
        let xi = ComplexMatrix::random_gaussian(4, 4, &mut Seed(3).rng());
        assert!(ctx.delta_power_apply(1.0, &xi).approx_eq(&xi, 1e-14));
        assert!(ctx.omega().approx_eq(&ComplexMatrix::identity(4).scale_real(0.5), 1e-14));

        let ctx = &contexts()[1];
        let (la, lb) = ([2.0 / 3.0, 1.0 / 3.0], [0.75, 0.25]);
        let delta = ctx.delta_power_apply(1.0, &ComplexMatrix::identity(4));
        assert!(delta.approx_eq(&ComplexMatrix::identity(4), 1e-13));
        for r in 0..4 {
            for c in 0..4 {
                let e = ComplexMatrix::unit(4, r, c);
                let want = la[r / 2] / la[c / 2] * lb[r % 2] / lb[c % 2];
                assert!(ctx.delta_power_apply(1.0, &e).approx_eq(&e.scale_real(want), 1e-13));
            }
        }
        for ctx in contexts() {
            let d = ctx.check_structure().unwrap();
            assert!(d.max() <= 1e-12, "{d:?}");
        }
    }

    #[test]
    fn membership_examples() {
        for ctx in contexts() {
            let m = cone_member(&ctx, ctx.omega()).unwrap();
            assert!(m.in_intersection && m.blocks.approx_eq(&ComplexMatrix::identity(4), 1e-12));

            let sigma = ComplexMatrix::from_real_diag(&[0.7, 0.3]);
            let a = &kron(&sigma, &ComplexMatrix::identity(2)) + &kron(&ComplexMatrix::identity(2), &sigma);
            let m = cone_member(&ctx, &ctx.element(&a)).unwrap();
            assert!(m.in_intersection);

            let m = cone_member(&ctx, &ctx.element(&max_entangled())).unwrap();
            assert!(m.in_p && !m.in_ptau && m.in_hull_evidence);
            assert!(m.ptau_min_eig < -0.4);
            assert!(m.route_defect < 1e-12);
        }
        let ctx = &contexts()[0];
        assert!(matches!(
            cone_member(ctx, &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn intersection_both_inclusions() {
        for ctx in contexts() {
            for s in 0..200 {
                let mut rng = Seed(10 + s).rng();
                let a = sample_intersection_block(&ctx, s as usize, &mut rng);
                let m = cone_member(&ctx, &ctx.element(&a)).unwrap();
                assert!(m.in_intersection, "sample {s}: {} {}", m.p_min_eig, m.ptau_min_eig);
                // and the invariance of the intersection under Ũ
                let mu = cone_member(&ctx, &ctx.utilde(&ctx.element(&a))).unwrap();
                assert!(mu.in_intersection);
            }
            for s in 0..200 {
                let mut rng = Seed(1000 + s).rng();
                let a = sample_psd_block(&ctx, &mut rng);
                let m = cone_member(&ctx, &ctx.element(&a)).unwrap();
                assert!(m.in_p);
                let dp = doubly_positive(&a, 2, 2);
                assert_eq!(m.in_intersection, dp, "sample {s}");
                if m.in_intersection {
                    assert!(m.p_min_eig >= -1e-9 && m.ptau_min_eig >= -1e-9);
                }
            }
        }
    }

    #[test]
    fn transposed_cone_examples() {
        let r = transposed_cone_consistency(&contexts()[0], 100, Seed(20));
        assert!(r.transpose_defect <= 1e-11 && r.passed(1e-10, 1e-10), "{r:?}");
        for ctx in &contexts()[1..] {
            let r = transposed_cone_consistency(ctx, 100, Seed(21));
            assert!(r.passed(1e-10, 1e-10), "{r:?}");
        }
        let ctx = bipartite_context(
            &random_faithful_state(3, &mut Seed(22).rng()),
            &random_faithful_state(2, &mut Seed(23).rng()),
        )
        .unwrap();
        assert!(transposed_cone_consistency(&ctx, 30, Seed(24)).passed(1e-10, 1e-10));
    }

    #[test]
    fn pq_examples() {
        for ctx in contexts() {
            let fixed = ctx.element(&ComplexMatrix::identity(4));
            let (_, q) = pq_split(&ctx, &fixed).unwrap();
            assert!(q.frobenius_norm() < 1e-14);
            for s in 0..20 {
                let a = sample_psd_block(&ctx, &mut Seed(30 + s).rng());
                let xi = ctx.element(&a);
                let (p, q) = pq_split(&ctx, &xi).unwrap();
                let n2 = p.frobenius_norm().powi(2) + q.frobenius_norm().powi(2);
                assert!((n2 - xi.frobenius_norm().powi(2)).abs() < 1e-12);
                assert!(inner(p.as_slice(), q.as_slice()).norm() < 1e-12);
                assert!(q_closed_form(&ctx, &a).unwrap().approx_eq(&q, 1e-12));
                // Qξ = Δ^{1/4}[[0, ih], [-ih, 0]]Ω with b = (a_12 - a_12*)/2 = ih
                let a12 = ctx.b_block(&a, 0, 1);
                let b = (&a12 - &a12.adjoint()).scale_real(0.5);
                let z = ComplexMatrix::zeros(2, 2);
                let blocks = vec![vec![z.clone(), b.clone()], vec![-&b, z]];
                assert!(ctx.element(&ctx.from_b_blocks(&blocks)).approx_eq(&q, 1e-12));
            }
        }
    }

    #[test]
    fn prop64_examples() {
        for ctx in contexts() {
            let r = prop64_check(&ctx, ctx.omega(), 200, Seed(40)).unwrap();
            assert_eq!(r.violations(), 0);
            for s in 0..20 {
                let a = sample_intersection_block(&ctx, s, &mut Seed(41 + s as u64).rng());
                let r = prop64_check(&ctx, &ctx.element(&a), 500, Seed(42)).unwrap();
                assert_eq!(r.violations(), 0, "{r:?}");
            }
            let bad = ctx.element(&max_entangled());
            assert!(matches!(prop64_check(&ctx, &bad, 10, Seed(43)), Err(Error::NotInIntersection)));
            let r = prop64_evaluate(&ctx, &bad, 500, Seed(44)).unwrap();
            assert!(r.condition("b_abs_q_le_p").unwrap().violations > 0);
        }
    }

    #[test]
    fn prop65_examples() {
        for ctx in contexts() {
            let diag = ComplexMatrix::from_real_diag(&[2.0, 1.5]);
            let off = ComplexMatrix::from_fn(2, 2, |_, _| Complex64::new(0.3, 0.0));
            let sym = ctx.from_b_blocks(&[vec![diag.clone(), off.clone()], vec![off, diag]]);
            let f = prop65_check(&ctx, &ctx.element(&sym)).unwrap();
            assert!(f.q_in_p && f.q_zero && f.fixed);

            // a_12 - a_21 = i σ_z
            let sz = ComplexMatrix::from_real_diag(&[1.0, -1.0]).scale(Complex64::new(0.0, 0.5));
            let id = ComplexMatrix::identity(2);
            let a = ctx.from_b_blocks(&[vec![id.clone(), sz.clone()], vec![sz.adjoint(), id]]);
            let f = prop65_check(&ctx, &ctx.element(&a)).unwrap();
            assert!(!f.q_in_p && !f.q_zero && !f.fixed);

            for s in 0..100 {
                let a = sample_psd_block(&ctx, &mut Seed(50 + s).rng());
                assert!(prop65_check(&ctx, &ctx.element(&a)).unwrap().agree());
            }
            let neg = ctx.element(&ComplexMatrix::from_real_diag(&[1.0, -1.0, 1.0, 1.0]));
            assert!(matches!(prop65_check(&ctx, &neg), Err(Error::NotInP(_))));
        }
    }

    #[test]
    fn q_polar_examples() {
        let ctx = &contexts()[0];
        let r = q_polar(ctx, ctx.omega()).unwrap();
        assert!(r.degenerate && r.reconstruction_defect < 1e-14);
        assert!(r.xi_b.frobenius_norm() == 0.0 && r.v_tilde_left.frobenius_norm() == 0.0);

        let id = ComplexMatrix::identity(2);
        let ih = ComplexMatrix::from_real_diag(&[0.5, -0.5]).scale(Complex64::new(0.0, 0.5));
        let a = ctx.from_b_blocks(&[vec![id.clone(), ih.clone()], vec![ih.adjoint(), id]]);
        let r = q_polar(ctx, &ctx.element(&a)).unwrap();
        assert!(r.h.approx_eq(&ComplexMatrix::from_real_diag(&[0.25, -0.25]), 1e-14));
        let want_v = ComplexMatrix::from_real_diag(&[1.0, -1.0]).scale(Complex64::new(0.0, 1.0));
        assert!(r.v.approx_eq(&want_v, 1e-14));
        assert!(r.reconstruction_defect <= 1e-12 && r.xi_b_in_p);

        for ctx in contexts() {
            for s in 0..100 {
                let a = sample_psd_block(&ctx, &mut Seed(60 + s).rng());
                let r = q_polar(&ctx, &ctx.element(&a)).unwrap();
                assert!(r.reconstruction_defect <= 1e-9 && r.xi_b_in_p);
            }
        }
    }

    #[test]
    fn weak_kdec_examples() {
        let ctx_a = gns_context(&tracial(2)).unwrap();
        for phi in [LinearMapRep::identity(2), LinearMapRep::transpose_map(2)] {
            for k in 1..=2 {
                let v = weak_kdec_cone_check(&ctx_a, &phi, k, 100, Exec::Sequential, Seed(70)).unwrap();
                assert!(v.is_evidence(), "{v:?}");
            }
        }
        let v = weak_kdec_cone_check(&ctx_a, &LinearMapRep::identity(2).scale(-1.0), 1, 1, Exec::Sequential, Seed(71))
            .unwrap();
        let w = v.witness().unwrap();
        assert!(w.value < 0.0);
        let recomputed = w.reevaluate(&LinearMapRep::identity(2).scale(-1.0)).unwrap();
        assert!((recomputed - w.value).abs() < 1e-12);
        assert!(cone_witness_block_min_eig(w, &LinearMapRep::identity(2).scale(-1.0)).unwrap() < 0.0);
    }

    #[test]
    fn weak_kdec_agrees_with_sk_check() {
        let ctx_a = gns_context(&tracial(2)).unwrap();
        for s in 0..15u64 {
            let mut rng = Seed(80 + s).rng();
            let cp = random_cp_map(2, 2, 2, &mut rng);
            let cocp = random_cocp_map(2, 2, 2, &mut rng);
            let noise = LinearMapRep::from_choi(ComplexMatrix::random_hermitian(4, &mut rng), 2, 2).unwrap();
            let phi = cp.add(&cocp).unwrap().add(&noise.scale(0.1 * s as f64)).unwrap();
            let cone = weak_kdec_cone_check(&ctx_a, &phi, 2, 200, Exec::Sequential, Seed(90)).unwrap();
            let sk = sk_check(&phi, 2, 200, Exec::Sequential, Seed(91)).unwrap();
            if let Some(w) = cone.witness() {
                assert!(cone_witness_block_min_eig(w, &phi).unwrap() < 0.0);
            }
            if let Some(w) = sk.witness() {
                assert!(cone_pairing_for_block(&ctx_a, &phi, &w.a, 2).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn swap_factors_matches_kron_order() {
        let mut rng = Seed(95).rng();
        let p = ComplexMatrix::random_gaussian(2, 2, &mut rng);
        let q = ComplexMatrix::random_gaussian(3, 3, &mut rng);
        assert!(swap_factors(&kron(&p, &q), 2, 3).approx_eq(&kron(&q, &p), 1e-14));
    }
}
