//! The work behind each subcommand, returning reports instead of printing.

use std::collections::BTreeMap;

use posmap_core::choi::{block_positivity, is_cp, LinearMapRep};
use posmap_core::cones::{
    bipartite_context, cone_member, pq_split, prop64_check, prop65_check, q_closed_form, q_polar,
    weak_kdec_cone_check, BipartiteConeContext,
};
use posmap_core::kpos::{decomposability_witness, is_k_copositive, is_k_positive, pk_check, sk_check};
use posmap_core::matkernel::inner;
use posmap_core::modular::{gns_context, identity_suite, random_faithful_state, IdentitySuite};
use posmap_core::par::Exec;
use posmap_core::search::{SearchParams, WitnessParams};
use posmap_core::verdict::recheck_matches;
use posmap_core::{ComplexMatrix, Error, Result, Seed};
use serde::Serialize;
use serde_json::json;

use crate::doc::{parse, ConeDocument, ConeInput, MapDocument, StateDocument};
use crate::report::{sha256_hex, Record, Report, ReportBuilder, WitnessPayload};

/// Relative Hermiticity a map document's Choi matrix must meet before the
/// positivity tests run on its Hermitian part.
pub const DOCUMENT_HERMITIAN_TOL: f64 = 1e-8;

/// Largest modular identity defect a passing report may contain.
pub const MODULAR_DEFECT_TOL: f64 = 1e-9;

pub const MIN_MODULAR_DIM: usize = 2;
pub const MAX_MODULAR_DIM: usize = 8;

/// Search budgets for `classify`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub k_max: usize,
    pub seed: u64,
    /// See-saw restarts for the positivity searches.
    pub restarts: usize,
    /// Doubly positive samples per level of the block test.
    pub samples: usize,
    /// Random compressions per level of the compression test.
    pub projections: usize,
    /// Restarts of each PPT descent.
    pub witness_restarts: usize,
    pub exec: Exec,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            k_max: 2,
            seed: 0,
            restarts: 64,
            samples: 200,
            projections: 20,
            witness_restarts: 2,
            exec: Exec::Parallel,
        }
    }
}

fn input_map(doc: &MapDocument) -> Result<LinearMapRep> {
    let phi = doc.to_map()?;
    let h = phi.choi();
    let defect = h.hermitian_defect();
    if defect > DOCUMENT_HERMITIAN_TOL * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermiticityPreserving(defect));
    }
    LinearMapRep::from_choi(h.hermitian_part(), phi.m(), phi.n())
}

fn subject(phi: &LinearMapRep, doc: &MapDocument) -> MapDocument {
    let mut s = MapDocument::from_map(phi, None);
    s.metadata = doc.metadata.clone();
    s
}

fn eigen_record(id: &str, h: &ComplexMatrix, copositive: bool, phi: &LinearMapRep) -> Result<Record> {
    let v = is_cp(phi)?;
    match v.witness {
        None => Ok(Record::new(id, "certified").with_value(v.min_eig)),
        Some(z) => {
            let value = h.quadratic_form(&z).re;
            let mut r = Record::new(id, "violation").with_value(value);
            r.witness = Some(WitnessPayload::Eigenvector { copositive, z, value });
            Ok(r)
        }
    }
}

/// Largest `k` such that every level `1..=k` produced evidence.
fn highest_consecutive(records: &[Record], prefix: &str, ks: &[usize]) -> usize {
    ks.iter()
        .take_while(|k| {
            records
                .iter()
                .any(|r| r.id == format!("{prefix}/{k}") && r.verdict == "evidence")
        })
        .count()
}

fn statuses(records: &[Record], prefix: &str) -> BTreeMap<String, String> {
    records
        .iter()
        .filter_map(|r| {
            r.id.strip_prefix(prefix)
                .and_then(|k| k.strip_prefix('/'))
                .map(|k| (k.to_string(), r.verdict.clone()))
        })
        .collect()
}

/// Runs every positivity test on a map document.
pub fn classify(input: &[u8], opts: &ClassifyOptions) -> Result<Report> {
    let text = std::str::from_utf8(input).map_err(|e| Error::InvalidDocument(format!("input is not UTF-8: {e}")))?;
    let doc: MapDocument = parse(text)?;
    let phi = input_map(&doc)?;
    let (m, n) = (phi.m(), phi.n());
    if opts.k_max == 0 || opts.k_max > n {
        return Err(Error::KOutOfRange { k: opts.k_max, max: n });
    }
    if opts.restarts == 0 || opts.samples == 0 || opts.projections == 0 || opts.witness_restarts == 0 {
        return Err(Error::InvalidDocument("search budgets must be positive".into()));
    }
    let seed = Seed(opts.seed);
    let params = SearchParams::default().with_restarts(opts.restarts).with_exec(opts.exec);
    let wparams = WitnessParams {
        restarts: opts.witness_restarts,
        exec: opts.exec,
        ..WitnessParams::default()
    };
    let h = phi.choi().clone();
    let phi_t = phi.compose_transpose();
    let ht = phi_t.choi().clone();
    let ks: Vec<usize> = (1..=opts.k_max).collect();

    let mut b = ReportBuilder::new("classify");
    b.run(|| eigen_record("cp", &h, false, &phi))?;
    b.run(|| eigen_record("cocp", &ht, true, &phi_t))?;
    b.run(|| {
        let v = block_positivity(&h, m, n, &params, seed.labeled("block_positivity"))?;
        Ok(Record::from_verdict("block_positivity", &v, WitnessPayload::Product))
    })?;
    for &k in &ks {
        b.run(|| {
            let v = is_k_positive(&phi, k, &params, seed.labeled("k_positive").child(k as u64))?;
            Ok(Record::from_verdict(format!("k_positive/{k}"), &v.verdict, WitnessPayload::KPositive))
        })?;
    }
    for &k in &ks {
        b.run(|| {
            let v = is_k_copositive(&phi, k, &params, seed.labeled("k_copositive").child(k as u64))?;
            Ok(Record::from_verdict(format!("k_copositive/{k}"), &v.verdict, WitnessPayload::KCopositive))
        })?;
    }
    for &k in &ks {
        b.run(|| {
            let v = sk_check(&phi, k, opts.samples, opts.exec, seed.labeled("sk").child(k as u64))?;
            Ok(Record::from_verdict(format!("sk/{k}"), &v, WitnessPayload::Block))
        })?;
    }
    for &k in &ks {
        b.run(|| {
            let v = pk_check(&phi, k, opts.projections, &wparams, seed.labeled("pk").child(k as u64))?;
            Ok(Record::from_verdict(format!("pk/{k}"), &v, WitnessPayload::Compression))
        })?;
    }
    b.run(|| {
        let v = decomposability_witness(&h, m, n, &wparams, seed.labeled("decomposability"))?;
        Ok(Record::from_verdict("decomposability", &v, WitnessPayload::Ppt))
    })?;

    let recs = b.records();
    let verdict_of = |id: &str| recs.iter().find(|r| r.id == id).map(|r| r.verdict.clone());
    let summary = json!({
        "completely_positive": verdict_of("cp"),
        "completely_copositive": verdict_of("cocp"),
        "positive": verdict_of("block_positivity"),
        "highest_k_positive": highest_consecutive(recs, "k_positive", &ks),
        "highest_k_copositive": highest_consecutive(recs, "k_copositive", &ks),
        "s_k": statuses(recs, "sk"),
        "p_k": statuses(recs, "pk"),
        "decomposability": verdict_of("decomposability"),
    });
    let parameters = json!({
        "k_max": opts.k_max,
        "m": m,
        "n": n,
        "search": params,
        "witness": wparams,
        "samples": opts.samples,
        "projections": opts.projections,
    });
    let subject = subject(&phi, &doc);
    Ok(b.finish(sha256_hex(input), Some(opts.seed), parameters, Some(subject), summary, true))
}

/// Options for `modular-verify`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModularOptions {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Positive samples per cone statement.
    pub cone_samples: usize,
}

impl Default for ModularOptions {
    fn default() -> Self {
        Self {
            dim: 2,
            trials: 10,
            seed: 0,
            cone_samples: 100,
        }
    }
}

/// Runs the modular identity suite on random faithful states of one
/// dimension, or on the state in `rho_doc` when given.
pub fn modular_verify(opts: &ModularOptions, rho_doc: Option<&[u8]>) -> Result<Report> {
    if opts.trials == 0 || opts.cone_samples == 0 {
        return Err(Error::InvalidDocument("trials and cone samples must be positive".into()));
    }
    let seed = Seed(opts.seed);
    let mut b = ReportBuilder::new("modular-verify");
    let (states, digest, dim) = match rho_doc {
        Some(bytes) => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::InvalidDocument(format!("input is not UTF-8: {e}")))?;
            let doc: StateDocument = parse(text)?;
            let d = doc.rho.rows();
            (vec![doc.rho], sha256_hex(bytes), d)
        }
        None => {
            if !(MIN_MODULAR_DIM..=MAX_MODULAR_DIM).contains(&opts.dim) {
                return Err(Error::InvalidDocument(format!(
                    "dimension {} outside {MIN_MODULAR_DIM}..={MAX_MODULAR_DIM}",
                    opts.dim
                )));
            }
            let states = (0..opts.trials)
                .map(|t| random_faithful_state(opts.dim, &mut seed.labeled("state").child(t as u64).rng()))
                .collect();
            let digest = sha256_hex(serde_json::to_string(opts).expect("options serialize").as_bytes());
            (states, digest, opts.dim)
        }
    };
    if !(MIN_MODULAR_DIM..=MAX_MODULAR_DIM).contains(&dim) {
        return Err(Error::InvalidDocument(format!(
            "dimension {dim} outside {MIN_MODULAR_DIM}..={MAX_MODULAR_DIM}"
        )));
    }
    let mut suite = IdentitySuite::default();
    for (t, rho) in states.iter().enumerate() {
        let ctx = gns_context(rho)?;
        suite.merge(&identity_suite(&ctx, opts.cone_samples, seed.labeled("suite").child(t as u64))?);
    }
    for (name, defect) in &suite.defects {
        b.run(|| {
            let verdict = if *defect <= MODULAR_DEFECT_TOL { "pass" } else { "fail" };
            Ok(Record::new(name.clone(), verdict).with_value(*defect))
        })?;
    }
    let max = suite.max_defect();
    let passed = max <= MODULAR_DEFECT_TOL;
    let summary = json!({
        "max_defect": max,
        "identities": suite.defects.len(),
        "states": states.len(),
    });
    let parameters = json!({
        "dim": dim,
        "trials": states.len(),
        "cone_samples": opts.cone_samples,
        "supplied_state": rho_doc.is_some(),
    });
    Ok(b.finish(digest, Some(opts.seed), parameters, None, summary, passed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeCommand {
    Member,
    Pq,
    Prop64,
    Prop65,
    Polar,
}

/// Options for the cone subcommands that sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeOptions {
    pub seed: Option<u64>,
    pub eta_samples: usize,
}

fn cone_vector(doc: &ConeDocument) -> Result<(BipartiteConeContext, ComplexMatrix)> {
    let (ra, rb) = doc.states()?;
    let ctx = bipartite_context(&ra, &rb)?;
    let xi = match doc.input()? {
        ConeInput::Vector(v) => v.clone(),
        ConeInput::Blocks(a) => ctx.element(a),
    };
    Ok((ctx, xi))
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Runs one cone operation on a cone document.
pub fn cone(command: ConeCommand, input: &[u8], opts: &ConeOptions) -> Result<Report> {
    let text = std::str::from_utf8(input).map_err(|e| Error::InvalidDocument(format!("input is not UTF-8: {e}")))?;
    let doc: ConeDocument = parse(text)?;
    let (ctx, xi) = cone_vector(&doc)?;
    let scale = xi.frobenius_norm().max(1.0);
    let name = serde_json::to_value(command).expect("command serializes");
    let mut b = ReportBuilder::new(&format!("cone {}", name.as_str().unwrap_or_default()));
    let mut passed = true;
    match command {
        ConeCommand::Member => {
            let m = cone_member(&ctx, &xi)?;
            passed = m.route_defect <= 1e-9 * scale;
            b.run(|| {
                Ok(Record::new("member", "computed")
                    .with_defect("route", m.route_defect)
                    .with_defect("p_hermitian", m.p_hermitian_defect)
                    .with_details(json!({
                        "in_p": m.in_p,
                        "in_ptau": m.in_ptau,
                        "in_intersection": m.in_intersection,
                        "in_hull_evidence": m.in_hull_evidence,
                        "hull_note": m.hull_note,
                        "p_min_eig": m.p_min_eig,
                        "ptau_min_eig": m.ptau_min_eig,
                    })))
            })?;
        }
        ConeCommand::Pq => {
            let (p, q) = pq_split(&ctx, &xi)?;
            let sum = (&(&p + &q) - &xi).frobenius_norm();
            let overlap = inner(p.as_slice(), q.as_slice()).norm();
            let closed = if ctx.dim_b() == 2 {
                Some((&q - &q_closed_form(&ctx, &ctx.reconstruct(&xi))?).frobenius_norm())
            } else {
                None
            };
            let worst = sum.max(overlap).max(closed.unwrap_or(0.0));
            passed = worst <= 1e-9 * scale;
            b.run(|| {
                let mut r = Record::new("pq", pass_fail(passed))
                    .with_defect("p_plus_q", sum)
                    .with_defect("p_q_overlap", overlap)
                    .with_details(json!({
                        "p": p,
                        "q": q,
                        "p_norm": p.frobenius_norm(),
                        "q_norm": q.frobenius_norm(),
                    }));
                if let Some(c) = closed {
                    r = r.with_defect("q_closed_form", c);
                }
                Ok(r)
            })?;
        }
        ConeCommand::Prop64 => {
            let s = opts
                .seed
                .ok_or_else(|| Error::InvalidDocument("prop64 samples and needs a seed".into()))?;
            if opts.eta_samples == 0 {
                return Err(Error::InvalidDocument("eta samples must be positive".into()));
            }
            let rep = prop64_check(&ctx, &xi, opts.eta_samples, Seed(s))?;
            for c in &rep.conditions {
                passed &= c.violations == 0;
                b.run(|| {
                    Ok(Record::new(format!("prop64/{}", c.name), pass_fail(c.violations == 0))
                        .with_value(c.min_slack)
                        .with_seed(s)
                        .with_details(json!({ "violations": c.violations, "eta_samples": rep.eta_samples })))
                })?;
            }
        }
        ConeCommand::Prop65 => {
            let f = prop65_check(&ctx, &xi)?;
            passed = f.agree();
            b.run(|| {
                Ok(Record::new("prop65", pass_fail(passed)).with_details(json!({
                    "q_in_p": f.q_in_p,
                    "q_zero": f.q_zero,
                    "fixed": f.fixed,
                    "q_min_eig": f.q_min_eig,
                    "q_norm": f.q_norm,
                })))
            })?;
        }
        ConeCommand::Polar => {
            let p = q_polar(&ctx, &xi)?;
            passed = p.reconstruction_defect <= 1e-9 * scale && p.xi_b_in_p;
            b.run(|| {
                Ok(Record::new("polar", pass_fail(passed))
                    .with_defect("reconstruction", p.reconstruction_defect)
                    .with_details(json!({
                        "xi_b_in_p": p.xi_b_in_p,
                        "degenerate": p.degenerate,
                        "h": p.h,
                        "v": p.v,
                        "xi_b": p.xi_b,
                    })))
            })?;
        }
    }
    let summary = json!({ "dim_a": ctx.dim_a(), "dim_b": ctx.dim_b(), "passed": passed });
    let parameters = json!({
        "command": command,
        "eta_samples": (command == ConeCommand::Prop64).then_some(opts.eta_samples),
    });
    Ok(b.finish(sha256_hex(input), opts.seed, parameters, None, summary, passed))
}

/// Options for `cone weakdec`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeakDecOptions {
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub exec: Exec,
}

/// Dual-cone test of weak k-decomposability of a map on `B(C^d)`, with the
/// state in `state` (tracial when absent) on the first factor.
pub fn weak_dec(map: &[u8], state: Option<&[u8]>, opts: &WeakDecOptions) -> Result<Report> {
    let text = std::str::from_utf8(map).map_err(|e| Error::InvalidDocument(format!("input is not UTF-8: {e}")))?;
    let doc: MapDocument = parse(text)?;
    let phi = input_map(&doc)?;
    if phi.m() != phi.n() {
        return Err(Error::DimensionMismatch(format!(
            "weak decomposability needs a map B(C^d) -> B(C^d), got m = {}, n = {}",
            phi.m(),
            phi.n()
        )));
    }
    if opts.samples == 0 {
        return Err(Error::InvalidDocument("samples must be positive".into()));
    }
    let d = phi.m();
    let mut digest_input = map.to_vec();
    let rho = match state {
        Some(bytes) => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::InvalidDocument(format!("input is not UTF-8: {e}")))?;
            digest_input.extend_from_slice(bytes);
            parse::<StateDocument>(text)?.rho
        }
        None => ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
    };
    let ctx_a = gns_context(&rho)?;
    let mut b = ReportBuilder::new("cone weakdec");
    let rec = b.run(|| {
        let v = weak_kdec_cone_check(&ctx_a, &phi, opts.k, opts.samples, opts.exec, Seed(opts.seed))?;
        Ok(Record::from_verdict(format!("weakdec/{}", opts.k), &v, WitnessPayload::Cone))
    })?;
    let summary = json!({ "weak_decomposability": rec.verdict });
    let parameters = json!({ "k": opts.k, "samples": opts.samples, "d": d });
    let subject = subject(&phi, &doc);
    Ok(b.finish(sha256_hex(&digest_input), Some(opts.seed), parameters, Some(subject), summary, true))
}

/// Outcome of [`verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifySummary {
    pub records: usize,
    pub witnesses: usize,
}

/// Recomputes a witness value from the subject map, or `None` if the witness
/// is malformed for it.
fn recompute(w: &WitnessPayload, phi: &LinearMapRep) -> Option<f64> {
    let h = phi.choi();
    match w {
        WitnessPayload::Eigenvector { copositive, z, .. } => {
            let hh = if *copositive { phi.compose_transpose().choi().clone() } else { h.clone() };
            let nrm = posmap_core::matkernel::norm(z);
            if z.len() != hh.rows() || (nrm - 1.0).abs() > 1e-9 {
                return None;
            }
            Some(hh.quadratic_form(z).re)
        }
        WitnessPayload::Product(p) => {
            if p.x.len() != phi.m() || p.y.len() != phi.n() {
                return None;
            }
            Some(p.reevaluate(h))
        }
        WitnessPayload::KPositive(k) => k.refutes(h, phi.m(), k.k).then(|| k.reevaluate(h)),
        WitnessPayload::KCopositive(k) => {
            let ht = phi.compose_transpose().choi().clone();
            k.refutes(&ht, phi.m(), k.k).then(|| k.reevaluate(&ht))
        }
        WitnessPayload::Block(bw) => bw.reevaluate(phi),
        WitnessPayload::Compression(c) => c.reevaluate(phi),
        WitnessPayload::Ppt(p) => p.reevaluate(h),
        WitnessPayload::Cone(c) => c.reevaluate(phi),
    }
}

/// Re-evaluates every witness in a report against its subject map without
/// searching. Fails with [`Error::StaleWitness`] naming the first record
/// whose witness does not reproduce its stated negative value.
pub fn verify(report: &Report) -> Result<VerifySummary> {
    let phi = match &report.subject {
        Some(doc) => Some(doc.to_map()?),
        None => None,
    };
    let mut witnesses = 0;
    for r in &report.records {
        let Some(w) = &r.witness else {
            if r.verdict == "violation" {
                return Err(Error::StaleWitness(r.id.clone()));
            }
            continue;
        };
        let phi = phi.as_ref().ok_or_else(|| Error::StaleWitness(r.id.clone()))?;
        let stated = w.value();
        let ok = recompute(w, phi).is_some_and(|v| v < 0.0 && recheck_matches(stated, v))
            && r.value.is_none_or(|v| recheck_matches(stated, v));
        if !ok {
            return Err(Error::StaleWitness(r.id.clone()));
        }
        witnesses += 1;
    }
    Ok(VerifySummary {
        records: report.records.len(),
        witnesses,
    })
}

/// Parses a report and verifies it.
pub fn verify_bytes(input: &[u8]) -> Result<(Report, VerifySummary)> {
    let text = std::str::from_utf8(input).map_err(|e| Error::InvalidDocument(format!("input is not UTF-8: {e}")))?;
    let report: Report = parse(text)?;
    let s = verify(&report)?;
    Ok((report, s))
}

