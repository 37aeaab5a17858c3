//! Reports: one record per test, witnesses for every violation, and the
//! search budget behind every piece of evidence.
//!
//! Wall-clock timings live in the `timing` field only, so two runs with the
//! same input and seed agree byte for byte once that field is dropped.

use std::collections::BTreeMap;
use std::time::Instant;

use posmap_core::choi::{ProductWitness, HP_TOL};
use posmap_core::cones::{ConeWitness, CONE_TOL, INEQUALITY_TOL};
use posmap_core::kpos::{BlockWitness, CompressionWitness, KWitness, PptWitness};
use posmap_core::matkernel::{HERMITIAN_TOL, PSD_TOL};
use posmap_core::verdict::{Evidence, Verdict, WITNESS_RECHECK_TOL};
use posmap_core::{Complex64, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::doc::MapDocument;

pub const TOOL: &str = "posmap";

/// A refutation in a form `verify` can re-evaluate without searching.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessPayload {
    /// Unit `z` with `<z, h z> < 0`; `h` is the Choi matrix of `t∘φ` when
    /// `copositive` is set.
    Eigenvector {
        copositive: bool,
        z: Vec<Complex64>,
        value: f64,
    },
    Product(ProductWitness),
    KPositive(KWitness),
    KCopositive(KWitness),
    Block(BlockWitness),
    Compression(CompressionWitness),
    Ppt(PptWitness),
    Cone(ConeWitness),
}

impl WitnessPayload {
    pub fn value(&self) -> f64 {
        use posmap_core::verdict::Witness;
        match self {
            WitnessPayload::Eigenvector { value, .. } => *value,
            WitnessPayload::Product(w) => w.value,
            WitnessPayload::KPositive(w) | WitnessPayload::KCopositive(w) => w.value,
            WitnessPayload::Block(w) => w.value(),
            WitnessPayload::Compression(w) => w.value(),
            WitnessPayload::Ppt(w) => w.value,
            WitnessPayload::Cone(w) => w.value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    /// `certified`, `violation`, `evidence`, `pass`, `fail` or `computed`.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub defects: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Record {
    pub fn new(id: impl Into<String>, verdict: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            verdict: verdict.into(),
            value: None,
            defects: BTreeMap::new(),
            witness: None,
            evidence: None,
            seed: None,
            details: Value::Null,
        }
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn with_defect(mut self, name: &str, v: f64) -> Self {
        self.defects.insert(name.to_string(), v);
        self
    }

    pub fn with_details(mut self, d: Value) -> Self {
        self.details = d;
        self
    }

    pub fn with_seed(mut self, s: u64) -> Self {
        self.seed = Some(s);
        self
    }

    /// Record of a search verdict.
    pub fn from_verdict<W: Clone>(id: impl Into<String>, v: &Verdict<W>, wrap: impl Fn(W) -> WitnessPayload) -> Self {
        match v {
            Verdict::Violation(w) => {
                let payload = wrap(w.clone());
                let value = payload.value();
                let mut r = Record::new(id, "violation").with_value(value);
                r.witness = Some(payload);
                r
            }
            Verdict::Evidence(e) => {
                let mut r = Record::new(id, "evidence").with_value(e.min_value);
                r.evidence = Some(e.clone());
                r
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub per_record: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the input bytes (or of the parameters when there is no input file).
    pub input_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub parameters: Value,
    pub tolerances: BTreeMap<String, f64>,
    /// The map the witnesses refer to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<MapDocument>,
    pub records: Vec<Record>,
    pub summary: Value,
    /// False when a verification defect exceeded its tolerance.
    pub passed: bool,
    /// Wall-clock data; excluded from determinism comparisons.
    pub timing: Timing,
}

impl Report {
    pub fn to_json(&self) -> String {
        crate::doc::to_pretty_json(self)
    }

    /// The report without its `timing` field.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(map) = &mut v {
            map.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("reports serialize")
    }

    pub fn record(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Tolerance constants embedded in every report.
pub fn tolerances() -> BTreeMap<String, f64> {
    [
        ("psd_relative", PSD_TOL),
        ("hermitian_relative", HERMITIAN_TOL),
        ("hermiticity_preserving", HP_TOL),
        ("witness_recheck", WITNESS_RECHECK_TOL),
        ("cone_membership", CONE_TOL),
        ("cone_inequality", INEQUALITY_TOL),
        ("document_hermitian", crate::pipeline::DOCUMENT_HERMITIAN_TOL),
        ("modular_defect", crate::pipeline::MODULAR_DEFECT_TOL),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Collects records and their timings.
pub struct ReportBuilder {
    command: String,
    start: Instant,
    records: Vec<Record>,
    timing: Timing,
}

impl ReportBuilder {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            start: Instant::now(),
            records: Vec::new(),
            timing: Timing::default(),
        }
    }

    /// Runs `f`, timing it, and appends its record.
    pub fn run(&mut self, f: impl FnOnce() -> Result<Record>) -> Result<&Record> {
        let t = Instant::now();
        let rec = f()?;
        self.timing
            .per_record
            .insert(rec.id.clone(), t.elapsed().as_secs_f64());
        self.records.push(rec);
        Ok(self.records.last().expect("just pushed"))
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn finish(
        mut self,
        input_digest: String,
        seed: Option<u64>,
        parameters: Value,
        subject: Option<MapDocument>,
        summary: Value,
        passed: bool,
    ) -> Report {
        self.timing.total_seconds = self.start.elapsed().as_secs_f64();
        Report {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command,
            input_digest,
            seed,
            parameters,
            tolerances: tolerances(),
            subject,
            records: self.records,
            summary,
            passed,
            timing: self.timing,
        }
    }
}
