//! Randomized verification sweeps over interferometer instances.
//!
//! A sweep draws `count` instances for every `(class, dim)` pair, evaluates
//! them in parallel, and reduces the results with order-independent
//! min/max/count folds. Instances are generated from per-instance child
//! streams, so results do not depend on thread scheduling.

use std::collections::BTreeMap;
use std::time::Instant;

use duality_core::format::{round_sig, sig12};
use duality_core::measures::{
    hierarchy_report, mixed_state_bound, pure_state_identity, slack, DualityReport,
};
use duality_core::sampling::{seeded_instance, InstanceClass};
use duality_core::{InterferometerInstance, SLACK_TOL};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

/// Name of the pure-preparation identity check; its slack is `-residual`.
pub const CHECK_O35: &str = "O35";
/// Name of the mixed-preparation bound check.
pub const CHECK_O45: &str = "O45";
/// Name of the spectral recomposition check of the contrast factor; its slack is `-error`.
pub const CHECK_RECOMPOSITION: &str = "recomposition";

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub seed: u64,
    pub count: usize,
    pub dims: Vec<usize>,
    pub classes: Vec<InstanceClass>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.count == 0 {
            return Err("count must be at least 1".into());
        }
        if self.dims.is_empty() {
            return Err("at least one dimension is required".into());
        }
        if let Some(d) = self.dims.iter().find(|d| !(MIN_DIM..=MAX_DIM).contains(*d)) {
            return Err(format!("dimension {d} outside {MIN_DIM}..={MAX_DIM}"));
        }
        if self.classes.is_empty() {
            return Err("at least one instance class is required".into());
        }
        Ok(())
    }

    /// Total number of instances, `count` per `(class, dim)` pair.
    pub fn total(&self) -> usize {
        self.count * self.dims.len() * self.classes.len()
    }

    fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "count": self.count,
            "dims": self.dims,
            "classes": self.classes.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Position of an instance within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct InstanceId {
    pub class: InstanceClass,
    pub dim: usize,
    pub index: u64,
}

impl InstanceId {
    pub fn instance(&self, seed: u64) -> InterferometerInstance {
        seeded_instance(seed, self.class, self.dim, self.index)
    }
}

/// Everything measured on one instance.
#[derive(Debug, Clone)]
pub struct InstanceRecord {
    pub id: InstanceId,
    pub s: f64,
    /// `None` when a conditional marker state is undefined.
    pub report: Option<DualityReport>,
    /// Named slacks, including the identity checks that apply to this instance.
    pub checks: BTreeMap<&'static str, f64>,
    /// `|V^2 + Xi^2 - 1|`, `|V^2 + D^2 - 1|` and `|D - Xi|` for pure preparations.
    pub saturation: Option<[f64; 3]>,
}

impl InstanceRecord {
    pub fn violations(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.checks
            .iter()
            .filter(|(_, &v)| v < -SLACK_TOL)
            .map(|(&k, &v)| (k, v))
    }
}

const REPORT_CHECKS: [&str; 5] = [slack::O2P, slack::O2Q, slack::O2, slack::O1, slack::MAIN];

pub fn evaluate(id: InstanceId, inst: &InterferometerInstance) -> InstanceRecord {
    let report = hierarchy_report(inst).ok();
    let mut checks = BTreeMap::new();
    if let Some(rep) = &report {
        for name in REPORT_CHECKS {
            if let Some(&v) = rep.slacks.get(name) {
                checks.insert(name, v);
            }
        }
    }
    let mut saturation = None;
    if inst.prep().is_pure() {
        if inst.is_pure_preparation() {
            if let Ok(id_check) = pure_state_identity(inst) {
                checks.insert(CHECK_O35, -id_check.residual);
            }
            if let Some(rep) = &report {
                saturation = Some([
                    (rep.v * rep.v + rep.xi * rep.xi - 1.0).abs(),
                    (rep.v * rep.v + rep.d * rep.d - 1.0).abs(),
                    (rep.d - rep.xi).abs(),
                ]);
            }
        }
        if let Ok(bound) = mixed_state_bound(inst) {
            checks.insert(CHECK_O45, bound.slack);
            checks.insert(CHECK_RECOMPOSITION, -bound.recomposition_error);
        }
    }
    InstanceRecord {
        id,
        s: inst.s(),
        report,
        checks,
        saturation,
    }
}

pub fn instance_ids(cfg: &SweepConfig) -> Vec<InstanceId> {
    let mut ids = Vec::with_capacity(cfg.total());
    for &class in &cfg.classes {
        for &dim in &cfg.dims {
            for index in 0..cfg.count as u64 {
                ids.push(InstanceId { class, dim, index });
            }
        }
    }
    ids
}

/// Evaluates every instance of the sweep, in a deterministic order.
pub fn run(cfg: &SweepConfig) -> Vec<InstanceRecord> {
    instance_ids(cfg)
        .into_par_iter()
        .map(|id| evaluate(id, &id.instance(cfg.seed)))
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
struct CheckStats {
    evaluated: usize,
    violations: usize,
    min: Option<(f64, InstanceId)>,
}

impl CheckStats {
    fn add(&mut self, value: f64, id: InstanceId) {
        self.evaluated += 1;
        if value < -SLACK_TOL {
            self.violations += 1;
        }
        // Ties resolved by instance order keep the fold order-independent.
        match self.min {
            Some((m, mid)) if m < value || (m == value && mid <= id) => {}
            _ => self.min = Some((value, id)),
        }
    }
}

/// Aggregated sweep outcome.
#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub instance_count: usize,
    pub degenerate_count: usize,
    pub violation_count: usize,
    checks: BTreeMap<&'static str, CheckStats>,
    saturation_count: usize,
    saturation_max: [f64; 3],
    xi_minus_d_min: Option<(f64, InstanceId)>,
    xi_minus_d_negative: usize,
    violations: Vec<(InstanceId, &'static str, f64)>,
}

impl SweepSummary {
    pub fn from_records(records: &[InstanceRecord]) -> Self {
        let mut checks: BTreeMap<&'static str, CheckStats> = BTreeMap::new();
        let mut saturation_count = 0;
        let mut saturation_max = [0.0f64; 3];
        let mut xi_minus_d_min: Option<(f64, InstanceId)> = None;
        let mut xi_minus_d_negative = 0;
        let mut violations = Vec::new();
        let mut degenerate_count = 0;
        for rec in records {
            for (&name, &value) in &rec.checks {
                checks.entry(name).or_default().add(value, rec.id);
            }
            for (name, value) in rec.violations() {
                violations.push((rec.id, name, value));
            }
            if let Some(sat) = rec.saturation {
                saturation_count += 1;
                for (m, v) in saturation_max.iter_mut().zip(sat) {
                    *m = m.max(v);
                }
            }
            match &rec.report {
                Some(rep) => {
                    if rep.xi_minus_d < -SLACK_TOL {
                        xi_minus_d_negative += 1;
                    }
                    match xi_minus_d_min {
                        Some((m, _)) if m <= rep.xi_minus_d => {}
                        _ => xi_minus_d_min = Some((rep.xi_minus_d, rec.id)),
                    }
                }
                None => degenerate_count += 1,
            }
        }
        SweepSummary {
            instance_count: records.len(),
            degenerate_count,
            violation_count: violations.len(),
            checks,
            saturation_count,
            saturation_max,
            xi_minus_d_min,
            xi_minus_d_negative,
            violations,
        }
    }

    /// Smallest slack observed for `check`, if it was evaluated.
    pub fn min_slack(&self, check: &str) -> Option<f64> {
        self.checks.get(check).and_then(|c| c.min.map(|(v, _)| v))
    }

    pub fn violations_of(&self, check: &str) -> usize {
        self.checks.get(check).map_or(0, |c| c.violations)
    }

    pub fn evaluated(&self, check: &str) -> usize {
        self.checks.get(check).map_or(0, |c| c.evaluated)
    }

    /// Max over pure preparations of `|V^2 + Xi^2 - 1|`, `|V^2 + D^2 - 1|`, `|D - Xi|`.
    pub fn saturation_max(&self) -> [f64; 3] {
        self.saturation_max
    }

    pub fn saturation_count(&self) -> usize {
        self.saturation_count
    }

    /// JSON summary. The worst instance of each check and every violating
    /// instance are embedded in replayable instance form.
    pub fn to_json(&self, cfg: &SweepConfig) -> Value {
        let instance_json = |id: &InstanceId| -> Value {
            serde_json::from_str(&id.instance(cfg.seed).to_json()).expect("instance JSON")
        };
        let id_json = |id: &InstanceId| json!({"class": id.class.to_string(), "dim": id.dim, "index": id.index});
        let checks: serde_json::Map<String, Value> = self
            .checks
            .iter()
            .map(|(name, st)| {
                let (min, worst) = match st.min {
                    Some((v, id)) => (json!(round_sig(v)), json!({"id": id_json(&id), "instance": instance_json(&id)})),
                    None => (Value::Null, Value::Null),
                };
                (
                    name.to_string(),
                    json!({"evaluated": st.evaluated, "min_slack": min, "violations": st.violations, "worst": worst}),
                )
            })
            .collect();
        let violations: Vec<Value> = self
            .violations
            .iter()
            .map(|(id, name, v)| {
                json!({"check": name, "slack": round_sig(*v), "id": id_json(id), "instance": instance_json(id)})
            })
            .collect();
        let [sat_xi, sat_d, sat_dxi] = self.saturation_max;
        json!({
            "config": cfg.to_json(),
            "instance_count": self.instance_count,
            "degenerate_count": self.degenerate_count,
            "violation_count": self.violation_count,
            "slack_tolerance": SLACK_TOL,
            "checks": checks,
            "pure_saturation": {
                "count": self.saturation_count,
                "max_abs_v2_plus_xi2_minus_1": round_sig(sat_xi),
                "max_abs_v2_plus_d2_minus_1": round_sig(sat_d),
                "max_abs_d_minus_xi": round_sig(sat_dxi),
            },
            "xi_minus_d": {
                "min": self.xi_minus_d_min.map(|(v, _)| round_sig(v)),
                "min_at": self.xi_minus_d_min.map(|(_, id)| id_json(&id)),
                "negative_count": self.xi_minus_d_negative,
            },
            "violations": violations,
        })
    }
}

/// Column header of the per-instance CSV.
pub const INSTANCES_HEADER: &str = "class,dim,index,s,v,p,q,d,xi,r,chi,xi_minus_d,\
slack_O2P,slack_O2Q,slack_O2,slack_O1,slack_main,o35_residual,o45_slack";

fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

/// One CSV row; empty cells for quantities that do not apply.
pub fn csv_row(rec: &InstanceRecord) -> String {
    let id = &rec.id;
    let mut cells = vec![
        id.class.to_string(),
        id.dim.to_string(),
        id.index.to_string(),
        sig12(rec.s),
    ];
    match &rec.report {
        Some(r) => {
            cells.extend([r.v, r.p, r.q, r.d, r.xi].map(sig12));
            cells.push(opt(r.r));
            cells.push(opt(r.chi));
            cells.push(sig12(r.xi_minus_d));
            for name in REPORT_CHECKS {
                cells.push(opt(r.slacks.get(name).copied()));
            }
        }
        None => cells.extend(std::iter::repeat_n(String::new(), 13)),
    }
    cells.push(opt(rec.checks.get(CHECK_O35).map(|v| -v)));
    cells.push(opt(rec.checks.get(CHECK_O45).copied()));
    cells.join(",")
}

pub fn instances_csv(records: &[InstanceRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 200);
    out.push_str(INSTANCES_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&csv_row(rec));
        out.push('\n');
    }
    out
}

/// Runs a sweep and reports its wall-clock time in seconds.
pub fn run_timed(cfg: &SweepConfig) -> (Vec<InstanceRecord>, SweepSummary, f64) {
    let start = Instant::now();
    let records = run(cfg);
    let summary = SweepSummary::from_records(&records);
    (records, summary, start.elapsed().as_secs_f64())
}

/// Compact, human-readable digest printed after a sweep.
#[derive(Debug, Serialize)]
pub struct Digest<'a> {
    pub instance_count: usize,
    pub violation_count: usize,
    pub degenerate_count: usize,
    pub min_slack: BTreeMap<&'a str, f64>,
    pub runtime_seconds: f64,
}

impl SweepSummary {
    pub fn digest(&self, runtime_seconds: f64) -> Digest<'_> {
        Digest {
            instance_count: self.instance_count,
            violation_count: self.violation_count,
            degenerate_count: self.degenerate_count,
            min_slack: self
                .checks
                .iter()
                .filter_map(|(k, st)| st.min.map(|(v, _)| (*k, round_sig(v))))
                .collect(),
            runtime_seconds: round_sig(runtime_seconds),
        }
    }
}
