//! CSV tables written by the command-line verbs.

use sha2::{Digest, Sha256};

use super::{Experiment, HarnessError, Point};
use crate::analysis::{fcc_throughput_bound, pcc_throughput_bound, pcc_user_recursion, Predictor};
use crate::protocol::{control_overhead, Aggregate, Scenario, Scheme, TranscriptStats};

/// First 16 hex digits of the SHA-256 of `text`.
pub fn hash_text(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// In-memory CSV table rendered after a comment header line.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, header: &str) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
        format!("{header}\n{body}")
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Empty for NaN, shortest round-trip form otherwise.
fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn mean_inter(sc: &Scenario) -> f64 {
    let m = sc.users();
    if m < 2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            sum += sc.erasures.between(i, j);
        }
    }
    sum / (m * (m - 1)) as f64
}

fn summary_columns(users: usize) -> Vec<String> {
    let mut c: Vec<String> = ["variant", "scheme", "M", "k", "N", "e_inter"].map(String::from).to_vec();
    c.extend((1..=users).map(|i| format!("e_{i}")));
    c.extend(
        ["F", "trials", "mean_throughput", "ci95", "mean_frames", "incomplete_count", "control_overhead"]
            .map(String::from),
    );
    c
}

fn scenario_fields(p: &Point) -> Vec<String> {
    let sc = &p.scenario;
    let mut r = vec![
        p.variant.clone(),
        sc.scheme().name().to_string(),
        sc.users().to_string(),
        sc.k().to_string(),
        sc.config.symbols_per_slot.to_string(),
        num(mean_inter(sc)),
    ];
    r.extend((0..sc.users()).map(|u| num(sc.erasures.to_dest(u))));
    r.push(sc.config.decode_period.to_string());
    r
}

fn overhead(sc: &Scenario) -> f64 {
    match sc.scheme() {
        Scheme::Pcc => control_overhead(
            sc.users(),
            sc.k(),
            sc.config.packet_bits,
            sc.config.symbols_per_slot,
            sc.config.decode_period,
        ),
        _ => 0.0,
    }
}

/// One row per (axis value, variant): the Monte Carlo aggregate.
pub fn simulation_rows(exp: &Experiment, runs: &[(Point, Vec<TranscriptStats>)]) -> CsvTable {
    let mut t = CsvTable { columns: summary_columns(exp.base.users), rows: Vec::new() };
    for (p, stats) in runs {
        let agg = Aggregate::from_runs(p.scenario.scheme(), stats);
        let mut r = scenario_fields(p);
        r.extend([
            agg.trials.to_string(),
            num(agg.mean_throughput),
            num(agg.ci95),
            num(agg.mean_frames),
            agg.incomplete.to_string(),
            num(overhead(&p.scenario)),
        ]);
        t.row(r);
    }
    t
}

/// Analytical counterpart of [`simulation_rows`]: `mean_throughput` and
/// `mean_frames` are predictions, `trials` and `ci95` are empty and
/// `incomplete_count` is 1 when no decoding is predicted within
/// `max_frames`.
pub fn analysis_rows(exp: &Experiment) -> Result<CsvTable, HarnessError> {
    let mut t = CsvTable { columns: summary_columns(exp.base.users), rows: Vec::new() };
    for p in exp.points()? {
        let sc = &p.scenario;
        let pred = Predictor::new(sc)?.predict()?;
        let fold = if sc.config.fold_overhead { 1.0 - overhead(sc) } else { 1.0 };
        let mut r = scenario_fields(&p);
        r.extend([
            String::new(),
            opt(pred.throughput.map(|x| x * fold)),
            String::new(),
            opt(pred.slots.map(|s| s as f64 / sc.users() as f64)),
            usize::from(pred.slots.is_none()).to_string(),
            num(overhead(sc)),
        ]);
        t.row(r);
    }
    Ok(t)
}

const RECOVERY_COLUMNS: [&str; 6] =
    ["variant", "scheme", "axis_value", "tf", "partner_recovered", "dest_unrecovered"];

/// Per-frame means over trials: partner symbols recovered per observer and
/// partner, and the destination's unrecovered fraction. Runs that ended
/// earlier carry their final state forward.
pub fn recovery_sim_rows(runs: &[(Point, Vec<TranscriptStats>)]) -> CsvTable {
    let mut t = CsvTable { columns: RECOVERY_COLUMNS.map(String::from).to_vec(), rows: Vec::new() };
    for (p, stats) in runs {
        let k = p.scenario.k() as f64;
        let frames = stats.iter().map(|s| s.dest_known_per_tf.len()).max().unwrap_or(0);
        let cooperative = matches!(p.scenario.scheme(), Scheme::Fcc | Scheme::Pcc) && p.scenario.users() > 1;
        for tf in 1..=frames {
            let mut partner = 0.0;
            let mut dest = 0.0;
            for s in stats {
                let last = tf.min(s.dest_known_per_tf.len());
                if last == 0 {
                    dest += 1.0;
                    continue;
                }
                let known = &s.dest_known_per_tf[last - 1];
                dest += 1.0 - known.iter().sum::<usize>() as f64 / (k * known.len() as f64);
                if cooperative {
                    partner += s.mean_partner_recovery(tf.min(s.per_tf_recovery.len())).unwrap_or(0.0);
                }
            }
            let n = stats.len().max(1) as f64;
            t.row(vec![
                p.variant.clone(),
                p.scenario.scheme().name().into(),
                opt(p.axis_value),
                tf.to_string(),
                if cooperative { num(partner / n) } else { String::new() },
                num(dest / n),
            ]);
        }
    }
    t
}

/// Per-frame predictions: PCC partner recovery `s^(i)` from the user-side
/// recursion and the destination's unrecovered fraction, up to the
/// predicted completion (or `max_frames`).
pub fn recovery_analysis_rows(exp: &Experiment) -> Result<CsvTable, HarnessError> {
    let mut t = CsvTable { columns: RECOVERY_COLUMNS.map(String::from).to_vec(), rows: Vec::new() };
    for p in exp.points()? {
        let sc = &p.scenario;
        let m = sc.users();
        let pred = Predictor::new(sc)?;
        let frames = pred.predict()?.frames.unwrap_or(sc.max_frames);
        let traj = match sc.scheme() {
            Scheme::Pcc if m > 1 => Some(pcc_user_recursion(
                &sc.dists[0],
                sc.k(),
                sc.config.symbols_per_slot,
                m,
                mean_inter(sc),
                frames,
            )?),
            _ => None,
        };
        for tf in 1..=frames {
            let p_u = pred.unrecovered(tf * m)?;
            t.row(vec![
                p.variant.clone(),
                sc.scheme().name().into(),
                opt(p.axis_value),
                tf.to_string(),
                traj.as_ref().map(|tr| num(tr.s[tf - 1])).unwrap_or_default(),
                num(p_u.iter().sum::<f64>() / m as f64),
            ]);
        }
    }
    Ok(t)
}

/// Two-user throughput upper bounds, one row per axis value.
pub fn bounds_rows(exp: &Experiment) -> Result<CsvTable, HarnessError> {
    if exp.base.users != 2 {
        return Err(HarnessError::Unsupported("bounds defined for 2-user CMAC".into()));
    }
    let mut t = CsvTable::new(&[
        "axis_value",
        "e_inter",
        "e_1",
        "e_2",
        "fcc_bound",
        "pcc_bound",
        "pcc_bound_loose",
        "l1",
        "l2",
        "reached",
    ]);
    let points = exp.points()?;
    let mut seen: Vec<Option<f64>> = Vec::new();
    for p in &points {
        if seen.contains(&p.axis_value) {
            continue;
        }
        seen.push(p.axis_value);
        // the PCC bound needs Ω's recovery trajectory: prefer a PCC variant
        let sc = &points
            .iter()
            .filter(|q| q.axis_value == p.axis_value)
            .find(|q| q.scenario.scheme() == Scheme::Pcc)
            .unwrap_or(p)
            .scenario;
        let (e, e1, e2) = (sc.erasures.between(0, 1), sc.erasures.to_dest(0), sc.erasures.to_dest(1));
        let traj = pcc_user_recursion(&sc.dists[0], sc.k(), sc.config.symbols_per_slot, 2, e, sc.max_frames)?;
        let b = pcc_throughput_bound(e1, e2, sc.config.symbols_per_slot, sc.k(), &traj.s);
        let frames = |l: Option<usize>| l.map(|v| v.to_string()).unwrap_or_default();
        t.row(vec![
            opt(p.axis_value),
            num(e),
            num(e1),
            num(e2),
            num(fcc_throughput_bound(e, e1, e2)),
            num(b.bound),
            num(b.bound_loose),
            frames(b.l1),
            frames(b.l2),
            b.reached().to_string(),
        ]);
    }
    Ok(t)
}
