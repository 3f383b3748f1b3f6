use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::Metrics;

use super::{format_real, train, RunConfig};

/// Median of finite values; `+inf` entries stand for "never happened".
/// Returns `None` if the median itself is infinite or there are no values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let m = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    m.is_finite().then_some(m)
}

/// One line of a comparison table: a single seed or the per-agent median.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub agent: String,
    /// Seed number, or `"median"`.
    pub seed: String,
    /// `"ok"` or `"failed: <reason>"`.
    pub status: String,
    pub mean_final: Option<f64>,
    pub ep_to_thr: Option<f64>,
    pub loss_var: Option<f64>,
    pub reward_std: Option<f64>,
    pub auc: Option<f64>,
    pub first_success: Option<f64>,
}

impl ComparisonRow {
    fn from_result(agent: &str, seed: u64, result: &Result<Metrics>) -> Self {
        match result {
            Ok(m) => ComparisonRow {
                agent: agent.into(),
                seed: seed.to_string(),
                status: "ok".into(),
                mean_final: Some(m.mean_final_reward),
                ep_to_thr: m.episodes_to_threshold.map(|e| e as f64),
                loss_var: m.loss_variance,
                reward_std: Some(m.reward_std),
                auc: m.auc,
                first_success: m.first_success.map(|e| e as f64),
            },
            Err(e) => ComparisonRow {
                agent: agent.into(),
                seed: seed.to_string(),
                status: format!("failed: {e}"),
                mean_final: None,
                ep_to_thr: None,
                loss_var: None,
                reward_std: None,
                auc: None,
                first_success: None,
            },
        }
    }

    fn median_of(agent: &str, rows: &[&ComparisonRow]) -> Self {
        let ok: Vec<&&ComparisonRow> = rows.iter().filter(|r| r.status == "ok").collect();
        let finite = |f: fn(&ComparisonRow) -> Option<f64>| {
            median(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
        };
        // Episode counts that never happened sort after every real count.
        let episodes = |f: fn(&ComparisonRow) -> Option<f64>| {
            median(
                &ok.iter()
                    .map(|r| f(r).unwrap_or(f64::INFINITY))
                    .collect::<Vec<_>>(),
            )
        };
        ComparisonRow {
            agent: agent.into(),
            seed: "median".into(),
            status: format!("{}/{} ok", ok.len(), rows.len()),
            mean_final: finite(|r| r.mean_final),
            ep_to_thr: episodes(|r| r.ep_to_thr),
            loss_var: finite(|r| r.loss_var),
            reward_std: finite(|r| r.reward_std),
            auc: finite(|r| r.auc),
            first_success: episodes(|r| r.first_success),
        }
    }

    fn cells(&self) -> Vec<String> {
        let real = |x: Option<f64>| x.map(format_real).unwrap_or_else(|| "none".into());
        let count = |x: Option<f64>| match x {
            Some(v) if v.fract() == 0.0 => format!("{}", v as u64),
            other => real(other),
        };
        vec![
            self.agent.clone(),
            self.seed.clone(),
            real(self.mean_final),
            count(self.ep_to_thr),
            real(self.loss_var),
            real(self.reward_std),
            real(self.auc),
            count(self.first_success),
            self.status.clone(),
        ]
    }
}

pub const COMPARISON_HEADER: [&str; 9] = [
    "agent",
    "seed",
    "mean_final",
    "ep_to_thr",
    "loss_var",
    "reward_std",
    "auc",
    "first_success",
    "status",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// Per-seed rows for the first config, then the second.
    pub rows: Vec<ComparisonRow>,
    /// One median row per config, in the same order.
    pub medians: Vec<ComparisonRow>,
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

fn to_aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

impl ComparisonReport {
    fn all_rows(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().chain(&self.medians)
    }

    pub fn to_csv(&self) -> String {
        to_csv(
            &COMPARISON_HEADER,
            self.all_rows().map(ComparisonRow::cells),
        )
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<Vec<String>> = self.all_rows().map(ComparisonRow::cells).collect();
        to_aligned(&COMPARISON_HEADER, &rows)
    }

    pub fn median_for(&self, agent: &str) -> Option<&ComparisonRow> {
        self.medians.iter().find(|r| r.agent == agent)
    }
}

fn labels(a: &RunConfig, b: &RunConfig) -> (String, String) {
    if a.agent != b.agent {
        (a.agent.to_string(), b.agent.to_string())
    } else {
        (format!("{}-a", a.agent), format!("{}-b", b.agent))
    }
}

fn write_reports(out_root: Option<&Path>, stem: &str, csv: &str, text: &str) -> Result<()> {
    if let Some(root) = out_root {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        let csv_path = root.join(format!("{stem}.csv"));
        std::fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;
        let txt_path = root.join(format!("{stem}.txt"));
        std::fs::write(&txt_path, text).map_err(|e| Error::io(&txt_path, e))?;
    }
    Ok(())
}

/// Trains both configs on every seed (runs may execute in parallel) and
/// tabulates the metrics. A failed run is reported in its row; the others
/// are unaffected.
pub fn compare(
    a: &RunConfig,
    b: &RunConfig,
    seeds: &[u64],
    out_root: Option<&Path>,
) -> Result<ComparisonReport> {
    if seeds.is_empty() {
        return Err(Error::Config("compare needs at least one seed".into()));
    }
    a.validate()?;
    b.validate()?;
    let (label_a, label_b) = labels(a, b);
    let jobs: Vec<(&str, &RunConfig, u64)> = [(label_a.as_str(), a), (label_b.as_str(), b)]
        .iter()
        .flat_map(|&(label, cfg)| seeds.iter().map(move |&s| (label, cfg, s)))
        .collect();
    let rows: Vec<ComparisonRow> = jobs
        .par_iter()
        .map(|&(label, cfg, seed)| {
            let mut run = cfg.clone();
            run.seed = seed;
            run.render = false;
            run.out_dir = out_root.map(|r| r.join(label).join(format!("seed_{seed}")));
            let result = train(&run).map(|o| o.summary.metrics);
            if let Err(e) = &result {
                log::warn!("{label} seed {seed} failed: {e}");
            }
            ComparisonRow::from_result(label, seed, &result)
        })
        .collect();
    let medians = [&label_a, &label_b]
        .iter()
        .map(|label| {
            let mine: Vec<&ComparisonRow> = rows.iter().filter(|r| &&r.agent == label).collect();
            ComparisonRow::median_of(label, &mine)
        })
        .collect();
    let report = ComparisonReport { rows, medians };
    write_reports(out_root, "comparison", &report.to_csv(), &report.to_text())?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub beta0: f64,
    pub lambda: f64,
    pub row: ComparisonRow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_HEADER: [&str; 11] = [
    "beta0",
    "lambda",
    "seed",
    "mean_final",
    "ep_to_thr",
    "loss_var",
    "reward_std",
    "auc",
    "first_success",
    "status",
    "agent",
];

impl SweepReport {
    fn cells(r: &SweepRow) -> Vec<String> {
        let c = r.row.cells();
        let mut out = vec![r.beta0.to_string(), r.lambda.to_string()];
        out.extend_from_slice(&c[1..]);
        out.push(c[0].clone());
        out
    }

    pub fn to_csv(&self) -> String {
        to_csv(&SWEEP_HEADER, self.rows.iter().map(Self::cells))
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<Vec<String>> = self.rows.iter().map(Self::cells).collect();
        to_aligned(&SWEEP_HEADER, &rows)
    }
}

fn dedup_grid(name: &str, values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if out.iter().any(|o| o.to_bits() == v.to_bits()) {
            log::warn!("duplicate {name} value {v} dropped from sweep grid");
        } else {
            out.push(v);
        }
    }
    out
}

/// One DISRC run per `(beta0, lambda, seed)`; failures are recorded and the
/// sweep continues.
pub fn sweep(
    base: &RunConfig,
    beta0s: &[f64],
    lambdas: &[f64],
    seeds: &[u64],
    out_root: Option<&Path>,
) -> Result<SweepReport> {
    let beta0s = dedup_grid("beta0", beta0s);
    let lambdas = dedup_grid("lambda", lambdas);
    let mut seen_seeds: Vec<u64> = Vec::new();
    for &s in seeds {
        if seen_seeds.contains(&s) {
            log::warn!("duplicate seed {s} dropped from sweep");
        } else {
            seen_seeds.push(s);
        }
    }
    if beta0s.is_empty() || lambdas.is_empty() || seen_seeds.is_empty() {
        return Err(Error::Config(
            "sweep grid and seed list must be nonempty".into(),
        ));
    }
    let mut jobs = Vec::new();
    for &beta0 in &beta0s {
        for &lambda in &lambdas {
            for &seed in &seen_seeds {
                let mut run = base.clone();
                run.disrc.beta0 = beta0;
                run.disrc.lambda = lambda;
                run.seed = seed;
                run.render = false;
                run.out_dir = out_root.map(|r| {
                    r.join(format!("beta0_{beta0}_lambda_{lambda}"))
                        .join(format!("seed_{seed}"))
                });
                run.validate()?;
                jobs.push(run);
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|run| {
            let result = train(run).map(|o| o.summary.metrics);
            if let Err(e) = &result {
                log::warn!(
                    "beta0 {} lambda {} seed {} failed: {e}",
                    run.disrc.beta0,
                    run.disrc.lambda,
                    run.seed
                );
            }
            SweepRow {
                beta0: run.disrc.beta0,
                lambda: run.disrc.lambda,
                row: ComparisonRow::from_result(run.agent.name(), run.seed, &result),
            }
        })
        .collect();
    let report = SweepReport { rows };
    write_reports(out_root, "sweep", &report.to_csv(), &report.to_text())?;
    Ok(report)
}
