//! Text exports: CSV tables, DOT graphs and the JSON run report.
//!
//! Every writer is deterministic: objects appear in input order unless the
//! format sorts by score, and floats use the shortest round-trip form.

use std::fmt::Write as _;

use serde::Serialize;

use crate::network::{ExemplarNetwork, NeighborhoodSpec, SweepTable};
use crate::relation::quote;
use crate::robustness::{BootstrapReport, OutlierReport};
use crate::scoring::{standard, ScoreVector, TiePolicy};

pub const REPORT_SCHEMA: &str = "exemplar-report/1";

/// `label,score` lines by descending score, ties by input order.
pub fn scores_csv(labels: &[String], scores: &ScoreVector) -> String {
    let mut out = String::new();
    for x in scores.descending() {
        let _ = writeln!(out, "{},{}", quote(&labels[x]), scores.get(x));
    }
    out
}

/// `k,E(k),n-k+1` lines for `k = 1..=n`.
pub fn sweep_csv(sweep: &SweepTable) -> String {
    let n = sweep.len();
    let mut out = String::new();
    for (i, e) in sweep.counts().iter().enumerate() {
        let k = i + 1;
        let _ = writeln!(out, "{k},{e},{}", n - k + 1);
    }
    out
}

/// `label,duration` lines in input order.
pub fn durations_csv(labels: &[String], sweep: &SweepTable) -> String {
    let mut out = String::new();
    for (l, d) in labels.iter().zip(sweep.durations()) {
        let _ = writeln!(out, "{},{d}", quote(l));
    }
    out
}

fn dot_id(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Directed graph of the network. Node width is proportional to the score
/// (the best object gets width 1); exemplars are drawn with a double
/// border. Self-links are not drawn.
pub fn export_dot(labels: &[String], net: &ExemplarNetwork, scores: &ScoreVector) -> String {
    let max = scores.max();
    let mut out = String::new();
    out.push_str("digraph exemplars {\n");
    out.push_str("  node [shape=circle, fixedsize=true];\n");
    for (x, label) in labels.iter().enumerate() {
        let id = dot_id(label);
        let width = if max > 0.0 { scores.get(x) / max } else { 1.0 };
        let _ = write!(out, "  {id} [label={id}, score={}, width={width:.4}", scores.get(x));
        if net.is_exemplar(x) {
            out.push_str(", peripheries=2");
        }
        out.push_str("];\n");
    }
    for (x, &y) in net.links().iter().enumerate() {
        if x != y {
            let _ = writeln!(out, "  {} -> {};", dot_id(&labels[x]), dot_id(&labels[y]));
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub exemplars: usize,
    pub n_minus_k_plus_1: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Robustness<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<&'a BootstrapReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outliers: Option<&'a OutlierReport>,
}

impl Robustness<'_> {
    fn is_empty(&self) -> bool {
        self.bootstrap.is_none() && self.outliers.is_none()
    }
}

/// The JSON run report. Per-object arrays (`scores`, `links`, `durations`)
/// are aligned with `labels`.
#[derive(Clone, Debug, Serialize)]
pub struct Report<'a> {
    pub schema: &'static str,
    pub labels: &'a [String],
    pub tie_policy: TiePolicy,
    pub scores: &'a [f64],
    pub standard: &'a str,
    pub neighborhood: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_optimum: Option<usize>,
    pub links: Vec<&'a str>,
    pub exemplars: Vec<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub durations: Option<&'a [usize]>,
    pub robustness: Option<Robustness<'a>>,
}

impl<'a> Report<'a> {
    /// Sweep fields are only meaningful for k-nearest neighborhoods and are
    /// dropped for graph neighborhoods.
    pub fn new(
        labels: &'a [String],
        tie_policy: TiePolicy,
        scores: &'a ScoreVector,
        net: &'a ExemplarNetwork,
        sweep: Option<&'a SweepTable>,
        robustness: Robustness<'a>,
    ) -> Self {
        let (neighborhood, sweep) = match net.spec() {
            NeighborhoodSpec::Knn(_) => ("knn", sweep),
            NeighborhoodSpec::Graph(_) => ("graph", None),
        };
        let n = labels.len();
        Report {
            schema: REPORT_SCHEMA,
            labels,
            tie_policy,
            scores: scores.scores(),
            standard: &labels[standard(scores)],
            neighborhood,
            k: net.spec().k(),
            k_optimum: sweep.map(SweepTable::k_optimum),
            links: net.links().iter().map(|&y| labels[y].as_str()).collect(),
            exemplars: net.exemplars().iter().map(|&x| labels[x].as_str()).collect(),
            sweep: sweep.map(|s| {
                s.counts()
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| SweepRow {
                        k: i + 1,
                        exemplars: e,
                        n_minus_k_plus_1: n - i,
                    })
                    .collect()
            }),
            durations: sweep.map(SweepTable::durations),
            robustness: (!robustness.is_empty()).then_some(robustness),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::euclidean_line;
    use crate::network::{build_network, scale_sweep};
    use crate::scoring::{aggregated_scores, rank_table};

    #[test]
    fn singleton_dot() {
        let r = euclidean_line(&[0.0]);
        let rk = rank_table(&r, TiePolicy::IndexOrder);
        let sv = aggregated_scores(&rk);
        let net = build_network(&sv, &rk, &NeighborhoodSpec::Knn(1)).unwrap();
        let dot = export_dot(r.labels(), &net, &sv);
        assert_eq!(dot.matches("->").count(), 0);
        assert_eq!(dot.matches("peripheries=2").count(), 1);
    }

    #[test]
    fn csv_tables() {
        let r = euclidean_line(&[0.0, 1.0, 3.0]);
        let rk = rank_table(&r, TiePolicy::IndexOrder);
        let sv = aggregated_scores(&rk);
        let csv = scores_csv(r.labels(), &sv);
        let first: Vec<&str> = csv.lines().map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(first, ["1", "0", "2"]);
        let sweep = scale_sweep(&sv, &rk);
        assert_eq!(sweep_csv(&sweep).lines().next(), Some("1,3,3"));
        assert_eq!(durations_csv(r.labels(), &sweep).lines().count(), 3);
    }

    #[test]
    fn quoted_dot_ids() {
        assert_eq!(dot_id("a\"b"), "\"a\\\"b\"");
    }
}
