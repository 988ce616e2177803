//! Aggregation and statistical analysis of experiment results.
//!
//! Undefined metric values (0/0) are skipped when aggregating and the
//! number skipped is reported. Quartiles use the nearest-rank definition;
//! medians average the two central values of an even-length list.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::dataset::{Ratio, TrainingSize};
use crate::error::{Error, Result};
use crate::experiment::{expected_precision, Metrics, RunResult};
use crate::numeric::{median, nearest_rank};
use crate::oracle::RuleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Precision,
    Recall,
    Accuracy,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Precision,
        Metric::Recall,
        Metric::Accuracy,
        Metric::F1,
    ];

    pub fn of(self, m: &Metrics) -> Option<f64> {
        match self {
            Metric::Precision => m.precision,
            Metric::Recall => m.recall,
            Metric::Accuracy => m.accuracy,
            Metric::F1 => m.f1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::Accuracy => "accuracy",
            Metric::F1 => "f1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Validation {
    Balanced,
    Realistic,
}

impl Validation {
    pub const ALL: [Validation; 2] = [Validation::Balanced, Validation::Realistic];

    pub fn of(self, r: &RunResult) -> &Metrics {
        match self {
            Validation::Balanced => &r.balanced,
            Validation::Realistic => &r.realistic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Validation::Balanced => "balanced",
            Validation::Realistic => "realistic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupBy {
    Size,
    Ratio,
    SizeRatio,
    Rule,
}

/// Group label; ordering follows S < M < L and VF < VE < VFE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKey {
    Size(TrainingSize),
    Ratio(Ratio),
    SizeRatio(TrainingSize, Ratio),
    Rule(RuleId),
}

impl GroupKey {
    pub fn of(group_by: GroupBy, r: &RunResult) -> Self {
        match group_by {
            GroupBy::Size => GroupKey::Size(r.size),
            GroupBy::Ratio => GroupKey::Ratio(r.ratio),
            GroupBy::SizeRatio => GroupKey::SizeRatio(r.size, r.ratio),
            GroupBy::Rule => GroupKey::Rule(r.rule),
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Size(s) => write!(f, "{s}"),
            GroupKey::Ratio(r) => write!(f, "{r}"),
            GroupKey::SizeRatio(s, r) => write!(f, "{s}/{r}"),
            GroupKey::Rule(rule) => write!(f, "{rule}"),
        }
    }
}

/// Defined values of one metric per group, plus how many were undefined.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupValues {
    pub values: Vec<f64>,
    pub undefined: usize,
}

pub fn group_values(
    results: &[RunResult],
    group_by: GroupBy,
    metric: Metric,
    validation: Validation,
) -> BTreeMap<GroupKey, GroupValues> {
    let mut groups: BTreeMap<GroupKey, GroupValues> = BTreeMap::new();
    for r in results {
        let entry = groups.entry(GroupKey::of(group_by, r)).or_default();
        match metric.of(validation.of(r)) {
            Some(v) => entry.values.push(v),
            None => entry.undefined += 1,
        }
    }
    groups
}

/// Median of the defined values per group; `None` for a group with no
/// defined value.
pub fn aggregate_medians(
    results: &[RunResult],
    group_by: GroupBy,
    metric: Metric,
    validation: Validation,
) -> Result<BTreeMap<GroupKey, Option<f64>>> {
    if results.is_empty() {
        return Err(Error::invalid("no results to aggregate"));
    }
    Ok(group_values(results, group_by, metric, validation)
        .into_iter()
        .map(|(k, g)| {
            let m = median(&g.values);
            if m.is_none() {
                log::warn!(
                    "group {k}: no defined {} values ({} undefined)",
                    metric.name(),
                    g.undefined
                );
            }
            (k, m)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub method: PValueMethod,
}

/// Midranks (1-based) of the concatenation `xs ++ ys`.
pub fn midranks(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let all: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by(|&a, &b| all[a].total_cmp(&all[b]));
    let mut ranks = vec![0.0; all.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && all[order[j + 1]] == all[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// U of `xs` from its rank sum: `R₁ − n₁(n₁+1)/2`.
pub fn u_statistic(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("Mann-Whitney U needs two non-empty samples"));
    }
    let ranks = midranks(xs, ys);
    let n1 = xs.len() as f64;
    let r1: f64 = ranks[..xs.len()].iter().sum();
    Ok(r1 - n1 * (n1 + 1.0) / 2.0)
}

/// Largest combined size for which the exact null distribution is used.
pub const EXACT_MAX_TOTAL: usize = 12;

/// Number of `n1`-subsets of ranks `1..=n1+n2` per value of U.
fn u_distribution(n1: usize, n2: usize) -> Vec<u64> {
    let n = n1 + n2;
    let max_sum = n * (n + 1) / 2;
    // ways[k][s]: subsets of size k with rank sum s
    let mut ways = vec![vec![0u64; max_sum + 1]; n1 + 1];
    ways[0][0] = 1;
    for rank in 1..=n {
        for k in (1..=n1.min(rank)).rev() {
            for s in (rank..=max_sum).rev() {
                ways[k][s] += ways[k - 1][s - rank];
            }
        }
    }
    let offset = n1 * (n1 + 1) / 2;
    ways[n1][offset..=offset + n1 * n2].to_vec()
}

/// Exact two-sided p for a tie-free U: `min(1, 2·min(P(U ≤ u), P(U ≥ u)))`.
pub fn exact_p(u: f64, n1: usize, n2: usize) -> f64 {
    let dist = u_distribution(n1, n2);
    let total: u64 = dist.iter().sum();
    let u = u.round() as usize;
    let lower: u64 = dist[..=u.min(dist.len() - 1)].iter().sum();
    let upper: u64 = dist[u.min(dist.len() - 1)..].iter().sum();
    ((2 * lower.min(upper)) as f64 / total as f64).min(1.0)
}

/// Two-sided p from the tie-corrected normal approximation with continuity
/// correction.
pub fn normal_p(u: f64, xs: &[f64], ys: &[f64]) -> f64 {
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let n = n1 + n2;
    let mut all: Vec<f64> = xs.iter().chain(ys).copied().collect();
    all.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1] == all[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let mean = n1 * n2 / 2.0;
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Two-sided Mann-Whitney U test of `xs` against `ys`.
///
/// Exact null distribution when the samples are tie-free and
/// `n1 + n2 <= 12`; otherwise a tie-corrected normal approximation with
/// continuity correction.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<MannWhitney> {
    let u = u_statistic(xs, ys)?;
    let mut all: Vec<f64> = xs.iter().chain(ys).copied().collect();
    all.sort_by(f64::total_cmp);
    let has_ties = all.windows(2).any(|w| w[0] == w[1]);
    if !has_ties && all.len() <= EXACT_MAX_TOTAL {
        Ok(MannWhitney {
            u,
            p: exact_p(u, xs.len(), ys.len()),
            method: PValueMethod::Exact,
        })
    } else {
        Ok(MannWhitney {
            u,
            p: normal_p(u, xs, ys),
            method: PValueMethod::Normal,
        })
    }
}

/// `2·U/(n₁n₂) − 1`; +1 when every x exceeds every y.
pub fn rank_biserial(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let u = u_statistic(xs, ys)?;
    Ok(2.0 * u / (xs.len() as f64 * ys.len() as f64) - 1.0)
}

/// Multiply by the family size, cap at 1.
pub fn bonferroni(pvals: &[f64]) -> Vec<f64> {
    let m = pvals.len() as f64;
    pvals.iter().map(|p| (p * m).min(1.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub group1: String,
    pub group2: String,
    pub u: f64,
    pub p_value: f64,
    pub p_adjusted: f64,
    pub rbc: f64,
    pub n1: usize,
    pub n2: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Size,
    Ratio,
}

/// Pairwise Mann-Whitney tests between the groups of one dimension, with
/// Bonferroni over the emitted family.
pub fn pairwise_analysis(
    results: &[RunResult],
    dimension: Dimension,
    metric: Metric,
    validation: Validation,
) -> Result<Vec<TestResult>> {
    let group_by = match dimension {
        Dimension::Size => GroupBy::Size,
        Dimension::Ratio => GroupBy::Ratio,
    };
    let groups: Vec<(GroupKey, Vec<f64>)> = group_values(results, group_by, metric, validation)
        .into_iter()
        .filter(|(_, g)| !g.values.is_empty())
        .map(|(k, g)| (k, g.values))
        .collect();
    if groups.len() < 2 {
        return Err(Error::invalid(format!(
            "pairwise analysis needs at least two groups with defined {} values",
            metric.name()
        )));
    }
    let mut tests = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let (k1, xs) = &groups[i];
            let (k2, ys) = &groups[j];
            let mw = mann_whitney_u(xs, ys)?;
            tests.push(TestResult {
                group1: k1.to_string(),
                group2: k2.to_string(),
                u: mw.u,
                p_value: mw.p,
                p_adjusted: mw.p,
                rbc: rank_biserial(xs, ys)?,
                n1: xs.len(),
                n2: ys.len(),
            });
        }
    }
    let adjusted = bonferroni(&tests.iter().map(|t| t.p_value).collect::<Vec<_>>());
    for (t, p) in tests.iter_mut().zip(adjusted) {
        t.p_adjusted = p;
    }
    Ok(tests)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub size: TrainingSize,
    pub ratio: Ratio,
    pub validation: Validation,
    /// Rules whose median precision is strictly above each threshold.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdTable {
    pub thresholds: Vec<f64>,
    pub rule_count: usize,
    pub rows: Vec<ThresholdRow>,
}

pub const DEFAULT_THRESHOLDS: [f64; 2] = [0.8, 0.95];

/// Per (size, ratio) and validation, count rules whose median precision is
/// strictly greater than each threshold.
pub fn threshold_table(results: &[RunResult], thresholds: &[f64]) -> ThresholdTable {
    let mut cells: BTreeMap<(TrainingSize, Ratio, Validation), BTreeMap<RuleId, Vec<f64>>> =
        BTreeMap::new();
    let mut rules: Vec<RuleId> = Vec::new();
    for r in results {
        if !rules.contains(&r.rule) {
            rules.push(r.rule);
        }
        for validation in Validation::ALL {
            let per_rule = cells
                .entry((r.size, r.ratio, validation))
                .or_default()
                .entry(r.rule)
                .or_default();
            if let Some(p) = validation.of(r).precision {
                per_rule.push(p);
            }
        }
    }
    let rows = cells
        .into_iter()
        .map(|((size, ratio, validation), per_rule)| {
            let medians: Vec<f64> = per_rule.values().filter_map(|v| median(v)).collect();
            ThresholdRow {
                size,
                ratio,
                validation,
                counts: thresholds
                    .iter()
                    .map(|&t| medians.iter().filter(|&&m| m > t).count())
                    .collect(),
            }
        })
        .collect();
    ThresholdTable {
        thresholds: thresholds.to_vec(),
        rule_count: rules.len(),
        rows,
    }
}

/// Nearest-rank five-number summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(Quartiles {
        min: *sorted.first()?,
        q1: nearest_rank(&sorted, 0.25)?,
        median: nearest_rank(&sorted, 0.5)?,
        q3: nearest_rank(&sorted, 0.75)?,
        max: *sorted.last()?,
    })
}

/// Render a p-value for tables; values below 1e-300 print as `0`.
pub fn display_p(p: f64) -> String {
    if p < 1e-300 {
        "0".into()
    } else if p < 1e-3 {
        format!("{p:.1e}")
    } else {
        format!("{p:.3}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |x| format!("{x:.4}"))
}

fn opt_raw(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Files written by [`emit_report`].
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub summary: PathBuf,
    pub quartiles: PathBuf,
    pub thresholds: PathBuf,
    pub base_rate: PathBuf,
    pub tests: PathBuf,
}

/// Write the markdown summary, quartile CSV, threshold table, pairwise
/// tests and the per-run base-rate consistency CSV into `out_dir`.
pub fn emit_report(results: &[RunResult], out_dir: &Path) -> Result<ReportBundle> {
    if results.is_empty() {
        return Err(Error::invalid("no results to report"));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let bundle = ReportBundle {
        summary: out_dir.join("summary.md"),
        quartiles: out_dir.join("quartiles.csv"),
        thresholds: out_dir.join("thresholds.csv"),
        base_rate: out_dir.join("base_rate.csv"),
        tests: out_dir.join("pairwise.json"),
    };

    // quartiles for boxplots
    let mut csv =
        String::from("group_by,group,validation,metric,n,undefined,min,q1,median,q3,max\n");
    for (group_by, name) in [
        (GroupBy::Size, "size"),
        (GroupBy::Ratio, "ratio"),
        (GroupBy::SizeRatio, "size_ratio"),
        (GroupBy::Rule, "rule"),
    ] {
        for validation in Validation::ALL {
            for metric in Metric::ALL {
                for (key, g) in group_values(results, group_by, metric, validation) {
                    let q = quartiles(&g.values);
                    let cols = q.map_or_else(
                        || ",,,,".to_string(),
                        |q| format!("{},{},{},{},{}", q.min, q.q1, q.median, q.q3, q.max),
                    );
                    writeln!(
                        csv,
                        "{name},{key},{},{},{},{},{cols}",
                        validation.name(),
                        metric.name(),
                        g.values.len(),
                        g.undefined
                    )
                    .expect("write to String");
                }
            }
        }
    }
    write_file(&bundle.quartiles, &csv)?;

    // threshold table
    let table = threshold_table(results, &DEFAULT_THRESHOLDS);
    let mut csv = String::from("size,ratio,validation");
    for t in &table.thresholds {
        write!(csv, ",above_{t}").expect("write to String");
    }
    writeln!(csv, ",rules").expect("write to String");
    for row in &table.rows {
        write!(csv, "{},{},{}", row.size, row.ratio, row.validation.name())
            .expect("write to String");
        for c in &row.counts {
            write!(csv, ",{c}").expect("write to String");
        }
        writeln!(csv, ",{}", table.rule_count).expect("write to String");
    }
    write_file(&bundle.thresholds, &csv)?;

    // base-rate consistency: realistic precision vs. the precision implied
    // by the balanced TPR/FPR at the realistic base rate
    let mut csv = String::from(
        "rule,size,ratio,repetition,balanced_tpr,balanced_fpr,realistic_base_rate,expected_precision,realistic_precision\n",
    );
    for r in results {
        let expected = match (r.balanced.tpr(), r.balanced.fpr()) {
            (Some(tpr), Some(fpr)) => expected_precision(tpr, fpr, r.realistic_base_rate),
            _ => None,
        };
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            r.rule,
            r.size,
            r.ratio,
            r.repetition,
            opt_raw(r.balanced.tpr()),
            opt_raw(r.balanced.fpr()),
            r.realistic_base_rate,
            opt_raw(expected),
            opt_raw(r.realistic.precision)
        )
        .expect("write to String");
    }
    write_file(&bundle.base_rate, &csv)?;

    // pairwise tests
    let mut families = Vec::new();
    for dimension in [Dimension::Size, Dimension::Ratio] {
        for validation in Validation::ALL {
            for metric in Metric::ALL {
                if let Ok(tests) = pairwise_analysis(results, dimension, metric, validation) {
                    families.push(TestFamily {
                        dimension: match dimension {
                            Dimension::Size => "size",
                            Dimension::Ratio => "ratio",
                        },
                        validation,
                        metric,
                        tests,
                    });
                }
            }
        }
    }
    let json = serde_json::to_string_pretty(&families).map_err(|e| Error::Format {
        path: bundle.tests.clone(),
        line: 0,
        message: e.to_string(),
    })?;
    write_file(&bundle.tests, &(json + "\n"))?;

    write_file(
        &bundle.summary,
        &summary_markdown(results, &table, &families)?,
    )?;
    Ok(bundle)
}

#[derive(Debug, Serialize)]
struct TestFamily {
    dimension: &'static str,
    validation: Validation,
    metric: Metric,
    tests: Vec<TestResult>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn summary_markdown(
    results: &[RunResult],
    table: &ThresholdTable,
    families: &[TestFamily],
) -> Result<String> {
    let mut md = String::new();
    let rules = table.rule_count;
    writeln!(md, "# Experiment summary\n").expect("write to String");
    writeln!(md, "{} runs over {rules} rule(s).\n", results.len()).expect("write to String");

    for validation in Validation::ALL {
        writeln!(md, "## Medians by size and ratio ({})\n", validation.name())
            .expect("write to String");
        writeln!(
            md,
            "| config | precision | recall | accuracy | f1 | undefined precision |"
        )
        .expect("write to String");
        writeln!(md, "|---|---|---|---|---|---|").expect("write to String");
        let medians: Vec<_> = Metric::ALL
            .iter()
            .map(|&m| aggregate_medians(results, GroupBy::SizeRatio, m, validation))
            .collect::<Result<_>>()?;
        let undefined = group_values(results, GroupBy::SizeRatio, Metric::Precision, validation);
        for key in medians[0].keys() {
            writeln!(
                md,
                "| {key} | {} | {} | {} | {} | {} |",
                opt(medians[0][key]),
                opt(medians[1][key]),
                opt(medians[2][key]),
                opt(medians[3][key]),
                undefined[key].undefined
            )
            .expect("write to String");
        }
        writeln!(md).expect("write to String");

        for group_by in [GroupBy::Size, GroupBy::Ratio] {
            let p = aggregate_medians(results, group_by, Metric::Precision, validation)?;
            let r = aggregate_medians(results, group_by, Metric::Recall, validation)?;
            let line: Vec<String> = p
                .iter()
                .map(|(k, v)| format!("{k}: precision {} recall {}", opt(*v), opt(r[k])))
                .collect();
            writeln!(md, "- {}", line.join("; ")).expect("write to String");
        }
        writeln!(md).expect("write to String");
    }

    writeln!(md, "## Rules above precision thresholds\n").expect("write to String");
    write!(md, "| config | validation |").expect("write to String");
    for t in &table.thresholds {
        write!(md, " P > {t} |").expect("write to String");
    }
    writeln!(md).expect("write to String");
    writeln!(md, "|---|---|{}", "---|".repeat(table.thresholds.len())).expect("write to String");
    for row in &table.rows {
        write!(
            md,
            "| {}/{} | {} |",
            row.size,
            row.ratio,
            row.validation.name()
        )
        .expect("write to String");
        for c in &row.counts {
            write!(md, " {c}/{rules} |").expect("write to String");
        }
        writeln!(md).expect("write to String");
    }
    writeln!(md).expect("write to String");

    writeln!(md, "## Pairwise Mann-Whitney tests (precision)\n").expect("write to String");
    writeln!(
        md,
        "| dimension | validation | pair | U | p (Bonferroni) | RBC |"
    )
    .expect("write to String");
    writeln!(md, "|---|---|---|---|---|---|").expect("write to String");
    for family in families.iter().filter(|f| f.metric == Metric::Precision) {
        for t in &family.tests {
            writeln!(
                md,
                "| {} | {} | {} vs {} | {} | {} | {:.2} |",
                family.dimension,
                family.validation.name(),
                t.group1,
                t.group2,
                t.u,
                display_p(t.p_adjusted),
                t.rbc
            )
            .expect("write to String");
        }
    }
    Ok(md)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::RESULTS_SCHEMA_VERSION;

    #[test]
    fn mann_whitney_small_exact() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.u, 0.0);
        assert_eq!(r.method, PValueMethod::Exact);
        assert!((r.p - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identical_samples_give_half_product() {
        let xs = [1.0, 2.0, 2.0, 5.0];
        let r = mann_whitney_u(&xs, &xs).unwrap();
        assert_eq!(r.u, 8.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn large_separated_samples() {
        let xs: Vec<f64> = (0..50).map(f64::from).collect();
        let ys: Vec<f64> = (100..150).map(f64::from).collect();
        let r = mann_whitney_u(&xs, &ys).unwrap();
        assert_eq!(r.method, PValueMethod::Normal);
        assert!(r.p < 1e-6);
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
        assert!(rank_biserial(&[1.0], &[]).is_err());
    }

    #[test]
    fn rank_biserial_bounds() {
        assert_eq!(rank_biserial(&[5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(rank_biserial(&[1.0, 2.0], &[5.0, 6.0]).unwrap(), -1.0);
        assert_eq!(rank_biserial(&[3.0; 4], &[3.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn bonferroni_examples() {
        assert_eq!(bonferroni(&[0.01, 0.02, 0.5]), vec![0.03, 0.06, 1.0]);
        assert_eq!(bonferroni(&[0.0]), vec![0.0]);
        assert_eq!(bonferroni(&[0.3]), vec![0.3]);
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(
            midranks(&[1.0, 2.0, 2.0], &[4.0, 2.0]),
            vec![1.0, 3.0, 3.0, 5.0, 3.0]
        );
    }

    #[test]
    fn display_of_tiny_p() {
        assert_eq!(display_p(1e-320), "0");
        assert_eq!(display_p(0.0), "0");
        assert_eq!(display_p(0.25), "0.250");
    }

    #[test]
    fn quartiles_nearest_rank() {
        let q = quartiles(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(
            (q.min, q.q1, q.median, q.q3, q.max),
            (1.0, 2.0, 3.0, 4.0, 5.0)
        );
        assert!(quartiles(&[]).is_none());
    }

    fn result(
        rule: RuleId,
        size: TrainingSize,
        ratio: Ratio,
        rep: usize,
        precision: f64,
    ) -> RunResult {
        let mut m = Metrics::from_counts(1, 0, 1, 0);
        m.precision = Some(precision);
        RunResult {
            schema_version: RESULTS_SCHEMA_VERSION,
            rule,
            size,
            ratio,
            repetition: rep,
            seed: 0,
            balanced: m,
            realistic: Metrics::from_counts(0, 0, 5, 0),
            realistic_base_rate: 0.0,
            realistic_files: vec![],
        }
    }

    #[test]
    fn medians_skip_undefined() {
        let results = vec![
            result(RuleId::Semi, TrainingSize::S, Ratio::VF, 0, 0.2),
            result(RuleId::Semi, TrainingSize::S, Ratio::VF, 1, 0.8),
            result(RuleId::Semi, TrainingSize::S, Ratio::VF, 2, 1.0),
            result(RuleId::Semi, TrainingSize::M, Ratio::VF, 0, 0.4),
            result(RuleId::Semi, TrainingSize::M, Ratio::VF, 1, 0.6),
        ];
        let m = aggregate_medians(
            &results,
            GroupBy::Size,
            Metric::Precision,
            Validation::Balanced,
        )
        .unwrap();
        assert_eq!(m[&GroupKey::Size(TrainingSize::S)], Some(0.8));
        assert_eq!(m[&GroupKey::Size(TrainingSize::M)], Some(0.5));
        let realistic = aggregate_medians(
            &results,
            GroupBy::Size,
            Metric::Precision,
            Validation::Realistic,
        )
        .unwrap();
        assert!(realistic.values().all(Option::is_none));
        assert!(
            aggregate_medians(&[], GroupBy::Size, Metric::Precision, Validation::Balanced).is_err()
        );
    }

    #[test]
    fn pairwise_over_three_sizes() {
        let mut results = Vec::new();
        for (i, size) in [TrainingSize::S, TrainingSize::M, TrainingSize::L]
            .into_iter()
            .enumerate()
        {
            for rep in 0..10 {
                results.push(result(
                    RuleId::Semi,
                    size,
                    Ratio::VF,
                    rep,
                    i as f64 + rep as f64 / 100.0,
                ));
            }
        }
        let tests = pairwise_analysis(
            &results,
            Dimension::Size,
            Metric::Precision,
            Validation::Balanced,
        )
        .unwrap();
        assert_eq!(tests.len(), 3);
        assert_eq!(
            (tests[0].group1.as_str(), tests[0].group2.as_str()),
            ("S", "M")
        );
        assert_eq!(tests[0].rbc, -1.0);
        for t in &tests {
            assert!((t.p_adjusted - (t.p_value * 3.0).min(1.0)).abs() < 1e-15);
        }

        let single: Vec<_> = results
            .iter()
            .filter(|r| r.size == TrainingSize::S)
            .cloned()
            .collect();
        assert!(pairwise_analysis(
            &single,
            Dimension::Size,
            Metric::Precision,
            Validation::Balanced
        )
        .is_err());
    }

    #[test]
    fn threshold_counts_are_strict() {
        let results = vec![
            result(RuleId::Semi, TrainingSize::L, Ratio::VE, 0, 0.9),
            result(RuleId::Quotes, TrainingSize::L, Ratio::VE, 0, 1.0),
            result(RuleId::NoVar, TrainingSize::L, Ratio::VE, 0, 0.8),
        ];
        let table = threshold_table(&results, &DEFAULT_THRESHOLDS);
        assert_eq!(table.rule_count, 3);
        let row = table
            .rows
            .iter()
            .find(|r| r.validation == Validation::Balanced)
            .unwrap();
        assert_eq!(row.counts, vec![2, 1]);
    }

    #[test]
    fn report_for_one_run_is_deterministic() {
        let results = vec![result(RuleId::Semi, TrainingSize::S, Ratio::VF, 0, 1.0)];
        let dir = tempfile::tempdir().unwrap();
        let bundle = emit_report(&results, dir.path()).unwrap();
        let first: Vec<Vec<u8>> = [
            &bundle.summary,
            &bundle.quartiles,
            &bundle.thresholds,
            &bundle.base_rate,
            &bundle.tests,
        ]
        .iter()
        .map(|p| fs::read(p).unwrap())
        .collect();
        emit_report(&results, dir.path()).unwrap();
        let second: Vec<Vec<u8>> = [
            &bundle.summary,
            &bundle.quartiles,
            &bundle.thresholds,
            &bundle.base_rate,
            &bundle.tests,
        ]
        .iter()
        .map(|p| fs::read(p).unwrap())
        .collect();
        assert_eq!(first, second);
        let base_rate = fs::read_to_string(&bundle.base_rate).unwrap();
        assert_eq!(base_rate.lines().count(), 2);
        assert!(emit_report(&[], dir.path()).is_err());
    }
}
