//! Correlation of automatic scores with manual evaluation scores.
//!
//! Topic-level scores are first averaged per system, then the resulting
//! system-level vectors are compared with Pearson's r, Spearman's rho
//! (Pearson over fractional ranks), and Kendall's tau-b (tie-corrected).
//! Inputs must be finite; NaNs violate the contract and panic.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scoring::ScoreTable;

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooShort(x.len()));
    }
    Ok(())
}

/// Pearson's product-moment correlation.
///
/// Mean-centered two-pass form; a constant vector is an error naming the
/// offending side.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 {
        return Err(Error::ZeroVariance("left"));
    }
    if var_y == 0.0 {
        return Err(Error::ZeroVariance("right"));
    }
    // Rounding can push a mathematically exact +/-1 a few ulps outside
    // the coefficient's range; keep outputs within it.
    Ok((cov / (var_x * var_y).sqrt()).clamp(-1.0, 1.0))
}

/// Fractional (mean) ranks, 1-based; tied values share the mean of the
/// positions they occupy.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("values are finite"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Mean of the 1-based positions i+1 ..= j+1.
        let rank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

/// Kendall's tau-b by exact pair enumeration with tie correction:
/// `(C - D) / sqrt((n0 - n1) (n0 - n2))` where `n1` and `n2` count pairs
/// tied in x and in y. A fully tied vector is an error naming the side.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let n = x.len();
    let mut concordant = 0u64;
    let mut discordant = 0u64;
    let mut ties_x = 0u64;
    let mut ties_y = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            use std::cmp::Ordering::Equal;
            let dx = x[i].partial_cmp(&x[j]).expect("values are finite");
            let dy = y[i].partial_cmp(&y[j]).expect("values are finite");
            match (dx, dy) {
                (Equal, Equal) => {
                    ties_x += 1;
                    ties_y += 1;
                }
                (Equal, _) => ties_x += 1,
                (_, Equal) => ties_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as u64;
    if ties_x == n0 {
        return Err(Error::AllTied("left"));
    }
    if ties_y == n0 {
        return Err(Error::AllTied("right"));
    }
    let denom = ((n0 - ties_x) as f64 * (n0 - ties_y) as f64).sqrt();
    Ok(((concordant as f64 - discordant as f64) / denom).clamp(-1.0, 1.0))
}

/// One score per system id for a named metric or manual method.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemScoreVector {
    metric_name: String,
    entries: BTreeMap<String, f64>,
}

impl SystemScoreVector {
    pub fn new(metric_name: impl Into<String>, entries: BTreeMap<String, f64>) -> Self {
        SystemScoreVector {
            metric_name: metric_name.into(),
            entries,
        }
    }

    pub fn metric_name(&self) -> &str {
        &self.metric_name
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn get(&self, system_id: &str) -> Option<f64> {
        self.entries.get(system_id).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Averages a metric's topic-level scores into one score per system.
///
/// Systems missing some topics are averaged over the topics they have,
/// with a logged warning. Requesting a metric absent from the table is an
/// error; a duplicated (topic, system) row is too.
pub fn aggregate_to_system(table: &ScoreTable, metric: &str) -> Result<SystemScoreVector> {
    let mut per_system: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    let mut all_topics: BTreeSet<&str> = BTreeSet::new();
    let mut found = false;
    for row in table.rows() {
        if row.metric != metric {
            continue;
        }
        found = true;
        all_topics.insert(row.topic_id.as_str());
        let topics = per_system.entry(row.system_id.as_str()).or_default();
        if topics.insert(row.topic_id.as_str(), row.score).is_some() {
            return Err(Error::File {
                path: "score table".to_string(),
                message: format!(
                    "duplicate row for topic {:?}, system {:?}, metric {metric:?}",
                    row.topic_id, row.system_id
                ),
            });
        }
    }
    if !found {
        return Err(Error::MetricNotFound {
            metric: metric.to_string(),
        });
    }
    let mut entries = BTreeMap::new();
    for (system, topics) in &per_system {
        if topics.len() < all_topics.len() {
            let missing: Vec<&str> = all_topics
                .iter()
                .filter(|t| !topics.contains_key(**t))
                .copied()
                .collect();
            log::warn!(
                "system {system} is missing topics [{}] for {metric}; averaging over {} of {} topics",
                missing.join(", "),
                topics.len(),
                all_topics.len()
            );
        }
        let mean = topics.values().sum::<f64>() / topics.len() as f64;
        entries.insert(system.to_string(), mean);
    }
    Ok(SystemScoreVector::new(metric, entries))
}

/// All three correlation coefficients between two system score vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub pearson: f64,
    pub spearman: f64,
    pub kendall_tau_b: f64,
    /// Number of shared systems the coefficients were computed over.
    pub n_systems: usize,
}

/// Correlates two vectors over their shared system ids (sorted order).
/// Ids present on one side only are dropped with a logged warning; fewer
/// than two shared ids is an error listing both sides.
pub fn correlate(auto: &SystemScoreVector, manual: &SystemScoreVector) -> Result<CorrelationResult> {
    let shared: Vec<&String> = auto
        .entries()
        .keys()
        .filter(|id| manual.entries().contains_key(*id))
        .collect();
    if shared.len() < 2 {
        return Err(Error::InsufficientOverlap {
            left: auto.entries().keys().cloned().collect(),
            right: manual.entries().keys().cloned().collect(),
        });
    }
    for (vector, other, side) in [(auto, manual, "manual"), (manual, auto, "automatic")] {
        let dropped: Vec<&str> = vector
            .entries()
            .keys()
            .filter(|id| !other.entries().contains_key(*id))
            .map(String::as_str)
            .collect();
        if !dropped.is_empty() {
            log::warn!(
                "dropping systems [{}] absent from the {side} side when correlating {} with {}",
                dropped.join(", "),
                auto.metric_name(),
                manual.metric_name()
            );
        }
    }
    let x: Vec<f64> = shared.iter().map(|id| auto.entries()[*id]).collect();
    let y: Vec<f64> = shared.iter().map(|id| manual.entries()[*id]).collect();
    Ok(CorrelationResult {
        pearson: pearson(&x, &y)?,
        spearman: spearman(&x, &y)?,
        kendall_tau_b: kendall_tau_b(&x, &y)?,
        n_systems: shared.len(),
    })
}

/// Loads manual evaluation scores from a CSV file with a
/// `system_id,score` header. Duplicate system ids are an error.
pub fn load_manual_scores(
    path: impl AsRef<Path>,
    method_name: impl Into<String>,
) -> Result<SystemScoreVector> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::File {
            path: label.clone(),
            message: e.to_string(),
        },
        _ => Error::Csv(e),
    })?;
    let headers = reader.headers().map_err(Error::Csv)?.clone();
    let column = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::File {
            path: label.clone(),
            message: format!("missing column {name:?} in header"),
        })
    };
    let id_col = column("system_id")?;
    let score_col = column("score")?;
    let mut entries = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(Error::Csv)?;
        let lineno = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        let system_id = record.get(id_col).unwrap_or_default().trim().to_string();
        if system_id.is_empty() {
            return Err(Error::record(&label, lineno, "empty system_id"));
        }
        let score_text = record.get(score_col).unwrap_or_default().trim();
        let score: f64 = score_text.parse().map_err(|_| {
            Error::record(&label, lineno, format!("invalid score {score_text:?}"))
        })?;
        if !score.is_finite() {
            return Err(Error::record(&label, lineno, format!("non-finite score {score}")));
        }
        if entries.insert(system_id.clone(), score).is_some() {
            return Err(Error::record(
                &label,
                lineno,
                format!("duplicate system id {system_id:?}"),
            ));
        }
    }
    Ok(SystemScoreVector::new(method_name, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::ScoreRow;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pearson_matches_the_frozen_value() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        assert_eq!(pearson(&x, &y).unwrap(), 0.8);
    }

    #[test]
    fn pearson_is_exactly_one_for_linear_integer_data() {
        // Sums divide evenly, so every intermediate value is exact.
        let x = [1.0, 2.0, 3.0, 6.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert_eq!(pearson(&x, &y).unwrap(), 1.0);
        let neg: Vec<f64> = x.iter().map(|v| 10.0 - 3.0 * v).collect();
        assert_eq!(pearson(&x, &neg).unwrap(), -1.0);
    }

    #[test]
    fn fractional_ranks_average_ties() {
        assert_eq!(fractional_ranks(&[10.0, 20.0, 20.0, 30.0]), [1.0, 2.5, 2.5, 4.0]);
        assert_eq!(fractional_ranks(&[5.0, 5.0, 5.0]), [2.0, 2.0, 2.0]);
        assert_eq!(fractional_ranks(&[3.0, 1.0, 2.0]), [3.0, 1.0, 2.0]);
    }

    #[test]
    fn spearman_matches_the_frozen_value() {
        let x = [1.0, 2.0, 2.0, 3.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        let got = spearman(&x, &y).unwrap();
        assert_abs_diff_eq!(got, 0.9f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(got, 0.9486832980505138, epsilon = 1e-15);
    }

    #[test]
    fn spearman_is_exactly_one_for_monotone_data() {
        let x = [1.0, 4.0, 9.0, 16.0, 25.0];
        let y = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(spearman(&x, &y).unwrap(), 1.0);
    }

    #[test]
    fn kendall_matches_the_frozen_value() {
        let x = [1.0, 2.0, 2.0, 3.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        let got = kendall_tau_b(&x, &y).unwrap();
        assert_abs_diff_eq!(got, 5.0 / 30.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(got, 0.9128709291752769, epsilon = 1e-15);
    }

    #[test]
    fn kendall_is_exact_at_the_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let up = [2.0, 3.0, 5.0, 9.0];
        let down = [9.0, 5.0, 3.0, 2.0];
        assert_eq!(kendall_tau_b(&x, &up).unwrap(), 1.0);
        assert_eq!(kendall_tau_b(&x, &down).unwrap(), -1.0);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(Error::TooShort(1))));
        assert!(matches!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::ZeroVariance("left"))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[3.0, 3.0]),
            Err(Error::ZeroVariance("right"))
        ));
        assert!(matches!(
            kendall_tau_b(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::AllTied("left"))
        ));
        assert!(matches!(
            spearman(&[2.0, 2.0], &[1.0, 2.0]),
            Err(Error::ZeroVariance("left"))
        ));
    }

    fn row(topic: &str, system: &str, metric: &str, score: f64) -> ScoreRow {
        ScoreRow {
            topic_id: topic.to_string(),
            system_id: system.to_string(),
            metric: metric.to_string(),
            score,
        }
    }

    #[test]
    fn aggregation_averages_topics_per_system() {
        let table = ScoreTable::new(vec![
            row("t1", "sysA", "SERA-5", 0.2),
            row("t2", "sysA", "SERA-5", 0.4),
            row("t1", "sysB", "SERA-5", 1.0),
            row("t2", "sysB", "SERA-5", 0.0),
            row("t1", "sysA", "GeSERA-5", 0.9),
        ]);
        let vector = aggregate_to_system(&table, "SERA-5").unwrap();
        assert_eq!(vector.len(), 2);
        assert_abs_diff_eq!(vector.get("sysA").unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(vector.get("sysB").unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            aggregate_to_system(&table, "SERA-10"),
            Err(Error::MetricNotFound { .. })
        ));
    }

    #[test]
    fn aggregation_tolerates_missing_topics() {
        let table = ScoreTable::new(vec![
            row("t1", "sysA", "SERA-5", 0.2),
            row("t2", "sysA", "SERA-5", 0.6),
            row("t1", "sysB", "SERA-5", 0.8),
        ]);
        let vector = aggregate_to_system(&table, "SERA-5").unwrap();
        assert_abs_diff_eq!(vector.get("sysA").unwrap(), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(vector.get("sysB").unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn aggregation_rejects_duplicate_rows() {
        let table = ScoreTable::new(vec![
            row("t1", "sysA", "SERA-5", 0.2),
            row("t1", "sysA", "SERA-5", 0.3),
        ]);
        assert!(aggregate_to_system(&table, "SERA-5").is_err());
    }

    fn vector(metric: &str, pairs: &[(&str, f64)]) -> SystemScoreVector {
        SystemScoreVector::new(
            metric,
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        )
    }

    #[test]
    fn correlate_uses_shared_ids_only() {
        let auto = vector("SERA-5", &[("a", 0.1), ("b", 0.2), ("c", 0.3), ("zzz", 0.9)]);
        let manual = vector("pyramid", &[("a", 1.0), ("b", 2.0), ("c", 3.0), ("q", 0.0)]);
        let result = correlate(&auto, &manual).unwrap();
        assert_eq!(result.n_systems, 3);
        assert_abs_diff_eq!(result.pearson, 1.0, epsilon = 1e-12);
        assert_eq!(result.spearman, 1.0);
        assert_eq!(result.kendall_tau_b, 1.0);
    }

    #[test]
    fn correlate_requires_two_shared_ids() {
        let auto = vector("SERA-5", &[("a", 0.1), ("b", 0.2)]);
        let manual = vector("pyramid", &[("a", 1.0), ("x", 2.0)]);
        let err = correlate(&auto, &manual).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('b') && msg.contains('x'), "{msg}");
    }

    #[test]
    fn manual_scores_load_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manual.csv");
        std::fs::write(&path, "system_id,score\nsysA,0.75\nsysB,0.5\n").unwrap();
        let vector = load_manual_scores(&path, "pyramid").unwrap();
        assert_eq!(vector.metric_name(), "pyramid");
        assert_eq!(vector.get("sysA"), Some(0.75));
        assert_eq!(vector.len(), 2);

        std::fs::write(&path, "system_id,score\nsysA,not-a-number\n").unwrap();
        let err = load_manual_scores(&path, "pyramid").unwrap_err();
        assert!(err.to_string().contains("not-a-number"), "{err}");

        std::fs::write(&path, "system_id,score\nsysA,0.1\nsysA,0.2\n").unwrap();
        let err = load_manual_scores(&path, "pyramid").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");

        std::fs::write(&path, "id,value\nsysA,0.1\n").unwrap();
        let err = load_manual_scores(&path, "pyramid").unwrap_err();
        assert!(err.to_string().contains("system_id"), "{err}");
    }
}
