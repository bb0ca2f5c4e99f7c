//! Schema-evolution measurements over a walked history.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entity::{DenormVerdict, EntityClass};
use crate::schema::{ChangeCategory, ChangeKind, SchemaChange, SchemaSnapshot};

/// The per-commit numbers the trend needs, without keeping whole schemas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotStats {
    pub index: usize,
    pub hash: String,
    pub committer_date: String,
    pub n_entities: u64,
    pub schema_loc: u64,
    pub dialect_label: String,
}

impl SnapshotStats {
    pub fn of(s: &SchemaSnapshot) -> Self {
        SnapshotStats {
            index: s.index,
            hash: s.commit.hash.clone(),
            committer_date: s.commit.committer_date.clone(),
            n_entities: s.entities.len() as u64,
            schema_loc: s.schema_loc(),
            dialect_label: s.dialect_label.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub commit_index: usize,
    pub hash: String,
    pub pct_progress: f64,
    pub n_entities: u64,
    pub schema_loc: u64,
    pub n_entities_norm_pct: f64,
    pub schema_loc_norm_pct: f64,
}

fn norm(value: u64, max: u64) -> f64 {
    if max == 0 {
        0.0
    } else {
        100.0 * value as f64 / max as f64
    }
}

/// Entity count and Schema-LoC per commit, each also relative to its
/// maximum over the history; progress is `100·(i+1)/N`.
pub fn trend_series(stats: &[SnapshotStats]) -> Vec<TrendPoint> {
    let n = stats.len();
    let max_entities = stats.iter().map(|s| s.n_entities).max().unwrap_or(0);
    let max_loc = stats.iter().map(|s| s.schema_loc).max().unwrap_or(0);
    stats
        .iter()
        .enumerate()
        .map(|(i, s)| TrendPoint {
            commit_index: s.index,
            hash: s.hash.clone(),
            pct_progress: 100.0 * (i + 1) as f64 / n as f64,
            n_entities: s.n_entities,
            schema_loc: s.schema_loc,
            n_entities_norm_pct: norm(s.n_entities, max_entities),
            schema_loc_norm_pct: norm(s.schema_loc, max_loc),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryShare {
    pub category: ChangeCategory,
    pub count: u64,
    /// Percent, one decimal; the five shares sum to exactly 100 when any
    /// change exists.
    pub share_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeDistribution {
    pub total: u64,
    pub counts: BTreeMap<ChangeKind, u64>,
    pub categories: Vec<CategoryShare>,
}

impl ChangeDistribution {
    pub fn count(&self, kind: ChangeKind) -> u64 {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn share(&self, category: ChangeCategory) -> f64 {
        self.categories.iter().find(|c| c.category == category).map_or(0.0, |c| c.share_pct)
    }
}

/// Rounds `counts/total` to tenths of a percent by largest remainder, so
/// the rounded shares add up to exactly 1000 tenths.
fn tenths(counts: &[u64]) -> Vec<u64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let mut floors: Vec<u64> = counts.iter().map(|c| c * 1000 / total).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // remainder c*1000 mod total, compared exactly; earlier category wins ties
    order.sort_by_key(|&i| std::cmp::Reverse(counts[i] * 1000 % total));
    let missing = 1000 - floors.iter().sum::<u64>();
    for &i in order.iter().take(missing as usize) {
        floors[i] += 1;
    }
    floors
}

pub fn change_distribution<'a>(changes: impl IntoIterator<Item = &'a SchemaChange>) -> ChangeDistribution {
    let mut counts: BTreeMap<ChangeKind, u64> = ChangeKind::ALL.iter().map(|k| (*k, 0)).collect();
    for c in changes {
        *counts.entry(c.kind).or_default() += 1;
    }
    let per_category: Vec<u64> = ChangeCategory::ALL
        .iter()
        .map(|cat| counts.iter().filter(|(k, _)| k.category() == *cat).map(|(_, n)| n).sum())
        .collect();
    let shares = tenths(&per_category);
    ChangeDistribution {
        total: per_category.iter().sum(),
        counts,
        categories: ChangeCategory::ALL
            .iter()
            .zip(per_category.iter().zip(shares))
            .map(|(category, (count, t))| CategoryShare {
                category: *category,
                count: *count,
                share_pct: t as f64 / 10.0,
            })
            .collect(),
    }
}

/// Distribution per mapper label; `label_of` maps a change to the label of
/// the commit it belongs to.
pub fn distribution_by_dialect<'a>(
    changes: &'a [SchemaChange],
    label_of: impl Fn(&SchemaChange) -> &'a str,
) -> BTreeMap<String, ChangeDistribution> {
    let mut groups: BTreeMap<&str, Vec<&SchemaChange>> = BTreeMap::new();
    for c in changes {
        groups.entry(label_of(c)).or_default().push(c);
    }
    groups.into_iter().map(|(label, cs)| (label.to_string(), change_distribution(cs))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChurnStats {
    pub total_commits: u64,
    pub schema_relevant_commits: u64,
    pub churn_rate_pct: f64,
}

/// Share of commits whose diff is non-empty.
pub fn churn_rate(changes: &[SchemaChange], total_commits: u64) -> ChurnStats {
    let relevant = changes.iter().map(|c| c.commit_index).collect::<BTreeSet<_>>().len() as u64;
    let churn_rate_pct = if total_commits == 0 { 0.0 } else { 100.0 * relevant as f64 / total_commits as f64 };
    ChurnStats { total_commits, schema_relevant_commits: relevant, churn_rate_pct }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitializationBreakdown {
    pub added: u64,
    pub removed: u64,
    pub changed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDrilldown {
    #[serde(rename = "type")]
    pub type_changes: u64,
    pub initialization: u64,
    pub annotations: u64,
    pub initialization_breakdown: InitializationBreakdown,
}

pub fn attribute_change_drilldown(changes: &[SchemaChange]) -> AttributeDrilldown {
    let mut d = AttributeDrilldown::default();
    for c in changes {
        match c.kind {
            ChangeKind::AttributeTypeChanged => d.type_changes += 1,
            ChangeKind::AttributeAnnotationChanged => d.annotations += 1,
            ChangeKind::AttributeInitializationChanged => {
                d.initialization += 1;
                let b = &mut d.initialization_breakdown;
                match c.detail.as_ref().map(|x| (x.before.is_some(), x.after.is_some())) {
                    Some((false, true)) => b.added += 1,
                    Some((true, false)) => b.removed += 1,
                    _ => b.changed += 1,
                }
            }
            _ => {}
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityChurn {
    pub qualified_name: String,
    pub change_count: u64,
    /// Schema-LoC and verdict at the entity's last appearance.
    pub schema_loc: u64,
    pub verdict: DenormVerdict,
    pub present_at_end: bool,
    /// `change_count` over the largest count in the project.
    pub relative_frequency: f64,
}

/// One record per entity ever observed, by name.
pub fn entity_churn(
    changes: &[SchemaChange],
    last_seen: &BTreeMap<String, EntityClass>,
    final_entities: &BTreeSet<String>,
) -> Vec<EntityChurn> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for c in changes {
        *counts.entry(&c.entity).or_default() += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0);
    let names: BTreeSet<&str> = last_seen.keys().map(String::as_str).chain(counts.keys().copied()).collect();
    names
        .into_iter()
        .map(|name| {
            let count = counts.get(name).copied().unwrap_or(0);
            let seen = last_seen.get(name);
            EntityChurn {
                qualified_name: name.to_string(),
                change_count: count,
                schema_loc: seen.map_or(0, |e| e.schema_loc),
                verdict: seen.map_or_else(|| DenormVerdict::from_reasons(BTreeSet::new()), |e| e.verdict.clone()),
                present_at_end: final_entities.contains(name),
                relative_frequency: if max == 0 { 0.0 } else { count as f64 / max as f64 },
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("correlation undefined: {0}")]
    DegenerateSeries(&'static str),
}

/// Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::DegenerateSeries("series differ in length"));
    }
    if xs.len() < 2 {
        return Err(MetricsError::DegenerateSeries("fewer than two points"));
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::DegenerateSeries("zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stats(counts: &[u64]) -> Vec<SnapshotStats> {
        counts
            .iter()
            .enumerate()
            .map(|(i, n)| SnapshotStats {
                index: i,
                hash: format!("h{i}"),
                committer_date: String::new(),
                n_entities: *n,
                schema_loc: n * 10,
                dialect_label: "objectify".into(),
            })
            .collect()
    }

    fn change(kind: ChangeKind, index: usize, entity: &str) -> SchemaChange {
        SchemaChange {
            commit_hash: format!("h{index}"),
            commit_index: index,
            committer_date: String::new(),
            kind,
            entity: entity.into(),
            attribute: kind.is_attribute_level().then(|| "a".into()),
            detail: None,
        }
    }

    #[test]
    fn trend_peak_is_hundred() {
        let t = trend_series(&stats(&[0, 41, 82, 82, 70]));
        let norm: Vec<f64> = t.iter().map(|p| p.n_entities_norm_pct).collect();
        assert_eq!(&norm[..4], &[0.0, 50.0, 100.0, 100.0]);
        assert!((norm[4] - 85.365_853_658_5).abs() < 1e-9);
        assert_eq!(t[4].pct_progress, 100.0);
        assert_eq!(t[0].pct_progress, 20.0);
    }

    #[test]
    fn trend_all_zero() {
        let t = trend_series(&stats(&[0]));
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].n_entities_norm_pct, 0.0);
        assert_eq!(t[0].schema_loc_norm_pct, 0.0);
    }

    #[test]
    fn single_entity_added_distribution() {
        let d = change_distribution(&[change(ChangeKind::EntityAdded, 0, "E")]);
        let shares: Vec<f64> = d.categories.iter().map(|c| c.share_pct).collect();
        assert_eq!(shares, vec![100.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_distribution() {
        let d = change_distribution(&[]);
        assert_eq!(d.total, 0);
        assert!(d.categories.iter().all(|c| c.share_pct == 0.0 && c.count == 0));
        assert_eq!(d.counts.len(), 7);
    }

    #[test]
    fn thirds_round_to_hundred() {
        let cs = [
            change(ChangeKind::EntityAdded, 0, "A"),
            change(ChangeKind::EntityRemoved, 1, "A"),
            change(ChangeKind::AttributeTypeChanged, 2, "B"),
        ];
        let d = change_distribution(&cs);
        let shares: Vec<f64> = d.categories.iter().map(|c| c.share_pct).collect();
        assert_eq!(shares, vec![33.4, 33.3, 0.0, 0.0, 33.3]);
    }

    #[test]
    fn churn_examples() {
        let cs: Vec<_> = [1, 1, 4, 7].iter().map(|i| change(ChangeKind::EntityAdded, *i, "E")).collect();
        let c = churn_rate(&cs, 10);
        assert_eq!(c.schema_relevant_commits, 3);
        assert_eq!(c.churn_rate_pct, 30.0);
        assert_eq!(churn_rate(&[], 0).churn_rate_pct, 0.0);
    }

    #[test]
    fn drilldown_breakdown() {
        use crate::schema::ChangeDetail;
        let mut init = change(ChangeKind::AttributeInitializationChanged, 0, "E");
        init.detail = Some(ChangeDetail { before: None, after: Some("1".into()) });
        let mut changed = init.clone();
        changed.detail = Some(ChangeDetail { before: Some("0".into()), after: Some("1".into()) });
        let d = attribute_change_drilldown(&[init, changed, change(ChangeKind::AttributeTypeChanged, 0, "E")]);
        assert_eq!((d.type_changes, d.initialization, d.annotations), (1, 2, 0));
        assert_eq!(d.initialization_breakdown, InitializationBreakdown { added: 1, removed: 0, changed: 1 });
        assert_eq!(attribute_change_drilldown(&[]), AttributeDrilldown::default());
    }

    #[test]
    fn churn_per_entity() {
        let cs = [
            change(ChangeKind::EntityAdded, 0, "A"),
            change(ChangeKind::EntityAdded, 0, "B"),
            change(ChangeKind::AttributeAdded, 1, "A"),
        ];
        let out = entity_churn(&cs, &BTreeMap::new(), &["A".to_string()].into());
        assert_eq!(out.len(), 2);
        assert_eq!((out[0].change_count, out[0].relative_frequency, out[0].present_at_end), (2, 1.0, true));
        assert_eq!((out[1].change_count, out[1].relative_frequency, out[1].present_at_end), (1, 0.5, false));
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-9);
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn shares_sum_to_hundred(counts in proptest::collection::vec(0u64..500, 5)) {
            let t = tenths(&counts);
            let total: u64 = counts.iter().sum();
            prop_assert_eq!(t.iter().sum::<u64>(), if total == 0 { 0 } else { 1000 });
            for (c, r) in counts.iter().zip(&t) {
                // rounding moves each share by less than a tenth
                let exact = if total == 0 { 0.0 } else { 1000.0 * *c as f64 / total as f64 };
                prop_assert!((exact - *r as f64).abs() < 1.0);
            }
        }

        #[test]
        fn trend_max_is_hundred(counts in proptest::collection::vec(0u64..100, 1..30)) {
            let t = trend_series(&stats(&counts));
            let max = t.iter().map(|p| p.n_entities_norm_pct).fold(0.0, f64::max);
            prop_assert!(t.iter().all(|p| (0.0..=100.0).contains(&p.n_entities_norm_pct)));
            if counts.iter().any(|c| *c > 0) { prop_assert_eq!(max, 100.0); } else { prop_assert_eq!(max, 0.0); }
        }

        #[test]
        fn pearson_in_range(xs in proptest::collection::vec(-1e3f64..1e3, 2..20), seed in 0u64..1000) {
            let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * ((seed + i as u64) % 7) as f64 - i as f64).collect();
            if let Ok(r) = pearson(&xs, &ys) {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }
    }
}
