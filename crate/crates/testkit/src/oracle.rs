//! A deliberately naive diff: flatten both schemas to `(entity, attribute,
//! facet, value)` facts and read the changes off the set differences.

use std::collections::{BTreeMap, BTreeSet};

use nosqlevo_core::{ChangeDetail, ChangeKind, CommitRef, SchemaChange, SchemaSnapshot};

/// One attribute as the oracle sees it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AttrTuple {
    pub entity: String,
    pub attribute: String,
    pub type_text: String,
    pub init: Option<String>,
    /// Rendered annotation uses in source order, as `(simple name, text)`.
    pub annotations: Vec<(String, String)>,
}

/// A schema reduced to tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TupleSchema {
    pub entities: BTreeSet<String>,
    pub attributes: BTreeSet<AttrTuple>,
}

impl TupleSchema {
    pub fn from_snapshot(s: &SchemaSnapshot) -> Self {
        let mut t = TupleSchema::default();
        for (name, e) in &s.entities {
            t.entities.insert(name.clone());
            for a in &e.attributes {
                t.attributes.insert(AttrTuple {
                    entity: name.clone(),
                    attribute: a.name.clone(),
                    type_text: a.canonical_type.clone(),
                    init: a.initializer_text.clone(),
                    annotations: a.annotations.iter().map(|u| (u.simple_name.clone(), u.to_string())).collect(),
                });
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Facet {
    Exists,
    Type,
    Init,
    Annotation(String),
}

type Fact = (String, String, Facet, Option<String>);

fn facts(schema: &TupleSchema, shared: &BTreeSet<String>) -> BTreeSet<Fact> {
    let mut out = BTreeSet::new();
    for t in schema.attributes.iter().filter(|t| shared.contains(&t.entity)) {
        let key = |f: Facet, v: Option<String>| (t.entity.clone(), t.attribute.clone(), f, v);
        out.insert(key(Facet::Exists, None));
        out.insert(key(Facet::Type, Some(t.type_text.clone())));
        out.insert(key(Facet::Init, t.init.clone()));
        let mut names: Vec<&String> = t.annotations.iter().map(|(n, _)| n).collect();
        names.dedup();
        for name in names.into_iter().collect::<BTreeSet<_>>() {
            let group: Vec<&str> = t.annotations.iter().filter(|(n, _)| n == name).map(|(_, s)| s.as_str()).collect();
            out.insert(key(Facet::Annotation(name.clone()), Some(group.join(" "))));
        }
    }
    out
}

fn value_of(facts: &BTreeSet<Fact>, e: &str, a: &str, f: &Facet) -> Option<Option<String>> {
    facts.iter().find(|(fe, fa, ff, _)| fe == e && fa == a && ff == f).map(|(_, _, _, v)| v.clone())
}

type Row = (String, Option<String>, ChangeKind, Facet, Option<ChangeDetail>);

/// Expected changes taking `prev` to `next`, stamped with `commit`/`index`.
pub fn tuple_diff(prev: &TupleSchema, next: &TupleSchema, commit: &CommitRef, index: usize) -> Vec<SchemaChange> {
    let mut rows: Vec<Row> = Vec::new();
    for e in prev.entities.difference(&next.entities) {
        rows.push((e.clone(), None, ChangeKind::EntityRemoved, Facet::Exists, None));
    }
    for e in next.entities.difference(&prev.entities) {
        rows.push((e.clone(), None, ChangeKind::EntityAdded, Facet::Exists, None));
    }

    let shared: BTreeSet<String> = prev.entities.intersection(&next.entities).cloned().collect();
    let (before, after) = (facts(prev, &shared), facts(next, &shared));
    let touched: BTreeSet<(String, String, Facet)> =
        before.symmetric_difference(&after).map(|(e, a, f, _)| (e.clone(), a.clone(), f.clone())).collect();

    for (e, a, f) in touched {
        let existed = value_of(&before, &e, &a, &Facet::Exists).is_some();
        let exists = value_of(&after, &e, &a, &Facet::Exists).is_some();
        let attr = Some(a.clone());
        match (&f, existed, exists) {
            (Facet::Exists, false, true) => rows.push((e, attr, ChangeKind::AttributeAdded, f, None)),
            (Facet::Exists, true, false) => rows.push((e, attr, ChangeKind::AttributeRemoved, f, None)),
            (_, true, true) => {
                let old = value_of(&before, &e, &a, &f).flatten();
                let new = value_of(&after, &e, &a, &f).flatten();
                let kind = match f {
                    Facet::Type => ChangeKind::AttributeTypeChanged,
                    Facet::Init => ChangeKind::AttributeInitializationChanged,
                    Facet::Annotation(_) => ChangeKind::AttributeAnnotationChanged,
                    Facet::Exists => unreachable!("existence unchanged"),
                };
                rows.push((e, attr, kind, f, Some(ChangeDetail { before: old, after: new })));
            }
            // facets of an attribute that appeared or vanished as a whole
            _ => {}
        }
    }
    rows.sort_by(|x, y| (&x.0, &x.1, x.2, &x.3).cmp(&(&y.0, &y.1, y.2, &y.3)));
    rows.into_iter()
        .map(|(entity, attribute, kind, _, detail)| SchemaChange {
            commit_hash: commit.hash.clone(),
            commit_index: index,
            committer_date: commit.committer_date.clone(),
            kind,
            entity,
            attribute,
            detail,
        })
        .collect()
}

/// [`tuple_diff`] over two extracted snapshots.
pub fn oracle_diff(prev: &SchemaSnapshot, next: &SchemaSnapshot) -> Vec<SchemaChange> {
    tuple_diff(&TupleSchema::from_snapshot(prev), &TupleSchema::from_snapshot(next), &next.commit, next.index)
}

/// Per-kind tally of a change list.
pub fn tally(changes: &[SchemaChange]) -> BTreeMap<ChangeKind, u64> {
    let mut t: BTreeMap<ChangeKind, u64> = ChangeKind::ALL.iter().map(|k| (*k, 0)).collect();
    for c in changes {
        *t.get_mut(&c.kind).expect("all kinds present") += 1;
    }
    t
}
