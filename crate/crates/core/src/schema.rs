//! Per-commit schemas and the change taxonomy between consecutive ones.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entity::{extract_entities, EntityClass, MapperDialect, SchemaAttribute};
use crate::history::{CommitRef, Snapshot};
use crate::java::{parse_source, ParseError, SourceFile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaSnapshot {
    pub commit: CommitRef,
    pub index: usize,
    pub entities: BTreeMap<String, EntityClass>,
    pub diagnostics: Vec<String>,
    /// Mapper vocabulary in force (`objectify`, `morphia`, `objectify+morphia`, `none`).
    pub dialect_label: String,
}

impl SchemaSnapshot {
    /// The schema before the first commit.
    pub fn empty() -> Self {
        SchemaSnapshot {
            commit: CommitRef {
                hash: String::new(),
                author_date: String::new(),
                committer_date: String::new(),
                parents: vec![],
            },
            index: 0,
            entities: BTreeMap::new(),
            diagnostics: Vec::new(),
            dialect_label: "none".into(),
        }
    }

    pub fn schema_loc(&self) -> u64 {
        self.entities.values().map(|e| e.schema_loc).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    EntityAdded,
    EntityRemoved,
    AttributeAdded,
    AttributeRemoved,
    AttributeTypeChanged,
    AttributeInitializationChanged,
    AttributeAnnotationChanged,
}

impl ChangeKind {
    pub const ALL: [ChangeKind; 7] = [
        ChangeKind::EntityAdded,
        ChangeKind::EntityRemoved,
        ChangeKind::AttributeAdded,
        ChangeKind::AttributeRemoved,
        ChangeKind::AttributeTypeChanged,
        ChangeKind::AttributeInitializationChanged,
        ChangeKind::AttributeAnnotationChanged,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChangeKind::EntityAdded => "entity_added",
            ChangeKind::EntityRemoved => "entity_removed",
            ChangeKind::AttributeAdded => "attribute_added",
            ChangeKind::AttributeRemoved => "attribute_removed",
            ChangeKind::AttributeTypeChanged => "attribute_type_changed",
            ChangeKind::AttributeInitializationChanged => "attribute_initialization_changed",
            ChangeKind::AttributeAnnotationChanged => "attribute_annotation_changed",
        }
    }

    pub fn is_attribute_level(self) -> bool {
        !matches!(self, ChangeKind::EntityAdded | ChangeKind::EntityRemoved)
    }

    pub fn has_detail(self) -> bool {
        matches!(
            self,
            ChangeKind::AttributeTypeChanged
                | ChangeKind::AttributeInitializationChanged
                | ChangeKind::AttributeAnnotationChanged
        )
    }

    pub fn category(self) -> ChangeCategory {
        match self {
            ChangeKind::EntityAdded => ChangeCategory::EntityAdd,
            ChangeKind::EntityRemoved => ChangeCategory::EntityRemove,
            ChangeKind::AttributeAdded => ChangeCategory::AttributeAdd,
            ChangeKind::AttributeRemoved => ChangeCategory::AttributeRemove,
            _ => ChangeCategory::AttributeChange,
        }
    }

    /// The kind with adds and removes swapped.
    pub fn inverse(self) -> Self {
        match self {
            ChangeKind::EntityAdded => ChangeKind::EntityRemoved,
            ChangeKind::EntityRemoved => ChangeKind::EntityAdded,
            ChangeKind::AttributeAdded => ChangeKind::AttributeRemoved,
            ChangeKind::AttributeRemoved => ChangeKind::AttributeAdded,
            other => other,
        }
    }
}

impl fmt::Display for ChangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChangeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChangeKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| format!("unknown change kind `{s}`"))
    }
}

/// The five top-level categories charted per mapper library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeCategory {
    EntityAdd,
    EntityRemove,
    AttributeAdd,
    AttributeRemove,
    AttributeChange,
}

impl ChangeCategory {
    pub const ALL: [ChangeCategory; 5] = [
        ChangeCategory::EntityAdd,
        ChangeCategory::EntityRemove,
        ChangeCategory::AttributeAdd,
        ChangeCategory::AttributeRemove,
        ChangeCategory::AttributeChange,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChangeDetail {
    pub before: Option<String>,
    pub after: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SchemaChange {
    pub commit_hash: String,
    pub commit_index: usize,
    pub committer_date: String,
    pub kind: ChangeKind,
    pub entity: String,
    pub attribute: Option<String>,
    pub detail: Option<ChangeDetail>,
}

/// Annotations of one attribute grouped by simple name, each group rendered
/// in source order (`@AlsoLoad("a") @AlsoLoad("b")` for repeats).
pub fn annotation_groups(attribute: &SchemaAttribute) -> BTreeMap<String, String> {
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for a in &attribute.annotations {
        groups.entry(a.simple_name.clone()).or_default().push(a.to_string());
    }
    groups.into_iter().map(|(k, v)| (k, v.join(" "))).collect()
}

/// Changes taking `prev` to `next`, ordered by entity, then attribute (entity
/// events first), then kind, then annotation name.
///
/// Attributes of an entity added or removed in this step produce no events
/// of their own.
pub fn diff_snapshots(prev: &SchemaSnapshot, next: &SchemaSnapshot) -> Vec<SchemaChange> {
    let change = |kind, entity: &str, attribute: Option<&str>, detail: Option<ChangeDetail>| SchemaChange {
        commit_hash: next.commit.hash.clone(),
        commit_index: next.index,
        committer_date: next.commit.committer_date.clone(),
        kind,
        entity: entity.to_string(),
        attribute: attribute.map(str::to_string),
        detail,
    };
    let mut out = Vec::new();

    for name in prev.entities.keys().filter(|k| !next.entities.contains_key(*k)) {
        out.push(change(ChangeKind::EntityRemoved, name, None, None));
    }
    for (name, after) in &next.entities {
        let Some(before) = prev.entities.get(name) else {
            out.push(change(ChangeKind::EntityAdded, name, None, None));
            continue;
        };
        let old: BTreeMap<&str, &SchemaAttribute> = before.attributes.iter().map(|a| (a.name.as_str(), a)).collect();
        let new: BTreeMap<&str, &SchemaAttribute> = after.attributes.iter().map(|a| (a.name.as_str(), a)).collect();

        for attr in old.keys().filter(|k| !new.contains_key(*k)) {
            out.push(change(ChangeKind::AttributeRemoved, name, Some(attr), None));
        }
        for (attr, a) in &new {
            let Some(b) = old.get(attr) else {
                out.push(change(ChangeKind::AttributeAdded, name, Some(attr), None));
                continue;
            };
            if a.canonical_type != b.canonical_type {
                let detail =
                    ChangeDetail { before: Some(b.canonical_type.clone()), after: Some(a.canonical_type.clone()) };
                out.push(change(ChangeKind::AttributeTypeChanged, name, Some(attr), Some(detail)));
            }
            if a.initializer_text != b.initializer_text {
                let detail = ChangeDetail { before: b.initializer_text.clone(), after: a.initializer_text.clone() };
                out.push(change(ChangeKind::AttributeInitializationChanged, name, Some(attr), Some(detail)));
            }
            let (ga, gb) = (annotation_groups(a), annotation_groups(b));
            let mut names: Vec<&String> = ga.keys().chain(gb.keys()).collect();
            names.sort();
            names.dedup();
            for n in names {
                let (before, after) = (gb.get(n), ga.get(n));
                if before != after {
                    let detail = ChangeDetail { before: before.cloned(), after: after.cloned() };
                    out.push(change(ChangeKind::AttributeAnnotationChanged, name, Some(attr), Some(detail)));
                }
            }
        }
    }
    out.sort_by(|x, y| (&x.entity, &x.attribute, x.kind).cmp(&(&y.entity, &y.attribute, y.kind)));
    out
}

#[derive(Debug, Clone)]
enum Parsed {
    Ok(Arc<SourceFile>),
    Failed(ParseError),
}

/// Builds schema snapshots along a walk, carrying forward the last good
/// parse of any file that stops parsing.
#[derive(Debug)]
pub struct SchemaBuilder {
    dialect: MapperDialect,
    /// Parse results of the previous snapshot, by path, keyed on blob id.
    previous: HashMap<String, (String, Parsed)>,
    last_good: HashMap<String, Arc<SourceFile>>,
    parsed_any: bool,
}

impl SchemaBuilder {
    pub fn new(dialect: MapperDialect) -> Self {
        SchemaBuilder { dialect, previous: HashMap::new(), last_good: HashMap::new(), parsed_any: false }
    }

    /// Whether any `.java` file has parsed so far.
    pub fn parsed_any(&self) -> bool {
        self.parsed_any
    }

    pub fn build(&mut self, snapshot: &Snapshot) -> SchemaSnapshot {
        let todo: Vec<(&String, &crate::history::SourceBlob)> = snapshot
            .files
            .iter()
            .filter(|(path, blob)| self.previous.get(*path).is_none_or(|(id, _)| *id != blob.id))
            .collect();
        let fresh: HashMap<String, Parsed> = todo
            .par_iter()
            .map(|(path, blob)| {
                let parsed = match parse_source(&blob.text, path) {
                    Ok(f) => Parsed::Ok(Arc::new(f)),
                    Err(e) => Parsed::Failed(e),
                };
                ((*path).clone(), parsed)
            })
            .collect();

        let mut current = HashMap::with_capacity(snapshot.files.len());
        let mut files = Vec::with_capacity(snapshot.files.len());
        let mut diagnostics = Vec::new();
        for (path, blob) in &snapshot.files {
            let parsed = match fresh.get(path) {
                Some(p) => p.clone(),
                None => self.previous[path].1.clone(),
            };
            match &parsed {
                Parsed::Ok(file) => {
                    self.parsed_any = true;
                    self.last_good.insert(path.clone(), file.clone());
                    diagnostics.extend(file.diagnostics.iter().map(|d| format!("{path}: {d}")));
                    files.push(file.clone());
                }
                Parsed::Failed(err) => match self.last_good.get(path) {
                    Some(file) => {
                        diagnostics.push(format!("{path}: {err}; using its last parsable version"));
                        files.push(file.clone());
                    }
                    None => diagnostics.push(format!("{path}: {err}; skipped")),
                },
            }
            current.insert(path.clone(), (blob.id.clone(), parsed));
        }
        self.last_good.retain(|path, _| snapshot.files.contains_key(path));
        self.previous = current;

        let extraction = extract_entities(files.iter().map(|f| f.as_ref()), self.dialect);
        diagnostics.extend(extraction.diagnostics);
        SchemaSnapshot {
            commit: snapshot.commit.clone(),
            index: snapshot.index,
            entities: extraction.entities,
            diagnostics,
            dialect_label: extraction.vocabulary.label().to_string(),
        }
    }
}

/// One-off build without carry-forward history.
pub fn build_schema_snapshot(snapshot: &Snapshot, dialect: MapperDialect) -> SchemaSnapshot {
    SchemaBuilder::new(dialect).build(snapshot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::SourceBlob;

    const OFY: &str = "import com.googlecode.objectify.annotation.*;\n";

    fn commit(i: usize) -> CommitRef {
        CommitRef {
            hash: format!("c{i}"),
            author_date: String::new(),
            committer_date: format!("2020-01-01T00:00:0{i}Z"),
            parents: vec![],
        }
    }

    fn snap(i: usize, files: &[(&str, &str)]) -> Snapshot {
        Snapshot {
            commit: commit(i),
            index: i,
            files: files.iter().map(|(p, t)| (p.to_string(), SourceBlob::from_bytes(t.as_bytes()))).collect(),
        }
    }

    fn kinds(changes: &[SchemaChange]) -> Vec<(ChangeKind, &str, Option<&str>)> {
        changes.iter().map(|c| (c.kind, c.entity.as_str(), c.attribute.as_deref())).collect()
    }

    const PLAYER_A: &str = "import com.googlecode.objectify.annotation.*;
@Entity public class Player {
  @Id Long id;
  String name;
  Integer credits;
  List<Mission> listOfMissions;
}";

    const PLAYER_B: &str = "import com.googlecode.objectify.annotation.*;
@Entity public class Player {
  @Id Long id;
  String name;
  @AlsoLoad(\"credits\") Integer coins;
  List<Mission> listOfMissions;
  Date lastLogin;
  @Ignore int hoursSinceLastLogin;
}";

    #[test]
    fn player_credits_to_coins() {
        let mission = "public class Mission { String title; }";
        let mut b = SchemaBuilder::new(MapperDialect::Auto);
        let s0 = b.build(&snap(0, &[("Player.java", PLAYER_A), ("Mission.java", mission)]));
        assert_eq!(s0.entities.keys().collect::<Vec<_>>(), vec!["Player"]);
        let s1 = b.build(&snap(1, &[("Player.java", PLAYER_B), ("Mission.java", mission)]));
        let d = diff_snapshots(&s0, &s1);
        assert_eq!(
            kinds(&d),
            vec![
                (ChangeKind::AttributeAdded, "Player", Some("coins")),
                (ChangeKind::AttributeRemoved, "Player", Some("credits")),
                (ChangeKind::AttributeAdded, "Player", Some("lastLogin")),
            ]
        );
        assert!(d.iter().all(|c| c.commit_hash == "c1" && c.commit_index == 1));
    }

    #[test]
    fn identity_is_empty() {
        let s = build_schema_snapshot(&snap(0, &[("Player.java", PLAYER_B)]), MapperDialect::Auto);
        assert!(diff_snapshots(&s, &s).is_empty());
    }

    #[test]
    fn added_entity_suppresses_attribute_events() {
        let s1 = build_schema_snapshot(&snap(0, &[("Player.java", PLAYER_A)]), MapperDialect::Auto);
        let d = diff_snapshots(&SchemaSnapshot::empty(), &s1);
        assert_eq!(kinds(&d), vec![(ChangeKind::EntityAdded, "Player", None)]);
        let back = diff_snapshots(&s1, &SchemaSnapshot::empty());
        assert_eq!(kinds(&back), vec![(ChangeKind::EntityRemoved, "Player", None)]);
    }

    #[test]
    fn type_init_and_annotation_events() {
        let a = format!("{OFY}@Entity class E {{ @Id Long id; @AlsoLoad(\"x\") Integer n; String s; }}");
        let b = format!(
            "{OFY}@Entity class E {{ @Id Long id; @AlsoLoad({{\"x\",\"y\"}}) @Index Long n = 0L; String s = \"\"; }}"
        );
        let s0 = build_schema_snapshot(&snap(0, &[("E.java", &a)]), MapperDialect::Auto);
        let s1 = build_schema_snapshot(&snap(1, &[("E.java", &b)]), MapperDialect::Auto);
        let d = diff_snapshots(&s0, &s1);
        assert_eq!(
            kinds(&d),
            vec![
                (ChangeKind::AttributeTypeChanged, "E", Some("n")),
                (ChangeKind::AttributeInitializationChanged, "E", Some("n")),
                (ChangeKind::AttributeAnnotationChanged, "E", Some("n")),
                (ChangeKind::AttributeAnnotationChanged, "E", Some("n")),
                (ChangeKind::AttributeInitializationChanged, "E", Some("s")),
            ]
        );
        let detail = |i: usize| d[i].detail.clone().unwrap();
        assert_eq!(detail(0), ChangeDetail { before: Some("Integer".into()), after: Some("Long".into()) });
        assert_eq!(detail(1), ChangeDetail { before: None, after: Some("0L".into()) });
        assert_eq!(
            detail(2),
            ChangeDetail { before: Some("@AlsoLoad(\"x\")".into()), after: Some("@AlsoLoad({\"x\",\"y\"})".into()) }
        );
        assert_eq!(detail(3), ChangeDetail { before: None, after: Some("@Index".into()) });

        let back = diff_snapshots(&s1, &s0);
        assert_eq!(back.len(), d.len());
    }

    #[test]
    fn superclass_edit_reaches_every_subclass() {
        let base0 = format!("{OFY}abstract class Base {{ Date created; }}");
        let base1 = format!("{OFY}abstract class Base {{ Date created; Date modified; }}");
        let a = format!("{OFY}@Entity class A extends Base {{ @Id Long id; }}");
        let b = format!("{OFY}@Entity class B extends Base {{ @Id Long id; }}");
        let s0 = build_schema_snapshot(
            &snap(0, &[("Base.java", &base0), ("A.java", &a), ("B.java", &b)]),
            MapperDialect::Auto,
        );
        let s1 = build_schema_snapshot(
            &snap(1, &[("Base.java", &base1), ("A.java", &a), ("B.java", &b)]),
            MapperDialect::Auto,
        );
        assert_eq!(
            kinds(&diff_snapshots(&s0, &s1)),
            vec![
                (ChangeKind::AttributeAdded, "A", Some("modified")),
                (ChangeKind::AttributeAdded, "B", Some("modified"))
            ]
        );
    }

    #[test]
    fn broken_file_is_carried_forward() {
        let mut b = SchemaBuilder::new(MapperDialect::Auto);
        let s0 = b.build(&snap(0, &[("Player.java", PLAYER_A)]));
        let broken = format!("{PLAYER_B}\n}}");
        let s1 = b.build(&snap(1, &[("Player.java", &broken)]));
        assert_eq!(s1.entities, s0.entities);
        assert!(s1.diagnostics.iter().any(|d| d.contains("last parsable version")));
        let s2 = b.build(&snap(2, &[("Player.java", PLAYER_B)]));
        assert_eq!(diff_snapshots(&s1, &s2).len(), 3);
    }

    #[test]
    fn deleted_file_is_not_resurrected() {
        let mut b = SchemaBuilder::new(MapperDialect::Auto);
        b.build(&snap(0, &[("Player.java", PLAYER_A)]));
        b.build(&snap(1, &[]));
        let s2 = b.build(&snap(2, &[("Player.java", "class Player {")]));
        assert!(s2.entities.is_empty());
        assert!(s2.diagnostics.iter().any(|d| d.contains("skipped")));
    }

    #[test]
    fn empty_snapshot() {
        let s = build_schema_snapshot(&snap(0, &[]), MapperDialect::Auto);
        assert!(s.entities.is_empty());
        assert!(s.diagnostics.is_empty());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ChangeKind::ALL {
            assert_eq!(k.as_str().parse::<ChangeKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.as_str()));
        }
    }
}
