//! Mapper semantics on top of parsed declarations: which classes are
//! persisted entities, which of their fields are schema-relevant, whether the
//! entity is denormalized, and how large it is in code lines.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::java::{AnnotationUse, ClassDecl, ClassKind, FieldDecl, Modifier, SourceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapperDialect {
    Objectify,
    Morphia,
    #[default]
    Auto,
}

impl fmt::Display for MapperDialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapperDialect::Objectify => "objectify",
            MapperDialect::Morphia => "morphia",
            MapperDialect::Auto => "auto",
        })
    }
}

impl FromStr for MapperDialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "objectify" => Ok(MapperDialect::Objectify),
            "morphia" => Ok(MapperDialect::Morphia),
            "auto" => Ok(MapperDialect::Auto),
            other => Err(format!("unknown mapper `{other}` (expected objectify, morphia or auto)")),
        }
    }
}

/// The annotation vocabulary in force for one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    pub objectify: bool,
    pub morphia: bool,
    /// Some file imports an Objectify or Morphia package; gates the `@Id` fallback.
    pub mapper_imported: bool,
}

impl Vocabulary {
    pub fn resolve<'a>(dialect: MapperDialect, files: impl IntoIterator<Item = &'a SourceFile>) -> Self {
        let (mut objectify, mut morphia) = (false, false);
        for import in files.into_iter().flat_map(|f| f.imports.iter()) {
            objectify |= import.contains("objectify");
            morphia |= import.contains("morphia");
        }
        let mapper_imported = objectify || morphia;
        match dialect {
            MapperDialect::Objectify => Vocabulary { objectify: true, morphia: false, mapper_imported },
            MapperDialect::Morphia => Vocabulary { objectify: false, morphia: true, mapper_imported },
            MapperDialect::Auto if !mapper_imported => Vocabulary { objectify: true, morphia: true, mapper_imported },
            MapperDialect::Auto => Vocabulary { objectify, morphia, mapper_imported },
        }
    }

    /// `objectify`, `morphia`, `objectify+morphia`, or `none` when auto-detection
    /// found no mapper import.
    pub fn label(&self) -> &'static str {
        match (self.objectify, self.morphia, self.mapper_imported) {
            (true, true, false) => "none",
            (true, true, true) => "objectify+morphia",
            (true, false, _) => "objectify",
            (false, true, _) => "morphia",
            (false, false, _) => "none",
        }
    }

    fn excludes(&self, field: &FieldDecl) -> bool {
        field.modifiers.contains(&Modifier::Static)
            || field.modifiers.contains(&Modifier::Transient)
            || (self.objectify && field.has_annotation("Ignore"))
            || (self.morphia && field.has_annotation("Transient"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "from")]
pub enum AttributeOrigin {
    Declared,
    Inherited(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaAttribute {
    pub name: String,
    pub canonical_type: String,
    pub annotations: Vec<AnnotationUse>,
    pub initializer_text: Option<String>,
    pub origin: AttributeOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenormReason {
    ContainerType,
    NestedEntityType,
    UnknownType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Normalized,
    Denormalized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenormVerdict {
    pub classification: Classification,
    pub reasons: BTreeSet<DenormReason>,
}

impl DenormVerdict {
    pub fn from_reasons(reasons: BTreeSet<DenormReason>) -> Self {
        let classification = if reasons.is_empty() { Classification::Normalized } else { Classification::Denormalized };
        DenormVerdict { classification, reasons }
    }

    pub fn is_denormalized(&self) -> bool {
        self.classification == Classification::Denormalized
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionBasis {
    EntityAnnotation,
    InheritedEntityAnnotation,
    IdFallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityClass {
    pub qualified_name: String,
    pub source_path: String,
    pub attributes: Vec<SchemaAttribute>,
    pub verdict: DenormVerdict,
    pub schema_loc: u64,
    /// In-snapshot superclasses, nearest first.
    pub super_chain: Vec<String>,
    pub detection_basis: DetectionBasis,
}

impl EntityClass {
    pub fn attribute(&self, name: &str) -> Option<&SchemaAttribute> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

/// An entity-class as found by detection, before attribute resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectedEntity {
    pub qualified_name: String,
    pub source_path: String,
    pub super_chain: Vec<String>,
    pub detection_basis: DetectionBasis,
}

const WHITELIST: &[&str] = &[
    "boolean",
    "byte",
    "char",
    "short",
    "int",
    "long",
    "float",
    "double",
    "Boolean",
    "Byte",
    "Character",
    "Short",
    "Integer",
    "Long",
    "Float",
    "Double",
    "String",
];

const CONTAINER_HEADS: &[&str] = &[
    "List",
    "Set",
    "Map",
    "Collection",
    "Queue",
    "Deque",
    "ArrayList",
    "HashSet",
    "HashMap",
    "LinkedList",
    "TreeMap",
    "TreeSet",
    "Iterable",
];

#[derive(Debug, Clone, Copy)]
pub struct IndexedClass<'a> {
    pub decl: &'a ClassDecl,
    pub file: &'a SourceFile,
    /// Qualified name of the enclosing declaration for nested classes.
    pub enclosing: Option<&'a str>,
}

/// Why a superclass walk stopped before reaching a root class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainIssue {
    /// Third-party or otherwise undeclared superclass; expected and common.
    Unresolved(String),
    Ambiguous(String),
    Cycle(String),
}

impl ChainIssue {
    pub fn message(&self) -> &str {
        match self {
            ChainIssue::Unresolved(m) | ChainIssue::Ambiguous(m) | ChainIssue::Cycle(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Found(String),
    NotFound,
    Ambiguous(Vec<String>),
}

/// All declarations of one snapshot, keyed by qualified name.
#[derive(Debug)]
pub struct ClassIndex<'a> {
    classes: BTreeMap<&'a str, IndexedClass<'a>>,
    by_simple: HashMap<&'a str, Vec<&'a str>>,
    pub diagnostics: Vec<String>,
}

impl<'a> ClassIndex<'a> {
    /// Indexes every declaration; on duplicate qualified names the file with
    /// the lexicographically smallest path wins.
    pub fn build(files: impl IntoIterator<Item = &'a SourceFile>) -> Self {
        let mut files: Vec<&SourceFile> = files.into_iter().collect();
        files.sort_by(|a, b| a.path.cmp(&b.path));
        let mut index = ClassIndex { classes: BTreeMap::new(), by_simple: HashMap::new(), diagnostics: Vec::new() };
        for file in files {
            for top in &file.classes {
                index.insert(top, file, None);
            }
        }
        for names in index.by_simple.values_mut() {
            names.sort_unstable();
        }
        index
    }

    fn insert(&mut self, decl: &'a ClassDecl, file: &'a SourceFile, enclosing: Option<&'a str>) {
        if let Some(existing) = self.classes.get(decl.qualified_name.as_str()) {
            self.diagnostics.push(format!(
                "duplicate class {} in {} and {}; keeping {}",
                decl.qualified_name, existing.file.path, file.path, existing.file.path
            ));
        } else {
            self.classes.insert(&decl.qualified_name, IndexedClass { decl, file, enclosing });
            self.by_simple.entry(&decl.simple_name).or_default().push(&decl.qualified_name);
        }
        for nested in &decl.nested {
            self.insert(nested, file, Some(&decl.qualified_name));
        }
    }

    pub fn get(&self, qualified_name: &str) -> Option<&IndexedClass<'a>> {
        self.classes.get(qualified_name)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &IndexedClass<'a>> {
        self.classes.values()
    }

    /// Resolves a type name as referenced from inside `context` (a qualified
    /// class name): enclosing scopes, single-type imports, the package,
    /// wildcard imports, then a unique simple name across the snapshot.
    pub fn resolve(&self, type_text: &str, context: &str) -> Resolution {
        let (head, _) = type_head(type_text);
        if head.is_empty() {
            return Resolution::NotFound;
        }
        if self.classes.contains_key(head.as_str()) && head.contains('.') {
            return Resolution::Found(head);
        }
        let (first, rest) = match head.split_once('.') {
            Some((f, r)) => (f, Some(r)),
            None => (head.as_str(), None),
        };
        let finish = |base: String| -> Option<String> {
            let full = match rest {
                Some(r) => format!("{base}.{r}"),
                None => base,
            };
            self.classes.contains_key(full.as_str()).then_some(full)
        };

        let Some(ctx) = self.classes.get(context) else {
            return Resolution::NotFound;
        };

        let mut scope = Some(context);
        while let Some(s) = scope {
            if let Some(found) = finish(format!("{s}.{first}")) {
                return Resolution::Found(found);
            }
            scope = self.classes.get(s).and_then(|c| c.enclosing);
        }

        for import in &ctx.file.imports {
            if import.rsplit('.').next() == Some(first) {
                // an explicit import may point outside the snapshot
                return finish(import.clone()).map_or(Resolution::NotFound, Resolution::Found);
            }
        }

        let package = &ctx.file.package_name;
        let in_package = if package.is_empty() { first.to_string() } else { format!("{package}.{first}") };
        if let Some(found) = finish(in_package) {
            return Resolution::Found(found);
        }
        for import in &ctx.file.imports {
            if let Some(pkg) = import.strip_suffix(".*") {
                if let Some(found) = finish(format!("{pkg}.{first}")) {
                    return Resolution::Found(found);
                }
            }
        }

        if rest.is_none() && !head.contains('.') {
            match self.by_simple.get(first).map(Vec::as_slice) {
                Some([only]) => return Resolution::Found(only.to_string()),
                Some(many) if many.len() > 1 => {
                    return Resolution::Ambiguous(many.iter().map(|s| s.to_string()).collect())
                }
                _ => {}
            }
        } else if let Some(found) = finish(first.to_string()) {
            return Resolution::Found(found);
        }
        Resolution::NotFound
    }

    /// Longest chain of superclasses resolvable within the snapshot, nearest
    /// first, plus what stopped the walk early.
    pub fn super_chain(&self, qualified_name: &str) -> (Vec<String>, Option<ChainIssue>) {
        let mut chain = Vec::new();
        let mut issue = None;
        let mut current = qualified_name.to_string();
        while let Some(class) = self.classes.get(current.as_str()) {
            let Some(sup) = &class.decl.superclass_name else { break };
            match self.resolve(sup, &current) {
                Resolution::Found(next) => {
                    if next == qualified_name || chain.contains(&next) {
                        issue = Some(ChainIssue::Cycle(format!(
                            "inheritance cycle through {qualified_name} at {next}; chain cut"
                        )));
                        break;
                    }
                    chain.push(next.clone());
                    current = next;
                }
                Resolution::NotFound => {
                    issue = Some(ChainIssue::Unresolved(format!(
                        "{current}: superclass `{sup}` is not declared in the snapshot"
                    )));
                    break;
                }
                Resolution::Ambiguous(candidates) => {
                    issue = Some(ChainIssue::Ambiguous(format!(
                        "{current}: superclass `{sup}` is ambiguous ({}); left unresolved",
                        candidates.join(", ")
                    )));
                    break;
                }
            }
        }
        (chain, issue)
    }
}

/// Splits canonical type text into its erased head (`java.util.List` for
/// `java.util.List<Mission>[]`) and whether it carries an array suffix.
pub fn type_head(type_text: &str) -> (String, bool) {
    let mut text = type_text.trim();
    // leading type annotations: `@NonNull String`, `@Size(max=3) String`
    while let Some(rest) = text.strip_prefix('@') {
        let mut depth = 0i32;
        let mut cut = rest.len();
        for (i, c) in rest.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ' ' if depth == 0 => {
                    cut = i + 1;
                    break;
                }
                _ => {}
            }
        }
        text = rest[cut..].trim_start();
    }
    let is_array = text.ends_with("[]");
    let mut head = String::with_capacity(text.len());
    let mut depth = 0i32;
    for c in text.chars() {
        match c {
            '<' => depth += 1,
            '>' => depth -= 1,
            '[' | ']' if depth == 0 => {}
            _ if depth == 0 => head.push(c),
            _ => {}
        }
    }
    (head, is_array)
}

fn simple_of(head: &str) -> &str {
    head.rsplit('.').next().unwrap_or(head)
}

/// Selects entity-classes: `@Entity` on the class or an in-snapshot
/// superclass, or (when a mapper package is imported) an `@Id` field
/// declared or inherited. Interfaces and enums are never entities.
pub fn detect_entity_classes(index: &ClassIndex<'_>, vocabulary: &Vocabulary) -> (Vec<DetectedEntity>, Vec<String>) {
    let mut detected = Vec::new();
    let mut diagnostics = Vec::new();
    for class in index.iter() {
        let decl = class.decl;
        if matches!(decl.kind, ClassKind::Interface | ClassKind::Enum) {
            continue;
        }
        let (chain, issue) = index.super_chain(&decl.qualified_name);
        let supers = || chain.iter().filter_map(|q| index.get(q));
        let basis = if decl.has_annotation("Entity") {
            Some(DetectionBasis::EntityAnnotation)
        } else if supers().any(|s| s.decl.has_annotation("Entity")) {
            Some(DetectionBasis::InheritedEntityAnnotation)
        } else if vocabulary.mapper_imported
            && std::iter::once(class).chain(supers()).any(|c| c.decl.fields.iter().any(|f| f.has_annotation("Id")))
        {
            Some(DetectionBasis::IdFallback)
        } else {
            None
        };
        match &issue {
            Some(ChainIssue::Unresolved(m)) if basis.is_some() => diagnostics.push(m.clone()),
            Some(ChainIssue::Ambiguous(m) | ChainIssue::Cycle(m)) => diagnostics.push(m.clone()),
            _ => {}
        }
        if let Some(detection_basis) = basis {
            detected.push(DetectedEntity {
                qualified_name: decl.qualified_name.clone(),
                source_path: class.file.path.clone(),
                super_chain: chain,
                detection_basis,
            });
        }
    }
    (detected, diagnostics)
}

/// Own and inherited fields; the most-derived declaration of a name wins
/// and is then filtered for exclusion markers.
pub fn resolve_schema_attributes(
    entity: &DetectedEntity,
    index: &ClassIndex<'_>,
    vocabulary: &Vocabulary,
) -> Vec<SchemaAttribute> {
    let mut slots: Vec<Option<SchemaAttribute>> = Vec::new();
    let mut position: HashMap<&str, usize> = HashMap::new();

    let lineage = entity.super_chain.iter().rev().chain(std::iter::once(&entity.qualified_name));
    for owner in lineage {
        let Some(class) = index.get(owner) else { continue };
        let origin = if *owner == entity.qualified_name {
            AttributeOrigin::Declared
        } else {
            AttributeOrigin::Inherited(owner.clone())
        };
        for field in &class.decl.fields {
            let attr = (!vocabulary.excludes(field)).then(|| SchemaAttribute {
                name: field.name.clone(),
                canonical_type: field.type_text.clone(),
                annotations: field.annotations.clone(),
                initializer_text: field.initializer_text.clone(),
                origin: origin.clone(),
            });
            match position.get(field.name.as_str()) {
                Some(&i) => slots[i] = attr,
                None => {
                    position.insert(&field.name, slots.len());
                    slots.push(attr);
                }
            }
        }
    }
    slots.into_iter().flatten().collect()
}

/// The reason an attribute type makes its entity denormalized, if any.
pub fn classify_attribute_type(
    type_text: &str,
    context: &str,
    index: &ClassIndex<'_>,
    entity_names: &BTreeSet<String>,
) -> Option<DenormReason> {
    let (head, is_array) = type_head(type_text);
    if is_array {
        return Some(DenormReason::ContainerType);
    }
    let simple = simple_of(&head);
    if WHITELIST.contains(&simple) && (head == simple || head == format!("java.lang.{simple}")) {
        return None;
    }
    if CONTAINER_HEADS.contains(&simple) {
        return Some(DenormReason::ContainerType);
    }
    match index.resolve(&head, context) {
        Resolution::Found(q) => {
            let has_fields = index.get(&q).is_some_and(|c| !c.decl.fields.is_empty());
            if entity_names.contains(&q) || has_fields {
                Some(DenormReason::NestedEntityType)
            } else {
                Some(DenormReason::UnknownType)
            }
        }
        _ => Some(DenormReason::UnknownType),
    }
}

pub fn classify_denormalization(
    entity_name: &str,
    attributes: &[SchemaAttribute],
    index: &ClassIndex<'_>,
    entity_names: &BTreeSet<String>,
) -> DenormVerdict {
    let reasons = attributes
        .iter()
        .filter_map(|a| {
            let context = match &a.origin {
                AttributeOrigin::Declared => entity_name,
                AttributeOrigin::Inherited(from) => from.as_str(),
            };
            classify_attribute_type(&a.canonical_type, context, index, entity_names)
        })
        .collect();
    DenormVerdict::from_reasons(reasons)
}

/// Code lines of the entity's declaration plus every in-snapshot superclass.
/// A superclass shared by several entities counts once for each of them.
pub fn compute_schema_loc(entity: &DetectedEntity, index: &ClassIndex<'_>) -> u64 {
    std::iter::once(&entity.qualified_name)
        .chain(&entity.super_chain)
        .filter_map(|q| index.get(q))
        .map(|c| u64::from(c.decl.code_line_count))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub entities: BTreeMap<String, EntityClass>,
    pub vocabulary: Vocabulary,
    pub diagnostics: Vec<String>,
}

impl Extraction {
    /// Snapshot-level Schema-LoC: the sum of per-entity values.
    pub fn schema_loc(&self) -> u64 {
        self.entities.values().map(|e| e.schema_loc).sum()
    }
}

/// Runs detection, attribute resolution, denormalization and Schema-LoC for
/// one snapshot's parsed files.
pub fn extract_entities<'a>(
    files: impl IntoIterator<Item = &'a SourceFile> + Clone,
    dialect: MapperDialect,
) -> Extraction {
    let vocabulary = Vocabulary::resolve(dialect, files.clone());
    let index = ClassIndex::build(files);
    let (detected, mut diagnostics) = detect_entity_classes(&index, &vocabulary);
    diagnostics.splice(0..0, index.diagnostics.iter().cloned());

    let entity_names: BTreeSet<String> = detected.iter().map(|d| d.qualified_name.clone()).collect();
    let entities = detected
        .into_iter()
        .map(|d| {
            let attributes = resolve_schema_attributes(&d, &index, &vocabulary);
            let verdict = classify_denormalization(&d.qualified_name, &attributes, &index, &entity_names);
            let schema_loc = compute_schema_loc(&d, &index);
            let entity = EntityClass {
                qualified_name: d.qualified_name.clone(),
                source_path: d.source_path,
                attributes,
                verdict,
                schema_loc,
                super_chain: d.super_chain,
                detection_basis: d.detection_basis,
            };
            (d.qualified_name, entity)
        })
        .collect();
    Extraction { entities, vocabulary, diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parse_source;

    const OFY: &str = "import com.googlecode.objectify.annotation.*;\n";

    fn files(sources: &[(&str, &str)]) -> Vec<SourceFile> {
        sources.iter().map(|(p, s)| parse_source(s, p).unwrap()).collect()
    }

    fn extract(sources: &[(&str, &str)]) -> Extraction {
        extract_entities(&files(sources), MapperDialect::Auto)
    }

    fn names(attrs: &[SchemaAttribute]) -> Vec<&str> {
        attrs.iter().map(|a| a.name.as_str()).collect()
    }

    #[test]
    fn no_annotations_no_entities() {
        let x = extract(&[("A.java", "class A { Long id; String s; }")]);
        assert!(x.entities.is_empty());
    }

    #[test]
    fn inherited_entity_annotation() {
        let x = extract(&[
            ("p/Base.java", "package p;\n@Entity class Base { @Id Long id; }"),
            ("p/Child.java", "package p;\nclass Child extends Base { String n; }"),
        ]);
        assert_eq!(x.entities["p.Base"].detection_basis, DetectionBasis::EntityAnnotation);
        let child = &x.entities["p.Child"];
        assert_eq!(child.detection_basis, DetectionBasis::InheritedEntityAnnotation);
        assert_eq!(child.super_chain, vec!["p.Base"]);
    }

    #[test]
    fn id_fallback_needs_mapper_import() {
        let with = extract(&[("A.java", &format!("{OFY}class A {{ @Id Long id; }}"))]);
        assert_eq!(with.entities["A"].detection_basis, DetectionBasis::IdFallback);
        let without = extract(&[("A.java", "import javax.persistence.Id;\nclass A { @Id Long id; }")]);
        assert!(without.entities.is_empty());
    }

    #[test]
    fn interfaces_and_enums_are_never_entities() {
        let x = extract(&[("A.java", "@Entity interface I {}\n@Entity enum E { X; }")]);
        assert!(x.entities.is_empty());
    }

    #[test]
    fn exclusion_markers_are_filtered() {
        let x = extract(&[(
            "P.java",
            &format!("{OFY}@Entity class P {{ @Id Long id; @Ignore int h; static int s; transient int t; int keep; }}"),
        )]);
        assert_eq!(names(&x.entities["P"].attributes), vec!["id", "keep"]);
    }

    #[test]
    fn morphia_transient_only_under_morphia() {
        let src = "import org.mongodb.morphia.annotations.*;\n@Entity class M { @Id String id; @Transient int t; @Ignore int i; }";
        let x = extract(&[("M.java", src)]);
        assert_eq!(names(&x.entities["M"].attributes), vec!["id", "i"]);
        let ofy = extract_entities(&files(&[("M.java", src)]), MapperDialect::Objectify);
        assert_eq!(names(&ofy.entities["M"].attributes), vec!["id", "t"]);
    }

    #[test]
    fn shadowing_keeps_most_derived() {
        let x = extract(&[
            ("Base.java", "@Entity class Base { @Id Long id; String name; }"),
            ("Child.java", "class Child extends Base { String name = \"c\"; int age; }"),
        ]);
        let child = &x.entities["Child"];
        assert_eq!(names(&child.attributes), vec!["id", "name", "age"]);
        assert_eq!(child.attribute("id").unwrap().origin, AttributeOrigin::Inherited("Base".into()));
        let name = child.attribute("name").unwrap();
        assert_eq!(name.origin, AttributeOrigin::Declared);
        assert_eq!(name.initializer_text.as_deref(), Some("\"c\""));
    }

    #[test]
    fn entity_without_fields_is_kept() {
        let x = extract(&[("A.java", "@Entity class A { void m() {} }")]);
        assert!(x.entities["A"].attributes.is_empty());
        assert_eq!(x.entities["A"].verdict.classification, Classification::Normalized);
    }

    #[test]
    fn whitelist_only_is_normalized() {
        let x =
            extract(&[("A.java", "@Entity class A { @Id Long id; String s; Boolean b; int i; java.lang.String q; }")]);
        assert_eq!(x.entities["A"].verdict, DenormVerdict::from_reasons(BTreeSet::new()));
    }

    #[test]
    fn third_party_type_is_unknown() {
        let x = extract(&[("A.java", "import org.joda.time.DateTime;\n@Entity class A { @Id Long id; DateTime at; }")]);
        let v = &x.entities["A"].verdict;
        assert_eq!(v.classification, Classification::Denormalized);
        assert_eq!(v.reasons, BTreeSet::from([DenormReason::UnknownType]));
    }

    #[test]
    fn container_and_nested_types() {
        let x = extract(&[
            ("Player.java", "@Entity class Player { @Id Long id; List<Mission> missions; }"),
            ("Mission.java", "class Mission { String title; }"),
            ("Team.java", "@Entity class Team { @Id Long id; Mission current; String[] tags; }"),
        ]);
        assert_eq!(x.entities["Player"].verdict.reasons, BTreeSet::from([DenormReason::ContainerType]));
        assert_eq!(
            x.entities["Team"].verdict.reasons,
            BTreeSet::from([DenormReason::ContainerType, DenormReason::NestedEntityType])
        );
    }

    #[test]
    fn enum_typed_attribute_is_unknown() {
        let x = extract(&[("A.java", "@Entity class A { @Id Long id; Color c; }\nenum Color { RED; }")]);
        assert_eq!(x.entities["A"].verdict.reasons, BTreeSet::from([DenormReason::UnknownType]));
    }

    #[test]
    fn schema_loc_adds_superclasses() {
        let base =
            "abstract class Base {\n  Long id;\n  String a;\n  String b;\n  String c;\n  String d;\n  String e;\n}\n";
        let ent = "@Entity\nclass E extends Base {\n  int x;\n}\n";
        let x = extract(&[("Base.java", base), ("E.java", ent)]);
        assert_eq!(x.entities["E"].schema_loc, 8 + 4);
        assert!(!x.entities.contains_key("Base"));
    }

    #[test]
    fn shared_base_counts_per_entity() {
        // base: 10 code lines; entities: 3, 4 and 5 lines
        let base =
            "@Entity abstract class B {\n@Id Long id;\nint a;\nint b;\nint c;\nint d;\nint e;\nint f;\nint g;\n}\n";
        let e1 = "class E1 extends B {\nint x;\n}\n";
        let e2 = "class E2 extends B {\nint x;\nint y;\n}\n";
        let e3 = "class E3 extends B {\nint x;\nint y;\nint z;\n}\n";
        let x = extract(&[("B.java", base), ("E1.java", e1), ("E2.java", e2), ("E3.java", e3)]);
        // hand sum: B itself (10) + E1 (10+3) + E2 (10+4) + E3 (10+5)
        assert_eq!(x.schema_loc(), 10 + 13 + 14 + 15);
    }

    #[test]
    fn duplicate_class_keeps_smallest_path() {
        let x =
            extract(&[("z/A.java", "@Entity class A { int fromZ; }"), ("a/A.java", "@Entity class A { int fromA; }")]);
        assert_eq!(x.entities["A"].source_path, "a/A.java");
        assert!(x.diagnostics.iter().any(|d| d.contains("duplicate class A")));
    }

    #[test]
    fn superclass_resolution_prefers_package_then_imports() {
        let x = extract(&[
            ("p/Base.java", "package p;\n@Entity class Base {}"),
            ("q/Base.java", "package q;\nclass Base { int other; }"),
            ("q/C.java", "package q;\nimport p.Base;\nclass C extends Base {}"),
            ("r/D.java", "package r;\nclass D extends Base {}"),
        ]);
        // the single-type import shadows the same-package q.Base
        assert_eq!(x.entities["q.C"].super_chain, vec!["p.Base"]);
        // r.D: two candidates named Base, neither visible by package or import
        assert!(!x.entities.contains_key("r.D"));
        assert!(x.diagnostics.iter().any(|d| d.starts_with("r.D: superclass `Base` is ambiguous")));
    }

    #[test]
    fn inheritance_cycle_is_cut() {
        let x = extract(&[("A.java", "@Entity class A extends B { int a; }\nclass B extends A { int b; }")]);
        assert!(x.diagnostics.iter().any(|d| d.contains("cycle")));
        assert_eq!(x.entities.len(), 2);
    }
}
