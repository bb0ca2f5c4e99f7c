//! Seeded random schema histories, rendered as Objectify-style Java.
//!
//! Each history keeps its own model of the persisted schema alongside the
//! rendered sources, so tests can compare what the extractor recovers with
//! what was generated.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nosqlevo_core::{CommitRef, Snapshot, SourceBlob};

use crate::oracle::{AttrTuple, TupleSchema};

const PACKAGE: &str = "com.example.model";

const TYPES: &[(&str, &str)] = &[
    // (as written, canonical)
    ("Long", "Long"),
    ("String", "String"),
    ("Integer", "Integer"),
    ("int", "int"),
    ("boolean", "boolean"),
    ("Date", "Date"),
    ("List<String>", "List<String>"),
    ("List< String >", "List<String>"),
    ("Map<String , Integer>", "Map<String,Integer>"),
    ("String[]", "String[]"),
    ("Set<Long>", "Set<Long>"),
];

const INITS: &[(&str, &str)] = &[
    ("0", "0"),
    ("1L", "1L"),
    ("\"x\"", "\"x\""),
    ("null", "null"),
    ("new ArrayList<>( )", "new ArrayList<>()"),
    ("true", "true"),
];

const ANNOTATIONS: &[(&str, Option<&str>)] = &[
    ("Index", None),
    ("AlsoLoad", Some("\"old\"")),
    ("AlsoLoad", Some("{\"a\",\"b\"}")),
    ("Min", Some("5")),
    ("Property", Some("\"p\"")),
    ("Unindex", None),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    Ignore,
    Static,
    Transient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelAttr {
    pub name: String,
    /// Index into the type table.
    pub ty: usize,
    pub init: Option<usize>,
    pub annotations: Vec<usize>,
    pub excluded: Option<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelEntity {
    pub simple_name: String,
    pub extends_base: bool,
    pub attrs: Vec<ModelAttr>,
    /// Bumped by schema-irrelevant edits (methods, comments).
    pub noise: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelSchema {
    pub entities: BTreeMap<String, ModelEntity>,
    /// Fields of the shared abstract superclass (never an entity itself).
    pub base_attrs: Vec<ModelAttr>,
}

impl ModelSchema {
    fn render_attr(a: &ModelAttr, out: &mut String) {
        out.push_str("    ");
        for &i in &a.annotations {
            let (name, args) = ANNOTATIONS[i];
            match args {
                Some(args) => out.push_str(&format!("@{name}({args}) ")),
                None => out.push_str(&format!("@{name} ")),
            }
        }
        match a.excluded {
            Some(Exclusion::Ignore) => out.push_str("@Ignore "),
            Some(Exclusion::Static) => out.push_str("static "),
            Some(Exclusion::Transient) => out.push_str("transient "),
            None => {}
        }
        out.push_str(TYPES[a.ty].0);
        out.push(' ');
        out.push_str(&a.name);
        if let Some(i) = a.init {
            out.push_str(" = ");
            out.push_str(INITS[i].0);
        }
        out.push_str(";\n");
    }

    fn header() -> String {
        format!("package {PACKAGE};\n\nimport com.googlecode.objectify.annotation.*;\nimport java.util.*;\n\n")
    }

    /// Java sources, keyed by path.
    pub fn render(&self) -> BTreeMap<String, String> {
        let mut files = BTreeMap::new();
        let mut base = Self::header();
        base.push_str("public abstract class Base {\n");
        for a in &self.base_attrs {
            Self::render_attr(a, &mut base);
        }
        base.push_str("}\n");
        files.insert("src/com/example/model/Base.java".to_string(), base);

        for e in self.entities.values() {
            let mut s = Self::header();
            s.push_str(&format!("/* revision {} */\n@Entity\npublic class {}", e.noise, e.simple_name));
            if e.extends_base {
                s.push_str(" extends Base");
            }
            s.push_str(" {\n    @Id Long id;\n");
            for a in &e.attrs {
                Self::render_attr(a, &mut s);
            }
            for m in 0..e.noise % 3 {
                s.push_str(&format!("\n    // helper\n    public int helper{m}() {{ int x = {m}; return x; }}\n"));
            }
            s.push_str("}\n");
            files.insert(format!("src/com/example/model/{}.java", e.simple_name), s);
        }
        files
    }

    fn tuple(entity: &str, a: &ModelAttr) -> AttrTuple {
        AttrTuple {
            entity: entity.to_string(),
            attribute: a.name.clone(),
            type_text: TYPES[a.ty].1.to_string(),
            init: a.init.map(|i| INITS[i].1.to_string()),
            annotations: a
                .annotations
                .iter()
                .map(|&i| {
                    let (name, args) = ANNOTATIONS[i];
                    let text = match args {
                        Some(args) => format!("@{name}({args})"),
                        None => format!("@{name}"),
                    };
                    (name.to_string(), text)
                })
                .collect(),
        }
    }

    /// The persisted schema the model describes.
    pub fn tuples(&self) -> TupleSchema {
        let mut t = TupleSchema::default();
        for e in self.entities.values() {
            let qn = format!("{PACKAGE}.{}", e.simple_name);
            t.entities.insert(qn.clone());
            let id = ModelAttr { name: "id".into(), ty: 0, init: None, annotations: vec![], excluded: None };
            t.attributes.insert(AttrTuple { annotations: vec![("Id".into(), "@Id".into())], ..Self::tuple(&qn, &id) });
            let inherited = if e.extends_base { self.base_attrs.as_slice() } else { &[] };
            for a in inherited.iter().chain(&e.attrs).filter(|a| a.excluded.is_none()) {
                t.attributes.insert(Self::tuple(&qn, a));
            }
        }
        t
    }
}

#[derive(Debug, Clone)]
pub struct ModelCommit {
    pub schema: ModelSchema,
    pub snapshot: Snapshot,
}

#[derive(Debug, Clone)]
pub struct ModelHistory {
    pub seed: u64,
    pub commits: Vec<ModelCommit>,
}

struct Generator {
    rng: ChaCha8Rng,
    max_entities: usize,
    next_entity: u32,
    next_attr: u32,
}

impl Generator {
    fn new_attr(&mut self, prefix: &str) -> ModelAttr {
        self.next_attr += 1;
        let excluded = match self.rng.gen_range(0..12) {
            0 => Some(Exclusion::Ignore),
            1 => Some(Exclusion::Static),
            2 => Some(Exclusion::Transient),
            _ => None,
        };
        ModelAttr {
            name: format!("{prefix}{}", self.next_attr),
            ty: self.rng.gen_range(0..TYPES.len()),
            init: self.rng.gen_bool(0.3).then(|| self.rng.gen_range(0..INITS.len())),
            annotations: self.random_annotations(),
            excluded,
        }
    }

    fn random_annotations(&mut self) -> Vec<usize> {
        let n = self.rng.gen_range(0..3);
        (0..n).map(|_| self.rng.gen_range(0..ANNOTATIONS.len())).collect()
    }

    fn mutate_attr(&mut self, a: &mut ModelAttr) {
        match self.rng.gen_range(0..5) {
            0 => a.ty = self.rng.gen_range(0..TYPES.len()),
            1 => a.init = self.rng.gen_bool(0.6).then(|| self.rng.gen_range(0..INITS.len())),
            2 => a.annotations = self.random_annotations(),
            3 => {
                a.excluded = match a.excluded {
                    Some(_) => None,
                    None => Some(
                        *[Exclusion::Ignore, Exclusion::Static, Exclusion::Transient]
                            .choose(&mut self.rng)
                            .expect("non-empty"),
                    ),
                }
            }
            _ => {
                a.ty = self.rng.gen_range(0..TYPES.len());
                a.init = self.rng.gen_bool(0.5).then(|| self.rng.gen_range(0..INITS.len()));
            }
        }
    }

    fn step(&mut self, schema: &mut ModelSchema) {
        let edits = self.rng.gen_range(0..4);
        for _ in 0..edits {
            let names: Vec<String> = schema.entities.keys().cloned().collect();
            let pick = names.choose(&mut self.rng).cloned();
            match self.rng.gen_range(0..10) {
                0 | 1 if schema.entities.len() < self.max_entities => {
                    self.next_entity += 1;
                    let simple_name = format!("E{}", self.next_entity);
                    let n = self.rng.gen_range(0..4);
                    let attrs = (0..n).map(|_| self.new_attr("f")).collect();
                    let extends_base = self.rng.gen_bool(0.4);
                    schema
                        .entities
                        .insert(simple_name.clone(), ModelEntity { simple_name, extends_base, attrs, noise: 0 });
                }
                2 => {
                    if let Some(p) = pick {
                        schema.entities.remove(&p);
                    }
                }
                3 => {
                    if let Some(p) = pick {
                        let a = self.new_attr("f");
                        schema.entities.get_mut(&p).expect("picked").attrs.push(a);
                    }
                }
                4 => {
                    if let Some(p) = pick {
                        let e = schema.entities.get_mut(&p).expect("picked");
                        if !e.attrs.is_empty() {
                            let i = self.rng.gen_range(0..e.attrs.len());
                            e.attrs.remove(i);
                        }
                    }
                }
                5 | 6 => {
                    if let Some(p) = pick {
                        let mut attrs = std::mem::take(&mut schema.entities.get_mut(&p).expect("picked").attrs);
                        if let Some(a) = attrs.choose_mut(&mut self.rng) {
                            self.mutate_attr(a);
                        }
                        schema.entities.get_mut(&p).expect("picked").attrs = attrs;
                    }
                }
                7 => {
                    // superclass edit
                    if schema.base_attrs.is_empty() || self.rng.gen_bool(0.5) {
                        let a = self.new_attr("b");
                        schema.base_attrs.push(a);
                    } else {
                        let mut attrs = std::mem::take(&mut schema.base_attrs);
                        if let Some(a) = attrs.choose_mut(&mut self.rng) {
                            self.mutate_attr(a);
                        }
                        schema.base_attrs = attrs;
                    }
                }
                8 => {
                    if let Some(p) = pick {
                        let e = schema.entities.get_mut(&p).expect("picked");
                        e.extends_base = !e.extends_base;
                    }
                }
                _ => {
                    if let Some(p) = pick {
                        schema.entities.get_mut(&p).expect("picked").noise += 1;
                    }
                }
            }
        }
    }
}

fn commit_ref(seed: u64, index: usize) -> CommitRef {
    let date = format!("2021-01-01T00:00:{:02}Z", index % 60);
    CommitRef {
        hash: format!("r{seed}-{index:03}"),
        author_date: date.clone(),
        committer_date: date,
        parents: if index == 0 { vec![] } else { vec![format!("r{seed}-{:03}", index - 1)] },
    }
}

/// A history of 1..=`max_commits` commits never exceeding `max_entities`
/// entities, fully determined by `seed`.
pub fn random_history(seed: u64, max_entities: usize, max_commits: usize) -> ModelHistory {
    let mut g = Generator { rng: ChaCha8Rng::seed_from_u64(seed), max_entities, next_entity: 0, next_attr: 0 };
    let n = g.rng.gen_range(1..=max_commits.max(1));
    let mut schema = ModelSchema::default();
    let mut commits = Vec::with_capacity(n);
    for index in 0..n {
        g.step(&mut schema);
        let snapshot = Snapshot {
            commit: commit_ref(seed, index),
            index,
            files: schema.render().into_iter().map(|(p, text)| (p, SourceBlob::from_bytes(text.as_bytes()))).collect(),
        };
        commits.push(ModelCommit { schema: schema.clone(), snapshot });
    }
    ModelHistory { seed, commits }
}
