use std::collections::BTreeSet;

use nosqlevo_core::schema::{diff_snapshots, ChangeKind, SchemaBuilder, SchemaSnapshot};
use nosqlevo_core::MapperDialect;
use nosqlevo_testkit::oracle::{oracle_diff, tuple_diff, TupleSchema};
use nosqlevo_testkit::random::random_history;
use proptest::prelude::*;

fn schemas(seed: u64) -> (Vec<SchemaSnapshot>, Vec<TupleSchema>) {
    let h = random_history(seed, 10, 15);
    let mut b = SchemaBuilder::new(MapperDialect::Objectify);
    let built = h.commits.iter().map(|c| b.build(&c.snapshot)).collect();
    let models = h.commits.iter().map(|c| c.schema.tuples()).collect();
    (built, models)
}

#[test]
fn extraction_recovers_the_generated_schema() {
    for seed in 0..60 {
        let (built, models) = schemas(seed);
        for (s, m) in built.iter().zip(&models) {
            assert_eq!(&TupleSchema::from_snapshot(s), m, "seed {seed}, commit {}", s.index);
        }
    }
}

#[test]
fn differ_matches_oracles() {
    for seed in 0..60 {
        let (built, models) = schemas(seed);
        let mut prev = SchemaSnapshot::empty();
        let mut prev_model = TupleSchema::default();
        for (next, model) in built.iter().zip(&models) {
            let got = diff_snapshots(&prev, next);
            assert_eq!(got, oracle_diff(&prev, next), "seed {seed}, commit {}", next.index);
            assert_eq!(got, tuple_diff(&prev_model, model, &next.commit, next.index), "seed {seed}");
            prev = next.clone();
            prev_model = model.clone();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diff_identity(seed in any::<u64>()) {
        let (built, _) = schemas(seed);
        for s in &built {
            prop_assert!(diff_snapshots(s, s).is_empty());
        }
    }

    #[test]
    fn add_remove_bookkeeping(seed in any::<u64>()) {
        let (built, _) = schemas(seed);
        let mut prev = SchemaSnapshot::empty();
        let mut balance: i64 = 0;
        for next in &built {
            for c in diff_snapshots(&prev, next) {
                match c.kind {
                    ChangeKind::EntityAdded => balance += 1,
                    ChangeKind::EntityRemoved => balance -= 1,
                    _ => {}
                }
            }
            prop_assert_eq!(balance, next.entities.len() as i64);
            prev = next.clone();
        }
    }

    #[test]
    fn suppression(seed in any::<u64>()) {
        let (built, _) = schemas(seed);
        let mut prev = SchemaSnapshot::empty();
        for next in &built {
            let d = diff_snapshots(&prev, next);
            let whole: BTreeSet<&str> = d.iter().filter(|c| !c.kind.is_attribute_level()).map(|c| c.entity.as_str()).collect();
            prop_assert!(d.iter().filter(|c| c.kind.is_attribute_level()).all(|c| !whole.contains(c.entity.as_str())));
            prop_assert!(d.iter().all(|c| c.attribute.is_some() == c.kind.is_attribute_level()));
            prop_assert!(d.iter().all(|c| c.detail.is_some() == c.kind.has_detail()));
            prev = next.clone();
        }
    }

    #[test]
    fn inversion(seed in any::<u64>(), a in 0usize..15, b in 0usize..15) {
        let (built, _) = schemas(seed);
        let (x, y) = (&built[a % built.len()], &built[b % built.len()]);
        let forward = diff_snapshots(x, y);
        let mut inverted: Vec<(ChangeKind, String, Option<String>)> = diff_snapshots(y, x)
            .into_iter()
            .map(|c| (c.kind.inverse(), c.entity, c.attribute))
            .collect();
        let mut expected: Vec<_> = forward.into_iter().map(|c| (c.kind, c.entity, c.attribute)).collect();
        inverted.sort();
        expected.sort();
        prop_assert_eq!(inverted, expected);
    }

    #[test]
    fn output_is_sorted(seed in any::<u64>()) {
        let (built, _) = schemas(seed);
        let mut prev = SchemaSnapshot::empty();
        for next in &built {
            let d = diff_snapshots(&prev, next);
            prop_assert!(d.windows(2).all(|w| (&w[0].entity, &w[0].attribute, w[0].kind) <= (&w[1].entity, &w[1].attribute, w[1].kind)));
            prev = next.clone();
        }
    }
}
