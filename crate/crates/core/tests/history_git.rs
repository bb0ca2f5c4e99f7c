use std::process::Command;

use nosqlevo_core::history::{parse_timestamp, History, HistoryError};
use nosqlevo_core::{linearize_history, materialize_snapshot, HistorySource};
use nosqlevo_testkit::fixture::{build_fixture_repo, commit_date, COMMITS};

#[test]
fn fixture_repo_linearizes_oldest_first() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = build_fixture_repo(&tmp.path().join("repo")).unwrap();
    let commits = linearize_history(&HistorySource::repo(&repo.path)).unwrap();
    assert_eq!(commits.len(), COMMITS);
    let hashes: Vec<&str> = commits.iter().map(|c| c.hash.as_str()).collect();
    assert_eq!(hashes, repo.hashes.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(commits[0].committer_date, commit_date(0));
    assert!(commits[0].parents.is_empty());
    assert_eq!(commits[1].parents, vec![commits[0].hash.clone()]);
    let dates: Vec<_> = commits.iter().map(|c| parse_timestamp(&c.committer_date).unwrap()).collect();
    assert!(dates.windows(2).all(|w| w[0] <= w[1]));

    let again = linearize_history(&HistorySource::repo(&repo.path)).unwrap();
    assert_eq!(again, commits);
}

#[test]
fn before_date_cuts_history() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = build_fixture_repo(&tmp.path().join("repo")).unwrap();
    let after_all = linearize_history(&HistorySource::repo(&repo.path).before("2030-01-01T00:00:00")).unwrap();
    assert_eq!(after_all.len(), COMMITS);
    // commit i is dated i hours after midnight; the cut keeps commits 0..=9
    let cut = linearize_history(&HistorySource::repo(&repo.path).before("2020-01-01T09:30:00+00:00")).unwrap();
    assert_eq!(cut.len(), 10);
    assert_eq!(cut.last().unwrap().hash, repo.hashes[9]);
}

#[test]
fn snapshots_follow_moves_and_deletes() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = build_fixture_repo(&tmp.path().join("repo")).unwrap();
    let source = HistorySource::repo(&repo.path);
    let mut history = History::open(&source).unwrap();

    let before_move = history.snapshot(19).unwrap();
    let after_move = history.snapshot(20).unwrap();
    let old = "src/main/java/com/example/game/Mission.java";
    let new = "src/main/java/com/example/game/model/Mission.java";
    assert!(before_move.files.contains_key(old));
    assert!(!after_move.files.contains_key(old));
    assert!(after_move.files[new].text.contains("class Mission"));
    assert!(!after_move.files.contains_key("src/main/java/com/example/game/Guild.java"));
    assert!(after_move.files.keys().all(|p| p.ends_with(".java")));

    // the standalone path agrees with the cached reader
    let commits = linearize_history(&source).unwrap();
    assert_eq!(materialize_snapshot(&source, &commits[20], 20).unwrap(), after_move);
}

#[test]
fn renamed_file_keeps_content() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let git = |args: &[&str]| {
        let ok = Command::new("git")
            .arg("-C")
            .arg(dir)
            .args(["-c", "commit.gpgsign=false", "-c", "user.name=t", "-c", "user.email=t@example.com"])
            .args(args)
            .env("GIT_CONFIG_NOSYSTEM", "1")
            .env("HOME", dir)
            .status()
            .unwrap()
            .success();
        assert!(ok, "git {args:?}");
    };
    git(&["init", "-q"]);
    std::fs::write(dir.join("A.java"), "class A { int x; }\n").unwrap();
    git(&["add", "-A"]);
    git(&["commit", "-q", "-m", "a"]);
    std::fs::write(dir.join("notes.txt"), "x").unwrap();
    git(&["add", "-A"]);
    git(&["commit", "-q", "-m", "b"]);
    git(&["mv", "A.java", "B.java"]);
    git(&["commit", "-q", "-m", "c"]);

    let mut h = History::open(&HistorySource::repo(dir)).unwrap();
    assert_eq!(h.len(), 3);
    let s1 = h.snapshot(1).unwrap();
    let s2 = h.snapshot(2).unwrap();
    assert_eq!(s2.files.keys().collect::<Vec<_>>(), vec!["B.java"]);
    assert_eq!(s2.files["B.java"], s1.files["A.java"]);
}

#[test]
fn errors_are_classified() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = linearize_history(&HistorySource::repo(tmp.path().join("nope")));
    assert!(matches!(missing, Err(HistoryError::RepoAccess { .. })));
    let not_repo = linearize_history(&HistorySource::repo(tmp.path()));
    assert!(matches!(not_repo, Err(HistoryError::RepoAccess { .. })), "{not_repo:?}");
    let bad_date = linearize_history(&HistorySource::repo(tmp.path()).before("soon"));
    assert!(matches!(bad_date, Err(HistoryError::BadDate(_))));
}

#[test]
fn empty_repository_has_no_commits() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(Command::new("git").arg("-C").arg(tmp.path()).args(["init", "-q"]).status().unwrap().success());
    assert!(linearize_history(&HistorySource::repo(tmp.path())).unwrap().is_empty());
}

#[test]
fn naive_cutoff_is_utc_and_inclusive() {
    let tmp = tempfile::tempdir().unwrap();
    let repo = build_fixture_repo(&tmp.path().join("repo")).unwrap();
    let run = |tz: &str, before: &str| {
        std::env::set_var("TZ", tz);
        linearize_history(&HistorySource::repo(&repo.path).before(before)).unwrap().len()
    };
    // commit 9 is dated exactly 09:00 UTC
    assert_eq!(run("UTC", "2020-01-01T09:00:00"), 10);
    assert_eq!(run("Asia/Tokyo", "2020-01-01T09:00:00"), 10);
    assert_eq!(run("UTC", "2020-01-01T08:59:59Z"), 9);
}
