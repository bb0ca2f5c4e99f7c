//! A scripted 25-commit git repository modelled on the Player/Mission
//! example: the credits→coins rename with `@AlsoLoad`, an `@Ignore` field,
//! a shared superclass that later gains a field, and an entity removal.
//!
//! Author, committer and dates are fixed, so every build of the repository
//! has the same commit hashes.

use std::io;
use std::path::{Path, PathBuf};
use std::process::Command;

pub const COMMITS: usize = 25;
/// Commits whose schema diff is non-empty, by construction.
pub const SCHEMA_COMMITS: [usize; 7] = [0, 4, 7, 10, 13, 19, 22];

const SRC: &str = "src/main/java/com/example/game";

fn player(fields: &str, extends: bool, extra: &str, imports: &str) -> String {
    format!(
        "package com.example.game;\n\n{imports}import com.googlecode.objectify.annotation.*;\nimport java.util.Date;\nimport java.util.List;\n\n@Entity\npublic class Player{} {{\n{fields}{extra}}}\n",
        if extends { " extends Auditable" } else { "" }
    )
}

const FIELDS_A: &str = "    @Id Long id;\n    String name;\n    Integer credits;\n    List<Mission> listOfMissions;\n";
const FIELDS_B: &str = "    @Id Long id;\n    String name;\n    @AlsoLoad(\"credits\") Integer coins;\n    List<Mission> listOfMissions;\n    Date lastLogin;\n    @Ignore int hoursSinceLastLogin;\n";
const FIELDS_C: &str = "    @Id Long id;\n    String name;\n    @AlsoLoad(\"credits\") Integer coins;\n    List<Mission> listOfMissions;\n    Date lastLogin;\n    @Ignore long hoursSinceLastLogin;\n";
const FIELDS_D: &str = "    @Id Long id;\n    String name;\n    @AlsoLoad(\"credits\") Integer coins;\n    List<Mission> listOfMissions;\n    Date lastLogin;\n    @Ignore long hoursSinceLastLogin;\n    static final int MAX_MISSIONS = 10;\n";
const FIELDS_E: &str = "    @Id Long id;\n    String name;\n    @AlsoLoad(\"credits\") Integer coins;\n    List<Mission> listOfMissions;\n    Date lastLogin;\n    @Ignore long hoursSinceLastLogin;\n    static final int MAX_MISSIONS = 10;\n    transient int cachedRank;\n";
const FIELDS_F: &str = "    @Id Long id;\n    @Index String name;\n    @AlsoLoad({\"credits\", \"gold\"}) Long coins;\n    List<Mission> listOfMissions;\n    Date lastLogin;\n    @Ignore long hoursSinceLastLogin;\n    static final int MAX_MISSIONS = 10;\n    transient int cachedRank;\n";

const GETTER: &str = "\n    public String getName() {\n        return name;\n    }\n";
const GETTER_COMMENTED: &str =
    "\n    // display name shown in the lobby\n    public String getName() {\n        return name;\n    }\n";
const GETTER_TRIMMED: &str =
    "\n    // display name shown in the lobby\n    public String getName() {\n        return name.trim();\n    }\n";
const GETTER_FINAL: &str = "\n    // display name shown in the lobby\n    public String getName() {\n        return name == null ? \"\" : name.trim();\n    }\n";

const MISSION: &str = "package com.example.game;\n\npublic class Mission {\n    String title;\n}\n";
const MISSION_REWARD: &str =
    "package com.example.game;\n\npublic class Mission {\n    String title;\n    int reward;\n}\n";
const MISSION_MOVED: &str =
    "package com.example.game.model;\n\npublic class Mission {\n    String title;\n    int reward;\n}\n";

const AUDITABLE: &str =
    "package com.example.game;\n\nimport java.util.Date;\n\npublic abstract class Auditable {\n    Date created;\n}\n";
const AUDITABLE_MODIFIED: &str =
    "package com.example.game;\n\nimport java.util.Date;\n\npublic abstract class Auditable {\n    Date created;\n    Date modified;\n}\n";

fn guild(name_field: &str, comment: &str) -> String {
    format!(
        "package com.example.game;\n\nimport com.googlecode.objectify.annotation.*;\n\n{comment}@Entity\npublic class Guild extends Auditable {{\n    @Id Long id;\n    {name_field}\n}}\n"
    )
}

const GUILD_REFORMATTED: &str = "package com.example.game;\n\nimport com.googlecode.objectify.annotation.*;\n\n/** A group of players. */\n@Entity\npublic class Guild\n\textends Auditable\n{\n\t@Id\n\tLong id;\n\n\tString   guildName   =   \"unnamed\" ;\n}\n";

const ACHIEVEMENT: &str = "package com.example.game;\n\nimport com.googlecode.objectify.annotation.*;\nimport java.util.HashMap;\nimport java.util.Map;\n\n@Entity\npublic class Achievement {\n    @Id Long id;\n    String title;\n    Map<String, Integer> progress = new HashMap<>();\n}\n";
const ACHIEVEMENT_METHOD: &str = "package com.example.game;\n\nimport com.googlecode.objectify.annotation.*;\nimport java.util.HashMap;\nimport java.util.Map;\n\n@Entity\npublic class Achievement {\n    @Id Long id;\n    String title;\n    Map<String, Integer> progress = new HashMap<>();\n\n    public int completed() {\n        return progress.size();\n    }\n}\n";

type Edit = (String, Option<String>);

fn java(name: &str) -> String {
    format!("{SRC}/{name}")
}

/// File edits (`None` deletes) and message of each commit, oldest first.
pub fn script() -> Vec<(Vec<Edit>, &'static str)> {
    let p = |s: String| (java("Player.java"), Some(s));
    let g = |s: String| (java("Guild.java"), Some(s));
    let readme = |s: &str| ("README.md".to_string(), Some(format!("# game\n\n{s}\n")));
    let moved_import = "import com.example.game.model.Mission;\n";
    let player_f = player(FIELDS_F, true, GETTER_FINAL, "");
    vec![
        (
            vec![
                p(player(FIELDS_A, false, "", "")),
                (java("Mission.java"), Some(MISSION.into())),
                readme("Player model."),
            ],
            "Add Player and Mission",
        ),
        (vec![readme("Player model, missions.")], "Describe the project"),
        (vec![p(player(FIELDS_A, false, GETTER, ""))], "Add name getter"),
        (vec![p(player(FIELDS_A, false, GETTER_COMMENTED, ""))], "Document getter"),
        (vec![p(player(FIELDS_B, false, GETTER_COMMENTED, ""))], "Rename credits to coins, track last login"),
        (vec![p(player(FIELDS_C, false, GETTER_COMMENTED, ""))], "Widen hoursSinceLastLogin"),
        (vec![(java("Mission.java"), Some(MISSION_REWARD.into()))], "Missions carry a reward"),
        (
            vec![
                (java("Auditable.java"), Some(AUDITABLE.into())),
                g(guild("String guildName;", "")),
                p(player(FIELDS_C, true, GETTER_COMMENTED, "")),
            ],
            "Introduce guilds and auditing",
        ),
        (vec![p(player(FIELDS_C, true, GETTER_TRIMMED, ""))], "Trim names"),
        (vec![g(guild("String guildName;", "/** A group of players. */\n"))], "Document Guild"),
        (vec![(java("Auditable.java"), Some(AUDITABLE_MODIFIED.into()))], "Track modification time"),
        (vec![p(player(FIELDS_D, true, GETTER_TRIMMED, ""))], "Cap missions"),
        (vec![p(player(FIELDS_E, true, GETTER_TRIMMED, ""))], "Cache rank"),
        (
            vec![
                p(player(FIELDS_F, true, GETTER_TRIMMED, "")),
                g(guild("String guildName = \"unnamed\";", "/** A group of players. */\n")),
            ],
            "Coins become Long, index names, default guild name",
        ),
        (vec![g(GUILD_REFORMATTED.into())], "Reformat Guild"),
        (vec![p(player_f.clone())], "Null-safe getter"),
        (vec![("docs/schema.md".to_string(), Some("Entities: Player, Guild.\n".into()))], "Add schema notes"),
        (vec![p(player_f.trim_end().trim_end_matches('}').to_string() + "\n")], "WIP: lobby ranking"),
        (vec![p(player_f.clone())], "Fix build"),
        (vec![(java("Guild.java"), None)], "Drop guilds"),
        (
            vec![
                (java("Mission.java"), None),
                (java("model/Mission.java"), Some(MISSION_MOVED.into())),
                p(player(FIELDS_F, true, GETTER_FINAL, moved_import)),
            ],
            "Move Mission into model package",
        ),
        (vec![readme("Player model, missions, achievements soon.")], "Update readme"),
        (vec![(java("Achievement.java"), Some(ACHIEVEMENT.into()))], "Add achievements"),
        (vec![(java("Achievement.java"), Some(ACHIEVEMENT_METHOD.into()))], "Count completed achievements"),
        (vec![readme("Player model, missions, achievements.")], "Update readme"),
    ]
}

fn git(dir: &Path, args: &[&str], date: Option<&str>) -> io::Result<String> {
    let mut cmd = Command::new("git");
    cmd.arg("-C").arg(dir).args([
        "-c",
        "commit.gpgsign=false",
        "-c",
        "core.autocrlf=false",
        "-c",
        "init.defaultBranch=main",
    ]);
    cmd.args(args)
        .env("GIT_AUTHOR_NAME", "Fixture Author")
        .env("GIT_AUTHOR_EMAIL", "author@example.com")
        .env("GIT_COMMITTER_NAME", "Fixture Committer")
        .env("GIT_COMMITTER_EMAIL", "committer@example.com")
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .env("HOME", dir);
    if let Some(d) = date {
        cmd.env("GIT_AUTHOR_DATE", d).env("GIT_COMMITTER_DATE", d);
    }
    let out = cmd.output()?;
    if !out.status.success() {
        return Err(io::Error::other(format!(
            "git {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )));
    }
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

/// Commit date of fixture commit `i`: 2020-01-01T00:00:00Z plus `i` hours.
pub fn commit_date(i: usize) -> String {
    format!("2020-01-{:02}T{:02}:00:00+00:00", 1 + i / 24, i % 24)
}

#[derive(Debug, Clone)]
pub struct FixtureRepo {
    pub path: PathBuf,
    /// Commit hashes, oldest first.
    pub hashes: Vec<String>,
}

/// Creates the repository at `dir` (which must not exist or be empty).
pub fn build_fixture_repo(dir: &Path) -> io::Result<FixtureRepo> {
    std::fs::create_dir_all(dir)?;
    git(dir, &["init", "-q"], None)?;
    let mut hashes = Vec::with_capacity(COMMITS);
    for (i, (edits, message)) in script().into_iter().enumerate() {
        for (path, content) in edits {
            let full = dir.join(&path);
            match content {
                Some(text) => {
                    std::fs::create_dir_all(full.parent().expect("relative path has a parent"))?;
                    std::fs::write(&full, text)?;
                }
                None => std::fs::remove_file(&full)?,
            }
        }
        git(dir, &["add", "-A"], None)?;
        git(dir, &["commit", "-q", "-m", message], Some(&commit_date(i)))?;
        hashes.push(git(dir, &["rev-parse", "HEAD"], None)?);
    }
    Ok(FixtureRepo { path: dir.to_path_buf(), hashes })
}

/// Writes `files` as snapshot directory `<root>/<NNN>_<label>/`.
pub fn write_snapshot_dir<'a>(
    root: &Path,
    number: usize,
    label: &str,
    files: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> io::Result<PathBuf> {
    let dir = root.join(format!("{number:03}_{label}"));
    std::fs::create_dir_all(&dir)?;
    for (path, text) in files {
        let full = dir.join(path);
        std::fs::create_dir_all(full.parent().expect("relative path has a parent"))?;
        std::fs::write(full, text)?;
    }
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_has_25_commits() {
        assert_eq!(script().len(), COMMITS);
        assert_eq!(commit_date(24), "2020-01-02T00:00:00+00:00");
    }

    #[test]
    fn broken_commit_is_unbalanced() {
        let (edits, _) = &script()[17];
        let text = edits[0].1.as_ref().unwrap();
        let opens = text.matches('{').count();
        let closes = text.matches('}').count();
        assert_eq!(opens, closes + 1);
    }
}
