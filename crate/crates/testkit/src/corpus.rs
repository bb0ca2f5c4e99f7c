//! Java inputs for parser robustness checks: files with hand-counted code
//! lines, and adversarial files that must never bring the process down.

/// A file whose classes' code-line counts were counted by hand.
pub struct Counted {
    pub name: &'static str,
    pub text: &'static str,
    /// `(qualified class name, code lines within its declaration)`.
    pub expected: &'static [(&'static str, u32)],
}

pub const HAND_COUNTED: &[Counted] = &[
    Counted {
        name: "javadoc_and_trailing_comment",
        text: "package a;\n\n/** doc */\n@Entity\npublic class Player {\n    @Id Long id;   // key\n\n    /* block */\n    String name;\n}\n",
        expected: &[("a.Player", 5)],
    },
    Counted {
        name: "comments_containing_code",
        text: "class A {\n    // class Fake { int x; }\n    /* } { */ int y;\n    /*\n     * int z;\n     */\n}\n",
        expected: &[("A", 3)],
    },
    Counted {
        name: "comment_markers_in_strings",
        text: "class S {\n    String a = \"// not a comment\";\n    String b = \"/* nor this */\";\n\n}\n",
        expected: &[("S", 4)],
    },
    Counted {
        name: "text_block",
        text: "class T {\n    String q = \"\"\"\n        // inside text\n        { not a brace }\n        \"\"\";\n    // trailing\n}\n",
        expected: &[("T", 6)],
    },
    Counted {
        name: "nested_and_method",
        text: "package n;\n\npublic class Outer {\n    int a;\n\n    // inner one\n    static class Inner {\n        @Id long id;\n        /** doc */\n    }\n\n    void m() {\n        int x = 1; /* trailing */\n    }\n}\n",
        expected: &[("n.Outer", 9), ("n.Outer.Inner", 3)],
    },
    Counted {
        name: "multi_line_annotation",
        text: "@Entity(\n    name = \"p\"\n)\n// between\n@Cache\npublic class P\n{\n\n\tLong id;\n}\n",
        expected: &[("P", 8)],
    },
    Counted {
        name: "crlf_line_endings",
        text: "class C {\r\n\r\n\tint x;\r\n\t// c\r\n}\r\n",
        expected: &[("C", 3)],
    },
    Counted {
        name: "unicode",
        text: "class Ünïcode {\n    String émoji = \"🎉 // no comment\";\n    // 日本語のコメント\n    int 変数;\n}\n",
        expected: &[("Ünïcode", 4)],
    },
    Counted {
        name: "enum_interface_class",
        text: "enum Color {\n    RED, GREEN;\n    // comment\n}\ninterface Named {\n    String name();\n}\nabstract class Base implements Named { /* c */\n\n    Color color;\n}\n",
        expected: &[("Color", 3), ("Named", 3), ("Base", 3)],
    },
    Counted {
        name: "comment_spanning_code_lines",
        text: "class K {\n    int a; /* starts\n       continues\n    ends */ int b;\n    /* only */ /* comments */\n    char c = '{';\n    // }\n}\n",
        expected: &[("K", 5)],
    },
];

fn hand_written() -> Vec<(String, Vec<u8>)> {
    let cases: Vec<(&str, String)> = vec![
        ("empty", String::new()),
        ("lone_close", "}".into()),
        ("lone_open", "{".into()),
        ("keyword_only", "class".into()),
        ("unclosed_class", "class A {".into()),
        ("close_without_open", "class A }".into()),
        ("bare_at", "@".into()),
        ("annotation_only", "@Entity".into()),
        ("annotation_then_keyword", "@Entity class".into()),
        ("missing_initializer", "class A { int x = ; int ok; }".into()),
        ("unterminated_string", "class A { String s = \"unterminated; }\n}".into()),
        ("unterminated_comment", "/* unterminated comment class A {}".into()),
        ("brace_in_comment", "class A { /* } */ }".into()),
        ("braces_in_literals", "class A { String s = \"}\"; char c = '}'; int y; }".into()),
        ("lambda_body", "class A { void m() { Runnable r = () -> { int x; }; } int y; }".into()),
        ("deep_generics", "class A { List<List<Map<String, Set<Integer>>>> x; int y; }".into()),
        ("bounded_type_parameter", "class A<T extends Comparable<? super T>> { T t; }".into()),
        ("record", "record R(int a, String b) { static int c; }\nclass After { int x; }".into()),
        ("annotation_type", "@interface Ann { String value() default \"x\"; }".into()),
        ("enum_constant_bodies", "enum E { A { void f() {} }, B; int x; }".into()),
        ("anonymous_class_initializer", "class A { Object o = new Object() { int hidden; }; int y; }".into()),
        ("nested_annotations", "class A { @Outer(@Inner(@Deep(1))) int x; }".into()),
        ("array_declarators", "class A { int[] a, b[], c = {1,2}; }".into()),
        ("empty_package_import", "package ; import ; class A {}".into()),
        ("stray_semicolons", "import a.b.*;;;; class A {};; ; class B { ;; int x;; }".into()),
        ("byte_order_mark", "\u{feff}class A { int x; }".into()),
        ("nul_bytes", "class A { int x; }\0\0\0".into()),
        ("emoji_identifier", "class \u{1F600} { int x; } class B { int y; }".into()),
        ("initializer_blocks", "class A { static { int x; } { int y; } int z; }".into()),
        ("constructor", "class A { A() { super(); } int x; }".into()),
        ("ternary_with_angles", "class A { int x = a < b ? c : d > e ? 1 : 2; int y; }".into()),
        ("shift_operators", "class A { int x = 1 >>> 2, z = 3 >> 1; int y; }".into()),
        ("unterminated_text_block", "\"\"\"\nunterminated text block class A {}".into()),
        ("text_block_with_brace", "class A { String t = \"\"\"\n}\n\"\"\"; int y; }".into()),
        ("escaped_char_quote", "class A { char c = '\\''; int y; }".into()),
        ("escaped_string_quote", "class A { String s = \"\\\"}\"; int y; }".into()),
        ("deep_class_nesting", "class A { ".repeat(1000) + &"} ".repeat(1000)),
        (
            "deep_block_nesting",
            format!("class A {{ void m() {{ {}{} }} int y; }}", "{".repeat(10_000), "}".repeat(10_000)),
        ),
        (
            "many_fields_one_line",
            format!("class A {{ {} }}", (0..5000).map(|i| format!("int a{i};")).collect::<String>()),
        ),
        ("extends_nothing", "class A extends { int x; } class B { int y; }".into()),
        ("implements_commas", "class A implements , { int x; }".into()),
        ("repeated_modifiers", "public public static final class A { int x; }".into()),
        ("type_without_name", "class A { int; int ok; }".into()),
        ("member_starting_with_equals", "class A { = 5; int x; }".into()),
        ("dangling_at_in_member", "class A { @ int x; int y; }".into()),
        ("array_creation_initializer", "class A { int x = new int[]{1, 2}[0]; int y; }".into()),
        (
            "double_brace_initialization",
            "class A { Map<String, Integer> m = new HashMap<String, Integer>() {{ put(\"a\", 1); }}; int y; }".into(),
        ),
        ("lone_carriage_returns", "\r\r\rclass A {\rint x;\r}".into()),
        ("brace_in_line_comment", "class A { // comment with } brace\n int x; }".into()),
        ("brace_in_javadoc", "class A { /** javadoc { */ int x; }".into()),
        ("sealed_hierarchy", "sealed class S permits A, B { } non-sealed class A extends S { int x; }".into()),
        ("module_declaration", "module m { requires x; }".into()),
        ("legacy_array_method", "class A { void m() throws X, Y { } int[] arr() [] { return null; } int y; }".into()),
        ("switch_expression", "class A { int x = switch (y) { case 1 -> 2; default -> { yield 3; } }; int z; }".into()),
        ("var_field", "class A { var x = 1; }".into()),
        ("duplicate_annotations", "@Entity\n@Entity\nclass Twice { @Id @Id Long id; }".into()),
        (
            "numeric_literals",
            "class A { int x = 0xFF; double d = 1e-3; float f = .5f; long l = 1_000L; int y; }".into(),
        ),
        ("unicode_escape_name", "class \\u0041 { int x; }".into()),
        ("huge_string", format!("class A {{ String s = \"{}\"; int y; }}", "a".repeat(100_000))),
        ("only_comments", "// nothing\n/* here */\n/** at all */".into()),
        (
            "generic_method",
            "class A { <T> T id(T t) { return t; } public <K, V> Map<K, V> m() { return null; } int y; }".into(),
        ),
        (
            "wildcard_import_class",
            "import java.util.*;\nimport static java.lang.Math.max;\nclass A { List<?> l; }".into(),
        ),
    ];
    let mut out: Vec<(String, Vec<u8>)> = cases.into_iter().map(|(n, t)| (n.to_string(), t.into_bytes())).collect();
    out.push(("invalid_utf8".into(), b"class A { String s = \"\xff\xfe\"; int y; }".to_vec()));
    out.push(("latin1_comment".into(), b"// caf\xe9\nclass A { int x; }".to_vec()));
    out
}

/// Adversarial inputs: hand-written edge cases plus truncated and
/// brace-damaged copies of the hand-counted files.
pub fn adversarial() -> Vec<(String, Vec<u8>)> {
    let mut out = hand_written();
    for c in HAND_COUNTED {
        let bytes = c.text.as_bytes();
        for cut in [bytes.len() / 3, bytes.len() / 2, bytes.len() * 4 / 5] {
            out.push((format!("{}_truncated_{cut}", c.name), bytes[..cut].to_vec()));
        }
        out.push((format!("{}_extra_close", c.name), [bytes, b"}\n"].concat()));
        out.push((format!("{}_extra_open", c.name), [b"{\n".as_slice(), bytes].concat()));
        let swapped: Vec<u8> = bytes
            .iter()
            .map(|b| match b {
                b'{' => b'}',
                b'}' => b'{',
                x => *x,
            })
            .collect();
        out.push((format!("{}_swapped_braces", c.name), swapped));
    }
    out
}
