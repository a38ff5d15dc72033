//! Shared proptest strategies: plausible Python-ish source files built
//! from fragments the lexer must always accept.
#![allow(dead_code)]

use proptest::prelude::*;

/// Identifiers prefixed `v_` so a generated name can never collide with
/// a configured ML module name.
pub fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,7}".prop_map(|s| format!("v_{s}"))
}

fn number() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u32..10_000).prop_map(|n| n.to_string()),
        (0u32..100, 0u32..100).prop_map(|(a, b)| format!("{a}.{b}")),
        (0u32..255).prop_map(|n| format!("0x{n:x}")),
    ]
}

/// Text safe to embed in any quoting style: no quotes, no backslashes,
/// no hashes, no braces (brace-free keeps f-strings simple).
fn quiet_text() -> impl Strategy<Value = String> {
    "[a-z0-9 .,:+-]{0,20}"
}

fn indent() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => Just(String::new()),
        2 => Just("    ".to_string()),
        1 => Just("  ".to_string()),
        1 => Just("\t".to_string()),
    ]
}

/// One self-contained physical line (without its terminator).
pub fn plain_line() -> impl Strategy<Value = String> {
    let assign = (ident(), number()).prop_map(|(a, b)| format!("{a} = {b}"));
    let call = (ident(), ident(), number()).prop_map(|(a, b, c)| format!("{a} = {b}({c})"));
    let string_assign = (ident(), quiet_text(), prop_oneof![Just("'"), Just("\"")])
        .prop_map(|(a, t, q)| format!("{a} = {q}{t}{q}"));
    let fstring = (ident(), ident(), quiet_text())
        .prop_map(|(a, b, t)| format!("{a} = f\"{t} {{{b}}}\""));
    let raw = (ident(), quiet_text()).prop_map(|(a, t)| format!("{a} = r'{t}'"));
    let comment = quiet_text().prop_map(|t| format!("# {t}"));
    let def_line = (ident(), ident(), ident())
        .prop_map(|(f, a, b)| format!("def {f}({a}, {b}):"));
    let ret = (ident(), ident()).prop_map(|(a, b)| format!("    return {a} + {b}"));
    let compare = (ident(), number()).prop_map(|(a, n)| format!("{a} == {n}"));
    let import_safe = ident().prop_map(|m| format!("import {m}"));
    prop_oneof![
        4 => assign,
        3 => call,
        2 => string_assign,
        2 => fstring,
        1 => raw,
        2 => comment,
        1 => def_line,
        1 => ret,
        1 => compare,
        1 => import_safe,
        1 => Just(String::new()),
    ]
}

/// Fragments that span multiple physical lines.
fn multiline_fragment() -> impl Strategy<Value = String> {
    let triple = (ident(), quiet_text(), quiet_text())
        .prop_map(|(a, t1, t2)| format!("{a} = \"\"\"{t1}\n{t2}\"\"\""));
    let backslash = (ident(), number(), number())
        .prop_map(|(a, m, n)| format!("{a} = {m} + \\\n    {n}"));
    let bracket = (ident(), ident(), number(), number())
        .prop_map(|(a, f, m, n)| format!("{a} = {f}({m},\n    {n})"));
    prop_oneof![triple, backslash, bracket]
}

/// A whole small source file. Always lexes cleanly.
pub fn source() -> impl Strategy<Value = String> {
    let line = prop_oneof![
        6 => (indent(), plain_line()).prop_map(|(i, l)| {
            if l.is_empty() { l } else { format!("{i}{l}") }
        }),
        1 => multiline_fragment(),
    ];
    (proptest::collection::vec(line, 0..10), proptest::bool::ANY).prop_map(
        |(lines, trailing_newline)| {
            let mut src = lines.join("\n");
            if trailing_newline && !src.is_empty() {
                src.push('\n');
            }
            src
        },
    )
}
