//! Shallow statement-level extraction on top of the token stream.
//!
//! This is deliberately not a parser. Checkers need three things from a
//! Python file — which modules it imports, what functions it defines, and
//! which names it binds at statement level — and all three can be read
//! directly off logical lines. Anything more (expressions, control flow)
//! is out of scope, and the extractors here prefer returning nothing over
//! guessing when a statement's shape is unusual.

use crate::pylex::{LogicalLine, Token, TokenKind};

/// One imported module, recorded per dotted name that appears.
///
/// `import a.b, c` yields two imports with roots `a` and `c`;
/// `from torch import nn` yields root `torch` with alias `nn` (the bound
/// name). A relative `from . import x` has an empty root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    /// First segment of the dotted module path; `""` for relative imports.
    pub root_module: String,
    /// Full dotted path as written (prefixed with dots if relative).
    pub full_path: String,
    /// Name actually bound in the namespace, when it differs from the
    /// root: `import numpy as np` → `np`, `from torch import nn` → `nn`.
    /// `*` imports bind nothing nameable and get alias `*`.
    pub alias: Option<String>,
    pub line: u32,
}

/// A `def`/`async def` header with its declared parameter names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<String>,
    /// Parameter count for arity checks: `*args`/`**kwargs` count one
    /// each, `self`/`cls` in the first slot are not excluded here.
    pub param_count: usize,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BindingKind {
    Variable,
    Function,
    Class,
    Argument,
    ImportAlias,
}

/// A name introduced by an assignment statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameBinding {
    pub name: String,
    pub kind: BindingKind,
    pub line: u32,
    pub column: u32,
}

/// Statements these extractors skip entirely when they start a line.
const STMT_KEYWORDS: &[&str] = &[
    "def", "class", "if", "elif", "else", "for", "while", "try", "except", "finally", "with",
    "return", "yield", "raise", "import", "from", "global", "nonlocal", "del", "pass", "break",
    "continue", "assert", "lambda", "async", "await", "match",
];

fn is_name(tok: &Token, text: &str) -> bool {
    tok.kind == TokenKind::Name && tok.text == text
}

fn is_op(tok: &Token, text: &str) -> bool {
    tok.kind == TokenKind::Operator && tok.text == text
}

/// Split a logical line's tokens on top-level `;` into simple statements.
fn simple_statements(line: &LogicalLine) -> Vec<&[Token]> {
    let mut out = Vec::new();
    let mut depth = 0u32;
    let mut start = 0usize;
    for (i, tok) in line.tokens.iter().enumerate() {
        if tok.kind == TokenKind::Operator {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                ";" if depth == 0 => {
                    if i > start {
                        out.push(&line.tokens[start..i]);
                    }
                    start = i + 1;
                }
                _ => {}
            }
        }
    }
    if start < line.tokens.len() {
        out.push(&line.tokens[start..]);
    }
    out
}

/// Read one dotted name (`a.b.c`) starting at `i`; returns the path and
/// the index just past it.
fn dotted_name(toks: &[Token], mut i: usize) -> Option<(String, usize)> {
    let first = toks.get(i)?;
    if first.kind != TokenKind::Name {
        return None;
    }
    let mut path = first.text.clone();
    i += 1;
    while i + 1 < toks.len() && is_op(&toks[i], ".") && toks[i + 1].kind == TokenKind::Name {
        path.push('.');
        path.push_str(&toks[i + 1].text);
        i += 2;
    }
    Some((path, i))
}

fn root_of(path: &str) -> &str {
    path.split('.').next().unwrap_or(path)
}

/// Extract imports from one logical line. Handles `import a.b as x, c`,
/// `from pkg.sub import n1 as a1, n2`, `from . import x`, and
/// `from pkg import *`; anything else yields nothing.
pub fn extract_imports(line: &LogicalLine) -> Vec<Import> {
    let mut imports = Vec::new();
    for stmt in simple_statements(line) {
        let Some(head) = stmt.first() else { continue };
        if is_name(head, "import") {
            imports.extend(plain_import(stmt));
        } else if is_name(head, "from") {
            imports.extend(from_import(stmt));
        }
    }
    imports
}

fn plain_import(stmt: &[Token]) -> Vec<Import> {
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let Some((path, next)) = dotted_name(stmt, i) else { break };
        i = next;
        let mut alias = None;
        if stmt.get(i).is_some_and(|t| is_name(t, "as")) {
            if let Some(a) = stmt.get(i + 1).filter(|t| t.kind == TokenKind::Name) {
                alias = Some(a.text.clone());
                i += 2;
            } else {
                break;
            }
        }
        out.push(Import {
            root_module: root_of(&path).to_string(),
            full_path: path,
            alias,
            line: stmt[0].line,
        });
        if stmt.get(i).is_some_and(|t| is_op(t, ",")) {
            i += 1;
        } else {
            break;
        }
    }
    out
}

fn from_import(stmt: &[Token]) -> Vec<Import> {
    // leading dots mark a relative import; the root is then empty
    let mut i = 1;
    let mut dots = String::new();
    while stmt.get(i).is_some_and(|t| is_op(t, ".") || is_op(t, "...")) {
        dots.push_str(&stmt[i].text);
        i += 1;
    }
    // `from . import x` has no module path before the keyword
    let at_import_kw = stmt.get(i).is_some_and(|t| is_name(t, "import"));
    let (path, next) = match dotted_name(stmt, i) {
        Some((p, n)) if !at_import_kw => (p, n),
        _ if !dots.is_empty() => (String::new(), i),
        _ => return Vec::new(),
    };
    i = next;
    if !stmt.get(i).is_some_and(|t| is_name(t, "import")) {
        return Vec::new();
    }
    i += 1;
    let root = if dots.is_empty() { root_of(&path).to_string() } else { String::new() };
    let full_prefix = format!("{dots}{path}");
    // joining `.` only when there is a module part avoids `..helpers`
    // for `from . import helpers`
    let join = if path.is_empty() { "" } else { "." };
    let line = stmt[0].line;

    let mut out = Vec::new();
    if stmt.get(i).is_some_and(|t| is_op(t, "*")) {
        out.push(Import {
            root_module: root,
            full_path: full_prefix,
            alias: Some("*".to_string()),
            line,
        });
        return out;
    }
    // optional parenthesised name list
    if stmt.get(i).is_some_and(|t| is_op(t, "(")) {
        i += 1;
    }
    loop {
        let Some(name) = stmt.get(i).filter(|t| t.kind == TokenKind::Name) else { break };
        let imported = name.text.clone();
        i += 1;
        let mut bound = imported.clone();
        if stmt.get(i).is_some_and(|t| is_name(t, "as")) {
            if let Some(a) = stmt.get(i + 1).filter(|t| t.kind == TokenKind::Name) {
                bound = a.text.clone();
                i += 2;
            } else {
                break;
            }
        }
        out.push(Import {
            root_module: root.clone(),
            full_path: format!("{full_prefix}{join}{imported}"),
            alias: Some(bound),
            line,
        });
        if stmt.get(i).is_some_and(|t| is_op(t, ",")) {
            i += 1;
        } else {
            break;
        }
    }
    out
}

/// Extract a function definition from a logical line starting with `def`
/// or `async def`.
pub fn extract_function_def(line: &LogicalLine) -> Option<FunctionDef> {
    let toks = &line.tokens;
    let mut i = 0;
    if toks.first().is_some_and(|t| is_name(t, "async")) {
        i = 1;
    }
    if !toks.get(i).is_some_and(|t| is_name(t, "def")) {
        return None;
    }
    let name_tok = toks.get(i + 1).filter(|t| t.kind == TokenKind::Name)?;
    if !toks.get(i + 2).is_some_and(|t| is_op(t, "(")) {
        return None;
    }

    // walk the parameter list: a parameter name is a NAME at depth 1
    // that directly follows `(`, `,`, `*`, or `**`; everything after a
    // default `=` or annotation `:` is skipped until the next comma.
    let mut params = Vec::new();
    let mut depth = 0u32;
    let mut expect_param = false;
    let mut skipping = false;
    for tok in &toks[i + 2..] {
        if tok.kind == TokenKind::Operator {
            match tok.text.as_str() {
                "(" | "[" | "{" => {
                    depth += 1;
                    if depth == 1 {
                        expect_param = true;
                        continue;
                    }
                }
                ")" | "]" | "}" => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        break;
                    }
                }
                "," if depth == 1 => {
                    expect_param = true;
                    skipping = false;
                    continue;
                }
                "*" | "**" if depth == 1 && !skipping => continue,
                // bare `*` and `/` separators, defaults, annotations
                "=" | ":" if depth == 1 => {
                    skipping = true;
                    continue;
                }
                _ => {}
            }
        }
        if depth == 1 && expect_param && !skipping && tok.kind == TokenKind::Name {
            params.push(tok.text.clone());
            expect_param = false;
        }
    }
    Some(FunctionDef {
        name: name_tok.text.clone(),
        param_count: params.len(),
        params,
        line: name_tok.line,
        column: name_tok.column,
    })
}

/// Names bound at statement level by plain, annotated, chained, or tuple
/// assignment targets. Attribute (`a.b = ...`) and subscript
/// (`a[i] = ...`) targets bind nothing new and are skipped, as is any
/// statement that opens with a keyword.
pub fn extract_assignment_targets(line: &LogicalLine) -> Vec<NameBinding> {
    let mut bindings = Vec::new();
    for stmt in simple_statements(line) {
        extract_targets_of(stmt, &mut bindings);
    }
    bindings
}

fn extract_targets_of(stmt: &[Token], out: &mut Vec<NameBinding>) {
    let Some(head) = stmt.first() else { return };
    if head.kind == TokenKind::Name && STMT_KEYWORDS.contains(&head.text.as_str()) {
        return;
    }
    // find the last top-level plain `=`, stopping at `lambda` (whose
    // defaults live at depth 0); `==`, `:=`, `+=` etc. are distinct
    // tokens, so a text match on `=` is exact.
    let mut depth = 0u32;
    let mut last_eq = None;
    for (i, tok) in stmt.iter().enumerate() {
        if tok.kind == TokenKind::Name && tok.text == "lambda" && depth == 0 {
            break;
        }
        if tok.kind == TokenKind::Operator {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                "=" if depth == 0 => last_eq = Some(i),
                _ => {}
            }
        }
    }
    let Some(eq) = last_eq else { return };

    // every `=`-separated group to the left is a target of a chained
    // assignment; each group is one or more comma-separated elements.
    let mut group_start = 0usize;
    let mut depth = 0u32;
    for i in 0..=eq {
        let tok = &stmt[i];
        if tok.kind == TokenKind::Operator {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                "=" if depth == 0 => {
                    bind_target_group(&stmt[group_start..i], out);
                    group_start = i + 1;
                }
                _ => {}
            }
        }
    }
}

/// One target group: `a`, `a, b`, `(a, b)`, `[a, b]`, `a: int`, `*rest`.
fn bind_target_group(group: &[Token], out: &mut Vec<NameBinding>) {
    // strip one level of wrapping parens/brackets around the whole group
    let group = strip_wrapping(group);
    let mut depth = 0u32;
    let mut element: Vec<&Token> = Vec::new();
    let flush = |element: &mut Vec<&Token>, out: &mut Vec<NameBinding>| {
        bind_element(element, out);
        element.clear();
    };
    for tok in group {
        if tok.kind == TokenKind::Operator {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                "," if depth == 0 => {
                    flush(&mut element, out);
                    continue;
                }
                _ => {}
            }
        }
        element.push(tok);
    }
    flush(&mut element, out);
}

fn strip_wrapping(group: &[Token]) -> &[Token] {
    if group.len() < 2 {
        return group;
    }
    let (first, last) = (&group[0], &group[group.len() - 1]);
    let wrapped = (is_op(first, "(") && is_op(last, ")")) || (is_op(first, "[") && is_op(last, "]"));
    if !wrapped {
        return group;
    }
    // the closer must match the opener, not some later bracket
    let mut depth = 0i32;
    for (i, tok) in group.iter().enumerate() {
        if tok.kind == TokenKind::Operator {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            }
        }
        if depth == 0 && i < group.len() - 1 {
            return group;
        }
    }
    &group[1..group.len() - 1]
}

/// A single element binds a name only in the shapes we can be sure of:
/// `NAME`, `* NAME`, or `NAME : annotation...`.
fn bind_element(element: &[&Token], out: &mut Vec<NameBinding>) {
    let tok = match element {
        [t] if t.kind == TokenKind::Name => t,
        [star, t] if is_op(star, "*") && t.kind == TokenKind::Name => t,
        [t, colon, ..] if t.kind == TokenKind::Name && is_op(colon, ":") => t,
        _ => return,
    };
    if STMT_KEYWORDS.contains(&tok.text.as_str()) || tok.text == "None" {
        return;
    }
    out.push(NameBinding {
        name: tok.text.clone(),
        kind: BindingKind::Variable,
        line: tok.line,
        column: tok.column,
    });
}

/// All NAME-token texts in a logical line; used for usage scans.
pub fn name_texts(line: &LogicalLine) -> impl Iterator<Item = &str> {
    line.tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Name)
        .map(|t| t.text.as_str())
}

/// NAME-token texts outside import statements, so an import line's own
/// module name does not count as a usage of that import.
pub fn non_import_name_texts(line: &LogicalLine) -> Vec<&str> {
    simple_statements(line)
        .into_iter()
        .filter(|stmt| {
            !stmt
                .first()
                .is_some_and(|t| is_name(t, "import") || is_name(t, "from"))
        })
        .flat_map(|stmt| {
            stmt.iter()
                .filter(|t| t.kind == TokenKind::Name)
                .map(|t| t.text.as_str())
        })
        .collect()
}
