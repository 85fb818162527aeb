use std::fmt::Write;

use super::ast::{LitmusTest, Stmt};

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn stmts(out: &mut String, body: &[Stmt], depth: usize) {
    for s in body {
        indent(out, depth);
        stmt(out, s, depth);
        out.push('\n');
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    match s {
        Stmt::Assign { annot, target, expr } => {
            if let Some(a) = annot {
                let _ = write!(out, "{} ", a.keyword());
            }
            let _ = write!(out, "{target} := {expr};");
        }
        Stmt::Assume { annot, cond } => {
            if let Some(a) = annot {
                let _ = write!(out, "{} ", a.keyword());
            }
            let _ = write!(out, "assume ({cond});");
        }
        Stmt::Fence(k) => {
            let _ = write!(out, "fence {};", k.keyword());
        }
        Stmt::Skip => out.push_str("skip;"),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = writeln!(out, "if ({cond}) {{");
            stmts(out, then_branch, depth + 1);
            indent(out, depth);
            out.push('}');
            if !else_branch.is_empty() {
                out.push_str(" else {\n");
                stmts(out, else_branch, depth + 1);
                indent(out, depth);
                out.push('}');
            }
        }
        Stmt::While { cond, body } => {
            let _ = writeln!(out, "while ({cond}) {{");
            stmts(out, body, depth + 1);
            indent(out, depth);
            out.push('}');
        }
    }
}

/// Canonical source text; parsing it gives back an equal test.
pub fn print_litmus(t: &LitmusTest) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name {}", t.name);
    let _ = writeln!(out, "model {}", t.model.keyword());
    if !t.shared.is_empty() {
        let _ = writeln!(out, "shared {}", t.shared.join(" "));
    }
    for (tid, names) in &t.locals {
        if !names.is_empty() {
            let _ = writeln!(out, "local P{tid} {}", names.join(" "));
        }
    }
    if !t.init.is_empty() {
        out.push_str("init");
        for (v, val) in &t.init {
            let _ = write!(out, " {}={val}", v.qualified());
        }
        out.push('\n');
    }
    for th in &t.threads {
        let _ = writeln!(out, "thread P{} {{", th.id);
        stmts(&mut out, &th.body, 1);
        out.push_str("}\n");
    }
    let _ = writeln!(out, "{} ({})", t.quantifier.keyword(), t.condition.qualified());
    let _ = writeln!(out, "expect {}", t.expect);
    out
}
