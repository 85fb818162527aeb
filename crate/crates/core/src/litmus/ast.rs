use std::collections::BTreeMap;
use std::fmt;

use crate::lang::{if_then_else, par, while_loop, Action, Annotation, Command, Expr, FenceKind, ThreadId, Value, Variable};
use crate::model::MemoryModel;
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Allowed,
    Forbidden,
}

impl Verdict {
    pub fn keyword(self) -> &'static str {
        match self {
            Verdict::Allowed => "allowed",
            Verdict::Forbidden => "forbidden",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// `exists (c)` asks whether `c` is reachable; `forbidden (c)` states the
/// same outcome is meant to be unreachable. Both are decided identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forbidden,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Exists => "exists",
            Quantifier::Forbidden => "forbidden",
        }
    }
}

/// Surface statements, kept so tests print back as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign {
        annot: Option<Annotation>,
        target: Variable,
        expr: Expr,
    },
    Assume {
        annot: Option<Annotation>,
        cond: Expr,
    },
    Fence(FenceKind),
    Skip,
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
}

fn annotated(annot: Option<Annotation>, a: Action) -> Action {
    match annot {
        Some(oc) => Action::annotate(oc, a).expect("parser only annotates assignments and guards"),
        None => a,
    }
}

impl Stmt {
    pub fn to_command(&self, m: MemoryModel) -> Command {
        match self {
            Stmt::Assign { annot, target, expr } => Command::act(annotated(*annot, Action::assign(target, expr.clone()))),
            Stmt::Assume { annot, cond } => Command::act(annotated(*annot, Action::guard(cond.clone()))),
            Stmt::Fence(k) => Command::act(Action::fence(*k)),
            Stmt::Skip => Command::Terminated,
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => if_then_else(m, cond.clone(), block(then_branch, m), block(else_branch, m)),
            Stmt::While { cond, body } => while_loop(m, cond.clone(), block(body, m)),
        }
    }
}

pub fn block(stmts: &[Stmt], m: MemoryModel) -> Command {
    Command::chain(m, stmts.iter().map(|s| s.to_command(m)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    pub id: ThreadId,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LitmusTest {
    pub name: String,
    pub model: MemoryModel,
    pub shared: Vec<String>,
    /// Declared registers per thread.
    pub locals: BTreeMap<ThreadId, Vec<String>>,
    pub init: Vec<(Variable, Value)>,
    pub threads: Vec<Thread>,
    pub quantifier: Quantifier,
    pub condition: Expr,
    pub expect: Verdict,
}

impl LitmusTest {
    /// Each thread with sequential composition; run it with
    /// [`crate::explore`] to parameterize by a model.
    pub fn thread_commands(&self) -> Vec<Command> {
        self.threads.iter().map(|t| block(&t.body, MemoryModel::Sc)).collect()
    }

    /// The whole program under `m`, threads in parallel.
    pub fn program(&self, m: MemoryModel) -> Command {
        let mut it = self.threads.iter().rev().map(|t| block(&t.body, m));
        let Some(last) = it.next() else {
            return Command::Terminated;
        };
        it.fold(last, |acc, t| par(t, acc))
    }

    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> = self.shared.iter().map(|s| Variable::shared(s)).collect();
        for (t, names) in &self.locals {
            vars.extend(names.iter().map(|n| Variable::local(*t, n)));
        }
        vars
    }

    /// Declared variables at 0, then the `init` entries.
    pub fn initial_state(&self) -> State {
        let mut s: State = self.variables().into_iter().map(|v| (v, 0)).collect();
        for (v, val) in &self.init {
            s.set(v.clone(), *val);
        }
        s
    }
}
