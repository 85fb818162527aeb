//! A per-thread FIFO store buffer, the classic operational account of TSO.

use crate::error::{Error, Result};
use crate::lang::{Action, ActionClass, Command, Expr, FenceKind, NoValues, Valuation, Value, Variable};
use crate::semantics::{collect_traces, sequential_step, TraceSet, DEFAULT_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BufferEntry {
    pub var: Variable,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SbConfig {
    /// Pending stores, oldest first.
    pub buffer: Vec<BufferEntry>,
    pub code: Command,
}

impl SbConfig {
    pub fn new(code: Command) -> Self {
        SbConfig {
            buffer: Vec::new(),
            code: code.simplified(),
        }
    }

    pub fn is_final(&self) -> bool {
        self.buffer.is_empty() && self.code.is_terminated()
    }

    /// The most recently buffered value of `x`.
    pub fn buffered(&self, x: &Variable) -> Option<Value> {
        self.buffer.iter().rev().find(|e| e.var == *x).map(|e| e.value)
    }
}

fn unsupported(a: &Action, reason: &str) -> Error {
    Error::UnsupportedInstruction {
        action: a.qualified().to_string(),
        reason: reason.into(),
    }
}

/// Replaces buffered shared variables by their newest buffered values.
fn bypass(cfg: &SbConfig, e: &Expr) -> Expr {
    let mut out = e.clone();
    for x in e.free_vars() {
        if let Some(v) = cfg.buffered(&x) {
            out = out.subst(&x, &Expr::Const(v));
        }
    }
    out
}

/// Successor configurations. `locals` gives this thread's register values,
/// used to evaluate store expressions when they enter the buffer.
pub fn sb_step(cfg: &SbConfig, locals: &dyn Valuation, unroll: usize) -> Result<Vec<(Action, SbConfig)>> {
    let mut out = Vec::new();
    for s in sequential_step(&cfg.code, unroll) {
        let next = s.next.simplified();
        let a = s.label;
        match a.classify() {
            ActionClass::Infeasible => continue,
            ActionClass::Silent => {
                out.push((
                    Action::tau(),
                    SbConfig {
                        buffer: cfg.buffer.clone(),
                        code: next,
                    },
                ));
                continue;
            }
            ActionClass::Visible => {}
        }
        match &a {
            Action::Fence(FenceKind::Full) => {
                if cfg.buffer.is_empty() {
                    out.push((a.clone(), SbConfig { buffer: Vec::new(), code: next }));
                }
            }
            Action::Fence(_) => return Err(unsupported(&a, "the store buffer supports only the full fence")),
            Action::Annotated(..) => return Err(unsupported(&a, "the store buffer has no ordering annotations")),
            Action::Assign(x, e) if x.is_shared() => {
                if e.any_var(&Variable::is_shared) {
                    return Err(Error::UnsupportedMixedAccess(a.qualified().to_string()));
                }
                let mut buffer = cfg.buffer.clone();
                buffer.push(BufferEntry {
                    var: x.clone(),
                    value: e.eval(locals),
                });
                out.push((Action::tau(), SbConfig { buffer, code: next }));
            }
            Action::Assign(r, e) => {
                out.push((
                    Action::assign(r, bypass(cfg, e)),
                    SbConfig {
                        buffer: cfg.buffer.clone(),
                        code: next,
                    },
                ));
            }
            Action::Guard(b) => {
                if b.any_var(&Variable::is_shared) {
                    return Err(unsupported(&a, "guards may only test registers"));
                }
                out.push((
                    a.clone(),
                    SbConfig {
                        buffer: cfg.buffer.clone(),
                        code: next,
                    },
                ));
            }
        }
    }
    if let Some((front, rest)) = cfg.buffer.split_first() {
        out.push((
            Action::assign(&front.var, Expr::Const(front.value)),
            SbConfig {
                buffer: rest.to_vec(),
                code: cfg.code.clone(),
            },
        ));
    }
    Ok(out)
}

fn check_closed_stores(c: &Command) -> Result<()> {
    let mut err = None;
    c.for_each_action(&mut |a| {
        if let Action::Assign(x, e) = a.base() {
            if err.is_none() && x.is_shared() && !e.is_closed() {
                err = Some(unsupported(a, "trace enumeration needs stores of constants"));
            }
        }
    });
    err.map_or(Ok(()), Err)
}

/// Traces of `c` run over an initially empty store buffer. Without a state
/// to read registers from, stores must write constants; the explorer lifts
/// this restriction.
pub fn sb_traces(c: &Command, unroll: usize) -> Result<TraceSet> {
    check_closed_stores(c)?;
    collect_traces(&SbConfig::new(c.clone()), DEFAULT_CAP, SbConfig::is_final, |cfg| {
        sb_step(cfg, &NoValues, unroll)
    })
}
