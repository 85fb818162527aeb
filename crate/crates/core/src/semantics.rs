//! Small-step operational semantics of commands and trace enumeration.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lang::{finite_iter, Action, ActionClass, Command};
use crate::model::{reorder_over_command, MemoryModel};

pub const DEFAULT_UNROLL: usize = 2;
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub label: Action,
    pub next: Command,
}

/// A sequence of visible actions.
pub type Trace = Vec<Action>;

fn push(out: &mut Vec<Step>, label: Action, next: Command) {
    out.push(Step { label, next });
}

fn step_into(c: &Command, unroll: usize, reorder: bool, out: &mut Vec<Step>) -> Result<()> {
    match c {
        Command::Terminated => {}
        Command::Act(a) => push(out, a.clone(), Command::Terminated),
        Command::Iterate(m, body) => {
            for n in 0..=unroll {
                push(out, Action::tau(), finite_iter(*m, body, n));
            }
        }
        Command::Choice(c1, c2) => {
            push(out, Action::tau(), (**c1).clone());
            push(out, Action::tau(), (**c2).clone());
        }
        Command::PSeq(m, c1, c2) => {
            let mut left = Vec::new();
            step_into(c1, unroll, reorder, &mut left)?;
            for s in left {
                push(out, s.label, Command::PSeq(*m, Arc::new(s.next), c2.clone()));
            }
            if c1.is_terminated() {
                push(out, Action::tau(), (**c2).clone());
            }
            if reorder && *m != MemoryModel::Sc {
                let mut right = Vec::new();
                step_into(c2, unroll, reorder, &mut right)?;
                for s in right {
                    if let Some(label) = reorder_over_command(*m, c1, &s.label)? {
                        push(out, label, Command::PSeq(*m, c1.clone(), Arc::new(s.next)));
                    }
                }
            }
        }
    }
    Ok(())
}

/// All single steps of `c`; iteration unfolds at most `unroll` times.
pub fn step(c: &Command, unroll: usize) -> Result<Vec<Step>> {
    let mut out = Vec::new();
    step_into(c, unroll, true, &mut out)?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Steps that treat every composition as sequential: no action runs ahead
/// of an earlier one.
pub fn sequential_step(c: &Command, unroll: usize) -> Vec<Step> {
    let mut out = Vec::new();
    step_into(c, unroll, false, &mut out).expect("sequential steps never consult a model");
    out.sort();
    out.dedup();
    out
}

/// Replaces every model parameter by `m`, keeping parallel compositions.
pub fn under_model(c: &Command, m: MemoryModel) -> Command {
    match c {
        Command::Terminated | Command::Act(_) => c.clone(),
        Command::PSeq(MemoryModel::Par, c1, c2) => Command::pseq(MemoryModel::Par, under_model(c1, m), under_model(c2, m)),
        Command::PSeq(_, c1, c2) => Command::pseq(m, under_model(c1, m), under_model(c2, m)),
        Command::Choice(c1, c2) => Command::choice(under_model(c1, m), under_model(c2, m)),
        Command::Iterate(_, body) => Command::iterate(m, under_model(body, m)),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    pub unroll: usize,
    pub cap: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            unroll: DEFAULT_UNROLL,
            cap: DEFAULT_CAP,
        }
    }
}

pub type TraceSet = BTreeSet<Trace>;

struct Enumerator<K, F, T> {
    successors: F,
    is_final: T,
    memo: HashMap<K, Arc<TraceSet>>,
    entered: usize,
    cap: usize,
}

impl<K, F, T> Enumerator<K, F, T>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K) -> Result<Vec<(Action, K)>>,
    T: Fn(&K) -> bool,
{
    fn traces(&mut self, k: &K) -> Result<Arc<TraceSet>> {
        if let Some(t) = self.memo.get(k) {
            return Ok(t.clone());
        }
        self.entered += 1;
        if self.entered > self.cap {
            return Err(Error::NonTerminatingExploration { cap: self.cap });
        }
        let mut out = TraceSet::new();
        if (self.is_final)(k) {
            out.insert(Vec::new());
        }
        for (label, next) in (self.successors)(k)? {
            let class = label.classify();
            if class == ActionClass::Infeasible {
                continue;
            }
            let rest = self.traces(&next)?;
            for t in rest.iter() {
                let mut full = Vec::with_capacity(t.len() + 1);
                if class == ActionClass::Visible {
                    full.push(label.clone());
                }
                full.extend(t.iter().cloned());
                out.insert(full);
            }
        }
        let out = Arc::new(out);
        self.memo.insert(k.clone(), out.clone());
        Ok(out)
    }
}

/// Traces of every run from `start` to a final configuration of an
/// arbitrary labelled transition system. Silent labels are elided and runs
/// through infeasible labels dropped.
pub(crate) fn collect_traces<K, F, T>(start: &K, cap: usize, is_final: T, successors: F) -> Result<TraceSet>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K) -> Result<Vec<(Action, K)>>,
    T: Fn(&K) -> bool,
{
    let mut e = Enumerator {
        successors,
        is_final,
        memo: HashMap::new(),
        entered: 0,
        cap,
    };
    let t = e.traces(start)?;
    Ok((*t).clone())
}

/// Every terminating behaviour of `c`, silent steps elided.
pub fn enumerate_traces(c: &Command, unroll: usize) -> Result<TraceSet> {
    enumerate_traces_with(c, TraceOptions { unroll, ..Default::default() })
}

pub fn enumerate_traces_with(c: &Command, opts: TraceOptions) -> Result<TraceSet> {
    collect_traces(&c.simplified(), opts.cap, Command::is_terminated, |c| {
        Ok(step(c, opts.unroll)?
            .into_iter()
            .map(|s| (s.label, s.next.simplified()))
            .collect())
    })
}

/// Every behaviour of `d` is a behaviour of `c`.
pub fn trace_refines(c: &Command, d: &Command, unroll: usize) -> Result<bool> {
    let tc = enumerate_traces(c, unroll)?;
    let td = enumerate_traces(d, unroll)?;
    Ok(td.is_subset(&tc))
}

pub fn trace_equiv(c: &Command, d: &Command, unroll: usize) -> Result<bool> {
    Ok(enumerate_traces(c, unroll)? == enumerate_traces(d, unroll)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{par, seq, Expr, FenceKind, Variable};
    use MemoryModel::*;

    fn x() -> Variable {
        Variable::shared("x")
    }
    fn y() -> Variable {
        Variable::shared("y")
    }
    fn r(n: u32) -> Variable {
        Variable::local(0, &format!("r{n}"))
    }
    fn asg(x: &Variable, e: Expr) -> Action {
        Action::assign(x, e)
    }
    fn c(v: i64) -> Expr {
        Expr::Const(v)
    }
    fn set(ts: &[&[Action]]) -> TraceSet {
        ts.iter().map(|t| t.to_vec()).collect()
    }

    #[test]
    fn step_examples() {
        let l1 = asg(&r(1), Expr::var(&x()));
        let l2 = asg(&r(2), Expr::var(&y()));
        let steps = step(&Command::pseq(G, l1.clone(), l2.clone()), 2).unwrap();
        assert!(steps.contains(&Step {
            label: l2.clone(),
            next: Command::pseq(G, l1.clone(), Command::Terminated),
        }));
        let a = asg(&x(), c(1));
        let b = asg(&y(), c(1));
        assert_eq!(
            step(&seq(a.clone(), b.clone()), 2).unwrap(),
            vec![Step {
                label: a,
                next: Command::pseq(Sc, Command::Terminated, b),
            }]
        );
        let it = Command::iterate(G, l1);
        assert_eq!(step(&it, 2).unwrap().len(), 3);
    }

    #[test]
    fn trace_examples() {
        let st = asg(&x(), c(1));
        let ld = asg(&r(1), Expr::var(&x()));
        let t = enumerate_traces(&Command::pseq(Tso, st.clone(), ld.clone()), 2).unwrap();
        assert_eq!(t, set(&[&[st.clone(), ld.clone()], &[asg(&r(1), c(1)), st.clone()]]));
        assert_eq!(enumerate_traces(&Command::Terminated, 2).unwrap(), set(&[&[]]));
        let b = asg(&y(), c(1));
        assert_eq!(enumerate_traces(&seq(st.clone(), b.clone()), 2).unwrap(), set(&[&[st, b]]));
    }

    #[test]
    fn silent_and_infeasible_steps() {
        let a = asg(&x(), c(1));
        let t = enumerate_traces(&seq(Action::guard(Expr::eq(c(0), c(0))), a.clone()), 2).unwrap();
        assert_eq!(t, set(&[&[a.clone()]]));
        let t = enumerate_traces(&seq(Action::guard(c(0)), a.clone()), 2).unwrap();
        assert!(t.is_empty());
        let t = enumerate_traces(&Command::choice(Action::guard(c(0)), a.clone()), 2).unwrap();
        assert_eq!(t, set(&[&[a]]));
    }

    #[test]
    fn iteration_unrolls_up_to_bound() {
        let a = asg(&x(), c(1));
        let t = enumerate_traces(&Command::iterate(Sc, a.clone()), 2).unwrap();
        assert_eq!(t, set(&[&[], &[a.clone()], &[a.clone(), a.clone()]]));
    }

    #[test]
    fn law_examples() {
        let a = asg(&x(), c(1));
        let b = asg(&r(1), Expr::var(&y()));
        for m in MemoryModel::ALL {
            assert!(trace_refines(&Command::pseq(m, a.clone(), b.clone()), &seq(a.clone(), b.clone()), 2).unwrap());
        }
        let ch = Command::choice(a.clone(), b.clone());
        assert!(trace_refines(&ch, &Command::act(a.clone()), 2).unwrap());
        let f = Action::fence(FenceKind::Full);
        let lhs = Command::pseq(G, a.clone(), Command::pseq(G, f.clone(), b.clone()));
        let rhs = seq(a, seq(f, b));
        assert!(trace_equiv(&lhs, &rhs, 2).unwrap());
    }

    #[test]
    fn under_model_examples() {
        let a = Command::act(asg(&x(), c(1)));
        let b = Command::act(asg(&y(), c(1)));
        assert_eq!(under_model(&seq(a.clone(), b.clone()), Tso), Command::pseq(Tso, a.clone(), b.clone()));
        let p = par(seq(a.clone(), b.clone()), a.clone());
        assert_eq!(under_model(&p, Tso), par(Command::pseq(Tso, a.clone(), b.clone()), a.clone()));
        assert_eq!(under_model(&p, Sc), p);
    }

    #[test]
    fn cap_is_enforced() {
        let a = asg(&x(), c(1));
        let prog = Command::chain(Par, (0..6).map(|_| Command::act(a.clone())));
        assert!(matches!(
            enumerate_traces_with(&prog, TraceOptions { unroll: 2, cap: 3 }),
            Err(Error::NonTerminatingExploration { cap: 3 })
        ));
    }
}
