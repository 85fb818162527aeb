//! Fetch/commit pipeline: instructions are fetched in program order into a
//! queue and committed out of order as the memory model allows.

use crate::error::Result;
use crate::lang::{Action, ActionClass, Command};
use crate::model::{reorder_over_trace, MemoryModel};
use crate::semantics::{collect_traces, sequential_step, TraceSet, DEFAULT_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PipelineConfig {
    /// Fetched but uncommitted instructions, oldest first.
    pub pending: Vec<Action>,
    pub code: Command,
}

impl PipelineConfig {
    pub fn new(code: Command) -> Self {
        PipelineConfig {
            pending: Vec::new(),
            code: code.simplified(),
        }
    }

    pub fn is_final(&self) -> bool {
        self.pending.is_empty() && self.code.is_terminated()
    }
}

/// Fetch steps are labelled with the silent action; commit steps with the
/// committed (possibly forwarded) instruction.
pub fn pipeline_step(cfg: &PipelineConfig, m: MemoryModel, unroll: usize) -> Result<Vec<(Action, PipelineConfig)>> {
    let mut out = Vec::new();
    for s in sequential_step(&cfg.code, unroll) {
        let mut pending = cfg.pending.clone();
        match s.label.classify() {
            ActionClass::Infeasible => continue,
            ActionClass::Silent => {}
            ActionClass::Visible => pending.push(s.label),
        }
        out.push((
            Action::tau(),
            PipelineConfig {
                pending,
                code: s.next.simplified(),
            },
        ));
    }
    for i in 0..cfg.pending.len() {
        if let Some(label) = reorder_over_trace(m, &cfg.pending[..i], &cfg.pending[i])? {
            let mut pending = cfg.pending.clone();
            pending.remove(i);
            out.push((
                label,
                PipelineConfig {
                    pending,
                    code: cfg.code.clone(),
                },
            ));
        }
    }
    Ok(out)
}

/// Traces of `c` run through a pipeline governed by `m`. Any model
/// parameters inside `c` are ignored: the code is fetched sequentially.
pub fn pipeline_traces(c: &Command, m: MemoryModel, unroll: usize) -> Result<TraceSet> {
    pipeline_traces_capped(c, m, unroll, DEFAULT_CAP)
}

pub fn pipeline_traces_capped(c: &Command, m: MemoryModel, unroll: usize, cap: usize) -> Result<TraceSet> {
    collect_traces(&PipelineConfig::new(c.clone()), cap, PipelineConfig::is_final, |cfg| {
        pipeline_step(cfg, m, unroll)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{seq, Expr, Variable};
    use crate::semantics::{enumerate_traces, under_model};

    fn x() -> Variable {
        Variable::shared("x")
    }
    fn y() -> Variable {
        Variable::shared("y")
    }
    fn r(n: u32) -> Variable {
        Variable::local(0, &format!("r{n}"))
    }

    #[test]
    fn commit_out_of_order_under_g() {
        let l1 = Action::assign(&r(1), Expr::var(&x()));
        let l2 = Action::assign(&r(2), Expr::var(&y()));
        let cfg = PipelineConfig {
            pending: vec![l1.clone(), l2.clone()],
            code: Command::Terminated,
        };
        let steps = pipeline_step(&cfg, MemoryModel::G, 2).unwrap();
        assert!(steps.iter().any(|(lab, next)| *lab == l2 && next.pending == vec![l1.clone()]));
        let sc = pipeline_step(&cfg, MemoryModel::Sc, 2).unwrap();
        assert_eq!(sc.len(), 1);
        assert_eq!(sc[0].0, l1);
    }

    #[test]
    fn trace_examples() {
        let st = Action::assign(&x(), Expr::Const(1));
        let ld = Action::assign(&r(1), Expr::var(&x()));
        let prog = seq(st.clone(), ld.clone());
        let t = pipeline_traces(&prog, MemoryModel::Tso, 2).unwrap();
        let expected: TraceSet = [vec![st.clone(), ld.clone()], vec![Action::assign(&r(1), Expr::Const(1)), st.clone()]]
            .into_iter()
            .collect();
        assert_eq!(t, expected);
        assert_eq!(t, enumerate_traces(&under_model(&prog, MemoryModel::Tso), 2).unwrap());

        let st2 = Action::assign(&y(), Expr::Const(1));
        let t = pipeline_traces(&seq(st.clone(), st2.clone()), MemoryModel::Tso, 2).unwrap();
        assert_eq!(t, [vec![st.clone(), st2.clone()]].into_iter().collect());
        let t = pipeline_traces(&seq(st.clone(), ld.clone()), MemoryModel::Sc, 2).unwrap();
        assert_eq!(t, [vec![st, ld]].into_iter().collect());
    }
}
