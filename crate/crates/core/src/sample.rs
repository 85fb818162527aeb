//! Seeded random generation of small programs for equivalence and law
//! checking.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::lang::{if_then_else, seq, Action, Command, Expr, FenceKind, ThreadId, Variable};
use crate::model::MemoryModel;
use crate::state::State;

#[derive(Debug, Clone, Copy)]
pub struct SampleConfig {
    /// Upper bound on actions over all threads.
    pub max_actions: usize,
    pub max_threads: usize,
    /// Allow one `if` statement in one thread.
    pub allow_branch: bool,
    /// Only stores of registers/constants, loads, register operations and
    /// full fences.
    pub assembler_only: bool,
    /// Fences and annotations are drawn from what this model understands.
    pub model: MemoryModel,
}

impl SampleConfig {
    pub fn for_model(model: MemoryModel) -> Self {
        SampleConfig {
            max_actions: 8,
            max_threads: 2,
            allow_branch: true,
            assembler_only: false,
            model,
        }
    }

    pub fn assembler() -> Self {
        SampleConfig {
            max_actions: 8,
            max_threads: 2,
            allow_branch: false,
            assembler_only: true,
            model: MemoryModel::Tso,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Program {
    pub threads: Vec<Command>,
    pub shared: Vec<Variable>,
    pub locals: Vec<Variable>,
}

impl Program {
    pub fn vars(&self) -> impl Iterator<Item = &Variable> {
        self.shared.iter().chain(&self.locals)
    }

    /// Every assignment of `{0, 1}` to the shared variables, registers 0.
    pub fn initial_states(&self) -> Vec<State> {
        let n = self.shared.len();
        (0..1usize << n)
            .map(|bits| {
                self.shared
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v.clone(), ((bits >> i) & 1) as i64))
                    .chain(self.locals.iter().map(|v| (v.clone(), 0)))
                    .collect()
            })
            .collect()
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn shared_vars() -> Vec<Variable> {
    vec![Variable::shared("x"), Variable::shared("y")]
}

pub fn thread_locals(t: ThreadId) -> Vec<Variable> {
    vec![Variable::local(t, "r1"), Variable::local(t, "r2")]
}

fn fence_kinds(m: MemoryModel) -> &'static [FenceKind] {
    use FenceKind::*;
    match m {
        MemoryModel::Arm => &[Full, StoreStore, Control],
        MemoryModel::RiscV => &[Full, StoreStore, LoadLoad, RwW, RRw],
        _ => &[Full],
    }
}

fn has_annotations(m: MemoryModel) -> bool {
    matches!(m, MemoryModel::RcPc | MemoryModel::RcSc | MemoryModel::Arm | MemoryModel::RiscV)
}

fn constant<R: Rng>(rng: &mut R) -> Expr {
    Expr::Const(rng.gen_range(0..2))
}

/// A single action of thread `t`.
pub fn random_action<R: Rng>(rng: &mut R, t: ThreadId, cfg: &SampleConfig) -> Action {
    let shared = shared_vars();
    let locals = thread_locals(t);
    let x = shared.choose(rng).unwrap().clone();
    let r = locals.choose(rng).unwrap().clone();
    let r2 = locals.choose(rng).unwrap().clone();
    let kinds = if cfg.assembler_only { 5 } else { 7 };
    let base = match rng.gen_range(0..kinds) {
        0 | 1 => {
            let e = if rng.gen_bool(0.7) { constant(rng) } else { Expr::var(&r2) };
            Action::assign(&x, e)
        }
        2 | 3 => Action::assign(&r, Expr::var(&x)),
        4 => {
            if rng.gen_bool(0.5) {
                Action::fence(FenceKind::Full)
            } else {
                Action::assign(&r, Expr::add(Expr::var(&r2), constant(rng)))
            }
        }
        5 => Action::fence(*fence_kinds(cfg.model).choose(rng).unwrap()),
        _ => {
            if cfg.model.classifies_accesses() || cfg.model == MemoryModel::Tso || rng.gen_bool(0.5) {
                Action::guard(Expr::eq(Expr::var(&r2), constant(rng)))
            } else {
                let y = shared.choose(rng).unwrap();
                if rng.gen_bool(0.5) {
                    Action::guard(Expr::eq(Expr::var(y), constant(rng)))
                } else {
                    Action::assign(&x, Expr::add(Expr::var(y), constant(rng)))
                }
            }
        }
    };
    if !cfg.assembler_only && has_annotations(cfg.model) && rng.gen_bool(0.2) {
        if let Ok(a) = Action::annotate(
            if base.written().is_some_and(Variable::is_shared) {
                crate::lang::Annotation::Release
            } else {
                crate::lang::Annotation::Acquire
            },
            base.clone(),
        ) {
            return a;
        }
    }
    base
}

fn straight<R: Rng>(rng: &mut R, t: ThreadId, n: usize, cfg: &SampleConfig) -> Command {
    Command::chain(MemoryModel::Sc, (0..n).map(|_| Command::act(random_action(rng, t, cfg))))
}

/// A program of at most `cfg.max_threads` threads and `cfg.max_actions`
/// actions, every composition sequential.
pub fn random_program<R: Rng>(rng: &mut R, cfg: &SampleConfig) -> Program {
    let threads_n = rng.gen_range(1..=cfg.max_threads.max(1));
    let total = rng.gen_range(threads_n..=cfg.max_actions.max(threads_n));
    let mut sizes = vec![1usize; threads_n];
    for _ in threads_n..total {
        let i = rng.gen_range(0..threads_n);
        sizes[i] += 1;
    }
    let branch_thread = (cfg.allow_branch && rng.gen_bool(0.5)).then(|| rng.gen_range(0..threads_n));
    let threads = sizes
        .iter()
        .enumerate()
        .map(|(t, &n)| {
            if branch_thread == Some(t) && n >= 2 {
                // One action slot goes to the branch condition.
                let body = n - 1;
                let pre = rng.gen_range(1..=body.min(3));
                let rest = body - pre;
                let then_n = rng.gen_range(0..=rest);
                let r = thread_locals(t).choose(rng).unwrap().clone();
                let cond = Expr::eq(Expr::var(&r), constant(rng));
                let ite = if_then_else(
                    MemoryModel::Sc,
                    cond,
                    straight(rng, t, then_n, cfg),
                    straight(rng, t, rest - then_n, cfg),
                );
                seq(straight(rng, t, pre, cfg), ite)
            } else {
                straight(rng, t, n, cfg)
            }
        })
        .collect();
    Program {
        threads,
        shared: shared_vars(),
        locals: (0..threads_n).flat_map(thread_locals).collect(),
    }
}
