//! Exhaustive state-level exploration of multi-threaded programs, and the
//! effect / weakest-precondition layer built on it.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lang::{Action, ActionClass, Arith, Command};
use crate::model::{admit, MemoryModel};
use crate::pipeline::{pipeline_step, PipelineConfig};
use crate::semantics::{step, under_model, DEFAULT_CAP, DEFAULT_UNROLL};
use crate::state::{apply_action_in, Predicate, State, StateSpace};
use crate::storebuffer::{sb_step, SbConfig};

pub use crate::state::{apply_action, apply_action_in as apply_action_with};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Pseq,
    Pipeline,
    StoreBuffer,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Pseq, Backend::Pipeline, Backend::StoreBuffer];

    pub fn keyword(self) -> &'static str {
        match self {
            Backend::Pseq => "pseq",
            Backend::Pipeline => "pipeline",
            Backend::StoreBuffer => "sb",
        }
    }

    pub fn supports(self, m: MemoryModel) -> bool {
        match self {
            Backend::Pseq => true,
            Backend::Pipeline => m != MemoryModel::Par,
            Backend::StoreBuffer => m == MemoryModel::Tso,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pseq" => Ok(Backend::Pseq),
            "pipeline" => Ok(Backend::Pipeline),
            "sb" | "storebuffer" | "store-buffer" => Ok(Backend::StoreBuffer),
            _ => Err(format!("unknown backend `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExploreOptions {
    pub backend: Backend,
    pub unroll: usize,
    pub cap: usize,
    pub arith: Arith,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            backend: Backend::Pseq,
            unroll: DEFAULT_UNROLL,
            cap: DEFAULT_CAP,
            arith: Arith::Wrapping,
        }
    }
}

impl ExploreOptions {
    pub fn with_backend(backend: Backend) -> Self {
        ExploreOptions {
            backend,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Exploration {
    pub finals: BTreeSet<State>,
    /// Distinct configurations visited.
    pub configurations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ThreadConfig {
    Cmd(Command),
    Pipe(PipelineConfig),
    Sb(SbConfig),
}

impl ThreadConfig {
    fn is_final(&self) -> bool {
        match self {
            ThreadConfig::Cmd(c) => c.is_terminated(),
            ThreadConfig::Pipe(p) => p.is_final(),
            ThreadConfig::Sb(s) => s.is_final(),
        }
    }
}

type Successors = Vec<(Action, ThreadConfig)>;

struct Explorer {
    model: MemoryModel,
    opts: ExploreOptions,
    cache: HashMap<ThreadConfig, std::sync::Arc<Successors>>,
}

impl Explorer {
    fn successors(&mut self, t: &ThreadConfig, state: &State) -> Result<std::sync::Arc<Successors>> {
        if let Some(s) = self.cache.get(t) {
            return Ok(s.clone());
        }
        let unroll = self.opts.unroll;
        let succ: Successors = match t {
            ThreadConfig::Cmd(c) => step(c, unroll)?
                .into_iter()
                .map(|s| (s.label, ThreadConfig::Cmd(s.next.simplified())))
                .collect(),
            ThreadConfig::Pipe(p) => pipeline_step(p, self.model, unroll)?
                .into_iter()
                .map(|(l, n)| (l, ThreadConfig::Pipe(n)))
                .collect(),
            // Store-buffer steps read registers, so they are not cached.
            ThreadConfig::Sb(s) => {
                return Ok(std::sync::Arc::new(
                    sb_step(s, state, unroll)?
                        .into_iter()
                        .map(|(l, n)| (l, ThreadConfig::Sb(n)))
                        .collect(),
                ))
            }
        };
        let succ = std::sync::Arc::new(succ);
        self.cache.insert(t.clone(), succ.clone());
        Ok(succ)
    }

    fn run(&mut self, start: Vec<ThreadConfig>, inits: &[State], out: &mut Exploration) -> Result<()> {
        let mut visited: HashSet<(Vec<ThreadConfig>, State)> = HashSet::new();
        let mut stack: Vec<(Vec<ThreadConfig>, State)> = Vec::new();
        for s in inits {
            let cfg = (start.clone(), s.clone());
            if visited.insert(cfg.clone()) {
                stack.push(cfg);
            }
        }
        while let Some((threads, state)) = stack.pop() {
            if threads.iter().all(ThreadConfig::is_final) {
                out.finals.insert(state.clone());
            }
            for i in 0..threads.len() {
                let succ = self.successors(&threads[i], &state)?;
                for (label, next) in succ.iter() {
                    if label.classify() == ActionClass::Infeasible {
                        continue;
                    }
                    let Some(new_state) = apply_action_in(label, &state, self.opts.arith) else {
                        continue;
                    };
                    let mut new_threads = threads.clone();
                    new_threads[i] = next.clone();
                    let cfg = (new_threads, new_state);
                    if !visited.contains(&cfg) {
                        if visited.len() >= self.opts.cap {
                            return Err(Error::NonTerminatingExploration { cap: self.opts.cap });
                        }
                        visited.insert(cfg.clone());
                        stack.push(cfg);
                    }
                }
            }
        }
        out.configurations += visited.len();
        Ok(())
    }
}

/// Final states reachable from the initial states when each thread runs
/// under `model` on the chosen backend and threads interleave freely.
pub fn explore(threads: &[Command], model: MemoryModel, inits: &[State], opts: ExploreOptions) -> Result<Exploration> {
    if !opts.backend.supports(model) {
        return Err(Error::IncompatibleBackend {
            backend: opts.backend.to_string(),
            model: model.to_string(),
        });
    }
    for t in threads {
        admit(model, t)?;
    }
    let start: Vec<ThreadConfig> = threads
        .iter()
        .map(|t| match opts.backend {
            Backend::Pseq => ThreadConfig::Cmd(under_model(t, model).simplified()),
            Backend::Pipeline => ThreadConfig::Pipe(PipelineConfig::new(under_model(t, MemoryModel::Sc))),
            Backend::StoreBuffer => ThreadConfig::Sb(SbConfig::new(under_model(t, MemoryModel::Sc))),
        })
        .collect();
    let mut ex = Explorer {
        model,
        opts,
        cache: HashMap::new(),
    };
    let mut out = Exploration::default();
    ex.run(start, inits, &mut out)?;
    Ok(out)
}

/// As [`explore`], starting from every state of `space` satisfying `init`.
pub fn explore_predicate(
    threads: &[Command],
    model: MemoryModel,
    init: &Predicate,
    space: &StateSpace,
    opts: ExploreOptions,
) -> Result<Exploration> {
    let inits: Vec<State> = space.states().filter(|s| init.holds(s, opts.arith)).collect();
    explore(threads, model, &inits, opts)
}

/// Final states of a single command exactly as written: its own model
/// parameters and parallel compositions are used.
pub fn explore_command(c: &Command, init: &State, opts: ExploreOptions) -> Result<Exploration> {
    let mut ex = Explorer {
        model: MemoryModel::Sc,
        opts: ExploreOptions {
            backend: Backend::Pseq,
            ..opts
        },
        cache: HashMap::new(),
    };
    let mut out = Exploration::default();
    ex.run(vec![ThreadConfig::Cmd(c.simplified())], std::slice::from_ref(init), &mut out)?;
    Ok(out)
}

/// The input/output relation of `c` over `space`.
pub fn eff_command(c: &Command, space: &StateSpace, opts: ExploreOptions) -> Result<BTreeSet<(State, State)>> {
    let mut rel = BTreeSet::new();
    for s in space.states() {
        for f in explore_command(c, &s, opts)?.finals {
            rel.insert((s.clone(), f));
        }
    }
    Ok(rel)
}

/// Options for the finite-domain reasoning layer: arithmetic is reduced
/// into the state space's domain.
fn domain_opts(space: &StateSpace, unroll: usize) -> ExploreOptions {
    ExploreOptions {
        unroll,
        arith: space.domain.arith(),
        ..Default::default()
    }
}

/// The weakest precondition of `c` for `post`: states from which every
/// terminating run ends in `post`.
pub fn wp(c: &Command, post: &Predicate, space: &StateSpace, unroll: usize) -> Result<BTreeSet<State>> {
    let opts = domain_opts(space, unroll);
    let mut out = BTreeSet::new();
    for s in space.states() {
        let finals = explore_command(c, &s, opts)?.finals;
        if finals.iter().all(|f| post.holds(f, opts.arith)) {
            out.insert(s);
        }
    }
    Ok(out)
}

/// `{pre} c {post}` in the partial-correctness sense.
pub fn hoare_check(pre: &Predicate, c: &Command, post: &Predicate, space: &StateSpace, unroll: usize) -> Result<bool> {
    let arith = space.domain.arith();
    let w = wp(c, post, space, unroll)?;
    Ok(space.states().filter(|s| pre.holds(s, arith)).all(|s| w.contains(&s)))
}

/// The relation obtained by running the actions of `t` in order.
pub fn eff_trace(t: &[Action], space: &StateSpace) -> BTreeSet<(State, State)> {
    let arith = space.domain.arith();
    space
        .states()
        .filter_map(|s| {
            let end = t.iter().try_fold(s.clone(), |acc, a| apply_action_in(a, &acc, arith))?;
            Some((s, end))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{par, seq, Expr, FenceKind, Variable};
    use crate::state::Domain;
    use MemoryModel::*;

    fn x() -> Variable {
        Variable::shared("x")
    }
    fn y() -> Variable {
        Variable::shared("y")
    }
    fn r(t: usize, n: u32) -> Variable {
        Variable::local(t, &format!("r{n}"))
    }
    fn st(v: &Variable, c: i64) -> Command {
        Command::act(Action::assign(v, Expr::Const(c)))
    }
    fn ld(r: &Variable, v: &Variable) -> Command {
        Command::act(Action::assign(r, Expr::var(v)))
    }
    fn full() -> Command {
        Command::act(Action::fence(FenceKind::Full))
    }

    fn sb(fenced: bool) -> Vec<Command> {
        let mk = |w: &Variable, rd: &Variable, t: usize| {
            if fenced {
                seq(st(w, 1), seq(full(), ld(&r(t, 1), rd)))
            } else {
                seq(st(w, 1), ld(&r(t, 1), rd))
            }
        };
        vec![mk(&x(), &y(), 0), mk(&y(), &x(), 1)]
    }

    fn zero_state() -> State {
        [x(), y(), r(0, 1), r(1, 1)].into_iter().map(|v| (v, 0)).collect()
    }

    fn both_zero(s: &State) -> bool {
        s.get(&r(0, 1)) == 0 && s.get(&r(1, 1)) == 0
    }

    #[test]
    fn sb_outcomes() {
        let init = [zero_state()];
        for backend in Backend::ALL {
            let o = ExploreOptions::with_backend(backend);
            let tso = explore(&sb(false), Tso, &init, o).unwrap();
            assert!(tso.finals.iter().any(both_zero), "{backend}");
            let fenced = explore(&sb(true), Tso, &init, o).unwrap();
            assert!(!fenced.finals.iter().any(both_zero), "{backend}");
        }
        let sc = explore(&sb(false), Sc, &init, ExploreOptions::default()).unwrap();
        assert!(!sc.finals.iter().any(both_zero));
        assert_eq!(sc.finals.len(), 3);
    }

    #[test]
    fn coherence_of_two_loads() {
        let t0 = seq(st(&x(), 1), st(&x(), 2));
        let t1 = seq(ld(&r(1, 1), &x()), ld(&r(1, 2), &x()));
        let init: State = [x(), r(1, 1), r(1, 2)].into_iter().map(|v| (v, 0)).collect();
        let bad = |s: &State| s.get(&r(1, 1)) == 2 && s.get(&r(1, 2)) == 1;
        let g = explore(&[t0.clone(), t1.clone()], G, &[init.clone()], ExploreOptions::default()).unwrap();
        assert!(!g.finals.iter().any(bad));
        let g0 = explore(&[t0, t1], G0, &[init], ExploreOptions::default()).unwrap();
        assert!(g0.finals.iter().any(bad));
    }

    #[test]
    fn store_buffer_needs_tso() {
        let e = explore(&sb(false), Arm, &[zero_state()], ExploreOptions::with_backend(Backend::StoreBuffer));
        assert!(matches!(e, Err(Error::IncompatibleBackend { .. })));
    }

    #[test]
    fn cap_exceeded_is_reported() {
        let o = ExploreOptions {
            cap: 3,
            ..Default::default()
        };
        assert!(matches!(
            explore(&sb(false), Tso, &[zero_state()], o),
            Err(Error::NonTerminatingExploration { cap: 3 })
        ));
    }

    #[test]
    fn hoare_verdicts_for_sb() {
        let space = StateSpace::new([x(), y(), r(0, 1), r(1, 1)], Domain::new(2));
        let pre = Predicate::Expr(Expr::and(Expr::eq(Expr::var(&x()), Expr::Const(0)), Expr::eq(Expr::var(&y()), Expr::Const(0))));
        let post = Predicate::Expr(Expr::not(Expr::and(
            Expr::eq(Expr::var(&r(0, 1)), Expr::Const(0)),
            Expr::eq(Expr::var(&r(1, 1)), Expr::Const(0)),
        )));
        let prog = |fenced: bool, m: MemoryModel| {
            let t = sb(fenced);
            under_model(&par(t[0].clone(), t[1].clone()), m)
        };
        assert!(hoare_check(&pre, &prog(false, Sc), &post, &space, 2).unwrap());
        assert!(!hoare_check(&pre, &prog(false, Tso), &post, &space, 2).unwrap());
        assert!(hoare_check(&pre, &prog(true, Tso), &post, &space, 2).unwrap());
    }

    #[test]
    fn wp_examples() {
        let space = StateSpace::new([x(), r(0, 1)], Domain::new(2));
        let all: BTreeSet<State> = space.states().collect();
        let post = Predicate::Expr(Expr::eq(Expr::var(&x()), Expr::Const(1)));
        assert_eq!(wp(&st(&x(), 1), &post, &space, 2).unwrap(), all);
        let b = Expr::eq(Expr::var(&r(0, 1)), Expr::Const(1));
        let g = Command::act(Action::guard(b.clone()));
        let w = wp(&g, &post, &space, 2).unwrap();
        for s in &all {
            if b.eval(s) == 0 {
                assert!(w.contains(s));
            }
        }
    }

    #[test]
    fn eff_trace_examples() {
        let space = StateSpace::new([x(), r(0, 1)], Domain::new(2));
        let id: BTreeSet<(State, State)> = space.states().map(|s| (s.clone(), s)).collect();
        assert_eq!(eff_trace(&[], &space), id);
        let t = [Action::assign(&x(), Expr::Const(1)), Action::assign(&r(0, 1), Expr::var(&x()))];
        let rel = eff_trace(&t, &space);
        let from: State = [(x(), 0), (r(0, 1), 0)].into_iter().collect();
        let to: State = [(x(), 1), (r(0, 1), 1)].into_iter().collect();
        assert!(rel.contains(&(from, to)));
    }
}
