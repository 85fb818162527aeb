//! Memory models: forwarding, the per-model reordering relations, their
//! lifting to traces and commands, and checks over finite action universes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lang::{Action, Annotation, BinOp, Command, Expr, FenceKind, UnOp, Variable};
use crate::state::eff_reorderable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemoryModel {
    Sc,
    Par,
    G0,
    G,
    Tso,
    RcPc,
    RcSc,
    Arm,
    RiscV,
}

impl MemoryModel {
    pub const ALL: [MemoryModel; 9] = [
        MemoryModel::Sc,
        MemoryModel::Par,
        MemoryModel::G0,
        MemoryModel::G,
        MemoryModel::Tso,
        MemoryModel::RcPc,
        MemoryModel::RcSc,
        MemoryModel::Arm,
        MemoryModel::RiscV,
    ];

    /// Every model except `Par`.
    pub const WELL_BEHAVED: [MemoryModel; 8] = [
        MemoryModel::Sc,
        MemoryModel::G0,
        MemoryModel::G,
        MemoryModel::Tso,
        MemoryModel::RcPc,
        MemoryModel::RcSc,
        MemoryModel::Arm,
        MemoryModel::RiscV,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            MemoryModel::Sc => "sc",
            MemoryModel::Par => "par",
            MemoryModel::G0 => "g0",
            MemoryModel::G => "g",
            MemoryModel::Tso => "tso",
            MemoryModel::RcPc => "rcpc",
            MemoryModel::RcSc => "rcsc",
            MemoryModel::Arm => "arm",
            MemoryModel::RiscV => "riscv",
        }
    }

    /// Whether the model's clauses depend on the store/load classification.
    pub fn classifies_accesses(self) -> bool {
        matches!(self, MemoryModel::Arm | MemoryModel::RiscV)
    }
}

impl fmt::Display for MemoryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemoryModel::Sc => "SC",
            MemoryModel::Par => "PAR",
            MemoryModel::G0 => "G0",
            MemoryModel::G => "G",
            MemoryModel::Tso => "TSO",
            MemoryModel::RcPc => "RCpc",
            MemoryModel::RcSc => "RCsc",
            MemoryModel::Arm => "ARM",
            MemoryModel::RiscV => "RISCV",
        })
    }
}

impl FromStr for MemoryModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        MemoryModel::ALL
            .into_iter()
            .find(|m| m.keyword() == lower || (lower == "risc-v" && *m == MemoryModel::RiscV))
            .ok_or_else(|| format!("unknown memory model `{s}`"))
    }
}

/// The effect of letting `beta` run ahead of `alpha`: if `alpha` writes `x`
/// then reads of `x` in `beta` become reads of the written expression.
pub fn forward(alpha: &Action, beta: &Action) -> Action {
    match alpha.base() {
        Action::Assign(x, e) if beta.reads(x) => beta.subst_reads(x, e),
        _ => beta.clone(),
    }
}

fn is_any_guard(a: &Action) -> bool {
    matches!(a.base(), Action::Guard(_))
}

fn g0(a: &Action, b: &Action) -> bool {
    let clash = |w: Option<&Variable>, other: &Action| w.is_some_and(|x| other.mentions(x));
    !clash(a.written(), b) && !clash(b.written(), a)
}

fn g(a: &Action, b: &Action) -> bool {
    if a.is_fence(FenceKind::Full) || b.is_fence(FenceKind::Full) {
        return false;
    }
    let shared_read_clash = a
        .read_expr()
        .is_some_and(|e| e.any_var(&|v| v.is_shared() && b.reads(v)));
    g0(a, b) && !shared_read_clash
}

fn tso(a: &Action, b: &Action) -> bool {
    match (a, b) {
        (Action::Assign(x, e), Action::Assign(r, f)) if x.is_shared() && r.is_local() => {
            !f.mentions(x) && !e.mentions(r)
        }
        // Buffered stores never hold back silent steps.
        (Action::Assign(x, _), b) if x.is_shared() => b.is_silent(),
        _ => false,
    }
}

fn rcpc(top: MemoryModel, a: &Action, b: &Action) -> Result<bool> {
    if b.is_release() || a.is_acquire() {
        return Ok(false);
    }
    if let Action::Annotated(Annotation::Release, inner) = a {
        return reorders_base(top, inner, b);
    }
    if let Action::Annotated(Annotation::Acquire, inner) = b {
        return reorders_base(top, a, inner);
    }
    Ok(g(a, b))
}

fn rcsc(top: MemoryModel, a: &Action, b: &Action) -> Result<bool> {
    if a.is_release() && b.is_acquire() {
        return Ok(false);
    }
    rcpc(top, a, b)
}

fn arm(a: &Action, b: &Action) -> Result<bool> {
    use FenceKind::*;
    if b.is_fence(StoreStore) && a.is_store()? {
        return Ok(false);
    }
    if a.is_fence(StoreStore) && b.is_store()? {
        return Ok(false);
    }
    if is_any_guard(a) && b.is_fence(Control) {
        return Ok(false);
    }
    if a.is_fence(Control) && b.is_load()? {
        return Ok(false);
    }
    if is_any_guard(a) && b.is_store()? {
        return Ok(false);
    }
    rcsc(MemoryModel::Arm, a, b)
}

fn riscv(a: &Action, b: &Action) -> Result<bool> {
    use FenceKind::*;
    if b.is_fence(LoadLoad) && a.is_load()? {
        return Ok(false);
    }
    if a.is_fence(LoadLoad) && b.is_load()? {
        return Ok(false);
    }
    if b.is_fence(RwW) {
        return Ok(false);
    }
    if a.is_fence(RwW) {
        // A release is never overtaken, so one cannot overtake this fence either.
        return Ok(b.is_silent() || (!b.is_release() && b.is_load()?));
    }
    if b.is_fence(RRw) {
        // Nothing overtakes an acquire, this fence included.
        return Ok(!a.is_acquire() && a.is_store()?);
    }
    if a.is_fence(RRw) {
        return Ok(false);
    }
    // `fence w,w` behaves as a store-store barrier.
    if b.is_fence(StoreStore) && a.is_store()? {
        return Ok(false);
    }
    if a.is_fence(StoreStore) && b.is_store()? {
        return Ok(false);
    }
    if is_any_guard(a) && b.is_store()? {
        return Ok(false);
    }
    rcpc(MemoryModel::RiscV, a, b)
}

/// The base relation `alpha ro beta`: may `beta` (already forwarded) be
/// executed before `alpha`?
pub fn reorders_base(m: MemoryModel, alpha: &Action, beta: &Action) -> Result<bool> {
    match m {
        MemoryModel::Sc => Ok(false),
        MemoryModel::Par => Ok(true),
        MemoryModel::G0 => Ok(g0(alpha, beta)),
        MemoryModel::G => Ok(g(alpha, beta)),
        MemoryModel::Tso => Ok(tso(alpha, beta)),
        MemoryModel::RcPc => rcpc(m, alpha, beta),
        MemoryModel::RcSc => rcsc(m, alpha, beta),
        MemoryModel::Arm => arm(alpha, beta),
        MemoryModel::RiscV => riscv(alpha, beta),
    }
}

/// `Some(beta')` when `beta` may overtake `alpha`, with `beta'` the forwarded
/// form that is actually executed.
pub fn reorder_after(m: MemoryModel, alpha: &Action, beta: &Action) -> Result<Option<Action>> {
    let fwd = if m == MemoryModel::Par {
        beta.clone()
    } else {
        forward(alpha, beta)
    };
    Ok(reorders_base(m, alpha, &fwd)?.then_some(fwd))
}

/// Lifts [`reorder_after`] to a sequence of earlier actions, passing `beta`
/// over the last one first.
pub fn reorder_over_trace(m: MemoryModel, prior: &[Action], beta: &Action) -> Result<Option<Action>> {
    let mut cur = beta.clone();
    for alpha in prior.iter().rev() {
        match reorder_after(m, alpha, &cur)? {
            Some(next) => cur = next,
            None => return Ok(None),
        }
    }
    Ok(Some(cur))
}

/// Lifts [`reorder_after`] to every action `c` could still execute.
pub fn reorder_over_command(m: MemoryModel, c: &Command, beta: &Action) -> Result<Option<Action>> {
    match c {
        Command::Terminated => Ok(Some(beta.clone())),
        Command::Act(alpha) => reorder_after(m, alpha, beta),
        Command::PSeq(_, c1, c2) => match reorder_over_command(m, c2, beta)? {
            Some(mid) => reorder_over_command(m, c1, &mid),
            None => Ok(None),
        },
        Command::Choice(c1, c2) => {
            let Some(left) = reorder_over_command(m, c1, beta)? else {
                return Ok(None);
            };
            let right = reorder_over_command(m, c2, beta)?;
            Ok((right.as_ref() == Some(&left)).then_some(left))
        }
        Command::Iterate(_, body) => {
            let r = reorder_over_command(m, body, beta)?;
            Ok((r.as_ref() == Some(beta)).then(|| beta.clone()))
        }
    }
}

/// Anything that relates an earlier action to the (forwarded) later actions
/// allowed to overtake it.
pub trait ReorderRelation: Sync {
    fn name(&self) -> String;

    /// Actions the relation cannot classify are treated as not reorderable.
    fn reorder(&self, alpha: &Action, beta: &Action) -> Option<Action>;
}

impl ReorderRelation for MemoryModel {
    fn name(&self) -> String {
        self.to_string()
    }

    fn reorder(&self, alpha: &Action, beta: &Action) -> Option<Action> {
        reorder_after(*self, alpha, beta).ok().flatten()
    }
}

/// The semantic model: `beta` may overtake `alpha` when doing so adds no
/// new end-to-end behaviour, checked by brute force over a finite domain.
#[derive(Debug, Clone, Copy)]
pub struct EffOracle {
    pub domain: u32,
}

impl Default for EffOracle {
    fn default() -> Self {
        EffOracle { domain: 2 }
    }
}

impl ReorderRelation for EffOracle {
    fn name(&self) -> String {
        "Eff".into()
    }

    fn reorder(&self, alpha: &Action, beta: &Action) -> Option<Action> {
        let fwd = forward(alpha, beta);
        eff_reorderable(alpha, &fwd, self.domain).then_some(fwd)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementViolation {
    pub alpha: Action,
    pub beta: Action,
    pub weaker: Option<Action>,
    pub stronger: Option<Action>,
}

impl fmt::Display for RefinementViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &Option<Action>| r.as_ref().map_or("blocked".to_string(), |a| a.qualified().to_string());
        write!(
            f,
            "alpha = {}, beta = {}: weaker gives {}, stronger gives {}",
            self.alpha.qualified(),
            self.beta.qualified(),
            show(&self.weaker),
            show(&self.stronger)
        )
    }
}

/// Pairs where `stronger` allows a reordering that `weaker` does not.
/// `weaker` refines to `stronger` exactly when this is empty.
pub fn refinement_violations(
    weaker: &dyn ReorderRelation,
    stronger: &dyn ReorderRelation,
    universe: &[Action],
) -> Vec<RefinementViolation> {
    universe
        .par_iter()
        .flat_map_iter(|alpha| {
            universe.iter().filter_map(move |beta| {
                let s = stronger.reorder(alpha, beta)?;
                let w = weaker.reorder(alpha, beta);
                (w.as_ref() != Some(&s)).then(|| RefinementViolation {
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                    weaker: w,
                    stronger: Some(s),
                })
            })
        })
        .collect()
}

pub fn model_refines(weaker: &dyn ReorderRelation, stronger: &dyn ReorderRelation, universe: &[Action]) -> bool {
    refinement_violations(weaker, stronger, universe).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WellBehavedViolation {
    NonDeterministic { alpha: Action, beta: Action },
    NotForwarded { alpha: Action, beta: Action, result: Action },
    SilentBlocked { alpha: Action },
}

impl fmt::Display for WellBehavedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WellBehavedViolation::NonDeterministic { alpha, beta } => {
                write!(f, "non-deterministic result for {} after {}", beta.qualified(), alpha.qualified())
            }
            WellBehavedViolation::NotForwarded { alpha, beta, result } => write!(
                f,
                "{} after {} became {}, neither the original nor its forwarded form",
                beta.qualified(),
                alpha.qualified(),
                result.qualified()
            ),
            WellBehavedViolation::SilentBlocked { alpha } => {
                write!(f, "{} lets some action pass but blocks the silent step", alpha.qualified())
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct WellBehavedReport {
    pub checked_pairs: usize,
    pub violations: Vec<WellBehavedViolation>,
}

impl WellBehavedReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn well_behaved_check(m: &dyn ReorderRelation, universe: &[Action]) -> WellBehavedReport {
    let tau = Action::tau();
    let per_alpha: Vec<Vec<WellBehavedViolation>> = universe
        .par_iter()
        .map(|alpha| {
            let mut out = Vec::new();
            let mut any = false;
            for beta in universe {
                let r1 = m.reorder(alpha, beta);
                let r2 = m.reorder(alpha, beta);
                if r1 != r2 {
                    out.push(WellBehavedViolation::NonDeterministic {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                    });
                }
                if let Some(result) = r1 {
                    any = true;
                    if result != *beta && result != forward(alpha, beta) {
                        out.push(WellBehavedViolation::NotForwarded {
                            alpha: alpha.clone(),
                            beta: beta.clone(),
                            result,
                        });
                    }
                }
            }
            if any && m.reorder(alpha, &tau) != Some(tau.clone()) {
                out.push(WellBehavedViolation::SilentBlocked { alpha: alpha.clone() });
            }
            out
        })
        .collect();
    WellBehavedReport {
        checked_pairs: universe.len() * universe.len(),
        violations: per_alpha.into_iter().flatten().collect(),
    }
}

/// Finite sets of actions over which relations are compared.
#[derive(Debug, Clone)]
pub struct Universe {
    pub shared: Vec<Variable>,
    pub locals: Vec<Variable>,
    pub constants: Vec<i64>,
    pub actions: Vec<Action>,
}

impl Universe {
    /// Assignments and guards over shared `x, y`, locals `r1, r2`, constants
    /// `{0, 1}` and expressions of depth at most one, plus the full fence.
    /// Assignments that read and write shared state are left out.
    pub fn common() -> Universe {
        Universe::build(&[BinOp::Add, BinOp::Eq], &[UnOp::Not], false)
    }

    /// As [`Universe::common`] with every operator.
    pub fn common_all_ops() -> Universe {
        Universe::build(&BinOp::ALL, &[UnOp::Neg, UnOp::Not], false)
    }

    /// The common universe plus every fence kind and release/acquire forms
    /// of its assignments and guards.
    pub fn extended() -> Universe {
        Universe::build(&[BinOp::Add, BinOp::Eq], &[UnOp::Not], true)
    }

    fn build(bin: &[BinOp], un: &[UnOp], extended: bool) -> Universe {
        let shared = vec![Variable::shared("x"), Variable::shared("y")];
        let locals = vec![Variable::local(0, "r1"), Variable::local(0, "r2")];
        let constants = vec![0, 1];
        let exprs = expressions(&shared, &locals, &constants, bin, un);
        let mut actions = Vec::new();
        for target in shared.iter().chain(&locals) {
            for e in &exprs {
                let a = Action::assign(target, e.clone());
                if !a.is_mixed() {
                    actions.push(a);
                }
            }
        }
        actions.extend(exprs.iter().cloned().map(Action::guard));
        if extended {
            let annotated: Vec<Action> = actions
                .iter()
                .flat_map(|a| {
                    [Annotation::Release, Annotation::Acquire]
                        .into_iter()
                        .map(|oc| Action::annotate(oc, a.clone()).expect("assignment or guard"))
                })
                .collect();
            actions.extend(annotated);
            actions.extend(FenceKind::ALL.into_iter().map(Action::fence));
        } else {
            actions.push(Action::fence(FenceKind::Full));
        }
        Universe {
            shared,
            locals,
            constants,
            actions,
        }
    }
}

fn expressions(shared: &[Variable], locals: &[Variable], constants: &[i64], bin: &[BinOp], un: &[UnOp]) -> Vec<Expr> {
    let atoms: Vec<Expr> = shared
        .iter()
        .chain(locals)
        .map(Expr::var)
        .chain(constants.iter().map(|c| Expr::Const(*c)))
        .collect();
    let mut out = atoms.clone();
    for op in un {
        out.extend(atoms.iter().map(|a| Expr::unary(*op, a.clone())));
    }
    for op in bin {
        for l in &atoms {
            for r in &atoms {
                out.push(Expr::binary(*op, l.clone(), r.clone()));
            }
        }
    }
    out
}

/// The chain of models from weakest to strongest, `Eff` excluded.
pub const HIERARCHY: [MemoryModel; 8] = [
    MemoryModel::G0,
    MemoryModel::G,
    MemoryModel::RcPc,
    MemoryModel::RiscV,
    MemoryModel::RcSc,
    MemoryModel::Arm,
    MemoryModel::Tso,
    MemoryModel::Sc,
];

#[derive(Debug, Clone)]
pub struct HierarchyStep {
    pub weaker: String,
    pub stronger: String,
    pub violations: Vec<RefinementViolation>,
}

/// Checks every adjacent pair of `Eff, G0, G, RCpc, RISCV, RCsc, ARM, TSO, SC`.
pub fn check_hierarchy(universe: &[Action], eff: EffOracle) -> Vec<HierarchyStep> {
    let mut chain: Vec<Box<dyn ReorderRelation>> = vec![Box::new(eff)];
    chain.extend(HIERARCHY.iter().map(|m| Box::new(*m) as Box<dyn ReorderRelation>));
    chain
        .windows(2)
        .map(|w| HierarchyStep {
            weaker: w[0].name(),
            stronger: w[1].name(),
            violations: refinement_violations(w[0].as_ref(), w[1].as_ref(), universe),
        })
        .collect()
}

/// Rejects programs a model cannot classify.
pub fn admit(m: MemoryModel, c: &Command) -> Result<()> {
    if !m.classifies_accesses() {
        return Ok(());
    }
    let mut bad = None;
    c.for_each_action(&mut |a| {
        if bad.is_none() && a.is_mixed() {
            bad = Some(a.clone());
        }
    });
    match bad {
        Some(a) => Err(Error::UnsupportedMixedAccess(a.qualified().to_string())),
        None => Ok(()),
    }
}
