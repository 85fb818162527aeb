//! Variables, expressions, actions and commands of the reordering language,
//! together with the syntactic analyses the memory models are defined over.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::MemoryModel;

pub type Value = i64;
pub type ThreadId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Shared,
    Local,
}

/// A program variable. Locals are owned by exactly one thread, shared
/// variables by none.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    owner: Option<ThreadId>,
    name: Arc<str>,
}

impl Variable {
    pub fn shared(name: &str) -> Self {
        Variable {
            owner: None,
            name: Arc::from(name),
        }
    }

    pub fn local(thread: ThreadId, name: &str) -> Self {
        Variable {
            owner: Some(thread),
            name: Arc::from(name),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn owner(&self) -> Option<ThreadId> {
        self.owner
    }

    pub fn scope(&self) -> Scope {
        match self.owner {
            None => Scope::Shared,
            Some(_) => Scope::Local,
        }
    }

    pub fn is_shared(&self) -> bool {
        self.owner.is_none()
    }

    pub fn is_local(&self) -> bool {
        self.owner.is_some()
    }

    /// `P0:r1` for locals, the bare name for shared variables.
    pub fn qualified(&self) -> String {
        match self.owner {
            None => self.name.to_string(),
            Some(t) => format!("P{t}:{}", self.name),
        }
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.qualified())
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    And,
    Or,
}

impl BinOp {
    pub const ALL: [BinOp; 9] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::And,
        BinOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }
}

/// How arithmetic results are reduced during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Arith {
    /// Two's complement wrap-around on `i64`.
    #[default]
    Wrapping,
    /// Every constant and arithmetic result reduced into `0..n`.
    Modulo(Value),
}

impl Arith {
    fn reduce(self, v: Value) -> Value {
        match self {
            Arith::Wrapping => v,
            Arith::Modulo(n) => v.rem_euclid(n),
        }
    }
}

/// Anything that can supply a value for a variable. Missing variables read
/// as 0.
pub trait Valuation {
    fn value_of(&self, v: &Variable) -> Option<Value>;
}

/// The empty valuation; every lookup misses.
pub struct NoValues;

impl Valuation for NoValues {
    fn value_of(&self, _: &Variable) -> Option<Value> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Const(Value),
    Var(Variable),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

fn truth(b: bool) -> Value {
    b as Value
}

impl Expr {
    pub fn var(v: &Variable) -> Expr {
        Expr::Var(v.clone())
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::unary(UnOp::Not, e)
    }

    pub fn eq(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Eq, l, r)
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::And, l, r)
    }

    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Add, l, r)
    }

    /// Calls `f` on every variable occurrence, left to right.
    pub fn for_each_var(&self, f: &mut impl FnMut(&Variable)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => f(v),
            Expr::Unary(_, e) => e.for_each_var(f),
            Expr::Binary(_, l, r) => {
                l.for_each_var(f);
                r.for_each_var(f);
            }
        }
    }

    pub fn any_var(&self, pred: &impl Fn(&Variable) -> bool) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => pred(v),
            Expr::Unary(_, e) => e.any_var(pred),
            Expr::Binary(_, l, r) => l.any_var(pred) || r.any_var(pred),
        }
    }

    pub fn mentions(&self, x: &Variable) -> bool {
        self.any_var(&|v| v == x)
    }

    pub fn is_closed(&self) -> bool {
        !self.any_var(&|_| true)
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 0,
            Expr::Unary(_, e) => 1 + e.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Replaces every occurrence of `x` by `replacement`.
    pub fn subst(&self, x: &Variable, replacement: &Expr) -> Expr {
        match self {
            Expr::Var(v) if v == x => replacement.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, e) => Expr::unary(*op, e.subst(x, replacement)),
            Expr::Binary(op, l, r) => {
                Expr::binary(*op, l.subst(x, replacement), r.subst(x, replacement))
            }
        }
    }

    pub fn eval<S: Valuation + ?Sized>(&self, s: &S) -> Value {
        self.eval_in(s, Arith::Wrapping)
    }

    pub fn eval_in<S: Valuation + ?Sized>(&self, s: &S, arith: Arith) -> Value {
        match self {
            Expr::Const(c) => arith.reduce(*c),
            Expr::Var(v) => arith.reduce(s.value_of(v).unwrap_or(0)),
            Expr::Unary(op, e) => {
                let v = e.eval_in(s, arith);
                match op {
                    UnOp::Neg => arith.reduce(v.wrapping_neg()),
                    UnOp::Not => truth(v == 0),
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval_in(s, arith);
                let b = r.eval_in(s, arith);
                match op {
                    BinOp::Add => arith.reduce(a.wrapping_add(b)),
                    BinOp::Sub => arith.reduce(a.wrapping_sub(b)),
                    BinOp::Mul => arith.reduce(a.wrapping_mul(b)),
                    BinOp::Eq => truth(a == b),
                    BinOp::Ne => truth(a != b),
                    BinOp::Lt => truth(a < b),
                    BinOp::Le => truth(a <= b),
                    BinOp::And => truth(a != 0 && b != 0),
                    BinOp::Or => truth(a != 0 || b != 0),
                }
            }
        }
    }

    /// Display with locals written as `P0:r1`.
    pub fn qualified(&self) -> QualifiedExpr<'_> {
        QualifiedExpr(self)
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, qualified: bool) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) if qualified => f.write_str(&v.qualified()),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Unary(op, e) => {
                f.write_str(match op {
                    UnOp::Neg => "-",
                    UnOp::Not => "!",
                })?;
                if matches!(**e, Expr::Var(_)) || (*op == UnOp::Not && matches!(**e, Expr::Const(_))) {
                    e.write(f, qualified)
                } else {
                    f.write_str("(")?;
                    e.write(f, qualified)?;
                    f.write_str(")")
                }
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let wrap = |e: &Expr, strict: bool| match e {
                    Expr::Binary(o, _, _) => {
                        if strict {
                            o.precedence() <= p
                        } else {
                            o.precedence() < p
                        }
                    }
                    _ => false,
                };
                write_operand(f, l, wrap(l, false), qualified)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, r, wrap(r, true), qualified)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool, q: bool) -> fmt::Result {
    if paren {
        f.write_str("(")?;
        e.write(f, q)?;
        f.write_str(")")
    } else {
        e.write(f, q)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

pub struct QualifiedExpr<'a>(&'a Expr);

impl fmt::Display for QualifiedExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FenceKind {
    Full,
    StoreStore,
    LoadLoad,
    /// Orders earlier loads and stores before later stores (`fence rw,w`).
    RwW,
    /// Orders earlier loads before later loads and stores (`fence r,rw`).
    RRw,
    Control,
}

impl FenceKind {
    pub const ALL: [FenceKind; 6] = [
        FenceKind::Full,
        FenceKind::StoreStore,
        FenceKind::LoadLoad,
        FenceKind::RwW,
        FenceKind::RRw,
        FenceKind::Control,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            FenceKind::Full => "full",
            FenceKind::StoreStore => "ss",
            FenceKind::LoadLoad => "ll",
            FenceKind::RwW => "rww",
            FenceKind::RRw => "rrw",
            FenceKind::Control => "ctrl",
        }
    }

    pub fn from_keyword(s: &str) -> Option<FenceKind> {
        FenceKind::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Annotation {
    Release,
    Acquire,
}

impl Annotation {
    pub fn keyword(self) -> &'static str {
        match self {
            Annotation::Release => "rel",
            Annotation::Acquire => "acq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Assign(Variable, Expr),
    Guard(Expr),
    Fence(FenceKind),
    Annotated(Annotation, Box<Action>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionClass {
    Visible,
    Silent,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessKind {
    Store,
    Load,
    RegOp,
    GuardAct,
    FenceAct,
}

/// Free, read, written and shared variable sets of an action.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSets {
    pub fv: BTreeSet<Variable>,
    pub rv: BTreeSet<Variable>,
    pub wv: BTreeSet<Variable>,
    pub sv: BTreeSet<Variable>,
    pub rsv: BTreeSet<Variable>,
    pub wsv: BTreeSet<Variable>,
}

impl Action {
    /// The silent step `<true>`.
    pub fn tau() -> Action {
        Action::Guard(Expr::Const(1))
    }

    pub fn assign(x: &Variable, e: Expr) -> Action {
        Action::Assign(x.clone(), e)
    }

    pub fn guard(e: Expr) -> Action {
        Action::Guard(e)
    }

    pub fn fence(k: FenceKind) -> Action {
        Action::Fence(k)
    }

    /// Wraps an assignment or guard in an ordering annotation.
    pub fn annotate(oc: Annotation, inner: Action) -> Result<Action> {
        match inner {
            Action::Assign(..) | Action::Guard(_) => Ok(Action::Annotated(oc, Box::new(inner))),
            Action::Annotated(..) => Err(Error::NestedAnnotation),
            Action::Fence(_) => Err(Error::UnsupportedInstruction {
                action: inner.to_string(),
                reason: "fences cannot carry ordering annotations".into(),
            }),
        }
    }

    pub fn release(inner: Action) -> Action {
        Action::annotate(Annotation::Release, inner).expect("release of assignment or guard")
    }

    pub fn acquire(inner: Action) -> Action {
        Action::annotate(Annotation::Acquire, inner).expect("acquire of assignment or guard")
    }

    /// The action under any annotation.
    pub fn base(&self) -> &Action {
        match self {
            Action::Annotated(_, inner) => inner.base(),
            a => a,
        }
    }

    pub fn annotation(&self) -> Option<Annotation> {
        match self {
            Action::Annotated(oc, _) => Some(*oc),
            _ => None,
        }
    }

    pub fn is_release(&self) -> bool {
        self.annotation() == Some(Annotation::Release)
    }

    pub fn is_acquire(&self) -> bool {
        self.annotation() == Some(Annotation::Acquire)
    }

    pub fn is_fence(&self, kind: FenceKind) -> bool {
        matches!(self, Action::Fence(k) if *k == kind)
    }

    /// True for an unannotated guard.
    pub fn is_guard(&self) -> bool {
        matches!(self, Action::Guard(_))
    }

    /// The (at most one) variable written.
    pub fn written(&self) -> Option<&Variable> {
        match self.base() {
            Action::Assign(x, _) => Some(x),
            _ => None,
        }
    }

    /// The expression read, if any.
    pub fn read_expr(&self) -> Option<&Expr> {
        match self.base() {
            Action::Assign(_, e) | Action::Guard(e) => Some(e),
            _ => None,
        }
    }

    pub fn mentions(&self, x: &Variable) -> bool {
        self.written() == Some(x) || self.reads(x)
    }

    pub fn reads(&self, x: &Variable) -> bool {
        self.read_expr().is_some_and(|e| e.mentions(x))
    }

    pub fn reads_shared(&self) -> bool {
        self.read_expr().is_some_and(|e| e.any_var(&Variable::is_shared))
    }

    pub fn writes_shared(&self) -> bool {
        self.written().is_some_and(Variable::is_shared)
    }

    pub fn mentions_shared(&self) -> bool {
        self.reads_shared() || self.writes_shared()
    }

    pub fn for_each_free_var(&self, f: &mut impl FnMut(&Variable)) {
        if let Some(x) = self.written() {
            f(x);
        }
        if let Some(e) = self.read_expr() {
            e.for_each_var(f);
        }
    }

    pub fn var_sets(&self) -> VarSets {
        let mut sets = VarSets::default();
        if let Some(x) = self.written() {
            sets.wv.insert(x.clone());
        }
        if let Some(e) = self.read_expr() {
            sets.rv = e.free_vars();
        }
        sets.fv = sets.wv.union(&sets.rv).cloned().collect();
        let shared = |s: &BTreeSet<Variable>| s.iter().filter(|v| v.is_shared()).cloned().collect();
        sets.sv = shared(&sets.fv);
        sets.rsv = shared(&sets.rv);
        sets.wsv = shared(&sets.wv);
        sets
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.for_each_free_var(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    /// Store, load or register operation, looking through annotations.
    /// An assignment that both reads and writes shared state is refused.
    pub fn kind(&self) -> Result<AccessKind> {
        let base = self.base();
        match base {
            Action::Fence(_) => Ok(AccessKind::FenceAct),
            Action::Annotated(..) => unreachable!("base strips annotations"),
            Action::Guard(_) if !base.reads_shared() => Ok(AccessKind::RegOp),
            Action::Guard(_) => Ok(AccessKind::Load),
            Action::Assign(..) => match (base.writes_shared(), base.reads_shared()) {
                (true, true) => Err(Error::UnsupportedMixedAccess(self.to_string())),
                (true, false) => Ok(AccessKind::Store),
                (false, true) => Ok(AccessKind::Load),
                (false, false) => Ok(AccessKind::RegOp),
            },
        }
    }

    pub fn is_store(&self) -> Result<bool> {
        Ok(self.kind()? == AccessKind::Store)
    }

    pub fn is_load(&self) -> Result<bool> {
        Ok(self.kind()? == AccessKind::Load)
    }

    /// Guards are classified separately from register operations here,
    /// unlike [`Action::kind`].
    pub fn kind_detailed(&self) -> Result<AccessKind> {
        match (self.base(), self.kind()?) {
            (Action::Guard(_), AccessKind::RegOp) => Ok(AccessKind::GuardAct),
            (_, k) => Ok(k),
        }
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self.base(), Action::Assign(..)) && self.writes_shared() && self.reads_shared()
    }

    pub fn classify(&self) -> ActionClass {
        match self {
            Action::Guard(e) if e.is_closed() => {
                if e.eval(&NoValues) != 0 {
                    ActionClass::Silent
                } else {
                    ActionClass::Infeasible
                }
            }
            _ => ActionClass::Visible,
        }
    }

    pub fn is_silent(&self) -> bool {
        self.classify() == ActionClass::Silent
    }

    /// Rewrites the read expression with `x` replaced by `e`.
    pub fn subst_reads(&self, x: &Variable, e: &Expr) -> Action {
        match self {
            Action::Assign(y, f) => Action::Assign(y.clone(), f.subst(x, e)),
            Action::Guard(f) => Action::Guard(f.subst(x, e)),
            Action::Fence(_) => self.clone(),
            Action::Annotated(oc, inner) => Action::Annotated(*oc, Box::new(inner.subst_reads(x, e))),
        }
    }

    pub fn qualified(&self) -> QualifiedAction<'_> {
        QualifiedAction(self)
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, q: bool) -> fmt::Result {
        match self {
            Action::Assign(x, e) => {
                if q {
                    write!(f, "{} := {}", x.qualified(), e.qualified())
                } else {
                    write!(f, "{x} := {e}")
                }
            }
            Action::Guard(e) => {
                if q {
                    write!(f, "<{}>", e.qualified())
                } else {
                    write!(f, "<{e}>")
                }
            }
            Action::Fence(k) => write!(f, "fence {}", k.keyword()),
            Action::Annotated(oc, inner) => {
                write!(f, "{} ", oc.keyword())?;
                inner.write(f, q)
            }
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

pub struct QualifiedAction<'a>(&'a Action);

impl fmt::Display for QualifiedAction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, true)
    }
}

/// Program terms. `Skip` and `Nil` are both `Terminated`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Terminated,
    Act(Action),
    PSeq(MemoryModel, Arc<Command>, Arc<Command>),
    Choice(Arc<Command>, Arc<Command>),
    Iterate(MemoryModel, Arc<Command>),
}

impl From<Action> for Command {
    fn from(a: Action) -> Self {
        Command::Act(a)
    }
}

impl Command {
    pub fn act(a: Action) -> Command {
        Command::Act(a)
    }

    pub fn pseq(m: MemoryModel, c1: impl Into<Command>, c2: impl Into<Command>) -> Command {
        Command::PSeq(m, Arc::new(c1.into()), Arc::new(c2.into()))
    }

    pub fn choice(c1: impl Into<Command>, c2: impl Into<Command>) -> Command {
        Command::Choice(Arc::new(c1.into()), Arc::new(c2.into()))
    }

    pub fn iterate(m: MemoryModel, body: impl Into<Command>) -> Command {
        Command::Iterate(m, Arc::new(body.into()))
    }

    /// Right-nested composition of `cs` under `m`; empty gives `Terminated`.
    pub fn chain(m: MemoryModel, cs: impl IntoIterator<Item = Command>) -> Command {
        let items: Vec<Command> = cs.into_iter().collect();
        let mut iter = items.into_iter().rev();
        let Some(last) = iter.next() else {
            return Command::Terminated;
        };
        iter.fold(last, |acc, c| Command::pseq(m, c, acc))
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self, Command::Terminated)
    }

    /// Calls `f` on every action occurring syntactically in the term.
    pub fn for_each_action(&self, f: &mut impl FnMut(&Action)) {
        match self {
            Command::Terminated => {}
            Command::Act(a) => f(a),
            Command::PSeq(_, c1, c2) | Command::Choice(c1, c2) => {
                c1.for_each_action(f);
                c2.for_each_action(f);
            }
            Command::Iterate(_, c) => c.for_each_action(f),
        }
    }

    pub fn actions(&self) -> Vec<Action> {
        let mut out = Vec::new();
        self.for_each_action(&mut |a| out.push(a.clone()));
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.for_each_action(&mut |a| {
            a.for_each_free_var(&mut |v| {
                out.insert(v.clone());
            })
        });
        out
    }

    /// Drops `Terminated` operands of compositions. The result has the same
    /// traces and the same reordering behaviour as the original.
    pub fn simplified(&self) -> Command {
        match self {
            Command::PSeq(m, c1, c2) => {
                let l = c1.simplified();
                let r = c2.simplified();
                match (l.is_terminated(), r.is_terminated()) {
                    (true, _) => r,
                    (_, true) => l,
                    _ => Command::pseq(*m, l, r),
                }
            }
            Command::Choice(c1, c2) => Command::choice(c1.simplified(), c2.simplified()),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Terminated => f.write_str("skip"),
            Command::Act(a) => write!(f, "{a}"),
            Command::PSeq(MemoryModel::Sc, c1, c2) => write!(f, "({c1} ; {c2})"),
            Command::PSeq(MemoryModel::Par, c1, c2) => write!(f, "({c1} || {c2})"),
            Command::PSeq(m, c1, c2) => write!(f, "({c1} ;{} {c2})", m.keyword()),
            Command::Choice(c1, c2) => write!(f, "({c1} [] {c2})"),
            Command::Iterate(m, c) => write!(f, "({c})*{}", m.keyword()),
        }
    }
}

pub fn seq(c1: impl Into<Command>, c2: impl Into<Command>) -> Command {
    Command::pseq(MemoryModel::Sc, c1, c2)
}

pub fn par(c1: impl Into<Command>, c2: impl Into<Command>) -> Command {
    Command::pseq(MemoryModel::Par, c1, c2)
}

pub fn if_then_else(m: MemoryModel, b: Expr, c1: impl Into<Command>, c2: impl Into<Command>) -> Command {
    Command::choice(
        Command::pseq(m, Action::guard(b.clone()), c1),
        Command::pseq(m, Action::guard(Expr::not(b)), c2),
    )
}

pub fn while_loop(m: MemoryModel, b: Expr, body: impl Into<Command>) -> Command {
    Command::pseq(
        m,
        Command::iterate(m, Command::pseq(m, Action::guard(b.clone()), body)),
        Action::guard(Expr::not(b)),
    )
}

/// `c` composed with itself `n` times under `m`.
pub fn finite_iter(m: MemoryModel, c: &Command, n: usize) -> Command {
    (0..n).fold(Command::Terminated, |acc, _| Command::pseq(m, c.clone(), acc))
}
