//! Program states, finite state spaces, predicates and action effects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lang::{Action, Arith, Expr, Valuation, Value, Variable};

/// A mapping from variables to values. Lookups of unmapped variables read 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(BTreeMap<Variable, Value>);

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn get(&self, v: &Variable) -> Value {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn set(&mut self, v: Variable, value: Value) {
        self.0.insert(v, value);
    }

    pub fn with(mut self, v: &Variable, value: Value) -> Self {
        self.set(v.clone(), value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Value)> {
        self.0.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Variable> {
        self.0.keys()
    }

    /// The restriction to shared variables.
    pub fn shared_part(&self) -> State {
        State(self.0.iter().filter(|(k, _)| k.is_shared()).map(|(k, v)| (k.clone(), *v)).collect())
    }

    /// Values keyed by qualified name (`x`, `P0:r1`).
    pub fn to_named(&self) -> BTreeMap<String, Value> {
        self.0.iter().map(|(k, v)| (k.qualified(), *v)).collect()
    }
}

impl FromIterator<(Variable, Value)> for State {
    fn from_iter<I: IntoIterator<Item = (Variable, Value)>>(iter: I) -> Self {
        State(iter.into_iter().collect())
    }
}

impl Valuation for State {
    fn value_of(&self, v: &Variable) -> Option<Value> {
        self.0.get(v).copied()
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}={v}", k.qualified())?;
        }
        f.write_str("}")
    }
}

/// Values `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domain {
    pub size: u32,
}

impl Default for Domain {
    fn default() -> Self {
        Domain { size: 2 }
    }
}

impl Domain {
    pub fn new(size: u32) -> Self {
        assert!(size > 0, "empty value domain");
        Domain { size }
    }

    pub fn arith(self) -> Arith {
        Arith::Modulo(self.size as Value)
    }
}

/// Every total assignment of domain values to a fixed set of variables.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub vars: Vec<Variable>,
    pub domain: Domain,
}

impl StateSpace {
    pub fn new(vars: impl IntoIterator<Item = Variable>, domain: Domain) -> Self {
        let set: BTreeSet<Variable> = vars.into_iter().collect();
        StateSpace {
            vars: set.into_iter().collect(),
            domain,
        }
    }

    pub fn len(&self) -> usize {
        (self.domain.size as usize).pow(self.vars.len() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        let n = self.domain.size as usize;
        (0..self.len()).map(move |mut code| {
            self.vars
                .iter()
                .map(|v| {
                    let val = (code % n) as Value;
                    code /= n;
                    (v.clone(), val)
                })
                .collect()
        })
    }
}

/// A set of states, given intensionally or extensionally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Expr(Expr),
    States(BTreeSet<State>),
}

impl Predicate {
    pub fn truth() -> Predicate {
        Predicate::Expr(Expr::Const(1))
    }

    pub fn holds(&self, s: &State, arith: Arith) -> bool {
        match self {
            Predicate::Expr(e) => e.eval_in(s, arith) != 0,
            Predicate::States(set) => set.contains(s),
        }
    }
}

impl From<Expr> for Predicate {
    fn from(e: Expr) -> Self {
        Predicate::Expr(e)
    }
}

impl From<BTreeSet<State>> for Predicate {
    fn from(s: BTreeSet<State>) -> Self {
        Predicate::States(s)
    }
}

/// The state after `a`, or `None` when `a` is a guard that fails.
pub fn apply_action(a: &Action, s: &State) -> Option<State> {
    apply_action_in(a, s, Arith::Wrapping)
}

pub fn apply_action_in(a: &Action, s: &State, arith: Arith) -> Option<State> {
    match a.base() {
        Action::Assign(x, e) => {
            let v = e.eval_in(s, arith);
            Some(s.clone().with(x, v))
        }
        Action::Guard(b) => (b.eval_in(s, arith) != 0).then(|| s.clone()),
        _ => Some(s.clone()),
    }
}

/// Does running `beta` then `alpha` produce only outcomes that `alpha` then
/// `beta` can, for every state over values `0..domain`?
pub fn eff_reorderable(alpha: &Action, beta: &Action, domain: u32) -> bool {
    let dom = Domain::new(domain);
    let arith = dom.arith();
    let vars = alpha.free_vars().into_iter().chain(beta.free_vars());
    let space = StateSpace::new(vars, dom);
    let run = |first: &Action, second: &Action, s: &State| {
        apply_action_in(first, s, arith).and_then(|t| apply_action_in(second, &t, arith))
    };
    let ok = space.states().all(|s| match run(beta, alpha, &s) {
        None => true,
        Some(out) => run(alpha, beta, &s) == Some(out),
    });
    ok
}
