//! Executable reordering semantics for hardware weak memory models.
//!
//! Programs are built from actions composed with *parallelized sequential
//! composition*: `c1 ;m c2` may run actions of `c2` ahead of `c1` whenever the
//! memory model `m` allows it. Three interchangeable backends (the reordering
//! semantics, an in-order-fetch pipeline and, for TSO, an explicit store
//! buffer) drive an exhaustive state-space explorer, on top of which sit a
//! litmus-test runner, algebraic law checks and a weakest-precondition layer.

pub mod error;
pub mod explorer;
pub mod lang;
pub mod laws;
pub mod litmus;
pub mod model;
pub mod pipeline;
pub mod sample;
pub mod semantics;
pub mod state;
pub mod storebuffer;

pub use error::{Error, Result};
pub use explorer::{explore, Backend, ExploreOptions, Exploration};
pub use lang::{Action, ActionClass, Annotation, Arith, BinOp, Command, Expr, FenceKind, UnOp, Value, Variable};
pub use model::{forward, reorder_after, reorder_over_command, reorder_over_trace, reorders_base, MemoryModel};
pub use semantics::{enumerate_traces, Trace};
pub use state::{Domain, Predicate, State};
