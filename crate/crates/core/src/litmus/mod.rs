//! Litmus tests: a small text format, its parser and printer, and a runner
//! that decides a test's condition by exhaustive exploration.

mod ast;
mod parse;
mod print;
mod run;

pub use ast::{block, LitmusTest, Quantifier, Stmt, Thread, Verdict};
pub use parse::parse_litmus;
pub use print::print_litmus;
pub use run::{corpus_files, load_litmus, reports_json, run_corpus, run_test, CorpusSummary, FileError, Report, RunOptions};
