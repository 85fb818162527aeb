use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::ast::{LitmusTest, Quantifier, Verdict};
use super::parse::parse_litmus;
use crate::error::{Error, Result};
use crate::explorer::{explore, Backend, ExploreOptions};
use crate::lang::Value;
use crate::model::MemoryModel;
use crate::semantics::{DEFAULT_CAP, DEFAULT_UNROLL};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub backend: Backend,
    /// Replaces the model named in the test.
    pub model: Option<MemoryModel>,
    pub unroll: usize,
    pub cap: usize,
    /// Record wall-clock time; off gives byte-identical reports.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            backend: Backend::Pseq,
            model: None,
            unroll: DEFAULT_UNROLL,
            cap: DEFAULT_CAP,
            timing: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub name: String,
    pub model: String,
    pub backend: String,
    /// Absent when exploration failed.
    pub verdict: Option<Verdict>,
    pub expect: Verdict,
    #[serde(rename = "match")]
    pub matches: bool,
    /// A final state satisfying an `exists` condition.
    pub witness: Option<BTreeMap<String, Value>>,
    pub states: usize,
    pub millis: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub failure: Option<Error>,
}

impl Report {
    pub fn cap_exceeded(&self) -> bool {
        matches!(self.failure, Some(Error::NonTerminatingExploration { .. }))
    }
}

pub fn run_test(test: &LitmusTest, opts: &RunOptions) -> Report {
    let model = opts.model.unwrap_or(test.model);
    let start = Instant::now();
    let explore_opts = ExploreOptions {
        backend: opts.backend,
        unroll: opts.unroll,
        cap: opts.cap,
        ..Default::default()
    };
    let outcome = explore(&test.thread_commands(), model, &[test.initial_state()], explore_opts);
    let millis = if opts.timing { start.elapsed().as_millis() as u64 } else { 0 };
    let mut report = Report {
        name: test.name.clone(),
        model: model.keyword().to_string(),
        backend: opts.backend.keyword().to_string(),
        verdict: None,
        expect: test.expect,
        matches: false,
        witness: None,
        states: 0,
        millis,
        error: None,
        failure: None,
    };
    match outcome {
        Ok(ex) => {
            let hit = ex.finals.iter().find(|s| test.condition.eval(*s) != 0);
            let verdict = if hit.is_some() {
                Verdict::Allowed
            } else {
                Verdict::Forbidden
            };
            report.verdict = Some(verdict);
            report.matches = verdict == test.expect;
            if test.quantifier == Quantifier::Exists {
                report.witness = hit.map(|s| s.to_named());
            }
            report.states = ex.configurations;
        }
        Err(e) => {
            report.error = Some(e.to_string());
            report.failure = Some(e);
        }
    }
    report
}

pub fn load_litmus(path: &Path) -> Result<LitmusTest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_litmus(&text)
}

#[derive(Debug, Clone)]
pub struct FileError {
    pub path: PathBuf,
    pub error: Error,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusSummary {
    /// Sorted by test name.
    pub reports: Vec<Report>,
    pub file_errors: Vec<FileError>,
}

impl CorpusSummary {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.matches).count()
    }

    pub fn failed(&self) -> usize {
        self.reports.len() - self.passed()
    }

    /// 2 for unreadable or malformed files, 3 if a test hit the
    /// exploration cap, 1 on any other failure, else 0.
    pub fn exit_code(&self) -> i32 {
        if !self.file_errors.is_empty() {
            2
        } else if self.reports.iter().any(Report::cap_exceeded) {
            3
        } else if self.failed() > 0 {
            1
        } else {
            0
        }
    }
}

/// Files ending in `.litmus` directly inside `dir`, sorted.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "litmus") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Runs every test in `dir` on `jobs` worker threads (0 picks a default).
pub fn run_corpus(dir: &Path, opts: &RunOptions, jobs: usize) -> Result<CorpusSummary> {
    let files = corpus_files(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io {
            path: dir.display().to_string(),
            msg: e.to_string(),
        })?;
    let results: Vec<std::result::Result<Report, FileError>> = pool.install(|| {
        files
            .par_iter()
            .map(|p| match load_litmus(p) {
                Ok(t) => Ok(run_test(&t, opts)),
                Err(error) => Err(FileError { path: p.clone(), error }),
            })
            .collect()
    });
    let mut summary = CorpusSummary::default();
    for r in results {
        match r {
            Ok(rep) => summary.reports.push(rep),
            Err(e) => summary.file_errors.push(e),
        }
    }
    summary.reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(summary)
}

/// Reports as pretty-printed JSON, keys in field order.
pub fn reports_json(reports: &[Report]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}
