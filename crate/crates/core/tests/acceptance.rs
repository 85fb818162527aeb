//! Acceptance suite: one PASS/FAIL line per criterion, with time limits.
//! Runs as a plain binary so every line is printed even when all pass.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use wmm_core::explorer::{explore, explore_command, hoare_check, wp, Backend, ExploreOptions};
use wmm_core::lang::{if_then_else, par, seq, Arith, Expr, FenceKind};
use wmm_core::laws::{fence_to_seqc, pseqc_assoc, random_command, respects_full_fence, two_action_laws};
use wmm_core::litmus::{reports_json, run_corpus, RunOptions};
use wmm_core::model::{check_hierarchy, refinement_violations, well_behaved_check, EffOracle, Universe};
use wmm_core::sample::{random_program, rng, SampleConfig};
use wmm_core::semantics::under_model;
use wmm_core::state::{Domain, StateSpace};
use wmm_core::{Action, Command, MemoryModel, Predicate, State, Variable};
use MemoryModel::*;

type Check = Result<(bool, String), String>;

struct Suite {
    failed: Vec<usize>,
}

impl Suite {
    fn criterion(&mut self, n: usize, title: &str, limit: Duration, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        let in_time = took <= limit;
        let pass = ok && in_time;
        if !pass {
            self.failed.push(n);
        }
        let timing = format!("{:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs());
        let late = if in_time { "" } else { " TIME LIMIT EXCEEDED" };
        println!(
            "criterion {n:>2} {}: {title}: {detail} ({timing}){late}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
}

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
fn fence(k: FenceKind) -> Command {
    Command::act(Action::fence(k))
}
fn eq(v: &Variable, c: i64) -> Expr {
    Expr::eq(Expr::var(v), Expr::Const(c))
}

fn zeros(vars: &[Variable]) -> State {
    vars.iter().map(|v| (v.clone(), 0)).collect()
}

fn err(e: wmm_core::Error) -> String {
    e.to_string()
}

/// SB threads: `x := 1 ; [mfence ;] r1 := y` and the mirror image.
fn sb_threads(fenced: bool) -> Vec<Command> {
    let thread = |mine: &Variable, other: &Variable, reg: &Variable| {
        if fenced {
            seq(st(mine, 1), seq(fence(FenceKind::Full), ld(reg, other)))
        } else {
            seq(st(mine, 1), ld(reg, other))
        }
    };
    vec![thread(&x(), &y(), &r(0, 1)), thread(&y(), &x(), &r(1, 2))]
}

fn sb_vars() -> Vec<Variable> {
    vec![x(), y(), r(0, 1), r(1, 2)]
}

/// Final states of straight-line threads under interleaving, computed by
/// enumerating every merge of the threads' action lists.
fn interleavings(threads: &[Vec<Action>], s: &State, out: &mut BTreeSet<State>) {
    if threads.iter().all(Vec::is_empty) {
        out.insert(s.clone());
        return;
    }
    for (i, t) in threads.iter().enumerate() {
        let Some((a, rest)) = t.split_first() else { continue };
        let next = match a.base() {
            Action::Assign(v, e) => s.clone().with(v, e.eval(s)),
            Action::Guard(b) if b.eval(s) == 0 => continue,
            _ => s.clone(),
        };
        let mut ts = threads.to_vec();
        ts[i] = rest.to_vec();
        interleavings(&ts, &next, out);
    }
}

fn sb_reachable(finals: &BTreeSet<State>) -> bool {
    finals.iter().any(|s| s.get(&r(0, 1)) == 0 && s.get(&r(1, 2)) == 0)
}

fn criterion_1() -> Check {
    let init = [zeros(&sb_vars())];
    let limit = Duration::from_secs(1);
    let mut lines = Vec::new();
    let mut ok = true;
    let cases = [(Sc, false, false, "SC"), (Tso, false, true, "TSO"), (Tso, true, false, "TSO+mfence")];
    for (m, fenced, expect, label) in cases {
        let start = Instant::now();
        let mut verdicts = BTreeSet::new();
        let mut finals_by_backend = Vec::new();
        for b in Backend::ALL.into_iter().filter(|b| b.supports(m)) {
            let ex = explore(&sb_threads(fenced), m, &init, ExploreOptions::with_backend(b)).map_err(err)?;
            verdicts.insert(sb_reachable(&ex.finals));
            finals_by_backend.push(ex.finals);
        }
        let took = start.elapsed();
        let agree = finals_by_backend.windows(2).all(|w| w[0] == w[1]);
        let case_ok = verdicts == BTreeSet::from([expect]) && agree && took < limit;
        ok &= case_ok;
        lines.push(format!(
            "{label} {}",
            if expect { "reachable" } else { "unreachable" }
        ));
        if m == Sc {
            // The SC final states must be exactly those of plain interleaving.
            let threads: Vec<Vec<Action>> = sb_threads(false).iter().map(Command::actions).collect();
            let mut oracle = BTreeSet::new();
            interleavings(&threads, &init[0], &mut oracle);
            ok &= oracle == finals_by_backend[0];
        }
    }
    Ok((ok, lines.join(", ")))
}

const BAD_MP: fn(&State) -> bool = |s| s.get(&r(1, 1)) == 1 && s.get(&r(1, 2)) == 0;

fn mp_reachable(c: &Command) -> Result<bool, String> {
    let init = zeros(&[x(), y(), r(1, 1), r(1, 2)]);
    let ex = explore_command(c, &init, ExploreOptions::default()).map_err(err)?;
    Ok(ex.finals.iter().any(BAD_MP))
}

fn criterion_2() -> Check {
    let (r1, r2) = (r(1, 1), r(1, 2));
    let writer = |m| Command::pseq(m, st(&x(), 1), st(&y(), 1));
    let reader = |m| Command::pseq(m, ld(&r1, &y()), ld(&r2, &x()));
    let plain = |m| par(writer(m), reader(m));
    let rel_acq = par(
        Command::pseq(RcPc, st(&x(), 1), Action::release(Action::assign(&y(), Expr::Const(1)))),
        Command::pseq(RcPc, Action::acquire(Action::assign(&r1, Expr::var(&y()))), ld(&r2, &x())),
    );
    let sequential_writer = seq(st(&x(), 1), st(&y(), 1));
    let ctrl = par(
        sequential_writer.clone(),
        Command::pseq(Arm, ld(&r1, &y()), if_then_else(Arm, eq(&r1, 1), ld(&r2, &x()), Command::Terminated)),
    );
    let ctrl_isb = par(
        sequential_writer,
        Command::pseq(
            Arm,
            ld(&r1, &y()),
            if_then_else(Arm, eq(&r1, 1), Command::pseq(Arm, fence(FenceKind::Control), ld(&r2, &x())), Command::Terminated),
        ),
    );
    let cases: [(&str, Command, bool); 5] = [
        ("MP under G allowed", plain(G), true),
        ("MP under ARM allowed", plain(Arm), true),
        ("MP+rel/acq under RCpc forbidden", rel_acq, false),
        ("MP+ctrl under ARM allowed", ctrl, true),
        ("MP+ctrl+isb under ARM forbidden", ctrl_isb, false),
    ];
    let mut ok = true;
    let mut shown = Vec::new();
    for (label, c, expect) in cases {
        let start = Instant::now();
        let got = mp_reachable(&c)?;
        let case_ok = got == expect && start.elapsed() < Duration::from_secs(1);
        ok &= case_ok;
        shown.push(if case_ok { label.to_string() } else { format!("{label} WRONG") });
    }
    Ok((ok, shown.join("; ")))
}

fn criterion_3() -> Check {
    let (r1, r2) = (r(1, 1), r(1, 2));
    let c = par(Command::pseq(G, ld(&r1, &x()), ld(&r2, &x())), Command::pseq(G, st(&x(), 1), st(&x(), 2)));
    let init = zeros(&[x(), r1.clone(), r2.clone()]);
    let ex = explore_command(&c, &init, ExploreOptions::default()).map_err(err)?;
    let bad = ex.finals.iter().any(|s| s.get(&r1) == 2 && s.get(&r2) == 1);
    Ok((!bad, format!("r1=2 && r2=1 {} in {} final states", if bad { "reached" } else { "never reached" }, ex.finals.len())))
}

const SAMPLES: usize = 200;

fn criterion_4() -> Check {
    let universe = Universe::common().actions;
    let mut failures = 0;
    let mut pairs = 0;
    let mut sampled = 0;
    let mut notes = Vec::new();
    for m in MemoryModel::ALL {
        for rep in two_action_laws(m, &universe).map_err(err)? {
            pairs += rep.checked;
            failures += rep.failures;
        }
        let assoc = pseqc_assoc(m, SAMPLES, 41).map_err(err)?;
        sampled += assoc.checked;
        failures += assoc.failures;
        let fence = fence_to_seqc(m, SAMPLES, 43).map_err(err)?;
        if respects_full_fence(m) {
            sampled += fence.checked;
            failures += fence.failures;
        } else {
            notes.push(format!("fence-to-seqc not applicable to {m} ({} of {} samples differ)", fence.failures, fence.checked));
        }
    }
    Ok((
        failures == 0,
        format!(
            "{} actions, {pairs} law instances, {sampled} sampled instances, {failures} violations; {}",
            universe.len(),
            notes.join("; ")
        ),
    ))
}

fn initial_states(p: &wmm_core::sample::Program) -> Vec<State> {
    p.initial_states()
}

fn criterion_5() -> Check {
    let models = [G0, G, Tso, RcPc, RcSc, Arm, RiscV];
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for (k, m) in models.into_iter().enumerate() {
        let mut rng = rng(5000 + k as u64);
        let cfg = SampleConfig::for_model(m);
        for i in 0..SAMPLES {
            let p = random_program(&mut rng, &cfg);
            let inits = initial_states(&p);
            let run = |b| explore(&p.threads, m, &inits, ExploreOptions::with_backend(b)).map(|e| e.finals);
            let (a, b) = (run(Backend::Pseq).map_err(err)?, run(Backend::Pipeline).map_err(err)?);
            compared += 1;
            if a != b {
                mismatches.push(format!("{m} #{i}"));
            }
        }
    }
    let shown: Vec<_> = mismatches.iter().take(5).cloned().collect();
    Ok((
        mismatches.is_empty(),
        format!("{compared} programs, {} mismatches {:?}", mismatches.len(), shown),
    ))
}

fn criterion_6() -> Check {
    let mut rng = rng(6000);
    let cfg = SampleConfig::assembler();
    let mut mismatches = 0;
    for _ in 0..SAMPLES {
        let p = random_program(&mut rng, &cfg);
        let inits = initial_states(&p);
        let finals: Vec<BTreeSet<State>> = Backend::ALL
            .into_iter()
            .map(|b| explore(&p.threads, Tso, &inits, ExploreOptions::with_backend(b)).map(|e| e.finals))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        if finals.windows(2).any(|w| w[0] != w[1]) {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("{SAMPLES} programs on 3 backends, {mismatches} mismatches")))
}

fn criterion_7() -> Check {
    let universe = Universe::common().actions;
    let steps = check_hierarchy(&universe, EffOracle { domain: 2 });
    let mut parts = Vec::new();
    for s in &steps {
        if !s.violations.is_empty() {
            parts.push(format!(
                "{} does not refine to {}: {} pairs, e.g. {}",
                s.weaker,
                s.stronger,
                s.violations.len(),
                s.violations[0]
            ));
        }
    }
    let ok = parts.is_empty();
    // Where the two models do sit relative to their neighbours.
    let side = |w: MemoryModel, s: MemoryModel| refinement_violations(&w, &s, &universe).is_empty();
    parts.push(format!(
        "RCpc to RCsc {}, RISCV to ARM {}",
        if side(RcPc, RcSc) { "holds" } else { "fails" },
        if side(RiscV, Arm) { "holds" } else { "fails" }
    ));
    Ok((ok, format!("{} adjacent pairs over {} actions; {}", steps.len(), universe.len(), parts.join("; "))))
}

fn criterion_8() -> Check {
    let mut bad = Vec::new();
    let mut pairs = 0;
    for (label, u) in [("common", Universe::common()), ("extended", Universe::extended())] {
        for m in MemoryModel::WELL_BEHAVED {
            let rep = well_behaved_check(&m, &u.actions);
            pairs += rep.checked_pairs;
            if !rep.ok() {
                bad.push(format!("{m} on {label}: {}", rep.violations[0]));
            }
        }
    }
    Ok((bad.is_empty(), format!("{pairs} pairs checked, violations: {bad:?}")))
}

/// The post-state of an action, evaluated directly.
fn step_oracle(a: &Action, s: &State, arith: Arith) -> Option<State> {
    match a.base() {
        Action::Assign(v, e) => Some(s.clone().with(v, e.eval_in(s, arith))),
        Action::Guard(b) => (b.eval_in(s, arith) != 0).then(|| s.clone()),
        _ => Some(s.clone()),
    }
}

fn random_predicate<R: Rng>(rng: &mut R, space: &StateSpace) -> BTreeSet<State> {
    space.states().filter(|_| rng.gen_bool(0.6)).collect()
}

fn criterion_9() -> Check {
    let space = StateSpace::new([x(), y(), r(0, 1), r(0, 2)], Domain::new(2));
    let arith = space.domain.arith();
    let unroll = 2;
    let mut rng = rng(9000);
    let mut failed: BTreeSet<&str> = BTreeSet::new();
    let mut checked = 0;
    let all: BTreeSet<State> = space.states().collect();
    let actions = Universe::common().actions;
    for i in 0..SAMPLES {
        let q = random_predicate(&mut rng, &space);
        let post = Predicate::States(q.clone());
        // Action axioms against direct evaluation.
        let a = &actions[rng.gen_range(0..actions.len())];
        let w = wp(&Command::act(a.clone()), &post, &space, unroll).map_err(err)?;
        let expected: BTreeSet<State> = all
            .iter()
            .filter(|s| step_oracle(a, s, arith).is_none_or(|t| q.contains(&t)))
            .cloned()
            .collect();
        if w != expected {
            failed.insert(if a.is_guard() { "guard axiom" } else if matches!(a, Action::Fence(_)) { "fence axiom" } else { "assignment axiom" });
        }
        let k = FenceKind::ALL[i % FenceKind::ALL.len()];
        if wp(&fence(k), &post, &space, unroll).map_err(err)? != q {
            failed.insert("fence axiom");
        }
        // Composition rules.
        let m = MemoryModel::WELL_BEHAVED[i % MemoryModel::WELL_BEHAVED.len()];
        let (c1, c2) = (random_command(&mut rng, m), random_command(&mut rng, m));
        let w2 = wp(&c2, &post, &space, unroll).map_err(err)?;
        let w12 = wp(&c1, &Predicate::States(w2.clone()), &space, unroll).map_err(err)?;
        if wp(&seq(c1.clone(), c2.clone()), &post, &space, unroll).map_err(err)? != w12 {
            failed.insert("wp sequential composition");
        }
        let w1 = wp(&c1, &post, &space, unroll).map_err(err)?;
        let choice = wp(&Command::choice(c1.clone(), c2.clone()), &post, &space, unroll).map_err(err)?;
        if choice != w1.intersection(&w2).cloned().collect() {
            failed.insert("choice conjunction");
        }
        // Midpoint rule: {P} c1 {R}, {R} c2 {Q} gives {P} c1 ;m fence ;m c2 {Q}.
        if respects_full_fence(m) {
            let fenced = Command::pseq(m, c1.clone(), Command::pseq(m, fence(FenceKind::Full), c2.clone()));
            let ok = hoare_check(&Predicate::States(w12.clone()), &fenced, &post, &space, unroll).map_err(err)?;
            if !ok {
                failed.insert("fence midpoint rule");
            }
        }
        checked += 1;
    }
    // The SB verdicts through the Hoare layer.
    let sb_space = StateSpace::new(sb_vars(), Domain::new(2));
    let pre = Predicate::Expr(Expr::and(eq(&x(), 0), eq(&y(), 0)));
    let post = Predicate::Expr(Expr::not(Expr::and(eq(&r(0, 1), 0), eq(&r(1, 2), 0))));
    let prog = |fenced: bool, m| {
        let t = sb_threads(fenced);
        under_model(&par(t[0].clone(), t[1].clone()), m)
    };
    let verdicts = [
        hoare_check(&pre, &prog(false, Sc), &post, &sb_space, unroll).map_err(err)?,
        hoare_check(&pre, &prog(false, Tso), &post, &sb_space, unroll).map_err(err)?,
        hoare_check(&pre, &prog(true, Tso), &post, &sb_space, unroll).map_err(err)?,
    ];
    if verdicts != [true, false, true] {
        failed.insert("SB triples");
    }
    Ok((
        failed.is_empty(),
        format!("{checked} sampled programs over {} states, SB triples {verdicts:?}, failures {failed:?}", space.len()),
    ))
}

fn criterion_10() -> Check {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let opts = RunOptions {
        timing: false,
        ..Default::default()
    };
    let mut outputs = Vec::new();
    let mut summary = None;
    for jobs in [1, 2, 4] {
        let s = run_corpus(&dir, &opts, jobs).map_err(err)?;
        outputs.push(reports_json(&s.reports));
        summary = Some(s);
    }
    let s = summary.expect("ran");
    let deterministic = outputs.windows(2).all(|w| w[0] == w[1]);
    let ok = s.reports.len() >= 20 && s.failed() == 0 && s.file_errors.is_empty() && deterministic;
    Ok((
        ok,
        format!(
            "{} tests, {} matched, {} unreadable, JSON identical across 1/2/4 jobs: {deterministic}",
            s.reports.len(),
            s.passed(),
            s.file_errors.len()
        ),
    ))
}

fn main() {
    let mut suite = Suite { failed: Vec::new() };
    let secs = Duration::from_secs;
    suite.criterion(1, "SB verdicts", secs(3), criterion_1);
    suite.criterion(2, "MP family verdicts", secs(5), criterion_2);
    suite.criterion(3, "coherence of two loads under G", secs(1), criterion_3);
    suite.criterion(4, "two-action, associativity and fence laws", secs(60), criterion_4);
    suite.criterion(5, "pipeline and reordering backends agree", secs(120), criterion_5);
    suite.criterion(6, "store buffer, pipeline and reordering agree on TSO", secs(120), criterion_6);
    suite.criterion(7, "model hierarchy", secs(60), criterion_7);
    suite.criterion(8, "well-behaved reordering relations", secs(60), criterion_8);
    suite.criterion(9, "wp and Hoare laws", secs(60), criterion_9);
    suite.criterion(10, "curated corpus", secs(60), criterion_10);
    if suite.failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {:?}", suite.failed);
        std::process::exit(1);
    }
}
