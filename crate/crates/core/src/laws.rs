//! Algebraic laws of parallelized sequential composition, checked as
//! trace-set identities on enumerated or sampled instances.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::lang::{par, seq, Action, Command, FenceKind};
use crate::model::{reorder_after, MemoryModel};
use crate::sample::{random_action, rng, SampleConfig};
use crate::semantics::{enumerate_traces, under_model, TraceSet};

const UNROLL: usize = 2;
/// Counterexamples kept per report.
const KEEP: usize = 5;

#[derive(Debug, Clone)]
pub struct LawReport {
    pub law: &'static str,
    pub model: Option<MemoryModel>,
    pub checked: usize,
    pub failures: usize,
    pub examples: Vec<String>,
}

impl LawReport {
    fn new(law: &'static str, model: Option<MemoryModel>) -> Self {
        LawReport {
            law,
            model,
            checked: 0,
            failures: 0,
            examples: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, holds: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !holds {
            self.failures += 1;
            if self.examples.len() < KEEP {
                self.examples.push(describe());
            }
        }
    }

    fn merge(mut self, other: LawReport) -> LawReport {
        self.checked += other.checked;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < KEEP {
                self.examples.push(e);
            }
        }
        self
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let model = self.model.map_or(String::new(), |m| format!(" [{m}]"));
        write!(
            f,
            "{}{}: {} checked, {} failed",
            self.law, model, self.checked, self.failures
        )
    }
}

fn traces(c: &Command) -> Result<TraceSet> {
    enumerate_traces(c, UNROLL)
}

fn act(a: &Action) -> Command {
    Command::act(a.clone())
}

/// The three two-action laws for `m` over every pair of `universe`.
/// Pairs the model cannot classify are skipped.
pub fn two_action_laws(m: MemoryModel, universe: &[Action]) -> Result<[LawReport; 3]> {
    let empty = || {
        [
            LawReport::new("2actions-keep-order", Some(m)),
            LawReport::new("2actions-swap-order", Some(m)),
            LawReport::new("2actions-reduce", Some(m)),
        ]
    };
    let parts: Vec<[LawReport; 3]> = universe
        .par_iter()
        .map(|alpha| -> Result<[LawReport; 3]> {
            let [mut keep, mut swap, mut reduce] = empty();
            for beta in universe {
                let Ok(r) = reorder_after(m, alpha, beta) else {
                    continue;
                };
                let lhs = traces(&Command::pseq(m, act(alpha), act(beta)))?;
                let show = || format!("{} ;{} {}", alpha.qualified(), m.keyword(), beta.qualified());
                match r {
                    None => {
                        let rhs = traces(&seq(act(alpha), act(beta)))?;
                        keep.record(lhs == rhs, show);
                    }
                    Some(b2) => {
                        let swapped = traces(&seq(act(&b2), act(alpha)))?;
                        swap.record(swapped.is_subset(&lhs), show);
                        let both = traces(&Command::choice(seq(act(alpha), act(beta)), seq(act(&b2), act(alpha))))?;
                        reduce.record(lhs == both, show);
                    }
                }
            }
            Ok([keep, swap, reduce])
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(empty(), |[a, b, c], [x, y, z]| [a.merge(x), b.merge(y), c.merge(z)]))
}

/// A small random command: an action, or a composition or choice of two.
pub fn random_command<R: Rng>(rng: &mut R, m: MemoryModel) -> Command {
    let cfg = SampleConfig::for_model(m);
    let a = |rng: &mut R| Command::act(random_action(rng, 0, &cfg));
    match rng.gen_range(0..6) {
        0..=2 => a(rng),
        3 | 4 => {
            let (l, r) = (a(rng), a(rng));
            Command::pseq(m, l, r)
        }
        _ => {
            let (l, r) = (a(rng), a(rng));
            Command::choice(l, r)
        }
    }
}

fn sampled<F>(law: &'static str, m: MemoryModel, samples: usize, seed: u64, check: F) -> Result<LawReport>
where
    F: Fn(&mut rand::rngs::StdRng) -> Result<(bool, String)> + Sync,
{
    let parts: Vec<LawReport> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<LawReport> {
            let mut r = rng(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (m as u64) << 56);
            let mut rep = LawReport::new(law, Some(m));
            let (ok, desc) = check(&mut r)?;
            rep.record(ok, || desc);
            Ok(rep)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(LawReport::new(law, Some(m)), LawReport::merge))
}

/// `(c1 ;m c2) ;m c3 = c1 ;m (c2 ;m c3)`.
pub fn pseqc_assoc(m: MemoryModel, samples: usize, seed: u64) -> Result<LawReport> {
    sampled("pseqc-assoc", m, samples, seed, |r| {
        let (a, b, c) = (random_command(r, m), random_command(r, m), random_command(r, m));
        let lhs = Command::pseq(m, Command::pseq(m, a.clone(), b.clone()), c.clone());
        let rhs = Command::pseq(m, a, Command::pseq(m, b, c));
        Ok((traces(&lhs)? == traces(&rhs)?, format!("{lhs}  vs  {rhs}")))
    })
}

/// Models in which the full fence blocks every reordering. `G0` and `PAR`
/// let actions pass fences freely.
pub fn respects_full_fence(m: MemoryModel) -> bool {
    !matches!(m, MemoryModel::Par | MemoryModel::G0)
}

/// `c1 ;m fence ;m c2 = c1 ; fence ; c2`.
pub fn fence_to_seqc(m: MemoryModel, samples: usize, seed: u64) -> Result<LawReport> {
    sampled("fence-to-seqc", m, samples, seed, |r| {
        let (c1, c2) = (random_command(r, m), random_command(r, m));
        let f = Command::act(Action::fence(FenceKind::Full));
        let lhs = Command::pseq(m, c1.clone(), Command::pseq(m, f.clone(), c2.clone()));
        let rhs = seq(c1, seq(f, c2));
        Ok((traces(&lhs)? == traces(&rhs)?, format!("{lhs}")))
    })
}

/// `c1 ;m c2` has every behaviour of `c1 ; c2`.
pub fn keep_order(m: MemoryModel, samples: usize, seed: u64) -> Result<LawReport> {
    sampled("keep-order", m, samples, seed, |r| {
        let (c1, c2) = (random_command(r, m), random_command(r, m));
        let lhs = Command::pseq(m, c1.clone(), c2.clone());
        Ok((traces(&seq(c1, c2))?.is_subset(&traces(&lhs)?), format!("{lhs}")))
    })
}

/// Laws that do not depend on a memory model, with threads drawn under `m`.
pub fn structural_laws(m: MemoryModel, samples: usize, seed: u64) -> Result<Vec<LawReport>> {
    let choose_l = sampled("chooseL", m, samples, seed, |r| {
        let (c, d) = (random_command(r, m), random_command(r, m));
        let ch = Command::choice(c.clone(), d);
        Ok((traces(&c)?.is_subset(&traces(&ch)?), format!("{ch}")))
    })?;
    let fix = sampled("fix-interleaving", m, samples, seed, |r| {
        let a = random_action(r, 0, &SampleConfig::for_model(m));
        let (c, d) = (random_command(r, m), under_model(&random_command(r, m), m));
        let lhs = par(seq(act(&a), c.clone()), d.clone());
        let rhs = seq(act(&a), par(c, d));
        Ok((traces(&rhs)?.is_subset(&traces(&lhs)?), format!("{lhs}")))
    })?;
    let dist = sampled("dist-choice-pl", m, samples, seed, |r| {
        let (c1, c2, d) = (random_command(r, m), random_command(r, m), random_command(r, m));
        let lhs = par(Command::choice(c1.clone(), c2.clone()), d.clone());
        let rhs = Command::choice(par(c1, d.clone()), par(c2, d));
        Ok((traces(&lhs)? == traces(&rhs)?, format!("{lhs}")))
    })?;
    Ok(vec![choose_l, fix, dist])
}

/// Every law on every model it applies to.
pub fn all_laws(universe: &[Action], samples: usize, seed: u64) -> Result<Vec<LawReport>> {
    let mut out = Vec::new();
    for m in MemoryModel::ALL {
        out.extend(two_action_laws(m, universe)?);
        out.push(pseqc_assoc(m, samples, seed)?);
        out.push(keep_order(m, samples, seed)?);
        if respects_full_fence(m) {
            out.push(fence_to_seqc(m, samples, seed)?);
        }
    }
    out.extend(structural_laws(MemoryModel::Arm, samples, seed)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Universe;

    #[test]
    fn two_action_laws_on_a_slice_of_the_universe() {
        let u: Vec<Action> = Universe::extended().actions.into_iter().step_by(11).collect();
        for m in MemoryModel::ALL {
            for rep in two_action_laws(m, &u).unwrap() {
                assert!(rep.ok(), "{rep}: {:?}", rep.examples);
            }
        }
    }

    #[test]
    fn sampled_laws_hold() {
        for m in MemoryModel::ALL {
            assert!(pseqc_assoc(m, 30, 1).unwrap().ok());
            assert!(keep_order(m, 30, 1).unwrap().ok());
        }
        for m in MemoryModel::ALL.into_iter().filter(|m| respects_full_fence(*m)) {
            let rep = fence_to_seqc(m, 30, 1).unwrap();
            assert!(rep.ok(), "{rep}: {:?}", rep.examples);
        }
        for rep in structural_laws(MemoryModel::G, 30, 1).unwrap() {
            assert!(rep.ok(), "{rep}: {:?}", rep.examples);
        }
    }

    #[test]
    fn fence_law_fails_without_a_model_that_respects_fences() {
        assert!(!fence_to_seqc(MemoryModel::Par, 60, 2).unwrap().ok());
        assert!(!fence_to_seqc(MemoryModel::G0, 60, 2).unwrap().ok());
    }
}
