use anyhow::Result;
use serde_json::json;

use tfsets::build::{self, AppendixConfig};
use tfsets::oplab::SearchConfig;

use super::{config, json};
use crate::args::BuildCommand;
use crate::input;
use crate::report::{Outcome, Status};

pub fn run(cmd: &BuildCommand, seed: u64) -> Result<Outcome> {
    match cmd {
        BuildCommand::Clumpy(a) => {
            let base = input::set(&a.base)?;
            let set = build::clumpy(&base)?;
            let elements = build::clumpy_prefix(&base, a.count)?;
            let cfg = config(a, &[("base", json(&base)?)])?;
            Outcome::new(cfg, Status::Ok, json!({ "descriptor": set, "elements": elements }))
        }
        BuildCommand::SlowTset(a) => {
            let g = input::growth(&a.growth)?;
            let set = build::slow_tset(&g)?;
            let seq = build::slow_tset_sequence(&g, a.count)?;
            let cfg = config(a, &[("growth", json(&g)?)])?;
            Outcome::new(cfg, Status::Ok, json!({ "descriptor": set, "seed_value": seq[0], "elements": &seq[1..] }))
        }
        BuildCommand::Catalog(a) => {
            let set = build::catalog(&a.name, &a.params)?;
            let elements = set.materialize(a.window)?.into_elements();
            let cfg = config(a, &[])?;
            Outcome::new(cfg, Status::Ok, json!({ "descriptor": set, "display": set.to_string(), "elements": elements }))
        }
        BuildCommand::Appendix(a) => {
            let ac = AppendixConfig {
                tau: input::tau(&a.tau)?,
                max_rounds: a.rounds,
                search: SearchConfig { budget: a.budget, seed, ..SearchConfig::default() },
                min_block: a.min_block,
            };
            let cfg = config(a, &[("appendix", json(&ac)?)])?;
            match build::appendix_tset(&ac) {
                Ok((set, state)) => {
                    let bound = state.cuts().last().copied().unwrap_or(0);
                    let elements = set.materialize(bound)?.into_elements();
                    let problems = state.check()?;
                    let status = if problems.is_empty() { Status::Ok } else { Status::Error };
                    let out = Outcome::new(
                        cfg,
                        status,
                        json!({ "descriptor": set, "elements": elements, "problems": problems, "state": state }),
                    )?;
                    Ok(if status == Status::Error { out.with_message("state check failed") } else { out })
                }
                Err(fail) => {
                    let result = json!({ "failed_round": fail.round, "reason": fail.reason.to_string(), "state": fail.state });
                    Ok(Outcome::new(cfg, Status::Error, result)?.with_message(fail.to_string()))
                }
            }
        }
    }
}
