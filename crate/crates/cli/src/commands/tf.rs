use anyhow::Result;
use serde_json::json;

use tfsets::tfcheck::{self, TfError};

use super::{config, json};
use crate::args::TfCommand;
use crate::input;
use crate::report::{Outcome, Status, Table};

pub fn run(cmd: &TfCommand) -> Result<Outcome> {
    match cmd {
        TfCommand::Witness(a) => {
            let set = input::set(&a.set.set)?;
            let cfg = config(a, &[("set", json(&set)?)])?;
            match tfcheck::find_nontf_witness(&set, a.depth, a.window, a.budget)? {
                Some(w) => {
                    let v = tfcheck::verify_witness(&set, &w);
                    Outcome::new(cfg, Status::Ok, json!({ "witness": w, "verification": v }))
                }
                None => Ok(Outcome::new(cfg, Status::None, json!({ "witness": null }))?
                    .with_message(format!("none: no depth-{} witness with sums below {}", a.depth, a.window))),
            }
        }
        TfCommand::Verify(a) => {
            let set = input::set(&a.set.set)?;
            let w = input::witness(a.witness.witness.as_deref(), &a.witness.a, &a.witness.b)?;
            let v = tfcheck::verify_witness(&set, &w);
            let status = if v.valid { Status::Ok } else { Status::None };
            let cfg = config(a, &[("set", json(&set)?), ("witness", json(&w)?)])?;
            Outcome::new(cfg, status, v)
        }
        TfCommand::Profile(a) => {
            let set = input::set(&a.set.set)?;
            let profile = tfcheck::tset_profile(&set, a.nmax, a.window)?;
            let table = Table {
                headers: vec!["n", "count", "truncated"],
                rows: profile
                    .entries
                    .iter()
                    .map(|e| vec![e.n.to_string(), e.count.to_string(), e.truncated.to_string()])
                    .collect(),
            };
            let cfg = config(a, &[("set", json(&set)?)])?;
            Ok(Outcome::new(cfg, Status::Ok, profile)?.with_table(table))
        }
        TfCommand::Exact(a) => {
            let set = input::set(&a.set.set)?;
            let verdict = tfcheck::tf_exact_eventually_periodic(&set)?;
            let cfg = config(a, &[("set", json(&set)?)])?;
            let result = json!({ "verdict": verdict, "tf": verdict.is_tf(), "witness": verdict.witness(a.depth) });
            Outcome::new(cfg, Status::Ok, result)
        }
        TfCommand::RamseySplit(a) => {
            let (sa, sb) = (input::set(&a.set_a)?, input::set(&a.set_b)?);
            let w = input::witness(a.witness.witness.as_deref(), &a.witness.a, &a.witness.b)?;
            let cfg = config(a, &[("set_a", json(&sa)?), ("set_b", json(&sb)?), ("witness", json(&w)?)])?;
            match tfcheck::ramsey_split(&sa, &sb, &w, a.target) {
                Ok(split) => Outcome::new(cfg, Status::Ok, split),
                Err(e @ TfError::NoMonochromaticClique { .. }) => {
                    Ok(Outcome::new(cfg, Status::None, json!({ "side": null }))?.with_message(format!("none: {e}")))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}
