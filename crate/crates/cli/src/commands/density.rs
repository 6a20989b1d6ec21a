use anyhow::Result;
use serde_json::json;

use tfsets::density::{self, DensityError};

use super::{config, json};
use crate::args::DensityCommand;
use crate::input;
use crate::report::{Outcome, Status, Table};

pub fn run(cmd: &DensityCommand) -> Result<Outcome> {
    match cmd {
        DensityCommand::Profile(a) => {
            let set = input::set(&a.set.set)?;
            let report = density::density_profile(&set, a.window, &a.d)?;
            let table = Table {
                headers: vec!["d", "maxcount", "ratio"],
                rows: report
                    .entries
                    .iter()
                    .map(|e| vec![e.d.to_string(), e.max_count.to_string(), e.ratio.to_string()])
                    .collect(),
            };
            let cfg = config(a, &[("set", json(&set)?)])?;
            Ok(Outcome::new(cfg, Status::Ok, report)?.with_table(table))
        }
        DensityCommand::Witness(a) => {
            let set = input::set(&a.set.set)?;
            let eps = input::rational(&a.eps)?;
            let cfg = config(a, &[("set", json(&set)?), ("eps", json!(eps.to_string()))])?;
            match density::density_witness(&set, &eps, a.window, a.depth, a.r_min) {
                Ok(w) => Outcome::new(cfg, Status::Ok, w),
                Err(e @ DensityError::InsufficientWindow { .. }) => {
                    Ok(Outcome::new(cfg, Status::None, json!({ "witness": null }))?.with_message(format!("none: {e}")))
                }
                Err(e) => Err(e.into()),
            }
        }
        DensityCommand::Schedule(a) => {
            let eps = input::rational(&a.eps)?;
            let schedule = density::block_schedule(&eps, a.levels)?;
            let table = Table {
                headers: vec!["d", "a", "n"],
                rows: schedule.levels.iter().map(|l| vec![l.d.to_string(), l.a.to_string(), l.n.to_string()]).collect(),
            };
            let cfg = config(a, &[("eps", json!(eps.to_string()))])?;
            Ok(Outcome::new(cfg, Status::Ok, schedule)?.with_table(table))
        }
    }
}
