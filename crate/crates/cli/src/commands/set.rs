use anyhow::Result;
use serde_json::json;

use tfsets::{zset, SetDescriptor};

use super::{config, json};
use crate::args::SetCommand;
use crate::input;
use crate::report::{Outcome, Status, Table};

pub fn run(cmd: &SetCommand) -> Result<Outcome> {
    match cmd {
        SetCommand::Info(a) => {
            let set = input::set(&a.set.set)?;
            let first = leading(&set, a.count)?;
            let cfg = config(a, &[("set", json(&set)?)])?;
            let result = json!({
                "descriptor": set,
                "display": set.to_string(),
                "known_infinite": set.known_infinite(),
                "upper_bound": set.upper_bound(),
                "fast_membership": set.fast_membership(),
                "first": first,
            });
            Outcome::new(cfg, Status::Ok, result)
        }
        SetCommand::Materialize(a) => {
            let set = input::set(&a.set.set)?;
            let elements = set.materialize(a.window)?.into_elements();
            let table = Table { headers: vec!["element"], rows: elements.iter().map(|e| vec![e.to_string()]).collect() };
            let cfg = config(a, &[("set", json(&set)?)])?;
            let result = json!({ "window": a.window, "count": elements.len(), "elements": elements });
            Ok(Outcome::new(cfg, Status::Ok, result)?.with_table(table))
        }
    }
}

/// Up to `count` smallest elements.
fn leading(set: &SetDescriptor, count: u64) -> Result<Vec<u64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let bound = match set.upper_bound() {
        Some(b) => b,
        None => zset::nth(set, count)? + 1,
    };
    let mut elements = set.materialize(bound)?.into_elements();
    elements.truncate(count as usize);
    Ok(elements)
}
