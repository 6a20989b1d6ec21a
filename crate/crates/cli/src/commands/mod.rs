use anyhow::Result;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Command;
use crate::report::Outcome;

mod build;
mod density;
mod op;
mod set;
mod tf;

pub fn run(command: &Command, seed: u64) -> Result<Outcome> {
    match command {
        Command::Set(c) => set::run(c),
        Command::Tf(c) => tf::run(c),
        Command::Density(c) => density::run(c),
        Command::Build(c) => build::run(c, seed),
        Command::Op(c) => op::run(c, seed),
    }
}

/// The command's arguments plus the inputs they resolved to.
fn config(args: &impl Serialize, resolved: &[(&str, Value)]) -> Result<Value> {
    let mut value = serde_json::to_value(args)?;
    if !resolved.is_empty() {
        let map: Map<String, Value> = resolved.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        if let Value::Object(obj) = &mut value {
            obj.insert("resolved".into(), Value::Object(map));
        }
    }
    Ok(value)
}

fn json(v: &impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}
