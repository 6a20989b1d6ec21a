use anyhow::Result;
use serde_json::json;

use tfsets::oplab::{self, C00Vector, OpError, SearchConfig};
use tfsets::Rational;

use super::{config, json};
use crate::args::OpCommand;
use crate::input;
use crate::report::{Outcome, Status, Table};

pub fn run(cmd: &OpCommand, seed: u64) -> Result<Outcome> {
    match cmd {
        OpCommand::Column(a) => {
            let psi = input::psi(&a.psi.psi)?;
            let values: Vec<String> = oplab::column(&psi, a.j, a.window)?.iter().map(Rational::to_string).collect();
            let table = Table {
                headers: vec!["k", "value"],
                rows: values.iter().enumerate().map(|(k, v)| vec![k.to_string(), v.clone()]).collect(),
            };
            let cfg = config(a, &[("psi", json(&psi)?)])?;
            Ok(Outcome::new(cfg, Status::Ok, json!({ "j": a.j, "window": a.window, "values": values }))?.with_table(table))
        }
        OpCommand::Norm(a) => {
            let set = input::set(&a.set.set)?;
            let cfg = config(a, &[("set", json(&set)?)])?;
            match oplab::column_l1(&set, a.j) {
                Ok(n) => Outcome::new(cfg, Status::Ok, json!({ "divergent": false, "norm": n })),
                Err(OpError::Divergent(why)) => {
                    Ok(Outcome::new(cfg, Status::Ok, json!({ "divergent": true, "norm": null }))?.with_message(why))
                }
                Err(e @ OpError::TailNotCertified(_)) => {
                    Ok(Outcome::new(cfg, Status::None, json!({ "divergent": null, "norm": null }))?
                        .with_message(format!("none: {e}")))
                }
                Err(e) => Err(e.into()),
            }
        }
        OpCommand::PiLower(a) => {
            let psi = input::psi(&a.psi.psi)?;
            match &a.family {
                Some(text) => {
                    let family = input::family(text)?;
                    let cert = oplab::pi_lower(&psi, &family, a.p)?;
                    let horizon = oplab::certificate_horizon(&cert);
                    let cfg = config(a, &[("psi", json(&psi)?), ("family", json(&family)?)])?;
                    Outcome::new(cfg, Status::Ok, json!({ "certificate": cert, "horizon": horizon }))
                }
                None => {
                    let search = SearchConfig { budget: a.budget, seed, ..SearchConfig::default() };
                    let seed_family: Vec<C00Vector> = a.pool.iter().map(|&i| C00Vector::delta(i)).collect();
                    let out = oplab::search_certificate(&psi, a.p, a.tau, seed_family, &a.pool, &search)?;
                    let horizon = out.best.as_ref().map(oplab::certificate_horizon);
                    let status = if out.reached { Status::Ok } else { Status::None };
                    let cfg = config(a, &[("psi", json(&psi)?), ("search", json(&search)?)])?;
                    let result = json!({
                        "reached": out.reached,
                        "evaluations": out.evaluations,
                        "certificate": out.best,
                        "horizon": horizon,
                    });
                    let outcome = Outcome::new(cfg, status, result)?;
                    Ok(if out.reached {
                        outcome
                    } else {
                        outcome.with_message(format!("none: no certificate above tau = {} in {} evaluations", a.tau, a.budget))
                    })
                }
            }
        }
        OpCommand::WcDiagnostic(a) => {
            let psi = input::psi(&a.psi.psi)?;
            let eps = a.eps.iter().map(|e| input::rational(e)).collect::<Result<Vec<_>>>()?;
            let report = oplab::wc_diagnostic(&psi, &eps, a.window, a.depth, a.budget)?;
            let table = Table {
                headers: vec!["eps", "verdict", "exact", "level_set"],
                rows: report
                    .entries
                    .iter()
                    .map(|e| vec![e.eps.to_string(), e.verdict.to_string(), e.exact.to_string(), e.level_set.clone()])
                    .collect(),
            };
            let eps_text: Vec<String> = eps.iter().map(Rational::to_string).collect();
            let cfg = config(a, &[("psi", json(&psi)?), ("eps", json(&eps_text)?)])?;
            Ok(Outcome::new(cfg, Status::Ok, report)?.with_table(table))
        }
        OpCommand::KernelCheck(a) => {
            let kernel = input::kernel(&a.kernel, a.claimed_eta.as_deref())?;
            let report = oplab::kernel_check(&kernel, a.window, a.rows)?;
            let table = Table {
                headers: vec!["j", "head_max", "tail_max", "decays"],
                rows: report
                    .rows
                    .iter()
                    .map(|r| vec![r.j.to_string(), r.head_max.to_string(), r.tail_max.to_string(), r.decays.to_string()])
                    .collect(),
            };
            let cfg = config(a, &[("kernel", json(&kernel)?)])?;
            Ok(Outcome::new(cfg, Status::Ok, report)?.with_table(table))
        }
    }
}
