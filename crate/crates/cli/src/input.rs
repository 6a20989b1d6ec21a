//! Parsing of the textual forms accepted on the command line.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use tfsets::build::{self, GrowthFunction, TauSchedule};
use tfsets::oplab::{C00Vector, CoefficientField, KernelDescriptor, KernelForm};
use tfsets::rational::{self, parse_rational};
use tfsets::{Rational, SetDescriptor, Witness};

/// Inline JSON when the text starts with `{` or `[`, otherwise `None`.
fn inline_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<Option<T>> {
    let t = text.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return serde_json::from_str(t).map(Some).with_context(|| format!("malformed {what} JSON"));
    }
    Ok(None)
}

fn from_file<T: DeserializeOwned>(text: &str, what: &str) -> Result<Option<T>> {
    let path = Path::new(text);
    if !path.is_file() {
        return Ok(None);
    }
    let body = std::fs::read_to_string(path).with_context(|| format!("reading {what} from {}", path.display()))?;
    serde_json::from_str(&body).map(Some).with_context(|| format!("malformed {what} in {}", path.display()))
}

pub fn set(text: &str) -> Result<SetDescriptor> {
    let set = if let Some(s) = inline_json(text, "set descriptor")? {
        s
    } else if let Ok(s) = build::catalog_from_str(text) {
        s
    } else if let Some(s) = from_file(text, "set descriptor")? {
        s
    } else {
        bail!("'{text}' is neither a catalog name, inline JSON nor a readable file");
    };
    let set: SetDescriptor = set;
    set.validate().with_context(|| format!("invalid set descriptor '{text}'"))?;
    Ok(set)
}

pub fn rational(text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| anyhow!("{e}"))
}

pub fn psi(text: &str) -> Result<CoefficientField> {
    if let Some(p) = inline_json(text, "coefficient field")? {
        return Ok(p);
    }
    let t = text.trim();
    let field = match t.split_once(':') {
        Some(("indicator", rest)) => CoefficientField::indicator(set(rest)?),
        Some(("constant", q)) => CoefficientField::constant(rational(q)?),
        Some(("power", rest)) => {
            let (scale, exponent) = rest.split_once(':').ok_or_else(|| anyhow!("expected power:<scale>:<exponent>"))?;
            CoefficientField::PowerDecay {
                scale: rational(scale)?,
                exponent: exponent.parse().context("exponent must be a non-negative integer")?,
            }
        }
        None if t == "harmonic" => CoefficientField::harmonic(),
        _ => match from_file(t, "coefficient field")? {
            Some(p) => p,
            None => bail!("unrecognized coefficient field '{text}'"),
        },
    };
    field.validate()?;
    Ok(field)
}

#[derive(Deserialize)]
struct RawWitness {
    a: Vec<u64>,
    b: Vec<u64>,
}

pub fn witness(json: Option<&str>, a: &[u64], b: &[u64]) -> Result<Witness> {
    let raw = match json {
        Some(text) => match inline_json::<RawWitness>(text, "witness")? {
            Some(w) => w,
            None => from_file(text, "witness")?.ok_or_else(|| anyhow!("witness '{text}' is not JSON or a file"))?,
        },
        None if !a.is_empty() => RawWitness { a: a.to_vec(), b: b.to_vec() },
        None => bail!("a witness is required: --witness or --a/--b"),
    };
    let w = Witness::new(raw.a, raw.b);
    w.check_structure().map_err(|e| anyhow!("malformed witness: {e}"))?;
    Ok(w)
}

/// `1:1,2:-1;3:1/2` or JSON (list of vectors, each a list of
/// `{"index", "coeff"}` terms).
pub fn family(text: &str) -> Result<Vec<C00Vector>> {
    if let Some(f) = inline_json(text, "family")? {
        return Ok(f);
    }
    if let Some(f) = from_file(text, "family")? {
        return Ok(f);
    }
    text.split(';')
        .filter(|v| !v.trim().is_empty())
        .map(|v| {
            let terms = v
                .split(',')
                .map(|term| {
                    let (i, c) = term.split_once(':').ok_or_else(|| anyhow!("term '{term}' is not index:coeff"))?;
                    Ok((i.trim().parse::<u64>().context("index")?, rational(c)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(C00Vector::new(terms))
        })
        .collect()
}

pub fn growth(text: &str) -> Result<GrowthFunction> {
    let g = match text.trim() {
        "sqrt" | "n-ceil-sqrt" => GrowthFunction::NCeilSqrt,
        "log2" | "n-ceil-log2" => GrowthFunction::NCeilLog2,
        "quadratic" => GrowthFunction::Quadratic,
        t => match inline_json(t, "growth function")? {
            Some(g) => g,
            None => from_file(t, "growth function")?.ok_or_else(|| anyhow!("unrecognized growth function '{t}'"))?,
        },
    };
    g.validate()?;
    Ok(g)
}

pub fn tau(text: &str) -> Result<TauSchedule> {
    let t = text.trim();
    if t == "linear" {
        return Ok(TauSchedule::Linear);
    }
    let values = t
        .split(',')
        .map(|v| rational(v).map(|q| rational::to_f64(&q)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(match values.as_slice() {
        [v] => TauSchedule::Constant { value: *v },
        _ => TauSchedule::List { values },
    })
}

pub fn kernel(text: &str, claimed_eta: Option<&str>) -> Result<KernelDescriptor> {
    let mut k = match text.trim() {
        "default" => KernelDescriptor::new(KernelForm::Default),
        "zero" => KernelDescriptor::new(KernelForm::Zero),
        t => match t.split_once(':') {
            Some(("constant", q)) => KernelDescriptor::new(KernelForm::Constant { value: rational(q)? }),
            _ => match inline_json(t, "kernel")? {
                Some(k) => k,
                None => from_file(t, "kernel")?.ok_or_else(|| anyhow!("unrecognized kernel '{t}'"))?,
            },
        },
    };
    if let Some(eta) = claimed_eta {
        k.claimed_eta = Some(rational(eta)?);
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_forms() {
        assert_eq!(set("evens").unwrap(), SetDescriptor::evens());
        assert_eq!(set("powers2").unwrap(), SetDescriptor::powers(2).unwrap());
        let json = serde_json::to_string(&SetDescriptor::finite([1, 5])).unwrap();
        assert_eq!(set(&json).unwrap(), SetDescriptor::finite([1, 5]));
        assert!(set("no-such-set").is_err());
        assert!(set("{\"kind\": \"bogus\"}").is_err());
    }

    #[test]
    fn psi_forms() {
        assert_eq!(psi("indicator:ap:1:2").unwrap(), CoefficientField::indicator(SetDescriptor::odds()));
        assert_eq!(psi("harmonic").unwrap(), CoefficientField::harmonic());
        assert!(matches!(psi("power:2:3").unwrap(), CoefficientField::PowerDecay { exponent: 3, .. }));
        assert!(psi("constant:x").is_err());
    }

    #[test]
    fn family_compact_form() {
        let f = family("1:1,2:-1; 3:1/2").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0], C00Vector::from_ints(&[(1, 1), (2, -1)]));
        assert_eq!(f[1].terms()[0].coeff, rational("1/2").unwrap());
        assert!(family("1-1").is_err());
    }

    #[test]
    fn tau_forms() {
        assert_eq!(tau("linear").unwrap(), TauSchedule::Linear);
        assert_eq!(tau("0.9").unwrap(), TauSchedule::Constant { value: 0.9 });
        assert_eq!(tau("1/2,2").unwrap(), TauSchedule::List { values: vec![0.5, 2.0] });
    }

    #[test]
    fn witness_forms() {
        let w = witness(Some(r#"{"a":[0,2],"b":[2,4]}"#), &[], &[]).unwrap();
        assert_eq!(w, witness(None, &[0, 2], &[2, 4]).unwrap());
        assert!(witness(None, &[], &[]).is_err());
        assert!(witness(None, &[2, 0], &[2, 4]).is_err());
    }
}
