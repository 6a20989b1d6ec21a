//! Weak compactness diagnostics through level sets, and checks on the
//! generalized kernels `T^M_psi(delta_j)(delta_k) = M_jk psi_{j+k}`.

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{CoefficientField, OpError};
use crate::density::{self, DensityReport};
use crate::rational::{self, Rational};
use crate::tfcheck::{self, Witness};
use crate::zset::SetDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WcVerdict {
    /// A witness shows the level set is not TF, which rules out weak compactness.
    #[serde(rename = "NON-WC-EVIDENCE")]
    NonWcEvidence,
    /// No witness inside the searched window and budget.
    #[serde(rename = "CONSISTENT-WITH-WC")]
    ConsistentWithWc,
    /// The level set is finite, hence TF.
    #[serde(rename = "TF-EXACT")]
    TfExact,
}

impl std::fmt::Display for WcVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WcVerdict::NonWcEvidence => "NON-WC-EVIDENCE",
            WcVerdict::ConsistentWithWc => "CONSISTENT-WITH-WC",
            WcVerdict::TfExact => "TF-EXACT",
        })
    }
}

/// `|D_psi(delta_{b_n})(delta_{a_m})| = b_n/(a_m + b_n) |psi_{a_m + b_n}|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrinocoValue {
    pub m: usize,
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WcEntry {
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    /// Human-readable form of `S_eps`.
    pub level_set: String,
    pub verdict: WcVerdict,
    /// The verdict is a proof (finite or eventually periodic level set).
    pub exact: bool,
    pub witness: Option<Witness>,
    pub orinoco: Vec<OrinocoValue>,
    pub orinoco_min: Option<f64>,
    pub density: Option<DensityReport>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WcReport {
    pub entries: Vec<WcEntry>,
    pub overall: WcVerdict,
}

fn orinoco(psi: &CoefficientField, w: &Witness) -> Result<Vec<OrinocoValue>, OpError> {
    let mut out = Vec::new();
    for n in 1..=w.depth {
        for m in 1..=n {
            let (a, b) = (w.a[m - 1], w.b[n - 1]);
            let v = psi.value(a + b)?.abs();
            let value = if a + b == 0 { 0.0 } else { rational::to_f64(&(rational::ratio_u64(b, a + b) * v)) };
            out.push(OrinocoValue { m, n, value });
        }
    }
    Ok(out)
}

/// Per-`eps` verdicts on the level sets `S_eps = {n : |psi_n| > eps}`.
///
/// Level sets that normalize to eventually periodic sets are decided
/// exactly. Otherwise a witness is searched in `[0, W)` with the given depth
/// and budget; exhausting the budget counts as "no witness found".
pub fn wc_diagnostic(
    psi: &CoefficientField,
    eps_list: &[Rational],
    window: u64,
    depth: usize,
    budget: u64,
) -> Result<WcReport, OpError> {
    psi.validate()?;
    let mut entries = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        if !eps.is_positive() {
            return Err(OpError::InvalidParameter(format!("epsilon {eps} must be positive")));
        }
        let set = psi.level_set(eps)?;
        let mut window_here = window;
        if let SetDescriptor::Table { horizon, .. } = &set {
            window_here = window_here.min(*horizon);
        }
        let (verdict, exact, witness, note) = match tfcheck::tf_exact_eventually_periodic(&set) {
            Ok(v) if v.is_tf() => (WcVerdict::TfExact, true, None, None),
            Ok(v) => {
                let w = tfcheck::certify(&set, v.witness(depth).expect("non-TF verdict"))?;
                (WcVerdict::NonWcEvidence, true, Some(w), Some("level set contains an infinite progression".into()))
            }
            Err(_) => match tfcheck::find_nontf_witness(&set, depth, window_here, budget) {
                Ok(Some(w)) => (WcVerdict::NonWcEvidence, false, Some(w), None),
                Ok(None) => (
                    WcVerdict::ConsistentWithWc,
                    false,
                    None,
                    Some(format!("no depth-{depth} witness with sums below {window_here}")),
                ),
                Err(tfcheck::TfError::BudgetExhausted { budget, .. }) => (
                    WcVerdict::ConsistentWithWc,
                    false,
                    None,
                    Some(format!("search budget {budget} exhausted before the window was covered")),
                ),
                Err(e) => return Err(e.into()),
            },
        };
        let orinoco = match &witness {
            Some(w) => orinoco(psi, w)?,
            None => Vec::new(),
        };
        let orinoco_min = orinoco.iter().map(|o| o.value).min_by(f64::total_cmp);
        let dlist: Vec<u64> = [1, 8, 64].into_iter().filter(|&d| d <= window_here).collect();
        let density = if dlist.is_empty() {
            None
        } else {
            Some(density::density_profile(&set, window_here, &dlist)?)
        };
        entries.push(WcEntry {
            eps: eps.clone(),
            level_set: set.to_string(),
            verdict,
            exact,
            witness,
            orinoco,
            orinoco_min,
            density,
            note,
        });
    }
    let overall = if entries.iter().any(|e| e.verdict == WcVerdict::NonWcEvidence) {
        WcVerdict::NonWcEvidence
    } else if entries.iter().all(|e| e.verdict == WcVerdict::TfExact) {
        WcVerdict::TfExact
    } else {
        WcVerdict::ConsistentWithWc
    };
    Ok(WcReport { entries, overall })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelForm {
    /// `M_jk = j/(j+k)`, `M_00 = 0`: the kernel of `D_psi`.
    Default,
    Zero,
    Constant {
        #[serde(with = "rational::serde_str")]
        value: Rational,
    },
    /// `rows[j][k]`; entries outside the table are unknown.
    Explicit {
        #[serde(with = "explicit_rows")]
        rows: Vec<Vec<Rational>>,
    },
}

mod explicit_rows {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let text = Vec::<Vec<String>>::deserialize(d)?;
        text.iter()
            .map(|r| {
                r.iter()
                    .map(|v| crate::rational::parse_rational(v).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelDescriptor {
    #[serde(flatten)]
    pub form: KernelForm,
    #[serde(default, with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub claimed_eta: Option<Rational>,
}

impl KernelDescriptor {
    pub fn new(form: KernelForm) -> Self {
        KernelDescriptor { form, claimed_eta: None }
    }

    fn entry(&self, j: u64, k: u64) -> Option<f64> {
        match &self.form {
            KernelForm::Default => Some(if j + k == 0 { 0.0 } else { j as f64 / (j + k) as f64 }),
            KernelForm::Zero => Some(0.0),
            KernelForm::Constant { value } => Some(rational::to_f64(value)),
            KernelForm::Explicit { rows } => rows.get(j as usize)?.get(k as usize).map(rational::to_f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDecay {
    pub j: u64,
    /// `max |M_jk|` over the first half of the window.
    pub head_max: f64,
    /// `max |M_jk|` over the second half.
    pub tail_max: f64,
    pub decays: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub rows: Vec<RowDecay>,
    pub all_rows_decay: bool,
    /// Symbolic row decay for closed forms.
    pub decay_exact: Option<bool>,
    /// `min_{k < K} min_{J/2 <= j <= J} |M_jk|` with `K = min(W, 16)`.
    pub eta_estimate: f64,
    #[serde(with = "rational::serde_opt_str")]
    pub eta_exact: Option<Rational>,
    pub claimed_eta_consistent: Option<bool>,
    pub flags: Vec<String>,
}

/// Row decay `lim_k M_jk = 0` on a window, and the constant
/// `eta = inf_k liminf_j |M_jk|` that must be positive.
pub fn kernel_check(m: &KernelDescriptor, window: u64, rows: u64) -> Result<KernelReport, OpError> {
    if window < 2 || rows == 0 {
        return Err(OpError::InvalidParameter("need a window of at least 2 columns and at least 1 row".into()));
    }
    let (window, rows) = match &m.form {
        KernelForm::Explicit { rows: table } => {
            let cols = table.iter().map(Vec::len).min().unwrap_or(0) as u64;
            if table.len() < 2 || cols < 2 {
                return Err(OpError::InvalidParameter("explicit kernel needs at least 2 rows and 2 columns".into()));
            }
            (window.min(cols), rows.min(table.len() as u64 - 1))
        }
        _ => (window, rows),
    };
    let half = window / 2;
    let mut row_reports = Vec::with_capacity(rows as usize);
    for j in 1..=rows {
        let abs = |k| m.entry(j, k).unwrap_or(0.0).abs();
        let head_max = (0..half).map(abs).fold(0.0, f64::max);
        let tail_max = (half..window).map(abs).fold(0.0, f64::max);
        let decays = tail_max == 0.0 || tail_max <= head_max / 2.0;
        row_reports.push(RowDecay { j, head_max, tail_max, decays });
    }
    let all_rows_decay = row_reports.iter().all(|r| r.decays);
    let cols = window.min(16);
    let eta_estimate = (0..cols)
        .map(|k| (rows.div_ceil(2).max(1)..=rows).map(|j| m.entry(j, k).unwrap_or(0.0).abs()).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min);
    let (decay_exact, eta_exact) = match &m.form {
        // j/(j+k) <= j/k -> 0 along rows; j/(j+k) -> 1 down columns
        KernelForm::Default => (Some(true), Some(Rational::from_integer(1.into()))),
        KernelForm::Zero => (Some(true), Some(Rational::zero())),
        KernelForm::Constant { value } => (Some(value.is_zero()), Some(value.abs())),
        KernelForm::Explicit { .. } => (None, None),
    };
    let mut flags = Vec::new();
    if !decay_exact.unwrap_or(all_rows_decay) {
        let bad: Vec<String> = row_reports.iter().filter(|r| !r.decays).map(|r| r.j.to_string()).collect();
        flags.push(if bad.is_empty() {
            "rows do not decay".to_string()
        } else {
            format!("row decay fails for rows {}", bad.join(","))
        });
    }
    let eta_zero = match &eta_exact {
        Some(e) => e.is_zero(),
        None => eta_estimate <= super::TOLERANCE,
    };
    if eta_zero {
        flags.push("eta = 0: the lower bound on the kernel fails".to_string());
    }
    let claimed_eta_consistent = m.claimed_eta.as_ref().map(|c| match &eta_exact {
        Some(e) => c <= e,
        None => rational::to_f64(c) <= eta_estimate + super::TOLERANCE,
    });
    Ok(KernelReport {
        rows: row_reports,
        all_rows_decay,
        decay_exact,
        eta_estimate,
        eta_exact,
        claimed_eta_consistent,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use num::One;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn diagnostic_examples() {
        let one = CoefficientField::constant(Rational::one());
        let r = wc_diagnostic(&one, &[q("1/2")], 1 << 10, 4, 1 << 20).unwrap();
        assert_eq!(r.entries[0].verdict, WcVerdict::NonWcEvidence);
        let w = r.entries[0].witness.as_ref().unwrap();
        assert!(tfcheck::verify_witness(&SetDescriptor::naturals(), w).valid);
        assert!(r.entries[0].orinoco.iter().all(|o| o.value > 0.0));

        let p2 = CoefficientField::indicator(SetDescriptor::powers(2).unwrap());
        let r = wc_diagnostic(&p2, &[q("1/2")], 1 << 16, 3, 1 << 24).unwrap();
        assert_eq!(r.overall, WcVerdict::ConsistentWithWc);

        let h = CoefficientField::harmonic();
        let r = wc_diagnostic(&h, &[q("1/10")], 1 << 10, 3, 1 << 20).unwrap();
        assert_eq!(r.overall, WcVerdict::TfExact);
        assert!(wc_diagnostic(&h, &[q("0")], 10, 3, 10).is_err());
    }

    #[test]
    fn kernel_examples() {
        let r = kernel_check(&KernelDescriptor::new(KernelForm::Default), 1000, 10).unwrap();
        assert!(r.all_rows_decay && r.flags.is_empty());
        assert_eq!(r.eta_exact, Some(q("1")));
        let r = kernel_check(&KernelDescriptor::new(KernelForm::Zero), 100, 5).unwrap();
        assert!(r.all_rows_decay);
        assert_eq!(r.eta_exact, Some(q("0")));
        assert_eq!(r.flags.len(), 1);
        let r = kernel_check(&KernelDescriptor::new(KernelForm::Constant { value: q("1") }), 100, 5).unwrap();
        assert!(!r.all_rows_decay);
        assert!(r.flags[0].starts_with("row decay fails"));
    }

    #[test]
    fn explicit_kernel_estimate() {
        let rows: Vec<Vec<Rational>> =
            (0..40u64).map(|j| (0..40u64).map(|k| if j + k == 0 { q("0") } else { rational::ratio_u64(j, j + k) }).collect()).collect();
        let mut m = KernelDescriptor::new(KernelForm::Explicit { rows });
        m.claimed_eta = Some(q("1/2"));
        let r = kernel_check(&m, 40, 39).unwrap();
        assert!(r.eta_estimate > 0.5 && r.eta_estimate < 1.0);
        assert_eq!(r.claimed_eta_consistent, Some(true));
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<KernelDescriptor>(&text).unwrap(), m);
    }
}
