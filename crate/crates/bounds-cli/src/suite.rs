//! Evaluation of a set of bounds on a specification's rate grid.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use classic_bounds::{bsc_crossover, e_ck, e_ex, e_lb_bsc, e_r, e_sp, straight_line_bound, BscLowerBoundParams, Exponent};
use genie_bound::{bsc_genie_bound, e_b_curve, e_orth_curve, e_sym_curve, genie_curve, WzFamily};
use prob_core::{is_balanced, metric_supports_channel, Result as ProbResult};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::spec::{ChannelSpec, RateUnit};
use crate::table::{Column, CurveTable, Flag, Provenance};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Sp,
    R,
    Ex,
    Ck,
    SlSp,
    B,
    BarSym,
    BarSearch,
    Orth,
    Lb,
}

impl Bound {
    pub const ALL: [Bound; 10] = [
        Bound::Sp,
        Bound::R,
        Bound::Ex,
        Bound::Ck,
        Bound::SlSp,
        Bound::B,
        Bound::BarSym,
        Bound::BarSearch,
        Bound::Orth,
        Bound::Lb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Bound::Sp => "E_sp",
            Bound::R => "E_r",
            Bound::Ex => "E_ex",
            Bound::Ck => "E_CK",
            Bound::SlSp => "E_sl_sp",
            Bound::B => "E_B",
            Bound::BarSym => "E_bar_sym",
            Bound::BarSearch => "E_bar_search",
            Bound::Orth => "E_orth",
            Bound::Lb => "E_LB",
        }
    }

    /// Bounds whose validity rests on the channel and metric being balanced.
    fn needs_balance(self) -> bool {
        matches!(self, Bound::B | Bound::BarSym | Bound::BarSearch)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Bound::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown bound {s:?}; known: {}", Bound::ALL.map(Bound::name).join(", ")))
    }
}

/// The crossover probability when the channel specification describes a BSC with ML decoding.
pub fn bsc_parameter(spec: &ChannelSpec) -> Option<f64> {
    bsc_crossover(&spec.channel).filter(|&p| p > 0.0 && p < 0.5 && spec.metric.is_ml())
}

struct Evaluated {
    values: Vec<f64>,
    warnings: Vec<String>,
    notes: Vec<String>,
}

impl Evaluated {
    fn plain(values: Vec<f64>) -> Self {
        Self { values, warnings: Vec::new(), notes: Vec::new() }
    }

    fn from_exponents(bound: Bound, rates: &[f64], e: Vec<Exponent>) -> Self {
        let warnings = rates
            .iter()
            .zip(&e)
            .filter(|(_, e)| e.hit_cap)
            .map(|(r, _)| format!("{bound}: tilt search hit the cap at R={r:.6} nats"))
            .collect();
        Self { values: e.iter().map(|e| e.value).collect(), warnings, notes: Vec::new() }
    }
}

fn per_rate<F>(rates: &[f64], f: F) -> ProbResult<Vec<Exponent>>
where
    F: Fn(f64) -> ProbResult<Exponent> + Sync,
{
    rates.par_iter().map(|&r| f(r)).collect()
}

/// Pointwise minimum over the side-channel family of a per-candidate curve.
fn family_min<F>(spec: &ChannelSpec, f: F) -> ProbResult<Vec<f64>>
where
    F: Fn(&prob_core::BroadcastKernel) -> ProbResult<Vec<f64>> + Sync,
{
    let family = WzFamily::default_for(&spec.channel, &spec.input, &spec.side)?;
    let curves: Vec<Vec<f64>> =
        family.candidates().par_iter().map(|c| f(&c.broadcast(&spec.channel)?)).collect::<ProbResult<_>>()?;
    Ok((0..spec.rates.len()).map(|k| curves.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min)).collect())
}

fn evaluate(bound: Bound, spec: &ChannelSpec) -> ProbResult<Evaluated> {
    let (w, q, p, cfg, rates) = (&spec.channel, &spec.metric, &spec.input, &spec.optimizer, spec.rates.as_slice());
    Ok(match bound {
        Bound::Sp => Evaluated::from_exponents(bound, rates, per_rate(rates, |r| e_sp(r, p, w, cfg))?),
        Bound::R => Evaluated::from_exponents(bound, rates, per_rate(rates, |r| e_r(r, p, w, q, cfg))?),
        Bound::Ex => Evaluated::from_exponents(bound, rates, per_rate(rates, |r| e_ex(r, p, w, q, cfg))?),
        Bound::Ck => Evaluated::from_exponents(bound, rates, per_rate(rates, |r| e_ck(r, p, w, q, cfg))?),
        Bound::SlSp => {
            let (curve, tangent) = straight_line_bound(w, q, rates, cfg)?;
            let mut e = Evaluated::plain(curve.values().collect());
            e.notes.push(format!(
                "{bound}: tangent at R*={:.6} nats, zero-rate value {:.6}, slope {:.6}",
                tangent.rate, tangent.zero_rate, tangent.slope
            ));
            e
        }
        Bound::B => Evaluated::plain(e_b_curve(rates, p, w, q, spec.side.side_size, cfg)?),
        Bound::BarSym => match bsc_parameter(spec) {
            Some(crossover) if p.as_slice() == [0.5, 0.5] && spec.side.side_size == 2 => {
                let family = WzFamily::default_for(w, p, &spec.side)?;
                let c = bsc_genie_bound(rates, crossover, &family, cfg)?;
                let mut e = Evaluated::plain(c.curve.values().collect());
                e.warnings.extend(c.curve.meta.hit_cap_at.iter().map(|r| format!("{bound}: tilt cap hit at R={r:.6} nats")));
                e
            }
            _ => Evaluated::plain(family_min(spec, |wyz| Ok(e_sym_curve(rates, p, wyz, q, cfg)?.iter().map(|v| v.value).collect()))?),
        },
        Bound::BarSearch => {
            Evaluated::plain(family_min(spec, |wyz| Ok(genie_curve(rates, p, wyz, q, cfg)?.iter().map(|v| v.value).collect()))?)
        }
        Bound::Orth => Evaluated::plain(e_orth_curve(rates, p, w, q, spec.side.side_size, cfg)?),
        Bound::Lb => {
            let Some(crossover) = bsc_parameter(spec) else {
                return Err(prob_core::Error::Config("E_LB is defined for a BSC with ML decoding".into()));
            };
            let params = BscLowerBoundParams::new(crossover)?;
            let values =
                rates.iter().map(|&r| if r >= params.capacity() { Ok(0.0) } else { e_lb_bsc(r, &params) }).collect::<ProbResult<_>>()?;
            Evaluated::plain(values)
        }
    })
}

/// Every bound applicable to the channel specification.
pub fn default_bounds(spec: &ChannelSpec) -> BTreeSet<Bound> {
    Bound::ALL.into_iter().filter(|&b| b != Bound::Lb || bsc_parameter(spec).is_some()).collect()
}

pub fn config_hash(spec: &ChannelSpec, which: &BTreeSet<Bound>) -> String {
    let mut h = Sha256::new();
    h.update(spec.canonical());
    h.update(which.iter().map(|b| b.name()).collect::<Vec<_>>().join(","));
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Computes the requested curves in nats.
pub fn run_suite(spec: &ChannelSpec, which: &BTreeSet<Bound>) -> Result<CurveTable, CliError> {
    let mut warnings = Vec::new();
    let mut void = false;
    if !metric_supports_channel(&spec.channel, &spec.metric) {
        warnings.push("metric does not support the channel: bound claims void".into());
        void = true;
    }
    if which.iter().any(|b| b.needs_balance()) && !is_balanced(&spec.channel, &spec.metric) {
        let names: Vec<&str> = which.iter().filter(|b| b.needs_balance()).map(|b| b.name()).collect();
        warnings.push(format!("unbalanced channel/metric pair: bound claim void for {}", names.join(", ")));
        void = true;
    }
    let mut notes = Vec::new();
    let mut columns = Vec::with_capacity(which.len());
    for &bound in which {
        let e = evaluate(bound, spec).map_err(|source| CliError::Bound { bound: bound.name().into(), source })?;
        warnings.extend(e.warnings);
        notes.extend(e.notes);
        columns.push(Column { name: bound.name().into(), values: e.values });
    }
    let mut table = CurveTable {
        unit: RateUnit::Nats,
        rates: spec.rates.clone(),
        columns,
        warnings,
        notes,
        flags: Vec::new(),
        void,
        provenance: Provenance {
            config_hash: config_hash(spec, which),
            seed: spec.seed,
            version: env!("CARGO_PKG_VERSION").into(),
        },
    };
    table.flags = ordering_flags(&table);
    Ok(table)
}

/// `a ≤ b + tol` at every rate where both columns exist.
fn below(table: &CurveTable, a: &str, b: &str, tol: f64) -> Option<Flag> {
    let (x, y) = (table.column(a)?, table.column(b)?);
    let (k, excess) = x
        .iter()
        .zip(y)
        .map(|(u, v)| if u.is_finite() || v.is_finite() { u - v } else { 0.0 })
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, e)| if e > acc.1 { (k, e) } else { acc });
    Some(Flag {
        name: format!("{a} <= {b} + {tol:e}"),
        ok: excess <= tol,
        detail: format!("largest excess {excess:.3e} at R={:.6}", table.rates[k]),
    })
}

const LOWER: [&str; 4] = ["E_r", "E_ex", "E_CK", "E_LB"];
const UPPER: [&str; 5] = ["E_sp", "E_sl_sp", "E_B", "E_bar_sym", "E_bar_search"];

/// Ordering relations that must hold between whichever curves are present.
pub fn ordering_flags(table: &CurveTable) -> Vec<Flag> {
    let mut flags = Vec::new();
    for lo in LOWER {
        for up in UPPER {
            flags.extend(below(table, lo, up, 1e-3));
        }
    }
    for lo in ["E_r", "E_ex"] {
        flags.extend(below(table, lo, "E_CK", 1e-3));
    }
    flags.extend(below(table, "E_CK", "E_orth", 1e-3));
    flags.extend(below(table, "E_orth", "E_bar_search", 1e-3));
    flags.extend(below(table, "E_bar_search", "E_bar_sym", 1e-6));
    for bar in ["E_bar_sym", "E_bar_search"] {
        flags.extend(below(table, bar, "E_sp", 1e-6));
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in Bound::ALL {
            assert_eq!(b.name().parse::<Bound>().unwrap(), b);
        }
        assert!("E_foo".parse::<Bound>().is_err());
    }

    #[test]
    fn flags_report_the_worst_rate() {
        let t = CurveTable {
            unit: RateUnit::Nats,
            rates: vec![0.1, 0.2],
            columns: vec![
                Column { name: "E_r".into(), values: vec![0.3, 0.25] },
                Column { name: "E_sp".into(), values: vec![0.35, 0.2] },
            ],
            warnings: vec![],
            notes: vec![],
            flags: vec![],
            void: false,
            provenance: Provenance { config_hash: String::new(), seed: 0, version: String::new() },
        };
        let f = ordering_flags(&t);
        assert_eq!(f.len(), 1);
        assert!(!f[0].ok);
        assert!(f[0].detail.contains("R=0.200000"));
    }
}
