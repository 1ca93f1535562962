//! Finite-length anchors from explicit codebooks against sphere packing.

use std::fmt::Write as _;

use classic_bounds::{e_sp, e_sp_max};
use code_oracle::{exact_pe_capped, monte_carlo_pe, random_cc_code, Codebook, Method, PeResult, DEFAULT_ENUMERATION_CAP};
use prob_core::Error;

use crate::spec::ChannelSpec;
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOptions {
    pub enumeration_cap: u128,
    /// Sample instead of enumerating.
    pub mc_trials: Option<u64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { enumeration_cap: DEFAULT_ENUMERATION_CAP, mc_trials: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Anchor {
    /// Codebook seed, absent for an explicit codebook.
    pub seed: Option<u64>,
    pub rate: f64,
    pub result: PeResult,
    /// Sphere-packing value at the anchor's rate.
    pub e_sp: f64,
    /// `|X||Y| log(n+1) / n`.
    pub slack: f64,
}

impl Anchor {
    pub fn within_bound(&self) -> bool {
        self.result.exponent <= self.e_sp + self.slack
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub anchors: Vec<Anchor>,
}

impl OracleReport {
    pub fn all_within_bound(&self) -> bool {
        self.anchors.iter().all(Anchor::within_bound)
    }

    pub fn render(&self) -> String {
        let mut s = String::from("seed,n_rate,pe,exponent,method,e_sp,slack,within\n");
        for a in &self.anchors {
            let method = match a.result.method {
                Method::Exact => "exact".to_string(),
                Method::MonteCarlo { trials, std_error, .. } => format!("mc({trials};se={std_error:.3e})"),
            };
            let _ = writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{method},{:.16e},{:.16e},{}",
                a.seed.map_or_else(|| "-".to_string(), |v| v.to_string()),
                a.rate,
                a.result.pe,
                a.result.exponent,
                a.e_sp,
                a.slack,
                a.within_bound()
            );
        }
        s
    }
}

fn oracle_err(e: Error) -> CliError {
    match e {
        Error::EnumerationCap { needed, cap } => CliError::Oracle(format!(
            "exact enumeration needs {needed} output sequences (cap {cap}); rerun with --mc-trials to sample"
        )),
        other => CliError::Oracle(other.to_string()),
    }
}

fn measure(cb: &Codebook, spec: &ChannelSpec, opts: &OracleOptions, seed: u64) -> Result<PeResult, CliError> {
    match opts.mc_trials {
        Some(t) => monte_carlo_pe(cb, &spec.channel, &spec.metric, t, seed),
        None => exact_pe_capped(cb, &spec.channel, &spec.metric, opts.enumeration_cap),
    }
    .map_err(oracle_err)
}

fn slack(spec: &ChannelSpec, n: usize) -> f64 {
    (spec.channel.inputs() * spec.channel.outputs()) as f64 * ((n + 1) as f64).ln() / n as f64
}

/// Random constant-composition codebooks at the specification's input law, one per seed.
pub fn oracle_cmd(spec: &ChannelSpec, n: usize, m: usize, seeds: &[u64], opts: &OracleOptions) -> Result<OracleReport, CliError> {
    let mut anchors = Vec::with_capacity(seeds.len());
    if seeds.is_empty() {
        return Ok(OracleReport { anchors });
    }
    let rate = (m as f64).ln() / n as f64;
    let sp = e_sp(rate, &spec.input, &spec.channel, &spec.optimizer).map_err(oracle_err)?.value;
    for &seed in seeds {
        let cb = random_cc_code(&spec.input, n, m, seed).map_err(oracle_err)?;
        anchors.push(Anchor { seed: Some(seed), rate, result: measure(&cb, spec, opts, seed)?, e_sp: sp, slack: slack(spec, n) });
    }
    Ok(OracleReport { anchors })
}

/// A single explicit codebook, compared with sphere packing maximized over
/// input laws since the words need not share a composition.
pub fn oracle_codebook(spec: &ChannelSpec, cb: &Codebook, opts: &OracleOptions) -> Result<OracleReport, CliError> {
    let rate = cb.rate();
    let sp = e_sp_max(rate, &spec.channel, &spec.optimizer).map_err(oracle_err)?;
    let result = measure(cb, spec, opts, spec.seed)?;
    Ok(OracleReport { anchors: vec![Anchor { seed: None, rate, result, e_sp: sp, slack: slack(spec, cb.n()) }] })
}
