//! The channel specification file.
//!
//! ```toml
//! schema = 1
//! seed = 7                      # optional
//!
//! [channel]
//! W = [[0.9, 0.1],
//!      [0.1, 0.9]]
//! metric = "ML"                 # or a matrix, entries may be "-inf"
//! input = [0.5, 0.5]            # optional, uniform by default
//!
//! [side]                        # optional
//! size = 2
//! alpha_points = 17
//! wz_grid_density = 9
//! law = "uniform"               # or "output"
//!
//! [rates]
//! unit = "bits"                 # or "nats"
//! values = [0.1, 0.2, 0.3]      # or: count = 20 (interior grid below I(P;W))
//!
//! [optimizer]                   # optional overrides
//! restarts = 16
//! ```

use std::fmt;

use classic_bounds::{interior_grid, mutual_information_of};
use genie_bound::{FamilySettings, SideLaw};
use numeric_kernels::OptimizerConfig;
use prob_core::{bits_to_nats, ChannelKernel, DecodingMetric, ProbVec};
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateUnit {
    Bits,
    Nats,
}

impl RateUnit {
    /// Converts a value held in nats to this unit.
    pub fn from_nats(self, v: f64) -> f64 {
        match self {
            RateUnit::Bits => prob_core::nats_to_bits(v),
            RateUnit::Nats => v,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bits" => Some(RateUnit::Bits),
            "nats" => Some(RateUnit::Nats),
            _ => None,
        }
    }
}

impl fmt::Display for RateUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateUnit::Bits => "bits",
            RateUnit::Nats => "nats",
        })
    }
}

/// A validated specification. Rates are held in nats.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub channel: ChannelKernel,
    pub metric: DecodingMetric,
    pub input: ProbVec,
    pub side: FamilySettings,
    pub rates: Vec<f64>,
    /// Unit the rate grid was declared in.
    pub unit: RateUnit,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

impl ChannelSpec {
    /// A binary symmetric channel with ML decoding and uniform input.
    pub fn bsc(p: f64, rates: Vec<f64>, optimizer: OptimizerConfig) -> Result<Self, prob_core::Error> {
        let channel = ChannelKernel::bsc(p)?;
        Ok(Self {
            metric: DecodingMetric::ml(&channel),
            channel,
            input: ProbVec::uniform(2),
            side: FamilySettings::default(),
            rates,
            unit: RateUnit::Nats,
            seed: optimizer.rng_seed,
            optimizer,
        })
    }

    /// A stable textual rendering used for the configuration hash.
    pub fn canonical(&self) -> String {
        let mut s = format!("schema={SCHEMA_VERSION}\n");
        for row in self.channel.rows() {
            s += &format!("W {:?}\n", row.as_slice());
        }
        s += &format!("metric {:?} ml={}\n", self.metric.scores(), self.metric.is_ml());
        s += &format!("input {:?}\n", self.input.as_slice());
        s += &format!(
            "side {} {} {} {:?}\n",
            self.side.side_size, self.side.alpha_points, self.side.wz_grid_density, self.side.side_law
        );
        s += &format!("rates {:?} {}\n", self.rates, self.unit);
        s += &format!("optimizer {:?}\nseed {}\n", self.optimizer, self.seed);
        s
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    schema: Spanned<u32>,
    seed: Option<u64>,
    channel: RawChannel,
    side: Option<Spanned<RawSide>>,
    rates: Spanned<RawRates>,
    optimizer: Option<Spanned<OptimizerConfig>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    #[serde(rename = "W")]
    w: Spanned<Vec<Spanned<Vec<f64>>>>,
    metric: Option<Spanned<RawMetric>>,
    input: Option<Spanned<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawMetric {
    Named(String),
    Matrix(Vec<Vec<Entry>>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Number(f64),
    Token(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSide {
    size: Option<usize>,
    alpha_points: Option<usize>,
    wz_grid_density: Option<usize>,
    law: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    unit: Spanned<String>,
    values: Option<Vec<f64>>,
    count: Option<usize>,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn at(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err<T>(&self, span: std::ops::Range<usize>, message: impl Into<String>) -> Result<T, CliError> {
        Err(CliError::Spec { line: self.at(span.start), message: message.into() })
    }
}

/// Parses and validates a specification.
pub fn parse_spec(text: &str) -> Result<ChannelSpec, CliError> {
    let lines = Lines(text);
    let raw: RawSpec = toml::from_str(text).map_err(|e| CliError::Spec {
        line: e.span().map_or(1, |s| lines.at(s.start)),
        message: e.message().to_string(),
    })?;
    if *raw.schema.get_ref() != SCHEMA_VERSION {
        return lines.err(raw.schema.span(), format!("unsupported schema {}, expected {SCHEMA_VERSION}", raw.schema.get_ref()));
    }

    let w_span = raw.channel.w.span();
    let mut rows = Vec::new();
    for row in raw.channel.w.into_inner() {
        let span = row.span();
        match ProbVec::new(row.into_inner()) {
            Ok(p) => rows.push(p),
            Err(e) => return lines.err(span, format!("channel row: {e}")),
        }
    }
    let channel = match ChannelKernel::from_rows(rows) {
        Ok(c) => c,
        Err(e) => return lines.err(w_span, format!("channel: {e}")),
    };

    let metric = match raw.channel.metric {
        None => DecodingMetric::ml(&channel),
        Some(m) => {
            let span = m.span();
            match m.into_inner() {
                RawMetric::Named(name) if name.eq_ignore_ascii_case("ml") => DecodingMetric::ml(&channel),
                RawMetric::Named(name) => return lines.err(span, format!("unknown metric {name:?}, expected \"ML\" or a matrix")),
                RawMetric::Matrix(rows) => {
                    let mut parsed = Vec::with_capacity(rows.len());
                    for row in rows {
                        let mut out = Vec::with_capacity(row.len());
                        for entry in row {
                            out.push(match entry {
                                Entry::Number(v) => v,
                                Entry::Token(t) if t.trim() == "-inf" => f64::NEG_INFINITY,
                                Entry::Token(t) => return lines.err(span, format!("metric entry {t:?} is neither a number nor \"-inf\"")),
                            });
                        }
                        parsed.push(out);
                    }
                    let q = match DecodingMetric::new(parsed) {
                        Ok(q) => q,
                        Err(e) => return lines.err(span, format!("metric: {e}")),
                    };
                    if q.inputs() != channel.inputs() || q.outputs() != channel.outputs() {
                        return lines.err(
                            span,
                            format!(
                                "metric is {}x{} but the channel is {}x{}",
                                q.inputs(),
                                q.outputs(),
                                channel.inputs(),
                                channel.outputs()
                            ),
                        );
                    }
                    q
                }
            }
        }
    };

    let input = match raw.channel.input {
        None => ProbVec::uniform(channel.inputs()),
        Some(p) => {
            let span = p.span();
            let p = match ProbVec::new(p.into_inner()) {
                Ok(p) => p,
                Err(e) => return lines.err(span, format!("input law: {e}")),
            };
            if p.len() != channel.inputs() {
                return lines.err(span, format!("input law has {} entries for {} inputs", p.len(), channel.inputs()));
            }
            p
        }
    };

    let mut side = FamilySettings::default();
    if let Some(s) = raw.side {
        let span = s.span();
        let s = s.into_inner();
        side.side_size = s.size.unwrap_or(side.side_size);
        side.alpha_points = s.alpha_points.unwrap_or(side.alpha_points);
        side.wz_grid_density = s.wz_grid_density.unwrap_or(side.wz_grid_density);
        side.side_law = match s.law.as_deref() {
            None | Some("uniform") => SideLaw::Uniform,
            Some("output") => SideLaw::OutputLaw,
            Some(other) => return lines.err(span, format!("unknown side law {other:?}")),
        };
        if side.side_size == 0 || side.alpha_points == 0 {
            return lines.err(span, "side size and alpha_points must be positive");
        }
    }

    let rates_span = raw.rates.span();
    let r = raw.rates.into_inner();
    let Some(unit) = RateUnit::parse(r.unit.get_ref()) else {
        return lines.err(r.unit.span(), format!("rate unit {:?} must be \"bits\" or \"nats\"", r.unit.get_ref()));
    };
    let rates = match (r.values, r.count) {
        (Some(v), None) => {
            if v.is_empty() || v.iter().any(|&x| !(x > 0.0 && x.is_finite())) || v.windows(2).any(|w| w[1] <= w[0]) {
                return lines.err(rates_span, "rates must be positive, finite and strictly increasing");
            }
            match unit {
                RateUnit::Bits => v.into_iter().map(bits_to_nats).collect(),
                RateUnit::Nats => v,
            }
        }
        (None, Some(n)) if n > 0 => {
            let cap = mutual_information_of(&input, &channel).map_err(|e| CliError::Spec {
                line: lines.at(rates_span.start),
                message: format!("rate grid: {e}"),
            })?;
            if cap <= 0.0 {
                return lines.err(rates_span, "the channel carries no information at this input law");
            }
            interior_grid(cap, n)
        }
        _ => return lines.err(rates_span, "give exactly one of `values` or a positive `count`"),
    };

    let mut optimizer = OptimizerConfig::default();
    if let Some(o) = raw.optimizer {
        let span = o.span();
        optimizer = o.into_inner();
        if let Err(e) = optimizer.validate() {
            return lines.err(span, e.to_string());
        }
    }
    let seed = raw.seed.unwrap_or(optimizer.rng_seed);
    optimizer.rng_seed = seed;

    Ok(ChannelSpec { channel, metric, input, side, rates, unit, optimizer, seed })
}
