//! Achievability exponents built on couplings `V_{XX̃}` of the sent and a
//! competing codeword, with both marginals equal to `P`.
//!
//! For a fixed coupling the inner minimization over `V_{Y|XX̃}` is solved in
//! its dual. Write `a(x̃|x) = V(x, x̃)/P(x)` and `Δ_{xx̃}(y) = q(x̃,y) − q(x,y)`.
//! The expurgated inner value is the tilt
//! `Ω(V) = sup_{s≥0} −Σ V(x,x̃) log Σ_y W(y|x) e^{sΔ_{xx̃}(y)}`.
//! The random-coding inner value
//! `min D(V_{Y|X} ‖ W | P) + |I(X̃;Y,X) − R|₊` equals
//! `max_{ρ∈[0,1]} F_ρ + ρ(I(X;X̃) − R)` with
//!
//! ```text
//! F_ρ = sup_{λ≥0} Σ_x P(x) sup_f [ −(1−ρ) log Σ_y W e^{f}
//!                                  − ρ Σ_x̃ a(x̃|x) log Σ_y W e^{(λΔ − (1−ρ) f)/ρ} ]
//! ```
//!
//! which is concave in `ρ`, in `λ` and in `f`. At `ρ = 1` it reduces to the
//! tilt, and as `ρ → 0` the inner log-sum-exp becomes a maximum over the
//! support of `W(·|x)`.

use std::sync::atomic::{AtomicBool, Ordering};

use numeric_kernels::{log_sum_exp, maximize_concave_1d, maximize_concave_line, Max1d, OptimizerConfig, TiltProblem};
use prob_core::{is_balanced, metric_supports_channel, ChannelKernel, DecodingMetric, Error, ProbVec, Result};

use crate::couplings::{coupling_information, minimize_over_couplings, product_coupling};
use crate::curve::Exponent;
use crate::sphere::mutual_information_of;

/// Argument tolerance of the nested concave searches. Their value error is
/// quadratic in this, far below the reported precision.
const INNER_TOL: f64 = 1e-5;
/// Scan points over binary couplings for the random-coding family, whose
/// objective is two orders of magnitude costlier than the expurgated one.
const RANDOM_CODING_SCAN: usize = 33;
const F_LIMIT: f64 = 60.0;
const F_CYCLES: usize = 200;
const RHO_FLOOR: f64 = 1e-12;
const NEWTON_STEPS: usize = 60;
const NEWTON_MAX_STEP: f64 = 8.0;

pub(crate) fn check_problem(p: &ProbVec, w: &ChannelKernel, q: &DecodingMetric) -> Result<()> {
    if p.len() != w.inputs() {
        return Err(Error::AlphabetMismatch { left: p.len(), right: w.inputs() });
    }
    if q.inputs() != w.inputs() || q.outputs() != w.outputs() {
        return Err(Error::ShapeMismatch(format!(
            "metric is {}×{} but channel is {}×{}",
            q.inputs(),
            q.outputs(),
            w.inputs(),
            w.outputs()
        )));
    }
    if !metric_supports_channel(w, q) {
        return Err(Error::Config(
            "metric assigns −∞ to an output the channel can produce".into(),
        ));
    }
    Ok(())
}

fn check_rate(r: f64) -> Result<()> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Domain { name: "rate", value: r, domain: "[0, ∞)" });
    }
    Ok(())
}

/// The tilt problem whose supremum is `Ω(V)`.
pub fn pair_tilt(coupling: &[f64], w: &ChannelKernel, q: &DecodingMetric) -> TiltProblem {
    let k = w.inputs();
    let mut t = TiltProblem::new();
    for x in 0..k {
        for xt in 0..k {
            let gain: Vec<f64> = (0..w.outputs()).map(|y| q.gain(x, xt, y)).collect();
            // Diagonal pairs contribute exactly zero; a zero weight keeps
            // the term order aligned without adding rounding noise.
            let weight = if x == xt { 0.0 } else { coupling[x * k + xt] };
            t.push(weight, w.row(x), &gain);
        }
    }
    t
}

/// `Ω(V)`, the minimal `Σ V(x,x̃) D(M_{xx̃} ‖ W_x)` subject to the competing
/// codeword scoring at least as well on average.
pub fn omega(coupling: &[f64], w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<Max1d> {
    pair_tilt(coupling, w, q).sup(cfg.s_max_cap, cfg.tol_1d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroRate {
    pub value: f64,
    pub s_star: f64,
    pub hit_cap: bool,
    /// Every input pair is balanced, so a finite maximizer is guaranteed.
    pub balanced: bool,
}

/// `Ω(P ⊗ P)`. On a balanced instance a search that stops at the cap is
/// repeated once with the cap doubled.
pub fn zero_rate_exponent(p: &ProbVec, w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<ZeroRate> {
    check_problem(p, w, q)?;
    let balanced = is_balanced(w, q);
    let tilt = pair_tilt(&product_coupling(p), w, q);
    let mut m = tilt.sup(cfg.s_max_cap, cfg.tol_1d)?;
    if m.hit_cap && balanced {
        m = tilt.sup(2.0 * cfg.s_max_cap, cfg.tol_1d)?;
    }
    Ok(ZeroRate {
        value: m.value,
        s_star: m.arg,
        hit_cap: m.hit_cap,
        balanced,
    })
}

struct Row {
    weight: f64,
    log_w: Vec<f64>,
    /// `(a(x̃|x), Δ_{xx̃}(y))` on the support of `W(·|x)`.
    pairs: Vec<(f64, Vec<f64>)>,
}

/// The random-coding dual at a fixed coupling.
struct CouplingDual {
    rows: Vec<Row>,
    cap: f64,
    hit_cap: AtomicBool,
}

impl CouplingDual {
    fn new(p: &ProbVec, coupling: &[f64], w: &ChannelKernel, q: &DecodingMetric, cap: f64) -> Self {
        let k = p.len();
        let rows = (0..k)
            .filter(|&x| p[x] > 0.0)
            .map(|x| {
                let support: Vec<usize> = w.row(x).support().collect();
                let pairs = (0..k)
                    .filter(|&xt| coupling[x * k + xt] > 0.0)
                    .map(|xt| {
                        let delta = support.iter().map(|&y| q.gain(x, xt, y)).collect();
                        (coupling[x * k + xt] / p[x], delta)
                    })
                    .collect();
                Row {
                    weight: p[x],
                    log_w: support.iter().map(|&y| w.get(x, y).ln()).collect(),
                    pairs,
                }
            })
            .collect();
        Self { rows, cap, hit_cap: AtomicBool::new(false) }
    }

    fn g(row: &Row, f: &[f64], rho: f64, lam: f64) -> f64 {
        let scaled = |d: f64| if lam == 0.0 { 0.0 } else { lam * d };
        if rho >= 1.0 {
            return -row
                .pairs
                .iter()
                .map(|(a, d)| a * log_sum_exp(row.log_w.iter().zip(d).map(|(lw, &dy)| lw + scaled(dy))))
                .sum::<f64>();
        }
        let head = log_sum_exp(row.log_w.iter().zip(f).map(|(lw, fy)| lw + fy));
        let tail: f64 = row
            .pairs
            .iter()
            .map(|(a, d)| {
                let u = d.iter().zip(f).map(|(&dy, fy)| scaled(dy) - (1.0 - rho) * fy);
                let term = if rho < RHO_FLOOR {
                    u.fold(f64::NEG_INFINITY, f64::max)
                } else {
                    rho * log_sum_exp(row.log_w.iter().zip(u).map(|(lw, uy)| lw + uy / rho))
                };
                a * term
            })
            .sum();
        -(1.0 - rho) * head - tail
    }

    /// Value, slope and curvature of `G` along coordinate `c` of `f`, for
    /// `0 < ρ < 1`.
    fn g_along(row: &Row, f: &[f64], rho: f64, lam: f64, c: usize) -> (f64, f64, f64) {
        let scaled = |d: f64| if lam == 0.0 { 0.0 } else { lam * d };
        let head = log_sum_exp(row.log_w.iter().zip(f).map(|(lw, fy)| lw + fy));
        let pi = (row.log_w[c] + f[c] - head).exp();
        let mut value = -(1.0 - rho) * head;
        let (mut mass, mut spread) = (0.0, 0.0);
        for (a, d) in &row.pairs {
            let e = |y: usize| row.log_w[y] + (scaled(d[y]) - (1.0 - rho) * f[y]) / rho;
            let z = log_sum_exp((0..f.len()).map(e));
            if z == f64::NEG_INFINITY {
                return (f64::INFINITY, 0.0, 0.0);
            }
            let sigma = (e(c) - z).exp();
            value -= a * rho * z;
            mass += a * sigma;
            spread += a * sigma * (1.0 - sigma);
        }
        let slope = (1.0 - rho) * (mass - pi);
        let curvature = -(1.0 - rho) * pi * (1.0 - pi) - (1.0 - rho) * (1.0 - rho) / rho * spread;
        (value, slope, curvature)
    }

    /// Damped Newton ascent along one coordinate of a concave function.
    fn newton_coordinate(row: &Row, f: &mut [f64], rho: f64, lam: f64, c: usize) -> f64 {
        let (mut value, mut slope, mut curvature) = Self::g_along(row, f, rho, lam, c);
        for _ in 0..NEWTON_STEPS {
            if value == f64::INFINITY || !(curvature < 0.0) || slope.abs() <= 1e-14 {
                break;
            }
            let mut step = (-slope / curvature).clamp(-NEWTON_MAX_STEP, NEWTON_MAX_STEP);
            let origin = f[c];
            let accepted = loop {
                f[c] = origin + step;
                let trial = Self::g_along(row, f, rho, lam, c);
                if trial.0 >= value - 1e-15 * value.abs() {
                    break Some(trial);
                }
                step *= 0.5;
                if step.abs() < 1e-14 {
                    break None;
                }
            };
            match accepted {
                Some(t) => (value, slope, curvature) = t,
                None => {
                    f[c] = origin;
                    break;
                }
            }
            if step.abs() < 1e-11 {
                break;
            }
        }
        value
    }

    fn sup_f(row: &Row, rho: f64, lam: f64) -> Result<f64> {
        let m = row.log_w.len();
        let mut f = vec![0.0; m];
        let mut value = Self::g(row, &f, rho, lam);
        if m == 1 || rho >= 1.0 || value == f64::INFINITY {
            return Ok(value);
        }
        let smooth = rho >= RHO_FLOOR;
        let mut scratch = f.clone();
        for _ in 0..F_CYCLES {
            let before = value;
            for c in 1..m {
                if smooth {
                    value = Self::newton_coordinate(row, &mut f, rho, lam, c);
                } else {
                    scratch.copy_from_slice(&f);
                    let line = maximize_concave_line(
                        |t| {
                            scratch[c] = t;
                            Self::g(row, &scratch, rho, lam)
                        },
                        f[c],
                        F_LIMIT,
                        INNER_TOL,
                    )?;
                    if line.value >= value {
                        f[c] = line.arg;
                        value = line.value;
                    }
                }
                if value == f64::INFINITY {
                    return Ok(value);
                }
            }
            if m == 2 || value - before <= 1e-13 * value.abs().max(1.0) {
                break;
            }
        }
        Ok(value)
    }

    fn phi(&self, rho: f64, lam: f64) -> f64 {
        let mut total = 0.0;
        for row in &self.rows {
            match Self::sup_f(row, rho, lam) {
                Ok(v) => total += row.weight * v,
                Err(_) => return f64::NAN,
            }
        }
        total
    }

    fn f_rho(&self, rho: f64) -> f64 {
        match maximize_concave_1d(|lam| self.phi(rho, lam), 0.0, self.cap, INNER_TOL) {
            Ok(m) => {
                if m.hit_cap {
                    self.hit_cap.store(true, Ordering::Relaxed);
                }
                m.value
            }
            Err(_) => f64::NAN,
        }
    }

    /// `max_{ρ∈[0,1]} F_ρ + ρ · excess`.
    fn value(&self, excess: f64) -> Result<f64> {
        Ok(maximize_concave_1d(|rho| self.f_rho(rho) + rho * excess, 0.0, 1.0, INNER_TOL)?.value)
    }
}

/// `min D(V_{Y|X} ‖ W | P) + |I(X̃;Y,X) − R|₊` at a fixed coupling.
pub fn random_coding_inner(
    r: f64,
    p: &ProbVec,
    coupling: &[f64],
    w: &ChannelKernel,
    q: &DecodingMetric,
    cfg: &OptimizerConfig,
) -> Result<Exponent> {
    let dual = CouplingDual::new(p, coupling, w, q, cfg.s_max_cap);
    let value = dual.value(coupling_information(coupling, p.len()) - r)?;
    Ok(Exponent { value, hit_cap: dual.hit_cap.load(Ordering::Relaxed) })
}

fn coupling_exponent<F>(
    p: &ProbVec,
    budget: Option<f64>,
    inner: F,
    scan: usize,
    cfg: &OptimizerConfig,
) -> Result<Exponent>
where
    F: Fn(&[f64]) -> Result<Exponent> + Sync,
{
    let hit = AtomicBool::new(false);
    let objective = |v: &[f64]| match inner(v) {
        Ok(e) => {
            if e.hit_cap {
                hit.store(true, Ordering::Relaxed);
            }
            e.value
        }
        Err(_) => f64::NAN,
    };
    let cfg = OptimizerConfig { grid_points_per_dim: cfg.grid_points_per_dim.min(scan), ..cfg.clone() };
    let m = minimize_over_couplings(p, budget, &objective, &cfg)?;
    Ok(Exponent { value: m.value, hit_cap: hit.load(Ordering::Relaxed) })
}

/// Expurgated exponent: `min_{I(X;X̃) ≤ R} I(X;X̃) − R + Ω(V)`, reported as
/// 0 where the minimum is negative.
pub fn e_ex(r: f64, p: &ProbVec, w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<Exponent> {
    check_rate(r)?;
    check_problem(p, w, q)?;
    let k = p.len();
    let e = coupling_exponent(
        p,
        Some(r),
        |v| {
            let m = omega(v, w, q, cfg)?;
            Ok(Exponent { value: coupling_information(v, k) - r + m.value, hit_cap: m.hit_cap })
        },
        usize::MAX,
        cfg,
    )?;
    Ok(Exponent { value: e.value.max(0.0), ..e })
}

/// Random-coding exponent with the metric constraint and `|·|₊` penalty,
/// minimized over all couplings.
pub fn e_r(r: f64, p: &ProbVec, w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<Exponent> {
    check_rate(r)?;
    check_problem(p, w, q)?;
    if r >= mutual_information_of(p, w)? + (p.len() as f64).ln() {
        return Ok(Exponent::exact(0.0));
    }
    coupling_exponent(p, None, |v| random_coding_inner(r, p, v, w, q, cfg), RANDOM_CODING_SCAN, cfg)
}

/// As [`e_r`] but over couplings with `I(X;X̃) ≤ R`.
pub fn e_ck(r: f64, p: &ProbVec, w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<Exponent> {
    check_rate(r)?;
    check_problem(p, w, q)?;
    coupling_exponent(p, Some(r), |v| random_coding_inner(r, p, v, w, q, cfg), RANDOM_CODING_SCAN, cfg)
}
