//! Evaluation of the genie bound
//!
//! ```text
//! Ē(R) = min_{P_XZ : P_X = P, I(X;Z) ≤ R}  D(P_{Z|X} ‖ W_{Z|X} | P) + max_U η(P_XZU)
//! ```
//!
//! For binary inputs the inner maximum is solved exactly (see [`crate::eta`]);
//! otherwise it is the seeded ascent of `maximize_over_aux`, whose value can
//! only fall short of the true maximum. The reported value is therefore
//! `min(search, relaxation)`, where the relaxation replaces the auxiliary by
//! the symmetric coupling polytope and is an upper bound on the search value.

use numeric_kernels::{info_constrained_min_many, maximize_over_aux, AuxiliaryDecomposition, OptimizerConfig};
use prob_core::{is_balanced, BroadcastKernel, DecodingMetric, Error, JointDist, ProbVec, Result};

use crate::channel::ConditionalChannel;
use crate::coupling::PairCoupling;
use crate::eta::{binary_weights, eta, symmetric_max, BinaryPairs, SubsetMax};
use crate::primal::primal_inner;

#[derive(Clone, Debug, PartialEq)]
pub struct GenieDiagnostics {
    /// The tilt search stopped at its cap (after one doubling on balanced
    /// pairs).
    pub hit_cap: bool,
    /// Ascent restarts behind the inner maximum; 0 when it was solved exactly.
    pub restarts: usize,
    /// `|primal − dual|` of the inner problem at the returned auxiliary, when
    /// the shape is small enough for the direct primal.
    pub duality_gap: Option<f64>,
    pub side_divergence: f64,
    /// Whether `(W_{Y|X}, q)` is a balanced pair; the bound claim needs it.
    pub balanced: bool,
    /// The inner maximum over auxiliaries is exact rather than a search.
    pub exact_inner: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenieEvaluation {
    /// `min(search_value, relaxation_value)`, the reported bound.
    pub value: f64,
    /// Objective with the best auxiliary found.
    pub search_value: f64,
    /// Objective with the symmetric relaxation of the inner maximum.
    pub relaxation_value: f64,
    /// The minimizing `P_XZ` with dims `[|X|, |Z|]`.
    pub joint: JointDist,
    pub aux: AuxiliaryDecomposition,
    pub s_star: f64,
    pub diagnostics: GenieDiagnostics,
}

/// Shared state for repeated evaluations on one broadcast channel.
pub(crate) struct GenieProblem<'a> {
    pub(crate) w: ConditionalChannel,
    q: &'a DecodingMetric,
    cfg: OptimizerConfig,
    pairs: Option<BinaryPairs>,
    balanced: bool,
}

/// Inner maximum and where it is attained.
struct Inner {
    value: f64,
    aux: AuxiliaryDecomposition,
    s_star: f64,
    hit_cap: bool,
    restarts: usize,
}

/// The auxiliary realizing the binary optimum: `U` constant on active side
/// symbols, `U = X` elsewhere.
fn aux_from_active(active: &[bool]) -> AuxiliaryDecomposition {
    let nz = active.len();
    let mut kernel = vec![0.0; 2 * nz * 2];
    for x in 0..2 {
        for (z, &on) in active.iter().enumerate() {
            let u = if on { 0 } else { x };
            kernel[(x * nz + z) * 2 + u] = 1.0;
        }
    }
    AuxiliaryDecomposition::new(kernel, 2, nz, 2).expect("point-mass rows are valid")
}

impl<'a> GenieProblem<'a> {
    pub(crate) fn new(wyz: &BroadcastKernel, q: &'a DecodingMetric, cfg: &OptimizerConfig) -> Result<Self> {
        cfg.validate()?;
        let w = ConditionalChannel::from_broadcast(wyz)?;
        w.check_metric(q)?;
        let balanced = is_balanced(&wyz.y_given_x()?, q);
        let mut cfg = cfg.clone();
        let mut pairs = None;
        if w.inputs() == 2 {
            let mut p = BinaryPairs::new(&w, q, &cfg)?;
            if balanced && p.any_hit_cap() {
                cfg.s_max_cap *= 2.0;
                p = BinaryPairs::new(&w, q, &cfg)?;
            }
            pairs = Some(p);
        }
        Ok(Self { w, q, cfg, pairs, balanced })
    }

    fn check_joint(&self, p_xz: &[f64]) -> Result<()> {
        let n = self.w.inputs() * self.w.side();
        if p_xz.len() != n {
            return Err(Error::ShapeMismatch(format!("joint P_XZ needs {n} entries, got {}", p_xz.len())));
        }
        Ok(())
    }

    fn binary_inner(&self, pairs: &BinaryPairs, p_xz: &[f64]) -> Result<SubsetMax> {
        pairs.max_over_weights(&binary_weights(p_xz, self.w.side()))
    }

    /// Side divergence plus the inner maximum, `+∞` on any failure. Used as
    /// the outer search objective.
    pub(crate) fn objective(&self, p_xz: &[f64]) -> f64 {
        let side = self.w.side_divergence(p_xz);
        if !side.is_finite() {
            return f64::INFINITY;
        }
        let inner = match &self.pairs {
            Some(pairs) => self.binary_inner(pairs, p_xz).map(|m| m.value),
            None => self.ascent(p_xz).map(|m| m.value),
        };
        inner.map_or(f64::INFINITY, |v| side + v)
    }

    /// Side divergence plus the symmetric relaxation.
    pub(crate) fn relaxed_objective(&self, p_xz: &[f64]) -> f64 {
        let side = self.w.side_divergence(p_xz);
        if !side.is_finite() {
            return f64::INFINITY;
        }
        symmetric_max(p_xz, &self.w, self.q, &self.cfg).map_or(f64::INFINITY, |m| side + m.value)
    }

    fn ascent(&self, p_xz: &[f64]) -> Result<Inner> {
        let objective = |a: &AuxiliaryDecomposition| {
            PairCoupling::from_aux(p_xz, a)
                .and_then(|c| eta(&c, &self.w, self.q, &self.cfg))
                .map_or(f64::NEG_INFINITY, |e| e.value)
        };
        let best = maximize_over_aux(objective, self.w.inputs(), self.w.side(), &self.cfg)?;
        let e = eta(&PairCoupling::from_aux(p_xz, &best.argmax)?, &self.w, self.q, &self.cfg)?;
        Ok(Inner {
            value: best.value,
            aux: best.argmax,
            s_star: e.s_star,
            hit_cap: e.hit_cap,
            restarts: self.cfg.restarts,
        })
    }

    fn inner(&self, p_xz: &[f64]) -> Result<Inner> {
        match &self.pairs {
            Some(pairs) => {
                let m = self.binary_inner(pairs, p_xz)?;
                Ok(Inner {
                    value: m.value,
                    aux: aux_from_active(&m.active),
                    s_star: m.s_star,
                    hit_cap: m.hit_cap,
                    restarts: 0,
                })
            }
            None => self.ascent(p_xz),
        }
    }

    /// Full evaluation at one joint, optionally with the duality cross-check.
    pub(crate) fn evaluate(&self, p_xz: &[f64], relaxation: Option<f64>, cross_check: bool) -> Result<GenieEvaluation> {
        self.check_joint(p_xz)?;
        let (nx, nz) = (self.w.inputs(), self.w.side());
        let joint = JointDist::new(p_xz.to_vec(), vec![nx, nz])?;
        let side = self.w.side_divergence(p_xz);
        let mut diagnostics = GenieDiagnostics {
            hit_cap: false,
            restarts: 0,
            duality_gap: None,
            side_divergence: side,
            balanced: self.balanced,
            exact_inner: self.pairs.is_some(),
        };
        if !side.is_finite() {
            return Ok(GenieEvaluation {
                value: f64::INFINITY,
                search_value: f64::INFINITY,
                relaxation_value: f64::INFINITY,
                joint,
                aux: AuxiliaryDecomposition::constant(nx, nz),
                s_star: 0.0,
                diagnostics,
            });
        }
        let inner = self.inner(p_xz)?;
        let coupling = PairCoupling::from_aux(p_xz, &inner.aux)?;
        let primal = if cross_check { primal_inner(&coupling, &self.w, self.q)? } else { None };
        if let Some(primal) = primal {
            let dual = eta(&coupling, &self.w, self.q, &self.cfg)?.value;
            diagnostics.duality_gap = Some((primal - dual).abs());
        }
        diagnostics.hit_cap = inner.hit_cap;
        diagnostics.restarts = inner.restarts;
        let search_value = side + inner.value;
        let relaxation_value = match relaxation {
            Some(v) => v,
            None if self.pairs.is_some() => search_value,
            None => self.relaxed_objective(p_xz),
        };
        Ok(GenieEvaluation {
            value: search_value.min(relaxation_value),
            search_value,
            relaxation_value,
            joint,
            aux: inner.aux,
            s_star: inner.s_star,
            diagnostics,
        })
    }
}

fn joint_dims(p_xz: &JointDist) -> Result<(usize, usize)> {
    match p_xz.dims() {
        &[nx, nz] => Ok((nx, nz)),
        d => Err(Error::ShapeMismatch(format!("P_XZ must have two axes, got {}", d.len()))),
    }
}

/// The bound's objective at a fixed `P_XZ`: side divergence plus the
/// maximum over auxiliaries of `η`, with a primal cross-check on small
/// shapes.
pub fn genie_bound_fixed(
    p_xz: &JointDist,
    wyz: &BroadcastKernel,
    q: &DecodingMetric,
    cfg: &OptimizerConfig,
) -> Result<GenieEvaluation> {
    let (nx, nz) = joint_dims(p_xz)?;
    if nx != wyz.inputs() || nz != wyz.outputs_z() {
        return Err(Error::ShapeMismatch(format!(
            "P_XZ is {nx}x{nz}, channel has {} inputs and {} side outputs",
            wyz.inputs(),
            wyz.outputs_z()
        )));
    }
    GenieProblem::new(wyz, q, cfg)?.evaluate(p_xz.weights(), None, true)
}

/// The bound at one rate (nats).
pub fn genie_bound(
    r: f64,
    p: &ProbVec,
    wyz: &BroadcastKernel,
    q: &DecodingMetric,
    cfg: &OptimizerConfig,
) -> Result<GenieEvaluation> {
    Ok(curve(&[r], p, wyz, q, cfg, true)?.pop().expect("one rate in, one evaluation out"))
}

/// The bound at several rates, sharing the coarse search over `P_XZ`. The
/// primal cross-check is skipped here; [`genie_bound`] and
/// [`genie_bound_fixed`] run it.
pub fn genie_curve(
    rates: &[f64],
    p: &ProbVec,
    wyz: &BroadcastKernel,
    q: &DecodingMetric,
    cfg: &OptimizerConfig,
) -> Result<Vec<GenieEvaluation>> {
    curve(rates, p, wyz, q, cfg, false)
}

fn curve(
    rates: &[f64],
    p: &ProbVec,
    wyz: &BroadcastKernel,
    q: &DecodingMetric,
    cfg: &OptimizerConfig,
    cross_check: bool,
) -> Result<Vec<GenieEvaluation>> {
    if p.len() != wyz.inputs() {
        return Err(Error::AlphabetMismatch { left: p.len(), right: wyz.inputs() });
    }
    let problem = GenieProblem::new(wyz, q, cfg)?;
    let nz = problem.w.side();
    let search = info_constrained_min_many(|j| problem.objective(j), p, nz, rates, &problem.cfg)?;
    let relaxed = if problem.pairs.is_some() {
        None
    } else {
        Some(info_constrained_min_many(|j| problem.relaxed_objective(j), p, nz, rates, &problem.cfg)?)
    };
    search
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut ev = problem.evaluate(&s.joint, relaxed.as_ref().map(|r| r[k].value), cross_check)?;
            // The search may have settled on a point the full evaluation
            // rounds differently; keep the searched value.
            ev.search_value = ev.search_value.min(s.value);
            ev.value = ev.search_value.min(ev.relaxation_value);
            Ok(ev)
        })
        .collect()
}
