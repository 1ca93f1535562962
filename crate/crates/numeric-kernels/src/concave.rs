//! One-dimensional searches.
//!
//! [`maximize_concave_1d`] expands a bracket by doubling and then runs a
//! golden-section search. Ties move the bracket left, so a suffix on which the
//! objective is `−∞` is handled without special cases. A value of `+∞`
//! anywhere ends the search immediately: the supremum is infinite.

use prob_core::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Max1d {
    pub arg: f64,
    pub value: f64,
    /// The maximizer sits at the upper end of the search interval.
    pub hit_cap: bool,
}

struct Tracker<F> {
    f: F,
    best: (f64, f64),
    evals: usize,
}

impl<F: FnMut(f64) -> f64> Tracker<F> {
    fn new(f: F) -> Self {
        Self {
            f,
            best: (f64::NAN, f64::NEG_INFINITY),
            evals: 0,
        }
    }

    fn eval(&mut self, x: f64) -> Result<f64> {
        let v = (self.f)(x);
        self.evals += 1;
        if v.is_nan() {
            return Err(Error::NotANumber { at: x });
        }
        // Strict improvement keeps the leftmost of equal values.
        if v > self.best.1 || self.best.0.is_nan() {
            self.best = (x, v);
        }
        Ok(v)
    }
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
fn golden<F: FnMut(f64) -> f64>(t: &mut Tracker<F>, mut a: f64, mut b: f64, tol: f64) -> Result<()> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = t.eval(c)?;
    let mut fd = t.eval(d)?;
    while b - a > tol {
        if fc == f64::INFINITY || fd == f64::INFINITY {
            return Ok(());
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = t.eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = t.eval(d)?;
        }
    }
    Ok(())
}

/// Maximizes a concave `f` over `[lo, cap]`.
///
/// The first trial step is `min(1, cap - lo)`; steps double until the value
/// drops, which brackets the maximizer for a concave function.
pub fn maximize_concave_1d<F: FnMut(f64) -> f64>(f: F, lo: f64, cap: f64, tol: f64) -> Result<Max1d> {
    if !(lo <= cap) || !lo.is_finite() || !cap.is_finite() {
        return Err(Error::Domain {
            name: "search interval upper end",
            value: cap,
            domain: "[lo, ∞) with finite ends",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let mut t = Tracker::new(f);
    let f_lo = t.eval(lo)?;
    let finish = |t: &Tracker<_>| {
        let (arg, value) = t.best;
        Ok(Max1d {
            arg,
            value,
            hit_cap: cap - arg <= tol,
        })
    };
    if f_lo == f64::INFINITY || cap == lo {
        return finish(&t);
    }

    let step0 = (cap - lo).min(1.0);
    let mut prev = (lo, f_lo);
    let mut cur_x = lo + step0;
    let mut cur = (cur_x, t.eval(cur_x)?);
    let (a, b) = loop {
        if cur.1 == f64::INFINITY {
            return finish(&t);
        }
        if cur.1 < prev.1 {
            // Maximizer lies in [lo_of_prev_bracket, cur].
            break ((prev.0 - (cur.0 - prev.0)).max(lo), cur.0);
        }
        if cur.0 >= cap {
            break (prev.0, cap);
        }
        let next_x = (lo + 2.0 * (cur_x - lo)).min(cap);
        let next = (next_x, t.eval(next_x)?);
        prev = cur;
        cur = next;
        cur_x = next_x;
    };
    golden(&mut t, a, b, tol)?;
    if b == cap {
        // A monotone objective attains its supremum at the cap itself.
        t.eval(cap)?;
    }
    finish(&t)
}

/// Maximizes a concave function over the whole real line starting from `x0`,
/// never leaving `[x0 - limit, x0 + limit]`.
pub fn maximize_concave_line<F: FnMut(f64) -> f64>(f: F, x0: f64, limit: f64, tol: f64) -> Result<Max1d> {
    let mut t = Tracker::new(f);
    let f0 = t.eval(x0)?;
    let probe = 0.5f64.min(limit);
    let fr = t.eval(x0 + probe)?;
    let (dir, mut f_outer) = if fr >= f0 {
        (1.0, fr)
    } else {
        let fl = t.eval(x0 - probe)?;
        if fl <= f0 {
            golden(&mut t, x0 - probe, x0 + probe, tol)?;
            let (arg, value) = t.best;
            return Ok(Max1d { arg, value, hit_cap: false });
        }
        (-1.0, fl)
    };
    let (mut inner, mut outer) = (0.0, probe);
    let mut f_inner = f0;
    let bracket = loop {
        if f_outer == f64::INFINITY {
            let (arg, value) = t.best;
            return Ok(Max1d { arg, value, hit_cap: false });
        }
        if f_outer < f_inner || outer >= limit {
            break ((inner - (outer - inner)).max(0.0), outer);
        }
        let next = (2.0 * outer).min(limit);
        let fv = t.eval(x0 + dir * next)?;
        inner = outer;
        f_inner = f_outer;
        outer = next;
        f_outer = fv;
    };
    let (l, r) = if dir > 0.0 {
        (x0 + bracket.0, x0 + bracket.1)
    } else {
        (x0 - bracket.1, x0 - bracket.0)
    };
    golden(&mut t, l, r, tol)?;
    let (arg, value) = t.best;
    Ok(Max1d {
        arg,
        value,
        hit_cap: (arg - x0).abs() >= limit - tol,
    })
}

/// Maximizes an arbitrary continuous function on `[lo, hi]` by a uniform scan
/// of `grid` points followed by golden refinement around the best cell.
pub fn maximize_scan_1d<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize, tol: f64) -> Result<Max1d> {
    let grid = grid.max(3);
    let mut t = Tracker::new(f);
    let h = (hi - lo) / (grid - 1) as f64;
    for i in 0..grid {
        t.eval(lo + h * i as f64)?;
    }
    let (best_x, _) = t.best;
    let a = (best_x - h).max(lo);
    let b = (best_x + h).min(hi);
    golden(&mut t, a, b, tol)?;
    let (arg, value) = t.best;
    Ok(Max1d {
        arg,
        value,
        hit_cap: hi - arg <= tol,
    })
}

/// Root of a monotone function on `[lo, hi]` by bisection; `f(lo)` and
/// `f(hi)` must have opposite signs (or one of them be zero).
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NotANumber { at: if f_lo.is_nan() { lo } else { hi } });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain {
            name: "bisection bracket",
            value: lo,
            domain: "an interval with a sign change",
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm.is_nan() {
            return Err(Error::NotANumber { at: mid });
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
