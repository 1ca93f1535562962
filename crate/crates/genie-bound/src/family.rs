//! Candidate side channels `W_{Z|XY}`.
//!
//! Every candidate turns the base channel into a broadcast channel
//! `W(y,z|x) = W(y|x) G(z|x,y)` and yields its own valid bound, so the bound
//! is reported as the minimum over a finite family.

use prob_core::{BroadcastKernel, ChannelKernel, Error, ProbVec, Result};

/// The law `Q_Z` mixed into the α-family.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum SideLaw {
    /// Uniform over the output alphabet.
    #[default]
    Uniform,
    /// The output law `PW` of the input composition.
    OutputLaw,
}

/// `Z` equal to `Y` with probability `α`, otherwise an independent draw
/// from `Q_Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaFamily {
    alpha: f64,
    base: ChannelKernel,
    q_z: ProbVec,
}

impl AlphaFamily {
    /// `Q_Z` uniform.
    pub fn new(alpha: f64, base: ChannelKernel) -> Result<Self> {
        let q_z = ProbVec::uniform(base.outputs());
        Self::with_side_law(alpha, base, q_z)
    }

    pub fn with_side_law(alpha: f64, base: ChannelKernel, q_z: ProbVec) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain { name: "alpha", value: alpha, domain: "[0, 1]" });
        }
        if q_z.len() != base.outputs() {
            return Err(Error::AlphabetMismatch {
                left: base.outputs(),
                right: q_z.len(),
            });
        }
        Ok(Self { alpha, base, q_z })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `G(z|x,y) = α 1{z=y} + (1−α) Q_Z(z)`, rows indexed `x·|Y| + y`.
    pub fn side_kernel(&self) -> Result<ChannelKernel> {
        let ny = self.base.outputs();
        let rows = (0..self.base.inputs() * ny)
            .map(|k| {
                let y = k % ny;
                (0..ny)
                    .map(|z| self.alpha * f64::from(u8::from(z == y)) + (1.0 - self.alpha) * self.q_z[z])
                    .collect()
            })
            .collect();
        ChannelKernel::new(rows)
    }
}

/// `W(y,z|x) = W(y|x)·[α 1{z=y} + (1−α) Q_Z(z)]`.
pub fn broadcast_alpha(fam: &AlphaFamily) -> Result<BroadcastKernel> {
    BroadcastKernel::from_parts(&fam.base, &fam.side_kernel()?)
}

/// One member of a search family.
#[derive(Clone, Debug, PartialEq)]
pub struct WzCandidate {
    pub label: String,
    /// `G(z|x,y)` with rows indexed `x·|Y| + y`.
    pub side: ChannelKernel,
}

impl WzCandidate {
    pub fn broadcast(&self, w: &ChannelKernel) -> Result<BroadcastKernel> {
        BroadcastKernel::from_parts(w, &self.side)
    }

    /// `Z = Y`.
    pub fn z_equals_y(w: &ChannelKernel) -> Result<Self> {
        Ok(Self {
            label: "z=y".into(),
            side: AlphaFamily::new(1.0, w.clone())?.side_kernel()?,
        })
    }
}

/// How the default family is built.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySettings {
    /// `|Z|` for the binary grid; the α-family always uses `Z = Y`.
    pub side_size: usize,
    /// Number of equally spaced α values in `[0, 1]`.
    pub alpha_points: usize,
    /// Points per coordinate of the binary grid (0 disables it).
    pub wz_grid_density: usize,
    pub side_law: SideLaw,
}

impl Default for FamilySettings {
    fn default() -> Self {
        Self {
            side_size: 2,
            alpha_points: 17,
            wz_grid_density: 9,
            side_law: SideLaw::Uniform,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WzFamily {
    candidates: Vec<WzCandidate>,
}

impl WzFamily {
    pub fn new(candidates: Vec<WzCandidate>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let nz = candidates[0].side.outputs();
        if let Some(c) = candidates.iter().find(|c| c.side.outputs() != nz) {
            return Err(Error::AlphabetMismatch { left: nz, right: c.side.outputs() });
        }
        Ok(Self { candidates })
    }

    /// The α-family on `alpha_points` values, plus, for binary `X`, `Y` and
    /// `Z`, the grid
    ///
    /// ```text
    /// G(0|0,0) = G(1|1,1) = a,   G(0|0,1) = b,   G(1|1,0) = c
    /// ```
    ///
    /// with `a, b, c` on `wz_grid_density` equally spaced points of `[0, 1]`.
    pub fn default_for(w: &ChannelKernel, p: &ProbVec, settings: &FamilySettings) -> Result<Self> {
        let q_z = match settings.side_law {
            SideLaw::Uniform => ProbVec::uniform(w.outputs()),
            SideLaw::OutputLaw => w.output_law(p)?,
        };
        let mut candidates = Vec::new();
        let n = settings.alpha_points;
        for k in 0..n {
            let alpha = if n == 1 { 1.0 } else { k as f64 / (n - 1) as f64 };
            let fam = AlphaFamily::with_side_law(alpha, w.clone(), q_z.clone())?;
            candidates.push(WzCandidate { label: format!("alpha={alpha}"), side: fam.side_kernel()? });
        }
        let m = settings.wz_grid_density;
        if w.inputs() == 2 && w.outputs() == 2 && settings.side_size == 2 && m >= 2 {
            let pts: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
            for &a in &pts {
                for &b in &pts {
                    for &c in &pts {
                        let side = ChannelKernel::new(vec![
                            vec![a, 1.0 - a],
                            vec![b, 1.0 - b],
                            vec![1.0 - c, c],
                            vec![1.0 - a, a],
                        ])?;
                        candidates.push(WzCandidate { label: format!("grid a={a} b={b} c={c}"), side });
                    }
                }
            }
        }
        Self::new(candidates)
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[WzCandidate] {
        &self.candidates
    }

    pub fn iter(&self) -> impl Iterator<Item = &WzCandidate> {
        self.candidates.iter()
    }
}
