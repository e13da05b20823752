use serde::{Deserialize, Serialize};

use super::interp;
use super::{Profile, VelocityGrid};
use crate::error::{Error, Result};

/// One Gaussian `weight · exp(-((v - center)/width)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub center: f64,
    pub width: f64,
}

impl Component {
    #[inline]
    fn derivs(&self, v: f64) -> [f64; 3] {
        let x = (v - self.center) / self.width;
        let e = self.weight * (-x * x).exp();
        let w = self.width;
        [e, -2.0 * x * e / w, (4.0 * x * x - 2.0) * e / (w * w)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    Maxwellian { center: f64, width: f64 },
    BiMaxwellian { separation: f64, width: f64 },
    WeightedSum { components: Vec<Component> },
    Tabulated { v: Vec<f64>, f0: Vec<f64> },
}

impl Family {
    fn components(&self) -> Option<Vec<Component>> {
        match self {
            Family::Maxwellian { center, width } => {
                Some(vec![Component { weight: 1.0, center: *center, width: *width }])
            }
            Family::BiMaxwellian { separation, width } => Some(vec![
                Component { weight: 1.0, center: -separation, width: *width },
                Component { weight: 1.0, center: *separation, width: *width },
            ]),
            Family::WeightedSum { components } => Some(components.clone()),
            Family::Tabulated { .. } => None,
        }
    }

    fn default_v_max(&self) -> f64 {
        match self.components() {
            Some(cs) => {
                let extent = cs.iter().fold(0.0f64, |m, c| m.max(c.center.abs()));
                let width = cs.iter().fold(0.0f64, |m, c| m.max(c.width));
                extent + 8.0 * width
            }
            None => {
                let Family::Tabulated { v, .. } = self else { unreachable!() };
                1.25 * v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Analytic(Vec<Component>),
    /// Resampled `f0`, `f0'`, `f0''` on the grid.
    Sampled { f0: Vec<f64>, d2f: Vec<f64>, lo: f64, hi: f64 },
}

/// An unnormalized equilibrium with its derivatives cached on a grid.
#[derive(Debug, Clone)]
pub struct EquilibriumProfile {
    family: Family,
    grid: VelocityGrid,
    repr: Repr,
    df: Vec<f64>,
}

impl EquilibriumProfile {
    pub fn maxwellian(center: f64, width: f64) -> Result<Self> {
        Self::from_family(Family::Maxwellian { center, width })
    }

    pub fn bi_maxwellian(separation: f64, width: f64) -> Result<Self> {
        Self::from_family(Family::BiMaxwellian { separation, width })
    }

    pub fn weighted_sum(components: Vec<Component>) -> Result<Self> {
        Self::from_family(Family::WeightedSum { components })
    }

    pub fn tabulated(v: Vec<f64>, f0: Vec<f64>) -> Result<Self> {
        Self::from_family(Family::Tabulated { v, f0 })
    }

    /// Builds the profile on its default grid.
    pub fn from_family(family: Family) -> Result<Self> {
        let grid = VelocityGrid::with_default_nodes(family.default_v_max())?;
        Self::on_grid(family, grid)
    }

    pub fn on_grid(family: Family, grid: VelocityGrid) -> Result<Self> {
        let repr = match family.components() {
            Some(cs) => {
                if cs.is_empty() {
                    return Err(Error::Parameter("weighted sum needs at least one component".into()));
                }
                for c in &cs {
                    if !(c.width > 0.0 && c.width.is_finite()) {
                        return Err(Error::Parameter(format!("width must be positive, got {}", c.width)));
                    }
                    if !(c.weight >= 0.0 && c.center.is_finite()) {
                        return Err(Error::Parameter(format!(
                            "component weights must be nonnegative, got {}",
                            c.weight
                        )));
                    }
                }
                Repr::Analytic(cs)
            }
            None => {
                let Family::Tabulated { v, f0 } = &family else { unreachable!() };
                tabulated_repr(v, f0, &grid)?
            }
        };
        let mut p = Self { family, grid, repr, df: Vec::new() };
        p.df = match &p.repr {
            Repr::Analytic(_) => grid.sample(|v| p.df(v)),
            Repr::Sampled { f0, .. } => interp::centered_first(&grid, f0),
        };
        p.validate()?;
        Ok(p)
    }

    /// Same family on another grid.
    pub fn with_grid(&self, grid: VelocityGrid) -> Result<Self> {
        Self::on_grid(self.family.clone(), grid)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Multiplies `f0` by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Parameter(format!("scale must be positive, got {alpha}")));
        }
        let family = match &self.family {
            Family::Tabulated { v, f0 } => {
                Family::Tabulated { v: v.clone(), f0: f0.iter().map(|x| alpha * x).collect() }
            }
            _ => {
                let components = self
                    .family
                    .components()
                    .unwrap()
                    .into_iter()
                    .map(|c| Component { weight: alpha * c.weight, ..c })
                    .collect();
                Family::WeightedSum { components }
            }
        };
        Self::on_grid(family, self.grid)
    }

    /// Exact for analytic families.
    pub fn is_analytic(&self) -> bool {
        matches!(self.repr, Repr::Analytic(_))
    }

    fn validate(&self) -> Result<()> {
        let f = self.grid.sample(|v| self.f0(v));
        let peak = f.iter().cloned().fold(0.0, f64::max);
        if !(peak > 0.0) {
            // the zero profile is allowed, it is trivially stable
            return Ok(());
        }
        if let Some(x) = f.iter().find(|x| **x < -1e-12 * peak) {
            return Err(Error::Parameter(format!("f0 must be nonnegative, found {x}")));
        }
        if self.is_analytic() {
            let tail = f[0].max(f[f.len() - 1]);
            if tail > 1e-12 * peak {
                return Err(Error::Parameter(format!(
                    "grid cutoff too small: tail {tail:e} exceeds 1e-12 of peak"
                )));
            }
        }
        Ok(())
    }

    /// Sampled `f0` on the grid.
    pub fn f0_samples(&self) -> Vec<f64> {
        self.grid.sample(|v| self.f0(v))
    }
}

fn tabulated_repr(v: &[f64], f0: &[f64], grid: &VelocityGrid) -> Result<Repr> {
    if v.len() != f0.len() || v.len() < 4 {
        return Err(Error::Parameter(format!(
            "tabulated profile needs matching columns with at least 4 rows, got {} and {}",
            v.len(),
            f0.len()
        )));
    }
    if v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("tabulated velocities must be strictly increasing".into()));
    }
    if let Some(x) = f0.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Parameter(format!("tabulated f0 must be finite and nonnegative, found {x}")));
    }
    let samples = grid.sample(|x| interp::cubic_nonuniform(v, f0, x).max(0.0));
    let d2f = interp::centered_second(grid, &samples);
    Ok(Repr::Sampled { f0: samples, d2f, lo: v[0], hi: v[v.len() - 1] })
}

impl Profile for EquilibriumProfile {
    fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    fn f0(&self, v: f64) -> f64 {
        match &self.repr {
            Repr::Analytic(cs) => cs.iter().map(|c| c.derivs(v)[0]).sum(),
            Repr::Sampled { f0, .. } => interp::cubic(&self.grid, f0, v),
        }
    }

    fn df(&self, v: f64) -> f64 {
        match &self.repr {
            Repr::Analytic(cs) => cs.iter().map(|c| c.derivs(v)[1]).sum(),
            Repr::Sampled { .. } => interp::cubic(&self.grid, &self.df, v),
        }
    }

    fn d2f(&self, v: f64) -> f64 {
        match &self.repr {
            Repr::Analytic(cs) => cs.iter().map(|c| c.derivs(v)[2]).sum(),
            Repr::Sampled { d2f, .. } => interp::cubic(&self.grid, d2f, v),
        }
    }

    fn df_samples(&self) -> &[f64] {
        &self.df
    }

    fn search_interval(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Analytic(_) => (-self.grid.v_max(), self.grid.v_max()),
            Repr::Sampled { lo, hi, .. } => {
                let pad = 2.0 * self.grid.spacing();
                ((lo + pad).max(-self.grid.v_max()), (hi - pad).min(self.grid.v_max()))
            }
        }
    }
}

/// Replaces `v` by `v + U`: every feature moves to `v - U`.
pub fn shift_frame(profile: &EquilibriumProfile, shift: f64) -> Result<EquilibriumProfile> {
    let v_max = profile.grid.v_max();
    if !(shift.abs() < 0.5 * v_max) {
        return Err(Error::Precondition(format!(
            "frame shift {shift} must be below v_max/2 = {}",
            0.5 * v_max
        )));
    }
    let family = match &profile.family {
        Family::Maxwellian { center, width } => {
            Family::Maxwellian { center: center - shift, width: *width }
        }
        Family::Tabulated { v, f0 } => {
            Family::Tabulated { v: v.iter().map(|x| x - shift).collect(), f0: f0.clone() }
        }
        other => {
            let components = other
                .components()
                .unwrap()
                .into_iter()
                .map(|c| Component { center: c.center - shift, ..c })
                .collect();
            Family::WeightedSum { components }
        }
    };
    // keep the original grid so samples are directly comparable
    EquilibriumProfile::on_grid(family, profile.grid)
}
