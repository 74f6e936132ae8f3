//! Beurling densities and frame measures over a finite window profile, the
//! fundamental identity `M^± = d_π / D^∓` and the density corollaries.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{CoherentSystem, FrameAnalysis};
use crate::geometry::{count_in_translate, IndexSet, Window, WindowSequence};
use crate::group::FiniteGroup;

/// Relative tolerance for the density assertions.
pub const DENSITY_TOL: f64 = 1e-9;

/// Extreme values of `#(Λ ∩ xK)/#K` over all translates of one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowDensity {
    pub window_size: usize,
    pub min_count: usize,
    pub max_count: usize,
    pub inf: f64,
    pub sup: f64,
}

impl WindowDensity {
    pub fn inf_exact(&self) -> Ratio<usize> {
        Ratio::new(self.min_count, self.window_size)
    }

    pub fn sup_exact(&self) -> Ratio<usize> {
        Ratio::new(self.max_count, self.window_size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub windows: Vec<WindowDensity>,
    pub d_minus: f64,
    pub d_plus: f64,
}

impl DensityReport {
    pub fn last(&self) -> &WindowDensity {
        self.windows.last().expect("window sequences are nonempty")
    }
}

/// Extreme window averages of the dual pairings; translates missing `Λ`
/// are skipped, so a window with no admissible translate reports `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowMeasure {
    pub window_size: usize,
    pub admissible_translates: usize,
    pub inf: Option<f64>,
    pub sup: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub windows: Vec<WindowMeasure>,
    pub m_minus: f64,
    pub m_plus: f64,
}

pub fn beurling_density(group: &FiniteGroup, lambda: &IndexSet, windows: &WindowSequence) -> DensityReport {
    let per_window: Vec<WindowDensity> = windows
        .windows()
        .iter()
        .map(|k| window_density(group, lambda, k))
        .collect();
    let last = *per_window.last().expect("window sequences are nonempty");
    DensityReport {
        d_minus: last.inf,
        d_plus: last.sup,
        windows: per_window,
    }
}

fn window_density(group: &FiniteGroup, lambda: &IndexSet, k: &Window) -> WindowDensity {
    let (mut lo, mut hi) = (usize::MAX, 0);
    for x in group.elements() {
        let n = count_in_translate(group, lambda, x, k);
        lo = lo.min(n);
        hi = hi.max(n);
    }
    let size = k.len();
    WindowDensity {
        window_size: size,
        min_count: lo,
        max_count: hi,
        inf: lo as f64 / size as f64,
        sup: hi as f64 / size as f64,
    }
}

/// Pairings in `analysis` must be labelled by exactly the elements of `lambda`.
pub fn frame_measure(
    group: &FiniteGroup,
    analysis: &FrameAnalysis,
    lambda: &IndexSet,
    windows: &WindowSequence,
) -> Result<MeasureReport> {
    if analysis.labels != lambda.elements() {
        return Err(Error::InvalidSet("analysis labels differ from the index set".into()));
    }
    let mut pairing = vec![0.0; group.order()];
    for (&l, &p) in analysis.labels.iter().zip(&analysis.pairings) {
        pairing[l] = p;
    }
    let per_window: Vec<WindowMeasure> = windows
        .windows()
        .iter()
        .map(|k| {
            let mut admissible = 0;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for x in group.elements() {
                let hits: Vec<usize> = k
                    .elements()
                    .iter()
                    .map(|&z| group.mul(x, z))
                    .filter(|&y| lambda.contains(y))
                    .collect();
                if hits.is_empty() {
                    continue;
                }
                admissible += 1;
                let avg = hits.iter().map(|&y| pairing[y]).sum::<f64>() / hits.len() as f64;
                lo = lo.min(avg);
                hi = hi.max(avg);
            }
            WindowMeasure {
                window_size: k.len(),
                admissible_translates: admissible,
                inf: (admissible > 0).then_some(lo),
                sup: (admissible > 0).then_some(hi),
            }
        })
        .collect();
    let last = per_window.last().expect("window sequences are nonempty");
    let (Some(m_minus), Some(m_plus)) = (last.inf, last.sup) else {
        return Err(Error::InvalidSet("final window meets no translate of the index set".into()));
    };
    Ok(MeasureReport {
        m_minus,
        m_plus,
        windows: per_window,
    })
}

/// Residuals `r1 = |M⁻ − d_π/D⁺|`, `r2 = |M⁺ − d_π/D⁻|` at the final window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub d_pi: f64,
    pub density: DensityReport,
    pub measure: MeasureReport,
    pub r1: f64,
    pub r2: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.r1.max(self.r2)
    }
}

pub fn fundamental_identity_report(sys: &CoherentSystem, windows: &WindowSequence) -> Result<IdentityReport> {
    let analysis = sys.analyze()?;
    let group = sys.group();
    let density = beurling_density(group, sys.lambda(), windows);
    let measure = frame_measure(group, &analysis, sys.lambda(), windows)?;
    let d_pi = sys.d_pi();
    let r1 = (measure.m_minus - d_pi / density.d_plus).abs();
    let r2 = (measure.m_plus - d_pi / density.d_minus).abs();
    Ok(IdentityReport {
        d_pi,
        density,
        measure,
        r1,
        r2,
    })
}

/// Lower density bound, frame-bound sandwich and the tight and Riesz-basis
/// refinements, evaluated at the full-group window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTheoremReport {
    pub d_pi: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    pub lower: f64,
    pub upper: f64,
    pub g_norm_sq: f64,
    /// `[A, D⁻‖g‖²/d_π, D⁺‖g‖²/d_π, B]`, expected nondecreasing.
    pub sandwich: [f64; 4],
    pub lower_density_ok: bool,
    pub sandwich_ok: bool,
    pub tight: bool,
    pub tight_ok: bool,
    pub riesz_basis: bool,
    pub riesz_ok: bool,
}

impl DensityTheoremReport {
    pub fn passed(&self) -> bool {
        self.lower_density_ok && self.sandwich_ok && self.tight_ok && self.riesz_ok
    }
}

pub fn density_theorem_check(sys: &CoherentSystem) -> Result<DensityTheoremReport> {
    let bounds = sys.frame_bounds();
    if !bounds.is_frame {
        return Err(Error::NotAFrame {
            lower: bounds.lower,
            upper: bounds.upper,
        });
    }
    let group = sys.group();
    let density = beurling_density(group, sys.lambda(), &WindowSequence::full_group(group));
    let last = *density.last();
    let d_pi = sys.d_pi();
    let g2 = sys.g_norm_sq();
    let (a, b) = (bounds.lower, bounds.upper);
    let sandwich = [a, density.d_minus * g2 / d_pi, density.d_plus * g2 / d_pi, b];
    let slack = DENSITY_TOL * b.max(1.0);
    let sandwich_ok = sandwich.windows(2).all(|w| w[0] <= w[1] + slack);
    let lower_density_ok = density.d_minus >= d_pi * (1.0 - DENSITY_TOL);
    let tight = b - a <= DENSITY_TOL * b;
    let tight_ok = !tight || last.inf_exact() == last.sup_exact();
    let riesz_basis = sys.lambda().len() == sys.dim();
    let riesz_ok = !riesz_basis || (density.d_plus - d_pi).abs() <= DENSITY_TOL * d_pi;
    Ok(DensityTheoremReport {
        d_pi,
        d_minus: density.d_minus,
        d_plus: density.d_plus,
        lower: a,
        upper: b,
        g_norm_sq: g2,
        sandwich,
        lower_density_ok,
        sandwich_ok,
        tight,
        tight_ok,
        riesz_basis,
        riesz_ok,
    })
}
