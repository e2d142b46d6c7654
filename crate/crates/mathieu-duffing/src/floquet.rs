//! Floquet stability of the linear Mathieu equation over a parameter grid:
//! Ince-Strutt chart data and numeric location of the first instability
//! tongue's boundaries.
//!
//! Every grid cell carries the monodromy trace of
//! `x'' + (delta + eps*cos(omega_p t)) x = 0` over one period
//! `T = 2*pi/omega_p` and the standard Hill-equation verdict: `|tr| < 2`
//! stable, `|tr| > 2` unstable, equality the tongue boundary. The chart is
//! parameterized by `(delta = omega_n^2, eps)`. Cells are independent pure
//! computations; the sweep runs them in parallel and assembles a canonical
//! row-major grid (epsilon rows, delta columns) that is identical for any
//! execution order.

use rayon::prelude::*;

use crate::error::Error;
use crate::ode::{mathieu_monodromy, IntegrationMethod, Mat2, DEFAULT_STEPS_PER_PERIOD};

/// Default classification margin around `|tr| = 2`.
pub const DEFAULT_MARGIN: f64 = 1e-9;

/// Determinant deviation beyond which a verdict is refused.
pub const DET_QUALITY_LIMIT: f64 = 1e-6;

/// Default bisection tolerance on delta.
pub const DEFAULT_BISECT_TOL: f64 = 1e-10;

/// Stability verdict of one chart cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Boundary,
    /// Integration failed for this cell; the sweep records it and moves on.
    Failed,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Boundary => "boundary",
            Verdict::Failed => "failed",
        }
    }
}

/// One cell of the Ince-Strutt chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCell {
    /// delta = omega_n^2.
    pub delta: f64,
    pub epsilon: f64,
    /// Monodromy trace (NaN when integration failed).
    pub trace: f64,
    /// Monodromy determinant; 1 up to integration error by Liouville.
    pub det: f64,
    pub verdict: Verdict,
    pub error: Option<String>,
}

impl ChartCell {
    /// Quality flag: determinant within 1e-9 of 1.
    pub fn det_ok(&self) -> bool {
        (self.det - 1.0).abs() <= 1e-9
    }
}

/// Uniform axis specification `min..max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self, Error> {
        if count < 2 {
            return Err(Error::InvalidParameter(format!(
                "axis needs at least 2 points, got {count}"
            )));
        }
        if !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "axis range must be finite with min < max, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + i as f64 * step).collect()
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

/// Ince-Strutt chart over a `(delta, epsilon)` grid.
///
/// `cells` is row-major with epsilon as the row index: the cell at
/// `(i_eps, j_delta)` sits at `cells[i_eps * delta_axis.count + j_delta]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartGrid {
    pub delta_axis: AxisSpec,
    pub eps_axis: AxisSpec,
    pub omega_p: f64,
    pub cells: Vec<ChartCell>,
}

impl ChartGrid {
    pub fn cell(&self, i_eps: usize, j_delta: usize) -> &ChartCell {
        &self.cells[i_eps * self.delta_axis.count + j_delta]
    }

    pub fn row(&self, i_eps: usize) -> &[ChartCell] {
        let w = self.delta_axis.count;
        &self.cells[i_eps * w..(i_eps + 1) * w]
    }
}

/// Classify a monodromy matrix by its trace.
///
/// `|tr| < 2 - margin` is stable, `|tr| > 2 + margin` unstable, the rest
/// boundary. A determinant farther than [`DET_QUALITY_LIMIT`] from 1 is an
/// integration-quality error.
pub fn classify_point(m: &Mat2, margin: f64) -> Result<Verdict, Error> {
    let det = m.det();
    if (det - 1.0).abs() > DET_QUALITY_LIMIT {
        return Err(Error::IntegrationQuality {
            det,
            limit: DET_QUALITY_LIMIT,
        });
    }
    let tr = m.trace().abs();
    if tr < 2.0 - margin {
        Ok(Verdict::Stable)
    } else if tr > 2.0 + margin {
        Ok(Verdict::Unstable)
    } else {
        Ok(Verdict::Boundary)
    }
}

fn compute_cell(
    delta: f64,
    epsilon: f64,
    omega_p: f64,
    margin: f64,
    method: IntegrationMethod,
) -> ChartCell {
    match mathieu_monodromy(delta, epsilon, omega_p, method) {
        Ok(m) => match classify_point(&m, margin) {
            Ok(verdict) => ChartCell {
                delta,
                epsilon,
                trace: m.trace(),
                det: m.det(),
                verdict,
                error: None,
            },
            Err(e) => ChartCell {
                delta,
                epsilon,
                trace: m.trace(),
                det: m.det(),
                verdict: Verdict::Failed,
                error: Some(e.to_string()),
            },
        },
        Err(e) => ChartCell {
            delta,
            epsilon,
            trace: f64::NAN,
            det: f64::NAN,
            verdict: Verdict::Failed,
            error: Some(e.to_string()),
        },
    }
}

/// Sweep the chart grid. Per-cell failures are recorded in the cell and
/// never abort the sweep.
pub fn sweep_chart(
    delta_axis: AxisSpec,
    eps_axis: AxisSpec,
    omega_p: f64,
    margin: f64,
    method: IntegrationMethod,
) -> Result<ChartGrid, Error> {
    if !(omega_p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega_p must be positive, got {omega_p}"
        )));
    }
    let deltas = delta_axis.values();
    let epsilons = eps_axis.values();
    let pairs: Vec<(f64, f64)> = epsilons
        .iter()
        .flat_map(|&e| deltas.iter().map(move |&d| (d, e)))
        .collect();
    let cells: Vec<ChartCell> = pairs
        .par_iter()
        .map(|&(d, e)| compute_cell(d, e, omega_p, margin, method))
        .collect();
    Ok(ChartGrid {
        delta_axis,
        eps_axis,
        omega_p,
        cells,
    })
}

/// Default fixed-step method for reproducible chart sweeps.
pub fn default_sweep_method() -> IntegrationMethod {
    IntegrationMethod::FixedStep {
        steps_per_period: DEFAULT_STEPS_PER_PERIOD,
    }
}

/// Locate a first-tongue boundary: the delta where `|tr(M(delta))| = 2`,
/// resolved to `tol` by bisection.
///
/// The bracket normally straddles one simple boundary (`|tr| - 2` changes
/// sign). At the tongue tip (`eps = 0`) the trace only touches -2, so when
/// both endpoints sit on the same side the extremum of `|tr| - 2` over the
/// bracket is located instead; a tangency within 1e-9 of zero is accepted as
/// the (double) boundary, anything farther is a genuine bracketing error.
pub fn tongue_boundary_bisect(
    epsilon: f64,
    omega_p: f64,
    bracket: (f64, f64),
    tol: f64,
    method: IntegrationMethod,
) -> Result<f64, Error> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "bracket must have lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bisection tolerance must be positive, got {tol}"
        )));
    }
    let g = |delta: f64| -> Result<f64, Error> {
        let m = mathieu_monodromy(delta, epsilon, omega_p, method)?;
        Ok(m.trace().abs() - 2.0)
    };

    let g_lo = g(lo)?;
    let g_hi = g(hi)?;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() != g_hi.signum() {
        return bisect(&g, lo, g_lo, hi, tol);
    }

    // Same side: look for an interior extremum crossing or touching zero.
    let searching_max = g_lo < 0.0;
    let (d_ext, g_ext) = golden_section_extremum(&g, lo, hi, tol, searching_max)?;
    const TANGENCY: f64 = 1e-9;
    if g_ext.abs() <= TANGENCY {
        return Ok(d_ext);
    }
    if (searching_max && g_ext > 0.0) || (!searching_max && g_ext < 0.0) {
        // The bracket contains a whole crossing interval; resolve the
        // boundary nearer to `lo`.
        return bisect(&g, lo, g_lo, d_ext, tol);
    }
    Err(Error::NoSignChange { lo, hi })
}

fn bisect(
    g: &dyn Fn(f64) -> Result<f64, Error>,
    mut lo: f64,
    g_lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64, Error> {
    let mut sign_lo = g_lo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == sign_lo {
            lo = mid;
            sign_lo = g_mid.signum();
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_section_extremum(
    g: &dyn Fn(f64) -> Result<f64, Error>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    maximize: bool,
) -> Result<(f64, f64), Error> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1)?;
    let mut g2 = g(x2)?;
    while hi - lo > tol {
        if better(g1, g2) {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, g(mid)?))
}
