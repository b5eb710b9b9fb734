use serde::{Deserialize, Serialize};

use crate::error::{HetError, Result};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    D1,
    D2,
    Sigma,
}

/// Point of a parametrized curve with derivatives in the curve parameter and
/// an optional unwrapped phase (for spirals: the polar angle on the disk).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub p: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
    pub phase: Option<f64>,
    pub phase_rate: Option<f64>,
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        self.d1[0].hypot(self.d1[1])
    }
}

/// Initial grid in the curve parameter. Geometric grids need an interval
/// of one sign away from zero and are used for spirals, whose winding
/// accumulates logarithmically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grid {
    Linear,
    Geometric,
}

pub type Evaluator<'a> = Box<dyn Fn(f64) -> Result<CurvePoint> + Send + Sync + 'a>;

/// Adaptively sampled curve. The sample chain is built once, eagerly, so a
/// curve can be shared read-only across threads afterwards.
pub struct PlanarCurve<'a> {
    pub chart: Chart,
    pub lo: f64,
    pub hi: f64,
    pub grid: Grid,
    eval: Evaluator<'a>,
    samples: Vec<CurvePoint>,
}

const INITIAL: usize = 64;

impl<'a> PlanarCurve<'a> {
    pub fn build(
        chart: Chart,
        lo: f64,
        hi: f64,
        grid: Grid,
        eval: Evaluator<'a>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(HetError::InvalidInput(format!(
                "empty curve interval [{lo:e}, {hi:e}]"
            )));
        }
        if grid == Grid::Geometric && !(lo > 0.0 || hi < 0.0) {
            return Err(HetError::InvalidInput(
                "geometric grid needs an interval of one sign".into(),
            ));
        }
        let map = |s: f64| -> f64 {
            match grid {
                Grid::Linear => lo + (hi - lo) * s,
                Grid::Geometric => {
                    let sg = lo.signum();
                    let (a, b) = (lo.abs(), hi.abs());
                    sg * a * (b / a).powf(s)
                }
            }
        };
        let at = |s: f64| -> Result<CurvePoint> {
            let t = if s <= 0.0 {
                lo
            } else if s >= 1.0 {
                hi
            } else {
                map(s)
            };
            eval(t)
        };
        let mut out: Vec<CurvePoint> = Vec::new();
        let first = at(0.0)?;
        out.push(first);
        let mut prev = (0.0, first);
        for i in 1..=INITIAL {
            let s = i as f64 / INITIAL as f64;
            let next = (s, at(s)?);
            let mut stack = vec![(prev, next)];
            while let Some((a, b)) = stack.pop() {
                if needs_split(&a.1, &b.1, tol.max_turn) && b.0 - a.0 > 1e-13 {
                    let sm = 0.5 * (a.0 + b.0);
                    let mid = (sm, at(sm)?);
                    stack.push((mid, b));
                    stack.push((a, mid));
                } else {
                    out.push(b.1);
                    if out.len() > tol.max_samples {
                        return Err(HetError::NoConvergence(format!(
                            "curve needs more than {} samples",
                            tol.max_samples
                        )));
                    }
                }
            }
            prev = next;
        }
        Ok(Self {
            chart,
            lo,
            hi,
            grid,
            eval,
            samples: out,
        })
    }

    pub fn eval(&self, t: f64) -> Result<CurvePoint> {
        (self.eval)(t)
    }

    pub fn samples(&self) -> &[CurvePoint] {
        &self.samples
    }

    /// Finite-difference step appropriate for parameter t.
    pub fn fd_step(&self, t: f64, rel: f64) -> f64 {
        match self.grid {
            Grid::Linear => rel * (self.hi - self.lo),
            Grid::Geometric => rel * t.abs(),
        }
    }

    /// Rows (t, x, y, dx, dy) for CSV dumps.
    pub fn dump_rows(&self) -> Vec<[f64; 5]> {
        self.samples
            .iter()
            .map(|s| [s.t, s.p[0], s.p[1], s.d1[0], s.d1[1]])
            .collect()
    }

    /// Total variation of the unwrapped phase over the sample chain, when
    /// tracked. Equals the end-to-end difference for a monotone phase.
    pub fn phase_span(&self) -> Option<f64> {
        let mut total = 0.0;
        for w in self.samples.windows(2) {
            total += (w[1].phase? - w[0].phase?).abs();
        }
        Some(total)
    }
}

fn turn(a: [f64; 2], b: [f64; 2]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.atan2(dot).abs()
}

fn needs_split(a: &CurvePoint, b: &CurvePoint, max_turn: f64) -> bool {
    if turn(a.d1, b.d1) > max_turn {
        return true;
    }
    match (a.phase, b.phase) {
        (Some(x), Some(y)) => (y - x).abs() > max_turn,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle<'a>() -> Evaluator<'a> {
        Box::new(|t: f64| {
            Ok(CurvePoint {
                t,
                p: [t.cos(), t.sin()],
                d1: [-t.sin(), t.cos()],
                d2: [-t.cos(), -t.sin()],
                phase: Some(t),
                phase_rate: Some(1.0),
            })
        })
    }

    #[test]
    fn turn_bound_respected() {
        let tol = Tolerances::default();
        let c = PlanarCurve::build(Chart::D1, 0.0, 40.0, Grid::Linear, circle(), &tol).unwrap();
        for w in c.samples().windows(2) {
            assert!(w[1].t > w[0].t);
            assert!((w[1].t - w[0].t) <= tol.max_turn + 1e-12);
        }
        assert!((c.phase_span().unwrap() - 40.0).abs() < 1e-12);
        assert_eq!(c.samples().first().unwrap().t, 0.0);
        assert_eq!(c.samples().last().unwrap().t, 40.0);
    }

    #[test]
    fn geometric_needs_one_sign() {
        let tol = Tolerances::default();
        assert!(PlanarCurve::build(Chart::D1, -1.0, 1.0, Grid::Geometric, circle(), &tol).is_err());
        let c = PlanarCurve::build(Chart::D1, 1e-3, 1.0, Grid::Geometric, circle(), &tol).unwrap();
        assert!(c.samples().len() > INITIAL);
    }

    #[test]
    fn sample_cap() {
        let tol = Tolerances {
            max_samples: 10,
            ..Tolerances::default()
        };
        assert!(PlanarCurve::build(Chart::D1, 0.0, 40.0, Grid::Linear, circle(), &tol).is_err());
    }
}
