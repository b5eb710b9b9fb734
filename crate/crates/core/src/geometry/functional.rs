use crate::error::Result;
use crate::geometry::curve::CurvePoint;
use crate::points::Mat2;
use crate::saddle::GraphJet;

/// Scalar function on a chart whose zero set is the target curve.
pub trait Functional: Sync {
    /// Value, gradient and Hessian at p.
    fn jet(&self, p: [f64; 2]) -> Result<(f64, [f64; 2], Mat2)>;

    /// F, dF/dt, d2F/dt2 along a curve.
    fn along(&self, c: &CurvePoint) -> Result<(f64, f64, f64)> {
        let (f, g, h) = self.jet(c.p)?;
        let d1 = g[0] * c.d1[0] + g[1] * c.d1[1];
        let quad = c.d1[0] * (h[0][0] * c.d1[0] + h[0][1] * c.d1[1])
            + c.d1[1] * (h[1][0] * c.d1[0] + h[1][1] * c.d1[1]);
        let d2 = quad + g[0] * c.d2[0] + g[1] * c.d2[1];
        Ok((f, d1, d2))
    }
}

/// Straight crossing targets: u = const, v = const, or the diagonal u = v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Line {
    UConst(f64),
    VConst(f64),
    Diagonal,
}

impl Functional for Line {
    fn jet(&self, p: [f64; 2]) -> Result<(f64, [f64; 2], Mat2)> {
        let z = [[0.0; 2]; 2];
        Ok(match *self {
            Line::UConst(c) => (p[0] - c, [1.0, 0.0], z),
            Line::VConst(c) => (p[1] - c, [0.0, 1.0], z),
            Line::Diagonal => (p[0] - p[1], [1.0, -1.0], z),
        })
    }
}

/// F(p) = p^T Q p / 2 + b.p + k with Q symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub q: Mat2,
    pub b: [f64; 2],
    pub k: f64,
}

impl Functional for Quadratic {
    fn jet(&self, p: [f64; 2]) -> Result<(f64, [f64; 2], Mat2)> {
        let qp = [
            self.q[0][0] * p[0] + self.q[0][1] * p[1],
            self.q[1][0] * p[0] + self.q[1][1] * p[1],
        ];
        let f = 0.5 * (p[0] * qp[0] + p[1] * qp[1]) + self.b[0] * p[0] + self.b[1] * p[1] + self.k;
        Ok((f, [qp[0] + self.b[0], qp[1] + self.b[1]], self.q))
    }
}

/// F(u, v) = u - g(v) for a graph with known derivatives.
pub struct Graph<G: Fn(f64) -> Result<GraphJet> + Sync> {
    pub g: G,
}

impl<G: Fn(f64) -> Result<GraphJet> + Sync> Functional for Graph<G> {
    fn jet(&self, p: [f64; 2]) -> Result<(f64, [f64; 2], Mat2)> {
        let (g, g1, g2) = (self.g)(p[1])?;
        Ok((p[0] - g, [1.0, -g1], [[0.0, 0.0], [0.0, -g2]]))
    }
}
