//! Sampled planar curves on the cross-sections, crossing and tangency
//! detection, and the specific traces the scenarios are built from.

pub mod crossings;
pub mod curve;
pub mod functional;
pub mod tangency;
pub mod traces;

pub use crossings::{find_crossings, find_extrema, ExtremumRecord, IntersectionRecord};
pub use curve::{Chart, CurvePoint, Grid, PlanarCurve};
pub use functional::{Functional, Graph, Line, Quadratic};
pub use tangency::{find_tangency_in_parameter, TangencyProbe, TangencyRecord};
pub use traces::{
    circle_image, ellipse_point, nose_angle, nose_certificate, spiral_eta, spiral_point,
    stable_point, stable_trace, unstable_trace, unstable_trace_spiral, CircleWhich, NoseAngle,
    SpiralBranch,
};
