use serde::{Deserialize, Serialize};

/// Point on the saddle cross-section in Moser coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub u: f64,
    pub v: f64,
}

impl SigmaPoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn zeta(&self) -> f64 {
        self.u * self.v
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.u, self.v]
    }
}

/// Point on one of the saddle-center disks, symplectic coordinates (x2, y2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub x2: f64,
    pub y2: f64,
}

impl DiskPoint {
    pub fn new(x2: f64, y2: f64) -> Self {
        Self { x2, y2 }
    }

    pub fn eta(&self) -> f64 {
        0.5 * (self.x2 * self.x2 + self.y2 * self.y2)
    }

    pub fn angle(&self) -> f64 {
        self.y2.atan2(self.x2)
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.x2, self.y2]
    }
}

pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn mat_vec(a: &Mat2, x: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

pub fn det2(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn trace2(a: &Mat2) -> f64 {
    a[0][0] + a[1][1]
}
