//! Elliptic contours and their trapezoidal node grids.

use crate::prelude::*;
use core::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ContourError {
    #[error("TooFewNodes: need at least 4 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("contour radii must be positive and finite")]
    BadRadius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContourKind {
    Circle,
    Ellipse,
}

/// `φ(t) = center + e^{iθ}(r_x cos t + i r_y sin t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contour {
    pub kind: ContourKind,
    pub center: C64,
    pub rx: f64,
    pub ry: f64,
    pub rotation: f64,
}

impl Contour {
    pub fn circle(center: C64, radius: f64) -> Result<Self, ContourError> {
        Self::check(radius, radius)?;
        Ok(Contour {
            kind: ContourKind::Circle,
            center,
            rx: radius,
            ry: radius,
            rotation: 0.0,
        })
    }

    pub fn ellipse(center: C64, rx: f64, ry: f64, rotation: f64) -> Result<Self, ContourError> {
        Self::check(rx, ry)?;
        Ok(Contour {
            kind: ContourKind::Ellipse,
            center,
            rx,
            ry,
            rotation,
        })
    }

    fn check(rx: f64, ry: f64) -> Result<(), ContourError> {
        if rx > 0.0 && ry > 0.0 && rx.is_finite() && ry.is_finite() {
            Ok(())
        } else {
            Err(ContourError::BadRadius)
        }
    }

    fn phase(&self) -> C64 {
        C64::from_polar(1.0, self.rotation)
    }

    pub fn phi(&self, t: f64) -> C64 {
        self.center + self.phase() * C64::new(self.rx * t.cos(), self.ry * t.sin())
    }

    pub fn dphi(&self, t: f64) -> C64 {
        self.phase() * C64::new(-self.rx * t.sin(), self.ry * t.cos())
    }

    /// Length scale used to normalize moments: the larger radius.
    pub fn scale(&self) -> f64 {
        self.rx.max(self.ry)
    }

    /// Strict interior test; points on the boundary are outside.
    pub fn contains(&self, z: C64) -> bool {
        let w = (z - self.center) * self.phase().conj();
        let u = w.re / self.rx;
        let v = w.im / self.ry;
        u * u + v * v < 1.0
    }
}

/// One quadrature node: parameter `t`, point `φ(t)`, derivative `φ′(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub t: f64,
    pub z: C64,
    pub dz: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeGrid {
    pub contour: Contour,
    pub nodes: Vec<Node>,
}

impl NodeGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Parameter of node `l`, where `l == N` closes the loop at `2π`.
    pub fn t(&self, l: usize) -> f64 {
        TAU * l as f64 / self.nodes.len() as f64
    }
}

/// `N` equidistant nodes `t_ℓ = 2πℓ/N`.
pub fn make_grid(c: &Contour, n: usize) -> Result<NodeGrid, ContourError> {
    if n < 4 {
        return Err(ContourError::TooFewNodes(n));
    }
    let nodes = (0..n)
        .map(|l| {
            let t = TAU * l as f64 / n as f64;
            Node {
                t,
                z: c.phi(t),
                dz: c.dphi(t),
            }
        })
        .collect();
    Ok(NodeGrid { contour: *c, nodes })
}
