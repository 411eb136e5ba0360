//! Boxes and balls in the position sub-space, plus axis-aligned bounds.

use serde::{Deserialize, Serialize};

/// Axis-aligned box given by per-dimension bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Bounds { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self, what: &str) -> Result<(), String> {
        if self.lower.len() != self.upper.len() {
            return Err(format!("{what}: lower has {} entries, upper has {}", self.lower.len(), self.upper.len()));
        }
        for (i, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(format!("{what}: bound {i} is not finite"));
            }
            if lo >= hi {
                return Err(format!("{what}: lower {lo} is not below upper {hi} in dimension {i}"));
            }
        }
        Ok(())
    }

    /// Closed-box membership.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }
}

/// A region primitive. Both are closed sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Shape {
    pub fn aabb(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Shape::Box { lower, upper }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Shape::Ball { center, radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Box { lower, .. } => lower.len(),
            Shape::Ball { center, .. } => center.len(),
        }
    }

    pub fn validate(&self, what: &str) -> Result<(), String> {
        match self {
            Shape::Box { lower, upper } => Bounds::new(lower.clone(), upper.clone()).validate(what),
            Shape::Ball { center, radius } => {
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(format!("{what}: ball center is not finite"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(format!("{what}: ball radius must be positive"));
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Shape::Box { lower, upper } => p
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi),
            Shape::Ball { center, radius } => {
                let d2: f64 = p.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 <= radius * radius
            }
        }
    }

    /// Smallest extent along any axis; bounds how far a guard can be crossed
    /// in one integration step without being noticed.
    pub fn min_width(&self) -> f64 {
        match self {
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| u - l)
                .fold(f64::INFINITY, f64::min),
            Shape::Ball { radius, .. } => 2.0 * radius,
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            Shape::Box { lower, upper } => lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect(),
            Shape::Ball { center, .. } => center.clone(),
        }
    }
}
