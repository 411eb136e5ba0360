//! Built-in vector fields `x' = f(x, u)`.
//!
//! | model               | state                     | control              |
//! |---------------------|---------------------------|----------------------|
//! | `single_integrator` | position (dim)            | velocity (dim)       |
//! | `second_order_car`  | x, y, heading, speed      | accel, steer angle   |
//! | `quadcopter_3d`     | x, y, z, vx, vy, vz       | thrust accel (3)     |
//! | `linear`            | arbitrary, `x' = Ax + Bu` | arbitrary            |
//!
//! An optional fuel model appends one state dimension that drains with
//! control effort: `fuel' = -(idle_rate + effort_rate * |u|)`.
//!
//! Lipschitz constants on the state box: the integrator and linear models are
//! globally Lipschitz (`|A|`); the quadcopter has constant `max(1, drag)`; the
//! car is Lipschitz with constant `max(v_max, v_max * tan(steer_max) / L) + 1`
//! because speed is saturated to `[min_speed, max_speed]` and the steering
//! angle to the control box.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

pub type StateVec = SmallVec<[f64; 8]>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Dynamics {
    SingleIntegrator {
        dim: usize,
    },
    SecondOrderCar {
        wheelbase: f64,
        min_speed: f64,
        max_speed: f64,
    },
    #[serde(rename = "quadcopter_3d")]
    Quadcopter3d {
        #[serde(default)]
        drag: f64,
    },
    Linear {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        position_dims: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuelModel {
    pub capacity: f64,
    #[serde(default)]
    pub idle_rate: f64,
    pub effort_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsModel {
    #[serde(flatten)]
    pub kind: Dynamics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuel: Option<FuelModel>,
}

impl DynamicsModel {
    pub fn new(kind: Dynamics) -> Self {
        DynamicsModel { kind, fuel: None }
    }

    pub fn with_fuel(mut self, fuel: FuelModel) -> Self {
        self.fuel = Some(fuel);
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        match &self.kind {
            Dynamics::SingleIntegrator { dim } => {
                if *dim == 0 || *dim > 3 {
                    return Err(format!("single_integrator dim must be 1..=3, got {dim}"));
                }
            }
            Dynamics::SecondOrderCar {
                wheelbase,
                min_speed,
                max_speed,
            } => {
                if !(*wheelbase > 0.0) {
                    return Err("second_order_car wheelbase must be positive".into());
                }
                if !(min_speed <= max_speed) {
                    return Err("second_order_car min_speed exceeds max_speed".into());
                }
            }
            Dynamics::Quadcopter3d { drag } => {
                if !(*drag >= 0.0) {
                    return Err("quadcopter_3d drag must be non-negative".into());
                }
            }
            Dynamics::Linear { a, b, position_dims } => {
                let n = a.len();
                if n == 0 || a.iter().any(|r| r.len() != n) {
                    return Err("linear: A must be square and non-empty".into());
                }
                if b.len() != n || b.is_empty() || b.iter().any(|r| r.len() != b[0].len()) || b[0].is_empty() {
                    return Err("linear: B must have one non-empty row per state".into());
                }
                if position_dims.is_empty() || position_dims.iter().any(|&d| d >= n) {
                    return Err("linear: position_dims out of range".into());
                }
            }
        }
        if let Some(f) = &self.fuel {
            if !(f.capacity > 0.0 && f.idle_rate >= 0.0 && f.effort_rate >= 0.0) {
                return Err("fuel: capacity must be positive and rates non-negative".into());
            }
        }
        Ok(())
    }

    /// Dimensions of the model proper, excluding fuel.
    pub fn base_dim(&self) -> usize {
        match &self.kind {
            Dynamics::SingleIntegrator { dim } => *dim,
            Dynamics::SecondOrderCar { .. } => 4,
            Dynamics::Quadcopter3d { .. } => 6,
            Dynamics::Linear { a, .. } => a.len(),
        }
    }

    pub fn state_dim(&self) -> usize {
        self.base_dim() + usize::from(self.fuel.is_some())
    }

    pub fn control_dim(&self) -> usize {
        match &self.kind {
            Dynamics::SingleIntegrator { dim } => *dim,
            Dynamics::SecondOrderCar { .. } => 2,
            Dynamics::Quadcopter3d { .. } => 3,
            Dynamics::Linear { b, .. } => b[0].len(),
        }
    }

    /// Indices of the state components that region geometry is tested against.
    pub fn position_dims(&self) -> Vec<usize> {
        match &self.kind {
            Dynamics::SingleIntegrator { dim } => (0..*dim).collect(),
            Dynamics::SecondOrderCar { .. } => vec![0, 1],
            Dynamics::Quadcopter3d { .. } => vec![0, 1, 2],
            Dynamics::Linear { position_dims, .. } => position_dims.clone(),
        }
    }

    /// Angle components; wrapped to `(-pi, pi]` and exempt from bounds checks.
    pub fn wrapped_dims(&self) -> &'static [usize] {
        match &self.kind {
            Dynamics::SecondOrderCar { .. } => &[2],
            _ => &[],
        }
    }

    pub fn fuel_dim(&self) -> Option<usize> {
        self.fuel.as_ref().map(|_| self.base_dim())
    }

    /// Writes `f(x, u)` into `out`.
    pub fn derivative(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        match &self.kind {
            Dynamics::SingleIntegrator { dim } => out[..*dim].copy_from_slice(&u[..*dim]),
            Dynamics::SecondOrderCar {
                wheelbase,
                min_speed,
                max_speed,
            } => {
                let (theta, v) = (x[2], x[3].clamp(*min_speed, *max_speed));
                out[0] = v * theta.cos();
                out[1] = v * theta.sin();
                out[2] = v * u[1].tan() / wheelbase;
                let accel = u[0];
                out[3] = if (x[3] >= *max_speed && accel > 0.0) || (x[3] <= *min_speed && accel < 0.0) {
                    0.0
                } else {
                    accel
                };
            }
            Dynamics::Quadcopter3d { drag } => {
                for i in 0..3 {
                    out[i] = x[3 + i];
                    out[3 + i] = u[i] - drag * x[3 + i];
                }
            }
            Dynamics::Linear { a, b, .. } => {
                for (i, (ar, br)) in a.iter().zip(b).enumerate() {
                    out[i] = ar.iter().zip(x).map(|(p, q)| p * q).sum::<f64>()
                        + br.iter().zip(u).map(|(p, q)| p * q).sum::<f64>();
                }
            }
        }
        if let Some(f) = &self.fuel {
            let effort = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            out[self.base_dim()] = -(f.idle_rate + f.effort_rate * effort);
        }
    }

    /// Normalization applied after every accepted step.
    pub fn post_step(&self, x: &mut [f64]) {
        if let Dynamics::SecondOrderCar {
            min_speed, max_speed, ..
        } = &self.kind
        {
            x[2] = wrap_angle(x[2]);
            x[3] = x[3].clamp(*min_speed, *max_speed);
        }
    }

    /// One classical Runge-Kutta step of size `h`.
    pub fn rk4_step(&self, x: &[f64], u: &[f64], h: f64) -> StateVec {
        let n = x.len();
        let mut k1: StateVec = smallvec::smallvec![0.0; n];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut tmp = k1.clone();
        self.derivative(x, u, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        self.derivative(&tmp, u, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        self.derivative(&tmp, u, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        self.derivative(&tmp, u, &mut k4);
        for i in 0..n {
            tmp[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        self.post_step(&mut tmp);
        tmp
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}
