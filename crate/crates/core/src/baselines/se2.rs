//! SE(2) with algebra coordinates ordered `(θ, ρ_x, ρ_y)`.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::circstats::wrap_angle;

/// Below this rotation angle the closed forms switch to Taylor series.
const SMALL_ANGLE: f64 = 1e-6;

/// Rigid planar motion: a rotation block and a translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Se2 {
    rot: Matrix2<f64>,
    t: Vector2<f64>,
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

impl Se2 {
    pub fn identity() -> Self {
        Self {
            rot: Matrix2::identity(),
            t: Vector2::zeros(),
        }
    }

    pub fn from_pose(theta: f64, x: f64, y: f64) -> Self {
        Self {
            rot: rotation(theta),
            t: Vector2::new(x, y),
        }
    }

    pub fn angle(&self) -> f64 {
        self.rot[(1, 0)].atan2(self.rot[(0, 0)])
    }

    pub fn rotation(&self) -> &Matrix2<f64> {
        &self.rot
    }

    pub fn translation(&self) -> &Vector2<f64> {
        &self.t
    }

    /// `(θ, x, y)` with θ in `[-π, π)`.
    pub fn pose(&self) -> (f64, f64, f64) {
        (wrap_angle(self.angle()), self.t.x, self.t.y)
    }

    /// Homogeneous 3×3 matrix.
    pub fn matrix(&self) -> Matrix3<f64> {
        let r = &self.rot;
        Matrix3::new(
            r[(0, 0)],
            r[(0, 1)],
            self.t.x,
            r[(1, 0)],
            r[(1, 1)],
            self.t.y,
            0.0,
            0.0,
            1.0,
        )
    }

    /// `self · other`, re-orthogonalized.
    pub fn compose(&self, other: &Se2) -> Se2 {
        Se2 {
            rot: self.rot * other.rot,
            t: self.t + self.rot * other.t,
        }
        .reorthogonalized()
    }

    pub fn inverse(&self) -> Se2 {
        let rt = self.rot.transpose();
        Se2 {
            rot: rt,
            t: -(rt * self.t),
        }
    }

    /// Maps a point from the body frame into the world frame.
    pub fn act(&self, p: &Vector2<f64>) -> Vector2<f64> {
        self.rot * p + self.t
    }

    /// `|RᵀR - I|_max`.
    pub fn orthogonality_residual(&self) -> f64 {
        (self.rot.transpose() * self.rot - Matrix2::identity()).abs().max()
    }

    fn reorthogonalized(self) -> Se2 {
        Se2 {
            rot: rotation(self.angle()),
            t: self.t,
        }
    }

    /// Adjoint matrix acting on `(θ, ρ_x, ρ_y)`.
    #[rustfmt::skip]
    pub fn adjoint(&self) -> Matrix3<f64> {
        let r = &self.rot;
        Matrix3::new(
            1.0, 0.0, 0.0,
            self.t.y, r[(0, 0)], r[(0, 1)],
            -self.t.x, r[(1, 0)], r[(1, 1)],
        )
    }
}

/// `sin θ / θ` and `(1 - cos θ) / θ`.
fn sinc_terms(theta: f64) -> (f64, f64) {
    if theta.abs() < SMALL_ANGLE {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, theta / 2.0 - theta * t2 / 24.0)
    } else {
        let h = (theta / 2.0).sin();
        (theta.sin() / theta, 2.0 * h * h / theta)
    }
}

/// `(θ - sin θ)/θ²` and `(1 - cos θ)/θ²`, free of cancellation.
fn jacobian_terms(theta: f64) -> (f64, f64) {
    let t2 = theta * theta;
    let f = if theta.abs() < 0.1 {
        theta * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 - t2 / 362_880.0)))
    } else {
        (theta - theta.sin()) / t2
    };
    let g = if theta.abs() < SMALL_ANGLE {
        0.5 - t2 / 24.0
    } else {
        let h = (theta / 2.0).sin();
        2.0 * h * h / t2
    };
    (f, g)
}

/// Left Jacobian of SO(2) acting on translations, `V(θ)`.
fn v_matrix(theta: f64) -> Matrix2<f64> {
    let (a, b) = sinc_terms(theta);
    Matrix2::new(a, -b, b, a)
}

pub fn se2_exp(v: &Vector3<f64>) -> Se2 {
    let theta = v[0];
    Se2 {
        rot: rotation(theta),
        t: v_matrix(theta) * Vector2::new(v[1], v[2]),
    }
}

/// Inverse of [`se2_exp`] with θ in `(-π, π]`.
pub fn se2_log(g: &Se2) -> Vector3<f64> {
    let theta = g.angle();
    let half = theta / 2.0;
    let a = if theta.abs() < SMALL_ANGLE {
        1.0 - theta * theta / 12.0
    } else {
        half / half.tan()
    };
    let v_inv = Matrix2::new(a, half, -half, a);
    let rho = v_inv * g.t;
    Vector3::new(theta, rho.x, rho.y)
}

/// Right Jacobian: `exp(τ + δ) ≈ exp(τ)·exp(J_r(τ)·δ)`.
#[rustfmt::skip]
pub fn right_jacobian(v: &Vector3<f64>) -> Matrix3<f64> {
    let (theta, r1, r2) = (v[0], v[1], v[2]);
    let (a, b) = sinc_terms(theta);
    let (f, g) = jacobian_terms(theta);
    let (j_theta_x, j_theta_y) = (r1 * f - r2 * g, r1 * g + r2 * f);
    Matrix3::new(
        1.0, 0.0, 0.0,
        j_theta_x, a, b,
        j_theta_y, -b, a,
    )
}
