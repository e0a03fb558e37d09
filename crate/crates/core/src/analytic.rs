//! Built-in manufactured solutions on the unit square.
//!
//! Every problem derives from a separable stream function
//! `ψ = A g(t) a(x) b(y)`, so `u = (A g a b', -A g a' b)` is divergence
//! free and vanishes with its tangential part on the walls. The forcing is
//! `f = ∂_t u - Δu + κ (u·∇)u + ∇p` with `κ = 1` for Navier-Stokes and
//! `κ = 0` for Stokes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{MacError, Result};
use crate::interpolation::{AnalyticField, Quadrature};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Profile {
    /// `x² (1 - x)²`
    Poly,
    /// `sin²(π x)`
    Sin2,
}

impl Profile {
    /// Derivative of order `k` (0..=3).
    fn d(self, x: f64, k: u8) -> f64 {
        match self {
            Profile::Poly => match k {
                0 => x * x * (1.0 - x) * (1.0 - x),
                1 => 2.0 * x - 6.0 * x * x + 4.0 * x * x * x,
                2 => 2.0 - 12.0 * x + 12.0 * x * x,
                _ => -12.0 + 24.0 * x,
            },
            Profile::Sin2 => {
                let w = 2.0 * PI * x;
                match k {
                    0 => 0.5 * (1.0 - w.cos()),
                    1 => PI * w.sin(),
                    2 => 2.0 * PI * PI * w.cos(),
                    _ => -4.0 * PI * PI * PI * w.sin(),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    /// Polynomial stream function, pressure `x² y - 1/6`; steady.
    PolyCavity,
    /// Trigonometric stream function, pressure `cos(πx) cos(πy)`; steady.
    StokesMs,
    /// No-slip decaying vortex: `g(t) = exp(-2π² t)`, pressure
    /// `-g²/4 (cos 2πx + cos 2πy)`, forcing manufactured accordingly.
    TaylorGreen,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [ProblemKind::PolyCavity, ProblemKind::StokesMs, ProblemKind::TaylorGreen];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::PolyCavity => "poly-cavity",
            ProblemKind::StokesMs => "stokes-ms",
            ProblemKind::TaylorGreen => "taylor-green",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = MacError;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| MacError::UnknownProblem(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Problem {
    pub kind: ProblemKind,
    /// Stream-function amplitude `A`.
    pub amplitude: f64,
    /// Convection coefficient `κ` (1 for Navier-Stokes, 0 for Stokes).
    pub convection: f64,
}

impl Problem {
    pub fn new(kind: ProblemKind) -> Self {
        let amplitude = match kind {
            ProblemKind::PolyCavity => 10.0,
            ProblemKind::StokesMs | ProblemKind::TaylorGreen => 1.0 / PI,
        };
        let convection = if kind == ProblemKind::TaylorGreen { 1.0 } else { 0.0 };
        Problem { kind, amplitude, convection }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(Problem::new(name.parse()?))
    }

    pub fn with_amplitude(mut self, a: f64) -> Self {
        self.amplitude = a;
        self
    }

    pub fn with_convection(mut self, kappa: f64) -> Self {
        self.convection = kappa;
        self
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn is_unsteady(&self) -> bool {
        self.kind == ProblemKind::TaylorGreen
    }

    fn profile(&self) -> Profile {
        match self.kind {
            ProblemKind::PolyCavity => Profile::Poly,
            _ => Profile::Sin2,
        }
    }

    /// `(g, g')`
    fn time_factor(&self, t: f64) -> (f64, f64) {
        match self.kind {
            ProblemKind::TaylorGreen => {
                let r = -2.0 * PI * PI;
                let g = (r * t).exp();
                (g, r * g)
            }
            _ => (1.0, 0.0),
        }
    }

    pub fn velocity(&self, x: [f64; 3], t: f64) -> [f64; 3] {
        let p = self.profile();
        let s = self.amplitude * self.time_factor(t).0;
        [s * p.d(x[0], 0) * p.d(x[1], 1), -s * p.d(x[0], 1) * p.d(x[1], 0), 0.0]
    }

    /// `[i][j] = ∂_j u_i`
    pub fn velocity_gradient(&self, x: [f64; 3], t: f64) -> [[f64; 3]; 3] {
        let p = self.profile();
        let s = self.amplitude * self.time_factor(t).0;
        let (a, b) = (|k| p.d(x[0], k), |k| p.d(x[1], k));
        [
            [s * a(1) * b(1), s * a(0) * b(2), 0.0],
            [-s * a(2) * b(0), -s * a(1) * b(1), 0.0],
            [0.0; 3],
        ]
    }

    pub fn pressure(&self, x: [f64; 3], t: f64) -> f64 {
        match self.kind {
            ProblemKind::PolyCavity => x[0] * x[0] * x[1] - 1.0 / 6.0,
            ProblemKind::StokesMs => (PI * x[0]).cos() * (PI * x[1]).cos(),
            ProblemKind::TaylorGreen => {
                let g = self.time_factor(t).0;
                -0.25 * g * g * ((2.0 * PI * x[0]).cos() + (2.0 * PI * x[1]).cos())
            }
        }
    }

    pub fn pressure_gradient(&self, x: [f64; 3], t: f64) -> [f64; 2] {
        match self.kind {
            ProblemKind::PolyCavity => [2.0 * x[0] * x[1], x[0] * x[0]],
            ProblemKind::StokesMs => [
                -PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
                -PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
            ],
            ProblemKind::TaylorGreen => {
                let g = self.time_factor(t).0;
                [0.5 * PI * g * g * (2.0 * PI * x[0]).sin(), 0.5 * PI * g * g * (2.0 * PI * x[1]).sin()]
            }
        }
    }

    pub fn forcing(&self, x: [f64; 3], t: f64) -> [f64; 3] {
        let p = self.profile();
        let (g, gp) = self.time_factor(t);
        let amp = self.amplitude;
        let (a, b) = (|k| p.d(x[0], k), |k| p.d(x[1], k));
        let dt = [amp * gp * a(0) * b(1), -amp * gp * a(1) * b(0)];
        let lap = [amp * g * (a(2) * b(1) + a(0) * b(3)), -amp * g * (a(3) * b(0) + a(1) * b(2))];
        let s2 = amp * amp * g * g;
        let conv = [
            s2 * a(0) * a(1) * (b(1) * b(1) - b(0) * b(2)),
            s2 * b(0) * b(1) * (a(1) * a(1) - a(0) * a(2)),
        ];
        let gp_ = self.pressure_gradient(x, t);
        [
            dt[0] - lap[0] + self.convection * conv[0] + gp_[0],
            dt[1] - lap[1] + self.convection * conv[1] + gp_[1],
            0.0,
        ]
    }

    pub fn velocity_field(&self) -> AnalyticField<'static> {
        let p = *self;
        AnalyticField::vector(move |x, t| p.velocity(x, t)).with_divergence(|_, _| 0.0)
    }

    pub fn pressure_field(&self) -> AnalyticField<'static> {
        let p = *self;
        AnalyticField::scalar(move |x, t| p.pressure(x, t))
    }

    pub fn forcing_field(&self) -> AnalyticField<'static> {
        let p = *self;
        AnalyticField::vector(move |x, t| p.forcing(x, t))
    }

    /// `‖u(t)‖²_{H¹}` (L² part plus gradient part) by composite quadrature.
    pub fn velocity_h1_sq(&self, t: f64) -> f64 {
        let q = Quadrature::composite(6, 32).expect("valid rule");
        q.integrate(2, &[[0.0, 1.0], [0.0, 1.0], [0.0, 0.0]], |x| {
            let u = self.velocity(x, t);
            let gu = self.velocity_gradient(x, t);
            u[0] * u[0] + u[1] * u[1] + (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| gu[i][j] * gu[i][j]).sum::<f64>()
        })
    }

    /// `∫_0^T ‖f‖²_{L²} dt` by composite quadrature.
    pub fn forcing_l2l2_sq(&self, horizon: f64) -> f64 {
        let q = Quadrature::composite(6, 32).expect("valid rule");
        let qt = Quadrature::composite(6, 16).expect("valid rule");
        qt.interval(0.0, horizon)
            .into_iter()
            .map(|(t, wt)| {
                wt * q.integrate(2, &[[0.0, 1.0], [0.0, 1.0], [0.0, 0.0]], |x| {
                    let f = self.forcing(x, t);
                    f[0] * f[0] + f[1] * f[1]
                })
            })
            .sum()
    }
}
