//! Closed-form solutions and complex-time singularities of the logistic and
//! spiral models.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance from a real singularity inside which evaluation is refused.
pub const SINGULARITY_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    Pole,
    BranchPoint,
}

impl fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingularityKind::Pole => "pole",
            SingularityKind::BranchPoint => "branch-point",
        })
    }
}

/// Singularity of a solution in the complex t-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub location: Complex64,
    pub modulus: f64,
    pub kind: SingularityKind,
    /// The solution is constant and has no finite singularity; `modulus`
    /// is `+inf`.
    pub degenerate: bool,
}

impl Singularity {
    fn at(location: Complex64, kind: SingularityKind) -> Self {
        Singularity {
            location,
            modulus: location.norm(),
            kind,
            degenerate: false,
        }
    }

    pub fn is_real(&self) -> bool {
        self.location.im == 0.0
    }
}

/// Solution of `x' = x (b + a x)`, `x(0) = x0`.
///
/// For `b != 0` this is `b x0 e^{bt} / ((b + a x0) - a x0 e^{bt})`, for
/// `b = 0` it is `x0 / (1 - a x0 t)`.
pub fn logistic_exact(b: f64, a: f64, x0: f64, t: f64) -> Result<f64> {
    if a != 0.0 && x0 != 0.0 {
        let s = logistic_singularity(b, a, x0)?;
        if !s.degenerate && s.is_real() && (t - s.location.re).abs() < SINGULARITY_GUARD {
            return Err(Error::Singularity(s.location.re));
        }
    }
    let x = if b == 0.0 {
        x0 / (1.0 - a * x0 * t)
    } else {
        let e = (b * t).exp();
        b * x0 * e / ((b + a * x0) - a * x0 * e)
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Singularity(t))
    }
}

/// Nearest-to-origin singularity of the logistic solution.
///
/// For `b != 0` the poles solve `e^{bt} = 1 + b/(a x0)`; the principal
/// branch of the complex logarithm gives the one closest to `t = 0`. A
/// negative argument puts the pole off the real axis.
pub fn logistic_singularity(b: f64, a: f64, x0: f64) -> Result<Singularity> {
    if a == 0.0 || x0 == 0.0 {
        return Err(Error::Degenerate(format!(
            "logistic solution with a = {a}, x0 = {x0} has no singularity"
        )));
    }
    if b == 0.0 {
        return Ok(Singularity::at(
            Complex64::new(1.0 / (a * x0), 0.0),
            SingularityKind::Pole,
        ));
    }
    let q = 1.0 + b / (a * x0);
    if q == 0.0 {
        // x0 is the non-trivial fixed point
        return Ok(Singularity {
            location: Complex64::new(f64::INFINITY, 0.0),
            modulus: f64::INFINITY,
            kind: SingularityKind::Pole,
            degenerate: true,
        });
    }
    let arg = if q < 0.0 { PI } else { 0.0 };
    let location = Complex64::new(q.abs().ln(), arg) / b;
    Ok(Singularity::at(location, SingularityKind::Pole))
}

/// Polar form of a planar initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarInit {
    pub r0: f64,
    pub theta0: f64,
}

/// `r0 = |(x0, y0)|`, `theta0 = atan2(y0, x0)`.
pub fn polar_init(x0: f64, y0: f64) -> Result<PolarInit> {
    if x0 == 0.0 && y0 == 0.0 {
        return Err(Error::Degenerate("origin has no polar angle".into()));
    }
    Ok(PolarInit {
        r0: x0.hypot(y0),
        theta0: y0.atan2(x0),
    })
}

/// Solution of the spiral system `x' = -y + a x r²`, `y' = x + a y r²`:
/// the angle advances at unit rate and `r² = r0² / (1 - 2 a r0² t)`.
pub fn spiral_exact(a: f64, x0: f64, y0: f64, t: f64) -> Result<(f64, f64)> {
    if x0 == 0.0 && y0 == 0.0 {
        return Ok((0.0, 0.0));
    }
    let r0_sq = x0 * x0 + y0 * y0;
    let radicand = 1.0 - 2.0 * a * r0_sq * t;
    if radicand <= 0.0 {
        return Err(Error::Singularity(1.0 / (2.0 * a * r0_sq)));
    }
    // r0 (cos(θ0 + t), sin(θ0 + t)) as a rotation of (x0, y0)
    let (s, c) = t.sin_cos();
    let scale = radicand.sqrt();
    Ok(((x0 * c - y0 * s) / scale, (x0 * s + y0 * c) / scale))
}

/// Square-root branch point of the spiral solution at `t = 1/(2 a r0²)`.
pub fn spiral_singularity(a: f64, x0: f64, y0: f64) -> Result<Singularity> {
    if a == 0.0 {
        return Err(Error::Degenerate("a = 0 gives a linear centre with no singularity".into()));
    }
    polar_init(x0, y0)?;
    let r0_sq = x0 * x0 + y0 * y0;
    Ok(Singularity::at(
        Complex64::new(1.0 / (2.0 * a * r0_sq), 0.0),
        SingularityKind::BranchPoint,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn logistic_values() {
        let e = 0.1f64.exp();
        let x = logistic_exact(1.0, -3.0, 1.0, 0.1).unwrap();
        assert!((x - e / (-2.0 + 3.0 * e)).abs() < 1e-15);
        assert!((x - 0.8401065778530576).abs() < 1e-14);
        for (b, a, x0) in [(1.0, -3.0, 1.0), (0.0, -3.0, 0.1), (2.5, 0.4, -0.7)] {
            assert_eq!(logistic_exact(b, a, x0, 0.0).unwrap(), x0);
        }
        assert!((logistic_exact(0.0, -3.0, 0.1, 1.0).unwrap() - 0.1 / 1.3).abs() < 1e-16);
    }

    #[test]
    fn logistic_refuses_pole() {
        // b = 0, a x0 = 1: pole at t = 1
        assert!(matches!(logistic_exact(0.0, 1.0, 1.0, 1.0), Err(Error::Singularity(_))));
        // growing logistic a > 0 blows up forward at ln(1 + b/(a x0))
        let tc = (4.0f64 / 3.0).ln();
        let s = logistic_singularity(1.0, 3.0, 1.0).unwrap();
        assert!((s.location.re - tc).abs() < 1e-15);
        assert!(matches!(logistic_exact(1.0, 3.0, 1.0, tc), Err(Error::Singularity(_))));
        assert!(logistic_singularity(1.0, 3.0, -1.0).unwrap().location.re < 0.0);
    }

    #[test]
    fn logistic_singularities() {
        let s = logistic_singularity(1.0, -3.0, 0.1).unwrap();
        assert!((s.modulus - 3.253846656).abs() < 1e-6, "{}", s.modulus);
        assert!((s.location.im - PI).abs() < 1e-15);
        let s = logistic_singularity(1.0, -3.0, 1.0).unwrap();
        assert!((s.location.re + (1.5f64).ln()).abs() < 1e-15);
        assert_eq!(s.location.im, 0.0);
        assert!((s.modulus - 0.405465).abs() < 1e-6);
        // x0 / (1 - a x0 t) with a x0 = -0.3 has its pole at t = -10/3
        let s = logistic_singularity(0.0, -3.0, 0.1).unwrap();
        assert!((s.location.re + 10.0 / 3.0).abs() < 1e-14);
        assert!((s.modulus - 10.0 / 3.0).abs() < 1e-14);
        assert_eq!(s.kind, SingularityKind::Pole);
    }

    #[test]
    fn logistic_singularity_degenerate() {
        let s = logistic_singularity(1.0, -3.0, 1.0 / 3.0).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.modulus, f64::INFINITY);
        assert!(logistic_singularity(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn polar() {
        let p = polar_init(2.0, 2.0).unwrap();
        assert!((p.r0 - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((p.theta0 - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(polar_init(1.0, 0.0).unwrap(), PolarInit { r0: 1.0, theta0: 0.0 });
        let p = polar_init(0.0, 1.0).unwrap();
        assert!((p.theta0 - PI / 2.0).abs() < 1e-15);
        assert!(matches!(polar_init(0.0, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn spiral_values() {
        assert_eq!(spiral_exact(-0.5, 2.0, 2.0, 0.0).unwrap(), (2.0, 2.0));
        let (x, y) = spiral_exact(-0.5, 2.0, 2.0, 1.0).unwrap();
        let r = 2.0 * 2f64.sqrt() / 3.0;
        assert!((x - r * (FRAC_PI_4 + 1.0).cos()).abs() < 1e-15);
        assert!((y - r * (FRAC_PI_4 + 1.0).sin()).abs() < 1e-15);
        assert!((x + 0.2007).abs() < 1e-3 && (y - 0.9212).abs() < 1e-3);
        assert!(matches!(spiral_exact(0.5, 2.0, 2.0, 0.2), Err(Error::Singularity(_))));
    }

    #[test]
    fn spiral_singularities() {
        let s = spiral_singularity(-0.5, 2.0, 2.0).unwrap();
        assert!((s.location.re + 0.125).abs() < 1e-15);
        assert!((s.modulus - 0.125).abs() < 1e-15);
        assert_eq!(s.kind, SingularityKind::BranchPoint);
        assert!((spiral_singularity(0.5, 2.0, 2.0).unwrap().location.re - 0.125).abs() < 1e-15);
        assert!((spiral_singularity(-1.0, 1.0, 0.0).unwrap().location.re + 0.5).abs() < 1e-15);
        assert!(spiral_singularity(-1.0, 0.0, 0.0).is_err());
    }

    fn logistic_cases() -> Vec<(f64, f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut v = vec![(1.0, -3.0, 0.1), (1.0, -3.0, 1.0)];
        for _ in 0..10 {
            v.push((rng.gen_range(0.0..2.0), rng.gen_range(-3.0..-0.1), rng.gen_range(0.05..2.0)));
        }
        v
    }

    #[test]
    fn logistic_ode_residual() {
        let h = 1e-6;
        for (b, a, x0) in logistic_cases() {
            for k in 0..50 {
                let t = 0.02 + k as f64 * 0.04;
                let xp = logistic_exact(b, a, x0, t + h).unwrap();
                let xm = logistic_exact(b, a, x0, t - h).unwrap();
                let x = logistic_exact(b, a, x0, t).unwrap();
                let resid = (xp - xm) / (2.0 * h) - x * (b + a * x);
                assert!(resid.abs() < 1e-6, "b={b} a={a} x0={x0} t={t}: {resid}");
            }
        }
    }

    #[test]
    fn spiral_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for _ in 0..12 {
            let a = rng.gen_range(-1.0..-0.05);
            let (x0, y0) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let PolarInit { r0, theta0 } = polar_init(x0, y0).unwrap();
            for k in 0..50 {
                let t = k as f64 * 0.2;
                let (x, y) = spiral_exact(a, x0, y0, t).unwrap();
                let r2 = x * x + y * y;
                let radial = r2 * (1.0 - 2.0 * a * r0 * r0 * t);
                assert!((radial - r0 * r0).abs() <= 1e-12 * r0 * r0);
                let dtheta = (y.atan2(x) - t - theta0).rem_euclid(2.0 * PI);
                let wrapped = dtheta.min(2.0 * PI - dtheta);
                assert!(wrapped < 1e-10, "angular law off by {wrapped}");

                let (xp, yp) = spiral_exact(a, x0, y0, t + h).unwrap();
                let (xm, ym) = spiral_exact(a, x0, y0, t - h).unwrap();
                let dt = 2.0 * h;
                let rx = (xp - xm) / dt - (-y + a * x * r2);
                let ry = (yp - ym) / dt - (x + a * y * r2);
                assert!(rx.abs() < 1e-6 && ry.abs() < 1e-6, "residual ({rx}, {ry})");
            }
        }
    }
}
