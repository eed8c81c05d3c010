//! Dormand-Prince 5(4) integrator with PI step-size control, used as the
//! numerical reference for the series solutions.

use crate::error::{Error, Result};
use crate::model::{InitialValueProblem, PolyVectorField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Budget of attempted steps (accepted plus rejected).
    pub max_steps: usize,
    /// State norm beyond which the run is declared a blow-up.
    pub blowup_norm: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
            blowup_norm: 1e8,
        }
    }
}

impl IntegrationConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if self.max_steps < 1 {
            return Err(Error::InvalidInput("max_steps must be at least 1".into()));
        }
        if !(self.blowup_norm > 0.0) {
            return Err(Error::InvalidInput("blow-up threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Completed,
    /// The state norm passed the threshold, or the step size collapsed
    /// against a finite-time singularity.
    BlewUp,
    /// The step budget ran out before `t_end`.
    StiffAbort,
}

/// Accepted step `[t_{k-1}, t_k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub h: f64,
    /// Larger of the scaled local and interpolation error norms, ≤ 1 for
    /// accepted steps.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    /// `f(state)` at every sample, for Hermite interpolation.
    slopes: Vec<Vec<f64>>,
    steps: Vec<StepInfo>,
    rejected: usize,
    status: TrajectoryStatus,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn steps(&self) -> &[StepInfo] {
        &self.steps
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    pub fn status(&self) -> TrajectoryStatus {
        self.status
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory has the initial sample")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has the initial sample")
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times.iter().copied().zip(self.states.iter().map(Vec::as_slice))
    }

    /// State at `t` by cubic Hermite interpolation on the bracketing step.
    pub fn state_at(&self, t: f64) -> Result<Vec<f64>> {
        let end = self.last_time();
        if !(0.0..=end).contains(&t) {
            return Err(Error::Range { t, end });
        }
        let k = match self.times.binary_search_by(|s| s.total_cmp(&t)) {
            Ok(k) => return Ok(self.states[k].clone()),
            Err(k) => k,
        };
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (y0, y1) = (&self.states[k - 1], &self.states[k]);
        let (d0, d1) = (&self.slopes[k - 1], &self.slopes[k]);
        Ok((0..y0.len())
            .map(|i| h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i])
            .collect())
    }
}

/// Interpolates `traj` at each of `ts`.
pub fn sample(traj: &Trajectory, ts: &[f64]) -> Result<Vec<Vec<f64>>> {
    ts.iter().map(|&t| traj.state_at(t)).collect()
}

// Dormand-Prince 5(4) tableau. The fields are autonomous, so the nodes
// c_i never enter.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dormand-Prince dense output exceeds the cubic Hermite interpolant by
// θ²(1-θ)² h Σ D_i k_i, whose midpoint value bounds the Hermite error.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// step-size controller
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Integrates `ivp` from 0 to `t_end`. Blow-up and step exhaustion end the
/// run early and are reported through [`Trajectory::status`].
pub fn integrate(ivp: &InitialValueProblem, t_end: f64, cfg: &IntegrationConfig) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end must be positive, got {t_end}")));
    }
    cfg.validate()?;
    Stepper::new(&ivp.field, cfg).run(&ivp.x0, t_end)
}

struct Stepper<'a> {
    field: &'a PolyVectorField,
    cfg: &'a IntegrationConfig,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(field: &'a PolyVectorField, cfg: &'a IntegrationConfig) -> Self {
        let n = field.dim();
        Stepper {
            field,
            cfg,
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
        }
    }

    fn error_scale(&self, y0: f64, y1: f64) -> f64 {
        self.cfg.abs_tol + self.cfg.rel_tol * y0.abs().max(y1.abs())
    }

    /// Starting step from the usual two-evaluation heuristic.
    fn initial_step(&mut self, y: &[f64], f0: &[f64], t_end: f64) -> f64 {
        let n = y.len() as f64;
        let rms = |v: &mut dyn Iterator<Item = f64>| (v.map(|x| x * x).sum::<f64>() / n).sqrt();
        let d0 = rms(&mut y.iter().map(|&v| v / self.error_scale(v, v)));
        let d1 = rms(&mut y.iter().zip(f0).map(|(&v, &d)| d / self.error_scale(v, v)));
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(t_end);
        for (t, (&yi, &fi)) in self.tmp.iter_mut().zip(y.iter().zip(f0)) {
            *t = yi + h0 * fi;
        }
        let mut f1 = vec![0.0; y.len()];
        self.field.eval_into(&self.tmp, &mut f1);
        let d2 = rms(&mut y
            .iter()
            .zip(f0.iter().zip(&f1))
            .map(|(&v, (&a, &b))| (b - a) / self.error_scale(v, v)))
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(t_end)
    }

    /// One trial step; fills `y_new` and `k[6] = f(y_new)` and returns the
    /// larger of the scaled local error and the scaled midpoint error of
    /// the Hermite interpolant.
    fn attempt(&mut self, y: &[f64], h: f64) -> f64 {
        let n = y.len();
        let f = self.field;
        macro_rules! stage {
            ($dst:expr, [$(($c:expr, $src:expr)),*]) => {{
                for i in 0..n {
                    self.tmp[i] = y[i] + h * (0.0 $(+ $c * self.k[$src][i])*);
                }
                let mut out = std::mem::take(&mut self.k[$dst]);
                f.eval_into(&self.tmp, &mut out);
                self.k[$dst] = out;
            }};
        }
        stage!(1, [(A21, 0)]);
        stage!(2, [(A31, 0), (A32, 1)]);
        stage!(3, [(A41, 0), (A42, 1), (A43, 2)]);
        stage!(4, [(A51, 0), (A52, 1), (A53, 2), (A54, 3)]);
        stage!(5, [(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)]);
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (A71 * self.k[0][i]
                    + A73 * self.k[2][i]
                    + A74 * self.k[3][i]
                    + A75 * self.k[4][i]
                    + A76 * self.k[5][i]);
        }
        let mut k7 = std::mem::take(&mut self.k[6]);
        f.eval_into(&self.y_new, &mut k7);
        self.k[6] = k7;

        let mut sum = 0.0;
        let mut sum_dense = 0.0;
        for i in 0..n {
            let k = &self.k;
            let d = h
                * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i])
                / 16.0;
            let e = h
                * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
            let sc = self.error_scale(y[i], self.y_new[i]);
            sum += (e / sc) * (e / sc);
            sum_dense += (d / sc) * (d / sc);
        }
        let err = (sum.max(sum_dense) / n as f64).sqrt();
        if err.is_finite() {
            err
        } else {
            f64::INFINITY
        }
    }

    fn run(mut self, x0: &[f64], t_end: f64) -> Result<Trajectory> {
        let mut y = x0.to_vec();
        let mut f0 = vec![0.0; y.len()];
        self.field.eval_into(&y, &mut f0);
        let mut traj = Trajectory {
            times: vec![0.0],
            states: vec![y.clone()],
            slopes: vec![f0.clone()],
            steps: Vec::new(),
            rejected: 0,
            status: TrajectoryStatus::StiffAbort,
        };
        if norm(&y) > self.cfg.blowup_norm {
            traj.status = TrajectoryStatus::BlewUp;
            return Ok(traj);
        }

        let mut t: f64 = 0.0;
        let mut h = self.initial_step(&y, &f0, t_end);
        let mut fac_old: f64 = 1e-4;
        let mut last_rejected = false;
        self.k[0].copy_from_slice(&f0);

        for _ in 0..self.cfg.max_steps {
            // step size too small to advance t: singular point ahead
            if h <= 16.0 * f64::EPSILON * t.abs().max(1e-300) {
                log::debug!("step size collapsed at t = {t}");
                traj.status = TrajectoryStatus::BlewUp;
                return Ok(traj);
            }
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            let err = self.attempt(&y, h);
            if err <= 1.0 {
                let fac11 = err.powf(EXPO);
                let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                fac_old = err.max(1e-4);

                t = if last { t_end } else { t + h };
                y.copy_from_slice(&self.y_new);
                let k7 = self.k[6].clone();
                self.k[0].copy_from_slice(&k7);
                traj.times.push(t);
                traj.states.push(y.clone());
                traj.slopes.push(k7);
                traj.steps.push(StepInfo { h, error: err });

                if norm(&y) > self.cfg.blowup_norm || y.iter().any(|v| !v.is_finite()) {
                    traj.status = TrajectoryStatus::BlewUp;
                    return Ok(traj);
                }
                if last {
                    traj.status = TrajectoryStatus::Completed;
                    return Ok(traj);
                }
                if last_rejected {
                    h_new = h_new.min(h);
                }
                last_rejected = false;
                h = h_new;
            } else {
                let fac11 = if err.is_finite() { err.powf(EXPO) } else { FAC_MAX };
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
                traj.rejected += 1;
                last_rejected = true;
            }
        }
        log::debug!("step budget exhausted at t = {t}");
        traj.status = TrajectoryStatus::StiffAbort;
        Ok(traj)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{logistic_exact, spiral_exact};
    use crate::model::{preset_ivp, ModelPreset};

    fn logistic() -> InitialValueProblem {
        preset_ivp(ModelPreset::DEFAULT_LOGISTIC, &[1.0]).unwrap()
    }

    #[test]
    fn zero_field_is_constant() {
        let ivp = InitialValueProblem::new(PolyVectorField::zero(1), vec![7.0]).unwrap();
        let tr = integrate(&ivp, 5.0, &IntegrationConfig::default()).unwrap();
        assert_eq!(tr.status(), TrajectoryStatus::Completed);
        assert_eq!(tr.last_time(), 5.0);
        assert!(tr.states().iter().all(|s| s[0] == 7.0));
        assert_eq!(tr.state_at(2.345).unwrap(), vec![7.0]);
    }

    #[test]
    fn logistic_end_state() {
        let tr = integrate(&logistic(), 0.1, &IntegrationConfig::default()).unwrap();
        let exact = logistic_exact(1.0, -3.0, 1.0, 0.1).unwrap();
        assert!((tr.last_state()[0] - exact).abs() < 1e-9);
        assert_eq!(tr.times()[0], 0.0);
        assert!(tr.times().windows(2).all(|w| w[1] > w[0]));
        assert!(tr.steps().iter().all(|s| s.error <= 1.0 && s.h > 0.0));
    }

    #[test]
    fn sampling() {
        let tr = integrate(&logistic(), 1.0, &IntegrationConfig::default()).unwrap();
        for (t, s) in tr.samples() {
            assert_eq!(tr.state_at(t).unwrap(), s.to_vec());
        }
        let x = sample(&tr, &[0.05]).unwrap()[0][0];
        assert!((x - logistic_exact(1.0, -3.0, 1.0, 0.05).unwrap()).abs() < 1e-8);
        assert!(matches!(tr.state_at(1.5), Err(Error::Range { .. })));
        assert!(matches!(tr.state_at(-0.1), Err(Error::Range { .. })));
    }

    #[test]
    fn interpolation_error_tracks_tolerance() {
        let cfg = IntegrationConfig::default();
        let tr = integrate(&logistic(), 1.0, &cfg).unwrap();
        let ts = tr.times();
        for w in ts.windows(2) {
            let t = 0.5 * (w[0] + w[1]);
            let exact = logistic_exact(1.0, -3.0, 1.0, t).unwrap();
            let err = (tr.state_at(t).unwrap()[0] - exact).abs() / exact.abs();
            assert!(err < 10.0 * cfg.rel_tol, "t = {t}: {err:e}");
        }
    }

    #[test]
    fn spiral_blows_up_before_pole() {
        let ivp = preset_ivp(ModelPreset::Spiral { a: 0.5 }, &[2.0, 2.0]).unwrap();
        let tr = integrate(&ivp, 1.0, &IntegrationConfig::default()).unwrap();
        assert_eq!(tr.status(), TrajectoryStatus::BlewUp);
        assert!(tr.last_time() < 0.125);
        assert!(norm(tr.last_state()) > 1e3);
    }

    #[test]
    fn step_budget_exhaustion() {
        let cfg = IntegrationConfig {
            max_steps: 3,
            ..Default::default()
        };
        let tr = integrate(&logistic(), 1.0, &cfg).unwrap();
        assert_eq!(tr.status(), TrajectoryStatus::StiffAbort);
        assert!(tr.last_time() < 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(integrate(&logistic(), 0.0, &IntegrationConfig::default()).is_err());
        let cfg = IntegrationConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(integrate(&logistic(), 1.0, &cfg).is_err());
    }

    #[test]
    fn tighter_tolerance_reduces_error() {
        let exact = logistic_exact(1.0, -3.0, 1.0, 1.0).unwrap();
        let err = |rtol: f64| {
            let cfg = IntegrationConfig {
                rel_tol: rtol,
                abs_tol: rtol * 1e-2,
                ..Default::default()
            };
            let tr = integrate(&logistic(), 1.0, &cfg).unwrap();
            (tr.last_state()[0] - exact).abs()
        };
        assert!(err(1e-6) > err(1e-9));
        assert!(err(1e-9) > err(1e-12).max(1e-16));
    }

    #[test]
    fn default_tolerance_global_error() {
        let tr = integrate(&logistic(), 1.0, &IntegrationConfig::default()).unwrap();
        for (t, s) in tr.samples() {
            let e = logistic_exact(1.0, -3.0, 1.0, t).unwrap();
            assert!((s[0] - e).abs() / e.abs() < 1e-8);
        }
        let ivp = preset_ivp(ModelPreset::DEFAULT_SPIRAL, &[2.0, 2.0]).unwrap();
        let tr = integrate(&ivp, 20.0, &IntegrationConfig::default()).unwrap();
        for (t, s) in tr.samples() {
            let (x, y) = spiral_exact(-0.5, 2.0, 2.0, t).unwrap();
            let rel = (s[0] - x).hypot(s[1] - y) / x.hypot(y);
            assert!(rel < 1e-8, "t={t}: {rel}");
            // radial law along the numerical trajectory
            let r2 = s[0] * s[0] + s[1] * s[1];
            assert!((r2 * (1.0 + 8.0 * t) - 8.0).abs() / 8.0 < 1e-7);
        }
    }

    #[test]
    fn two_species_reaches_stable_node() {
        let ivp = preset_ivp(ModelPreset::DEFAULT_TWO_SPECIES, &[4.0, 10.0]).unwrap();
        // the slow eigenvalue at the node is about -0.0033
        let tr = integrate(&ivp, 3000.0, &IntegrationConfig::default()).unwrap();
        let s = tr.last_state();
        assert!((s[0] - 12.5).abs() < 0.005 * 12.5, "{s:?}");
        assert!((s[1] - 68.75).abs() < 0.005 * 68.75, "{s:?}");
    }

    #[test]
    fn deterministic() {
        let a = integrate(&logistic(), 1.0, &IntegrationConfig::default()).unwrap();
        let b = integrate(&logistic(), 1.0, &IntegrationConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
