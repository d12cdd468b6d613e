//! Explicit Runge–Kutta integration of autonomous systems `y' = f(y)`.
//!
//! Dormand–Prince 5(4) with error control, or classical RK4 with a fixed
//! step. Accepted steps are stored as `(t, y, f)` nodes so that the solution
//! can be evaluated anywhere by cubic Hermite interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub method: Method,
    /// Absolute and relative tolerance of the adaptive method.
    pub tol: f64,
    /// Largest step; also the fixed step of RK4.
    pub max_step: f64,
    /// Longest admissible integration interval.
    pub max_time: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive,
            tol: 1e-10,
            max_step: 1e-2,
            max_time: 1e3,
        }
    }
}

impl FlowConfig {
    pub fn rk4(step: f64) -> Self {
        Self {
            method: Method::Rk4Fixed,
            max_step: step,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.max_step > 0.0) || !(self.max_time > 0.0) {
            return Err(Error::Argument(
                "flow config requires tol > 0, max_step > 0 and max_time > 0".into(),
            ));
        }
        Ok(())
    }
}

// Dormand-Prince 5(4) tableau (autonomous fields, so the nodes c_i are unused).
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Accepted steps of one integration.
#[derive(Clone, Debug)]
pub struct Solution {
    dim: usize,
    t: Vec<f64>,
    // node-major: y[k * dim .. (k + 1) * dim]
    y: Vec<f64>,
    f: Vec<f64>,
}

impl Solution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().expect("a solution has at least one node")
    }

    pub fn nodes(&self) -> usize {
        self.t.len()
    }

    pub fn node_time(&self, k: usize) -> f64 {
        self.t[k]
    }

    pub fn node_state(&self, k: usize) -> &[f64] {
        &self.y[k * self.dim..(k + 1) * self.dim]
    }

    pub fn final_state(&self) -> &[f64] {
        self.node_state(self.nodes() - 1)
    }

    /// Index of the last node at or before `t` in the direction of integration.
    pub fn node_before(&self, t: f64) -> usize {
        let forward = self.t_end() >= self.t_start();
        let key = |s: f64| if forward { s } else { -s };
        let kt = key(t);
        match self.t.partition_point(|&s| key(s) <= kt) {
            0 => 0,
            k => k - 1,
        }
    }

    /// Cubic Hermite interpolation between the enclosing accepted steps.
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        let n = self.dim;
        let k = self.node_before(t).min(self.nodes().saturating_sub(2));
        if self.nodes() == 1 {
            out.copy_from_slice(self.node_state(0));
            return;
        }
        let (t0, t1) = (self.t[k], self.t[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (y0, y1) = (&self.y[k * n..(k + 1) * n], &self.y[(k + 1) * n..(k + 2) * n]);
        let (f0, f1) = (&self.f[k * n..(k + 1) * n], &self.f[(k + 1) * n..(k + 2) * n]);
        for i in 0..n {
            out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
        }
    }
}

/// Integrates `y' = f(y)` from `y0` at time `t0` over a signed interval `t`.
pub fn integrate<F>(f: F, y0: &[f64], t0: f64, t: f64, cfg: &FlowConfig) -> Result<Solution>
where
    F: Fn(&[f64], &mut [f64]),
{
    cfg.validate()?;
    if !t.is_finite() || t.abs() > cfg.max_time {
        return Err(Error::Argument(format!(
            "integration interval {t} exceeds max_time {}",
            cfg.max_time
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("initial state is not finite".into()));
    }
    let n = y0.len();
    let mut sol = Solution {
        dim: n,
        t: vec![t0],
        y: y0.to_vec(),
        f: vec![0.0; n],
    };
    f(y0, &mut sol.f[..n]);
    if t == 0.0 {
        return Ok(sol);
    }
    match cfg.method {
        Method::Rk4Fixed => rk4(&f, &mut sol, t0, t, cfg)?,
        Method::Rk45Adaptive => dopri5(&f, &mut sol, t0, t, cfg)?,
    }
    Ok(sol)
}

fn push_node<F: Fn(&[f64], &mut [f64])>(sol: &mut Solution, f: &F, t: f64, y: &[f64]) {
    let n = sol.dim;
    sol.t.push(t);
    sol.y.extend_from_slice(y);
    let start = sol.f.len();
    sol.f.resize(start + n, 0.0);
    f(y, &mut sol.f[start..start + n]);
}

fn rk4<F: Fn(&[f64], &mut [f64])>(
    f: &F,
    sol: &mut Solution,
    t0: f64,
    t: f64,
    cfg: &FlowConfig,
) -> Result<()> {
    let n = sol.dim;
    let steps = (t.abs() / cfg.max_step).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut y = sol.y.clone();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for s in 0..steps {
        f(&y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        f(&tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let tn = if s + 1 == steps { t0 + t } else { t0 + (s + 1) as f64 * h };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                last_time: sol.t_end(),
                reason: "state became non-finite".into(),
            });
        }
        push_node(sol, f, tn, &y);
    }
    Ok(())
}

fn dopri5<F: Fn(&[f64], &mut [f64])>(
    f: &F,
    sol: &mut Solution,
    t0: f64,
    t: f64,
    cfg: &FlowConfig,
) -> Result<()> {
    let n = sol.dim;
    let dir = t.signum();
    let t_final = t0 + t;
    let mut y = sol.y.clone();
    let mut k1 = sol.f.clone();
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut tc = t0;
    let mut h = cfg.max_step.min(t.abs());
    loop {
        let remaining = (t_final - tc) * dir;
        if remaining <= 0.0 {
            break;
        }
        let mut last = false;
        if h >= remaining || remaining - h <= 1e-12 * t_final.abs().max(1.0) {
            h = remaining;
            last = true;
        }
        if !last && h <= 1e-14 * tc.abs().max(1.0) {
            return Err(Error::Integration {
                last_time: tc,
                reason: format!("step size underflow (h = {h:.3e})"),
            });
        }
        let hs = h * dir;
        for i in 0..n {
            tmp[i] = y[i] + hs * A21 * k1[i];
        }
        f(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        f(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(&tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(&tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i]
                + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(&tmp, &mut k6);
        for i in 0..n {
            y_new[i] = y[i]
                + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f(&y_new, &mut k7);
        let mut err = 0.0;
        for i in 0..n {
            let e = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = cfg.tol + cfg.tol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            h *= MIN_FACTOR;
            continue;
        }
        if err <= 1.0 {
            tc = if last { t_final } else { tc + hs };
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            sol.t.push(tc);
            sol.y.extend_from_slice(&y);
            sol.f.extend_from_slice(&k1);
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h = (h * factor).min(cfg.max_step);
            if last {
                break;
            }
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn dopri_harmonic_oscillator() {
        let sol = integrate(oscillator, &[1.0, 0.0], 0.0, 10.0, &FlowConfig::default()).unwrap();
        let y = sol.final_state();
        assert_eq!(sol.t_end(), 10.0);
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn rk4_fixed_harmonic_oscillator() {
        let sol = integrate(oscillator, &[1.0, 0.0], 0.0, 3.0, &FlowConfig::rk4(1e-3)).unwrap();
        assert!((sol.final_state()[0] - 3f64.cos()).abs() < 1e-11);
    }

    #[test]
    fn backward_integration() {
        let sol = integrate(oscillator, &[1.0, 0.0], 0.0, -2.0, &FlowConfig::default()).unwrap();
        assert!((sol.final_state()[0] - 2f64.cos()).abs() < 1e-9);
        assert!((sol.final_state()[1] - 2f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_between_nodes() {
        let sol = integrate(oscillator, &[1.0, 0.0], 0.0, 5.0, &FlowConfig::default()).unwrap();
        let mut out = [0.0; 2];
        for k in 0..50 {
            let t = 0.0977 * k as f64;
            sol.eval(t, &mut out);
            assert!((out[0] - t.cos()).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn blow_up_reports_last_time() {
        let r = integrate(|y, dy| dy[0] = y[0] * y[0], &[1.0], 0.0, 2.0, &FlowConfig::default());
        match r {
            Err(Error::Integration { last_time, .. }) => assert!(last_time < 1.0 && last_time > 0.9),
            other => panic!("unexpected {other:?}"),
        }
    }
}
