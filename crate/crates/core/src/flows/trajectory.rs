use std::fmt::Write as _;

use serde::Serialize;

use super::{check_size, coupled_rhs, integrate, pack, unpack, FlowConfig, HamiltonianSpec, Solution};
use crate::error::{Error, Result};
use crate::lie::{CotangentPoint, Covector, GroupPoint, LieAlgebra, Side};

/// A flow integrated once, with dense evaluation in between accepted steps.
#[derive(Clone, Debug)]
pub struct DenseFlow {
    solution: Solution,
    side: Side,
    n: usize,
    m: usize,
}

impl DenseFlow {
    /// Integrates from `start` over `[0, t]`.
    pub fn new(
        algebra: &LieAlgebra,
        h: &HamiltonianSpec,
        start: &CotangentPoint,
        t: f64,
        cfg: &FlowConfig,
    ) -> Result<Self> {
        check_size(algebra)?;
        if h.dim() != algebra.dim() || start.covector().dim() != algebra.dim() {
            return Err(Error::Argument("dimension mismatch".into()));
        }
        let side = start.side();
        let y0 = pack(start.covector(), start.g());
        let solution = integrate(coupled_rhs(algebra, h, side), &y0, 0.0, t, cfg)?;
        Ok(Self {
            solution,
            side,
            n: algebra.dim(),
            m: algebra.rep_size(),
        })
    }

    /// Left flow from `(id, p0)`.
    pub fn left(
        algebra: &LieAlgebra,
        h: &HamiltonianSpec,
        p0: &Covector,
        t: f64,
        cfg: &FlowConfig,
    ) -> Result<Self> {
        Self::new(algebra, h, &CotangentPoint::at_identity(algebra, p0.clone(), Side::Left), t, cfg)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn t_end(&self) -> f64 {
        self.solution.t_end()
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (a, b) = (self.solution.t_start(), self.solution.t_end());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !(t >= lo && t <= hi) {
            return Err(Error::Argument(format!(
                "time {t} outside the integrated interval [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Interpolated state at `t`.
    pub fn eval(&self, algebra: &LieAlgebra, t: f64) -> Result<CotangentPoint> {
        self.check_time(t)?;
        let mut y = vec![0.0; self.n + self.m * self.m];
        self.solution.eval(t, &mut y);
        unpack(algebra, &y, self.side)
    }

    /// Interpolated group component at `t`.
    pub fn eval_group(&self, t: f64) -> Result<GroupPoint> {
        self.check_time(t)?;
        let mut y = vec![0.0; self.n + self.m * self.m];
        self.solution.eval(t, &mut y);
        GroupPoint::new(nalgebra::DMatrix::from_row_slice(self.m, self.m, &y[self.n..]))
    }

    /// State at `t` integrated from the nearest accepted step at or before
    /// `t`, avoiding interpolation error.
    pub fn exact_at(
        &self,
        algebra: &LieAlgebra,
        h: &HamiltonianSpec,
        t: f64,
        cfg: &FlowConfig,
    ) -> Result<CotangentPoint> {
        self.check_time(t)?;
        let k = self.solution.node_before(t);
        let t0 = self.solution.node_time(k);
        let y0 = self.solution.node_state(k);
        if t == t0 {
            return unpack(algebra, y0, self.side);
        }
        let sol = integrate(coupled_rhs(algebra, h, self.side), y0, t0, t - t0, cfg)?;
        unpack(algebra, sol.final_state(), self.side)
    }

    /// Samples at `0, step, 2·step, …`, always ending exactly at `t_end`.
    pub fn sample(&self, algebra: &LieAlgebra, step: f64) -> Result<Trajectory> {
        if !(step > 0.0) {
            return Err(Error::Argument("sampling step must be positive".into()));
        }
        let t_end = self.t_end();
        let dir = if t_end >= 0.0 { 1.0 } else { -1.0 };
        let count = (t_end.abs() / step).floor() as usize;
        let mut samples = Vec::with_capacity(count + 2);
        for k in 0..=count {
            let t = dir * k as f64 * step;
            if (t_end - t).abs() <= 1e-12 * step {
                break;
            }
            samples.push((t, self.eval(algebra, t)?));
        }
        let last = self.solution.final_state();
        samples.push((t_end, unpack(algebra, last, self.side)?));
        Ok(Trajectory {
            side: self.side,
            samples,
        })
    }
}

/// Time-ordered samples of a flow.
#[derive(Clone, Debug)]
pub struct Trajectory {
    side: Side,
    samples: Vec<(f64, CotangentPoint)>,
}

#[derive(Serialize)]
struct SampleJson {
    t: f64,
    p: Vec<f64>,
    g: Vec<f64>,
}

#[derive(Serialize)]
struct TrajectoryJson {
    side: Side,
    samples: Vec<SampleJson>,
}

/// 17 significant digits, round-trip exact.
pub fn fmt17(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    format!("{x:.16e}")
}

impl Trajectory {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn samples(&self) -> &[(f64, CotangentPoint)] {
        &self.samples
    }

    /// `t,p_1..p_n,g_11..g_mm` with row-major group entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let Some((_, first)) = self.samples.first() else {
            return out;
        };
        let n = first.covector().dim();
        let m = first.g().size();
        out.push('t');
        for i in 1..=n {
            let _ = write!(out, ",p_{i}");
        }
        for r in 1..=m {
            for c in 1..=m {
                let _ = write!(out, ",g_{r}{c}");
            }
        }
        out.push('\n');
        for (t, pt) in &self.samples {
            out.push_str(&fmt17(*t));
            for x in pt.covector().as_slice().iter().chain(pt.g().row_major().iter()) {
                out.push(',');
                out.push_str(&fmt17(*x));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = TrajectoryJson {
            side: self.side,
            samples: self
                .samples
                .iter()
                .map(|(t, pt)| SampleJson {
                    t: *t,
                    p: pt.covector().to_vec(),
                    g: pt.g().row_major(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("trajectory serializes")
    }
}
