use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{first_maxwell_time, MaxwellQuery, MaxwellResult};
use crate::catalog::StratumKind;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::flows::{fmt17, FlowConfig, HamiltonianSpec};
use crate::lie::{Covector, LieAlgebra};
use crate::symmetry::VerifiedSymmetry;

/// One covector of a sweep and its outcome.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub p: Covector,
    pub result: Result<MaxwellResult>,
}

/// Parses `start:stop:count` per coordinate, comma-separated, into the
/// Cartesian product in row-major order (last coordinate fastest).
pub fn parse_p_grid(spec: &str, n: usize) -> Result<Vec<Covector>> {
    let axes: Vec<&str> = spec.split(',').map(str::trim).collect();
    if axes.len() != n {
        return Err(Error::Parse(format!("p-grid has {} axes, the algebra has dimension {n}", axes.len())));
    }
    let mut values = Vec::with_capacity(n);
    for axis in axes {
        let parts: Vec<&str> = axis.split(':').collect();
        let bad = || Error::Parse(format!("p-grid axis `{axis}` is not start:stop:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let axis_values: Vec<f64> = if count == 1 {
            vec![start]
        } else {
            (0..count)
                .map(|k| if k + 1 == count { stop } else { start + (stop - start) * k as f64 / (count - 1) as f64 })
                .collect()
        };
        values.push(axis_values);
    }
    let mut points = vec![Vec::with_capacity(n)];
    for axis in &values {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |x| {
                    let mut next = prefix.clone();
                    next.push(*x);
                    next
                })
            })
            .collect();
    }
    Ok(points.into_iter().map(Covector::from).collect())
}

/// Runs one Maxwell query per covector. Row order matches `ps`.
#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    algebra: &LieAlgebra,
    v: &VerifiedSymmetry,
    h: &HamiltonianSpec,
    ps: &[Covector],
    t_max_search: f64,
    grid_step: f64,
    strata: Option<StratumKind>,
    cfg: &FlowConfig,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    exec.map(ps, |p| {
        let q = MaxwellQuery::new(v.clone(), h.clone(), p.clone(), t_max_search)
            .with_grid_step(grid_step)
            .with_strata(strata);
        SweepRow {
            p: p.clone(),
            result: first_maxwell_time(algebra, &q, cfg),
        }
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `p_1..p_n,t_max,residual,distinct,stratum,error`.
pub fn sweep_csv(rows: &[SweepRow], n: usize) -> String {
    let mut out = String::new();
    for i in 1..=n {
        let _ = write!(out, "p_{i},");
    }
    out.push_str("t_max,residual,distinct,stratum,error\n");
    for row in rows {
        for x in row.p.as_slice() {
            out.push_str(&fmt17(*x));
            out.push(',');
        }
        match &row.result {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},",
                    fmt17(r.time),
                    fmt17(r.fixed_point_residual),
                    r.distinct,
                    r.stratum.map_or("", |s| s.label())
                );
            }
            Err(e) => {
                let _ = writeln!(out, ",,,,{}", csv_field(&e.to_string()));
            }
        }
    }
    out
}

/// Counts of stratum labels over rows with a finite Maxwell time.
pub fn stratum_histogram(rows: &[SweepRow]) -> BTreeMap<String, usize> {
    let mut hist = BTreeMap::new();
    for row in rows {
        if let Ok(r) = &row.result {
            if r.is_finite() {
                let label = r.stratum.map_or("unclassified", |s| s.label());
                *hist.entry(label.to_string()).or_insert(0) += 1;
            }
        }
    }
    hist
}

/// Gnuplot script plotting `t_max` against each covector coordinate.
pub fn gnuplot_script(csv_name: &str, n: usize) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\nset ylabel 't_max'\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    for i in 1..=n {
        let _ = writeln!(s, "set output 'tmax_vs_p{i}.png'\nset xlabel 'p_{i}'");
        let _ = writeln!(
            s,
            "plot '{csv_name}' using {i}:(strcol({})eq'inf' ? NaN : column({})) with points pt 7 ps 0.5",
            n + 1,
            n + 1
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_product_order() {
        let ps = parse_p_grid("0:1:2, 5:5:1, -1:1:3", 3).unwrap();
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0].to_vec(), vec![0.0, 5.0, -1.0]);
        assert_eq!(ps[1].to_vec(), vec![0.0, 5.0, 0.0]);
        assert_eq!(ps[5].to_vec(), vec![1.0, 5.0, 1.0]);
    }

    #[test]
    fn malformed_grids() {
        assert!(matches!(parse_p_grid("0:1", 1), Err(Error::Parse(_))));
        assert!(matches!(parse_p_grid("0:1:2", 2), Err(Error::Parse(_))));
        assert!(matches!(parse_p_grid("0:1:0", 1), Err(Error::Parse(_))));
        assert!(matches!(parse_p_grid("a:1:2", 1), Err(Error::Parse(_))));
    }

    #[test]
    fn error_rows_are_quoted() {
        let rows = vec![SweepRow {
            p: Covector::new(&[1.0]),
            result: Err(Error::Argument("a, b".into())),
        }];
        let csv = sweep_csv(&rows, 1);
        assert_eq!(csv.lines().nth(1).unwrap(), "1.0000000000000000e0,,,,,\"argument error: a, b\"");
    }
}
