use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::eigen::EigenTable;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `S(x) = Σ_{n≤x} λ_F(n)λ_G(n)` sampled at checkpoints, with log-log fits.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialSumReport {
    pub checkpoints: Vec<usize>,
    pub sums: Vec<f64>,
    /// Least-squares slope of `ln|S(x)|` against `ln x`, over checkpoints
    /// with `S(x) ≠ 0`. Needs at least two such points.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// For `F = G`: the least-squares `ĉ` in `S(x) ≈ ĉ·x`.
    pub linear_coeff: Option<f64>,
}

/// `count` checkpoints spaced evenly in `ln x` between `lo` and `hi`,
/// rounded and deduplicated.
pub fn log_spaced_checkpoints(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if count == 0 || hi < lo || lo == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![hi];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .map(|x| x.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

pub fn partial_sum_experiment<S: Scalar>(
    tf: &EigenTable<S>,
    tg: &EigenTable<S>,
    checkpoints: &[usize],
) -> Result<PartialSumReport> {
    let mut xs: Vec<usize> = checkpoints.iter().copied().filter(|&x| x > 0).collect();
    xs.sort_unstable();
    xs.dedup();
    let Some(&top) = xs.last() else {
        return Ok(PartialSumReport::default());
    };
    let have = tf.cutoff().min(tg.cutoff());
    if top > have {
        return Err(Error::CutoffTooSmall { have, need: top });
    }
    let mut sums = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    let mut next = xs.iter().peekable();
    for (n, (a, b)) in tf.values().iter().zip(tg.values()).take(top).enumerate() {
        acc += a.to_f64() * b.to_f64();
        while next.next_if(|&&x| x == n + 1).is_some() {
            sums.push(acc);
        }
    }
    let points: Vec<(f64, f64)> = xs
        .iter()
        .zip(&sums)
        .filter(|(_, s)| **s != 0.0)
        .map(|(&x, s)| ((x as f64).ln(), s.abs().ln()))
        .collect();
    let (slope, intercept) = match least_squares(&points) {
        Some((m, c)) => (Some(m), Some(c)),
        None => (None, None),
    };
    let same = std::ptr::eq(tf, tg) || tf == tg;
    let linear_coeff = same.then(|| {
        let sx: f64 = xs.iter().zip(&sums).map(|(&x, s)| x as f64 * s).sum();
        let xx: f64 = xs.iter().map(|&x| (x as f64).powi(2)).sum();
        sx / xx
    });
    Ok(PartialSumReport {
        checkpoints: xs,
        sums,
        slope,
        intercept,
        linear_coeff,
    })
}

fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let m = sxy / sxx;
    Some((m, my - m * mx))
}

#[derive(Serialize)]
struct CurveRow {
    x: usize,
    sum: f64,
    sum_over_x: f64,
}

/// Writes the `S(x)` curve as CSV with columns `x,sum,sum_over_x`.
pub fn write_curve_csv<W: Write>(report: &PartialSumReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (&x, &sum) in report.checkpoints.iter().zip(&report.sums) {
        w.serialize(CurveRow {
            x,
            sum,
            sum_over_x: sum / x as f64,
        })
        .map_err(|e| Error::OutOfRange(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(n: usize) -> EigenTable<f64> {
        EigenTable::from_values(vec![1.0; n])
    }

    #[test]
    fn empty_checkpoints() {
        let t = ones(10);
        assert_eq!(partial_sum_experiment(&t, &t, &[]).unwrap(), PartialSumReport::default());
    }

    #[test]
    fn constant_coefficients_are_linear() {
        let t = ones(10_000);
        let r = partial_sum_experiment(&t, &t, &log_spaced_checkpoints(10, 10_000, 12)).unwrap();
        assert!((r.slope.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.linear_coeff.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(*r.sums.last().unwrap(), 10_000.0);
    }

    #[test]
    fn distinct_tables_have_no_linear_coefficient() {
        let f = ones(100);
        let g = EigenTable::from_values((1..=100).map(|n| if n % 2 == 0 { -1.0 } else { 1.0 }).collect());
        let r = partial_sum_experiment(&f, &g, &[3, 10, 51]).unwrap();
        assert_eq!(r.sums, vec![1.0, 0.0, 1.0]);
        assert!(r.linear_coeff.is_none());
    }

    #[test]
    fn cutoff_is_checked() {
        let t = ones(10);
        assert!(matches!(
            partial_sum_experiment(&t, &t, &[11]),
            Err(Error::CutoffTooSmall { have: 10, need: 11 })
        ));
    }

    #[test]
    fn checkpoints_are_log_spaced() {
        assert_eq!(log_spaced_checkpoints(1, 1000, 4), vec![1, 10, 100, 1000]);
        assert!(log_spaced_checkpoints(5, 4, 3).is_empty());
    }

    #[test]
    fn csv_curve() {
        let t = ones(100);
        let r = partial_sum_experiment(&t, &t, &[10, 100]).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,sum,sum_over_x\n10,10.0,1.0\n100,100.0,1.0\n");
    }
}
