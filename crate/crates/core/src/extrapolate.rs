//! Limits of sequences sampled at a few `n`, and log-log decay fits.

use serde::Serialize;

/// How an extrapolated value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Richardson with the order observed from the last three levels.
    ObservedOrder,
    /// First-order Richardson in `1/n` from the last two levels.
    FirstOrder,
    /// The last value, with the last difference as error bar.
    LastValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    pub error: f64,
    pub order: Option<f64>,
    pub monotone: bool,
    pub method: Method,
}

/// Relative size below which successive differences count as round-off.
const NOISE: f64 = 1e-12;

/// Extrapolates `values[i] ≈ v(ns[i])` to `n → ∞`.
///
/// Three or more levels with a constant refinement ratio use the observed
/// convergence order. Non-monotone data and stalled differences fall back to
/// the last value; two levels use first-order Richardson in `1/n`.
pub fn richardson(ns: &[usize], values: &[f64]) -> Extrapolation {
    assert_eq!(ns.len(), values.len(), "one value per n");
    assert!(!values.is_empty(), "nothing to extrapolate");
    let m = values.len();
    let last = values[m - 1];
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let monotone = values.windows(3).all(|w| (w[1] - w[0]) * (w[2] - w[1]) >= 0.0);
    let fallback = |error: f64| Extrapolation {
        value: last,
        error,
        order: None,
        monotone,
        method: Method::LastValue,
    };
    if m == 1 {
        return fallback(f64::INFINITY);
    }
    let d2 = last - values[m - 2];
    if d2.abs() <= NOISE * scale {
        return fallback(d2.abs());
    }
    let (n1, n2) = (ns[m - 2] as f64, ns[m - 1] as f64);
    if m == 2 {
        let value = (n2 * last - n1 * values[m - 2]) / (n2 - n1);
        return Extrapolation {
            value,
            error: (value - last).abs(),
            order: Some(1.0),
            monotone,
            method: Method::FirstOrder,
        };
    }
    let d1 = values[m - 2] - values[m - 3];
    let n0 = ns[m - 3] as f64;
    let ratio = n2 / n1;
    let geometric = ((n1 / n0) - ratio).abs() <= 1e-9 * ratio;
    if !monotone || d1 * d2 <= 0.0 || d2.abs() >= d1.abs() || !geometric {
        return fallback(d2.abs());
    }
    let order = (d1 / d2).ln() / ratio.ln();
    let value = last + d2 / (ratio.powf(order) - 1.0);
    Extrapolation {
        value,
        error: (value - last).abs(),
        order: Some(order),
        monotone,
        method: Method::ObservedOrder,
    }
}

/// Least-squares slope of `ln |r|` against `ln n` over residuals above `floor`.
/// `None` when fewer than two residuals clear the floor.
pub fn loglog_slope(ns: &[usize], residuals: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(residuals)
        .filter(|(_, r)| r.abs() > floor)
        .map(|(&n, r)| ((n as f64).ln(), r.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence() {
        let e = richardson(&[4, 8, 16], &[2.5, 2.5, 2.5]);
        assert_eq!(e.value, 2.5);
        assert_eq!(e.method, Method::LastValue);
    }

    #[test]
    fn recovers_power_law_limits() {
        let ns = [4, 8, 16, 32];
        for order in [0.3, 1.0, 2.0] {
            let v: Vec<f64> = ns.iter().map(|&n| 1.0 + 3.0 * (n as f64).powf(-order)).collect();
            let e = richardson(&ns, &v);
            assert!((e.value - 1.0).abs() < 1e-10, "order {order}: {}", e.value);
            assert!((e.order.unwrap() - order).abs() < 1e-10);
        }
    }

    #[test]
    fn two_levels_use_first_order() {
        let e = richardson(&[10, 20], &[1.1, 1.05]);
        assert!((e.value - 1.0).abs() < 1e-12);
        assert_eq!(e.method, Method::FirstOrder);
    }

    #[test]
    fn nonmonotone_falls_back() {
        let e = richardson(&[4, 8, 16], &[1.0, 0.5, 0.7]);
        assert_eq!(e.method, Method::LastValue);
        assert!(!e.monotone);
        assert!((e.error - 0.2).abs() < 1e-12);
    }

    #[test]
    fn slope_of_inverse_square() {
        let ns = [4, 8, 16, 32];
        let r: Vec<f64> = ns.iter().map(|&n| 5.0 / (n * n) as f64).collect();
        assert!((loglog_slope(&ns, &r, 0.0).unwrap() + 2.0).abs() < 1e-12);
        assert!(loglog_slope(&ns, &[1e-20, 1e-20, 1e-3, 1e-20], 1e-15).is_none());
    }
}
