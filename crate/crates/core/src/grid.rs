//! Small numerical helpers shared by the basis and solver modules: uniform
//! grids, composite Simpson quadrature, local cubic interpolation and
//! Fornberg finite-difference weights.

/// `n + 1` equispaced points from `lo` to `hi` with both ends exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![lo];
    }
    let h = (hi - lo) / n as f64;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + i as f64 * h })
        .collect()
}

/// Composite Simpson rule on equispaced samples (odd count ≥ 3).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n >= 2 && n % 2 == 0);
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        if i % 2 == 1 {
            odd += values[i];
        } else {
            even += values[i];
        }
    }
    h / 3.0 * (values[0] + values[n] + 4.0 * odd + 2.0 * even)
}

/// Simpson value on the full grid together with the Richardson estimate
/// `|S_h − S_{2h}| / 15` of its error. Needs `len − 1` divisible by 4.
pub fn simpson_with_error(values: &[f64], h: f64) -> (f64, f64) {
    let n = values.len() - 1;
    debug_assert!(n % 4 == 0);
    let fine = simpson(values, h);
    let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = simpson(&coarse, 2.0 * h);
    (fine, (fine - coarse).abs() / 15.0)
}

/// Trapezoid rule on equispaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

/// Local cubic Lagrange interpolation of equispaced samples on `[lo, hi]`.
/// Falls back to linear interpolation with fewer than four samples.
pub fn interp_uniform(lo: f64, hi: f64, values: &[f64], x: f64) -> f64 {
    let n = values.len() - 1;
    if n == 0 {
        return values[0];
    }
    let h = (hi - lo) / n as f64;
    let s = ((x - lo) / h).clamp(0.0, n as f64);
    if n < 3 {
        let i = (s.floor() as usize).min(n - 1);
        let t = s - i as f64;
        return values[i] * (1.0 - t) + values[i + 1] * t;
    }
    let i = (s.floor() as usize).clamp(1, n - 2) - 1;
    let t = s - i as f64;
    if t == t.round() && (t as usize) <= 3 {
        return values[i + t as usize];
    }
    let (y0, y1, y2, y3) = (values[i], values[i + 1], values[i + 2], values[i + 3]);
    -y0 * (t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0 + y1 * t * (t - 2.0) * (t - 3.0) / 2.0
        - y2 * t * (t - 1.0) * (t - 3.0) / 2.0
        + y3 * t * (t - 1.0) * (t - 2.0) / 6.0
}

/// Fornberg's weights for the `m`-th derivative at `x0` from the nodes `xs`.
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let x = linspace(0.0, 2.0, 8);
        let v: Vec<f64> = x.iter().map(|t| t * t * t - t).collect();
        let (s, err) = simpson_with_error(&v, 0.25);
        assert!((s - 2.0).abs() < 1e-14);
        assert!(err < 1e-14);
    }

    #[test]
    fn cubic_interpolation_reproduces_cubics() {
        let x = linspace(0.0, PI, 10);
        let f = |t: f64| 2.0 * t * t * t - t + 1.0;
        let v: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        for &t in &[0.0, 0.1, 1.234, 3.0, PI] {
            assert!((interp_uniform(0.0, PI, &v, t) - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn fornberg_second_derivative() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.1).collect();
        let w = fd_weights(0.0, &xs, 2);
        let d2: f64 = xs.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((d2 - 1.0).abs() < 1e-4);
    }
}
