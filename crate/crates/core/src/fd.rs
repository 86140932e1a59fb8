//! Finite-difference stencils.

/// Fornberg weights for the `order`-th derivative at `x0` from samples at `xs`.
pub fn fornberg_weights(x0: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > order, "need more nodes than derivative order");
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
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
    c.into_iter().map(|row| row[order]).collect()
}

/// Fourth-order central first derivative.
#[inline]
pub fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central second derivative.
#[inline]
pub fn d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

/// Which side of `x0` a one-sided stencil may sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Both,
    Right,
    Left,
}

/// Derivative of arbitrary order with `order + 4` nodes spaced by `h`.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x0: f64, order: usize, h: f64, side: Side) -> f64 {
    let m = order + 4;
    let xs: Vec<f64> = match side {
        Side::Both => {
            let half = (m / 2) as i64;
            (-half..=half).map(|k| x0 + k as f64 * h).collect()
        }
        Side::Right => (0..m).map(|k| x0 + k as f64 * h).collect(),
        Side::Left => (0..m).map(|k| x0 - k as f64 * h).collect(),
    };
    let w = fornberg_weights(x0, &xs, order);
    xs.iter().zip(&w).map(|(&x, &c)| c * f(x)).sum()
}
