//! Small numerical kernels shared across modules: compensated summation and
//! one-dimensional quadrature rules.

use statrs::function::gamma::ln_gamma;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Trapezoid rule on (possibly non-uniform) samples.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    assert_eq!(times.len(), values.len());
    let mut acc = CompensatedSum::new();
    for i in 1..times.len() {
        acc.add(0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]));
    }
    acc.value()
}

/// Running trapezoid integral, starting at zero on the first sample.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(times.len(), values.len());
    let mut out = Vec::with_capacity(times.len());
    let mut acc = CompensatedSum::new();
    for i in 0..times.len() {
        if i > 0 {
            acc.add(0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]));
        }
        out.push(acc.value());
    }
    out
}

/// Nodes and weights of an n-point Gauss rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1, 1],
/// built by the Golub–Welsch eigenvalue method.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> GaussRule {
    assert!(n >= 1, "a Gauss rule needs at least one node");
    assert!(alpha > -1.0 && beta > -1.0, "Jacobi parameters must exceed -1");
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        *d = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            let s = 2.0 * kf + ab;
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
    }
    for (k, o) in off.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
        let den = s * s * (s + 1.0) * (s - 1.0);
        *o = (num / den).sqrt();
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let (values, first) = symmetric_tridiagonal_eigen(diag, off);
    let mut pairs: Vec<(f64, f64)> = values
        .into_iter()
        .zip(first)
        .map(|(x, v)| (x, mu0 * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

pub fn gauss_legendre(n: usize) -> GaussRule {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Implicit QL with Wilkinson shifts. Returns eigenvalues and the first
/// component of each normalized eigenvector. `off[k]` couples k-1 and k.
fn symmetric_tridiagonal_eigen(mut d: Vec<f64>, off: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..(n - 1)].copy_from_slice(&off[1..n]);
    // only the first row of the eigenvector matrix is needed
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    let mut zrow: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            r
        })
        .collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 200, "tridiagonal eigen solver failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in zrow.iter_mut() {
                    let fz = row[i + 1];
                    row[i + 1] = s * row[i] + c * fz;
                    row[i] = c * row[i] - s * fz;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    for (k, zk) in z.iter_mut().enumerate() {
        *zk = zrow[0][k];
    }
    (d, z)
}

/// Adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    const XGK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WGK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];
    let panel = |lo: f64, hi: f64| -> (f64, f64) {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let fc = f(c);
        let mut k = WGK[7] * fc;
        let mut g = WG[3] * fc;
        for j in 0..7 {
            let x = h * XGK[j];
            let s = f(c - x) + f(c + x);
            k += WGK[j] * s;
            if j % 2 == 1 {
                g += WG[j / 2] * s;
            }
        }
        (k * h, ((k - g) * h).abs())
    };
    let mut stack = vec![(a, b, 0usize)];
    let mut total = CompensatedSum::new();
    let whole = panel(a, b).0.abs().max(f64::MIN_POSITIVE);
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = panel(lo, hi);
        let width_share = (hi - lo) / (b - a);
        if err <= rel_tol * whole * width_share.max(1e-3) || depth > 40 {
            total.add(val);
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    total.value()
}

/// Double-exponential (tanh-sinh) quadrature on (a, b); tolerates integrable
/// endpoint singularities. Levels are refined until successive estimates
/// agree to `rel_tol`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    // Evaluate with the distance to the nearer endpoint kept exact so that
    // singular integrands are never sampled at the endpoint itself.
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        // 1 - tanh(u) and 1 + tanh(u) without cancellation
        let e = (-2.0 * u.abs()).exp();
        let small = 2.0 * e / (1.0 + e);
        let (left, right) = if u >= 0.0 { (2.0 - small, small) } else { (small, 2.0 - small) };
        let x_from_a = half * left;
        let x_from_b = half * right;
        if x_from_a <= 0.0 || x_from_b <= 0.0 {
            return 0.0;
        }
        let x = if x_from_a < x_from_b { a + x_from_a } else { b - x_from_b };
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let t_max = 6.5;
    let mut h = 1.0;
    let mut acc = CompensatedSum::new();
    acc.add(eval(0.0));
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        acc.add(eval(t) + eval(-t));
        k += 1;
    }
    let mut estimate = half * h * acc.value();
    for _level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            acc.add(eval(t) + eval(-t));
            k += 2;
        }
        let next = half * h * acc.value();
        if (next - estimate).abs() <= rel_tol * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut values = vec![1.0e16];
        values.extend(std::iter::repeat(1.0).take(1000));
        values.push(-1.0e16);
        assert_eq!(compensated_sum(values), 1000.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(5);
        let integral: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(8))
            .sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_jacobi_matches_beta_moments() {
        // int_{-1}^{1} (1+x)^{-1/2} (1+x) dx = 2^{3/2} * 2 / 3
        let rule = gauss_jacobi(6, 0.0, -0.5);
        let integral: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * (1.0 + x))
            .sum();
        let exact = 2f64.powf(1.5) * 2.0 / 3.0;
        assert!((integral - exact).abs() < 1e-13, "{integral} vs {exact}");
    }

    #[test]
    fn kronrod_handles_gaussian() {
        let v = adaptive_gauss_kronrod(&|x: f64| (-x * x).exp(), 0.0, 12.0, 1e-12);
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let v = tanh_sinh(&|x: f64| x.powf(-0.75), 0.0, 1.0, 1e-13);
        assert!((v - 4.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let t = [0.0, 0.3, 1.0];
        let y = [1.0, 1.6, 3.0];
        assert!((trapezoid(&t, &y) - 2.0).abs() < 1e-15);
        assert_eq!(cumulative_trapezoid(&t, &y).len(), 3);
    }
}
