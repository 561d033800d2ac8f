//! Small fixed-rule quadratures shared by the grid and weight builders.

/// Five-point Gauss–Legendre nodes on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre5<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite five-point Gauss–Legendre rule with `panels` equal panels.
pub fn gauss_composite<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| gauss_legendre5(a + k as f64 * h, a + (k + 1) as f64 * h, &f))
        .sum()
}

/// Running integral `I[k] = ∫_{x_0}^{x_k} f` over arbitrary ordered nodes,
/// with one five-point Gauss–Legendre rule per interval (exact through
/// degree nine, so polynomial behaviour near an endpoint is captured even
/// on the first few intervals).
pub fn cumulative_gauss<F: Fn(f64) -> f64>(x: &[f64], f: F) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.extend(x.first().map(|_| 0.0));
    for pair in x.windows(2) {
        acc += gauss_legendre5(pair[0], pair[1], &f);
        out.push(acc);
    }
    out
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, intervals: usize, f: F) -> f64 {
    let m = (intervals.max(2) + 1) & !1;
    let h = (b - a) / m as f64;
    let mut sum = f(a) + f(b);
    for k in 1..m {
        let x = a + k as f64 * h;
        sum += if k % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    sum * h / 3.0
}

/// Running Simpson integral on a uniform node set `f[0..]` with spacing `h`.
///
/// Returns `I[k] = ∫_{x_0}^{x_k} f`. Even nodes are reached by whole Simpson
/// panels; odd nodes add a single-interval cubic correction
/// `h/24 (9 f_{k-1} + 19 f_k - 5 f_{k+1} + f_{k+2})` to the preceding even
/// node (mirrored at the right end), so odd and even nodes share the same
/// order and no error compounds along odd nodes. The node count must be odd.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(
        n >= 3 && n % 2 == 1,
        "cumulative Simpson needs an odd node count >= 3"
    );
    let mut out = vec![0.0; n];
    let mut k = 2;
    while k < n {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
        out[k - 1] = out[k - 2]
            + if k + 1 < n {
                h / 24.0 * (9.0 * f[k - 2] + 19.0 * f[k - 1] - 5.0 * f[k] + f[k + 1])
            } else if k >= 3 {
                h / 24.0 * (-f[k - 3] + 13.0 * f[k - 2] + 13.0 * f[k - 1] - f[k])
            } else {
                h / 12.0 * (5.0 * f[k - 2] + 8.0 * f[k - 1] - f[k])
            };
        k += 2;
    }
    out
}

/// Gamma function at half-integers `m / 2`, `m >= 1`.
pub fn gamma_half_integer(m: usize) -> f64 {
    assert!(m >= 1);
    let (mut g, mut x) = if m.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    let target = m as f64 / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Area of the unit `(n-1)`-sphere, `2 π^{n/2} / Γ(n/2)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        let v = simpson(0.0, 2.0, 4, |x| x * x * x - x);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_exact_on_cubics_at_every_node() {
        let h = 0.25;
        let f: Vec<f64> = (0..9).map(|k| (k as f64 * h).powi(3)).collect();
        for (k, v) in cumulative_simpson(&f, h).iter().enumerate() {
            assert!((v - (k as f64 * h).powi(4) / 4.0).abs() < 1e-14, "node {k}");
        }
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let h = 0.01;
        let f: Vec<f64> = (0..201).map(|k| (k as f64 * h).sin()).collect();
        let i = cumulative_simpson(&f, h);
        for (k, v) in i.iter().enumerate() {
            let exact = 1.0 - (k as f64 * h).cos();
            assert!((v - exact).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn cumulative_gauss_on_polynomials() {
        let x: Vec<f64> = (0..11).map(|k| 0.1 * k as f64).collect();
        let i = cumulative_gauss(&x, |s| s.powi(7));
        for (k, v) in i.iter().enumerate() {
            assert!((v - x[k].powi(8) / 8.0).abs() < 1e-16);
        }
    }

    #[test]
    fn gauss_five_point_degree_nine() {
        let v = gauss_legendre5(0.0, 1.0, |x| x.powi(9));
        assert!((v - 0.1).abs() < 1e-15);
    }
}
