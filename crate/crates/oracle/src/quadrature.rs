//! Gauss rules built from scratch: Legendre polynomial roots bracketed by
//! sign changes, refined by bisection and polished with Newton steps.

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 1..n {
        let m = m as f64;
        let p2 = ((2.0 * m + 1.0) * x * p1 - m * p0) / (m + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        0.5 * n * (n + 1.0) * x.powi(n as i32 + 1)
    } else {
        n * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

fn roots_in(f: impl Fn(f64) -> f64, count: usize) -> Vec<f64> {
    let samples = 200 * (count + 1);
    let mut roots = Vec::with_capacity(count);
    let grid = |i: usize| -1.0 + 2.0 * i as f64 / samples as f64;
    for i in 0..samples {
        let (mut a, mut b) = (grid(i), grid(i + 1));
        let (mut fa, fb) = (f(a), f(b));
        if fa == 0.0 && i > 0 {
            roots.push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let fm = f(m);
            if fa * fm <= 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    assert_eq!(roots.len(), count, "root bracketing missed a root");
    roots
}

/// `n` point Gauss–Legendre rule on `[0, 1]` as `(nodes, weights)`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = roots_in(|x| legendre(n, x).0, n);
    for r in &mut x {
        for _ in 0..3 {
            let (p, dp) = legendre(n, *r);
            *r -= p / dp;
        }
    }
    let w: Vec<f64> = x
        .iter()
        .map(|&r| {
            let dp = legendre(n, r).1;
            1.0 / ((1.0 - r * r) * dp * dp)
        })
        .collect();
    (x.iter().map(|r| 0.5 * (r + 1.0)).collect(), w)
}

/// `k + 1` point Gauss–Lobatto rule on `[0, 1]`: endpoints plus the roots of
/// `P_k'`.
pub fn gauss_lobatto(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1);
    let mut x = vec![-1.0];
    x.extend(roots_in(|x| legendre(k, x).1, k - 1));
    x.push(1.0);
    let kk = (k * (k + 1)) as f64;
    let w: Vec<f64> = x
        .iter()
        .map(|&r| {
            let p = legendre(k, r).0;
            1.0 / (kk * p * p)
        })
        .collect();
    (x.iter().map(|r| 0.5 * (r + 1.0)).collect(), w)
}

/// Composite rule: `panels` equal panels of `order` Gauss points each.
pub fn composite(order: usize, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = 1.0 / panels as f64;
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for p in 0..panels {
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push((p as f64 + xi) * h);
            weights.push(wi * h);
        }
    }
    (nodes, weights)
}
