//! Quadrature helpers: Gauss-Legendre panels, their cumulative-integration
//! matrices, and the periodic trapezoid rule.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A Gauss-Legendre rule on `[-1, 1]` with the matrix `S` such that
/// `int_{-1}^{x_j} f ~= sum_l S[j][l] f(x_l)`.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub cumulative: Vec<Vec<f64>>,
}

impl PanelRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        // integrate each Lagrange basis polynomial from -1 to x_j with a rule
        // that is exact for degree n - 1
        let (gx, gw) = gauss_legendre(n);
        let mut cumulative = vec![vec![0.0; n]; n];
        for j in 0..n {
            let half = 0.5 * (nodes[j] + 1.0);
            for (g, gwk) in gx.iter().zip(&gw) {
                let s = -1.0 + half * (g + 1.0);
                for l in 0..n {
                    cumulative[j][l] += half * gwk * lagrange(&nodes, l, s);
                }
            }
        }
        Self {
            nodes,
            weights,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn lagrange(nodes: &[f64], l: usize, s: f64) -> f64 {
    let mut v = 1.0;
    for (m, xm) in nodes.iter().enumerate() {
        if m != l {
            v *= (s - xm) / (nodes[l] - xm);
        }
    }
    v
}

/// Panel decomposition of an interval: node positions and weights.
#[derive(Debug, Clone, Default)]
pub struct PanelGrid {
    /// Panel end points, increasing.
    pub edges: Vec<f64>,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl PanelGrid {
    /// Splits `[a, b]` at `breaks` (increasing, inside `(a, b)`) and then so
    /// that no panel exceeds `max_width(midpoint)`.
    pub fn build(
        a: f64,
        b: f64,
        breaks: &[f64],
        rule: &PanelRule,
        max_width: impl Fn(f64) -> f64,
    ) -> Self {
        let mut knots = vec![a];
        knots.extend(breaks.iter().copied().filter(|&v| v > a && v < b));
        knots.push(b);
        let mut edges = vec![a];
        for win in knots.windows(2) {
            let (mut lo, hi) = (win[0], win[1]);
            while lo < hi {
                let mut width = max_width(lo).min(hi - lo);
                // keep the last piece from being a sliver
                if hi - lo - width < 0.25 * width {
                    width = hi - lo;
                } else {
                    width = max_width(lo + 0.5 * width).min(width).max(1e-9);
                }
                let next = if hi - (lo + width) < 1e-12 { hi } else { lo + width };
                edges.push(next);
                lo = next;
            }
        }
        let mut g = PanelGrid {
            edges,
            ..Default::default()
        };
        for win in g.edges.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            let half = 0.5 * (hi - lo);
            for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
                g.x.push(lo + half * (t + 1.0));
                g.w.push(half * wt);
            }
        }
        g
    }

    pub fn panels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.x.iter().zip(&self.w).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Mean of a `2 pi`-periodic function by the trapezoid rule with `m` nodes.
pub fn periodic_mean(m: usize, f: impl Fn(f64) -> f64) -> f64 {
    let mut s = 0.0;
    for j in 0..m {
        s += f(-PI + 2.0 * PI * j as f64 / m as f64);
    }
    s / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_matrix_integrates_exponential() {
        let r = PanelRule::new(16);
        for j in 0..16 {
            let s: f64 = (0..16).map(|l| r.cumulative[j][l] * r.nodes[l].exp()).sum();
            let want = r.nodes[j].exp() - (-1f64).exp();
            assert!((s - want).abs() < 1e-14);
        }
    }

    #[test]
    fn panel_grid_respects_breaks() {
        let r = PanelRule::new(8);
        let g = PanelGrid::build(0.0, 10.0, &[3.3], &r, |_| 0.7);
        assert!(g.edges.contains(&3.3));
        assert!((g.w.iter().sum::<f64>() - 10.0).abs() < 1e-12);
        assert!((g.integrate(|x| x.cos()) - 10f64.sin()).abs() < 1e-13);
    }
}
