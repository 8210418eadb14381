//! Gauss–Legendre rules and the spherical product grid built on them.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Polar-node counts available from the shared rule cache.
pub const LADDER: [usize; 8] = [128, 256, 512, 1024, 2048, 4096, 8192, 16384];

static RULES: [OnceLock<GaussLegendre>; LADDER.len()] = [const { OnceLock::new() }; LADDER.len()];

/// Shared rule for ladder rung `index`, computed once.
pub fn cached_rule(index: usize) -> &'static GaussLegendre {
    RULES[index].get_or_init(|| GaussLegendre::new(LADDER[index]))
}

/// Smallest ladder rung with at least `n` nodes.
pub fn rung_for(n: usize) -> Option<usize> {
    LADDER.iter().position(|&m| m >= n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_rules_match_tables() {
        let r = GaussLegendre::new(2);
        assert_abs_diff_eq!(r.nodes[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-14);
        let r = GaussLegendre::new(3);
        assert_abs_diff_eq!(r.nodes[2], 0.6f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[1], 8.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let r = GaussLegendre::new(10);
        // degree 19 is the limit of a 10-node rule
        assert_abs_diff_eq!(r.integrate(|x| x.powi(18)), 2.0 / 19.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.integrate(|x| x.powi(19)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn large_rules_stay_accurate() {
        let r = cached_rule(3);
        assert_eq!(r.len(), 1024);
        assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
        // ∫ cos(kx) dx = 2 sin(k)/k
        let k = 700.0;
        assert_abs_diff_eq!(r.integrate(|x| (k * x).cos()), 2.0 * k.sin() / k, epsilon = 1e-12);
    }

    #[test]
    fn ladder_lookup() {
        assert_eq!(rung_for(1), Some(0));
        assert_eq!(rung_for(129), Some(1));
        assert_eq!(rung_for(20000), None);
    }
}
