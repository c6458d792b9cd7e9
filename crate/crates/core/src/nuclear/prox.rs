//! Proximal map of `mu * ||·||_β` on a coefficient column, via the Moreau
//! identity `prox(c) = c - P(c)` with `P` the projection onto the radius-mu
//! ball of the conjugate norm `||·||_α`. Everything acts on moduli; phases
//! are kept.

use crate::spectral::Exponent;
use crate::tensor::C64;

const MAX_STEPS: usize = 200;

fn with_moduli(c: &[C64], moduli: &[f64]) -> Vec<C64> {
    c.iter()
        .zip(moduli)
        .map(|(&x, &m)| if x.norm() == 0.0 { C64::new(0.0, 0.0) } else { x * (m / x.norm()) })
        .collect()
}

fn soft(c: &[C64], mu: f64) -> Vec<C64> {
    let m: Vec<f64> = c.iter().map(|x| (x.norm() - mu).max(0.0)).collect();
    with_moduli(c, &m)
}

/// Projection of nonnegative `x` onto `{y : ||y||_1 <= mu}`.
fn project_l1(x: &[f64], mu: f64) -> Vec<f64> {
    if x.iter().sum::<f64>() <= mu {
        return x.to_vec();
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - mu) / (k + 1) as f64;
        if t < v {
            tau = t;
        }
    }
    x.iter().map(|v| (v - tau).max(0.0)).collect()
}

/// Solve `y + nu * y^(q-1) = x` on `[0, x]` by safeguarded Newton.
fn coordinate(x: f64, nu: f64, q: f64) -> f64 {
    if x == 0.0 || nu == 0.0 {
        return x;
    }
    let (mut lo, mut hi) = (0.0, x);
    let mut y = x / (1.0 + nu * x.powf(q - 2.0)).max(1.0);
    for _ in 0..MAX_STEPS {
        let p = y.powf(q - 2.0);
        let h = y + nu * p * y - x;
        if h > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let dh = 1.0 + nu * (q - 1.0) * p;
        let mut next = y - h / dh;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-16 * x || hi - lo <= 1e-16 * x {
            return next;
        }
        y = next;
    }
    y
}

/// Projection of nonnegative `x` onto `{y : ||y||_p <= mu}` for `1 < p < ∞`.
/// Coordinates solve `y + nu * y^(p-1) = x_i`; the multiplier `nu` is found
/// by regula falsi (Illinois variant) on `||y(nu)||_p - mu`.
fn project_lp(x: &[f64], mu: f64, p: Exponent) -> Vec<f64> {
    if p.norm(x) <= mu {
        return x.to_vec();
    }
    let q = p.value();
    let at = |nu: f64| -> Vec<f64> { x.iter().map(|&xi| coordinate(xi, nu, q)).collect() };
    let gap = |nu: f64| p.norm(&at(nu)) - mu;
    let (mut a, mut fa) = (0.0, gap(0.0));
    let mut b = 1.0;
    let mut fb = gap(b);
    while fb > 0.0 && b < 1e300 {
        a = b;
        fa = fb;
        b *= 4.0;
        fb = gap(b);
    }
    let mut side = 0;
    for _ in 0..MAX_STEPS {
        let c = if fa == fb { 0.5 * (a + b) } else { (a * fb - b * fa) / (fb - fa) };
        let fc = gap(c);
        if fc.abs() <= 1e-15 * mu || (b - a).abs() <= 1e-15 * b {
            return at(c);
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    at(b)
}

/// `argmin_l ||l||_β + (1 / 2mu) ||c - l||²`.
pub(crate) fn prox(c: &[C64], mu: f64, beta: Exponent) -> Vec<C64> {
    if c.len() == 1 || beta == Exponent::ONE {
        return soft(c, mu);
    }
    if beta == Exponent::TWO {
        let n = beta.norm_c(c);
        let f = if n > mu { 1.0 - mu / n } else { 0.0 };
        return c.iter().map(|x| x * f).collect();
    }
    let x: Vec<f64> = c.iter().map(|v| v.norm()).collect();
    let y = if beta.is_infinite() {
        project_l1(&x, mu)
    } else {
        project_lp(&x, mu, beta.conjugate())
    };
    let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - b).max(0.0)).collect();
    with_moduli(c, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn objective(l: &[C64], c: &[C64], mu: f64, beta: Exponent) -> f64 {
        beta.norm_c(l) + c.iter().zip(l).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / (2.0 * mu)
    }

    #[test]
    fn closed_forms() {
        let c = [C64::new(3.0, 0.0), C64::new(-1.0, 0.0)];
        let l = prox(&c, 2.0, Exponent::ONE);
        assert_eq!(l, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let l = prox(&c, 1.0, Exponent::INF);
        // moduli min(|c_i|, tau) with (3 - tau) = 1 -> tau = 2
        assert!((l[0].re - 2.0).abs() < 1e-15 && (l[1].re + 1.0).abs() < 1e-15);
        let l = prox(&c, 100.0, Exponent::TWO);
        assert!(l.iter().all(|x| x.norm() == 0.0));
    }

    fn cols() -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b)), 2..4)
    }

    proptest! {
        #[test]
        fn prox_beats_perturbations(c in cols(), mu in 0.05..2.0f64,
            b in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY]),
            dir in cols()) {
            let beta = Exponent::new(b).unwrap();
            let l = prox(&c, mu, beta);
            let best = objective(&l, &c, mu, beta);
            for t in [1e-3, -1e-3, 1e-2] {
                let p: Vec<C64> = l.iter().zip(dir.iter().cycle()).map(|(x, d)| x + d * t).collect();
                prop_assert!(objective(&p, &c, mu, beta) >= best - 1e-9);
            }
        }
    }
}
