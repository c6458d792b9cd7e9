use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tensor::C64;

/// An exponent in `[1, ∞]`, used for the tuple norms `[·]_α` and `[·]_β★`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Hölder conjugate: `1/p + 1/q = 1`, pairing 1 with ∞.
    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INF
        } else if self.0.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    pub fn is_conjugate_of(self, other: Exponent) -> bool {
        let inv = |p: f64| if p.is_infinite() { 0.0 } else { 1.0 / p };
        (inv(self.0) + inv(other.0) - 1.0).abs() <= 1e-12
    }

    /// `(sum_i x_i^p)^(1/p)` over nonnegative `x`, or `max_i x_i` for `p = ∞`.
    pub fn norm(self, xs: &[f64]) -> f64 {
        let m = xs.iter().fold(0.0f64, |a, &b| a.max(b));
        if m == 0.0 || self.0.is_infinite() {
            return m;
        }
        if self.0 == 1.0 {
            return xs.iter().sum();
        }
        if self.0 == 2.0 {
            return m * xs.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt();
        }
        m * xs.iter().map(|x| (x / m).powf(self.0)).sum::<f64>().powf(1.0 / self.0)
    }

    /// p-norm of the moduli of a complex vector.
    pub fn norm_c(self, xs: &[C64]) -> f64 {
        let m: Vec<f64> = xs.iter().map(|x| x.norm()).collect();
        self.norm(&m)
    }

    /// A vector `w` with `sum_i w_i a_i = ||a||_p` and `||w||_q = 1` for the
    /// conjugate exponent `q`. Zero input gets the uniform vector of unit
    /// `q`-norm.
    pub fn holder_dual(self, a: &[C64]) -> Vec<C64> {
        let r = a.len();
        let total = self.norm_c(a);
        if total == 0.0 {
            let q = self.conjugate();
            let w = if q.is_infinite() { 1.0 } else { (r as f64).powf(-1.0 / q.0) };
            return vec![C64::new(w, 0.0); r];
        }
        let phase = |x: C64| if x.norm() == 0.0 { C64::new(0.0, 0.0) } else { x.conj() / x.norm() };
        if self.0.is_infinite() {
            let mut k = 0;
            for (i, x) in a.iter().enumerate() {
                if x.norm() > a[k].norm() {
                    k = i;
                }
            }
            let mut w = vec![C64::new(0.0, 0.0); r];
            w[k] = phase(a[k]);
            return w;
        }
        if self.0 == 1.0 {
            return a.iter().map(|&x| phase(x)).collect();
        }
        a.iter().map(|&x| phase(x) * (x.norm() / total).powf(self.0 - 1.0)).collect()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INF),
            other => {
                let p: f64 = other.parse().map_err(|_| Error::InvalidExponent(f64::NAN))?;
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conjugates() {
        assert_eq!(Exponent::ONE.conjugate(), Exponent::INF);
        assert_eq!(Exponent::INF.conjugate(), Exponent::ONE);
        assert_eq!(Exponent::TWO.conjugate(), Exponent::TWO);
        assert_eq!(Exponent::new(3.0).unwrap().conjugate().value(), 1.5);
        assert!(Exponent::new(3.0).unwrap().is_conjugate_of(Exponent::new(1.5).unwrap()));
        assert!(!Exponent::TWO.is_conjugate_of(Exponent::ONE));
    }

    #[test]
    fn parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::INF);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::TWO);
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        let j: Vec<Exponent> = serde_json::from_str(r#"[1, "inf", 2.5]"#).unwrap();
        assert_eq!(j[1], Exponent::INF);
        assert_eq!(serde_json::to_string(&j).unwrap(), r#"[1.0,"inf",2.5]"#);
    }

    #[test]
    fn norms() {
        let x = [3.0, 4.0];
        assert_eq!(Exponent::ONE.norm(&x), 7.0);
        assert_eq!(Exponent::TWO.norm(&x), 5.0);
        assert_eq!(Exponent::INF.norm(&x), 4.0);
        assert!((Exponent::new(3.0).unwrap().norm(&x) - 91f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(Exponent::TWO.norm(&[0.0, 0.0]), 0.0);
    }

    fn vecs() -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| C64::new(a, b)), 1..5)
    }

    proptest! {
        #[test]
        fn holder_dual_attains_the_norm(a in vecs(), p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY])) {
            let p = Exponent::new(p).unwrap();
            let w = p.holder_dual(&a);
            let pairing: C64 = w.iter().zip(&a).map(|(x, y)| x * y).sum();
            let n = p.norm_c(&a);
            prop_assert!((pairing.re - n).abs() <= 1e-12 * (1.0 + n));
            prop_assert!(pairing.im.abs() <= 1e-12 * (1.0 + n));
            if n > 0.0 {
                prop_assert!((p.conjugate().norm_c(&w) - 1.0).abs() <= 1e-12);
            }
        }
    }
}
