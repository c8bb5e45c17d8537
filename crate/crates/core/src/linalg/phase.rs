use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A root of unity `exp(2πi · num / modulus)` kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase {
    num: u32,
    modulus: u32,
}

impl Phase {
    pub const ONE: Phase = Phase { num: 0, modulus: 1 };

    /// `exp(2πi · num / modulus)`, with `num` taken mod `modulus`.
    pub fn new(num: i64, modulus: u32) -> Phase {
        assert!(modulus > 0, "phase modulus must be positive");
        let m = modulus as i64;
        let n = num.rem_euclid(m) as u32;
        let g = n.gcd(&modulus);
        Phase {
            num: n / g,
            modulus: modulus / g,
        }
    }

    /// Primitive root `exp(2πi / m)`.
    pub fn root(m: u32) -> Phase {
        Phase::new(1, m)
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    /// Numerator of this phase expressed over `modulus`; `None` if it does not divide.
    pub fn numerator_over(&self, modulus: u32) -> Option<u32> {
        if !modulus.is_multiple_of(self.modulus) {
            return None;
        }
        Some(self.num * (modulus / self.modulus))
    }

    pub fn inv(self) -> Phase {
        Phase::new(-(self.num as i64), self.modulus)
    }

    pub fn pow(self, k: i64) -> Phase {
        let m = self.modulus as i64;
        Phase::new((self.num as i64 * k.rem_euclid(m)) % m, self.modulus)
    }

    /// Multiplicative order; equals the reduced modulus.
    pub fn order(&self) -> u32 {
        self.modulus
    }

    pub fn to_complex(self) -> Complex64 {
        root_of_unity(self.num as u64, self.modulus as u64)
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ONE
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        let l = self.modulus.lcm(&rhs.modulus);
        let a = self.num as u64 * (l / self.modulus) as u64;
        let b = rhs.num as u64 * (l / rhs.modulus) as u64;
        Phase::new(((a + b) % l as u64) as i64, l)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "1")
        } else {
            write!(f, "e(2πi·{}/{})", self.num, self.modulus)
        }
    }
}

/// Double-precision `exp(2πi · k / m)`, with the real axis and quarter turns exact.
pub fn root_of_unity(k: u64, m: u64) -> Complex64 {
    let k = k % m;
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 4 * k == m {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * k == m {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == 3 * m {
        return Complex64::new(0.0, -1.0);
    }
    let theta = std::f64::consts::TAU * (k as f64) / (m as f64);
    Complex64::new(theta.cos(), theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_form() {
        assert_eq!(Phase::new(2, 4), Phase::new(1, 2));
        assert_eq!(Phase::new(-1, 3), Phase::new(2, 3));
        assert_eq!(Phase::new(6, 3), Phase::ONE);
    }

    #[test]
    fn product_adds_over_lcm() {
        let p = Phase::new(1, 4) * Phase::new(1, 6);
        assert_eq!(p, Phase::new(5, 12));
        assert_eq!(Phase::root(5).pow(5), Phase::ONE);
        assert_eq!(Phase::root(6).inv() * Phase::root(6), Phase::ONE);
    }

    #[test]
    fn order_annihilates() {
        let p = Phase::new(3, 10);
        assert_eq!(p.pow(p.order() as i64), Phase::ONE);
        assert_eq!(p.numerator_over(20), Some(6));
        assert_eq!(p.numerator_over(15), None);
    }

    #[test]
    fn complex_values() {
        assert_eq!(Phase::root(2).to_complex(), Complex64::new(-1.0, 0.0));
        let z = Phase::root(3).to_complex();
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }
}
