//! Exact integer-polynomial arithmetic for the randomized EM test.
//!
//! Polynomials live in Z[y] with big-integer coefficients. The Tutte-style
//! matrix has degree <= 1 entries; its determinant is computed by
//! fraction-free (Bareiss) Gaussian elimination, and the Pfaffian is
//! recovered as the exact polynomial square root of the determinant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense polynomial in one variable over BigInt, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![BigInt::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// The monomial `2^w * y^d`.
    pub fn two_pow_times_y_pow(w: u64, d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::one() << w;
        Poly { coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for i in 0..len {
            coeffs.push(self.coeff(i) - other.coeff(i));
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(coeffs)
    }

    /// Exact division; panics if `divisor` does not divide `self` in Z[y].
    /// Bareiss guarantees exactness, so a failure here is a solver bug.
    pub fn exact_div(&self, divisor: &Poly) -> Self {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Poly::zero();
        }
        let mut rem = self.clone();
        assert!(rem.degree() >= divisor.degree(), "inexact polynomial division");
        let mut quot = vec![BigInt::zero(); rem.degree() - divisor.degree() + 1];
        let lead_d = divisor.coeffs.last().unwrap().clone();
        while !rem.is_zero() && rem.degree() >= divisor.degree() {
            let shift = rem.degree() - divisor.degree();
            let (q, r) = rem.coeffs.last().unwrap().div_rem(&lead_d);
            assert!(r.is_zero(), "inexact leading-coefficient division");
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let idx = shift + j;
                let delta = &q * d;
                rem.coeffs[idx] -= delta;
            }
            rem.trim();
            quot[shift] = q;
        }
        assert!(rem.is_zero(), "inexact polynomial division (nonzero remainder)");
        Poly::from_coeffs(quot)
    }

    /// Trailing valuation: the least i with a nonzero y^i coefficient.
    fn trailing_valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .expect("valuation of the zero polynomial")
    }

    /// Shift down by y^s (requires divisibility).
    fn shift_down(&self, s: usize) -> Self {
        debug_assert!(self.coeffs.iter().take(s).all(|c| c.is_zero()));
        Poly::from_coeffs(self.coeffs[s..].to_vec())
    }

    fn shift_up(&self, s: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); s];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::from_coeffs(coeffs)
    }
}

/// Fraction-free determinant over Z[y] with row pivoting.
pub fn bareiss_determinant(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut sign = 1i32;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev);
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        det.neg()
    } else {
        det
    }
}

/// Exact square root of a perfect-square polynomial; panics otherwise.
fn exact_sqrt(d: &Poly) -> Poly {
    if d.is_zero() {
        return Poly::zero();
    }
    let val = d.trailing_valuation();
    assert_eq!(val % 2, 0, "square polynomial has even valuation");
    let reduced = d.shift_down(val);
    let deg = reduced.degree();
    assert_eq!(deg % 2, 0, "square polynomial has even degree");
    let c0 = reduced.coeff(0);
    assert!(c0.is_positive(), "trailing coefficient of a square is positive");
    let p0 = c0.sqrt();
    assert_eq!(&p0 * &p0, c0, "trailing coefficient must be a perfect square");
    let half_deg = deg / 2;
    let mut p = vec![BigInt::zero(); half_deg + 1];
    p[0] = p0.clone();
    let two_p0 = &p0 * 2;
    for i in 1..=half_deg {
        let mut acc = reduced.coeff(i);
        for j in 1..i {
            acc -= &p[j] * &p[i - j];
        }
        let (q, r) = acc.div_rem(&two_p0);
        assert!(r.is_zero(), "square root coefficient must divide exactly");
        p[i] = q;
    }
    let root = Poly::from_coeffs(p).shift_up(val / 2);
    debug_assert_eq!(root.mul(&root), *d, "square root verification");
    root
}

/// The Pfaffian of a skew-symmetric matrix over Z[y], up to global sign,
/// recovered from det = Pf^2. Our caller only tests coefficients for zero,
/// so the sign ambiguity is irrelevant.
pub fn pfaffian_via_determinant(m: Vec<Vec<Poly>>) -> Poly {
    let det = bareiss_determinant(m);
    exact_sqrt(&det)
}
