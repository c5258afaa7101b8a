//! Exact arithmetic in cyclotomic fields `Q(ζ_M)`.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(M)-1}` reduced
//! modulo the `M`-th cyclotomic polynomial. Operands with different
//! conductors are lifted to the least common multiple before combining.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The field `Q(ζ_M)` together with the integer coefficients of `Φ_M`.
#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    conductor: u64,
    /// Coefficients of `Φ_M`, lowest degree first; monic.
    poly: Vec<i64>,
}

impl CyclotomicField {
    pub fn new(conductor: u64) -> Arc<Self> {
        assert!(conductor > 0, "conductor must be positive");
        Arc::new(Self { conductor, poly: cyclotomic_polynomial(conductor) })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `φ(M)`, the dimension over `Q`.
    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn polynomial(&self) -> &[i64] {
        &self.poly
    }

    /// Reduces an integer polynomial in `ζ` modulo `Φ_M` in place and
    /// truncates it to `φ(M)` coefficients.
    pub fn reduce_integer(&self, coeffs: &mut Vec<i64>) {
        let d = self.degree();
        for k in (d..coeffs.len()).rev() {
            let c = coeffs[k];
            if c == 0 {
                continue;
            }
            for (j, &pj) in self.poly.iter().enumerate() {
                coeffs[k - d + j] -= c * pj;
            }
        }
        coeffs.resize(d, 0);
    }

    fn reduce_rational(&self, coeffs: &mut Vec<BigRational>) {
        let d = self.degree();
        for k in (d..coeffs.len()).rev() {
            if coeffs[k].is_zero() {
                continue;
            }
            let c = coeffs[k].clone();
            for (j, &pj) in self.poly.iter().enumerate() {
                if pj != 0 {
                    coeffs[k - d + j] -= &c * BigRational::from_integer(BigInt::from(pj));
                }
            }
        }
        coeffs.resize(d, BigRational::zero());
    }
}

/// Integer coefficients of the `m`-th cyclotomic polynomial, lowest first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    // x^m - 1 divided by Φ_d for every proper divisor d of m.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = num.len() - 1 - dn;
    let mut q = vec![0i64; qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn];
        q[k] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// An element of `Q(ζ_M)` in the reduced power basis.
#[derive(Clone)]
pub struct CyclotomicNumber {
    field: Arc<CyclotomicField>,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        Self { field: field.clone(), coeffs: vec![BigRational::zero(); field.degree()] }
    }

    pub fn from_integer(field: &Arc<CyclotomicField>, n: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, q: BigRational) -> Self {
        let mut x = Self::zero(field);
        x.coeffs[0] = q;
        x
    }

    /// `ζ_M^k`.
    pub fn root_of_unity(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let m = field.conductor() as i64;
        let mut dense = vec![0i64; m as usize];
        dense[k.rem_euclid(m) as usize] = 1;
        Self::from_dense_integer(field, dense)
    }

    /// Builds the element `Σ c_k ζ^k` from an integer coefficient vector of
    /// any length.
    pub fn from_dense_integer(field: &Arc<CyclotomicField>, mut dense: Vec<i64>) -> Self {
        if dense.len() < field.degree() {
            dense.resize(field.degree(), 0);
        }
        field.reduce_integer(&mut dense);
        let coeffs = dense.into_iter().map(|c| BigRational::from_integer(BigInt::from(c))).collect();
        Self { field: field.clone(), coeffs }
    }

    /// Builds `Σ c_k ζ^k` from rational coefficients of any length.
    pub fn from_dense_rational(field: &Arc<CyclotomicField>, mut dense: Vec<BigRational>) -> Self {
        if dense.len() < field.degree() {
            dense.resize(field.degree(), BigRational::zero());
        }
        field.reduce_rational(&mut dense);
        Self { field: field.clone(), coeffs: dense }
    }

    pub fn conductor(&self) -> u64 {
        self.field.conductor()
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    /// Coefficients in the power basis of the current conductor.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// The value as a rational integer, if it lies in `Z`.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    pub fn is_rational_integer(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }

    /// Re-expresses the element in `Q(ζ_L)` for a multiple `L` of the
    /// current conductor.
    pub fn lift(&self, target: &Arc<CyclotomicField>) -> Self {
        let m = self.conductor();
        let l = target.conductor();
        assert!(l % m == 0, "target conductor must be a multiple");
        if l == m {
            return Self { field: target.clone(), coeffs: self.coeffs.clone() };
        }
        let step = (l / m) as usize;
        let mut dense = vec![BigRational::zero(); l as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[i * step] = c.clone();
        }
        Self::from_dense_rational(target, dense)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if Arc::ptr_eq(&a.field, &b.field) || a.conductor() == b.conductor() {
            return (a.clone(), Self { field: a.field.clone(), coeffs: b.coeffs.clone() });
        }
        let l = a.conductor().lcm(&b.conductor());
        let f = if l == a.conductor() {
            a.field.clone()
        } else if l == b.conductor() {
            b.field.clone()
        } else {
            CyclotomicField::new(l)
        };
        (a.lift(&f), b.lift(&f))
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conjugate(&self) -> Self {
        self.galois(-1)
    }

    /// The Galois automorphism `ζ ↦ ζ^k` for `k` coprime to the conductor.
    pub fn galois(&self, k: i64) -> Self {
        let m = self.conductor() as i64;
        assert!(k.gcd(&m) == 1, "Galois exponent must be a unit");
        let mut dense = vec![BigRational::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let j = (i as i64 * k).rem_euclid(m) as usize;
                dense[j] += c;
            }
        }
        Self::from_dense_rational(&self.field, dense)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{}", a)?,
                _ if a.is_one() => write!(f, "z{}^{}", self.conductor(), i)?,
                _ => write!(f, "{}*z{}^{}", a, self.conductor(), i)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: Self) -> CyclotomicNumber {
        let (mut a, b) = CyclotomicNumber::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: Self) -> CyclotomicNumber {
        let (mut a, b) = CyclotomicNumber::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: Self) -> CyclotomicNumber {
        let (a, b) = CyclotomicNumber::common(self, rhs);
        let n = a.coeffs.len();
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        CyclotomicNumber::from_dense_rational(&a.field, prod)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $m(self, rhs: Self) -> CyclotomicNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

/// An integer combination `Σ c_k ζ_M^k` kept unreduced.
///
/// Character values are sums of roots of unity; accumulating them here and
/// reducing once is much cheaper than reducing after every addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSum {
    conductor: u64,
    counts: Vec<i64>,
}

impl RootSum {
    pub fn zero(conductor: u64) -> Self {
        Self { conductor, counts: vec![0; conductor as usize] }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Adds `c · ζ^k`.
    pub fn add_root(&mut self, k: i64, c: i64) {
        let m = self.conductor as i64;
        self.counts[k.rem_euclid(m) as usize] += c;
    }

    pub fn add_assign(&mut self, other: &RootSum) {
        debug_assert_eq!(self.conductor, other.conductor);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn scaled(&self, c: i64) -> RootSum {
        RootSum { conductor: self.conductor, counts: self.counts.iter().map(|x| x * c).collect() }
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn conjugate(&self) -> RootSum {
        let m = self.conductor as usize;
        let mut counts = vec![0; m];
        for (k, &c) in self.counts.iter().enumerate() {
            counts[(m - k) % m] += c;
        }
        RootSum { conductor: self.conductor, counts }
    }

    /// Product, as another unreduced sum.
    pub fn mul(&self, other: &RootSum) -> RootSum {
        let m = self.conductor as usize;
        let mut counts = vec![0; m];
        for (i, &a) in self.counts.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.counts.iter().enumerate() {
                if b != 0 {
                    counts[(i + j) % m] += a * b;
                }
            }
        }
        RootSum { conductor: self.conductor, counts }
    }

    /// Reduced integer coordinates in the power basis of `field`.
    pub fn reduced(&self, field: &CyclotomicField) -> Vec<i64> {
        assert_eq!(field.conductor(), self.conductor);
        let mut v = self.counts.clone();
        field.reduce_integer(&mut v);
        v
    }

    pub fn to_number(&self, field: &Arc<CyclotomicField>) -> CyclotomicNumber {
        CyclotomicNumber::from_dense_integer(field, self.counts.clone())
    }

    pub fn is_zero_in(&self, field: &CyclotomicField) -> bool {
        self.reduced(field).iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mobius(mut n: u64) -> i64 {
        let mut res = 1;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                res = -res;
            }
            p += 1;
        }
        if n > 1 {
            res = -res;
        }
        res
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        for m in 1..60 {
            assert_eq!(cyclotomic_polynomial(m).len() as u64 - 1, euler_phi(m));
        }
    }

    #[test]
    fn vanishing_sum_of_cube_roots() {
        let f = CyclotomicField::new(3);
        let z = CyclotomicNumber::root_of_unity(&f, 1);
        let z2 = CyclotomicNumber::root_of_unity(&f, 2);
        assert_eq!((&z + &z2).is_rational_integer(), Some(-1));
    }

    #[test]
    fn conjugate_is_inverse_root() {
        let f = CyclotomicField::new(5);
        let z = CyclotomicNumber::root_of_unity(&f, 1);
        assert_eq!(z.conjugate(), CyclotomicNumber::root_of_unity(&f, 4));
    }

    #[test]
    fn i_squared() {
        let f = CyclotomicField::new(4);
        let i = CyclotomicNumber::root_of_unity(&f, 1);
        assert_eq!((&i * &i).is_rational_integer(), Some(-1));
    }

    #[test]
    fn integrality_checks() {
        let f6 = CyclotomicField::new(6);
        assert_eq!(CyclotomicNumber::from_integer(&f6, 3).is_rational_integer(), Some(3));
        let f3 = CyclotomicField::new(3);
        assert_eq!(CyclotomicNumber::root_of_unity(&f3, 1).is_rational_integer(), None);
        let f8 = CyclotomicField::new(8);
        let s = &CyclotomicNumber::root_of_unity(&f8, 1) + &CyclotomicNumber::root_of_unity(&f8, -1);
        let two = CyclotomicNumber::from_integer(&f8, 2);
        assert_eq!((&(&s * &s) - &two).is_rational_integer(), Some(0));
    }

    #[test]
    fn galois_sum_is_mobius() {
        for m in 1..=60u64 {
            let f = CyclotomicField::new(m);
            let mut acc = CyclotomicNumber::zero(&f);
            for k in 0..m {
                if k.gcd(&m) == 1 {
                    acc = &acc + &CyclotomicNumber::root_of_unity(&f, k as i64);
                }
            }
            assert_eq!(acc.is_rational_integer(), Some(mobius(m)), "m = {m}");
        }
    }

    #[test]
    fn mixed_conductors_compare_after_lift() {
        let f3 = CyclotomicField::new(3);
        let f1 = CyclotomicField::new(1);
        let z = CyclotomicNumber::root_of_unity(&f3, 1);
        let w = CyclotomicNumber::root_of_unity(&f3, 2);
        assert_eq!(&z + &w, CyclotomicNumber::from_integer(&f1, -1));
        let f4 = CyclotomicField::new(4);
        let i = CyclotomicNumber::root_of_unity(&f4, 1);
        let prod = &z * &i;
        assert_eq!(prod.conductor(), 12);
        assert_eq!(prod, CyclotomicNumber::root_of_unity(&CyclotomicField::new(12), 7));
    }

    #[test]
    fn root_sum_matches_number() {
        let f = CyclotomicField::new(12);
        let mut s = RootSum::zero(12);
        s.add_root(1, 2);
        s.add_root(7, 1);
        s.add_root(-1, 3);
        let direct = &(&CyclotomicNumber::root_of_unity(&f, 1).scale(&BigRational::from_integer(2.into()))
            + &CyclotomicNumber::root_of_unity(&f, 7))
            + &CyclotomicNumber::root_of_unity(&f, 11).scale(&BigRational::from_integer(3.into()));
        assert_eq!(s.to_number(&f), direct);
        assert_eq!(s.conjugate().to_number(&f), direct.conjugate());
        let sq = s.mul(&s).to_number(&f);
        assert_eq!(sq, &direct * &direct);
    }
}
