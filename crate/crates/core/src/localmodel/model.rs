use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use super::etilde::{ETilde, EtElem};
use crate::cyclotomic::CyclotomicField;
use crate::groups::{is_prime, unit_order, AbelianPGroup, Elem, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("exponents must be positive, got n = {n}, m = {m}")]
    BadExponents { n: u32, m: u32 },
    #[error("l must be greater than 1")]
    TrivialInertialQuotient,
    #[error("l = {l} does not divide p - 1 = {pm1}")]
    LNotDividing { l: u64, pm1: u64 },
    #[error("unit {value} has order {order:?} modulo {modulus}, expected {l}")]
    BadUnit { value: u64, modulus: u64, order: Option<u64>, l: u64 },
    #[error("set is not a subgroup of P")]
    NotASubgroup,
    #[error("operation needs a different case, got {0}")]
    WrongCase(&'static str),
    #[error("internal consistency failure: {0}")]
    Inconsistent(&'static str),
}

/// `N = (P₁ × P₂) ⋊ Ẽ` with `e₁` acting on `P₁ = C_{p^n}` by `a₁`, `e₂` on
/// `P₂ = C_{p^m}` by `a₂`, and `θ(z) = ω_l`.
#[derive(Clone, Debug)]
pub struct LocalBlockModel {
    p: u64,
    n: u32,
    m: u32,
    l: u64,
    a1: u64,
    a2: u64,
    pow1: Vec<u64>,
    pow2: Vec<u64>,
    pgroup: AbelianPGroup,
    et: ETilde,
    field: Arc<CyclotomicField>,
}

/// Smallest positive unit of exact order `l` modulo `q`.
pub fn default_unit(q: u64, l: u64) -> Option<u64> {
    (1..q).find(|&a| unit_order(a, q) == Some(l))
}

pub fn build_model(
    p: u64,
    n: u32,
    m: u32,
    l: u64,
    a1: Option<u64>,
    a2: Option<u64>,
) -> Result<Arc<LocalBlockModel>, ModelError> {
    if p == 2 || !is_prime(p) {
        return Err(ModelError::BadPrime(p));
    }
    if n == 0 || m == 0 {
        return Err(ModelError::BadExponents { n, m });
    }
    if l <= 1 {
        return Err(ModelError::TrivialInertialQuotient);
    }
    if (p - 1) % l != 0 {
        return Err(ModelError::LNotDividing { l, pm1: p - 1 });
    }
    let pgroup = AbelianPGroup::with_factor_order(p, n, m).map_err(|_| ModelError::BadPrime(p))?;
    let (q1, q2) = (pgroup.q1(), pgroup.q2());
    let pick = |a: Option<u64>, q: u64| -> Result<u64, ModelError> {
        match a {
            Some(v) => {
                let v = v % q;
                let order = unit_order(v, q);
                if order == Some(l) {
                    Ok(v)
                } else {
                    Err(ModelError::BadUnit { value: v, modulus: q, order, l })
                }
            }
            None => default_unit(q, l).ok_or(ModelError::Inconsistent("no unit of order l")),
        }
    };
    let a1 = pick(a1, q1)?;
    let a2 = pick(a2, q2)?;
    let powers = |a: u64, q: u64| -> Vec<u64> {
        let mut v = Vec::with_capacity(l as usize);
        let mut x = 1;
        for _ in 0..l {
            v.push(x);
            x = x * a % q;
        }
        v
    };
    let conductor = q1.max(q2) * l;
    Ok(Arc::new(LocalBlockModel {
        p,
        n,
        m,
        l,
        a1,
        a2,
        pow1: powers(a1, q1),
        pow2: powers(a2, q2),
        pgroup,
        et: ETilde::new(l),
        field: CyclotomicField::new(conductor),
    }))
}

impl LocalBlockModel {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn l(&self) -> u64 {
        self.l
    }
    pub fn a1(&self) -> u64 {
        self.a1
    }
    pub fn a2(&self) -> u64 {
        self.a2
    }
    pub fn q1(&self) -> u64 {
        self.pgroup.q1()
    }
    pub fn q2(&self) -> u64 {
        self.pgroup.q2()
    }
    pub fn pgroup(&self) -> &AbelianPGroup {
        &self.pgroup
    }
    pub fn etilde(&self) -> &ETilde {
        &self.et
    }
    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }
    /// Conductor `M` of the value field, `p^max(n,m) · l`.
    pub fn conductor(&self) -> u64 {
        self.field.conductor()
    }
    /// `|N| = p^{n+m} l³`.
    pub fn order(&self) -> u64 {
        self.pgroup.order() as u64 * self.l.pow(3)
    }

    pub fn p1(&self) -> Subgroup {
        self.pgroup.generate(&[Elem(1, 0)])
    }
    pub fn p2(&self) -> Subgroup {
        self.pgroup.generate(&[Elem(0, 1)])
    }

    /// `e·x`, the action of `Ẽ` on `P`.
    pub fn act(&self, e: EtElem, x: Elem) -> Elem {
        Elem(x.0 * self.pow1[e.i as usize] % self.q1(), x.1 * self.pow2[e.j as usize] % self.q2())
    }

    /// `ξ ∘ e` for a character `ξ = (s₁, s₂)` of `P`; same formula as `act`.
    pub fn act_char(&self, e: EtElem, xi: Elem) -> Elem {
        self.act(e, xi)
    }

    /// `ξ(x)` as an exponent of `ζ_M`.
    pub fn char_exponent(&self, xi: Elem, x: Elem) -> u64 {
        let mm = self.conductor();
        let (q1, q2) = (self.q1(), self.q2());
        (xi.0 * x.0 % q1 * (mm / q1) + xi.1 * x.1 % q2 * (mm / q2)) % mm
    }

    /// Exponent of `θ(z^k) = ω_l^k` in `ζ_M`.
    pub fn theta_exponent(&self, k: u64) -> u64 {
        k % self.l * (self.conductor() / self.l)
    }

    /// Pointwise centralizer `C_E(Q)`, as the axes it contains.
    pub fn centralizer_axes(&self, q: &Subgroup) -> super::Axes {
        super::Axes {
            first: q.elements().iter().all(|x| x.0 == 0),
            second: q.elements().iter().all(|x| x.1 == 0),
        }
    }

    /// Elements `e₁^i e₂^j` of `E` normalizing `Q`.
    pub fn normalizer(&self, q: &Subgroup) -> Vec<EtElem> {
        let mut out = Vec::new();
        for i in 0..self.l {
            for j in 0..self.l {
                let e = EtElem::new(i, j, 0);
                if q.elements().iter().all(|&x| q.contains(self.act(e, x))) {
                    out.push(e);
                }
            }
        }
        out
    }

    pub fn is_subgroup(&self, q: &Subgroup) -> bool {
        let g = &self.pgroup;
        q.contains(g.zero())
            && q.elements().iter().all(|&x| g.contains(x))
            && q.elements().iter().all(|&x| q.elements().iter().all(|&y| q.contains(g.add(x, y))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_errors() {
        let m = build_model(3, 1, 1, 2, None, None).unwrap();
        assert_eq!((m.a1(), m.a2(), m.order()), (2, 2, 72));
        let m = build_model(5, 1, 2, 4, None, None).unwrap();
        assert!([2, 3].contains(&m.a1()));
        assert_eq!(unit_order(m.a2(), 25), Some(4));
        assert!(matches!(build_model(3, 1, 1, 4, None, None), Err(ModelError::LNotDividing { .. })));
        assert!(matches!(build_model(3, 1, 1, 1, None, None), Err(ModelError::TrivialInertialQuotient)));
        assert!(matches!(build_model(2, 1, 1, 1, None, None), Err(ModelError::BadPrime(2))));
        assert!(matches!(build_model(5, 1, 1, 2, Some(2), None), Err(ModelError::BadUnit { .. })));
        assert!(build_model(5, 1, 1, 2, Some(4), Some(4)).is_ok());
    }

    #[test]
    fn centralizers() {
        let m = build_model(3, 1, 1, 2, None, None).unwrap();
        let g = m.pgroup();
        assert_eq!(m.centralizer_axes(&g.trivial()), super::super::Axes::BOTH);
        assert_eq!(m.centralizer_axes(&m.p2()), super::super::Axes::FIRST);
        assert_eq!(m.centralizer_axes(&m.p1()), super::super::Axes::SECOND);
        let diag = g.generate(&[Elem(1, 1)]);
        assert_eq!(m.centralizer_axes(&diag), super::super::Axes::NONE);
        // diagonal C3 is normalized only by elements acting by the same scalar
        assert_eq!(m.normalizer(&diag).len(), 2);
    }
}
