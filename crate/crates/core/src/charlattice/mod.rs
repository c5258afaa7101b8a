//! Class functions on model hosts, the section maps `d^u` and `e^u`, the
//! `∗`-construction, and the lattices `L ⊇ L°` with certified bases.

mod basis;

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_rational::BigRational;
use thiserror::Error;

use crate::cyclotomic::CyclotomicNumber;
use crate::groups::Elem;
use crate::localmodel::{Axes, CharLabel, ClassTable, EtElem, Host, HostElem};

pub use basis::{
    brauer_labels, certify_basis, d1_matrix, gram, l_zero_basis, l_zero_basis_case1, l_zero_basis_case2,
    l_zero_basis_case3, BasisCertificate, LatticeElement,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("class functions live on different hosts")]
    HostMismatch,
    #[error("element is not a p-element")]
    NotPElement,
    #[error("class function is not supported on p'-elements")]
    NotPSectionSupported,
    #[error("class function on P is not stable under the acting group")]
    NotStable,
    #[error("operation needs a different case: {0}")]
    WrongCase(&'static str),
    #[error("class function is not an integral combination of block characters")]
    NotIntegral,
    #[error("basis certification failed: {0}")]
    Certification(&'static str),
}

/// A class function, stored by its values on the classes of `table`.
#[derive(Clone, Debug)]
pub struct ClassFunction {
    table: Arc<ClassTable>,
    values: Vec<CyclotomicNumber>,
}

impl PartialEq for ClassFunction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.table, &other.table) && self.values == other.values
    }
}

impl ClassFunction {
    pub fn new(table: Arc<ClassTable>, values: Vec<CyclotomicNumber>) -> Self {
        assert_eq!(values.len(), table.len());
        Self { table, values }
    }

    pub fn zero(table: &Arc<ClassTable>) -> Self {
        let field = table.host().model().field().clone();
        Self { table: table.clone(), values: (0..table.len()).map(|_| CyclotomicNumber::zero(&field)).collect() }
    }

    pub fn character(table: &Arc<ClassTable>, c: &CharLabel) -> Self {
        let field = table.host().model().field();
        let values = table.values(c).iter().map(|r| r.to_number(field)).collect();
        Self { table: table.clone(), values }
    }

    /// `Σ coeffs[i] · labels[i]`.
    pub fn combination(table: &Arc<ClassTable>, labels: &[CharLabel], coeffs: &[i64]) -> Self {
        let model = table.host().model();
        let mut sums = alloc::vec![crate::cyclotomic::RootSum::zero(model.conductor()); table.len()];
        for (c, &a) in labels.iter().zip(coeffs) {
            if a == 0 {
                continue;
            }
            for (s, v) in sums.iter_mut().zip(table.values(c)) {
                s.add_assign(&v.scaled(a));
            }
        }
        Self { table: table.clone(), values: sums.iter().map(|s| s.to_number(model.field())).collect() }
    }

    pub fn table(&self) -> &Arc<ClassTable> {
        &self.table
    }
    pub fn values(&self) -> &[CyclotomicNumber] {
        &self.values
    }
    pub fn value_at(&self, g: HostElem) -> &CyclotomicNumber {
        &self.values[self.table.class_of(g)]
    }
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LatticeError> {
        same_host(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { table: self.table.clone(), values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LatticeError> {
        same_host(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { table: self.table.clone(), values })
    }

    /// Coordinates in the block basis `labels`, which must be integral and
    /// reproduce `self`.
    pub fn coordinates(&self, labels: &[CharLabel]) -> Result<Vec<i64>, LatticeError> {
        let mut out = Vec::with_capacity(labels.len());
        for c in labels {
            let q = inner_product(self, &ClassFunction::character(&self.table, c))?;
            if !q.is_integer() {
                return Err(LatticeError::NotIntegral);
            }
            out.push(i64::try_from(q.to_integer()).map_err(|_| LatticeError::NotIntegral)?);
        }
        if ClassFunction::combination(&self.table, labels, &out) != *self {
            return Err(LatticeError::NotIntegral);
        }
        Ok(out)
    }
}

fn same_host(f: &ClassFunction, g: &ClassFunction) -> Result<(), LatticeError> {
    if Arc::ptr_eq(&f.table, &g.table) {
        Ok(())
    } else {
        Err(LatticeError::HostMismatch)
    }
}

/// `(1/|G|) Σ f(x) conj(g(x))`.
pub fn inner_product(f: &ClassFunction, g: &ClassFunction) -> Result<BigRational, LatticeError> {
    same_host(f, g)?;
    let field = f.table.host().model().field();
    let mut acc = CyclotomicNumber::zero(field);
    for ((a, b), &s) in f.values.iter().zip(&g.values).zip(f.table.sizes()) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc = &acc + &(a * &b.conjugate()).scale(&BigRational::from_integer(s.into()));
    }
    let q = acc.as_rational().expect("inner product of class functions is rational");
    Ok(q / BigRational::from_integer(f.table.group_order().into()))
}

/// Axes of `S̃` fixing `u ∈ P/Q`.
pub fn centralizer_axes(host: &Host, u: Elem) -> Axes {
    let m = host.model();
    let fixes = |e: EtElem| host.canon(m.act(e, u)) == host.canon(u);
    Axes {
        first: host.axes().first && fixes(EtElem::new(1, 0, 0)),
        second: host.axes().second && fixes(EtElem::new(0, 1, 0)),
    }
}

/// The class table of `C(u)` inside the host of `table`.
pub fn centralizer_table(table: &ClassTable, u: Elem) -> Arc<ClassTable> {
    let host = table.host();
    let axes = centralizer_axes(host, u);
    Arc::new(ClassTable::new(Arc::new(Host::new(host.model().clone(), host.kernel().clone(), axes))))
}

/// Representatives of the `S̃`-orbits on `P/Q`, least first.
pub fn section_reps(host: &Host) -> Vec<Elem> {
    let m = host.model();
    host.coset_reps()
        .iter()
        .copied()
        .filter(|&x| host.stilde_mod_z().all(|e| host.canon(m.act(e, x)) >= x))
        .collect()
}

/// `(d^u f)(s) = f(us)` on `p'`-elements `s` of `C(u)`, zero elsewhere.
pub fn d_u(f: &ClassFunction, u: Elem, target: &Arc<ClassTable>) -> Result<ClassFunction, LatticeError> {
    let host = f.table.host();
    let th = target.host();
    let field = host.model().field();
    let u = host.canon(u);
    let values = target
        .reps()
        .iter()
        .map(|&s| {
            let (sp, _) = th.split(s);
            if sp != th.one() {
                CyclotomicNumber::zero(field)
            } else {
                f.value_at(host.mul(host.elem(u, EtElem::ONE), host.elem(s.x, s.e))).clone()
            }
        })
        .collect();
    Ok(ClassFunction::new(target.clone(), values))
}

/// The section of `d^u`: `e^u(φ)(g) = φ(s')` when `g` is conjugate to `us'`
/// with `s'` a `p'`-element of `C(u)`, and 0 otherwise.
pub fn e_u(phi: &ClassFunction, u: Elem, target: &Arc<ClassTable>) -> Result<ClassFunction, LatticeError> {
    let ch = phi.table.host();
    for (g, v) in phi.table.reps().iter().zip(&phi.values) {
        if !v.is_zero() && ch.split(*g).0 != ch.one() {
            return Err(LatticeError::NotPSectionSupported);
        }
    }
    let host = target.host();
    let m = host.model();
    let field = m.field();
    let u = host.canon(u);
    let values = target
        .reps()
        .iter()
        .map(|&g| {
            let (gp, _) = host.split(g);
            match host.stilde_mod_z().find(|&t| host.canon(m.act(t, gp.x)) == u) {
                Some(t) => {
                    let th = host.elem(Elem(0, 0), t);
                    let g2 = host.conj(th, g);
                    let (_, s) = host.split(g2);
                    phi.value_at(ch.elem(s.x, s.e)).clone()
                }
                None => CyclotomicNumber::zero(field),
            }
        })
        .collect();
    Ok(ClassFunction::new(target.clone(), values))
}

/// `Σ_u e^u d^u f` over [`section_reps`].
pub fn section_sum(f: &ClassFunction) -> Result<ClassFunction, LatticeError> {
    let mut acc = ClassFunction::zero(&f.table);
    for u in section_reps(f.table.host()) {
        let cu = centralizer_table(&f.table, u);
        let piece = e_u(&d_u(f, u, &cu)?, u, &f.table)?;
        acc = acc.add(&piece)?;
    }
    Ok(acc)
}

/// Values of a character `λ` of `P/Q` indexed by coset.
pub fn p_character(host: &Host, lambda: Elem) -> Vec<CyclotomicNumber> {
    let m = host.model();
    host.coset_reps()
        .iter()
        .map(|&x| CyclotomicNumber::root_of_unity(m.field(), m.char_exponent(lambda, x) as i64))
        .collect()
}

/// `(λ ∗ η)(g) = λ(g_p) η(g)` for an `S̃`-stable class function `λ` on `P/Q`,
/// given by its values on coset representatives.
pub fn star(lambda: &[CyclotomicNumber], eta: &ClassFunction) -> Result<ClassFunction, LatticeError> {
    let host = eta.table.host();
    let m = host.model();
    for (&x, v) in host.coset_reps().iter().zip(lambda) {
        for e in host.stilde_mod_z() {
            if lambda[host.coset_index(m.act(e, x))] != *v {
                return Err(LatticeError::NotStable);
            }
        }
    }
    let values = eta
        .table
        .reps()
        .iter()
        .zip(&eta.values)
        .map(|(&g, v)| {
            let (gp, _) = host.split(g);
            &lambda[host.coset_index(gp.x)] * v
        })
        .collect();
    Ok(ClassFunction::new(eta.table.clone(), values))
}

/// Whether `f` vanishes on all `p'`-elements.
pub fn vanishes_on_p_regular(f: &ClassFunction) -> bool {
    let host = f.table.host();
    f.table.reps().iter().zip(&f.values).all(|(&g, v)| host.split(g).0 != host.one() || v.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::subgroup_lattice;
    use crate::localmodel::{build_model, quotient_model};
    use num_traits::One;

    fn table_for(p: u64, n: u32, m: u32, l: u64) -> Arc<ClassTable> {
        let model = build_model(p, n, m, l, None, None).unwrap();
        Arc::new(ClassTable::new(crate::localmodel::full_host(&model)))
    }

    #[test]
    fn inner_products_from_the_lattice() {
        let t = table_for(3, 1, 1, 2);
        let labels = t.host().block_labels();
        let ch = |i: usize| ClassFunction::character(&t, &labels[i]);
        let one = BigRational::one();
        assert_eq!(inner_product(&ch(0), &ch(0)).unwrap(), one);
        // mu = psi2 - l psi1 against psi1 - psi1'
        let mu = ClassFunction::combination(&t, &labels, &[-2, 0, 0, 0, 0, 1]);
        let diff = ch(0).sub(&ch(1)).unwrap();
        assert_eq!(inner_product(&mu, &diff).unwrap(), BigRational::from_integer((-2).into()));
        let other = ClassFunction::combination(&t, &labels, &[0; 6]);
        assert!(other.is_zero());
        let t2 = table_for(3, 1, 1, 2);
        assert_eq!(inner_product(&ch(0), &ClassFunction::zero(&t2)), Err(LatticeError::HostMismatch));

        let model = build_model(3, 1, 1, 2, None, None).unwrap();
        let qm = quotient_model(&model, &model.p2()).unwrap();
        let tq = Arc::new(ClassTable::new(qm.host().clone()));
        let f = ClassFunction::combination(&tq, qm.labels(), &[-1, -1, 1]);
        assert_eq!(inner_product(&f, &f).unwrap(), BigRational::from_integer(3.into()));
    }

    #[test]
    fn d1_kills_differences() {
        let t = table_for(3, 1, 1, 2);
        let labels = t.host().block_labels();
        let one = t.host().model().pgroup().zero();
        let cu = centralizer_table(&t, one);
        for coeffs in [[1, -1, 0, 0, 0, 0], [-2, 0, 0, 0, 0, 1]] {
            let f = ClassFunction::combination(&t, &labels, &coeffs);
            assert!(d_u(&f, one, &cu).unwrap().is_zero());
        }
        let f = ClassFunction::character(&t, &labels[0]);
        let d = d_u(&f, one, &cu).unwrap();
        for (g, v) in cu.reps().iter().zip(d.values()) {
            let host = cu.host();
            if host.split(*g).0 == host.one() {
                assert_eq!(v, f.value_at(*g));
            }
        }
    }

    #[test]
    fn e_u_vanishes_off_its_section() {
        let t = table_for(3, 1, 1, 2);
        let host = t.host().clone();
        let labels = host.block_labels();
        for u in section_reps(&host) {
            let cu = centralizer_table(&t, u);
            for c in &labels {
                let f = ClassFunction::character(&t, c);
                let e = e_u(&d_u(&f, u, &cu).unwrap(), u, &t).unwrap();
                for (g, v) in t.reps().iter().zip(e.values()) {
                    let gp = host.split(*g).0.x;
                    let hit = host.stilde_mod_z().any(|s| host.canon(host.model().act(s, gp)) == u);
                    if !hit {
                        assert!(v.is_zero());
                    } else {
                        assert_eq!(v, f.value_at(*g));
                    }
                }
            }
        }
    }

    #[test]
    fn sections_reconstruct_small() {
        let model = build_model(3, 1, 1, 2, None, None).unwrap();
        for q in subgroup_lattice(model.pgroup()) {
            let qm = quotient_model(&model, &q).unwrap();
            let t = Arc::new(ClassTable::new(qm.host().clone()));
            for c in qm.labels() {
                let f = ClassFunction::character(&t, c);
                assert_eq!(section_sum(&f).unwrap(), f);
            }
        }
    }

    #[test]
    fn star_products() {
        let model = build_model(3, 1, 2, 2, None, None).unwrap();
        let q = model.pgroup().generate(&[Elem(0, 3)]);
        let qm = quotient_model(&model, &q).unwrap();
        let host = qm.host().clone();
        let t = Arc::new(ClassTable::new(host.clone()));
        let zs = qm.residual_chars();
        for &z in &zs {
            let lam = p_character(&host, qm.residual_char(z));
            for c in qm.labels() {
                let f = ClassFunction::character(&t, c);
                let lhs = star(&lam, &f).unwrap();
                let rhs = ClassFunction::character(&t, &host.star_label(qm.residual_char(z), c));
                assert_eq!(lhs, rhs);
                for &z2 in &zs {
                    let lam2 = p_character(&host, qm.residual_char(z2));
                    let prod: Vec<_> = lam.iter().zip(&lam2).map(|(a, b)| a * b).collect();
                    assert_eq!(star(&prod, &f).unwrap(), star(&lam, &star(&lam2, &f).unwrap()).unwrap());
                }
            }
        }
        let triv = p_character(&host, Elem(0, 0));
        let f = ClassFunction::character(&t, &qm.labels()[0]);
        assert_eq!(star(&triv, &f).unwrap(), f);
        // a character moved by e1 is not stable
        let bad = p_character(&host, Elem(1, 0));
        assert_eq!(star(&bad, &f), Err(LatticeError::NotStable));
    }
}
