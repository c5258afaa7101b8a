use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use super::LatticeError;
use crate::linalg;
use crate::localmodel::{CaseTag, CharLabel, Host, HostElem, QuotientModel};

/// An integer combination of the block characters of a fixed label list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeElement {
    pub coeffs: Vec<i64>,
}

impl LatticeElement {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }
    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![0; n] }
    }
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.coeffs[i] = 1;
        v
    }
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
    pub fn add(&self, o: &Self) -> Self {
        Self { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        Self { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
    pub fn scale(&self, k: i64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }
    /// Inner product, the labels being orthonormal.
    pub fn dot(&self, o: &Self) -> i64 {
        self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a * b).sum()
    }
    pub fn norm(&self) -> i64 {
        self.dot(self)
    }
    /// Moves the coefficient of label `i` to label `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = vec![0; self.coeffs.len()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[perm[i]] = c;
        }
        Self { coeffs: out }
    }
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| self.coeffs[i] != 0).collect()
    }
    pub fn to_big(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }
}

pub fn gram(basis: &[LatticeElement]) -> Vec<Vec<i64>> {
    basis.iter().map(|a| basis.iter().map(|b| a.dot(b)).collect()).collect()
}

/// Block characters inflated from `S̃`; their restrictions to `p'`-elements
/// are the irreducible Brauer characters.
pub fn brauer_labels(host: &Host) -> Vec<CharLabel> {
    host.block_labels().into_iter().filter(|c| c.xi == host.model().pgroup().zero()).collect()
}

/// `d¹` as an integer matrix: one row per `(e, k)` with `e ∈ S̃/Z` and `k` a
/// power-basis coordinate of `χ(e)`, one column per label.
pub fn d1_matrix(host: &Host, labels: &[CharLabel]) -> Vec<Vec<i64>> {
    let field = host.model().field();
    let deg = field.degree();
    let mut rows = Vec::new();
    for e in host.stilde_mod_z() {
        let g = HostElem { x: host.model().pgroup().zero(), e };
        let cols: Vec<Vec<i64>> = labels.iter().map(|c| host.value(c, g).reduced(field)).collect();
        for k in 0..deg {
            rows.push(cols.iter().map(|v| v[k]).collect());
        }
    }
    rows
}

fn unit(n: usize, i: usize) -> LatticeElement {
    LatticeElement::unit(n, i)
}

/// `{ψ₀ − ψ}` with `ψ₀` the trivial-on-`P` character.
pub fn l_zero_basis_case1(qm: &QuotientModel) -> Result<Vec<LatticeElement>, LatticeError> {
    if qm.case() != CaseTag::Nilpotent {
        return Err(LatticeError::WrongCase("case 1 basis needs C_E(Q) = 1"));
    }
    let n = qm.labels().len();
    Ok((1..n).map(|i| unit(n, 0).sub(&unit(n, i))).collect())
}

/// `{ψ₁ − ψ₁'} ∪ {ψ₂ − ψ₂'} ∪ {ψ₂ − lψ₁}` with `ψᵢ` least of its degree.
pub fn l_zero_basis_case2(qm: &QuotientModel) -> Result<Vec<LatticeElement>, LatticeError> {
    if qm.case() != CaseTag::Full {
        return Err(LatticeError::WrongCase("case 2 basis needs Q = 1"));
    }
    let l = qm.model().l();
    let deg = qm.degrees();
    let n = deg.len();
    let small: Vec<usize> = (0..n).filter(|&i| deg[i] == l).collect();
    let large: Vec<usize> = (0..n).filter(|&i| deg[i] == l * l).collect();
    let mut out = Vec::new();
    for fam in [&small, &large] {
        for &j in &fam[1..] {
            out.push(unit(n, fam[0]).sub(&unit(n, j)));
        }
    }
    out.push(unit(n, large[0]).sub(&unit(n, small[0]).scale(l as i64)));
    Ok(out)
}

/// `{(Σ τ − Ind ξ) ζ̄} ∪ {τ − τ ζ̄ : ζ̄ ≠ 1}`.
pub fn l_zero_basis_case3(qm: &QuotientModel) -> Result<Vec<LatticeElement>, LatticeError> {
    if qm.axis().is_none() {
        return Err(LatticeError::WrongCase("case 3 basis needs C_E(Q) = E1 or E2"));
    }
    let n = qm.labels().len();
    let l = qm.model().l();
    let pos = |c: CharLabel| qm.position(&c).expect("family label");
    let zetas = qm.residual_chars();
    let m = crate::localmodel::orbit_reps_m(qm).map_err(|_| LatticeError::WrongCase("no orbit representatives"))?;
    let mut out = Vec::new();
    for &xi in &m {
        for &z in &zetas {
            let mut v = LatticeElement::zero(n);
            for r in 0..l {
                v.coeffs[pos(qm.tau(r, z))] += 1;
            }
            v.coeffs[pos(qm.ind(xi, z))] -= 1;
            out.push(v);
        }
    }
    for r in 0..l {
        for &z in &zetas[1..] {
            out.push(unit(n, pos(qm.tau(r, 0))).sub(&unit(n, pos(qm.tau(r, z)))));
        }
    }
    Ok(out)
}

pub fn l_zero_basis(qm: &QuotientModel) -> Result<Vec<LatticeElement>, LatticeError> {
    match qm.case() {
        CaseTag::Nilpotent => l_zero_basis_case1(qm),
        CaseTag::Full => l_zero_basis_case2(qm),
        CaseTag::Residual(_) => l_zero_basis_case3(qm),
    }
}

/// Evidence that a basis is a `ℤ`-basis of `ker d¹ ∩ L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisCertificate {
    pub irr: usize,
    pub d1_rank: usize,
    pub basis_len: usize,
    /// Determinant of the basis written in a computed kernel basis.
    pub det: i64,
    pub invariants_all_one: bool,
}

pub fn certify_basis(qm: &QuotientModel, basis: &[LatticeElement]) -> Result<BasisCertificate, LatticeError> {
    let labels = qm.labels();
    let d1 = linalg::to_big(&d1_matrix(qm.host(), labels));
    for b in basis {
        let support: Vec<(usize, i64)> = b.coeffs.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        let img = d1.iter().any(|row| support.iter().map(|&(j, c)| &row[j] * c).sum::<BigInt>() != BigInt::from(0));
        if img {
            return Err(LatticeError::Certification("basis element not killed by d1"));
        }
    }
    let d1_rank = linalg::rank(&d1);
    if basis.len() + d1_rank != labels.len() {
        return Err(LatticeError::Certification("rank mismatch"));
    }
    let kernel = linalg::IntegerKernel::new(&d1, labels.len());
    let mut coords = Vec::new();
    for b in basis {
        coords.push(kernel.coordinates(&b.to_big()).ok_or(LatticeError::Certification("not in kernel lattice"))?);
    }
    let det = linalg::determinant(&coords);
    let det = if det.is_integer() { i64::try_from(det.to_integer()).unwrap_or(0) } else { 0 };
    let rows: Vec<Vec<BigInt>> = basis.iter().map(|b| b.to_big()).collect();
    let inv = linalg::smith_invariants(&rows);
    let invariants_all_one = inv.len() == basis.len() && inv.iter().all(|x| x.is_one());
    if det.abs() != 1 || !invariants_all_one {
        return Err(LatticeError::Certification("basis is not unimodular"));
    }
    Ok(BasisCertificate { irr: labels.len(), d1_rank, basis_len: basis.len(), det, invariants_all_one })
}
