//! Integer isometries between character lattices with orthonormal label
//! bases, and the checks applied to them.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use thiserror::Error;

use crate::charlattice::LatticeElement;
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsometryFailure {
    #[error("shape mismatch: {0}")]
    Shape(&'static str),
    #[error("inner product of basis elements {i} and {j} is {expected} but their images give {got}")]
    Gram { i: usize, j: usize, expected: i64, got: i64 },
    #[error("map does not commute with action generator {generator} on basis element {basis}")]
    Stability { generator: usize, basis: usize },
    #[error("map does not commute with star by residual character {zeta} on basis element {basis}")]
    StarCompat { zeta: usize, basis: usize },
    #[error("codomain star action missing")]
    MissingStarAction,
    #[error("vector {0} is not in the lattice spanned by the basis")]
    NotInSublattice(usize),
}

/// `labels[i] ↦ signs[i] · codomain[perm[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedBijection {
    pub perm: Vec<usize>,
    pub signs: Vec<i64>,
}

impl SignedBijection {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn apply(&self, v: &LatticeElement) -> LatticeElement {
        let mut out = vec![0; v.len()];
        for (i, &c) in v.coeffs.iter().enumerate() {
            out[self.perm[i]] += self.signs[i] * c;
        }
        LatticeElement::new(out)
    }

    pub fn inverse(&self) -> Self {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        Self { perm, signs }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let signs = other.perm.iter().zip(&other.signs).map(|(&j, &s)| s * self.signs[j]).collect();
        Self { perm, signs }
    }
}

/// Integer matrix in fixed label order; `matrix[r][c]` is the coefficient of
/// codomain label `r` in the image of domain label `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeIsometry {
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
}

/// A group acting on labels, one permutation per listed element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantAction {
    pub elements: Vec<String>,
    pub perms: Vec<Vec<usize>>,
}

impl LatticeIsometry {
    pub fn from_columns(domain: Vec<String>, codomain: Vec<String>, cols: &[LatticeElement]) -> Self {
        let matrix = (0..codomain.len()).map(|r| cols.iter().map(|c| c.coeffs[r]).collect()).collect();
        Self { domain, codomain, matrix }
    }

    pub fn from_signed(domain: Vec<String>, codomain: Vec<String>, s: &SignedBijection) -> Self {
        let n = domain.len();
        let cols: Vec<LatticeElement> = (0..n).map(|i| s.apply(&LatticeElement::unit(n, i))).collect();
        Self::from_columns(domain, codomain, &cols)
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let s = SignedBijection::identity(labels.len());
        Self::from_signed(labels.clone(), labels, &s)
    }

    pub fn column(&self, c: usize) -> LatticeElement {
        LatticeElement::new(self.matrix.iter().map(|row| row[c]).collect())
    }

    pub fn apply(&self, v: &LatticeElement) -> LatticeElement {
        LatticeElement::new(self.matrix.iter().map(|row| row.iter().zip(&v.coeffs).map(|(a, b)| a * b).sum()).collect())
    }

    /// Recognizes a `±1` permutation matrix.
    pub fn signed_bijection(&self) -> Option<SignedBijection> {
        let n = self.domain.len();
        if self.codomain.len() != n {
            return None;
        }
        let mut perm = vec![0; n];
        let mut signs = vec![0; n];
        let mut hit = vec![false; n];
        for c in 0..n {
            let col = self.column(c);
            let s = col.support();
            if s.len() != 1 || col.coeffs[s[0]].abs() != 1 || hit[s[0]] {
                return None;
            }
            hit[s[0]] = true;
            perm[c] = s[0];
            signs[c] = col.coeffs[s[0]];
        }
        Some(SignedBijection { perm, signs })
    }

    /// Inverse over `ℤ`, when it exists.
    pub fn inverse(&self) -> Option<LatticeIsometry> {
        let n = self.domain.len();
        if self.codomain.len() != n {
            return None;
        }
        let cols: Vec<Vec<BigInt>> = (0..n).map(|c| self.column(c).to_big()).collect();
        let mut inv_cols = Vec::new();
        for r in 0..n {
            let x = linalg::solve_integral(&cols, &LatticeElement::unit(n, r).to_big())?;
            inv_cols.push(LatticeElement::new(x.iter().map(|v| i64::try_from(v).ok()).collect::<Option<Vec<_>>>()?));
        }
        Some(Self::from_columns(self.codomain.clone(), self.domain.clone(), &inv_cols))
    }
}

/// `ΔᵀΔ = I`, returning the first violating pair.
pub fn verify_isometry(delta: &LatticeIsometry) -> Result<(), IsometryFailure> {
    let n = delta.domain.len();
    if delta.matrix.len() != delta.codomain.len() || delta.matrix.iter().any(|r| r.len() != n) {
        return Err(IsometryFailure::Shape("matrix does not match label lists"));
    }
    let basis: Vec<LatticeElement> = (0..n).map(|i| LatticeElement::unit(n, i)).collect();
    let images: Vec<LatticeElement> = (0..n).map(|i| delta.column(i)).collect();
    verify_isometry_on(&basis, &images)
}

/// Gram preservation for a map given on a basis of a sublattice.
pub fn verify_isometry_on(basis: &[LatticeElement], images: &[LatticeElement]) -> Result<(), IsometryFailure> {
    if basis.len() != images.len() {
        return Err(IsometryFailure::Shape("basis and image counts differ"));
    }
    for i in 0..basis.len() {
        for j in 0..=i {
            let (expected, got) = (basis[i].dot(&basis[j]), images[i].dot(&images[j]));
            if expected != got {
                return Err(IsometryFailure::Gram { i: j, j: i, expected, got });
            }
        }
    }
    Ok(())
}

/// Images of the given domain vectors.
pub fn restrict_to_sublattice(
    delta: &LatticeIsometry,
    basis: &[LatticeElement],
) -> Result<Vec<LatticeElement>, IsometryFailure> {
    for (k, b) in basis.iter().enumerate() {
        if b.len() != delta.domain.len() {
            return Err(IsometryFailure::NotInSublattice(k));
        }
    }
    Ok(basis.iter().map(|b| delta.apply(b)).collect())
}

/// Applies the linear map `basis[k] ↦ images[k]` to `v`, which must lie in
/// the `ℤ`-span of the basis.
pub fn apply_on_sublattice(basis: &[LatticeElement], images: &[LatticeElement], v: &LatticeElement) -> Option<LatticeElement> {
    let cols: Vec<Vec<BigInt>> = basis.iter().map(|b| b.to_big()).collect();
    let x = linalg::solve_integral(&cols, &v.to_big())?;
    let width = images.first().map_or(0, |i| i.len());
    let mut out = vec![BigInt::from(0); width];
    for (xk, img) in x.iter().zip(images) {
        for (o, &c) in out.iter_mut().zip(&img.coeffs) {
            *o += xk * c;
        }
    }
    out.into_iter().map(|c| i64::try_from(c).ok()).collect::<Option<Vec<_>>>().map(LatticeElement::new)
}

/// `Δ ∘ s = s ∘ Δ` on the whole label space.
pub fn verify_stability(
    delta: &LatticeIsometry,
    dom: &EquivariantAction,
    cod: &EquivariantAction,
) -> Result<(), IsometryFailure> {
    let n = delta.domain.len();
    let basis: Vec<LatticeElement> = (0..n).map(|i| LatticeElement::unit(n, i)).collect();
    let images: Vec<LatticeElement> = (0..n).map(|i| delta.column(i)).collect();
    verify_stability_on(&basis, &images, &dom.perms, &cod.perms)
}

/// Stability of a map given on a sublattice basis that is closed under the
/// action.
pub fn verify_stability_on(
    basis: &[LatticeElement],
    images: &[LatticeElement],
    dom: &[Vec<usize>],
    cod: &[Vec<usize>],
) -> Result<(), IsometryFailure> {
    if dom.len() != cod.len() {
        return Err(IsometryFailure::Shape("actions have different numbers of elements"));
    }
    for (g, (pd, pc)) in dom.iter().zip(cod).enumerate() {
        for (k, (b, img)) in basis.iter().zip(images).enumerate() {
            let moved = b.permuted(pd);
            match apply_on_sublattice(basis, images, &moved) {
                Some(v) if v == img.permuted(pc) => {}
                _ => return Err(IsometryFailure::Stability { generator: g, basis: k }),
            }
        }
    }
    Ok(())
}

/// `Δ°(λ ∗ η) = λ ∗ Δ°(η)` for every listed `λ` and basis element `η`.
pub fn verify_star_compat(
    basis: &[LatticeElement],
    images: &[LatticeElement],
    dom_star: &[Vec<usize>],
    cod_star: Option<&[Vec<usize>]>,
) -> Result<(), IsometryFailure> {
    let cod = cod_star.ok_or(IsometryFailure::MissingStarAction)?;
    if dom_star.len() != cod.len() {
        return Err(IsometryFailure::Shape("star actions have different sizes"));
    }
    for (z, (pd, pc)) in dom_star.iter().zip(cod).enumerate() {
        for (k, (b, img)) in basis.iter().zip(images).enumerate() {
            match apply_on_sublattice(basis, images, &b.permuted(pd)) {
                Some(v) if v == img.permuted(pc) => {}
                _ => return Err(IsometryFailure::StarCompat { zeta: z, basis: k }),
            }
        }
    }
    Ok(())
}

/// Whether two lists span the same sublattice.
pub fn same_lattice(a: &[LatticeElement], b: &[LatticeElement]) -> bool {
    let ca: Vec<Vec<BigInt>> = a.iter().map(|v| v.to_big()).collect();
    let cb: Vec<Vec<BigInt>> = b.iter().map(|v| v.to_big()).collect();
    b.iter().all(|v| linalg::solve_integral(&ca, &v.to_big()).is_some())
        && a.iter().all(|v| linalg::solve_integral(&cb, &v.to_big()).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn identity_and_negation_pass() {
        let id = LatticeIsometry::identity(names(4));
        assert_eq!(verify_isometry(&id), Ok(()));
        let mut neg = id.clone();
        for row in neg.matrix.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        assert_eq!(verify_isometry(&neg), Ok(()));
        assert_eq!(neg.signed_bijection().unwrap().signs, [-1; 4]);
        assert_eq!(verify_isometry(&neg.inverse().unwrap()), Ok(()));
    }

    #[test]
    fn duplicated_column_fails() {
        let mut d = LatticeIsometry::identity(names(3));
        for row in d.matrix.iter_mut() {
            row[1] = row[0];
        }
        assert_eq!(verify_isometry(&d), Err(IsometryFailure::Gram { i: 0, j: 1, expected: 0, got: 1 }));
        assert!(d.signed_bijection().is_none());
    }

    #[test]
    fn stability_of_transposition() {
        // cyclic action of order 3 on three labels
        let act = EquivariantAction { elements: vec!["s".into()], perms: vec![vec![1, 2, 0]] };
        let id = LatticeIsometry::identity(names(3));
        assert_eq!(verify_stability(&id, &act, &act), Ok(()));
        let swap = SignedBijection { perm: vec![1, 0, 2], signs: vec![1; 3] };
        let d = LatticeIsometry::from_signed(names(3), names(3), &swap);
        assert!(matches!(verify_stability(&d, &act, &act), Err(IsometryFailure::Stability { .. })));
        let s = SignedBijection { perm: vec![0, 1, 2], signs: vec![-1; 3] };
        let d = LatticeIsometry::from_signed(names(3), names(3), &s);
        assert_eq!(verify_stability(&d, &act, &act), Ok(()));
    }

    #[test]
    fn signed_bijection_algebra() {
        let a = SignedBijection { perm: vec![2, 0, 1], signs: vec![1, -1, 1] };
        let id = SignedBijection::identity(3);
        assert_eq!(a.compose(&a.inverse()), id);
        assert_eq!(a.inverse().compose(&a), id);
        let v = LatticeElement::new(vec![1, 2, 3]);
        assert_eq!(a.inverse().apply(&a.apply(&v)), v);
    }

    #[test]
    fn sublattice_maps() {
        let basis = vec![LatticeElement::new(vec![1, -1, 0]), LatticeElement::new(vec![0, 1, -1])];
        let images = basis.clone();
        let v = LatticeElement::new(vec![1, 0, -1]);
        assert_eq!(apply_on_sublattice(&basis, &images, &v), Some(v.clone()));
        assert!(apply_on_sublattice(&basis, &images, &LatticeElement::new(vec![1, 0, 0])).is_none());
        assert!(same_lattice(&basis, &[v, LatticeElement::new(vec![1, -1, 0])]));
        assert!(!same_lattice(&basis, &[LatticeElement::new(vec![2, -2, 0]), LatticeElement::new(vec![0, 1, -1])]));
        let star = vec![vec![1, 2, 0]];
        assert_eq!(verify_star_compat(&basis, &images, &star, Some(&star)), Ok(()));
        assert_eq!(verify_star_compat(&basis, &images, &star, None), Err(IsometryFailure::MissingStarAction));
    }
}
