//! Extension of `Δ°` from `L°` to the whole block lattice, case by case, and
//! the descent over subgroups that assembles a local system.

mod cases;
mod local;
mod scramble;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::charlattice::{l_zero_basis, LatticeElement, LatticeError};
use crate::isometry::{self, IsometryFailure, LatticeIsometry, SignedBijection};
use crate::localmodel::{orbit_reps_m, CaseTag, QuotientModel};

pub use cases::{case2_admissible_a, extend_case1, extend_case2, extend_case31, extend_case32, sign_forcing_check};
pub use local::{
    assemble_delta, delta_zero, run_local_system, BrauerMap, GSideProvider, LocalSystemFailure, LocalSystemState,
    RunOptions, SelfTestProvider, StepRecord,
};
pub use scramble::{apply_scramble, random_scramble, Scramble};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseKind {
    Case1,
    Case2,
    Case31,
    Case32,
}

impl CaseKind {
    pub fn name(&self) -> &'static str {
        match self {
            CaseKind::Case1 => "Case1",
            CaseKind::Case2 => "Case2",
            CaseKind::Case31 => "Case31",
            CaseKind::Case32 => "Case32",
        }
    }
}

pub fn classify_case(qm: &QuotientModel) -> CaseKind {
    match qm.case() {
        CaseTag::Nilpotent => CaseKind::Case1,
        CaseTag::Full => CaseKind::Case2,
        CaseTag::Residual(_) if qm.residual_trivial() => CaseKind::Case31,
        CaseTag::Residual(_) => CaseKind::Case32,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct GSideFlags {
    pub regular_orbit: bool,
    pub free_star: bool,
}

/// The block side of `C_G(Q)/Q`, known only through its labels and actions.
///
/// `e_action[k]` is the permutation induced by the `k`-th element of
/// `N_E(Q)` as listed by the quotient model; `star_action[k]` by the `k`-th
/// residual character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractGSide {
    pub labels: Vec<String>,
    pub e_action: Vec<Vec<usize>>,
    pub star_action: Option<Vec<Vec<usize>>>,
    pub degrees: Option<Vec<i64>>,
    pub flags: GSideFlags,
}

#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub qmodel: QuotientModel,
    pub gside: AbstractGSide,
    pub basis: Vec<LatticeElement>,
    /// `Δ°(basis[k])` in the G-side labels.
    pub delta_zero: Vec<LatticeElement>,
    pub case: CaseKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case2Report {
    pub a_before_strictness: Vec<i64>,
    pub a_after_strictness: Vec<i64>,
    pub a: i64,
    pub delta1: i64,
    pub delta2: i64,
    pub omega1: Vec<usize>,
    pub omega2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionReport {
    Case1 { delta: i64, common: usize },
    Case2(Case2Report),
    Case31 { delta: i64, omega: Vec<usize>, stable: Vec<usize> },
    Case32 { delta_tau: i64, delta_xi: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub case: CaseKind,
    pub isometry: LatticeIsometry,
    pub bijection: SignedBijection,
    pub report: ExtensionReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("problem is tagged {tagged} but the quotient is {actual}")]
    WrongCase { tagged: &'static str, actual: &'static str },
    #[error("provider inconsistency: {0}")]
    ProviderInconsistent(String),
    #[error("input map is not an isometry: {0}")]
    NotIsometric(IsometryFailure),
    #[error("input map is not stable: {0}")]
    NotStable(IsometryFailure),
    #[error("input map is not compatible with star: {0}")]
    NotStarCompatible(IsometryFailure),
    #[error("star action on the G-side is missing")]
    MissingStarAction,
    #[error("degree functional on the G-side is missing or not positive")]
    MissingDegrees,
    #[error("too few characters to recover a common character ({0})")]
    Degenerate(usize),
    #[error("image of basis element {0} is not a signed difference of two characters")]
    NotSignedDifference(usize),
    #[error("images of the differences share no common character")]
    NoCommonCharacter,
    #[error("character sets of degree l and l^2 overlap")]
    OmegaOverlap,
    #[error("coefficients of the image of mu on the degree-l set are not of the form a, ..., a - l")]
    NonConstantOmegaCoefficients,
    #[error("integer a = {a} violates 1 >= K a^2 - 2 l a after strictness (admissible: {admissible:?})")]
    AOutOfRange { a: i64, admissible: Vec<i64> },
    #[error("remainder Xi vanishes, so the inequality is not strict")]
    XiVanishes,
    #[error("remainder Xi is not a single signed character")]
    XiNotSingle,
    #[error("degree functional forces delta1 = delta2, got {delta1} and {delta2}")]
    SignClash { delta1: i64, delta2: i64 },
    #[error("no regular E2-orbit on the remaining characters")]
    NoRegularOrbit,
    #[error("image involves {count} characters, more than 1 + l = {bound}")]
    InvolvementExceeded { count: usize, bound: usize },
    #[error("no assignment of characters matches the image")]
    NoConsistentMatching,
    #[error("star action is not free: label {label} is fixed by residual character {zeta}")]
    StarNotFree { label: usize, zeta: usize },
    #[error("star orbits of the recovered characters collide")]
    StarOrbitCollision,
    #[error("recovered character family is not a star translate")]
    StarFamilyMismatch,
    #[error("signs along the tau family disagree")]
    SignInconsistency,
    #[error("extension failed its final check: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Problem whose G-side is the N-side quotient itself and `Δ°` the identity.
pub fn self_problem(qm: &QuotientModel) -> Result<ExtensionProblem, ExtensionError> {
    let basis = l_zero_basis(qm)?;
    Ok(ExtensionProblem {
        gside: self_gside(qm),
        delta_zero: basis.clone(),
        basis,
        case: classify_case(qm),
        qmodel: qm.clone(),
    })
}

pub fn self_gside(qm: &QuotientModel) -> AbstractGSide {
    let labels = qm.labels().iter().map(|c| c.to_string()).collect();
    let e_action = qm.normalizer().iter().map(|&s| qm.conjugation_perm(s)).collect();
    let star_action = qm
        .axis()
        .map(|_| qm.residual_chars().iter().map(|&z| qm.star_perm(qm.residual_char(z))).collect::<Vec<_>>());
    let degrees = Some(qm.degrees().iter().map(|&d| d as i64).collect());
    let mut g = AbstractGSide { labels, e_action, star_action, degrees, flags: GSideFlags::default() };
    g.flags = GSideFlags { regular_orbit: has_regular_orbit(qm, &g), free_star: star_is_free(&g).is_ok() };
    g
}

/// Indices into `N_E(Q)` of the complement `E₂` (or `E₁`) in a residual case.
pub(crate) fn complement_indices(qm: &QuotientModel) -> Vec<usize> {
    let Some(axis) = qm.axis() else { return Vec::new() };
    qm.normalizer()
        .iter()
        .enumerate()
        .filter(|(_, s)| match axis {
            crate::localmodel::Axis::First => s.i == 0,
            crate::localmodel::Axis::Second => s.j == 0,
        })
        .map(|(k, _)| k)
        .collect()
}

/// Orbits of the complement on G-labels, each sorted, ordered by least
/// element.
pub(crate) fn complement_orbits(qm: &QuotientModel, g: &AbstractGSide) -> Vec<Vec<usize>> {
    let idx = complement_indices(qm);
    let n = g.labels.len();
    let mut seen = alloc::vec![false; n];
    let mut out = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut orbit: Vec<usize> = idx.iter().map(|&k| g.e_action[k][x]).collect();
        orbit.push(x);
        orbit.sort();
        orbit.dedup();
        for &y in &orbit {
            seen[y] = true;
        }
        out.push(orbit);
    }
    out
}

pub(crate) fn has_regular_orbit(qm: &QuotientModel, g: &AbstractGSide) -> bool {
    let size = complement_indices(qm).len();
    size > 1 && complement_orbits(qm, g).iter().any(|o| o.len() == size)
}

pub(crate) fn star_is_free(g: &AbstractGSide) -> Result<(), ExtensionError> {
    let Some(star) = &g.star_action else { return Err(ExtensionError::MissingStarAction) };
    for (z, perm) in star.iter().enumerate().skip(1) {
        if let Some(label) = (0..perm.len()).find(|&x| perm[x] == x) {
            return Err(ExtensionError::StarNotFree { label, zeta: z });
        }
    }
    Ok(())
}

fn is_perm(p: &[usize], n: usize) -> bool {
    let mut seen = alloc::vec![false; n];
    p.len() == n && p.iter().all(|&x| x < n && !core::mem::replace(&mut seen[x], true))
}

/// Shape and precondition checks, then the hypotheses on `Δ°`.
pub fn verify_problem(pb: &ExtensionProblem) -> Result<(), ExtensionError> {
    let qm = &pb.qmodel;
    let actual = classify_case(qm);
    if actual != pb.case {
        return Err(ExtensionError::WrongCase { tagged: pb.case.name(), actual: actual.name() });
    }
    let g = &pb.gside;
    let n = qm.labels().len();
    let bad = |s: String| Err(ExtensionError::ProviderInconsistent(s));
    if g.labels.len() != n {
        return bad(format!("G-side has {} labels, N-side has {}", g.labels.len(), n));
    }
    if g.e_action.len() != qm.normalizer().len() || g.e_action.iter().any(|p| !is_perm(p, n)) {
        return bad("E-action is not a list of permutations indexed by N_E(Q)".into());
    }
    if let Some(star) = &g.star_action {
        if qm.axis().is_some() && star.len() != qm.residual_chars().len() {
            return bad("star action has the wrong number of elements".into());
        }
        if star.iter().any(|p| !is_perm(p, n)) || star.first().is_some_and(|p| p.iter().enumerate().any(|(i, &x)| i != x)) {
            return bad("star action is not an action".into());
        }
    }
    if let Some(d) = &g.degrees {
        if d.len() != n {
            return bad("degree list has the wrong length".into());
        }
    }
    if pb.basis.iter().any(|v| v.len() != n) {
        return bad("basis vectors have the wrong length".into());
    }
    if pb.basis.len() != pb.delta_zero.len() || pb.delta_zero.iter().any(|v| v.len() != n) {
        return bad("delta_zero matrix has the wrong shape".into());
    }
    match pb.case {
        CaseKind::Case31 => {
            let actual = has_regular_orbit(qm, g);
            if !actual {
                return Err(ExtensionError::NoRegularOrbit);
            }
            if !g.flags.regular_orbit {
                return bad("regular-orbit flag disagrees with the action".into());
            }
        }
        CaseKind::Case32 => {
            star_is_free(g)?;
            if !g.flags.free_star {
                return bad("free-star flag disagrees with the action".into());
            }
        }
        _ => {}
    }
    isometry::verify_isometry_on(&pb.basis, &pb.delta_zero).map_err(ExtensionError::NotIsometric)?;
    let dom: Vec<Vec<usize>> = qm.normalizer().iter().map(|&s| qm.conjugation_perm(s)).collect();
    isometry::verify_stability_on(&pb.basis, &pb.delta_zero, &dom, &g.e_action).map_err(ExtensionError::NotStable)?;
    if pb.case == CaseKind::Case32 {
        let dom: Vec<Vec<usize>> = qm.residual_chars().iter().map(|&z| qm.star_perm(qm.residual_char(z))).collect();
        isometry::verify_star_compat(&pb.basis, &pb.delta_zero, &dom, g.star_action.as_deref())
            .map_err(ExtensionError::NotStarCompatible)?;
    }
    Ok(())
}

/// Checks an extension against the problem: isometry, restriction,
/// stability, star compatibility and lattice equality.
pub fn verify_extension(pb: &ExtensionProblem, ext: &Extension) -> Result<(), ExtensionError> {
    let qm = &pb.qmodel;
    let fail = |s: &str| Err(ExtensionError::CheckFailed(s.into()));
    if isometry::verify_isometry(&ext.isometry).is_err() {
        return fail("not an isometry");
    }
    let restricted = isometry::restrict_to_sublattice(&ext.isometry, &pb.basis).map_err(ExtensionError::NotIsometric)?;
    if restricted != pb.delta_zero {
        return fail("restriction differs from the input");
    }
    if !isometry::same_lattice(&restricted, &pb.delta_zero) {
        return fail("image lattice differs");
    }
    let dom = isometry::EquivariantAction {
        elements: qm.normalizer().iter().map(|s| format!("{s:?}")).collect(),
        perms: qm.normalizer().iter().map(|&s| qm.conjugation_perm(s)).collect(),
    };
    let cod = isometry::EquivariantAction { elements: dom.elements.clone(), perms: pb.gside.e_action.clone() };
    if isometry::verify_stability(&ext.isometry, &dom, &cod).is_err() {
        return fail("not N_E(Q)-stable");
    }
    if let (Some(_), Some(star)) = (qm.axis(), &pb.gside.star_action) {
        let n = qm.labels().len();
        let basis: Vec<LatticeElement> = (0..n).map(|i| LatticeElement::unit(n, i)).collect();
        let images: Vec<LatticeElement> = (0..n).map(|i| ext.isometry.column(i)).collect();
        let dom: Vec<Vec<usize>> = qm.residual_chars().iter().map(|&z| qm.star_perm(qm.residual_char(z))).collect();
        if isometry::verify_star_compat(&basis, &images, &dom, Some(star)).is_err() {
            return fail("not compatible with star");
        }
    }
    Ok(())
}

/// Verifies the problem, runs the case algorithm, and checks the result.
pub fn extend(pb: &ExtensionProblem) -> Result<Extension, ExtensionError> {
    verify_problem(pb)?;
    let canonical = canonical_problem(pb)?;
    let ext = match canonical.case {
        CaseKind::Case1 => extend_case1(&canonical)?,
        CaseKind::Case2 => extend_case2(&canonical)?,
        CaseKind::Case31 => extend_case31(&canonical)?,
        CaseKind::Case32 => extend_case32(&canonical)?,
    };
    verify_extension(pb, &ext)?;
    Ok(ext)
}

/// Rewrites the problem on the standard basis of `L°`.
fn canonical_problem(pb: &ExtensionProblem) -> Result<ExtensionProblem, ExtensionError> {
    let basis = l_zero_basis(&pb.qmodel)?;
    if basis == pb.basis {
        return Ok(pb.clone());
    }
    if !isometry::same_lattice(&basis, &pb.basis) {
        return Err(ExtensionError::ProviderInconsistent("basis does not span L°".into()));
    }
    let delta_zero = basis
        .iter()
        .map(|b| isometry::apply_on_sublattice(&pb.basis, &pb.delta_zero, b))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ExtensionError::ProviderInconsistent("basis does not span L°".into()))?;
    Ok(ExtensionProblem { basis, delta_zero, ..pb.clone() })
}

pub(crate) fn finish(pb: &ExtensionProblem, bij: SignedBijection, report: ExtensionReport) -> Extension {
    let domain = pb.qmodel.labels().iter().map(|c| c.to_string()).collect();
    let isometry = LatticeIsometry::from_signed(domain, pb.gside.labels.clone(), &bij);
    Extension { case: pb.case, isometry, bijection: bij, report }
}

pub(crate) fn m_of(qm: &QuotientModel) -> Vec<u64> {
    orbit_reps_m(qm).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Elem;
    use crate::localmodel::{build_model, quotient_model};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(p: u64, n: u32, m: u32, l: u64, gens: &[Elem]) -> QuotientModel {
        let model = build_model(p, n, m, l, None, None).unwrap();
        let q = model.pgroup().generate(gens);
        quotient_model(&model, &q).unwrap()
    }

    fn instances() -> Vec<(CaseKind, QuotientModel)> {
        alloc::vec![
            (CaseKind::Case1, instance(3, 1, 1, 2, &[Elem(1, 1)])),
            (CaseKind::Case2, instance(3, 1, 1, 2, &[])),
            (CaseKind::Case31, instance(3, 1, 1, 2, &[Elem(0, 1)])),
            (CaseKind::Case31, instance(5, 1, 1, 2, &[Elem(0, 1)])),
            (CaseKind::Case31, instance(7, 1, 1, 3, &[Elem(0, 1)])),
            (CaseKind::Case32, instance(3, 1, 2, 2, &[Elem(0, 3)])),
            (CaseKind::Case32, instance(3, 2, 1, 2, &[Elem(3, 0)])),
        ]
    }

    #[test]
    fn self_instances_extend_to_identity() {
        for (case, qm) in instances() {
            assert_eq!(classify_case(&qm), case);
            let pb = self_problem(&qm).unwrap();
            let ext = extend(&pb).unwrap();
            assert_eq!(ext.bijection, SignedBijection::identity(qm.labels().len()), "{case:?}");
        }
    }

    #[test]
    fn case2_reports_the_a_sets() {
        let qm = instance(3, 1, 1, 2, &[]);
        let ext = extend(&self_problem(&qm).unwrap()).unwrap();
        let ExtensionReport::Case2(r) = ext.report else { panic!() };
        assert_eq!(r.a_before_strictness, [0, 1]);
        assert_eq!(r.a_after_strictness, [0]);
        assert_eq!((r.a, r.delta1, r.delta2), (0, 1, 1));
    }

    #[test]
    fn scrambles_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (case, qm) in instances() {
            let pb = self_problem(&qm).unwrap();
            for _ in 0..10 {
                let sc = random_scramble(&qm, case, &mut rng);
                let spb = apply_scramble(&pb, &sc);
                let ext = extend(&spb).unwrap_or_else(|e| panic!("{case:?}: {e}"));
                verify_extension(&spb, &ext).unwrap();
                if matches!(case, CaseKind::Case1 | CaseKind::Case2 | CaseKind::Case32) {
                    assert_eq!(ext.bijection, sc.as_bijection());
                }
            }
        }
    }

    #[test]
    fn negated_case32() {
        let qm = instance(3, 1, 2, 2, &[Elem(0, 3)]);
        let pb = self_problem(&qm).unwrap();
        let n = qm.labels().len();
        let sc = Scramble { perm: (0..n).collect(), signs: alloc::vec![-1; n] };
        let ext = extend(&apply_scramble(&pb, &sc)).unwrap();
        assert_eq!(ext.report, ExtensionReport::Case32 { delta_tau: -1, delta_xi: alloc::vec![-1] });
    }

    #[test]
    fn shifted_regular_orbit() {
        let qm = instance(3, 1, 1, 2, &[Elem(0, 1)]);
        let pb = self_problem(&qm).unwrap();
        let perm = qm.conjugation_perm(qm.complement_generator().unwrap());
        let sc = Scramble { signs: alloc::vec![1; perm.len()], perm };
        let spb = apply_scramble(&pb, &sc);
        assert_eq!(spb.delta_zero, pb.delta_zero);
        let ext = extend(&spb).unwrap();
        let id = SignedBijection::identity(sc.perm.len());
        assert!(ext.bijection == id || ext.bijection == sc.as_bijection());
        let shifted = finish(&spb, sc.as_bijection(), ext.report.clone());
        verify_extension(&spb, &shifted).unwrap();
    }

    #[test]
    fn no_regular_orbit() {
        let qm = instance(3, 1, 1, 2, &[Elem(0, 1)]);
        let mut pb = self_problem(&qm).unwrap();
        let n = qm.labels().len();
        pb.gside.e_action = pb.gside.e_action.iter().map(|_| (0..n).collect()).collect();
        pb.gside.flags.regular_orbit = false;
        assert_eq!(extend(&pb).unwrap_err(), ExtensionError::NoRegularOrbit);
    }

    #[test]
    fn star_with_fixed_point() {
        let qm = instance(3, 1, 2, 2, &[Elem(0, 3)]);
        let mut pb = self_problem(&qm).unwrap();
        let star = pb.gside.star_action.as_mut().unwrap();
        let p = &mut star[1];
        let y = p[0];
        let x = p.iter().position(|&v| v == 0).unwrap();
        p[0] = 0;
        p[x] = y;
        assert!(matches!(extend(&pb).unwrap_err(), ExtensionError::StarNotFree { label: 0, zeta: 1 }));
    }

    #[test]
    fn non_isometric_input() {
        let qm = instance(3, 1, 1, 2, &[]);
        let mut pb = self_problem(&qm).unwrap();
        pb.delta_zero[0] = pb.delta_zero[0].scale(2);
        assert!(matches!(extend(&pb).unwrap_err(), ExtensionError::NotIsometric(_)));
    }

    fn case2_with_mu_image(w: &[i64]) -> ExtensionProblem {
        let qm = instance(3, 1, 1, 2, &[]);
        let mut pb = self_problem(&qm).unwrap();
        *pb.delta_zero.last_mut().unwrap() = LatticeElement::new(w.to_vec());
        pb
    }

    #[test]
    fn forced_a_equal_one_is_rejected() {
        // labels: five of degree 2, then one of degree 4
        let pb = case2_with_mu_image(&[-1, 1, 1, 1, 1, 0]);
        verify_problem(&pb).unwrap();
        assert_eq!(extend(&pb).unwrap_err(), ExtensionError::AOutOfRange { a: 1, admissible: alloc::vec![0] });
    }

    #[test]
    fn opposite_signs_are_rejected() {
        let pb = case2_with_mu_image(&[-2, 0, 0, 0, 0, -1]);
        verify_problem(&pb).unwrap();
        assert_eq!(extend(&pb).unwrap_err(), ExtensionError::SignClash { delta1: 1, delta2: -1 });
        for (d1, d2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            assert_eq!(sign_forcing_check(d1, d2, 2, 4, 2), d1 == d2);
        }
    }

    #[test]
    fn case1_needs_signed_differences() {
        let qm = instance(3, 1, 1, 2, &[Elem(1, 1)]);
        let mut pb = self_problem(&qm).unwrap();
        pb.delta_zero[0] = pb.delta_zero[0].add(&LatticeElement::unit(qm.labels().len(), 1).scale(2));
        assert_eq!(extend_case1(&pb).unwrap_err(), ExtensionError::NotSignedDifference(0));
    }

    #[test]
    fn wrong_case_tag() {
        let qm = instance(3, 1, 1, 2, &[]);
        let mut pb = self_problem(&qm).unwrap();
        pb.case = CaseKind::Case1;
        assert!(matches!(extend(&pb).unwrap_err(), ExtensionError::WrongCase { .. }));
    }

    #[test]
    fn other_bases_are_rewritten() {
        let qm = instance(3, 1, 2, 2, &[Elem(0, 3)]);
        let mut pb = self_problem(&qm).unwrap();
        let b0 = pb.basis[0].clone();
        for k in 1..pb.basis.len() {
            pb.basis[k] = pb.basis[k].add(&b0);
        }
        pb.delta_zero = pb.basis.clone();
        let ext = extend(&pb).unwrap();
        assert_eq!(ext.bijection, SignedBijection::identity(qm.labels().len()));
    }
}
