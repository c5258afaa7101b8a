use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use super::{complement_orbits, finish, m_of, Case2Report, ExtensionError, ExtensionProblem, ExtensionReport, Extension};
use crate::charlattice::LatticeElement;
use crate::isometry::SignedBijection;

/// `v = s (χ_a − χ_b)` with `s = ±1`.
fn signed_difference(v: &LatticeElement) -> Option<(usize, usize, i64)> {
    let s = v.support();
    if s.len() != 2 {
        return None;
    }
    let (x, y) = (v.coeffs[s[0]], v.coeffs[s[1]]);
    if x.abs() != 1 || x != -y {
        return None;
    }
    Some((s[0], s[1], x))
}

/// All `(c, δ, others)` with `vs[k] = δ (χ_c − χ_{others[k]})`, ordered by `c`.
fn recover_common(vs: &[LatticeElement], offset: usize) -> Result<Vec<(usize, i64, Vec<usize>)>, ExtensionError> {
    let diffs: Vec<(usize, usize, i64)> = vs
        .iter()
        .enumerate()
        .map(|(k, v)| signed_difference(v).ok_or(ExtensionError::NotSignedDifference(offset + k)))
        .collect::<Result<_, _>>()?;
    let Some(&(a, b, s)) = diffs.first() else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    for (c, d) in [(a, s), (b, -s)] {
        let mut others = Vec::new();
        for &(x, y, t) in &diffs {
            if (x, t) == (c, d) {
                others.push(y);
            } else if (y, -t) == (c, d) {
                others.push(x);
            } else {
                break;
            }
        }
        if others.len() == diffs.len() {
            let mut seen = others.clone();
            seen.push(c);
            seen.sort();
            seen.dedup();
            if seen.len() == others.len() + 1 {
                out.push((c, d, others));
            }
        }
    }
    out.sort_by_key(|x| x.0);
    if out.is_empty() {
        return Err(ExtensionError::NoCommonCharacter);
    }
    Ok(out)
}

/// `ψ₀ ↦ δχ₀`, `ψ ↦ δχ_ψ` from the images of `ψ₀ − ψ`.
pub fn extend_case1(pb: &ExtensionProblem) -> Result<Extension, ExtensionError> {
    let n = pb.qmodel.labels().len();
    if n < 3 {
        return Err(ExtensionError::Degenerate(n));
    }
    let (c, d, others) = recover_common(&pb.delta_zero, 0)?.remove(0);
    let mut perm = vec![c];
    perm.extend(others);
    let bij = SignedBijection { perm, signs: vec![d; n] };
    Ok(finish(pb, bij, ExtensionReport::Case1 { delta: d, common: c }))
}

/// Integers `a` in `window` with `K a² − 2la ≤ 1`, or `< 1` when strict.
pub fn case2_admissible_a(k: i64, l: i64, strict: bool, window: RangeInclusive<i64>) -> Vec<i64> {
    window
        .filter(|&a| {
            let v = k * a * a - 2 * l * a;
            if strict {
                v < 1
            } else {
                v <= 1
            }
        })
        .collect()
}

/// The degree of `Δ°(ψ₂ − lψ₁) = δ₂χ_{ψ₂} − lδ₁χ_{ψ₁}` must vanish.
pub fn sign_forcing_check(delta1: i64, delta2: i64, d1: i64, d2: i64, l: i64) -> bool {
    -delta1 * l * d1 + delta2 * d2 == 0
}

const A_WINDOW: RangeInclusive<i64> = -10..=10;

pub fn extend_case2(pb: &ExtensionProblem) -> Result<Extension, ExtensionError> {
    let qm = &pb.qmodel;
    let l = qm.model().l();
    let li = l as i64;
    let deg = qm.degrees();
    let n = deg.len();
    let small: Vec<usize> = (0..n).filter(|&i| deg[i] == l).collect();
    let large: Vec<usize> = (0..n).filter(|&i| deg[i] == l * l).collect();
    let (k1, k2) = (small.len(), large.len());
    if k1 < 3 {
        return Err(ExtensionError::Degenerate(k1));
    }
    let vs1 = &pb.delta_zero[..k1 - 1];
    let vs2 = &pb.delta_zero[k1 - 1..k1 + k2 - 2];
    let w = &pb.delta_zero[k1 + k2 - 2];

    // degree-l characters and their sign
    let (c1, delta1, others1) = recover_common(vs1, 0)?.remove(0);
    let mut omega1 = vec![c1];
    omega1.extend(&others1);
    let cands2 = if k2 >= 2 { recover_common(vs2, k1 - 1)? } else { Vec::new() };
    let mut support2: Vec<usize> = vs2.iter().flat_map(|v| v.support()).collect();
    support2.sort();
    support2.dedup();
    if support2.iter().any(|x| omega1.contains(x)) {
        return Err(ExtensionError::OmegaOverlap);
    }

    // Δ°(μ) = δ₁(a Σ_{Ω₁} χ − l χ_{ψ₁}) + Ξ
    let y = w.coeffs[others1[0]];
    if others1.iter().any(|&x| w.coeffs[x] != y) {
        return Err(ExtensionError::NonConstantOmegaCoefficients);
    }
    let a = delta1 * y;
    if w.coeffs[c1] != delta1 * (a - li) {
        return Err(ExtensionError::NonConstantOmegaCoefficients);
    }
    let kk = k1 as i64;
    let before = case2_admissible_a(kk, li, false, A_WINDOW);
    if !before.contains(&a) {
        return Err(ExtensionError::AOutOfRange { a, admissible: before });
    }
    let mut xi = w.clone();
    for &x in &omega1 {
        xi.coeffs[x] -= delta1 * a;
    }
    xi.coeffs[c1] += delta1 * li;
    let after = case2_admissible_a(kk, li, true, A_WINDOW);
    if !after.contains(&a) {
        return Err(ExtensionError::AOutOfRange { a, admissible: after });
    }
    if xi.is_zero() {
        return Err(ExtensionError::XiVanishes);
    }
    let s = xi.support();
    if s.len() != 1 || xi.coeffs[s[0]].abs() != 1 {
        return Err(ExtensionError::XiNotSingle);
    }
    let (cstar, sstar) = (s[0], xi.coeffs[s[0]]);

    // Ξ = δ₂ χ_{ψ₂}
    let (c2, delta2, others2) = if k2 == 1 {
        (cstar, sstar, Vec::new())
    } else {
        cands2.into_iter().find(|(c, d, _)| *c == cstar && *d == sstar).ok_or(ExtensionError::XiNotSingle)?
    };
    let degrees = pb.gside.degrees.as_ref().ok_or(ExtensionError::MissingDegrees)?;
    if degrees.iter().any(|&d| d <= 0) {
        return Err(ExtensionError::MissingDegrees);
    }
    if !sign_forcing_check(delta1, delta2, degrees[c1], degrees[c2], li) || delta1 != delta2 {
        return Err(ExtensionError::SignClash { delta1, delta2 });
    }
    let mut omega2 = vec![c2];
    omega2.extend(&others2);

    let mut perm = vec![usize::MAX; n];
    for (src, dst) in small.iter().zip(&omega1).chain(large.iter().zip(&omega2)) {
        perm[*src] = *dst;
    }
    let mut check = perm.clone();
    check.sort();
    check.dedup();
    if check.len() != n || check[n - 1] >= n {
        return Err(ExtensionError::OmegaOverlap);
    }
    let report = Case2Report {
        a_before_strictness: before,
        a_after_strictness: after,
        a,
        delta1,
        delta2,
        omega1,
        omega2,
    };
    Ok(finish(pb, SignedBijection { perm, signs: vec![delta1; n] }, ExtensionReport::Case2(report)))
}

/// Equivariant matching of the `τ` family (N-side positions `taus`, with
/// `τ_0` first) onto `omega`, trying images of `τ_0` in label order.
fn match_taus(pb: &ExtensionProblem, taus: &[usize], omega: &[usize]) -> Option<Vec<(usize, usize)>> {
    let qm = &pb.qmodel;
    let dom: Vec<Vec<usize>> = qm.normalizer().iter().map(|&s| qm.conjugation_perm(s)).collect();
    'outer: for &x0 in omega {
        let mut map: Vec<(usize, usize)> = Vec::new();
        for (pd, pg) in dom.iter().zip(&pb.gside.e_action) {
            let (src, dst) = (pd[taus[0]], pg[x0]);
            if !taus.contains(&src) || !omega.contains(&dst) {
                continue 'outer;
            }
            match map.iter().find(|(s, _)| *s == src) {
                Some(&(_, d)) if d != dst => continue 'outer,
                Some(_) => {}
                None => map.push((src, dst)),
            }
        }
        let mut imgs: Vec<usize> = map.iter().map(|x| x.1).collect();
        imgs.sort();
        imgs.dedup();
        if map.len() == taus.len() && imgs.len() == taus.len() {
            map.sort();
            return Some(map);
        }
    }
    None
}

pub fn extend_case31(pb: &ExtensionProblem) -> Result<Extension, ExtensionError> {
    let qm = &pb.qmodel;
    let l = qm.model().l() as usize;
    let n = qm.labels().len();
    let m = m_of(qm);
    let pos = |c| qm.position(&c).expect("family label");
    let taus: Vec<usize> = (0..l as u64).map(|r| pos(qm.tau(r, 0))).collect();
    let inds: Vec<usize> = m.iter().map(|&x| pos(qm.ind(x, 0))).collect();
    let orbits = complement_orbits(qm, &pb.gside);
    let bound = l + 1;

    // candidate assignments (χ_ξ per ξ, δ), tie-broken by label order
    let mut candidates: Vec<(Vec<usize>, i64)> = Vec::new();
    if m.len() == 1 {
        let v = &pb.delta_zero[0];
        for x in 0..n {
            for d in [1, -1] {
                if v.coeffs[x] == -d {
                    candidates.push((vec![x], d));
                }
            }
        }
    } else {
        // Δ°(Ind ξ₁ − Ind ξ_k) = δ(χ_{ξ₁} − χ_{ξ_k})
        let diffs: Vec<LatticeElement> = (1..m.len()).map(|k| pb.delta_zero[k].sub(&pb.delta_zero[0])).collect();
        for (c, d, others) in recover_common(&diffs, 1)? {
            let mut phi = vec![c];
            phi.extend(others);
            candidates.push((phi, d));
        }
    }
    for (phi, d) in candidates {
        let omega: Vec<usize> = (0..n).filter(|x| !phi.contains(x)).collect();
        if omega.len() != l || !orbits.iter().any(|o| *o == omega) {
            continue;
        }
        if phi.iter().any(|x| !orbits.iter().any(|o| o.len() == 1 && o[0] == *x)) {
            continue;
        }
        let v = &pb.delta_zero[0];
        let count = v.support().len();
        if count > bound {
            return Err(ExtensionError::InvolvementExceeded { count, bound });
        }
        let mut expect = LatticeElement::zero(n);
        for &x in &omega {
            expect.coeffs[x] = d;
        }
        expect.coeffs[phi[0]] = -d;
        if *v != expect {
            continue;
        }
        let Some(tau_map) = match_taus(pb, &taus, &omega) else { continue };
        let mut perm = vec![0; n];
        for (&src, &dst) in inds.iter().zip(&phi) {
            perm[src] = dst;
        }
        for (src, dst) in tau_map {
            perm[src] = dst;
        }
        let report = ExtensionReport::Case31 { delta: d, omega, stable: phi };
        return Ok(finish(pb, SignedBijection { perm, signs: vec![d; n] }, report));
    }
    if !orbits.iter().any(|o| o.len() == l) {
        return Err(ExtensionError::NoRegularOrbit);
    }
    let count = pb.delta_zero[0].support().len();
    if count > bound {
        return Err(ExtensionError::InvolvementExceeded { count, bound });
    }
    Err(ExtensionError::NoConsistentMatching)
}

pub fn extend_case32(pb: &ExtensionProblem) -> Result<Extension, ExtensionError> {
    let qm = &pb.qmodel;
    let l = qm.model().l();
    let n = qm.labels().len();
    let m = m_of(qm);
    let zetas = qm.residual_chars();
    let r_count = zetas.len();
    let star = pb.gside.star_action.as_ref().ok_or(ExtensionError::MissingStarAction)?;
    let pos = |c| qm.position(&c).expect("family label");
    let a_len = m.len() * r_count;

    // τ family: Δ°(τ_r − τ_r ζ̄) = δ(χ_r − χ_r ∗ ζ̄)
    let mut chis = Vec::new();
    let mut delta = None;
    for r in 0..l as usize {
        let start = a_len + r * (r_count - 1);
        let vs = &pb.delta_zero[start..start + r_count - 1];
        let cands = recover_common(vs, start)?;
        let (c, d, _) = cands
            .into_iter()
            .find(|(c, _, others)| others.iter().enumerate().all(|(k, &o)| star[k + 1][*c] == o))
            .ok_or(ExtensionError::StarFamilyMismatch)?;
        if delta.is_some_and(|x| x != d) {
            return Err(ExtensionError::SignInconsistency);
        }
        delta = Some(d);
        chis.push(c);
    }
    let delta = delta.expect("l > 1");

    // Δ°(Σ τ − Ind ξ) = δ Σ χ_r − δ_ξ χ_ξ
    let bound = l as usize + 1;
    let mut xis = Vec::new();
    for k in 0..m.len() {
        let v = &pb.delta_zero[k * r_count];
        let count = v.support().len();
        if count > bound {
            return Err(ExtensionError::InvolvementExceeded { count, bound });
        }
        let mut rem = v.clone();
        for &c in &chis {
            rem.coeffs[c] -= delta;
        }
        let s = rem.support();
        if s.len() != 1 || rem.coeffs[s[0]].abs() != 1 {
            return Err(ExtensionError::NoConsistentMatching);
        }
        xis.push((s[0], -rem.coeffs[s[0]]));
    }

    // star orbits must be disjoint
    let mut used: Vec<usize> = Vec::new();
    for &c in chis.iter().chain(xis.iter().map(|x| &x.0)) {
        used.extend(star.iter().map(|p| p[c]));
    }
    let total = used.len();
    used.sort();
    used.dedup();
    if used.len() != total {
        return Err(ExtensionError::StarOrbitCollision);
    }

    let mut perm = vec![0; n];
    let mut signs = vec![0; n];
    for (zi, &z) in zetas.iter().enumerate() {
        for (r, &c) in chis.iter().enumerate() {
            let src = pos(qm.tau(r as u64, z));
            perm[src] = star[zi][c];
            signs[src] = delta;
        }
        for (&xi, &(c, d)) in m.iter().zip(&xis) {
            let src = pos(qm.ind(xi, z));
            perm[src] = star[zi][c];
            signs[src] = d;
        }
    }
    let report = ExtensionReport::Case32 { delta_tau: delta, delta_xi: xis.iter().map(|x| x.1).collect() };
    Ok(finish(pb, SignedBijection { perm, signs }, report))
}
