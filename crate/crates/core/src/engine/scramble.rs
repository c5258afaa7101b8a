use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{m_of, CaseKind, ExtensionProblem};
use crate::charlattice::LatticeElement;
use crate::isometry::SignedBijection;
use crate::localmodel::{Family, QuotientModel};

/// A signed relabeling of the G-side: label `i` becomes `perm[i]`, with
/// sign `signs[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scramble {
    pub perm: Vec<usize>,
    pub signs: Vec<i64>,
}

impl Scramble {
    pub fn as_bijection(&self) -> SignedBijection {
        SignedBijection { perm: self.perm.clone(), signs: self.signs.clone() }
    }
}

/// A uniform relabeling with the signs an extension may carry: one global
/// sign, or in case 3.2 one sign per `Ind(ξ)` family and one for the `τ`.
pub fn random_scramble<R: Rng + ?Sized>(qm: &QuotientModel, case: CaseKind, rng: &mut R) -> Scramble {
    let n = qm.labels().len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut sign = || if rng.gen::<bool>() { 1 } else { -1 };
    let signs = if case == CaseKind::Case32 {
        let tau = sign();
        let per_xi: Vec<(u64, i64)> = m_of(qm).into_iter().map(|x| (x, sign())).collect();
        qm.labels()
            .iter()
            .map(|c| match qm.family(c) {
                Some(Family::Ind { xi, .. }) => per_xi.iter().find(|(x, _)| *x == xi).map_or(tau, |p| p.1),
                _ => tau,
            })
            .collect()
    } else {
        let s = sign();
        alloc::vec![s; n]
    };
    Scramble { perm, signs }
}

fn relabel(p: &[usize], perm: &[usize]) -> Vec<usize> {
    let mut out = alloc::vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        out[perm[i]] = perm[x];
    }
    out
}

/// The problem seen through the relabeling: actions, degrees and `Δ°` are
/// transported along it.
pub fn apply_scramble(pb: &ExtensionProblem, sc: &Scramble) -> ExtensionProblem {
    let g = &pb.gside;
    let n = g.labels.len();
    let mut labels = g.labels.clone();
    for i in 0..n {
        labels[sc.perm[i]] = g.labels[i].clone();
    }
    let mut out = pb.clone();
    out.gside.labels = labels;
    out.gside.e_action = g.e_action.iter().map(|p| relabel(p, &sc.perm)).collect();
    out.gside.star_action = g.star_action.as_ref().map(|s| s.iter().map(|p| relabel(p, &sc.perm)).collect());
    out.gside.degrees = g.degrees.as_ref().map(|d| {
        let mut v = d.clone();
        for i in 0..n {
            v[sc.perm[i]] = d[i];
        }
        v
    });
    let bij = sc.as_bijection();
    out.delta_zero = pb.delta_zero.iter().map(|v: &LatticeElement| bij.apply(v)).collect();
    out
}
