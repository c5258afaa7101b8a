use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{Axes, CharLabel, EtElem, Host, LocalBlockModel, ModelError};
use crate::groups::{Elem, Subgroup};

/// The generator of `C_E(Q)` in the residual case.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Axis {
    /// `C_E(Q) = E₁`, so `1 ≠ Q ≤ P₂`.
    First,
    /// `C_E(Q) = E₂`, so `1 ≠ Q ≤ P₁`.
    Second,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum CaseTag {
    /// `C_E(Q) = 1`.
    Nilpotent,
    /// `Q = 1`.
    Full,
    /// `C_E(Q)` is one of the factors.
    Residual(Axis),
}

/// Role of a character in a residual quotient.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Family {
    /// `τ_r ζ̄`, linear.
    Tau { r: u64, zeta: u64 },
    /// `Ind(ξ) ζ̄` for `ξ ∈ M`.
    Ind { xi: u64, zeta: u64 },
}

#[derive(Clone, Debug)]
pub struct QuotientModel {
    host: Arc<Host>,
    case: CaseTag,
    labels: Vec<CharLabel>,
    normalizer: Vec<EtElem>,
}

pub fn quotient_model(model: &Arc<LocalBlockModel>, q: &Subgroup) -> Result<QuotientModel, ModelError> {
    if !model.is_subgroup(q) {
        return Err(ModelError::NotASubgroup);
    }
    let host = Arc::new(Host::for_subgroup(model.clone(), q.clone()));
    let case = match host.axes() {
        Axes::NONE => CaseTag::Nilpotent,
        Axes::BOTH => CaseTag::Full,
        Axes::FIRST => CaseTag::Residual(Axis::First),
        _ => CaseTag::Residual(Axis::Second),
    };
    let labels = host.block_labels();
    Ok(QuotientModel { case, labels, normalizer: model.normalizer(q), host })
}

/// `Ẽ_i`-orbit representatives on the nontrivial characters of the acting
/// factor, as coordinates on that factor.
pub fn orbit_reps_m(qm: &QuotientModel) -> Result<Vec<u64>, ModelError> {
    let axis = qm.axis().ok_or(ModelError::WrongCase("orbit representatives need a residual quotient"))?;
    let model = qm.model();
    let (q, a) = match axis {
        Axis::First => (model.q1(), model.a1()),
        Axis::Second => (model.q2(), model.a2()),
    };
    let mut out = Vec::new();
    for s in 1..q {
        let mut x = s;
        let mut least = s;
        for _ in 0..model.l() {
            x = x * a % q;
            least = least.min(x);
        }
        if least == s {
            out.push(s);
        }
    }
    Ok(out)
}

impl QuotientModel {
    pub fn host(&self) -> &Arc<Host> {
        &self.host
    }
    pub fn model(&self) -> &Arc<LocalBlockModel> {
        self.host.model()
    }
    pub fn case(&self) -> CaseTag {
        self.case
    }
    pub fn axis(&self) -> Option<Axis> {
        match self.case {
            CaseTag::Residual(a) => Some(a),
            _ => None,
        }
    }
    pub fn kernel(&self) -> &Subgroup {
        self.host.kernel()
    }
    /// Block characters in canonical order.
    pub fn labels(&self) -> &[CharLabel] {
        &self.labels
    }
    pub fn position(&self, c: &CharLabel) -> Option<usize> {
        self.labels.iter().position(|x| x == c)
    }
    pub fn degrees(&self) -> Vec<u64> {
        self.labels.iter().map(|c| self.host.degree(c)).collect()
    }
    /// `N_E(Q)` as elements `e₁^i e₂^j`.
    pub fn normalizer(&self) -> &[EtElem] {
        &self.normalizer
    }

    /// Whether the residual group `P̄` is trivial.
    pub fn residual_trivial(&self) -> bool {
        self.residual_chars().len() == 1
    }

    fn pack(&self, acting: u64, residual: u64) -> Elem {
        match self.axis() {
            Some(Axis::Second) => Elem(residual, acting),
            _ => Elem(acting, residual),
        }
    }

    fn unpack(&self, x: Elem) -> (u64, u64) {
        match self.axis() {
            Some(Axis::Second) => (x.1, x.0),
            _ => (x.0, x.1),
        }
    }

    /// `Irr(P̄)` as coordinates on the residual factor, trivial one first.
    pub fn residual_chars(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .host
            .quotient_chars()
            .into_iter()
            .map(|x| self.unpack(x))
            .filter(|&(a, _)| a == 0)
            .map(|(_, z)| z)
            .collect();
        v.sort();
        v
    }

    /// `ζ̄` as a character of `P/Q`.
    pub fn residual_char(&self, zeta: u64) -> Elem {
        self.pack(0, zeta)
    }

    pub fn tau(&self, r: u64, zeta: u64) -> CharLabel {
        let stab = match self.axis() {
            Some(Axis::Second) => Axes::SECOND,
            _ => Axes::FIRST,
        };
        CharLabel { xi: self.pack(0, zeta), stab, beta: r }
    }

    pub fn ind(&self, xi: u64, zeta: u64) -> CharLabel {
        CharLabel { xi: self.pack(xi, zeta), stab: Axes::NONE, beta: 0 }
    }

    pub fn family(&self, c: &CharLabel) -> Option<Family> {
        self.axis()?;
        let (a, zeta) = self.unpack(c.xi);
        Some(if a == 0 { Family::Tau { r: c.beta, zeta } } else { Family::Ind { xi: a, zeta } })
    }

    /// Generator of the complementary factor of `E`, which acts on the labels.
    pub fn complement_generator(&self) -> Option<EtElem> {
        Some(match self.axis()? {
            Axis::First => EtElem::new(0, 1, 0),
            Axis::Second => EtElem::new(1, 0, 0),
        })
    }

    /// Permutation of `labels()` induced by conjugation with `s ∈ N_E(Q)`.
    pub fn conjugation_perm(&self, s: EtElem) -> Vec<usize> {
        self.labels
            .iter()
            .map(|c| self.position(&self.host.conjugate_label(c, s)).expect("closed under N_E(Q)"))
            .collect()
    }

    /// Permutation of `labels()` induced by `λ ∗ -` for a stable `λ`.
    pub fn star_perm(&self, lambda: Elem) -> Vec<usize> {
        self.labels
            .iter()
            .map(|c| self.position(&self.host.star_label(lambda, c)).expect("closed under star"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localmodel::build_model;

    #[test]
    fn residual_examples() {
        let m = build_model(3, 1, 1, 2, None, None).unwrap();
        let qm = quotient_model(&m, &m.p2()).unwrap();
        assert_eq!(qm.case(), CaseTag::Residual(Axis::First));
        assert_eq!(qm.degrees(), [1, 1, 2]);
        assert_eq!(orbit_reps_m(&qm).unwrap().len(), 1);
        assert!(qm.residual_trivial());
        let labels = qm.labels();
        assert_eq!(labels[..2], [qm.tau(0, 0), qm.tau(1, 0)]);
        assert_eq!(labels[2], qm.ind(1, 0));

        let m = build_model(3, 1, 2, 2, None, None).unwrap();
        let q = m.pgroup().generate(&[Elem(0, 3)]);
        let qm = quotient_model(&m, &q).unwrap();
        assert_eq!(qm.labels().len(), 9);
        assert_eq!(qm.residual_chars(), [0, 3, 6]);

        let m = build_model(3, 1, 1, 2, None, None).unwrap();
        let diag = m.pgroup().generate(&[Elem(1, 1)]);
        assert_eq!(quotient_model(&m, &diag).unwrap().case(), CaseTag::Nilpotent);
        assert!(matches!(
            orbit_reps_m(&quotient_model(&m, &diag).unwrap()),
            Err(ModelError::WrongCase(_))
        ));
        assert_eq!(quotient_model(&m, &m.pgroup().trivial()).unwrap().case(), CaseTag::Full);

        for (p, n, count) in [(3, 1, 1), (5, 1, 2), (3, 2, 4)] {
            let m = build_model(p, n, 1, 2, None, None).unwrap();
            assert_eq!(orbit_reps_m(&quotient_model(&m, &m.p2()).unwrap()).unwrap().len(), count);
        }
    }

    #[test]
    fn complement_permutes_tau_and_fixes_ind() {
        for (p, n, m, l) in [(3, 1, 1, 2), (5, 1, 1, 4), (7, 1, 1, 3), (5, 2, 1, 2)] {
            let model = build_model(p, n, m, l, None, None).unwrap();
            for q in [model.p2(), model.p1()] {
                let qm = quotient_model(&model, &q).unwrap();
                let s = qm.complement_generator().unwrap();
                let mut orbit = alloc::vec![qm.tau(0, 0)];
                for _ in 1..l {
                    let next = qm.host().conjugate_label(orbit.last().unwrap(), s);
                    orbit.push(next);
                }
                orbit.sort();
                orbit.dedup();
                assert_eq!(orbit.len() as u64, l);
                for xi in orbit_reps_m(&qm).unwrap() {
                    let c = qm.ind(xi, 0);
                    assert_eq!(qm.host().conjugate_label(&c, s), c);
                }
            }
        }
    }
}
