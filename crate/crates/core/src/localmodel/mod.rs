//! The local model `N = P ⋊ Ẽ`, its block characters, and the quotients
//! `C_N(Q)/Q` for `Q ≤ P`.

mod etilde;
mod host;
mod model;
mod quotient;

use alloc::sync::Arc;
use alloc::vec::Vec;

pub use etilde::{ETilde, EtElem};
pub use host::{CharLabel, ClassTable, Host, HostElem};
pub use model::{build_model, default_unit, LocalBlockModel, ModelError};
pub use quotient::{orbit_reps_m, quotient_model, Axis, CaseTag, Family, QuotientModel};

/// A subgroup of `E = ⟨e₁⟩ × ⟨e₂⟩` generated by a subset of `{e₁, e₂}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Axes {
    pub first: bool,
    pub second: bool,
}

impl Axes {
    pub const NONE: Axes = Axes { first: false, second: false };
    pub const FIRST: Axes = Axes { first: true, second: false };
    pub const SECOND: Axes = Axes { first: false, second: true };
    pub const BOTH: Axes = Axes { first: true, second: true };

    pub fn count(&self) -> u32 {
        self.first as u32 + self.second as u32
    }

    /// `1`, `E1`, `E2` or `E`.
    pub fn code(&self) -> &'static str {
        match (self.first, self.second) {
            (false, false) => "1",
            (true, false) => "E1",
            (false, true) => "E2",
            (true, true) => "E",
        }
    }
}

/// A block character of a model host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrCharacter {
    pub label: CharLabel,
    pub degree: u64,
}

/// The host `N` itself.
pub fn full_host(model: &Arc<LocalBlockModel>) -> Arc<Host> {
    Arc::new(Host::new(model.clone(), model.pgroup().trivial(), Axes::BOTH))
}

/// `Irr(N, e_θ)`, degree `l` first.
pub fn irr_block(model: &Arc<LocalBlockModel>) -> Vec<IrrCharacter> {
    let h = full_host(model);
    h.block_labels().into_iter().map(|label| IrrCharacter { degree: h.degree(&label), label }).collect()
}

/// Numbers of block characters of degree `l` and `l²`.
pub fn count_degrees(model: &Arc<LocalBlockModel>) -> Result<(u64, u64), ModelError> {
    let (q1, q2, l) = (model.q1(), model.q2(), model.l());
    let formula = (q1 + q2 - 1, (q1 - 1) * (q2 - 1) / (l * l));
    let irr = irr_block(model);
    let small = irr.iter().filter(|c| c.degree == l).count() as u64;
    let large = irr.iter().filter(|c| c.degree == l * l).count() as u64;
    if small + large != irr.len() as u64 {
        return Err(ModelError::Inconsistent("degree outside {l, l^2}"));
    }
    if (small, large) != formula {
        return Err(ModelError::Inconsistent("degree counts disagree with enumeration"));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_counts() {
        let m = build_model(3, 1, 1, 2, None, None).unwrap();
        let irr = irr_block(&m);
        assert_eq!(irr.len(), 6);
        assert_eq!(irr.iter().filter(|c| c.degree == 2).count(), 5);
        let m = build_model(5, 1, 2, 4, None, None).unwrap();
        let irr = irr_block(&m);
        assert_eq!(irr.iter().filter(|c| c.degree == 4).count(), 29);
        assert_eq!(irr.iter().filter(|c| c.degree == 16).count(), 6);
        assert_eq!(irr.iter().map(|c| c.degree * c.degree).sum::<u64>(), 2000);
        assert_eq!(count_degrees(&build_model(7, 1, 1, 3, None, None).unwrap()), Ok((13, 4)));
        assert_eq!(count_degrees(&build_model(3, 2, 1, 2, None, None).unwrap()), Ok((11, 4)));
    }
}
