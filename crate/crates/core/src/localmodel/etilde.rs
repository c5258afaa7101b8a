//! The central extension `Ẽ = ⟨e₁, e₂, z⟩` of order `l³` with
//! `[e₁, e₂] = z` central of order `l`.

use core::fmt;

/// `e₁^i e₂^j z^k`, exponents reduced mod `l`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EtElem {
    pub i: u64,
    pub j: u64,
    pub k: u64,
}

impl fmt::Debug for EtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e1^{} e2^{} z^{}", self.i, self.j, self.k)
    }
}

impl EtElem {
    pub const ONE: EtElem = EtElem { i: 0, j: 0, k: 0 };

    pub fn new(i: u64, j: u64, k: u64) -> Self {
        Self { i, j, k }
    }

    pub fn is_central(&self) -> bool {
        self.i == 0 && self.j == 0
    }
}

/// Arithmetic in `Ẽ` for a fixed `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ETilde {
    l: u64,
}

impl ETilde {
    pub fn new(l: u64) -> Self {
        assert!(l >= 1);
        Self { l }
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn order(&self) -> usize {
        (self.l * self.l * self.l) as usize
    }

    pub fn elem(&self, i: u64, j: u64, k: u64) -> EtElem {
        EtElem { i: i % self.l, j: j % self.l, k: k % self.l }
    }

    /// Uses `e₂^j e₁^{i'} = e₁^{i'} e₂^j z^{-j i'}`.
    pub fn mul(&self, a: EtElem, b: EtElem) -> EtElem {
        let l = self.l;
        let twist = (a.j * b.i) % l;
        EtElem { i: (a.i + b.i) % l, j: (a.j + b.j) % l, k: (a.k + b.k + l - twist) % l }
    }

    pub fn inv(&self, a: EtElem) -> EtElem {
        let l = self.l;
        let k = (2 * l * l - a.k - (a.i * a.j) % l) % l;
        EtElem { i: (l - a.i) % l, j: (l - a.j) % l, k }
    }

    /// `a b a⁻¹`.
    pub fn conj(&self, a: EtElem, b: EtElem) -> EtElem {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn pow(&self, a: EtElem, e: u64) -> EtElem {
        let mut acc = EtElem::ONE;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn order_of(&self, a: EtElem) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != EtElem::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn elements(&self) -> impl Iterator<Item = EtElem> + '_ {
        let l = self.l;
        (0..l).flat_map(move |i| (0..l).flat_map(move |j| (0..l).map(move |k| EtElem { i, j, k })))
    }
}
