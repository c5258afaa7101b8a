use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::etilde::EtElem;
use super::model::LocalBlockModel;
use super::Axes;
use crate::cyclotomic::RootSum;
use crate::groups::{Elem, Subgroup};

/// `C_N(Q)/Q = (P/Q) ⋊ S̃` where `S̃` is the preimage in `Ẽ` of `C_E(Q)`.
#[derive(Clone, Debug)]
pub struct Host {
    model: Arc<LocalBlockModel>,
    q: Subgroup,
    axes: Axes,
    reps: Vec<Elem>,
    coset_of: Vec<u32>,
}

/// `(x, e)` with `x` a coset representative in `P/Q` and `e ∈ S̃`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HostElem {
    pub x: Elem,
    pub e: EtElem,
}

impl fmt::Debug for HostElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}.{:?}", self.x, self.e)
    }
}

/// Clifford data of a block character: `Ind(ξ β)` from `(P/Q) ⋊ T̃`.
///
/// `xi` is the least element of its `S̃`-orbit, `stab` the axes of its
/// stabilizer, and `beta` indexes `Irr(T̃ | θ)` when `T̃` is abelian of order
/// `l²` (`β_r(e^a z^k) = ω^{ra+k}`); otherwise it is 0.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CharLabel {
    pub xi: Elem,
    pub stab: Axes,
    pub beta: u64,
}

impl fmt::Display for CharLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi[{},{}|{}:{}]", self.xi.0, self.xi.1, self.stab.code(), self.beta)
    }
}

impl Host {
    pub fn new(model: Arc<LocalBlockModel>, q: Subgroup, axes: Axes) -> Self {
        let g = *model.pgroup();
        let mut coset_of = vec![u32::MAX; g.order()];
        let mut reps = Vec::new();
        for x in g.elements() {
            if coset_of[g.index(x)] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(x);
            for &y in q.elements() {
                coset_of[g.index(g.add(x, y))] = c;
            }
        }
        Self { model, q, axes, reps, coset_of }
    }

    /// `C_N(Q)/Q` for the given `Q`.
    pub fn for_subgroup(model: Arc<LocalBlockModel>, q: Subgroup) -> Self {
        let axes = model.centralizer_axes(&q);
        Self::new(model, q, axes)
    }

    pub fn model(&self) -> &Arc<LocalBlockModel> {
        &self.model
    }
    pub fn kernel(&self) -> &Subgroup {
        &self.q
    }
    pub fn axes(&self) -> Axes {
        self.axes
    }
    pub fn coset_reps(&self) -> &[Elem] {
        &self.reps
    }
    fn l(&self) -> u64 {
        self.model.l()
    }
    fn range(&self, on: bool) -> u64 {
        if on {
            self.l()
        } else {
            1
        }
    }
    pub fn stilde_order(&self) -> usize {
        (self.range(self.axes.first) * self.range(self.axes.second) * self.l()) as usize
    }
    pub fn order(&self) -> usize {
        self.reps.len() * self.stilde_order()
    }

    pub fn canon(&self, x: Elem) -> Elem {
        let g = self.model.pgroup();
        self.reps[self.coset_of[g.index(x)] as usize]
    }

    pub fn coset_index(&self, x: Elem) -> usize {
        self.coset_of[self.model.pgroup().index(x)] as usize
    }

    /// Elements of `S̃`, ordered by `(i, j, k)`.
    pub fn stilde(&self) -> impl Iterator<Item = EtElem> + '_ {
        let (ri, rj, l) = (self.range(self.axes.first), self.range(self.axes.second), self.l());
        (0..ri).flat_map(move |i| (0..rj).flat_map(move |j| (0..l).map(move |k| EtElem::new(i, j, k))))
    }

    /// `e₁^i e₂^j` in `S̃`, representatives of `S̃/Z`.
    pub fn stilde_mod_z(&self) -> impl Iterator<Item = EtElem> + '_ {
        let (ri, rj) = (self.range(self.axes.first), self.range(self.axes.second));
        (0..ri).flat_map(move |i| (0..rj).map(move |j| EtElem::new(i, j, 0)))
    }

    pub fn contains_e(&self, e: EtElem) -> bool {
        (e.i == 0 || self.axes.first) && (e.j == 0 || self.axes.second)
    }

    pub fn stilde_index(&self, e: EtElem) -> usize {
        let (rj, l) = (self.range(self.axes.second), self.l());
        ((e.i * rj + e.j) * l + e.k) as usize
    }

    pub fn index(&self, g: HostElem) -> usize {
        self.coset_index(g.x) * self.stilde_order() + self.stilde_index(g.e)
    }

    pub fn element(&self, idx: usize) -> HostElem {
        let so = self.stilde_order();
        let x = self.reps[idx / so];
        let mut r = (idx % so) as u64;
        let l = self.l();
        let k = r % l;
        r /= l;
        let rj = self.range(self.axes.second);
        let j = r % rj;
        let i = r / rj;
        HostElem { x, e: EtElem::new(i, j, k) }
    }

    pub fn elements(&self) -> impl Iterator<Item = HostElem> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn one(&self) -> HostElem {
        HostElem { x: Elem(0, 0), e: EtElem::ONE }
    }

    pub fn elem(&self, x: Elem, e: EtElem) -> HostElem {
        HostElem { x: self.canon(x), e }
    }

    pub fn mul(&self, a: HostElem, b: HostElem) -> HostElem {
        let g = self.model.pgroup();
        let x = g.add(a.x, self.model.act(a.e, b.x));
        HostElem { x: self.canon(x), e: self.model.etilde().mul(a.e, b.e) }
    }

    pub fn inv(&self, a: HostElem) -> HostElem {
        let et = self.model.etilde();
        let ei = et.inv(a.e);
        let x = self.model.pgroup().neg(self.model.act(ei, a.x));
        HostElem { x: self.canon(x), e: ei }
    }

    /// `a b a⁻¹`.
    pub fn conj(&self, a: HostElem, b: HostElem) -> HostElem {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn pow(&self, a: HostElem, mut e: u64) -> HostElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn order_of(&self, a: HostElem) -> u64 {
        let oe = self.model.etilde().order_of(a.e);
        let b = self.pow(a, oe);
        oe * self.model.pgroup().elem_order(b.x)
    }

    /// The `p`-part and `p'`-part of `g`.
    pub fn split(&self, g: HostElem) -> (HostElem, HostElem) {
        let p = self.model.p();
        let mut o = self.order_of(g);
        let mut pa = 1;
        while o % p == 0 {
            o /= p;
            pa *= p;
        }
        // c ≡ 1 mod p^a, c ≡ 0 mod o'
        let c = (0..pa).map(|t| t * o).find(|c| c % pa == 1 % pa).unwrap_or(0);
        let gp = self.pow(g, c);
        let gq = self.mul(g, self.inv(gp));
        (gp, gq)
    }

    pub fn is_p_element(&self, g: HostElem) -> bool {
        g.e == EtElem::ONE
    }

    /// Characters of `P` trivial on `Q`.
    pub fn quotient_chars(&self) -> Vec<Elem> {
        let m = &self.model;
        let gens = m.pgroup().canonical_generators(&self.q);
        m.pgroup().elements().filter(|&xi| gens.iter().all(|&y| m.char_exponent(xi, y) == 0)).collect()
    }

    /// The `S̃`-orbit of a character of `P/Q`.
    pub fn char_orbit(&self, xi: Elem) -> Vec<Elem> {
        let mut v: Vec<Elem> = self.stilde_mod_z().map(|e| self.model.act_char(e, xi)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn orbit_rep(&self, xi: Elem) -> Elem {
        self.stilde_mod_z().map(|e| self.model.act_char(e, xi)).min().unwrap()
    }

    pub fn stabilizer(&self, xi: Elem) -> Axes {
        Axes { first: self.axes.first && xi.0 == 0, second: self.axes.second && xi.1 == 0 }
    }

    /// All block characters, sorted by degree and then label.
    pub fn block_labels(&self) -> Vec<CharLabel> {
        let mut out = Vec::new();
        for xi in self.quotient_chars() {
            if self.orbit_rep(xi) != xi {
                continue;
            }
            let stab = self.stabilizer(xi);
            let nb = if stab.count() == 1 { self.l() } else { 1 };
            for beta in 0..nb {
                out.push(CharLabel { xi, stab, beta });
            }
        }
        out.sort_by_key(|c| (self.degree(c), *c));
        out
    }

    pub fn degree(&self, c: &CharLabel) -> u64 {
        let idx = self.l().pow(self.axes.count() - c.stab.count());
        if c.stab == Axes::BOTH {
            idx * self.l()
        } else {
            idx
        }
    }

    /// Exponent of `β(t)` in `ζ_M` for `t ∈ T̃`, or `None` where `β` vanishes.
    /// The value is `l ω^k` on the center when `T̃ = Ẽ`.
    fn beta_exponent(&self, c: &CharLabel, t: EtElem) -> Option<u64> {
        let l = self.l();
        let w = self.model.conductor() / l;
        let a = match (c.stab.first, c.stab.second) {
            (false, false) => 0,
            (true, false) => c.beta * t.i,
            (false, true) => c.beta * t.j,
            (true, true) => {
                if !t.is_central() {
                    return None;
                }
                0
            }
        };
        Some((a + t.k) % l * w)
    }

    fn transversal(&self, stab: Axes) -> impl Iterator<Item = EtElem> + '_ {
        let ri = self.range(self.axes.first && !stab.first);
        let rj = self.range(self.axes.second && !stab.second);
        (0..ri).flat_map(move |i| (0..rj).map(move |j| EtElem::new(i, j, 0)))
    }

    /// `χ(g)` by the induction formula.
    pub fn value(&self, c: &CharLabel, g: HostElem) -> RootSum {
        let mut out = RootSum::zero(self.model.conductor());
        if (g.e.i != 0 && !c.stab.first) || (g.e.j != 0 && !c.stab.second) {
            return out;
        }
        let et = self.model.etilde();
        let mult = if c.stab == Axes::BOTH { self.l() as i64 } else { 1 };
        for t in self.transversal(c.stab) {
            let ti = et.inv(t);
            let y = self.model.act(ti, g.x);
            let f = et.mul(et.mul(ti, g.e), t);
            if let Some(b) = self.beta_exponent(c, f) {
                out.add_root((self.model.char_exponent(c.xi, y) + b) as i64, mult);
            }
        }
        out
    }

    /// Rewrites `Ind(ξ' · β^w)` in normal form, where `β^w(t) = β(w t w⁻¹)`
    /// and `ξ'` lies in the orbit of some label.
    fn normalize(&self, xi_new: Elem, c: &CharLabel, w: EtElem) -> CharLabel {
        let et = self.model.etilde();
        let rep = self.orbit_rep(xi_new);
        let stab = self.stabilizer(rep);
        debug_assert_eq!(stab, c.stab);
        let beta = if stab.count() == 1 {
            let u = self
                .stilde_mod_z()
                .find(|&u| self.model.act_char(u, rep) == xi_new)
                .expect("orbit representative");
            // β'(t) = β(w u⁻¹ t u w⁻¹), read off at the generator of T
            let gen = if stab.first { EtElem::new(1, 0, 0) } else { EtElem::new(0, 1, 0) };
            let s = et.mul(w, et.inv(u));
            let img = et.conj(s, gen);
            let l = self.l();
            (c.beta * if stab.first { img.i } else { img.j } + img.k) % l
        } else {
            0
        };
        CharLabel { xi: rep, stab, beta }
    }

    /// Label of `χ^s : g ↦ χ(s g s⁻¹)` for `s = e₁^i e₂^j` normalizing `Q`.
    pub fn conjugate_label(&self, c: &CharLabel, s: EtElem) -> CharLabel {
        self.normalize(self.model.act_char(s, c.xi), c, s)
    }

    /// Label of `λ ∗ χ` for an `S̃`-stable character `λ` of `P/Q`.
    pub fn star_label(&self, lambda: Elem, c: &CharLabel) -> CharLabel {
        let xi = self.model.pgroup().add(c.xi, lambda);
        self.normalize(xi, c, EtElem::ONE)
    }

    pub fn is_stable_char(&self, lambda: Elem) -> bool {
        self.stilde_mod_z().all(|e| self.model.act_char(e, lambda) == lambda)
    }
}

/// Conjugacy classes of a host, by orbit closure.
#[derive(Clone, Debug)]
pub struct ClassTable {
    host: Arc<Host>,
    reps: Vec<HostElem>,
    sizes: Vec<u64>,
    class_of: Vec<u32>,
}

impl ClassTable {
    pub fn new(host: Arc<Host>) -> Self {
        let n = host.order();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let nx = parent[parent[x as usize] as usize];
                parent[x as usize] = nx;
                x = nx;
            }
            x
        }
        let mut gens = vec![host.elem(Elem(1, 0), EtElem::ONE), host.elem(Elem(0, 1), EtElem::ONE)];
        if host.axes.first {
            gens.push(host.elem(Elem(0, 0), EtElem::new(1, 0, 0)));
        }
        if host.axes.second {
            gens.push(host.elem(Elem(0, 0), EtElem::new(0, 1, 0)));
        }
        for idx in 0..n {
            let g = host.element(idx);
            for &s in &gens {
                let h = host.index(host.conj(s, g)) as u32;
                let (a, b) = (find(&mut parent, idx as u32), find(&mut parent, h));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            }
        }
        let mut class_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        let mut root_class = vec![u32::MAX; n];
        for idx in 0..n {
            let r = find(&mut parent, idx as u32) as usize;
            if root_class[r] == u32::MAX {
                root_class[r] = reps.len() as u32;
                reps.push(host.element(idx));
                sizes.push(0);
            }
            let c = root_class[r];
            class_of[idx] = c;
            sizes[c as usize] += 1;
        }
        Self { host, reps, sizes, class_of }
    }

    pub fn host(&self) -> &Arc<Host> {
        &self.host
    }
    pub fn len(&self) -> usize {
        self.reps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
    pub fn reps(&self) -> &[HostElem] {
        &self.reps
    }
    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }
    pub fn class_of(&self, g: HostElem) -> usize {
        self.class_of[self.host.index(g)] as usize
    }
    pub fn group_order(&self) -> u64 {
        self.host.order() as u64
    }

    /// `Σ_classes |C| a(C) conj(b(C))` as a root sum; divide by `|G|` for the
    /// inner product.
    pub fn pairing(&self, a: &[RootSum], b: &[RootSum]) -> RootSum {
        let mut acc = RootSum::zero(self.host.model().conductor());
        for ((x, y), &s) in a.iter().zip(b).zip(&self.sizes) {
            acc.add_assign(&x.mul(&y.conjugate()).scaled(s as i64));
        }
        acc
    }

    pub fn values(&self, c: &CharLabel) -> Vec<RootSum> {
        self.reps.iter().map(|&g| self.host.value(c, g)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localmodel::build_model;

    fn rational_part(t: &ClassTable, r: &RootSum) -> i64 {
        let v = r.reduced(t.host().model().field());
        assert!(v.iter().skip(1).all(|&c| c == 0), "not rational: {v:?}");
        let c0 = v.first().copied().unwrap_or(0);
        assert_eq!(c0 % t.group_order() as i64, 0);
        c0 / t.group_order() as i64
    }

    fn hosts() -> Vec<Arc<Host>> {
        let mut out = Vec::new();
        for (p, n, m, l) in [(3, 1, 1, 2), (3, 1, 2, 2), (5, 1, 1, 4), (5, 1, 1, 2), (3, 2, 1, 2)] {
            let model = build_model(p, n, m, l, None, None).unwrap();
            for q in crate::groups::subgroup_lattice(model.pgroup()) {
                out.push(Arc::new(Host::for_subgroup(model.clone(), q)));
            }
        }
        out
    }

    #[test]
    fn group_law() {
        let model = build_model(3, 1, 2, 2, None, None).unwrap();
        let h = Host::for_subgroup(model.clone(), model.pgroup().trivial());
        let els: Vec<_> = h.elements().collect();
        for (n, &a) in els.iter().enumerate().step_by(7) {
            assert_eq!(h.index(a), n);
            assert_eq!(h.mul(a, h.inv(a)), h.one());
            for &b in els.iter().step_by(11) {
                for &c in els.iter().step_by(13) {
                    assert_eq!(h.mul(h.mul(a, b), c), h.mul(a, h.mul(b, c)));
                }
            }
            let (gp, gq) = h.split(a);
            assert_eq!(h.mul(gp, gq), a);
            assert_eq!(h.mul(gp, gq), h.mul(gq, gp));
            assert!(h.is_p_element(gp));
            assert_ne!(h.order_of(gq) % 3, 0);
        }
    }

    #[test]
    fn orthonormal_and_complete() {
        for h in hosts() {
            let t = ClassTable::new(h.clone());
            let labels = h.block_labels();
            let vals: Vec<_> = labels.iter().map(|c| t.values(c)).collect();
            for (a, va) in vals.iter().enumerate() {
                for (b, vb) in vals.iter().enumerate() {
                    assert_eq!(rational_part(&t, &t.pairing(va, vb)), (a == b) as i64);
                }
            }
            let sq: u64 = labels.iter().map(|c| h.degree(c).pow(2)).sum();
            assert_eq!(sq * h.l(), h.order() as u64, "block dimension for {:?}", h.kernel());
            for c in &labels {
                assert_eq!(h.value(c, h.one()).reduced(h.model().field())[0], h.degree(c) as i64);
            }
        }
    }

    #[test]
    fn label_actions_match_values() {
        for h in hosts() {
            let t = ClassTable::new(h.clone());
            let model = h.model().clone();
            let field = model.field().clone();
            let labels = h.block_labels();
            let same = |a: &[RootSum], b: &[RootSum]| {
                a.iter().zip(b).all(|(x, y)| {
                    let mut d = x.clone();
                    d.add_assign(&y.scaled(-1));
                    d.is_zero_in(&field)
                })
            };
            for s in model.normalizer(h.kernel()) {
                let sh = h.elem(Elem(0, 0), s);
                for c in &labels {
                    let d = h.conjugate_label(c, s);
                    assert!(labels.contains(&d));
                    let direct: Vec<_> = t.reps().iter().map(|&g| h.value(c, h.conj(sh, g))).collect();
                    assert!(same(&direct, &t.values(&d)), "conjugation {c} by {s:?}");
                }
            }
            for lambda in h.quotient_chars().into_iter().filter(|&x| h.is_stable_char(x)) {
                for c in &labels {
                    let d = h.star_label(lambda, c);
                    let direct: Vec<_> = t
                        .reps()
                        .iter()
                        .map(|&g| {
                            let (gp, _) = h.split(g);
                            let mut v = RootSum::zero(model.conductor());
                            v.add_root(model.char_exponent(lambda, gp.x) as i64, 1);
                            v.mul(&h.value(c, g))
                        })
                        .collect();
                    assert!(same(&direct, &t.values(&d)), "star {lambda:?} on {c}");
                }
            }
        }
    }
}
