//! Abelian p-groups of rank at most two, their automorphisms, and the
//! splitting of an abelian p'-group of automorphisms into two commuting
//! cyclic factors acting on complementary cyclic subgroups.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("operation needs a rank-2 group, got C_{{p^{n}}} x C_{{p^{m}}}")]
    NotRankTwo { n: u32, m: u32 },
    #[error("matrix entry beta = {beta} is not divisible by p^(n-m)")]
    BadOffDiagonal { beta: u64 },
    #[error("matrix is not invertible modulo p")]
    NotInvertible,
    #[error("acting group is not abelian")]
    NotAbelian,
    #[error("acting group has order {order}, divisible by p = {p}")]
    OrderDivisibleByP { order: usize, p: u64 },
    #[error("acting group with invariants {invariants:?} is not a product of two isomorphic subgroups")]
    NotProductOfIsomorphic { invariants: Vec<u64> },
    #[error("acting group does not act faithfully")]
    NotFaithful,
    #[error("element list is not a subgroup of the group")]
    NotASubgroup,
    #[error("no pair of complementary stable subgroups exists: {0}")]
    NoSplitting(&'static str),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_u64(base: u64, exp: u32) -> u64 {
    base.pow(exp)
}

/// Multiplicative order of `a` modulo `q`, or `None` if `a` is not a unit.
pub fn unit_order(a: u64, q: u64) -> Option<u64> {
    if q == 1 {
        return Some(1);
    }
    if a.gcd(&q) != 1 {
        return None;
    }
    let mut x = a % q;
    let mut k = 1;
    while x != 1 {
        x = x * a % q;
        k += 1;
    }
    Some(k)
}

/// An element `(a mod p^n, b mod p^m)`, written additively.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(pub u64, pub u64);

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// `C_{p^n} × C_{p^m}` with `n ≥ m`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct AbelianPGroup {
    p: u64,
    n: u32,
    m: u32,
}

impl AbelianPGroup {
    /// Builds the group, swapping the exponents so that the first factor is
    /// the larger one.
    pub fn new(p: u64, n: u32, m: u32) -> Result<Self, GroupError> {
        if p == 2 || !is_prime(p) {
            return Err(GroupError::BadPrime(p));
        }
        let (n, m) = if n >= m { (n, m) } else { (m, n) };
        Ok(Self { p, n, m })
    }

    /// Builds `C_{p^n} × C_{p^m}` keeping the factor order as given.
    pub fn with_factor_order(p: u64, n: u32, m: u32) -> Result<Self, GroupError> {
        if p == 2 || !is_prime(p) {
            return Err(GroupError::BadPrime(p));
        }
        Ok(Self { p, n, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    /// `p^n`.
    pub fn q1(&self) -> u64 {
        pow_u64(self.p, self.n)
    }
    /// `p^m`.
    pub fn q2(&self) -> u64 {
        pow_u64(self.p, self.m)
    }
    pub fn order(&self) -> usize {
        (self.q1() * self.q2()) as usize
    }
    pub fn rank(&self) -> u32 {
        (self.n > 0) as u32 + (self.m > 0) as u32
    }

    pub fn zero(&self) -> Elem {
        Elem(0, 0)
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        Elem((x.0 + y.0) % self.q1(), (x.1 + y.1) % self.q2())
    }

    pub fn neg(&self, x: Elem) -> Elem {
        Elem((self.q1() - x.0) % self.q1(), (self.q2() - x.1) % self.q2())
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    pub fn scale(&self, k: u64, x: Elem) -> Elem {
        Elem(k % self.q1() * x.0 % self.q1(), k % self.q2() * x.1 % self.q2())
    }

    pub fn contains(&self, x: Elem) -> bool {
        x.0 < self.q1() && x.1 < self.q2()
    }

    pub fn index(&self, x: Elem) -> usize {
        (x.0 * self.q2() + x.1) as usize
    }

    pub fn from_index(&self, i: usize) -> Elem {
        let i = i as u64;
        Elem(i / self.q2(), i % self.q2())
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    /// Order of an element (a power of `p`).
    pub fn elem_order(&self, x: Elem) -> u64 {
        let o1 = self.q1() / x.0.gcd(&self.q1());
        let o2 = self.q2() / x.1.gcd(&self.q2());
        o1.max(o2)
    }

    pub fn identity_aut(&self) -> Automorphism {
        Automorphism { q1: self.q1(), q2: self.q2(), alpha: 1 % self.q1(), beta: 0, gamma: 0, delta: 1 % self.q2() }
    }

    /// The automorphism `(x, y) ↦ (a·x, d·y)`.
    pub fn diagonal(&self, a: u64, d: u64) -> Result<Automorphism, GroupError> {
        self.automorphism(a, 0, 0, d)
    }

    /// The endomorphism with images `(1,0) ↦ (α, γ)` and `(0,1) ↦ (β, δ)`,
    /// rejected unless it is well defined and invertible.
    pub fn automorphism(&self, alpha: u64, beta: u64, gamma: u64, delta: u64) -> Result<Automorphism, GroupError> {
        let (q1, q2) = (self.q1(), self.q2());
        let beta = beta % q1;
        if q1 >= q2 && beta % (q1 / q2) != 0 {
            return Err(GroupError::BadOffDiagonal { beta });
        }
        if q2 > q1 && gamma % q2 % (q2 / q1) != 0 {
            return Err(GroupError::BadOffDiagonal { beta: gamma % q2 });
        }
        let a = Automorphism { q1, q2, alpha: alpha % q1, beta, gamma: gamma % q2, delta: delta % q2 };
        let p = self.p;
        let invertible = if self.m == 0 {
            a.alpha % p != 0
        } else if self.n == 0 {
            a.delta % p != 0
        } else {
            let m = a.frattini_matrix(p);
            (m[0][0] * m[1][1] + p * p - m[0][1] * m[1][0] % p) % p != 0
        };
        if !invertible {
            return Err(GroupError::NotInvertible);
        }
        Ok(a)
    }

    /// Builds a subgroup from an element list after checking closure.
    pub fn subgroup_from_elements(&self, elems: &[Elem]) -> Result<Subgroup, GroupError> {
        let set: BTreeSet<Elem> = elems.iter().copied().collect();
        if !set.contains(&self.zero()) || set.iter().any(|&x| !self.contains(x)) {
            return Err(GroupError::NotASubgroup);
        }
        for &x in &set {
            for &y in &set {
                if !set.contains(&self.add(x, y)) {
                    return Err(GroupError::NotASubgroup);
                }
            }
        }
        Ok(Subgroup { elems: set.into_iter().collect() })
    }

    /// The subgroup generated by `gens`.
    pub fn generate(&self, gens: &[Elem]) -> Subgroup {
        let mut seen = BTreeSet::new();
        seen.insert(self.zero());
        let mut queue: VecDeque<Elem> = VecDeque::from([self.zero()]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.add(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Subgroup { elems: seen.into_iter().collect() }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { elems: self.elements().collect() }
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup { elems: vec![self.zero()] }
    }

    /// `Φ(X) = pX`.
    pub fn frattini_of(&self, x: &Subgroup) -> Subgroup {
        let set: BTreeSet<Elem> = x.elems.iter().map(|&e| self.scale(self.p, e)).collect();
        Subgroup { elems: set.into_iter().collect() }
    }

    /// `X + Y`.
    pub fn sum(&self, x: &Subgroup, y: &Subgroup) -> Subgroup {
        let mut set = BTreeSet::new();
        for &a in &x.elems {
            for &b in &y.elems {
                set.insert(self.add(a, b));
            }
        }
        Subgroup { elems: set.into_iter().collect() }
    }

    /// `[X, K]`, generated by all `k(x) − x`.
    pub fn commutator(&self, x: &Subgroup, k: &[Automorphism]) -> Subgroup {
        let gens: Vec<Elem> =
            x.elems.iter().flat_map(|&e| k.iter().map(move |a| (a, e))).map(|(a, e)| self.sub(a.apply(e), e)).collect();
        self.generate(&gens)
    }

    /// `C_X(K)`.
    pub fn centralized(&self, x: &Subgroup, k: &[Automorphism]) -> Subgroup {
        Subgroup { elems: x.elems.iter().copied().filter(|&e| k.iter().all(|a| a.apply(e) == e)).collect() }
    }

    /// Minimal generating set in canonical form: an element of maximal order
    /// and, if needed, a complement generator (lexicographically least).
    pub fn canonical_generators(&self, x: &Subgroup) -> Vec<Elem> {
        if x.order() == 1 {
            return Vec::new();
        }
        let max_order = x.elems.iter().map(|&e| self.elem_order(e)).max().unwrap_or(1);
        let g1 = *x.elems.iter().find(|&&e| self.elem_order(e) == max_order).unwrap();
        let c1 = self.generate(&[g1]);
        if c1.order() == x.order() {
            return vec![g1];
        }
        let want = (x.order() / c1.order()) as u64;
        let g2 = *x
            .elems
            .iter()
            .find(|&&e| self.elem_order(e) == want && self.generate(&[e]).intersect(&c1).order() == 1)
            .expect("finite abelian groups split");
        vec![g1, g2]
    }

    pub fn is_cyclic(&self, x: &Subgroup) -> bool {
        self.canonical_generators(x).len() <= 1
    }
}

/// A subgroup stored as its sorted element list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Subgroup {
    elems: Vec<Elem>,
}

impl Subgroup {
    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }
    pub fn order(&self) -> usize {
        self.elems.len()
    }
    pub fn contains(&self, x: Elem) -> bool {
        self.elems.binary_search(&x).is_ok()
    }
    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }
    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup { elems: self.elems.iter().copied().filter(|&x| other.contains(x)).collect() }
    }
    pub fn is_trivial(&self) -> bool {
        self.elems.len() == 1
    }
    /// Image under an injective map of the ambient group.
    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Subgroup {
        let mut elems: Vec<Elem> = self.elems.iter().map(|&x| f(x)).collect();
        elems.sort_unstable();
        elems.dedup();
        Subgroup { elems }
    }
}

/// An automorphism of `C_{p^n} × C_{p^m}` given by the images of the two
/// standard generators: `(1,0) ↦ (α, γ)`, `(0,1) ↦ (β, δ)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Automorphism {
    q1: u64,
    q2: u64,
    pub alpha: u64,
    pub beta: u64,
    pub gamma: u64,
    pub delta: u64,
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.alpha, self.beta, self.gamma, self.delta)
    }
}

impl Automorphism {
    pub fn apply(&self, x: Elem) -> Elem {
        let (q1, q2) = (self.q1 as u128, self.q2 as u128);
        let a = (self.alpha as u128 * x.0 as u128 + self.beta as u128 * x.1 as u128) % q1;
        let b = (self.gamma as u128 * x.0 as u128 + self.delta as u128 * x.1 as u128) % q2;
        Elem(a as u64, b as u64)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let c1 = self.apply(other.apply(Elem(1 % self.q1, 0)));
        let c2 = self.apply(other.apply(Elem(0, 1 % self.q2)));
        Automorphism { q1: self.q1, q2: self.q2, alpha: c1.0, gamma: c1.1, beta: c2.0, delta: c2.1 }
    }

    pub fn is_identity(&self) -> bool {
        self.alpha == 1 % self.q1 && self.beta == 0 && self.gamma == 0 && self.delta == 1 % self.q2
    }

    pub fn identity_like(&self) -> Automorphism {
        Automorphism { q1: self.q1, q2: self.q2, alpha: 1 % self.q1, beta: 0, gamma: 0, delta: 1 % self.q2 }
    }

    pub fn order(&self) -> u64 {
        let mut x = *self;
        let mut k = 1;
        while !x.is_identity() {
            x = x.compose(self);
            k += 1;
        }
        k
    }

    pub fn inverse(&self) -> Automorphism {
        let mut x = self.identity_like();
        for _ in 1..self.order() {
            x = x.compose(self);
        }
        x
    }

    /// Induced matrix on `D/Φ(D) ≅ F_p²` (columns are images of the basis).
    pub fn frattini_matrix(&self, p: u64) -> [[u64; 2]; 2] {
        [[self.alpha % p, self.beta % p], [self.gamma % p, self.delta % p]]
    }
}

/// A finite group of automorphisms given by generators, with its elements
/// enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionGroup {
    group: AbelianPGroup,
    generators: Vec<Automorphism>,
    elements: Vec<Automorphism>,
}

impl ActionGroup {
    pub fn new(group: AbelianPGroup, generators: Vec<Automorphism>) -> Self {
        let id = group.identity_aut();
        let mut seen = BTreeSet::new();
        seen.insert(id);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = g.compose(&x);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Self { group, generators, elements: seen.into_iter().collect() }
    }

    pub fn group(&self) -> &AbelianPGroup {
        &self.group
    }
    pub fn generators(&self) -> &[Automorphism] {
        &self.generators
    }
    pub fn elements(&self) -> &[Automorphism] {
        &self.elements
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|a| self.generators.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    /// Invariant factors as a sorted list of prime powers.
    pub fn abelian_invariants(&self) -> Vec<u64> {
        let orders: Vec<u64> = self.elements.iter().map(Automorphism::order).collect();
        abelian_invariants(&orders)
    }

    /// Pointwise stabiliser of a subgroup.
    pub fn centralizer(&self, q: &Subgroup) -> Vec<Automorphism> {
        self.elements.iter().copied().filter(|a| q.elements().iter().all(|&x| a.apply(x) == x)).collect()
    }

    /// Setwise stabiliser of a subgroup.
    pub fn normalizer(&self, q: &Subgroup) -> Vec<Automorphism> {
        self.elements.iter().copied().filter(|a| q.elements().iter().all(|&x| q.contains(a.apply(x)))).collect()
    }
}

/// Invariants (as prime powers) of an abelian group from its multiset of
/// element orders.
pub fn abelian_invariants(orders: &[u64]) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut r = orders.len() as u64;
    let mut d = 2;
    while r > 1 {
        if r % d == 0 {
            primes.push(d);
            while r % d == 0 {
                r /= d;
            }
        }
        d += 1;
    }
    let mut out = Vec::new();
    for q in primes {
        // #{x : x^{q^k} = 1} = q^{Σ min(k, e_i)}; successive differences of
        // the exponent count the factors with e_i ≥ k.
        let mut at_least = Vec::new();
        let mut prev = 0u32;
        for k in 1.. {
            let qk = q.pow(k);
            let cnt = orders.iter().filter(|&&o| qk % o == 0).count() as u64;
            let e = log_q(cnt, q);
            if e == prev {
                break;
            }
            at_least.push(e - prev);
            prev = e;
        }
        for (idx, &c) in at_least.iter().enumerate() {
            let next = at_least.get(idx + 1).copied().unwrap_or(0);
            for _ in 0..(c - next) {
                out.push(q.pow(idx as u32 + 1));
            }
        }
    }
    out.sort_unstable();
    out
}

fn log_q(mut x: u64, q: u64) -> u32 {
    let mut e = 0;
    while x > 1 {
        x /= q;
        e += 1;
    }
    e
}

/// The Frattini quotient `D/Φ(D) ≅ C_p × C_p` of a rank-2 group.
#[derive(Clone, Copy, Debug)]
pub struct FrattiniQuotient {
    p: u64,
}

impl FrattiniQuotient {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn project_elem(&self, x: Elem) -> Elem {
        Elem(x.0 % self.p, x.1 % self.p)
    }

    /// Image of an automorphism in `GL₂(F_p)`.
    pub fn project(&self, a: &Automorphism) -> [[u64; 2]; 2] {
        a.frattini_matrix(self.p)
    }

    /// Whether the projection is injective on the given automorphisms.
    pub fn is_injective_on(&self, elems: &[Automorphism]) -> bool {
        let images: BTreeSet<[[u64; 2]; 2]> = elems.iter().map(|a| self.project(a)).collect();
        images.len() == elems.len()
    }
}

pub fn frattini_quotient(d: &AbelianPGroup) -> Result<FrattiniQuotient, GroupError> {
    if d.rank() != 2 {
        return Err(GroupError::NotRankTwo { n: d.n(), m: d.m() });
    }
    Ok(FrattiniQuotient { p: d.p() })
}

/// `D = P₁ × P₂` and `F = F₁ × F₂` with `F_i` acting faithfully on `P_i` and
/// trivially on the other factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub p1: Vec<Elem>,
    pub p2: Vec<Elem>,
    pub f1: Vec<Automorphism>,
    pub f2: Vec<Automorphism>,
    /// Which branch of the construction produced the result.
    pub route: Vec<Route>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    TrivialAction,
    ElementaryAbelian,
    CyclicFrattini,
    RankTwoFrattini,
}

struct Split {
    x1: Subgroup,
    x2: Subgroup,
    f1: Vec<Automorphism>,
    f2: Vec<Automorphism>,
}

/// Splits a rank-2 group `D` under an abelian p'-group `F` that is a product
/// of two isomorphic subgroups.
///
/// The construction descends through Frattini subgroups: the Frattini
/// quotient is split by its two stable lines, and the lift branches on
/// whether `Φ(D)` is cyclic or of rank 2.
pub fn decompose_action(d: &AbelianPGroup, f: &ActionGroup) -> Result<Decomposition, GroupError> {
    if d.rank() != 2 {
        return Err(GroupError::NotRankTwo { n: d.n(), m: d.m() });
    }
    if !f.is_abelian() {
        return Err(GroupError::NotAbelian);
    }
    if f.order() as u64 % d.p() == 0 {
        return Err(GroupError::OrderDivisibleByP { order: f.order(), p: d.p() });
    }
    let invariants = f.abelian_invariants();
    if !pairs_up(&invariants) {
        return Err(GroupError::NotProductOfIsomorphic { invariants });
    }
    if f.elements().iter().any(|a| !a.is_identity() && d.elements().all(|x| a.apply(x) == x)) {
        return Err(GroupError::NotFaithful);
    }
    let mut route = Vec::new();
    let split = if f.order() == 1 {
        route.push(Route::TrivialAction);
        Split {
            x1: d.generate(&[Elem(1, 0)]),
            x2: d.generate(&[Elem(0, 1)]),
            f1: f.elements().to_vec(),
            f2: f.elements().to_vec(),
        }
    } else {
        split_section(d, &d.whole(), f.elements(), &mut route)?
    };
    if split.f1.len() != split.f2.len() {
        return Err(GroupError::NotProductOfIsomorphic { invariants: f.abelian_invariants() });
    }
    // larger factor first, then the one projecting further onto the first coordinate
    let key = |x: &Subgroup| (x.order(), x.elements().iter().map(|e| e.0).collect::<BTreeSet<_>>().len());
    let split = if key(&split.x2) > key(&split.x1) {
        Split { x1: split.x2, x2: split.x1, f1: split.f2, f2: split.f1 }
    } else {
        split
    };
    let dec = Decomposition {
        p1: d.canonical_generators(&split.x1),
        p2: d.canonical_generators(&split.x2),
        f1: cyclic_generator(&split.f1),
        f2: cyclic_generator(&split.f2),
        route,
    };
    Ok(dec)
}

fn pairs_up(invariants: &[u64]) -> bool {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &i in invariants {
        *counts.entry(i).or_default() += 1;
    }
    counts.values().all(|c| c % 2 == 0)
}

fn cyclic_generator(elems: &[Automorphism]) -> Vec<Automorphism> {
    let max = elems.iter().map(Automorphism::order).max().unwrap_or(1);
    if max == 1 {
        return Vec::new();
    }
    elems.iter().copied().filter(|a| a.order() == max).take(1).collect()
}

fn split_section(d: &AbelianPGroup, x: &Subgroup, f: &[Automorphism], route: &mut Vec<Route>) -> Result<Split, GroupError> {
    let phi = d.frattini_of(x);
    if phi.is_trivial() {
        route.push(Route::ElementaryAbelian);
        return split_elementary(d, x, f);
    }
    // Stable maximal subgroups of X containing Φ(X) are the preimages of the
    // eigenlines of F on X/Φ(X).
    let (d1, d2) = stable_pair(d, x, &phi, f)?;
    let f1: Vec<Automorphism> = f.iter().copied().filter(|a| d.commutator(&d2, &[*a]).is_subgroup_of(&phi)).collect();
    let f2: Vec<Automorphism> = f.iter().copied().filter(|a| d.commutator(&d1, &[*a]).is_subgroup_of(&phi)).collect();
    check_product(f, &f1, &f2)?;

    if d.is_cyclic(&phi) {
        route.push(Route::CyclicFrattini);
        if d.commutator(&d2, &f1).is_trivial() {
            Ok(Split { x1: d.commutator(&d1, &f1), x2: d2, f1, f2 })
        } else if d.commutator(&d1, &f2).is_trivial() {
            Ok(Split { x1: d1, x2: d.commutator(&d2, &f2), f1, f2 })
        } else {
            Err(GroupError::NoSplitting("neither maximal subgroup is centralised"))
        }
    } else {
        route.push(Route::RankTwoFrattini);
        if f.iter().any(|a| !a.is_identity() && d1.elements().iter().all(|&e| a.apply(e) == e)) {
            return Err(GroupError::NotFaithful);
        }
        let inner = split_section(d, &d1, f, route)?;
        let x1 = d.commutator(x, &inner.f1);
        let x2 = d.commutator(x, &inner.f2);
        Ok(Split { x1, x2, f1: inner.f1, f2: inner.f2 })
    }
}

fn split_elementary(d: &AbelianPGroup, x: &Subgroup, f: &[Automorphism]) -> Result<Split, GroupError> {
    let zero = Subgroup { elems: vec![d.zero()] };
    let (l1, l2) = stable_pair(d, x, &zero, f)?;
    let f1: Vec<Automorphism> = f.iter().copied().filter(|a| l2.elements().iter().all(|&e| a.apply(e) == e)).collect();
    let f2: Vec<Automorphism> = f.iter().copied().filter(|a| l1.elements().iter().all(|&e| a.apply(e) == e)).collect();
    check_product(f, &f1, &f2)?;
    Ok(Split { x1: l1, x2: l2, f1, f2 })
}

/// The two `F`-stable subgroups `Y` with `base ≤ Y ≤ X`, `|Y : base| = p`.
fn stable_pair(
    d: &AbelianPGroup,
    x: &Subgroup,
    base: &Subgroup,
    f: &[Automorphism],
) -> Result<(Subgroup, Subgroup), GroupError> {
    let mut found: Vec<Subgroup> = Vec::new();
    for &e in x.elements() {
        if base.contains(e) {
            continue;
        }
        let mut gens: Vec<Elem> = d.canonical_generators(base);
        gens.push(e);
        let y = d.generate(&gens);
        if y.order() != base.order() * d.p() as usize || found.contains(&y) {
            continue;
        }
        if f.iter().all(|a| y.elements().iter().all(|&v| y.contains(a.apply(v)))) {
            found.push(y);
        }
    }
    match found.len() {
        2 => {
            let b = found.pop().unwrap();
            let a = found.pop().unwrap();
            Ok((a, b))
        }
        0 | 1 => Err(GroupError::NoSplitting("action has fewer than two stable lines")),
        _ => Err(GroupError::NoSplitting("action is scalar on the Frattini quotient")),
    }
}

fn check_product(f: &[Automorphism], f1: &[Automorphism], f2: &[Automorphism]) -> Result<(), GroupError> {
    let meet = f1.iter().filter(|a| f2.contains(a)).count();
    if meet != 1 {
        return Err(GroupError::NotFaithful);
    }
    if f1.len() * f2.len() != f.len() {
        return Err(GroupError::NoSplitting("kernels do not generate the acting group"));
    }
    Ok(())
}

/// Brute-force check of every property a decomposition must have.
pub fn validate_decomposition(d: &AbelianPGroup, f: &ActionGroup, dec: &Decomposition) -> Result<(), &'static str> {
    let p1 = d.generate(&dec.p1);
    let p2 = d.generate(&dec.p2);
    if !p1.intersect(&p2).is_trivial() || p1.order() * p2.order() != d.order() {
        return Err("D is not the direct product of P1 and P2");
    }
    let f1 = ActionGroup::new(*d, dec.f1.clone());
    let f2 = ActionGroup::new(*d, dec.f2.clone());
    if f1.elements().iter().any(|a| !f.elements().contains(a)) || f2.elements().iter().any(|a| !f.elements().contains(a)) {
        return Err("F1 or F2 is not inside F");
    }
    let meet = f1.elements().iter().filter(|a| f2.elements().contains(a)).count();
    if meet != 1 || f1.order() * f2.order() != f.order() {
        return Err("F is not the direct product of F1 and F2");
    }
    if f1.order() != f2.order() {
        return Err("F1 and F2 have different orders");
    }
    if (d.p() - 1) % f1.order() as u64 != 0 {
        return Err("|F1| does not divide p - 1");
    }
    if f1.abelian_invariants().len() > 1 {
        return Err("F1 is not cyclic");
    }
    for (fi, mine, other) in [(&f1, &p1, &p2), (&f2, &p2, &p1)] {
        for a in fi.elements() {
            if other.elements().iter().any(|&x| a.apply(x) != x) {
                return Err("F_i does not centralise the other factor");
            }
            if !a.is_identity() && mine.elements().iter().all(|&x| a.apply(x) == x) {
                return Err("F_i does not act faithfully on its factor");
            }
        }
    }
    Ok(())
}

/// Every subgroup of the group, ordered by decreasing order and then by
/// element list.
pub fn subgroup_lattice(g: &AbelianPGroup) -> Vec<Subgroup> {
    let mut cyclic: BTreeSet<Subgroup> = BTreeSet::new();
    for x in g.elements() {
        cyclic.insert(g.generate(&[x]));
    }
    let cyclic: Vec<Subgroup> = cyclic.into_iter().collect();
    let mut all: BTreeSet<Subgroup> = cyclic.iter().cloned().collect();
    for (i, a) in cyclic.iter().enumerate() {
        for b in &cyclic[i + 1..] {
            all.insert(g.sum(a, b));
        }
    }
    let mut out: Vec<Subgroup> = all.into_iter().collect();
    out.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.cmp(b)));
    out
}

/// Number of subgroups of `C_{p^n} × C_{p^m}`, `n ≥ m`.
pub fn subgroup_count(p: u64, n: u32, m: u32) -> u64 {
    let (n, m) = (n.max(m), n.min(m));
    (0..=m).map(|i| (n + m - 2 * i + 1) as u64 * p.pow(i)).sum()
}
