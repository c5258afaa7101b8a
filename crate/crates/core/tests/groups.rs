use std::collections::BTreeSet;

use isotypy_core::groups::{
    decompose_action, frattini_quotient, subgroup_count, subgroup_lattice, unit_order, validate_decomposition, AbelianPGroup,
    ActionGroup, Automorphism, Elem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_of_order(l: u64, q: u64) -> u64 {
    (1..q).find(|&a| unit_order(a, q) == Some(l)).unwrap()
}

fn random_aut(d: &AbelianPGroup, rng: &mut ChaCha8Rng) -> Automorphism {
    loop {
        let step = d.q1() / d.q2();
        let beta = rng.gen_range(0..d.q2()) * step;
        if let Ok(a) = d.automorphism(rng.gen_range(0..d.q1()), beta, rng.gen_range(0..d.q2()), rng.gen_range(0..d.q2())) {
            return a;
        }
    }
}

fn diagonal_action(d: &AbelianPGroup, l: u64) -> Vec<Automorphism> {
    let u1 = unit_of_order(l, d.q1());
    let u2 = unit_of_order(l, d.q2());
    vec![d.diagonal(u1, 1).unwrap(), d.diagonal(1, u2).unwrap()]
}

/// Brute force: every subgroup is the closure of at most two elements.
fn brute_subgroups(g: &AbelianPGroup) -> usize {
    let elems: Vec<Elem> = g.elements().collect();
    let mut all = BTreeSet::new();
    for &x in &elems {
        for &y in &elems {
            all.insert(g.generate(&[x, y]).elements().to_vec());
        }
    }
    all.len()
}

#[test]
fn subgroup_lattice_matches_closure_enumeration() {
    for (p, n, m) in [(3, 1, 1), (3, 2, 0), (3, 2, 1), (3, 2, 2), (5, 1, 1), (5, 2, 1)] {
        let g = AbelianPGroup::new(p, n, m).unwrap();
        let lattice = subgroup_lattice(&g);
        assert_eq!(lattice.len(), brute_subgroups(&g));
        assert_eq!(lattice.len() as u64, subgroup_count(p, n, m));
        let distinct: BTreeSet<_> = lattice.iter().collect();
        assert_eq!(distinct.len(), lattice.len());
    }
}

#[test]
fn subgroup_lattice_is_closed_under_diagonal_action() {
    let d = AbelianPGroup::new(3, 2, 1).unwrap();
    let e = ActionGroup::new(d, diagonal_action(&d, 2));
    let lattice = subgroup_lattice(&d);
    for q in &lattice {
        for a in e.elements() {
            let img: Vec<Elem> = q.elements().iter().map(|&x| a.apply(x)).collect();
            let img = d.subgroup_from_elements(&img).unwrap();
            assert!(lattice.contains(&img));
        }
    }
}

#[test]
fn frattini_projection_injective_on_order_16_group() {
    let d = AbelianPGroup::new(5, 2, 1).unwrap();
    let f = ActionGroup::new(d, diagonal_action(&d, 4));
    assert_eq!(f.order(), 16);
    let fq = frattini_quotient(&d).unwrap();
    assert!(fq.is_injective_on(f.elements()));
    let kernel: Vec<_> = f.elements().iter().filter(|a| fq.project(a) == [[1, 0], [0, 1]]).collect();
    assert_eq!(kernel.len(), 1);
}

#[test]
fn random_conjugates_decompose() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, n, m, l) in [(3, 1, 1, 2), (3, 2, 1, 2), (3, 2, 2, 2), (5, 2, 1, 4), (5, 2, 1, 2), (5, 1, 1, 4), (7, 1, 1, 3)] {
        let d = AbelianPGroup::new(p, n, m).unwrap();
        let base = diagonal_action(&d, l);
        for _ in 0..20 {
            let g = random_aut(&d, &mut rng);
            let gi = g.inverse();
            let gens: Vec<Automorphism> = base.iter().map(|a| g.compose(a).compose(&gi)).collect();
            let f = ActionGroup::new(d, gens);
            let dec = decompose_action(&d, &f).unwrap_or_else(|e| panic!("{p},{n},{m},{l}: {e}"));
            validate_decomposition(&d, &f, &dec).unwrap_or_else(|e| panic!("{p},{n},{m},{l}: {e} {dec:?}"));
        }
    }
}
