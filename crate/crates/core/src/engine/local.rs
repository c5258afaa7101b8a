use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use thiserror::Error;

use super::{classify_case, extend, self_gside, AbstractGSide, CaseKind, ExtensionError, ExtensionProblem, ExtensionReport};
use crate::charlattice::{
    brauer_labels, centralizer_table, d_u, e_u, l_zero_basis, section_reps, ClassFunction, LatticeElement,
};
use crate::cyclotomic::CyclotomicNumber;
use crate::groups::{subgroup_lattice, Elem, Subgroup};
use crate::localmodel::{quotient_model, CharLabel, ClassTable, EtElem, Host, HostElem, LocalBlockModel, QuotientModel};

/// `Γ_Q` in coordinates: column `j` is the image of the `j`-th irreducible
/// Brauer character of `C̄(Q)` in the Brauer characters of the other side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerMap {
    pub labels: Vec<CharLabel>,
    pub matrix: Vec<Vec<i64>>,
}

impl BrauerMap {
    pub fn identity(labels: Vec<CharLabel>) -> Self {
        let n = labels.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Self { labels, matrix }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `𝒦`-linear extension of [`BrauerMap::apply`].
    pub fn apply_scalars(&self, v: &[CyclotomicNumber]) -> Vec<CyclotomicNumber> {
        self.matrix
            .iter()
            .map(|r| {
                let mut acc = CyclotomicNumber::zero(v[0].field());
                for (&a, x) in r.iter().zip(v) {
                    if a != 0 {
                        acc = &acc + &x.scale(&BigRational::from_integer(a.into()));
                    }
                }
                acc
            })
            .collect()
    }

    /// `π Γ π⁻¹` for a permutation `π` of the labels.
    fn transported(&self, perm: &[usize]) -> Self {
        let n = self.labels.len();
        let mut matrix = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                matrix[perm[i]][perm[j]] = self.matrix[i][j];
            }
        }
        Self { labels: self.labels.clone(), matrix }
    }
}

/// Supplies the G-side data of the descent.
///
/// The section maps on the G-side are evaluated on the N-side host, so a
/// provider must keep the N-side labels; it may change actions, flags and
/// degrees.
pub trait GSideProvider {
    fn gside(&self, qm: &QuotientModel) -> AbstractGSide;
    fn seed(&self, qm: &QuotientModel) -> BrauerMap {
        BrauerMap::identity(brauer_labels(qm.host()))
    }
}

/// The G-side equals the N-side.
#[derive(Clone, Copy, Debug, Default)]
pub struct SelfTestProvider;

impl GSideProvider for SelfTestProvider {
    fn gside(&self, qm: &QuotientModel) -> AbstractGSide {
        self_gside(qm)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Check that every installed `Δ_Q` sends irreducibles to generalized
    /// characters.
    pub check_integrality: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { check_integrality: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub generators: Vec<Elem>,
    pub order: usize,
    pub orbit: usize,
    pub case: CaseKind,
    pub report: ExtensionReport,
    pub gamma_identity: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalSystemFailure {
    #[error("no Γ installed for the subgroup generated by {0:?}")]
    MissingGamma(Vec<Elem>),
    #[error("Δ at the subgroup generated by {0:?} is not a generalized character")]
    NotIntegral(Vec<Elem>),
    #[error("provider inconsistency at {generators:?}: {reason}")]
    Provider { generators: Vec<Elem>, reason: &'static str },
    #[error("{case} at the subgroup generated by {generators:?}: {error}")]
    Extension { generators: Vec<Elem>, case: &'static str, error: ExtensionError },
    #[error("installed Γ at {0:?} does not reproduce the extension")]
    Inconsistent(Vec<Elem>),
}

/// The subgroups handled so far, with their `Γ_Q`.
#[derive(Clone, Debug)]
pub struct LocalSystemState {
    model: Arc<LocalBlockModel>,
    gammas: BTreeMap<Subgroup, BrauerMap>,
    steps: Vec<StepRecord>,
}

impl LocalSystemState {
    pub fn new(model: Arc<LocalBlockModel>) -> Self {
        Self { model, gammas: BTreeMap::new(), steps: Vec::new() }
    }
    pub fn model(&self) -> &Arc<LocalBlockModel> {
        &self.model
    }
    pub fn gamma(&self, q: &Subgroup) -> Option<&BrauerMap> {
        self.gammas.get(q)
    }
    pub fn contains(&self, q: &Subgroup) -> bool {
        self.gammas.contains_key(q)
    }
    pub fn len(&self) -> usize {
        self.gammas.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }
    pub fn subgroups(&self) -> impl Iterator<Item = &Subgroup> {
        self.gammas.keys()
    }
    pub fn all_identity(&self) -> bool {
        self.gammas.values().all(BrauerMap::is_identity)
    }
    /// Whether every subgroup of `P` is covered.
    pub fn is_complete(&self) -> bool {
        subgroup_lattice(self.model.pgroup()).iter().all(|q| self.contains(q))
    }
    pub fn install(&mut self, q: Subgroup, gamma: BrauerMap) {
        self.gammas.insert(q, gamma);
    }
}

fn gens(model: &LocalBlockModel, q: &Subgroup) -> Vec<Elem> {
    model.pgroup().canonical_generators(q)
}

/// Coordinates of the restriction of `f` to `p'`-elements in the Brauer
/// characters of its host.
fn brauer_coords(f: &ClassFunction) -> Vec<CyclotomicNumber> {
    let host = f.table().host();
    let field = host.model().field();
    let zero = host.model().pgroup().zero();
    let reps: Vec<EtElem> = host.stilde_mod_z().collect();
    let inv = BigRational::new(1.into(), (reps.len() as i64).into());
    brauer_labels(host)
        .iter()
        .map(|b| {
            let mut acc = CyclotomicNumber::zero(field);
            for &e in &reps {
                let g = HostElem { x: zero, e };
                let bv = host.value(b, g).to_number(field);
                acc = &acc + &(f.value_at(g) * &bv.conjugate());
            }
            acc.scale(&inv)
        })
        .collect()
}

/// `Σ c_β β` on `p'`-elements, zero elsewhere.
fn brauer_function(table: &Arc<ClassTable>, coords: &[CyclotomicNumber]) -> ClassFunction {
    let host = table.host();
    let field = host.model().field();
    let betas: Vec<Vec<CyclotomicNumber>> =
        brauer_labels(host).iter().map(|b| table.values(b).iter().map(|r| r.to_number(field)).collect()).collect();
    let values = table
        .reps()
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let mut acc = CyclotomicNumber::zero(field);
            if host.split(g).0 == host.one() {
                for (c, b) in coords.iter().zip(&betas) {
                    acc = &acc + &(c * &b[k]);
                }
            }
            acc
        })
        .collect();
    ClassFunction::new(table.clone(), values)
}

/// Section data of one quotient: its table and, per `ū`, the centralizer
/// table and `⟨Q, u⟩`.
struct Sections {
    table: Arc<ClassTable>,
    labels: Vec<CharLabel>,
    parts: Vec<(Elem, Arc<ClassTable>, Subgroup)>,
}

impl Sections {
    fn new(model: &Arc<LocalBlockModel>, q: &Subgroup) -> Self {
        let host = Arc::new(Host::for_subgroup(model.clone(), q.clone()));
        let table = Arc::new(ClassTable::new(host.clone()));
        let mut qgens = gens(model, q);
        let parts = section_reps(&host)
            .into_iter()
            .map(|u| {
                qgens.push(u);
                let r = model.pgroup().generate(&qgens);
                qgens.pop();
                (u, centralizer_table(&table, u), r)
            })
            .collect();
        Self { labels: host.block_labels(), table, parts }
    }

    /// `Σ_ū e^ū Γ_{⟨Q,u⟩} d^ū η`, over `ū ≠ 1` unless `full`.
    fn assemble(&self, state: &LocalSystemState, eta: &LatticeElement, full: bool) -> Result<ClassFunction, LocalSystemFailure> {
        let model = &state.model;
        let zero = model.pgroup().zero();
        let f = ClassFunction::combination(&self.table, &self.labels, &eta.coeffs);
        let mut acc = ClassFunction::zero(&self.table);
        let q = self.table.host().kernel();
        for (u, cu, r) in &self.parts {
            if *u == zero && !full {
                continue;
            }
            let gamma = state.gamma(r).ok_or_else(|| LocalSystemFailure::MissingGamma(gens(model, r)))?;
            let not_integral = || LocalSystemFailure::NotIntegral(gens(model, q));
            let phi = d_u(&f, *u, cu).map_err(|_| not_integral())?;
            let image = brauer_function(cu, &gamma.apply_scalars(&brauer_coords(&phi)));
            let piece = e_u(&image, *u, &self.table).map_err(|_| not_integral())?;
            acc = acc.add(&piece).map_err(|_| not_integral())?;
        }
        Ok(acc)
    }

    fn coordinates(&self, f: &ClassFunction, q: &[Elem]) -> Result<LatticeElement, LocalSystemFailure> {
        f.coordinates(&self.labels).map(LatticeElement::new).map_err(|_| LocalSystemFailure::NotIntegral(q.to_vec()))
    }
}

/// `Δ_Q(η) = Σ_{ū ∈ U_Q} e^ū(Γ_{Q⟨u⟩}(d^ū η))` as a class function on the
/// G-side host.
pub fn assemble_delta(state: &LocalSystemState, q: &Subgroup, eta: &LatticeElement) -> Result<ClassFunction, LocalSystemFailure> {
    Sections::new(&state.model, q).assemble(state, eta, true)
}

/// `Δ°_Q` on the standard basis of `L°`, in G-side coordinates.
pub fn delta_zero(state: &LocalSystemState, qm: &QuotientModel) -> Result<Vec<LatticeElement>, LocalSystemFailure> {
    let model = &state.model;
    let q = qm.kernel();
    let g = gens(model, q);
    let basis = l_zero_basis(qm).map_err(|_| LocalSystemFailure::NotIntegral(g.clone()))?;
    let sec = Sections::new(model, q);
    basis.iter().map(|b| sec.coordinates(&sec.assemble(state, b, false)?, &g)).collect()
}

/// Brauer decomposition of every label of `qm`: row `c` gives `d¹χ_c`.
fn decomposition(qm: &QuotientModel) -> Vec<Vec<i64>> {
    let table = Arc::new(ClassTable::new(qm.host().clone()));
    qm.labels()
        .iter()
        .map(|c| {
            brauer_coords(&ClassFunction::character(&table, c))
                .iter()
                .map(|x| x.is_rational_integer().expect("Brauer decomposition is integral"))
                .collect()
        })
        .collect()
}

/// `Γ_Q(β) = d¹ Δ̄_Q(χ_β)`, with `χ_β` the label with trivial `P`-part and
/// Brauer restriction `β`.
fn gamma_from_extension(qm: &QuotientModel, columns: &[LatticeElement]) -> BrauerMap {
    let labels = brauer_labels(qm.host());
    let dec = decomposition(qm);
    let n = labels.len();
    let mut matrix = vec![vec![0; n]; n];
    for (j, b) in labels.iter().enumerate() {
        let col = &columns[qm.position(b).expect("Brauer label is a block label")];
        for (c, &a) in col.coeffs.iter().enumerate() {
            for i in 0..n {
                matrix[i][j] += a * dec[c][i];
            }
        }
    }
    BrauerMap { labels, matrix }
}

/// `E`-orbits of subgroups, by decreasing order and then generators.
fn subgroup_orbits(model: &LocalBlockModel) -> Vec<Vec<(Subgroup, EtElem)>> {
    let g = model.pgroup();
    let l = model.l();
    let mut seen: BTreeMap<Subgroup, ()> = BTreeMap::new();
    let mut orbits = Vec::new();
    for q in subgroup_lattice(g) {
        if seen.contains_key(&q) {
            continue;
        }
        let mut orbit: Vec<(Subgroup, EtElem)> = Vec::new();
        for i in 0..l {
            for j in 0..l {
                let s = EtElem::new(i, j, 0);
                let img = q.map(|x| model.act(s, x));
                if !orbit.iter().any(|(r, _)| *r == img) {
                    seen.insert(img.clone(), ());
                    orbit.push((img, s));
                }
            }
        }
        orbit.sort_by_key(|(r, _)| gens(model, r));
        orbits.push(orbit);
    }
    orbits.sort_by(|a, b| b[0].0.order().cmp(&a[0].0.order()).then_with(|| gens(model, &a[0].0).cmp(&gens(model, &b[0].0))));
    orbits
}

/// `Γ_{sQ} = π_s Γ_Q π_s⁻¹` with `π_s β = β ∘ c_{s⁻¹}`.
fn conjugate_gamma(model: &LocalBlockModel, host: &Host, gamma: &BrauerMap, s: EtElem) -> BrauerMap {
    let si = model.etilde().inv(s);
    let perm: Vec<usize> = gamma
        .labels
        .iter()
        .map(|b| {
            let img = host.conjugate_label(b, si);
            gamma.labels.iter().position(|x| *x == img).expect("Brauer labels are permuted")
        })
        .collect();
    gamma.transported(&perm)
}

/// Descends from `P` to `1`, extending `Δ°_Q` at a maximal new orbit each
/// step and installing `Γ_Q` on the whole orbit.
pub fn run_local_system(
    model: &Arc<LocalBlockModel>,
    provider: &dyn GSideProvider,
    opts: RunOptions,
) -> Result<LocalSystemState, LocalSystemFailure> {
    let mut state = LocalSystemState::new(model.clone());
    for orbit in subgroup_orbits(model) {
        let rep = orbit[0].0.clone();
        let g = gens(model, &rep);
        let qm = quotient_model(model, &rep).map_err(|_| LocalSystemFailure::Provider { generators: g.clone(), reason: "not a subgroup" })?;
        let case = classify_case(&qm);
        let gside = provider.gside(&qm);
        let names: Vec<_> = qm.labels().iter().map(|c| c.to_string()).collect();
        if gside.labels.len() != names.len() {
            return Err(LocalSystemFailure::Provider { generators: g, reason: "label count differs from the N-side" });
        }
        if gside.labels != names {
            return Err(LocalSystemFailure::Provider { generators: g, reason: "G-side labels must be the N-side labels" });
        }
        let (gamma, record) = if rep.order() == model.pgroup().order() {
            let seed = provider.seed(&qm);
            if seed.labels != brauer_labels(qm.host()) {
                return Err(LocalSystemFailure::Provider { generators: g, reason: "seed has the wrong Brauer labels" });
            }
            (seed, None)
        } else {
            let delta0 = delta_zero(&state, &qm)?;
            let basis = l_zero_basis(&qm).map_err(|_| LocalSystemFailure::NotIntegral(g.clone()))?;
            let pb = ExtensionProblem { qmodel: qm.clone(), gside, basis, delta_zero: delta0, case };
            let ext = extend(&pb).map_err(|error| LocalSystemFailure::Extension {
                generators: g.clone(),
                case: case.name(),
                error,
            })?;
            let n = qm.labels().len();
            let columns: Vec<LatticeElement> = (0..n).map(|c| ext.isometry.column(c)).collect();
            let gamma = gamma_from_extension(&qm, &columns);
            (gamma, Some((columns, ext.report)))
        };
        let base = orbit[0].1;
        let base_inv = model.etilde().inv(base);
        for (member, s) in &orbit {
            let t = model.etilde().mul(*s, base_inv);
            state.install(member.clone(), conjugate_gamma(model, qm.host(), &gamma, t));
        }
        if let Some((columns, report)) = record {
            if opts.check_integrality {
                let sec = Sections::new(model, &rep);
                let n = columns.len();
                for c in 0..n {
                    let f = sec.assemble(&state, &LatticeElement::unit(n, c), true)?;
                    if sec.coordinates(&f, &g)? != columns[c] {
                        return Err(LocalSystemFailure::Inconsistent(g));
                    }
                }
            }
            state.steps.push(StepRecord {
                generators: g,
                order: rep.order(),
                orbit: orbit.len(),
                case,
                gamma_identity: state.gamma(&rep).is_some_and(BrauerMap::is_identity),
                report,
            });
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localmodel::build_model;

    #[test]
    fn self_test_descent() {
        for (p, n, m, l) in [(3, 1, 1, 2), (3, 1, 2, 2)] {
            let model = build_model(p, n, m, l, None, None).unwrap();
            let state = run_local_system(&model, &SelfTestProvider, RunOptions::default()).unwrap();
            assert!(state.is_complete());
            assert!(state.all_identity());
            let one = model.pgroup().trivial();
            let k = quotient_model(&model, &one).unwrap().labels().len();
            let sec = Sections::new(&model, &one);
            for c in 0..k {
                let e = LatticeElement::unit(k, c);
                let f = assemble_delta(&state, &one, &e).unwrap();
                assert_eq!(sec.coordinates(&f, &[]).unwrap(), e);
            }
        }
    }

    #[test]
    fn delta_zero_is_identity_on_the_basis() {
        let model = build_model(3, 1, 1, 2, None, None).unwrap();
        let state = run_local_system(&model, &SelfTestProvider, RunOptions::default()).unwrap();
        for q in subgroup_lattice(model.pgroup()) {
            let qm = quotient_model(&model, &q).unwrap();
            assert_eq!(delta_zero(&state, &qm).unwrap(), l_zero_basis(&qm).unwrap());
        }
    }

    #[test]
    fn missing_gamma_is_reported() {
        let model = build_model(3, 1, 1, 2, None, None).unwrap();
        let state = LocalSystemState::new(model.clone());
        let qm = quotient_model(&model, &model.pgroup().trivial()).unwrap();
        assert!(matches!(delta_zero(&state, &qm), Err(LocalSystemFailure::MissingGamma(_))));
    }

    struct Flattened;

    impl GSideProvider for Flattened {
        fn gside(&self, qm: &QuotientModel) -> AbstractGSide {
            let mut g = self_gside(qm);
            if classify_case(qm) == CaseKind::Case31 {
                let n = g.labels.len();
                g.e_action = g.e_action.iter().map(|_| (0..n).collect()).collect();
                g.flags.regular_orbit = false;
            }
            g
        }
    }

    #[test]
    fn provider_without_regular_orbit() {
        let model = build_model(3, 1, 1, 2, None, None).unwrap();
        let err = run_local_system(&model, &Flattened, RunOptions::default()).unwrap_err();
        let LocalSystemFailure::Extension { case, error, .. } = err else { panic!("{err:?}") };
        assert_eq!((case, error), ("Case31", ExtensionError::NoRegularOrbit));
    }

    #[test]
    fn orbits_cover_the_lattice() {
        let model = build_model(3, 1, 2, 2, None, None).unwrap();
        let orbits = subgroup_orbits(&model);
        let total: usize = orbits.iter().map(Vec::len).sum();
        assert_eq!(total, subgroup_lattice(model.pgroup()).len());
        assert!(orbits.windows(2).all(|w| w[0][0].0.order() >= w[1][0].0.order()));
    }
}
