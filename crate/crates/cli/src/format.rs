//! JSON documents read and written by the command line.

use std::sync::Arc;

use isotypy_core::charlattice::{l_zero_basis, LatticeElement};
use isotypy_core::engine::{
    classify_case, AbstractGSide, CaseKind, Extension, ExtensionError, ExtensionProblem, ExtensionReport, GSideFlags,
};
use isotypy_core::groups::{Automorphism, Elem};
use isotypy_core::isometry::{EquivariantAction, LatticeIsometry};
use isotypy_core::localmodel::{build_model, quotient_model, LocalBlockModel};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub p: u64,
    pub n: u32,
    pub m: u32,
    pub l: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<u64>,
}

impl ModelParams {
    pub fn build(&self) -> Result<Arc<LocalBlockModel>, Failure> {
        build_model(self.p, self.n, self.m, self.l, self.a1, self.a2).map_err(|e| Failure::usage("invalid_model", e))
    }

    pub fn tuple(&self) -> String {
        format!("({},{},{},{})", self.p, self.n, self.m, self.l)
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FlagsJson {
    #[serde(default)]
    pub regular_orbit: bool,
    #[serde(default)]
    pub free_star: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GSideJson {
    pub labels: Vec<String>,
    pub e_action: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star_action: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
    #[serde(default)]
    pub flags: FlagsJson,
}

/// An extension problem. `delta_zero_matrix[k]` is the image of `basis[k]`
/// in G-side coordinates; the basis defaults to the standard one.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    pub model: ModelParams,
    pub q: Vec<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub gside: GSideJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<i64>>>,
    pub delta_zero_matrix: Vec<Vec<i64>>,
}

pub fn parse_case(name: &str) -> Option<CaseKind> {
    [CaseKind::Case1, CaseKind::Case2, CaseKind::Case31, CaseKind::Case32].into_iter().find(|c| c.name() == name)
}

pub fn subgroup_gens(model: &LocalBlockModel, q: &[[u64; 2]]) -> Result<Vec<Elem>, Failure> {
    let g = model.pgroup();
    q.iter()
        .map(|&[a, b]| {
            let x = Elem(a, b);
            if g.contains(x) {
                Ok(x)
            } else {
                Err(Failure::usage("invalid_subgroup", format!("({a},{b}) is not an element of P")))
            }
        })
        .collect()
}

impl ProblemJson {
    pub fn from_problem(params: ModelParams, pb: &ExtensionProblem) -> Self {
        let model = pb.qmodel.model();
        let gens = model.pgroup().canonical_generators(pb.qmodel.kernel());
        let g = &pb.gside;
        ProblemJson {
            model: params,
            q: gens.iter().map(|x| [x.0, x.1]).collect(),
            case: Some(pb.case.name().into()),
            gside: GSideJson {
                labels: g.labels.clone(),
                e_action: g.e_action.clone(),
                star_action: g.star_action.clone(),
                degrees: g.degrees.clone(),
                flags: FlagsJson { regular_orbit: g.flags.regular_orbit, free_star: g.flags.free_star },
            },
            basis: Some(pb.basis.iter().map(|b| b.coeffs.clone()).collect()),
            delta_zero_matrix: pb.delta_zero.iter().map(|v| v.coeffs.clone()).collect(),
        }
    }

    pub fn to_problem(&self) -> Result<ExtensionProblem, Failure> {
        let model = self.model.build()?;
        let gens = subgroup_gens(&model, &self.q)?;
        let q = model.pgroup().generate(&gens);
        let qmodel = quotient_model(&model, &q).map_err(|e| Failure::usage("invalid_subgroup", e))?;
        let case = match &self.case {
            Some(name) => parse_case(name).ok_or_else(|| Failure::usage("malformed_problem", format!("unknown case {name:?}")))?,
            None => classify_case(&qmodel),
        };
        let basis = match &self.basis {
            Some(rows) => rows.iter().cloned().map(LatticeElement::new).collect(),
            None => l_zero_basis(&qmodel).map_err(|e| Failure::usage("invalid_subgroup", e))?,
        };
        let g = &self.gside;
        let gside = AbstractGSide {
            labels: g.labels.clone(),
            e_action: g.e_action.clone(),
            star_action: g.star_action.clone(),
            degrees: g.degrees.clone(),
            flags: GSideFlags { regular_orbit: g.flags.regular_orbit, free_star: g.flags.free_star },
        };
        let delta_zero = self.delta_zero_matrix.iter().cloned().map(LatticeElement::new).collect();
        Ok(ExtensionProblem { qmodel, gside, basis, delta_zero, case })
    }
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct ErrorJson {
    pub kind: String,
    pub message: String,
}

impl ErrorJson {
    /// `kind` is the variant name of the error.
    pub fn of<E: std::fmt::Debug + std::fmt::Display>(e: &E) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or_default().to_string();
        ErrorJson { kind, message: e.to_string() }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "case")]
pub enum ReportJson {
    Case1 { delta: i64, common: usize },
    Case2 { a_before_strictness: Vec<i64>, a_after_strictness: Vec<i64>, a: i64, delta1: i64, delta2: i64, omega1: Vec<usize>, omega2: Vec<usize> },
    Case31 { delta: i64, omega: Vec<usize>, stable: Vec<usize> },
    Case32 { delta_tau: i64, delta_xi: Vec<i64> },
}

impl From<&ExtensionReport> for ReportJson {
    fn from(r: &ExtensionReport) -> Self {
        match r.clone() {
            ExtensionReport::Case1 { delta, common } => ReportJson::Case1 { delta, common },
            ExtensionReport::Case2(c) => ReportJson::Case2 {
                a_before_strictness: c.a_before_strictness,
                a_after_strictness: c.a_after_strictness,
                a: c.a,
                delta1: c.delta1,
                delta2: c.delta2,
                omega1: c.omega1,
                omega2: c.omega2,
            },
            ExtensionReport::Case31 { delta, omega, stable } => ReportJson::Case31 { delta, omega, stable },
            ExtensionReport::Case32 { delta_tau, delta_xi } => ReportJson::Case32 { delta_tau, delta_xi },
        }
    }
}

/// Outcome of `extend`. A successful result doubles as an isometry file.
#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct ResultJson {
    pub status: &'static str,
    pub case: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codomain: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perm: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorJson>,
}

impl ResultJson {
    pub fn extended(ext: &Extension) -> Self {
        ResultJson {
            status: "extended",
            case: ext.case.name(),
            domain: Some(ext.isometry.domain.clone()),
            codomain: Some(ext.isometry.codomain.clone()),
            matrix: Some(ext.isometry.matrix.clone()),
            perm: Some(ext.bijection.perm.clone()),
            signs: Some(ext.bijection.signs.clone()),
            report: Some((&ext.report).into()),
            error: None,
        }
    }

    pub fn failed(case: CaseKind, e: &ExtensionError) -> Self {
        ResultJson {
            status: "failed",
            case: case.name(),
            domain: None,
            codomain: None,
            matrix: None,
            perm: None,
            signs: None,
            report: None,
            error: Some(ErrorJson::of(e)),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ActionJson {
    pub elements: Vec<String>,
    pub perms: Vec<Vec<usize>>,
}

impl From<ActionJson> for EquivariantAction {
    fn from(a: ActionJson) -> Self {
        EquivariantAction { elements: a.elements, perms: a.perms }
    }
}

/// An isometry with optional actions on both sides. Other fields are
/// ignored, so `extend` results can be checked directly.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct IsometryFile {
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_action: Option<ActionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain_action: Option<ActionJson>,
}

impl IsometryFile {
    pub fn isometry(&self) -> LatticeIsometry {
        LatticeIsometry { domain: self.domain.clone(), codomain: self.codomain.clone(), matrix: self.matrix.clone() }
    }
}

/// Rows of the matrix of an automorphism: `[[α, β], [γ, δ]]`.
pub fn aut_rows(a: &Automorphism) -> [[u64; 2]; 2] {
    [[a.alpha, a.beta], [a.gamma, a.delta]]
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
