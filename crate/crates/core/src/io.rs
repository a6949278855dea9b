//! JSON instance files and reports.
//!
//! Field elements are written as an integer when K is a prime field and as
//! an ascending coefficient array (constant term first, in the basis of
//! powers of the field generator) otherwise. Parsing accepts both forms in
//! either case; an integer always denotes an element of the prime field.
//!
//! All serialisation is canonical: the same data always produces the same
//! bytes, so reports can be compared with golden files.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{Budgets, ClassificationResult, ClassifyError, Diagnostics, Witness};
use crate::field::{make_field, AdditiveSubgroup, Elem, Field};
use crate::fixtures::Fixture;
use crate::group::{GroupError, GroupSpec, Provenance, SaturationData};
use crate::linalg::{Matrix, Subspace, Vector};
use crate::symplectic::{SymplecticSpace, Transvection};
use crate::wagner::{WagnerInstance, WagnerResult};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },
}

fn schema(path: impl Into<String>, msg: impl Into<String>) -> IoError {
    IoError::Schema {
        path: path.into(),
        msg: msg.into(),
    }
}

fn from_serde(e: serde_json::Error) -> IoError {
    IoError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Int(u64),
    Coeffs(Vec<u32>),
}

pub type MatrixJson = Vec<Vec<Literal>>;

pub fn encode(k: &Field, a: Elem) -> Literal {
    if k.degree() == 1 {
        Literal::Int(a.index() as u64)
    } else {
        Literal::Coeffs(k.coeffs(a))
    }
}

pub fn decode(k: &Field, lit: &Literal, path: &str) -> Result<Elem, IoError> {
    let p = k.characteristic();
    match lit {
        Literal::Int(x) if *x < p as u64 => Ok(k.from_int(*x as i64)),
        Literal::Int(x) => Err(schema(path, format!("integer literal {x} is not below the characteristic {p}"))),
        Literal::Coeffs(c) => {
            if c.len() > k.degree() as usize {
                return Err(schema(path, format!("{} coefficients for a degree-{} field", c.len(), k.degree())));
            }
            if let Some(x) = c.iter().find(|&&x| x >= p) {
                return Err(schema(path, format!("coefficient {x} is not below the characteristic {p}")));
            }
            k.from_coeffs(c).map_err(|e| schema(path, e.to_string()))
        }
    }
}

pub fn encode_vector(k: &Field, v: &[Elem]) -> Vec<Literal> {
    v.iter().map(|&a| encode(k, a)).collect()
}

pub fn decode_vector(k: &Field, v: &[Literal], n: usize, path: &str) -> Result<Vector, IoError> {
    if v.len() != n {
        return Err(schema(path, format!("expected {n} entries, found {}", v.len())));
    }
    v.iter()
        .enumerate()
        .map(|(i, l)| decode(k, l, &format!("{path}[{i}]")))
        .collect()
}

pub fn encode_matrix(k: &Field, m: &Matrix) -> MatrixJson {
    (0..m.rows()).map(|i| encode_vector(k, m.row(i))).collect()
}

pub fn decode_matrix(k: &Field, m: &MatrixJson, n: usize, path: &str) -> Result<Matrix, IoError> {
    if m.len() != n {
        return Err(schema(path, format!("expected {n} rows, found {}", m.len())));
    }
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, r)| decode_vector(k, r, n, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(&rows).expect("rows have equal length"))
}

fn encode_subspace(k: &Field, s: &Subspace) -> Vec<Vec<Literal>> {
    s.basis().iter().map(|v| encode_vector(k, v)).collect()
}

fn decode_subspace(k: &Field, b: &[Vec<Literal>], n: usize, path: &str) -> Result<Subspace, IoError> {
    let vs = b
        .iter()
        .enumerate()
        .map(|(i, v)| decode_vector(k, v, n, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Subspace::span(k, n, &vs).map_err(|e| schema(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(rename = "char")]
    pub characteristic: u32,
    pub degree: u32,
    /// Ascending coefficients of the monic defining polynomial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl FieldSpec {
    pub fn of(k: &Field) -> Self {
        FieldSpec {
            characteristic: k.characteristic(),
            degree: k.degree(),
            modulus: (k.degree() > 1).then(|| k.modulus().to_vec()),
        }
    }

    pub fn field(&self) -> Result<Field, IoError> {
        let k = make_field(self.characteristic, self.degree).map_err(|e| schema("field", e.to_string()))?;
        if let Some(m) = &self.modulus {
            if m.as_slice() != k.modulus() {
                return Err(schema(
                    "field.modulus",
                    format!("only the modulus {:?} is supported for this field", k.modulus()),
                ));
            }
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransvectionJson {
    pub direction: Vec<Literal>,
    pub parameter: Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation_budget: Option<usize>,
}

impl BudgetsJson {
    /// Missing entries from `base`.
    pub fn over(&self, base: Budgets) -> Budgets {
        Budgets {
            closure_cap: self.closure_cap.unwrap_or(base.closure_cap),
            saturation_budget: self.saturation_budget.unwrap_or(base.saturation_budget),
        }
    }

    pub fn full(b: &Budgets) -> Self {
        BudgetsJson {
            closure_cap: Some(b.closure_cap),
            saturation_budget: Some(b.saturation_budget),
        }
    }
}

/// How a generated instance was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureMeta {
    pub recipe: String,
    pub case: u8,
    pub subfield_degree: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub field: FieldSpec,
    pub n: usize,
    /// Defaults to the standard form with basis e₁..e_g, f₁..f_g.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<MatrixJson>,
    pub generators: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<TransvectionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<BudgetsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<FixtureMeta>,
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub group: GroupSpec,
    pub seeds: Vec<Transvection>,
    pub budgets: BudgetsJson,
    pub file: InstanceFile,
}

impl Instance {
    pub fn field(&self) -> &Field {
        self.group.field()
    }

    /// G with the seed transvections (elements of G by assumption) appended
    /// to the generators.
    pub fn full_group(&self) -> GroupSpec {
        if self.seeds.is_empty() {
            return self.group.clone();
        }
        let space = self.group.space();
        let mut gens = self.group.generators().to_vec();
        gens.extend(self.seeds.iter().map(|t| t.matrix(space)));
        GroupSpec::new(space.clone(), gens).expect("transvections are similitudes")
    }

    /// Canonical serialisation; parsing it back gives the same instance.
    pub fn to_json(&self) -> String {
        to_json(&self.file)
    }

    /// SHA-256 of the compact canonical form, hex.
    pub fn digest(&self) -> String {
        digest(&serde_json::to_vec(&self.file).expect("instance serialises"))
    }
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Indented JSON with arrays of numbers (vectors, matrix rows, word runs)
/// kept on one line, and a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("report types serialise");
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &serde_json::Value, depth: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat("  ").take(d));
    match v {
        Value::Array(xs) if xs.is_empty() => out.push_str("[]"),
        Value::Array(xs) if xs.iter().all(|x| x.is_number()) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&x.to_string());
            }
            out.push(']');
        }
        Value::Array(xs) => {
            out.push_str("[\n");
            for (i, x) in xs.iter().enumerate() {
                pad(depth + 1, out);
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < xs.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (key, x)) in m.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(from_serde)?;
    validate_instance(file)
}

pub fn validate_instance(file: InstanceFile) -> Result<Instance, IoError> {
    let k = file.field.field()?;
    let n = file.n;
    let space = match &file.gram {
        None => SymplecticSpace::standard(&k, n).map_err(|e| schema("n", e.to_string()))?,
        Some(g) => {
            if n == 0 || n % 2 != 0 {
                return Err(schema("n", format!("dimension {n} is not a positive even number")));
            }
            let m = decode_matrix(&k, g, n, "gram")?;
            SymplecticSpace::with_gram(&k, m).map_err(|e| schema("gram", e.to_string()))?
        }
    };
    let gens = file
        .generators
        .iter()
        .enumerate()
        .map(|(i, m)| decode_matrix(&k, m, n, &format!("generators[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let group = GroupSpec::new(space.clone(), gens).map_err(|e| match e {
        GroupError::NotSimilitude { index } => schema(format!("generators[{index}]"), "not a symplectic similitude for the form"),
        e => schema("generators", e.to_string()),
    })?;
    let seeds = file
        .seeds
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let path = format!("seeds[{i}]");
            let v = decode_vector(&k, &t.direction, n, &format!("{path}.direction"))?;
            let lam = decode(&k, &t.parameter, &format!("{path}.parameter"))?;
            space
                .make_transvection(&v, lam)
                .map_err(|e| schema(path, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(meta) = &file.fixture {
        if let Some(c) = &meta.conjugator {
            decode_matrix(&k, c, n, "fixture.conjugator")?;
        }
    }
    Ok(Instance {
        group,
        seeds,
        budgets: file.budgets.unwrap_or_default(),
        file,
    })
}

/// Instance file for a group, with the standard form omitted.
pub fn instance_file(g: &GroupSpec, seeds: &[Transvection], budgets: Option<BudgetsJson>) -> InstanceFile {
    let k = g.field();
    let space = g.space();
    InstanceFile {
        description: None,
        notes: Vec::new(),
        field: FieldSpec::of(k),
        n: g.dim(),
        gram: (!space.is_standard()).then(|| encode_matrix(k, space.gram())),
        generators: g.generators().iter().map(|m| encode_matrix(k, m)).collect(),
        seeds: seeds
            .iter()
            .filter_map(|t| match t {
                Transvection::Nontrivial { direction, parameter } => Some(TransvectionJson {
                    direction: encode_vector(k, direction),
                    parameter: encode(k, *parameter),
                }),
                Transvection::Trivial => None,
            })
            .collect(),
        budgets,
        fixture: None,
    }
}

pub fn fixture_file(f: &Fixture, seed: u64) -> InstanceFile {
    let k = f.group.field();
    let mut file = instance_file(&f.group, &[], None);
    file.fixture = Some(FixtureMeta {
        recipe: f.recipe.clone(),
        case: f.case,
        subfield_degree: f.subfield_degree,
        seed,
        conjugator: f.conjugator.as_ref().map(|c| encode_matrix(k, c)),
        log: f.log.clone(),
    });
    file
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessJson {
    Reducible {
        subspace: Vec<Vec<Literal>>,
    },
    Imprimitive {
        blocks: Vec<Vec<Vec<Literal>>>,
        permutations: Vec<Vec<usize>>,
        transitivity: Vec<Vec<usize>>,
    },
    FullSymplectic {
        subfield_degree: u32,
        conjugator: MatrixJson,
    },
}

impl WitnessJson {
    pub fn of(k: &Field, w: &Witness) -> Self {
        match w {
            Witness::Reducible { subspace } => WitnessJson::Reducible {
                subspace: encode_subspace(k, subspace),
            },
            Witness::Imprimitive {
                blocks,
                permutations,
                transitivity,
            } => WitnessJson::Imprimitive {
                blocks: blocks.iter().map(|b| encode_subspace(k, b)).collect(),
                permutations: permutations.clone(),
                transitivity: transitivity.clone(),
            },
            Witness::FullSymplectic {
                subfield_degree,
                conjugator,
            } => WitnessJson::FullSymplectic {
                subfield_degree: *subfield_degree,
                conjugator: encode_matrix(k, conjugator),
            },
        }
    }

    pub fn witness(&self, k: &Field, n: usize) -> Result<Witness, IoError> {
        Ok(match self {
            WitnessJson::Reducible { subspace } => Witness::Reducible {
                subspace: decode_subspace(k, subspace, n, "witness.subspace")?,
            },
            WitnessJson::Imprimitive {
                blocks,
                permutations,
                transitivity,
            } => Witness::Imprimitive {
                blocks: blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| decode_subspace(k, b, n, &format!("witness.blocks[{i}]")))
                    .collect::<Result<_, _>>()?,
                permutations: permutations.clone(),
                transitivity: transitivity.clone(),
            },
            WitnessJson::FullSymplectic {
                subfield_degree,
                conjugator,
            } => Witness::FullSymplectic {
                subfield_degree: *subfield_degree,
                conjugator: decode_matrix(k, conjugator, n, "witness.conjugator")?,
            },
        })
    }
}

/// Reads a witness from either a bare witness object or a classification
/// report carrying one.
pub fn parse_witness(text: &str, k: &Field, n: usize) -> Result<Witness, IoError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(from_serde)?;
    let w = match value.get("witness") {
        Some(w) if value.get("status").is_some() => w.clone(),
        _ => value,
    };
    let wj: WitnessJson = serde_json::from_value(w).map_err(|e| schema("witness", e.to_string()))?;
    wj.witness(k, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagnosticsJson {
    pub centres: usize,
    pub transvections: u64,
    pub firings: usize,
    pub planes_enumerated: usize,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane: Option<[Vec<Literal>; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane_group_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rationalizer: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rationalizer_multiplier: Option<Literal>,
    pub extension_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure_dim: Option<usize>,
}

impl DiagnosticsJson {
    pub fn of(k: &Field, d: &Diagnostics) -> Self {
        DiagnosticsJson {
            centres: d.centres,
            transvections: d.transvections,
            firings: d.firings,
            planes_enumerated: d.planes_enumerated,
            certified: d.certified,
            plane: d
                .plane
                .as_ref()
                .map(|(a, b)| [encode_vector(k, a), encode_vector(k, b)]),
            plane_group_order: d.plane_group_order,
            rationalizer: d.rationalizer.as_ref().map(|(a, _)| encode_matrix(k, a)),
            rationalizer_multiplier: d.rationalizer.as_ref().map(|(_, m)| encode(k, *m)),
            extension_steps: d.extension_steps,
            structure_dim: d.structure_dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentreJson {
    pub direction: Vec<Literal>,
    /// GF(ℓ)-basis of the parameter group.
    pub parameters: Vec<Literal>,
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub from: Vec<Vec<Literal>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<usize>,
}

pub fn provenance_log(d: &SaturationData) -> Vec<CentreJson> {
    let k = d.field();
    let params = |p: &AdditiveSubgroup| p.basis().iter().map(|&a| encode(k, a)).collect();
    d.centres()
        .iter()
        .map(|c| {
            let (rule, from, generator) = match &c.origin {
                Provenance::Seed => ("seed", Vec::new(), None),
                Provenance::Orbit { source, generator } => ("orbit", vec![encode_vector(k, source)], Some(*generator)),
                Provenance::Plane { u1, u2 } => ("plane", vec![encode_vector(k, u1), encode_vector(k, u2)], None),
                Provenance::Isotropic { u1, u2 } => {
                    ("isotropic", vec![encode_vector(k, u1), encode_vector(k, u2)], None)
                }
            };
            CentreJson {
                direction: encode_vector(k, &c.direction),
                parameters: params(&c.params),
                rule,
                from,
                generator,
            }
        })
        .collect()
}

/// Outcome of a classification run. No timings, so that identical inputs give
/// identical bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifyReport {
    pub instance_digest: String,
    pub field: FieldSpec,
    pub n: usize,
    pub budgets: BudgetsJson,
    /// "verified", "verification_failed", "saturation_incomplete" or "error".
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subfield_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    pub verified: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub multiplier_subgroup: Vec<Literal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Vec<CentreJson>>,
}

impl ClassifyReport {
    pub fn new(
        inst: &Instance,
        budgets: &Budgets,
        outcome: &Result<ClassificationResult, ClassifyError>,
        verified: bool,
        with_provenance: bool,
    ) -> Self {
        let k = inst.field();
        let mut r = ClassifyReport {
            instance_digest: inst.digest(),
            field: FieldSpec::of(k),
            n: inst.group.dim(),
            budgets: BudgetsJson::full(budgets),
            status: "error",
            case: None,
            subfield_degree: None,
            witness: None,
            verified: false,
            multiplier_subgroup: Vec::new(),
            diagnostics: None,
            error: None,
            provenance: None,
        };
        match outcome {
            Ok(res) => {
                r.status = if verified { "verified" } else { "verification_failed" };
                r.case = Some(res.witness.case_tag());
                if let Witness::FullSymplectic { subfield_degree, .. } = &res.witness {
                    r.subfield_degree = Some(*subfield_degree);
                }
                r.witness = Some(WitnessJson::of(k, &res.witness));
                r.verified = verified;
                r.multiplier_subgroup = res.multiplier_subgroup.iter().map(|&a| encode(k, a)).collect();
                r.diagnostics = Some(DiagnosticsJson::of(k, &res.diagnostics));
                if with_provenance {
                    r.provenance = Some(provenance_log(&res.saturation));
                }
            }
            Err(e) => {
                if matches!(e, ClassifyError::SaturationIncomplete { .. }) {
                    r.status = "saturation_incomplete";
                }
                r.error = Some(e.to_string());
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WagnerFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub field: FieldSpec,
    /// T₁, T₂, T₃ as 3×3 matrices.
    pub transvections: Vec<MatrixJson>,
    pub u: Vec<Literal>,
}

pub fn parse_wagner(text: &str) -> Result<WagnerInstance, IoError> {
    let file: WagnerFile = serde_json::from_str(text).map_err(from_serde)?;
    let k = file.field.field()?;
    if file.transvections.len() != 3 {
        return Err(schema(
            "transvections",
            format!("expected 3 matrices, found {}", file.transvections.len()),
        ));
    }
    let ts = file
        .transvections
        .iter()
        .enumerate()
        .map(|(i, m)| decode_matrix(&k, m, 3, &format!("transvections[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let u = decode_vector(&k, &file.u, 3, "u")?;
    let [a, b, c]: [Matrix; 3] = ts.try_into().expect("three matrices");
    Ok(WagnerInstance::new(&k, [a, b, c], u))
}

pub fn wagner_file(inst: &WagnerInstance) -> WagnerFile {
    let k = &inst.field;
    WagnerFile {
        description: None,
        field: FieldSpec::of(k),
        transvections: inst.transvections.iter().map(|m| encode_matrix(k, m)).collect(),
        u: encode_vector(k, &inst.u),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WagnerReport {
    pub field: FieldSpec,
    /// Monic direction of (U₁ ⊕ U₂) ∩ (U ⊕ U₃).
    pub centre: Vec<Literal>,
    /// Runs (input index, exponent), applied left to right as a product.
    pub word: Vec<(usize, u32)>,
    pub k: u32,
    pub delta_words: [Vec<(usize, u32)>; 2],
    pub matrix: MatrixJson,
}

impl WagnerReport {
    pub fn of(k: &Field, r: &WagnerResult) -> Self {
        WagnerReport {
            field: FieldSpec::of(k),
            centre: encode_vector(k, &r.line),
            word: r.word.clone(),
            k: r.k,
            delta_words: r.delta_words.clone(),
            matrix: encode_matrix(k, &r.matrix),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{classify, verify_witness};
    use crate::fixtures::generate_instance;

    #[test]
    fn literals() {
        let k = make_field(5, 2).unwrap();
        let x = k.generator();
        assert_eq!(encode(&k, x), Literal::Coeffs(vec![0, 1]));
        assert_eq!(decode(&k, &Literal::Int(3), "").unwrap(), k.from_int(3));
        assert_eq!(decode(&k, &Literal::Coeffs(vec![0, 1]), "").unwrap(), x);
        assert!(decode(&k, &Literal::Int(5), "").is_err());
        assert!(decode(&k, &Literal::Coeffs(vec![0, 0, 1]), "").is_err());
        let p = make_field(7, 1).unwrap();
        assert_eq!(encode(&p, p.from_int(4)), Literal::Int(4));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_instance("{\n  \"field\": {\"char\": 5, \"degree\": 1},\n  \"n\": oops\n}") {
            Err(IoError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_name_the_path() {
        let text = r#"{"field": {"char": 5, "degree": 1}, "n": 2, "generators": [[[1, 1], [1, 1]]]}"#;
        match parse_instance(text) {
            Err(IoError::Schema { path, .. }) => assert_eq!(path, "generators[0]"),
            other => panic!("{other:?}"),
        }
        let text = r#"{"field": {"char": 5, "degree": 1}, "n": 2, "generators": [[[1, 1]]]}"#;
        assert!(matches!(parse_instance(text), Err(IoError::Schema { .. })));
    }

    #[test]
    fn generated_instances_round_trip() {
        let k = make_field(5, 2).unwrap();
        for case in 1..=3 {
            let n = if case == 3 { 2 } else { 4 };
            let f = generate_instance(case, &k, n, 1, 7).unwrap();
            let text = to_json(&fixture_file(&f, 7));
            let inst = parse_instance(&text).unwrap();
            assert_eq!(inst.to_json(), text);
            assert_eq!(inst.group.generators(), f.group.generators());
        }
    }

    #[test]
    fn witness_round_trip() {
        let k = make_field(5, 1).unwrap();
        let f = generate_instance(2, &k, 4, 1, 3).unwrap();
        let res = classify(&f.group, &Budgets::default()).unwrap();
        let inst = validate_instance(fixture_file(&f, 3)).unwrap();
        let b = Budgets::default();
        let report = ClassifyReport::new(&inst, &b, &Ok(res.clone()), true, false);
        let w = parse_witness(&to_json(&report), &k, 4).unwrap();
        assert_eq!(w, res.witness);
        assert!(verify_witness(&f.group, &w, &b));
        let bare = to_json(&WitnessJson::of(&k, &res.witness));
        assert_eq!(parse_witness(&bare, &k, 4).unwrap(), res.witness);
    }
}
