//! JSON wire formats: object-set files, polynomial files, and report
//! emission. Loaders canonicalize and dedupe; writers emit canonical form
//! with members in sorted order so diffs are reproducible.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::concentrate::ConcentrationEstimate;
use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Scalar};
use crate::geom::{AffineObject, ObjectKind, VarietySet};
use crate::incidence::RichSet;
use crate::mpoly::{Monomial, MultiPoly};
use crate::partition::{PartitionStep, PartitionTrace};
use crate::vanish::{RelativeDegreeResult, VanishResult};

#[derive(Serialize, Deserialize)]
struct ObjectSetDto {
    field: FieldSpec,
    ambient_dim: usize,
    objects: Vec<ObjectDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ObjectDto {
    Point {
        coords: Vec<String>,
    },
    Line {
        base: Vec<String>,
        dir: Vec<String>,
    },
    Flat {
        dim: usize,
        base: Vec<String>,
        basis: Vec<Vec<String>>,
    },
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string).collect()
}

fn scalars(v: &[String], spec: FieldSpec) -> Result<Vec<Scalar>> {
    v.iter().map(|s| Scalar::parse(s, spec)).collect()
}

fn object_to_dto(obj: &AffineObject) -> ObjectDto {
    match obj.kind() {
        ObjectKind::Point => ObjectDto::Point {
            coords: strings(obj.base()),
        },
        ObjectKind::Line => ObjectDto::Line {
            base: strings(obj.base()),
            dir: strings(&obj.basis()[0]),
        },
        ObjectKind::Flat => ObjectDto::Flat {
            dim: obj.dim(),
            base: strings(obj.base()),
            basis: obj.basis().iter().map(|b| strings(b)).collect(),
        },
    }
}

fn object_from_dto(dto: &ObjectDto, spec: FieldSpec) -> Result<AffineObject> {
    match dto {
        ObjectDto::Point { coords } => AffineObject::point(spec, scalars(coords, spec)?),
        ObjectDto::Line { base, dir } => {
            AffineObject::line(spec, scalars(base, spec)?, scalars(dir, spec)?)
        }
        ObjectDto::Flat { dim, base, basis } => {
            let obj = AffineObject::new(
                spec,
                scalars(base, spec)?,
                basis
                    .iter()
                    .map(|b| scalars(b, spec))
                    .collect::<Result<_>>()?,
            )?;
            if obj.dim() != *dim {
                return Err(Error::DimensionMismatch {
                    expected: *dim,
                    got: obj.dim(),
                });
            }
            Ok(obj)
        }
    }
}

pub fn object_set_to_json(set: &VarietySet) -> Value {
    let dto = ObjectSetDto {
        field: set.spec(),
        ambient_dim: set.ambient_dim(),
        objects: set.members().iter().map(object_to_dto).collect(),
    };
    serde_json::to_value(dto).expect("object set serializes")
}

pub fn object_set_from_json(text: &str) -> Result<VarietySet> {
    let dto: ObjectSetDto = serde_json::from_str(text)?;
    dto.field.validate()?;
    let members = dto
        .objects
        .iter()
        .map(|o| object_from_dto(o, dto.field))
        .collect::<Result<Vec<_>>>()?;
    if members.is_empty() {
        return Ok(VarietySet::empty(dto.field, dto.ambient_dim, 0));
    }
    for m in &members {
        if m.ambient_dim() != dto.ambient_dim {
            return Err(Error::AmbientMismatch {
                left: dto.ambient_dim,
                right: m.ambient_dim(),
            });
        }
    }
    VarietySet::from_members(members)
}

/// Loads a list of flats (for `--avoid`); same file format as object sets.
pub fn flats_from_json(text: &str) -> Result<Vec<AffineObject>> {
    let set = object_set_from_json(text)?;
    Ok(set.members().to_vec())
}

#[derive(Serialize, Deserialize)]
struct PolyDto {
    nvars: usize,
    terms: Vec<TermDto>,
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    exp: Vec<u32>,
    coef: String,
}

/// Canonical polynomial JSON: terms in graded-lex order.
pub fn poly_to_json(f: &MultiPoly) -> Value {
    let dto = PolyDto {
        nvars: f.nvars(),
        terms: f
            .terms()
            .map(|(m, c)| TermDto {
                exp: m.0.clone(),
                coef: c.to_string(),
            })
            .collect(),
    };
    serde_json::to_value(dto).expect("polynomial serializes")
}

/// Parses polynomial JSON; the field comes from context, matching the object
/// sets the polynomial will be used with.
pub fn poly_from_json(text: &str, spec: FieldSpec) -> Result<MultiPoly> {
    let dto: PolyDto = serde_json::from_str(text)?;
    MultiPoly::from_terms(
        spec,
        dto.nvars,
        dto.terms
            .into_iter()
            .map(|t| Ok((Monomial(t.exp), Scalar::parse(&t.coef, spec)?)))
            .collect::<Result<Vec<_>>>()?,
    )
}

pub fn vanish_result_to_json(r: &VanishResult) -> Value {
    json!({
        "degree": r.degree,
        "polynomial": r.polynomial.as_ref().map(poly_to_json),
        "kernel_dim": r.kernel_dim,
        "constraint_count": r.constraint_count,
        "monomial_count": r.monomial_count,
    })
}

pub fn relative_degree_to_json(r: &RelativeDegreeResult) -> Value {
    json!({
        "degree": r.degree,
        "witness": poly_to_json(&r.witness),
        "avoided": r.avoided.iter().map(object_to_json).collect::<Vec<_>>(),
    })
}

pub fn object_to_json(obj: &AffineObject) -> Value {
    serde_json::to_value(object_to_dto(obj)).expect("object serializes")
}

pub fn ratio_to_f64(r: num_rational::Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn concentration_to_json(c: &ConcentrationEstimate) -> Value {
    json!({
        "m": c.m,
        "value": c.value.to_string(),
        "value_real": ratio_to_f64(c.value),
        "witness": c.witness.iter().map(object_to_json).collect::<Vec<_>>(),
        "restricted_degree": c.restricted_degree,
        "oracle": c.oracle.as_str(),
    })
}

pub fn partition_step_to_json(st: &PartitionStep) -> Value {
    json!({
        "f": poly_to_json(&st.f),
        "s_in": object_set_to_json(&st.s_in),
        "s_out": object_set_to_json(&st.s_out),
        "t_in": object_set_to_json(&st.t_in),
        "t_out": object_set_to_json(&st.t_out),
        "error_term": st.error_term,
        "lhs": st.lhs,
        "rhs": st.rhs,
    })
}

pub fn partition_trace_to_json(tr: &PartitionTrace) -> Value {
    json!({
        "pieces": tr.pieces.iter().map(|(s, t)| json!({
            "s": object_set_to_json(s),
            "t": object_set_to_json(t),
        })).collect::<Vec<_>>(),
        "steps": tr.steps.iter().map(partition_step_to_json).collect::<Vec<_>>(),
        "total_error": tr.total_error,
        "budget_rule": serde_json::to_value(tr.budget_rule).expect("budget rule"),
        "lhs": tr.lhs,
        "pieces_incidence": tr.pieces_incidence,
        "global_inequality_holds": tr.global_inequality_holds(),
    })
}

pub fn rich_set_to_json(r: &RichSet) -> Value {
    json!({
        "rich": { "r": r.r, "count": r.points.len() },
        "points": object_set_to_json(&r.points),
        "multiplicities": r.multiplicities,
    })
}
