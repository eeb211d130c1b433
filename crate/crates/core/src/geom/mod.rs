//! Affine geometric objects (points, lines, flats) in K^n with canonical
//! forms, containment predicates, and deterministic configuration generators.
//!
//! Canonical form: the direction span is stored as the unique RREF basis and
//! the base point is reduced to have zero entries in every pivot coordinate
//! of that span. Two objects describe the same point set iff their canonical
//! encodings are identical, so equality, hashing and ordering are structural.

pub mod generate;

pub use generate::{Family, GeneratorConfig};

use crate::error::{Error, Result};
use crate::exactfield::matrix::Matrix;
use crate::exactfield::{FieldSpec, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectKind {
    Point,
    Line,
    Flat,
}

impl ObjectKind {
    pub fn of_dim(dim: usize) -> ObjectKind {
        match dim {
            0 => ObjectKind::Point,
            1 => ObjectKind::Line,
            _ => ObjectKind::Flat,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectKind::Point => "point",
            ObjectKind::Line => "line",
            ObjectKind::Flat => "flat",
        }
    }
}

/// A point, line or flat in K^n, always held in canonical form. Linear
/// objects have degree 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineObject {
    spec: FieldSpec,
    ambient_dim: usize,
    base: Vec<Scalar>,
    basis: Vec<Vec<Scalar>>,
}

impl AffineObject {
    /// Builds the canonical representative of the flat `base + span(basis)`.
    /// Dependent basis vectors are an input error.
    pub fn new(spec: FieldSpec, base: Vec<Scalar>, basis: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = base.len();
        if n == 0 {
            return Err(Error::DegenerateObject("empty ambient space".into()));
        }
        for v in base.iter().chain(basis.iter().flatten()) {
            if v.spec() != spec {
                return Err(Error::MixedFieldSpecs);
            }
        }
        for v in &basis {
            if v.len() != n {
                return Err(Error::AmbientMismatch {
                    left: n,
                    right: v.len(),
                });
            }
        }
        let declared = basis.len();
        let (canon_basis, pivots) = canonical_span(spec, n, &basis)?;
        if canon_basis.len() != declared {
            return Err(Error::DegenerateObject(format!(
                "direction vectors span dimension {} but {} were given",
                canon_basis.len(),
                declared
            )));
        }
        let canon_base = reduce_base(&base, &canon_basis, &pivots);
        Ok(AffineObject {
            spec,
            ambient_dim: n,
            base: canon_base,
            basis: canon_basis,
        })
    }

    pub fn point(spec: FieldSpec, coords: Vec<Scalar>) -> Result<Self> {
        AffineObject::new(spec, coords, Vec::new())
    }

    pub fn line(spec: FieldSpec, base: Vec<Scalar>, dir: Vec<Scalar>) -> Result<Self> {
        if dir.iter().all(Scalar::is_zero) {
            return Err(Error::DegenerateObject("zero direction vector".into()));
        }
        AffineObject::new(spec, base, vec![dir])
    }

    pub fn point_i64(spec: FieldSpec, coords: &[i64]) -> Result<Self> {
        AffineObject::point(
            spec,
            coords.iter().map(|&v| Scalar::from_i64(v, spec)).collect(),
        )
    }

    pub fn line_i64(spec: FieldSpec, base: &[i64], dir: &[i64]) -> Result<Self> {
        AffineObject::line(
            spec,
            base.iter().map(|&v| Scalar::from_i64(v, spec)).collect(),
            dir.iter().map(|&v| Scalar::from_i64(v, spec)).collect(),
        )
    }

    pub fn flat_i64(spec: FieldSpec, base: &[i64], basis: &[&[i64]]) -> Result<Self> {
        AffineObject::new(
            spec,
            base.iter().map(|&v| Scalar::from_i64(v, spec)).collect(),
            basis
                .iter()
                .map(|row| row.iter().map(|&v| Scalar::from_i64(v, spec)).collect())
                .collect(),
        )
    }

    /// The whole space K^n as a flat of dimension n.
    pub fn whole_space(spec: FieldSpec, n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Scalar::one(spec)
                        } else {
                            Scalar::zero(spec)
                        }
                    })
                    .collect()
            })
            .collect();
        AffineObject::new(spec, vec![Scalar::zero(spec); n], basis)
            .expect("identity basis is independent")
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn kind(&self) -> ObjectKind {
        ObjectKind::of_dim(self.dim())
    }

    /// Degree of the object as a variety; flats are degree 1.
    pub fn degree(&self) -> u64 {
        1
    }

    pub fn base(&self) -> &[Scalar] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    /// The single direction vector of a line.
    pub fn direction(&self) -> Option<&[Scalar]> {
        if self.dim() == 1 {
            Some(&self.basis[0])
        } else {
            None
        }
    }

    fn check_compatible(&self, other: &AffineObject) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::MixedFieldSpecs);
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        Ok(())
    }

    /// Exact containment: inner's base lies in outer and inner's span is a
    /// subspace of outer's span.
    pub fn contains(&self, inner: &AffineObject) -> Result<bool> {
        self.check_compatible(inner)?;
        if inner.dim() > self.dim() {
            return Ok(false);
        }
        let mut rows = self.basis.clone();
        rows.extend(inner.basis.iter().cloned());
        let diff: Vec<Scalar> = inner
            .base
            .iter()
            .zip(&self.base)
            .map(|(a, b)| a.sub(b))
            .collect();
        rows.push(diff);
        let m = Matrix::from_rows(self.spec, rows, self.ambient_dim)?;
        Ok(m.rank() == self.dim())
    }

    /// The point `base + t * direction` of a line.
    pub fn point_at(&self, t: &Scalar) -> Result<AffineObject> {
        let dir = self
            .direction()
            .ok_or_else(|| Error::UnsupportedMemberKind("point_at needs a line".into()))?;
        let coords = self
            .base
            .iter()
            .zip(dir)
            .map(|(b, d)| b.add(&t.mul(d)))
            .collect();
        AffineObject::point(self.spec, coords)
    }
}

/// RREF basis of the span of the given vectors plus its pivot columns.
fn canonical_span(
    spec: FieldSpec,
    n: usize,
    vectors: &[Vec<Scalar>],
) -> Result<(Vec<Vec<Scalar>>, Vec<usize>)> {
    if vectors.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let m = Matrix::from_rows(spec, vectors.to_vec(), n)?;
    let r = m.rref();
    let basis = (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect();
    Ok((basis, r.pivot_cols))
}

/// Subtracts span components so the base has zeros at all pivot coordinates.
fn reduce_base(base: &[Scalar], basis: &[Vec<Scalar>], pivots: &[usize]) -> Vec<Scalar> {
    let mut out = base.to_vec();
    for (row, &pc) in basis.iter().zip(pivots) {
        let factor = out[pc].clone();
        if factor.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o = o.sub(&factor.mul(r));
        }
    }
    out
}

/// Intersection point of two distinct lines, if any. Parallel and skew pairs
/// yield `None`; identical lines are rejected.
pub fn intersect_lines(a: &AffineObject, b: &AffineObject) -> Result<Option<AffineObject>> {
    a.check_compatible(b)?;
    let da = a
        .direction()
        .ok_or_else(|| Error::UnsupportedMemberKind("intersect_lines needs lines".into()))?;
    let db = b
        .direction()
        .ok_or_else(|| Error::UnsupportedMemberKind("intersect_lines needs lines".into()))?;
    if a == b {
        return Err(Error::IdenticalLines);
    }
    // Solve a.base + s*da = b.base + t*db as an augmented n x 3 system.
    let n = a.ambient_dim();
    let spec = a.spec();
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| vec![da[i].clone(), db[i].neg(), b.base()[i].sub(&a.base()[i])])
        .collect();
    let m = Matrix::from_rows(spec, rows, 3)?;
    let r = m.rref();
    let coeff_rank = r.pivot_cols.iter().filter(|&&c| c < 2).count();
    let consistent = !r.pivot_cols.contains(&2);
    if !consistent || coeff_rank < 2 {
        // inconsistent: parallel or skew; coeff_rank < 2 with consistency
        // would mean equal lines, which canonical dedup already excludes
        return Ok(None);
    }
    // With rank 2 the first two rows of the rref read s = row0[2], t = row1[2].
    let s = r.matrix.at(0, 2).clone();
    a.point_at(&s).map(Some)
}

/// Smallest flat containing every input object.
pub fn span_of(objects: &[AffineObject]) -> Result<AffineObject> {
    let first = objects
        .first()
        .ok_or_else(|| Error::InvalidParameter("span_of needs a nonempty list".into()))?;
    let spec = first.spec();
    let base = first.base().to_vec();
    let mut dirs: Vec<Vec<Scalar>> = Vec::new();
    for obj in objects {
        first.check_compatible(obj)?;
        dirs.extend(obj.basis().iter().cloned());
        let diff: Vec<Scalar> = obj
            .base()
            .iter()
            .zip(&base)
            .map(|(a, b)| a.sub(b))
            .collect();
        if diff.iter().any(|v| !v.is_zero()) {
            dirs.push(diff);
        }
    }
    let (basis, _) = canonical_span(spec, first.ambient_dim(), &dirs)?;
    AffineObject::new(spec, base, basis)
}

/// A finite deduplicated set of same-kind objects playing the role of S or T.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietySet {
    spec: FieldSpec,
    ambient_dim: usize,
    member_dim: usize,
    members: Vec<AffineObject>,
}

impl VarietySet {
    pub fn empty(spec: FieldSpec, ambient_dim: usize, member_dim: usize) -> Self {
        VarietySet {
            spec,
            ambient_dim,
            member_dim,
            members: Vec::new(),
        }
    }

    /// Canonicalizes, sorts and dedupes; all members must share kind,
    /// dimension, ambient space and field.
    pub fn from_members(members: Vec<AffineObject>) -> Result<Self> {
        let first = members.first().ok_or_else(|| {
            Error::InvalidParameter("use VarietySet::empty for empty sets".into())
        })?;
        let mut set = VarietySet::empty(first.spec(), first.ambient_dim(), first.dim());
        for m in members {
            set.check_member(&m)?;
            set.members.push(m);
        }
        set.members.sort();
        set.members.dedup();
        Ok(set)
    }

    fn check_member(&self, m: &AffineObject) -> Result<()> {
        if m.spec() != self.spec {
            return Err(Error::MixedFieldSpecs);
        }
        if m.ambient_dim() != self.ambient_dim {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim,
                right: m.ambient_dim(),
            });
        }
        if m.dim() != self.member_dim {
            return Err(Error::DimensionMismatch {
                expected: self.member_dim,
                got: m.dim(),
            });
        }
        Ok(())
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn member_dim(&self) -> usize {
        self.member_dim
    }

    pub fn members(&self) -> &[AffineObject] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sum of member degrees; equals the member count for flats.
    pub fn total_degree(&self) -> u64 {
        self.members.iter().map(AffineObject::degree).sum()
    }

    pub fn contains_member(&self, obj: &AffineObject) -> bool {
        self.members.binary_search(obj).is_ok()
    }

    /// The sub-set of members lying inside `w`.
    pub fn restrict_to(&self, w: &AffineObject) -> Result<VarietySet> {
        let mut out = VarietySet::empty(self.spec, self.ambient_dim, self.member_dim);
        for m in &self.members {
            if w.contains(m)? {
                out.members.push(m.clone());
            }
        }
        Ok(out)
    }

    /// Splits into (members satisfying `pred`, the rest); both sides keep
    /// canonical order.
    pub fn partition_by<F>(&self, mut pred: F) -> Result<(VarietySet, VarietySet)>
    where
        F: FnMut(&AffineObject) -> Result<bool>,
    {
        let mut inside = VarietySet::empty(self.spec, self.ambient_dim, self.member_dim);
        let mut outside = VarietySet::empty(self.spec, self.ambient_dim, self.member_dim);
        for m in &self.members {
            if pred(m)? {
                inside.members.push(m.clone());
            } else {
                outside.members.push(m.clone());
            }
        }
        Ok((inside, outside))
    }

    pub fn subset_by_indices(&self, indices: &[usize]) -> VarietySet {
        let mut out = VarietySet::empty(self.spec, self.ambient_dim, self.member_dim);
        let mut idx: Vec<usize> = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        for &i in &idx {
            out.members.push(self.members[i].clone());
        }
        out
    }
}
