//! Construction of minimum-degree vanishing polynomials by parameter
//! counting, and relative degrees against flats.
//!
//! A degree-D polynomial in n variables has C(D+n, n) coefficients. Each
//! point contributes one linear vanishing constraint and each line D+1, so a
//! nonzero vanishing polynomial must exist as soon as the monomial count
//! exceeds the constraint count. The kernel of the assembled constraint
//! matrix is exactly the space of such polynomials.

use crate::error::{Error, Result};
use crate::exactfield::matrix::Matrix;
use crate::exactfield::{FieldSpec, Scalar};
use crate::geom::{AffineObject, VarietySet};
use crate::mpoly::{
    binomial, flat_vanishing_constraints, line_vanishing_constraints, point_vanishing_row,
    MonomialBasis, MultiPoly,
};

/// Outcome of a vanishing-polynomial search at one degree.
#[derive(Debug, Clone)]
pub struct VanishResult {
    pub degree: usize,
    /// First kernel polynomial in graded-lex order; absent when the kernel
    /// is trivial at this degree.
    pub polynomial: Option<MultiPoly>,
    pub kernel_dim: usize,
    pub constraint_count: usize,
    pub monomial_count: usize,
}

/// Witness for a relative degree: vanishes on all of X, identically zero on
/// none of the avoided flats.
#[derive(Debug, Clone)]
pub struct RelativeDegreeResult {
    pub degree: usize,
    pub witness: MultiPoly,
    pub avoided: Vec<AffineObject>,
}

/// The constraint matrix for "degree ≤ d and vanishing on every member".
pub fn constraint_matrix(ts: &VarietySet, d: usize) -> Result<Matrix> {
    let n = ts.ambient_dim();
    let spec = ts.spec();
    let basis = MonomialBasis::new(n, d);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for member in ts.members() {
        match member.dim() {
            0 => rows.push(point_vanishing_row(member, d)?),
            1 => rows.extend(line_vanishing_constraints(member, d)?),
            k => {
                return Err(Error::UnsupportedMemberKind(format!(
                    "vanishing constraints support points and lines, got dimension {k}"
                )))
            }
        }
    }
    if rows.is_empty() {
        return Ok(Matrix::zeros(spec, 0, basis.size()));
    }
    Matrix::from_rows(spec, rows, basis.size())
}

fn constraint_count(ts: &VarietySet, d: usize) -> u128 {
    ts.members()
        .iter()
        .map(|m| if m.dim() == 0 { 1u128 } else { d as u128 + 1 })
        .sum()
}

/// Smallest degree at which parameter counting guarantees a nonzero kernel:
/// C(d+n, n) > #points + (d+1)·#lines.
pub fn termination_degree(ts: &VarietySet) -> usize {
    let n = ts.ambient_dim();
    let mut d = 0usize;
    loop {
        if binomial(d + n, n) > constraint_count(ts, d) {
            return d;
        }
        d += 1;
    }
}

/// Searches for a nonzero polynomial of degree at most `d` vanishing on every
/// member; members must be points or lines.
pub fn vanishing_poly(ts: &VarietySet, d: usize) -> Result<VanishResult> {
    let basis = MonomialBasis::new(ts.ambient_dim(), d);
    let m = constraint_matrix(ts, d)?;
    let kernel = m.kernel_basis();
    let polynomial = kernel
        .first()
        .map(|v| MultiPoly::from_coeff_vector(ts.spec(), &basis, v))
        .transpose()?;
    if let Some(p) = &polynomial {
        debug_assert!(
            verify_vanishes(p, ts)?,
            "kernel vector must vanish on the set"
        );
    }
    Ok(VanishResult {
        degree: d,
        kernel_dim: kernel.len(),
        constraint_count: m.rows(),
        monomial_count: basis.size(),
        polynomial,
    })
}

/// Every kernel basis polynomial at degree `d`, in free-column order.
pub fn vanishing_kernel_basis(ts: &VarietySet, d: usize) -> Result<Vec<MultiPoly>> {
    let basis = MonomialBasis::new(ts.ambient_dim(), d);
    let m = constraint_matrix(ts, d)?;
    m.kernel_basis()
        .iter()
        .map(|v| MultiPoly::from_coeff_vector(ts.spec(), &basis, v))
        .collect()
}

/// True iff `f` vanishes on every member (symbolically for lines and flats).
pub fn verify_vanishes(f: &MultiPoly, ts: &VarietySet) -> Result<bool> {
    for member in ts.members() {
        let ok = match member.dim() {
            0 => f.evaluate(member.base()).is_zero(),
            1 => f.restrict_to_line(member)?.is_zero(),
            _ => f.restrict_to_flat(member)?.is_zero(),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Degree at which the vanishing kernel provably escapes every flat's
/// vanishing subspace: polynomials dying identically on an m-flat form a
/// subspace of codimension C(d+m, m), so once the constraint count drops
/// below that for every avoided flat, the kernel is too big to fit inside
/// any of them.
fn relative_termination_degree(xs: &VarietySet, flats: &[AffineObject]) -> usize {
    let m_min = flats.iter().map(AffineObject::dim).min().expect("nonempty");
    let mut d = 0usize;
    loop {
        if constraint_count(xs, d) < binomial(d + m_min, m_min) {
            return d;
        }
        d += 1;
    }
}

/// Sweeps degrees 0, 1, 2, … and returns the first degree with a nonzero
/// vanishing polynomial. Terminates by parameter counting.
pub fn min_vanishing_degree(ts: &VarietySet) -> Result<VanishResult> {
    let bound = termination_degree(ts);
    for d in 0..=bound {
        let res = vanishing_poly(ts, d)?;
        if res.polynomial.is_some() {
            return Ok(res);
        }
    }
    unreachable!("parameter counting guarantees a kernel by degree {bound}")
}

/// Smallest degree of a polynomial vanishing on `xs` without vanishing
/// identically on any of the given flats, together with a witness.
///
/// At each degree the vanishing kernel is compared against the subspace of
/// polynomials dying identically on each flat (a rank comparison). When no
/// single flat swallows the whole kernel, a witness avoiding all flats
/// simultaneously is assembled from kernel basis vectors by sweeping linear
/// combinations v + c·u with coefficients in a fixed order. Over a finite
/// field the sweep can fail only when the field has no more elements than
/// there are flats.
pub fn relative_degree(xs: &VarietySet, flats: &[AffineObject]) -> Result<RelativeDegreeResult> {
    if flats.is_empty() {
        return Err(Error::InvalidParameter(
            "relative degree needs at least one flat to avoid".into(),
        ));
    }
    for w in flats {
        if w.spec() != xs.spec() {
            return Err(Error::MixedFieldSpecs);
        }
        if w.ambient_dim() != xs.ambient_dim() {
            return Err(Error::AmbientMismatch {
                left: xs.ambient_dim(),
                right: w.ambient_dim(),
            });
        }
        if !xs.is_empty() && w.dim() <= xs.member_dim() {
            return Err(Error::InvalidParameter(format!(
                "avoided flats must have dimension above the members ({} vs {})",
                w.dim(),
                xs.member_dim()
            )));
        }
    }
    let spec = xs.spec();
    let n = xs.ambient_dim();
    let bound = relative_termination_degree(xs, flats);
    for d in 0..=bound {
        let constraints = constraint_matrix(xs, d)?;
        let basis = MonomialBasis::new(n, d);
        let kernel = constraints.kernel_basis();
        if kernel.is_empty() {
            continue;
        }
        // a flat whose vanishing subspace contains the whole kernel makes
        // this degree unusable
        let mut usable = true;
        for w in flats {
            let rows = flat_vanishing_constraints(w, d)?;
            let fm = Matrix::from_rows(spec, rows, basis.size())?;
            if crate::exactfield::matrix::solve_rank_compare(&constraints, &fm)? {
                usable = false;
                break;
            }
        }
        if !usable {
            continue;
        }
        let kernel_polys: Vec<MultiPoly> = kernel
            .iter()
            .map(|v| MultiPoly::from_coeff_vector(spec, &basis, v))
            .collect::<Result<_>>()?;
        if let Some(witness) = find_common_witness(spec, &kernel_polys, flats)? {
            debug_assert!(verify_vanishes(&witness, xs)?);
            return Ok(RelativeDegreeResult {
                degree: d,
                witness,
                avoided: flats.to_vec(),
            });
        }
    }
    Err(Error::NoSeparation { max_degree: bound })
}

fn nonzero_on(f: &MultiPoly, w: &AffineObject) -> Result<bool> {
    Ok(!f.restrict_to_flat(w)?.is_zero())
}

/// Builds one kernel polynomial that is nonzero on every flat. Flats are
/// processed in order; when the running witness dies on the next flat it is
/// repaired as v + c·u for a kernel vector u surviving that flat. At most one
/// c per processed flat is bad, so the sweep succeeds whenever the field has
/// more elements than there are flats.
fn find_common_witness(
    spec: FieldSpec,
    kernel: &[MultiPoly],
    flats: &[AffineObject],
) -> Result<Option<MultiPoly>> {
    let coeff_sweep: Vec<Scalar> = match spec {
        FieldSpec::Prime { p } => (1..p as i64).map(|c| Scalar::from_i64(c, spec)).collect(),
        FieldSpec::Rational => (1..=flats.len() as i64 + 1)
            .map(|c| Scalar::from_i64(c, spec))
            .collect(),
    };
    let mut witness: Option<MultiPoly> = None;
    let mut processed: Vec<&AffineObject> = Vec::new();
    for w in flats {
        if let Some(v) = &witness {
            if nonzero_on(v, w)? {
                processed.push(w);
                continue;
            }
        }
        let mut survivor = None;
        for u in kernel {
            if nonzero_on(u, w)? {
                survivor = Some(u);
                break;
            }
        }
        // a survivor exists, else the caller's rank comparison would have
        // rejected this degree
        let Some(u) = survivor else {
            return Ok(None);
        };
        match witness.take() {
            None => witness = Some(u.clone()),
            Some(v) => {
                let mut repaired = None;
                'sweep: for c in &coeff_sweep {
                    let cand = v.add(&u.scale(c));
                    if !nonzero_on(&cand, w)? {
                        continue;
                    }
                    for prev in &processed {
                        if !nonzero_on(&cand, prev)? {
                            continue 'sweep;
                        }
                    }
                    repaired = Some(cand);
                    break;
                }
                match repaired {
                    Some(cand) => witness = Some(cand),
                    None => return Ok(None),
                }
            }
        }
        processed.push(w);
    }
    Ok(witness)
}
