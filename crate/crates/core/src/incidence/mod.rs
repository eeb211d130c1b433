//! Exact incidence accounting: degree of incidence, rich points, k-freeness,
//! and Bezout checks.

pub mod roots;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::{intersect_lines, AffineObject, VarietySet};
use crate::mpoly::MultiPoly;

/// I(S, T) with both aggregations: per S-member container counts and per
/// T-member contained degree. The two sum to the same total.
#[derive(Debug, Clone)]
pub struct IncidenceCount {
    pub total: u64,
    /// For each member of S (in canonical order): how many members of T
    /// contain it.
    pub container_counts: Vec<u64>,
    /// For each member of T (in canonical order): the total degree of the
    /// S-members it contains.
    pub contained_degrees: Vec<u64>,
}

/// Degree of incidence I(S, T) = Σ_s deg(s) · #{t : s ⊆ t}, by exhaustive
/// exact containment checks.
pub fn incidence_degree(s: &VarietySet, t: &VarietySet) -> Result<IncidenceCount> {
    if !s.is_empty() && !t.is_empty() && t.member_dim() != s.member_dim() + 1 {
        return Err(Error::DimensionMismatch {
            expected: s.member_dim() + 1,
            got: t.member_dim(),
        });
    }
    let mut container_counts = vec![0u64; s.len()];
    let mut contained_degrees = vec![0u64; t.len()];
    for (i, sm) in s.members().iter().enumerate() {
        for (j, tm) in t.members().iter().enumerate() {
            if tm.contains(sm)? {
                container_counts[i] += 1;
                contained_degrees[j] += sm.degree();
            }
        }
    }
    let total: u64 = s
        .members()
        .iter()
        .zip(&container_counts)
        .map(|(sm, &c)| sm.degree() * c)
        .sum();
    debug_assert_eq!(total, contained_degrees.iter().sum::<u64>());
    Ok(IncidenceCount {
        total,
        container_counts,
        contained_degrees,
    })
}

/// The points lying on at least `r` members of T.
#[derive(Debug, Clone)]
pub struct RichSet {
    pub r: u32,
    pub points: VarietySet,
    /// Line multiplicity per reported point, aligned with `points.members()`.
    pub multiplicities: Vec<u32>,
}

/// P_r(T) for a deduplicated set of lines: every pairwise intersection point
/// is bucketed and kept when at least `r` distinct lines pass through it.
pub fn rich_points(t: &VarietySet, r: u32) -> Result<RichSet> {
    if r < 2 {
        return Err(Error::InvalidParameter(
            "rich threshold must be >= 2".into(),
        ));
    }
    if t.member_dim() != 1 {
        return Err(Error::UnsupportedMemberKind(
            "rich points are computed for line families".into(),
        ));
    }
    let members = t.members();
    let mut through: BTreeMap<AffineObject, Vec<usize>> = BTreeMap::new();
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            if let Some(pt) = intersect_lines(&members[i], &members[j])? {
                let bucket = through.entry(pt).or_default();
                for idx in [i, j] {
                    if !bucket.contains(&idx) {
                        bucket.push(idx);
                    }
                }
            }
        }
    }
    let mut points = Vec::new();
    let mut multiplicities = Vec::new();
    for (pt, lines) in &through {
        if lines.len() >= r as usize {
            points.push(pt.clone());
            multiplicities.push(lines.len() as u32);
        }
    }
    let points = if points.is_empty() {
        VarietySet::empty(t.spec(), t.ambient_dim(), 0)
    } else {
        VarietySet::from_members(points)?
    };
    Ok(RichSet {
        r,
        points,
        multiplicities,
    })
}

/// Witness of a k-freeness violation: two members of T sharing at least k
/// points of S.
#[derive(Debug, Clone)]
pub struct KFreeViolation {
    pub t_pair: (AffineObject, AffineObject),
    pub shared: Vec<AffineObject>,
}

#[derive(Debug, Clone)]
pub struct KFreeness {
    pub k: u32,
    pub free: bool,
    pub violation: Option<KFreeViolation>,
}

/// Checks that every k-subset of S lies in at most one member of T, by
/// counting shared points over all pairs of T-members.
pub fn k_free_check(s: &VarietySet, t: &VarietySet, k: u32) -> Result<KFreeness> {
    if k < 2 {
        return Err(Error::InvalidParameter("k-freeness needs k >= 2".into()));
    }
    if s.member_dim() != 0 {
        return Err(Error::UnsupportedMemberKind(
            "k-freeness is checked for point sets S".into(),
        ));
    }
    // which S-points lie in each T-member
    let mut inside: Vec<Vec<usize>> = Vec::with_capacity(t.len());
    for tm in t.members() {
        let mut v = Vec::new();
        for (i, sm) in s.members().iter().enumerate() {
            if tm.contains(sm)? {
                v.push(i);
            }
        }
        inside.push(v);
    }
    for i in 0..t.len() {
        for j in (i + 1)..t.len() {
            let shared: Vec<usize> = inside[i]
                .iter()
                .filter(|idx| inside[j].contains(idx))
                .copied()
                .collect();
            if shared.len() >= k as usize {
                return Ok(KFreeness {
                    k,
                    free: false,
                    violation: Some(KFreeViolation {
                        t_pair: (t.members()[i].clone(), t.members()[j].clone()),
                        shared: shared[..k as usize]
                            .iter()
                            .map(|&idx| s.members()[idx].clone())
                            .collect(),
                    }),
                });
            }
        }
    }
    Ok(KFreeness {
        k,
        free: true,
        violation: None,
    })
}

/// Outcome of intersecting a line with the hypersurface Z(f).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BezoutCheck {
    /// The restriction of f to the line is the zero polynomial.
    Contained,
    /// Number of base-field points of Z(f) on the line; at most deg f.
    Count(usize),
}

/// A line not inside Z(f) meets it in at most deg f points. Containment is
/// decided symbolically; the count enumerates distinct base-field roots of
/// the restriction.
pub fn bezout_line_check(line: &AffineObject, f: &MultiPoly) -> Result<BezoutCheck> {
    let restricted = f.restrict_to_line(line)?;
    if restricted.is_zero() {
        return Ok(BezoutCheck::Contained);
    }
    Ok(BezoutCheck::Count(roots::distinct_root_count(&restricted)))
}

/// The k-free incidence bound 2·|S|·|T|^(1-1/k) + (k-1)·|T|, evaluated in
/// floating point for reporting; callers compare exact integer counts
/// against it with a documented 1e-9 margin on the bound side.
pub fn trivial_bound(s_count: u64, t_count: u64, k: u32) -> f64 {
    assert!(k >= 2, "trivial bound needs k >= 2");
    let s = s_count as f64;
    let t = t_count as f64;
    2.0 * s * t.powf(1.0 - 1.0 / k as f64) + (k as f64 - 1.0) * t
}
