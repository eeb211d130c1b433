//! Sparse multivariate polynomials with exact coefficients: evaluation,
//! total degree, and symbolic restriction to lines and flats.
//!
//! Containment of a line or flat in Z(f) is always decided symbolically by
//! substituting the parametrization, never by point sampling, so the answer
//! does not depend on the field size.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Scalar};
use crate::geom::AffineObject;

/// An exponent vector ordered graded-lexicographically: first by total
/// degree, then by the exponent tuple. This order is fixed globally so
/// constraint-matrix columns and serialized term order are reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of `nvars` variables with degree sum at most
/// `max_degree`, in the canonical graded-lex order. Its size is the binomial
/// coefficient C(max_degree + nvars, nvars).
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    pub nvars: usize,
    pub max_degree: usize,
    pub monomials: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, max_degree: usize) -> Self {
        let mut monomials = Vec::new();
        let mut current = vec![0u32; nvars];
        enumerate_rec(nvars, max_degree as u32, 0, &mut current, &mut monomials);
        monomials.sort();
        let basis = MonomialBasis {
            nvars,
            max_degree,
            monomials,
        };
        debug_assert_eq!(basis.monomials.len() as u128, basis.expected_size());
        basis
    }

    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    fn expected_size(&self) -> u128 {
        binomial(self.max_degree + self.nvars, self.nvars)
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.monomials.binary_search(m).ok()
    }
}

fn enumerate_rec(
    nvars: usize,
    budget: u32,
    var: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if var == nvars {
        out.push(Monomial(current.clone()));
        return;
    }
    for e in 0..=budget {
        current[var] = e;
        enumerate_rec(nvars, budget - e, var + 1, current, out);
    }
    current[var] = 0;
}

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// A sparse multivariate polynomial. No zero coefficients are stored; the
/// zero polynomial has an empty term map and no total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    spec: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(spec: FieldSpec, nvars: usize) -> Self {
        MultiPoly {
            spec,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(spec: FieldSpec, nvars: usize, c: Scalar) -> Self {
        let mut p = MultiPoly::zero(spec, nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    /// The variable x_i as a polynomial.
    pub fn variable(spec: FieldSpec, nvars: usize, i: usize) -> Self {
        let mut exp = vec![0u32; nvars];
        exp[i] = 1;
        MultiPoly::from_terms(spec, nvars, vec![(Monomial(exp), Scalar::one(spec))]).unwrap()
    }

    pub fn from_terms(
        spec: FieldSpec,
        nvars: usize,
        terms: Vec<(Monomial, Scalar)>,
    ) -> Result<Self> {
        let mut p = MultiPoly::zero(spec, nvars);
        for (m, c) in terms {
            if m.0.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: m.0.len(),
                });
            }
            if c.spec() != spec {
                return Err(Error::MixedFieldSpecs);
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max exponent sum; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree() as usize).max()
    }

    pub fn add(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.spec, self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, rhs: &MultiPoly) -> MultiPoly {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        let mut out = MultiPoly::zero(self.spec, self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, coef) in &self.terms {
            out.terms.insert(m.clone(), coef.mul(c));
        }
        out
    }

    pub fn mul(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MultiPoly::zero(self.spec, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let exp: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(exp), ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.spec, self.nvars, Scalar::one(self.spec));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact value at a point.
    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars, "evaluation point dimension");
        let mut acc = Scalar::zero(self.spec);
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    term = term.mul(&x.pow(e));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Substitutes one linear polynomial per variable and expands. The
    /// substitutes must all live in the same target variable count.
    pub fn substitute(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.nvars);
        let target_vars = images.first().map_or(0, |p| p.nvars);
        // cache powers per variable up to its max exponent
        let max_exp: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .zip(&max_exp)
            .map(|(img, &top)| {
                let mut v = vec![MultiPoly::constant(
                    self.spec,
                    target_vars,
                    Scalar::one(self.spec),
                )];
                for e in 1..=top {
                    let next = v[(e - 1) as usize].mul(img);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = MultiPoly::zero(self.spec, target_vars);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(self.spec, target_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[i][e as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitutes the line's parametrization `base + t * dir` and collects
    /// powers of t. Zero result iff the line lies in Z(f), over any field.
    pub fn restrict_to_line(&self, line: &AffineObject) -> Result<MultiPoly> {
        let dir = line
            .direction()
            .ok_or_else(|| Error::UnsupportedMemberKind("restrict_to_line needs a line".into()))?;
        self.check_object(line)?;
        let images: Vec<MultiPoly> = line
            .base()
            .iter()
            .zip(dir)
            .map(|(b, d)| {
                MultiPoly::from_terms(
                    self.spec,
                    1,
                    vec![
                        (Monomial(vec![0]), b.clone()),
                        (Monomial(vec![1]), d.clone()),
                    ],
                )
                .expect("univariate linear image")
            })
            .collect();
        Ok(self.substitute(&images))
    }

    /// Substitutes the flat's affine parametrization; the result lives in
    /// dim(w) parameters and is zero iff f vanishes identically on w.
    pub fn restrict_to_flat(&self, w: &AffineObject) -> Result<MultiPoly> {
        self.check_object(w)?;
        let m = w.dim();
        let images: Vec<MultiPoly> = (0..self.nvars)
            .map(|i| {
                let mut terms = vec![(Monomial(vec![0; m]), w.base()[i].clone())];
                for (j, bv) in w.basis().iter().enumerate() {
                    let mut exp = vec![0u32; m];
                    exp[j] = 1;
                    terms.push((Monomial(exp), bv[i].clone()));
                }
                MultiPoly::from_terms(self.spec, m, terms).expect("linear image")
            })
            .collect();
        Ok(self.substitute(&images))
    }

    fn check_object(&self, obj: &AffineObject) -> Result<()> {
        if obj.spec() != self.spec {
            return Err(Error::MixedFieldSpecs);
        }
        if obj.ambient_dim() != self.nvars {
            return Err(Error::AmbientMismatch {
                left: self.nvars,
                right: obj.ambient_dim(),
            });
        }
        Ok(())
    }

    /// Coefficient of t^k in a univariate polynomial.
    pub fn univariate_coeff(&self, k: u32) -> Scalar {
        assert_eq!(self.nvars, 1);
        self.terms
            .get(&Monomial(vec![k]))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.spec))
    }

    /// Dense coefficient vector over a monomial basis; errors if a term
    /// falls outside the basis.
    pub fn coeff_vector(&self, basis: &MonomialBasis) -> Result<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(self.spec); basis.size()];
        for (m, c) in &self.terms {
            let idx = basis.index_of(m).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "monomial of degree {} outside basis of max degree {}",
                    m.degree(),
                    basis.max_degree
                ))
            })?;
            v[idx] = c.clone();
        }
        Ok(v)
    }

    pub fn from_coeff_vector(
        spec: FieldSpec,
        basis: &MonomialBasis,
        coeffs: &[Scalar],
    ) -> Result<Self> {
        if coeffs.len() != basis.size() {
            return Err(Error::DimensionMismatch {
                expected: basis.size(),
                got: coeffs.len(),
            });
        }
        MultiPoly::from_terms(
            spec,
            basis.nvars,
            basis
                .monomials
                .iter()
                .zip(coeffs)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        )
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.degree() == 0 {
                write!(f, "{c}")?;
                continue;
            }
            let one = Scalar::one(self.spec);
            if *c != one {
                write!(f, "{c}*")?;
            }
            let mut first_var = true;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "*")?;
                }
                first_var = false;
                if e == 1 {
                    write!(f, "x{i}")?;
                } else {
                    write!(f, "x{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// One row per coefficient of the restriction: a degree-D polynomial lies in
/// the kernel of these rows iff its restriction to the line is the zero
/// polynomial. Exactly D+1 rows over the MonomialBasis(n, D) columns.
pub fn line_vanishing_constraints(line: &AffineObject, d: usize) -> Result<Vec<Vec<Scalar>>> {
    if line.dim() != 1 {
        return Err(Error::UnsupportedMemberKind(format!(
            "line constraints need a line, got a {}",
            line.kind().as_str()
        )));
    }
    flat_vanishing_constraints(line, d)
}

/// One row per point: the monomials evaluated at the point.
pub fn point_vanishing_row(point: &AffineObject, d: usize) -> Result<Vec<Scalar>> {
    if point.dim() != 0 {
        return Err(Error::UnsupportedMemberKind(format!(
            "point row needs a point, got a {}",
            point.kind().as_str()
        )));
    }
    let spec = point.spec();
    let basis = MonomialBasis::new(point.ambient_dim(), d);
    Ok(basis
        .monomials
        .iter()
        .map(|m| {
            let mut acc = Scalar::one(spec);
            for (x, &e) in point.base().iter().zip(&m.0) {
                if e > 0 {
                    acc = acc.mul(&x.pow(e));
                }
            }
            acc
        })
        .collect())
}

/// Rows whose kernel is exactly the degree-≤D polynomials vanishing
/// identically on the flat: one row per monomial of the restriction in
/// dim(w) parameters, C(D + dim(w), dim(w)) rows in total.
pub fn flat_vanishing_constraints(w: &AffineObject, d: usize) -> Result<Vec<Vec<Scalar>>> {
    let spec = w.spec();
    let n = w.ambient_dim();
    let ambient_basis = MonomialBasis::new(n, d);
    let param_basis = MonomialBasis::new(w.dim(), d);
    let mut rows = vec![vec![Scalar::zero(spec); ambient_basis.size()]; param_basis.size()];
    for (col, mono) in ambient_basis.monomials.iter().enumerate() {
        let poly = MultiPoly::from_terms(spec, n, vec![(mono.clone(), Scalar::one(spec))])?;
        let restricted = poly.restrict_to_flat(w)?;
        for (m, c) in restricted.terms() {
            let row = param_basis
                .index_of(m)
                .expect("restriction degree bounded by d");
            rows[row][col] = c.clone();
        }
    }
    Ok(rows)
}
