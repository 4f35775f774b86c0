//! Alexander polynomials: determinants over the Laurent ring, normalization, and the
//! proper-factorizability decision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colmatrix::ColouringMatrix;
use crate::laurent::{LaurentError, LaurentPoly};
use crate::reduce::{ReducedForm, Relevant};

/// Factorizability is only decided up to this degree.
pub const MAX_FACTOR_DEGREE: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlexanderError {
    #[error("the determinant of the Alexander minor is zero")]
    ZeroDeterminant,
    #[error("reduced form is not triangular")]
    NotTriangular,
    #[error("degree {0} is above the supported bound {MAX_FACTOR_DEGREE}")]
    Unsupported(u32),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// A Laurent polynomial in normalized form: lowest exponent 0, positive constant term.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LaurentPoly", into = "LaurentPoly")]
pub struct AlexanderPolynomial(LaurentPoly);

impl AlexanderPolynomial {
    pub fn new(p: &LaurentPoly) -> Result<Self, AlexanderError> {
        Ok(Self(p.normalize_alexander()?))
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.0
    }

    pub fn into_poly(self) -> LaurentPoly {
        self.0
    }
}

impl TryFrom<LaurentPoly> for AlexanderPolynomial {
    type Error = AlexanderError;
    fn try_from(p: LaurentPoly) -> Result<Self, Self::Error> {
        Self::new(&p)
    }
}

impl From<AlexanderPolynomial> for LaurentPoly {
    fn from(a: AlexanderPolynomial) -> Self {
        a.0
    }
}

impl fmt::Display for AlexanderPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for AlexanderPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlexanderPolynomial({})", self.0)
    }
}

/// Determinant over `Z[m, m^-1]` by fraction-free (Bareiss) elimination.
///
/// Each row is first multiplied by a power of `m` so that no negative exponents remain;
/// the accumulated shift is undone at the end.
pub fn determinant(a: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = a.len();
    if n == 0 {
        return LaurentPoly::one();
    }
    let mut total_shift = 0i32;
    let mut w: Vec<Vec<LaurentPoly>> = a
        .iter()
        .map(|row| {
            let lo = row.iter().filter_map(|e| e.min_exp()).min().unwrap_or(0);
            if lo < 0 {
                total_shift += -lo;
                row.iter().map(|e| e.shift(-lo)).collect()
            } else {
                row.clone()
            }
        })
        .collect();
    let mut negate = false;
    let mut prev = LaurentPoly::one();
    for k in 0..n - 1 {
        if w[k][k].is_zero() {
            match (k + 1..n).find(|&r| !w[r][k].is_zero()) {
                Some(r) => {
                    w.swap(k, r);
                    negate = !negate;
                }
                None => return LaurentPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&w[i][j] * &w[k][k]) - &(&w[i][k] * &w[k][j]);
                w[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            w[i][k] = LaurentPoly::zero();
        }
        prev = w[k][k].clone();
    }
    let d = w[n - 1][n - 1].shift(-total_shift);
    if negate {
        -d
    } else {
        d
    }
}

/// Determinant by cofactor expansion along the first row. Exponential; meant for small
/// matrices and as a cross-check.
pub fn determinant_laplace(a: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = a.len();
    match n {
        0 => LaurentPoly::one(),
        1 => a[0][0].clone(),
        _ => {
            let mut acc = LaurentPoly::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<LaurentPoly>> = a[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = &a[0][j] * &determinant_laplace(&minor);
                if j % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            acc
        }
    }
}

pub fn alexander_from_matrix(a: &ColouringMatrix) -> Result<AlexanderPolynomial, AlexanderError> {
    let minor = a.alexander_minor();
    let det = determinant(&minor);
    if det.is_zero() {
        return Err(AlexanderError::ZeroDeterminant);
    }
    AlexanderPolynomial::new(&det)
}

pub fn alexander_from_triangular(r: &ReducedForm) -> Result<AlexanderPolynomial, AlexanderError> {
    let product = match &r.relevant {
        Relevant::TypeI { alpha } => alpha.clone(),
        Relevant::TypeII { alpha1, alpha2, .. } => alpha1 * alpha2,
        Relevant::GeneralTriangular { diagonal } => {
            diagonal.iter().fold(LaurentPoly::one(), |acc, d| &acc * d)
        }
        _ => return Err(AlexanderError::NotTriangular),
    };
    if product.is_zero() {
        return Err(AlexanderError::ZeroDeterminant);
    }
    AlexanderPolynomial::new(&product)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub properly_factorizable: bool,
    /// Two factors, neither `±1` nor `±p`, whose product is exactly the input.
    pub witness: Option<(LaurentPoly, LaurentPoly)>,
}

impl Factorization {
    fn irreducible() -> Self {
        Self { properly_factorizable: false, witness: None }
    }
}

/// Decides whether `p` is a product of two integer polynomials different from `±1` and
/// `±p` (up to units `±m^k`). Integer content counts as a factor. Uses Kronecker's method.
pub fn is_properly_factorizable(p: &LaurentPoly) -> Result<Factorization, AlexanderError> {
    let q = p.normalize_alexander()?;
    let d = q.span();
    if d > MAX_FACTOR_DEGREE {
        return Err(AlexanderError::Unsupported(d));
    }
    let factor = if d == 0 {
        smallest_proper_divisor(&q.coeff(0)).map(|a| LaurentPoly::monomial(a, 0))
    } else {
        let content = q.content();
        if !content.is_one() {
            Some(LaurentPoly::monomial(content, 0))
        } else if d == 1 {
            None
        } else {
            kronecker_factor(&q)
        }
    };
    Ok(match factor {
        None => Factorization::irreducible(),
        Some(f) => {
            let g = p.div_exact(&f).expect("factor divides the polynomial");
            Factorization { properly_factorizable: true, witness: Some((f, g)) }
        }
    })
}

fn smallest_proper_divisor(c: &BigInt) -> Option<BigInt> {
    let c = c.abs();
    let mut a = BigInt::from(2);
    while &a * &a <= c {
        if c.is_multiple_of(&a) {
            return Some(a);
        }
        a += 1;
    }
    None
}

/// Factorization of `v > 0` by trial division, `None` when too expensive.
fn factorize(v: u128) -> Option<Vec<(u128, u32)>> {
    const LIMIT: u128 = 20_000_000;
    let mut out = Vec::new();
    let mut rest = v;
    let mut p: u128 = 2;
    while p * p <= rest {
        if p > LIMIT {
            return None;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Some(out)
}

fn divisors(v: u128) -> Option<Vec<u128>> {
    let mut out = vec![1u128];
    for (p, e) in factorize(v)? {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pk = 1u128;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        out = next;
    }
    out.sort_unstable();
    Some(out)
}

/// A nontrivial factor of the primitive polynomial `q` (lowest exponent 0, degree >= 2).
fn kronecker_factor(q: &LaurentPoly) -> Option<LaurentPoly> {
    let d = q.span() as i64;
    let reach = d.max(4) + 2;
    let mut pool: Vec<(i64, Vec<u128>)> = Vec::new();
    for step in 0..=2 * reach {
        let x = if step % 2 == 0 { step / 2 } else { -(step + 1) / 2 };
        let v = q.eval_int(&BigInt::from(x)).expect("no negative exponents");
        if v.is_zero() {
            return Some(LaurentPoly::from_coeffs(&[-x, 1]));
        }
        if let Some(divs) = v.abs().to_u128().and_then(divisors) {
            pool.push((x, divs));
        }
    }
    pool.sort_by_key(|(x, divs)| (divs.len(), x.abs(), *x));
    let lead = q.coeff(q.max_exp().unwrap());
    let constant = q.coeff(0);

    let mut search = FactorSearch { q, lead: &lead, constant: &constant, xs: Vec::new(), values: Vec::new(), diffs: Vec::new() };
    for k in 1..=(d / 2) as usize {
        if pool.len() < k + 1 {
            break;
        }
        if let Some(f) = search.run(&pool[..k + 1]) {
            return Some(f);
        }
    }
    None
}

/// Depth-first search over the candidate values of a factor at the chosen points. The
/// Newton divided differences of an integer polynomial at integer points are integers,
/// which prunes most branches long before the last point.
struct FactorSearch<'a> {
    q: &'a LaurentPoly,
    lead: &'a BigInt,
    constant: &'a BigInt,
    xs: Vec<i64>,
    values: Vec<BigInt>,
    /// `diffs[i][j]` is the divided difference over points `i - j ..= i`.
    diffs: Vec<Vec<BigInt>>,
}

impl FactorSearch<'_> {
    fn run(&mut self, points: &[(i64, Vec<u128>)]) -> Option<LaurentPoly> {
        self.xs.clear();
        self.values.clear();
        self.diffs.clear();
        self.descend(points)
    }

    fn descend(&mut self, points: &[(i64, Vec<u128>)]) -> Option<LaurentPoly> {
        let i = self.xs.len();
        let k = points.len() - 1;
        let (x, divs) = &points[i];
        // the factor is only determined up to sign, so fix the sign at the first point
        let signs: &[i8] = if i == 0 { &[1] } else { &[1, -1] };
        for &d in divs {
            for &sign in signs {
                let v = if sign > 0 { BigInt::from(d) } else { -BigInt::from(d) };
                let Some(row) = self.extend(*x, &v) else { continue };
                if i == k {
                    let top = &row[k];
                    if top.is_zero() || !self.lead.is_multiple_of(top) {
                        continue;
                    }
                }
                self.xs.push(*x);
                self.values.push(v);
                self.diffs.push(row);
                let found = if i == k { self.leaf(k) } else { self.descend(points) };
                self.xs.pop();
                self.values.pop();
                self.diffs.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }

    /// Divided differences ending at the new point, if they are all integers.
    fn extend(&self, x: i64, v: &BigInt) -> Option<Vec<BigInt>> {
        let i = self.xs.len();
        let mut row = Vec::with_capacity(i + 1);
        row.push(v.clone());
        for j in 1..=i {
            let num = &row[j - 1] - &self.diffs[i - 1][j - 1];
            let den = BigInt::from(x - self.xs[i - j]);
            let (quot, rem) = num.div_rem(&den);
            if !rem.is_zero() {
                return None;
            }
            row.push(quot);
        }
        Some(row)
    }

    fn leaf(&self, k: usize) -> Option<LaurentPoly> {
        let f = interpolate(&self.xs, &self.values)?;
        let ok = f.span() as usize == k
            && f.min_exp() == Some(0)
            && self.constant.is_multiple_of(&f.coeff(0))
            && self.q.div_exact(&f).is_some();
        ok.then_some(f)
    }
}

/// The unique polynomial of degree < xs.len() through the points, if it has integer
/// coefficients.
fn interpolate(xs: &[i64], ys: &[BigInt]) -> Option<LaurentPoly> {
    let n = xs.len();
    // Newton divided differences
    let mut coef: Vec<BigRational> = ys.iter().map(|y| BigRational::from_integer(y.clone())).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &coef[i] - &coef[i - 1];
            let den = BigInt::from(xs[i] - xs[i - j]);
            coef[i] = num / BigRational::from_integer(den);
        }
    }
    // expand the Newton form into the monomial basis
    let mut poly: Vec<BigRational> = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut next = vec![BigRational::zero(); n];
        for (e, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if e + 1 < n {
                next[e + 1] += c.clone();
            }
            next[e] -= c * BigRational::from_integer(BigInt::from(xs[i]));
        }
        next[0] += coef[i].clone();
        poly = next;
    }
    let mut ints = Vec::with_capacity(n);
    for c in poly {
        if !c.is_integer() {
            return None;
        }
        ints.push(c.to_integer());
    }
    Some(LaurentPoly::from_terms(ints.into_iter().enumerate().map(|(e, c)| (e as i32, c))))
}
