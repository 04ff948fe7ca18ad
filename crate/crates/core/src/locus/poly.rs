//! Multihomogeneous polynomials over a product of projective spaces.
//!
//! Variables are split into groups, one per measured group of a cut; group
//! `g` has `group_sizes[g]` coordinates. A monomial is stored as the flat
//! exponent vector over all variables, so the `BTreeMap` iterates terms in
//! lexicographic exponent order.

use crate::{CVector, Complex64, Error, Result};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::ops::{Add, Mul, Neg, Sub};

/// Float coefficients with magnitude at or below this are dropped.
pub const FLOAT_COEFF_CUTOFF: f64 = 1e-12;

/// Exact complex rational number `p/q + (r/s) i`.
pub type GaussianRational = Complex<BigRational>;

/// Builds `num/den` as an exact rational; `den` must be nonzero.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn gaussian_rational(re: BigRational, im: BigRational) -> GaussianRational {
    Complex::new(re, im)
}

/// Ring of polynomial coefficients.
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether the coefficient should be treated as zero.
    fn is_negligible(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    fn render(&self) -> String;
}

impl Coefficient for Complex64 {
    fn is_negligible(&self) -> bool {
        self.norm() <= FLOAT_COEFF_CUTOFF
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn render(&self) -> String {
        format!("({:.12e}{:+.12e}i)", self.re, self.im)
    }
}

impl Coefficient for GaussianRational {
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn render(&self) -> String {
        format!("({}+({})i)", self.re, self.im)
    }
}

/// A polynomial that is homogeneous of a fixed degree in each variable group.
#[derive(Clone, PartialEq)]
pub struct MultiHomogPoly<C> {
    group_sizes: Vec<usize>,
    multidegree: Vec<u32>,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Coefficient> MultiHomogPoly<C> {
    pub fn zero(group_sizes: Vec<usize>, multidegree: Vec<u32>) -> Self {
        assert_eq!(group_sizes.len(), multidegree.len());
        Self {
            group_sizes,
            multidegree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(group_sizes: Vec<usize>, c: C) -> Self {
        let n = group_sizes.len();
        let mut p = Self::zero(group_sizes, vec![0; n]);
        p.add_term(vec![0; p.num_vars()], c);
        p
    }

    /// Coordinate `index` of group `group`.
    pub fn variable(group_sizes: Vec<usize>, group: usize, index: usize) -> Self {
        assert!(index < group_sizes[group]);
        let mut degree = vec![0; group_sizes.len()];
        degree[group] = 1;
        let mut p = Self::zero(group_sizes, degree);
        let offset = p.offset(group);
        let mut exps = vec![0; p.num_vars()];
        exps[offset + index] = 1;
        p.add_term(exps, C::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, checking
    /// that all terms share one multidegree.
    pub fn from_terms<I>(group_sizes: Vec<usize>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let nvars: usize = group_sizes.iter().sum();
        let mut out: Option<Self> = None;
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::InvalidForm(format!(
                    "exponent vector of length {} for {nvars} variables",
                    exps.len()
                )));
            }
            let deg = degree_of(&group_sizes, &exps);
            let p = out.get_or_insert_with(|| Self::zero(group_sizes.clone(), deg.clone()));
            if p.multidegree != deg {
                return Err(Error::InvalidForm(format!(
                    "term of multidegree {deg:?} in a polynomial of multidegree {:?}",
                    p.multidegree
                )));
            }
            p.add_term(exps, c);
        }
        Ok(out.unwrap_or_else(|| {
            let n = group_sizes.len();
            Self::zero(group_sizes, vec![0; n])
        }))
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    pub fn multidegree(&self) -> &[u32] {
        &self.multidegree
    }

    pub fn num_vars(&self) -> usize {
        self.group_sizes.iter().sum()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, C> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Option<&C> {
        self.terms.get(exps)
    }

    fn offset(&self, group: usize) -> usize {
        self.group_sizes[..group].iter().sum()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                if !c.is_negligible() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_negligible() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.group_sizes, other.group_sizes, "polynomials over different variable groups");
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.group_sizes.clone(), self.multidegree.clone());
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Value at a point given as one coordinate block per group.
    pub fn eval(&self, blocks: &[CVector]) -> Complex64 {
        let flat = self.flatten(blocks);
        self.terms
            .iter()
            .map(|(e, c)| c.to_c64() * monomial_value(e, &flat))
            .sum()
    }

    /// Holomorphic gradient at a point, flattened over all variables.
    pub fn gradient(&self, blocks: &[CVector]) -> Vec<Complex64> {
        let flat = self.flatten(blocks);
        let mut grad = vec![Complex64::new(0.0, 0.0); flat.len()];
        for (e, c) in &self.terms {
            let c = c.to_c64();
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut reduced = e.clone();
                reduced[v] -= 1;
                grad[v] += c * Complex64::new(k as f64, 0.0) * monomial_value(&reduced, &flat);
            }
        }
        grad
    }

    fn flatten(&self, blocks: &[CVector]) -> Vec<Complex64> {
        assert_eq!(blocks.len(), self.group_sizes.len(), "block count mismatch");
        let mut flat = Vec::with_capacity(self.num_vars());
        for (b, &n) in blocks.iter().zip(&self.group_sizes) {
            assert_eq!(b.len(), n, "block size mismatch");
            flat.extend(b.iter().copied());
        }
        flat
    }

    /// Coefficient matrix `B` of a form of multidegree `(1, 1)`, so that
    /// `q(x, y) = x^T B y`.
    pub fn bilinear_matrix(&self) -> Result<Vec<Vec<C>>> {
        if self.group_sizes.len() != 2 || self.multidegree != [1, 1] {
            return Err(Error::InvalidForm(format!(
                "expected multidegree (1,1) in two groups, got {:?}",
                self.multidegree
            )));
        }
        let (m, n) = (self.group_sizes[0], self.group_sizes[1]);
        let mut b = vec![vec![C::zero(); n]; m];
        for (e, c) in &self.terms {
            let i = e[..m].iter().position(|&x| x == 1).expect("degree 1 in group 0");
            let j = e[m..].iter().position(|&x| x == 1).expect("degree 1 in group 1");
            b[i][j] = c.clone();
        }
        Ok(b)
    }

    pub fn to_complex(&self) -> MultiHomogPoly<Complex64> {
        let mut out = MultiHomogPoly::zero(self.group_sizes.clone(), self.multidegree.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.to_c64());
        }
        out
    }

    /// Variable name for flat index `v`: `r<group>_<coordinate>` (1-based group).
    pub fn variable_name(&self, v: usize) -> String {
        let mut rest = v;
        for (g, &n) in self.group_sizes.iter().enumerate() {
            if rest < n {
                return format!("r{}_{}", g + 1, rest);
            }
            rest -= n;
        }
        format!("r?_{v}")
    }
}

fn degree_of(group_sizes: &[usize], exps: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(group_sizes.len());
    let mut start = 0;
    for &n in group_sizes {
        out.push(exps[start..start + n].iter().sum());
        start += n;
    }
    out
}

fn monomial_value(exps: &[u32], flat: &[Complex64]) -> Complex64 {
    exps.iter()
        .zip(flat)
        .filter(|(&k, _)| k > 0)
        .map(|(&k, &x)| x.powu(k))
        .product()
}

impl<C: Coefficient> Add for &MultiHomogPoly<C> {
    type Output = MultiHomogPoly<C>;

    /// # Panics
    /// On mismatched variable groups, or on nonzero operands of different multidegree.
    fn add(self, other: &MultiHomogPoly<C>) -> MultiHomogPoly<C> {
        self.check_compatible(other);
        if self.is_zero() {
            return other.clone();
        }
        if !other.is_zero() {
            assert_eq!(self.multidegree, other.multidegree, "adding forms of different multidegree");
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<C: Coefficient> Neg for &MultiHomogPoly<C> {
    type Output = MultiHomogPoly<C>;

    fn neg(self) -> MultiHomogPoly<C> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }
}

impl<C: Coefficient> Sub for &MultiHomogPoly<C> {
    type Output = MultiHomogPoly<C>;

    fn sub(self, other: &MultiHomogPoly<C>) -> MultiHomogPoly<C> {
        self + &(-other)
    }
}

impl<C: Coefficient> Mul for &MultiHomogPoly<C> {
    type Output = MultiHomogPoly<C>;

    fn mul(self, other: &MultiHomogPoly<C>) -> MultiHomogPoly<C> {
        self.check_compatible(other);
        let degree = self
            .multidegree
            .iter()
            .zip(&other.multidegree)
            .map(|(a, b)| a + b)
            .collect();
        let mut out = MultiHomogPoly::zero(self.group_sizes.clone(), degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> fmt::Display for MultiHomogPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c.render())?;
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", self.variable_name(v))?,
                    _ => write!(f, "*{}^{k}", self.variable_name(v))?,
                }
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for MultiHomogPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiHomogPoly{:?}[{}]", self.multidegree, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type P = MultiHomogPoly<Complex64>;
    type Q = MultiHomogPoly<GaussianRational>;

    fn gr(n: i64) -> GaussianRational {
        Complex::new(rational(n, 1), rational(0, 1))
    }

    #[test]
    fn exact_product_of_linear_forms() {
        let g = vec![2, 2];
        let x0 = Q::variable(g.clone(), 0, 0);
        let x1 = Q::variable(g.clone(), 0, 1);
        let y0 = Q::variable(g.clone(), 1, 0);
        let y1 = Q::variable(g.clone(), 1, 1);
        let l1 = &x0 + &x1;
        let l2 = &y0 - &y1;
        let prod = &l1 * &l2;
        assert_eq!(prod.multidegree(), &[1, 1]);
        assert_eq!(prod.num_terms(), 4);
        assert_eq!(prod.coefficient(&[0, 1, 0, 1]), Some(&gr(-1)));
        // (x0 + x1)^2 - x0^2 - x1^2 = 2 x0 x1
        let sq = &(&(&l1 * &l1) - &(&x0 * &x0)) - &(&x1 * &x1);
        assert_eq!(sq.num_terms(), 1);
        assert_eq!(sq.coefficient(&[1, 1, 0, 0]), Some(&gr(2)));
        let zero = &prod - &prod;
        assert!(zero.is_zero());
    }

    #[test]
    fn from_terms_rejects_inhomogeneous() {
        let g = vec![2, 2];
        let r = P::from_terms(
            g.clone(),
            vec![
                (vec![1, 0, 1, 0], Complex64::new(1.0, 0.0)),
                (vec![2, 0, 0, 0], Complex64::new(1.0, 0.0)),
            ],
        );
        assert!(matches!(r, Err(Error::InvalidForm(_))));
        let ok = P::from_terms(g, vec![(vec![1, 0, 0, 1], Complex64::new(2.0, 0.0))]).unwrap();
        assert_eq!(ok.multidegree(), &[1, 1]);
    }

    #[test]
    fn float_cutoff_drops_tiny_terms() {
        let g = vec![2];
        let p = P::from_terms(
            g,
            vec![
                (vec![1, 0], Complex64::new(1.0, 0.0)),
                (vec![0, 1], Complex64::new(1e-14, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn display_is_sorted_and_named() {
        let g = vec![2, 2];
        let p = &Q::variable(g.clone(), 0, 0) * &Q::variable(g, 1, 1);
        assert_eq!(p.to_string(), "(1+(0)i)*r1_0*r2_1");
    }

    fn arb_c() -> impl Strategy<Value = Complex64> {
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
    }

    proptest! {
        #[test]
        fn eval_is_multiplicative(
            a in prop::collection::vec(arb_c(), 4),
            b in prop::collection::vec(arb_c(), 4),
            x in prop::collection::vec(arb_c(), 2),
            y in prop::collection::vec(arb_c(), 2),
        ) {
            let g = vec![2, 2];
            let form = |c: &[Complex64]| {
                P::from_terms(g.clone(), vec![
                    (vec![1, 0, 1, 0], c[0]), (vec![1, 0, 0, 1], c[1]),
                    (vec![0, 1, 1, 0], c[2]), (vec![0, 1, 0, 1], c[3]),
                ]).unwrap()
            };
            let (p, q) = (form(&a), form(&b));
            let blocks = vec![CVector::from_vec(x.clone()), CVector::from_vec(y.clone())];
            let lhs = (&p * &q).eval(&blocks);
            let rhs = p.eval(&blocks) * q.eval(&blocks);
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
            // Euler: sum_i x_i d/dx_i p = deg_x(p) * p
            let grad = (&p * &q).gradient(&blocks);
            let euler: Complex64 = grad[..2].iter().zip(&x).map(|(g, v)| g * v).sum();
            prop_assert!((euler - lhs * 2.0).norm() <= 1e-9 * (1.0 + lhs.norm()));
        }
    }
}
