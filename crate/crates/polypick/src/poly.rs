//! Sparse multivariate polynomials with complex coefficients.
//!
//! Coefficients are indexed by exponent multi-indices; zero coefficients are
//! never stored. The reflection `q ↦ q̃`, with `q̃(z) = z^d · conj(q(1/conj(z)))`,
//! is the workhorse behind rational inner functions: it conjugate-reverses the
//! coefficient array at a target degree `d`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Exponent tuple of a monomial, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    /// `exponents` must be non-empty (ambient dimension n >= 1).
    pub fn new(exponents: Vec<u32>) -> Self {
        assert!(!exponents.is_empty(), "multi-index needs dimension >= 1");
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Entrywise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Entrywise subtraction; `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Entrywise maximum.
    pub fn entrywise_max(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse polynomial in `dim` complex variables.
///
/// Terms are kept in a `BTreeMap`, so iteration order is lexicographic in the
/// exponent tuple and serialization is canonical without extra sorting.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        MultiPoly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Self::zero(dim);
        p.insert(MultiIndex::zero(dim), c);
        p
    }

    /// The coordinate polynomial `z_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut exp = vec![0; dim];
        exp[i] = 1;
        Self::monomial(MultiIndex::new(exp), C64::new(1.0, 0.0))
    }

    pub fn monomial(index: MultiIndex, coeff: C64) -> Self {
        let mut p = Self::zero(index.dim());
        p.insert(index, coeff);
        p
    }

    /// Build from `(exponents, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        let mut p = Self::zero(dim);
        for (exp, c) in terms {
            if exp.len() != dim {
                return Err(Error::DimMismatch { expected: dim, got: exp.len() });
            }
            let key = MultiIndex::new(exp);
            let entry = p.terms.entry(key).or_insert(C64::new(0.0, 0.0));
            *entry += c;
        }
        p.prune();
        Ok(p)
    }

    fn insert(&mut self, index: MultiIndex, coeff: C64) {
        debug_assert_eq!(index.dim(), self.dim);
        if coeff != C64::new(0.0, 0.0) {
            self.terms.insert(index, coeff);
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != C64::new(0.0, 0.0));
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Lexicographically ordered term iterator.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, index: &MultiIndex) -> C64 {
        self.terms.get(index).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Sum of coefficient moduli; bounds `|p|` on the closed polydisc.
    pub fn coeff_mass(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// `Σ |c_α| · |α|`; bounds the gradient of `p` on the closed polydisc.
    pub fn gradient_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c.norm() * f64::from(a.total_degree()))
            .sum()
    }

    /// Evaluate at a point of ℂⁿ.
    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        if z.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: z.len() });
        }
        let mut acc = C64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut m = *c;
            for (zi, &e) in z.iter().zip(alpha.exponents()) {
                if e > 0 {
                    m *= zi.powu(e);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Per-variable maximum exponent over stored terms.
    pub fn ndeg(&self) -> Result<MultiIndex> {
        let mut it = self.terms.keys();
        let first = it.next().ok_or(Error::ZeroPolynomial)?;
        Ok(it.fold(first.clone(), |acc, k| acc.entrywise_max(k)))
    }

    /// Reflection at degree `d`: `Σ conj(c_α) z^{d−α}`.
    ///
    /// Requires `d >= ndeg(p)` entrywise. On the n-torus `|p̃| = |p|`.
    pub fn reflect(&self, d: &MultiIndex) -> Result<MultiPoly> {
        if d.dim() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: d.dim() });
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let ndeg = self.ndeg()?;
        if !ndeg.le(d) {
            return Err(Error::ReflectionDegree {
                needed: ndeg.exponents().to_vec(),
                requested: d.exponents().to_vec(),
            });
        }
        let mut out = MultiPoly::zero(self.dim);
        for (alpha, c) in &self.terms {
            let key = d.checked_sub(alpha).expect("degree bound checked");
            out.insert(key, c.conj());
        }
        Ok(out)
    }

    /// Reflection at the polynomial's own degree.
    pub fn reflect_auto(&self) -> Result<MultiPoly> {
        self.reflect(&self.ndeg()?)
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &MultiPoly, sign: f64) -> Result<MultiPoly> {
        if other.dim != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: other.dim });
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            let entry = out.terms.entry(k.clone()).or_insert(C64::new(0.0, 0.0));
            *entry += c * sign;
        }
        out.prune();
        Ok(out)
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        if other.dim != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: other.dim });
        }
        let mut out = MultiPoly::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let key = a.add(b);
                let entry = out.terms.entry(key).or_insert(C64::new(0.0, 0.0));
                *entry += ca * cb;
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        if c == C64::new(0.0, 0.0) {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), v * c);
        }
        out
    }

    /// Multiply by the monomial `z^shift`.
    pub fn shifted(&self, shift: &MultiIndex) -> MultiPoly {
        assert_eq!(shift.dim(), self.dim);
        let mut out = MultiPoly::zero(self.dim);
        for (k, v) in &self.terms {
            out.terms.insert(k.add(shift), *v);
        }
        out
    }

    /// True iff the maximum coefficient difference is at most `tol`.
    /// Polynomials of different dimension are never approximately equal.
    pub fn approx_eq(&self, other: &MultiPoly, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        self.max_coeff_diff(other) <= tol
    }

    fn max_coeff_diff(&self, other: &MultiPoly) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, c) in &self.terms {
            worst = worst.max((c - other.coeff(k)).norm());
        }
        for (k, c) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// p = z^3 - w^2, the Neil parabola's defining polynomial.
    pub(crate) fn neil_poly() -> MultiPoly {
        MultiPoly::from_terms(2, vec![(vec![3, 0], c(1.0, 0.0)), (vec![0, 2], c(-1.0, 0.0))])
            .unwrap()
    }

    #[test]
    fn eval_on_and_off_the_curve() {
        let p = neil_poly();
        let on = p.eval(&[c(0.25, 0.0), c(0.125, 0.0)]).unwrap();
        assert_eq!(on, c(0.0, 0.0)); // (1/4)^3 == (1/8)^2 exactly in binary
        let off = p.eval(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!((off - c(-0.25, 0.0)).norm() < 1e-15);
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        assert_eq!(one.eval(&[c(0.3, 0.1), c(-0.2, 0.4)]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let p = neil_poly();
        assert!(matches!(p.eval(&[c(0.1, 0.0)]), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn ndeg_examples() {
        assert_eq!(neil_poly().ndeg().unwrap(), MultiIndex::new(vec![3, 2]));
        let five = MultiPoly::constant(2, c(5.0, 0.0));
        assert_eq!(five.ndeg().unwrap(), MultiIndex::new(vec![0, 0]));
        let m = MultiPoly::monomial(MultiIndex::new(vec![3, 2]), c(1.0, 0.0));
        assert_eq!(m.ndeg().unwrap(), MultiIndex::new(vec![3, 2]));
        assert!(matches!(MultiPoly::zero(2).ndeg(), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn reflect_examples() {
        let p = neil_poly();
        let r = p.reflect(&MultiIndex::new(vec![3, 2])).unwrap();
        let expect =
            MultiPoly::from_terms(2, vec![(vec![0, 2], c(1.0, 0.0)), (vec![3, 0], c(-1.0, 0.0))])
                .unwrap();
        assert_eq!(r, expect); // w^2 - z^3

        let one = MultiPoly::constant(2, c(1.0, 0.0));
        assert_eq!(one.reflect(&MultiIndex::zero(2)).unwrap(), one);

        // 2 - z reflects to 2z - 1
        let p1 = MultiPoly::from_terms(1, vec![(vec![0], c(2.0, 0.0)), (vec![1], c(-1.0, 0.0))])
            .unwrap();
        let r1 = p1.reflect(&MultiIndex::new(vec![1])).unwrap();
        let e1 = MultiPoly::from_terms(1, vec![(vec![1], c(2.0, 0.0)), (vec![0], c(-1.0, 0.0))])
            .unwrap();
        assert_eq!(r1, e1);
    }

    #[test]
    fn reflect_rejects_low_degree() {
        let p = neil_poly();
        assert!(matches!(
            p.reflect(&MultiIndex::new(vec![2, 2])),
            Err(Error::ReflectionDegree { .. })
        ));
    }

    #[test]
    fn arithmetic_examples() {
        let p = neil_poly();
        let r = p.reflect_auto().unwrap();
        assert!(p.add(&r).unwrap().is_zero());

        let one = MultiPoly::constant(2, c(1.0, 0.0));
        let den = one.add(&p.scale(c(0.1, 0.0))).unwrap();
        assert_eq!(den.num_terms(), 3);
        assert_eq!(den.coeff(&MultiIndex::zero(2)), c(1.0, 0.0));
        assert_eq!(den.coeff(&MultiIndex::new(vec![3, 0])), c(0.1, 0.0));
        assert_eq!(den.coeff(&MultiIndex::new(vec![0, 2])), c(-0.1, 0.0));

        let z = MultiPoly::variable(2, 0);
        let w = MultiPoly::variable(2, 1);
        let zw = z.mul(&w).unwrap();
        assert_eq!(zw, MultiPoly::monomial(MultiIndex::new(vec![1, 1]), c(1.0, 0.0)));
    }

    #[test]
    fn approx_eq_examples() {
        let p = neil_poly();
        let r2 = p
            .reflect(&MultiIndex::new(vec![3, 2]))
            .unwrap()
            .reflect(&MultiIndex::new(vec![3, 2]))
            .unwrap();
        assert!(r2.approx_eq(&p, 0.0));

        let jitter = p
            .add(&MultiPoly::monomial(MultiIndex::new(vec![1, 0]), c(1e-12, 0.0)))
            .unwrap();
        assert!(jitter.approx_eq(&p, 1e-10));
        assert!(!p.reflect_auto().unwrap().approx_eq(&p, 1e-10));
    }

    // Random sparse polynomial with bounded dimension, terms and exponents.
    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        (1usize..=3).prop_flat_map(|dim| {
            let term = (
                proptest::collection::vec(0u32..=4, dim),
                -2.0f64..2.0,
                -2.0f64..2.0,
            );
            proptest::collection::vec(term, 1..=6).prop_map(move |terms| {
                MultiPoly::from_terms(
                    dim,
                    terms.into_iter().map(|(e, re, im)| (e, C64::new(re, im))),
                )
                .unwrap()
            })
        })
    }

    fn torus_point(dim: usize, seed: u64) -> Vec<C64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..dim)
            .map(|_| {
                let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                C64::new(th.cos(), th.sin())
            })
            .collect()
    }

    proptest! {
        #[test]
        fn reflection_is_an_involution(p in arb_poly()) {
            let origin = vec![C64::new(0.0, 0.0); p.dim()];
            prop_assume!(!p.is_zero());
            prop_assume!(p.eval(&origin).unwrap() != C64::new(0.0, 0.0));
            let d = p.ndeg().unwrap();
            let back = p.reflect(&d).unwrap().reflect(&d).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn reflection_preserves_torus_modulus(p in arb_poly(), seed in 0u64..1000) {
            prop_assume!(!p.is_zero());
            let r = p.reflect_auto().unwrap();
            for k in 0..100 {
                let z = torus_point(p.dim(), seed.wrapping_mul(101).wrapping_add(k));
                let pv = p.eval(&z).unwrap().norm();
                let rv = r.eval(&z).unwrap().norm();
                prop_assert!((pv - rv).abs() <= 1e-12 * (1.0 + pv));
            }
        }

        #[test]
        fn degree_is_additive_under_product(p in arb_poly(), q in arb_poly()) {
            prop_assume!(p.dim() == q.dim());
            prop_assume!(!p.is_zero() && !q.is_zero());
            let prod = p.mul(&q).unwrap();
            prop_assume!(!prod.is_zero()); // float cancellation to exact zero is not expected
            prop_assert_eq!(
                prod.ndeg().unwrap(),
                p.ndeg().unwrap().add(&q.ndeg().unwrap())
            );
        }

        #[test]
        fn eval_is_linear(p in arb_poly(), q in arb_poly(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            prop_assume!(p.dim() == q.dim());
            let a = C64::new(re, im);
            let z = torus_point(p.dim(), 7).iter().map(|u| u * 0.6).collect::<Vec<_>>();
            let lhs = p.scale(a).add(&q).unwrap().eval(&z).unwrap();
            let rhs = a * p.eval(&z).unwrap() + q.eval(&z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
