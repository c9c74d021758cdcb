//! Rational inner functions in Rudin normal form and their perturbation
//! families.
//!
//! A rational inner function on the polydisc is `F = τ · z^m · q̃ / q` with
//! `|τ| = 1`, `q(0) = 1` and `q` zero-free on 𝔻ⁿ; it is *regular* when `q` is
//! zero-free on the closed polydisc. Any function of that shape is inner, so
//! innerness of a perturbed function reduces to a nonvanishing check on its
//! denominator. Perturbations add multiples of polynomials that vanish on a
//! curve, leaving the function unchanged there and moving it everywhere else.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{C64, MultiIndex, MultiPoly};

/// Below this modulus a denominator value counts as a pole.
pub const POLE_TOL: f64 = 1e-14;
/// Torus samples with `|q|` below this are skipped in boundary checks.
const BOUNDARY_SKIP_TOL: f64 = 1e-10;
/// Grid used when screening perturbed denominators for zeros.
const SCREEN_GRID: usize = 16;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Rational inner function `τ · z^m · q̃ / q` with `q(0) = 1`.
#[derive(Clone, Debug)]
pub struct RationalInner {
    tau: C64,
    m: MultiIndex,
    q: MultiPoly,
    qtilde: MultiPoly,
}

impl RationalInner {
    /// Build the Rudin form from a unimodular `tau`, a monomial exponent and a
    /// denominator polynomial.
    ///
    /// `q` is rescaled so that `q(0) = 1`; the rescaling phase is folded into
    /// `tau` so the represented function is unchanged. `|tau|` must be within
    /// `1e-9` of 1 and is renormalized to exact modulus 1.
    pub fn new(tau: C64, m: MultiIndex, q: MultiPoly) -> Result<Self> {
        if m.dim() != q.dim() {
            return Err(Error::DimMismatch { expected: q.dim(), got: m.dim() });
        }
        let norm = tau.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnimodular(norm));
        }
        let origin = vec![C64::new(0.0, 0.0); q.dim()];
        let q0 = q.eval(&origin)?;
        let scale = q.coeff_mass().max(1.0);
        if q0.norm() < 1e-14 * scale {
            return Err(Error::DenominatorVanishesAtOrigin);
        }
        // q = q0 * q_n with q_n(0) = 1; reflect(q) = conj(q0) * reflect(q_n),
        // so the function keeps its value with tau * conj(q0)/q0.
        let q = q.scale(one() / q0);
        let tau = tau * q0.conj() / q0;
        let tau = tau / tau.norm();
        let qtilde = if q.is_zero() { q.clone() } else { q.reflect_auto()? };
        Ok(RationalInner { tau, m, q, qtilde })
    }

    /// The monomial inner function `z^m`.
    pub fn monomial(m: MultiIndex) -> Self {
        let dim = m.dim();
        Self::new(one(), m, MultiPoly::constant(dim, one())).expect("constant denominator")
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn monomial_exponent(&self) -> &MultiIndex {
        &self.m
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.q
    }

    pub fn denominator_reflection(&self) -> &MultiPoly {
        &self.qtilde
    }

    /// Numerator `τ · z^m · q̃` as a polynomial.
    pub fn numerator(&self) -> MultiPoly {
        self.qtilde.shifted(&self.m).scale(self.tau)
    }

    /// Per-variable degree of the numerator: `m + ndeg(q)`.
    pub fn ndeg(&self) -> MultiIndex {
        match self.q.ndeg() {
            Ok(s) => self.m.add(&s),
            Err(_) => self.m.clone(),
        }
    }

    /// Evaluate; errors when the denominator is within [`POLE_TOL`] of zero.
    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        let qv = self.q.eval(z)?;
        if qv.norm() < POLE_TOL {
            return Err(Error::Pole(qv.norm()));
        }
        let mut zm = one();
        for (zi, &e) in z.iter().zip(self.m.exponents()) {
            if e > 0 {
                zm *= zi.powu(e);
            }
        }
        Ok(self.tau * zm * self.qtilde.eval(z)? / qv)
    }

    /// View as a general numerator/denominator pair.
    pub fn as_rational(&self) -> RationalFn {
        RationalFn { num: self.numerator(), den: self.q.clone() }
    }

    /// Grid-screened nonvanishing check of the denominator on the closed
    /// polydisc.
    pub fn check_regular(&self, grid_per_dim: usize) -> Result<Regularity> {
        certify_nonvanishing(&self.q, grid_per_dim)
    }

    /// Max of `| |F| - 1 |` over pseudo-random torus points.
    pub fn check_inner_boundary(&self, samples: usize, seed: u64) -> Result<f64> {
        self.as_rational().check_inner_boundary(samples, seed)
    }
}

/// General quotient of polynomials, used for perturbed functions that are not
/// kept in Rudin normal form.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFn {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if num.dim() != den.dim() {
            return Err(Error::DimMismatch { expected: den.dim(), got: num.dim() });
        }
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(RationalFn { num, den })
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        let dv = self.den.eval(z)?;
        if dv.norm() < POLE_TOL {
            return Err(Error::Pole(dv.norm()));
        }
        Ok(self.num.eval(z)? / dv)
    }

    pub fn check_regular(&self, grid_per_dim: usize) -> Result<Regularity> {
        certify_nonvanishing(&self.den, grid_per_dim)
    }

    /// Max of `| |F| - 1 |` over `samples` pseudo-random torus points,
    /// skipping points where the denominator is numerically zero.
    pub fn check_inner_boundary(&self, samples: usize, seed: u64) -> Result<f64> {
        if samples == 0 {
            return Err(Error::invalid("boundary check needs at least one sample"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let z: Vec<C64> = (0..self.dim())
                .map(|_| {
                    let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    C64::new(th.cos(), th.sin())
                })
                .collect();
            let dv = self.den.eval(&z)?;
            if dv.norm() < BOUNDARY_SKIP_TOL {
                continue;
            }
            let fv = self.num.eval(&z)? / dv;
            worst = worst.max((fv.norm() - 1.0).abs());
        }
        Ok(worst)
    }
}

/// Outcome of the grid nonvanishing screen.
#[derive(Clone, Debug)]
pub enum Regularity {
    /// Min sampled modulus beats the Lipschitz slack `L·h`: no zero exists on
    /// the closed polydisc.
    Certified { min_modulus: f64 },
    /// A sample is numerically zero.
    Refuted { witness: Vec<C64>, modulus: f64 },
    /// Neither: the minimum is positive but below the certification margin.
    Inconclusive { min_modulus: f64, near: Vec<C64> },
}

impl Regularity {
    pub fn is_certified(&self) -> bool {
        matches!(self, Regularity::Certified { .. })
    }

    pub fn min_modulus(&self) -> f64 {
        match self {
            Regularity::Certified { min_modulus } => *min_modulus,
            Regularity::Refuted { modulus, .. } => *modulus,
            Regularity::Inconclusive { min_modulus, .. } => *min_modulus,
        }
    }
}

/// Sample `|p|` on a product grid of the closed polydisc (radial x angular per
/// variable) and compare the minimum against the Lipschitz bound `L·h`.
pub fn certify_nonvanishing(p: &MultiPoly, grid_per_dim: usize) -> Result<Regularity> {
    let g = grid_per_dim;
    if g < 4 {
        return Err(Error::invalid("nonvanishing grid needs at least 4 points per dimension"));
    }
    let n = p.dim();
    let per_dim = g * g;
    let total = (per_dim as f64).powi(n as i32);
    if total > 2e7 {
        return Err(Error::invalid(format!(
            "nonvanishing grid of {total:.1e} points is too large; reduce grid_per_dim"
        )));
    }

    // All radius-angle combinations one variable can take.
    let mut values = Vec::with_capacity(per_dim);
    for r_idx in 0..g {
        let r = r_idx as f64 / (g - 1) as f64;
        for a_idx in 0..g {
            let th = std::f64::consts::TAU * a_idx as f64 / g as f64;
            values.push(C64::new(r * th.cos(), r * th.sin()));
        }
    }
    // Per-variable power tables: pow[i][v][e] = values[v]^e.
    let ndeg = match p.ndeg() {
        Ok(d) => d,
        Err(Error::ZeroPolynomial) => {
            return Ok(Regularity::Refuted {
                witness: vec![C64::new(0.0, 0.0); n],
                modulus: 0.0,
            })
        }
        Err(e) => return Err(e),
    };
    let pow: Vec<Vec<Vec<C64>>> = (0..n)
        .map(|i| {
            let d = ndeg.get(i) as usize;
            values
                .iter()
                .map(|v| {
                    let mut row = Vec::with_capacity(d + 1);
                    let mut acc = one();
                    for _ in 0..=d {
                        row.push(acc);
                        acc *= v;
                    }
                    row
                })
                .collect()
        })
        .collect();

    let terms: Vec<(Vec<usize>, C64)> = p
        .terms()
        .map(|(a, c)| (a.exponents().iter().map(|&e| e as usize).collect(), *c))
        .collect();

    let mut idx = vec![0usize; n];
    let mut min_mod = f64::INFINITY;
    let mut argmin = vec![C64::new(0.0, 0.0); n];
    loop {
        let mut acc = C64::new(0.0, 0.0);
        for (exps, c) in &terms {
            let mut m = *c;
            for i in 0..n {
                m *= pow[i][idx[i]][exps[i]];
            }
            acc += m;
        }
        let modulus = acc.norm();
        if modulus < min_mod {
            min_mod = modulus;
            for i in 0..n {
                argmin[i] = values[idx[i]];
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                break;
            }
            idx[i] += 1;
            if idx[i] < per_dim {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }

    let scale = p.coeff_mass();
    if min_mod < 1e-12 * scale {
        return Ok(Regularity::Refuted { witness: argmin, modulus: min_mod });
    }
    // Covering radius of the grid per coordinate (radial step plus arc step).
    let h = 0.5 / (g - 1) as f64 + std::f64::consts::PI / g as f64;
    let lipschitz = p.gradient_bound();
    if min_mod > lipschitz * h {
        Ok(Regularity::Certified { min_modulus: min_mod })
    } else {
        Ok(Regularity::Inconclusive { min_modulus: min_mod, near: argmin })
    }
}

/// Perturbation family data: base function, vanishing polynomials and real
/// weights.
#[derive(Clone, Debug)]
pub struct PerturbationSpec {
    base: RationalInner,
    polys: Vec<MultiPoly>,
    eps: Vec<f64>,
    delta: Vec<f64>,
}

impl PerturbationSpec {
    /// Checks the degree condition `ndeg(p_i) <= m + ndeg(q)` entrywise, which
    /// makes every exponent `m + s - r_i` non-negative.
    pub fn new(
        base: RationalInner,
        polys: Vec<MultiPoly>,
        eps: Vec<f64>,
        delta: Vec<f64>,
    ) -> Result<Self> {
        if polys.len() != eps.len() || polys.len() != delta.len() {
            return Err(Error::invalid("polys, eps and delta must have equal length"));
        }
        let bound = base.ndeg();
        for (i, p) in polys.iter().enumerate() {
            if p.dim() != base.dim() {
                return Err(Error::DimMismatch { expected: base.dim(), got: p.dim() });
            }
            let r = p.ndeg()?;
            if !r.le(&bound) {
                return Err(Error::PerturbationDegree { index: i });
            }
        }
        Ok(PerturbationSpec { base, polys, eps, delta })
    }

    pub fn base(&self) -> &RationalInner {
        &self.base
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }
}

/// The perturbed function
/// `τ (z^m q̃ + Σ ε_i z^{m+s-r_i} p̃_i + δ_i z^{m+s-r_i} p_i) / (q + Σ ε_i p_i + δ_i p̃_i)`.
///
/// When every `p_i` vanishes on a variety V, so does every `p̃_i`, and the
/// result equals the base function on V. The denominator is screened for
/// zeros on a sampled closed polydisc; a hit is an error.
pub fn perturb(spec: &PerturbationSpec) -> Result<RationalFn> {
    let base = &spec.base;
    let s = base.denominator().ndeg()?;
    let m = base.monomial_exponent();
    let ms = m.add(&s);

    let mut num = base.denominator_reflection().shifted(m);
    let mut den = base.denominator().clone();
    for (i, p) in spec.polys.iter().enumerate() {
        let r = p.ndeg()?;
        let shift = ms.checked_sub(&r).ok_or(Error::PerturbationDegree { index: i })?;
        let ptilde = p.reflect(&r)?;
        let e = C64::new(spec.eps[i], 0.0);
        let d = C64::new(spec.delta[i], 0.0);
        num = num
            .add(&ptilde.shifted(&shift).scale(e))?
            .add(&p.shifted(&shift).scale(d))?;
        den = den.add(&p.scale(e))?.add(&ptilde.scale(d))?;
    }
    let num = num.scale(base.tau());

    match certify_nonvanishing(&den, SCREEN_GRID)? {
        Regularity::Refuted { witness, .. } => Err(Error::NotInner { witness }),
        _ => RationalFn::new(num, den),
    }
}

/// The single-polynomial family `τ (q̃ + ε p̃) / (q + ε p)` for a base with a
/// trivial monomial factor and `ndeg(p) = ndeg(q)`.
pub fn perturb_simple(base: &RationalInner, p: &MultiPoly, eps: f64) -> Result<RationalFn> {
    if base.monomial_exponent().total_degree() != 0 {
        return Err(Error::invalid(
            "simple perturbation requires a base with trivial monomial factor (m = 0)",
        ));
    }
    let s = base.denominator().ndeg()?;
    let r = p.ndeg()?;
    if r != s {
        return Err(Error::SimpleDegreeMismatch {
            p: r.exponents().to_vec(),
            q: s.exponents().to_vec(),
        });
    }
    let e = C64::new(eps, 0.0);
    let num = base
        .denominator_reflection()
        .add(&p.reflect(&s)?.scale(e))?
        .scale(base.tau());
    let den = base.denominator().add(&p.scale(e))?;
    match certify_nonvanishing(&den, SCREEN_GRID)? {
        Regularity::Refuted { witness, .. } => Err(Error::NotInner { witness }),
        _ => RationalFn::new(num, den),
    }
}

/// A perturbation that separates from the base function at one point.
#[derive(Clone, Debug)]
pub struct SeparationWitness {
    pub eps: f64,
    pub poly_index: usize,
    pub separation: f64,
    pub function: RationalFn,
}

/// Search the sequence ε = 1/2, 1/4, ..., 2^-20 for a single-polynomial
/// perturbation whose denominator passes the nonvanishing screen and whose
/// value at `z` differs from the base by more than `threshold`.
///
/// The perturbing polynomial is the one of largest modulus at `z`; returns
/// `None` when every candidate vanishes at `z` (the point is effectively on
/// the variety) or no ε separates.
pub fn find_separating_eps(
    base: &RationalInner,
    polys: &[MultiPoly],
    z: &[C64],
    threshold: f64,
) -> Result<Option<SeparationWitness>> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in polys.iter().enumerate() {
        let v = p.eval(z)?.norm();
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let Some((h, vh)) = best else {
        return Ok(None);
    };
    if vh < 1e-12 {
        return Ok(None);
    }
    let base_value = base.eval(z)?;
    for k in 1..=20 {
        let eps = 0.5f64.powi(k);
        let mut eps_vec = vec![0.0; polys.len()];
        eps_vec[h] = eps;
        let spec = PerturbationSpec::new(
            base.clone(),
            polys.to_vec(),
            eps_vec,
            vec![0.0; polys.len()],
        )?;
        let perturbed = match perturb(&spec) {
            Ok(f) => f,
            Err(Error::NotInner { .. }) => continue,
            Err(e) => return Err(e),
        };
        // Require a safe margin on the screen before trusting the candidate.
        match perturbed.check_regular(SCREEN_GRID)? {
            Regularity::Certified { .. } => {}
            Regularity::Inconclusive { min_modulus, .. } if min_modulus >= 1e-6 => {}
            _ => continue,
        }
        let separation = (perturbed.eval(z)? - base_value).norm();
        if separation > threshold {
            return Ok(Some(SeparationWitness {
                eps,
                poly_index: h,
                separation,
                function: perturbed,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn neil_poly() -> MultiPoly {
        MultiPoly::from_terms(2, vec![(vec![3, 0], c(1.0, 0.0)), (vec![0, 2], c(-1.0, 0.0))])
            .unwrap()
    }

    /// F(z, w) = z^3 w^2.
    fn neil_function() -> RationalInner {
        RationalInner::monomial(MultiIndex::new(vec![3, 2]))
    }

    #[test]
    fn rudin_monomial() {
        let f = neil_function();
        assert_eq!(f.tau(), c(1.0, 0.0));
        let v = f.eval(&[c(0.25, 0.0), c(0.125, 0.0)]).unwrap();
        assert!((v - c(1.0 / 4096.0, 0.0)).norm() < 1e-18);
        assert_eq!(f.eval(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn rudin_blaschke_product() {
        // tau = 1, m = (1), q = 1 - z/2 gives z (z - 1/2) / (1 - z/2).
        let q = MultiPoly::from_terms(1, vec![(vec![0], c(1.0, 0.0)), (vec![1], c(-0.5, 0.0))])
            .unwrap();
        let f = RationalInner::new(c(1.0, 0.0), MultiIndex::new(vec![1]), q).unwrap();
        let expect = |z: C64| z * (z - 0.5) / (1.0 - z * 0.5);
        for z in [c(0.3, 0.1), c(-0.4, 0.2), c(0.0, 0.0)] {
            assert!((f.eval(&[z]).unwrap() - expect(z)).norm() < 1e-15);
        }
    }

    #[test]
    fn rudin_normalization_keeps_the_function() {
        // q = 2 - z represents the same function as its normalized form.
        let q = MultiPoly::from_terms(1, vec![(vec![0], c(2.0, 0.0)), (vec![1], c(-1.0, 0.0))])
            .unwrap();
        let f = RationalInner::new(c(1.0, 0.0), MultiIndex::new(vec![0]), q).unwrap();
        let origin = [c(0.0, 0.0)];
        assert!((f.denominator().eval(&origin).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        // Direct quotient with the unnormalized pair: (2z-1)/(2-z).
        let z = c(0.3, -0.2);
        let direct = (2.0 * z - 1.0) / (2.0 - z);
        assert!((f.eval(&[z]).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn rudin_rejects_bad_inputs() {
        let q = MultiPoly::variable(1, 0); // q(0) = 0
        assert!(matches!(
            RationalInner::new(c(1.0, 0.0), MultiIndex::new(vec![0]), q),
            Err(Error::DenominatorVanishesAtOrigin)
        ));
        let q = MultiPoly::constant(1, c(1.0, 0.0));
        assert!(matches!(
            RationalInner::new(c(0.5, 0.0), MultiIndex::new(vec![1]), q),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn monomial_is_unimodular_on_torus() {
        let f = RationalInner::monomial(MultiIndex::new(vec![1, 1]));
        let th1 = std::f64::consts::PI / 3.0;
        let th2 = std::f64::consts::PI / 4.0;
        let z = [c(th1.cos(), th1.sin()), c(th2.cos(), th2.sin())];
        assert!((f.eval(&z).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn regularity_screen() {
        let f = neil_function();
        assert!(f.check_regular(8).unwrap().is_certified());

        let q = MultiPoly::constant(2, c(1.0, 0.0))
            .add(&neil_poly().scale(c(0.1, 0.0)))
            .unwrap();
        let f = RationalInner::new(c(1.0, 0.0), MultiIndex::zero(2), q).unwrap();
        match f.check_regular(32).unwrap() {
            Regularity::Certified { min_modulus } => assert!(min_modulus >= 0.8),
            other => panic!("expected certification, got {other:?}"),
        }

        // q = 2 - z - w vanishes at (1, 1) on the closed bidisc.
        let q = MultiPoly::from_terms(
            2,
            vec![
                (vec![0, 0], c(2.0, 0.0)),
                (vec![1, 0], c(-1.0, 0.0)),
                (vec![0, 1], c(-1.0, 0.0)),
            ],
        )
        .unwrap();
        match certify_nonvanishing(&q, 16).unwrap() {
            Regularity::Refuted { modulus, .. } => assert!(modulus < 1e-12),
            Regularity::Inconclusive { min_modulus, .. } => assert!(min_modulus < 0.5),
            Regularity::Certified { .. } => panic!("2 - z - w cannot be certified"),
        }
    }

    #[test]
    fn boundary_check_detects_broken_form() {
        let f = neil_function();
        assert!(f.check_inner_boundary(1000, 0).unwrap() <= 1e-14);

        let q = MultiPoly::constant(2, c(1.0, 0.0))
            .add(&neil_poly().scale(c(0.1, 0.0)))
            .unwrap();
        let g = RationalInner::new(c(1.0, 0.0), MultiIndex::zero(2), q.clone()).unwrap();
        assert!(g.check_inner_boundary(1000, 0).unwrap() <= 1e-12);

        // Breaking the numerator away from the reflection loses innerness.
        let broken_num = g
            .denominator_reflection()
            .add(&MultiPoly::constant(2, c(0.01, 0.0)))
            .unwrap();
        let broken = RationalFn::new(broken_num, q).unwrap();
        assert!(broken.check_inner_boundary(1000, 0).unwrap() > 1e-3);
    }

    #[test]
    fn perturb_matches_the_closed_form() {
        let f = neil_function();
        let p = neil_poly();
        let spec = PerturbationSpec::new(f.clone(), vec![p.clone()], vec![0.1], vec![0.0]).unwrap();
        let fe = perturb(&spec).unwrap();

        // numerator z^3 w^2 + 0.1 (w^2 - z^3), denominator 1 + 0.1 (z^3 - w^2)
        let num = MultiPoly::monomial(MultiIndex::new(vec![3, 2]), c(1.0, 0.0))
            .add(&p.reflect_auto().unwrap().scale(c(0.1, 0.0)))
            .unwrap();
        let den = MultiPoly::constant(2, c(1.0, 0.0)).add(&p.scale(c(0.1, 0.0))).unwrap();
        assert!(fe.numerator().approx_eq(&num, 1e-15));
        assert!(fe.denominator().approx_eq(&den, 1e-15));

        // zero perturbation returns the base
        let spec0 = PerturbationSpec::new(f.clone(), vec![p.clone()], vec![0.0], vec![0.0]).unwrap();
        let f0 = perturb(&spec0).unwrap();
        assert!(f0.numerator().approx_eq(&f.numerator(), 0.0));
        assert!(f0.denominator().approx_eq(f.denominator(), 0.0));

        // witness value off the curve: 0.025 / 0.975
        let v = fe.eval(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!((v - c(0.025 / 0.975, 0.0)).norm() < 1e-15);
        assert_eq!(f.eval(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn eval_reports_poles() {
        // denominator z^3 - w^2 + 1 vanishes at gamma(t) shifted; use a
        // quotient whose denominator vanishes at the probe point exactly
        let den = neil_poly();
        let num = MultiPoly::constant(2, c(1.0, 0.0));
        let f = RationalFn::new(num, den).unwrap();
        // (1/4)^3 == (1/8)^2, so the denominator is exactly zero here
        assert!(matches!(
            f.eval(&[c(0.25, 0.0), c(0.125, 0.0)]),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn perturb_rejects_degree_violation() {
        // p of degree (4, 0) exceeds ndeg(F) = (3, 2).
        let p = MultiPoly::monomial(MultiIndex::new(vec![4, 0]), c(1.0, 0.0));
        assert!(matches!(
            PerturbationSpec::new(neil_function(), vec![p], vec![0.1], vec![0.0]),
            Err(Error::PerturbationDegree { index: 0 })
        ));
    }

    #[test]
    fn perturb_rejects_vanishing_denominator() {
        // eps = 1/2 makes the denominator vanish at (-1, 1) on the torus.
        let spec =
            PerturbationSpec::new(neil_function(), vec![neil_poly()], vec![0.5], vec![0.0])
                .unwrap();
        assert!(matches!(perturb(&spec), Err(Error::NotInner { .. })));
    }

    #[test]
    fn perturb_simple_coefficients() {
        let q = MultiPoly::from_terms(1, vec![(vec![0], c(2.0, 0.0)), (vec![1], c(-1.0, 0.0))])
            .unwrap();
        let base = RationalInner::new(c(1.0, 0.0), MultiIndex::new(vec![0]), q).unwrap();
        let p = MultiPoly::from_terms(1, vec![(vec![1], c(1.0, 0.0)), (vec![0], c(-1.0, 0.0))])
            .unwrap(); // z - 1
        let fe = perturb_simple(&base, &p, 0.1).unwrap();
        // Against the stored (normalized) denominator q_n = 1 - z/2:
        // numerator (z - 1/2) + 0.1 (1 - z), denominator (1 - z/2) + 0.1 (z - 1).
        let num = base
            .denominator_reflection()
            .add(&p.reflect_auto().unwrap().scale(c(0.1, 0.0)))
            .unwrap();
        let den = base.denominator().add(&p.scale(c(0.1, 0.0))).unwrap();
        assert!(fe.numerator().approx_eq(&num, 1e-15));
        assert!(fe.denominator().approx_eq(&den, 1e-15));

        // eps = 0 is the identity.
        let f0 = perturb_simple(&base, &p, 0.0).unwrap();
        let z = [c(0.2, 0.3)];
        assert!((f0.eval(&z).unwrap() - base.eval(&z).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn perturb_simple_rejects_mismatch() {
        let base = neil_function(); // m = (3, 2) nonzero
        assert!(perturb_simple(&base, &neil_poly(), 0.1).is_err());

        let q = MultiPoly::from_terms(1, vec![(vec![0], c(1.0, 0.0)), (vec![1], c(-0.5, 0.0))])
            .unwrap();
        let base = RationalInner::new(c(1.0, 0.0), MultiIndex::new(vec![0]), q).unwrap();
        let p = MultiPoly::monomial(MultiIndex::new(vec![2]), c(1.0, 0.0));
        assert!(matches!(
            perturb_simple(&base, &p, 0.1),
            Err(Error::SimpleDegreeMismatch { .. })
        ));
    }

    #[test]
    fn neil_rewrite_matches_general_perturbation() {
        // (z^3 w^2 - eps p) / (1 + eps p) with p = z^3 - w^2.
        let spec =
            PerturbationSpec::new(neil_function(), vec![neil_poly()], vec![0.1], vec![0.0])
                .unwrap();
        let fe = perturb(&spec).unwrap();
        let p = neil_poly();
        let num = MultiPoly::monomial(MultiIndex::new(vec![3, 2]), c(1.0, 0.0))
            .sub(&p.scale(c(0.1, 0.0)))
            .unwrap();
        let den = MultiPoly::constant(2, c(1.0, 0.0)).add(&p.scale(c(0.1, 0.0))).unwrap();
        assert!(fe.numerator().approx_eq(&num, 1e-15));
        assert!(fe.denominator().approx_eq(&den, 1e-15));
    }

    #[test]
    fn separation_search_finds_a_witness() {
        let w = find_separating_eps(
            &neil_function(),
            &[neil_poly()],
            &[c(0.0, 0.0), c(0.5, 0.0)],
            1e-6,
        )
        .unwrap()
        .expect("off-curve point must separate");
        assert!(w.separation > 1e-6);
        assert!(w.eps < 0.5);
        // consistency: re-evaluating the returned function reproduces the gap
        let gap = (w.function.eval(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap()
            - neil_function().eval(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap())
        .norm();
        assert!((gap - w.separation).abs() < 1e-15);
    }

    #[test]
    fn separation_search_declines_on_the_curve() {
        // gamma(1/2) = (1/4, 1/8) lies on the curve, p vanishes there.
        let w = find_separating_eps(
            &neil_function(),
            &[neil_poly()],
            &[c(0.25, 0.0), c(0.125, 0.0)],
            1e-6,
        )
        .unwrap();
        assert!(w.is_none());
    }

    /// With both eps and delta active, the perturbed function still matches
    /// the base along the whole curve, because p and its reflection both
    /// vanish there.
    #[test]
    fn perturbation_agrees_on_the_variety() {
        let base = neil_function();
        let p = neil_poly();
        let ptilde = p.reflect_auto().unwrap();
        // sampled validation that the reflection also vanishes on the curve
        let curve = |t: C64| [t.powu(2), t.powu(3)];
        let spec =
            PerturbationSpec::new(base.clone(), vec![p], vec![0.1], vec![0.05]).unwrap();
        let fe = perturb(&spec).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..200 {
            let r = 0.95 * ((k as f64 + 0.5) / 200.0).sqrt();
            let th = std::f64::consts::TAU * 0.618_033_988_749_894_9 * k as f64;
            let t = C64::new(r * th.cos(), r * th.sin());
            let z = curve(t);
            assert!(ptilde.eval(&z).unwrap().norm() <= 1e-10);
            worst = worst.max((fe.eval(&z).unwrap() - base.eval(&z).unwrap()).norm());
        }
        assert!(worst <= 1e-10, "worst on-curve deviation {worst}");
    }

    #[test]
    fn random_off_curve_points_separate() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let base = neil_function();
        let polys = [neil_poly()];
        let mut found = 0;
        while found < 20 {
            let z: Vec<C64> = (0..2)
                .map(|_| {
                    let r: f64 = rng.random_range(0.0f64..0.81).sqrt();
                    let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    c(r * th.cos(), r * th.sin())
                })
                .collect();
            if polys[0].eval(&z).unwrap().norm() < 0.05 {
                continue; // too close to the variety for a meaningful witness
            }
            let w = find_separating_eps(&base, &polys, &z, 1e-6)
                .unwrap()
                .expect("a point with p(z) away from zero must separate");
            assert!(w.separation > 1e-6);
            found += 1;
        }
    }

    /// Random certified-regular Rudin functions stay inner and Schur-bounded.
    #[test]
    fn random_rudin_functions_are_inner() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let dim = 2;
            // small random q keeps 1 + q' zero-free on the closed bidisc
            let mut terms = vec![(vec![0u32, 0u32], c(1.0, 0.0))];
            for _ in 0..3 {
                let e = vec![rng.random_range(0..3u32), rng.random_range(0..3u32)];
                let re = rng.random_range(-0.08..0.08);
                let im = rng.random_range(-0.08..0.08);
                terms.push((e, c(re, im)));
            }
            let q = MultiPoly::from_terms(dim, terms).unwrap();
            let m = MultiIndex::new(vec![rng.random_range(0..3u32), rng.random_range(0..3u32)]);
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let f = RationalInner::new(c(phase.cos(), phase.sin()), m, q).unwrap();
            assert!(f.check_regular(16).unwrap().is_certified());
            assert!(f.check_inner_boundary(1000, 5).unwrap() <= 1e-10);
            // Schur bound on random interior points
            for k in 0..1000 {
                let r1: f64 = rng.random_range(0.0..1.0);
                let r2: f64 = rng.random_range(0.0..1.0);
                let t1: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let t2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let z = [
                    c(r1 * t1.cos(), r1 * t1.sin()),
                    c(r2 * t2.cos(), r2 * t2.sin()),
                ];
                let v = f.eval(&z).unwrap().norm();
                assert!(v <= 1.0 + 1e-12, "sample {k}: |F| = {v}");
            }
        }
    }
}
