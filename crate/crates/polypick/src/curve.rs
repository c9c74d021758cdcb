//! Rationally parameterized inner curves `γ : 𝔻 → 𝔻ⁿ` and the two independent
//! computations of the degree of a function on the curve.
//!
//! Each coordinate is a finite Blaschke product, so `γ` maps the circle into
//! the n-torus and the parameterizing disc doubles as the desingularization of
//! the image curve. The degree of a regular rational inner `F` on the curve is
//! computed both from the rank/degree formula `Σ rank_i · ndeg(F)_i` and from
//! the argument principle applied to the boundary loop of the pullback
//! `F ∘ γ`; the two must agree.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::inner::RationalInner;
use crate::poly::{C64, MultiIndex, MultiPoly};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// A disc automorphism factor `(t - a) / (1 - conj(a) t)` with `|a| < 1`.
#[derive(Clone, Debug)]
pub struct BlaschkeFactor {
    zero: C64,
}

impl BlaschkeFactor {
    pub fn new(zero: C64) -> Result<Self> {
        if zero.norm() >= 1.0 - 1e-12 {
            return Err(Error::BlaschkeZeroOnBoundary(zero.norm()));
        }
        Ok(BlaschkeFactor { zero })
    }

    pub fn zero(&self) -> C64 {
        self.zero
    }

    pub fn eval(&self, t: C64) -> C64 {
        (t - self.zero) / (one() - self.zero.conj() * t)
    }
}

/// One-variable rational inner function `τ · t^power · Π (t - a_j)/(1 - conj(a_j) t)`.
#[derive(Clone, Debug)]
pub struct OneVarInner {
    tau: C64,
    power: u32,
    factors: Vec<BlaschkeFactor>,
}

impl OneVarInner {
    pub fn new(tau: C64, power: u32, zeros: Vec<C64>) -> Result<Self> {
        let norm = tau.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnimodular(norm));
        }
        let factors = zeros.into_iter().map(BlaschkeFactor::new).collect::<Result<Vec<_>>>()?;
        Ok(OneVarInner { tau: tau / norm, power, factors })
    }

    /// The monomial coordinate `t^power`.
    pub fn monomial(power: u32) -> Self {
        OneVarInner { tau: one(), power, factors: Vec::new() }
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn zeros(&self) -> impl Iterator<Item = C64> + '_ {
        self.factors.iter().map(|f| f.zero)
    }

    /// Number of zeros counted with multiplicity; the valence on the disc.
    pub fn blaschke_degree(&self) -> usize {
        self.power as usize + self.factors.len()
    }

    pub fn eval(&self, t: C64) -> C64 {
        let mut v = self.tau * t.powu(self.power);
        for f in &self.factors {
            v *= f.eval(t);
        }
        v
    }

    /// Ascending coefficients of the numerator `τ t^power Π (t - a_j)`.
    pub fn numerator_coeffs(&self) -> Vec<C64> {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.power as usize];
        coeffs.push(self.tau);
        for f in &self.factors {
            coeffs = conv(&coeffs, &[-f.zero, one()]);
        }
        coeffs
    }

    /// Ascending coefficients of the denominator `Π (1 - conj(a_j) t)`.
    pub fn denominator_coeffs(&self) -> Vec<C64> {
        let mut coeffs = vec![one()];
        for f in &self.factors {
            coeffs = conv(&coeffs, &[one(), -f.zero.conj()]);
        }
        coeffs
    }

    /// Count the roots of `m(t) = c` in the open disc via companion-matrix
    /// eigenvalues of `numerator - c · denominator`.
    ///
    /// Errors with [`Error::NoGenericValue`] when a root lands within `1e-8`
    /// of the unit circle, i.e. `c` is not generic enough to count reliably.
    pub fn valence_at(&self, c: C64) -> Result<usize> {
        let num = self.numerator_coeffs();
        let den = self.denominator_coeffs();
        let n = num.len().max(den.len());
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for (i, v) in num.iter().enumerate() {
            coeffs[i] += v;
        }
        for (i, v) in den.iter().enumerate() {
            coeffs[i] -= c * v;
        }
        let roots = poly_roots(&coeffs)?;
        let mut count = 0;
        for r in roots {
            let m = r.norm();
            if (m - 1.0).abs() < 1e-8 {
                return Err(Error::NoGenericValue);
            }
            if m < 1.0 {
                count += 1;
            }
        }
        Ok(count)
    }
}

fn conv(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Roots of a one-variable complex polynomial (ascending coefficients) via
/// Schur factorization of the companion matrix. Leading coefficients that are
/// negligible relative to the largest are trimmed; those roots sit at infinity.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let maxabs = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if maxabs == 0.0 {
        return Err(Error::invalid("root finding on the zero polynomial"));
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * maxabs {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut comp = DMatrix::from_element(deg, deg, C64::new(0.0, 0.0));
    for i in 1..deg {
        comp[(i, i - 1)] = one();
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = comp.try_schur(1e-14, 10_000).ok_or(Error::EigenFailure)?;
    let eigs = schur.eigenvalues().ok_or(Error::EigenFailure)?;
    Ok(eigs.iter().copied().collect())
}

/// A curve `γ(t) = (m_1(t), ..., m_n(t))` with inner coordinates, optionally
/// carrying the defining polynomials of its image variety.
#[derive(Clone, Debug)]
pub struct ParamCurve {
    coords: Vec<OneVarInner>,
    defining_polys: Option<Vec<MultiPoly>>,
}

/// Deterministic low-discrepancy interior parameters (golden-angle spiral).
fn interior_samples(count: usize, radius: f64) -> Vec<C64> {
    let phi = 0.618_033_988_749_894_9_f64;
    (0..count)
        .map(|k| {
            let r = radius * (((k as f64) + 0.5) / count as f64).sqrt();
            let th = std::f64::consts::TAU * phi * k as f64;
            C64::new(r * th.cos(), r * th.sin())
        })
        .collect()
}

impl ParamCurve {
    /// Validates, by sampling, that every coordinate is unimodular on the
    /// circle, that the supplied defining polynomials vanish along the curve,
    /// and that `γ` is injective on the sampled disc.
    pub fn new(coords: Vec<OneVarInner>, defining_polys: Option<Vec<MultiPoly>>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("curve needs at least one coordinate"));
        }
        let n = coords.len();
        if let Some(polys) = &defining_polys {
            for p in polys {
                if p.dim() != n {
                    return Err(Error::DimMismatch { expected: n, got: p.dim() });
                }
            }
        }
        let curve = ParamCurve { coords, defining_polys };

        for (i, m) in curve.coords.iter().enumerate() {
            let mut worst: f64 = 0.0;
            for k in 0..64 {
                let th = std::f64::consts::TAU * k as f64 / 64.0;
                let v = m.eval(C64::new(th.cos(), th.sin()));
                worst = worst.max((v.norm() - 1.0).abs());
            }
            if worst > 1e-12 {
                return Err(Error::CoordinateNotInner { index: i, deviation: worst });
            }
        }

        if let Some(polys) = &curve.defining_polys {
            for t in interior_samples(100, 0.97) {
                let z = curve.eval(t)?;
                for (i, p) in polys.iter().enumerate() {
                    let v = p.eval(&z)?.norm();
                    if v > 1e-10 {
                        return Err(Error::NotOnVariety { index: i, value: v, at: t });
                    }
                }
            }
        }

        let params = interior_samples(200, 0.95);
        let images: Vec<Vec<C64>> =
            params.iter().map(|&t| curve.eval(t)).collect::<Result<Vec<_>>>()?;
        for a in 0..images.len() {
            for b in (a + 1)..images.len() {
                let dist: f64 = images[a]
                    .iter()
                    .zip(&images[b])
                    .map(|(x, y)| (x - y).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if dist < 1e-10 {
                    return Err(Error::NotInjective(params[a], params[b]));
                }
            }
        }
        curve.check_preimage_injectivity()?;
        Ok(curve)
    }

    /// Pairwise image sampling misses collisions like `γ(t) = γ(-t)`, so we
    /// also count preimages: at sampled base points, every disc solution of
    /// `m_i(t') = m_i(t_0)` for the highest-valence coordinate must fail to
    /// match the remaining coordinates unless `t' = t_0`.
    fn check_preimage_injectivity(&self) -> Result<()> {
        let lead = self
            .coords
            .iter()
            .enumerate()
            .max_by_key(|(_, m)| m.blaschke_degree())
            .map(|(i, _)| i)
            .unwrap();
        if self.coords[lead].blaschke_degree() == 0 {
            // every coordinate constant; the pairwise check already rejected it
            return Ok(());
        }
        let m_lead = &self.coords[lead];
        let num = m_lead.numerator_coeffs();
        let den = m_lead.denominator_coeffs();
        for t0 in interior_samples(20, 0.85) {
            let z0 = m_lead.eval(t0);
            let n = num.len().max(den.len());
            let mut coeffs = vec![C64::new(0.0, 0.0); n];
            for (i, v) in num.iter().enumerate() {
                coeffs[i] += v;
            }
            for (i, v) in den.iter().enumerate() {
                coeffs[i] -= z0 * v;
            }
            for r in poly_roots(&coeffs)? {
                if r.norm() >= 1.0 - 1e-9 || (r - t0).norm() < 1e-7 {
                    continue;
                }
                let collision = self
                    .coords
                    .iter()
                    .all(|m| (m.eval(r) - m.eval(t0)).norm() < 1e-8);
                if collision {
                    return Err(Error::NotInjective(t0, r));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[OneVarInner] {
        &self.coords
    }

    pub fn defining_polys(&self) -> Option<&[MultiPoly]> {
        self.defining_polys.as_deref()
    }

    /// Evaluate at a parameter of the closed disc.
    pub fn eval(&self, t: C64) -> Result<Vec<C64>> {
        if t.norm() > 1.0 + 1e-12 {
            return Err(Error::OutsideClosedDisc(t.norm()));
        }
        Ok(self.coords.iter().map(|m| m.eval(t)).collect())
    }

    /// Tuple of coordinate valences; the generic sheet counts of the curve
    /// over each coordinate.
    pub fn rank(&self) -> MultiIndex {
        MultiIndex::new(self.coords.iter().map(|m| m.blaschke_degree() as u32).collect())
    }

    /// Compose a rational inner function with the curve.
    ///
    /// The denominator of `F` is screened along the boundary image so the
    /// composition is analytic on a neighborhood of the closed disc.
    pub fn pullback<'a>(&'a self, f: &'a RationalInner) -> Result<Pullback<'a>> {
        if f.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: f.dim() });
        }
        let mut min_q = f64::INFINITY;
        for k in 0..256 {
            let th = std::f64::consts::TAU * k as f64 / 256.0;
            let z = self.eval(C64::new(th.cos(), th.sin()))?;
            min_q = min_q.min(f.denominator().eval(&z)?.norm());
        }
        if min_q < 1e-10 {
            return Err(Error::PullbackPole(min_q));
        }
        Ok(Pullback { curve: self, func: f })
    }
}

/// The composition `t ↦ F(γ(t))`, analytic on the disc and unimodular on the
/// circle.
#[derive(Clone, Copy)]
pub struct Pullback<'a> {
    curve: &'a ParamCurve,
    func: &'a RationalInner,
}

impl Pullback<'_> {
    pub fn eval(&self, t: C64) -> Result<C64> {
        self.func.eval(&self.curve.eval(t)?)
    }

    /// Valence on the disc by the argument principle.
    pub fn winding_degree(&self, samples: usize) -> Result<usize> {
        winding_number(|t| self.eval(t), samples)
    }
}

/// Valence of an analytic, boundary-unimodular function on the disc: the
/// winding number of `θ ↦ f(e^{iθ}) - c` for a generic level `c`.
///
/// Tries `c = 0` first, then five pseudo-random draws with `|c| < 0.5`. A
/// candidate is rejected when the loop passes too close to `c` or the phase
/// increments are too coarse to trust; if no candidate settles within 0.1 of
/// an integer the caller should increase `samples`.
pub fn winding_number<F>(f: F, samples: usize) -> Result<usize>
where
    F: Fn(C64) -> Result<C64>,
{
    if samples < 256 {
        return Err(Error::invalid("winding estimate needs at least 256 samples"));
    }
    let boundary: Vec<C64> = (0..samples)
        .map(|j| {
            let th = std::f64::consts::TAU * j as f64 / samples as f64;
            f(C64::new(th.cos(), th.sin()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut candidates = vec![C64::new(0.0, 0.0)];
    for _ in 0..5 {
        let r: f64 = rng.random_range(0.0f64..0.25).sqrt();
        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        candidates.push(C64::new(r * th.cos(), r * th.sin()));
    }

    let mut last_estimate = f64::NAN;
    'next_candidate: for c in candidates {
        let w: Vec<C64> = boundary.iter().map(|v| v - c).collect();
        if w.iter().any(|v| v.norm() < 1e-6) {
            continue;
        }
        let mut total = 0.0;
        for j in 0..samples {
            let step = (w[(j + 1) % samples] / w[j]).arg();
            if step.abs() > std::f64::consts::FRAC_PI_2 {
                continue 'next_candidate;
            }
            total += step;
        }
        let estimate = total / std::f64::consts::TAU;
        let rounded = estimate.round();
        last_estimate = estimate;
        if (estimate - rounded).abs() <= 0.1 && rounded >= 0.0 {
            return Ok(rounded as usize);
        }
    }
    Err(Error::WindingResolution(last_estimate))
}

/// Degree of `F` on the curve: the formula `Σ rank_i · ndeg(F)_i`, certified
/// against the winding oracle of the pullback boundary loop.
pub fn degree_on_curve(curve: &ParamCurve, f: &RationalInner) -> Result<usize> {
    let rank = curve.rank();
    let ndeg = f.ndeg();
    let formula: usize = rank
        .exponents()
        .iter()
        .zip(ndeg.exponents())
        .map(|(&r, &d)| r as usize * d as usize)
        .sum();
    let pullback = curve.pullback(f)?;
    let samples = (16 * formula).next_power_of_two().max(2048);
    let winding = pullback.winding_degree(samples)?;
    if winding != formula {
        return Err(Error::DegreeConsistency { formula, winding });
    }
    Ok(formula)
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

    pub(crate) fn neil_curve() -> ParamCurve {
        ParamCurve::new(
            vec![OneVarInner::monomial(2), OneVarInner::monomial(3)],
            Some(vec![neil_poly()]),
        )
        .unwrap()
    }

    fn diagonal_curve() -> ParamCurve {
        ParamCurve::new(vec![OneVarInner::monomial(1), OneVarInner::monomial(1)], None).unwrap()
    }

    #[test]
    fn curve_evaluation() {
        let neil = neil_curve();
        let z = neil.eval(c(0.5, 0.0)).unwrap();
        assert_eq!(z, vec![c(0.25, 0.0), c(0.125, 0.0)]);

        let diag = diagonal_curve();
        assert_eq!(diag.eval(c(0.5, 0.0)).unwrap(), vec![c(0.5, 0.0), c(0.5, 0.0)]);

        let th = 1.1_f64;
        let boundary = neil.eval(c(th.cos(), th.sin())).unwrap();
        for z in boundary {
            assert!((z.norm() - 1.0).abs() < 1e-14);
        }
        assert!(matches!(neil.eval(c(1.5, 0.0)), Err(Error::OutsideClosedDisc(_))));
    }

    #[test]
    fn rank_and_root_count_oracle() {
        let neil = neil_curve();
        assert_eq!(neil.rank(), MultiIndex::new(vec![2, 3]));
        assert_eq!(diagonal_curve().rank(), MultiIndex::new(vec![1, 1]));

        // brute-force oracle: count roots of m_i(t) = c for generic c
        let generic = c(0.3, 0.1);
        for (i, m) in neil.coords().iter().enumerate() {
            assert_eq!(m.valence_at(generic).unwrap(), neil.rank().get(i) as usize);
        }

        // mixed curve (t^2, 3-factor Blaschke product)
        let b3 = OneVarInner::new(
            c(1.0, 0.0),
            0,
            vec![c(0.2, 0.1), c(-0.3, 0.2), c(0.1, -0.4)],
        )
        .unwrap();
        let mixed = ParamCurve::new(vec![OneVarInner::monomial(2), b3], None).unwrap();
        assert_eq!(mixed.rank(), MultiIndex::new(vec![2, 3]));
        for (i, m) in mixed.coords().iter().enumerate() {
            assert_eq!(m.valence_at(generic).unwrap(), mixed.rank().get(i) as usize);
        }
    }

    #[test]
    fn valence_is_constant_over_generic_values() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let curve = neil_curve();
        for _ in 0..5 {
            let r: f64 = rng.random_range(0.05..0.7);
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let value = c(r * th.cos(), r * th.sin());
            for (i, m) in curve.coords().iter().enumerate() {
                assert_eq!(m.valence_at(value).unwrap(), curve.rank().get(i) as usize);
            }
        }
    }

    #[test]
    fn non_injective_parameterization_is_rejected() {
        // gamma(t) = (t^2, t^4) identifies t and -t.
        let r = ParamCurve::new(vec![OneVarInner::monomial(2), OneVarInner::monomial(4)], None);
        assert!(matches!(r, Err(Error::NotInjective(_, _))));
    }

    #[test]
    fn variety_membership_is_checked() {
        // wrong polynomial for the diagonal curve
        let p = neil_poly();
        let r = ParamCurve::new(
            vec![OneVarInner::monomial(1), OneVarInner::monomial(1)],
            Some(vec![p]),
        );
        assert!(matches!(r, Err(Error::NotOnVariety { .. })));
    }

    #[test]
    fn pullback_values() {
        let neil = neil_curve();
        let f = RationalInner::monomial(MultiIndex::new(vec![3, 2]));
        let pb = neil.pullback(&f).unwrap();
        for t in [c(0.3, 0.2), c(-0.5, 0.1), c(0.0, 0.6)] {
            let expect = t.powu(12);
            assert!((pb.eval(t).unwrap() - expect).norm() < 1e-14);
        }

        let diag = diagonal_curve();
        let z1 = RationalInner::monomial(MultiIndex::new(vec![1, 0]));
        let pb = diag.pullback(&z1).unwrap();
        assert!((pb.eval(c(0.4, 0.1)).unwrap() - c(0.4, 0.1)).norm() < 1e-15);

        let zw = RationalInner::monomial(MultiIndex::new(vec![1, 1]));
        let pb = diag.pullback(&zw).unwrap();
        assert!((pb.eval(c(0.4, 0.1)).unwrap() - c(0.4, 0.1).powu(2)).norm() < 1e-15);
    }

    #[test]
    fn winding_examples() {
        // t^12 on the circle winds 12 times
        let twelve = winding_number(|t| Ok(t.powu(12)), 1024).unwrap();
        assert_eq!(twelve, 12);
        assert_eq!(winding_number(Ok, 256).unwrap(), 1);

        // Blaschke product of degree 2 through a pullback
        let q = MultiPoly::from_terms(
            2,
            vec![(vec![0, 0], c(1.0, 0.0)), (vec![1, 0], c(-0.5, 0.0))],
        )
        .unwrap();
        let f = RationalInner::new(c(1.0, 0.0), MultiIndex::new(vec![1, 0]), q).unwrap();
        let diag = diagonal_curve();
        let pb = diag.pullback(&f).unwrap();
        assert_eq!(pb.winding_degree(1024).unwrap(), 2);

        assert!(matches!(
            winding_number(Ok, 100),
            Err(Error::InvalidInput(_))
        ));

        // 256 samples cannot resolve t^100: phase steps exceed pi/2
        assert!(matches!(
            winding_number(|t| Ok(t.powu(100)), 256),
            Err(Error::WindingResolution(_))
        ));
        assert_eq!(winding_number(|t| Ok(t.powu(100)), 4096).unwrap(), 100);
    }

    #[test]
    fn degree_formula_examples() {
        let neil = neil_curve();
        let f = RationalInner::monomial(MultiIndex::new(vec![3, 2]));
        assert_eq!(degree_on_curve(&neil, &f).unwrap(), 12);

        let diag = diagonal_curve();
        let z1 = RationalInner::monomial(MultiIndex::new(vec![1, 0]));
        assert_eq!(degree_on_curve(&diag, &z1).unwrap(), 1);
        let zw = RationalInner::monomial(MultiIndex::new(vec![1, 1]));
        assert_eq!(degree_on_curve(&diag, &zw).unwrap(), 2);
    }

    #[test]
    fn boundary_containment() {
        let neil = neil_curve();
        let mut worst: f64 = 0.0;
        for k in 0..500 {
            let th = std::f64::consts::TAU * k as f64 / 500.0;
            let z = neil.eval(c(th.cos(), th.sin())).unwrap();
            for v in z {
                worst = worst.max((v.norm() - 1.0).abs());
            }
        }
        assert!(worst <= 1e-12);
    }

    #[test]
    fn membership_along_interior() {
        let neil = neil_curve();
        let p = neil_poly();
        let mut worst: f64 = 0.0;
        for t in interior_samples(200, 0.9) {
            let z = neil.eval(t).unwrap();
            worst = worst.max(p.eval(&z).unwrap().norm());
        }
        assert!(worst <= 1e-10);
    }

    #[test]
    fn companion_roots_recover_known_zeros() {
        // (t - 0.3)(t - 0.5i)(t + 0.2 - 0.1i)
        let roots = [c(0.3, 0.0), c(0.0, 0.5), c(-0.2, 0.1)];
        let mut coeffs = vec![one()];
        for r in roots {
            coeffs = conv(&coeffs, &[-r, one()]);
        }
        let mut found = poly_roots(&coeffs).unwrap();
        found.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let mut expect = roots.to_vec();
        expect.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (f, e) in found.iter().zip(&expect) {
            assert!((f - e).norm() < 1e-10);
        }
    }
}
