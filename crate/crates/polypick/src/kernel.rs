//! Numerical model of the Hardy space `H²(μ)` on a curve.
//!
//! The measure μ is realized concretely as the pushforward of normalized
//! arclength `dθ/2π` under the boundary restriction of `γ`; inner products of
//! monomials pulled back along the curve become uniform-grid quadratures on
//! the circle. The resulting Gram matrix is exactly singular whenever distinct
//! monomials coincide on the curve (`z³ = w²` on the Neil parabola), so every
//! solve goes through a spectral pseudo-inverse with a relative cutoff.

use nalgebra::{DMatrix, DVector};

use crate::curve::ParamCurve;
use crate::error::{Error, Result};
use crate::poly::{C64, MultiIndex};

/// Relative eigenvalue cutoff for the Gram pseudo-inverse.
pub const DEFAULT_PINV_CUTOFF: f64 = 1e-10;
/// Doubling the quadrature should move Gram entries by no more than this.
pub const QUADRATURE_RESOLVED_TOL: f64 = 1e-10;

/// Truncated kernel space on a curve: monomial basis, quadrature Gram matrix
/// and its spectral decomposition.
#[derive(Clone, Debug)]
pub struct KernelSpace {
    curve: ParamCurve,
    max_total_degree: usize,
    quad_points: usize,
    pinv_cutoff: f64,
    basis: Vec<MultiIndex>,
    gram: DMatrix<C64>,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<C64>,
    doubling_residual: f64,
}

/// Kernel vector at a curve point, expressed in the monomial basis.
///
/// `residual` is the truncation defect of the reproducing property over the
/// basis; it shrinks as the basis degree grows and values above `1e-6` mean
/// the truncation is too coarse for certification-grade use.
#[derive(Clone, Debug)]
pub struct KernelVector {
    pub param: C64,
    pub point: Vec<C64>,
    pub coeffs: DVector<C64>,
    pub residual: f64,
}

/// All exponent tuples in `dim` variables with total degree at most `max`,
/// in graded lexicographic order.
pub fn graded_monomials(dim: usize, max: usize) -> Vec<MultiIndex> {
    fn rec(dim: usize, max: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == dim {
            out.push(MultiIndex::new(prefix.clone()));
            return;
        }
        let used: u32 = prefix.iter().sum();
        for e in 0..=(max as u32 - used) {
            prefix.push(e);
            rec(dim, max, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, max, &mut Vec::new(), &mut out);
    out.sort_by_key(|a| (a.total_degree(), a.exponents().to_vec()));
    out
}

/// Boundary values of all pulled-back basis monomials on a `quad`-point
/// uniform grid: row j is `(Φ_α(e^{iθ_j}))_α`.
fn boundary_matrix(
    curve: &ParamCurve,
    basis: &[MultiIndex],
    max_total_degree: usize,
    quad: usize,
) -> Result<DMatrix<C64>> {
    let n = curve.dim();
    let mut b = DMatrix::from_element(quad, basis.len(), C64::new(0.0, 0.0));
    let mut powers: Vec<Vec<C64>> = vec![Vec::new(); n];
    for j in 0..quad {
        let th = std::f64::consts::TAU * j as f64 / quad as f64;
        let z = curve.eval(C64::new(th.cos(), th.sin()))?;
        for (i, zi) in z.iter().enumerate() {
            let table = &mut powers[i];
            table.clear();
            let mut acc = C64::new(1.0, 0.0);
            for _ in 0..=max_total_degree {
                table.push(acc);
                acc *= zi;
            }
        }
        for (col, alpha) in basis.iter().enumerate() {
            let mut v = C64::new(1.0, 0.0);
            for (i, &e) in alpha.exponents().iter().enumerate() {
                v *= powers[i][e as usize];
            }
            b[(j, col)] = v;
        }
    }
    Ok(b)
}

fn gram_for(
    curve: &ParamCurve,
    basis: &[MultiIndex],
    max_total_degree: usize,
    quad: usize,
) -> Result<DMatrix<C64>> {
    let b = boundary_matrix(curve, basis, max_total_degree, quad)?;
    let mut g = b.ad_mul(&b);
    g.scale_mut(1.0 / quad as f64);
    // exact Hermitian symmetry for the eigensolver
    let gt = g.adjoint();
    g = (g + gt).scale(0.5);
    Ok(g)
}

impl KernelSpace {
    /// Quadrature Gram of the monomial basis of total degree `<= max_total_degree`.
    ///
    /// Requires `quad_points >= 8 · (max coordinate Blaschke degree) ·
    /// max_total_degree + 8`; the constructor additionally recomputes the Gram
    /// at twice the grid and records the largest entry change, so an
    /// under-resolved quadrature is visible in [`KernelSpace::doubling_residual`].
    pub fn build(curve: ParamCurve, max_total_degree: usize, quad_points: usize) -> Result<Self> {
        Self::build_with_cutoff(curve, max_total_degree, quad_points, DEFAULT_PINV_CUTOFF)
    }

    pub fn build_with_cutoff(
        curve: ParamCurve,
        max_total_degree: usize,
        quad_points: usize,
        pinv_cutoff: f64,
    ) -> Result<Self> {
        if max_total_degree < 1 {
            return Err(Error::invalid("kernel space needs max_total_degree >= 1"));
        }
        let max_coord_degree =
            curve.coords().iter().map(|m| m.blaschke_degree()).max().unwrap_or(0);
        let needed = 8 * max_coord_degree * max_total_degree + 8;
        if quad_points < needed {
            return Err(Error::QuadratureTooCoarse { needed, got: quad_points });
        }
        let basis = graded_monomials(curve.dim(), max_total_degree);
        let gram = gram_for(&curve, &basis, max_total_degree, quad_points)?;
        let gram2 = gram_for(&curve, &basis, max_total_degree, 2 * quad_points)?;
        let doubling_residual = (&gram - &gram2)
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        Self::assemble(curve, max_total_degree, quad_points, pinv_cutoff, basis, gram, doubling_residual)
    }

    /// Rebuild from a stored Gram matrix (certificate replay path).
    pub(crate) fn from_parts(
        curve: ParamCurve,
        max_total_degree: usize,
        quad_points: usize,
        pinv_cutoff: f64,
        gram: DMatrix<C64>,
        doubling_residual: f64,
    ) -> Result<Self> {
        let basis = graded_monomials(curve.dim(), max_total_degree);
        if gram.nrows() != basis.len() || gram.ncols() != basis.len() {
            return Err(Error::invalid(format!(
                "gram matrix is {}x{} but the basis has {} monomials",
                gram.nrows(),
                gram.ncols(),
                basis.len()
            )));
        }
        Self::assemble(curve, max_total_degree, quad_points, pinv_cutoff, basis, gram, doubling_residual)
    }

    fn assemble(
        curve: ParamCurve,
        max_total_degree: usize,
        quad_points: usize,
        pinv_cutoff: f64,
        basis: Vec<MultiIndex>,
        gram: DMatrix<C64>,
        doubling_residual: f64,
    ) -> Result<Self> {
        let eigen = nalgebra::SymmetricEigen::new(gram.clone());
        let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[b].partial_cmp(&eigen.eigenvalues[a]).unwrap());
        let eigvals = DVector::from_fn(order.len(), |k, _| eigen.eigenvalues[order[k]]);
        let eigvecs = DMatrix::from_fn(gram.nrows(), order.len(), |i, k| {
            eigen.eigenvectors[(i, order[k])]
        });
        Ok(KernelSpace {
            curve,
            max_total_degree,
            quad_points,
            pinv_cutoff,
            basis,
            gram,
            eigvals,
            eigvecs,
            doubling_residual,
        })
    }

    pub fn curve(&self) -> &ParamCurve {
        &self.curve
    }

    pub fn max_total_degree(&self) -> usize {
        self.max_total_degree
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    pub fn pinv_cutoff(&self) -> f64 {
        self.pinv_cutoff
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn doubling_residual(&self) -> f64 {
        self.doubling_residual
    }

    pub fn quadrature_resolved(&self) -> bool {
        self.doubling_residual <= QUADRATURE_RESOLVED_TOL
    }

    /// Numerical rank of the Gram matrix at the pseudo-inverse cutoff; the
    /// dimension of the truncated pullback span.
    pub fn rank(&self) -> usize {
        let top = self.eigvals.iter().fold(0.0f64, |a, &b| a.max(b));
        self.eigvals.iter().filter(|&&l| l > self.pinv_cutoff * top).count()
    }

    fn pinv_apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let top = self.eigvals.iter().fold(0.0f64, |a, &b| a.max(b));
        let cut = self.pinv_cutoff * top;
        let proj = self.eigvecs.ad_mul(v);
        let filtered = DVector::from_fn(proj.len(), |k, _| {
            if self.eigvals[k] > cut {
                proj[k] / self.eigvals[k]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.eigvecs * filtered
    }

    /// Quadrature inner product `<f, g>` of two coefficient vectors.
    pub fn space_inner(&self, f: &DVector<C64>, g: &DVector<C64>) -> C64 {
        let gf = &self.gram * f;
        g.dotc(&gf)
    }

    /// Reproducing kernel vector at the curve point `γ(t)`, `|t| < 1`.
    ///
    /// Solves `gram · conj(c) = v` with `v_α = Φ_α(t)` through the spectral
    /// pseudo-inverse and reports the reproducing residual.
    pub fn kernel_at(&self, t: C64) -> Result<KernelVector> {
        if t.norm() >= 1.0 {
            return Err(Error::OutsideOpenDisc(t.norm()));
        }
        let point = self.curve.eval(t)?;
        let mut powers: Vec<Vec<C64>> = Vec::with_capacity(point.len());
        for zi in &point {
            let mut table = Vec::with_capacity(self.max_total_degree + 1);
            let mut acc = C64::new(1.0, 0.0);
            for _ in 0..=self.max_total_degree {
                table.push(acc);
                acc *= zi;
            }
            powers.push(table);
        }
        let v = DVector::from_fn(self.basis.len(), |row, _| {
            let mut m = C64::new(1.0, 0.0);
            for (i, &e) in self.basis[row].exponents().iter().enumerate() {
                m *= powers[i][e as usize];
            }
            m
        });
        let y = self.pinv_apply(&v);
        let residual = (&self.gram * &y - &v).iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        let coeffs = y.map(|c| c.conj());
        Ok(KernelVector { param: t, point, coeffs, residual })
    }

    /// Matrix `K[i][j] = <k_j, k_i>` of kernel inner products at the given
    /// parameters, computed through the quadrature pairing. Hermitian PSD.
    pub fn kernel_gram(&self, ts: &[C64]) -> Result<DMatrix<C64>> {
        let kvs = ts.iter().map(|&t| self.kernel_at(t)).collect::<Result<Vec<_>>>()?;
        self.check_distinct(&kvs)?;
        self.kernel_gram_of(&kvs)
    }

    pub(crate) fn check_distinct(&self, kvs: &[KernelVector]) -> Result<()> {
        for a in 0..kvs.len() {
            for b in (a + 1)..kvs.len() {
                let dist: f64 = kvs[a]
                    .point
                    .iter()
                    .zip(&kvs[b].point)
                    .map(|(x, y)| (x - y).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if dist < 1e-12 {
                    return Err(Error::DuplicateNode(a, b));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn kernel_gram_of(&self, kvs: &[KernelVector]) -> Result<DMatrix<C64>> {
        let n = kvs.len();
        let cols = DMatrix::from_fn(self.basis.len(), n, |i, j| kvs[j].coeffs[i]);
        let gc = &self.gram * &cols;
        // K[i][j] = <k_j, k_i> = c_i^H G c_j
        let mut k = cols.ad_mul(&gc);
        let kt = k.adjoint();
        k = (k + kt).scale(0.5);
        Ok(k)
    }
}

/// Product Szegő kernel matrix of the polydisc at the given nodes:
/// `K[i][j] = Π_l 1 / (1 - λ_{i,l} conj(λ_{j,l}))`.
pub fn ambient_szego(nodes: &[Vec<C64>]) -> Result<DMatrix<C64>> {
    if nodes.is_empty() {
        return Err(Error::invalid("need at least one node"));
    }
    let dim = nodes[0].len();
    for z in nodes {
        if z.len() != dim {
            return Err(Error::DimMismatch { expected: dim, got: z.len() });
        }
        if z.iter().any(|v| v.norm() >= 1.0) {
            return Err(Error::OutsidePolydisc);
        }
    }
    for a in 0..nodes.len() {
        for b in (a + 1)..nodes.len() {
            let dist: f64 = nodes[a]
                .iter()
                .zip(&nodes[b])
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if dist < 1e-12 {
                return Err(Error::DuplicateNode(a, b));
            }
        }
    }
    let n = nodes.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut v = C64::new(1.0, 0.0);
        for (a, b) in nodes[i].iter().zip(&nodes[j]) {
            v /= C64::new(1.0, 0.0) - a * b.conj();
        }
        v
    }))
}
