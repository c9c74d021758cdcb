//! Pick matrix assembly, singularity detection, the forced-value extension
//! formula and the certified problem constructor.
//!
//! For nodes on a curve with more samples than `deg_V(F)`, the Schur product
//! `W·K = ((1 - ω_i conj(ω_j)) k_ij)` is singular: it is the Gramian of the
//! vectors `(I - M_F M_F^*) k_{λ_i}`, whose span has dimension `deg_V(F)`. A
//! null vector turns singularity into a value forced at every new point where
//! the kernel combination `G` does not vanish:
//! `w = (Σ k_j γ_j) / (Σ conj(ω_j) k_j γ_j)`.
//! A certificate samples this forced agreement along the curve and pairs it
//! with perturbed inner functions that solve the same data but differ off the
//! curve.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{degree_on_curve, ParamCurve};
use crate::error::{Error, Result};
use crate::inner::{find_separating_eps, perturb, PerturbationSpec, RationalInner};
use crate::kernel::{ambient_szego, KernelSpace, KernelVector};
use crate::poly::C64;

/// Negative-eigenvalue slack allowed before PSD necessity counts as violated.
pub const PSD_TOL: f64 = 1e-8;

/// Where the kernel inner products come from.
#[derive(Clone, Debug)]
pub enum KernelSource {
    /// Product Szegő kernel of the ambient polydisc.
    AmbientSzego,
    /// Kernel of the truncated curve space at stored node parameters.
    Curve { space: Box<KernelSpace>, params: Vec<C64> },
}

/// Interpolation data plus the kernel it is posed against.
#[derive(Clone, Debug)]
pub struct PickProblem {
    nodes: Vec<Vec<C64>>,
    targets: Vec<C64>,
    kernel: KernelSource,
}

fn check_targets(targets: &[C64]) -> Result<()> {
    for (index, w) in targets.iter().enumerate() {
        if w.norm() > 1.0 + 1e-12 {
            return Err(Error::TargetOutsideDisc { index, modulus: w.norm() });
        }
    }
    Ok(())
}

fn check_distinct_points(nodes: &[Vec<C64>]) -> Result<()> {
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
    Ok(())
}

impl PickProblem {
    /// Problem against the ambient Szegő kernel of 𝔻ⁿ.
    pub fn ambient(nodes: Vec<Vec<C64>>, targets: Vec<C64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != targets.len() {
            return Err(Error::invalid("need equally many nodes and targets, at least one"));
        }
        let dim = nodes[0].len();
        if dim == 0 {
            return Err(Error::invalid("nodes must have dimension >= 1"));
        }
        for z in &nodes {
            if z.len() != dim {
                return Err(Error::DimMismatch { expected: dim, got: z.len() });
            }
            if z.iter().any(|v| v.norm() >= 1.0) {
                return Err(Error::OutsidePolydisc);
            }
        }
        check_distinct_points(&nodes)?;
        check_targets(&targets)?;
        Ok(PickProblem { nodes, targets, kernel: KernelSource::AmbientSzego })
    }

    /// Problem with nodes `γ(t_i)` against the curve kernel.
    pub fn on_curve(space: KernelSpace, params: Vec<C64>, targets: Vec<C64>) -> Result<Self> {
        if params.is_empty() || params.len() != targets.len() {
            return Err(Error::invalid("need equally many parameters and targets, at least one"));
        }
        let nodes = params
            .iter()
            .map(|&t| {
                if t.norm() >= 1.0 {
                    return Err(Error::OutsideOpenDisc(t.norm()));
                }
                space.curve().eval(t)
            })
            .collect::<Result<Vec<_>>>()?;
        check_distinct_points(&nodes)?;
        check_targets(&targets)?;
        Ok(PickProblem {
            nodes,
            targets,
            kernel: KernelSource::Curve { space: Box::new(space), params },
        })
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec<C64>] {
        &self.nodes
    }

    pub fn targets(&self) -> &[C64] {
        &self.targets
    }

    pub fn kernel(&self) -> &KernelSource {
        &self.kernel
    }

    /// The kernel space and parameters, when this is a curve problem.
    pub fn curve_kernel(&self) -> Result<(&KernelSpace, &[C64])> {
        match &self.kernel {
            KernelSource::Curve { space, params } => Ok((space, params)),
            KernelSource::AmbientSzego => Err(Error::NotCurveKernel),
        }
    }

    /// Kernel Gram matrix `K[i][j] = <k_j, k_i>` of the nodes.
    pub fn kernel_matrix(&self) -> Result<DMatrix<C64>> {
        match &self.kernel {
            KernelSource::AmbientSzego => ambient_szego(&self.nodes),
            KernelSource::Curve { space, params } => space.kernel_gram(params),
        }
    }
}

/// A point at which the extension formula is evaluated: a curve parameter for
/// curve kernels, an ambient point for the Szegő kernel.
#[derive(Clone, Debug)]
pub enum ExtensionPoint {
    Parameter(C64),
    Point(Vec<C64>),
}

/// Assembled Pick matrix with its full singular value decomposition.
#[derive(Clone, Debug)]
pub struct PickMatrix {
    w: DMatrix<C64>,
    k: DMatrix<C64>,
    wk: DMatrix<C64>,
    svals: Vec<f64>,
    right_vectors: DMatrix<C64>,
}

/// Schur product of `W = (1 - ω_i conj(ω_j))` with the kernel matrix, plus
/// its singular values in descending order.
pub fn build_pick_matrix(problem: &PickProblem) -> Result<PickMatrix> {
    let k = problem.kernel_matrix()?;
    let n = problem.len();
    let w = DMatrix::from_fn(n, n, |i, j| {
        C64::new(1.0, 0.0) - problem.targets[i] * problem.targets[j].conj()
    });
    let wk = w.component_mul(&k);
    let svd = wk.clone().svd(true, true);
    let v_t = svd.v_t.ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap()
    });
    let svals: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let right_vectors = DMatrix::from_fn(n, n, |row, col| v_t[(order[row], col)]);
    Ok(PickMatrix { w, k, wk, svals, right_vectors })
}

impl PickMatrix {
    pub fn w(&self) -> &DMatrix<C64> {
        &self.w
    }

    pub fn k(&self) -> &DMatrix<C64> {
        &self.k
    }

    pub fn wk(&self) -> &DMatrix<C64> {
        &self.wk
    }

    /// Singular values, descending.
    pub fn svals(&self) -> &[f64] {
        &self.svals
    }

    /// Number of singular values above `rel_tol · σ_1`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.svals.first().copied().unwrap_or(0.0);
        self.svals.iter().filter(|&&s| s > rel_tol * top).count()
    }

    /// Signed smallest eigenvalue over `σ_1`; PSD necessity means this should
    /// not be more negative than `-`[`PSD_TOL`].
    pub fn min_eig_ratio(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.wk.clone());
        let min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let top = self.svals.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
        min / top
    }

    /// Unit null vector for the smallest singular value, when
    /// `σ_min / σ_max < rel_tol`. The first component of non-negligible
    /// modulus is rotated positive-real for determinism.
    pub fn null_vector(&self, rel_tol: f64) -> Option<DVector<C64>> {
        let n = self.svals.len();
        let top = self.svals[0];
        let bottom = self.svals[n - 1];
        if top <= 0.0 || bottom / top >= rel_tol {
            return None;
        }
        let mut v: DVector<C64> = self.right_vectors.row(n - 1).adjoint();
        let scale = v.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if let Some(first) = v.iter().find(|c| c.norm() > 1e-8 * scale) {
            let phase = first.conj() / first.norm();
            v *= phase;
        }
        let norm = v.norm();
        Some(v / C64::new(norm, 0.0))
    }
}

/// Row of kernel values `k_{N+1,j} = k_{λ_j}(λ_{N+1})` at a new point.
fn kernel_row(problem: &PickProblem, at: &ExtensionPoint) -> Result<DVector<C64>> {
    match (&problem.kernel, at) {
        (KernelSource::Curve { space, params }, ExtensionPoint::Parameter(t)) => {
            let k_new = space.kernel_at(*t)?;
            let rows = params
                .iter()
                .map(|&tj| {
                    let kj = space.kernel_at(tj)?;
                    Ok(space.space_inner(&kj.coeffs, &k_new.coeffs))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DVector::from_vec(rows))
        }
        (KernelSource::AmbientSzego, ExtensionPoint::Point(z)) => {
            if z.len() != problem.dim() {
                return Err(Error::DimMismatch { expected: problem.dim(), got: z.len() });
            }
            if z.iter().any(|v| v.norm() >= 1.0) {
                return Err(Error::OutsidePolydisc);
            }
            let rows = problem
                .nodes
                .iter()
                .map(|node| {
                    let mut v = C64::new(1.0, 0.0);
                    for (zl, nl) in z.iter().zip(node) {
                        v /= C64::new(1.0, 0.0) - zl * nl.conj();
                    }
                    v
                })
                .collect();
            Ok(DVector::from_vec(rows))
        }
        (KernelSource::Curve { .. }, ExtensionPoint::Point(_)) => Err(Error::invalid(
            "curve-kernel problems are extended at curve parameters, not ambient points",
        )),
        (KernelSource::AmbientSzego, ExtensionPoint::Parameter(_)) => Err(Error::NotCurveKernel),
    }
}

/// Value forced at a new point by a null vector `γ` of the Pick matrix:
/// `(Σ k_j γ_j) / (Σ conj(ω_j) k_j γ_j)`.
///
/// Errors when the point lies in the zero set of `G = Σ γ_j k_{λ_j}` relative
/// to `denom_tol` — outside that zero set the value of every solution is
/// determined.
pub fn extend_value(
    problem: &PickProblem,
    gamma: &DVector<C64>,
    at: &ExtensionPoint,
    denom_tol: f64,
) -> Result<C64> {
    if gamma.len() != problem.len() {
        return Err(Error::DimMismatch { expected: problem.len(), got: gamma.len() });
    }
    let row = kernel_row(problem, at)?;
    let mut num = C64::new(0.0, 0.0);
    let mut den = C64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for j in 0..problem.len() {
        let term = row[j] * gamma[j];
        num += term;
        den += problem.targets[j].conj() * term;
        scale += term.norm();
    }
    if den.norm() <= denom_tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::OutsideUniquenessDomain(den.norm() / scale.max(f64::MIN_POSITIVE)));
    }
    Ok(num / den)
}

/// Kernel-space size used when constructing problems.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KernelConfig {
    pub max_total_degree: usize,
    pub quad_points: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { max_total_degree: 16, quad_points: 4096 }
    }
}

/// Output of [`construct_problem`].
#[derive(Clone, Debug)]
pub struct Constructed {
    pub problem: PickProblem,
    /// Degree of the generating function on the curve.
    pub deg_v: usize,
    /// Whether the defining polynomials satisfy the degree condition that
    /// guarantees the perturbation family exists. When false, only the
    /// forced-agreement half of a certificate can be expected to pass.
    pub perturbation_guarantee: bool,
}

/// Sample `n_nodes` parameters on the circle of the given radius, target them
/// with `F`, and pose the problem against the curve kernel.
///
/// Requires `n_nodes > deg_V(F)`, which is what makes the Pick matrix
/// singular by construction.
pub fn construct_problem(
    curve: &ParamCurve,
    f: &RationalInner,
    n_nodes: usize,
    radius: f64,
    kernel_cfg: KernelConfig,
) -> Result<Constructed> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::invalid("node radius must lie in (0, 1)"));
    }
    let deg_v = degree_on_curve(curve, f)?;
    if n_nodes <= deg_v {
        return Err(Error::InsufficientNodes { deg: deg_v, got: n_nodes });
    }
    let perturbation_guarantee = match curve.defining_polys() {
        Some(polys) => {
            let bound = f.ndeg();
            polys.iter().all(|p| p.ndeg().map(|r| r.le(&bound)).unwrap_or(false))
        }
        None => false,
    };
    let params: Vec<C64> = (0..n_nodes)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n_nodes as f64;
            C64::new(radius * th.cos(), radius * th.sin())
        })
        .collect();
    let targets = params
        .iter()
        .map(|&t| f.eval(&curve.eval(t)?))
        .collect::<Result<Vec<_>>>()?;
    let space = KernelSpace::build(
        curve.clone(),
        kernel_cfg.max_total_degree,
        kernel_cfg.quad_points,
    )?;
    let problem = PickProblem::on_curve(space, params, targets)?;
    Ok(Constructed { problem, deg_v, perturbation_guarantee })
}

/// Tolerances and sample counts for [`certify`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub seed: u64,
    /// Singular values above `rank_rel_tol · σ_1` count toward the rank.
    pub rank_rel_tol: f64,
    /// `σ_min/σ_1` below this yields a null vector.
    pub null_rel_tol: f64,
    /// Allowed deviation between extended and generating values on the curve.
    pub extension_tol: f64,
    /// Required separation `|F_ε(z) - F(z)|` at off-curve witnesses.
    pub witness_tol: f64,
    /// Allowed node interpolation error of a perturbation witness.
    pub interp_tol: f64,
    /// Allowed boundary unimodularity defect of a perturbation witness.
    pub boundary_tol: f64,
    /// Relative cutoff below which an extension denominator counts as in the
    /// zero set of G.
    pub denom_tol: f64,
    pub on_curve_samples: usize,
    pub witness_count: usize,
    /// Parameters for on-curve samples are drawn with `|t| <=` this.
    pub sample_radius: f64,
    /// Witness points closer to the curve than this are re-drawn.
    pub curve_distance_min: f64,
    /// Fixed perturbation size; `None` searches the decreasing sequence.
    pub epsilon: Option<f64>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            seed: 0,
            rank_rel_tol: 1e-8,
            null_rel_tol: 1e-8,
            extension_tol: 1e-6,
            witness_tol: 1e-6,
            interp_tol: 1e-10,
            boundary_tol: 1e-9,
            denom_tol: 1e-8,
            on_curve_samples: 100,
            witness_count: 10,
            sample_radius: 0.8,
            curve_distance_min: 0.05,
            epsilon: None,
        }
    }
}

/// One named pass/fail check inside a certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Forced value along the curve versus the generating function.
#[derive(Clone, Debug)]
pub struct OnCurveSample {
    pub t: C64,
    pub extended: C64,
    pub reference: C64,
    pub deviation: f64,
}

/// A perturbed solution separating from the generating function off the curve.
#[derive(Clone, Debug)]
pub struct OffCurveWitness {
    pub point: Vec<C64>,
    pub eps: f64,
    pub separation: f64,
    pub interp_error: f64,
    pub boundary_deviation: f64,
    pub pass: bool,
}

/// Two-sided numerical evidence that the set of uniqueness of the problem is
/// the curve: forced agreement on sampled curve points, explicit disagreeing
/// solutions at sampled off-curve points.
#[derive(Clone, Debug)]
pub struct UniquenessCertificate {
    pub dim: usize,
    pub num_nodes: usize,
    pub deg_v: usize,
    pub svals: Vec<f64>,
    pub rank_estimate: usize,
    pub min_eig_ratio: f64,
    pub gamma: Option<Vec<C64>>,
    pub on_curve: Vec<OnCurveSample>,
    pub witnesses: Vec<OffCurveWitness>,
    pub clauses: Vec<Clause>,
    pub config: CertifyConfig,
    pub kernel_degree: usize,
    pub kernel_quad: usize,
    pub kernel_doubling_residual: f64,
}

impl UniquenessCertificate {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

/// Grid of curve points for distance-to-curve estimation.
fn curve_point_cloud(curve: &ParamCurve) -> Result<Vec<Vec<C64>>> {
    let mut cloud = Vec::new();
    for r_idx in 0..16 {
        let r = 0.98 * (r_idx as f64 + 0.5) / 16.0;
        for a_idx in 0..64 {
            let th = std::f64::consts::TAU * a_idx as f64 / 64.0;
            cloud.push(curve.eval(C64::new(r * th.cos(), r * th.sin()))?);
        }
    }
    Ok(cloud)
}

fn distance_to_cloud(z: &[C64], cloud: &[Vec<C64>]) -> f64 {
    cloud
        .iter()
        .map(|p| {
            p.iter()
                .zip(z)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Run every certificate check for a curve-kernel problem generated by `f`.
///
/// Sub-check failures become failed clauses, not errors; errors are reserved
/// for problems the certifier cannot even pose (wrong kernel type, degree
/// formula inconsistency).
pub fn certify(
    problem: &PickProblem,
    f: &RationalInner,
    config: &CertifyConfig,
) -> Result<UniquenessCertificate> {
    let (space, _params) = problem.curve_kernel()?;
    let curve = space.curve().clone();
    let deg_v = degree_on_curve(&curve, f)?;
    let pm = build_pick_matrix(problem)?;
    let mut clauses = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let min_eig_ratio = pm.min_eig_ratio();
    clauses.push(Clause {
        name: "psd".into(),
        pass: min_eig_ratio >= -PSD_TOL,
        detail: format!("min eigenvalue ratio {min_eig_ratio:.3e} (allowed >= -{PSD_TOL:.0e})"),
    });

    let rank_estimate = pm.numerical_rank(config.rank_rel_tol);
    clauses.push(Clause {
        name: "rank_bound".into(),
        pass: rank_estimate <= deg_v,
        detail: format!("numerical rank {rank_estimate} <= deg_V(F) = {deg_v}"),
    });

    let gamma = pm.null_vector(config.null_rel_tol);
    let sval_ratio = pm.svals().last().copied().unwrap_or(0.0)
        / pm.svals().first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    clauses.push(Clause {
        name: "null_vector".into(),
        pass: gamma.is_some(),
        detail: format!("sigma_min/sigma_1 = {sval_ratio:.3e} (threshold {:.0e})", config.null_rel_tol),
    });

    // (c) forced agreement along the curve
    let mut on_curve = Vec::new();
    if let Some(g) = &gamma {
        let mut attempts = 0;
        while on_curve.len() < config.on_curve_samples && attempts < 20 * config.on_curve_samples {
            attempts += 1;
            let r = config.sample_radius * rng.random_range(0.0f64..1.0).sqrt();
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let t = C64::new(r * th.cos(), r * th.sin());
            let extended = match extend_value(problem, g, &ExtensionPoint::Parameter(t), config.denom_tol)
            {
                Ok(v) => v,
                Err(Error::OutsideUniquenessDomain(_)) => continue,
                Err(e) => return Err(e),
            };
            let reference = f.eval(&curve.eval(t)?)?;
            let deviation = (extended - reference).norm();
            on_curve.push(OnCurveSample { t, extended, reference, deviation });
        }
    }
    let worst_deviation = on_curve.iter().map(|s| s.deviation).fold(0.0f64, f64::max);
    let agreement_pass =
        on_curve.len() >= config.on_curve_samples && worst_deviation <= config.extension_tol;
    clauses.push(Clause {
        name: "on_curve_agreement".into(),
        pass: agreement_pass,
        detail: if gamma.is_some() {
            format!(
                "{} samples, worst |extend - F∘γ| = {worst_deviation:.3e} (allowed {:.0e})",
                on_curve.len(),
                config.extension_tol
            )
        } else {
            "no null vector, extension formula unavailable".into()
        },
    });

    // (d) disagreeing solutions off the curve
    let mut witnesses = Vec::new();
    let mut witness_detail = String::new();
    match curve.defining_polys() {
        None => {
            witness_detail = "curve carries no defining polynomials; perturbation family unavailable".into();
        }
        Some(polys) => {
            let cloud = curve_point_cloud(&curve)?;
            let mut attempts = 0;
            while witnesses.len() < config.witness_count && attempts < 50 * config.witness_count {
                attempts += 1;
                let z: Vec<C64> = (0..problem.dim())
                    .map(|_| {
                        let r: f64 = rng.random_range(0.0f64..1.0).sqrt() * 0.95;
                        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        C64::new(r * th.cos(), r * th.sin())
                    })
                    .collect();
                if distance_to_cloud(&z, &cloud) < config.curve_distance_min {
                    continue;
                }
                if polys.iter().all(|p| p.eval(&z).map(|v| v.norm() < 1e-12).unwrap_or(true)) {
                    continue;
                }
                let witness_seed = rng.random::<u64>();
                let candidate = match config.epsilon {
                    Some(eps) => {
                        let mut best = (0usize, 0.0f64);
                        for (i, p) in polys.iter().enumerate() {
                            let v = p.eval(&z)?.norm();
                            if v > best.1 {
                                best = (i, v);
                            }
                        }
                        let mut eps_vec = vec![0.0; polys.len()];
                        eps_vec[best.0] = eps;
                        let spec = PerturbationSpec::new(
                            f.clone(),
                            polys.to_vec(),
                            eps_vec,
                            vec![0.0; polys.len()],
                        )?;
                        match perturb(&spec) {
                            Ok(function) => {
                                let separation =
                                    (function.eval(&z)? - f.eval(&z)?).norm();
                                Some((eps, separation, function))
                            }
                            Err(Error::NotInner { .. }) => None,
                            Err(e) => return Err(e),
                        }
                    }
                    None => find_separating_eps(f, polys, &z, config.witness_tol)?
                        .map(|w| (w.eps, w.separation, w.function)),
                };
                let Some((eps, separation, function)) = candidate else {
                    witnesses.push(OffCurveWitness {
                        point: z,
                        eps: 0.0,
                        separation: 0.0,
                        interp_error: f64::INFINITY,
                        boundary_deviation: f64::INFINITY,
                        pass: false,
                    });
                    continue;
                };
                let mut interp_error = 0.0f64;
                for (node, target) in problem.nodes().iter().zip(problem.targets()) {
                    interp_error = interp_error.max((function.eval(node)? - target).norm());
                }
                let boundary_deviation = function.check_inner_boundary(1000, witness_seed)?;
                let pass = separation > config.witness_tol
                    && interp_error <= config.interp_tol
                    && boundary_deviation <= config.boundary_tol;
                witnesses.push(OffCurveWitness {
                    point: z,
                    eps,
                    separation,
                    interp_error,
                    boundary_deviation,
                    pass,
                });
            }
        }
    }
    let witnesses_pass =
        witnesses.len() >= config.witness_count && witnesses.iter().all(|w| w.pass);
    if witness_detail.is_empty() {
        let passed = witnesses.iter().filter(|w| w.pass).count();
        witness_detail = format!(
            "{passed}/{} witnesses separate by > {:.0e}, interpolate to {:.0e}, stay inner to {:.0e}",
            witnesses.len(),
            config.witness_tol,
            config.interp_tol,
            config.boundary_tol
        );
    }
    clauses.push(Clause {
        name: "off_curve_separation".into(),
        pass: witnesses_pass,
        detail: witness_detail,
    });

    Ok(UniquenessCertificate {
        dim: problem.dim(),
        num_nodes: problem.len(),
        deg_v,
        svals: pm.svals().to_vec(),
        rank_estimate,
        min_eig_ratio,
        gamma: gamma.map(|g| g.iter().copied().collect()),
        on_curve,
        witnesses,
        clauses,
        config: config.clone(),
        kernel_degree: space.max_total_degree(),
        kernel_quad: space.quad_points(),
        kernel_doubling_residual: space.doubling_residual(),
    })
}

/// Node kernel vectors of a curve problem, for callers that need them.
pub fn node_kernel_vectors(problem: &PickProblem) -> Result<Vec<KernelVector>> {
    let (space, params) = problem.curve_kernel()?;
    params.iter().map(|&t| space.kernel_at(t)).collect()
}
