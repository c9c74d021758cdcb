//! Versioned JSON encodings for every file format the CLI reads and writes.
//!
//! Complex scalars are `[re, im]` pairs; polynomial terms are listed in
//! lexicographic exponent order, which the sparse representation produces for
//! free. Problem and certificate files carry `"format": 1`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curve::{OneVarInner, ParamCurve};
use crate::error::{Error, Result};
use crate::inner::{PerturbationSpec, RationalFn, RationalInner};
use crate::kernel::KernelSpace;
use crate::pick::{
    CertifyConfig, Clause, KernelSource, PickProblem, UniquenessCertificate,
};
use crate::poly::{C64, MultiIndex, MultiPoly};

pub const FORMAT_VERSION: u32 = 1;

/// `[re, im]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Cx(pub f64, pub f64);

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx(z.re, z.im)
    }
}

impl From<Cx> for C64 {
    fn from(z: Cx) -> Self {
        C64::new(z.0, z.1)
    }
}

fn cx_vec(zs: &[C64]) -> Vec<Cx> {
    zs.iter().map(|&z| z.into()).collect()
}

fn c64_vec(zs: &[Cx]) -> Vec<C64> {
    zs.iter().map(|&z| z.into()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub exp: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub dim: usize,
    pub terms: Vec<PolyTermJson>,
}

impl From<&MultiPoly> for PolyJson {
    fn from(p: &MultiPoly) -> Self {
        PolyJson {
            dim: p.dim(),
            terms: p
                .terms()
                .map(|(a, c)| PolyTermJson { exp: a.exponents().to_vec(), re: c.re, im: c.im })
                .collect(),
        }
    }
}

impl TryFrom<&PolyJson> for MultiPoly {
    type Error = Error;

    fn try_from(j: &PolyJson) -> Result<MultiPoly> {
        if j.dim == 0 {
            return Err(Error::invalid("polynomial dimension must be >= 1"));
        }
        MultiPoly::from_terms(
            j.dim,
            j.terms.iter().map(|t| (t.exp.clone(), C64::new(t.re, t.im))),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InnerJson {
    pub tau: Cx,
    pub m: Vec<u32>,
    pub q: PolyJson,
}

impl From<&RationalInner> for InnerJson {
    fn from(f: &RationalInner) -> Self {
        InnerJson {
            tau: f.tau().into(),
            m: f.monomial_exponent().exponents().to_vec(),
            q: f.denominator().into(),
        }
    }
}

impl TryFrom<&InnerJson> for RationalInner {
    type Error = Error;

    fn try_from(j: &InnerJson) -> Result<RationalInner> {
        if j.m.is_empty() {
            return Err(Error::invalid("monomial exponent must have dimension >= 1"));
        }
        let q = MultiPoly::try_from(&j.q)?;
        RationalInner::new(j.tau.into(), MultiIndex::new(j.m.clone()), q)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalFnJson {
    pub num: PolyJson,
    pub den: PolyJson,
}

impl From<&RationalFn> for RationalFnJson {
    fn from(f: &RationalFn) -> Self {
        RationalFnJson { num: f.numerator().into(), den: f.denominator().into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoordJson {
    pub tau: Cx,
    pub power: u32,
    pub zeros: Vec<Cx>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveJson {
    pub coords: Vec<CoordJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defining_polys: Option<Vec<PolyJson>>,
}

impl From<&ParamCurve> for CurveJson {
    fn from(c: &ParamCurve) -> Self {
        CurveJson {
            coords: c
                .coords()
                .iter()
                .map(|m| CoordJson {
                    tau: m.tau().into(),
                    power: m.power(),
                    zeros: m.zeros().map(Cx::from).collect(),
                })
                .collect(),
            defining_polys: c
                .defining_polys()
                .map(|ps| ps.iter().map(PolyJson::from).collect()),
        }
    }
}

impl TryFrom<&CurveJson> for ParamCurve {
    type Error = Error;

    fn try_from(j: &CurveJson) -> Result<ParamCurve> {
        let coords = j
            .coords
            .iter()
            .map(|c| OneVarInner::new(c.tau.into(), c.power, c64_vec(&c.zeros)))
            .collect::<Result<Vec<_>>>()?;
        let polys = match &j.defining_polys {
            Some(ps) => Some(ps.iter().map(MultiPoly::try_from).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        ParamCurve::new(coords, polys)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbationJson {
    pub base: InnerJson,
    pub polys: Vec<PolyJson>,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
}

impl From<&PerturbationSpec> for PerturbationJson {
    fn from(s: &PerturbationSpec) -> Self {
        PerturbationJson {
            base: s.base().into(),
            polys: s.polys().iter().map(PolyJson::from).collect(),
            eps: s.eps().to_vec(),
            delta: s.delta().to_vec(),
        }
    }
}

impl TryFrom<&PerturbationJson> for PerturbationSpec {
    type Error = Error;

    fn try_from(j: &PerturbationJson) -> Result<PerturbationSpec> {
        let base = RationalInner::try_from(&j.base)?;
        let polys = j.polys.iter().map(MultiPoly::try_from).collect::<Result<Vec<_>>>()?;
        PerturbationSpec::new(base, polys, j.eps.clone(), j.delta.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveKernelJson {
    pub curve: CurveJson,
    pub params: Vec<Cx>,
    pub degree: usize,
    pub quad: usize,
}

/// `"szego"` or a curve-kernel description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelJson {
    Named(String),
    Curve(CurveKernelJson),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemJson {
    pub format: u32,
    pub dim: usize,
    pub nodes: Vec<Vec<Cx>>,
    pub targets: Vec<Cx>,
    pub kernel: KernelJson,
}

impl From<&PickProblem> for ProblemJson {
    fn from(p: &PickProblem) -> Self {
        let kernel = match p.kernel() {
            KernelSource::AmbientSzego => KernelJson::Named("szego".into()),
            KernelSource::Curve { space, params } => KernelJson::Curve(CurveKernelJson {
                curve: space.curve().into(),
                params: cx_vec(params),
                degree: space.max_total_degree(),
                quad: space.quad_points(),
            }),
        };
        ProblemJson {
            format: FORMAT_VERSION,
            dim: p.dim(),
            nodes: p.nodes().iter().map(|z| cx_vec(z)).collect(),
            targets: cx_vec(p.targets()),
            kernel,
        }
    }
}

/// Rebuild a problem; `space` substitutes a pre-built kernel space (snapshot
/// replay) and must match the file's curve, degree and quadrature.
pub fn problem_from_json(j: &ProblemJson, space: Option<KernelSpace>) -> Result<PickProblem> {
    if j.format != FORMAT_VERSION {
        return Err(Error::invalid(format!("unsupported format version {}", j.format)));
    }
    let targets = c64_vec(&j.targets);
    let nodes: Vec<Vec<C64>> = j.nodes.iter().map(|z| c64_vec(z)).collect();
    match &j.kernel {
        KernelJson::Named(name) if name == "szego" => {
            if space.is_some() {
                return Err(Error::invalid("a kernel snapshot only applies to curve kernels"));
            }
            PickProblem::ambient(nodes, targets)
        }
        KernelJson::Named(name) => Err(Error::invalid(format!("unknown kernel '{name}'"))),
        KernelJson::Curve(ck) => {
            let space = match space {
                Some(s) => {
                    if s.max_total_degree() != ck.degree || s.quad_points() != ck.quad {
                        return Err(Error::invalid(
                            "kernel snapshot degree/quadrature do not match the problem",
                        ));
                    }
                    let snap_curve = CurveJson::from(s.curve());
                    if serde_json::to_string(&snap_curve)? != serde_json::to_string(&ck.curve)? {
                        return Err(Error::invalid(
                            "kernel snapshot curve does not match the problem",
                        ));
                    }
                    s
                }
                None => {
                    let curve = ParamCurve::try_from(&ck.curve)?;
                    KernelSpace::build(curve, ck.degree, ck.quad)?
                }
            };
            let params = c64_vec(&ck.params);
            let problem = PickProblem::on_curve(space, params, targets)?;
            // stored nodes must agree with the curve points of the parameters
            for (index, (stored, derived)) in j.nodes.iter().zip(problem.nodes()).enumerate() {
                let err: f64 = stored
                    .iter()
                    .zip(derived)
                    .map(|(a, b)| (C64::from(*a) - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if err > 1e-10 {
                    return Err(Error::NodeOffCurve { index, error: err });
                }
            }
            Ok(problem)
        }
    }
}

/// Kernel-space snapshot: everything needed to replay certificates without
/// redoing the quadrature.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotJson {
    pub format: u32,
    pub curve: CurveJson,
    pub degree: usize,
    pub quad_points: usize,
    pub pinv_cutoff: f64,
    pub doubling_residual: f64,
    /// Row-major Gram entries.
    pub gram: Vec<Cx>,
}

impl From<&KernelSpace> for SnapshotJson {
    fn from(s: &KernelSpace) -> Self {
        let g = s.gram();
        let mut gram = Vec::with_capacity(g.nrows() * g.ncols());
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                gram.push(g[(i, j)].into());
            }
        }
        SnapshotJson {
            format: FORMAT_VERSION,
            curve: s.curve().into(),
            degree: s.max_total_degree(),
            quad_points: s.quad_points(),
            pinv_cutoff: s.pinv_cutoff(),
            doubling_residual: s.doubling_residual(),
            gram,
        }
    }
}

impl TryFrom<&SnapshotJson> for KernelSpace {
    type Error = Error;

    fn try_from(j: &SnapshotJson) -> Result<KernelSpace> {
        if j.format != FORMAT_VERSION {
            return Err(Error::invalid(format!("unsupported format version {}", j.format)));
        }
        let curve = ParamCurve::try_from(&j.curve)?;
        let n = (j.gram.len() as f64).sqrt().round() as usize;
        if n * n != j.gram.len() {
            return Err(Error::invalid("gram entry count is not a perfect square"));
        }
        let gram = DMatrix::from_fn(n, n, |i, k| C64::from(j.gram[i * n + k]));
        KernelSpace::from_parts(
            curve,
            j.degree,
            j.quad_points,
            j.pinv_cutoff,
            gram,
            j.doubling_residual,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OnCurveSampleJson {
    pub t: Cx,
    pub extended: Cx,
    pub reference: Cx,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub point: Vec<Cx>,
    pub eps: f64,
    pub separation: f64,
    pub interp_error: f64,
    pub boundary_deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub format: u32,
    pub dim: usize,
    pub num_nodes: usize,
    pub nodes: Vec<Vec<Cx>>,
    pub targets: Vec<Cx>,
    pub kernel: KernelJson,
    pub deg_v: usize,
    pub svals: Vec<f64>,
    pub rank_estimate: usize,
    pub min_eig_ratio: f64,
    pub gamma: Option<Vec<Cx>>,
    pub on_curve: Vec<OnCurveSampleJson>,
    pub witnesses: Vec<WitnessJson>,
    pub clauses: Vec<Clause>,
    pub tolerances: CertifyConfig,
    pub kernel_doubling_residual: f64,
}

pub fn certificate_to_json(
    problem: &PickProblem,
    cert: &UniquenessCertificate,
) -> CertificateJson {
    certificate_to_json_parts(&ProblemJson::from(problem), cert)
}

/// Same as [`certificate_to_json`] for callers that already hold the
/// problem's JSON form.
pub fn certificate_to_json_parts(
    problem: &ProblemJson,
    cert: &UniquenessCertificate,
) -> CertificateJson {
    let pj = problem.clone();
    CertificateJson {
        format: FORMAT_VERSION,
        dim: cert.dim,
        num_nodes: cert.num_nodes,
        nodes: pj.nodes,
        targets: pj.targets,
        kernel: pj.kernel,
        deg_v: cert.deg_v,
        svals: cert.svals.clone(),
        rank_estimate: cert.rank_estimate,
        min_eig_ratio: cert.min_eig_ratio,
        gamma: cert.gamma.as_ref().map(|g| cx_vec(g)),
        on_curve: cert
            .on_curve
            .iter()
            .map(|s| OnCurveSampleJson {
                t: s.t.into(),
                extended: s.extended.into(),
                reference: s.reference.into(),
                deviation: s.deviation,
            })
            .collect(),
        witnesses: cert
            .witnesses
            .iter()
            .map(|w| WitnessJson {
                point: cx_vec(&w.point),
                eps: w.eps,
                separation: w.separation,
                interp_error: w.interp_error,
                boundary_deviation: w.boundary_deviation,
                pass: w.pass,
            })
            .collect(),
        clauses: cert.clauses.clone(),
        tolerances: cert.config.clone(),
        kernel_doubling_residual: cert.kernel_doubling_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::OneVarInner;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn neil_curve() -> ParamCurve {
        ParamCurve::new(
            vec![OneVarInner::monomial(2), OneVarInner::monomial(3)],
            Some(vec![MultiPoly::from_terms(
                2,
                vec![(vec![3, 0], c(1.0, 0.0)), (vec![0, 2], c(-1.0, 0.0))],
            )
            .unwrap()]),
        )
        .unwrap()
    }

    #[test]
    fn poly_round_trip_is_canonical() {
        let p = MultiPoly::from_terms(
            2,
            vec![
                (vec![0, 2], c(-1.0, 0.0)),
                (vec![3, 0], c(1.0, 0.5)),
                (vec![0, 0], c(0.25, -0.125)),
            ],
        )
        .unwrap();
        let j = PolyJson::from(&p);
        // lexicographic exponent order
        assert_eq!(j.terms[0].exp, vec![0, 0]);
        assert_eq!(j.terms[1].exp, vec![0, 2]);
        assert_eq!(j.terms[2].exp, vec![3, 0]);
        let back = MultiPoly::try_from(&j).unwrap();
        assert!(back.approx_eq(&p, 0.0));
        let s1 = serde_json::to_string(&j).unwrap();
        let s2 = serde_json::to_string(&PolyJson::from(&back)).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn curve_round_trip() {
        let curve = neil_curve();
        let j = CurveJson::from(&curve);
        let back = ParamCurve::try_from(&j).unwrap();
        assert_eq!(back.dim(), 2);
        assert_eq!(back.rank(), curve.rank());
        let t = c(0.3, -0.2);
        assert_eq!(back.eval(t).unwrap(), curve.eval(t).unwrap());
    }

    #[test]
    fn inner_round_trip() {
        let q = MultiPoly::from_terms(
            2,
            vec![(vec![0, 0], c(1.0, 0.0)), (vec![1, 1], c(0.2, 0.1))],
        )
        .unwrap();
        let f = RationalInner::new(c(0.0, 1.0), MultiIndex::new(vec![2, 0]), q).unwrap();
        let j = InnerJson::from(&f);
        let back = RationalInner::try_from(&j).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        assert!((back.eval(&z).unwrap() - f.eval(&z).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn problem_and_snapshot_round_trip() {
        let curve = neil_curve();
        let space = KernelSpace::build(curve, 4, 256).unwrap();
        let params = vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.3, 0.2)];
        let f = RationalInner::monomial(MultiIndex::new(vec![3, 2]));
        let targets: Vec<C64> = params
            .iter()
            .map(|&t| f.eval(&space.curve().eval(t).unwrap()).unwrap())
            .collect();
        let problem = PickProblem::on_curve(space, params, targets).unwrap();

        let pj = ProblemJson::from(&problem);
        let text = serde_json::to_string_pretty(&pj).unwrap();
        let parsed: ProblemJson = serde_json::from_str(&text).unwrap();
        let back = problem_from_json(&parsed, None).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.dim(), 2);

        // snapshot replay skips quadrature and reproduces the same kernel
        let (space, _) = problem.curve_kernel().unwrap();
        let sj = SnapshotJson::from(space);
        let restored = KernelSpace::try_from(&sj).unwrap();
        let k1 = space.kernel_gram(&[c(0.2, 0.1)]).unwrap();
        let k2 = restored.kernel_gram(&[c(0.2, 0.1)]).unwrap();
        assert!((k1[(0, 0)] - k2[(0, 0)]).norm() < 1e-14);
        let replayed = problem_from_json(&parsed, Some(restored)).unwrap();
        assert_eq!(replayed.len(), 3);
    }

    #[test]
    fn corrupted_nodes_are_rejected() {
        let curve = neil_curve();
        let space = KernelSpace::build(curve, 4, 256).unwrap();
        let params = vec![c(0.5, 0.0), c(0.0, 0.5)];
        let problem =
            PickProblem::on_curve(space, params, vec![c(0.0, 0.0), c(0.1, 0.0)]).unwrap();
        let mut pj = ProblemJson::from(&problem);
        pj.nodes[0][0] = Cx(0.9, 0.0);
        assert!(matches!(
            problem_from_json(&pj, None),
            Err(Error::NodeOffCurve { index: 0, .. })
        ));
    }

    #[test]
    fn szego_problem_round_trip() {
        let problem = PickProblem::ambient(
            vec![vec![c(0.0, 0.0)], vec![c(0.5, 0.0)]],
            vec![c(0.0, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        let pj = ProblemJson::from(&problem);
        let text = serde_json::to_string(&pj).unwrap();
        assert!(text.contains("\"szego\""));
        let parsed: ProblemJson = serde_json::from_str(&text).unwrap();
        let back = problem_from_json(&parsed, None).unwrap();
        assert!(matches!(back.kernel(), KernelSource::AmbientSzego));
    }
}
