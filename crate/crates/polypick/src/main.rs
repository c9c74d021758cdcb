//! Command-line front end: construct, certify, extend, degree, perturb,
//! kernel-gram, and the Neil-parabola demonstration.
//!
//! Human-readable summaries go to stdout; machine artifacts go to `--out`
//! files, never mixed. Exit codes: 0 all checks pass, 1 input or validation
//! error, 2 a certificate was written but some clause failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polypick::schema::{
    self, CertificateJson, CurveJson, InnerJson, PerturbationJson, ProblemJson, RationalFnJson,
    SnapshotJson,
};
use polypick::{
    build_pick_matrix, certify, construct_problem, extend_value, CertifyConfig, Error,
    ExtensionPoint, KernelConfig, KernelSpace, MultiIndex, MultiPoly, OneVarInner, ParamCurve,
    PickProblem, RationalInner, Result, C64,
};

#[derive(Parser)]
#[command(name = "polypick", version, about = "Nevanlinna-Pick problems with a prescribed curve of uniqueness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Pick problem from curve samples of a rational inner function.
    Construct {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        function: PathBuf,
        /// Number of nodes; must exceed deg_V(F).
        #[arg(long)]
        nodes: usize,
        /// Radius of the parameter circle the nodes sit on.
        #[arg(long, default_value_t = 0.7)]
        radius: f64,
        /// Kernel truncation total degree.
        #[arg(long, default_value_t = 16)]
        degree: usize,
        /// Quadrature points on the circle.
        #[arg(long, default_value_t = 4096)]
        quad: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every uniqueness check and write a certificate.
    Certify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed perturbation size for witnesses; omitted means search.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Relative singular-value threshold for the rank estimate.
        #[arg(long = "tol-rank")]
        tol_rank: Option<f64>,
        /// Allowed on-curve extension deviation.
        #[arg(long = "tol-extend")]
        tol_extend: Option<f64>,
        /// Reuse a kernel-space snapshot instead of requadrating.
        #[arg(long)]
        space: Option<PathBuf>,
        /// Write the kernel-space snapshot for later replay.
        #[arg(long = "save-space")]
        save_space: Option<PathBuf>,
    },
    /// Evaluate the forced value of every solution at a new point.
    Extend {
        #[arg(long)]
        problem: PathBuf,
        /// Curve parameter (curve kernels) or comma-separated point (szego).
        #[arg(long)]
        at: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree of a function on a curve, by formula and winding oracle.
    Degree {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a perturbation family specification into a rational function.
    Perturb {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// End-to-end construction and certification on the Neil parabola.
    NeilDemo {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 13)]
        nodes: usize,
        #[arg(long, default_value_t = 0.7)]
        radius: f64,
        #[arg(long, default_value_t = 16)]
        degree: usize,
        #[arg(long, default_value_t = 4096)]
        quad: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "tol-rank")]
        tol_rank: Option<f64>,
        #[arg(long = "tol-extend")]
        tol_extend: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kernel Gram matrix of curve parameters.
    KernelGram {
        #[arg(long)]
        curve: PathBuf,
        /// JSON file holding an array of [re, im] parameters.
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 16)]
        degree: usize,
        #[arg(long, default_value_t = 4096)]
        quad: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "save-space")]
        save_space: Option<PathBuf>,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn load_curve(path: &Path) -> Result<ParamCurve> {
    let j: CurveJson = read_json(path)?;
    ParamCurve::try_from(&j)
}

fn load_function(path: &Path) -> Result<RationalInner> {
    let j: InnerJson = read_json(path)?;
    RationalInner::try_from(&j)
}

fn load_problem(path: &Path, space: Option<KernelSpace>) -> Result<PickProblem> {
    let j: ProblemJson = read_json(path)?;
    schema::problem_from_json(&j, space)
}

/// Parse one complex scalar: "0.3", "-0.25i", "0.5+0.25i", "1e-2-0.5i", "i".
fn parse_complex(text: &str) -> Result<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::invalid("empty complex literal"));
    }
    let bad = || Error::invalid(format!("cannot parse complex number '{text}'"));
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // find the sign splitting real and imaginary parts
        let chars: Vec<char> = body.chars().collect();
        let mut split = None;
        for k in (1..chars.len()).rev() {
            if (chars[k] == '+' || chars[k] == '-')
                && chars[k - 1] != 'e'
                && chars[k - 1] != 'E'
            {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 = body[..k].parse().map_err(|_| bad())?;
                let im_str = &body[k..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(C64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        Ok(C64::new(re, 0.0))
    }
}

fn neil_curve() -> Result<ParamCurve> {
    let one = C64::new(1.0, 0.0);
    let p = MultiPoly::from_terms(
        2,
        vec![(vec![3, 0], one), (vec![0, 2], C64::new(-1.0, 0.0))],
    )?;
    ParamCurve::new(
        vec![OneVarInner::monomial(2), OneVarInner::monomial(3)],
        Some(vec![p]),
    )
}

fn print_certificate_summary(cert: &polypick::UniquenessCertificate) {
    println!("deg_V(F) = {}", cert.deg_v);
    println!(
        "Pick matrix: {} nodes, numerical rank {}, sigma_min/sigma_1 = {:.3e}",
        cert.num_nodes,
        cert.rank_estimate,
        cert.svals.last().copied().unwrap_or(0.0)
            / cert.svals.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE)
    );
    println!(
        "on-curve samples: {}, off-curve witnesses: {}",
        cert.on_curve.len(),
        cert.witnesses.len()
    );
    for clause in &cert.clauses {
        let status = if clause.pass { "PASS" } else { "FAIL" };
        println!("clause {:<22} {} ({})", clause.name, status, clause.detail);
    }
}

fn run_certify(
    problem: &PickProblem,
    f: &RationalInner,
    config: &CertifyConfig,
    out: &Path,
    save_space: Option<&Path>,
) -> Result<ExitCode> {
    let cert = certify(problem, f, config)?;
    let json: CertificateJson = schema::certificate_to_json(problem, &cert);
    write_json(out, &json)?;
    if let Some(space_path) = save_space {
        let (space, _) = problem.curve_kernel()?;
        write_json(space_path, &SnapshotJson::from(space))?;
        println!("kernel snapshot written to {}", space_path.display());
    }
    print_certificate_summary(&cert);
    println!("certificate written to {}", out.display());
    Ok(if cert.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn certify_config(
    seed: u64,
    epsilon: Option<f64>,
    tol_rank: Option<f64>,
    tol_extend: Option<f64>,
) -> CertifyConfig {
    let mut config = CertifyConfig { seed, epsilon, ..CertifyConfig::default() };
    if let Some(t) = tol_rank {
        config.rank_rel_tol = t;
        config.null_rel_tol = t;
    }
    if let Some(t) = tol_extend {
        config.extension_tol = t;
    }
    config
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct { curve, function, nodes, radius, degree, quad, out } => {
            let curve = load_curve(&curve)?;
            let f = load_function(&function)?;
            let cfg = KernelConfig { max_total_degree: degree, quad_points: quad };
            let constructed = construct_problem(&curve, &f, nodes, radius, cfg)?;
            write_json(&out, &ProblemJson::from(&constructed.problem))?;
            println!("deg_V(F) = {}", constructed.deg_v);
            if !constructed.perturbation_guarantee {
                println!(
                    "warning: defining polynomials are missing or exceed ndeg(F); \
                     off-curve perturbation witnesses are not guaranteed"
                );
            }
            println!(
                "problem with {} nodes written to {}",
                constructed.problem.len(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify {
            problem,
            function,
            out,
            seed,
            epsilon,
            tol_rank,
            tol_extend,
            space,
            save_space,
        } => {
            let snapshot = match &space {
                Some(path) => {
                    let j: SnapshotJson = read_json(path)?;
                    Some(KernelSpace::try_from(&j)?)
                }
                None => None,
            };
            let problem = load_problem(&problem, snapshot)?;
            let f = load_function(&function)?;
            let config = certify_config(seed, epsilon, tol_rank, tol_extend);
            run_certify(&problem, &f, &config, &out, save_space.as_deref())
        }
        Command::Extend { problem, at, out } => {
            let problem = load_problem(&problem, None)?;
            let point = match problem.kernel() {
                polypick::KernelSource::Curve { .. } => {
                    ExtensionPoint::Parameter(parse_complex(&at)?)
                }
                polypick::KernelSource::AmbientSzego => ExtensionPoint::Point(
                    at.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?,
                ),
            };
            let pm = build_pick_matrix(&problem)?;
            let config = CertifyConfig::default();
            let gamma = pm
                .null_vector(config.null_rel_tol)
                .ok_or_else(|| {
                    let top = pm.svals().first().copied().unwrap_or(1.0);
                    let bottom = pm.svals().last().copied().unwrap_or(0.0);
                    Error::NoNullVector(bottom / top.max(f64::MIN_POSITIVE))
                })?;
            let value = extend_value(&problem, &gamma, &point, config.denom_tol)?;
            println!("forced value: {} + {}i", value.re, value.im);
            if let Some(path) = out {
                write_json(&path, &serde_json::json!({ "value": [value.re, value.im] }))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Degree { curve, function, out } => {
            let curve = load_curve(&curve)?;
            let f = load_function(&function)?;
            // report both routes; degree_on_curve errors if they disagree
            let formula = polypick::degree_on_curve(&curve, &f)?;
            let pullback = curve.pullback(&f)?;
            let winding = pullback.winding_degree((16 * formula).next_power_of_two().max(2048))?;
            println!("formula: {formula}");
            println!("winding: {winding}");
            if let Some(path) = out {
                write_json(&path, &serde_json::json!({ "formula": formula, "winding": winding }))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Perturb { input, out } => {
            let j: PerturbationJson = read_json(&input)?;
            let spec = polypick::PerturbationSpec::try_from(&j)?;
            let perturbed = polypick::inner::perturb(&spec)?;
            let boundary = perturbed.check_inner_boundary(1000, 0)?;
            write_json(&out, &RationalFnJson::from(&perturbed))?;
            println!("boundary unimodularity deviation over 1000 samples: {boundary:.3e}");
            println!("perturbed function written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::NeilDemo {
            epsilon,
            nodes,
            radius,
            degree,
            quad,
            seed,
            tol_rank,
            tol_extend,
            out,
        } => {
            let curve = neil_curve()?;
            let f = RationalInner::monomial(MultiIndex::new(vec![3, 2]));
            let cfg = KernelConfig { max_total_degree: degree, quad_points: quad };
            let constructed = construct_problem(&curve, &f, nodes, radius, cfg)?;
            println!(
                "Neil parabola: {} nodes on |t| = {radius}, deg_V(F) = {}",
                nodes, constructed.deg_v
            );
            let config = certify_config(seed, Some(epsilon), tol_rank, tol_extend);
            run_certify(&constructed.problem, &f, &config, &out, None)
        }
        Command::KernelGram { curve, params, degree, quad, out, save_space } => {
            let curve = load_curve(&curve)?;
            let params: Vec<schema::Cx> = read_json(&params)?;
            let ts: Vec<C64> = params.into_iter().map(C64::from).collect();
            let space = KernelSpace::build(curve, degree, quad)?;
            let k = space.kernel_gram(&ts)?;
            let rows: Vec<Vec<[f64; 2]>> = (0..k.nrows())
                .map(|i| (0..k.ncols()).map(|j| [k[(i, j)].re, k[(i, j)].im]).collect())
                .collect();
            write_json(&out, &serde_json::json!({ "format": 1, "gram": rows }))?;
            if let Some(path) = save_space {
                write_json(&path, &SnapshotJson::from(&space))?;
                println!("kernel snapshot written to {}", path.display());
            }
            println!(
                "{}x{} kernel Gram written to {} (quadrature doubling residual {:.3e})",
                k.nrows(),
                k.ncols(),
                out.display(),
                space.doubling_residual()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
