//! Command-line front end: criterion checks, spectra, selftests,
//! group-action verification and example generation.

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use spectral_t::criterion::{self, CriterionError, RunOptions, Verdict};
use spectral_t::equivariant::{
    self, EquivariantError, EquivariantSpace, GroupAction, UnitaryRep, DEFAULT_CLOSURE_CAP,
};
use spectral_t::formats::{
    ActionJson, ComplexJson, FormatError, GraphJson, LinkFamilyJson,
};
use spectral_t::generators;
use spectral_t::spectra;
use spectral_t::suites;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_NOT_PD: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "spectral-t", version, about = "Spectral criterion toolkit for partite complexes")]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Seed recorded into reports and used by sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RepKind {
    Regular,
    Vertex,
    File,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full criterion pipeline on a complex JSON file.
    Check { path: PathBuf },
    /// Run the criterion on a link-family JSON file.
    CheckLinks { path: PathBuf },
    /// Random-walk spectrum of a graph JSON file.
    Spectrum { path: PathBuf },
    /// Randomized subspace-inequality property suite.
    AnglesSelftest {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Verify the equivariant-space lemmas for a finite group action.
    VerifyAction {
        complex: PathBuf,
        action: PathBuf,
        #[arg(long, value_enum, default_value = "regular")]
        rep: RepKind,
        /// Generator matrices JSON, required with --rep file.
        #[arg(long)]
        rep_file: Option<PathBuf>,
        /// Number of sampled unit vectors for the inequality chain.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Generate an example input file.
    Generate {
        /// octahedron | triangle | complete:<s0,s1,...> | random:<s0,s1,...>
        /// | pg2:<q> | cycle:<len> | a2_tilde_q2 | a2_tilde_q3 | coxeter_a2
        family: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Density for the random family.
        #[arg(long, default_value_t = 0.6)]
        density: f64,
    },
    /// Run every property suite.
    Selftest,
}

#[derive(Serialize)]
struct ErrorBody {
    code: String,
    message: String,
}

#[derive(Serialize)]
struct ErrorReport {
    schema: &'static str,
    error: ErrorBody,
}

fn emit_error(format: Format, code: &str, message: String, exit: u8) -> ExitCode {
    match format {
        Format::Json => {
            let report = ErrorReport {
                schema: criterion::REPORT_SCHEMA,
                error: ErrorBody {
                    code: code.to_string(),
                    message,
                },
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        Format::Text => eprintln!("error [{code}]: {message}"),
    }
    ExitCode::from(exit)
}

fn criterion_error_code(err: &CriterionError) -> (&'static str, u8) {
    match err {
        CriterionError::DimensionTooLow(_) => ("dimension-too-low", EXIT_HYPOTHESIS),
        CriterionError::NotGalleryConnected => ("not-gallery-connected", EXIT_HYPOTHESIS),
        CriterionError::DisconnectedLink(_) => ("disconnected-link", EXIT_HYPOTHESIS),
        CriterionError::DegenerateLink(_) => ("degenerate-link", EXIT_HYPOTHESIS),
        CriterionError::LinkNotBipartite(_) => ("link-not-bipartite", EXIT_HYPOTHESIS),
        CriterionError::IncompleteTable(_, _) => ("incomplete-table", EXIT_INPUT),
        CriterionError::NonPositiveLambda(_) => ("non-positive-lambda", EXIT_NOT_PD),
        CriterionError::Complex(_) => ("bad-complex", EXIT_INPUT),
        CriterionError::Graph(_) => ("bad-graph", EXIT_INPUT),
    }
}

fn equivariant_error_code(err: &EquivariantError) -> (&'static str, u8) {
    match err {
        EquivariantError::NotTypePreserving => ("not-type-preserving", EXIT_HYPOTHESIS),
        EquivariantError::NotGalleryConnected => ("not-gallery-connected", EXIT_HYPOTHESIS),
        EquivariantError::KEmpty => ("k-empty", EXIT_HYPOTHESIS),
        EquivariantError::NonPositiveLambda => ("non-positive-lambda", EXIT_NOT_PD),
        _ => ("bad-action-input", EXIT_INPUT),
    }
}

fn read_input(path: &Path) -> Result<(Vec<u8>, String), std::io::Error> {
    let bytes = std::fs::read(path)?;
    let hash = format!("sha256:{:x}", Sha256::digest(&bytes));
    Ok((bytes, hash))
}

fn render_criterion_text(report: &criterion::CriterionReport) {
    println!("criterion report (n = {})", report.n);
    println!(
        "  hypotheses: gallery_connected={} links_connected={} thick={:?}",
        report.hypotheses.gallery_connected,
        report.hypotheses.links_connected,
        report.hypotheses.is_thick
    );
    for entry in &report.lambda {
        println!(
            "  lambda[{},{}] = {:.12}  (witness {})",
            entry.pair[0], entry.pair[1], entry.value, entry.witness
        );
    }
    println!("  lambda_X = {:.12}", report.lambda_x);
    println!("  verdict: {:?}", report.verdict);
    if let Some(eps) = report.epsilon {
        println!("  kazhdan epsilon = {:.12}", eps);
    }
}

fn run_check(path: &Path, format: Format, seed: u64) -> ExitCode {
    let (bytes, hash) = match read_input(path) {
        Ok(v) => v,
        Err(e) => return emit_error(format, "io-error", e.to_string(), EXIT_INPUT),
    };
    let parsed: Result<ComplexJson, _> = serde_json::from_slice(&bytes);
    let json = match parsed {
        Ok(j) => j,
        Err(e) => return emit_error(format, "parse-error", e.to_string(), EXIT_INPUT),
    };
    let x = match json.to_complex() {
        Ok(x) => x,
        Err(FormatError::Complex(e)) => {
            return emit_error(format, "bad-complex", e.to_string(), EXIT_INPUT)
        }
        Err(e) => return emit_error(format, "bad-input", e.to_string(), EXIT_INPUT),
    };
    match criterion::run_criterion_on_complex(&x, RunOptions { seed }, Some(hash)) {
        Ok(report) => finish_criterion(format, &report),
        Err(err) => {
            let (code, exit) = criterion_error_code(&err);
            emit_error(format, code, err.to_string(), exit)
        }
    }
}

fn run_check_links(path: &Path, format: Format, seed: u64) -> ExitCode {
    let (bytes, hash) = match read_input(path) {
        Ok(v) => v,
        Err(e) => return emit_error(format, "io-error", e.to_string(), EXIT_INPUT),
    };
    let parsed: Result<LinkFamilyJson, _> = serde_json::from_slice(&bytes);
    let json = match parsed {
        Ok(j) => j,
        Err(e) => return emit_error(format, "parse-error", e.to_string(), EXIT_INPUT),
    };
    let fam = match json.to_family() {
        Ok(f) => f,
        Err(e) => return emit_error(format, "bad-input", e.to_string(), EXIT_INPUT),
    };
    match criterion::run_criterion_on_family(&fam, RunOptions { seed }, Some(hash)) {
        Ok(report) => finish_criterion(format, &report),
        Err(err) => {
            let (code, exit) = criterion_error_code(&err);
            emit_error(format, code, err.to_string(), exit)
        }
    }
}

fn finish_criterion(format: Format, report: &criterion::CriterionReport) -> ExitCode {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).unwrap()),
        Format::Text => render_criterion_text(report),
    }
    if report.verdict == Verdict::PositiveDefinite {
        ExitCode::from(EXIT_OK)
    } else {
        ExitCode::from(EXIT_NOT_PD)
    }
}

#[derive(Serialize)]
struct SpectrumReport {
    schema: &'static str,
    eigenvalues: Vec<f64>,
    lambda_second: f64,
    connected: bool,
    bipartite: bool,
    degenerate: bool,
    input_hash: String,
}

fn run_spectrum(path: &Path, format: Format) -> ExitCode {
    let (bytes, hash) = match read_input(path) {
        Ok(v) => v,
        Err(e) => return emit_error(format, "io-error", e.to_string(), EXIT_INPUT),
    };
    let parsed: Result<GraphJson, _> = serde_json::from_slice(&bytes);
    let json = match parsed {
        Ok(j) => j,
        Err(e) => return emit_error(format, "parse-error", e.to_string(), EXIT_INPUT),
    };
    let g = match json.to_graph() {
        Ok(g) => g,
        Err(e) => return emit_error(format, "bad-graph", e.to_string(), EXIT_INPUT),
    };
    match spectra::random_walk_spectrum(&g) {
        Ok(s) => {
            let report = SpectrumReport {
                schema: criterion::REPORT_SCHEMA,
                eigenvalues: s.eigenvalues.clone(),
                lambda_second: s.lambda_second,
                connected: s.connected,
                bipartite: s.bipartite,
                degenerate: s.degenerate,
                input_hash: hash,
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Text => {
                    println!("eigenvalues (descending):");
                    for (v, k) in s.merged() {
                        println!("  {v:.12}  (multiplicity {k})");
                    }
                    println!("lambda_second = {:.12}", s.lambda_second);
                    println!(
                        "connected = {}, bipartite = {}, degenerate = {}",
                        s.connected, s.bipartite, s.degenerate
                    );
                }
            }
            ExitCode::from(EXIT_OK)
        }
        Err(e) => emit_error(format, "bad-graph", e.to_string(), EXIT_HYPOTHESIS),
    }
}

#[derive(Serialize)]
struct SuiteLine {
    name: String,
    cases: usize,
    failures: usize,
    detail: String,
}

fn run_suites(results: &[suites::SuiteResult], format: Format) -> ExitCode {
    let mut ok = true;
    match format {
        Format::Json => {
            let lines: Vec<SuiteLine> = results
                .iter()
                .map(|r| SuiteLine {
                    name: r.name.clone(),
                    cases: r.cases,
                    failures: r.failures,
                    detail: r.detail.clone(),
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&lines).unwrap());
        }
        Format::Text => {
            for r in results {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                println!("{status} {} ({} cases) {}", r.name, r.cases, r.detail);
            }
        }
    }
    for r in results {
        ok &= r.passed();
    }
    ExitCode::from(if ok { EXIT_OK } else { EXIT_NOT_PD })
}

#[derive(Serialize)]
struct VerifyReport {
    schema: &'static str,
    group_order: usize,
    representation_dim: usize,
    domain_size: usize,
    space_dim: usize,
    intersection_dim: usize,
    invariant_dim: usize,
    intersect_lemma_ok: bool,
    angle_entrywise_ok: bool,
    angle_eigen_ok: bool,
    chain_samples: usize,
    chain_ok: bool,
    k_size: usize,
    k_symmetric: bool,
    k_generates: bool,
    seed: u64,
}

fn run_verify_action(
    complex_path: &Path,
    action_path: &Path,
    rep_kind: RepKind,
    rep_file: Option<&Path>,
    samples: usize,
    format: Format,
    seed: u64,
) -> ExitCode {
    let x = match read_input(complex_path)
        .map_err(|e| e.to_string())
        .and_then(|(bytes, _)| {
            serde_json::from_slice::<ComplexJson>(&bytes).map_err(|e| e.to_string())
        })
        .and_then(|j| j.to_complex().map_err(|e| e.to_string()))
    {
        Ok(x) => x,
        Err(msg) => return emit_error(format, "bad-complex", msg, EXIT_INPUT),
    };
    let action_json = match read_input(action_path)
        .map_err(|e| e.to_string())
        .and_then(|(bytes, _)| {
            serde_json::from_slice::<ActionJson>(&bytes).map_err(|e| e.to_string())
        }) {
        Ok(a) => a,
        Err(msg) => return emit_error(format, "bad-action-input", msg, EXIT_INPUT),
    };
    let mut generators_idx: Vec<Vec<usize>> = Vec::new();
    for gen in &action_json.generators {
        let mut perm: Vec<usize> = (0..x.vertex_ids().len()).collect();
        for (from, to) in &gen.perm {
            let (Some(a), Some(b)) = (x.vertex_index(from), x.vertex_index(to)) else {
                return emit_error(
                    format,
                    "bad-action-input",
                    format!("unknown vertex in permutation: {from} -> {to}"),
                    EXIT_INPUT,
                );
            };
            perm[a] = b;
        }
        generators_idx.push(perm);
    }
    let action = match GroupAction::load(&x, &generators_idx, DEFAULT_CLOSURE_CAP) {
        Ok(a) => a,
        Err(e) => {
            let (code, exit) = equivariant_error_code(&e);
            return emit_error(format, code, e.to_string(), exit);
        }
    };
    let rep = match rep_kind {
        RepKind::Regular => UnitaryRep::regular(&action),
        RepKind::Vertex => UnitaryRep::vertex_permutation(&action),
        RepKind::File => {
            let Some(path) = rep_file else {
                return emit_error(
                    format,
                    "bad-action-input",
                    "--rep file requires --rep-file".into(),
                    EXIT_INPUT,
                );
            };
            match load_rep_file(path, &action) {
                Ok(r) => r,
                Err(msg) => return emit_error(format, "bad-rep-input", msg, EXIT_INPUT),
            }
        }
    };
    let space = match EquivariantSpace::build(&x, &action, &rep) {
        Ok(s) => s,
        Err(e) => {
            let (code, exit) = equivariant_error_code(&e);
            return emit_error(format, code, e.to_string(), exit);
        }
    };
    let table = match criterion::lambda_table_from_complex(&x) {
        Ok(t) => t,
        Err(e) => {
            let (code, exit) = criterion_error_code(&e);
            return emit_error(format, code, e.to_string(), exit);
        }
    };
    let analysis = criterion::build_and_analyze(&table, x.dim()).unwrap();

    let lemma = equivariant::verify_intersect_lemma(&space).unwrap();
    let angles = equivariant::verify_angle_bounds(&space, &table).unwrap();

    let mut chain_ok = true;
    let mut k_info = (0usize, false, false);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if analysis.lambda_x > 0.0 {
        for _ in 0..samples {
            let raw = DVector::from_fn(rep.dim, |_, _| rng.gen::<f64>() - 0.5);
            let unit = &raw / raw.norm();
            match equivariant::phi_x_chain_check(&space, &unit, analysis.lambda_x) {
                Ok(report) => {
                    chain_ok &= report.norm_lower_bound_holds
                        && report.projection_bounds_hold
                        && report.kassabov_bound_holds;
                    k_info = (report.k_size, report.k_symmetric, report.k_generates);
                }
                Err(e) => {
                    let (code, exit) = equivariant_error_code(&e);
                    return emit_error(format, code, e.to_string(), exit);
                }
            }
        }
    }

    let report = VerifyReport {
        schema: criterion::REPORT_SCHEMA,
        group_order: action.order(),
        representation_dim: rep.dim,
        domain_size: space.domain.len(),
        space_dim: space.dim(),
        intersection_dim: lemma.intersection_dim,
        invariant_dim: lemma.invariant_dim,
        intersect_lemma_ok: lemma.matches,
        angle_entrywise_ok: angles.entrywise_ok,
        angle_eigen_ok: angles.eigen_ok,
        chain_samples: samples,
        chain_ok,
        k_size: k_info.0,
        k_symmetric: k_info.1,
        k_generates: k_info.2,
        seed,
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Text => {
            println!("group order {}, rep dim {}", report.group_order, report.representation_dim);
            println!(
                "fundamental domain {} chamber(s), space dim {}",
                report.domain_size, report.space_dim
            );
            println!(
                "intersection lemma: dims {}/{} ok={}",
                report.intersection_dim, report.invariant_dim, report.intersect_lemma_ok
            );
            println!(
                "angle bounds: entrywise={} eigen={}",
                report.angle_entrywise_ok, report.angle_eigen_ok
            );
            println!(
                "chain over {} samples: ok={} (K size {}, symmetric {}, generates {})",
                report.chain_samples, report.chain_ok, report.k_size, report.k_symmetric,
                report.k_generates
            );
        }
    }
    let all_ok = report.intersect_lemma_ok
        && report.angle_entrywise_ok
        && report.angle_eigen_ok
        && report.chain_ok;
    ExitCode::from(if all_ok { EXIT_OK } else { EXIT_NOT_PD })
}

#[derive(serde::Deserialize)]
struct RepFileJson {
    generators: Vec<Vec<Vec<f64>>>,
}

fn load_rep_file(path: &Path, action: &GroupAction) -> Result<UnitaryRep, String> {
    let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
    let json: RepFileJson = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    let matrices: Vec<DMatrix<f64>> = json
        .generators
        .iter()
        .map(|rows| {
            let r = rows.len();
            let c = rows.first().map(|row| row.len()).unwrap_or(0);
            DMatrix::from_fn(r, c, |i, j| rows[i][j])
        })
        .collect();
    UnitaryRep::from_generator_matrices(action, &matrices).map_err(|e| e.to_string())
}

fn run_generate(family: &str, output: &Path, density: f64, seed: u64, format: Format) -> ExitCode {
    let parse_sizes = |spec: &str| -> Option<Vec<usize>> {
        spec.split(',').map(|s| s.trim().parse().ok()).collect()
    };
    let write = |value: serde_json::Value| -> Result<(), String> {
        let text = serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?;
        std::fs::write(output, text + "\n").map_err(|e| e.to_string())
    };
    let result: Result<(), String> = (|| {
        if family == "octahedron" {
            let x = generators::complete_multipartite(&[2, 2, 2]).map_err(|e| e.to_string())?;
            return write(serde_json::to_value(ComplexJson::from_complex(&x)).unwrap());
        }
        if family == "triangle" {
            let x = generators::complete_multipartite(&[1, 1, 1]).map_err(|e| e.to_string())?;
            return write(serde_json::to_value(ComplexJson::from_complex(&x)).unwrap());
        }
        if let Some(spec) = family.strip_prefix("complete:") {
            let sizes = parse_sizes(spec).ok_or("bad sizes")?;
            let x = generators::complete_multipartite(&sizes).map_err(|e| e.to_string())?;
            return write(serde_json::to_value(ComplexJson::from_complex(&x)).unwrap());
        }
        if let Some(spec) = family.strip_prefix("random:") {
            let sizes = parse_sizes(spec).ok_or("bad sizes")?;
            let x = generators::random_partite_complex(&sizes, density, seed)
                .map_err(|e| e.to_string())?;
            return write(serde_json::to_value(ComplexJson::from_complex(&x)).unwrap());
        }
        if let Some(spec) = family.strip_prefix("pg2:") {
            let q: usize = spec.parse().map_err(|_| "bad q")?;
            let g = generators::pg2_incidence(q).map_err(|e| e.to_string())?;
            return write(serde_json::to_value(GraphJson::from_graph(&g)).unwrap());
        }
        if let Some(spec) = family.strip_prefix("cycle:") {
            let len: usize = spec.parse().map_err(|_| "bad length")?;
            let g = generators::cycle(len).map_err(|e| e.to_string())?;
            return write(serde_json::to_value(GraphJson::from_graph(&g)).unwrap());
        }
        let fam = generators::link_family(family).map_err(|e| e.to_string())?;
        write(serde_json::to_value(LinkFamilyJson::from_family(&fam)).unwrap())
    })();
    match result {
        Ok(()) => {
            if format == Format::Text {
                println!("wrote {}", output.display());
            }
            ExitCode::from(EXIT_OK)
        }
        Err(msg) => emit_error(format, "generate-error", msg, EXIT_INPUT),
    }
}

fn octahedron_verify_selftest() -> suites::SuiteResult {
    // end-to-end equivariant check as part of selftest
    let x = generators::complete_multipartite(&[2, 2, 2]).unwrap();
    let gens = vec![
        vec![1, 0, 2, 3, 4, 5],
        vec![0, 1, 3, 2, 4, 5],
        vec![0, 1, 2, 3, 5, 4],
    ];
    let action = GroupAction::load(&x, &gens, DEFAULT_CLOSURE_CAP).unwrap();
    let rep = UnitaryRep::regular(&action);
    let space = EquivariantSpace::build(&x, &action, &rep).unwrap();
    let table = criterion::lambda_table_from_complex(&x).unwrap();
    let lemma = equivariant::verify_intersect_lemma(&space).unwrap();
    let angles = equivariant::verify_angle_bounds(&space, &table).unwrap();
    let failures = usize::from(!lemma.matches)
        + usize::from(!angles.entrywise_ok)
        + usize::from(!angles.eigen_ok);
    suites::SuiteResult {
        name: "equivariant-octahedron".into(),
        cases: 3,
        failures,
        detail: String::new(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let seed = cli.seed;
    match cli.command {
        Command::Check { path } => run_check(&path, format, seed),
        Command::CheckLinks { path } => run_check_links(&path, format, seed),
        Command::Spectrum { path } => run_spectrum(&path, format),
        Command::AnglesSelftest { trials } => {
            run_suites(&[suites::kassabov_suite(trials, seed)], format)
        }
        Command::VerifyAction {
            complex,
            action,
            rep,
            rep_file,
            samples,
        } => run_verify_action(
            &complex,
            &action,
            rep,
            rep_file.as_deref(),
            samples,
            format,
            seed,
        ),
        Command::Generate {
            family,
            output,
            density,
        } => run_generate(&family, &output, density, seed, format),
        Command::Selftest => {
            let results = vec![
                suites::kassabov_suite(1000, seed),
                suites::contraction_suite(200, &[1, 2, 6], 20, seed),
                suites::bipartite_facts_suite(100, seed),
                suites::expander_equivalence_suite(100, seed),
                octahedron_verify_selftest(),
            ];
            run_suites(&results, format)
        }
    }
}
