//! End-to-end acceptance checks.  Each test prints a single pass/fail line
//! for its criterion (visible with `--nocapture`, and on failure).

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_t::criterion::{self, RunOptions, Verdict};
use spectral_t::equivariant::{
    self, EquivariantSpace, GroupAction, UnitaryRep, DEFAULT_CLOSURE_CAP,
};
use spectral_t::formats::ComplexJson;
use spectral_t::generators;
use spectral_t::suites;
use std::process::Command;
use std::time::Instant;

struct Criterion {
    label: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Criterion {
            label,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: &str) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("{}: PASS", self.label);
        } else {
            println!("{}: FAIL ({})", self.label, self.failures.join("; "));
            panic!("{} failed: {:?}", self.label, self.failures);
        }
    }
}

fn octahedron_action() -> (spectral_t::complex::SimplicialComplex, Vec<Vec<usize>>) {
    let x = generators::complete_multipartite(&[2, 2, 2]).unwrap();
    // vertex order p0_0, p0_1, p1_0, p1_1, p2_0, p2_1
    let gens = vec![
        vec![1, 0, 2, 3, 4, 5],
        vec![0, 1, 3, 2, 4, 5],
        vec![0, 1, 2, 3, 5, 4],
    ];
    (x, gens)
}

#[test]
fn criterion_1_octahedron_end_to_end() {
    let mut c = Criterion::new("criterion 1 (octahedron end-to-end)");
    let start = Instant::now();
    let x = generators::complete_multipartite(&[2, 2, 2]).unwrap();
    let report = criterion::run_criterion_on_complex(&x, RunOptions::default(), None).unwrap();
    for (i, row) in report.matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            c.check((v - expected).abs() < 1e-12, "matrix is identity");
        }
    }
    c.check((report.lambda_x - 1.0).abs() < 1e-9, "lambda_x = 1");
    c.check(report.verdict == Verdict::PositiveDefinite, "positive definite");
    let eps = report.epsilon.unwrap_or(0.0);
    c.check((eps - 0.18301270189221933).abs() < 1e-6, "epsilon value");
    c.check(start.elapsed().as_secs_f64() < 1.0, "runtime < 1 s");
    c.finish();
}

#[test]
fn criterion_2_heawood_family() {
    let mut c = Criterion::new("criterion 2 (incidence-graph link family, q=2)");
    let start = Instant::now();
    let fam = generators::link_family("a2_tilde_q2").unwrap();
    let report = criterion::run_criterion_on_family(&fam, RunOptions::default(), None).unwrap();
    let expected_lambda = 2f64.sqrt() / 3.0;
    c.check(report.lambda.len() == 3, "three pairs");
    for entry in &report.lambda {
        c.check(
            (entry.value - expected_lambda).abs() < 1e-9,
            "lambda = sqrt(2)/3",
        );
    }
    c.check(
        (report.lambda_x - (1.0 - 2.0 * expected_lambda)).abs() < 1e-6,
        "lambda_x value",
    );
    c.check(
        (report.lambda_x - 0.05719096).abs() < 1e-6,
        "lambda_x golden value",
    );
    c.check(report.verdict == Verdict::PositiveDefinite, "positive definite");
    let eps = report.epsilon.unwrap_or(0.0);
    c.check((eps - 0.06066005).abs() < 1e-6, "epsilon value");
    c.check(start.elapsed().as_secs_f64() < 1.0, "runtime < 1 s");
    c.finish();
}

#[test]
fn criterion_3_hexagon_family_borderline() {
    let mut c = Criterion::new("criterion 3 (C6 link family borderline)");
    let fam = generators::link_family("coxeter_a2").unwrap();
    let report = criterion::run_criterion_on_family(&fam, RunOptions::default(), None).unwrap();
    for entry in &report.lambda {
        c.check((entry.value - 0.5).abs() < 1e-12, "lambda = 1/2");
    }
    c.check(report.lambda_x.abs() < 1e-10, "lambda_x = 0");
    c.check(report.verdict == Verdict::Borderline, "borderline verdict");
    c.check(report.epsilon.is_none(), "no epsilon emitted");

    // the CLI must exit with code 1 on this input
    let dir = std::env::temp_dir().join("spectral-t-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c6_family.json");
    let json = spectral_t::formats::LinkFamilyJson::from_family(&fam);
    std::fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spectral-t"))
        .args(["check-links", path.to_str().unwrap()])
        .output()
        .unwrap();
    c.check(out.status.code() == Some(1), "exit code 1");
    c.finish();
}

#[test]
fn criterion_4_subspace_inequality_suite() {
    let mut c = Criterion::new("criterion 4 (subspace inequality, 1000 instances)");
    let start = Instant::now();
    let result = suites::kassabov_suite(1000, 20260826);
    c.check(result.cases == 1000, "1000 instances");
    c.check(result.failures == 0, "inequality holds on every instance");
    c.check(start.elapsed().as_secs_f64() < 30.0, "runtime < 30 s");
    c.finish();
}

#[test]
fn criterion_5_contraction_suite() {
    let mut c = Criterion::new("criterion 5 (vector contraction, 200 graphs x dims 1,2,6)");
    let result = suites::contraction_suite(200, &[1, 2, 6], 20, 417);
    c.check(result.cases == 200, "200 graphs");
    c.check(result.failures == 0, "bound holds and sweep attains lambda_second");
    c.finish();
}

#[test]
fn criterion_6_bipartite_facts() {
    let mut c = Criterion::new("criterion 6 (bipartite spectral facts)");
    let result = suites::bipartite_facts_suite(200, 99);
    c.check(result.cases == 200, "200 graphs");
    c.check(result.failures == 0, "symmetry, indicator and projection facts");
    c.finish();
}

#[test]
fn criterion_7_equivariant_octahedron() {
    let mut c = Criterion::new("criterion 7 (equivariant verification, regular rep)");
    let start = Instant::now();
    let (x, gens) = octahedron_action();
    let action = GroupAction::load(&x, &gens, DEFAULT_CLOSURE_CAP).unwrap();
    let table = criterion::lambda_table_from_complex(&x).unwrap();

    let rep = UnitaryRep::regular(&action);
    let space = EquivariantSpace::build(&x, &action, &rep).unwrap();
    let lemma = equivariant::verify_intersect_lemma(&space).unwrap();
    c.check(lemma.intersection_dim == 1, "intersection dim 1");
    c.check(lemma.invariant_dim == 1, "invariant dim 1");
    c.check(lemma.matches, "mutual containment");
    let angles = equivariant::verify_angle_bounds(&space, &table).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                c.check(angles.cosines[(i, j)] <= 1e-9, "pairwise cosines vanish");
            }
        }
    }
    c.check(angles.entrywise_ok, "entrywise angle bound");
    c.check(angles.eigen_ok, "eigenvalue domination");

    let minus = nalgebra::DMatrix::from_element(1, 1, -1.0);
    let sign = UnitaryRep::from_generator_matrices(
        &action,
        &[minus.clone(), minus.clone(), minus],
    )
    .unwrap();
    let sign_space = EquivariantSpace::build(&x, &action, &sign).unwrap();
    let sign_lemma = equivariant::verify_intersect_lemma(&sign_space).unwrap();
    c.check(sign_lemma.intersection_dim == 0, "sign character: intersection dim 0");
    c.check(sign_lemma.matches, "sign character: matches invariant dim");

    c.check(start.elapsed().as_secs_f64() < 5.0, "runtime < 5 s");
    c.finish();
}

#[test]
fn criterion_8_phi_x_chain() {
    let mut c = Criterion::new("criterion 8 (phi_x inequality chain, 50 samples)");
    let (x, gens) = octahedron_action();
    let action = GroupAction::load(&x, &gens, DEFAULT_CLOSURE_CAP).unwrap();
    let rep = UnitaryRep::regular(&action);
    let space = EquivariantSpace::build(&x, &action, &rep).unwrap();
    let lambda_x = criterion::build_and_analyze(
        &criterion::lambda_table_from_complex(&x).unwrap(),
        x.dim(),
    )
    .unwrap()
    .lambda_x;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let raw = DVector::from_fn(rep.dim, |_, _| rng.gen::<f64>() - 0.5);
        let unit = &raw / raw.norm();
        let report = equivariant::phi_x_chain_check(&space, &unit, lambda_x).unwrap();
        c.check(report.norm_lower_bound_holds, "norm lower bound");
        c.check(report.projection_bounds_hold, "projection distance bounds");
        c.check(report.kassabov_bound_holds, "projection inequality with lambda_x");
        c.check(report.k_symmetric, "K symmetric");
        c.check(report.k_generates, "K generates");
    }
    c.finish();
}

#[test]
fn criterion_9_determinism() {
    let mut c = Criterion::new("criterion 9 (byte-identical reports)");
    let dir = std::env::temp_dir().join("spectral-t-acceptance");
    std::fs::create_dir_all(&dir).unwrap();

    let x = generators::complete_multipartite(&[2, 2, 2]).unwrap();
    let path = dir.join("octahedron.json");
    let json = ComplexJson::from_complex(&x);
    std::fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_spectral-t"))
            .args(["--format", "json", "check", path.to_str().unwrap()])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    c.check(a.status.code() == Some(0), "exit code 0");
    c.check(!a.stdout.is_empty(), "report emitted");
    c.check(a.stdout == b.stdout, "complex report byte-identical");

    let fam = generators::link_family("a2_tilde_q2").unwrap();
    let fam_path = dir.join("q2_family.json");
    let fam_json = spectral_t::formats::LinkFamilyJson::from_family(&fam);
    std::fs::write(&fam_path, serde_json::to_string_pretty(&fam_json).unwrap()).unwrap();
    let run_fam = || {
        Command::new(env!("CARGO_BIN_EXE_spectral-t"))
            .args(["--format", "json", "--seed", "7", "check-links", fam_path.to_str().unwrap()])
            .output()
            .unwrap()
    };
    let fa = run_fam();
    let fb = run_fam();
    c.check(fa.stdout == fb.stdout, "family report byte-identical");

    // library-level determinism of the serialized report
    let r1 = criterion::run_criterion_on_complex(&x, RunOptions { seed: 3 }, Some("h".into()))
        .unwrap();
    let r2 = criterion::run_criterion_on_complex(&x, RunOptions { seed: 3 }, Some("h".into()))
        .unwrap();
    c.check(
        serde_json::to_string(&r1).unwrap() == serde_json::to_string(&r2).unwrap(),
        "library report byte-identical",
    );
    c.finish();
}
