//! Assembly of the per-pair link eigenvalue table, the criterion matrix, its
//! positive-definiteness verdict and the Kazhdan constant.

use crate::complex::{ComplexError, SimplicialComplex};
use crate::hilbert::{smallest_eigenvalue, PD_TOL};
use crate::spectra::{random_walk_spectrum, GraphError, WeightedGraph};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CriterionError {
    #[error("dimension {0} too low, need >= 2")]
    DimensionTooLow(usize),
    #[error("complex is not gallery connected")]
    NotGalleryConnected,
    #[error("link {0} is disconnected")]
    DisconnectedLink(String),
    #[error("link {0} is degenerate (a side has fewer than 2 vertices)")]
    DegenerateLink(String),
    #[error("link {0} is not bipartite")]
    LinkNotBipartite(String),
    #[error("lambda table misses pair ({0},{1})")]
    IncompleteTable(usize, usize),
    #[error("lambda_X = {0} is not positive")]
    NonPositiveLambda(f64),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Representatives of the codimension-2 links, one or more graphs per type
/// pair; the direct input mode for infinite complexes whose finitely many
/// link isomorphism types are known.
#[derive(Debug, Clone)]
pub struct LinkFamilyInput {
    pub n: usize,
    pub entries: Vec<((usize, usize), WeightedGraph)>,
}

/// Per-pair largest second eigenvalue together with the witnessing link.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LambdaCell {
    pub value: f64,
    pub witness: String,
}

pub type LambdaTable = BTreeMap<(usize, usize), LambdaCell>;

fn check_link_graph(id: &str, g: &WeightedGraph) -> Result<(), CriterionError> {
    if !g.is_connected() {
        return Err(CriterionError::DisconnectedLink(id.to_string()));
    }
    match g.side_sizes() {
        None => return Err(CriterionError::LinkNotBipartite(id.to_string())),
        Some((a, b)) => {
            if a < 2 || b < 2 {
                return Err(CriterionError::DegenerateLink(id.to_string()));
            }
        }
    }
    Ok(())
}

/// λ table from a full complex: max of the second-largest random-walk
/// eigenvalues over all codimension-2 links of the matching type pair.
pub fn lambda_table_from_complex(x: &SimplicialComplex) -> Result<LambdaTable, CriterionError> {
    if x.dim() < 2 {
        return Err(CriterionError::DimensionTooLow(x.dim()));
    }
    if !x.gallery_connectivity().connected {
        return Err(CriterionError::NotGalleryConnected);
    }
    let mut table = LambdaTable::new();
    for entry in x.codim2_links()? {
        let id = entry.base_ids.join(",");
        check_link_graph(&id, &entry.link.graph)?;
        let spectrum = random_walk_spectrum(&entry.link.graph)?;
        let cell = LambdaCell {
            value: spectrum.lambda_second,
            witness: id,
        };
        table
            .entry(entry.type_pair)
            .and_modify(|c| {
                if cell.value > c.value {
                    *c = cell.clone();
                }
            })
            .or_insert(cell);
    }
    Ok(table)
}

/// λ table from a link family input.
pub fn lambda_table_from_family(fam: &LinkFamilyInput) -> Result<LambdaTable, CriterionError> {
    if fam.n < 2 {
        return Err(CriterionError::DimensionTooLow(fam.n));
    }
    let mut table = LambdaTable::new();
    for (idx, ((i, j), g)) in fam.entries.iter().enumerate() {
        let id = format!("link[{idx}]({i},{j})");
        check_link_graph(&id, g)?;
        let spectrum = random_walk_spectrum(g)?;
        let pair = (*i.min(j), *i.max(j));
        let cell = LambdaCell {
            value: spectrum.lambda_second,
            witness: id,
        };
        table
            .entry(pair)
            .and_modify(|c| {
                if cell.value > c.value {
                    *c = cell.clone();
                }
            })
            .or_insert(cell);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "positive-definite")]
    PositiveDefinite,
    #[serde(rename = "borderline")]
    Borderline,
    #[serde(rename = "not-positive-definite")]
    NotPositiveDefinite,
}

/// The criterion matrix, its smallest eigenvalue and the verdict.
#[derive(Debug, Clone)]
pub struct MatrixAnalysis {
    pub matrix: DMatrix<f64>,
    pub lambda_x: f64,
    pub verdict: Verdict,
}

/// Assemble the (n+1)x(n+1) matrix with unit diagonal and negated table
/// entries off-diagonal, and classify its smallest eigenvalue.
pub fn build_and_analyze(table: &LambdaTable, n: usize) -> Result<MatrixAnalysis, CriterionError> {
    let size = n + 1;
    let mut m = DMatrix::identity(size, size);
    for i in 0..size {
        for j in (i + 1)..size {
            let cell = table
                .get(&(i, j))
                .ok_or(CriterionError::IncompleteTable(i, j))?;
            m[(i, j)] = -cell.value;
            m[(j, i)] = -cell.value;
        }
    }
    let lambda_x = smallest_eigenvalue(&m);
    let verdict = if lambda_x > PD_TOL {
        Verdict::PositiveDefinite
    } else if lambda_x >= -PD_TOL {
        Verdict::Borderline
    } else {
        Verdict::NotPositiveDefinite
    };
    Ok(MatrixAnalysis {
        matrix: m,
        lambda_x,
        verdict,
    })
}

/// The Kazhdan constant `1 / (2 (1 + sqrt((n+1)/lambda_X)))`.
pub fn kazhdan_epsilon(n: usize, lambda_x: f64) -> Result<f64, CriterionError> {
    if lambda_x <= 0.0 {
        return Err(CriterionError::NonPositiveLambda(lambda_x));
    }
    Ok(1.0 / (2.0 * (1.0 + ((n + 1) as f64 / lambda_x).sqrt())))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HypothesisChecklist {
    pub partite: bool,
    pub gallery_connected: bool,
    pub links_connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_chambers_per_panel: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_chambers_per_panel: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_thick: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LambdaEntry {
    pub pair: [usize; 2],
    pub value: f64,
    pub witness: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_hash: Option<String>,
    pub seed: u64,
    pub pd_tolerance: f64,
    pub eigenvalue_merge_tolerance: f64,
}

/// The full serialized result of a criterion run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CriterionReport {
    pub schema: String,
    pub mode: String,
    pub n: usize,
    pub hypotheses: HypothesisChecklist,
    pub lambda: Vec<LambdaEntry>,
    pub matrix: Vec<Vec<f64>>,
    pub lambda_x: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub provenance: Provenance,
}

pub const REPORT_SCHEMA: &str = "spectral-t-report/1";

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0 }
    }
}

fn finish_report(
    mode: &str,
    n: usize,
    hypotheses: HypothesisChecklist,
    table: LambdaTable,
    options: RunOptions,
    input_hash: Option<String>,
) -> Result<CriterionReport, CriterionError> {
    let analysis = build_and_analyze(&table, n)?;
    let epsilon = match analysis.verdict {
        Verdict::PositiveDefinite => Some(kazhdan_epsilon(n, analysis.lambda_x)?),
        _ => None,
    };
    let lambda = table
        .into_iter()
        .map(|((i, j), cell)| LambdaEntry {
            pair: [i, j],
            value: cell.value,
            witness: cell.witness,
        })
        .collect();
    let matrix = (0..n + 1)
        .map(|i| (0..n + 1).map(|j| analysis.matrix[(i, j)]).collect())
        .collect();
    Ok(CriterionReport {
        schema: REPORT_SCHEMA.to_string(),
        mode: mode.to_string(),
        n,
        hypotheses,
        lambda,
        matrix,
        lambda_x: analysis.lambda_x,
        verdict: analysis.verdict,
        epsilon,
        provenance: Provenance {
            input_hash,
            seed: options.seed,
            pd_tolerance: PD_TOL,
            eigenvalue_merge_tolerance: crate::spectra::EIG_MERGE_TOL,
        },
    })
}

/// Full pipeline on a complex: hypothesis checks, λ table, matrix analysis,
/// Kazhdan constant.  Thickness is reported informationally.
pub fn run_criterion_on_complex(
    x: &SimplicialComplex,
    options: RunOptions,
    input_hash: Option<String>,
) -> Result<CriterionReport, CriterionError> {
    let gallery = x.gallery_connectivity();
    let thickness = x.thickness_report();
    let table = lambda_table_from_complex(x)?;
    let hypotheses = HypothesisChecklist {
        partite: true,
        gallery_connected: gallery.connected,
        links_connected: true,
        min_chambers_per_panel: Some(thickness.min_chambers_per_panel),
        max_chambers_per_panel: Some(thickness.max_chambers_per_panel),
        is_thick: Some(thickness.is_thick),
    };
    finish_report("complex", x.dim(), hypotheses, table, options, input_hash)
}

/// Full pipeline on a link-family input.
pub fn run_criterion_on_family(
    fam: &LinkFamilyInput,
    options: RunOptions,
    input_hash: Option<String>,
) -> Result<CriterionReport, CriterionError> {
    let table = lambda_table_from_family(fam)?;
    let hypotheses = HypothesisChecklist {
        partite: true,
        gallery_connected: true,
        links_connected: true,
        min_chambers_per_panel: None,
        max_chambers_per_panel: None,
        is_thick: None,
    };
    finish_report("link_family", fam.n, hypotheses, table, options, input_hash)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn uniform_table(n: usize, value: f64) -> LambdaTable {
        let mut table = LambdaTable::new();
        for i in 0..=n {
            for j in (i + 1)..=n {
                table.insert(
                    (i, j),
                    LambdaCell {
                        value,
                        witness: "t".into(),
                    },
                );
            }
        }
        table
    }

    #[test]
    fn octahedron_lambda_table_is_zero() {
        let x = generators::complete_multipartite(&[2, 2, 2]).unwrap();
        let table = lambda_table_from_complex(&x).unwrap();
        assert_eq!(table.len(), 3);
        for cell in table.values() {
            assert!(cell.value.abs() < 1e-9);
        }
    }

    #[test]
    fn heawood_family_table() {
        let fam = generators::link_family("a2_tilde_q2").unwrap();
        let table = lambda_table_from_family(&fam).unwrap();
        let expected = 2f64.sqrt() / 3.0;
        for cell in table.values() {
            assert!((cell.value - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn c6_family_table() {
        let fam = generators::link_family("coxeter_a2").unwrap();
        let table = lambda_table_from_family(&fam).unwrap();
        for cell in table.values() {
            assert!((cell.value - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_matrix_analysis() {
        let a = build_and_analyze(&uniform_table(2, 0.0), 2).unwrap();
        assert!((a.lambda_x - 1.0).abs() < 1e-12);
        assert_eq!(a.verdict, Verdict::PositiveDefinite);
    }

    #[test]
    fn heawood_matrix_analysis() {
        let lam = 2f64.sqrt() / 3.0;
        let a = build_and_analyze(&uniform_table(2, lam), 2).unwrap();
        // eigenvalues of (1+l)I - lJ are 1-2l and 1+l
        assert!((a.lambda_x - (1.0 - 2.0 * lam)).abs() < 1e-12);
        assert_eq!(a.verdict, Verdict::PositiveDefinite);
    }

    #[test]
    fn half_table_is_borderline() {
        let a = build_and_analyze(&uniform_table(2, 0.5), 2).unwrap();
        assert!(a.lambda_x.abs() < 1e-10);
        assert_eq!(a.verdict, Verdict::Borderline);
    }

    #[test]
    fn uniform_closed_form() {
        for &lam in &[0.1, 0.3, 0.45, 0.7] {
            for n in 2..=4 {
                let a = build_and_analyze(&uniform_table(n, lam), n).unwrap();
                assert!((a.lambda_x - (1.0 - n as f64 * lam)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn incomplete_table_rejected() {
        let mut table = uniform_table(2, 0.1);
        table.remove(&(0, 2));
        assert!(matches!(
            build_and_analyze(&table, 2),
            Err(CriterionError::IncompleteTable(0, 2))
        ));
    }

    #[test]
    fn epsilon_closed_forms() {
        let e = kazhdan_epsilon(2, 1.0).unwrap();
        assert!((e - 1.0 / (2.0 * (1.0 + 3f64.sqrt()))).abs() < 1e-15);
        assert!((e - 0.18301270189221933).abs() < 1e-12);

        let lam = 1.0 - 2.0 * 2f64.sqrt() / 3.0;
        let e = kazhdan_epsilon(2, lam).unwrap();
        assert!((e - 1.0 / (2.0 * (1.0 + (3.0 / lam).sqrt()))).abs() < 1e-15);
        assert!((e - 0.0606600).abs() < 1e-6);
    }

    #[test]
    fn epsilon_limit_and_errors() {
        assert!(kazhdan_epsilon(2, 1e-12).unwrap() < 1e-6);
        assert!(matches!(
            kazhdan_epsilon(2, 0.0),
            Err(CriterionError::NonPositiveLambda(_))
        ));
        // monotone in lambda_x, always below 1/2
        let mut prev = 0.0;
        for k in 1..=10 {
            let e = kazhdan_epsilon(3, k as f64 / 10.0).unwrap();
            assert!(e > prev && e < 0.5);
            prev = e;
        }
    }

    #[test]
    fn octahedron_full_run() {
        let x = generators::complete_multipartite(&[2, 2, 2]).unwrap();
        let report = run_criterion_on_complex(&x, RunOptions::default(), None).unwrap();
        assert_eq!(report.verdict, Verdict::PositiveDefinite);
        assert!((report.lambda_x - 1.0).abs() < 1e-9);
        assert!((report.epsilon.unwrap() - 0.18301270189221933).abs() < 1e-9);
        assert_eq!(report.hypotheses.is_thick, Some(false));
    }

    #[test]
    fn coxeter_family_run_is_borderline() {
        let fam = generators::link_family("coxeter_a2").unwrap();
        let report = run_criterion_on_family(&fam, RunOptions::default(), None).unwrap();
        assert_eq!(report.verdict, Verdict::Borderline);
        assert!(report.epsilon.is_none());
    }

    #[test]
    fn single_triangle_links_are_degenerate() {
        let x = generators::complete_multipartite(&[1, 1, 1]).unwrap();
        assert!(matches!(
            lambda_table_from_complex(&x),
            Err(CriterionError::DegenerateLink(_))
        ));
    }

    #[test]
    fn monotonicity_of_lambda_x() {
        // increasing any entry never increases the smallest eigenvalue
        let mut table = uniform_table(3, 0.2);
        let base = build_and_analyze(&table, 3).unwrap().lambda_x;
        for pair in [(0, 1), (1, 3), (2, 3)] {
            let mut bumped = table.clone();
            bumped.get_mut(&pair).unwrap().value += 0.15;
            let lx = build_and_analyze(&bumped, 3).unwrap().lambda_x;
            assert!(lx <= base + 1e-12);
        }
        // and a uniformly larger table is dominated
        for cell in table.values_mut() {
            cell.value += 0.1;
        }
        let lx = build_and_analyze(&table, 3).unwrap().lambda_x;
        assert!(lx <= base + 1e-12);
    }
}
