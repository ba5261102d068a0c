//! On-disk JSON formats for complexes, graphs, link families and group
//! actions, with conversions into the domain types.

use crate::complex::{ComplexError, SimplicialComplex};
use crate::criterion::LinkFamilyInput;
use crate::spectra::{GraphError, WeightedGraph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph sides must list exactly two sides")]
    BadSides,
    #[error("link pair must hold two distinct labels, got {0:?}")]
    BadPair(Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub n: usize,
    pub vertices: Vec<VertexJson>,
    pub maximal_simplices: Vec<Vec<String>>,
}

impl ComplexJson {
    pub fn to_complex(&self) -> Result<SimplicialComplex, FormatError> {
        let vertices: Vec<(String, usize)> = self
            .vertices
            .iter()
            .map(|v| (v.id.clone(), v.ty))
            .collect();
        Ok(SimplicialComplex::build(
            self.n,
            &vertices,
            &self.maximal_simplices,
        )?)
    }

    pub fn from_complex(x: &SimplicialComplex) -> Self {
        ComplexJson {
            n: x.dim(),
            vertices: x
                .vertex_ids()
                .iter()
                .enumerate()
                .map(|(v, id)| VertexJson {
                    id: id.clone(),
                    ty: x.vertex_type(v),
                })
                .collect(),
            maximal_simplices: x
                .chambers()
                .iter()
                .map(|c| c.iter().map(|&v| x.vertex_ids()[v].clone()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<Vec<String>>>,
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<WeightedGraph, FormatError> {
        let edges: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|[a, b]| (a.clone(), b.clone()))
            .collect();
        let sides = match &self.sides {
            None => None,
            Some(s) => {
                if s.len() != 2 {
                    return Err(FormatError::BadSides);
                }
                Some((s[0].clone(), s[1].clone()))
            }
        };
        let g = WeightedGraph::new(self.vertices.clone(), &edges, sides)?;
        if g.sides().is_some() {
            Ok(g)
        } else {
            // try to infer a bipartition; plain graphs stay as-is
            match g.clone().with_inferred_sides() {
                Ok(bg) => Ok(bg),
                Err(_) => Ok(g),
            }
        }
    }

    pub fn from_graph(g: &WeightedGraph) -> Self {
        let sides = g.sides().map(|flags| {
            let mut s1 = Vec::new();
            let mut s2 = Vec::new();
            for (v, id) in g.vertex_ids().iter().enumerate() {
                if flags[v] == 0 {
                    s1.push(id.clone());
                } else {
                    s2.push(id.clone());
                }
            }
            vec![s1, s2]
        });
        GraphJson {
            vertices: g.vertex_ids().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|&(i, j)| [g.vertex_ids()[i].clone(), g.vertex_ids()[j].clone()])
                .collect(),
            sides,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkEntryJson {
    pub pair: [usize; 2],
    pub graph: GraphJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkFamilyJson {
    pub n: usize,
    pub links: Vec<LinkEntryJson>,
}

impl LinkFamilyJson {
    pub fn to_family(&self) -> Result<LinkFamilyInput, FormatError> {
        let mut entries = Vec::with_capacity(self.links.len());
        for entry in &self.links {
            let [i, j] = entry.pair;
            if i == j {
                return Err(FormatError::BadPair(vec![i, j]));
            }
            entries.push(((i.min(j), i.max(j)), entry.graph.to_graph()?));
        }
        Ok(LinkFamilyInput {
            n: self.n,
            entries,
        })
    }

    pub fn from_family(fam: &LinkFamilyInput) -> Self {
        LinkFamilyJson {
            n: fam.n,
            links: fam
                .entries
                .iter()
                .map(|((i, j), g)| LinkEntryJson {
                    pair: [*i, *j],
                    graph: GraphJson::from_graph(g),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionGeneratorJson {
    pub perm: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionJson {
    pub generators: Vec<ActionGeneratorJson>,
}
