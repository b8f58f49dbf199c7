//! JSON documents for graphs, morphisms, presentations, complexes,
//! homomorphisms and graphs of graphs.
//!
//! Maps keyed by id are written as JSON objects with sorted keys, so equal
//! objects always serialize to identical text.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{Face, FiniteQuotientHom, PresentationData, TwoComplex};
use crate::error::{validation, Error, Result};
use crate::gog::{EdgeMaps, GraphOfGraphs};
use crate::graph::{EdgePath, GraphMorphism, SerreGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub domain: GraphDoc,
    pub codomain: GraphDoc,
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub faces: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDoc {
    pub modulus: usize,
    pub values: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeMapsDoc {
    pub iota: MorphismDoc,
    pub tau: MorphismDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GogDoc {
    pub underlying: GraphDoc,
    pub vertex_graphs: BTreeMap<String, GraphDoc>,
    pub edge_graphs: BTreeMap<String, GraphDoc>,
    pub maps: BTreeMap<String, EdgeMapsDoc>,
}

/// Any supported document, recognized by its keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Document {
    Gog(GogDoc),
    Morphism(MorphismDoc),
    Presentation(PresentationDoc),
    Complex(ComplexDoc),
    Graph(GraphDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Gog(_) => "gog",
            Document::Morphism(_) => "morphism",
            Document::Presentation(_) => "presentation",
            Document::Complex(_) => "complex",
            Document::Graph(_) => "graph",
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("unrecognized document: {e}")))
}

pub fn parse_hom(text: &str) -> Result<HomDoc> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize") + "\n"
}

impl GraphDoc {
    pub fn from_graph(g: &SerreGraph) -> Self {
        GraphDoc {
            vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
            edges: g
                .edge_ids()
                .map(|e| {
                    let edge = g.edge(e);
                    EdgeDoc {
                        id: edge.name.clone(),
                        from: g.vertex_name(edge.origin).to_string(),
                        to: g.vertex_name(edge.terminus).to_string(),
                    }
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<SerreGraph> {
        let edges: Vec<(&str, &str, &str)> =
            self.edges.iter().map(|e| (e.id.as_str(), e.from.as_str(), e.to.as_str())).collect();
        let vertices: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        SerreGraph::from_names(&vertices, &edges)
    }
}

impl MorphismDoc {
    pub fn from_morphism(f: &GraphMorphism) -> Self {
        let (d, c) = (f.domain(), f.codomain());
        MorphismDoc {
            domain: GraphDoc::from_graph(d),
            codomain: GraphDoc::from_graph(c),
            vertex_map: d
                .vertices()
                .map(|v| (d.vertex_name(v).to_string(), c.vertex_name(f.vertex_image(v)).to_string()))
                .collect(),
            edge_map: d.edge_ids().map(|e| (d.edge_name(e).to_string(), f.edge_image(e).tokens(c))).collect(),
        }
    }

    pub fn to_morphism(&self) -> Result<GraphMorphism> {
        let (d, c) = (self.domain.to_graph()?, self.codomain.to_graph()?);
        check_keys(self.vertex_map.keys(), |k| d.vertex_by_name(k).is_some(), "vertex_map")?;
        check_keys(self.edge_map.keys(), |k| d.edge_by_name(k).is_some(), "edge_map")?;
        GraphMorphism::from_tokens(d, c, &self.vertex_map, &self.edge_map)
    }
}

fn check_keys<'a>(keys: impl Iterator<Item = &'a String>, known: impl Fn(&str) -> bool, what: &str) -> Result<()> {
    for k in keys {
        if !known(k) {
            return Err(validation(format!("{what} mentions unknown id `{k}`")));
        }
    }
    Ok(())
}

impl PresentationDoc {
    pub fn from_presentation(p: &PresentationData) -> Self {
        PresentationDoc { generators: p.basis.names().to_vec(), relators: p.relator_strings() }
    }

    pub fn to_presentation(&self) -> Result<PresentationData> {
        PresentationData::parse(&self.generators, &self.relators)
    }
}

impl ComplexDoc {
    pub fn from_complex(c: &TwoComplex) -> Self {
        let g = GraphDoc::from_graph(&c.skeleton);
        ComplexDoc {
            vertices: g.vertices,
            edges: g.edges,
            faces: c.faces.iter().map(|f| f.boundary.tokens(&c.skeleton)).collect(),
        }
    }

    /// Faces are named `f0, f1, ...` in list order.
    pub fn to_complex(&self) -> Result<TwoComplex> {
        let skeleton = GraphDoc { vertices: self.vertices.clone(), edges: self.edges.clone() }.to_graph()?;
        let mut faces = Vec::new();
        for (i, tokens) in self.faces.iter().enumerate() {
            let darts = tokens.iter().map(|t| skeleton.parse_dart(t)).collect::<Result<Vec<_>>>()?;
            if darts.is_empty() {
                return Err(validation(format!("face {i} has an empty boundary")));
            }
            faces.push(Face { name: format!("f{i}"), boundary: EdgePath::new(&skeleton, darts)? });
        }
        TwoComplex::new(skeleton, faces)
    }
}

impl HomDoc {
    pub fn from_hom(h: &FiniteQuotientHom, g: &SerreGraph) -> Self {
        HomDoc {
            modulus: h.modulus(),
            values: g.edge_ids().map(|e| (g.edge_name(e).to_string(), h.edge_value(e))).collect(),
        }
    }

    pub fn to_hom(&self, g: &SerreGraph) -> Result<FiniteQuotientHom> {
        FiniteQuotientHom::from_named(g, self.modulus, &self.values)
    }
}

impl GogDoc {
    pub fn from_gog(g: &GraphOfGraphs) -> Self {
        let u = g.underlying();
        GogDoc {
            underlying: GraphDoc::from_graph(u),
            vertex_graphs: u
                .vertices()
                .map(|v| (u.vertex_name(v).to_string(), GraphDoc::from_graph(g.vertex_graph(v))))
                .collect(),
            edge_graphs: u
                .edge_ids()
                .map(|e| (u.edge_name(e).to_string(), GraphDoc::from_graph(g.edge_graph(e))))
                .collect(),
            maps: u
                .edge_ids()
                .map(|e| {
                    let m = g.maps(e);
                    let doc = EdgeMapsDoc {
                        iota: MorphismDoc::from_morphism(&m.iota),
                        tau: MorphismDoc::from_morphism(&m.tau),
                    };
                    (u.edge_name(e).to_string(), doc)
                })
                .collect(),
        }
    }

    pub fn to_gog(&self) -> Result<GraphOfGraphs> {
        let u = self.underlying.to_graph()?;
        check_keys(self.vertex_graphs.keys(), |k| u.vertex_by_name(k).is_some(), "vertex_graphs")?;
        check_keys(self.edge_graphs.keys(), |k| u.edge_by_name(k).is_some(), "edge_graphs")?;
        check_keys(self.maps.keys(), |k| u.edge_by_name(k).is_some(), "maps")?;
        let mut vertex_graphs = Vec::new();
        for v in u.vertices() {
            let name = u.vertex_name(v);
            let doc = self
                .vertex_graphs
                .get(name)
                .ok_or_else(|| validation(format!("no vertex graph for `{name}`")))?;
            vertex_graphs.push(doc.to_graph()?);
        }
        let mut edge_graphs = Vec::new();
        let mut maps = Vec::new();
        for e in u.edge_ids() {
            let name = u.edge_name(e);
            let doc = self.edge_graphs.get(name).ok_or_else(|| validation(format!("no edge graph for `{name}`")))?;
            edge_graphs.push(doc.to_graph()?);
            let m = self.maps.get(name).ok_or_else(|| validation(format!("no maps for `{name}`")))?;
            maps.push(EdgeMaps { iota: m.iota.to_morphism()?, tau: m.tau.to_morphism()? });
        }
        GraphOfGraphs::new(u, vertex_graphs, edge_graphs, maps)
    }
}
