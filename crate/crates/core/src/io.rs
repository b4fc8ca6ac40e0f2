//! JSON file formats for graphs, metric spaces, normal paths and covers.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::median::{BuildOptions, MedianGraph, DEFAULT_VALIDATION_CAP};
use crate::metric::{Cover, CoverMetrics, Dist, FiniteMetricSpace};
use crate::net::GraphCover;

/// Distances serialize as JSON integers when integral and as `"p/q"`
/// strings otherwise.
pub mod dist_repr {
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    use crate::metric::Dist;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    pub fn to_json(d: &Dist) -> serde_json::Value {
        if d.is_integer() {
            serde_json::Value::from(d.to_integer())
        } else {
            serde_json::Value::from(d.to_string())
        }
    }

    pub fn parse(text: &str) -> Result<Dist, String> {
        let text = text.trim();
        let parsed = match text.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|e| format!("{text}: {e}"))?;
                let q: i64 = q.trim().parse().map_err(|e| format!("{text}: {e}"))?;
                if q == 0 {
                    return Err(format!("{text}: zero denominator"));
                }
                Dist::new(p, q)
            }
            None => Dist::from_integer(text.parse().map_err(|e| format!("{text}: {e}"))?),
        };
        Ok(parsed)
    }

    pub fn serialize<S: Serializer>(d: &Dist, s: S) -> Result<S::Ok, S::Error> {
        if d.is_integer() {
            Repr::Int(d.to_integer()).serialize(s)
        } else {
            Repr::Text(d.to_string()).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Dist, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(i) => Ok(Dist::from_integer(i)),
            Repr::Text(t) => parse(&t).map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<usize, String>>,
    #[serde(default)]
    pub validated: bool,
}

impl GraphFile {
    pub fn from_graph(graph: &MedianGraph) -> Self {
        GraphFile {
            vertices: graph.vertex_count(),
            edges: graph.edges().iter().map(|&(u, v)| [u, v]).collect(),
            labels: graph.label_map(),
            validated: graph.is_validated(),
        }
    }

    /// Rebuild the graph. Files up to `cap` vertices are validated again;
    /// larger ones are trusted only when marked validated.
    pub fn into_graph(self, cap: usize) -> Result<MedianGraph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let opts = if self.vertices <= cap {
            BuildOptions {
                vertex_cap: cap,
                ..BuildOptions::default()
            }
        } else if self.validated {
            BuildOptions::trusted()
        } else {
            BuildOptions::unvalidated()
        };
        let graph = MedianGraph::build(self.vertices, &edges, opts)?;
        Ok(match self.labels {
            Some(map) => {
                if let Some(&v) = map.keys().find(|&&v| v >= self.vertices) {
                    return Err(Error::Malformed(format!("label for missing vertex {v}")));
                }
                let labels = (0..self.vertices)
                    .map(|v| map.get(&v).cloned().unwrap_or_else(|| v.to_string()))
                    .collect();
                graph.with_labels(labels)
            }
            None => graph,
        })
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_graph(path: &Path) -> Result<MedianGraph> {
    read_json::<GraphFile>(path)?.into_graph(DEFAULT_VALIDATION_CAP)
}

pub fn save_graph(path: &Path, graph: &MedianGraph) -> Result<()> {
    write_json(path, &GraphFile::from_graph(graph))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: usize,
    pub dist: Vec<Vec<serde_json::Value>>,
}

impl SpaceFile {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        SpaceFile {
            points: space.points(),
            dist: space
                .rows()
                .iter()
                .map(|row| row.iter().map(dist_repr::to_json).collect())
                .collect(),
        }
    }

    pub fn into_space(self) -> Result<FiniteMetricSpace> {
        if self.dist.len() != self.points {
            return Err(Error::Malformed(format!(
                "{} points but {} distance rows",
                self.points,
                self.dist.len()
            )));
        }
        let rows = self
            .dist
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| match v {
                        serde_json::Value::Number(n) => n
                            .as_i64()
                            .map(Dist::from_integer)
                            .ok_or_else(|| Error::Malformed(format!("non-integral number {n}"))),
                        serde_json::Value::String(s) => dist_repr::parse(&s).map_err(Error::Malformed),
                        other => Err(Error::Malformed(format!("bad distance {other}"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteMetricSpace::new(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFile {
    pub basepoint: usize,
    pub l: usize,
    pub sets: BTreeMap<String, Vec<usize>>,
    pub metrics: CoverBlock,
}

/// Metrics of a cover `U_l`, with the multiplicity taken at radius `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverBlock {
    #[serde(with = "dist_repr")]
    pub mesh: Dist,
    pub m: usize,
    pub m_l: usize,
}

impl From<CoverMetrics> for CoverBlock {
    fn from(c: CoverMetrics) -> Self {
        CoverBlock {
            mesh: c.mesh,
            m: c.m,
            m_l: c.m_r,
        }
    }
}

impl CoverFile {
    pub fn from_cover(cover: &GraphCover) -> Self {
        CoverFile {
            basepoint: cover.basepoint,
            l: cover.l,
            sets: cover
                .cover
                .names
                .iter()
                .cloned()
                .zip(cover.cover.sets.iter().map(|s| s.ones().collect()))
                .collect(),
            metrics: cover.metrics.into(),
        }
    }

    /// Sets in name order, as bitsets over `n` points.
    pub fn to_cover(&self, n: usize) -> Result<Cover> {
        let mut names = Vec::with_capacity(self.sets.len());
        let mut sets = Vec::with_capacity(self.sets.len());
        for (name, members) in &self.sets {
            let mut set = fixedbitset::FixedBitSet::with_capacity(n);
            for &x in members {
                if x >= n {
                    return Err(Error::Malformed(format!("{name} names missing point {x}")));
                }
                set.insert(x);
            }
            names.push(name.clone());
            sets.push(set);
        }
        Ok(Cover { names, sets })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn graph_roundtrip() {
        let g = generators::grid(&[2, 3]).unwrap();
        let file = GraphFile::from_graph(&g);
        let text = serde_json::to_string(&file).unwrap();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let rebuilt = back.into_graph(DEFAULT_VALIDATION_CAP).unwrap();
        assert_eq!(rebuilt.edges(), g.edges());
        assert_eq!(rebuilt.label(4), "(1,1)");
        assert!(rebuilt.is_validated());
    }

    #[test]
    fn malformed_graphs() {
        let k23: GraphFile = serde_json::from_str(
            r#"{"vertices":5,"edges":[[0,2],[0,3],[0,4],[1,2],[1,3],[1,4]]}"#,
        )
        .unwrap();
        assert!(matches!(k23.into_graph(100), Err(Error::NotMedian { .. })));
        let big: GraphFile = serde_json::from_str(r#"{"vertices":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert!(!big.into_graph(2).unwrap().is_validated());
    }

    #[test]
    fn space_roundtrip() {
        let text = r#"{"points":3,"dist":[[0,"1/2",1],["1/2",0,"1/2"],[1,"1/2",0]]}"#;
        let file: SpaceFile = serde_json::from_str(text).unwrap();
        let space = file.into_space().unwrap();
        assert_eq!(space.d(0, 1), Dist::new(1, 2));
        let again = SpaceFile::from_space(&space);
        assert_eq!(serde_json::to_string(&again).unwrap(), text.replace(' ', ""));
        let bad: SpaceFile = serde_json::from_str(r#"{"points":2,"dist":[[0,1.5],[1.5,0]]}"#).unwrap();
        assert!(matches!(bad.into_space(), Err(Error::Malformed(_))));
    }

    #[test]
    fn dist_text() {
        assert_eq!(dist_repr::parse("3/6").unwrap(), Dist::new(1, 2));
        assert_eq!(dist_repr::parse("4").unwrap(), Dist::from_integer(4));
        assert!(dist_repr::parse("1/0").is_err());
        assert!(dist_repr::parse("x").is_err());
    }
}
