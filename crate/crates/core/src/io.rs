//! Versioned plain-text formats for meshes, graphs and embeddings, and
//! polynomial coefficient lists.
//!
//! Every file starts with `<format> <version>`. Blank lines and lines starting
//! with `#` are ignored. Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::{ArithmeticError, IntPolynomial};
use crate::embedding::{EmbeddedEdge, EmbeddedGraph, EmbeddingError};
use crate::skeleton::{SkeletonError, SkeletonGraph};
use crate::voronoi::triangulation::GoodTriangulation;

pub const FORMAT_VERSION: u32 = 1;
pub const MESH_FORMAT: &str = "hypthick-mesh";
pub const GRAPH_FORMAT: &str = "hypthick-graph";
pub const EMBEDDING_FORMAT: &str = "hypthick-embedding";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("expected header `{expected} {FORMAT_VERSION}`, found `{found}`")]
    Header { expected: &'static str, found: String },
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

pub type Result<T> = std::result::Result<T, IoError>;

/// Non-comment lines as `(line number, tokens)`.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            self.last = i + 1;
            return Some((i + 1, l.split_whitespace().collect()));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_tokens().ok_or_else(|| IoError::Parse {
            line: self.last + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }

    fn header(&mut self, format: &'static str) -> Result<()> {
        let (_, t) = self.expect("header")?;
        if t.len() != 2 || t[0] != format || t[1] != FORMAT_VERSION.to_string() {
            return Err(IoError::Header {
                expected: format,
                found: t.join(" "),
            });
        }
        Ok(())
    }

    /// `<key> <count>`.
    fn keyed(&mut self, key: &str) -> Result<usize> {
        let (line, t) = self.expect(key)?;
        if t.len() != 2 || t[0] != key {
            return Err(IoError::Parse {
                line,
                msg: format!("expected `{key} <value>`"),
            });
        }
        num(line, t[1])
    }
}

fn num<T: FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| IoError::Parse {
        line,
        msg: format!("cannot parse `{s}`"),
    })
}

fn tag(line: usize, t: &[&str], tag: &str, min_len: usize) -> Result<()> {
    if t.first() != Some(&tag) || t.len() < min_len {
        return Err(IoError::Parse {
            line,
            msg: format!("expected a `{tag}` line with at least {} fields", min_len - 1),
        });
    }
    Ok(())
}

fn push_floats(out: &mut String, xs: &[f64]) {
    for x in xs {
        write!(out, " {x:?}").unwrap();
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshVertex {
    /// Hyperboloid coordinates of the representative.
    pub coords: Vec<f64>,
    pub stratum: usize,
    pub stabilizer_order: usize,
    pub source_dim: usize,
}

/// Quotient triangulation: vertex orbits and top simplex orbits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mesh {
    pub dim: usize,
    pub vertices: Vec<MeshVertex>,
    pub simplices: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn from_triangulation(t: &GoodTriangulation) -> Self {
        Self {
            dim: t.dim,
            vertices: t
                .vertices
                .iter()
                .map(|v| MeshVertex {
                    coords: v.rep.as_slice().to_vec(),
                    stratum: v.stratum,
                    stabilizer_order: v.stabilizer_order,
                    source_dim: v.source_dim,
                })
                .collect(),
            simplices: t.simplices[t.dim].iter().map(|s| s.vertices.clone()).collect(),
        }
    }

    /// Vertex pairs of top simplices, without loops from identified vertices.
    pub fn skeleton(&self) -> Result<SkeletonGraph> {
        let mut e: Vec<(usize, usize)> = Vec::new();
        for s in &self.simplices {
            for (i, &a) in s.iter().enumerate() {
                for &b in &s[i + 1..] {
                    if a != b {
                        e.push((a.min(b), a.max(b)));
                    }
                }
            }
        }
        e.sort_unstable();
        e.dedup();
        Ok(SkeletonGraph::new(self.vertices.len(), &e)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{MESH_FORMAT} {FORMAT_VERSION}\ndim {}\nvertices {}\n", self.dim, self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            write!(s, "v {i} {} {} {}", v.stratum, v.stabilizer_order, v.source_dim).unwrap();
            push_floats(&mut s, &v.coords);
            s.push('\n');
        }
        writeln!(s, "simplices {}", self.simplices.len()).unwrap();
        for (i, t) in self.simplices.iter().enumerate() {
            write!(s, "s {i}").unwrap();
            for v in t {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Lines::new(text);
        r.header(MESH_FORMAT)?;
        let dim = r.keyed("dim")?;
        let nv = r.keyed("vertices")?;
        let mut vertices = Vec::with_capacity(nv);
        for i in 0..nv {
            let (line, t) = r.expect("a vertex line")?;
            tag(line, &t, "v", 5 + dim + 1)?;
            if num::<usize>(line, t[1])? != i || t.len() != 5 + dim + 1 {
                return Err(IoError::Parse {
                    line,
                    msg: format!("expected vertex {i} with {} coordinates", dim + 1),
                });
            }
            vertices.push(MeshVertex {
                stratum: num(line, t[2])?,
                stabilizer_order: num(line, t[3])?,
                source_dim: num(line, t[4])?,
                coords: t[5..].iter().map(|x| num(line, x)).collect::<Result<_>>()?,
            });
        }
        let ns = r.keyed("simplices")?;
        let mut simplices = Vec::with_capacity(ns);
        for i in 0..ns {
            let (line, t) = r.expect("a simplex line")?;
            tag(line, &t, "s", dim + 3)?;
            if num::<usize>(line, t[1])? != i || t.len() != dim + 3 {
                return Err(IoError::Parse {
                    line,
                    msg: format!("expected simplex {i} with {} vertices", dim + 1),
                });
            }
            let s: Vec<usize> = t[2..].iter().map(|x| num(line, x)).collect::<Result<_>>()?;
            if let Some(&v) = s.iter().find(|&&v| v >= nv) {
                return Err(IoError::Parse {
                    line,
                    msg: format!("vertex {v} out of range"),
                });
            }
            simplices.push(s);
        }
        Ok(Self { dim, vertices, simplices })
    }

    /// Wavefront OBJ of the Poincare-disk images of the representatives (dimension 2 only).
    pub fn to_obj(&self) -> Option<String> {
        if self.dim != 2 {
            return None;
        }
        let mut s = String::new();
        for v in &self.vertices {
            let d = 1.0 + v.coords[0];
            writeln!(s, "v {:?} {:?} 0", v.coords[1] / d, v.coords[2] / d).unwrap();
        }
        for t in &self.simplices {
            writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
        }
        Some(s)
    }
}

pub fn graph_to_text(g: &SkeletonGraph) -> String {
    let mut s = format!("{GRAPH_FORMAT} {FORMAT_VERSION}\nvertices {}\nedges {}\n", g.vertex_count(), g.edge_count());
    for (i, &(a, b)) in g.edges().iter().enumerate() {
        write!(s, "e {a} {b}").unwrap();
        if let Some(l) = &g.lengths {
            write!(s, " {:?}", l[i]).unwrap();
        }
        s.push('\n');
    }
    s
}

/// Edge lines are `e a b [length]`; lengths must be given for all edges or none.
pub fn parse_graph(text: &str) -> Result<SkeletonGraph> {
    let mut r = Lines::new(text);
    r.header(GRAPH_FORMAT)?;
    let n = r.keyed("vertices")?;
    let m = r.keyed("edges")?;
    let mut edges = Vec::with_capacity(m);
    let mut lengths = Vec::new();
    for _ in 0..m {
        let (line, t) = r.expect("an edge line")?;
        tag(line, &t, "e", 3)?;
        if t.len() > 4 {
            return Err(IoError::Parse {
                line,
                msg: "edge line has extra fields".into(),
            });
        }
        edges.push((num(line, t[1])?, num(line, t[2])?));
        if t.len() == 4 {
            lengths.push(num::<f64>(line, t[3])?);
        }
    }
    if !lengths.is_empty() && lengths.len() != m {
        return Err(IoError::Parse {
            line: r.last,
            msg: "lengths given for some edges only".into(),
        });
    }
    let mut g = SkeletonGraph::new(n, &edges)?;
    if !lengths.is_empty() {
        // the graph stores edges sorted; carry lengths along
        let mut keyed: Vec<((usize, usize), f64)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).zip(lengths).collect();
        keyed.sort_by(|x, y| x.0.cmp(&y.0));
        g.lengths = Some(keyed.into_iter().map(|x| x.1).collect());
    }
    Ok(g)
}

/// Edge lines are `e a b k w_1 ... w_k` with `k` interior waypoints of `N` coordinates each.
pub fn embedding_to_text(g: &EmbeddedGraph) -> String {
    let mut s = format!("{EMBEDDING_FORMAT} {FORMAT_VERSION}\nN {}\nvertices {}\n", g.dim, g.vertices.len());
    for (i, v) in g.vertices.iter().enumerate() {
        write!(s, "v {i}").unwrap();
        push_floats(&mut s, v);
        s.push('\n');
    }
    writeln!(s, "edges {}", g.edges.len()).unwrap();
    for e in &g.edges {
        let inner = &e.path[1..e.path.len() - 1];
        write!(s, "e {} {} {}", e.a, e.b, inner.len()).unwrap();
        for p in inner {
            push_floats(&mut s, p);
        }
        s.push('\n');
    }
    s
}

pub fn parse_embedding(text: &str) -> Result<EmbeddedGraph> {
    let mut r = Lines::new(text);
    r.header(EMBEDDING_FORMAT)?;
    let dim = r.keyed("N")?;
    let nv = r.keyed("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let (line, t) = r.expect("a vertex line")?;
        tag(line, &t, "v", dim + 2)?;
        if num::<usize>(line, t[1])? != i || t.len() != dim + 2 {
            return Err(IoError::Parse {
                line,
                msg: format!("expected vertex {i} with {dim} coordinates"),
            });
        }
        vertices.push(t[2..].iter().map(|x| num(line, x)).collect::<Result<Vec<f64>>>()?);
    }
    let m = r.keyed("edges")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, t) = r.expect("an edge line")?;
        tag(line, &t, "e", 4)?;
        let (a, b, k): (usize, usize, usize) = (num(line, t[1])?, num(line, t[2])?, num(line, t[3])?);
        if t.len() != 4 + k * dim {
            return Err(IoError::Parse {
                line,
                msg: format!("expected {k} waypoints of {dim} coordinates"),
            });
        }
        let (Some(pa), Some(pb)) = (vertices.get(a), vertices.get(b)) else {
            return Err(IoError::Parse {
                line,
                msg: "edge references a missing vertex".into(),
            });
        };
        let mut path = vec![pa.clone()];
        for w in t[4..].chunks(dim) {
            path.push(w.iter().map(|x| num(line, x)).collect::<Result<Vec<f64>>>()?);
        }
        path.push(pb.clone());
        edges.push(EmbeddedEdge { a, b, path });
    }
    let g = EmbeddedGraph { dim, vertices, edges };
    g.validate()?;
    Ok(g)
}

/// Integer coefficients, constant term first, separated by commas and/or
/// whitespace, optionally in brackets: `[1, 1, 0, -1]` or `1 1 0 -1`.
pub fn parse_polynomial(text: &str) -> Result<IntPolynomial> {
    let body = text.trim().trim_start_matches('[').trim_end_matches(']');
    let coeffs = body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| num::<BigInt>(1, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPolynomial::new(coeffs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_forms() {
        let p = parse_polynomial("[1, -3, 1]").unwrap();
        assert_eq!(p.to_string(), "x^2 - 3x + 1");
        assert_eq!(parse_polynomial("1 -3\t1").unwrap(), p);
        assert!(matches!(parse_polynomial("1, 2"), Err(IoError::Arithmetic(_))));
        assert!(matches!(parse_polynomial("1, x"), Err(IoError::Parse { .. })));
    }

    #[test]
    fn graph_round_trip() {
        let mut g = SkeletonGraph::new(4, &[(2, 1), (0, 3), (0, 1)]).unwrap();
        g.lengths = Some(vec![0.5, 0.25, 1.0 / 3.0]);
        let text = graph_to_text(&g);
        let h = parse_graph(&text).unwrap();
        assert_eq!(h.edges(), g.edges());
        assert_eq!(h.lengths, g.lengths);
        assert_eq!(graph_to_text(&h), text);
    }

    #[test]
    fn graph_errors_name_lines() {
        let e = parse_graph("hypthick-graph 1\nvertices 3\nedges 2\ne 0 1\ne 0 q\n").unwrap_err();
        assert!(e.to_string().starts_with("line 5"), "{e}");
        assert!(matches!(parse_graph("hypthick-graph 2\n"), Err(IoError::Header { .. })));
        assert!(matches!(parse_graph("hypthick-graph 1\nvertices 2\nedges 1\ne 0 5\n"), Err(IoError::Skeleton(_))));
    }

    #[test]
    fn embedding_round_trip() {
        let g = EmbeddedGraph {
            dim: 3,
            vertices: vec![vec![0.0, 0.0, 0.0], vec![4.0, 0.1, -1e-17]],
            edges: vec![EmbeddedEdge {
                a: 0,
                b: 1,
                path: vec![vec![0.0, 0.0, 0.0], vec![0.0, 3.0, 0.0], vec![4.0, 3.0, 0.0], vec![4.0, 0.1, -1e-17]],
            }],
        };
        let text = embedding_to_text(&g);
        assert!(text.contains("e 0 1 2 0.0 3.0 0.0 4.0 3.0 0.0"));
        assert_eq!(parse_embedding(&text).unwrap(), g);
        let bad = text.replace("e 0 1 2", "e 0 1 3");
        assert!(parse_embedding(&bad).is_err());
    }
}
