//! The `sandgraph v1`, `chips v1`, `rotors v1` and `stacks v1` text
//! formats, plus the concatenated document stream the CLI pipes between
//! subcommands.
//!
//! All formats are whitespace-separated with `#` comments. Graph
//! serialization is bit-exact: edges are emitted in out-order with
//! vertices ascending, runs of parallel edges collapsed to a count, so a
//! parse/serialize round trip preserves the rotor order.
//! Rotor and stack files reference out-edges by their 0-based position in
//! the vertex's out-order.

use thiserror::Error;

use crate::graph::{Digraph, GraphError, Vertex};
use crate::rotor::RotorConfig;
use crate::sandpile::ChipConfig;
use crate::stacks::StackConfig;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed header: expected `{0}`")]
    MalformedHeader(&'static str),
    #[error("missing `vertices` line")]
    MissingVertices,
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Invalid(String),
}

fn tokens(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

fn parse_num<T: std::str::FromStr>(lineno: usize, tok: &str) -> Result<T, FormatError> {
    tok.parse()
        .map_err(|_| FormatError::Malformed(lineno, format!("bad number `{}`", tok)))
}

pub fn parse_graph(text: &str) -> Result<Digraph, FormatError> {
    let mut lines = tokens(text);
    match lines.next() {
        Some((_, toks)) if toks == ["sandgraph", "v1"] => {}
        _ => return Err(FormatError::MalformedHeader("sandgraph v1")),
    }
    let mut n: Option<usize> = None;
    let mut sink: Option<Vertex> = None;
    let mut coords: Vec<(usize, i64, i64)> = Vec::new();
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    for (lineno, toks) in lines {
        match toks[0] {
            "vertices" if toks.len() == 2 => n = Some(parse_num(lineno, toks[1])?),
            "sink" if toks.len() == 2 => sink = Some(parse_num(lineno, toks[1])?),
            "coord" if toks.len() == 4 => coords.push((
                parse_num(lineno, toks[1])?,
                parse_num(lineno, toks[2])?,
                parse_num(lineno, toks[3])?,
            )),
            "edge" if toks.len() == 3 || toks.len() == 4 => {
                let u = parse_num(lineno, toks[1])?;
                let v = parse_num(lineno, toks[2])?;
                let count: usize = if toks.len() == 4 {
                    parse_num(lineno, toks[3])?
                } else {
                    1
                };
                for _ in 0..count {
                    edges.push((u, v));
                }
            }
            other => {
                return Err(FormatError::Malformed(
                    lineno,
                    format!("unknown directive `{}`", other),
                ))
            }
        }
    }
    let n = n.ok_or(FormatError::MissingVertices)?;
    let mut g = Digraph::new(n, &edges, sink)?;
    if !coords.is_empty() {
        let mut cs = vec![None; n];
        for (v, x, y) in coords {
            if v >= n {
                return Err(FormatError::Graph(GraphError::VertexOutOfRange(v, n)));
            }
            cs[v] = Some((x, y));
        }
        g = g.with_coords(cs);
    }
    Ok(g)
}

pub fn serialize_graph(g: &Digraph) -> String {
    let mut out = String::from("sandgraph v1\n");
    out.push_str(&format!("vertices {}\n", g.vertex_count()));
    if let Some(s) = g.sink() {
        out.push_str(&format!("sink {}\n", s));
    }
    for v in 0..g.vertex_count() {
        if let Some((x, y)) = g.coord(v) {
            out.push_str(&format!("coord {} {} {}\n", v, x, y));
        }
    }
    for v in 0..g.vertex_count() {
        let mut run: Option<(Vertex, usize)> = None;
        for &e in g.out_edges(v) {
            let h = g.head(e);
            match run {
                Some((head, k)) if head == h => run = Some((head, k + 1)),
                Some((head, k)) => {
                    push_edge(&mut out, v, head, k);
                    run = Some((h, 1));
                }
                None => run = Some((h, 1)),
            }
        }
        if let Some((head, k)) = run {
            push_edge(&mut out, v, head, k);
        }
    }
    out
}

fn push_edge(out: &mut String, u: Vertex, v: Vertex, k: usize) {
    if k == 1 {
        out.push_str(&format!("edge {} {}\n", u, v));
    } else {
        out.push_str(&format!("edge {} {} {}\n", u, v, k));
    }
}

pub fn parse_chips(text: &str, g: &Digraph) -> Result<ChipConfig, FormatError> {
    let mut lines = tokens(text);
    match lines.next() {
        Some((_, toks)) if toks == ["chips", "v1"] => {}
        _ => return Err(FormatError::MalformedHeader("chips v1")),
    }
    let mut counts: Vec<u64> = Vec::with_capacity(g.vertex_count());
    for (lineno, toks) in lines {
        for t in toks {
            counts.push(parse_num(lineno, t)?);
        }
    }
    ChipConfig::from_counts(g, counts)
        .map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn serialize_chips(c: &ChipConfig) -> String {
    let mut out = String::from("chips v1\n");
    for chunk in c.counts().chunks(16) {
        let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_rotors(text: &str, g: &Digraph) -> Result<RotorConfig, FormatError> {
    let mut lines = tokens(text);
    match lines.next() {
        Some((_, toks)) if toks == ["rotors", "v1"] => {}
        _ => return Err(FormatError::MalformedHeader("rotors v1")),
    }
    let mut values: Vec<usize> = Vec::new();
    for (lineno, toks) in lines {
        for t in toks {
            values.push(parse_num(lineno, t)?);
        }
    }
    let mut positions = vec![0usize; g.vertex_count()];
    let mut it = values.into_iter();
    for v in 0..g.vertex_count() {
        if g.outdeg(v) == 0 {
            continue;
        }
        positions[v] = it
            .next()
            .ok_or_else(|| FormatError::Invalid("too few rotor entries".into()))?;
    }
    if it.next().is_some() {
        return Err(FormatError::Invalid("too many rotor entries".into()));
    }
    RotorConfig::from_positions(g, positions).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn serialize_rotors(g: &Digraph, r: &RotorConfig) -> String {
    let mut out = String::from("rotors v1\n");
    let vals: Vec<String> = (0..g.vertex_count())
        .filter(|&v| g.outdeg(v) > 0)
        .map(|v| r.position(v).to_string())
        .collect();
    for chunk in vals.chunks(16) {
        out.push_str(&chunk.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_stacks(text: &str, g: &Digraph) -> Result<StackConfig, FormatError> {
    let mut lines = tokens(text);
    match lines.next() {
        Some((_, toks)) if toks == ["stacks", "v1"] => {}
        _ => return Err(FormatError::MalformedHeader("stacks v1")),
    }
    let mut bases: Vec<Vec<usize>> = (0..g.vertex_count())
        .map(|v| g.out_edges(v).to_vec())
        .collect();
    let mut offsets = vec![0i64; g.vertex_count()];
    for (lineno, toks) in lines {
        if toks[0] != "stack" || toks.len() < 4 {
            return Err(FormatError::Malformed(lineno, "expected `stack <v> <offset> <e..>`".into()));
        }
        let v: usize = parse_num(lineno, toks[1])?;
        if v >= g.vertex_count() {
            return Err(FormatError::Graph(GraphError::VertexOutOfRange(v, g.vertex_count())));
        }
        offsets[v] = parse_num(lineno, toks[2])?;
        let mut base = Vec::with_capacity(toks.len() - 3);
        for t in &toks[3..] {
            let idx: usize = parse_num(lineno, t)?;
            let e = *g
                .out_edges(v)
                .get(idx)
                .ok_or_else(|| FormatError::Malformed(lineno, format!("out-edge index {} out of range", idx)))?;
            base.push(e);
        }
        bases[v] = base;
    }
    StackConfig::new(g, bases, offsets).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn serialize_stacks(g: &Digraph, s: &StackConfig) -> String {
    let mut out = String::from("stacks v1\n");
    for v in 0..g.vertex_count() {
        if g.outdeg(v) == 0 {
            continue;
        }
        let base: Vec<String> = s
            .base(v)
            .iter()
            .map(|&e| g.edge_position(e).to_string())
            .collect();
        out.push_str(&format!("stack {} {} {}\n", v, s.offset(v), base.join(" ")));
    }
    out
}

/// A pipeline document stream: concatenated documents, each introduced by
/// its header line. The graph must precede any configuration documents.
#[derive(Debug, Default)]
pub struct DocStream {
    pub graph: Option<Digraph>,
    pub chips: Option<ChipConfig>,
    pub rotors: Option<RotorConfig>,
    pub stacks: Option<StackConfig>,
}

const HEADERS: [&str; 4] = ["sandgraph v1", "chips v1", "rotors v1", "stacks v1"];

pub fn parse_stream(text: &str) -> Result<DocStream, FormatError> {
    // split on header lines
    let mut docs: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let stripped = line.split('#').next().unwrap_or("").trim();
        let head = HEADERS
            .iter()
            .find(|h| stripped.split_whitespace().eq(h.split_whitespace()));
        match head {
            Some(h) => docs.push((h.to_string(), format!("{}\n", line))),
            None => match docs.last_mut() {
                Some((_, body)) => {
                    body.push_str(line);
                    body.push('\n');
                }
                None if stripped.is_empty() => {}
                None => {
                    return Err(FormatError::Invalid(format!(
                        "content before any document header: `{}`",
                        line
                    )))
                }
            },
        }
    }
    let mut stream = DocStream::default();
    for (header, body) in docs {
        match header.as_str() {
            "sandgraph v1" => stream.graph = Some(parse_graph(&body)?),
            "chips v1" => {
                let g = stream
                    .graph
                    .as_ref()
                    .ok_or_else(|| FormatError::Invalid("chips before graph".into()))?;
                stream.chips = Some(parse_chips(&body, g)?);
            }
            "rotors v1" => {
                let g = stream
                    .graph
                    .as_ref()
                    .ok_or_else(|| FormatError::Invalid("rotors before graph".into()))?;
                stream.rotors = Some(parse_rotors(&body, g)?);
            }
            "stacks v1" => {
                let g = stream
                    .graph
                    .as_ref()
                    .ok_or_else(|| FormatError::Invalid("stacks before graph".into()))?;
                stream.stacks = Some(parse_stacks(&body, g)?);
            }
            _ => unreachable!(),
        }
    }
    Ok(stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn parse_parallel_edges() {
        let g = parse_graph("sandgraph v1\nvertices 2\nsink 1\nedge 0 1 2\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.sink(), Some(1));
        assert_eq!(g.outdeg(0), 2);
    }

    #[test]
    fn round_trip_families() {
        for f in [
            Family::Complete(3),
            Family::GridWired(3),
            Family::DirectedTorus(2),
            Family::PathBidirected(4),
            Family::DiskWired(3),
        ] {
            let g = generate(&f);
            let text = serialize_graph(&g);
            let g2 = parse_graph(&text).unwrap();
            assert_eq!(g, g2, "{:?}", f);
            assert_eq!(serialize_graph(&g2), text);
        }
    }

    #[test]
    fn bounds_checked() {
        let err = parse_graph("sandgraph v1\nvertices 2\nedge 0 5\n");
        assert!(matches!(
            err,
            Err(FormatError::Graph(GraphError::VertexOutOfRange(5, 2)))
        ));
    }

    #[test]
    fn edge_out_of_sink_rejected() {
        let err = parse_graph("sandgraph v1\nvertices 2\nsink 0\nedge 0 1\n");
        assert!(matches!(err, Err(FormatError::Graph(GraphError::EdgeOutOfSink(0, 1)))));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "sandgraph v1\n# a comment\n\nvertices 2 # trailing\nedge 0 1\nedge 1 0\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn chips_round_trip() {
        let g = generate(&Family::GridWired(2));
        let c = ChipConfig::from_counts(&g, vec![3, 1, 0, 2, 0]).unwrap();
        let text = serialize_chips(&c);
        assert_eq!(parse_chips(&text, &g).unwrap(), c);
    }

    #[test]
    fn chips_sink_entry_must_be_zero() {
        let g = generate(&Family::GridWired(2));
        assert!(parse_chips("chips v1\n0 0 0 0 7\n", &g).is_err());
    }

    #[test]
    fn rotors_round_trip() {
        let g = generate(&Family::GridWired(2));
        let r = RotorConfig::from_positions(&g, vec![1, 3, 0, 2, 0]).unwrap();
        let text = serialize_rotors(&g, &r);
        assert_eq!(parse_rotors(&text, &g).unwrap(), r);
    }

    #[test]
    fn stacks_round_trip() {
        let g = crate::graph::two_vertex_triangle();
        let s = StackConfig::new(&g, vec![vec![1, 0], vec![2, 3], vec![]], vec![-2, 5, 0]).unwrap();
        let text = serialize_stacks(&g, &s);
        assert_eq!(parse_stacks(&text, &g).unwrap(), s);
    }

    #[test]
    fn stream_graph_then_chips() {
        let g = generate(&Family::GridWired(2));
        let c = ChipConfig::from_counts(&g, vec![1, 2, 3, 0, 0]).unwrap();
        let text = format!("{}{}", serialize_graph(&g), serialize_chips(&c));
        let stream = parse_stream(&text).unwrap();
        assert_eq!(stream.graph.unwrap(), g);
        assert_eq!(stream.chips.unwrap(), c);
    }

    #[test]
    fn stream_requires_graph_first() {
        assert!(parse_stream("chips v1\n1 2 3\n").is_err());
    }
}
