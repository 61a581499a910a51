//! Line-based instance files.
//!
//! ```text
//! # key=value                 metadata (kept, rewritten sorted)
//! p <tkpm|em> <2n> <m> <k> [epsilon]
//! e <u> <v> <w> [r|b]
//! blob <id> <size> <c|i>      optional prototype block
//! band <i> <j>
//! order <id...>
//! ```
//!
//! Parsing is strict: unknown lines, malformed fields, duplicate edges and
//! header mismatches are errors carrying the line number. Writing is
//! canonical, so `write(parse(x))` is a fixed point of `parse` then
//! `write`.

use std::collections::BTreeMap;

use thiserror::Error;

use tkpm_core::blowup::{Blob, BlobKind, BlowupMap, EdgeOrigin, Prototype};
use tkpm_core::graph::{Color, WeightedColoredGraph};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("instance invalid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] tkpm_core::Error),
}

type Result<T> = std::result::Result<T, InstanceError>;

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(InstanceError::Parse { line, message: message.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Tkpm,
    Em,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Tkpm => "tkpm",
            ProblemKind::Em => "em",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeBlock {
    /// (size, kind) per blob, ids 0..count.
    pub blobs: Vec<(usize, BlobKind)>,
    pub bands: Vec<(usize, usize)>,
    pub order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub kind: ProblemKind,
    pub vertex_count: usize,
    pub k: usize,
    pub epsilon: Option<f64>,
    pub edges: Vec<(usize, usize, u64, Color)>,
    pub prototype: Option<PrototypeBlock>,
    pub metadata: BTreeMap<String, String>,
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut header: Option<(ProblemKind, usize, usize, usize, Option<f64>)> = None;
    let mut edges: Vec<(usize, usize, u64, Color)> = Vec::new();
    let mut blobs: Vec<(usize, BlobKind)> = Vec::new();
    let mut bands: Vec<(usize, usize)> = Vec::new();
    let mut order: Option<Vec<usize>> = None;
    let mut metadata = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some((key, value)) = comment.split_once('=') {
                let key = key.trim();
                if !key.is_empty() && !key.contains(char::is_whitespace) {
                    metadata.insert(key.to_string(), value.trim().to_string());
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if header.is_some() {
                    return parse_err(line_no, "duplicate header line");
                }
                if fields.len() < 5 || fields.len() > 6 {
                    return parse_err(line_no, "header needs: p <tkpm|em> <2n> <m> <k> [epsilon]");
                }
                let kind = match fields[1] {
                    "tkpm" => ProblemKind::Tkpm,
                    "em" => ProblemKind::Em,
                    other => return parse_err(line_no, format!("unknown problem kind '{other}'")),
                };
                let vertex_count = parse_field(fields[2], line_no, "vertex count")?;
                let edge_count = parse_field(fields[3], line_no, "edge count")?;
                let k = parse_field(fields[4], line_no, "k")?;
                let epsilon = match fields.get(5) {
                    None => None,
                    Some(s) => match s.parse::<f64>() {
                        Ok(e) if e.is_finite() => Some(e),
                        _ => return parse_err(line_no, format!("bad epsilon '{s}'")),
                    },
                };
                header = Some((kind, vertex_count, edge_count, k, epsilon));
            }
            "e" => {
                if fields.len() < 4 || fields.len() > 5 {
                    return parse_err(line_no, "edge needs: e <u> <v> <w> [r|b]");
                }
                let u = parse_field(fields[1], line_no, "edge endpoint")?;
                let v = parse_field(fields[2], line_no, "edge endpoint")?;
                let w = parse_field(fields[3], line_no, "edge weight")?;
                let color = match fields.get(4) {
                    None => Color::Uncolored,
                    Some(&"r") => Color::Red,
                    Some(&"b") => Color::Blue,
                    Some(other) => {
                        return parse_err(line_no, format!("unknown color '{other}' (use r or b)"))
                    }
                };
                edges.push((u, v, w, color));
            }
            "blob" => {
                if fields.len() != 4 {
                    return parse_err(line_no, "blob needs: blob <id> <size> <c|i>");
                }
                let id: usize = parse_field(fields[1], line_no, "blob id")?;
                if id != blobs.len() {
                    return parse_err(
                        line_no,
                        format!("blob ids must be consecutive from 0; expected {}", blobs.len()),
                    );
                }
                let size = parse_field(fields[2], line_no, "blob size")?;
                let kind = match fields[3] {
                    "c" => BlobKind::Clique,
                    "i" => BlobKind::Independent,
                    other => return parse_err(line_no, format!("unknown blob kind '{other}'")),
                };
                blobs.push((size, kind));
            }
            "band" => {
                if fields.len() != 3 {
                    return parse_err(line_no, "band needs: band <i> <j>");
                }
                let i = parse_field(fields[1], line_no, "band endpoint")?;
                let j = parse_field(fields[2], line_no, "band endpoint")?;
                bands.push((i, j));
            }
            "order" => {
                if order.is_some() {
                    return parse_err(line_no, "duplicate order line");
                }
                let mut ids = Vec::new();
                for f in &fields[1..] {
                    ids.push(parse_field(f, line_no, "order entry")?);
                }
                order = Some(ids);
            }
            other => return parse_err(line_no, format!("unknown line type '{other}'")),
        }
    }

    let Some((kind, vertex_count, edge_count, k, epsilon)) = header else {
        return parse_err(1, "missing header line 'p ...'");
    };
    if edges.len() != edge_count {
        return Err(InstanceError::Invalid(format!(
            "header declares {edge_count} edges, found {}",
            edges.len()
        )));
    }
    let prototype = if blobs.is_empty() && bands.is_empty() && order.is_none() {
        None
    } else {
        if blobs.is_empty() {
            return Err(InstanceError::Invalid(
                "band/order lines present but no blob lines".into(),
            ));
        }
        Some(PrototypeBlock { blobs, bands, order })
    };
    let file = InstanceFile { kind, vertex_count, k, epsilon, edges, prototype, metadata };
    // Surface structural edge errors (range, loops, duplicates) now.
    file.to_graph()?;
    if let Some(p) = &file.prototype {
        block_to_prototype(p)?;
    }
    Ok(file)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse::<T>()
        .map_err(|_| InstanceError::Parse { line, message: format!("bad {what} '{s}'") })
}

/// Canonical text form: metadata (sorted), header, prototype block, edges
/// in stored order.
pub fn write_instance(file: &InstanceFile) -> String {
    let mut out = String::new();
    for (key, value) in &file.metadata {
        out.push_str(&format!("# {key}={value}\n"));
    }
    out.push_str(&format!(
        "p {} {} {} {}",
        file.kind.as_str(),
        file.vertex_count,
        file.edges.len(),
        file.k
    ));
    if let Some(eps) = file.epsilon {
        out.push_str(&format!(" {eps}"));
    }
    out.push('\n');
    if let Some(p) = &file.prototype {
        for (id, (size, kind)) in p.blobs.iter().enumerate() {
            let kind = match kind {
                BlobKind::Clique => "c",
                BlobKind::Independent => "i",
            };
            out.push_str(&format!("blob {id} {size} {kind}\n"));
        }
        for (i, j) in &p.bands {
            out.push_str(&format!("band {i} {j}\n"));
        }
        if let Some(order) = &p.order {
            out.push_str("order");
            for b in order {
                out.push_str(&format!(" {b}"));
            }
            out.push('\n');
        }
    }
    for (u, v, w, color) in &file.edges {
        match color {
            Color::Uncolored => out.push_str(&format!("e {u} {v} {w}\n")),
            Color::Red => out.push_str(&format!("e {u} {v} {w} r\n")),
            Color::Blue => out.push_str(&format!("e {u} {v} {w} b\n")),
        }
    }
    out
}

impl InstanceFile {
    pub fn to_graph(&self) -> Result<WeightedColoredGraph> {
        Ok(WeightedColoredGraph::new(self.vertex_count, self.edges.clone())?)
    }

    /// The prototype block as a solver prototype plus the blob map implied
    /// by the layout convention: blob i owns the consecutive id range after
    /// blob i-1.
    pub fn to_prototype(&self) -> Result<Option<(Prototype, BlowupMap, Vec<usize>)>> {
        let Some(block) = &self.prototype else { return Ok(None) };
        let prototype = block_to_prototype(block)?;
        if prototype.vertex_count() != self.vertex_count {
            return Err(InstanceError::Invalid(format!(
                "blob sizes sum to {}, header says {}",
                prototype.vertex_count(),
                self.vertex_count
            )));
        }
        let graph = self.to_graph()?;
        let map = infer_blowup_map(&prototype, &graph)?;
        let order = match &block.order {
            Some(o) => o.clone(),
            None => tkpm_core::blowup::find_bandwidth_ordering(&prototype)?,
        };
        Ok(Some((prototype, map, order)))
    }
}

fn block_to_prototype(block: &PrototypeBlock) -> Result<Prototype> {
    let blobs: Vec<Blob> =
        block.blobs.iter().map(|&(size, kind)| Blob { size, kind }).collect();
    let mut p = Prototype::new(blobs, &block.bands)?;
    if let Some(order) = &block.order {
        p = p.with_ordering(order.clone())?;
    }
    Ok(p)
}

/// Reconstruct the blowup map from the consecutive-range convention and
/// check that every edge is structurally consistent with the prototype:
/// inside a clique blob, or across a declared band.
pub fn infer_blowup_map(p: &Prototype, g: &WeightedColoredGraph) -> Result<BlowupMap> {
    let mut blob_of = Vec::with_capacity(g.vertex_count());
    let mut blob_vertices = Vec::with_capacity(p.blob_count());
    let mut next = 0;
    for (i, blob) in p.blobs.iter().enumerate() {
        let ids: Vec<usize> = (next..next + blob.size).collect();
        next += blob.size;
        blob_of.extend(std::iter::repeat_n(i, blob.size));
        blob_vertices.push(ids);
    }
    if next != g.vertex_count() {
        return Err(InstanceError::Invalid(format!(
            "blob sizes cover {next} vertices, graph has {}",
            g.vertex_count()
        )));
    }
    let mut edge_origin = Vec::with_capacity(g.edge_count());
    for (id, e) in g.edges().iter().enumerate() {
        let (bu, bv) = (blob_of[e.u], blob_of[e.v]);
        if bu == bv {
            if p.blobs[bu].kind != BlobKind::Clique {
                return Err(InstanceError::Invalid(format!(
                    "edge {id} ({}, {}) lies inside independent blob {bu}",
                    e.u, e.v
                )));
            }
            edge_origin.push(EdgeOrigin::IntraBlob(bu));
        } else {
            let key = (bu.min(bv), bu.max(bv));
            if !p.bands.contains(&key) {
                return Err(InstanceError::Invalid(format!(
                    "edge {id} ({}, {}) crosses blobs {bu}-{bv} with no band",
                    e.u, e.v
                )));
            }
            edge_origin.push(EdgeOrigin::Band(key.0, key.1));
        }
    }
    Ok(BlowupMap { blob_of, blob_vertices, edge_origin })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_tkpm() {
        let file = parse_instance("p tkpm 2 1 1\ne 0 1 5\n").unwrap();
        assert_eq!(file.kind, ProblemKind::Tkpm);
        assert_eq!(file.vertex_count, 2);
        assert_eq!(file.k, 1);
        assert_eq!(file.edges, vec![(0, 1, 5, Color::Uncolored)]);
        let g = file.to_graph().unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parse_em_with_colors_and_metadata() {
        let text = "# seed=7\n# generator=path\np em 4 2 1\ne 0 1 3 r\ne 2 3 2 b\n";
        let file = parse_instance(text).unwrap();
        assert_eq!(file.kind, ProblemKind::Em);
        assert_eq!(file.metadata["seed"], "7");
        assert_eq!(file.edges[0].3, Color::Red);
    }

    #[test]
    fn roundtrip_is_idempotent() {
        let text = "# b=2\n# a=1\np tkpm 4 2 2 0.5\nblob 0 2 i\nblob 1 2 c\nband 0 1\norder 1 0\ne 0 2 7\ne 1 3 9\n";
        let once = write_instance(&parse_instance(text).unwrap());
        let twice = write_instance(&parse_instance(&once).unwrap());
        assert_eq!(once, twice, "write . parse must be idempotent");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_instance("p tkpm 2 1 1\nx 0 1\n").unwrap_err();
        assert!(matches!(err, InstanceError::Parse { line: 2, .. }), "{err}");

        let err = parse_instance("p tkpm 2 1 1\ne 0 nope 1\n").unwrap_err();
        assert!(matches!(err, InstanceError::Parse { line: 2, .. }));

        let err = parse_instance("e 0 1 1\n").unwrap_err();
        assert!(matches!(err, InstanceError::Parse { line: 1, .. }));
    }

    #[test]
    fn duplicate_edges_rejected() {
        let err = parse_instance("p tkpm 2 2 1\ne 0 1 5\ne 1 0 6\n").unwrap_err();
        assert!(err.to_string().contains("duplicate edge"), "{err}");
    }

    #[test]
    fn edge_count_mismatch_rejected() {
        let err = parse_instance("p tkpm 2 2 1\ne 0 1 5\n").unwrap_err();
        assert!(err.to_string().contains("declares 2 edges"), "{err}");
    }

    #[test]
    fn prototype_consistency_checked() {
        // Edge inside an independent blob is structurally impossible.
        let text = "p tkpm 4 1 1\nblob 0 2 i\nblob 1 2 i\nband 0 1\ne 0 1 5\n";
        let file = parse_instance(text).unwrap();
        let err = file.to_prototype().unwrap_err();
        assert!(err.to_string().contains("independent blob"), "{err}");

        let text = "p tkpm 4 1 1\nblob 0 2 c\nblob 1 2 c\ne 0 2 5\n";
        let file = parse_instance(text).unwrap();
        let err = file.to_prototype().unwrap_err();
        assert!(err.to_string().contains("no band"), "{err}");
    }

    #[test]
    fn epsilon_roundtrips_through_display() {
        let text = "p tkpm 2 1 1 0.3\ne 0 1 5\n";
        let file = parse_instance(text).unwrap();
        assert_eq!(file.epsilon, Some(0.3));
        let written = write_instance(&file);
        assert!(written.contains("p tkpm 2 1 1 0.3\n"));
    }
}
