//! Text formats: weighted edge lists, vertex-set files, point CSVs, label
//! sidecars and mass vectors. Reals are written with 17 significant digits
//! so a write/read cycle reproduces every bit.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::pagerank::SparseMass;

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A graph read from an edge list, with the map back to file ids when the
/// file ids were not exactly `0..n`.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: WeightedGraph,
    /// `ids[i]` is the file id of internal vertex `i`; `None` when the file
    /// ids are already `0..n`.
    pub ids: Option<Vec<usize>>,
}

impl LoadedGraph {
    /// Internal index of a file id.
    pub fn internal(&self, id: usize) -> Result<usize> {
        match &self.ids {
            None => {
                self.graph.check_vertex(id)?;
                Ok(id)
            }
            Some(ids) => ids
                .binary_search(&id)
                .map_err(|_| Error::input(format!("vertex id {id} does not occur in the graph"))),
        }
    }

    /// File id of an internal index.
    pub fn external(&self, u: usize) -> usize {
        self.ids.as_ref().map_or(u, |ids| ids[u])
    }

    /// Builds a vertex set from file ids.
    pub fn set_from_ids(&self, ids: &[usize]) -> Result<VertexSet> {
        let internal = ids.iter().map(|&id| self.internal(id)).collect::<Result<Vec<_>>>()?;
        VertexSet::new(&self.graph, internal)
    }

    /// File ids of the members of `set`, ascending.
    pub fn external_ids(&self, set: &VertexSet) -> Vec<usize> {
        set.ids().iter().map(|&u| self.external(u)).collect()
    }
}

/// Yields `(line_number, trimmed_line)` for lines that are neither blank nor
/// `#` comments.
fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(Error::Io(e))),
        Ok(line) => {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

fn parse_field<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} {field:?}"),
    })
}

/// Reads an edge list: lines `u v [w]` with `w` defaulting to 1. Repeated
/// pairs in either orientation are summed.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut edges = Vec::new();
    let mut max_id = None;
    for item in content_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected `u v [w]`, got {} fields", fields.len()),
            });
        }
        let u: usize = parse_field(fields[0], line, "vertex id")?;
        let v: usize = parse_field(fields[1], line, "vertex id")?;
        let w: f64 = match fields.get(2) {
            Some(f) => parse_field(f, line, "weight")?,
            None => 1.0,
        };
        if u == v {
            return Err(Error::Parse {
                line,
                message: format!("self-loop at vertex {u}"),
            });
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("weight must be finite and nonnegative, got {w}"),
            });
        }
        max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v, w));
    }

    let seen: HashSet<usize> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    let contiguous = max_id.is_none_or(|m| seen.len() == m + 1);
    if contiguous {
        let n = max_id.map_or(0, |m| m + 1);
        return Ok(LoadedGraph {
            graph: WeightedGraph::from_edges(n, edges)?,
            ids: None,
        });
    }
    let mut ids: Vec<usize> = seen.into_iter().collect();
    ids.sort_unstable();
    let index: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let graph = WeightedGraph::from_edges(ids.len(), edges.into_iter().map(|(u, v, w)| (index[&u], index[&v], w)))?;
    Ok(LoadedGraph { graph, ids: Some(ids) })
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    read_edge_list(BufReader::new(File::open(path)?))
}

/// Writes each undirected edge once as `u v w`, translating through `ids`
/// when given. `header` lines are emitted as `#` comments first.
pub fn write_edge_list<W: Write>(
    graph: &WeightedGraph,
    ids: Option<&[usize]>,
    header: &[String],
    mut out: W,
) -> Result<()> {
    write_header(&mut out, header)?;
    for (u, v, w) in graph.edges() {
        let (u, v) = match ids {
            Some(ids) => (ids[u], ids[v]),
            None => (u, v),
        };
        writeln!(out, "{u} {v} {}", fmt_real(w))?;
    }
    Ok(())
}

pub fn save_graph(graph: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_edge_list(graph, None, &[], &mut out)?;
    out.flush()?;
    Ok(())
}

fn write_header<W: Write>(out: &mut W, header: &[String]) -> Result<()> {
    for h in header {
        writeln!(out, "# {h}")?;
    }
    Ok(())
}

/// Reads one vertex id per line. A repeated id is an error naming the line.
pub fn read_vertex_ids<R: BufRead>(reader: R) -> Result<Vec<usize>> {
    let mut ids = Vec::new();
    let mut first_seen: HashMap<usize, usize> = HashMap::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let id: usize = parse_field(&text, line, "vertex id")?;
        if let Some(prev) = first_seen.insert(id, line) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate vertex {id} (first on line {prev})"),
            });
        }
        ids.push(id);
    }
    Ok(ids)
}

pub fn load_vertex_ids(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    read_vertex_ids(BufReader::new(File::open(path)?))
}

pub fn write_vertex_ids<W: Write>(ids: &[usize], header: &[String], mut out: W) -> Result<()> {
    write_header(&mut out, header)?;
    for id in ids {
        writeln!(out, "{id}")?;
    }
    Ok(())
}

/// Rows of a points CSV and, when requested, the leading integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<i64>>,
}

/// Reads a rectangular CSV of finite reals. With `labeled`, the first
/// column is an integer class label.
pub fn read_points<R: BufRead>(reader: R, labeled: bool) -> Result<Points> {
    let mut rows = Vec::new();
    let mut labels = labeled.then(Vec::new);
    let mut width = None;
    for item in content_lines(reader) {
        let (line, text) = item?;
        let mut fields = text.split(',').map(str::trim);
        if let Some(labels) = labels.as_mut() {
            let f = fields.next().unwrap_or("");
            labels.push(parse_field(f, line, "label")?);
        }
        let row = fields
            .map(|f| {
                let x: f64 = parse_field(f, line, "coordinate")?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(Error::Parse {
                        line,
                        message: format!("non-finite coordinate {f:?}"),
                    })
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} coordinates, got {}", row.len()),
                })
            }
            Some(_) => {}
        }
        if row.is_empty() {
            return Err(Error::Parse {
                line,
                message: "row has no coordinates".into(),
            });
        }
        rows.push(row);
    }
    Ok(Points { rows, labels })
}

pub fn load_points(path: impl AsRef<Path>, labeled: bool) -> Result<Points> {
    read_points(BufReader::new(File::open(path)?), labeled)
}

/// Writes `vertex label` lines.
pub fn write_labels<W: Write>(labels: &[String], header: &[String], mut out: W) -> Result<()> {
    write_header(&mut out, header)?;
    for (u, l) in labels.iter().enumerate() {
        writeln!(out, "{u} {l}")?;
    }
    Ok(())
}

/// Reads `vertex label` lines into a map from label to ascending vertex ids.
pub fn read_labels<R: BufRead>(reader: R) -> Result<BTreeMap<String, Vec<usize>>> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let mut fields = text.split_whitespace();
        let (Some(v), Some(label), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line,
                message: "expected `vertex label`".into(),
            });
        };
        let v: usize = parse_field(v, line, "vertex id")?;
        if !seen.insert(v) {
            return Err(Error::Parse {
                line,
                message: format!("vertex {v} labeled twice"),
            });
        }
        groups.entry(label.to_string()).or_default().push(v);
    }
    for ids in groups.values_mut() {
        ids.sort_unstable();
    }
    Ok(groups)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<BTreeMap<String, Vec<usize>>> {
    read_labels(BufReader::new(File::open(path)?))
}

/// Writes `vertex,mass` rows for the support of `p`, ascending by vertex.
pub fn write_mass<W: Write>(p: &SparseMass, ids: Option<&[usize]>, header: &[String], mut out: W) -> Result<()> {
    write_header(&mut out, header)?;
    writeln!(out, "vertex,mass")?;
    let mut entries: Vec<(usize, f64)> = p.iter().collect();
    entries.sort_by_key(|&(u, _)| u);
    for (u, m) in entries {
        let u = ids.map_or(u, |ids| ids[u]);
        writeln!(out, "{u},{}", fmt_real(m))?;
    }
    Ok(())
}

/// Reads `vertex,mass` rows (header optional) as file ids and masses.
pub fn read_mass<R: BufRead>(reader: R) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        if text == "vertex,mass" {
            continue;
        }
        let Some((u, m)) = text.split_once(',') else {
            return Err(Error::Parse {
                line,
                message: "expected `vertex,mass`".into(),
            });
        };
        let u: usize = parse_field(u.trim(), line, "vertex id")?;
        let m: f64 = parse_field(m.trim(), line, "mass")?;
        out.push((u, m));
    }
    Ok(out)
}

pub fn load_mass(path: impl AsRef<Path>) -> Result<Vec<(usize, f64)>> {
    read_mass(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<LoadedGraph> {
        read_edge_list(s.as_bytes())
    }

    #[test]
    fn path_with_default_weights() {
        let g = parse("0 1\n1 2\n").unwrap();
        assert!(g.ids.is_none());
        assert_eq!(g.graph.vertex_count(), 3);
        assert_eq!(g.graph.degrees(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn both_orientations_aggregate() {
        let g = parse("# c\n0 1 2.0\n1 0 3.0\n").unwrap();
        assert_eq!(g.graph.edge_count(), 1);
        assert_eq!(g.graph.weight(0, 1), 5.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse("0 0 1.0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("0 1\n1 2 -1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("0 1\n\n1 x\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse("0 1 1 1\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn sparse_ids_are_compacted() {
        let g = parse("10 30\n30 20 2\n").unwrap();
        assert_eq!(g.ids.as_deref(), Some(&[10, 20, 30][..]));
        assert_eq!(g.internal(30).unwrap(), 2);
        assert_eq!(g.external(1), 20);
        assert_eq!(g.graph.weight(1, 2), 2.0);
        assert!(g.internal(11).is_err());
    }

    #[test]
    fn edge_list_round_trip_is_bitwise() {
        let g = parse("0 1 0.1\n1 2 0.2\n0 1 0.3\n2 3 1e-300\n").unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g.graph, None, &["echo".into()], &mut buf).unwrap();
        let back = read_edge_list(&buf[..]).unwrap();
        assert_eq!(back.graph, g.graph);
    }

    #[test]
    fn duplicate_set_member_rejected() {
        let err = read_vertex_ids("1\n# x\n2\n1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        assert_eq!(read_vertex_ids("3\n1\n".as_bytes()).unwrap(), vec![3, 1]);
    }

    #[test]
    fn points_must_be_rectangular_and_finite() {
        let p = read_points("1,0.5,2\n0,1.5,3\n".as_bytes(), true).unwrap();
        assert_eq!(p.labels, Some(vec![1, 0]));
        assert_eq!(p.rows, vec![vec![0.5, 2.0], vec![1.5, 3.0]]);
        assert!(read_points("1,2\n3\n".as_bytes(), false).is_err());
        assert!(read_points("1,NaN\n".as_bytes(), false).is_err());
    }

    #[test]
    fn labels_and_mass_round_trip() {
        let labels = vec!["A".to_string(), "B".into(), "A".into()];
        let mut buf = Vec::new();
        write_labels(&labels, &[], &mut buf).unwrap();
        let groups = read_labels(&buf[..]).unwrap();
        assert_eq!(groups["A"], vec![0, 2]);
        assert_eq!(groups["B"], vec![1]);

        let p = SparseMass::from_entries([(2, 0.1), (0, 1.0 / 3.0)]).unwrap();
        let mut buf = Vec::new();
        write_mass(&p, None, &[], &mut buf).unwrap();
        assert_eq!(read_mass(&buf[..]).unwrap(), vec![(0, 1.0 / 3.0), (2, 0.1)]);
    }
}
