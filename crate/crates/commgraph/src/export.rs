//! Graph serialization: DOT for rendering, CSV edge lists for tooling.
//! Both formats identify vertices by their encoded index, so exports are
//! stable across runs of the same domain.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::GraphView;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExportFormat {
    Dot,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<ExportFormat> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(Error::Parse(format!("unknown export format {other:?}"))),
        }
    }
}

fn check_guard(g: &GraphView, guard: u64) -> Result<()> {
    let v = g.vertex_count() as u128;
    if v > guard as u128 {
        return Err(Error::GuardExceeded { required: v, guard });
    }
    Ok(())
}

/// DOT graph: one node per vertex (id `v<encoded>`, label the canonical
/// matrix text), one `--` line per undirected edge.
pub fn write_dot<W: Write>(g: &GraphView, guard: u64, out: &mut W) -> Result<()> {
    check_guard(g, guard)?;
    writeln!(out, "graph commuting {{")?;
    writeln!(out, "  // {}", g.domain())?;
    for pos in 0..g.vertex_count() {
        let idx = g.vertices()[pos];
        writeln!(out, "  v{} [label=\"{}\"];", idx, g.vertex_matrix(pos))?;
    }
    for (i, j) in g.edges() {
        writeln!(out, "  v{} -- v{};", g.vertices()[i as usize], g.vertices()[j as usize])?;
    }
    writeln!(out, "}}")?;
    Ok(())
}

/// CSV edge list with header `src,dst`: encoded decimal indices, src < dst,
/// rows ascending, each undirected edge exactly once.
pub fn write_csv<W: Write>(g: &GraphView, guard: u64, out: &mut W) -> Result<()> {
    check_guard(g, guard)?;
    writeln!(out, "src,dst")?;
    for (i, j) in g.edges() {
        writeln!(out, "{},{}", g.vertices()[i as usize], g.vertices()[j as usize])?;
    }
    Ok(())
}

/// Serialize to an in-memory byte stream.
pub fn export_graph(g: &GraphView, format: ExportFormat, guard: u64) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        ExportFormat::Dot => write_dot(g, guard, &mut buf)?,
        ExportFormat::Csv => write_csv(g, guard, &mut buf)?,
    }
    Ok(buf)
}

/// Parse a CSV edge list produced by `write_csv`.
pub fn parse_csv_edges(text: &str) -> Result<Vec<(u128, u128)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("src,dst") => {}
        other => return Err(Error::Parse(format!("bad csv header {other:?}"))),
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("row {}: expected src,dst", k + 2)))?;
        let src: u128 =
            a.trim().parse().map_err(|_| Error::Parse(format!("row {}: bad src {a:?}", k + 2)))?;
        let dst: u128 =
            b.trim().parse().map_err(|_| Error::Parse(format!("row {}: bad dst {b:?}", k + 2)))?;
        out.push((src, dst));
    }
    Ok(out)
}
