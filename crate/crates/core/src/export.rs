//! Plain-text exports for use outside the explorer.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::StateGraph;
use crate::layout::Position;

/// One `"u v"` line per undirected edge, `u < v`, sorted.
pub fn write_edgelist<W: Write>(g: &StateGraph, mut out: W) -> Result<u64> {
    let mut lines = 0;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
        lines += 1;
    }
    out.flush()?;
    Ok(lines)
}

pub fn read_edgelist<R: BufRead>(input: R) -> Result<Vec<(u32, u32)>> {
    let mut edges = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace().map(str::parse::<u32>);
        match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
            _ => return Err(Error::Malformed(format!("edge list line {}: {line:?}", lineno + 1))),
        }
    }
    Ok(edges)
}

/// Degree histogram (degree -> node count) of an undirected edge list.
pub fn degree_histogram(edges: &[(u32, u32)]) -> BTreeMap<u32, u32> {
    let mut degree: BTreeMap<u32, u32> = BTreeMap::new();
    for &(u, v) in edges {
        *degree.entry(u).or_default() += 1;
        *degree.entry(v).or_default() += 1;
    }
    let mut hist = BTreeMap::new();
    for d in degree.into_values() {
        *hist.entry(d).or_default() += 1;
    }
    hist
}

/// Header `id,x,y,z` then one row per node.
pub fn write_positions_csv<W: Write>(positions: &[Position], mut out: W) -> Result<u64> {
    writeln!(out, "id,x,y,z")?;
    for (id, [x, y, z]) in positions.iter().enumerate() {
        writeln!(out, "{id},{x},{y},{z}")?;
    }
    out.flush()?;
    Ok(positions.len() as u64 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::StateId;

    #[test]
    fn edgelist_round_trip_on_path() {
        let g = StateGraph::from_parts(vec![0, 1, 3, 4], [1, 0, 2, 1].map(StateId).to_vec(), StateId(0)).unwrap();
        let mut buf = Vec::new();
        assert_eq!(write_edgelist(&g, &mut buf).unwrap(), 2);
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0 1\n1 2\n");
        let edges = read_edgelist(buf.as_slice()).unwrap();
        assert_eq!(degree_histogram(&edges), BTreeMap::from([(1, 2), (2, 1)]));
    }

    #[test]
    fn bad_edgelist_line() {
        assert!(read_edgelist("0 1\n2\n".as_bytes()).is_err());
        assert!(read_edgelist("0 1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        assert_eq!(write_positions_csv(&[[1.5, 0.0, -2.0]], &mut buf).unwrap(), 2);
        assert_eq!(String::from_utf8(buf).unwrap(), "id,x,y,z\n0,1.5,0,-2\n");
    }
}
