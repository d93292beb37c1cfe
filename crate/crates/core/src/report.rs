//! Record streams: one JSON object per line, and CSV tables for plotting.

use crate::bassserre::{LabeledBall, QiPair, QiReport, TreeVertex};
use crate::farey::Slope;
use serde::Serialize;
use std::io::{self, Write};

/// Write each record as one line of JSON.
pub fn write_json_lines<W: Write, T: Serialize>(mut w: W, records: impl IntoIterator<Item = T>) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, &r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn json_lines<T: Serialize>(records: impl IntoIterator<Item = T>) -> String {
    let mut buf = Vec::new();
    write_json_lines(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[derive(Serialize)]
pub struct VertexRecord<'a> {
    pub index: usize,
    pub depth: u64,
    #[serde(flatten)]
    pub vertex: &'a TreeVertex,
    pub label: &'a [Slope],
}

pub fn vertex_records(b: &LabeledBall) -> impl Iterator<Item = VertexRecord<'_>> {
    b.ball.vertices.iter().zip(&b.labels).enumerate().map(|(index, (vertex, label))| VertexRecord {
        index,
        depth: vertex.depth(),
        vertex,
        label,
    })
}

pub const QI_CSV_HEADER: &str = "u,v,d_tree,d_curve";

pub fn write_qi_csv_row<W: Write>(mut w: W, p: &QiPair) -> io::Result<()> {
    writeln!(w, "{},{},{},{}", p.u, p.v, p.d_tree, p.d_curve)
}

/// Header, then one row per pair.
pub fn write_qi_csv<W: Write>(mut w: W, r: &QiReport) -> io::Result<()> {
    writeln!(w, "{QI_CSV_HEADER}")?;
    r.pairs.iter().try_for_each(|p| write_qi_csv_row(&mut w, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_record_per_line() {
        let s = json_lines([1, 2, 3]);
        assert_eq!(s, "1\n2\n3\n");
    }
}
