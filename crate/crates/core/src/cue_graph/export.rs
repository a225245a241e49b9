//! GEXF 1.2 and TSV exports of a clustered, ranked network.

use std::io::Write;
use std::str::FromStr;

use super::{format_label, CueGraph, Edge, GraphError, Node, PageRankVector, Partition, Result};
use crate::expansion::Status;
use crate::scalar::Scalar;

pub const NODE_TSV_HEADER: &str = "word\tseed\tstatus\tcommunity\tpagerank";
pub const EDGE_TSV_HEADER: &str = "u\tv\tweight";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Gexf,
    EdgeTsv,
    NodeTsv,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gexf" => Ok(Self::Gexf),
            "edge_tsv" => Ok(Self::EdgeTsv),
            "node_tsv" => Ok(Self::NodeTsv),
            other => Err(format!("unknown export format {other:?} (gexf, edge_tsv, node_tsv)")),
        }
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Unrated => "unrated",
        Status::Accepted => "accepted",
        Status::Rejected => "rejected",
    }
}

fn check_inputs<T: Scalar>(graph: &CueGraph<T>, partition: &Partition, ranks: &PageRankVector<T>) -> Result<()> {
    partition.check(graph.num_nodes())?;
    if ranks.scores.len() != graph.num_nodes() {
        return Err(GraphError::PartitionMismatch { partition: ranks.scores.len(), graph: graph.num_nodes() });
    }
    Ok(())
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn write_gexf<T: Scalar, W: Write>(
    graph: &CueGraph<T>,
    partition: &Partition,
    ranks: &PageRankVector<T>,
    w: &mut W,
) -> Result<()> {
    check_inputs(graph, partition, ranks)?;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(w, r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">"#)?;
    writeln!(w, "  <meta>\n    <creator>cuelex</creator>\n  </meta>")?;
    writeln!(w, r#"  <graph mode="static" defaultedgetype="undirected">"#)?;
    writeln!(w, r#"    <attributes class="node">"#)?;
    writeln!(w, r#"      <attribute id="community" title="community" type="integer"/>"#)?;
    writeln!(w, r#"      <attribute id="pagerank" title="pagerank" type="double"/>"#)?;
    writeln!(w, r#"      <attribute id="seed" title="seed" type="boolean"/>"#)?;
    writeln!(w, r#"      <attribute id="status" title="status" type="string"/>"#)?;
    writeln!(w, "    </attributes>")?;
    writeln!(w, "    <nodes>")?;
    for (i, node) in graph.nodes().iter().enumerate() {
        writeln!(
            w,
            r#"      <node id="{i}" label="{}">"#,
            xml_escape(&format_label(&node.word, node.is_seed, node.status))
        )?;
        writeln!(w, "        <attvalues>")?;
        writeln!(w, r#"          <attvalue for="community" value="{}"/>"#, partition.community_of(i))?;
        writeln!(w, r#"          <attvalue for="pagerank" value="{}"/>"#, ranks.scores[i])?;
        writeln!(w, r#"          <attvalue for="seed" value="{}"/>"#, node.is_seed)?;
        writeln!(w, r#"          <attvalue for="status" value="{}"/>"#, status_name(node.status))?;
        writeln!(w, "        </attvalues>\n      </node>")?;
    }
    writeln!(w, "    </nodes>")?;
    writeln!(w, "    <edges>")?;
    for (i, e) in graph.edges().iter().enumerate() {
        writeln!(w, r#"      <edge id="{i}" source="{}" target="{}" weight="{}"/>"#, e.u, e.v, e.weight)?;
    }
    writeln!(w, "    </edges>\n  </graph>\n</gexf>")?;
    Ok(())
}

pub fn write_node_tsv<T: Scalar, W: Write>(
    graph: &CueGraph<T>,
    partition: &Partition,
    ranks: &PageRankVector<T>,
    w: &mut W,
) -> Result<()> {
    check_inputs(graph, partition, ranks)?;
    writeln!(w, "{NODE_TSV_HEADER}")?;
    for (i, n) in graph.nodes().iter().enumerate() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            n.word,
            u8::from(n.is_seed),
            status_name(n.status),
            partition.community_of(i),
            ranks.scores[i]
        )?;
    }
    Ok(())
}

pub fn write_edge_tsv<T: Scalar, W: Write>(graph: &CueGraph<T>, w: &mut W) -> Result<()> {
    writeln!(w, "{EDGE_TSV_HEADER}")?;
    for e in graph.edges() {
        writeln!(w, "{}\t{}\t{}", graph.nodes()[e.u].word, graph.nodes()[e.v].word, e.weight)?;
    }
    Ok(())
}

pub fn export<T: Scalar, W: Write>(
    graph: &CueGraph<T>,
    partition: &Partition,
    ranks: &PageRankVector<T>,
    format: ExportFormat,
    w: &mut W,
) -> Result<()> {
    match format {
        ExportFormat::Gexf => write_gexf(graph, partition, ranks, w),
        ExportFormat::NodeTsv => write_node_tsv(graph, partition, ranks, w),
        ExportFormat::EdgeTsv => {
            check_inputs(graph, partition, ranks)?;
            write_edge_tsv(graph, w)
        }
    }
}

fn data_lines<'a>(text: &'a str, header: &str, file: &'static str) -> Result<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#') && !l.is_empty());
    match lines.next() {
        Some((_, h)) if h == header => Ok(lines.map(|(i, l)| (i + 1, l))),
        Some((i, _)) => Err(GraphError::Parse { file, line: i + 1, reason: format!("expected header {header:?}") }),
        None => Err(GraphError::Parse { file, line: 0, reason: "missing header".into() }),
    }
}

/// Re-imports the node and edge TSV pair.
pub fn read_tsv<T: Scalar>(nodes_tsv: &str, edges_tsv: &str) -> Result<(CueGraph<T>, Partition, PageRankVector<T>)> {
    let mut nodes = Vec::new();
    let mut communities = Vec::new();
    let mut scores = Vec::new();
    for (line, l) in data_lines(nodes_tsv, NODE_TSV_HEADER, "node TSV")? {
        let bad = |reason: &str| GraphError::Parse { file: "node TSV", line, reason: reason.to_string() };
        let cols: Vec<&str> = l.split('\t').collect();
        if cols.len() != 5 {
            return Err(bad("expected 5 columns"));
        }
        let status = match cols[2] {
            "unrated" => Status::Unrated,
            "accepted" => Status::Accepted,
            "rejected" => Status::Rejected,
            _ => return Err(bad("unknown status")),
        };
        nodes.push(Node { word: cols[0].to_string(), is_seed: cols[1] == "1", status });
        communities.push(cols[3].parse::<usize>().map_err(|_| bad("bad community"))?);
        let s: f64 = cols[4].parse().map_err(|_| bad("bad pagerank"))?;
        scores.push(T::of(s));
    }
    let index: std::collections::HashMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, n)| (n.word.as_str(), i)).collect();
    let mut edges = Vec::new();
    for (line, l) in data_lines(edges_tsv, EDGE_TSV_HEADER, "edge TSV")? {
        let bad = |reason: &str| GraphError::Parse { file: "edge TSV", line, reason: reason.to_string() };
        let cols: Vec<&str> = l.split('\t').collect();
        if cols.len() != 3 {
            return Err(bad("expected 3 columns"));
        }
        let u = *index.get(cols[0]).ok_or_else(|| bad("unknown node"))?;
        let v = *index.get(cols[1]).ok_or_else(|| bad("unknown node"))?;
        let weight: f64 = cols[2].parse().map_err(|_| bad("bad weight"))?;
        edges.push(Edge { u, v, weight: T::of(weight) });
    }
    let graph = CueGraph::new(nodes, edges)?;
    Ok((graph, Partition::new(&communities), PageRankVector { scores, iterations: 0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cue_graph::pagerank;

    #[test]
    fn tsv_round_trip() {
        let nodes = vec![
            Node { word: "paradox".into(), is_seed: true, status: Status::Accepted },
            Node { word: "oddity".into(), is_seed: false, status: Status::Rejected },
        ];
        let g = CueGraph::new(nodes, [Edge { u: 0, v: 1, weight: 0.6123456789f64 }]).unwrap();
        let p = Partition::single(2);
        let r = pagerank(&g, 0.85, 1e-12, 100).unwrap();
        let (mut n, mut e) = (Vec::new(), Vec::new());
        write_node_tsv(&g, &p, &r, &mut n).unwrap();
        write_edge_tsv(&g, &mut e).unwrap();
        let (g2, p2, r2) = read_tsv::<f64>(std::str::from_utf8(&n).unwrap(), std::str::from_utf8(&e).unwrap()).unwrap();
        assert_eq!(g2, g);
        assert_eq!(p2, p);
        assert_eq!(r2.scores, r.scores);
    }

    #[test]
    fn empty_graph_gexf() {
        let g = CueGraph::<f64>::from_words::<&str>(&[], &[]).unwrap();
        let mut out = Vec::new();
        write_gexf(&g, &Partition::new(&[]), &PageRankVector { scores: vec![], iterations: 0 }, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("<nodes>\n    </nodes>"));
        assert!(text.trim_end().ends_with("</gexf>"));
    }

    #[test]
    fn labels_are_escaped() {
        let g = CueGraph::<f64>::from_words(&["a&b"], &[]).unwrap();
        let mut out = Vec::new();
        write_gexf(&g, &Partition::single(1), &PageRankVector { scores: vec![1.0], iterations: 0 }, &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().contains(r#"label="a&amp;b - 0 - ?""#));
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let g = CueGraph::<f64>::from_words(&["a", "b"], &[]).unwrap();
        let err = write_gexf(&g, &Partition::single(1), &PageRankVector { scores: vec![0.5, 0.5], iterations: 0 }, &mut Vec::new());
        assert!(matches!(err, Err(GraphError::PartitionMismatch { .. })));
    }
}
