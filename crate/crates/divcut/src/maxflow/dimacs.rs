//! DIMACS max-flow text format, for differential testing against external
//! solvers. Graph node `v` maps to DIMACS id `v + 1`; the source and sink
//! take the last two ids.

use super::NetworkSpec;
use crate::error::{Error, Result};

pub fn write_dimacs(spec: &NetworkSpec) -> String {
    let n = spec.node_count;
    let source = n + 1;
    let sink = n + 2;
    let mut arcs = Vec::new();
    for (v, &(cs, ct)) in spec.terminal.iter().enumerate() {
        if cs > 0 {
            arcs.push((source, v + 1, cs));
        }
        if ct > 0 {
            arcs.push((v + 1, sink, ct));
        }
    }
    for &(u, v, cap_uv, cap_vu) in &spec.arcs {
        if cap_uv > 0 {
            arcs.push((u + 1, v + 1, cap_uv));
        }
        if cap_vu > 0 {
            arcs.push((v + 1, u + 1, cap_vu));
        }
    }
    let mut out = String::new();
    out.push_str("c divcut max-flow export\n");
    out.push_str(&format!("p max {} {}\n", n + 2, arcs.len()));
    out.push_str(&format!("n {source} s\n"));
    out.push_str(&format!("n {sink} t\n"));
    for (u, v, cap) in arcs {
        out.push_str(&format!("a {u} {v} {cap}\n"));
    }
    out
}

pub fn read_dimacs(text: &str) -> Result<NetworkSpec> {
    let mut total_nodes: Option<usize> = None;
    let mut source: Option<usize> = None;
    let mut sink: Option<usize> = None;
    let mut raw_arcs: Vec<(usize, usize, i64)> = Vec::new();

    let err = |line: usize, message: &str| Error::Parse { line, message: message.into() };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if fields.len() != 4 || fields[1] != "max" {
                    return Err(err(line_no, "expected `p max <nodes> <arcs>`"));
                }
                total_nodes = Some(
                    fields[2].parse().map_err(|_| err(line_no, "bad node count"))?,
                );
            }
            "n" => {
                if fields.len() != 3 {
                    return Err(err(line_no, "expected `n <id> s|t`"));
                }
                let id: usize = fields[1].parse().map_err(|_| err(line_no, "bad node id"))?;
                match fields[2] {
                    "s" => source = Some(id),
                    "t" => sink = Some(id),
                    _ => return Err(err(line_no, "node designator must be s or t")),
                }
            }
            "a" => {
                if fields.len() != 4 {
                    return Err(err(line_no, "expected `a <from> <to> <cap>`"));
                }
                let u: usize = fields[1].parse().map_err(|_| err(line_no, "bad arc tail"))?;
                let v: usize = fields[2].parse().map_err(|_| err(line_no, "bad arc head"))?;
                let cap: i64 = fields[3].parse().map_err(|_| err(line_no, "bad capacity"))?;
                if cap < 0 {
                    return Err(err(line_no, "negative capacity"));
                }
                raw_arcs.push((u, v, cap));
            }
            _ => return Err(err(line_no, "unknown line type")),
        }
    }

    let total = total_nodes.ok_or_else(|| err(0, "missing problem line"))?;
    let source = source.ok_or_else(|| err(0, "missing source designation"))?;
    let sink = sink.ok_or_else(|| err(0, "missing sink designation"))?;
    if source == sink || source == 0 || sink == 0 || source > total || sink > total {
        return Err(err(0, "invalid source/sink ids"));
    }

    // Graph nodes are every id except source and sink, remapped densely in
    // ascending id order.
    let mut remap = vec![usize::MAX; total + 1];
    let mut next = 0usize;
    for id in 1..=total {
        if id != source && id != sink {
            remap[id] = next;
            next += 1;
        }
    }
    let mut spec = NetworkSpec::new(next);
    for (u, v, cap) in raw_arcs {
        if u == 0 || v == 0 || u > total || v > total {
            return Err(err(0, "arc endpoint out of range"));
        }
        if u == source && v == sink {
            return Err(err(0, "direct source-sink arcs are not supported"));
        }
        if u == v || v == source || u == sink {
            continue; // cannot carry s-t flow
        }
        if u == source {
            spec.add_terminal(remap[v], cap, 0)?;
        } else if v == sink {
            spec.add_terminal(remap[u], 0, cap)?;
        } else {
            spec.add_arc(remap[u], remap[v], cap, 0)?;
        }
    }
    Ok(spec)
}
