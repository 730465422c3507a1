//! Plain-text (`n m` header, then `u v` lines) and JSON graph formats.

use std::fmt::Write as _;

use super::{Graph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Text,
    Json,
}

impl Graph {
    /// `n m` on the first line, then one `u v` line per edge (`u < v`),
    /// newline-terminated.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.m());
        for &(u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| GraphError::Parse("empty input".into()))?;
        let (n, m) = parse_pair(header)?;
        let edges = lines.map(parse_pair).collect::<Result<Vec<_>, _>>()?;
        if edges.len() != m {
            return Err(GraphError::Parse(format!("header declares {m} edges, found {}", edges.len())));
        }
        Graph::new(n, edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| GraphError::Parse(format!("bad integer {t:?}: {e}")))
    });
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(GraphError::Parse(format!("expected two integers, got {line:?}"))),
    }
}

/// Parses either format; JSON is detected by a leading `{`.
pub fn parse_graph(text: &str) -> Result<(Graph, GraphFormat), GraphError> {
    if text.trim_start().starts_with('{') {
        let g = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        Ok((g, GraphFormat::Json))
    } else {
        Ok((Graph::from_text(text)?, GraphFormat::Text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format_is_exact() {
        let g = Graph::cycle(3).unwrap();
        assert_eq!(g.to_text(), "3 3\n0 1\n1 2\n0 2\n");
        assert_eq!(Graph::from_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn json_format() {
        let (g, fmt) = parse_graph(r#"{"n": 3, "edges": [[0, 1], [1, 2]]}"#).unwrap();
        assert_eq!(fmt, GraphFormat::Json);
        assert_eq!(g, Graph::path(3).unwrap());
        assert_eq!(g.to_json(), r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
    }

    #[test]
    fn malformed_text() {
        assert!(Graph::from_text("").is_err());
        assert!(Graph::from_text("3 2\n0 1\n").is_err());
        assert!(Graph::from_text("3 1\n0 x\n").is_err());
        assert!(Graph::from_text("3 1\n0 1 2\n").is_err());
        assert!(matches!(Graph::from_text("3 1\n1 1\n"), Err(GraphError::SelfLoop(1))));
    }
}
