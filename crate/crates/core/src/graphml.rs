//! Small GraphML writer used by the graph exports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrType {
    String,
    Int,
    Double,
    Boolean,
}

impl AttrType {
    fn name(self) -> &'static str {
        match self {
            AttrType::String => "string",
            AttrType::Int => "long",
            AttrType::Double => "double",
            AttrType::Boolean => "boolean",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    Node,
    Edge,
}

/// Builds a GraphML document. Attribute keys must be declared before use.
#[derive(Debug)]
pub struct GraphMl {
    directed: bool,
    keys: Vec<(Domain, String, AttrType)>,
    nodes: Vec<(String, BTreeMap<String, String>)>,
    edges: Vec<(String, String, BTreeMap<String, String>)>,
}

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            c => out.push(c),
        }
    }
    out
}

impl GraphMl {
    pub fn new(directed: bool) -> Self {
        GraphMl {
            directed,
            keys: Vec::new(),
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn node_attr(mut self, name: &str, ty: AttrType) -> Self {
        self.keys.push((Domain::Node, name.to_string(), ty));
        self
    }

    pub fn edge_attr(mut self, name: &str, ty: AttrType) -> Self {
        self.keys.push((Domain::Edge, name.to_string(), ty));
        self
    }

    fn key_id(&self, domain: Domain, name: &str) -> String {
        let i = self
            .keys
            .iter()
            .position(|(d, n, _)| *d == domain && n == name)
            .unwrap_or_else(|| panic!("undeclared GraphML attribute {name}"));
        let prefix = if domain == Domain::Node { "n" } else { "e" };
        format!("{prefix}{i}")
    }

    pub fn add_node<'a>(&mut self, id: &str, attrs: impl IntoIterator<Item = (&'a str, String)>) {
        let attrs = attrs
            .into_iter()
            .map(|(k, v)| (self.key_id(Domain::Node, k), v))
            .collect();
        self.nodes.push((id.to_string(), attrs));
    }

    pub fn add_edge<'a>(
        &mut self,
        from: &str,
        to: &str,
        attrs: impl IntoIterator<Item = (&'a str, String)>,
    ) {
        let attrs = attrs
            .into_iter()
            .map(|(k, v)| (self.key_id(Domain::Edge, k), v))
            .collect();
        self.edges.push((from.to_string(), to.to_string(), attrs));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        for (domain, name, ty) in &self.keys {
            let d = if *domain == Domain::Node {
                "node"
            } else {
                "edge"
            };
            let _ = writeln!(
                out,
                "  <key id=\"{}\" for=\"{d}\" attr.name=\"{}\" attr.type=\"{}\"/>",
                self.key_id(*domain, name),
                escape_xml(name),
                ty.name()
            );
        }
        let _ = writeln!(
            out,
            "  <graph id=\"G\" edgedefault=\"{}\">",
            if self.directed {
                "directed"
            } else {
                "undirected"
            }
        );
        for (id, attrs) in &self.nodes {
            let _ = writeln!(out, "    <node id=\"{}\">", escape_xml(id));
            for (k, v) in attrs {
                let _ = writeln!(out, "      <data key=\"{k}\">{}</data>", escape_xml(v));
            }
            out.push_str("    </node>\n");
        }
        for (i, (from, to, attrs)) in self.edges.iter().enumerate() {
            let _ = writeln!(
                out,
                "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\">",
                escape_xml(from),
                escape_xml(to)
            );
            for (k, v) in attrs {
                let _ = writeln!(out, "      <data key=\"{k}\">{}</data>", escape_xml(v));
            }
            out.push_str("    </edge>\n");
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_escaped_document() {
        let mut g = GraphMl::new(true)
            .node_attr("label", AttrType::String)
            .edge_attr("w", AttrType::Double);
        g.add_node("a&b", [("label", "x<y".to_string())]);
        g.add_node("c", []);
        g.add_edge("a&b", "c", [("w", "0.5".to_string())]);
        let xml = g.render();
        assert!(xml.contains("<node id=\"a&amp;b\">"));
        assert!(xml.contains(">x&lt;y</data>"));
        assert!(xml.contains("edgedefault=\"directed\""));
        assert!(xml.contains("source=\"a&amp;b\" target=\"c\""));
    }
}
