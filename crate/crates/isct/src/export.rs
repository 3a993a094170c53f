//! Tree JSON, Graphviz DOT and indented text renderings.
//!
//! The JSON document is the exchange format: export, parse and export again
//! gives identical bytes. Patterns are stored as item strings, so a document
//! can be rendered without the original database.

use std::fmt::Write as _;

use isct_core::{IsctNode, IsctTree};
use serde::{Deserialize, Serialize};

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TreeFormat {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Internal,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<String>>,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_id: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Box<NodeDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Box<NodeDoc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub k_requested: usize,
    pub leaf_count: usize,
    pub root: NodeDoc,
}

impl NodeDoc {
    fn from_node(node: &IsctNode, tree: &IsctTree) -> Self {
        match node {
            IsctNode::Leaf {
                cluster_id,
                members,
            } => NodeDoc {
                kind: NodeKind::Leaf,
                pattern: None,
                size: members.len(),
                cluster_id: Some(*cluster_id),
                left: None,
                right: None,
            },
            IsctNode::Internal {
                pattern,
                left,
                right,
                members,
            } => NodeDoc {
                kind: NodeKind::Internal,
                pattern: Some(
                    pattern
                        .items()
                        .iter()
                        .map(|&i| {
                            tree.alphabet
                                .symbol(i)
                                .map_or_else(|| format!("#{i}"), str::to_string)
                        })
                        .collect(),
                ),
                size: members.len(),
                cluster_id: None,
                left: Some(Box::new(Self::from_node(left, tree))),
                right: Some(Box::new(Self::from_node(right, tree))),
            },
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        match self.kind {
            NodeKind::Leaf => {
                if self.cluster_id.is_none() {
                    return Err("leaf without cluster_id".into());
                }
                if self.left.is_some() || self.right.is_some() || self.pattern.is_some() {
                    return Err("leaf with children or pattern".into());
                }
                Ok(())
            }
            NodeKind::Internal => {
                match &self.pattern {
                    Some(p) if !p.is_empty() => {}
                    _ => return Err("internal node without a pattern".into()),
                }
                match (&self.left, &self.right) {
                    (Some(l), Some(r)) => {
                        l.check()?;
                        r.check()
                    }
                    _ => Err("internal node needs two children".into()),
                }
            }
        }
    }

    fn pattern_label(&self) -> String {
        format!(
            "⟨{}⟩",
            self.pattern.as_deref().unwrap_or_default().join(" ")
        )
    }
}

impl TreeDoc {
    pub fn from_tree(tree: &IsctTree) -> Self {
        TreeDoc {
            k_requested: tree.k_requested,
            leaf_count: tree.leaf_count,
            root: NodeDoc::from_node(&tree.root, tree),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tree documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TreeDoc = serde_json::from_str(text)?;
        doc.root.check().map_err(|msg| {
            crate::Error::TreeJson(<serde_json::Error as serde::de::Error>::custom(msg))
        })?;
        Ok(doc)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph isct {\n  node [fontname=\"Helvetica\"];\n");
        let mut next = 0usize;
        dot_node(&self.root, &mut next, &mut out);
        out.push_str("}\n");
        out
    }

    /// Indented question/answer rendering, one line per node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        text_node(&self.root, 0, "", &mut out);
        out
    }

    pub fn render(&self, format: TreeFormat) -> String {
        match format {
            TreeFormat::Json => self.to_json(),
            TreeFormat::Dot => self.to_dot(),
            TreeFormat::Text => self.to_text(),
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot_node(node: &NodeDoc, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    match node.kind {
        NodeKind::Leaf => {
            let _ = writeln!(
                out,
                "  n{id} [shape=box, label=\"cluster {}\\nn={}\"];",
                node.cluster_id.unwrap_or_default(),
                node.size
            );
        }
        NodeKind::Internal => {
            let _ = writeln!(
                out,
                "  n{id} [shape=ellipse, label=\"contains {}?\"];",
                dot_escape(&node.pattern_label())
            );
            let right = node.right.as_deref().expect("checked internal node");
            let left = node.left.as_deref().expect("checked internal node");
            let r = dot_node(right, next, out);
            let _ = writeln!(out, "  n{id} -> n{r} [label=\"yes\"];");
            let l = dot_node(left, next, out);
            let _ = writeln!(out, "  n{id} -> n{l} [label=\"no\"];");
        }
    }
    id
}

fn text_node(node: &NodeDoc, depth: usize, lead: &str, out: &mut String) {
    let indent = "  ".repeat(depth);
    match node.kind {
        NodeKind::Leaf => {
            let _ = writeln!(
                out,
                "{indent}{lead}cluster {} (n={})",
                node.cluster_id.unwrap_or_default(),
                node.size
            );
        }
        NodeKind::Internal => {
            let _ = writeln!(out, "{indent}{lead}contains {}?", node.pattern_label());
            if let Some(r) = &node.right {
                text_node(r, depth + 1, "yes: ", out);
            }
            if let Some(l) = &node.left {
                text_node(l, depth + 1, "no: ", out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(id: usize, size: usize) -> NodeDoc {
        NodeDoc {
            kind: NodeKind::Leaf,
            pattern: None,
            size,
            cluster_id: Some(id),
            left: None,
            right: None,
        }
    }

    fn split(p: &[&str], left: NodeDoc, right: NodeDoc) -> NodeDoc {
        NodeDoc {
            kind: NodeKind::Internal,
            pattern: Some(p.iter().map(|s| s.to_string()).collect()),
            size: left.size + right.size,
            cluster_id: None,
            left: Some(Box::new(left)),
            right: Some(Box::new(right)),
        }
    }

    fn worked_example() -> TreeDoc {
        TreeDoc {
            k_requested: 3,
            leaf_count: 3,
            root: split(
                &["b", "d"],
                split(&["a", "b"], leaf(2, 2), leaf(1, 2)),
                leaf(0, 2),
            ),
        }
    }

    #[test]
    fn single_leaf_json() {
        let doc = TreeDoc {
            k_requested: 1,
            leaf_count: 1,
            root: leaf(0, 6),
        };
        let v: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(v["root"]["kind"], "leaf");
        assert_eq!(v["root"]["cluster_id"], 0);
        assert!(v["root"].get("left").is_none());
        assert_eq!(doc.to_text(), "cluster 0 (n=6)\n");
    }

    #[test]
    fn dot_structure() {
        let dot = worked_example().to_dot();
        assert_eq!(dot.matches("shape=ellipse").count(), 2);
        assert_eq!(dot.matches("shape=box").count(), 3);
        assert_eq!(dot.matches("->").count(), 4);
        assert_eq!(dot.matches("label=\"yes\"").count(), 2);
        assert!(dot.contains("contains ⟨b d⟩?"));
    }

    #[test]
    fn text_rendering() {
        let text = worked_example().to_text();
        assert_eq!(
            text,
            "contains ⟨b d⟩?\n  yes: cluster 0 (n=2)\n  no: contains ⟨a b⟩?\n    yes: cluster 1 (n=2)\n    no: cluster 2 (n=2)\n"
        );
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let json = worked_example().to_json();
        let again = TreeDoc::from_json(&json).unwrap().to_json();
        assert_eq!(json, again);
    }

    #[test]
    fn rejects_malformed_documents() {
        let json = worked_example().to_json();
        assert!(TreeDoc::from_json(&json[..json.len() / 2]).is_err());
        let bad = r#"{"k_requested":2,"leaf_count":2,"root":{"kind":"internal","size":3}}"#;
        assert!(TreeDoc::from_json(bad).is_err());
        let bad = r#"{"k_requested":1,"leaf_count":1,"root":{"kind":"leaf","size":3}}"#;
        assert!(TreeDoc::from_json(bad).is_err());
    }

    #[test]
    fn dot_escapes_quotes() {
        let doc = TreeDoc {
            k_requested: 2,
            leaf_count: 2,
            root: split(&["say \"hi\""], leaf(1, 1), leaf(0, 1)),
        };
        assert!(doc.to_dot().contains("⟨say \\\"hi\\\"⟩"));
    }
}
