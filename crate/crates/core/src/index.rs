//! Index spaces for parameter families: trees, arrays, and bare label sets.
//!
//! Labels are addressed by position. Tree positions follow the lexicographic
//! node order, array positions are row-major.

use std::fmt;

use crate::error::{Error, Result};
use crate::tree::{Node, TreeDomain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexSpace {
    Tree(TreeDomain),
    Array { rows: usize, cols: usize },
    Set { size: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Node(Node),
    Cell { row: usize, col: usize },
    Item(usize),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Node(n) => write!(f, "{n}"),
            Label::Cell { row, col } => write!(f, "({row},{col})"),
            Label::Item(i) => write!(f, "#{i}"),
        }
    }
}

impl IndexSpace {
    pub fn len(&self) -> usize {
        match self {
            IndexSpace::Tree(d) => d.node_count() as usize,
            IndexSpace::Array { rows, cols } => rows * cols,
            IndexSpace::Set { size } => *size,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tree(&self) -> Option<&TreeDomain> {
        match self {
            IndexSpace::Tree(d) => Some(d),
            _ => None,
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        match self {
            IndexSpace::Tree(d) => d.enumerate_nodes().into_iter().map(Label::Node).collect(),
            IndexSpace::Array { rows, cols } => (0..*rows)
                .flat_map(|row| (0..*cols).map(move |col| Label::Cell { row, col }))
                .collect(),
            IndexSpace::Set { size } => (0..*size).map(Label::Item).collect(),
        }
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        match (self, label) {
            (IndexSpace::Tree(d), Label::Node(n)) => d.contains(n).then(|| tree_rank(d, n)),
            (IndexSpace::Array { rows, cols }, Label::Cell { row, col }) => {
                (row < rows && col < cols).then_some(row * cols + col)
            }
            (IndexSpace::Set { size }, Label::Item(i)) => (i < size).then_some(*i),
            _ => None,
        }
    }

    pub fn node_position(&self, node: &Node) -> Option<usize> {
        self.position(&Label::Node(node.clone()))
    }

    /// Text of a label: node strings for trees, `r,c` for cells, decimal items.
    pub fn label_text(&self, label: &Label) -> String {
        match (self, label) {
            (IndexSpace::Tree(d), Label::Node(n)) => n.to_text(d.branching),
            (_, Label::Node(n)) => n.to_auto_text(),
            (_, Label::Cell { row, col }) => format!("{row},{col}"),
            (_, Label::Item(i)) => i.to_string(),
        }
    }

    pub fn parse_label(&self, text: &str) -> Result<Label> {
        let bad = |reason: &str| Error::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let label = match self {
            IndexSpace::Tree(d) => Label::Node(d.parse(text)?),
            IndexSpace::Array { .. } => {
                let (r, c) = text.split_once(',').ok_or_else(|| bad("expected row,col"))?;
                Label::Cell {
                    row: r.trim().parse().map_err(|_| bad("bad row"))?,
                    col: c.trim().parse().map_err(|_| bad("bad column"))?,
                }
            }
            IndexSpace::Set { .. } => Label::Item(text.parse().map_err(|_| bad("bad item index"))?),
        };
        if self.position(&label).is_none() {
            return Err(bad("label outside the index space"));
        }
        Ok(label)
    }

    pub fn subset_texts(&self, labels: &[Label], subset: &[usize]) -> Vec<String> {
        subset.iter().map(|&i| self.label_text(&labels[i])).collect()
    }
}

/// Position of `node` in the lexicographic enumeration of `domain`.
fn tree_rank(domain: &TreeDomain, node: &Node) -> usize {
    let b = domain.branching as usize;
    let max_len = domain.max_len();
    // nodes in a complete subtree of height h
    let subtree = |h: usize| (0..=h).map(|l| b.pow(l as u32)).sum::<usize>();
    node.digits()
        .iter()
        .enumerate()
        .map(|(i, &d)| 1 + d as usize * subtree(max_len - i - 1))
        .sum()
}
