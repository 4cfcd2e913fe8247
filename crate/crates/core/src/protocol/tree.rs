//! The match tree: a full binary tree over contiguous sample ranges.

/// Index of a node inside a [`MatchTree`].
pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeNode {
    /// Inclusive 0-based sample range.
    pub lo: usize,
    pub hi: usize,
    pub depth: usize,
    children: Option<(NodeId, NodeId)>,
}

impl TreeNode {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Root covers every sample; a node of length `len` splits into its first
/// `ceil(len/2)` samples and the remainder.
#[derive(Clone, Debug)]
pub struct MatchTree {
    nodes: Vec<TreeNode>,
}

impl MatchTree {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1, "match tree needs at least one sample");
        let mut nodes = Vec::with_capacity(2 * p - 1);
        nodes.push(TreeNode {
            lo: 0,
            hi: p - 1,
            depth: 0,
            children: None,
        });
        let mut next = 0;
        while next < nodes.len() {
            let node = nodes[next];
            if node.len() > 1 {
                let mid = node.lo + node.len().div_ceil(2);
                let left = nodes.len();
                nodes.push(TreeNode {
                    lo: node.lo,
                    hi: mid - 1,
                    depth: node.depth + 1,
                    children: None,
                });
                nodes.push(TreeNode {
                    lo: mid,
                    hi: node.hi,
                    depth: node.depth + 1,
                    children: None,
                });
                nodes[next].children = Some((left, left + 1));
            }
            next += 1;
        }
        Self { nodes }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn children(&self, id: NodeId) -> Option<(NodeId, NodeId)> {
        self.nodes[id].children
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(id) = stack.pop() {
            match self.children(id) {
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => out.push(self.nodes[id].lo),
            }
        }
        out
    }
}

/// `ceil(log2 p)`, with `0` for `p = 1`.
pub fn ceil_log2(p: usize) -> usize {
    assert!(p >= 1);
    (usize::BITS - (p - 1).leading_zeros()) as usize
}
