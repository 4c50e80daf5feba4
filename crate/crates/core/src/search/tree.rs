use crate::tableau::Action;

pub type NodeId = u32;

const NONE: NodeId = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    DeadEnd,
}

/// Statistics of one search node. Children live contiguously in the arena.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    pub action: Option<Action>,
    pub n: u32,
    pub w: f64,
    pub prior: f64,
    pub status: NodeStatus,
    parent: NodeId,
    first_child: NodeId,
    child_count: u32,
    expanded: bool,
}

impl SearchNode {
    pub fn is_expanded(&self) -> bool {
        self.expanded
    }

    pub fn is_dead(&self) -> bool {
        self.status == NodeStatus::DeadEnd
    }

    /// Mean reward; zero for unvisited nodes.
    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.w / f64::from(self.n)
        }
    }
}

/// Arena-allocated search tree; the root moves down with each bigstep.
#[derive(Clone, Debug)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
    root: NodeId,
}

impl Default for SearchTree {
    fn default() -> Self {
        Self::new()
    }
}

impl SearchTree {
    pub fn new() -> Self {
        SearchTree {
            nodes: vec![SearchNode {
                action: None,
                n: 0,
                w: 0.0,
                prior: 1.0,
                status: NodeStatus::Open,
                parent: NONE,
                first_child: 0,
                child_count: 0,
                expanded: false,
            }],
            root: 0,
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id as usize]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut SearchNode {
        &mut self.nodes[id as usize]
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        let p = self.nodes[id as usize].parent;
        (p != NONE && id != self.root).then_some(p)
    }

    pub fn children(&self, id: NodeId) -> std::ops::Range<NodeId> {
        let n = &self.nodes[id as usize];
        n.first_child..n.first_child + n.child_count
    }

    /// Attaches one unexpanded child per action.
    pub fn expand(&mut self, id: NodeId, actions: &[Action], priors: &[f64]) {
        debug_assert_eq!(actions.len(), priors.len());
        let first = self.nodes.len() as NodeId;
        for (&a, &p) in actions.iter().zip(priors) {
            self.nodes.push(SearchNode {
                action: Some(a),
                n: 0,
                w: 0.0,
                prior: p,
                status: NodeStatus::Open,
                parent: id,
                first_child: 0,
                child_count: 0,
                expanded: false,
            });
        }
        let node = &mut self.nodes[id as usize];
        node.first_child = first;
        node.child_count = actions.len() as u32;
        node.expanded = true;
        if actions.is_empty() {
            self.mark_dead(id);
        }
    }

    /// Marks `id` dead and propagates to ancestors whose children are all dead.
    pub fn mark_dead(&mut self, mut id: NodeId) {
        loop {
            self.nodes[id as usize].status = NodeStatus::DeadEnd;
            let Some(p) = self.parent(id) else { return };
            if self.children(p).all(|c| self.node(c).is_dead()) {
                id = p;
            } else {
                return;
            }
        }
    }

    /// Makes `id` the new root, keeping its subtree.
    pub fn reroot(&mut self, id: NodeId) {
        self.root = id;
    }

    pub fn child_with_action(&self, id: NodeId, action: Action) -> Option<NodeId> {
        self.children(id).find(|&c| self.node(c).action == Some(action))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dead_status_propagates_to_fully_dead_parents() {
        let mut t = SearchTree::new();
        let acts = [Action::Start { clause: 0 }, Action::Start { clause: 1 }];
        t.expand(0, &acts, &[1.0, 1.0]);
        let kids: Vec<_> = t.children(0).collect();
        t.expand(kids[0], &[], &[]);
        assert!(t.node(kids[0]).is_dead());
        assert!(!t.node(0).is_dead());
        t.expand(kids[1], &[], &[]);
        assert!(t.node(0).is_dead());
    }

    #[test]
    fn rerooted_tree_stops_propagation_at_root() {
        let mut t = SearchTree::new();
        t.expand(0, &[Action::Start { clause: 0 }], &[1.0]);
        let c = t.children(0).start;
        t.reroot(c);
        t.expand(c, &[], &[]);
        assert!(t.node(c).is_dead());
        assert_eq!(t.parent(c), None);
        assert!(!t.node(0).is_dead());
    }
}
