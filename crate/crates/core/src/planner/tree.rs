use crate::dynamics::{Action, RobotState, Trajectory};

pub const NO_PARENT: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub state: RobotState,
    pub parent: u32,
    /// Action applied at the parent to reach this node.
    pub action: Action,
    /// Bitmask of goals entered on the way from the root, this node included.
    pub reached: u32,
    /// Last goal entered, if any.
    pub last_goal: Option<u8>,
    pub group: u32,
}

#[derive(Debug, Clone, Default)]
pub struct MotionTree {
    pub nodes: Vec<TreeNode>,
}

impl MotionTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push(&mut self, node: TreeNode) -> u32 {
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    /// Root-to-node trajectory.
    pub fn trajectory_to(&self, id: u32, dt: f64) -> Trajectory {
        let mut chain = Vec::new();
        let mut cur = id;
        while cur != NO_PARENT {
            chain.push(cur);
            cur = self.nodes[cur as usize].parent;
        }
        chain.reverse();
        let mut t = Trajectory::from_start(self.nodes[chain[0] as usize].state.clone(), dt);
        for &c in &chain[1..] {
            let n = &self.nodes[c as usize];
            t.push(n.action, n.state.clone());
        }
        t
    }
}

/// Bitmask of the goals whose region contains `p`.
pub(crate) fn goals_at(scene: &crate::world::Scene, p: crate::world::Point2) -> u32 {
    scene
        .goals
        .iter()
        .enumerate()
        .filter(|(_, g)| g.contains(p))
        .fold(0, |m, (i, _)| m | (1 << i))
}
