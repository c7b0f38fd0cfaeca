//! Selection values: UCB, the AMAF interpolation weight and the GRAVE move
//! value, plus reference-node bookkeeping.
//!
//! AMAF tables are per node and hold statistics for moves made by that
//! node's player to move, so a reference table is only meaningful for nodes
//! whose player to move matches. [`RefContext`] therefore tracks one
//! reference per player.

use rand::Rng;

use crate::game::Player;
use crate::pool::{AmafEntry, NodeHandle, NodePool};
use crate::scalar::{count, lit, Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyParams<T> {
    /// UCB exploration constant `C`.
    pub exploration_c: T,
    /// GRAVE bias: larger values shift weight from AMAF to node means sooner.
    pub bias: T,
    /// Visits a node needs before its AMAF table is used deeper in the tree.
    pub ref_threshold: u32,
}

impl<T: Scalar> Default for PolicyParams<T> {
    fn default() -> Self {
        PolicyParams {
            exploration_c: T::SQRT_2() / lit(2.0),
            bias: lit(0.01),
            ref_threshold: 25,
        }
    }
}

/// `mean + c * sqrt(ln(parent_visits) / visits)`, or +inf for an unvisited
/// move.
pub fn ucb_value<T: Scalar>(reward_sum: T, visits: u32, parent_visits: u32, c: T) -> T {
    if visits == 0 {
        return T::infinity();
    }
    let v: T = count(visits);
    let parent: T = count(parent_visits.max(1));
    reward_sum / v + c * (parent.ln() / v).sqrt()
}

/// AMAF weight `a / (a + v + bias * a * v)`.
///
/// Zero visits with AMAF evidence gives exactly 1; no AMAF evidence gives 0
/// (including the degenerate `a = v = 0`).
pub fn beta<T: Field>(amaf_count: u32, visits: u32, bias: T) -> T {
    if amaf_count == 0 {
        return T::zero();
    }
    if visits == 0 {
        return T::one();
    }
    let a: T = count(amaf_count);
    let v: T = count(visits);
    a / (a + v + bias * a * v)
}

/// `(1 - beta) * node_mean + beta * amaf_mean`.
///
/// A mean is ignored when its count is zero. With no statistics at all the
/// move gets the first-play value 1.
pub fn grave_move_value<T: Field>(node_mean: T, visits: u32, amaf_mean: T, amaf_count: u32, bias: T) -> T {
    match (visits, amaf_count) {
        (0, 0) => T::one(),
        (_, 0) => node_mean,
        (0, _) => amaf_mean,
        _ => {
            let b = beta(amaf_count, visits, bias);
            (T::one() - b) * node_mean + b * amaf_mean
        }
    }
}

/// Which tree of a two-level search a node lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeLevel {
    Top,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefNode {
    pub level: TreeLevel,
    pub handle: NodeHandle,
}

/// Reference nodes per player to move.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RefContext {
    slots: [Option<RefNode>; 2],
}

impl RefContext {
    pub fn new() -> RefContext {
        RefContext::default()
    }

    /// Reference for selections made by `player`.
    pub fn get(&self, player: Player) -> Option<RefNode> {
        self.slots[player.index()]
    }
}

/// Offers `node` as reference for its player to move. It replaces the
/// current one when it has strictly more than `ref_threshold` visits, or
/// when no reference exists yet for that player (the shallowest node of
/// that colour on the path is the fallback).
pub fn update_ref<T: Scalar>(
    ctx: RefContext,
    pool: &NodePool<T>,
    level: TreeLevel,
    node: NodeHandle,
    params: &PolicyParams<T>,
) -> RefContext {
    let n = pool.node(node);
    let slot = n.to_move().index();
    let mut out = ctx;
    if out.slots[slot].is_none() || n.visits() > params.ref_threshold {
        out.slots[slot] = Some(RefNode { level, handle: node });
    }
    out
}

/// Reference used at the root of a second-level search with forward
/// sharing: the top-level reference stays in force until the second-level
/// root itself exceeds the threshold.
pub fn forward_share_ref<T: Scalar>(
    top_ref: RefContext,
    sec_pool: &NodePool<T>,
    sec_root: NodeHandle,
    params: &PolicyParams<T>,
) -> RefContext {
    update_ref(top_ref, sec_pool, TreeLevel::Second, sec_root, params)
}

/// Scratch space for selection, reused across calls.
#[derive(Debug, Clone)]
pub struct Selector<T> {
    child_of: Vec<NodeHandle>,
    scored: Vec<(usize, T)>,
    ties: Vec<usize>,
}

impl<T: Scalar> Selector<T> {
    pub fn new(move_count: usize) -> Selector<T> {
        Selector {
            child_of: vec![NodeHandle::NULL; move_count],
            scored: Vec::with_capacity(move_count),
            ties: Vec::with_capacity(move_count),
        }
    }

    /// Argmax of the GRAVE value over `candidates` that pass `is_legal`.
    /// Node statistics come from `node`'s children, AMAF statistics from
    /// `ref_amaf` (empty slice: no AMAF). Returns the move and its child
    /// handle (`NULL` when unexpanded).
    #[allow(clippy::too_many_arguments)]
    pub fn select_grave<R: Rng + ?Sized>(
        &mut self,
        pool: &NodePool<T>,
        node: NodeHandle,
        ref_amaf: &[AmafEntry],
        candidates: &[usize],
        is_legal: impl FnMut(usize) -> bool,
        params: &PolicyParams<T>,
        rng: &mut R,
    ) -> Option<(usize, NodeHandle)> {
        self.load_children(pool, node);
        self.scored.clear();
        for &m in candidates {
            let child = self.child_of[m];
            let (visits, mean) = if child.is_null() {
                (0, T::zero())
            } else {
                let c = pool.node(child);
                (c.visits(), c.mean().unwrap_or_else(T::zero))
            };
            let (amaf_count, amaf_mean) = match ref_amaf.get(m) {
                Some(e) if e.count > 0 => (e.count, T::from_f32(e.sum).unwrap() / count(e.count)),
                _ => (0, T::zero()),
            };
            let v = grave_move_value(mean, visits, amaf_mean, amaf_count, params.bias);
            self.scored.push((m, v));
        }
        let picked = self.pick(is_legal, rng);
        let out = picked.map(|m| (m, self.child_of[m]));
        self.clear_children(pool, node);
        out
    }

    /// Argmax of UCB over `candidates` that pass `is_legal`; unexpanded
    /// moves score +inf.
    pub fn select_uct<R: Rng + ?Sized>(
        &mut self,
        pool: &NodePool<T>,
        node: NodeHandle,
        candidates: &[usize],
        is_legal: impl FnMut(usize) -> bool,
        params: &PolicyParams<T>,
        rng: &mut R,
    ) -> Option<(usize, NodeHandle)> {
        self.load_children(pool, node);
        let parent_visits = pool.node(node).visits();
        self.scored.clear();
        for &m in candidates {
            let child = self.child_of[m];
            let v = if child.is_null() {
                T::infinity()
            } else {
                let c = pool.node(child);
                ucb_value(c.reward_sum(), c.visits(), parent_visits, params.exploration_c)
            };
            self.scored.push((m, v));
        }
        let picked = self.pick(is_legal, rng);
        let out = picked.map(|m| (m, self.child_of[m]));
        self.clear_children(pool, node);
        out
    }

    fn load_children(&mut self, pool: &NodePool<T>, node: NodeHandle) {
        for c in pool.children(node) {
            if let Some(m) = pool.node(c).move_id() {
                self.child_of[m] = c;
            }
        }
    }

    fn clear_children(&mut self, pool: &NodePool<T>, node: NodeHandle) {
        for c in pool.children(node) {
            if let Some(m) = pool.node(c).move_id() {
                self.child_of[m] = NodeHandle::NULL;
            }
        }
    }

    /// Uniform choice among the maximal scored moves, discarding those that
    /// fail `is_legal` until one passes.
    fn pick<R: Rng + ?Sized>(&mut self, mut is_legal: impl FnMut(usize) -> bool, rng: &mut R) -> Option<usize> {
        while !self.scored.is_empty() {
            let best = self
                .scored
                .iter()
                .map(|&(_, v)| v)
                .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
            self.ties.clear();
            self.ties.extend(
                self.scored
                    .iter()
                    .enumerate()
                    .filter(|(_, &(_, v))| v == best)
                    .map(|(i, _)| i),
            );
            let i = self.ties[rng.gen_range(0..self.ties.len())];
            let m = self.scored[i].0;
            if is_legal(m) {
                return Some(m);
            }
            self.scored.swap_remove(i);
        }
        None
    }
}

/// GRAVE selection over an explicit list of legal moves.
pub fn select_move_grave<T: Scalar, R: Rng + ?Sized>(
    pool: &NodePool<T>,
    node: NodeHandle,
    ref_amaf: &[AmafEntry],
    legal: &[usize],
    params: &PolicyParams<T>,
    rng: &mut R,
) -> Option<usize> {
    let slots = legal.iter().max().map_or(0, |&m| m + 1).max(pool.amaf_slots());
    Selector::new(slots)
        .select_grave(pool, node, ref_amaf, legal, |_| true, params, rng)
        .map(|(m, _)| m)
}

/// UCT selection over an explicit list of legal moves.
pub fn select_child_uct<T: Scalar, R: Rng + ?Sized>(
    pool: &NodePool<T>,
    node: NodeHandle,
    legal: &[usize],
    params: &PolicyParams<T>,
    rng: &mut R,
) -> Option<usize> {
    let slots = legal.iter().max().map_or(0, |&m| m + 1);
    let slots = pool
        .children(node)
        .filter_map(|c| pool.node(c).move_id())
        .map(|m| m + 1)
        .fold(slots, usize::max);
    Selector::new(slots)
        .select_uct(pool, node, legal, |_| true, params, rng)
        .map(|(m, _)| m)
}
