//! Fixed-capacity node arena with left-child right-sibling links and an
//! intrusive LRU queue.
//!
//! When the free list is empty, [`NodePool::allocate`] recycles the node at
//! the front of the LRU. Nodes on the current selection path are taken out of
//! the queue by [`NodePool::begin_path`] and put back deepest-first by
//! [`NodePool::end_path`], so a node always sits nearer the front than its
//! ancestors and only leaves can reach the front. Roots (nodes allocated with
//! a `Null` parent) never enter the queue.

use std::fmt;

use thiserror::Error;

use crate::game::Player;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PoolError {
    #[error("pool capacity must be at least 2, got {0}")]
    InvalidCapacity(usize),
    #[error("no free slot and no recyclable node (every live node is path-protected)")]
    PoolExhausted,
    #[error("node {child} is not a child of {parent}")]
    NotAChild { parent: NodeHandle, child: NodeHandle },
    #[error("node {0} still has children")]
    NotALeaf(NodeHandle),
}

/// Index of a pool slot, or `NULL`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeHandle(u32);

impl NodeHandle {
    pub const NULL: NodeHandle = NodeHandle(u32::MAX);

    #[inline]
    pub fn is_null(self) -> bool {
        self == NodeHandle::NULL
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for NodeHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_null() {
            f.write_str("#null")
        } else {
            write!(f, "#{}", self.0)
        }
    }
}

impl fmt::Display for NodeHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One AMAF entry: 32-bit playout count and 32-bit reward sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[repr(C)]
pub struct AmafEntry {
    pub count: u32,
    pub sum: f32,
}

impl AmafEntry {
    pub fn mean(&self) -> Option<f32> {
        (self.count > 0).then(|| self.sum / self.count as f32)
    }
}

const NO_MOVE: u16 = u16::MAX;

/// A pooled tree node. The AMAF table lives in the pool's side array.
#[derive(Clone, Debug)]
pub struct Node<T> {
    parent: NodeHandle,
    first_child: NodeHandle,
    next_sibling: NodeHandle,
    lru_prev: NodeHandle,
    lru_next: NodeHandle,
    mv: u16,
    to_move: Player,
    in_lru: bool,
    live: bool,
    visits: u32,
    /// Sum of rewards for the player who moved into this node.
    reward_sum: T,
}

impl<T: Scalar> Node<T> {
    fn vacant() -> Node<T> {
        Node {
            parent: NodeHandle::NULL,
            first_child: NodeHandle::NULL,
            next_sibling: NodeHandle::NULL,
            lru_prev: NodeHandle::NULL,
            lru_next: NodeHandle::NULL,
            mv: NO_MOVE,
            to_move: Player::Black,
            in_lru: false,
            live: false,
            visits: 0,
            reward_sum: T::zero(),
        }
    }

    pub fn parent(&self) -> NodeHandle {
        self.parent
    }

    pub fn first_child(&self) -> NodeHandle {
        self.first_child
    }

    pub fn next_sibling(&self) -> NodeHandle {
        self.next_sibling
    }

    /// Move id leading into this node; `None` for a root.
    pub fn move_id(&self) -> Option<usize> {
        (self.mv != NO_MOVE).then_some(self.mv as usize)
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn visits(&self) -> u32 {
        self.visits
    }

    pub fn reward_sum(&self) -> T {
        self.reward_sum
    }

    pub fn mean(&self) -> Option<T> {
        (self.visits > 0).then(|| self.reward_sum / crate::scalar::count(self.visits))
    }

    pub fn in_lru(&self) -> bool {
        self.in_lru
    }

    pub fn is_live(&self) -> bool {
        self.live
    }

    pub fn is_leaf(&self) -> bool {
        self.first_child.is_null()
    }
}

/// Handles taken out of the LRU for one iteration, in removal order.
#[must_use = "a path guard must be handed back to NodePool::end_path"]
#[derive(Debug, Default)]
pub struct PathGuard {
    removed: Vec<NodeHandle>,
}

impl PathGuard {
    pub fn removed(&self) -> &[NodeHandle] {
        &self.removed
    }

    pub fn len(&self) -> usize {
        self.removed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct NodePool<T> {
    nodes: Vec<Node<T>>,
    amaf: Vec<AmafEntry>,
    amaf_slots: usize,
    free_head: NodeHandle,
    lru_front: NodeHandle,
    lru_back: NodeHandle,
    lru_len: usize,
    allocated: usize,
    peak_allocated: usize,
    recycled_total: u64,
}

impl<T: Scalar> NodePool<T> {
    /// Allocates `capacity` empty slots, each with `amaf_slots` AMAF entries
    /// (0 for policies that keep no AMAF statistics).
    pub fn new(capacity: usize, amaf_slots: usize) -> Result<NodePool<T>, PoolError> {
        if capacity < 2 || capacity >= u32::MAX as usize {
            return Err(PoolError::InvalidCapacity(capacity));
        }
        let mut nodes = vec![Node::vacant(); capacity];
        for (i, node) in nodes.iter_mut().enumerate() {
            node.next_sibling = if i + 1 < capacity {
                NodeHandle((i + 1) as u32)
            } else {
                NodeHandle::NULL
            };
        }
        Ok(NodePool {
            nodes,
            amaf: vec![AmafEntry::default(); capacity * amaf_slots],
            amaf_slots,
            free_head: NodeHandle(0),
            lru_front: NodeHandle::NULL,
            lru_back: NodeHandle::NULL,
            lru_len: 0,
            allocated: 0,
            peak_allocated: 0,
            recycled_total: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.nodes.len()
    }

    pub fn allocated(&self) -> usize {
        self.allocated
    }

    pub fn free(&self) -> usize {
        self.capacity() - self.allocated
    }

    pub fn peak_allocated(&self) -> usize {
        self.peak_allocated
    }

    pub fn recycled_total(&self) -> u64 {
        self.recycled_total
    }

    pub fn lru_len(&self) -> usize {
        self.lru_len
    }

    pub fn lru_front(&self) -> NodeHandle {
        self.lru_front
    }

    pub fn lru_back(&self) -> NodeHandle {
        self.lru_back
    }

    pub fn amaf_slots(&self) -> usize {
        self.amaf_slots
    }

    /// AMAF storage per node in bytes.
    pub fn amaf_bytes_per_node(&self) -> usize {
        self.amaf_slots * std::mem::size_of::<AmafEntry>()
    }

    /// Link and statistics storage per node in bytes, excluding AMAF.
    pub fn node_bytes(&self) -> usize {
        std::mem::size_of::<Node<T>>()
    }

    #[inline]
    pub fn node(&self, h: NodeHandle) -> &Node<T> {
        &self.nodes[h.index()]
    }

    #[inline]
    pub fn amaf(&self, h: NodeHandle) -> &[AmafEntry] {
        let start = h.index() * self.amaf_slots;
        &self.amaf[start..start + self.amaf_slots]
    }

    #[inline]
    pub fn amaf_mut(&mut self, h: NodeHandle) -> &mut [AmafEntry] {
        let start = h.index() * self.amaf_slots;
        &mut self.amaf[start..start + self.amaf_slots]
    }

    /// Adds one visit with `reward` to the node's value statistics.
    #[inline]
    pub fn record_visit(&mut self, h: NodeHandle, reward: T) {
        let n = &mut self.nodes[h.index()];
        n.visits += 1;
        n.reward_sum = n.reward_sum + reward;
    }

    /// Adds `visits` visits with total `reward` at once.
    pub fn record_visits(&mut self, h: NodeHandle, visits: u32, reward: T) {
        let n = &mut self.nodes[h.index()];
        n.visits += visits;
        n.reward_sum = n.reward_sum + reward;
    }

    pub fn children(&self, h: NodeHandle) -> Children<'_, T> {
        Children {
            pool: self,
            cur: self.node(h).first_child,
        }
    }

    pub fn find_child(&self, h: NodeHandle, mv: usize) -> Option<NodeHandle> {
        self.children(h).find(|&c| self.node(c).mv as usize == mv)
    }

    /// LRU members from front (next to recycle) to back.
    pub fn lru_iter(&self) -> impl Iterator<Item = NodeHandle> + '_ {
        let mut cur = self.lru_front;
        std::iter::from_fn(move || {
            if cur.is_null() {
                return None;
            }
            let h = cur;
            cur = self.node(h).lru_next;
            Some(h)
        })
    }

    /// LRU members from back to front.
    pub fn lru_iter_rev(&self) -> impl Iterator<Item = NodeHandle> + '_ {
        let mut cur = self.lru_back;
        std::iter::from_fn(move || {
            if cur.is_null() {
                return None;
            }
            let h = cur;
            cur = self.node(h).lru_prev;
            Some(h)
        })
    }

    /// Takes a slot for a new node under `parent` (or a root when `parent`
    /// is `NULL`). Uses a free slot if any; otherwise recycles the LRU front.
    /// Non-root nodes join the back of the LRU.
    pub fn allocate(&mut self, parent: NodeHandle, mv: usize, to_move: Player) -> Result<NodeHandle, PoolError> {
        let h = if !self.free_head.is_null() {
            let h = self.free_head;
            self.free_head = self.node(h).next_sibling;
            self.allocated += 1;
            self.peak_allocated = self.peak_allocated.max(self.allocated);
            h
        } else if !self.lru_front.is_null() {
            let victim = self.lru_front;
            if !self.node(victim).is_leaf() {
                return Err(PoolError::NotALeaf(victim));
            }
            self.lru_unlink(victim);
            let old_parent = self.node(victim).parent;
            if !old_parent.is_null() {
                self.detach_child(old_parent, victim)?;
            }
            self.recycled_total += 1;
            victim
        } else {
            return Err(PoolError::PoolExhausted);
        };

        let slot = &mut self.nodes[h.index()];
        *slot = Node::vacant();
        slot.live = true;
        slot.parent = parent;
        slot.mv = if parent.is_null() && mv == usize::MAX {
            NO_MOVE
        } else {
            mv as u16
        };
        slot.to_move = to_move;
        self.amaf_mut(h).fill(AmafEntry::default());
        if !parent.is_null() {
            let first = self.node(parent).first_child;
            self.nodes[h.index()].next_sibling = first;
            self.nodes[parent.index()].first_child = h;
            self.lru_push_back(h);
        }
        Ok(h)
    }

    /// Allocates a root node (never enters the LRU).
    pub fn allocate_root(&mut self, to_move: Player) -> Result<NodeHandle, PoolError> {
        self.allocate(NodeHandle::NULL, usize::MAX, to_move)
    }

    /// Removes the path nodes from the LRU, root first.
    pub fn begin_path(&mut self, path: &[NodeHandle]) -> PathGuard {
        let mut guard = PathGuard {
            removed: Vec::with_capacity(path.len()),
        };
        for &h in path {
            if self.node(h).in_lru {
                self.lru_unlink(h);
                guard.removed.push(h);
            }
        }
        guard
    }

    /// Reinserts the guarded nodes at the LRU back, deepest first.
    pub fn end_path(&mut self, guard: PathGuard) {
        for &h in guard.removed.iter().rev() {
            if self.node(h).live && !self.node(h).in_lru {
                self.lru_push_back(h);
            }
        }
    }

    /// Unlinks a childless `child` from `parent`'s child list.
    pub fn detach_child(&mut self, parent: NodeHandle, child: NodeHandle) -> Result<(), PoolError> {
        if !self.node(child).is_leaf() {
            return Err(PoolError::NotALeaf(child));
        }
        self.unlink_child(parent, child)
    }

    /// Returns every node of the subtree rooted at `root` to the free list.
    pub fn release_subtree(&mut self, root: NodeHandle) {
        let parent = self.node(root).parent;
        if !parent.is_null() {
            self.unlink_child(parent, root)
                .expect("subtree root is linked under its parent");
        }
        let mut stack = vec![root];
        while let Some(h) = stack.pop() {
            stack.extend(self.children(h));
            if self.node(h).in_lru {
                self.lru_unlink(h);
            }
            let slot = &mut self.nodes[h.index()];
            *slot = Node::vacant();
            slot.next_sibling = self.free_head;
            self.free_head = h;
            self.allocated -= 1;
        }
    }

    /// Forgets the peak so a new search can measure its own.
    pub fn reset_peak(&mut self) {
        self.peak_allocated = self.allocated;
    }

    /// Checks link consistency, LRU ordering and slot conservation.
    pub fn validate(&self) -> Result<(), String> {
        let forward: Vec<NodeHandle> = self.lru_iter().take(self.capacity() + 1).collect();
        let mut backward: Vec<NodeHandle> = self.lru_iter_rev().take(self.capacity() + 1).collect();
        backward.reverse();
        if forward != backward {
            return Err("LRU forward and backward traversals disagree".into());
        }
        if forward.len() != self.lru_len {
            return Err(format!("LRU length {} but {} linked", self.lru_len, forward.len()));
        }
        let mut position = vec![usize::MAX; self.capacity()];
        for (i, &h) in forward.iter().enumerate() {
            let n = self.node(h);
            if !n.live || !n.in_lru {
                return Err(format!("LRU member {h} is not a live queued node"));
            }
            if n.parent.is_null() {
                return Err(format!("root {h} is in the LRU"));
            }
            position[h.index()] = i;
        }
        let live = self.nodes.iter().filter(|n| n.live).count();
        if live != self.allocated {
            return Err(format!("{live} live nodes but allocated = {}", self.allocated));
        }
        let mut free = 0;
        let mut cur = self.free_head;
        while !cur.is_null() && free <= self.capacity() {
            if self.node(cur).live {
                return Err(format!("free-list slot {cur} is live"));
            }
            free += 1;
            cur = self.node(cur).next_sibling;
        }
        if self.allocated + free != self.capacity() {
            return Err(format!(
                "conservation broken: {} allocated + {free} free != {}",
                self.allocated,
                self.capacity()
            ));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if !n.live {
                continue;
            }
            let h = NodeHandle(i as u32);
            if n.in_lru != (position[i] != usize::MAX) {
                return Err(format!("in_lru flag of {h} out of sync"));
            }
            if !n.parent.is_null() {
                let p = self.node(n.parent);
                if !p.live || !self.children(n.parent).any(|c| c == h) {
                    return Err(format!("{h} missing from its parent's child list"));
                }
            }
            for c in self.children(h) {
                if self.node(c).parent != h {
                    return Err(format!("child {c} of {h} points to another parent"));
                }
            }
            if position[i] != usize::MAX {
                let mut a = n.parent;
                while !a.is_null() {
                    let pa = position[a.index()];
                    if pa != usize::MAX && pa <= position[i] {
                        return Err(format!("ancestor {a} is nearer the LRU front than {h}"));
                    }
                    a = self.node(a).parent;
                }
            }
        }
        Ok(())
    }

    fn unlink_child(&mut self, parent: NodeHandle, child: NodeHandle) -> Result<(), PoolError> {
        let next = self.node(child).next_sibling;
        if self.node(parent).first_child == child {
            self.nodes[parent.index()].first_child = next;
        } else {
            let mut cur = self.node(parent).first_child;
            loop {
                if cur.is_null() {
                    return Err(PoolError::NotAChild { parent, child });
                }
                let sib = self.node(cur).next_sibling;
                if sib == child {
                    self.nodes[cur.index()].next_sibling = next;
                    break;
                }
                cur = sib;
            }
        }
        let c = &mut self.nodes[child.index()];
        c.next_sibling = NodeHandle::NULL;
        c.parent = NodeHandle::NULL;
        Ok(())
    }

    fn lru_unlink(&mut self, h: NodeHandle) {
        let (prev, next) = {
            let n = &self.nodes[h.index()];
            (n.lru_prev, n.lru_next)
        };
        if prev.is_null() {
            self.lru_front = next;
        } else {
            self.nodes[prev.index()].lru_next = next;
        }
        if next.is_null() {
            self.lru_back = prev;
        } else {
            self.nodes[next.index()].lru_prev = prev;
        }
        let n = &mut self.nodes[h.index()];
        n.lru_prev = NodeHandle::NULL;
        n.lru_next = NodeHandle::NULL;
        n.in_lru = false;
        self.lru_len -= 1;
    }

    fn lru_push_back(&mut self, h: NodeHandle) {
        let back = self.lru_back;
        {
            let n = &mut self.nodes[h.index()];
            n.lru_prev = back;
            n.lru_next = NodeHandle::NULL;
            n.in_lru = true;
        }
        if back.is_null() {
            self.lru_front = h;
        } else {
            self.nodes[back.index()].lru_next = h;
        }
        self.lru_back = h;
        self.lru_len += 1;
    }
}

pub struct Children<'a, T> {
    pool: &'a NodePool<T>,
    cur: NodeHandle,
}

impl<T> Iterator for Children<'_, T> {
    type Item = NodeHandle;

    fn next(&mut self) -> Option<NodeHandle> {
        if self.cur.is_null() {
            return None;
        }
        let h = self.cur;
        self.cur = self.pool.nodes[h.index()].next_sibling;
        Some(h)
    }
}
