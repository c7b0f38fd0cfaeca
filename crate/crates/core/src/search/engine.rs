use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{Game, Player};
use crate::playout::{MastTable, PlayoutRecord, PlayoutScratch};
use crate::policy::{update_ref, RefContext, Selector, TreeLevel};
use crate::pool::{NodeHandle, NodePool, PoolError};
use crate::scalar::{count, Scalar};

use super::{SearchError, SearchParams};

/// Last position of every (player, move) pair in one simulated sequence.
struct AmafMarks {
    move_count: usize,
    last: Vec<i32>,
    touched: [Vec<usize>; 2],
}

impl AmafMarks {
    fn new(move_count: usize) -> AmafMarks {
        AmafMarks {
            move_count,
            last: vec![-1; 2 * move_count],
            touched: [Vec::new(), Vec::new()],
        }
    }

    fn build(&mut self, seq: &[(Player, usize)]) {
        for p in Player::BOTH {
            for &m in &self.touched[p.index()] {
                self.last[p.index() * self.move_count + m] = -1;
            }
            self.touched[p.index()].clear();
        }
        for (i, &(p, m)) in seq.iter().enumerate() {
            let slot = &mut self.last[p.index() * self.move_count + m];
            if *slot < 0 {
                self.touched[p.index()].push(m);
            }
            *slot = i as i32;
        }
    }

    /// Moves `player` made at sequence positions `>= depth`.
    fn moves_from(&self, player: Player, depth: usize) -> impl Iterator<Item = usize> + '_ {
        let base = player.index() * self.move_count;
        self.touched[player.index()]
            .iter()
            .copied()
            .filter(move |&m| self.last[base + m] >= depth as i32)
    }
}

/// Second-level results held back until the whole second-level search is
/// done, then applied to the top-level path at once.
struct Batch<T> {
    move_count: usize,
    playouts: u32,
    rewards: [T; 2],
    /// Per colour, per move: (count, reward sum) from the second-level part
    /// of each simulation.
    delta: Vec<(u32, T)>,
    fixed: Vec<bool>,
}

impl<T: Scalar> Batch<T> {
    fn new(move_count: usize) -> Batch<T> {
        Batch {
            move_count,
            playouts: 0,
            rewards: [T::zero(); 2],
            delta: vec![(0, T::zero()); 2 * move_count],
            fixed: vec![false; move_count],
        }
    }

    fn reset(&mut self) {
        self.playouts = 0;
        self.rewards = [T::zero(); 2];
        self.delta.fill((0, T::zero()));
    }

    fn accumulate(&mut self, marks: &AmafMarks, record: &PlayoutRecord<T>, from: usize, amaf: bool) {
        self.playouts += 1;
        for p in Player::BOTH {
            let r = record.reward(p);
            self.rewards[p.index()] = self.rewards[p.index()] + r;
            if amaf {
                for m in marks.moves_from(p, from) {
                    let d = &mut self.delta[p.index() * self.move_count + m];
                    d.0 += 1;
                    d.1 = d.1 + r;
                }
            }
        }
    }

    /// Every top path node gets `playouts` visits. A move its colour played
    /// on the top path below it counts in all of them; other moves count
    /// where they occurred in the second-level part.
    fn apply(&mut self, pool: &mut NodePool<T>, path: &[NodeHandle], top_moves: &[(Player, usize)]) {
        if self.playouts == 0 {
            return;
        }
        let amaf = pool.amaf_slots() > 0;
        for (i, &h) in path.iter().enumerate() {
            let c = pool.node(h).to_move();
            pool.record_visits(h, self.playouts, self.rewards[c.opponent().index()]);
            if !amaf {
                continue;
            }
            self.fixed.fill(false);
            for &(p, m) in top_moves.iter().skip(i) {
                if p == c {
                    self.fixed[m] = true;
                }
            }
            let n = self.playouts;
            let r = self.rewards[c.index()].to_f32().unwrap_or(0.0);
            let base = c.index() * self.move_count;
            let table = pool.amaf_mut(h);
            for (m, e) in table.iter_mut().enumerate() {
                if self.fixed[m] {
                    e.count += n;
                    e.sum += r;
                } else {
                    let (dn, dr) = self.delta[base + m];
                    if dn > 0 {
                        e.count += dn;
                        e.sum += dr.to_f32().unwrap_or(0.0);
                    }
                }
            }
        }
    }
}

/// Output of one search run before it is turned into a result.
pub(super) struct Finished<T> {
    pub top: NodePool<T>,
    pub root: NodeHandle,
    pub peak_nodes: u32,
    pub recycled: u64,
    pub playouts: u64,
    pub expansions: u64,
    pub rng: ChaCha8Rng,
}

pub(super) struct Engine<'a, G: Game, T: Scalar> {
    params: &'a SearchParams<T>,
    mast: &'a mut MastTable<T>,
    rng: ChaCha8Rng,
    selector: Selector<T>,
    scratch: PlayoutScratch<T>,
    candidates: Vec<usize>,
    seq: Vec<(Player, usize)>,
    marks: AmafMarks,
    playouts: u64,
    expansions: u64,
    _game: std::marker::PhantomData<G>,
}

impl<'a, G: Game, T: Scalar> Engine<'a, G, T> {
    pub fn new(params: &'a SearchParams<T>, mast: &'a mut MastTable<T>) -> Self {
        Engine {
            params,
            mast,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            selector: Selector::new(G::MOVE_COUNT),
            scratch: PlayoutScratch::new(),
            candidates: Vec::with_capacity(G::MOVE_COUNT),
            seq: Vec::new(),
            marks: AmafMarks::new(G::MOVE_COUNT),
            playouts: 0,
            expansions: 0,
            _game: std::marker::PhantomData,
        }
    }

    fn amaf_slots(&self) -> usize {
        if self.params.variant.uses_amaf() {
            G::MOVE_COUNT
        } else {
            0
        }
    }

    /// Selects moves from `root` until an unexpanded move (returned) or a
    /// terminal state (`None`). Extends `path` and `self.seq`, and plays the
    /// moves on `state`.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        pool: &NodePool<T>,
        outer: Option<&NodePool<T>>,
        level: TreeLevel,
        root: NodeHandle,
        state: &mut G,
        path: &mut Vec<NodeHandle>,
        mut refs: RefContext,
    ) -> Option<usize> {
        let grave = self.params.variant.uses_amaf();
        let policy = &self.params.policy;
        let mut node = root;
        loop {
            if state.is_terminal() {
                return None;
            }
            debug_assert_eq!(pool.node(node).to_move(), state.to_move());
            self.candidates.clear();
            state.candidate_moves(&mut self.candidates);
            let st: &G = state;
            let pick = if grave {
                refs = update_ref(refs, pool, level, node, policy);
                let r = refs
                    .get(state.to_move())
                    .expect("the current node is a reference candidate");
                let ref_amaf = if r.level == level {
                    pool.amaf(r.handle)
                } else {
                    outer.expect("cross-level reference needs the top pool").amaf(r.handle)
                };
                self.selector.select_grave(
                    pool,
                    node,
                    ref_amaf,
                    &self.candidates,
                    |m| st.is_legal(m),
                    policy,
                    &mut self.rng,
                )
            } else {
                self.selector
                    .select_uct(pool, node, &self.candidates, |m| st.is_legal(m), policy, &mut self.rng)
            };
            let (mv, child) = pick.expect("a non-terminal state has a legal move");
            self.seq.push((state.to_move(), mv));
            state.play(mv).expect("selected move was checked for legality");
            if child.is_null() {
                return Some(mv);
            }
            path.push(child);
            node = child;
        }
    }

    /// Adds the child for `mv` under the last path node. Only recycling
    /// variants may take the LRU front when no slot is free.
    fn expand(
        &mut self,
        pool: &mut NodePool<T>,
        recycle: bool,
        path: &mut Vec<NodeHandle>,
        mv: usize,
        to_move: Player,
    ) -> Result<(), SearchError> {
        if !recycle && pool.free() == 0 {
            return Err(PoolError::PoolExhausted.into());
        }
        let parent = *path.last().expect("path starts at the root");
        let h = pool.allocate(parent, mv, to_move)?;
        path.push(h);
        self.expansions += 1;
        Ok(())
    }

    fn playout(&mut self, state: G) -> PlayoutRecord<T> {
        let p = self.params;
        let record = self.scratch.run(state, self.mast, p.epsilon, &mut self.rng, p.move_cap);
        self.seq.extend_from_slice(&record.moves);
        self.marks.build(&self.seq);
        self.playouts += 1;
        record
    }

    /// Node at path position `i` sits at sequence depth `offset + i`.
    fn backpropagate(&self, pool: &mut NodePool<T>, path: &[NodeHandle], offset: usize, record: &PlayoutRecord<T>) {
        let amaf = pool.amaf_slots() > 0;
        for (i, &h) in path.iter().enumerate() {
            let c = pool.node(h).to_move();
            pool.record_visit(h, record.reward(c.opponent()));
            if amaf {
                let r = record.reward(c).to_f32().unwrap_or(0.0);
                let table = pool.amaf_mut(h);
                for m in self.marks.moves_from(c, offset + i) {
                    let e = &mut table[m];
                    e.count += 1;
                    e.sum += r;
                }
            }
        }
    }

    fn finish(self, top: NodePool<T>, root: NodeHandle, peak_nodes: u32, recycled: u64) -> Finished<T> {
        Finished {
            top,
            root,
            peak_nodes,
            recycled,
            playouts: self.playouts,
            expansions: self.expansions,
            rng: self.rng,
        }
    }

    pub fn run_single(mut self, state: &G) -> Result<Finished<T>, SearchError> {
        let budget = self.params.budget();
        let recycle = self.params.variant.recycles();
        let mut pool = NodePool::new(budget.top_nodes as usize + 1, self.amaf_slots())?;
        let root = pool.allocate_root(state.to_move())?;
        let mut path = Vec::new();
        for _ in 0..budget.top_iterations {
            let mut s = state.clone();
            path.clear();
            path.push(root);
            self.seq.clear();
            let expand = self.descend(&pool, None, TreeLevel::Top, root, &mut s, &mut path, RefContext::new());
            let guard = pool.begin_path(&path);
            if let Some(mv) = expand {
                self.expand(&mut pool, recycle, &mut path, mv, s.to_move())?;
            }
            let record = self.playout(s);
            self.backpropagate(&mut pool, &path, 0, &record);
            self.mast.update(&record);
            pool.end_path(guard);
        }
        let peak = pool.peak_allocated().saturating_sub(1) as u32;
        let recycled = pool.recycled_total();
        Ok(self.finish(pool, root, peak, recycled))
    }

    pub fn run_two_level(mut self, state: &G) -> Result<Finished<T>, SearchError> {
        let budget = self.params.budget();
        let variant = self.params.variant;
        let recycle = variant.recycles();
        let sharing = variant.forward_sharing();
        let grave = variant.uses_amaf();
        let slots = self.amaf_slots();
        let mut top = NodePool::new(budget.top_nodes as usize + 1, slots)?;
        let mut sec = NodePool::new(budget.sec_nodes as usize + 1, slots)?;
        let root = top.allocate_root(state.to_move())?;
        let mut batch = Batch::<T>::new(G::MOVE_COUNT);
        let mut top_path = Vec::new();
        let mut sec_path = Vec::new();
        let mut top_moves = Vec::new();

        for _ in 0..budget.top_iterations {
            let mut s = state.clone();
            top_path.clear();
            top_path.push(root);
            self.seq.clear();
            let expand = self.descend(
                &top,
                None,
                TreeLevel::Top,
                root,
                &mut s,
                &mut top_path,
                RefContext::new(),
            );
            let top_guard = top.begin_path(&top_path);
            if let Some(mv) = expand {
                self.expand(&mut top, recycle, &mut top_path, mv, s.to_move())?;
            }
            top_moves.clear();
            top_moves.extend_from_slice(&self.seq);
            let k = top_moves.len();

            let sec_root = sec.allocate_root(s.to_move())?;
            batch.reset();
            for _ in 0..budget.sec_playouts {
                let mut ss = s.clone();
                sec_path.clear();
                sec_path.push(sec_root);
                self.seq.truncate(k);
                let mut refs = RefContext::new();
                if sharing && grave {
                    for &h in &top_path {
                        refs = update_ref(refs, &top, TreeLevel::Top, h, &self.params.policy);
                    }
                }
                let expand = self.descend(
                    &sec,
                    Some(&top),
                    TreeLevel::Second,
                    sec_root,
                    &mut ss,
                    &mut sec_path,
                    refs,
                );
                let sec_guard = sec.begin_path(&sec_path);
                if let Some(mv) = expand {
                    self.expand(&mut sec, recycle, &mut sec_path, mv, ss.to_move())?;
                }
                let record = self.playout(ss);
                self.backpropagate(&mut sec, &sec_path, k, &record);
                if sharing {
                    self.backpropagate(&mut top, &top_path, 0, &record);
                } else {
                    batch.accumulate(&self.marks, &record, k, grave);
                }
                self.mast.update(&record);
                sec.end_path(sec_guard);
            }
            if !sharing {
                batch.apply(&mut top, &top_path, &top_moves);
            }
            sec.release_subtree(sec_root);
            top.end_path(top_guard);
        }
        let peak = (top.peak_allocated().saturating_sub(1) + sec.peak_allocated().saturating_sub(1)) as u32;
        let recycled = top.recycled_total() + sec.recycled_total();
        Ok(self.finish(top, root, peak, recycled))
    }
}

/// Most-visited root child, ties broken uniformly.
pub(super) fn robust_child<T: Scalar, R: Rng + ?Sized>(
    pool: &NodePool<T>,
    root: NodeHandle,
    rng: &mut R,
) -> Option<usize> {
    let mut best = 0;
    let mut ties: Vec<usize> = Vec::new();
    for c in pool.children(root) {
        let n = pool.node(c);
        let Some(m) = n.move_id() else { continue };
        if n.visits() > best {
            best = n.visits();
            ties.clear();
        }
        if n.visits() == best {
            ties.push(m);
        }
    }
    if ties.is_empty() {
        return None;
    }
    ties.sort_unstable();
    Some(ties[rng.gen_range(0..ties.len())])
}

pub(super) fn mean_of<T: Scalar>(reward_sum: T, visits: u32) -> Option<T> {
    (visits > 0).then(|| reward_sum / count(visits))
}
