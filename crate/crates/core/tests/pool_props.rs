//! Randomized checks of the node pool and its LRU protocol.

use grave_mcts::pool::{NodeHandle, NodePool, PoolError};
use grave_mcts::Player;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check(pool: &NodePool<f64>) {
    pool.validate().unwrap();
    assert!(pool.allocated() <= pool.capacity());
    assert_eq!(pool.allocated() + pool.free(), pool.capacity());
    let front = pool.lru_front();
    if !front.is_null() {
        assert!(pool.node(front).is_leaf(), "LRU front has children");
    }
}

fn random_path<R: Rng>(pool: &NodePool<f64>, root: NodeHandle, rng: &mut R) -> Vec<NodeHandle> {
    let mut path = vec![root];
    loop {
        let kids: Vec<_> = pool.children(*path.last().unwrap()).collect();
        if kids.is_empty() || rng.gen_bool(0.3) {
            return path;
        }
        path.push(kids[rng.gen_range(0..kids.len())]);
    }
}

fn subtree_size(pool: &NodePool<f64>, h: NodeHandle) -> usize {
    1 + pool.children(h).map(|c| subtree_size(pool, c)).sum::<usize>()
}

/// One simulated iteration: protect a path, expand under its end, release.
fn iteration<R: Rng>(pool: &mut NodePool<f64>, root: NodeHandle, rng: &mut R) -> Result<(), PoolError> {
    let path = random_path(pool, root, rng);
    let guard = pool.begin_path(&path);
    for &h in &path {
        assert!(!pool.node(h).in_lru());
    }
    let victim = pool.lru_front();
    let victim_was_leaf = victim.is_null() || pool.node(victim).is_leaf();
    let recycled = pool.recycled_total();
    let mv = rng.gen_range(0..82);
    let out = pool.allocate(*path.last().unwrap(), mv, Player::Black);
    if pool.recycled_total() > recycled {
        assert!(victim_was_leaf, "recycled a node with children");
        assert!(!path.contains(&victim), "recycled a path node");
    }
    pool.end_path(guard);
    out.map(|_| ())
}

#[test]
fn hundred_thousand_random_operations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut pool = NodePool::<f64>::new(24, 4).unwrap();
    let mut roots = vec![pool.allocate_root(Player::Black).unwrap()];
    let mut exhausted = 0;
    for op in 0..100_000 {
        match rng.gen_range(0..100) {
            0..=79 => {
                let root = roots[rng.gen_range(0..roots.len())];
                if iteration(&mut pool, root, &mut rng).is_err() {
                    exhausted += 1;
                }
            }
            80..=89 => {
                // Release a random non-root subtree.
                let root = roots[rng.gen_range(0..roots.len())];
                let path = random_path(&pool, root, &mut rng);
                if path.len() > 1 {
                    let h = *path.last().unwrap();
                    let before = pool.allocated();
                    let size = subtree_size(&pool, h);
                    pool.release_subtree(h);
                    assert_eq!(pool.allocated(), before - size);
                }
            }
            90..=94 => {
                if roots.len() < 3 && pool.free() > 0 {
                    roots.push(pool.allocate_root(Player::White).unwrap());
                }
            }
            _ => {
                if roots.len() > 1 {
                    let r = roots.swap_remove(rng.gen_range(0..roots.len()));
                    pool.release_subtree(r);
                }
            }
        }
        if op % 7 == 0 || op < 1000 {
            check(&pool);
        }
    }
    check(&pool);
    assert!(pool.recycled_total() > 1000);
    assert!(exhausted < 100_000);
}

#[test]
fn amaf_is_zeroed_on_recycle() {
    let mut pool = NodePool::<f64>::new(2, 82).unwrap();
    let root = pool.allocate_root(Player::Black).unwrap();
    let a = pool.allocate(root, 3, Player::White).unwrap();
    pool.amaf_mut(a)[5].count = 9;
    pool.record_visit(a, 1.0);
    let b = pool.allocate(root, 4, Player::White).unwrap();
    assert_eq!(a, b);
    assert_eq!(pool.recycled_total(), 1);
    assert!(pool.amaf(b).iter().all(|e| e.count == 0 && e.sum == 0.0));
    assert_eq!(pool.node(b).visits(), 0);
    assert_eq!(pool.node(b).move_id(), Some(4));
    assert_eq!(pool.children(root).count(), 1);
}

#[test]
fn exhaustion_when_everything_is_protected() {
    let mut pool = NodePool::<f64>::new(2, 0).unwrap();
    let root = pool.allocate_root(Player::Black).unwrap();
    let a = pool.allocate(root, 1, Player::White).unwrap();
    let g = pool.begin_path(&[root, a]);
    assert_eq!(pool.allocate(a, 2, Player::Black), Err(PoolError::PoolExhausted));
    pool.end_path(g);
    check(&pool);
}

#[test]
fn surplus_capacity_never_recycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pool = NodePool::<f64>::new(501, 0).unwrap();
    let root = pool.allocate_root(Player::Black).unwrap();
    for _ in 0..500 {
        iteration(&mut pool, root, &mut rng).unwrap();
    }
    assert_eq!(pool.recycled_total(), 0);
    assert_eq!(pool.allocated(), 501);
    check(&pool);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariants_hold_for_any_capacity(seed in any::<u64>(), capacity in 2usize..40, steps in 1usize..400) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool = NodePool::<f64>::new(capacity, 3).unwrap();
        let root = pool.allocate_root(Player::Black).unwrap();
        for _ in 0..steps {
            let _ = iteration(&mut pool, root, &mut rng);
            check(&pool);
        }
    }

    #[test]
    fn deepest_first_reinsertion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool = NodePool::<f64>::new(64, 0).unwrap();
        let root = pool.allocate_root(Player::Black).unwrap();
        for _ in 0..60 {
            iteration(&mut pool, root, &mut rng).unwrap();
        }
        let path = random_path(&pool, root, &mut rng);
        let g = pool.begin_path(&path);
        pool.end_path(g);
        // Non-root path nodes now sit at the LRU back, shallowest last.
        let tail: Vec<_> = pool.lru_iter_rev().take(path.len() - 1).collect();
        let expect: Vec<_> = path[1..].to_vec();
        prop_assert_eq!(tail, expect);
    }
}
