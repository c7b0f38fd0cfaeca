//! Selection formulas, MAST playouts and intervals against independently
//! computed values. Exact cases run on rationals as well as floats.

#![allow(clippy::approx_constant)]

use grave_mcts::game::go::PASS_INDEX;
use grave_mcts::playout::{decay_mast, mast_value, run_playout, sample_playout_move, update_mast, PlayoutRecord};
use grave_mcts::policy::{
    beta, forward_share_ref, grave_move_value, select_child_uct, select_move_grave, ucb_value, update_ref,
    PolicyParams, RefContext, RefNode, TreeLevel,
};
use grave_mcts::pool::{AmafEntry, NodePool};
use grave_mcts::stats::agresti_coull;
use grave_mcts::{Game, GoState, MastTable, Player};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

#[test]
fn beta_exact_third() {
    assert_eq!(beta(100, 100, q(1, 100)), q(1, 3));
    assert_eq!(beta(100u32, 100, 0.01f64), 1.0 / 3.0);
    assert!((beta(100u32, 100, 0.01f32) - 1.0 / 3.0).abs() < 1e-7);
}

#[test]
fn beta_is_one_without_visits() {
    for k in [1u32, 2, 50, 10_000, u32::MAX / 4] {
        assert_eq!(beta(k, 0, q(1, 100)), q(1, 1));
        assert_eq!(beta(k, 0, 0.01f64), 1.0);
        assert_eq!(beta(k, 0, 0.01f32), 1.0);
    }
}

#[test]
fn beta_is_zero_without_amaf() {
    assert_eq!(beta(0, 50, 0.01f64), 0.0);
    assert_eq!(beta(0, 0, 0.01f64), 0.0);
    assert_eq!(beta(0, 7, q(1, 100)), q(0, 1));
}

#[test]
fn beta_monotone() {
    let b = 0.01f64;
    for a in 0..60u32 {
        for v in 0..60u32 {
            assert!(beta(a, v + 1, b) <= beta(a, v, b));
            assert!(beta(a + 1, v, b) >= beta(a, v, b));
        }
    }
}

#[test]
fn beta_vanishes_with_huge_bias() {
    for v in 1..100u32 {
        assert!(beta(100, v, 1e6f64) < 1e-5);
    }
}

#[test]
fn grave_value_exact() {
    // beta = 1/3, so 2/3 * 3/5 + 1/3 * 3/10 = 2/5 + 1/10 = 1/2.
    assert_eq!(grave_move_value(q(3, 5), 100, q(3, 10), 100, q(1, 100)), q(1, 2));
    assert!((grave_move_value(0.6f64, 100, 0.3, 100, 0.01) - 0.5).abs() < 1e-15);
    assert!((grave_move_value(0.6f32, 100, 0.3, 100, 0.01) - 0.5).abs() < 1e-6);
}

#[test]
fn grave_value_branches() {
    assert_eq!(grave_move_value(0.0f64, 0, 0.8, 40, 0.01), 0.8);
    assert_eq!(grave_move_value(0.4f64, 12, 0.0, 0, 0.01), 0.4);
    assert_eq!(grave_move_value(0.0f64, 0, 0.0, 0, 0.01), 1.0);
    assert_eq!(grave_move_value(q(0, 1), 0, q(0, 1), 0, q(1, 100)), q(1, 1));
}

#[test]
fn grave_value_is_convex() {
    for (m, a) in [(0.1, 0.9), (0.7, 0.2), (0.5, 0.5)] {
        for v in 1..30u32 {
            for c in 1..30u32 {
                let x = grave_move_value(m, v, a, c, 0.01f64);
                assert!(x >= m.min(a) - 1e-12 && x <= m.max(a) + 1e-12);
            }
        }
    }
}

#[test]
fn ucb_examples() {
    assert!(ucb_value(0.0f64, 0, 5, 0.7071).is_infinite());
    assert!(ucb_value(0.0f32, 0, 5, 0.7071).is_infinite());
    assert_eq!(ucb_value(1.0f64, 1, 1, 0.7071), 1.0);
    let want = 0.5 + 0.7071 * (10f64.ln() / 10.0).sqrt();
    assert!((ucb_value(5.0f64, 10, 10, 0.7071) - want).abs() < 1e-12);
    assert!((want - 0.8394).abs() < 1e-4);
}

fn tree() -> (NodePool<f64>, grave_mcts::NodeHandle) {
    let mut pool = NodePool::<f64>::new(16, 82).unwrap();
    let root = pool.allocate_root(Player::Black).unwrap();
    (pool, root)
}

#[test]
fn grave_prefers_strong_child() {
    let (mut pool, root) = tree();
    let c = pool.allocate(root, 10, Player::White).unwrap();
    pool.record_visits(c, 100, 90.0);
    pool.record_visits(root, 100, 10.0);
    let ref_amaf = {
        let t = pool.amaf_mut(root);
        t[10] = AmafEntry { count: 100, sum: 90.0 };
        t[20] = AmafEntry { count: 100, sum: 10.0 };
        t.to_vec()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = PolicyParams::<f64>::default();
    for _ in 0..50 {
        assert_eq!(
            select_move_grave(&pool, root, &ref_amaf, &[10, 20], &p, &mut rng),
            Some(10)
        );
    }
}

#[test]
fn grave_ties_are_uniform() {
    let (pool, root) = tree();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = PolicyParams::<f64>::default();
    let mut seen = [0u32; 3];
    for _ in 0..3000 {
        let m = select_move_grave(&pool, root, &[], &[0, 1, 2], &p, &mut rng).unwrap();
        seen[m] += 1;
    }
    for s in seen {
        assert!((900..1100).contains(&s), "{seen:?}");
    }
    assert_eq!(select_move_grave(&pool, root, &[], &[7], &p, &mut rng), Some(7));
}

#[test]
fn uct_expands_unvisited_first() {
    let (mut pool, root) = tree();
    let a = pool.allocate(root, 1, Player::White).unwrap();
    pool.record_visits(a, 3, 3.0);
    pool.record_visits(root, 3, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = PolicyParams::<f64>::default();
    let mut seen = [0u32; 3];
    for _ in 0..2000 {
        seen[select_child_uct(&pool, root, &[0, 1, 2], &p, &mut rng).unwrap()] += 1;
    }
    assert_eq!(seen[1], 0);
    assert!(seen[0] > 800 && seen[2] > 800);
}

#[test]
fn uct_argmax_and_scale_invariance() {
    let (mut pool, root) = tree();
    let a = pool.allocate(root, 0, Player::White).unwrap();
    let b = pool.allocate(root, 1, Player::White).unwrap();
    pool.record_visits(a, 10, 8.3);
    pool.record_visits(b, 10, 9.1);
    pool.record_visits(root, 20, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for c in [0.0, 0.7, 7.0, 700.0] {
        let p = PolicyParams {
            exploration_c: c,
            ..PolicyParams::<f64>::default()
        };
        assert_eq!(select_child_uct(&pool, root, &[0, 1], &p, &mut rng), Some(1));
    }
}

#[test]
fn reference_threshold_is_strict() {
    let (mut pool, root) = tree();
    let a = pool.allocate(root, 0, Player::White).unwrap();
    let b = pool.allocate(a, 1, Player::Black).unwrap();
    let p = PolicyParams::<f64>::default();
    pool.record_visits(root, 30, 0.0);
    pool.record_visits(b, 25, 0.0);
    let ctx = update_ref(RefContext::new(), &pool, TreeLevel::Top, root, &p);
    assert_eq!(ctx.get(Player::Black).unwrap().handle, root);
    let ctx2 = update_ref(ctx, &pool, TreeLevel::Top, b, &p);
    assert_eq!(ctx2.get(Player::Black).unwrap().handle, root);
    pool.record_visit(b, 0.0);
    let ctx3 = update_ref(ctx, &pool, TreeLevel::Top, b, &p);
    assert_eq!(ctx3.get(Player::Black).unwrap().handle, b);
    let zero = PolicyParams { ref_threshold: 0, ..p };
    let ctx4 = update_ref(ctx, &pool, TreeLevel::Top, a, &zero);
    assert_eq!(ctx4.get(Player::White).unwrap().handle, a);
}

#[test]
fn forward_sharing_keeps_top_reference() {
    let (mut top, troot) = tree();
    let (mut sec, sroot) = tree();
    let p = PolicyParams::<f64>::default();
    top.record_visits(troot, 100, 0.0);
    let ctx = update_ref(RefContext::new(), &top, TreeLevel::Top, troot, &p);
    let shared = forward_share_ref(ctx, &sec, sroot, &p);
    assert_eq!(
        shared.get(Player::Black),
        Some(RefNode {
            level: TreeLevel::Top,
            handle: troot
        })
    );
    sec.record_visits(sroot, 26, 0.0);
    let shared = forward_share_ref(ctx, &sec, sroot, &p);
    assert_eq!(
        shared.get(Player::Black),
        Some(RefNode {
            level: TreeLevel::Second,
            handle: sroot
        })
    );
    // Without sharing the second-level root is its own fallback.
    let own = update_ref(RefContext::new(), &sec, TreeLevel::Second, sroot, &p);
    assert_eq!(own.get(Player::Black).unwrap().level, TreeLevel::Second);
}

#[test]
fn mast_examples() {
    let mut t = MastTable::<f64>::new(82);
    assert_eq!(mast_value(&t, Player::Black, 5), 1.0);
    update_mast(
        &mut t,
        &PlayoutRecord {
            moves: vec![(Player::Black, 5)],
            rewards: [1.0, 0.0],
        },
    );
    assert_eq!(mast_value(&t, Player::Black, 5), 1.0);
    update_mast(
        &mut t,
        &PlayoutRecord {
            moves: vec![(Player::Black, 5)],
            rewards: [0.0, 1.0],
        },
    );
    assert_eq!(t.entry(Player::Black, 5).count, 2.0);
    assert_eq!(mast_value(&t, Player::Black, 5), 0.5);
    assert_eq!(t.entry(Player::White, 5).count, 0.0);
    let before = mast_value(&t, Player::Black, 5);
    decay_mast(&mut t, 0.2);
    assert!((mast_value(&t, Player::Black, 5) - before).abs() < 1e-9);
    assert!((t.entry(Player::Black, 5).count - 0.4).abs() < 1e-12);
}

#[test]
fn epsilon_greedy_frequency() {
    let s = GoState::new();
    let mut t = MastTable::<f64>::new(82);
    for m in 0..81 {
        t.update(&PlayoutRecord {
            moves: vec![(Player::Black, m)],
            rewards: [0.0, 1.0],
        });
    }
    t.update(&PlayoutRecord {
        moves: vec![(Player::Black, 40)],
        rewards: [1.0, 0.0],
    });
    let k = 81.0;
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let hits = (0..n)
        .filter(|_| sample_playout_move(&s, &t, 0.4, &mut rng) == 40)
        .count();
    let p = 0.6 + 0.4 / k;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let f = hits as f64 / n as f64;
    assert!(
        (f - p).abs() <= 3.0 * sigma,
        "frequency {f}, expected {p} ± {}",
        3.0 * sigma
    );
}

#[test]
fn epsilon_one_is_uniform() {
    let s = GoState::new();
    let t = MastTable::<f64>::new(82);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut seen = [0u32; 82];
    for _ in 0..81_000 {
        seen[sample_playout_move(&s, &t, 1.0, &mut rng)] += 1;
    }
    assert_eq!(seen[PASS_INDEX], 0);
    assert!(seen[..81].iter().all(|&c| (800..1200).contains(&c)));
}

// Black fills the board except A1 and C1, two single-point eyes. Black's
// only placements fill its own eyes and White's are suicide, so both pass.
#[test]
fn playout_passes_instead_of_filling_eyes() {
    let mut d = vec!["XXXXXXXXX"; 8];
    d.push(".X.XXXXXX");
    let s = GoState::from_diagram(&d.join("\n"), Player::Black).unwrap();
    let t = MastTable::<f64>::new(82);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    assert_eq!(sample_playout_move(&s, &t, 0.4, &mut rng), PASS_INDEX);
    let mut w = s.clone();
    w.set_to_move(Player::White);
    assert_eq!(sample_playout_move(&w, &t, 0.4, &mut rng), PASS_INDEX);
    let rec = run_playout(s, &t, 0.4, &mut rng, 243);
    assert_eq!(
        rec.moves,
        vec![(Player::Black, PASS_INDEX), (Player::White, PASS_INDEX)]
    );
    assert_eq!(rec.rewards, [1.0, 0.0]);
}

#[test]
fn playouts_terminate_and_conserve_reward() {
    let t = MastTable::<f64>::new(82);
    for seed in 0..10_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cap = 20 + (seed % 230) as u32;
        let rec = run_playout(GoState::new(), &t, 0.4, &mut rng, cap);
        assert!(rec.moves.len() as u32 <= cap);
        assert_eq!(rec.rewards[0] + rec.rewards[1], 1.0);
    }
}

#[test]
fn playout_deterministic() {
    let t = MastTable::<f64>::new(82);
    let a = run_playout(GoState::new(), &t, 0.4, &mut ChaCha8Rng::seed_from_u64(9), 243);
    let b = run_playout(GoState::new(), &t, 0.4, &mut ChaCha8Rng::seed_from_u64(9), 243);
    assert_eq!(a, b);
    let mut s = GoState::new();
    for &(p, m) in &a.moves {
        assert_eq!(s.to_move(), p);
        s.play(m).unwrap();
    }
}

#[test]
fn interval_examples() {
    let s = agresti_coull(250, 500, 1.96f64).unwrap();
    assert!((0.0436..=0.0438).contains(&s.half_width));
    let f = agresti_coull(250, 500, 1.96f32).unwrap();
    assert!((f.half_width - 0.0437).abs() < 1e-4);
    let z2 = 1.96f64 * 1.96;
    let c = agresti_coull(500, 500, 1.96f64).unwrap();
    assert!((c.center - (500.0 + z2 / 2.0) / (500.0 + z2)).abs() < 1e-12);
    assert!(c.ci_high <= 1.0);
    assert!(agresti_coull(0, 500, 1.96f64).unwrap().ci_low >= 0.0);
}

#[test]
fn interval_properties() {
    for wins in 0..=60u32 {
        let s = agresti_coull(wins, 60, 1.96f64).unwrap();
        assert!(s.ci_low >= 0.0 && s.ci_low <= s.center && s.center <= s.ci_high && s.ci_high <= 1.0);
        assert!((s.center - s.half_width - s.ci_low).abs() < 1e-12 || s.ci_low == 0.0);
    }
    let mut last = f64::INFINITY;
    for games in (10..1000).step_by(10) {
        let w = agresti_coull(games / 2, games, 1.96f64).unwrap().half_width;
        assert!(w < last);
        last = w;
    }
}
