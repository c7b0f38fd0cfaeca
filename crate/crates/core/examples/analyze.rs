//! Searches one position with a two-level agent and prints the root moves.
//!
//! cargo run --release --example analyze -- e5 c3 g7

use grave_mcts::{search, GoState, Move, Params, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut state = GoState::new();
    for v in std::env::args().skip(1) {
        state.play_move(v.parse::<Move>()?)?;
    }
    let params = Params::two_level(Variant::Grave2Fs, 200, 0.5).with_seed(1);
    let r = search(&state, &params)?;
    println!("{r}");
    for m in r.root_moves.iter().take(8) {
        let mean = m.mean.map_or("-".to_string(), |x| format!("{x:.3}"));
        println!(
            "{:>5} {:>6} {mean}",
            Move::from_index(m.mv).unwrap().to_string(),
            m.visits
        );
    }
    Ok(())
}
