//! GTP 2 front end.

use std::io::{BufRead, Write};

use crate::game::go::BOARD_SIZE;
use crate::game::{GoState, Move, Player};
use crate::playout::MastTable;
use crate::scalar::Scalar;
use crate::search::{run_search, turn_seed, SearchParams};

pub const COMMANDS: &[&str] = &[
    "protocol_version",
    "name",
    "version",
    "known_command",
    "list_commands",
    "boardsize",
    "clear_board",
    "komi",
    "play",
    "genmove",
    "showboard",
    "final_score",
    "quit",
];

/// Ply limit of a GTP game; clients decide when a game ends.
const GTP_MOVE_CAP: u32 = 1000;

pub struct GtpEngine<T> {
    agent: SearchParams<T>,
    state: GoState,
    mast: MastTable<T>,
    searches: u32,
    quit: bool,
}

impl<T: Scalar> GtpEngine<T> {
    pub fn new(agent: SearchParams<T>) -> GtpEngine<T> {
        GtpEngine {
            agent,
            state: GoState::new().with_move_cap(GTP_MOVE_CAP),
            mast: MastTable::for_game::<GoState>(),
            searches: 0,
            quit: false,
        }
    }

    pub fn state(&self) -> &GoState {
        &self.state
    }

    pub fn has_quit(&self) -> bool {
        self.quit
    }

    /// Answers one input line; `None` for lines GTP says to ignore.
    pub fn handle_line(&mut self, line: &str) -> Option<String> {
        let line = line.split('#').next().unwrap_or("");
        let cleaned: String = line
            .chars()
            .map(|c| if c == '\t' { ' ' } else { c })
            .filter(|c| !c.is_control())
            .collect();
        let mut words = cleaned.split_whitespace();
        let first = words.next()?;
        let (id, command) = if first.bytes().all(|b| b.is_ascii_digit()) {
            match words.next() {
                Some(c) => (Some(first), c),
                None => (Some(first), ""),
            }
        } else {
            (None, first)
        };
        let args: Vec<&str> = words.collect();
        let id = id.unwrap_or("");
        Some(match self.dispatch(command, &args) {
            Ok(text) if text.is_empty() => format!("={id}\n\n"),
            Ok(text) => format!("={id} {text}\n\n"),
            Err(text) => format!("?{id} {text}\n\n"),
        })
    }

    fn dispatch(&mut self, command: &str, args: &[&str]) -> Result<String, String> {
        match command {
            "protocol_version" => Ok("2".into()),
            "name" => Ok("grave".into()),
            "version" => Ok(env!("CARGO_PKG_VERSION").into()),
            "known_command" => Ok(args.first().is_some_and(|c| COMMANDS.contains(c)).to_string()),
            "list_commands" => Ok(COMMANDS.join("\n")),
            "boardsize" => match args.first().map(|a| a.parse::<usize>()) {
                Some(Ok(n)) if n == BOARD_SIZE => {
                    self.reset(self.state.komi());
                    Ok(String::new())
                }
                Some(Ok(_)) => Err("unacceptable size".into()),
                _ => Err("syntax error".into()),
            },
            "clear_board" => {
                self.reset(self.state.komi());
                Ok(String::new())
            }
            "komi" => match args.first().map(|a| a.parse::<f64>()) {
                Some(Ok(k)) if k.is_finite() => {
                    self.state.set_komi(k);
                    Ok(String::new())
                }
                _ => Err("syntax error".into()),
            },
            "play" => {
                let [color, vertex] = args else {
                    return Err("syntax error".into());
                };
                let player: Player = color.parse().map_err(|_| "syntax error".to_string())?;
                let mv: Move = vertex.parse().map_err(|_| "syntax error".to_string())?;
                let mut next = self.state.clone();
                next.set_to_move(player);
                next.play_move(mv).map_err(|_| "illegal move".to_string())?;
                self.state = next;
                Ok(String::new())
            }
            "genmove" => {
                let player: Player = args
                    .first()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| "syntax error".to_string())?;
                self.genmove(player)
            }
            "showboard" => Ok(format!("\n{}", self.state.to_string().trim_end())),
            "final_score" => {
                let o = self.state.area_score();
                let margin = f64::from(o.black_area) - f64::from(o.white_area) - o.komi;
                Ok(if margin > 0.0 {
                    format!("B+{margin}")
                } else if margin < 0.0 {
                    format!("W+{}", -margin)
                } else {
                    "0".into()
                })
            }
            "quit" => {
                self.quit = true;
                Ok(String::new())
            }
            _ => Err("unknown command".into()),
        }
    }

    fn reset(&mut self, komi: f64) {
        self.state = GoState::new().with_komi(komi).with_move_cap(GTP_MOVE_CAP);
        self.mast.clear();
        self.searches = 0;
    }

    fn genmove(&mut self, player: Player) -> Result<String, String> {
        self.state.set_to_move(player);
        if self.state.is_terminal() {
            return Ok("pass".into());
        }
        if self.searches > 0 {
            self.mast.decay(self.agent.mast_decay);
        }
        self.searches += 1;
        let mut params = self.agent.with_seed(turn_seed(self.agent.seed, self.state.ply()));
        // Playouts stop at an absolute ply; keep room for them late in long games.
        params.move_cap = params.move_cap.max(self.state.ply() + params.move_cap / 3);
        let result = run_search(&self.state, &params, &mut self.mast).map_err(|e| e.to_string())?;
        let mv = Move::from_index(result.chosen_move).ok_or_else(|| "engine produced no move".to_string())?;
        self.state.play_move(mv).map_err(|e| e.to_string())?;
        Ok(mv.to_string().to_ascii_lowercase())
    }
}

impl<T: Scalar> Default for GtpEngine<T> {
    fn default() -> Self {
        GtpEngine::new(SearchParams::new(crate::search::Variant::Grave))
    }
}

/// Runs a session until `quit` or end of input.
pub fn serve<T: Scalar, R: BufRead, W: Write>(
    engine: &mut GtpEngine<T>,
    input: R,
    mut output: W,
) -> std::io::Result<()> {
    for line in input.split(b'\n') {
        let line = line?;
        let text = String::from_utf8_lossy(&line);
        if let Some(reply) = engine.handle_line(&text) {
            output.write_all(reply.as_bytes())?;
            output.flush()?;
        }
        if engine.has_quit() {
            break;
        }
    }
    Ok(())
}
