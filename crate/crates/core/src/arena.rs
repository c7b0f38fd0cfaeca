//! Parallel match runner, CSV output and sweep configurations.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{parse_agent, AgentSpec};
use crate::game::{GoState, Player};
use crate::scalar::Scalar;
use crate::search::{play_game, MatchRecord, SearchError};

pub const CSV_HEADER: &str = "game_id,seed,agent_a,agent_b,a_color,winner,moves,playouts_a,playouts_b,peak_nodes_a,peak_nodes_b,recycled_a,recycled_b,wall_ms";

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig<T> {
    pub agent_a: AgentSpec<T>,
    pub agent_b: AgentSpec<T>,
    pub games: u32,
    pub base_seed: u64,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    /// Write measured wall time; `false` writes 0 so files are reproducible.
    pub wall_clock: bool,
}

impl<T: Scalar> ExperimentConfig<T> {
    pub fn new(agent_a: AgentSpec<T>, agent_b: AgentSpec<T>, games: u32) -> Self {
        ExperimentConfig {
            agent_a,
            agent_b,
            games,
            base_seed: 0,
            out: None,
            jobs: 1,
            wall_clock: true,
        }
    }

    pub fn validate(&self) -> Result<(), ArenaError> {
        if self.games == 0 {
            return Err(ArenaError::Config("games must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(ArenaError::Config("jobs must be at least 1".into()));
        }
        self.agent_a.params.validate()?;
        self.agent_b.params.validate()?;
        Ok(())
    }

    /// Colour of A and seed of game `i`: A is Black in even games.
    pub fn schedule(&self, i: u32) -> (Player, u64) {
        let color = if i.is_multiple_of(2) {
            Player::Black
        } else {
            Player::White
        };
        (color, self.base_seed.wrapping_add(u64::from(i)))
    }

    pub fn play(&self, i: u32) -> Result<MatchRecord, SearchError> {
        let (color, seed) = self.schedule(i);
        let mut r = play_game(&GoState::new(), &self.agent_a.params, &self.agent_b.params, color, seed)?;
        r.game_id = u64::from(i);
        r.agent_a = self.agent_a.label.clone();
        r.agent_b = self.agent_b.label.clone();
        if !self.wall_clock {
            r.wall_ms = 0;
        }
        Ok(r)
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    game_id: u64,
    seed: u64,
    agent_a: &'a str,
    agent_b: &'a str,
    a_color: &'a str,
    winner: &'a str,
    moves: u32,
    playouts_a: u64,
    playouts_b: u64,
    peak_nodes_a: u32,
    peak_nodes_b: u32,
    recycled_a: u64,
    recycled_b: u64,
    wall_ms: u64,
}

/// Streams one CSV row per game, flushing after each.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl CsvSink<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self, ArenaError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        CsvSink::new(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W) -> Result<Self, ArenaError> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(inner);
        writer.write_record(CSV_HEADER.split(','))?;
        writer.flush()?;
        Ok(CsvSink { writer })
    }

    pub fn write(&mut self, r: &MatchRecord) -> Result<(), ArenaError> {
        let winner = match r.winner {
            Some(p) => p.name(),
            None => "draw",
        };
        self.writer.serialize(CsvRow {
            game_id: r.game_id,
            seed: r.seed,
            agent_a: &r.agent_a,
            agent_b: &r.agent_b,
            a_color: r.a_color.name(),
            winner,
            moves: r.moves,
            playouts_a: r.playouts_a,
            playouts_b: r.playouts_b,
            peak_nodes_a: r.peak_nodes_a,
            peak_nodes_b: r.peak_nodes_b,
            recycled_a: r.recycled_a,
            recycled_b: r.recycled_b,
            wall_ms: r.wall_ms,
        })?;
        self.writer.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W, ArenaError> {
        self.writer
            .into_inner()
            .map_err(|e| ArenaError::Io(io::Error::other(e.to_string())))
    }
}

/// Plays every game of `config` on `config.jobs` worker threads. Rows reach
/// `sink` in completion order; `on_record` sees each record as it lands.
/// Returns the records sorted by game id.
pub fn run_arena<T: Scalar, W: Write>(
    config: &ExperimentConfig<T>,
    mut sink: Option<&mut CsvSink<W>>,
    mut on_record: impl FnMut(&MatchRecord),
) -> Result<Vec<MatchRecord>, ArenaError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| ArenaError::Config(e.to_string()))?;
    let (tx, rx) = mpsc::channel::<Result<MatchRecord, SearchError>>();
    let mut records = Vec::with_capacity(config.games as usize);
    std::thread::scope(|scope| -> Result<(), ArenaError> {
        scope.spawn(move || {
            pool.install(|| {
                (0..config.games).into_par_iter().for_each_with(tx, |tx, i| {
                    let _ = tx.send(config.play(i));
                })
            })
        });
        for result in rx {
            let record = result?;
            if let Some(s) = sink.as_deref_mut() {
                s.write(&record)?;
            }
            on_record(&record);
            records.push(record);
        }
        Ok(())
    })?;
    records.sort_by_key(|r| r.game_id);
    Ok(records)
}

/// A batch of arena runs sharing an opponent and a game count.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct SweepConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub games: u32,
    #[serde(default)]
    pub base_seed: u64,
    /// Agent B of every cell unless the cell names its own.
    pub opponent: String,
    #[serde(rename = "cell")]
    pub cells: Vec<SweepCell>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct SweepCell {
    pub id: String,
    pub agent: String,
    #[serde(default)]
    pub opponent: Option<String>,
    /// Published winrate of the agent in this cell, as a fraction.
    #[serde(default)]
    pub reference: Option<f64>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<SweepConfig, ArenaError> {
        let cfg: SweepConfig = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<SweepConfig, ArenaError> {
        SweepConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    fn check(&self) -> Result<(), ArenaError> {
        if self.games == 0 {
            return Err(ArenaError::Config(format!("{}: games must be at least 1", self.name)));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.cells {
            if !seen.insert(c.id.as_str()) {
                return Err(ArenaError::Config(format!("{}: duplicate cell id {}", self.name, c.id)));
            }
        }
        Ok(())
    }

    pub fn cell(&self, id: &str) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.id == id)
    }

    /// Experiment for one cell; `games` overrides the configured count.
    pub fn experiment<T: Scalar + std::str::FromStr>(
        &self,
        cell: &SweepCell,
        games: Option<u32>,
    ) -> Result<ExperimentConfig<T>, ArenaError> {
        let a = parse_agent(&cell.agent)?;
        let b = parse_agent(cell.opponent.as_deref().unwrap_or(&self.opponent))?;
        let mut e = ExperimentConfig::new(a, b, games.unwrap_or(self.games));
        e.base_seed = self.base_seed;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig<f64> {
        ExperimentConfig::new(
            parse_agent("uct:P=8,cap=30").unwrap(),
            parse_agent("grave:P=8,cap=30").unwrap(),
            3,
        )
    }

    #[test]
    fn header_and_rows() {
        let mut c = tiny();
        c.wall_clock = false;
        let mut sink = CsvSink::new(Vec::new()).unwrap();
        let recs = run_arena(&c, Some(&mut sink), |_| {}).unwrap();
        assert_eq!(recs.len(), 3);
        let text = String::from_utf8(sink.into_inner().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0,uct:P=8,cap=30") || lines[1].contains("\"uct:P=8,cap=30\""));
    }

    #[test]
    fn schedule_alternates() {
        let mut c = tiny();
        c.base_seed = 10;
        assert_eq!(c.schedule(0), (Player::Black, 10));
        assert_eq!(c.schedule(1), (Player::White, 11));
    }

    #[test]
    fn sweep_parsing() {
        let cfg = SweepConfig::from_toml(
            r#"
name = "t"
games = 4
opponent = "grave:P=100"
[[cell]]
id = "a"
agent = "uct:P=10"
reference = 0.5
"#,
        )
        .unwrap();
        assert_eq!(cfg.cells.len(), 1);
        let e = cfg.experiment::<f64>(cfg.cell("a").unwrap(), Some(2)).unwrap();
        assert_eq!(e.games, 2);
    }
}
