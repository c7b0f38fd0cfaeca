use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grave_mcts::arena::{run_arena, CsvSink, ExperimentConfig, SweepConfig};
use grave_mcts::bench::run_bench;
use grave_mcts::gtp::{serve, GtpEngine};
use grave_mcts::stats::{color_counts, summarize, AgentId};
use grave_mcts::{parse_agent, play_game, Agent, GoState, Move, Player, Summary};

#[derive(Parser)]
#[command(name = "grave", version, about = "Memory-bounded MCTS for 9x9 Go")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play a match between two agents and write one CSV row per game.
    Arena(ArenaArgs),
    /// Play one game and print the moves and the score.
    Play(PlayArgs),
    /// Measure playout throughput and memory per node.
    Bench(BenchArgs),
    /// Speak GTP 2 on stdin/stdout.
    Gtp(GtpArgs),
    /// Run the cells of a sweep configuration.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Number of games.
    #[arg(long, default_value_t = 500)]
    games: u32,
    /// Base seed; game i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Games played in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write wall_ms = 0 so output is byte-for-byte reproducible.
    #[arg(long)]
    no_wall_clock: bool,
    /// Do not print a line per finished game.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct ArenaArgs {
    /// Agent A, e.g. `grave2fs:N=240,lambda=0.4`.
    #[arg(long, short = 'a')]
    agent_a: String,
    /// Agent B, e.g. `grave:P=10000`.
    #[arg(long, short = 'b')]
    agent_b: String,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct PlayArgs {
    /// Black.
    #[arg(long, default_value = "grave:P=1000")]
    black: String,
    /// White.
    #[arg(long, default_value = "grave:P=1000")]
    white: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "grave:P=10000")]
    agent: String,
    /// Number of positions searched.
    #[arg(long, default_value_t = 10)]
    positions: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GtpArgs {
    #[arg(long, default_value = "grave:P=10000")]
    agent: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration (TOML).
    config: PathBuf,
    /// Run only these cells (repeatable).
    #[arg(long)]
    cell: Vec<String>,
    /// Override the configured game count.
    #[arg(long)]
    games: Option<u32>,
    /// Override the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for the per-cell CSV files.
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// List the cells and exit.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    no_wall_clock: bool,
    #[arg(long, short)]
    quiet: bool,
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Arena(a) => arena(a),
        Command::Play(a) => play(a),
        Command::Bench(a) => bench(a),
        Command::Gtp(a) => gtp(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn agent(spec: &str) -> Result<Agent, Box<dyn std::error::Error>> {
    parse_agent(spec).map_err(|e| format!("agent {spec:?}: {e}").into())
}

fn print_summary(label: &str, records: &[grave_mcts::MatchRecord]) -> CliResult {
    let s: Summary = summarize(records, AgentId::A)?;
    let (black, white) = color_counts(records);
    println!("{:<40} {}", "agent_a", Summary::TABLE_HEADER);
    println!("{:<40} {}", label, s);
    eprintln!("colours: A black {black}, A white {white}");
    Ok(())
}

fn progress(quiet: bool) -> impl FnMut(&grave_mcts::MatchRecord) {
    move |r| {
        if !quiet {
            let w = match r.winner {
                Some(p) if p == r.a_color => "A",
                Some(_) => "B",
                None => "draw",
            };
            eprintln!(
                "game {:>4}: A {} winner {} in {} moves, {} ms",
                r.game_id, r.a_color, w, r.moves, r.wall_ms
            );
        }
    }
}

fn experiment(a: Agent, b: Agent, run: &RunArgs) -> ExperimentConfig<f64> {
    let mut e = ExperimentConfig::new(a, b, run.games);
    e.base_seed = run.seed;
    e.jobs = run.jobs;
    e.wall_clock = !run.no_wall_clock;
    e
}

fn arena(args: ArenaArgs) -> CliResult {
    let mut e = experiment(agent(&args.agent_a)?, agent(&args.agent_b)?, &args.run);
    e.out = args.out.clone();
    e.validate()?;
    let records = match &args.out {
        Some(path) => {
            let mut sink = CsvSink::create(path)?;
            run_arena(&e, Some(&mut sink), progress(args.run.quiet))?
        }
        None => {
            let mut sink = CsvSink::new(BufWriter::new(io::stdout()))?;
            run_arena(&e, Some(&mut sink), progress(args.run.quiet))?
        }
    };
    print_summary(&args.agent_a, &records)
}

fn play(args: PlayArgs) -> CliResult {
    let black = agent(&args.black)?;
    let white = agent(&args.white)?;
    let r = play_game(&GoState::new(), &black.params, &white.params, Player::Black, args.seed)?;
    let mut state = GoState::new();
    for &m in &r.transcript {
        let mv = Move::from_index(m).ok_or("bad move id in transcript")?;
        println!(
            "{} {}",
            state
                .to_move()
                .name()
                .chars()
                .next()
                .unwrap_or('?')
                .to_ascii_uppercase(),
            mv
        );
        state.play_move(mv)?;
    }
    let o = state.area_score();
    let margin = f64::from(o.black_area) - f64::from(o.white_area) - o.komi;
    let result = match o.winner() {
        Some(Player::Black) => format!("B+{margin}"),
        Some(Player::White) => format!("W+{}", -margin),
        None => "0".to_string(),
    };
    println!(
        "result {result} (black {}, white {}, komi {}) after {} moves",
        o.black_area, o.white_area, o.komi, r.moves
    );
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult {
    let a = agent(&args.agent)?;
    let params = a.params.with_seed(args.seed);
    println!("{}", run_bench(&a.label, &params, args.positions)?);
    Ok(())
}

fn gtp(args: GtpArgs) -> CliResult {
    let a = agent(&args.agent)?;
    let mut engine = GtpEngine::new(a.params);
    serve(&mut engine, io::stdin().lock(), io::stdout().lock())?;
    Ok(())
}

fn sweep(args: SweepArgs) -> CliResult {
    let cfg = SweepConfig::load(&args.config)?;
    if args.list {
        for c in &cfg.cells {
            let reference = c.reference.map_or("-".to_string(), |r| format!("{:.1}%", r * 100.0));
            println!("{:<16} {:<44} ref {}", c.id, c.agent, reference);
        }
        return Ok(());
    }
    for id in &args.cell {
        if cfg.cell(id).is_none() {
            return Err(format!("{}: no cell {id:?}", cfg.name).into());
        }
    }
    let cells: Vec<_> = cfg
        .cells
        .iter()
        .filter(|c| args.cell.is_empty() || args.cell.contains(&c.id))
        .collect();
    let mut rows = Vec::new();
    for cell in cells {
        let mut e = cfg.experiment::<f64>(cell, args.games)?;
        if let Some(seed) = args.seed {
            e.base_seed = seed;
        }
        e.jobs = args.jobs;
        e.wall_clock = !args.no_wall_clock;
        let path = args.out_dir.join(format!("{}_{}.csv", cfg.name, cell.id));
        e.out = Some(path.clone());
        eprintln!("cell {} -> {}", cell.id, path.display());
        let mut sink = CsvSink::create(&path)?;
        let records = run_arena(&e, Some(&mut sink), progress(args.quiet))?;
        let s: Summary = summarize(&records, AgentId::A)?;
        rows.push((cell.id.clone(), cell.reference, s));
    }
    println!("{:<16} {}  reference", "cell", Summary::TABLE_HEADER);
    for (id, reference, s) in rows {
        let reference = reference.map_or("-".to_string(), |r| format!("{:.1}%", r * 100.0));
        println!("{id:<16} {s}  {reference:>8}");
    }
    Ok(())
}
