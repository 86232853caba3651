mod commands;
mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit statuses shared by every subcommand.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const FAULT: u8 = 3;
    /// `explore` stopped on a node or memory budget with work left.
    pub const BUDGET: u8 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "locasim", version, about = "Cellular automata, real-time sequence generation and local simulations")]
pub struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, env = "LOCASIM_WORKERS", default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Runs an automaton from `* * B Q Q ...` and renders the diagram.
    Simulate(SimulateArgs),
    /// Checks that automata generate a sequence up to a horizon.
    Verify(VerifyArgs),
    /// Builds the scripted 5-state reduction of a 6-state seed.
    Handcraft(HandcraftArgs),
    /// Harvests the super-local transitions of an automaton.
    CollectSupers(SupersArgs),
    /// Applies a local mapping and writes the simulated automaton.
    MapApply(MapApplyArgs),
    /// Explores compliant local simulations reachable from an automaton.
    Explore(ExploreArgs),
    /// Enumerates tiny automata and classifies the sequences they generate.
    Enumerate(EnumerateArgs),
    /// Summarises a solution stream.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Text,
    Ppm,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub ca: String,
    #[arg(long, default_value_t = 70)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Glyph overrides, `NAME=c,NAME=c`.
    #[arg(long)]
    pub glyphs: Option<String>,
    /// Pixels per cell for `ppm`.
    #[arg(long, default_value_t = 4)]
    pub cell_size: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct HarvestArgs {
    /// Initial harvest horizon.
    #[arg(long, default_value_t = 400)]
    pub supers_horizon: usize,
    /// Steps without a new record that count as saturation.
    #[arg(long, default_value_t = 100)]
    pub window: usize,
    /// Largest horizon the harvest may grow to while unsaturated.
    #[arg(long, default_value_t = 12_800)]
    pub supers_cap: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Automaton file.
    #[arg(long, conflicts_with = "solutions", required_unless_present = "solutions")]
    pub ca: Option<String>,
    /// Solution stream written by `explore`.
    #[arg(long)]
    pub solutions: Option<String>,
    /// Sequence, e.g. `cube`, `linear:2,-1`, `pow2-minus-1`.
    #[arg(long, default_value = "cube")]
    pub seq: String,
    #[arg(long, default_value_t = 130)]
    pub horizon: u64,
}

#[derive(Args, Debug)]
pub struct HandcraftArgs {
    /// Six-state seed with states `Q B A C D E`.
    #[arg(long)]
    pub seed: String,
    /// Entry overrides applied on top of the scripted mapping.
    #[arg(long)]
    pub patch: Option<String>,
    #[arg(long)]
    pub mapping_out: Option<String>,
    #[arg(long)]
    pub ca_out: Option<String>,
    #[arg(long, default_value = "cube")]
    pub seq: String,
    #[arg(long, default_value_t = 130)]
    pub horizon: u64,
    #[command(flatten)]
    pub harvest: HarvestArgs,
}

#[derive(Args, Debug)]
pub struct SupersArgs {
    #[arg(long)]
    pub ca: String,
    #[arg(long, default_value_t = 400)]
    pub horizon: usize,
    #[arg(long, default_value_t = 100)]
    pub window: usize,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct MapApplyArgs {
    /// Source automaton of the mapping.
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub mapping: String,
    #[arg(long)]
    pub patch: Option<String>,
    /// Simulated automaton; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// Also verify the result against this sequence.
    #[arg(long)]
    pub seq: Option<String>,
    #[arg(long, default_value_t = 130)]
    pub horizon: u64,
    #[command(flatten)]
    pub harvest: HarvestArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Order {
    ModifyThenAdmit,
    AdmitThenModify,
}

#[derive(Args, Debug)]
pub struct ExploreArgs {
    /// Start automaton; exploration begins at its identity mapping.
    #[arg(long)]
    pub ca: String,
    #[arg(long, default_value = "cube")]
    pub seq: String,
    /// Target state count (at least the start automaton's).
    #[arg(long)]
    pub states: Option<usize>,
    /// Extra random modifications per neighbour.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Candidate evaluations before stopping.
    #[arg(long, default_value_t = 100_000)]
    pub budget_nodes: u64,
    /// Memory bound for visited keys and frontier, e.g. `512M`, `4G`.
    #[arg(long, default_value = "4G")]
    pub budget_mem: String,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long, value_enum, default_value = "modify-then-admit")]
    pub order: Order,
    /// Re-verification horizon for every emitted solution.
    #[arg(long, default_value_t = 130)]
    pub horizon: u64,
    #[arg(long)]
    pub no_verify: bool,
    /// Solution stream; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// Written when the run stops.
    #[arg(long)]
    pub checkpoint: Option<String>,
    /// Continues from a checkpoint; the solution stream is appended to.
    #[arg(long)]
    pub resume: Option<String>,
    /// Statistics as JSON.
    #[arg(long)]
    pub stats_out: Option<String>,
    /// Compares every incremental verdict with a full recomputation.
    #[arg(long)]
    pub cross_check: bool,
    /// Growth is sampled every this many expansions.
    #[arg(long, default_value_t = 64)]
    pub sample_every: u64,
    #[command(flatten)]
    pub harvest: HarvestArgs,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long, default_value_t = 2)]
    pub states: usize,
    #[arg(long, default_value_t = 64)]
    pub horizon: u64,
    /// Stops after this many candidates.
    #[arg(long)]
    pub limit: Option<u64>,
    /// Permits three-state spaces.
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Solution stream written by `explore`.
    #[arg(long)]
    pub solutions: String,
    /// Reference histogram, two columns `transitions count`.
    #[arg(long)]
    pub reference: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("locasim: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
