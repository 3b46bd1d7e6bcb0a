//! `mgsp`: command-line front end for signal processing over multilayer
//! networks. Every output file is written atomically and paired with a
//! `<file>.manifest.json` recording how it was produced.
//!
//! Exit status: 0 on success, 2 on invalid input, 1 on numeric failure
//! (including a failed `proptest` run).

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use mgsp::apps::{Channel, KChoice};
use mgsp::spectral::TvNorm;
use mgsp::RepresentationKind;

#[derive(Parser, Debug)]
#[command(name = "mgsp", version, about = "Signal processing over multilayer networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Which representing tensor drives the computation.
#[derive(Args, Debug, Clone, Copy)]
pub struct Repr {
    /// Use the Laplacian tensor `L = D − A`.
    #[arg(long, conflicts_with = "adjacency")]
    laplacian: bool,
    /// Use the adjacency tensor (default).
    #[arg(long)]
    adjacency: bool,
}

impl Repr {
    pub fn kind(self) -> RepresentationKind {
        if self.laplacian {
            RepresentationKind::Laplacian
        } else {
            RepresentationKind::Adjacency
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormArg {
    L1,
    L2,
}

impl From<NormArg> for TvNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => TvNorm::L1,
            NormArg::L2 => TvNorm::L2,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisArg {
    /// Order-wise basis from the orthogonal CP decomposition.
    Cp,
    /// Singular basis from the higher-order SVD.
    Hosvd,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassArg {
    Low,
    High,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideArg {
    Layer,
    Entity,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelArg {
    X,
    Y,
    Z,
}

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::X => Channel::X,
            ChannelArg::Y => Channel::Y,
            ChannelArg::Z => Channel::Z,
        }
    }
}

fn parse_k(s: &str) -> Result<KChoice, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(KChoice::Auto);
    }
    match s.parse::<usize>() {
        Ok(k) if k > 0 => Ok(KChoice::Fixed(k)),
        _ => Err(format!("expected `auto` or a positive integer, got `{s}`")),
    }
}

/// Forward or inverse transform selection shared by `gft` and `igft`.
#[derive(Args, Debug, Clone, Copy)]
#[command(group(ArgGroup::new("transform").required(true)
    .args(["joint", "layer", "entity", "orderwise", "singular"])))]
pub struct TransformArgs {
    /// Joint eigen-tensor transform.
    #[arg(long)]
    joint: bool,
    /// Layer-side transform in the `--basis` basis.
    #[arg(long)]
    layer: bool,
    /// Entity-side transform in the `--basis` basis.
    #[arg(long)]
    entity: bool,
    /// Both sides in the order-wise (CP) basis.
    #[arg(long)]
    orderwise: bool,
    /// Both sides in the singular (HOSVD) basis.
    #[arg(long)]
    singular: bool,
    #[arg(long, value_enum, default_value = "cp")]
    basis: BasisArg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a network file from one of the built-in generators.
    #[command(group(ArgGroup::new("fixture").required(true).args(["er", "cyclic", "x4"])))]
    Gen {
        /// ER multiplex with intralayer probability P and interlayer probability Q.
        #[arg(long, num_args = 4, value_names = ["P", "Q", "M", "N"])]
        er: Option<Vec<f64>>,
        /// Directed single-layer cycle of N nodes.
        #[arg(long, value_name = "N")]
        cyclic: Option<usize>,
        /// Two layers of two entities whose supra-adjacency is the 4-cycle.
        #[arg(long)]
        x4: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Write the supra-matrix of the representing tensor as CSV.
    Flatten {
        network: PathBuf,
        #[command(flatten)]
        repr: Repr,
        /// Entity-first indexing `M·i + α` instead of layer-first `N·α + i`.
        #[arg(long)]
        entity_wise: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// One shifting step `F ⋄ s`.
    Shift {
        network: PathBuf,
        signal: PathBuf,
        #[command(flatten)]
        repr: Repr,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compute a spectrum and write it as JSON.
    #[command(group(ArgGroup::new("method").required(true).args(["joint", "cp", "hosvd", "tucker"])))]
    Spectrum {
        network: PathBuf,
        #[command(flatten)]
        repr: Repr,
        #[arg(long)]
        joint: bool,
        #[arg(long)]
        cp: bool,
        #[arg(long)]
        hosvd: bool,
        #[arg(long)]
        tucker: bool,
        /// Tucker ranks; defaults to `(M, N−1, M, N−1)`.
        #[arg(long, num_args = 4, value_names = ["R1", "R2", "R3", "R4"], requires = "tucker")]
        ranks: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "l1")]
        norm: NormArg,
        /// Normalize each eigen-tensor to unit norm before measuring variation.
        #[arg(long)]
        unit_norm: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Forward transform of a signal.
    Gft {
        network: PathBuf,
        signal: PathBuf,
        #[command(flatten)]
        repr: Repr,
        #[command(flatten)]
        transform: TransformArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Inverse transform of a coefficient file.
    Igft {
        network: PathBuf,
        coefficients: PathBuf,
        #[command(flatten)]
        repr: Repr,
        #[command(flatten)]
        transform: TransformArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Total variation and frequency rank of every joint eigen-tensor.
    Tv {
        network: PathBuf,
        #[command(flatten)]
        repr: Repr,
        #[arg(long, value_enum, default_value = "l1")]
        norm: NormArg,
        #[arg(long)]
        unit_norm: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Polynomial or spectral filtering of a signal.
    #[command(group(ArgGroup::new("design").required(true).args(["poly", "spec", "keep"])))]
    Filter {
        network: PathBuf,
        signal: PathBuf,
        #[command(flatten)]
        repr: Repr,
        /// Polynomial coefficients `a0,a1,…`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        poly: Option<Vec<f64>>,
        /// Filter specification JSON.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Keep this many components on one side of a ranked spectral mask.
        #[arg(long)]
        keep: Option<usize>,
        #[arg(long, value_enum, default_value = "low")]
        pass: PassArg,
        #[arg(long, value_enum, default_value = "entity")]
        side: SideArg,
        #[arg(long, value_enum, default_value = "hosvd")]
        basis: BasisArg,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Spectral clustering of entities.
    #[command(group(ArgGroup::new("source").required(true).args(["network", "features"])))]
    Cluster {
        network: Option<PathBuf>,
        /// One feature CSV per layer (`N` rows each) instead of a network.
        #[arg(long, num_args = 1..)]
        features: Vec<PathBuf>,
        /// Gaussian scale of the feature weights.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Squared-distance threshold; the mean squared distance if omitted.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, value_enum, default_value = "hosvd")]
        basis: BasisArg,
        #[arg(long, value_parser = parse_k, default_value = "auto")]
        k: KChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Semi-supervised binary classification.
    Classify {
        /// `N` rows of `K` features; each feature becomes one layer.
        #[arg(long)]
        data: PathBuf,
        /// `entity,label` rows with labels in {-1, 0, 1}.
        #[arg(long)]
        labels: PathBuf,
        /// Fixed power `F^[order]` instead of the fitted polynomial.
        #[arg(long)]
        apf: bool,
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Short-time singular transform of a labeled point-cloud sequence.
    Stmgst {
        /// Frame CSV files (`label,x,y,z`) in time order.
        #[arg(required = true)]
        frames: Vec<PathBuf>,
        #[arg(long)]
        window: usize,
        /// Frames between window starts; defaults to the window length.
        #[arg(long)]
        hop: Option<usize>,
        /// Squared-distance threshold for intralayer edges.
        #[arg(long)]
        tau: f64,
        /// Gaussian scale of the intralayer weights.
        #[arg(long, alias = "sigma", default_value_t = 1.0)]
        delta: f64,
        #[arg(long, value_enum, default_value = "z")]
        channel: ChannelArg,
        /// Window index JSON; defaults to `<out>.index.json`.
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check the structural spectral properties on a network.
    #[command(group(ArgGroup::new("source").required(true).args(["network", "er"])))]
    Proptest {
        network: Option<PathBuf>,
        #[arg(long, num_args = 4, value_names = ["P", "Q", "M", "N"])]
        er: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        repr: Repr,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(commands::Status::Done) => ExitCode::SUCCESS,
        Ok(commands::Status::PropertiesFailed) => {
            eprintln!("error: property checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 1 } else { 2 })
        }
    }
}
