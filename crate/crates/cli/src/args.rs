use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "grnf",
    version,
    about = "Graph random neural features: training-free graph embeddings, distances and kernels"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic graph corpora.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Embed every graph of a corpus; writes a CSV of embeddings.
    Embed(EmbedArgs),
    /// Smallest embedding dimension meeting an (epsilon, delta) guarantee.
    Dim(DimArgs),
    /// Estimated distance between two graphs under a saved map.
    Distance(DistanceArgs),
    /// Kernel Gram matrix of a corpus under a saved map.
    Gram(GramArgs),
    /// Monte-Carlo experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Stochastic block model graphs; writes a JSON-lines corpus.
    Sbm(SbmArgs),
    /// Delaunay triangulations of perturbed planar seed points, one class per
    /// seed collection; writes a JSON-lines corpus.
    Delaunay(DelaunayArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output corpus (JSON lines of {graph, label}), or a directory with
    /// --per-graph.
    #[arg(long)]
    pub out: PathBuf,
    /// Write one graph JSON document per file plus labels.txt into --out.
    #[arg(long)]
    pub per_graph: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SbmArgs {
    /// Nodes per graph.
    #[arg(long)]
    pub n: usize,
    /// Comma-separated block sizes summing to n.
    #[arg(long, value_delimiter = ',', required = true)]
    pub blocks: Vec<usize>,
    #[arg(long)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p_out: f64,
    #[arg(long)]
    pub count: usize,
    /// Label attached to every generated graph.
    #[arg(long, default_value_t = 0)]
    pub label: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct DelaunayArgs {
    /// Points (nodes) per graph.
    #[arg(long, default_value_t = 12)]
    pub points: usize,
    /// Seed points drawn for each class.
    #[arg(long, default_value_t = 12)]
    pub seeds_per_class: usize,
    /// Standard deviation of the per-coordinate perturbation.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    /// Graphs per class.
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    Mean,
    Sum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ActivationArg {
    Sigmoid,
    Tanh,
    Relu,
}

/// The feature distribution.
#[derive(Debug, Args)]
pub struct DistArgs {
    /// Largest tensor order.
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    /// Poisson rate of the order distribution.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Standard deviation of the layer coefficients.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value_t = NormArg::Mean)]
    pub norm: NormArg,
    /// Activation after the equivariant layer (must be squashing).
    #[arg(long, value_enum, default_value_t = ActivationArg::Sigmoid)]
    pub activation_e: ActivationArg,
    /// Activation after the invariant layer.
    #[arg(long, value_enum, default_value_t = ActivationArg::Sigmoid)]
    pub activation_i: ActivationArg,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EmbedArgs {
    /// JSON-lines corpus.
    #[arg(long)]
    pub input: PathBuf,
    /// Embedding dimension.
    #[arg(long = "M", short = 'M')]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub dist: DistArgs,
    /// Sample from a proposal distribution and reweight to the target.
    #[arg(long, requires = "proposal_sigma")]
    pub weighted: bool,
    /// Coefficient standard deviation of the proposal.
    #[arg(long)]
    pub proposal_sigma: Option<f64>,
    /// Poisson rate of the proposal (default: the target's).
    #[arg(long)]
    pub proposal_lambda: Option<f64>,
    /// Also save the sampled map as JSON.
    #[arg(long)]
    pub save_map: Option<PathBuf>,
    /// CSV with header `index,label,z_0,...`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundArg {
    Distance,
    Kernel,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct DimArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = BoundArg::Distance)]
    pub kind: BoundArg,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// Map file written by `embed --save-map`.
    #[arg(long)]
    pub map: PathBuf,
    /// Graph JSON document.
    #[arg(long)]
    pub g1: PathBuf,
    #[arg(long)]
    pub g2: PathBuf,
}

#[derive(Debug, Args)]
pub struct GramArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// CSV: header `id,<ids>`, then one row per graph.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Empirical failure frequencies of the distance estimate against their
    /// bounds, on one pair of graphs.
    Convergence(ConvergenceArgs),
    /// Classification accuracy against embedding dimension.
    #[command(
        long_about = "Classification accuracy against embedding dimension.\n\n\
        Each repetition draws a fresh map, embeds a fixed train/test split and \
        classifies it. The downstream classifiers are k-nearest neighbours and \
        a closed-form ridge readout; the ridge readout takes the place of a \
        support vector machine as the convex linear classifier."
    )]
    Accuracy(AccuracyArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub g1: PathBuf,
    #[arg(long)]
    pub g2: PathBuf,
    /// Comma-separated embedding dimensions.
    #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024,4096")]
    pub mgrid: Vec<usize>,
    /// Dimension of the reference map standing in for the exact distance.
    #[arg(long, default_value_t = 100_000)]
    pub ref_m: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Tolerance (default: a quarter of the reference squared distance).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClassifierArg {
    /// k-nearest neighbours (Euclidean).
    Knn,
    /// Ridge regression on one-hot targets (stands in for an SVM).
    Ridge,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct AccuracyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "8,16,32,64,128,256,512,1024,2048,4096"
    )]
    pub mgrid: Vec<usize>,
    /// Reference dimension; 0 disables the reference column.
    #[arg(long, default_value_t = 10_000)]
    pub ref_m: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Knn)]
    pub classifier: ClassifierArg,
    /// Neighbours for kNN.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Ridge penalty.
    #[arg(long, default_value_t = 1.0)]
    pub ridge_lambda: f64,
    /// Training fraction.
    #[arg(long, default_value_t = 0.8)]
    pub split: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub dist: DistArgs,
    /// CSV with header `M,mean_accuracy,std_accuracy,ref_mean_accuracy,ref_std_accuracy`.
    #[arg(long)]
    pub out: PathBuf,
}
