use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "taxreorg",
    version,
    about = "Taxonomy reorganization and video event pipeline"
)]
pub struct Cli {
    /// Worker threads for pool, vlad, kernel and score. Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and canonicalize the metadata, report what was fixed up.
    Validate(MetaArgs),
    /// Key/value statistics of the canonical tree.
    Stats(StatsArgs),
    /// Roll, bind, promote and subsample.
    ReorgBottomup(BottomUpArgs),
    /// Breadth-first selection of classes above a size threshold.
    ReorgTopdown(TopDownArgs),
    /// Write the subsampled `image_id<TAB>class_id` training list.
    ExportTrainlist(TrainListArgs),
    /// Average-pooled, l1-normalized video features.
    Pool(PoolArgs),
    /// VLAD video features over a k-means codebook.
    Vlad(VladArgs),
    /// Exponential chi-squared Gram matrix.
    Kernel(KernelArgs),
    /// Train a kernel SVM on a square Gram matrix.
    TrainSvm(TrainSvmArgs),
    /// Score videos with a trained SVM.
    Score(ScoreArgs),
    /// Late fusion of score lists.
    Fuse(FuseArgs),
    /// Average precision per event and their mean.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    /// `parent<TAB>child` edges.
    #[arg(long)]
    pub isa: PathBuf,
    /// `synset<TAB>count` direct image counts.
    #[arg(long)]
    pub counts: PathBuf,
    /// `synset<TAB>name`.
    #[arg(long)]
    pub words: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub meta: MetaArgs,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "bottomup-4k")]
    Bottomup4k,
    #[value(name = "bottomup-8k")]
    Bottomup8k,
    #[value(name = "bottomup-13k")]
    Bottomup13k,
    #[value(name = "topdown-4k")]
    Topdown4k,
}

#[derive(Debug, Args)]
pub struct BottomUpArgs {
    #[command(flatten)]
    pub meta: MetaArgs,
    /// Explicit threshold flags override the preset.
    #[arg(long)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub tb: Option<u64>,
    #[arg(long)]
    pub tp: Option<u64>,
    #[arg(long)]
    pub ts: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the subsample plan.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Also write the merge log.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TopDownArgs {
    #[command(flatten)]
    pub meta: MetaArgs,
    #[arg(long)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub tt: Option<u64>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Accepted for a uniform interface; selection uses no randomness.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainListArgs {
    #[arg(long)]
    pub labelmap: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    /// `synset<TAB>image_id` lines.
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameFormat {
    Csv,
    Bin,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    /// Frame files, one per video (id = file stem), or directories of them.
    #[arg(long, required = true, num_args = 1..)]
    pub frames: Vec<PathBuf>,
    /// Frame file format; by default taken from the extension.
    #[arg(long)]
    pub format: Option<FrameFormat>,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[command(flatten)]
    pub frames: FrameArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodebookVideos {
    All,
    Positives,
}

#[derive(Debug, Args)]
pub struct VladArgs {
    #[command(flatten)]
    pub frames: FrameArgs,
    /// Existing codebook; otherwise one is fit on the input frames.
    #[arg(long, conflicts_with_all = ["k", "codebook_out"])]
    pub codebook: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to save a freshly fit codebook.
    #[arg(long)]
    pub codebook_out: Option<PathBuf>,
    /// Which videos feed codebook fitting.
    #[arg(long, value_enum, default_value_t = CodebookVideos::Positives)]
    pub codebook_videos: CodebookVideos,
    /// `video_id,label` file selecting the positives.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Feature table for the rows.
    #[arg(long)]
    pub rows: PathBuf,
    /// Feature table for the columns (the training videos). Defaults to the rows.
    #[arg(long)]
    pub cols: Option<PathBuf>,
    /// Defaults to 1 / mean pairwise chi-squared distance among the columns.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = crate::encoding::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainSvmArgs {
    /// Square training Gram matrix.
    #[arg(long)]
    pub gram: PathBuf,
    /// `video_id,label`; unlisted videos are negatives.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value_t = crate::encoding::DEFAULT_C)]
    pub c: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Gram matrix of test rows against the model's training columns.
    #[arg(long)]
    pub gram: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub scores: Vec<PathBuf>,
    /// Average raw scores instead of min-max normalized ones.
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// One score file per event (event = file stem).
    #[arg(long, required = true, num_args = 1..)]
    pub scores: Vec<PathBuf>,
    /// Label files, paired with `--scores` in order.
    #[arg(long, required = true, num_args = 1..)]
    pub labels: Vec<PathBuf>,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
