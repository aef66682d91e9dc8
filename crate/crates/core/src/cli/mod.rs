//! The `taxreorg` command line. Every text output starts with a
//! `# taxreorg <version> <subcommand> <flags>` line; binary containers carry
//! the same line as their provenance string. Files are written to a temporary
//! file in the destination directory and renamed into place.

mod args;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;

use crate::encoding::{
    average_pool, chi2_kernel, decode_codebook, decode_model, default_gamma, encode_codebook,
    encode_model, kmeans_fit, svm_score, train_kernel_svm, vlad_encode, FeatureTable, FrameMatrix,
    GramMatrix, KernelConfig, Normalized, StoredModel,
};
use crate::error::Error;
use crate::evaluation::{
    late_fuse, mean_average_precision, parse_labels, parse_scores, write_eval_report, write_scores,
    EventRun, Labels,
};
use crate::labelmap::LabelMap;
use crate::reorg::{
    bottom_up_pipeline, expand_train_list, parse_image_lists, BottomUpPreset, ReorgConfig,
    SubsamplePlan,
};
use crate::taxonomy::{
    build_taxonomy, parse_counts, parse_isa_edges, parse_names, stats, Taxonomy,
};
use crate::topdown::{top_down_pipeline, TopDownConfig};

use args::*;
pub use args::{Cli, CodebookVideos, Command, FrameFormat, Preset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_input_error() => EXIT_INPUT,
            CliError::Core(_) => EXIT_CONTRACT,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    let header = provenance_header(&argv);

    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, &header)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli.command, &header),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            log::error!("{e}");
            e.exit_code()
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// The header names the tool version and every flag except `--threads`
/// (which never changes outputs) and verbosity.
fn provenance_header(argv: &[OsString]) -> String {
    let mut parts = vec![format!("taxreorg {}", env!("CARGO_PKG_VERSION"))];
    let mut rest = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned());
    while let Some(arg) = rest.next() {
        if arg == "--threads" {
            rest.next();
            continue;
        }
        let short_verbose =
            arg.len() > 1 && arg.starts_with('-') && arg[1..].bytes().all(|b| b == b'v');
        if arg.starts_with("--threads=") || arg == "--verbose" || short_verbose {
            continue;
        }
        parts.push(arg);
    }
    parts.join(" ")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_text(path: &Path, header: &str, body: &str) -> CliResult<()> {
    let mut text = format!("# {header}\n");
    text.push_str(body);
    write_atomic(path, text.as_bytes())
}

fn write_text_or_stdout(path: Option<&Path>, header: &str, body: &str) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, header, body),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| {
        CliError::Core(Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )))
    })
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| {
        CliError::Core(Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )))
    })
}

fn load_taxonomy(meta: &MetaArgs) -> CliResult<Taxonomy> {
    let edges = parse_isa_edges(&read_text(&meta.isa)?)?;
    if edges.duplicates > 0 {
        log::warn!("{} duplicate is_a edges ignored", edges.duplicates);
    }
    let counts = parse_counts(&read_text(&meta.counts)?)?;
    let names = match &meta.words {
        Some(p) => parse_names(&read_text(p)?)?,
        None => BTreeMap::new(),
    };
    let taxonomy = build_taxonomy(&edges.edges, &counts, &names)?;
    if !taxonomy.dropped_edges().is_empty() {
        log::info!(
            "{} extra parent edges dropped",
            taxonomy.dropped_edges().len()
        );
    }
    Ok(taxonomy)
}

fn dispatch(command: &Command, header: &str) -> CliResult<()> {
    match command {
        Command::Validate(a) => cmd_validate(a),
        Command::Stats(a) => cmd_stats(a, header),
        Command::ReorgBottomup(a) => cmd_bottomup(a, header),
        Command::ReorgTopdown(a) => cmd_topdown(a, header),
        Command::ExportTrainlist(a) => cmd_trainlist(a, header),
        Command::Pool(a) => cmd_pool(a, header),
        Command::Vlad(a) => cmd_vlad(a, header),
        Command::Kernel(a) => cmd_kernel(a, header),
        Command::TrainSvm(a) => cmd_train_svm(a, header),
        Command::Score(a) => cmd_score(a, header),
        Command::Fuse(a) => cmd_fuse(a, header),
        Command::Eval(a) => cmd_eval(a, header),
    }
}

fn cmd_validate(a: &MetaArgs) -> CliResult<()> {
    let t = load_taxonomy(a)?;
    t.validate()?;
    println!(
        "ok\tnodes={}\troot={}\tsynthetic_root={}\tdropped_edges={}\tattached_orphans={}",
        t.len(),
        t.root_id(),
        t.has_synthetic_root(),
        t.dropped_edges().len(),
        t.attached_orphans().len()
    );
    Ok(())
}

fn cmd_stats(a: &StatsArgs, header: &str) -> CliResult<()> {
    let t = load_taxonomy(&a.meta)?;
    write_text_or_stdout(a.out.as_deref(), header, &stats(&t).to_text())
}

fn bottomup_config(a: &BottomUpArgs) -> CliResult<ReorgConfig> {
    let base = match a.preset {
        Some(Preset::Bottomup4k) => Some(BottomUpPreset::Classes4k.config(a.seed)),
        Some(Preset::Bottomup8k) => Some(BottomUpPreset::Classes8k.config(a.seed)),
        Some(Preset::Bottomup13k) => Some(BottomUpPreset::Classes13k.config(a.seed)),
        Some(Preset::Topdown4k) => {
            return Err(CliError::Usage(
                "preset topdown-4k belongs to reorg-topdown".into(),
            ))
        }
        None => None,
    };
    let pick = |flag: Option<u64>, preset: Option<u64>, name: &str| {
        flag.or(preset)
            .ok_or_else(|| CliError::Usage(format!("--{name} is required without --preset")))
    };
    let config = ReorgConfig {
        bind_threshold: pick(a.tb, base.map(|c| c.bind_threshold), "tb")?,
        promote_threshold: pick(a.tp, base.map(|c| c.promote_threshold), "tp")?,
        subsample_cap: pick(a.ts, base.map(|c| c.subsample_cap), "ts")?,
        seed: a.seed,
    };
    config.validate()?;
    Ok(config)
}

fn cmd_bottomup(a: &BottomUpArgs, header: &str) -> CliResult<()> {
    let config = bottomup_config(a)?;
    let t = load_taxonomy(&a.meta)?;
    let result = bottom_up_pipeline(&t, &config)?;
    log::info!(
        "{} classes, {} unassigned synsets",
        result.label_map.len(),
        result.label_map.unassigned.len()
    );
    write_text(&a.out, header, &result.label_map.to_text())?;
    if let Some(p) = &a.plan {
        write_text(p, header, &result.plan.to_text())?;
    }
    if let Some(p) = &a.log {
        write_text(p, header, &result.log.to_text())?;
    }
    Ok(())
}

fn topdown_config(a: &TopDownArgs) -> CliResult<TopDownConfig> {
    let base = match a.preset {
        Some(Preset::Topdown4k) => Some(TopDownConfig::PRESET_4K),
        Some(_) => {
            return Err(CliError::Usage(
                "bottom-up presets belong to reorg-bottomup".into(),
            ))
        }
        None => None,
    };
    let config = TopDownConfig {
        min_images: a
            .tt
            .or(base.map(|c| c.min_images))
            .ok_or_else(|| CliError::Usage("--tt is required without --preset".into()))?,
        budget: a
            .budget
            .or(base.map(|c| c.budget))
            .ok_or_else(|| CliError::Usage("--budget is required without --preset".into()))?,
    };
    config.validate()?;
    Ok(config)
}

fn cmd_topdown(a: &TopDownArgs, header: &str) -> CliResult<()> {
    let config = topdown_config(a)?;
    let t = load_taxonomy(&a.meta)?;
    let (selection, label_map) = top_down_pipeline(&t, &config)?;
    for (id, n) in &selection.warnings {
        log::warn!("selected class {id} keeps only {n} images");
    }
    log::info!("{} classes selected", label_map.len());
    write_text(&a.out, header, &label_map.to_text())
}

fn cmd_trainlist(a: &TrainListArgs, header: &str) -> CliResult<()> {
    let label_map = LabelMap::from_text(&read_text(&a.labelmap)?)?;
    let plan = SubsamplePlan::from_text(&read_text(&a.plan)?)?;
    let images = parse_image_lists(&read_text(&a.images)?)?;
    let rows = expand_train_list(&label_map, &plan, &images)?;
    let mut body = String::new();
    for (image, class) in rows {
        body.push_str(&format!("{image}\t{class}\n"));
    }
    write_text(&a.out, header, &body)
}

fn frame_format(path: &Path, forced: Option<FrameFormat>) -> FrameFormat {
    forced.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("bin") => FrameFormat::Bin,
        _ => FrameFormat::Csv,
    })
}

/// Expands directories and returns `(video_id, path)` sorted by id.
fn frame_files(a: &FrameArgs) -> CliResult<Vec<(String, PathBuf)>> {
    let mut files = Vec::new();
    for p in &a.frames {
        if p.is_dir() {
            for entry in fs::read_dir(p)? {
                let path = entry?.path();
                let ext = path.extension().and_then(|e| e.to_str());
                if path.is_file() && matches!(ext, Some("csv") | Some("bin")) {
                    files.push(path);
                }
            }
        } else {
            files.push(p.clone());
        }
    }
    let mut named: Vec<(String, PathBuf)> = files
        .into_iter()
        .map(|p| {
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            (id, p)
        })
        .collect();
    named.sort();
    if let Some(w) = named.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Format(format!("two frame files for video `{}`", w[0].0)).into());
    }
    Ok(named)
}

fn load_frames(a: &FrameArgs) -> CliResult<Vec<(String, FrameMatrix)>> {
    frame_files(a)?
        .into_iter()
        .map(|(id, path)| {
            let frames = match frame_format(&path, a.format) {
                FrameFormat::Csv => FrameMatrix::from_csv(&read_text(&path)?),
                FrameFormat::Bin => FrameMatrix::from_bin(&read_bytes(&path)?),
            }
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            Ok((id, frames))
        })
        .collect()
}

fn feature_table(ids: Vec<String>, encoded: Vec<Normalized>) -> CliResult<FeatureTable> {
    for (id, n) in ids.iter().zip(&encoded) {
        if n.degenerate {
            log::warn!("video {id}: zero vector, left unnormalized");
        }
    }
    Ok(FeatureTable::new(
        ids,
        encoded.into_iter().map(|n| n.values).collect(),
    )?)
}

fn cmd_pool(a: &PoolArgs, header: &str) -> CliResult<()> {
    let videos = load_frames(&a.frames)?;
    let encoded = videos
        .par_iter()
        .map(|(_, f)| average_pool(f))
        .collect::<crate::Result<Vec<_>>>()?;
    let ids = videos.into_iter().map(|(id, _)| id).collect();
    write_text(&a.out, header, &feature_table(ids, encoded)?.to_csv())
}

fn cmd_vlad(a: &VladArgs, header: &str) -> CliResult<()> {
    let videos = load_frames(&a.frames)?;
    let codebook = match &a.codebook {
        Some(p) => {
            let (cb, prov) = decode_codebook(&read_bytes(p)?)?;
            log::info!("codebook from: {prov}");
            cb
        }
        None => {
            let positives: Option<Labels> = match (&a.labels, a.codebook_videos) {
                (_, CodebookVideos::All) => None,
                (Some(p), CodebookVideos::Positives) => Some(parse_labels(&read_text(p)?)?),
                (None, CodebookVideos::Positives) => {
                    return Err(CliError::Usage(
                        "fitting on positives needs --labels (or --codebook-videos all)".into(),
                    ))
                }
            };
            let training: Vec<Vec<f64>> = videos
                .iter()
                .filter(|(id, _)| {
                    positives
                        .as_ref()
                        .is_none_or(|l| l.get(id).copied().unwrap_or(false))
                })
                .flat_map(|(_, f)| f.rows().map(<[f64]>::to_vec))
                .collect();
            if training.is_empty() {
                return Err(Error::contract("no frames available for codebook fitting").into());
            }
            let cb = kmeans_fit(&training, a.k, a.seed)?;
            if let Some(p) = &a.codebook_out {
                write_atomic(p, &encode_codebook(&cb, header))?;
            }
            cb
        }
    };
    let encoded = videos
        .par_iter()
        .map(|(_, f)| vlad_encode(f, &codebook))
        .collect::<crate::Result<Vec<_>>>()?;
    let ids = videos.into_iter().map(|(id, _)| id).collect();
    write_text(&a.out, header, &feature_table(ids, encoded)?.to_csv())
}

fn cmd_kernel(a: &KernelArgs, header: &str) -> CliResult<()> {
    let rows = FeatureTable::from_csv(&read_text(&a.rows)?)?;
    let cols = match &a.cols {
        Some(p) => FeatureTable::from_csv(&read_text(p)?)?,
        None => rows.clone(),
    };
    let gamma = match a.gamma {
        Some(g) => g,
        None => default_gamma(&cols.rows, a.epsilon)?,
    };
    let config = KernelConfig::new(gamma, a.epsilon)?;
    let values = chi2_kernel(&rows.rows, &cols.rows, &config)?;
    let gram = GramMatrix {
        row_ids: rows.ids,
        col_ids: cols.ids,
        values,
        gamma,
        epsilon: a.epsilon,
    };
    write_text(&a.out, header, &gram.to_csv())
}

fn cmd_train_svm(a: &TrainSvmArgs, header: &str) -> CliResult<()> {
    let gram = GramMatrix::from_csv(&read_text(&a.gram)?)?;
    if gram.row_ids != gram.col_ids {
        return Err(
            Error::contract("training Gram matrix must have identical row and column ids").into(),
        );
    }
    let labels = parse_labels(&read_text(&a.labels)?)?;
    let y: Vec<f64> = gram
        .row_ids
        .iter()
        .map(|id| {
            if labels.get(id).copied().unwrap_or(false) {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    let model = train_kernel_svm(&gram.values, &y, a.c)?;
    log::info!(
        "{} support vectors, kkt violation {:.3e}, {} iterations",
        model.support_count(),
        model.kkt_violation,
        model.iterations
    );
    let stored = StoredModel {
        model,
        train_ids: gram.row_ids,
    };
    write_atomic(&a.out, &encode_model(&stored, header))
}

fn cmd_score(a: &ScoreArgs, header: &str) -> CliResult<()> {
    let (stored, _) = decode_model(&read_bytes(&a.model)?)?;
    let gram = GramMatrix::from_csv(&read_text(&a.gram)?)?;
    if gram.col_ids != stored.train_ids {
        return Err(
            Error::contract("Gram columns do not match the model's training videos").into(),
        );
    }
    let scores = gram
        .values
        .par_iter()
        .map(|row| svm_score(&stored.model, std::slice::from_ref(row)).map(|s| s[0]))
        .collect::<crate::Result<Vec<f64>>>()?;
    let list = crate::evaluation::ScoredList::new(gram.row_ids.into_iter().zip(scores).collect())?;
    write_text(&a.out, header, &write_scores(&list))
}

fn cmd_fuse(a: &FuseArgs, header: &str) -> CliResult<()> {
    let lists = a
        .scores
        .iter()
        .map(|p| Ok(parse_scores(&read_text(p)?)?))
        .collect::<CliResult<Vec<_>>>()?;
    let fused = late_fuse(&lists, !a.no_normalize)?;
    write_text(&a.out, header, &write_scores(&fused))
}

fn cmd_eval(a: &EvalArgs, header: &str) -> CliResult<()> {
    if a.scores.len() != a.labels.len() {
        return Err(CliError::Usage(format!(
            "{} --scores files but {} --labels files",
            a.scores.len(),
            a.labels.len()
        )));
    }
    let runs = a
        .scores
        .iter()
        .zip(&a.labels)
        .map(|(s, l)| {
            Ok(EventRun {
                event: s
                    .file_stem()
                    .map(|x| x.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                scores: parse_scores(&read_text(s)?)?,
                labels: parse_labels(&read_text(l)?)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let result = mean_average_precision(&runs)?;
    write_text_or_stdout(a.out.as_deref(), header, &write_eval_report(&result))
}
