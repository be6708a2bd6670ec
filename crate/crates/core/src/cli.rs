//! Command-line front end: synthetic data, training, evaluation, gradient
//! checking and loss-weight ablations.
//!
//! [`run`] parses arguments, writes results to the given sink and returns
//! the process exit code: 0 success, 1 usage, 2 data error, 3 numeric
//! failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bptt::{grad_check_report, random_model, random_sample, GradCheckReport};
use crate::error::{Error, Result};
use crate::eval::{
    cross_pose_matrix, pose_experiment, raw_pose_experiment, resampled_video_accuracy,
    train_pose_model, train_video_model, video_experiment, Metric, VideoProtocol,
};
use crate::format::{FeatureSet, ModelFile, Task};
use crate::model::ParamName;
use crate::optim::{Optimizer, TrainConfig, TrainHistory};
use crate::protocols::{
    synth_pose_dataset, synth_video_dataset, PoseGrid, PoseSynthConfig, SubjectPoseSet,
    VideoSynthConfig, VideoTrack,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Largest relative error `gradcheck` accepts.
pub const GRADCHECK_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "rrnn", version, about = "Recurrent regression network: synthetic data, training and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic feature dataset.
    Synth(SynthArgs),
    /// Train a model on a feature dataset.
    Train(TrainArgs),
    /// Evaluate a trained model.
    Eval(EvalArgs),
    /// Compare analytic and finite-difference gradients on a random instance.
    Gradcheck(GradcheckArgs),
    /// Train and evaluate over a grid of loss weights.
    Ablate(AblateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Pose,
    Video,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Pose => Task::Pose,
            TaskArg::Video => Task::Video,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Split {
    Train,
    Test,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    Cosine,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Cosine => Metric::Cosine,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub kind: TaskArg,
    /// Number of subjects [default: 40 for pose, 10 for video]
    #[arg(long)]
    pub subjects: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    /// Noise standard deviation [default: 0.2 for pose, 0.5 for video]
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Video tracks per subject.
    #[arg(long, default_value_t = 9)]
    pub clips: usize,
    /// Frames per video track.
    #[arg(long, default_value_t = 25)]
    pub frames: usize,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Optimization settings shared by `train` and `ablate`.
#[derive(Debug, Clone, Args)]
pub struct OptimArgs {
    #[arg(long, default_value_t = 64)]
    pub hidden: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 8)]
    pub batch: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    /// SGD momentum.
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,
    /// Uniform initialization scale, relative to 1/sqrt(fan-in).
    #[arg(long, default_value_t = 1.0)]
    pub init_scale: f64,
    /// Worker threads per batch; results depend on the thread count.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Frames per video clip.
    #[arg(long, default_value_t = 10)]
    pub clip_len: usize,
    /// Skip frontal inputs when building pose training samples.
    #[arg(long)]
    pub exclude_frontal: bool,
}

impl OptimArgs {
    pub fn config(&self, alpha: f64, beta: f64) -> TrainConfig {
        TrainConfig {
            alpha,
            beta,
            hidden: self.hidden,
            optimizer: match self.optimizer {
                OptimizerArg::Adam => Optimizer::adam(),
                OptimizerArg::Sgd => Optimizer::sgd(self.momentum),
            },
            learning_rate: self.lr,
            batch_size: self.batch,
            epochs: self.epochs,
            seed: self.seed,
            init_scale: self.init_scale,
            classes: None,
            threads: self.threads,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    pub task: TaskArg,
    #[arg(long)]
    pub data: PathBuf,
    /// Model output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Sequence-statistic weight [default: 0.1 for pose, 0 for video]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Discriminative weight [default: 0 for pose, 1 for video]
    #[arg(long)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub optim: OptimArgs,
    /// Which part of the file to train on. Pose files split subjects in
    /// half by order of appearance, video files split each subject's tracks.
    #[arg(long, value_enum, default_value_t = Split::Train)]
    pub split: Split,
    /// Per-epoch loss CSV output path.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub task: TaskArg,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Split::Test)]
    pub split: Split,
    /// Neighbors for pose matching.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,
    /// Gallery pose angle in degrees.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub gallery_pose: i32,
    /// Evaluate every gallery pose against every probe pose.
    #[arg(long)]
    pub cross_pose: bool,
    /// Random draws of video test tracks.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Video test tracks drawn per subject and trial; all when absent.
    #[arg(long)]
    pub per_subject: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Frames per video clip [default: the model's]
    #[arg(long)]
    pub clip_len: Option<usize>,
    /// Machine-readable record output path.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub hidden: usize,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    /// Sequence length.
    #[arg(long, default_value_t = 4)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    /// Debug: perturb the analytic gradient of one block, e.g. `dW`.
    #[arg(long)]
    pub corrupt: Option<String>,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    pub task: TaskArg,
    #[arg(long)]
    pub data: PathBuf,
    /// Sequence-statistic weights [default: 0,0.1 for pose, 0 for video]
    #[arg(long, value_delimiter = ',')]
    pub alphas: Vec<f64>,
    /// Discriminative weights [default: 0 for pose, 0,1 for video]
    #[arg(long, value_delimiter = ',')]
    pub betas: Vec<f64>,
    #[command(flatten)]
    pub optim: OptimArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub gallery_pose: i32,
    /// Video trials, each with a fresh track split and model.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Video training tracks per subject.
    #[arg(long, default_value_t = 3)]
    pub train_per_subject: usize,
    /// Video test tracks per subject; all remaining when absent.
    #[arg(long)]
    pub test_per_subject: Option<usize>,
}

/// Maps a library error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::NonFinite(_) => EXIT_NUMERIC,
        _ => EXIT_DATA,
    }
}

/// Configures logging from `RRNN_LOG` (`quiet`, `info` or `debug`;
/// warnings only when unset).
pub fn init_logging() {
    let level = match std::env::var("RRNN_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Results go to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = e.print();
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a, out),
        Command::Train(a) => cmd_train(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Gradcheck(a) => cmd_gradcheck(a, out),
        Command::Ablate(a) => cmd_ablate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Builds the synthetic dataset `synth` would write.
pub fn synth_features(a: &SynthArgs) -> Result<FeatureSet> {
    match a.kind {
        TaskArg::Pose => {
            let cfg = PoseSynthConfig::new(a.subjects.unwrap_or(40), a.dim, a.noise.unwrap_or(0.2), a.seed);
            let data = synth_pose_dataset(&cfg)?;
            FeatureSet::from_pose_subjects(a.dim, data.all_subjects())
        }
        TaskArg::Video => {
            let cfg = VideoSynthConfig::new(
                a.subjects.unwrap_or(10),
                a.clips,
                a.frames,
                a.dim,
                a.noise.unwrap_or(0.5),
                a.seed,
            );
            let tracks = synth_video_dataset(&cfg)?;
            FeatureSet::from_video_tracks(a.dim, &tracks)
        }
    }
}

fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<i32> {
    let set = synth_features(a)?;
    match &a.out {
        Some(path) => {
            set.write(path)?;
            log::info!("wrote {} records to {}", set.records.len(), path.display());
        }
        None => emit(out, &set.to_text())?,
    }
    Ok(EXIT_OK)
}

/// Subjects of a pose file: the first `⌈n/2⌉` in order of appearance
/// train, the rest test.
pub fn pose_split(subjects: Vec<SubjectPoseSet>, split: Split) -> Vec<SubjectPoseSet> {
    let mut subjects = subjects;
    let test = subjects.split_off(subjects.len().div_ceil(2));
    match split {
        Split::Train => subjects,
        Split::Test => test,
        Split::All => {
            subjects.extend(test);
            subjects
        }
    }
}

/// Tracks of a video file: per subject, the first `⌈n/2⌉` tracks in order
/// of appearance train, the rest test.
pub fn video_split(tracks: Vec<VideoTrack>, split: Split) -> Vec<VideoTrack> {
    if split == Split::All {
        return tracks;
    }
    let mut totals = std::collections::BTreeMap::<usize, usize>::new();
    for t in &tracks {
        *totals.entry(t.subject_id).or_default() += 1;
    }
    let mut seen = std::collections::BTreeMap::<usize, usize>::new();
    tracks
        .into_iter()
        .filter(|t| {
            let k = seen.entry(t.subject_id).or_default();
            let in_train = *k < totals[&t.subject_id].div_ceil(2);
            *k += 1;
            in_train == (split == Split::Train)
        })
        .collect()
}

fn nonempty<T>(items: Vec<T>, what: &'static str) -> Result<Vec<T>> {
    if items.is_empty() {
        Err(Error::Empty(what))
    } else {
        Ok(items)
    }
}

/// `epoch,f1,f2,f3,total` with shortest round-trip decimals.
pub fn history_csv(history: &TrainHistory) -> String {
    let mut out = String::from("epoch,f1,f2,f3,total\n");
    for (i, l) in history.epochs.iter().enumerate() {
        let _ = writeln!(out, "{},{:?},{:?},{:?},{:?}", i + 1, l.f1, l.f2, l.f3, l.total);
    }
    out
}

/// Trains the model `train` would write.
pub fn train_model(a: &TrainArgs) -> Result<(ModelFile, TrainHistory)> {
    let set = FeatureSet::read(&a.data)?;
    let labels = set.labels();
    let task = Task::from(a.task);
    let (alpha, beta) = match task {
        Task::Pose => (a.alpha.unwrap_or(0.1), a.beta.unwrap_or(0.0)),
        Task::Video => (a.alpha.unwrap_or(0.0), a.beta.unwrap_or(1.0)),
    };
    let mut cfg = a.optim.config(alpha, beta);
    cfg.validate()?;
    let (params, norm, history) = match task {
        Task::Pose => {
            let grid = PoseGrid::standard();
            let subjects = nonempty(pose_split(set.pose_subjects(&grid)?, a.split), "pose training subjects")?;
            train_pose_model(&subjects, &grid, &cfg, !a.optim.exclude_frontal)?
        }
        Task::Video => {
            cfg.classes = Some(labels.len());
            let tracks = nonempty(video_split(set.video_tracks(&labels)?, a.split), "video training tracks")?;
            let refs: Vec<&VideoTrack> = tracks.iter().collect();
            train_video_model(&refs, a.optim.clip_len, &cfg)?
        }
    };
    cfg.classes = Some(params.classes());
    let model = ModelFile {
        task,
        params,
        norm,
        labels,
        config: cfg,
        clip_len: a.optim.clip_len,
        include_frontal: !a.optim.exclude_frontal,
    };
    Ok((model, history))
}

fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> Result<i32> {
    let (model, history) = train_model(a)?;
    let c = &model.config;
    let mut text = format!(
        "task {}  alpha {}  beta {}  optimizer {}  d {}  h {}  c {}\n",
        model.task.as_str(),
        c.alpha,
        c.beta,
        c.optimizer.name(),
        model.params.input_dim(),
        model.params.hidden_dim(),
        model.params.classes()
    );
    let _ = writeln!(text, "{:>6} {:>14} {:>14} {:>14} {:>14}", "epoch", "f1", "f2", "f3", "total");
    for (i, l) in history.epochs.iter().enumerate() {
        let _ = writeln!(
            text,
            "{:>6} {:>14.8} {:>14.8} {:>14.8} {:>14.8}",
            i + 1,
            l.f1,
            l.f2,
            l.f3,
            l.total
        );
    }
    model.write(&a.out)?;
    if let Some(path) = &a.history {
        write_file(path, &history_csv(&history))?;
    }
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn check_task(model: &ModelFile, task: Task) -> Result<()> {
    if model.task != task {
        return Err(Error::InvalidArgument(format!(
            "model was trained for the {} task, not {}",
            model.task.as_str(),
            task.as_str()
        )));
    }
    Ok(())
}

fn check_dims(model: &ModelFile, set: &FeatureSet, path: &Path) -> Result<()> {
    let d = model.params.input_dim();
    if d != set.d {
        return Err(Error::Dataset(format!(
            "model expects d={d} but {} has d={}",
            path.display(),
            set.d
        )));
    }
    Ok(())
}

fn gallery_index(grid: &PoseGrid, angle: i32) -> Result<usize> {
    grid.index_of(angle)
        .ok_or_else(|| Error::InvalidArgument(format!("no pose at {angle}° (grid is -45..45 in 15° steps)")))
}

/// Runs `eval` and returns `(table, records)`.
pub fn evaluate(a: &EvalArgs) -> Result<(String, String)> {
    let model = ModelFile::read(&a.model)?;
    check_task(&model, a.task.into())?;
    let set = FeatureSet::read(&a.data)?;
    check_dims(&model, &set, &a.data)?;
    match a.task {
        TaskArg::Pose => {
            let grid = PoseGrid::standard();
            let subjects = nonempty(pose_split(set.pose_subjects(&grid)?, a.split), "pose evaluation subjects")?;
            let metric = a.metric.into();
            if a.cross_pose {
                let m = cross_pose_matrix(&model.params, &model.norm, &subjects, &grid, a.k, metric)?;
                Ok((m.render_table(&grid), m.records(&grid)))
            } else {
                let g = gallery_index(&grid, a.gallery_pose)?;
                let r = pose_experiment(&model.params, &model.norm, &subjects, &grid, g, a.k, metric)?;
                let title = format!("RRNN {}", grid.label(g));
                Ok((r.render_table(&grid, &title), r.records(&grid)))
            }
        }
        TaskArg::Video => {
            let tracks = nonempty(video_split(set.video_tracks(&model.labels)?, a.split), "video evaluation tracks")?;
            let clip_len = a.clip_len.unwrap_or(model.clip_len);
            let r = resampled_video_accuracy(
                &tracks,
                &model.params,
                &model.norm,
                clip_len,
                a.per_subject,
                a.trials,
                a.seed,
            )?;
            Ok((r.render_table("RRNN"), r.records()))
        }
    }
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let (table, records) = evaluate(a)?;
    if let Some(path) = &a.records {
        write_file(path, &records)?;
    }
    emit(out, &table)?;
    Ok(EXIT_OK)
}

/// Loss-weight grid of the gradient check.
pub const GRADCHECK_WEIGHTS: [f64; 3] = [0.0, 0.1, 1.0];

/// Gradient check of one random instance over every `(α, β)` pair.
#[derive(Debug, Clone)]
pub struct GradcheckSummary {
    pub cells: Vec<((f64, f64), GradCheckReport)>,
}

impl GradcheckSummary {
    /// The cell with the largest relative error.
    pub fn worst(&self) -> &((f64, f64), GradCheckReport) {
        self.cells
            .iter()
            .fold(&self.cells[0], |w, c| if c.1.max_rel_error > w.1.max_rel_error { c } else { w })
    }

    pub fn max_rel_error(&self) -> f64 {
        self.worst().1.max_rel_error
    }
}

/// Checks a seeded random model and sample of the given dimensions. Pairs
/// with `β > 0` are skipped when `classes == 0`.
pub fn gradcheck_grid(
    d: usize,
    h: usize,
    classes: usize,
    length: usize,
    seed: u64,
    step: f64,
    corrupt: Option<ParamName>,
) -> Result<GradcheckSummary> {
    if d == 0 || h == 0 || length == 0 {
        return Err(Error::InvalidArgument("dimensions and length must be >= 1".into()));
    }
    let p = random_model(d, h, classes, seed);
    let sample = random_sample(d, classes, length, seed.wrapping_add(1));
    let mut cells = Vec::new();
    for alpha in GRADCHECK_WEIGHTS {
        for beta in GRADCHECK_WEIGHTS {
            if beta > 0.0 && classes == 0 {
                continue;
            }
            let report = grad_check_report(&sample, &p, alpha, beta, step, corrupt)?;
            cells.push(((alpha, beta), report));
        }
    }
    Ok(GradcheckSummary { cells })
}

fn cmd_gradcheck(a: &GradcheckArgs, out: &mut dyn Write) -> Result<i32> {
    let corrupt = match &a.corrupt {
        Some(name) => Some(
            ParamName::parse(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown parameter block {name:?}")))?,
        ),
        None => None,
    };
    let summary = gradcheck_grid(a.dim, a.hidden, a.classes, a.length, a.seed, a.step, corrupt)?;
    let mut text = format!(
        "d={} h={} c={} T={} seed={} step={:e}\n",
        a.dim, a.hidden, a.classes, a.length, a.seed, a.step
    );
    let _ = writeln!(text, "{:>6} {:>6} {:>14} {:>8}", "alpha", "beta", "max rel err", "worst");
    for ((alpha, beta), r) in &summary.cells {
        let worst = r.worst.map_or("-".to_string(), |(n, i)| format!("d{n}[{i}]"));
        let _ = writeln!(text, "{alpha:>6} {beta:>6} {:>14.3e} {worst:>8}", r.max_rel_error);
    }
    let ((alpha, beta), r) = summary.worst();
    let name = r.worst.map_or("-".to_string(), |(n, _)| format!("d{n}"));
    let _ = writeln!(
        text,
        "max relative error {:.3e} at alpha={alpha} beta={beta} in {name} (analytic {:.6e}, numeric {:.6e})",
        r.max_rel_error, r.worst_analytic, r.worst_numeric
    );
    let passed = r.max_rel_error <= GRADCHECK_TOLERANCE;
    let _ = writeln!(text, "{}", if passed { "PASS" } else { "FAIL" });
    emit(out, &text)?;
    Ok(if passed { EXIT_OK } else { EXIT_NUMERIC })
}

/// One row of an ablation table. Weights are `None` for the raw-feature
/// baseline; `std` is present for multi-trial video rows.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub accuracy: f64,
    pub std: Option<f64>,
}

impl AblationRow {
    pub fn setting(&self) -> String {
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) => format!("alpha={a} beta={b}"),
            _ => "raw features".to_string(),
        }
    }
}

pub fn render_ablation(rows: &[AblationRow]) -> String {
    let mut out = format!("{:<22}{:>10}{:>8}\n", "Setting", "Accuracy", "Std");
    for r in rows {
        let std = r.std.map_or("-".to_string(), |s| format!("{:.1}", 100.0 * s));
        let _ = writeln!(out, "{:<22}{:>9.1}%{std:>8}", r.setting(), 100.0 * r.accuracy);
    }
    out
}

/// Pose ablation: the raw-feature baseline, then one model per `(α, β)`
/// trained on `train` and scored on `test` (average probe accuracy).
/// Every cell uses the seed in `base`.
#[allow(clippy::too_many_arguments)]
pub fn ablate_pose(
    train: &[SubjectPoseSet],
    test: &[SubjectPoseSet],
    grid: &PoseGrid,
    base: &TrainConfig,
    weights: &[(f64, f64)],
    include_frontal: bool,
    gallery_pose: usize,
    k: usize,
    metric: Metric,
) -> Result<Vec<AblationRow>> {
    let raw = raw_pose_experiment(test, grid, gallery_pose, k, metric)?;
    let mut rows = vec![AblationRow {
        alpha: None,
        beta: None,
        accuracy: raw.average,
        std: None,
    }];
    for &(alpha, beta) in weights {
        let cfg = TrainConfig {
            alpha,
            beta,
            ..base.clone()
        };
        let (model, norm, _) = train_pose_model(train, grid, &cfg, include_frontal)?;
        let r = pose_experiment(&model, &norm, test, grid, gallery_pose, k, metric)?;
        log::info!("alpha {alpha} beta {beta}: average {:.4}", r.average);
        rows.push(AblationRow {
            alpha: Some(alpha),
            beta: Some(beta),
            accuracy: r.average,
            std: None,
        });
    }
    Ok(rows)
}

/// Video ablation: per `(α, β)`, the trial mean and std of
/// [`video_experiment`], all cells with the seed in `base`.
pub fn ablate_video(
    tracks: &[VideoTrack],
    protocol: &VideoProtocol,
    base: &TrainConfig,
    weights: &[(f64, f64)],
    trials: usize,
) -> Result<Vec<AblationRow>> {
    weights
        .iter()
        .map(|&(alpha, beta)| {
            let cfg = TrainConfig {
                alpha,
                beta,
                ..base.clone()
            };
            let r = video_experiment(tracks, protocol, &cfg, trials, base.seed)?;
            Ok(AblationRow {
                alpha: Some(alpha),
                beta: Some(beta),
                accuracy: r.mean,
                std: Some(r.std),
            })
        })
        .collect()
}

fn weight_grid(a: &AblateArgs) -> Vec<(f64, f64)> {
    let (default_alphas, default_betas): (&[f64], &[f64]) = match a.task {
        TaskArg::Pose => (&[0.0, 0.1], &[0.0]),
        TaskArg::Video => (&[0.0], &[0.0, 1.0]),
    };
    let alphas = if a.alphas.is_empty() { default_alphas } else { &a.alphas };
    let betas = if a.betas.is_empty() { default_betas } else { &a.betas };
    alphas
        .iter()
        .flat_map(|&al| betas.iter().map(move |&b| (al, b)))
        .collect()
}

fn cmd_ablate(a: &AblateArgs, out: &mut dyn Write) -> Result<i32> {
    let set = FeatureSet::read(&a.data)?;
    let weights = weight_grid(a);
    let base = a.optim.config(0.0, 0.0);
    base.validate()?;
    let rows = match a.task {
        TaskArg::Pose => {
            let grid = PoseGrid::standard();
            let subjects = set.pose_subjects(&grid)?;
            let train = nonempty(pose_split(subjects.clone(), Split::Train), "pose training subjects")?;
            let test = nonempty(pose_split(subjects, Split::Test), "pose evaluation subjects")?;
            let g = gallery_index(&grid, a.gallery_pose)?;
            ablate_pose(
                &train,
                &test,
                &grid,
                &base,
                &weights,
                !a.optim.exclude_frontal,
                g,
                a.k,
                a.metric.into(),
            )?
        }
        TaskArg::Video => {
            let tracks = set.video_tracks(&set.labels())?;
            let protocol = VideoProtocol {
                clip_len: a.optim.clip_len,
                train_per_subject: a.train_per_subject,
                test_per_subject: a.test_per_subject,
            };
            ablate_video(&tracks, &protocol, &base, &weights, a.trials)?
        }
    };
    emit(out, &render_ablation(&rows))?;
    Ok(EXIT_OK)
}
