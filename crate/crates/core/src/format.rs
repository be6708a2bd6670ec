//! Text formats: feature datasets and trained model files.
//!
//! A feature file starts with `rrnn-features v1 d=<d>` and holds one record
//! per line, `<sample_id> <subject_label> <tag> <d decimals>`. The tag is a
//! pose index for still-image datasets and a frame ordinal for video.
//!
//! Model files store every real with 17 significant digits, so a
//! save/load roundtrip is bit-exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::model::{Head, ModelParams};
use crate::optim::{Optimizer, TrainConfig};
use crate::protocols::{Normalizer, PoseGrid, SubjectPoseSet, VideoTrack};

pub const FEATURES_HEADER: &str = "rrnn-features v1";
pub const MODEL_HEADER: &str = "rrnn-model v1";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub sample_id: String,
    pub subject: String,
    pub tag: usize,
    pub feature: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub d: usize,
    pub records: Vec<FeatureRecord>,
}

fn check_token(kind: &str, s: &str) -> Result<()> {
    if s.is_empty() || s.chars().any(|c| c.is_whitespace() || !c.is_ascii()) {
        return Err(Error::InvalidArgument(format!(
            "{kind} must be non-empty ASCII without whitespace, got {s:?}"
        )));
    }
    Ok(())
}

fn subject_label(id: usize, width: usize) -> String {
    format!("s{id:0width$}")
}

fn label_width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len().max(3)
}

impl FeatureSet {
    pub fn new(d: usize) -> Self {
        FeatureSet { d, records: Vec::new() }
    }

    pub fn push(&mut self, record: FeatureRecord) -> Result<()> {
        check_token("sample id", &record.sample_id)?;
        check_token("subject label", &record.subject)?;
        if record.feature.len() != self.d {
            return Err(Error::shape(
                "feature record",
                format!("d={}", self.d),
                format!("[{}]", record.feature.len()),
            ));
        }
        if !record.feature.is_finite() {
            return Err(Error::NonFinite("feature record"));
        }
        self.records.push(record);
        Ok(())
    }

    /// One record per (subject, pose) image, subjects in the given order.
    pub fn from_pose_subjects<'a, I>(d: usize, subjects: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a SubjectPoseSet>,
    {
        let subjects: Vec<&SubjectPoseSet> = subjects.into_iter().collect();
        let width = label_width(subjects.iter().map(|s| s.subject_id + 1).max().unwrap_or(0));
        let mut set = FeatureSet::new(d);
        for s in subjects {
            let subject = subject_label(s.subject_id, width);
            for (&pose, f) in &s.features {
                set.push(FeatureRecord {
                    sample_id: format!("{subject}-p{pose}"),
                    subject: subject.clone(),
                    tag: pose,
                    feature: f.clone(),
                })?;
            }
        }
        Ok(set)
    }

    /// One record per frame; the sample id names the track.
    pub fn from_video_tracks(d: usize, tracks: &[VideoTrack]) -> Result<Self> {
        let width = label_width(tracks.iter().map(|t| t.subject_id + 1).max().unwrap_or(0));
        let track_width = label_width(tracks.len());
        let mut set = FeatureSet::new(d);
        for (i, t) in tracks.iter().enumerate() {
            let subject = subject_label(t.subject_id, width);
            for (frame, f) in t.frames.iter().enumerate() {
                set.push(FeatureRecord {
                    sample_id: format!("t{i:0track_width$}"),
                    subject: subject.clone(),
                    tag: frame,
                    feature: f.clone(),
                })?;
            }
        }
        Ok(set)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{FEATURES_HEADER} d={}\n", self.d);
        for r in &self.records {
            let _ = write!(out, "{} {} {}", r.sample_id, r.subject, r.tag);
            for x in r.feature.iter() {
                let _ = write!(out, " {x:?}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text format. Blank lines are skipped; any malformed line
    /// fails the whole parse with its 1-based line number.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let d = header
            .strip_prefix(FEATURES_HEADER)
            .and_then(|rest| rest.trim().strip_prefix("d="))
            .ok_or_else(|| err(1, format!("expected header `{FEATURES_HEADER} d=<d>`")))?
            .parse::<usize>()
            .map_err(|e| err(1, format!("bad dimension: {e}")))?;
        if d == 0 {
            return Err(err(1, "dimension must be >= 1".into()));
        }

        let mut set = FeatureSet::new(d);
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != d + 3 {
                return Err(err(
                    n,
                    format!("expected {} fields (id, subject, tag, {d} values), found {}", d + 3, fields.len()),
                ));
            }
            let tag = fields[2]
                .parse::<usize>()
                .map_err(|e| err(n, format!("bad tag {:?}: {e}", fields[2])))?;
            let mut values = Vec::with_capacity(d);
            for v in &fields[3..] {
                let x = v
                    .parse::<f64>()
                    .map_err(|e| err(n, format!("bad value {v:?}: {e}")))?;
                if !x.is_finite() {
                    return Err(err(n, format!("non-finite value {v:?}")));
                }
                values.push(x);
            }
            set.push(FeatureRecord {
                sample_id: fields[0].to_string(),
                subject: fields[1].to_string(),
                tag,
                feature: Vector::from(values),
            })
            .map_err(|e| err(n, e.to_string()))?;
        }
        if set.records.is_empty() {
            return Err(err(1, "no records".into()));
        }
        Ok(set)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    /// Distinct subject labels, sorted. A label's position is its class index.
    pub fn labels(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.records.iter().map(|r| r.subject.as_str()).collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// Groups records into subjects, in order of first appearance. Subject
    /// ids index into [`FeatureSet::labels`].
    pub fn pose_subjects(&self, grid: &PoseGrid) -> Result<Vec<SubjectPoseSet>> {
        let labels = self.labels();
        let index = label_index(&labels);
        let mut order: Vec<usize> = Vec::new();
        let mut by: BTreeMap<usize, SubjectPoseSet> = BTreeMap::new();
        for r in &self.records {
            if grid.check(r.tag).is_err() {
                return Err(Error::Dataset(format!(
                    "sample {}: pose index {} outside 0..{}",
                    r.sample_id,
                    r.tag,
                    grid.len()
                )));
            }
            let id = index[r.subject.as_str()];
            let set = by.entry(id).or_insert_with(|| {
                order.push(id);
                SubjectPoseSet {
                    subject_id: id,
                    features: BTreeMap::new(),
                }
            });
            if set.features.insert(r.tag, r.feature.clone()).is_some() {
                return Err(Error::Dataset(format!(
                    "subject {} has more than one image at pose {}",
                    r.subject,
                    grid.label(r.tag)
                )));
            }
        }
        Ok(order.into_iter().map(|id| by.remove(&id).expect("recorded")).collect())
    }

    /// Groups frames into tracks by sample id, in order of first appearance,
    /// frames sorted by ordinal. Subject ids index into `labels`, which
    /// must contain every subject of the file.
    pub fn video_tracks(&self, labels: &[String]) -> Result<Vec<VideoTrack>> {
        let index = label_index(labels);
        let mut order: Vec<&str> = Vec::new();
        let mut by: BTreeMap<&str, (usize, &str, Vec<(usize, &Vector)>)> = BTreeMap::new();
        for r in &self.records {
            let id = *index.get(r.subject.as_str()).ok_or_else(|| {
                Error::Dataset(format!("subject label {} is not known to the model", r.subject))
            })?;
            let entry = by.entry(r.sample_id.as_str()).or_insert_with(|| {
                order.push(r.sample_id.as_str());
                (id, r.subject.as_str(), Vec::new())
            });
            if entry.1 != r.subject {
                return Err(Error::Dataset(format!(
                    "track {} mixes subjects {} and {}",
                    r.sample_id, entry.1, r.subject
                )));
            }
            entry.2.push((r.tag, &r.feature));
        }
        let mut tracks = Vec::with_capacity(order.len());
        for name in order {
            let (subject_id, _, mut frames) = by.remove(name).expect("recorded");
            frames.sort_by_key(|(t, _)| *t);
            if frames.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Dataset(format!("track {name} repeats a frame ordinal")));
            }
            tracks.push(VideoTrack {
                subject_id,
                frames: frames.into_iter().map(|(_, f)| f.clone()).collect(),
            });
        }
        Ok(tracks)
    }
}

fn label_index(labels: &[String]) -> BTreeMap<&str, usize> {
    labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Pose,
    Video,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Pose => "pose",
            Task::Video => "video",
        }
    }

    pub fn parse(s: &str) -> Option<Task> {
        match s {
            "pose" => Some(Task::Pose),
            "video" => Some(Task::Video),
            _ => None,
        }
    }
}

/// A trained model with everything needed to evaluate it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub task: Task,
    pub params: ModelParams,
    pub norm: Normalizer,
    /// Subject labels of the training file; class `i` is `labels[i]`.
    pub labels: Vec<String>,
    pub config: TrainConfig,
    pub clip_len: usize,
    pub include_frontal: bool,
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_values(out: &mut String, values: &[f64]) {
    let line: Vec<String> = values.iter().map(|&x| sci(x)).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

impl ModelFile {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let c = &self.config;
        let mut out = format!("{MODEL_HEADER}\n");
        let _ = writeln!(out, "task {}", self.task.as_str());
        let _ = writeln!(out, "dims {} {} {}", p.input_dim(), p.hidden_dim(), p.classes());
        let _ = writeln!(out, "alpha {:?}", c.alpha);
        let _ = writeln!(out, "beta {:?}", c.beta);
        let _ = writeln!(out, "hidden {}", c.hidden);
        match c.optimizer {
            Optimizer::Sgd { momentum } => {
                let _ = writeln!(out, "optimizer sgd {momentum:?}");
            }
            Optimizer::Adam { beta1, beta2, epsilon } => {
                let _ = writeln!(out, "optimizer adam {beta1:?} {beta2:?} {epsilon:?}");
            }
        }
        let _ = writeln!(out, "lr {:?}", c.learning_rate);
        let _ = writeln!(out, "batch {}", c.batch_size);
        let _ = writeln!(out, "epochs {}", c.epochs);
        let _ = writeln!(out, "seed {}", c.seed);
        let _ = writeln!(out, "init_scale {:?}", c.init_scale);
        let _ = writeln!(out, "threads {}", c.threads);
        let _ = writeln!(out, "clip_len {}", self.clip_len);
        let _ = writeln!(out, "include_frontal {}", self.include_frontal);
        let _ = writeln!(out, "labels {} {}", self.labels.len(), self.labels.join(" "));
        out.push_str("norm_min ");
        push_values(&mut out, self.norm.min.as_slice());
        out.push_str("norm_max ");
        push_values(&mut out, self.norm.max.as_slice());
        let mut blocks = vec![
            ("U", Some(&p.u), p.u.as_slice()),
            ("W", Some(&p.w), p.w.as_slice()),
            ("b1", None, p.b1.as_slice()),
            ("V", Some(&p.v), p.v.as_slice()),
            ("b2", None, p.b2.as_slice()),
        ];
        if let Some(head) = &p.head {
            blocks.push(("G", Some(&head.g), head.g.as_slice()));
            blocks.push(("b3", None, head.b3.as_slice()));
        }
        for (name, matrix, data) in blocks {
            match matrix {
                Some(m) => {
                    let _ = writeln!(out, "{name} {} {}", m.rows(), m.cols());
                    for r in 0..m.rows() {
                        push_values(&mut out, &data[r * m.cols()..(r + 1) * m.cols()]);
                    }
                }
                None => {
                    let _ = writeln!(out, "{name} {}", data.len());
                    push_values(&mut out, data);
                }
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut r = LineReader::new(text, path);
        let header = r.next_line()?;
        if header.trim() != MODEL_HEADER {
            return Err(r.err(format!("expected header `{MODEL_HEADER}`")));
        }
        let task_name = r.keyed("task", 1)?[0];
        let task = Task::parse(task_name).ok_or_else(|| r.err(format!("unknown task {task_name:?}")))?;
        let dims = r.keyed("dims", 3)?;
        let (d, h, c) = (r.num(dims[0])?, r.num(dims[1])?, r.num(dims[2])?);
        let alpha = r.real_value("alpha")?;
        let beta = r.real_value("beta")?;
        let hidden = r.value::<usize>("hidden")?;
        let opt = r.keyed_any("optimizer")?;
        let optimizer = match opt.as_slice() {
            ["sgd", m] => Optimizer::Sgd { momentum: r.real(m)? },
            ["adam", b1, b2, eps] => Optimizer::Adam {
                beta1: r.real(b1)?,
                beta2: r.real(b2)?,
                epsilon: r.real(eps)?,
            },
            _ => return Err(r.err("expected `optimizer sgd <m>` or `optimizer adam <b1> <b2> <eps>`".into())),
        };
        let learning_rate = r.real_value("lr")?;
        let batch_size = r.value::<usize>("batch")?;
        let epochs = r.value::<usize>("epochs")?;
        let seed = r.value::<u64>("seed")?;
        let init_scale = r.real_value("init_scale")?;
        let threads = r.value::<usize>("threads")?;
        let clip_len = r.value::<usize>("clip_len")?;
        let include_frontal = r.value::<bool>("include_frontal")?;
        let label_fields = r.keyed_any("labels")?;
        let n_labels = r.num(label_fields.first().copied().unwrap_or(""))?;
        if label_fields.len() != n_labels + 1 {
            return Err(r.err(format!("expected {n_labels} labels, found {}", label_fields.len() - 1)));
        }
        let labels: Vec<String> = label_fields[1..].iter().map(|s| s.to_string()).collect();
        let norm_min = r.reals_keyed("norm_min", d)?;
        let norm_max = r.reals_keyed("norm_max", d)?;
        let norm = Normalizer::from_bounds(Vector::from(norm_min), Vector::from(norm_max))
            .map_err(|e| r.err(e.to_string()))?;

        let u = r.matrix("U", h, d)?;
        let w = r.matrix("W", h, h)?;
        let b1 = r.vector("b1", h)?;
        let v = r.matrix("V", d, h)?;
        let b2 = r.vector("b2", d)?;
        let head = if c > 0 {
            Some(Head {
                g: r.matrix("G", c, h)?,
                b3: r.vector("b3", c)?,
            })
        } else {
            None
        };
        let end = r.next_line()?;
        if end.trim() != "end" {
            return Err(r.err("expected `end`".into()));
        }
        let params = ModelParams { u, w, b1, v, b2, head };
        params.validate().map_err(|e| r.err(e.to_string()))?;
        Ok(ModelFile {
            task,
            params,
            norm,
            labels,
            config: TrainConfig {
                alpha,
                beta,
                hidden,
                optimizer,
                learning_rate,
                batch_size,
                epochs,
                seed,
                init_scale,
                classes: Some(c),
                threads,
            },
            clip_len,
            include_frontal,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

struct LineReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    path: PathBuf,
    line: usize,
}

impl<'a> LineReader<'a> {
    fn new(text: &'a str, path: &Path) -> Self {
        LineReader {
            lines: text.lines().enumerate(),
            path: path.to_path_buf(),
            line: 0,
        }
    }

    fn err(&self, msg: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.line.max(1),
            msg,
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        match self.lines.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => {
                self.line += 1;
                Err(self.err("unexpected end of file".into()))
            }
        }
    }

    fn keyed_any(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let line = self.next_line()?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(fields.collect())
    }

    fn keyed(&mut self, key: &str, n: usize) -> Result<Vec<&'a str>> {
        let fields = self.keyed_any(key)?;
        if fields.len() != n {
            return Err(self.err(format!("`{key}` takes {n} value(s), found {}", fields.len())));
        }
        Ok(fields)
    }

    fn parse_field<T: std::str::FromStr>(&self, s: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        s.parse::<T>().map_err(|e| self.err(format!("bad value {s:?}: {e}")))
    }

    fn value<T: std::str::FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let field = self.keyed(key, 1)?[0];
        self.parse_field(field)
    }

    fn real_value(&mut self, key: &str) -> Result<f64> {
        let field = self.keyed(key, 1)?[0];
        self.real(field)
    }

    fn num(&self, s: &str) -> Result<usize> {
        self.parse_field(s)
    }

    fn real(&self, s: &str) -> Result<f64> {
        let x: f64 = self.parse_field(s)?;
        if !x.is_finite() {
            return Err(self.err(format!("non-finite value {s:?}")));
        }
        Ok(x)
    }

    fn reals(&mut self, fields: &[&str], n: usize) -> Result<Vec<f64>> {
        if fields.len() != n {
            return Err(self.err(format!("expected {n} values, found {}", fields.len())));
        }
        fields.iter().map(|s| self.real(s)).collect()
    }

    fn reals_keyed(&mut self, key: &str, n: usize) -> Result<Vec<f64>> {
        let fields = self.keyed_any(key)?;
        self.reals(&fields, n)
    }

    fn row(&mut self, n: usize) -> Result<Vec<f64>> {
        let line = self.next_line()?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        self.reals(&fields, n)
    }

    fn matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<Matrix> {
        let dims = self.keyed(name, 2)?;
        let (r, c) = (self.num(dims[0])?, self.num(dims[1])?);
        if (r, c) != (rows, cols) {
            return Err(self.err(format!("{name} is {r}x{c}, expected {rows}x{cols}")));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.row(cols)?);
        }
        Matrix::from_vec(rows, cols, data).map_err(|e| self.err(e.to_string()))
    }

    fn vector(&mut self, name: &str, len: usize) -> Result<Vector> {
        let n: usize = self.value(name)?;
        if n != len {
            return Err(self.err(format!("{name} has length {n}, expected {len}")));
        }
        if len == 0 {
            self.next_line()?;
            return Ok(Vector::zeros(0));
        }
        Ok(Vector::from(self.row(len)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bptt::random_model;

    fn p() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn feature_roundtrip_is_exact() {
        let mut set = FeatureSet::new(2);
        for (i, xs) in [[0.1, -1e-7], [1.0 / 3.0, 12345.678], [f64::MIN_POSITIVE, -0.0]].iter().enumerate() {
            set.push(FeatureRecord {
                sample_id: format!("x{i}"),
                subject: "a".into(),
                tag: i,
                feature: Vector::from(xs.to_vec()),
            })
            .unwrap();
        }
        let text = set.to_text();
        assert!(text.starts_with("rrnn-features v1 d=2\n"));
        let back = FeatureSet::parse(&text, p()).unwrap();
        for (a, b) in set.records.iter().zip(&back.records) {
            for (x, y) in a.feature.iter().zip(b.feature.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let cases = [
            ("nope\n", 1),
            ("rrnn-features v1 d=2\na b 0 1.0\n", 2),
            ("rrnn-features v1 d=2\na b 0 1 2\n\na b x 1 2\n", 4),
            ("rrnn-features v1 d=1\na b 0 1\na b 1 nan\n", 3),
            ("rrnn-features v1 d=1\na b 0 1e999\n", 2),
        ];
        for (text, line) in cases {
            match FeatureSet::parse(text, p()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn pose_grouping_and_labels() {
        let text = "rrnn-features v1 d=1\nb1 bob 3 1\na1 al 3 2\na2 al 0 3\n";
        let set = FeatureSet::parse(text, p()).unwrap();
        assert_eq!(set.labels(), vec!["al", "bob"]);
        let subjects = set.pose_subjects(&PoseGrid::standard()).unwrap();
        assert_eq!(subjects.len(), 2);
        assert_eq!(subjects[0].subject_id, 1);
        assert_eq!(subjects[1].features.len(), 2);

        let dup = "rrnn-features v1 d=1\nb1 bob 3 1\nb2 bob 3 2\n";
        let set = FeatureSet::parse(dup, p()).unwrap();
        assert!(matches!(set.pose_subjects(&PoseGrid::standard()), Err(Error::Dataset(_))));
        let bad = "rrnn-features v1 d=1\nb1 bob 7 1\n";
        let set = FeatureSet::parse(bad, p()).unwrap();
        assert!(set.pose_subjects(&PoseGrid::standard()).is_err());
    }

    #[test]
    fn video_grouping_sorts_frames() {
        let text = "rrnn-features v1 d=1\nt1 a 1 2\nt1 a 0 1\nt2 b 0 5\n";
        let set = FeatureSet::parse(text, p()).unwrap();
        let tracks = set.video_tracks(&set.labels()).unwrap();
        assert_eq!(tracks.len(), 2);
        assert_eq!(tracks[0].frames, vec![Vector::from(vec![1.0]), Vector::from(vec![2.0])]);
        assert_eq!(tracks[1].subject_id, 1);
        assert!(set.video_tracks(&["a".to_string()]).is_err());
        let mixed = FeatureSet::parse("rrnn-features v1 d=1\nt1 a 0 1\nt1 b 1 1\n", p()).unwrap();
        assert!(mixed.video_tracks(&mixed.labels()).is_err());
    }

    fn sample_model(c: usize) -> ModelFile {
        let params = random_model(3, 4, c, 9);
        ModelFile {
            task: Task::Video,
            params,
            norm: Normalizer::from_bounds(Vector::from(vec![-1.0, 0.0, 0.1]), Vector::from(vec![1.0, 0.0, 0.7]))
                .unwrap(),
            labels: (0..c).map(|i| format!("l{i}")).collect(),
            config: TrainConfig {
                alpha: 0.1,
                optimizer: Optimizer::sgd(0.9),
                classes: Some(c),
                ..TrainConfig::default()
            },
            clip_len: 10,
            include_frontal: true,
        }
    }

    #[test]
    fn model_roundtrip_is_bit_exact() {
        for c in [0, 3] {
            let m = sample_model(c);
            let text = m.to_text();
            let back = ModelFile::parse(&text, p()).unwrap();
            assert_eq!(back, m);
            for ((_, a), (_, b)) in m.params.blocks().into_iter().zip(back.params.blocks()) {
                assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn truncated_model_is_rejected_with_line() {
        let text = sample_model(2).to_text();
        let cut: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
        match ModelFile::parse(&cut, p()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 21),
            other => panic!("{other:?}"),
        }
    }
}
