//! Inference: mean-hidden-state embeddings with nearest-neighbor matching
//! for stills, posterior averaging for videos, and the accuracy reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{mean_of, Vector};
use crate::model::{class_posterior, forward, ModelParams, SequenceSample};
use crate::optim::{train, TrainConfig, TrainHistory};
use crate::protocols::{
    build_pose_test_sequence, build_video_clips, pose_training_samples, Normalizer, PoseGrid,
    SubjectPoseSet, VideoTrack,
};

/// Mean of the hidden states over the sequence.
pub fn embed(sample: &SequenceSample, p: &ModelParams) -> Result<Vector> {
    let trace = forward(sample, p)?;
    mean_of(&trace.hidden)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    /// `1 - cos(a, b)`; zero vectors are at distance 1 from everything.
    Cosine,
}

impl Metric {
    pub fn distance(self, a: &Vector, b: &Vector) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Cosine => {
                let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                let na = a.norm_sq().sqrt();
                let nb = b.norm_sq().sqrt();
                if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    1.0 - dot / (na * nb)
                }
            }
        }
    }
}

/// Majority label among the `k` nearest gallery entries. Ties go to the
/// label whose voting neighbors are closer on average, then to the smaller
/// label.
pub fn knn_classify(gallery: &[(Vector, usize)], probe: &Vector, k: usize, metric: Metric) -> Result<usize> {
    if gallery.is_empty() {
        return Err(Error::Empty("knn gallery"));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    for (g, _) in gallery {
        if g.len() != probe.len() {
            return Err(Error::shape(
                "knn_classify",
                format!("gallery [{}]", g.len()),
                format!("probe [{}]", probe.len()),
            ));
        }
    }
    let mut dists: Vec<(f64, usize)> = gallery
        .iter()
        .map(|(g, label)| (metric.distance(g, probe), *label))
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0));

    // label -> (votes, summed distance)
    let mut votes: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for &(dist, label) in dists.iter().take(k) {
        let e = votes.entry(label).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += dist;
    }
    let (label, _) = votes
        .into_iter()
        .min_by(|(la, (va, sa)), (lb, (vb, sb))| {
            vb.cmp(va)
                .then((sa / *va as f64).total_cmp(&(sb / *vb as f64)))
                .then(la.cmp(lb))
        })
        .expect("k >= 1 and gallery nonempty");
    Ok(label)
}

/// Accuracy per probe pose for one gallery pose.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseReport {
    pub gallery_pose: usize,
    /// `(probe pose, accuracy)` in grid order, gallery pose excluded.
    pub per_probe: Vec<(usize, f64)>,
    /// Mean of the per-pose accuracies.
    pub average: f64,
}

impl PoseReport {
    pub fn accuracy(&self, probe_pose: usize) -> Option<f64> {
        self.per_probe
            .iter()
            .find(|(p, _)| *p == probe_pose)
            .map(|(_, a)| *a)
    }

    pub fn render_table(&self, grid: &PoseGrid, title: &str) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<12}", "Probe pose");
        for (p, _) in &self.per_probe {
            let _ = write!(out, "{:>9}", grid.label(*p));
        }
        let _ = writeln!(out, "{:>9}", "Average");
        let _ = write!(out, "{title:<12}");
        for (_, a) in &self.per_probe {
            let _ = write!(out, "{:>8.1}%", 100.0 * a);
        }
        let _ = writeln!(out, "{:>8.1}%", 100.0 * self.average);
        out
    }

    /// One `pose,accuracy` record per line, angles in degrees.
    pub fn records(&self, grid: &PoseGrid) -> String {
        let mut out = String::new();
        for (p, a) in &self.per_probe {
            let _ = writeln!(out, "{},{a}", grid.angle(*p).unwrap_or_default());
        }
        let _ = writeln!(out, "average,{}", self.average);
        out
    }
}

/// Gallery: each subject's image at `gallery_pose`. Probes: every other
/// pose image of the same subjects. `embedder` maps a raw feature to the
/// space in which neighbors are searched.
pub fn pose_accuracy<F>(
    subjects: &[SubjectPoseSet],
    grid: &PoseGrid,
    gallery_pose: usize,
    k: usize,
    metric: Metric,
    mut embedder: F,
) -> Result<PoseReport>
where
    F: FnMut(&Vector) -> Result<Vector>,
{
    grid.check(gallery_pose)?;
    if subjects.is_empty() {
        return Err(Error::Empty("pose evaluation subjects"));
    }
    let mut gallery = Vec::with_capacity(subjects.len());
    for s in subjects {
        let f = s.features.get(&gallery_pose).ok_or_else(|| Error::MissingPose {
            subject: s.subject_id,
            pose: grid.label(gallery_pose),
        })?;
        gallery.push((embedder(f)?, s.subject_id));
    }
    let mut per_probe = Vec::new();
    for probe_pose in (0..grid.len()).filter(|&p| p != gallery_pose) {
        let (mut hits, mut total) = (0usize, 0usize);
        for s in subjects {
            if let Some(f) = s.features.get(&probe_pose) {
                let predicted = knn_classify(&gallery, &embedder(f)?, k, metric)?;
                total += 1;
                if predicted == s.subject_id {
                    hits += 1;
                }
            }
        }
        if total > 0 {
            per_probe.push((probe_pose, hits as f64 / total as f64));
        }
    }
    if per_probe.is_empty() {
        return Err(Error::Empty("probe set"));
    }
    let average = per_probe.iter().map(|(_, a)| a).sum::<f64>() / per_probe.len() as f64;
    Ok(PoseReport {
        gallery_pose,
        per_probe,
        average,
    })
}

/// Pose experiment with model embeddings of single-image virtual sequences.
pub fn pose_experiment(
    model: &ModelParams,
    norm: &Normalizer,
    subjects: &[SubjectPoseSet],
    grid: &PoseGrid,
    gallery_pose: usize,
    k: usize,
    metric: Metric,
) -> Result<PoseReport> {
    pose_accuracy(subjects, grid, gallery_pose, k, metric, |f| {
        embed(&build_pose_test_sequence(f, norm, grid)?, model)
    })
}

/// Baseline: nearest neighbor on the raw features.
pub fn raw_pose_experiment(
    subjects: &[SubjectPoseSet],
    grid: &PoseGrid,
    gallery_pose: usize,
    k: usize,
    metric: Metric,
) -> Result<PoseReport> {
    pose_accuracy(subjects, grid, gallery_pose, k, metric, |f| Ok(f.clone()))
}

/// Every gallery pose against every other probe pose.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossPoseMatrix {
    pub rows: Vec<PoseReport>,
}

impl CrossPoseMatrix {
    pub fn render_table(&self, grid: &PoseGrid) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<10}", "Gallery");
        for p in 0..grid.len() {
            let _ = write!(out, "{:>8}", grid.label(p));
        }
        let _ = writeln!(out, "{:>9}", "Average");
        for row in &self.rows {
            let _ = write!(out, "{:<10}", grid.label(row.gallery_pose));
            for p in 0..grid.len() {
                match row.accuracy(p) {
                    Some(a) => {
                        let _ = write!(out, "{a:>8.4}");
                    }
                    None => {
                        let _ = write!(out, "{:>8}", "-");
                    }
                }
            }
            let _ = writeln!(out, "{:>9.4}", row.average);
        }
        out
    }

    /// `gallery/probe,accuracy` per line, angles in degrees.
    pub fn records(&self, grid: &PoseGrid) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let g = grid.angle(row.gallery_pose).unwrap_or_default();
            for (p, a) in &row.per_probe {
                let _ = writeln!(out, "{g}/{},{a}", grid.angle(*p).unwrap_or_default());
            }
            let _ = writeln!(out, "{g}/average,{}", row.average);
        }
        out
    }
}

pub fn cross_pose_matrix(
    model: &ModelParams,
    norm: &Normalizer,
    subjects: &[SubjectPoseSet],
    grid: &PoseGrid,
    k: usize,
    metric: Metric,
) -> Result<CrossPoseMatrix> {
    let rows = (0..grid.len())
        .map(|g| pose_experiment(model, norm, subjects, grid, g, k, metric))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossPoseMatrix { rows })
}

/// Posterior averaged over every timestep of every clip of one video.
pub fn video_score(clips: &[SequenceSample], model: &ModelParams) -> Result<Vector> {
    if model.head.is_none() {
        return Err(Error::NoHead);
    }
    let mut posteriors = Vec::new();
    for clip in clips {
        let trace = forward(clip, model)?;
        for s in &trace.hidden {
            posteriors.push(class_posterior(s, model)?);
        }
    }
    mean_of(&posteriors).map_err(|_| Error::Empty("video clips"))
}

pub fn video_predict(clips: &[SequenceSample], model: &ModelParams) -> Result<usize> {
    Ok(video_score(clips, model)?.argmax().expect("at least two classes"))
}

/// Fraction of tracks whose predicted class equals their subject.
pub fn video_accuracy(
    tracks: &[&VideoTrack],
    model: &ModelParams,
    norm: &Normalizer,
    clip_len: usize,
) -> Result<f64> {
    if tracks.is_empty() {
        return Err(Error::Empty("video test tracks"));
    }
    let mut hits = 0usize;
    for t in tracks {
        let clips = build_video_clips(t, clip_len, norm)?;
        if video_predict(&clips, model)? == t.subject_id {
            hits += 1;
        }
    }
    Ok(hits as f64 / tracks.len() as f64)
}

/// Per-trial accuracies with their mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoReport {
    pub trials: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl VideoReport {
    pub fn from_trials(trials: Vec<f64>) -> Self {
        let n = trials.len().max(1) as f64;
        let mean = trials.iter().sum::<f64>() / n;
        let var = trials.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
        VideoReport {
            trials,
            mean,
            std: var.sqrt(),
        }
    }

    pub fn render_table(&self, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8}{:>10}", "Trial", "Accuracy");
        for (i, a) in self.trials.iter().enumerate() {
            let _ = writeln!(out, "{:<8}{:>9.1}%", i + 1, 100.0 * a);
        }
        let _ = writeln!(
            out,
            "{title}: {:.1} ± {:.1}",
            100.0 * self.mean,
            100.0 * self.std
        );
        out
    }

    /// One `trial,accuracy` record per line.
    pub fn records(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.trials.iter().enumerate() {
            let _ = writeln!(out, "{},{a}", i + 1);
        }
        let _ = writeln!(out, "mean,{}", self.mean);
        let _ = writeln!(out, "std,{}", self.std);
        out
    }
}

/// Track split for the video protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VideoProtocol {
    pub clip_len: usize,
    /// Tracks per subject used for training in each trial.
    pub train_per_subject: usize,
    /// Tracks per subject tested in each trial; `None` tests all the rest.
    pub test_per_subject: Option<usize>,
}

impl Default for VideoProtocol {
    fn default() -> Self {
        VideoProtocol {
            clip_len: 10,
            train_per_subject: 3,
            test_per_subject: None,
        }
    }
}

fn tracks_by_subject(tracks: &[VideoTrack]) -> BTreeMap<usize, Vec<usize>> {
    let mut by: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, t) in tracks.iter().enumerate() {
        by.entry(t.subject_id).or_default().push(i);
    }
    by
}

/// Random per-subject split into `(train, test)` track indices.
pub fn split_tracks(
    tracks: &[VideoTrack],
    protocol: &VideoProtocol,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let by = tracks_by_subject(tracks);
    if by.len() < 2 {
        return Err(Error::Dataset(format!("need at least 2 subjects, found {}", by.len())));
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (subject, mut idx) in by {
        let want_test = protocol.test_per_subject.unwrap_or(1).max(1);
        if idx.len() < protocol.train_per_subject + want_test {
            return Err(Error::Dataset(format!(
                "subject {subject} has {} tracks; need {} for training and {want_test} for testing",
                idx.len(),
                protocol.train_per_subject
            )));
        }
        idx.shuffle(rng);
        let rest = idx.split_off(protocol.train_per_subject);
        train.extend(idx);
        let n_test = protocol.test_per_subject.unwrap_or(rest.len());
        test.extend(rest.into_iter().take(n_test));
    }
    Ok((train, test))
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Fits the normalizer on the training subjects and trains on every pose
/// sample built from them.
pub fn train_pose_model(
    subjects: &[SubjectPoseSet],
    grid: &PoseGrid,
    cfg: &TrainConfig,
    include_frontal: bool,
) -> Result<(ModelParams, Normalizer, TrainHistory)> {
    let norm = Normalizer::fit(subjects.iter().flat_map(|s| s.features.values()))?;
    let samples = pose_training_samples(subjects, grid, &norm, include_frontal)?;
    let (model, history) = train(&samples, cfg)?;
    Ok((model, norm, history))
}

/// Fits the normalizer on the training frames and trains on their clips.
pub fn train_video_model(
    tracks: &[&VideoTrack],
    clip_len: usize,
    cfg: &TrainConfig,
) -> Result<(ModelParams, Normalizer, TrainHistory)> {
    let norm = Normalizer::fit(tracks.iter().flat_map(|t| t.frames.iter()))?;
    let mut samples = Vec::new();
    for t in tracks {
        samples.extend(build_video_clips(t, clip_len, &norm)?);
    }
    let (model, history) = train(&samples, cfg)?;
    Ok((model, norm, history))
}

/// Trains and tests one model per trial on seeded random track splits.
/// Trial `i` trains with seed `train_cfg.seed + i`. The model always has a
/// head over all subjects, so with `β = 0` the head keeps its initial
/// random weights.
pub fn video_experiment(
    tracks: &[VideoTrack],
    protocol: &VideoProtocol,
    train_cfg: &TrainConfig,
    trials: usize,
    seed: u64,
) -> Result<VideoReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let classes = tracks.iter().map(|t| t.subject_id).max().map_or(0, |m| m + 1);
    let mut accuracies = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let (train_idx, test_idx) = split_tracks(tracks, protocol, &mut rng)?;
        let train_tracks: Vec<&VideoTrack> = train_idx.iter().map(|&i| &tracks[i]).collect();
        let cfg = TrainConfig {
            classes: Some(classes),
            seed: train_cfg.seed.wrapping_add(trial as u64),
            ..train_cfg.clone()
        };
        let (model, norm, _) = train_video_model(&train_tracks, protocol.clip_len, &cfg)?;
        let test: Vec<&VideoTrack> = test_idx.iter().map(|&i| &tracks[i]).collect();
        let acc = video_accuracy(&test, &model, &norm, protocol.clip_len)?;
        log::info!("trial {:>2}: accuracy {:.4}", trial + 1, acc);
        accuracies.push(acc);
    }
    Ok(VideoReport::from_trials(accuracies))
}

/// Fixed-model evaluation over `trials` seeded random draws of test tracks
/// (`test_per_subject` per subject, or all of them).
pub fn resampled_video_accuracy(
    tracks: &[VideoTrack],
    model: &ModelParams,
    norm: &Normalizer,
    clip_len: usize,
    test_per_subject: Option<usize>,
    trials: usize,
    seed: u64,
) -> Result<VideoReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let by = tracks_by_subject(tracks);
    let mut accuracies = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let mut chosen = Vec::new();
        for idx in by.values() {
            let mut idx = idx.clone();
            idx.shuffle(&mut rng);
            let n = test_per_subject.unwrap_or(idx.len()).min(idx.len());
            chosen.extend(idx.into_iter().take(n).map(|i| &tracks[i]));
        }
        accuracies.push(video_accuracy(&chosen, model, norm, clip_len)?);
    }
    Ok(VideoReport::from_trials(accuracies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::model::Head;

    fn v(xs: &[f64]) -> Vector {
        Vector::from(xs.to_vec())
    }

    #[test]
    fn embed_examples() {
        let p = ModelParams::zeros(2, 3, 0);
        let s = SequenceSample::unlabeled(vec![v(&[0.5, -0.5]); 4]);
        assert_eq!(embed(&s, &p).unwrap(), Vector::zeros(3));

        let mut p = ModelParams::zeros(1, 1, 0);
        p.u[(0, 0)] = 0.7;
        p.w[(0, 0)] = 0.2;
        let one = SequenceSample::unlabeled(vec![v(&[0.3])]);
        let trace = forward(&one, &p).unwrap();
        assert_eq!(embed(&one, &p).unwrap(), trace.hidden[0]);

        // atanh inputs chosen so S = (0.2), (0.4) with W = 0.
        let mut p = ModelParams::zeros(1, 1, 0);
        p.u[(0, 0)] = 1.0;
        let s = SequenceSample::unlabeled(vec![v(&[0.2f64.atanh()]), v(&[0.4f64.atanh()])]);
        assert!((embed(&s, &p).unwrap()[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn knn_examples() {
        let gallery = vec![(v(&[0.0, 0.0]), 7), (v(&[1.0, 1.0]), 3), (v(&[5.0, 5.0]), 9)];
        assert_eq!(knn_classify(&gallery, &v(&[1.0, 1.0]), 1, Metric::Euclidean).unwrap(), 3);

        let g = vec![(v(&[0.0]), 0), (v(&[0.1]), 0), (v(&[0.2]), 1), (v(&[9.0]), 1)];
        assert_eq!(knn_classify(&g, &v(&[0.05]), 3, Metric::Euclidean).unwrap(), 0);

        // k = 2 tie: A at distance 1, B at distance 2.
        let g = vec![(v(&[1.0]), 5), (v(&[-2.0]), 1)];
        assert_eq!(knn_classify(&g, &v(&[0.0]), 2, Metric::Euclidean).unwrap(), 5);
        // Equal distances: smaller label wins.
        let g = vec![(v(&[1.0]), 5), (v(&[-1.0]), 1)];
        assert_eq!(knn_classify(&g, &v(&[0.0]), 2, Metric::Euclidean).unwrap(), 1);

        assert!(matches!(knn_classify(&[], &v(&[0.0]), 1, Metric::Euclidean), Err(Error::Empty(_))));
    }

    #[test]
    fn cosine_ignores_scale() {
        let g = vec![(v(&[1.0, 0.0]), 0), (v(&[0.0, 1.0]), 1)];
        assert_eq!(knn_classify(&g, &v(&[0.1, 5.0]), 1, Metric::Cosine).unwrap(), 1);
        assert_eq!(Metric::Cosine.distance(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])), 1.0);
    }

    fn posterior_model(logits: &[f64]) -> ModelParams {
        let mut p = ModelParams::zeros(1, 1, logits.len());
        p.head = Some(Head {
            g: Matrix::zeros(logits.len(), 1),
            b3: v(logits),
        });
        p
    }

    #[test]
    fn video_score_examples() {
        let uniform = posterior_model(&[0.0; 4]);
        let clips = vec![SequenceSample::unlabeled(vec![v(&[0.1]); 3]); 2];
        let score = video_score(&clips, &uniform).unwrap();
        assert!(score.iter().all(|&x| (x - 0.25).abs() < 1e-15));

        let p = posterior_model(&[0.3, -0.8]);
        let single = vec![SequenceSample::unlabeled(vec![v(&[0.4])])];
        let trace = forward(&single[0], &p).unwrap();
        assert_eq!(
            video_score(&single, &p).unwrap(),
            class_posterior(&trace.hidden[0], &p).unwrap()
        );

        assert!(matches!(
            video_score(&single, &ModelParams::zeros(1, 1, 0)),
            Err(Error::NoHead)
        ));
    }

    /// Two steps with posteriors (0.8, 0.2) and (0.4, 0.6) average to (0.6, 0.4).
    #[test]
    fn video_score_averages_steps() {
        // W = 0 and U = 1 give S_t = tanh(x_t); logits are (4·S_t, 0), so
        // P(class 0) = sigmoid(4·S_t).
        let mut p = ModelParams::zeros(1, 1, 2);
        p.u[(0, 0)] = 1.0;
        p.head = Some(Head {
            g: Matrix::from_rows(&[&[4.0], &[0.0]]).unwrap(),
            b3: Vector::zeros(2),
        });
        let state_for = |q: f64| (q / (1.0 - q)).ln() / 4.0;
        let clip = SequenceSample::unlabeled(vec![
            v(&[state_for(0.8).atanh()]),
            v(&[state_for(0.4).atanh()]),
        ]);
        let score = video_score(&[clip.clone()], &p).unwrap();
        assert!((score[0] - 0.6).abs() < 1e-12 && (score[1] - 0.4).abs() < 1e-12, "{score:?}");
        assert_eq!(video_predict(&[clip], &p).unwrap(), 0);
    }

    #[test]
    fn report_statistics() {
        let one = VideoReport::from_trials(vec![0.8]);
        assert_eq!(one.std, 0.0);
        assert_eq!(one.mean, 0.8);
        let two = VideoReport::from_trials(vec![0.5, 1.0]);
        assert!((two.mean - 0.75).abs() < 1e-15 && (two.std - 0.25).abs() < 1e-15);
        assert!(two.records().contains("std,0.25"));
    }

    #[test]
    fn split_requires_enough_tracks() {
        let tracks: Vec<VideoTrack> = (0..4)
            .map(|i| VideoTrack { subject_id: i % 2, frames: vec![v(&[0.0])] })
            .collect();
        let protocol = VideoProtocol { clip_len: 1, train_per_subject: 1, test_per_subject: None };
        let mut rng = trial_rng(0, 0);
        let (train, test) = split_tracks(&tracks, &protocol, &mut rng).unwrap();
        assert_eq!((train.len(), test.len()), (2, 2));
        let greedy = VideoProtocol { train_per_subject: 2, ..protocol };
        assert!(split_tracks(&tracks, &greedy, &mut rng).is_err());
        let lonely = vec![tracks[0].clone(), tracks[2].clone()];
        assert!(split_tracks(&lonely, &protocol, &mut rng).is_err());
    }

    #[test]
    fn pose_accuracy_on_identical_probes_is_perfect() {
        let grid = PoseGrid::standard();
        let subjects: Vec<SubjectPoseSet> = (0..5)
            .map(|s| SubjectPoseSet {
                subject_id: s,
                features: (0..7).map(|p| (p, v(&[s as f64, 1.0]))).collect(),
            })
            .collect();
        let r = raw_pose_experiment(&subjects, &grid, 3, 1, Metric::Euclidean).unwrap();
        assert_eq!(r.per_probe.len(), 6);
        assert_eq!(r.average, 1.0);
        assert!(r.accuracy(3).is_none());
        let table = r.render_table(&grid, "raw");
        assert!(table.contains("Average") && table.contains("-45°"));
        assert!(r.records(&grid).starts_with("-45,1\n"));

        let mut missing = subjects.clone();
        missing[2].features.remove(&3);
        assert!(matches!(
            raw_pose_experiment(&missing, &grid, 3, 1, Metric::Euclidean),
            Err(Error::MissingPose { subject: 2, .. })
        ));
    }
}
