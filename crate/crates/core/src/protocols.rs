//! Sequence construction for the two recognition settings, feature
//! normalization, and synthetic stand-in datasets.
//!
//! Cross-pose stills: a single image is repeated to form the input stream
//! and the decoding targets walk its pose toward frontal one 15° step at a
//! time, padded with frontal and closed by one extra frontal target.
//!
//! Video: the frames of a clip are the input stream and every decoding
//! target is the clip's mean frame.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{matvec, mean_of, Matrix, Vector};
use crate::model::SequenceSample;

/// Ordered pose angles with the frontal pose at the center.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseGrid {
    angles: Vec<i32>,
    frontal: usize,
}

impl Default for PoseGrid {
    fn default() -> Self {
        PoseGrid::standard()
    }
}

impl PoseGrid {
    /// −45° … +45° in 15° steps; frontal is index 3.
    pub fn standard() -> Self {
        PoseGrid {
            angles: vec![-45, -30, -15, 0, 15, 30, 45],
            frontal: 3,
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn frontal_index(&self) -> usize {
        self.frontal
    }

    pub fn angle(&self, pose: usize) -> Option<i32> {
        self.angles.get(pose).copied()
    }

    pub fn index_of(&self, angle: i32) -> Option<usize> {
        self.angles.iter().position(|&a| a == angle)
    }

    pub fn label(&self, pose: usize) -> String {
        match self.angle(pose) {
            Some(0) => "0°".to_string(),
            Some(a) => format!("{a:+}°"),
            None => format!("pose#{pose}"),
        }
    }

    /// Decoding-target length: the longest walk to frontal plus the terminal frontal.
    pub fn target_len(&self) -> usize {
        self.frontal.max(self.len() - 1 - self.frontal) + 1
    }

    pub fn check(&self, pose: usize) -> Result<()> {
        if pose < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidPose(pose))
        }
    }
}

/// One feature per pose for one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectPoseSet {
    pub subject_id: usize,
    pub features: BTreeMap<usize, Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoTrack {
    pub subject_id: usize,
    pub frames: Vec<Vector>,
}

const NORM_EDGE: f64 = 0.9;

/// Per-dimension affine map of the training range onto `[-0.9, 0.9]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub min: Vector,
    pub max: Vector,
}

impl Normalizer {
    pub fn fit<'a, I>(features: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Vector>,
    {
        let mut iter = features.into_iter();
        let first = iter.next().ok_or(Error::Empty("fit_normalizer"))?;
        let mut min = first.clone();
        let mut max = first.clone();
        for v in iter {
            if v.len() != min.len() {
                return Err(Error::shape(
                    "fit_normalizer",
                    format!("[{}]", min.len()),
                    format!("[{}]", v.len()),
                ));
            }
            for i in 0..v.len() {
                min[i] = min[i].min(v[i]);
                max[i] = max[i].max(v[i]);
            }
        }
        Ok(Normalizer { min, max })
    }

    /// Builds a normalizer from explicit per-dimension bounds.
    pub fn from_bounds(min: Vector, max: Vector) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::shape("Normalizer", min.len(), max.len()));
        }
        if (0..min.len()).any(|i| !(max[i] >= min[i])) {
            return Err(Error::InvalidArgument("normalizer max < min".into()));
        }
        Ok(Normalizer { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Out-of-range values are clamped to the range edge; constant
    /// dimensions map to 0.
    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        self.check(v)?;
        Ok(Vector::from(
            (0..v.len())
                .map(|i| {
                    let span = self.max[i] - self.min[i];
                    if span == 0.0 {
                        0.0
                    } else {
                        let y = -NORM_EDGE + 2.0 * NORM_EDGE * (v[i] - self.min[i]) / span;
                        y.clamp(-NORM_EDGE, NORM_EDGE)
                    }
                })
                .collect::<Vec<_>>(),
        ))
    }

    pub fn invert(&self, y: &Vector) -> Result<Vector> {
        self.check(y)?;
        Ok(Vector::from(
            (0..y.len())
                .map(|i| {
                    let span = self.max[i] - self.min[i];
                    self.min[i] + (y[i] + NORM_EDGE) * span / (2.0 * NORM_EDGE)
                })
                .collect::<Vec<_>>(),
        ))
    }

    fn check(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::shape(
                "normalizer",
                format!("d={}", self.dim()),
                format!("[{}]", v.len()),
            ));
        }
        Ok(())
    }
}

pub fn fit_normalizer<'a, I>(features: I) -> Result<Normalizer>
where
    I: IntoIterator<Item = &'a Vector>,
{
    Normalizer::fit(features)
}

/// Poses visited from `input_pose` toward frontal, excluding the input,
/// right-padded with frontal and closed by one terminal frontal.
pub fn pose_target_path(input_pose: usize, grid: &PoseGrid) -> Result<Vec<usize>> {
    grid.check(input_pose)?;
    let frontal = grid.frontal_index();
    let mut path = Vec::with_capacity(grid.target_len());
    let mut pose = input_pose;
    while pose != frontal {
        pose = if pose < frontal { pose + 1 } else { pose - 1 };
        path.push(pose);
    }
    path.resize(grid.target_len(), frontal);
    Ok(path)
}

fn normalized_pose(set: &SubjectPoseSet, pose: usize, grid: &PoseGrid, norm: &Normalizer) -> Result<Vector> {
    let raw = set.features.get(&pose).ok_or_else(|| Error::MissingPose {
        subject: set.subject_id,
        pose: grid.label(pose),
    })?;
    norm.apply(raw)
}

pub fn build_pose_training_sample(
    set: &SubjectPoseSet,
    input_pose: usize,
    grid: &PoseGrid,
    norm: &Normalizer,
) -> Result<SequenceSample> {
    let path = pose_target_path(input_pose, grid)?;
    let input = normalized_pose(set, input_pose, grid, norm)?;
    let targets = path
        .iter()
        .map(|&p| normalized_pose(set, p, grid, norm))
        .collect::<Result<Vec<_>>>()?;
    let global_target = mean_of(&targets)?;
    Ok(SequenceSample {
        inputs: vec![input; path.len()],
        targets: Some(targets),
        global_target: Some(global_target),
        label: Some(set.subject_id),
    })
}

/// Every training sample of a set of subjects. With `include_frontal`
/// false, frontal inputs (whose targets are all frontal) are skipped.
pub fn pose_training_samples(
    sets: &[SubjectPoseSet],
    grid: &PoseGrid,
    norm: &Normalizer,
    include_frontal: bool,
) -> Result<Vec<SequenceSample>> {
    let mut out = Vec::new();
    for set in sets {
        for &pose in set.features.keys() {
            if pose == grid.frontal_index() && !include_frontal {
                continue;
            }
            out.push(build_pose_training_sample(set, pose, grid, norm)?);
        }
    }
    Ok(out)
}

/// A single still as a virtual sequence: the normalized feature repeated
/// once per decoding step.
pub fn build_pose_test_sequence(feature: &Vector, norm: &Normalizer, grid: &PoseGrid) -> Result<SequenceSample> {
    let x = norm.apply(feature)?;
    Ok(SequenceSample::unlabeled(vec![x; grid.target_len()]))
}

/// Non-overlapping windows of `clip_len` frames. A trailing remainder is
/// kept when it holds at least half a clip; a track shorter than one clip
/// is kept whole.
pub fn clip_ranges(n_frames: usize, clip_len: usize) -> Vec<Range<usize>> {
    if n_frames == 0 || clip_len == 0 {
        return Vec::new();
    }
    if n_frames < clip_len {
        return vec![0..n_frames];
    }
    let mut out: Vec<Range<usize>> = (0..n_frames / clip_len)
        .map(|k| k * clip_len..(k + 1) * clip_len)
        .collect();
    let rest = n_frames % clip_len;
    if rest > 0 && 2 * rest >= clip_len {
        out.push(n_frames - rest..n_frames);
    }
    out
}

pub fn build_video_clips(track: &VideoTrack, clip_len: usize, norm: &Normalizer) -> Result<Vec<SequenceSample>> {
    if clip_len == 0 {
        return Err(Error::InvalidArgument("clip length must be >= 1".into()));
    }
    if track.frames.is_empty() {
        return Err(Error::Empty("video track"));
    }
    let frames = track
        .frames
        .iter()
        .map(|f| norm.apply(f))
        .collect::<Result<Vec<_>>>()?;
    clip_ranges(frames.len(), clip_len)
        .into_iter()
        .map(|r| {
            let inputs = frames[r].to_vec();
            let mean = mean_of(&inputs)?;
            Ok(SequenceSample {
                targets: Some(vec![mean; inputs.len()]),
                inputs,
                global_target: None,
                label: Some(track.subject_id),
            })
        })
        .collect()
}

fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize, sigma: f64) -> Vector {
    Vector::from(
        (0..d)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            })
            .collect::<Vec<_>>(),
    )
}

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    let v = gaussian_vector(rng, d, 1.0);
    let n = v.norm_sq().sqrt();
    v.scaled(1.0 / n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoseSynthConfig {
    pub n_subjects: usize,
    pub d: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Length of the pose-dependent offset at ±45°, relative to the
    /// unit-variance identity.
    pub pose_shift: f64,
    /// Strength of the pose-dependent mixing of identity coordinates at ±45°.
    pub pose_mix: f64,
}

impl PoseSynthConfig {
    pub fn new(n_subjects: usize, d: usize, noise_sigma: f64, seed: u64) -> Self {
        PoseSynthConfig {
            n_subjects,
            d,
            noise_sigma,
            seed,
            pose_shift: 5.0,
            pose_mix: 1.0,
        }
    }
}

/// Subjects split into disjoint training and test halves.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseDataset {
    pub grid: PoseGrid,
    pub train: Vec<SubjectPoseSet>,
    pub test: Vec<SubjectPoseSet>,
}

impl PoseDataset {
    /// Splits subjects in order: the first `⌈n/2⌉` train, the rest test.
    pub fn split_half(grid: PoseGrid, mut subjects: Vec<SubjectPoseSet>) -> Self {
        let test = subjects.split_off(subjects.len().div_ceil(2));
        PoseDataset {
            grid,
            train: subjects,
            test,
        }
    }

    pub fn all_subjects(&self) -> impl Iterator<Item = &SubjectPoseSet> {
        self.train.iter().chain(self.test.iter())
    }
}

/// Synthetic identity/pose features: `x = M_p·z + o_p + ε`.
///
/// `z` is a standard normal identity vector. `M_p = I + m_p·A` mixes
/// identity coordinates through a fixed random skew-symmetric `A`, and
/// `o_p` is an offset in a fixed two-dimensional pose subspace; both grow
/// with the pose angle and are shared by all subjects. `ε` is i.i.d.
/// Gaussian noise of scale `noise_sigma`.
pub fn synth_pose_dataset(cfg: &PoseSynthConfig) -> Result<PoseDataset> {
    if cfg.n_subjects < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 subjects, got {}",
            cfg.n_subjects
        )));
    }
    if cfg.d < 4 {
        return Err(Error::InvalidArgument(format!("need d >= 4, got {}", cfg.d)));
    }
    if !(cfg.noise_sigma >= 0.0) {
        return Err(Error::InvalidArgument("noise sigma must be >= 0".into()));
    }
    let grid = PoseGrid::standard();
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let skew = {
        let raw = Matrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
        let scale = 1.0 / (d as f64).sqrt();
        Matrix::from_fn(d, d, |i, j| 0.5 * scale * (raw[(i, j)] - raw[(j, i)]))
    };
    let dir_lin = unit_vector(&mut rng, d);
    let dir_quad = unit_vector(&mut rng, d);

    let half = grid.frontal_index() as f64;
    let pose_maps: Vec<(Matrix, Vector)> = (0..grid.len())
        .map(|p| {
            let s = (p as f64 - half) / half;
            let mix = cfg.pose_mix * s;
            let m = Matrix::from_fn(d, d, |i, j| {
                let id = if i == j { 1.0 } else { 0.0 };
                id + mix * skew[(i, j)]
            });
            let mut offset = dir_lin.scaled(cfg.pose_shift * s);
            offset
                .axpy(cfg.pose_shift * s * s, &dir_quad)
                .expect("same dimension");
            (m, offset)
        })
        .collect();

    let identities: Vec<Vector> = (0..cfg.n_subjects)
        .map(|_| gaussian_vector(&mut rng, d, 1.0))
        .collect();

    let mut subjects = Vec::with_capacity(cfg.n_subjects);
    for (sid, z) in identities.iter().enumerate() {
        let mut features = BTreeMap::new();
        for (p, (m, offset)) in pose_maps.iter().enumerate() {
            let mut x = matvec(m, z)?;
            x.axpy(1.0, offset)?;
            let noise = gaussian_vector(&mut rng, d, 1.0);
            x.axpy(cfg.noise_sigma, &noise)?;
            features.insert(p, x);
        }
        subjects.push(SubjectPoseSet {
            subject_id: sid,
            features,
        });
    }
    Ok(PoseDataset::split_half(grid, subjects))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoSynthConfig {
    pub n_subjects: usize,
    pub tracks_per_subject: usize,
    pub frames: usize,
    pub d: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Standard deviation of each random-walk step of the view parameter.
    pub walk_step: f64,
    /// Scale of the view-dependent appearance change.
    pub view_strength: f64,
    /// Standard deviation of a per-track appearance offset (lighting, session).
    pub track_sigma: f64,
}

impl VideoSynthConfig {
    pub fn new(
        n_subjects: usize,
        tracks_per_subject: usize,
        frames: usize,
        d: usize,
        noise_sigma: f64,
        seed: u64,
    ) -> Self {
        VideoSynthConfig {
            n_subjects,
            tracks_per_subject,
            frames,
            d,
            noise_sigma,
            seed,
            walk_step: 0.15,
            view_strength: 1.0,
            track_sigma: 0.3,
        }
    }
}

/// Synthetic face tracks. Each frame is the subject identity plus a view
/// term `B·v_t` (a shared linear map of a 2-D view parameter that follows a
/// bounded random walk), a per-track offset, and frame noise.
pub fn synth_video_dataset(cfg: &VideoSynthConfig) -> Result<Vec<VideoTrack>> {
    if cfg.n_subjects < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 subjects, got {}",
            cfg.n_subjects
        )));
    }
    if cfg.d < 4 {
        return Err(Error::InvalidArgument(format!("need d >= 4, got {}", cfg.d)));
    }
    if cfg.frames == 0 || cfg.tracks_per_subject == 0 {
        return Err(Error::InvalidArgument("need at least one track and one frame".into()));
    }
    if !(cfg.noise_sigma >= 0.0 && cfg.walk_step >= 0.0 && cfg.track_sigma >= 0.0) {
        return Err(Error::InvalidArgument("noise scales must be >= 0".into()));
    }
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let view_map = Matrix::from_fn(d, 2, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        z / 2f64.sqrt()
    });
    let identities: Vec<Vector> = (0..cfg.n_subjects)
        .map(|_| gaussian_vector(&mut rng, d, 1.0))
        .collect();

    let mut tracks = Vec::with_capacity(cfg.n_subjects * cfg.tracks_per_subject);
    for (sid, z) in identities.iter().enumerate() {
        for _ in 0..cfg.tracks_per_subject {
            let offset = gaussian_vector(&mut rng, d, cfg.track_sigma);
            let mut view = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let mut frames = Vec::with_capacity(cfg.frames);
            for f in 0..cfg.frames {
                if f > 0 {
                    for v in &mut view {
                        let step: f64 = StandardNormal.sample(&mut rng);
                        *v = (*v + cfg.walk_step * step).clamp(-1.0, 1.0);
                    }
                }
                let mut x = z.clone();
                x.axpy(cfg.view_strength, &matvec(&view_map, &Vector::from(view.to_vec()))?)?;
                x.axpy(1.0, &offset)?;
                let noise = gaussian_vector(&mut rng, d, 1.0);
                x.axpy(cfg.noise_sigma, &noise)?;
                frames.push(x);
            }
            tracks.push(VideoTrack {
                subject_id: sid,
                frames,
            });
        }
    }
    Ok(tracks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_norm(d: usize) -> Normalizer {
        // Maps [-0.9, 0.9] onto itself.
        Normalizer::from_bounds(Vector::filled(d, -0.9), Vector::filled(d, 0.9)).unwrap()
    }

    #[test]
    fn pose_paths() {
        let g = PoseGrid::standard();
        let idx = |a: i32| g.index_of(a).unwrap();
        let path = |a: i32| pose_target_path(idx(a), &g).unwrap();
        assert_eq!(path(-45), vec![idx(-30), idx(-15), idx(0), idx(0)]);
        assert_eq!(path(0), vec![idx(0); 4]);
        assert_eq!(path(30), vec![idx(15), idx(0), idx(0), idx(0)]);
        assert!(matches!(pose_target_path(7, &g), Err(Error::InvalidPose(7))));
    }

    #[test]
    fn grid_labels() {
        let g = PoseGrid::standard();
        assert_eq!(g.label(0), "-45°");
        assert_eq!(g.label(3), "0°");
        assert_eq!(g.label(5), "+30°");
        assert_eq!(g.target_len(), 4);
    }

    fn subject(values: &[f64]) -> SubjectPoseSet {
        SubjectPoseSet {
            subject_id: 2,
            features: values
                .iter()
                .enumerate()
                .map(|(p, &x)| (p, Vector::from(vec![x, -x])))
                .collect(),
        }
    }

    #[test]
    fn pose_training_sample_walks_to_frontal() {
        let g = PoseGrid::standard();
        let set = subject(&[-0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6]);
        let norm = identity_norm(2);
        let s = build_pose_training_sample(&set, 0, &g, &norm).unwrap();
        assert_eq!(s.inputs.len(), 4);
        assert!(s.inputs.iter().all(|x| *x == s.inputs[0]));
        let firsts: Vec<f64> = s.targets.as_ref().unwrap().iter().map(|t| t[0]).collect();
        for (a, b) in firsts.iter().zip([-0.4, -0.2, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(s.label, Some(2));
        let mean = s.global_target.unwrap();
        assert!((mean[0] - (-0.15)).abs() < 1e-12);

        let frontal = build_pose_training_sample(&set, 3, &g, &norm).unwrap();
        let t = frontal.targets.unwrap();
        assert!(t.iter().all(|x| *x == t[0]));
        assert_eq!(frontal.global_target.unwrap(), t[0]);
    }

    #[test]
    fn missing_pose_is_named() {
        let g = PoseGrid::standard();
        let mut set = subject(&[0.1; 7]);
        set.features.remove(&2);
        let err = build_pose_training_sample(&set, 0, &g, &identity_norm(2)).unwrap_err();
        assert!(err.to_string().contains("-15°"), "{err}");
        assert!(build_pose_training_sample(&set, 5, &g, &identity_norm(2)).is_ok());
    }

    #[test]
    fn frontal_switch_drops_frontal_inputs() {
        let g = PoseGrid::standard();
        let sets = vec![subject(&[0.1; 7])];
        let norm = identity_norm(2);
        assert_eq!(pose_training_samples(&sets, &g, &norm, true).unwrap().len(), 7);
        assert_eq!(pose_training_samples(&sets, &g, &norm, false).unwrap().len(), 6);
    }

    #[test]
    fn test_sequence_clamps_out_of_range() {
        let g = PoseGrid::standard();
        let norm = Normalizer::from_bounds(Vector::from(vec![0.0, 0.0]), Vector::from(vec![10.0, 2.0])).unwrap();
        let s = build_pose_test_sequence(&Vector::from(vec![5.0, 3.0]), &norm, &g).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.inputs.iter().all(|x| *x == s.inputs[0]));
        assert!(s.targets.is_none() && s.global_target.is_none() && s.label.is_none());
        // 3.0 lies above max 2.0: -0.9 + 1.8·1.5 = 1.8 → clamped to 0.9.
        assert_eq!(s.inputs[0].as_slice(), &[0.0, 0.9]);
        let low = norm.apply(&Vector::from(vec![-1.0, -5.0])).unwrap();
        assert_eq!(low.as_slice(), &[-0.9, -0.9]);
    }

    #[test]
    fn normalizer_examples() {
        let single = Normalizer::fit([&Vector::from(vec![3.0, -1.0])]).unwrap();
        assert_eq!(single.apply(&Vector::from(vec![3.0, -1.0])).unwrap(), Vector::zeros(2));
        assert_eq!(single.apply(&Vector::from(vec![7.0, 2.0])).unwrap(), Vector::zeros(2));

        let n = Normalizer::fit([&Vector::from(vec![0.0]), &Vector::from(vec![10.0])]).unwrap();
        assert!(n.apply(&Vector::from(vec![5.0])).unwrap()[0].abs() < 1e-15);
        assert_eq!(n.apply(&Vector::from(vec![10.0])).unwrap()[0], 0.9);
        assert_eq!(n.apply(&Vector::from(vec![0.0])).unwrap()[0], -0.9);
        for x in [0.0, 1.25, 3.3, 9.99, 10.0] {
            let back = n.invert(&n.apply(&Vector::from(vec![x])).unwrap()).unwrap()[0];
            assert!((back - x).abs() < 1e-12, "{x} -> {back}");
        }
        assert!(matches!(fit_normalizer(&Vec::<Vector>::new()), Err(Error::Empty(_))));
        assert!(n.apply(&Vector::zeros(2)).is_err());
    }

    #[test]
    fn clip_cutting() {
        let lens = |n, c| clip_ranges(n, c).into_iter().map(|r| r.len()).collect::<Vec<_>>();
        assert_eq!(lens(25, 10), vec![10, 10, 5]);
        assert_eq!(lens(24, 10), vec![10, 10]);
        assert_eq!(lens(7, 10), vec![7]);
        assert_eq!(lens(30, 10), vec![10, 10, 10]);
        assert_eq!(lens(1, 1), vec![1]);
        assert!(clip_ranges(0, 10).is_empty());
    }

    #[test]
    fn video_clips_target_the_clip_mean() {
        let frames: Vec<Vector> = (0..25).map(|i| Vector::from(vec![i as f64 / 40.0, 0.1])).collect();
        let track = VideoTrack { subject_id: 4, frames };
        let clips = build_video_clips(&track, 10, &identity_norm(2)).unwrap();
        assert_eq!(clips.len(), 3);
        for c in &clips {
            let mean = mean_of(&c.inputs).unwrap();
            assert!(c.targets.as_ref().unwrap().iter().all(|t| *t == mean));
            assert_eq!(c.label, Some(4));
            assert!(c.global_target.is_none());
        }

        let same = VideoTrack { subject_id: 0, frames: vec![Vector::from(vec![0.3, -0.2]); 10] };
        let clip = &build_video_clips(&same, 10, &identity_norm(2)).unwrap()[0];
        for (x, t) in clip.inputs.iter().zip(clip.targets.as_ref().unwrap()) {
            for (a, b) in x.iter().zip(t.iter()) {
                assert!((a - b).abs() < 1e-15);
            }
        }

        let empty = VideoTrack { subject_id: 0, frames: vec![] };
        assert!(matches!(build_video_clips(&empty, 10, &identity_norm(2)), Err(Error::Empty(_))));
    }

    #[test]
    fn synth_pose_is_deterministic_and_split() {
        let cfg = PoseSynthConfig::new(9, 6, 0.1, 5);
        let a = synth_pose_dataset(&cfg).unwrap();
        assert_eq!(a, synth_pose_dataset(&cfg).unwrap());
        assert_eq!(a.train.len(), 5);
        assert_eq!(a.test.len(), 4);
        assert_eq!(a.test[0].subject_id, 5);
        assert!(a.all_subjects().all(|s| s.features.len() == 7));
        assert!(synth_pose_dataset(&PoseSynthConfig::new(3, 6, 0.1, 5)).is_err());
        assert!(synth_pose_dataset(&PoseSynthConfig::new(8, 3, 0.1, 5)).is_err());
    }

    #[test]
    fn synth_pose_noiseless_frontal_has_no_offset_or_mixing() {
        let mut cfg = PoseSynthConfig::new(4, 5, 0.0, 8);
        cfg.pose_shift = 0.0;
        cfg.pose_mix = 0.0;
        let ds = synth_pose_dataset(&cfg).unwrap();
        for s in ds.all_subjects() {
            let f = &s.features[&3];
            assert!(s.features.values().all(|x| x == f));
        }
    }

    #[test]
    fn synth_video_shapes() {
        let cfg = VideoSynthConfig::new(10, 3, 25, 8, 0.1, 1);
        let tracks = synth_video_dataset(&cfg).unwrap();
        assert_eq!(tracks.len(), 30);
        assert!(tracks.iter().all(|t| t.frames.len() == 25));
        assert_eq!(tracks, synth_video_dataset(&cfg).unwrap());

        let one = synth_video_dataset(&VideoSynthConfig::new(2, 1, 1, 4, 0.1, 1)).unwrap();
        assert!(one.iter().all(|t| t.frames.len() == 1));

        let mut still = VideoSynthConfig::new(3, 2, 12, 4, 0.0, 9);
        still.walk_step = 0.0;
        for t in synth_video_dataset(&still).unwrap() {
            assert!(t.frames.iter().all(|f| *f == t.frames[0]));
        }
    }
}
