// Feature files and model files: write, read back, and confirm the model
// reproduces its outputs bit for bit.

use rrnn::eval::embed;
use rrnn::format::{FeatureSet, ModelFile, Task};
use rrnn::optim::TrainConfig;
use rrnn::protocols::{build_video_clips, synth_video_dataset, VideoSynthConfig};

fn main() -> rrnn::Result<()> {
    let dir = std::env::temp_dir().join(format!("rrnn-dataset-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| rrnn::Error::Io { path: dir.clone(), source: e })?;

    let tracks = synth_video_dataset(&VideoSynthConfig::new(4, 4, 12, 6, 0.3, 5))?;
    let features = FeatureSet::from_video_tracks(6, &tracks)?;
    let data_path = dir.join("tracks.txt");
    features.write(&data_path)?;
    let loaded = FeatureSet::read(&data_path)?;
    let labels = loaded.labels();
    let tracks = loaded.video_tracks(&labels)?;
    println!("{} records, {} tracks, labels {:?}", loaded.records.len(), tracks.len(), labels);

    let cfg = TrainConfig {
        beta: 1.0,
        hidden: 8,
        epochs: 20,
        learning_rate: 1e-2,
        classes: Some(labels.len()),
        ..TrainConfig::default()
    };
    let refs: Vec<_> = tracks.iter().collect();
    let (params, norm, _) = rrnn::eval::train_video_model(&refs, 5, &cfg)?;
    let model = ModelFile {
        task: Task::Video,
        params,
        norm,
        labels,
        config: cfg,
        clip_len: 5,
        include_frontal: true,
    };
    let model_path = dir.join("model.txt");
    model.write(&model_path)?;
    let back = ModelFile::read(&model_path)?;

    let mut identical = 0;
    let mut total = 0;
    for t in &tracks {
        for clip in build_video_clips(t, 5, &model.norm)? {
            let a = embed(&clip, &model.params)?;
            let b = embed(&clip, &back.params)?;
            total += 1;
            if a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()) {
                identical += 1;
            }
        }
    }
    println!("model file {} bytes; {identical}/{total} clip embeddings bit-identical after reload",
        std::fs::metadata(&model_path).map(|m| m.len()).unwrap_or(0));
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
