// Video recognition with the discriminative loss: clips of 10 frames,
// posteriors averaged over every frame of a video, ten random splits.

use rrnn::eval::{video_experiment, VideoProtocol};
use rrnn::optim::TrainConfig;
use rrnn::protocols::{synth_video_dataset, VideoSynthConfig};

fn main() -> rrnn::Result<()> {
    let tracks = synth_video_dataset(&VideoSynthConfig::new(10, 9, 25, 16, 0.5, 1))?;
    let cfg = TrainConfig {
        alpha: 0.0,
        beta: 1.0,
        hidden: 32,
        learning_rate: 3e-3,
        epochs: 60,
        ..TrainConfig::default()
    };
    let report = video_experiment(&tracks, &VideoProtocol::default(), &cfg, 10, 7)?;
    print!("{}", report.render_table("RRNN"));
    Ok(())
}
