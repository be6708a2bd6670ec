// Loss-weight ablations: sequence-statistic weight for stills,
// discriminative weight for video. All cells share one seed.

use rrnn::cli::{ablate_pose, ablate_video, render_ablation};
use rrnn::eval::{Metric, VideoProtocol};
use rrnn::optim::TrainConfig;
use rrnn::protocols::{synth_pose_dataset, synth_video_dataset, PoseSynthConfig, VideoSynthConfig};

fn main() -> rrnn::Result<()> {
    let pose = synth_pose_dataset(&PoseSynthConfig::new(40, 16, 0.2, 2))?;
    let base = TrainConfig {
        learning_rate: 3e-3,
        ..TrainConfig::default()
    };
    let frontal = pose.grid.frontal_index();
    let rows = ablate_pose(
        &pose.train,
        &pose.test,
        &pose.grid,
        &base,
        &[(0.0, 0.0), (0.1, 0.0)],
        true,
        frontal,
        1,
        Metric::Euclidean,
    )?;
    println!("stills, frontal gallery");
    print!("{}", render_ablation(&rows));

    let tracks = synth_video_dataset(&VideoSynthConfig::new(10, 9, 25, 16, 0.5, 3))?;
    let base = TrainConfig {
        hidden: 32,
        learning_rate: 3e-3,
        epochs: 60,
        ..TrainConfig::default()
    };
    let rows = ablate_video(&tracks, &VideoProtocol::default(), &base, &[(0.0, 0.0), (0.0, 1.0)], 5)?;
    println!("\nvideo, 5 trials");
    print!("{}", render_ablation(&rows));
    Ok(())
}
