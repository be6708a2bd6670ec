// Every gallery pose against every probe pose.

use rrnn::eval::{cross_pose_matrix, train_pose_model, Metric};
use rrnn::optim::TrainConfig;
use rrnn::protocols::{synth_pose_dataset, PoseSynthConfig};

fn main() -> rrnn::Result<()> {
    let data = synth_pose_dataset(&PoseSynthConfig::new(40, 16, 0.2, 1))?;
    let cfg = TrainConfig {
        alpha: 0.1,
        learning_rate: 3e-3,
        ..TrainConfig::default()
    };
    let (model, norm, _) = train_pose_model(&data.train, &data.grid, &cfg, true)?;
    let matrix = cross_pose_matrix(&model, &norm, &data.test, &data.grid, 1, Metric::Euclidean)?;
    print!("{}", matrix.render_table(&data.grid));
    Ok(())
}
