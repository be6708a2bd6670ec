// Cross-pose recognition on synthetic features: frontal gallery, every
// other pose as probe, RRNN embeddings against raw-feature matching.

use rrnn::eval::{pose_experiment, raw_pose_experiment, train_pose_model, Metric};
use rrnn::optim::TrainConfig;
use rrnn::protocols::{synth_pose_dataset, PoseSynthConfig};

fn main() -> rrnn::Result<()> {
    let data = synth_pose_dataset(&PoseSynthConfig::new(40, 16, 0.2, 0))?;
    let grid = &data.grid;
    let cfg = TrainConfig {
        alpha: 0.1,
        learning_rate: 3e-3,
        ..TrainConfig::default()
    };
    let (model, norm, history) = train_pose_model(&data.train, grid, &cfg, true)?;
    let (first, last) = (history.epochs[0].total, history.last().unwrap().total);
    println!("trained {} epochs on {} subjects: loss {first:.4} -> {last:.4}\n", history.len(), data.train.len());

    let frontal = grid.frontal_index();
    let raw = raw_pose_experiment(&data.test, grid, frontal, 1, Metric::Euclidean)?;
    let rrnn = pose_experiment(&model, &norm, &data.test, grid, frontal, 1, Metric::Euclidean)?;
    print!("{}", raw.render_table(grid, "raw"));
    print!("{}", rrnn.render_table(grid, "RRNN"));
    Ok(())
}
