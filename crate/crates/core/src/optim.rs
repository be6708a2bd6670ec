//! Initialization, update rules and the epoch loop.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bptt::{loss_and_gradients, Gradients};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::model::{Head, LossBreakdown, ModelParams, SequenceSample};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    Sgd { momentum: f64 },
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn sgd(momentum: f64) -> Self {
        Optimizer::Sgd { momentum }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Optimizer::Sgd { .. } => "sgd",
            Optimizer::Adam { .. } => "adam",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub alpha: f64,
    pub beta: f64,
    pub hidden: usize,
    pub optimizer: Optimizer,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub init_scale: f64,
    /// Size of the softmax head. `None` builds one only when `beta > 0`,
    /// sized from the largest label in the dataset.
    pub classes: Option<usize>,
    /// Worker threads for per-sample gradients within a batch. Results are
    /// bit-reproducible for a fixed thread count.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.0,
            beta: 0.0,
            hidden: 64,
            optimizer: Optimizer::adam(),
            learning_rate: 1e-3,
            batch_size: 8,
            epochs: 200,
            seed: 0,
            init_scale: 1.0,
            classes: None,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be >= 0, got {}", self.beta));
        }
        if self.hidden == 0 {
            return bad("hidden size must be >= 1".into());
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be >= 0, got {}", self.learning_rate));
        }
        if self.batch_size == 0 {
            return bad("batch size must be >= 1".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1".into());
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return bad(format!("init scale must be >= 0, got {}", self.init_scale));
        }
        if self.threads == 0 {
            return bad("threads must be >= 1".into());
        }
        match self.optimizer {
            Optimizer::Sgd { momentum } if !(0.0..1.0).contains(&momentum) => {
                bad(format!("momentum must lie in [0, 1), got {momentum}"))
            }
            Optimizer::Adam { beta1, beta2, epsilon }
                if !(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0 && epsilon > 0.0) =>
            {
                bad(format!(
                    "adam needs betas in (0,1) and epsilon > 0, got {beta1}, {beta2}, {epsilon}"
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Mean losses over the dataset, one record per completed epoch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub epochs: Vec<LossBreakdown>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn last(&self) -> Option<&LossBreakdown> {
        self.epochs.last()
    }
}

/// Weights are i.i.d. uniform on `±init_scale/√fan_in`; biases start at zero.
pub fn init_params(d: usize, h: usize, c: usize, seed: u64, init_scale: f64) -> ModelParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |rows: usize, cols: usize, fan_in: usize| {
        let bound = init_scale / (fan_in as f64).sqrt();
        Matrix::from_fn(rows, cols, |_, _| {
            let u: f64 = rng.random();
            if bound == 0.0 {
                0.0
            } else {
                bound * (2.0 * u - 1.0)
            }
        })
    };
    let u = uniform(h, d, d);
    let w = uniform(h, h, h);
    let v = uniform(d, h, h);
    let head = (c > 0).then(|| Head {
        g: uniform(c, h, h),
        b3: Vector::zeros(c),
    });
    ModelParams {
        u,
        w,
        b1: Vector::zeros(h),
        v,
        b2: Vector::zeros(d),
        head,
    }
}

fn check_congruent(p: &ModelParams, g: &Gradients) -> Result<()> {
    let pb = p.blocks();
    let gb = g.blocks();
    if pb.len() != gb.len() || pb.iter().zip(&gb).any(|((_, a), (_, b))| a.len() != b.len()) {
        return Err(Error::shape(
            "parameter update",
            format!("{} blocks", pb.len()),
            format!("{} gradient blocks", gb.len()),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgdState {
    pub velocity: Gradients,
}

impl SgdState {
    pub fn new(p: &ModelParams) -> Self {
        SgdState {
            velocity: Gradients::zeros_like(p),
        }
    }
}

/// Classical momentum: `v ← μ·v − lr·g`, `p ← p + v`.
pub fn sgd_step(
    p: &mut ModelParams,
    g: &Gradients,
    lr: f64,
    momentum: f64,
    state: &mut SgdState,
) -> Result<()> {
    check_congruent(p, g)?;
    check_congruent(p, &state.velocity)?;
    let grads = g.blocks();
    let mut vel = state.velocity.blocks_mut();
    for (((_, param), (_, grad)), (_, v)) in p.blocks_mut().into_iter().zip(&grads).zip(&mut vel) {
        for ((x, &dx), vx) in param.iter_mut().zip(grad.iter()).zip(v.iter_mut()) {
            *vx = momentum * *vx - lr * dx;
            *x += *vx;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Gradients,
    pub v: Gradients,
    /// Number of updates applied so far.
    pub t: u64,
}

impl AdamState {
    pub fn new(p: &ModelParams) -> Self {
        AdamState {
            m: Gradients::zeros_like(p),
            v: Gradients::zeros_like(p),
            t: 0,
        }
    }
}

/// Bias-corrected Adam update. Advances `state.t` before applying, so the
/// first call uses `t = 1`.
pub fn adam_step(
    p: &mut ModelParams,
    g: &Gradients,
    state: &mut AdamState,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) -> Result<()> {
    check_congruent(p, g)?;
    check_congruent(p, &state.m)?;
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - beta1.powi(t);
    let c2 = 1.0 - beta2.powi(t);
    let grads = g.blocks();
    let mut ms = state.m.blocks_mut();
    let mut vs = state.v.blocks_mut();
    for ((((_, param), (_, grad)), (_, m)), (_, v)) in p
        .blocks_mut()
        .into_iter()
        .zip(&grads)
        .zip(&mut ms)
        .zip(&mut vs)
    {
        for (((x, &dx), mx), vx) in param
            .iter_mut()
            .zip(grad.iter())
            .zip(m.iter_mut())
            .zip(v.iter_mut())
        {
            *mx = beta1 * *mx + (1.0 - beta1) * dx;
            *vx = beta2 * *vx + (1.0 - beta2) * dx * dx;
            let m_hat = *mx / c1;
            let v_hat = *vx / c2;
            *x -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

enum OptimizerState {
    Sgd(SgdState),
    Adam(AdamState),
}

impl OptimizerState {
    fn new(opt: &Optimizer, p: &ModelParams) -> Self {
        match opt {
            Optimizer::Sgd { .. } => OptimizerState::Sgd(SgdState::new(p)),
            Optimizer::Adam { .. } => OptimizerState::Adam(AdamState::new(p)),
        }
    }

    fn step(&mut self, opt: &Optimizer, lr: f64, p: &mut ModelParams, g: &Gradients) -> Result<()> {
        match (self, *opt) {
            (OptimizerState::Sgd(s), Optimizer::Sgd { momentum }) => sgd_step(p, g, lr, momentum, s),
            (OptimizerState::Adam(s), Optimizer::Adam { beta1, beta2, epsilon }) => {
                adam_step(p, g, s, lr, beta1, beta2, epsilon)
            }
            _ => unreachable!("optimizer state built from the same config"),
        }
    }
}

/// Checks that every sample fits one model and carries what the weights need.
/// Returns `(d, classes)`.
pub fn check_dataset(dataset: &[SequenceSample], cfg: &TrainConfig) -> Result<(usize, usize)> {
    let first = dataset.first().ok_or(Error::Empty("training dataset"))?;
    let d = first
        .inputs
        .first()
        .ok_or(Error::Dataset("sample 0 has no inputs".into()))?
        .len();
    let max_label = dataset.iter().filter_map(|s| s.label).max();
    let classes = match cfg.classes {
        Some(c) => c,
        None if cfg.beta > 0.0 => max_label.map_or(0, |l| l + 1),
        None => 0,
    };
    if classes == 1 {
        return Err(Error::InvalidArgument(
            "a softmax head needs at least 2 classes".into(),
        ));
    }
    for (i, s) in dataset.iter().enumerate() {
        s.validate(d, classes)
            .map_err(|e| Error::Dataset(format!("sample {i}: {e}")))?;
        if s.targets.is_none() {
            return Err(Error::Dataset(format!("sample {i}: missing `targets`")));
        }
        if cfg.alpha > 0.0 && s.global_target.is_none() {
            return Err(Error::Dataset(format!("sample {i}: missing `global_target`")));
        }
        if cfg.beta > 0.0 && s.label.is_none() {
            return Err(Error::Dataset(format!("sample {i}: missing `label`")));
        }
    }
    if cfg.beta > 0.0 && classes == 0 {
        return Err(Error::NoHead);
    }
    Ok((d, classes))
}

/// Mean loss breakdown over a dataset.
pub fn evaluate_dataset(
    dataset: &[SequenceSample],
    p: &ModelParams,
    alpha: f64,
    beta: f64,
) -> Result<LossBreakdown> {
    if dataset.is_empty() {
        return Err(Error::Empty("evaluate_dataset"));
    }
    let mut acc = LossBreakdown::default();
    for s in dataset {
        let l = crate::model::total_loss(s, p, alpha, beta)?;
        acc.f1 += l.f1;
        acc.f2 += l.f2;
        acc.f3 += l.f3;
        acc.total += l.total;
    }
    let n = dataset.len() as f64;
    Ok(LossBreakdown {
        f1: acc.f1 / n,
        f2: acc.f2 / n,
        f3: acc.f3 / n,
        total: acc.total / n,
    })
}

/// Mean gradient over `batch`, split across `threads` contiguous chunks
/// whose partial sums are combined in chunk order.
pub fn batch_gradient(
    batch: &[&SequenceSample],
    p: &ModelParams,
    alpha: f64,
    beta: f64,
    threads: usize,
) -> Result<Gradients> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    let sum_chunk = |chunk: &[&SequenceSample]| -> Result<Gradients> {
        let mut acc = Gradients::zeros_like(p);
        for s in chunk {
            let (_, g) = loss_and_gradients(s, p, alpha, beta)?;
            acc.add_scaled(1.0, &g)?;
        }
        Ok(acc)
    };
    let workers = threads.clamp(1, batch.len());
    let mut total = if workers == 1 {
        sum_chunk(batch)?
    } else {
        let chunk_len = batch.len().div_ceil(workers);
        let partials: Vec<Result<Gradients>> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .chunks(chunk_len)
                .map(|chunk| scope.spawn(move || sum_chunk(chunk)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("gradient worker panicked"))
                .collect()
        });
        let mut acc = Gradients::zeros_like(p);
        for part in partials {
            acc.add_scaled(1.0, &part?)?;
        }
        acc
    };
    total.scale(1.0 / batch.len() as f64);
    Ok(total)
}

pub fn train(dataset: &[SequenceSample], cfg: &TrainConfig) -> Result<(ModelParams, TrainHistory)> {
    cfg.validate()?;
    let (d, classes) = check_dataset(dataset, cfg)?;
    let init = init_params(d, cfg.hidden, classes, cfg.seed, cfg.init_scale);
    train_from(dataset, cfg, init)
}

/// Runs the epoch loop from given starting parameters.
pub fn train_from(
    dataset: &[SequenceSample],
    cfg: &TrainConfig,
    init: ModelParams,
) -> Result<(ModelParams, TrainHistory)> {
    cfg.validate()?;
    let (d, classes) = check_dataset(dataset, cfg)?;
    init.validate()?;
    if init.input_dim() != d || init.classes() != classes {
        return Err(Error::shape(
            "train_from",
            format!("model d={} c={}", init.input_dim(), init.classes()),
            format!("dataset d={d} c={classes}"),
        ));
    }
    let mut params = init;
    let mut state = OptimizerState::new(&cfg.optimizer, &params);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffle_rng.set_stream(1);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut history = TrainHistory::default();

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        for idx in order.chunks(cfg.batch_size) {
            let batch: Vec<&SequenceSample> = idx.iter().map(|&i| &dataset[i]).collect();
            let grad = batch_gradient(&batch, &params, cfg.alpha, cfg.beta, cfg.threads)?;
            if !grad.is_finite() {
                return Err(Error::NonFinite("gradient"));
            }
            state.step(&cfg.optimizer, cfg.learning_rate, &mut params, &grad)?;
        }
        let loss = evaluate_dataset(dataset, &params, cfg.alpha, cfg.beta)?;
        if !loss.is_finite() {
            return Err(Error::NonFinite("training loss"));
        }
        log::info!(
            "epoch {:>4}  f1 {:.6}  f2 {:.6}  f3 {:.6}  total {:.6}",
            epoch + 1,
            loss.f1,
            loss.f2,
            loss.f3,
            loss.total
        );
        history.epochs.push(loss);
    }
    Ok((params, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_params(x: f64) -> ModelParams {
        let mut p = ModelParams::zeros(1, 1, 0);
        p.u[(0, 0)] = x;
        p
    }

    fn scalar_grad(p: &ModelParams, g: f64) -> Gradients {
        let mut grads = Gradients::zeros_like(p);
        grads.du[(0, 0)] = g;
        grads
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = init_params(3, 4, 2, 42, 1.0);
        let b = init_params(3, 4, 2, 42, 1.0);
        assert_eq!(a, b);
        assert_ne!(a, init_params(3, 4, 2, 43, 1.0));
        let bound = 1.0 / 3f64.sqrt();
        assert!(a.u.as_slice().iter().all(|x| x.abs() <= bound));
        assert!(a.w.as_slice().iter().all(|x| x.abs() <= 0.5));
        assert!(a.b1.iter().chain(a.b2.iter()).all(|&x| x == 0.0));
        assert_eq!(a.classes(), 2);
        let z = init_params(3, 4, 0, 42, 0.0);
        assert_eq!(z, ModelParams::zeros(3, 4, 0));
    }

    #[test]
    fn sgd_examples() {
        let mut p = scalar_params(1.0);
        let mut st = SgdState::new(&p);
        let g = scalar_grad(&p, 0.0);
        sgd_step(&mut p, &g, 0.1, 0.9, &mut st).unwrap();
        assert_eq!(p, scalar_params(1.0));

        let mut st = SgdState::new(&p);
        let g = scalar_grad(&p, 2.0);
        sgd_step(&mut p, &g, 0.1, 0.0, &mut st).unwrap();
        assert!((p.u[(0, 0)] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn sgd_momentum_accumulates() {
        let mut p = scalar_params(0.0);
        let mut st = SgdState::new(&p);
        let g = scalar_grad(&p, 1.0);
        sgd_step(&mut p, &g, 0.1, 0.5, &mut st).unwrap();
        sgd_step(&mut p, &g, 0.1, 0.5, &mut st).unwrap();
        // v1 = -0.1, v2 = 0.5·(-0.1) - 0.1 = -0.15
        assert!((p.u[(0, 0)] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn adam_zero_gradient_is_noop() {
        let mut p = scalar_params(0.3);
        let mut st = AdamState::new(&p);
        let g = scalar_grad(&p, 0.0);
        adam_step(&mut p, &g, &mut st, 0.01, 0.9, 0.999, 1e-8).unwrap();
        assert_eq!(p, scalar_params(0.3));
        assert_eq!(st.t, 1);
    }

    #[test]
    fn adam_first_step_has_magnitude_lr() {
        for gv in [3.0, -0.02, 150.0] {
            let mut p = scalar_params(0.0);
            let mut st = AdamState::new(&p);
            let g = scalar_grad(&p, gv);
            adam_step(&mut p, &g, &mut st, 0.01, 0.9, 0.999, 1e-8).unwrap();
            // m̂ = g, v̂ = g², so the step is lr·g/(|g| + eps).
            let expect = -0.01 * gv / (gv.abs() + 1e-8);
            assert!((p.u[(0, 0)] - expect).abs() < 1e-15, "g={gv}");
        }
    }

    #[test]
    fn adam_is_scale_invariant_at_steady_state() {
        let mut p = ModelParams::zeros(2, 1, 0);
        let mut st = AdamState::new(&p);
        let mut g = Gradients::zeros_like(&p);
        g.du[(0, 0)] = 0.5;
        g.du[(0, 1)] = 5.0;
        for _ in 0..200 {
            adam_step(&mut p, &g, &mut st, 1e-3, 0.9, 0.999, 1e-8).unwrap();
        }
        let (a, b) = (p.u[(0, 0)], p.u[(0, 1)]);
        assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn incongruent_update_is_a_shape_error() {
        let mut p = ModelParams::zeros(2, 2, 0);
        let other = Gradients::zeros_like(&ModelParams::zeros(2, 3, 0));
        let mut st = SgdState::new(&p);
        assert!(matches!(sgd_step(&mut p, &other, 0.1, 0.0, &mut st), Err(Error::Shape { .. })));
    }

    fn toy_dataset(n: usize, d: usize) -> Vec<SequenceSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        (0..n)
            .map(|i| {
                let x = Vector::from((0..d).map(|_| rng.random_range(-0.8..0.8)).collect::<Vec<_>>());
                let t = Vector::from((0..d).map(|_| rng.random_range(-0.8..0.8)).collect::<Vec<_>>());
                SequenceSample {
                    inputs: vec![x; 4],
                    targets: Some(vec![t.clone(); 4]),
                    global_target: Some(t),
                    label: Some(i % 3),
                }
            })
            .collect()
    }

    #[test]
    fn zero_learning_rate_keeps_init() {
        let data = toy_dataset(5, 3);
        let cfg = TrainConfig {
            hidden: 4,
            epochs: 1,
            learning_rate: 0.0,
            optimizer: Optimizer::sgd(0.0),
            seed: 3,
            ..Default::default()
        };
        let (p, hist) = train(&data, &cfg).unwrap();
        assert_eq!(p, init_params(3, 4, 0, 3, 1.0));
        assert_eq!(hist.len(), 1);
    }

    #[test]
    fn config_validation() {
        let ok = TrainConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            TrainConfig { epochs: 0, ..ok.clone() },
            TrainConfig { batch_size: 0, ..ok.clone() },
            TrainConfig { alpha: -1.0, ..ok.clone() },
            TrainConfig {
                optimizer: Optimizer::Adam { beta1: 1.0, beta2: 0.999, epsilon: 1e-8 },
                ..ok.clone()
            },
            TrainConfig {
                optimizer: Optimizer::Adam { beta1: 0.9, beta2: 0.999, epsilon: 0.0 },
                ..ok.clone()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn dataset_checks_name_the_problem() {
        let mut data = toy_dataset(3, 2);
        data[1].targets = None;
        let err = train(&data, &TrainConfig { hidden: 2, epochs: 1, ..Default::default() }).unwrap_err();
        assert!(err.to_string().contains("sample 1"), "{err}");

        let mut data = toy_dataset(3, 2);
        data[2].label = None;
        let cfg = TrainConfig { hidden: 2, epochs: 1, beta: 1.0, ..Default::default() };
        assert!(train(&data, &cfg).unwrap_err().to_string().contains("label"));

        let mut data = toy_dataset(3, 2);
        data[0].inputs[0] = Vector::zeros(5);
        assert!(matches!(
            train(&data, &TrainConfig { hidden: 2, epochs: 1, ..Default::default() }),
            Err(Error::Dataset(_))
        ));
    }

    #[test]
    fn threaded_batches_match_single_thread_closely() {
        let data = toy_dataset(12, 3);
        let p = init_params(3, 5, 3, 1, 1.0);
        let batch: Vec<&SequenceSample> = data.iter().collect();
        let one = batch_gradient(&batch, &p, 0.1, 1.0, 1).unwrap();
        let four = batch_gradient(&batch, &p, 0.1, 1.0, 4).unwrap();
        for ((_, a), (_, b)) in one.blocks().iter().zip(four.blocks().iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
