//! Backpropagation through time for the full objective, and a
//! central-difference checker for it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{mean_of, tanh_prime_from_output, Matrix, Vector};
use crate::model::{
    class_posterior, forward, total_loss, ForwardTrace, ModelParams, ParamName, SequenceSample,
};

/// One gradient block per parameter block, shape-congruent with [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub du: Matrix,
    pub dw: Matrix,
    pub db1: Vector,
    pub dv: Matrix,
    pub db2: Vector,
    pub dg: Option<Matrix>,
    pub db3: Option<Vector>,
}

impl Gradients {
    pub fn zeros_like(p: &ModelParams) -> Self {
        Gradients {
            du: Matrix::zeros(p.u.rows(), p.u.cols()),
            dw: Matrix::zeros(p.w.rows(), p.w.cols()),
            db1: Vector::zeros(p.b1.len()),
            dv: Matrix::zeros(p.v.rows(), p.v.cols()),
            db2: Vector::zeros(p.b2.len()),
            dg: p.head.as_ref().map(|h| Matrix::zeros(h.g.rows(), h.g.cols())),
            db3: p.head.as_ref().map(|h| Vector::zeros(h.b3.len())),
        }
    }

    pub fn blocks(&self) -> Vec<(ParamName, &[f64])> {
        let mut out = vec![
            (ParamName::U, self.du.as_slice()),
            (ParamName::W, self.dw.as_slice()),
            (ParamName::B1, self.db1.as_slice()),
            (ParamName::V, self.dv.as_slice()),
            (ParamName::B2, self.db2.as_slice()),
        ];
        if let (Some(dg), Some(db3)) = (&self.dg, &self.db3) {
            out.push((ParamName::G, dg.as_slice()));
            out.push((ParamName::B3, db3.as_slice()));
        }
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<(ParamName, &mut [f64])> {
        let mut out = vec![
            (ParamName::U, self.du.as_mut_slice()),
            (ParamName::W, self.dw.as_mut_slice()),
            (ParamName::B1, self.db1.as_mut_slice()),
            (ParamName::V, self.dv.as_mut_slice()),
            (ParamName::B2, self.db2.as_mut_slice()),
        ];
        if let (Some(dg), Some(db3)) = (&mut self.dg, &mut self.db3) {
            out.push((ParamName::G, dg.as_mut_slice()));
            out.push((ParamName::B3, db3.as_mut_slice()));
        }
        out
    }

    pub fn block(&self, name: ParamName) -> Option<&[f64]> {
        self.blocks().into_iter().find(|(n, _)| *n == name).map(|(_, b)| b)
    }

    pub fn block_mut(&mut self, name: ParamName) -> Option<&mut [f64]> {
        self.blocks_mut().into_iter().find(|(n, _)| *n == name).map(|(_, b)| b)
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, scale: f64, other: &Gradients) -> Result<()> {
        let theirs = other.blocks();
        let mut mine = self.blocks_mut();
        if mine.len() != theirs.len() {
            return Err(Error::shape("Gradients::add_scaled", mine.len(), theirs.len()));
        }
        for ((name, a), (_, b)) in mine.iter_mut().zip(&theirs) {
            if a.len() != b.len() {
                return Err(Error::shape("Gradients::add_scaled", name, b.len()));
            }
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x += scale * y;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        for (_, b) in self.blocks_mut() {
            for x in b {
                *x *= s;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|(_, b)| b.iter().all(|x| x.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks()
            .iter()
            .flat_map(|(_, b)| b.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Per-term weights of the objective `w1·f1 + w2·f2 + w3·f3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub reconstruction: f64,
    pub sequence: f64,
    pub discriminative: f64,
}

impl LossWeights {
    pub fn objective(alpha: f64, beta: f64) -> Self {
        LossWeights {
            reconstruction: 1.0,
            sequence: alpha,
            discriminative: beta,
        }
    }
}

/// Gradient of `f1 + α·f2 + β·f3` for one sample.
pub fn backward(
    sample: &SequenceSample,
    p: &ModelParams,
    trace: &ForwardTrace,
    alpha: f64,
    beta: f64,
) -> Result<Gradients> {
    backward_terms(sample, p, trace, LossWeights::objective(alpha, beta))
}

/// Gradient of an arbitrarily weighted combination of the three terms.
/// Terms with zero weight are skipped entirely.
pub fn backward_terms(
    sample: &SequenceSample,
    p: &ModelParams,
    trace: &ForwardTrace,
    weights: LossWeights,
) -> Result<Gradients> {
    let steps = sample.len();
    if trace.len() != steps || trace.decoded.len() != steps || steps == 0 {
        return Err(Error::shape(
            "backward",
            format!("trace T={}", trace.len()),
            format!("sample T={steps}"),
        ));
    }
    let (d, h) = (p.input_dim(), p.hidden_dim());
    let mut grads = Gradients::zeros_like(p);

    // Error signal on each decoded output x̃_t.
    let mut d_decoded = vec![Vector::zeros(d); steps];
    if weights.reconstruction != 0.0 {
        let targets = sample.targets.as_ref().ok_or(Error::MissingField("targets"))?;
        if targets.len() != steps {
            return Err(Error::shape("backward targets", targets.len(), steps));
        }
        for (dx, (x, t)) in d_decoded.iter_mut().zip(trace.decoded.iter().zip(targets)) {
            dx.axpy(2.0 * weights.reconstruction, &x.sub(t)?)?;
        }
    }
    if weights.sequence != 0.0 {
        let g = sample
            .global_target
            .as_ref()
            .ok_or(Error::MissingField("global_target"))?;
        let residual = mean_of(&trace.decoded)?.sub(g)?;
        let share = 2.0 * weights.sequence / steps as f64;
        for dx in &mut d_decoded {
            dx.axpy(share, &residual)?;
        }
    }

    // Error signal on each hidden state from the decoder and classifier paths.
    let mut d_hidden = vec![Vector::zeros(h); steps];
    for t in 0..steps {
        let d_pre = d_decoded[t].hadamard(&tanh_prime_from_output(&trace.decoded[t]))?;
        grads.dv.add_outer(1.0, &d_pre, &trace.hidden[t])?;
        grads.db2.axpy(1.0, &d_pre)?;
        d_hidden[t] = p.v.matvec_transposed(&d_pre)?;
    }
    if weights.discriminative != 0.0 {
        let label = sample.label.ok_or(Error::MissingField("label"))?;
        let head = p.head.as_ref().ok_or(Error::NoHead)?;
        let classes = head.b3.len();
        if label >= classes {
            return Err(Error::LabelOutOfRange { label, classes });
        }
        let dg = grads.dg.as_mut().expect("head present");
        let db3 = grads.db3.as_mut().expect("head present");
        for t in 0..steps {
            let mut d_logits = class_posterior(&trace.hidden[t], p)?;
            d_logits[label] -= 1.0;
            let d_logits = d_logits.scaled(weights.discriminative);
            dg.add_outer(1.0, &d_logits, &trace.hidden[t])?;
            db3.axpy(1.0, &d_logits)?;
            d_hidden[t].axpy(1.0, &head.g.matvec_transposed(&d_logits)?)?;
        }
    }

    // Recurrent path, newest step first.
    let mut carry = Vector::zeros(h);
    for t in (0..steps).rev() {
        let mut ds = d_hidden[t].clone();
        ds.axpy(1.0, &carry)?;
        let d_pre = ds.hadamard(&tanh_prime_from_output(&trace.hidden[t]))?;
        grads.du.add_outer(1.0, &d_pre, &sample.inputs[t])?;
        grads.dw.add_outer(1.0, &d_pre, trace.previous_state(t))?;
        grads.db1.axpy(1.0, &d_pre)?;
        carry = p.w.matvec_transposed(&d_pre)?;
    }
    Ok(grads)
}

/// Runs forward and backward, returning the loss alongside its gradient.
pub fn loss_and_gradients(
    sample: &SequenceSample,
    p: &ModelParams,
    alpha: f64,
    beta: f64,
) -> Result<(crate::model::LossBreakdown, Gradients)> {
    let trace = forward(sample, p)?;
    let loss = crate::model::losses_from_trace(sample, p, &trace, alpha, beta)?;
    let grads = backward(sample, p, &trace, alpha, beta)?;
    Ok((loss, grads))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// Parameter block and flat index of the worst entry.
    pub worst: Option<(ParamName, usize)>,
    pub worst_analytic: f64,
    pub worst_numeric: f64,
    pub entries_checked: usize,
}

/// Largest relative disagreement between analytic and central-difference
/// gradients, `|a - n| / max(1, |a| + |n|)`, over every parameter entry.
pub fn grad_check(
    sample: &SequenceSample,
    p: &ModelParams,
    alpha: f64,
    beta: f64,
    step: f64,
) -> Result<f64> {
    Ok(grad_check_report(sample, p, alpha, beta, step, None)?.max_rel_error)
}

/// Like [`grad_check`], reporting where the worst entry is. `corrupt` adds
/// `+1` to every entry of the named analytic block before comparing, which
/// should always trip the checker.
pub fn grad_check_report(
    sample: &SequenceSample,
    p: &ModelParams,
    alpha: f64,
    beta: f64,
    step: f64,
    corrupt: Option<ParamName>,
) -> Result<GradCheckReport> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let trace = forward(sample, p)?;
    let mut analytic = backward(sample, p, &trace, alpha, beta)?;
    if let Some(name) = corrupt {
        let block = analytic
            .block_mut(name)
            .ok_or_else(|| Error::InvalidArgument(format!("model has no block {name}")))?;
        for x in block {
            *x += 1.0;
        }
    }

    let mut probe = p.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: None,
        worst_analytic: 0.0,
        worst_numeric: 0.0,
        entries_checked: 0,
    };
    for (name, grad_block) in analytic.blocks() {
        for (i, &a) in grad_block.iter().enumerate() {
            let original = entry_mut(&mut probe, name, i);
            let base = *original;
            *original = base + step;
            let plus = total_loss(sample, &probe, alpha, beta)?.total;
            *entry_mut(&mut probe, name, i) = base - step;
            let minus = total_loss(sample, &probe, alpha, beta)?.total;
            *entry_mut(&mut probe, name, i) = base;

            let numeric = (plus - minus) / (2.0 * step);
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1.0);
            report.entries_checked += 1;
            if rel > report.max_rel_error || report.worst.is_none() {
                report.max_rel_error = rel;
                report.worst = Some((name, i));
                report.worst_analytic = a;
                report.worst_numeric = numeric;
            }
        }
    }
    Ok(report)
}

/// Model with every entry uniform in `[-0.6, 0.6)`, seeded.
pub fn random_model(d: usize, h: usize, c: usize, seed: u64) -> ModelParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = ModelParams::zeros(d, h, c);
    for (_, b) in p.blocks_mut() {
        for x in b {
            *x = rng.random_range(-0.6..0.6);
        }
    }
    p
}

/// Fully populated sample of `steps` steps with entries in `[-0.9, 0.9)`.
/// The label is drawn from `0..c` when `c > 0`.
pub fn random_sample(d: usize, c: usize, steps: usize, seed: u64) -> SequenceSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |n: usize| -> Vec<Vector> {
        (0..n)
            .map(|_| Vector::from((0..d).map(|_| rng.random_range(-0.9..0.9)).collect::<Vec<_>>()))
            .collect()
    };
    let inputs = draw(steps);
    let targets = draw(steps);
    let global = draw(1).pop().unwrap_or_default();
    let label = (c > 0).then(|| rng.random_range(0..c));
    SequenceSample {
        inputs,
        targets: Some(targets),
        global_target: Some(global),
        label,
    }
}

fn entry_mut(p: &mut ModelParams, name: ParamName, i: usize) -> &mut f64 {
    let block = p
        .blocks_mut()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, b)| b)
        .expect("gradient blocks mirror parameter blocks");
    &mut block[i]
}
