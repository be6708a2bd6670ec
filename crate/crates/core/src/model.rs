//! The recurrent encoder-decoder and its objective.
//!
//! Each timestep encodes `S_t = tanh(U·x_t + W·S_{t-1} + b1)` and decodes
//! `x̃_t = tanh(V·S_t + b2)`, starting from `S_0 = 0`. Three per-sequence
//! losses are available:
//!
//! * `f1`: summed squared reconstruction error against per-step targets,
//! * `f2`: squared distance between the mean decoded output and a global target,
//! * `f3`: summed negative log-likelihood of the true label under a softmax
//!   head reading the hidden states (never the decoded outputs).
//!
//! The training objective is `f1 + α·f2 + β·f3`.

use crate::error::{Error, Result};
use crate::linalg::{
    frob_sq_diff, matvec, mean_of, softmax, tanh_map, Matrix, Vector,
};

/// Softmax classifier reading the hidden state.
#[derive(Debug, Clone, PartialEq)]
pub struct Head {
    pub g: Matrix,
    pub b3: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub u: Matrix,
    pub w: Matrix,
    pub b1: Vector,
    pub v: Matrix,
    pub b2: Vector,
    pub head: Option<Head>,
}

/// Names of the parameter blocks, in serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamName {
    U,
    W,
    B1,
    V,
    B2,
    G,
    B3,
}

impl ParamName {
    pub const ALL: [ParamName; 7] = [
        ParamName::U,
        ParamName::W,
        ParamName::B1,
        ParamName::V,
        ParamName::B2,
        ParamName::G,
        ParamName::B3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::U => "U",
            ParamName::W => "W",
            ParamName::B1 => "b1",
            ParamName::V => "V",
            ParamName::B2 => "b2",
            ParamName::G => "G",
            ParamName::B3 => "b3",
        }
    }

    /// Accepts `W`, `dW`, `b1`, `db1`, ...
    pub fn parse(s: &str) -> Option<ParamName> {
        let s = s.strip_prefix('d').filter(|r| !r.is_empty()).unwrap_or(s);
        ParamName::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

impl std::fmt::Display for ParamName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl ModelParams {
    /// All-zero parameters; `classes == 0` builds a model without a head.
    pub fn zeros(d: usize, h: usize, classes: usize) -> Self {
        let head = (classes > 0).then(|| Head {
            g: Matrix::zeros(classes, h),
            b3: Vector::zeros(classes),
        });
        ModelParams {
            u: Matrix::zeros(h, d),
            w: Matrix::zeros(h, h),
            b1: Vector::zeros(h),
            v: Matrix::zeros(d, h),
            b2: Vector::zeros(d),
            head,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.u.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.u.rows()
    }

    pub fn classes(&self) -> usize {
        self.head.as_ref().map_or(0, |h| h.b3.len())
    }

    /// Checks that every block agrees with `(d, h, c)` and holds finite values.
    pub fn validate(&self) -> Result<()> {
        let (d, h, c) = (self.input_dim(), self.hidden_dim(), self.classes());
        let expect = |name: ParamName, got: (usize, usize), want: (usize, usize)| {
            if got != want {
                Err(Error::shape(
                    "ModelParams",
                    format!("{name} {}x{}", got.0, got.1),
                    format!("expected {}x{}", want.0, want.1),
                ))
            } else {
                Ok(())
            }
        };
        expect(ParamName::W, self.w.shape(), (h, h))?;
        expect(ParamName::B1, (self.b1.len(), 1), (h, 1))?;
        expect(ParamName::V, self.v.shape(), (d, h))?;
        expect(ParamName::B2, (self.b2.len(), 1), (d, 1))?;
        if let Some(head) = &self.head {
            expect(ParamName::G, head.g.shape(), (c, h))?;
        }
        if self.blocks().iter().any(|(_, b)| b.iter().any(|x| !x.is_finite())) {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(())
    }

    /// Flat views of every present block, in serialization order.
    pub fn blocks(&self) -> Vec<(ParamName, &[f64])> {
        let mut out = vec![
            (ParamName::U, self.u.as_slice()),
            (ParamName::W, self.w.as_slice()),
            (ParamName::B1, self.b1.as_slice()),
            (ParamName::V, self.v.as_slice()),
            (ParamName::B2, self.b2.as_slice()),
        ];
        if let Some(head) = &self.head {
            out.push((ParamName::G, head.g.as_slice()));
            out.push((ParamName::B3, head.b3.as_slice()));
        }
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<(ParamName, &mut [f64])> {
        let mut out = vec![
            (ParamName::U, self.u.as_mut_slice()),
            (ParamName::W, self.w.as_mut_slice()),
            (ParamName::B1, self.b1.as_mut_slice()),
            (ParamName::V, self.v.as_mut_slice()),
            (ParamName::B2, self.b2.as_mut_slice()),
        ];
        if let Some(head) = &mut self.head {
            out.push((ParamName::G, head.g.as_mut_slice()));
            out.push((ParamName::B3, head.b3.as_mut_slice()));
        }
        out
    }

    pub fn num_parameters(&self) -> usize {
        self.blocks().iter().map(|(_, b)| b.len()).sum()
    }
}

/// One training or evaluation sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceSample {
    pub inputs: Vec<Vector>,
    pub targets: Option<Vec<Vector>>,
    pub global_target: Option<Vector>,
    pub label: Option<usize>,
}

impl SequenceSample {
    pub fn unlabeled(inputs: Vec<Vector>) -> Self {
        SequenceSample {
            inputs,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Structural checks against a model of input dimension `d` and `classes` classes.
    pub fn validate(&self, d: usize, classes: usize) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Empty("sequence inputs"));
        }
        for x in &self.inputs {
            if x.len() != d {
                return Err(Error::shape("sample input", format!("[{}]", x.len()), format!("d={d}")));
            }
        }
        if let Some(targets) = &self.targets {
            if targets.len() != self.inputs.len() {
                return Err(Error::shape(
                    "sample targets",
                    format!("T={}", targets.len()),
                    format!("T={}", self.inputs.len()),
                ));
            }
            for t in targets {
                if t.len() != d {
                    return Err(Error::shape("sample target", format!("[{}]", t.len()), format!("d={d}")));
                }
            }
        }
        if let Some(g) = &self.global_target {
            if g.len() != d {
                return Err(Error::shape("global target", format!("[{}]", g.len()), format!("d={d}")));
            }
        }
        if let (Some(label), true) = (self.label, classes > 0) {
            if label >= classes {
                return Err(Error::LabelOutOfRange { label, classes });
            }
        }
        Ok(())
    }
}

/// Hidden states and decoded outputs of one forward pass, kept for BPTT.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub s0: Vector,
    pub hidden: Vec<Vector>,
    pub decoded: Vec<Vector>,
}

impl ForwardTrace {
    pub fn len(&self) -> usize {
        self.hidden.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hidden.is_empty()
    }

    /// `S_{t-1}` for a zero-based step index `t`.
    pub fn previous_state(&self, t: usize) -> &Vector {
        if t == 0 {
            &self.s0
        } else {
            &self.hidden[t - 1]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossBreakdown {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn combine(f1: f64, f2: f64, f3: f64, alpha: f64, beta: f64) -> Self {
        LossBreakdown {
            f1,
            f2,
            f3,
            total: f1 + alpha * f2 + beta * f3,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.f1.is_finite() && self.f2.is_finite() && self.f3.is_finite() && self.total.is_finite()
    }
}

pub fn encode_step(x: &Vector, s_prev: &Vector, p: &ModelParams) -> Result<Vector> {
    let mut pre = matvec(&p.u, x)?;
    pre.axpy(1.0, &matvec(&p.w, s_prev)?)?;
    pre.axpy(1.0, &p.b1)?;
    Ok(tanh_map(&pre))
}

pub fn decode_step(s: &Vector, p: &ModelParams) -> Result<Vector> {
    let mut pre = matvec(&p.v, s)?;
    pre.axpy(1.0, &p.b2)?;
    Ok(tanh_map(&pre))
}

pub fn forward(sample: &SequenceSample, p: &ModelParams) -> Result<ForwardTrace> {
    if sample.inputs.is_empty() {
        return Err(Error::Empty("forward"));
    }
    let s0 = Vector::zeros(p.hidden_dim());
    let mut hidden = Vec::with_capacity(sample.len());
    let mut decoded = Vec::with_capacity(sample.len());
    let mut prev = &s0;
    for x in &sample.inputs {
        let s = encode_step(x, prev, p)?;
        decoded.push(decode_step(&s, p)?);
        hidden.push(s);
        prev = hidden.last().expect("just pushed");
    }
    Ok(ForwardTrace { s0, hidden, decoded })
}

pub fn loss_reconstruction(trace: &ForwardTrace, targets: &[Vector]) -> Result<f64> {
    if targets.len() != trace.len() {
        return Err(Error::shape(
            "loss_reconstruction",
            format!("T={}", trace.len()),
            format!("{} targets", targets.len()),
        ));
    }
    trace
        .decoded
        .iter()
        .zip(targets)
        .map(|(x, t)| frob_sq_diff(t, x))
        .sum()
}

pub fn loss_sequence(trace: &ForwardTrace, global_target: &Vector) -> Result<f64> {
    let mean = mean_of(&trace.decoded)?;
    frob_sq_diff(global_target, &mean)
}

pub fn class_posterior(s: &Vector, p: &ModelParams) -> Result<Vector> {
    let head = p.head.as_ref().ok_or(Error::NoHead)?;
    let mut logits = matvec(&head.g, s)?;
    logits.axpy(1.0, &head.b3)?;
    softmax(&logits)
}

pub fn loss_discriminative(trace: &ForwardTrace, label: usize, p: &ModelParams) -> Result<f64> {
    let classes = p.classes();
    if classes == 0 {
        return Err(Error::NoHead);
    }
    if label >= classes {
        return Err(Error::LabelOutOfRange { label, classes });
    }
    let mut total = 0.0;
    for s in &trace.hidden {
        let post = class_posterior(s, p)?;
        total -= post[label].ln();
    }
    Ok(total)
}

/// Loss terms of a sample against an existing trace.
///
/// `f2` is evaluated whenever a global target is present and `f3` whenever a
/// label and a head are present, so the breakdown stays informative at
/// `α = 0` or `β = 0`. A positive weight on a term whose ingredient is
/// missing is an error.
pub fn losses_from_trace(
    sample: &SequenceSample,
    p: &ModelParams,
    trace: &ForwardTrace,
    alpha: f64,
    beta: f64,
) -> Result<LossBreakdown> {
    let targets = sample.targets.as_ref().ok_or(Error::MissingField("targets"))?;
    let f1 = loss_reconstruction(trace, targets)?;
    let f2 = match &sample.global_target {
        Some(g) => loss_sequence(trace, g)?,
        None if alpha > 0.0 => return Err(Error::MissingField("global_target")),
        None => 0.0,
    };
    let f3 = match sample.label {
        Some(label) if p.head.is_some() => loss_discriminative(trace, label, p)?,
        _ if beta > 0.0 => {
            return Err(if p.head.is_none() {
                Error::NoHead
            } else {
                Error::MissingField("label")
            })
        }
        _ => 0.0,
    };
    Ok(LossBreakdown::combine(f1, f2, f3, alpha, beta))
}

pub fn total_loss(
    sample: &SequenceSample,
    p: &ModelParams,
    alpha: f64,
    beta: f64,
) -> Result<LossBreakdown> {
    let trace = forward(sample, p)?;
    losses_from_trace(sample, p, &trace, alpha, beta)
}
