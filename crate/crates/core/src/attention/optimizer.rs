//! Parameter-update strategies for the toy encoder, selectable by name.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

use super::{ToyEncoderGrads, ToyEncoderParams};

/// Optimizer selector carried in training configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
        }
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<OptimizerKind> {
        match s {
            "sgd" => Ok(OptimizerKind::Sgd),
            "adam" => Ok(OptimizerKind::Adam),
            other => Err(Error::InvalidParameter(format!(
                "unknown optimizer {other:?} (expected sgd|adam)"
            ))),
        }
    }
}

/// A gradient-descent update rule.
pub trait Optimizer: Send {
    fn name(&self) -> &'static str;
    fn step(&mut self, params: &mut ToyEncoderParams, grads: &ToyEncoderGrads, lr: f64);
}

pub fn optimizer_by_name(name: &str) -> Result<Box<dyn Optimizer>> {
    match name {
        "sgd" => Ok(Box::new(Sgd)),
        "adam" => Ok(Box::new(Adam::default())),
        other => Err(Error::InvalidParameter(format!(
            "unknown optimizer {other:?} (expected sgd|adam)"
        ))),
    }
}

/// Plain stochastic gradient descent.
#[derive(Debug, Default)]
pub struct Sgd;

impl Optimizer for Sgd {
    fn name(&self) -> &'static str {
        "sgd"
    }

    fn step(&mut self, params: &mut ToyEncoderParams, grads: &ToyEncoderGrads, lr: f64) {
        params.embedding.scaled_add(-lr, &grads.embedding);
        params.wq.scaled_add(-lr, &grads.wq);
        params.wk.scaled_add(-lr, &grads.wk);
        params.wv.scaled_add(-lr, &grads.wv);
        params.w_out.scaled_add(-lr, &grads.w_out);
        params.b_out -= lr * grads.b_out;
    }
}

/// Adam with the usual (0.9, 0.999, 1e-8) constants and bias correction.
#[derive(Debug)]
pub struct Adam {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    step_count: u64,
    state: Option<Box<AdamState>>,
}

#[derive(Debug)]
struct AdamState {
    m: ToyEncoderGrads,
    v: ToyEncoderGrads,
}

impl Default for Adam {
    fn default() -> Self {
        Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step_count: 0,
            state: None,
        }
    }
}

impl Adam {
    fn update2(
        &self,
        param: &mut Array2<f64>,
        grad: &Array2<f64>,
        m: &mut Array2<f64>,
        v: &mut Array2<f64>,
        lr: f64,
        c1: f64,
        c2: f64,
    ) {
        ndarray::Zip::from(param)
            .and(grad)
            .and(m)
            .and(v)
            .for_each(|p, &g, m, v| {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.epsilon);
            });
    }

    fn update1(
        &self,
        param: &mut Array1<f64>,
        grad: &Array1<f64>,
        m: &mut Array1<f64>,
        v: &mut Array1<f64>,
        lr: f64,
        c1: f64,
        c2: f64,
    ) {
        ndarray::Zip::from(param)
            .and(grad)
            .and(m)
            .and(v)
            .for_each(|p, &g, m, v| {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.epsilon);
            });
    }
}

impl Optimizer for Adam {
    fn name(&self) -> &'static str {
        "adam"
    }

    fn step(&mut self, params: &mut ToyEncoderParams, grads: &ToyEncoderGrads, lr: f64) {
        if self.state.is_none() {
            self.state = Some(Box::new(AdamState {
                m: ToyEncoderGrads::zeros_like(params),
                v: ToyEncoderGrads::zeros_like(params),
            }));
        }
        self.step_count += 1;
        let c1 = 1.0 - self.beta1.powi(self.step_count as i32);
        let c2 = 1.0 - self.beta2.powi(self.step_count as i32);
        let mut state = self.state.take().expect("state initialized above");
        self.update2(
            &mut params.embedding,
            &grads.embedding,
            &mut state.m.embedding,
            &mut state.v.embedding,
            lr,
            c1,
            c2,
        );
        self.update2(&mut params.wq, &grads.wq, &mut state.m.wq, &mut state.v.wq, lr, c1, c2);
        self.update2(&mut params.wk, &grads.wk, &mut state.m.wk, &mut state.v.wk, lr, c1, c2);
        self.update2(&mut params.wv, &grads.wv, &mut state.m.wv, &mut state.v.wv, lr, c1, c2);
        self.update1(
            &mut params.w_out,
            &grads.w_out,
            &mut state.m.w_out,
            &mut state.v.w_out,
            lr,
            c1,
            c2,
        );
        let g = grads.b_out;
        state.m.b_out = self.beta1 * state.m.b_out + (1.0 - self.beta1) * g;
        state.v.b_out = self.beta2 * state.v.b_out + (1.0 - self.beta2) * g * g;
        params.b_out -= lr * (state.m.b_out / c1) / ((state.v.b_out / c2).sqrt() + self.epsilon);
        self.state = Some(state);
    }
}
