//! Back-and-forth error compensation around a one-step operator.
//!
//! With `L` the underlying step and `L*` the same step run backward in time,
//! one BFECC step is `L(Uⁿ + ½(Uⁿ − L*L Uⁿ))`.

use crate::error::{Error, Result};
use crate::exec;

/// Which of the three BFECC substeps an operator application belongs to.
/// A plain (uncompensated) step is a single `Final` application.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pass {
    Forward,
    Backward,
    Final,
}

/// A set of equally sized field arrays.
pub trait FieldSet: Clone + Send + Sync {
    fn parts(&self) -> Vec<&[f64]>;
    fn parts_mut(&mut self) -> Vec<&mut [f64]>;

    fn sup_norm(&self) -> f64 {
        self.parts()
            .into_iter()
            .map(|p| exec::max_range(p.len(), |k| p[k].abs()))
            .fold(0.0, f64::max)
    }

    /// `self = a * self + b * other`.
    fn axpby(&mut self, a: f64, b: f64, other: &Self) {
        for (dst, src) in self.parts_mut().into_iter().zip(other.parts()) {
            exec::update_each(dst, |k, v| a * v + b * src[k]);
        }
    }
}

/// A linear one-step update. `Pass::Backward` must apply the time-reversed
/// operator (negated time step) starting from time `t`.
pub trait Operator {
    type State: FieldSet;

    fn dt(&self) -> f64;

    /// Write the image of `input` at time `t` into `output`.
    fn apply(&mut self, input: &Self::State, output: &mut Self::State, pass: Pass, t: f64)
        -> Result<()>;
}

/// BFECC stepper owning its operator and two scratch states.
pub struct Bfecc<O: Operator> {
    op: O,
    fwd: Option<O::State>,
    back: Option<O::State>,
}

impl<O: Operator> Bfecc<O> {
    pub fn new(op: O) -> Self {
        Bfecc { op, fwd: None, back: None }
    }

    pub fn operator(&self) -> &O {
        &self.op
    }

    pub fn operator_mut(&mut self) -> &mut O {
        &mut self.op
    }

    pub fn into_operator(self) -> O {
        self.op
    }

    /// Advance `u` from `t` to `t + dt`.
    pub fn step(&mut self, u: &mut O::State, t: f64) -> Result<()> {
        let dt = self.op.dt();
        let fwd = self.fwd.get_or_insert_with(|| u.clone());
        let back = self.back.get_or_insert_with(|| u.clone());
        self.op.apply(u, fwd, Pass::Forward, t)?;
        self.op.apply(fwd, back, Pass::Backward, t + dt)?;
        for ((f, b), c) in fwd.parts_mut().into_iter().zip(back.parts()).zip(u.parts()) {
            exec::update_each(f, |k, _| 1.5 * c[k] - 0.5 * b[k]);
        }
        self.op.apply(fwd, u, Pass::Final, t)
    }

    /// Advance `u` by one uncompensated step of the underlying operator.
    pub fn plain_step(&mut self, u: &mut O::State, t: f64) -> Result<()> {
        let fwd = self.fwd.get_or_insert_with(|| u.clone());
        self.op.apply(u, fwd, Pass::Final, t)?;
        std::mem::swap(u, fwd);
        Ok(())
    }
}

/// One BFECC step as a pure function of the state.
pub fn bfecc_step<O: Operator>(op: &mut O, u: &O::State, t: f64) -> Result<O::State> {
    let dt = op.dt();
    let mut fwd = u.clone();
    let mut back = u.clone();
    op.apply(u, &mut fwd, Pass::Forward, t)?;
    op.apply(&fwd, &mut back, Pass::Backward, t + dt)?;
    let mut mid = u.clone();
    mid.axpby(1.5, -0.5, &back);
    let mut out = u.clone();
    op.apply(&mid, &mut out, Pass::Final, t)?;
    Ok(out)
}

/// Sup-norm above which a run is declared unstable.
pub const BLOWUP: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stepping {
    Bfecc,
    Plain,
}

/// Take `steps` steps from `t0`, checking for blow-up every `check_every`
/// steps. Returns the final time.
pub fn integrate<O: Operator>(
    stepper: &mut Bfecc<O>,
    u: &mut O::State,
    t0: f64,
    steps: usize,
    mode: Stepping,
    check_every: usize,
) -> Result<f64> {
    let dt = stepper.operator().dt();
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        match mode {
            Stepping::Bfecc => stepper.step(u, t)?,
            Stepping::Plain => stepper.plain_step(u, t)?,
        }
        if check_every > 0 && (n + 1) % check_every == 0 {
            let sup = u.sup_norm();
            if !(sup <= BLOWUP) {
                return Err(Error::Unstable { sup, time: t + dt });
            }
        }
    }
    Ok(t0 + steps as f64 * dt)
}
