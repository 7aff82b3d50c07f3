//! Steepest descent with a backtracking step, shared by the reference
//! embedding and the per-point out-of-sample optimizer.
//!
//! An iteration tries `x - step * grad`. If the objective went up, the step is
//! halved and the trial repeated; once accepted, the step grows by 1.5 for the
//! next iteration. Accepted objectives are therefore non-increasing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distances below this are treated as coincident points; the corresponding
/// gradient term is taken to be zero.
pub const COINCIDENCE_EPS: f64 = 1e-12;

const STEP_GROWTH: f64 = 1.5;
const MAX_HALVINGS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// Uniform coordinates in `[-1, 1]` from the seeded generator.
    #[default]
    RandomUniform,
    /// Caller supplies the starting coordinates.
    Given,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescentOptions {
    pub max_iters: usize,
    /// Stop once the relative objective decrease of an iteration falls below this.
    pub tol: f64,
    pub initial_step: f64,
    pub seed: u64,
    pub init: InitKind,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iters: 500,
            tol: 1e-6,
            initial_step: 1e-3,
            seed: 0,
            init: InitKind::RandomUniform,
        }
    }
}

impl DescentOptions {
    /// Defaults for the per-point out-of-sample problem.
    pub fn point_defaults() -> Self {
        DescentOptions {
            max_iters: 200,
            tol: 1e-8,
            ..DescentOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.tol >= 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must lie in [0, 1), got {}",
                self.tol
            )));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "initial_step must be positive, got {}",
                self.initial_step
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub(crate) struct DescentResult {
    pub x: Vec<f64>,
    /// Objective at the start and after every accepted iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

pub(crate) fn minimize<F, G>(
    mut x: Vec<f64>,
    objective: F,
    gradient: G,
    opts: &DescentOptions,
) -> Result<DescentResult>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    opts.validate()?;
    let mut f = objective(&x);
    if !f.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "objective is {f} at the starting point"
        )));
    }
    let mut trace = vec![f];
    let mut grad = vec![0.0; x.len()];
    let mut trial = vec![0.0; x.len()];
    let mut step = opts.initial_step;
    let mut iterations = 0;

    for iter in 1..=opts.max_iters {
        if f == 0.0 {
            break;
        }
        gradient(&x, &mut grad);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NumericalFailure(format!(
                "non-finite gradient at iteration {iter}"
            )));
        }
        if grad.iter().all(|g| *g == 0.0) {
            break;
        }

        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&grad) {
                *t = xi - step * gi;
            }
            if trial == x {
                // the step no longer moves any coordinate
                break;
            }
            let ft = objective(&trial);
            if ft <= f {
                accepted = Some(ft);
                break;
            }
            step *= 0.5;
        }
        let Some(ft) = accepted else { break };

        iterations = iter;
        let decrease = (f - ft) / f;
        std::mem::swap(&mut x, &mut trial);
        f = ft;
        trace.push(f);
        step *= STEP_GROWTH;
        if decrease < opts.tol {
            break;
        }
    }

    Ok(DescentResult {
        x,
        trace,
        iterations,
    })
}
