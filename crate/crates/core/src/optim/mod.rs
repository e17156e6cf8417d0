//! Initialization and gradient-based fitting.

mod adam;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    normalize, CountMatrix, Gradient, LatentState, ModelConfig, Objective, PairDistribution,
    SHARED_DIMS,
};
use adam::Adam;

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub max_iters: usize,
    pub step_size: f64,
    pub moment_decay_1: f64,
    pub moment_decay_2: f64,
    /// Stop once the largest absolute gradient entry is at or below this.
    pub grad_tol: f64,
    pub seed: u64,
    /// Standard deviation of the initial coordinates.
    pub init_scale: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            step_size: 0.05,
            moment_decay_1: 0.9,
            moment_decay_2: 0.999,
            grad_tol: 1e-5,
            seed: 0,
            init_scale: 1e-2,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(what.to_string()));
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return bad("step_size must be positive");
        }
        for beta in [self.moment_decay_1, self.moment_decay_2] {
            if !(beta > 0.0 && beta < 1.0) {
                return bad("moment decay rates must lie in (0, 1)");
            }
        }
        if !(self.grad_tol.is_finite() && self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return bad("init_scale must be finite and nonnegative");
        }
        Ok(())
    }
}

/// Outcome of a single fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Cost before every step, followed by the cost of the returned state.
    pub cost_trace: Vec<f64>,
    /// Max-abs gradient entry at the returned state.
    pub final_grad_norm: f64,
    /// Number of optimizer steps taken.
    pub iterations_run: usize,
    pub converged: bool,
}

impl FitReport {
    pub fn initial_cost(&self) -> f64 {
        self.cost_trace[0]
    }

    pub fn final_cost(&self) -> f64 {
        *self.cost_trace.last().expect("non-empty cost trace")
    }
}

/// Final costs of every restart and the index of the one kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub final_costs: Vec<f64>,
    pub best: usize,
}

/// Random initial state: coordinates i.i.d. `N(0, init_scale^2)`, all weights 1.
pub fn init_state(
    n_items: usize,
    config: &ModelConfig,
    optim: &OptimConfig,
) -> Result<LatentState> {
    if n_items < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 items, got {n_items}"
        )));
    }
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(optim.seed);
    let k = config.latent_dims;
    let coords = Array2::from_shape_simple_fn((n_items, k), || {
        let z: f64 = StandardNormal.sample(&mut rng);
        optim.init_scale * z
    });
    LatentState::new(coords)
}

/// Fit a state to a primary view and an optional user view.
///
/// Unobserved primary pairs are treated as zero counts. The user view is
/// normalized over its own observed pairs.
pub fn fit(
    primary: &CountMatrix,
    user: Option<&CountMatrix>,
    config: &ModelConfig,
    optim: &OptimConfig,
) -> Result<(LatentState, FitReport)> {
    let (d_tilde, f_tilde) = prepare(primary, user)?;
    let objective = Objective::new(&d_tilde, f_tilde.as_ref(), *config)?;
    optim.validate()?;
    let state = init_state(primary.n_items(), config, optim)?;
    run(&objective, state, optim)
}

/// Run [`fit`] `restarts` times with seeds `seed, seed + 1, ...` and keep the
/// state with the lowest final cost (first one on ties).
pub fn fit_restarts(
    primary: &CountMatrix,
    user: Option<&CountMatrix>,
    config: &ModelConfig,
    optim: &OptimConfig,
    restarts: usize,
) -> Result<(LatentState, FitReport, RestartSummary)> {
    if restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let (d_tilde, f_tilde) = prepare(primary, user)?;
    let objective = Objective::new(&d_tilde, f_tilde.as_ref(), *config)?;
    optim.validate()?;

    let mut best: Option<(LatentState, FitReport)> = None;
    let mut summary = RestartSummary {
        final_costs: Vec::with_capacity(restarts),
        best: 0,
    };
    for r in 0..restarts {
        let run_optim = OptimConfig {
            seed: optim.seed.wrapping_add(r as u64),
            ..*optim
        };
        let state = init_state(primary.n_items(), config, &run_optim)?;
        let (state, report) = run(&objective, state, &run_optim)?;
        let c = report.final_cost();
        summary.final_costs.push(c);
        if best.as_ref().is_none_or(|(_, b)| c < b.final_cost()) {
            summary.best = r;
            best = Some((state, report));
        }
    }
    let (state, report) = best.expect("at least one restart");
    Ok((state, report, summary))
}

fn prepare(
    primary: &CountMatrix,
    user: Option<&CountMatrix>,
) -> Result<(PairDistribution, Option<PairDistribution>)> {
    if let Some(user) = user {
        if user.n_items() != primary.n_items() {
            return Err(Error::InvalidInput(format!(
                "primary view has {} items but user view has {}",
                primary.n_items(),
                user.n_items()
            )));
        }
    }
    let d_tilde = normalize(&primary.completed())?;
    let f_tilde = user.map(normalize).transpose()?;
    Ok((d_tilde, f_tilde))
}

/// Adam from `state` until the gradient tolerance or the iteration budget.
pub fn run(
    objective: &Objective<'_>,
    mut state: LatentState,
    optim: &OptimConfig,
) -> Result<(LatentState, FitReport)> {
    let mut adam = Adam::new(
        state.n_free(),
        optim.step_size,
        optim.moment_decay_1,
        optim.moment_decay_2,
    );
    let mut cost_trace = Vec::with_capacity(optim.max_iters + 1);
    let mut iteration = 0;
    loop {
        let (c, grad) = evaluate(objective, &state, iteration)?;
        cost_trace.push(c);
        let grad_norm = grad.max_abs();
        if grad_norm <= optim.grad_tol || iteration == optim.max_iters {
            let report = FitReport {
                cost_trace,
                final_grad_norm: grad_norm,
                iterations_run: iteration,
                converged: grad_norm <= optim.grad_tol,
            };
            return Ok((state, report));
        }
        let (coords, wd, wf) = state.free_parts_mut();
        adam.step(
            coords.iter_mut().chain(wd.iter_mut()).chain(wf.iter_mut()),
            grad.free_entries(),
        );
        iteration += 1;
    }
}

fn evaluate(
    objective: &Objective<'_>,
    state: &LatentState,
    iteration: usize,
) -> Result<(f64, Gradient)> {
    if !state.is_finite() {
        return Err(Error::NonFiniteCost {
            iteration,
            block: "latent state",
        });
    }
    let (c, grad) = objective.cost_and_gradient(state)?;
    if !c.is_finite() {
        return Err(Error::NonFiniteCost {
            iteration,
            block: "cost",
        });
    }
    if let Some(block) = grad.non_finite_block() {
        return Err(Error::NonFiniteCost { iteration, block });
    }
    Ok((c, grad))
}

/// Central-difference gradient `(C(x + h) - C(x - h)) / 2h` for every free
/// parameter. Pinned weight entries are reported as 0.
pub fn finite_diff_gradient(
    state: &LatentState,
    d_tilde: &PairDistribution,
    f_tilde: Option<&PairDistribution>,
    config: &ModelConfig,
    h: f64,
) -> Result<Gradient> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "step h must be positive, got {h}"
        )));
    }
    let objective = Objective::new(d_tilde, f_tilde, *config)?;
    let (n, k) = state.coords().dim();
    let mut flat = Vec::with_capacity(state.n_free());
    let mut probe = state.clone();
    for idx in 0..state.n_free() {
        let x = state.free_param(idx);
        probe.set_free_param(idx, x + h);
        let up = objective.cost(&probe)?;
        probe.set_free_param(idx, x - h);
        let down = objective.cost(&probe)?;
        probe.set_free_param(idx, x);
        flat.push((up - down) / (2.0 * h));
    }
    let ny = n * k;
    let nw = k - SHARED_DIMS;
    let mut grad = Gradient::zeros(n, k);
    grad.coords = Array2::from_shape_vec((n, k), flat[..ny].to_vec()).expect("shape");
    grad.primary_weights[SHARED_DIMS..].copy_from_slice(&flat[ny..ny + nw]);
    grad.user_weights[SHARED_DIMS..].copy_from_slice(&flat[ny + nw..]);
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{all_pairs, View};

    #[test]
    fn init_is_deterministic_in_seed() {
        let config = ModelConfig::default();
        let optim = OptimConfig {
            seed: 42,
            ..Default::default()
        };
        let a = init_state(10, &config, &optim).unwrap();
        let b = init_state(10, &config, &optim).unwrap();
        assert_eq!(a, b);
        let c = init_state(10, &config, &OptimConfig { seed: 43, ..optim }).unwrap();
        assert_ne!(a.coords(), c.coords());
        assert!(a.weights(View::User).iter().all(|&w| w == 1.0));
    }

    #[test]
    fn init_scale_zero_gives_zero_coordinates() {
        let optim = OptimConfig {
            init_scale: 0.0,
            ..Default::default()
        };
        let s = init_state(4, &ModelConfig::default(), &optim).unwrap();
        assert!(s.coords().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn init_sample_mean_is_near_zero() {
        let config = ModelConfig {
            latent_dims: 5,
            ..Default::default()
        };
        let optim = OptimConfig {
            seed: 7,
            init_scale: 0.5,
            ..Default::default()
        };
        let n = 2000;
        let s = init_state(n, &config, &optim).unwrap();
        let count = (n * 5) as f64;
        let mean = s.coords().sum() / count;
        assert!(mean.abs() <= 4.0 * 0.5 / count.sqrt(), "mean {mean}");
    }

    #[test]
    fn init_rejects_single_item() {
        assert!(init_state(1, &ModelConfig::default(), &OptimConfig::default()).is_err());
    }

    #[test]
    fn two_items_converge_immediately() {
        let d = CountMatrix::dense(2, [(0, 1, 3.0)]).unwrap();
        let (_, report) = fit(
            &d,
            Some(&d),
            &ModelConfig::default(),
            &OptimConfig::default(),
        )
        .unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations_run, 0);
        assert_eq!(report.cost_trace, vec![0.0]);
    }

    #[test]
    fn fit_decreases_cost_and_keeps_pins() {
        let n = 8;
        let d = CountMatrix::dense(
            n,
            all_pairs(n)
                .into_iter()
                .map(|(i, j)| (i, j, if i % 2 == j % 2 { 1.0 } else { 0.1 })),
        )
        .unwrap();
        let config = ModelConfig {
            latent_dims: 4,
            ..Default::default()
        };
        let optim = OptimConfig {
            max_iters: 200,
            seed: 3,
            ..Default::default()
        };
        let (state, report) = fit(&d, Some(&d), &config, &optim).unwrap();
        assert!(report.final_cost() < report.initial_cost());
        assert_eq!(report.cost_trace.len(), report.iterations_run + 1);
        assert!(report.iterations_run <= optim.max_iters);
        for view in [View::Primary, View::User] {
            assert_eq!(&state.weights(view)[..2], &[1.0, 1.0]);
        }
    }

    #[test]
    fn restarts_keep_the_lowest_final_cost() {
        let n = 6;
        let d = CountMatrix::dense(
            n,
            all_pairs(n)
                .into_iter()
                .map(|(i, j)| (i, j, (i + j) as f64)),
        )
        .unwrap();
        let optim = OptimConfig {
            max_iters: 50,
            ..Default::default()
        };
        let config = ModelConfig::default();
        let (_, report, summary) = fit_restarts(&d, None, &config, &optim, 4).unwrap();
        assert_eq!(summary.final_costs.len(), 4);
        let min = summary
            .final_costs
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert_eq!(summary.final_costs[summary.best], min);
        assert_eq!(report.final_cost(), min);

        let (s1, r1) = fit(&d, None, &config, &optim).unwrap();
        let (s2, r2, _) = fit_restarts(&d, None, &config, &optim, 1).unwrap();
        assert_eq!((s1, r1), (s2, r2));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let d = CountMatrix::dense(3, [(0, 1, 1.0)]).unwrap();
        let bad = OptimConfig {
            moment_decay_1: 1.0,
            ..Default::default()
        };
        assert!(fit(&d, None, &ModelConfig::default(), &bad).is_err());
        let mismatched = CountMatrix::dense(4, [(0, 1, 1.0)]).unwrap();
        assert!(fit(
            &d,
            Some(&mismatched),
            &ModelConfig::default(),
            &OptimConfig::default()
        )
        .is_err());
    }

    #[test]
    fn finite_difference_of_flat_cost_is_zero() {
        let d = normalize(&CountMatrix::dense(2, [(0, 1, 1.0)]).unwrap()).unwrap();
        let s = init_state(2, &ModelConfig::default(), &OptimConfig::default()).unwrap();
        let g = finite_diff_gradient(&s, &d, Some(&d), &ModelConfig::default(), 1e-5).unwrap();
        assert_eq!(g.max_abs(), 0.0);
        assert!(finite_diff_gradient(&s, &d, None, &ModelConfig::default(), 0.0).is_err());
    }
}
