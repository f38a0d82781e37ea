use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Superoperator, TruncatedState};
use crate::linalg::{c, max_abs};
use crate::{CMatrix, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Keep every `sample_every`-th step (the final state is always kept).
    pub sample_every: usize,
    /// Check trace, Hermiticity and positivity of every kept state.
    pub check_invariants: bool,
    /// Repeat the run at half the step and report the final-state difference.
    pub estimate_error: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            sample_every: 1,
            check_invariants: true,
            estimate_error: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<TruncatedState>,
    /// Step actually used: `t_final / ceil(t_final / dt)`.
    pub step: f64,
    /// `max |ρ_h(T) - ρ_{h/2}(T)|`, if requested.
    pub error_estimate: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &TruncatedState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn rk4_step(gen: &Superoperator, rho: &CMatrix, h: f64) -> CMatrix {
    let k1 = gen.apply(rho);
    let k2 = gen.apply(&(rho + &k1 * c(h / 2.0, 0.0)));
    let k3 = gen.apply(&(rho + &k2 * c(h / 2.0, 0.0)));
    let k4 = gen.apply(&(rho + &k3 * c(h, 0.0)));
    rho + (k1 + (k2 + k3) * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0)
}

fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite() && t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::TimeGrid { dt, t_final });
    }
    Ok((t_final / dt * (1.0 - 1e-12)).ceil() as usize)
}

fn final_state(gen: &Superoperator, rho0: &CMatrix, steps: usize, h: f64) -> CMatrix {
    let mut rho = rho0.clone();
    for _ in 0..steps {
        rho = rk4_step(gen, &rho, h);
    }
    rho
}

/// Fixed-step fourth-order Runge–Kutta from `rho0` to `t_final`.
pub fn evolve(gen: &Superoperator, rho0: &TruncatedState, t_final: f64, dt: f64) -> Result<Trajectory> {
    evolve_with(gen, rho0, t_final, dt, &EvolveOptions::default())
}

pub fn evolve_with(
    gen: &Superoperator,
    rho0: &TruncatedState,
    t_final: f64,
    dt: f64,
    options: &EvolveOptions,
) -> Result<Trajectory> {
    if gen.sites() != rho0.sites() || gen.local_dim() != rho0.local_dim() {
        return Err(Error::StateShape {
            found_d: gen.local_dim(),
            found_m: gen.sites(),
            state_d: rho0.local_dim(),
            state_m: rho0.sites(),
        });
    }
    let steps = step_count(t_final, dt)?;
    let h = if steps == 0 { dt } else { t_final / steps as f64 };
    let every = options.sample_every.max(1);

    let mut times = alloc::vec![0.0];
    let mut states = alloc::vec![rho0.clone()];
    if options.check_invariants {
        rho0.check(0.0)?;
    }
    let mut rho = rho0.rho().clone();
    for i in 1..=steps {
        rho = rk4_step(gen, &rho, h);
        if i % every == 0 || i == steps {
            let t = i as f64 * h;
            let state = rho0.with_rho(rho.clone());
            if options.check_invariants {
                state.check(t)?;
            }
            times.push(t);
            states.push(state);
        }
    }

    let error_estimate = (options.estimate_error && steps > 0).then(|| {
        let fine = final_state(gen, rho0.rho(), 2 * steps, h / 2.0);
        max_abs(&(fine - &rho))
    });
    Ok(Trajectory {
        times,
        states,
        step: h,
        error_estimate,
    })
}
