use serde::{Deserialize, Serialize};

use crate::par::Exec;

/// Budget for multi-start see-saw searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop a restart once one alternation improves the objective by less than this.
    pub improve_tol: f64,
    #[serde(default)]
    pub exec: Exec,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 200,
            improve_tol: 1e-12,
            exec: Exec::Parallel,
        }
    }
}

impl SearchParams {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

/// Budget for the projected-gradient PPT search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    #[serde(default)]
    pub exec: Exec,
}

impl Default for WitnessParams {
    fn default() -> Self {
        Self {
            restarts: 4,
            max_iters: 2000,
            initial_step: 1e-2,
            exec: Exec::Parallel,
        }
    }
}
