//! Optimizer budgets and truncation settings, loadable from TOML.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptBudget {
    pub m_max: usize,
    pub k_max: usize,
    /// Spacing of the initial c grid.
    pub c_step: f64,
    /// Final bracket width of the golden-section refinement.
    pub c_tol: f64,
}

impl Default for OptBudget {
    fn default() -> Self {
        Self {
            m_max: 5,
            k_max: 30,
            c_step: 0.005,
            c_tol: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultirailBudget {
    pub n_max: usize,
    pub rails_max: usize,
    pub k_max: usize,
    pub tail_tol: f64,
    pub f_max: usize,
    /// Largest `dA * dB` for which the entropy branch is evaluated.
    pub matrix_cap: usize,
    /// Largest padded qudit dimension for which the recursion branch runs.
    pub qudit_cap: usize,
}

impl Default for MultirailBudget {
    fn default() -> Self {
        Self {
            n_max: 3,
            rails_max: 4,
            k_max: 30,
            tail_tol: 1e-9,
            f_max: 60,
            matrix_cap: 4096,
            qudit_cap: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NpjBudget {
    pub grid: usize,
    pub refine_rounds: usize,
}

impl Default for NpjBudget {
    fn default() -> Self {
        Self {
            grid: 101,
            refine_rounds: 2,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub optimizer: OptBudget,
    pub multirail: MultirailBudget,
    pub npj: NpjBudget,
    /// Worker threads; `None` lets the pool decide.
    pub threads: Option<usize>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let o = &self.optimizer;
        let m = &self.multirail;
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if o.m_max == 0 {
            return bad("optimizer.m_max must be >= 1");
        }
        if !(o.c_step > 0.0 && o.c_step < 0.5) {
            return bad("optimizer.c_step must lie in (0, 0.5)");
        }
        if !(o.c_tol > 0.0) {
            return bad("optimizer.c_tol must be > 0");
        }
        if m.n_max == 0 || m.rails_max < 2 {
            return bad("multirail.n_max must be >= 1 and multirail.rails_max >= 2");
        }
        if !(m.tail_tol > 0.0 && m.tail_tol < 1.0) {
            return bad("multirail.tail_tol must lie in (0, 1)");
        }
        if self.npj.grid < 3 {
            return bad("npj.grid must be >= 3");
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1");
        }
        Ok(())
    }
}
