//! Ensemble-averaged `⟨M²(t)⟩` series shared by both model families.

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Quantum,
    Classical,
}

impl Family {
    /// Unit of the natural time axis for this family.
    pub fn time_unit(self) -> TimeUnit {
        match self {
            Family::Quantum => TimeUnit::Jt,
            Family::Classical => TimeUnit::Mcs,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Quantum => "quantum",
            Family::Classical => "classical",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Family::Quantum),
            "classical" => Ok(Family::Classical),
            other => Err(argument(format!("unknown model family '{other}'"))),
        }
    }
}

/// Time axis unit: `J·t` for Schrödinger evolution, Monte Carlo sweeps for Glauber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimeUnit {
    #[serde(rename = "Jt")]
    Jt,
    #[serde(rename = "t_MCS")]
    Mcs,
}

impl TimeUnit {
    pub fn tag(self) -> &'static str {
        match self {
            TimeUnit::Jt => "Jt",
            TimeUnit::Mcs => "t_MCS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesLabel {
    pub family: Family,
    pub dim: usize,
    pub size: usize,
    pub field: f64,
}

impl std::fmt::Display for SeriesLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}d-L{}-h{}", self.family, self.dim, self.size, self.field)
    }
}

/// `⟨M²(t)⟩` with standard errors over `n_realizations` independent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSeries {
    pub label: SeriesLabel,
    pub time_unit: TimeUnit,
    pub times: Vec<f64>,
    pub mean_m2: Vec<f64>,
    pub stderr_m2: Vec<f64>,
    pub n_realizations: usize,
}

impl EnsembleSeries {
    pub fn new(
        label: SeriesLabel,
        time_unit: TimeUnit,
        times: Vec<f64>,
        mean_m2: Vec<f64>,
        stderr_m2: Vec<f64>,
        n_realizations: usize,
    ) -> Result<Self> {
        let s = Self {
            label,
            time_unit,
            times,
            mean_m2,
            stderr_m2,
            n_realizations,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if self.mean_m2.len() != n || self.stderr_m2.len() != n {
            return Err(argument(format!("series {}: column lengths differ", self.label)));
        }
        if n == 0 {
            return Err(argument(format!("series {}: empty", self.label)));
        }
        if self.n_realizations == 0 {
            return Err(argument(format!("series {}: zero realizations", self.label)));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) || self.times[0] < 0.0 {
            return Err(argument(format!(
                "series {}: times must be nonnegative and strictly increasing",
                self.label
            )));
        }
        if self.stderr_m2.iter().any(|&e| !(e >= 0.0)) {
            return Err(argument(format!("series {}: negative or NaN stderr", self.label)));
        }
        if self.mean_m2.iter().any(|m| !m.is_finite()) {
            return Err(argument(format!("series {}: non-finite mean", self.label)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Sample mean and standard error of the mean (`s / √n`, zero for `n = 1`),
/// accumulated in slice order.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
