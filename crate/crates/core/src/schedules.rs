//! Step-size sequences `alpha_n` and checks of the three limit conditions the
//! convergence theory asks of them:
//!
//! 1. `alpha_n -> 0`,
//! 2. `sum alpha_n = infinity`,
//! 3. `alpha_n / alpha_{n+N} -> 1` for a family of `N` maps.
//!
//! No finite prefix proves a limit, so verdicts are symbolic where the
//! family has a closed form and numeric (against configurable thresholds)
//! otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper clip for power-law steps, which keeps `alpha_n < 1` for large `c`.
pub const ALPHA_CEILING: f64 = 0.999;

/// Default index at which limits are probed.
pub const DEFAULT_HORIZON: usize = 100_000;

/// Threshold for `alpha_horizon` in the numeric limit check.
pub const LIMIT_THRESHOLD: f64 = 0.01;

/// Threshold for `|alpha_n / alpha_{n+N} - 1|` at the horizon.
pub const RATIO_THRESHOLD: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleDescriptor {
    /// `alpha_n = min(c / (n + 1)^p, ALPHA_CEILING)`.
    Power { c: f64, p: f64 },
    /// `alpha_n = values[n - 1]`.
    Explicit { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleDescriptor", into = "ScheduleDescriptor")]
pub struct Schedule {
    desc: ScheduleDescriptor,
}

impl Schedule {
    pub fn power(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSchedule(format!("power scale c must be positive, got {c}")));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "power exponent p must be positive, got {p}"
            )));
        }
        Ok(Self {
            desc: ScheduleDescriptor::Power { c, p },
        })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSchedule("explicit schedule is empty".into()));
        }
        if let Some(i) = values.iter().position(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(Error::InvalidSchedule(format!(
                "alpha_{} = {} is outside (0, 1)",
                i + 1,
                values[i]
            )));
        }
        Ok(Self {
            desc: ScheduleDescriptor::Explicit { values },
        })
    }

    /// The harmonic schedule `alpha_n = 1 / (n + 1)`.
    pub fn harmonic() -> Self {
        Self {
            desc: ScheduleDescriptor::Power { c: 1.0, p: 1.0 },
        }
    }

    pub fn descriptor(&self) -> &ScheduleDescriptor {
        &self.desc
    }

    /// Number of defined terms, `None` for unbounded schedules.
    pub fn explicit_len(&self) -> Option<usize> {
        match &self.desc {
            ScheduleDescriptor::Power { .. } => None,
            ScheduleDescriptor::Explicit { values } => Some(values.len()),
        }
    }

    /// `alpha_n` for `n >= 1`.
    pub fn alpha(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("schedule indices start at 1".into()));
        }
        match &self.desc {
            ScheduleDescriptor::Power { c, p } => {
                Ok((c / ((n + 1) as f64).powf(*p)).min(ALPHA_CEILING))
            }
            ScheduleDescriptor::Explicit { values } => {
                values
                    .get(n - 1)
                    .copied()
                    .ok_or(Error::ScheduleIndexOutOfRange {
                        n,
                        len: values.len(),
                    })
            }
        }
    }

    /// Checks the three limit conditions for a family of size `family_size`,
    /// probing indices up to `horizon` (at least `10 * family_size`).
    pub fn validate(&self, family_size: usize, horizon: usize) -> ScheduleReport {
        validate(self, family_size, horizon)
    }
}

impl TryFrom<ScheduleDescriptor> for Schedule {
    type Error = Error;

    fn try_from(d: ScheduleDescriptor) -> Result<Self> {
        match d {
            ScheduleDescriptor::Power { c, p } => Self::power(c, p),
            ScheduleDescriptor::Explicit { values } => Self::explicit(values),
        }
    }
}

impl From<Schedule> for ScheduleDescriptor {
    fn from(s: Schedule) -> Self {
        s.desc
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail(String),
    Unverifiable(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub family_size: usize,
    /// Index actually probed; shorter than requested for short explicit lists.
    pub horizon: usize,
    /// Condition (i): `alpha_n -> 0`.
    pub vanishing: Verdict,
    /// Condition (ii): `sum alpha_n = infinity`.
    pub divergent_sum: Verdict,
    /// Condition (iii): `alpha_n / alpha_{n+N} -> 1`.
    pub ratio_limit: Verdict,
    pub alpha_at_horizon: Option<f64>,
    /// `alpha_h / alpha_{h+N}` at the probed horizon `h`.
    pub measured_ratio: Option<f64>,
}

impl ScheduleReport {
    pub fn all_pass(&self) -> bool {
        self.vanishing.is_pass() && self.divergent_sum.is_pass() && self.ratio_limit.is_pass()
    }

    /// Labels and verdicts in condition order.
    pub fn verdicts(&self) -> [(&'static str, &Verdict); 3] {
        [
            ("(i) alpha_n -> 0", &self.vanishing),
            ("(ii) sum alpha_n = inf", &self.divergent_sum),
            ("(iii) alpha_n / alpha_{n+N} -> 1", &self.ratio_limit),
        ]
    }
}

fn validate(s: &Schedule, family_size: usize, horizon: usize) -> ScheduleReport {
    let n_fam = family_size.max(1);
    let min_horizon = 10 * n_fam;
    let mut report = ScheduleReport {
        family_size,
        horizon,
        vanishing: Verdict::Unverifiable(String::new()),
        divergent_sum: Verdict::Unverifiable(String::new()),
        ratio_limit: Verdict::Unverifiable(String::new()),
        alpha_at_horizon: None,
        measured_ratio: None,
    };

    let probe = match s.explicit_len() {
        None => horizon,
        Some(len) => horizon.min(len.saturating_sub(n_fam)),
    };
    report.horizon = probe;

    report.divergent_sum = match s.descriptor() {
        ScheduleDescriptor::Power { p, .. } if *p <= 1.0 => Verdict::Pass,
        ScheduleDescriptor::Power { p, .. } => Verdict::Fail(format!(
            "p = {p} > 1 makes sum c/(n+1)^p a convergent p-series"
        )),
        ScheduleDescriptor::Explicit { .. } => Verdict::Unverifiable(
            "divergence of a series cannot be decided from a finite prefix".into(),
        ),
    };

    if family_size == 0 || probe < min_horizon {
        let why = format!(
            "horizon {probe} is below the minimum 10*N = {min_horizon} for N = {family_size}"
        );
        report.vanishing = Verdict::Unverifiable(why.clone());
        report.ratio_limit = Verdict::Unverifiable(why);
        return report;
    }

    let alpha = |n: usize| s.alpha(n).expect("index within probed range");
    let tail = (probe / 10).max(1)..=probe;
    report.alpha_at_horizon = Some(alpha(probe));

    report.vanishing = match s.descriptor() {
        ScheduleDescriptor::Power { p, .. } if *p > 0.0 => Verdict::Pass,
        _ => {
            let a_h = alpha(probe);
            if a_h >= LIMIT_THRESHOLD {
                Verdict::Fail(format!(
                    "alpha_{probe} = {a_h} is not below {LIMIT_THRESHOLD}"
                ))
            } else if let Some(n) = tail.clone().find(|&n| alpha(n + 1) > alpha(n)) {
                Verdict::Fail(format!("alpha increases at n = {n} within the tail"))
            } else {
                Verdict::Pass
            }
        }
    };

    let clipped = |n: usize| match s.descriptor() {
        ScheduleDescriptor::Power { c, p } => c / ((n + 1) as f64).powf(*p) >= ALPHA_CEILING,
        ScheduleDescriptor::Explicit { .. } => false,
    };
    let deviation = |n: usize| (alpha(n) / alpha(n + n_fam) - 1.0).abs();
    let ratio = alpha(probe) / alpha(probe + n_fam);
    report.measured_ratio = Some(ratio);
    let dev_h = deviation(probe);
    report.ratio_limit = if dev_h >= RATIO_THRESHOLD {
        Verdict::Fail(format!(
            "alpha_n / alpha_(n+{n_fam}) = {ratio} at n = {probe}, deviation {dev_h} from 1 exceeds {RATIO_THRESHOLD}"
        ))
    } else if let Some(n) = tail
        .clone()
        .take_while(|&n| n < probe)
        // The ceiling makes the sequence constant on a finite prefix; the
        // deviation then jumps from 0 once the clipped block ends.
        .filter(|&n| !clipped(n))
        .find(|&n| deviation(n + 1) > deviation(n) + 1e-15)
    {
        Verdict::Fail(format!("ratio deviation from 1 grows at n = {n} within the tail"))
    } else {
        Verdict::Pass
    };

    report
}
