use crate::error::{Error, Result};
use crate::measures::{binary_entropy, eta};

/// Threshold with a note on whether it had to be clipped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Delta {
    pub value: f64,
    /// Set when `2 log2(m) sqrt(d) / sqrt(m)` exceeded `1/d - 1/m`.
    pub clipped: bool,
}

/// `delta(m) = 2 log2(m) sqrt(d) / sqrt(m)`, clipped to `1/d - 1/m` so that at
/// least one copy of the shield product survives.
pub fn delta_default(m: u64, d: usize) -> Result<Delta> {
    if m < 2 || d == 0 {
        return Err(Error::domain(format!("delta needs m >= 2 and d >= 1, got m = {m}, d = {d}")));
    }
    let (mf, df) = (m as f64, d as f64);
    let raw = 2.0 * mf.log2() * df.sqrt() / mf.sqrt();
    let cap = (1.0 / df - 1.0 / mf).max(0.0);
    Ok(if raw > cap { Delta { value: cap, clipped: true } } else { Delta { value: raw, clipped: false } })
}

/// `2^{-m (delta^2 / (2 ln 2) - d log2(m+1) / m)}`, capped at 1.
pub fn pb_bound(m: u64, d: usize, delta: f64) -> f64 {
    let mf = m as f64;
    let exponent = mf * delta * delta / (2.0 * std::f64::consts::LN_2) - d as f64 * (mf + 1.0).log2();
    (-exponent).exp2().min(1.0)
}

/// `floor(m (1/d - delta))`, clamped at 0. A relative slack of `1e-9`
/// absorbs rounding when `delta` sits exactly on a lattice point.
pub fn t_min(m: u64, d: usize, delta: f64) -> u64 {
    let x = m as f64 * (1.0 / d as f64 - delta);
    (x + 1e-9 * x.abs().max(1.0)).floor().max(0.0) as u64
}

/// `(m + d - 1) h(m / (m + d - 1))`, the log of the bound on the number of types.
pub fn type_entropy_term(m: u64, d: usize) -> f64 {
    let n = (m + d as u64 - 1) as f64;
    if d == 1 {
        return 0.0;
    }
    n * binary_entropy(m as f64 / n).expect("ratio in [0, 1]")
}

/// `log2 d + kd_sigma / d`
pub fn rate_asymptote(d: usize, kd_sigma: f64) -> f64 {
    (d as f64).log2() + kd_sigma / d as f64
}

/// Inputs of the finite-`m` rate bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolParams {
    pub d: usize,
    pub m: u64,
    /// Fractional deviation threshold.
    pub delta: f64,
    /// Rate slack of the shield subprotocol.
    pub delta_prime: f64,
    /// Imperfection of the subprotocol output.
    pub eps: f64,
    /// Assumed distillable key of the shield product, in bits.
    pub kd_sigma: f64,
    /// `log2 d_t` of the subprotocol output.
    pub log_dt: f64,
}

impl ProtocolParams {
    /// Default threshold, `delta_prime = 0` and `log_dt = t_min kd_sigma`.
    pub fn new(d: usize, m: u64, kd_sigma: f64, eps: f64) -> Result<Self> {
        let delta = delta_default(m, d)?.value;
        let tm = t_min(m, d, delta) as f64;
        let p = Self { d, m, delta, delta_prime: 0.0, eps, kd_sigma, log_dt: tm * kd_sigma };
        p.validate()?;
        Ok(p)
    }

    /// Replaces `delta` and re-derives the minimal `log_dt`.
    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.log_dt = self.min_log_dt();
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta_prime(mut self, delta_prime: f64) -> Result<Self> {
        self.delta_prime = delta_prime;
        self.log_dt = self.min_log_dt();
        self.validate()?;
        Ok(self)
    }

    pub fn t_min(&self) -> u64 {
        t_min(self.m, self.d, self.delta)
    }

    fn min_log_dt(&self) -> f64 {
        (self.t_min() as f64 * (self.kd_sigma - self.delta_prime)).max(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.m == 0 {
            return Err(Error::domain("d and m must be positive"));
        }
        if !(self.delta >= 0.0 && self.delta < 1.0) {
            return Err(Error::domain(format!("delta = {} outside [0, 1)", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(Error::domain(format!("eps = {} outside [0, 1]", self.eps)));
        }
        if !(self.kd_sigma >= 0.0) || !(self.delta_prime >= 0.0) {
            return Err(Error::domain("kd_sigma and delta_prime must be nonnegative"));
        }
        if self.log_dt + 1e-12 < self.min_log_dt() {
            return Err(Error::domain(format!(
                "log_dt = {} is below t_min (kd_sigma - delta_prime) = {}",
                self.log_dt,
                self.min_log_dt()
            )));
        }
        Ok(())
    }
}

/// All terms of the finite-`m` lower bound on the Devetak-Winter rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateReport {
    pub p_b_bound: f64,
    pub t_min: u64,
    pub type_entropy_term: f64,
    pub g1: f64,
    pub g2: f64,
    pub f: f64,
    pub lower_bound_bits: f64,
    pub per_copy_rate: f64,
    pub asymptote: f64,
    /// `per_copy_rate <= asymptote`; a lower bound should never pass it.
    pub below_asymptote: bool,
}

/// `m log d + (1 - p_B) t (kd - delta') - (m+d-1) h(m/(m+d-1)) - g1 - g2`.
///
/// `p_B` is replaced by its exponential bound. `h(2 p_B)` is taken as 1 once
/// `2 p_B` passes 1/2, keeping the term an upper estimate.
pub fn lemma1_lower_bound(params: &ProtocolParams) -> Result<RateReport> {
    params.validate()?;
    let ProtocolParams { d, m, delta, delta_prime, eps, kd_sigma, log_dt } = *params;
    let mf = m as f64;
    let log_d = (d as f64).log2();
    let p_b = pb_bound(m, d, delta);
    let tm = t_min(m, d, delta);
    let h_eps = binary_entropy(eps)?;
    let h2pb = if 2.0 * p_b <= 0.5 { binary_entropy(2.0 * p_b)? } else { 1.0 };
    let block = mf * log_d + log_dt;
    let g1 = 2.0 * p_b * mf * log_d + h2pb + 5.0 * eps * block + 3.0 * h_eps;
    let g2 = eps * log_dt + eta(eps)? + 4.0 * eps * block + 2.0 * h_eps;
    let f = g1 + g2;
    let types = type_entropy_term(m, d);
    let lower = mf * log_d + (1.0 - p_b) * tm as f64 * (kd_sigma - delta_prime) - types - f;
    let per_copy = lower / mf;
    let asymptote = rate_asymptote(d, kd_sigma);
    Ok(RateReport {
        p_b_bound: p_b,
        t_min: tm,
        type_entropy_term: types,
        g1,
        g2,
        f,
        lower_bound_bits: lower,
        per_copy_rate: per_copy,
        asymptote,
        below_asymptote: per_copy <= asymptote + 1e-12,
    })
}
