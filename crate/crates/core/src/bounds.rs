//! Closed-form distance and rate bounds around private states.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measures::{binary_entropy, eta};
use crate::scalar::Real;

/// Constant used in the upper branch of [`approx_irreducible_sandwich`] when
/// the caller has no better one.
pub const DEFAULT_BIG_O: f64 = 6.0;

/// Upper end of the window on which `eta` is increasing: `1/e`.
pub fn eta_window<T: Real>() -> T {
    (-T::one()).exp()
}

fn check_key_dim<T: Real>(d: T) -> Result<()> {
    if !(d >= T::lit(2.0)) {
        return Err(Error::domain(format!("dimension {d} is below 2")));
    }
    Ok(())
}

/// `eps - 1/6 + 2 eta(eps) / (3 log2 d)`; `z(d)` is its smallest root.
pub fn z_residual<T: Real>(eps: T, d: T) -> Result<T> {
    Ok(eps - T::one() / T::lit(6.0) + T::lit(2.0) * eta(eps)? / (T::lit(3.0) * d.log2()))
}

/// Smallest `eps` with `eps >= 1/6 - 2 eta(eps) / (3 log2 d)`, by bisection
/// on `[0, 1/6]` (the residual is increasing there).
pub fn z_of_d<T: Real>(d: T) -> Result<T> {
    check_key_dim(d)?;
    let mut lo = T::zero();
    let mut hi = T::one() / T::lit(6.0);
    let tol = T::lit(1e-12).max(T::epsilon());
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / T::lit(2.0);
        if z_residual(mid, d)? >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A bound value that may carry no information.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub vacuous: bool,
}

/// `1/6 - 2 / (3 log2 d)`; vacuous when not positive.
pub fn locc_z_bound<T: Real>(d: T) -> Result<Flagged<T>> {
    check_key_dim(d)?;
    let value = T::one() / T::lit(6.0) - T::lit(2.0) / (T::lit(3.0) * d.log2());
    Ok(Flagged { value, vacuous: value <= T::zero() })
}

/// `1 - 1/sqrt(d_k)`
pub fn sep_distance_bound<T: Real>(dk: T) -> Result<T> {
    check_key_dim(dk)?;
    Ok(T::one() - T::one() / dk.sqrt())
}

/// Rate window `(log d - 6 eps log d - 4 eta(eps), log d + c (eps log d + h(eps)))`
/// for an `eps`-approximate irreducible private state.
pub fn approx_irreducible_sandwich<T: Real>(eps: T, d: T, big_o: T) -> Result<(T, T)> {
    check_key_dim(d)?;
    if !(eps >= T::zero() && eps <= eta_window()) {
        return Err(Error::domain(format!("eps = {eps} outside [0, 1/e]")));
    }
    let ld = d.log2();
    let lower = ld - T::lit(6.0) * eps * ld - T::lit(4.0) * eta(eps)?;
    let upper = ld + big_o * (eps * ld + binary_entropy(eps)?);
    Ok((lower, upper))
}

/// `(2/3) (1 - (1 - 2^-m)^m / (1 + 2^-m))`, evaluated without cancellation.
pub fn sec6_epsilon<T: Real>(m: u32) -> Result<T> {
    if m < 2 {
        return Err(Error::domain(format!("m = {m} is below 2")));
    }
    let x = T::lit(2.0).powi(-(m as i32));
    let log_ratio = T::from_usize_lossy(m as usize) * (-x).ln_1p() - x.ln_1p();
    Ok(-T::lit(2.0) / T::lit(3.0) * log_ratio.exp_m1())
}

/// `2 sqrt(4 sqrt(2 eps) + eta(2 sqrt(2 eps))) + 2 sqrt(2 eps)`; needs `2 sqrt(2 eps) <= 1`.
pub fn sec6_f<T: Real>(eps: T) -> Result<T> {
    if !(eps >= T::zero()) {
        return Err(Error::domain(format!("eps = {eps} is negative")));
    }
    let r = (T::lit(2.0) * eps).sqrt();
    let arg = T::lit(2.0) * r;
    if arg > T::one() {
        return Err(Error::domain(format!("eta argument 2 sqrt(2 eps) = {arg} exceeds 1")));
    }
    Ok(T::lit(2.0) * (T::lit(4.0) * r + eta(arg)?).sqrt() + arg)
}

/// Names accepted by [`curve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundName {
    /// `z(d)` over `d`.
    Zd,
    /// LOCC distance bound over `d`.
    Locc,
    /// Separable distance bound over `d_k`.
    SepDistance,
    /// `eps(m)` over `m`.
    Sec6Epsilon,
    /// `f(eps)` over `eps`.
    Sec6F,
    /// Lower end of the sandwich over `eps`, at `d = 2`.
    SandwichLower,
}

impl BoundName {
    pub const ALL: [BoundName; 6] = [
        BoundName::Zd,
        BoundName::Locc,
        BoundName::SepDistance,
        BoundName::Sec6Epsilon,
        BoundName::Sec6F,
        BoundName::SandwichLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::Zd => "zd",
            BoundName::Locc => "locc",
            BoundName::SepDistance => "sepdist",
            BoundName::Sec6Epsilon => "sec6-epsilon",
            BoundName::Sec6F => "sec6-f",
            BoundName::SandwichLower => "sandwich-lower",
        }
    }

    /// Column name of the grid parameter.
    pub fn parameter(self) -> &'static str {
        match self {
            BoundName::Zd | BoundName::Locc => "d",
            BoundName::SepDistance => "dk",
            BoundName::Sec6Epsilon => "m",
            BoundName::Sec6F | BoundName::SandwichLower => "eps",
        }
    }

    fn note(self) -> &'static str {
        match self {
            BoundName::Zd => "trace-norm distance of key-undistillable states from a pdit, log base 2",
            BoundName::Locc => "no eta term; vacuous where not positive",
            BoundName::SepDistance => "distance convention without the factor 1/2",
            BoundName::Sec6Epsilon => "",
            BoundName::Sec6F => "defined while 2 sqrt(2 eps) <= 1",
            BoundName::SandwichLower => "d = 2",
        }
    }

    fn eval(self, x: f64) -> Result<f64> {
        match self {
            BoundName::Zd => z_of_d(x),
            BoundName::Locc => locc_z_bound(x).map(|f| f.value),
            BoundName::SepDistance => sep_distance_bound(x),
            BoundName::Sec6Epsilon => {
                if x.fract() != 0.0 || x < 0.0 || x > u32::MAX as f64 {
                    return Err(Error::domain(format!("m = {x} is not an integer")));
                }
                sec6_epsilon(x as u32)
            }
            BoundName::Sec6F => sec6_f(x),
            BoundName::SandwichLower => approx_irreducible_sandwich(x, 2.0, DEFAULT_BIG_O).map(|p| p.0),
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown bound '{s}'")))
    }
}

/// A bound tabulated over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve {
    pub name: BoundName,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub note: &'static str,
}

pub fn curve(name: BoundName, grid: &[f64]) -> Result<BoundCurve> {
    if grid.is_empty() {
        return Err(Error::domain("empty grid"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("grid must be strictly increasing"));
    }
    let values = grid.iter().map(|&x| name.eval(x)).collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve { name, grid: grid.to_vec(), values, note: name.note() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn z_values() {
        let z2: f64 = z_of_d(2.0).unwrap();
        assert!((z2 - 0.041).abs() <= 1e-3, "{z2}");
        assert!(z_residual(z2, 2.0).unwrap().abs() <= 1e-9);
        let big: f64 = z_of_d(2f64.powi(60)).unwrap();
        assert!((0.16..=1.0 / 6.0).contains(&big));
    }

    #[test]
    fn locc_and_sep() {
        let b = locc_z_bound(2.0).unwrap();
        assert_abs_diff_eq!(b.value, -0.5, epsilon = 1e-15);
        assert!(b.vacuous);
        assert_abs_diff_eq!(locc_z_bound(16.0).unwrap().value, 0.0, epsilon = 1e-15);
        assert!(locc_z_bound(2f64.powi(1000)).unwrap().value > 0.165);
        assert_abs_diff_eq!(sep_distance_bound(4.0).unwrap(), 0.5);
        assert_abs_diff_eq!(sep_distance_bound(2.0).unwrap(), 1.0 - 0.5f64.sqrt());
    }

    #[test]
    fn sandwich() {
        assert_eq!(approx_irreducible_sandwich(0.0, 2.0, 6.0).unwrap(), (1.0, 1.0));
        let eta01 = -0.1 * 0.1f64.log2();
        assert_abs_diff_eq!(eta01, 0.3322, epsilon = 1e-4);
        let (lo, hi) = approx_irreducible_sandwich(0.1, 2.0, 6.0).unwrap();
        assert_abs_diff_eq!(lo, 1.0 - 0.6 - 4.0 * eta01, epsilon = 1e-12);
        assert!(hi >= 1.0);
        assert!(approx_irreducible_sandwich(0.368, 2.0, 6.0).is_err());
    }

    #[test]
    fn sec6() {
        assert_abs_diff_eq!(sec6_epsilon::<f64>(2).unwrap(), 2.0 / 3.0 * 0.55, epsilon = 1e-12);
        let eps: Vec<f64> = (2..=60).map(|m| sec6_epsilon(m).unwrap()).collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(sec6_f(0.0).unwrap(), 0.0);
        assert!(sec6_f(0.2).is_err());
    }

    #[test]
    fn curves() {
        let grid: Vec<f64> = (1..=20).map(|k| 2f64.powi(k)).collect();
        let c = curve(BoundName::Zd, &grid).unwrap();
        assert!(c.values.windows(2).all(|w| w[0] <= w[1]));
        let l = curve(BoundName::Locc, &[8.0, 16.0, 32.0]).unwrap();
        assert!(l.values[0] < 0.0 && l.values[1].abs() < 1e-15 && l.values[2] > 0.0);
        assert!("nope".parse::<BoundName>().is_err());
        assert!(curve(BoundName::Zd, &[4.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn z_is_monotone_and_capped(a in 2.0f64..1e12, b in 2.0f64..1e12) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (zl, zh) = (z_of_d(lo).unwrap(), z_of_d(hi).unwrap());
            prop_assert!(zl <= zh + 1e-12);
            prop_assert!(zh <= 1.0 / 6.0);
            prop_assert!(z_residual(zh, hi).unwrap().abs() <= 1e-9);
        }

        #[test]
        fn sandwich_lower_decreases(a in 0.0f64..0.3678, b in 0.0f64..0.3678) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let l1 = approx_irreducible_sandwich(lo, 4.0, 6.0).unwrap().0;
            let l2 = approx_irreducible_sandwich(hi, 4.0, 6.0).unwrap().0;
            prop_assert!(l2 <= l1 + 1e-12);
        }

        #[test]
        fn locc_below_one_sixth(d in 2.0f64..1e300) {
            prop_assert!(locc_z_bound(d).unwrap().value <= 1.0 / 6.0);
        }
    }
}
