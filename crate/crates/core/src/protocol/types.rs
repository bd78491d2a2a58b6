use num_rational::Ratio;

use crate::error::{Error, Result};

/// Default cap on the number of enumerated types.
pub const DEFAULT_TYPE_BUDGET: usize = 1 << 20;

/// Symbol counts of a length-`m` string over `d` symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeHistogram {
    counts: Vec<u32>,
    multiplicity: u128,
    total: u128,
}

impl TypeHistogram {
    /// Builds the type of the given counts; `d` is `counts.len()`.
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        let d = counts.len();
        if d == 0 {
            return Err(Error::domain("a type needs at least one symbol"));
        }
        let m: u32 = counts.iter().sum();
        let total = (d as u128)
            .checked_pow(m)
            .ok_or(Error::Budget { needed: u128::MAX, limit: u128::MAX })?;
        let multiplicity = multinomial(&counts)?;
        Ok(Self { counts, multiplicity, total })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn len(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphabet(&self) -> usize {
        self.counts.len()
    }

    /// `|Q_t|`, the number of strings of this type.
    pub fn multiplicity(&self) -> u128 {
        self.multiplicity
    }

    /// `|Q_t| / d^m`, exactly.
    pub fn prob(&self) -> Ratio<u128> {
        Ratio::new(self.multiplicity, self.total)
    }

    pub fn prob_f64(&self) -> f64 {
        self.multiplicity as f64 / self.total as f64
    }

    /// Every symbol frequency within `delta` of `1/d`.
    pub fn is_good(&self, delta: f64) -> bool {
        let d = self.alphabet() as f64;
        let m = self.len() as f64;
        // |c/m - 1/d| <= delta  <=>  |d c - m| <= delta d m, exact in the integers
        self.counts.iter().all(|&c| (d * c as f64 - m).abs() <= delta * d * m)
    }

    /// Type of a string of symbols in `0..d`.
    pub fn of_string(symbols: &[usize], d: usize) -> Result<Self> {
        let mut counts = vec![0u32; d];
        for &s in symbols {
            if s >= d {
                return Err(Error::domain(format!("symbol {s} outside 0..{d}")));
            }
            counts[s] += 1;
        }
        Self::new(counts)
    }
}

fn binomial(n: u32, k: u32) -> Option<u128> {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}

fn multinomial(counts: &[u32]) -> Result<u128> {
    let mut remaining: u32 = counts.iter().sum();
    let mut acc: u128 = 1;
    for &c in counts {
        let b = binomial(remaining, c).ok_or(Error::Budget { needed: u128::MAX, limit: u128::MAX })?;
        acc = acc.checked_mul(b).ok_or(Error::Budget { needed: u128::MAX, limit: u128::MAX })?;
        remaining -= c;
    }
    Ok(acc)
}

/// `C(m + d - 1, m)`, the number of types.
pub fn type_count(d: usize, m: u32) -> Option<u128> {
    if d == 0 {
        return None;
    }
    binomial(m + d as u32 - 1, m)
}

/// All types of length-`m` strings over `d` symbols, first count descending.
pub fn type_enumerate(d: usize, m: u32) -> Result<Vec<TypeHistogram>> {
    type_enumerate_with_budget(d, m, DEFAULT_TYPE_BUDGET)
}

pub fn type_enumerate_with_budget(d: usize, m: u32, max_types: usize) -> Result<Vec<TypeHistogram>> {
    if d == 0 || m == 0 {
        return Err(Error::domain(format!("need d, m >= 1, got d = {d}, m = {m}")));
    }
    let count = type_count(d, m).unwrap_or(u128::MAX);
    if count > max_types as u128 {
        return Err(Error::Budget { needed: count, limit: max_types as u128 });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut counts = vec![0u32; d];
    fill(&mut counts, 0, m, &mut out)?;
    Ok(out)
}

fn fill(counts: &mut [u32], pos: usize, left: u32, out: &mut Vec<TypeHistogram>) -> Result<()> {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        out.push(TypeHistogram::new(counts.to_vec())?);
        return Ok(());
    }
    for c in (0..=left).rev() {
        counts[pos] = c;
        fill(counts, pos + 1, left - c, out)?;
    }
    Ok(())
}

/// Splits types into those passing the `delta` threshold and the rest.
pub fn good_set(types: &[TypeHistogram], delta: f64) -> (Vec<TypeHistogram>, Vec<TypeHistogram>) {
    types.iter().cloned().partition(|t| t.is_good(delta))
}

/// Exact total probability of a set of types.
pub fn total_prob(types: &[TypeHistogram]) -> Ratio<u128> {
    types.iter().fold(Ratio::from_integer(0), |acc, t| acc + t.prob())
}
