use crate::error::{Error, Result};
use crate::op::TensorOperator;
use crate::scalar::Real;

/// Stable argsort of a key string: position `k` of the sorted order holds
/// factor `perm[k]`. Feeding it to `permute_subsystems` on
/// `sigma_{i_1} (x) ... (x) sigma_{i_m}` yields `sigma_0^{t_0} (x) ... (x) sigma_{d-1}^{t_{d-1}}`.
pub fn sort_permutation(key: &[usize]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..key.len()).collect();
    perm.sort_by_key(|&k| key[k]);
    perm
}

/// Applies [`sort_permutation`] to a product of equally sized shield factors,
/// each spanning `factor_subsystems` consecutive subsystems.
pub fn sort_shield_factors<T: Real>(
    op: &TensorOperator<T>,
    key: &[usize],
    factor_subsystems: usize,
) -> Result<TensorOperator<T>> {
    if op.num_subsystems() != key.len() * factor_subsystems {
        return Err(Error::dims(format!(
            "{} subsystems for {} factors of {factor_subsystems}",
            op.num_subsystems(),
            key.len()
        )));
    }
    let perm: Vec<usize> = sort_permutation(key)
        .into_iter()
        .flat_map(|f| (0..factor_subsystems).map(move |s| f * factor_subsystems + s))
        .collect();
    op.permute_subsystems(&perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, rng_from_seed};

    #[test]
    fn permutations() {
        assert_eq!(sort_permutation(&[0, 0, 1]), vec![0, 1, 2]);
        assert_eq!(sort_permutation(&[1, 0]), vec![1, 0]);
        assert_eq!(sort_permutation(&[1, 0, 0, 1]), vec![1, 2, 0, 3]);
    }

    #[test]
    fn sorted_product_matches_kron() {
        let mut rng = rng_from_seed(41);
        let s0 = random_density::<f64, _>(&[2], 2, &mut rng).into_op();
        let s1 = random_density::<f64, _>(&[2], 2, &mut rng).into_op();
        let key = [1, 0, 0, 1];
        let factors: Vec<&TensorOperator<f64>> = key.iter().map(|&k| if k == 0 { &s0 } else { &s1 }).collect();
        let product = TensorOperator::kron_all(factors).unwrap();
        let sorted = sort_shield_factors(&product, &key, 1).unwrap();
        let target = TensorOperator::kron_all([&s0, &s0, &s1, &s1]).unwrap();
        assert!(sorted.max_abs_diff(&target).unwrap() < 1e-15);
    }
}
