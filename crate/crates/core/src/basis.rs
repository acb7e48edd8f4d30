//! z-basis conventions shared by gadgets and the spectral engine.
//!
//! A qubit digit `d` has `σ^z = 1 - 2d` (digit 0 is spin up); a qutrit digit
//! `d` has `T^z = 1 - d`. Composite states are mixed-radix numbers with site 0
//! least significant.

/// z eigenvalue of `digit` on a site of dimension `dim` (2 or 3).
pub fn z_value(dim: usize, digit: usize) -> i64 {
    debug_assert!(digit < dim);
    match dim {
        2 => 1 - 2 * digit as i64,
        3 => 1 - digit as i64,
        _ => panic!("unsupported site dimension {dim}"),
    }
}

/// Digit carrying z eigenvalue `z` on a site of dimension `dim`.
pub fn digit_of(dim: usize, z: i64) -> Option<usize> {
    (0..dim).find(|&d| z_value(dim, d) == z)
}

/// Product of dimensions, saturating at `u128::MAX`.
pub fn total_dimension(dims: &[usize]) -> u128 {
    dims.iter()
        .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
        .unwrap_or(u128::MAX)
}

/// Digits of `state` in mixed radix `dims`.
pub fn digits(mut state: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&d| {
            let digit = state % d;
            state /= d;
            digit
        })
        .collect()
}

/// Mixed-radix index of `digits`.
pub fn index(digits: &[usize], dims: &[usize]) -> usize {
    digits
        .iter()
        .zip(dims)
        .rev()
        .fold(0, |acc, (&d, &dim)| acc * dim + d)
}

/// Calls `f` with the z values of every state of `dims`, in index order.
pub fn for_each_z(dims: &[usize], mut f: impl FnMut(&[i64])) {
    let mut digits = vec![0usize; dims.len()];
    let mut z: Vec<i64> = dims.iter().map(|&d| z_value(d, 0)).collect();
    loop {
        f(&z);
        let mut site = 0;
        loop {
            if site == dims.len() {
                return;
            }
            digits[site] += 1;
            if digits[site] < dims[site] {
                z[site] = z_value(dims[site], digits[site]);
                break;
            }
            digits[site] = 0;
            z[site] = z_value(dims[site], 0);
            site += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(z_value(2, 0), 1);
        assert_eq!(z_value(2, 1), -1);
        assert_eq!(
            (0..3).map(|d| z_value(3, d)).collect::<Vec<_>>(),
            vec![1, 0, -1]
        );
        assert_eq!(digit_of(3, -1), Some(2));
        assert_eq!(total_dimension(&[2, 3, 3]), 18);
    }

    #[test]
    fn index_round_trip_and_enumeration_order() {
        let dims = [2, 3, 2];
        let mut seen = Vec::new();
        for_each_z(&dims, |z| seen.push(z.to_vec()));
        assert_eq!(seen.len(), 12);
        for (i, z) in seen.iter().enumerate() {
            let ds = digits(i, &dims);
            assert_eq!(index(&ds, &dims), i);
            let expect: Vec<i64> = ds.iter().zip(&dims).map(|(&d, &n)| z_value(n, d)).collect();
            assert_eq!(z, &expect);
        }
        let mut count = 0;
        for_each_z(&[], |_| count += 1);
        assert_eq!(count, 1);
    }
}
