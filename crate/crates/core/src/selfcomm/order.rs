use crate::error::{Error, Result};

/// A reordering of eigenvalues together with its partial sums.
///
/// `permutation[k]` is the index (into the input array) of the value placed at
/// position `k`, and `partial_sums[k]` is the sum of the first `k + 1` placed values.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumOrder {
    pub permutation: Vec<usize>,
    pub partial_sums: Vec<f64>,
}

impl PartialSumOrder {
    pub fn max_partial_sum(&self) -> f64 {
        self.partial_sums.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_partial_sum(&self) -> f64 {
        self.partial_sums.iter().copied().fold(0.0, f64::min)
    }
}

pub const DEFAULT_TRACE_TOL: f64 = 1e-9;

pub(crate) fn max_abs(values: &[f64]) -> f64 {
    values.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Fails unless `|Σλ| ≤ tol · n · max|λ|`.
pub fn check_trace_zero(values: &[f64], tol: f64) -> Result<()> {
    let sum: f64 = values.iter().sum();
    let allowed = tol * values.len() as f64 * max_abs(values);
    if sum.abs() > allowed {
        return Err(Error::invalid(
            "trace",
            format!("trace not zero: sum of eigenvalues is {sum:e} (allowed {allowed:e})"),
        ));
    }
    Ok(())
}

fn build(values: &[f64], mut pick: impl FnMut(f64, f64, &[usize]) -> usize) -> PartialSumOrder {
    let bound = max_abs(values);
    let mut remaining: Vec<usize> = (0..values.len()).collect();
    let mut permutation = Vec::with_capacity(values.len());
    let mut partial_sums = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    while !remaining.is_empty() {
        let pos = pick(sum, bound, &remaining);
        let idx = remaining.remove(pos);
        sum += values[idx];
        permutation.push(idx);
        partial_sums.push(sum);
    }
    PartialSumOrder {
        permutation,
        partial_sums,
    }
}

/// Position in `remaining` of the extreme value among those satisfying `filter`;
/// ties go to the smallest original index since `remaining` stays sorted.
fn extreme(
    values: &[f64],
    remaining: &[usize],
    filter: impl Fn(f64) -> bool,
    better: impl Fn(f64, f64) -> bool,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (pos, &idx) in remaining.iter().enumerate() {
        let v = values[idx];
        if !filter(v) {
            continue;
        }
        match best {
            Some(b) if !better(v, values[remaining[b]]) => {}
            _ => best = Some(pos),
        }
    }
    best
}

/// Ordering whose partial sums stay in `[0, 2·max|λ|]`.
///
/// While the running sum is below `max|λ|` and a nonnegative value remains, the
/// largest remaining nonnegative value is taken; otherwise the remaining
/// negative value closest to zero.
pub fn greedy_nonneg_order(values: &[f64]) -> Result<PartialSumOrder> {
    greedy_nonneg_order_with(values, DEFAULT_TRACE_TOL)
}

pub fn greedy_nonneg_order_with(values: &[f64], trace_tol: f64) -> Result<PartialSumOrder> {
    check_trace_zero(values, trace_tol)?;
    Ok(build(values, |sum, bound, remaining| {
        let nonneg = extreme(values, remaining, |v| v >= 0.0, |a, b| a > b);
        let neg = extreme(values, remaining, |v| v < 0.0, |a, b| a > b);
        match (nonneg, neg) {
            (Some(p), _) if sum < bound => p,
            (_, Some(n)) => n,
            (Some(p), None) => p,
            (None, None) => unreachable!("remaining is non-empty"),
        }
    }))
}

/// Ordering whose partial sums stay in `[−max|λ|, max|λ|]`.
///
/// When the running sum is `≤ 0` the largest remaining value is taken,
/// otherwise the smallest.
pub fn signed_order(values: &[f64]) -> Result<PartialSumOrder> {
    signed_order_with(values, DEFAULT_TRACE_TOL)
}

pub fn signed_order_with(values: &[f64], trace_tol: f64) -> Result<PartialSumOrder> {
    check_trace_zero(values, trace_tol)?;
    Ok(build(values, |sum, _, remaining| {
        if sum <= 0.0 {
            extreme(values, remaining, |_| true, |a, b| a > b)
        } else {
            extreme(values, remaining, |_| true, |a, b| a < b)
        }
        .expect("remaining is non-empty")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values_in_order(values: &[f64], o: &PartialSumOrder) -> Vec<f64> {
        o.permutation.iter().map(|&i| values[i]).collect()
    }

    #[test]
    fn greedy_two_point() {
        let v = [1.0, -1.0];
        let o = greedy_nonneg_order(&v).unwrap();
        assert_eq!(values_in_order(&v, &o), vec![1.0, -1.0]);
        assert_eq!(o.partial_sums, vec![1.0, 0.0]);
    }

    #[test]
    fn greedy_all_zero_is_identity() {
        let o = greedy_nonneg_order(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(o.permutation, vec![0, 1, 2]);
        assert_eq!(o.partial_sums, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn greedy_one_large_positive() {
        let v = [3.0, -1.0, -1.0, -1.0];
        let o = greedy_nonneg_order(&v).unwrap();
        assert_eq!(values_in_order(&v, &o), vec![3.0, -1.0, -1.0, -1.0]);
        assert_eq!(o.partial_sums, vec![3.0, 2.0, 1.0, 0.0]);
        assert_eq!(o.permutation, vec![0, 1, 2, 3]);
    }

    #[test]
    fn greedy_ties_follow_input_order() {
        let v = [-1.0, 1.0, -1.0, 1.0];
        let o = greedy_nonneg_order(&v).unwrap();
        assert_eq!(o.permutation, vec![1, 0, 3, 2]);
    }

    #[test]
    fn signed_examples() {
        let o = signed_order(&[1.0, -1.0]).unwrap();
        assert_eq!(o.partial_sums, vec![1.0, 0.0]);

        let v = [2.0, -1.0, -1.0];
        let o = signed_order(&v).unwrap();
        assert_eq!(values_in_order(&v, &o), vec![2.0, -1.0, -1.0]);
        assert_eq!(o.partial_sums, vec![2.0, 1.0, 0.0]);

        let v = [1.0, 1.0, -2.0];
        let o = signed_order(&v).unwrap();
        assert_eq!(values_in_order(&v, &o), vec![1.0, -2.0, 1.0]);
        assert_eq!(o.partial_sums, vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn rejects_nonzero_trace() {
        assert!(matches!(
            greedy_nonneg_order(&[1.0, 1.0]),
            Err(Error::InvalidInput { .. })
        ));
        assert!(signed_order(&[0.5, -0.25]).is_err());
        assert!(greedy_nonneg_order(&[]).unwrap().permutation.is_empty());
    }
}
