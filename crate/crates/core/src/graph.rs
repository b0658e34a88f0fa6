//! Complete communication graph and the quadratic consensus-deviation form.
//!
//! For the complete graph on `n` nodes the Laplacian is `L = n·I − 1·1ᵀ`, so
//! `xᵀLx = n·Σxᵢ² − (Σxᵢ)² = n·Σ(xᵢ − x̄)²`. The cost path uses the centred
//! form, which is O(n) and does not lose precision when the fleet has drifted
//! far from the origin.

use crate::error::{check_len, invalid_arg, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompleteGraph {
    n: usize,
}

impl CompleteGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid_arg("graph needs at least one agent");
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `xᵀLx`, the summed squared pairwise disagreement (each unordered pair once).
    pub fn consensus_cost<T: Scalar>(&self, x: &[T]) -> Result<T> {
        check_len("state vector", x.len(), self.n)?;
        Ok(quadratic_deviation(x))
    }

    /// Dense `n×n` Laplacian. Debug/test aid only.
    pub fn laplacian_dense<T: Scalar>(&self) -> Vec<Vec<T>> {
        let n = self.n;
        let diag = T::from_usize_lossy(n - 1);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { diag } else { -T::one() })
                    .collect()
            })
            .collect()
    }
}

/// Unchecked `xᵀLx` for the complete graph on `x.len()` nodes.
#[inline]
pub(crate) fn quadratic_deviation<T: Scalar>(x: &[T]) -> T {
    let n = x.len();
    if n < 2 {
        return T::zero();
    }
    // shifting by x₀ first keeps an exact consensus at exactly zero cost
    let nf = T::from_usize_lossy(n);
    let x0 = x[0];
    let mean = x.iter().map(|&v| v - x0).sum::<T>() / nf;
    let ss = x.iter().fold(T::zero(), |acc, &v| {
        let d = v - x0 - mean;
        acc + d * d
    });
    nf * ss
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dense_form(l: &[Vec<f64>], x: &[f64]) -> f64 {
        l.iter()
            .zip(x)
            .map(|(row, xi)| xi * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    fn pairwise_form(x: &[f64]) -> f64 {
        // half the sum over ordered pairs
        let mut s = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                if i != j {
                    s += (x[i] - x[j]).powi(2);
                }
            }
        }
        0.5 * s
    }

    #[test]
    fn cost_examples() {
        let g3 = CompleteGraph::new(3).unwrap();
        for c in [-4.0, 0.0, 2.5, 1e6] {
            assert_eq!(g3.consensus_cost(&[c, c, c]).unwrap(), 0.0);
        }
        let g2 = CompleteGraph::new(2).unwrap();
        assert_relative_eq!(g2.consensus_cost(&[1.0, 0.0]).unwrap(), 1.0);
        // brute force with L = 3I − 11ᵀ
        let l3: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 2.0 } else { -1.0 }).collect())
            .collect();
        assert_relative_eq!(dense_form(&l3, &[1.0, 0.0, 0.0]), 2.0);
        assert_relative_eq!(g3.consensus_cost(&[1.0, 0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = CompleteGraph::new(3).unwrap();
        assert!(g.consensus_cost(&[1.0, 2.0]).is_err());
        assert!(CompleteGraph::new(0).is_err());
    }

    #[test]
    fn exact_consensus_costs_exactly_zero() {
        let g = CompleteGraph::new(6).unwrap();
        for c in [0.1, -3.7, 1e6 + 0.3, 1.0 / 3.0] {
            assert_eq!(g.consensus_cost(&[c; 6]).unwrap(), 0.0);
        }
    }

    #[test]
    fn dense_laplacians() {
        let l1: Vec<Vec<f64>> = CompleteGraph::new(1).unwrap().laplacian_dense();
        assert_eq!(l1, vec![vec![0.0]]);
        let l2: Vec<Vec<f64>> = CompleteGraph::new(2).unwrap().laplacian_dense();
        assert_eq!(l2, vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let l3: Vec<Vec<f64>> = CompleteGraph::new(3).unwrap().laplacian_dense();
        assert_eq!(
            l3,
            vec![
                vec![2.0, -1.0, -1.0],
                vec![-1.0, 2.0, -1.0],
                vec![-1.0, -1.0, 2.0]
            ]
        );
    }

    #[test]
    fn laplacian_annihilates_ones_and_is_symmetric() {
        for n in 1..10 {
            let l: Vec<Vec<f64>> = CompleteGraph::new(n).unwrap().laplacian_dense();
            for (i, row) in l.iter().enumerate() {
                assert_eq!(row.iter().sum::<f64>(), 0.0);
                for (j, v) in row.iter().enumerate() {
                    assert_eq!(*v, l[j][i]);
                }
            }
        }
    }

    #[test]
    fn single_precision_agrees() {
        let g = CompleteGraph::new(3).unwrap();
        let c: f32 = g.consensus_cost(&[1.0f32, 0.0, 0.0]).unwrap();
        assert!((c - 2.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn matches_dense_and_pairwise(x in prop::collection::vec(-10.0f64..10.0, 1..=16)) {
            let g = CompleteGraph::new(x.len()).unwrap();
            let fast = g.consensus_cost(&x).unwrap();
            let dense = dense_form(&g.laplacian_dense(), &x);
            let pairs = pairwise_form(&x);
            let scale = dense.abs().max(1e-12);
            prop_assert!((fast - dense).abs() / scale <= 1e-12);
            prop_assert!((fast - pairs).abs() / scale <= 1e-12);
            prop_assert!(fast >= 0.0);
        }

        #[test]
        fn translation_invariant_and_quadratic(
            x in prop::collection::vec(-10.0f64..10.0, 1..=16),
            shift in -100.0f64..100.0,
            alpha in -5.0f64..5.0,
        ) {
            let g = CompleteGraph::new(x.len()).unwrap();
            let base = g.consensus_cost(&x).unwrap();
            let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
            let scaled: Vec<f64> = x.iter().map(|v| alpha * v).collect();
            let tol = 1e-9 * (1.0 + base);
            prop_assert!((g.consensus_cost(&shifted).unwrap() - base).abs() <= tol);
            prop_assert!((g.consensus_cost(&scaled).unwrap() - alpha * alpha * base).abs() <= tol * (1.0 + alpha * alpha));
        }
    }
}
