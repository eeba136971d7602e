//! Weighted reduced graph over the parts of a partition.
//!
//! Each pair of parts carries its measured edge density; the working weight
//! zeroes out pairs that were flagged irregular and pairs whose density falls
//! below the floor `eps1`, so downstream packing only sees usable pairs.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::partition::EquitablePartition;

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientGraph {
    k: usize,
    part_sizes: Vec<usize>,
    density: Vec<f64>,
    weight: Vec<f64>,
    regular: Vec<bool>,
    eps1: f64,
}

impl QuotientGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn density(&self, i: usize, j: usize) -> f64 {
        self.density[i * self.k + j]
    }

    /// Density with irregular and below-floor pairs zeroed.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weight[i * self.k + j]
    }

    pub fn is_regular(&self, i: usize, j: usize) -> bool {
        self.regular[i * self.k + j]
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    /// Pairs `i < j` with positive working weight.
    pub fn positive_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.k {
            for j in i + 1..self.k {
                if self.weight(i, j) > 0.0 {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    pub fn mean_positive_weight(&self) -> f64 {
        let pairs = self.positive_pairs();
        if pairs.is_empty() {
            return 0.0;
        }
        pairs.iter().map(|&(i, j)| self.weight(i, j)).sum::<f64>() / pairs.len() as f64
    }

    /// Build directly from a weight matrix (row-major `k x k`); densities
    /// equal the weights and every pair is marked regular.
    pub fn from_weights(k: usize, part_sizes: Vec<usize>, weight: Vec<f64>, eps1: f64) -> Self {
        assert_eq!(weight.len(), k * k);
        assert_eq!(part_sizes.len(), k);
        QuotientGraph {
            k,
            part_sizes,
            density: weight.clone(),
            weight,
            regular: vec![true; k * k],
            eps1,
        }
    }
}

/// Measure all pair densities of `p` in `g` and zero out the flagged
/// irregular pairs and those below the density floor.
pub fn build_quotient(
    g: &Graph,
    p: &EquitablePartition,
    eps1: f64,
    irregular: &[(usize, usize)],
) -> QuotientGraph {
    let k = p.k();
    let of = p.part_of();
    let sizes = p.sizes();
    let mut counts = vec![0u64; k * k];
    for &(u, v) in g.edges() {
        let (i, j) = (of[u as usize] as usize, of[v as usize] as usize);
        if i != j {
            counts[i * k + j] += 1;
            counts[j * k + i] += 1;
        }
    }
    let mut density = vec![0.0f64; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j && sizes[i] > 0 && sizes[j] > 0 {
                density[i * k + j] = counts[i * k + j] as f64 / (sizes[i] as f64 * sizes[j] as f64);
            }
        }
    }
    let mut regular = vec![true; k * k];
    for &(i, j) in irregular {
        regular[i * k + j] = false;
        regular[j * k + i] = false;
    }
    let mut weight = density.clone();
    for i in 0..k {
        for j in 0..k {
            if i == j || !regular[i * k + j] || density[i * k + j] < eps1 {
                weight[i * k + j] = 0.0;
            }
        }
    }
    QuotientGraph { k, part_sizes: sizes, density, weight, regular, eps1 }
}
