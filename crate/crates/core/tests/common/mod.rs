#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use sflab_core::linalg::DenseMatrix;
use sflab_core::presentation::AlgebraSpec;

/// Rejection-samples a spec with `Σ a_i b_i / c_i = 1` and `Π c_i ≤ max_d`.
pub fn random_spec<R: Rng>(rng: &mut R, max_d: u64) -> AlgebraSpec {
    loop {
        let n = rng.gen_range(1..=3);
        let mut summands = Vec::with_capacity(n);
        let mut d = 1u64;
        for _ in 0..n {
            let c = rng.gen_range(1..=8u64);
            let b = rng.gen_range(1..=c);
            let a = rng.gen_range(1..=3u64);
            summands.push((a, b, c));
            d *= c;
        }
        if d > max_d {
            continue;
        }
        let total: Ratio<u64> = summands.iter().map(|&(a, b, c)| Ratio::new(a * b, c)).sum();
        if total == Ratio::from_integer(1) {
            return AlgebraSpec::new(summands);
        }
    }
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_dense<R: Rng>(rng: &mut R, n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, |_, _| random_complex(rng))
}

/// Generators of a random `⊕_i M_{k_i} ⊗ 1_{m_i}`, conjugated by a random permutation.
pub fn random_block_generators<R: Rng>(rng: &mut R) -> Vec<DenseMatrix> {
    let blocks = rng.gen_range(1..=2);
    let shape: Vec<(usize, usize)> = (0..blocks).map(|_| (rng.gen_range(1..=2), rng.gen_range(1..=2))).collect();
    let n: usize = shape.iter().map(|(k, m)| k * m).sum();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let p = DenseMatrix::from_fn(n, |i, j| if perm[j] == i { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    let gens_count = rng.gen_range(1..=2);
    (0..gens_count)
        .map(|_| {
            let mut acc: Option<DenseMatrix> = None;
            for &(k, m) in &shape {
                let blk = random_dense(rng, k).kron(&DenseMatrix::identity(m));
                acc = Some(match acc {
                    None => blk,
                    Some(a) => a.direct_sum(&blk),
                });
            }
            p.mul(&acc.expect("at least one block")).mul(&p.adjoint())
        })
        .collect()
}
