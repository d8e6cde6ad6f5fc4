//! Seeded sampling of states, unitaries and perfect channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::Channel;
use crate::error::Result;
use crate::matrix::{ComplexMatrix, StateVector, Tolerance, C64};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state on `n_qubits`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> Result<StateVector> {
    let amps = (0..1usize << n_qubits)
        .map(|_| gaussian_complex(rng))
        .collect();
    Ok(StateVector::new(n_qubits, amps)?
        .normalized()
        .expect("Gaussian sample is nonzero with probability one"))
}

/// Unitary obtained by Gram–Schmidt on the columns of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut q = ComplexMatrix::zeros(dim, dim);
    for (c, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            q[(r, c)] = z;
        }
    }
    q
}

/// Channel with matrix `2^{-n/2}·Q` for a random unitary `Q`.
pub fn random_perfect_channel<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Channel> {
    let q = random_unitary(rng, 1usize << n);
    Channel::from_matrix(
        q.scale_real(2f64.powf(-(n as f64) / 2.0)),
        Tolerance::default(),
    )
}

/// Random state of `2n` qubits, usually far from maximally entangled.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Channel> {
    Channel::from_state(random_state(rng, 2 * n)?, n, Tolerance::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(7);
        for dim in [2, 4, 8] {
            let q = random_unitary(&mut rng, dim);
            assert!(q.unitarity(Tolerance::new(1e-12).unwrap()).unwrap().holds);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = random_state(&mut seeded(3), 3).unwrap();
        let b = random_state(&mut seeded(3), 3).unwrap();
        assert_eq!(a, b);
        let c = random_state(&mut seeded_stream(3, 1), 3).unwrap();
        assert_ne!(a, c);
    }
}
