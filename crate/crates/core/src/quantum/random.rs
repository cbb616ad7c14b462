//! Seeded sampling of Haar unitaries, random states, and random POVMs.
//!
//! All randomness flows through `SeededRng`, a counter-based ChaCha stream:
//! the same seed yields the same draw sequence on every platform, and child
//! generators derived per instance index keep parallel campaigns and restarts
//! reproducible regardless of scheduling.

use super::{pure_state, DensityMatrix, Povm, QuantumError};
use crate::linalg::{Complex64, ComplexMatrix};
use crate::tolerances::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic random source: a 64-bit seed plus ChaCha counter state.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream for instance or restart `index`. Children of
    /// the same parent never overlap each other or the parent stream.
    pub fn derive(&self, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(index.wrapping_add(1));
        SeededRng {
            seed: self.seed,
            inner,
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.random_range(lo..hi)
    }

    pub fn coin(&mut self) -> bool {
        self.inner.random()
    }
}

fn ginibre(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| rng.complex_normal())
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix via modified
/// Gram-Schmidt with a re-orthogonalization pass. Keeping the R diagonal real
/// positive fixes the column phases to the Haar convention.
pub fn haar_unitary(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be at least 1");
    'draw: loop {
        let g = ginibre(dim, rng);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut v: Vec<Complex64> = (0..dim).map(|i| g.get(i, j)).collect();
            for _ in 0..2 {
                for q in cols.iter() {
                    let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= overlap * qi;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                // Numerically dependent columns; measure zero, retry whole draw.
                continue 'draw;
            }
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            cols.push(v);
        }
        return ComplexMatrix::from_fn(dim, |i, j| cols[j][i]);
    }
}

/// Haar-random pure state as a density matrix.
pub fn random_pure(dim: usize, rng: &mut SeededRng) -> DensityMatrix {
    assert!(dim >= 1, "dimension must be at least 1");
    loop {
        let amplitudes: Vec<Complex64> = (0..dim).map(|_| rng.complex_normal()).collect();
        if let Ok(rho) = pure_state(&amplitudes) {
            return rho;
        }
    }
}

/// Random mixed state of the given rank: rho = G G^dagger / tr(G G^dagger)
/// with G a dim x rank Ginibre draw.
pub fn random_density(
    dim: usize,
    rank: usize,
    rng: &mut SeededRng,
) -> Result<DensityMatrix, QuantumError> {
    if dim == 0 {
        return Err(QuantumError::ZeroDim);
    }
    if rank == 0 || rank > dim {
        return Err(QuantumError::RankOutOfRange { rank, dim });
    }
    let g: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..rank).map(|_| rng.complex_normal()).collect())
        .collect();
    let gram = ComplexMatrix::from_fn(dim, |i, j| {
        (0..rank).map(|k| g[i][k] * g[j][k].conj()).sum()
    });
    let trace = gram.trace().re;
    if trace <= 0.0 {
        // Unreachable for Gaussian draws; retry rather than divide by zero.
        return random_density(dim, rank, rng);
    }
    Ok(DensityMatrix::new(gram.scale_re(1.0 / trace))
        .expect("normalized Gram matrix is a valid state"))
}

/// Rank-one PVM from the columns of a Haar unitary.
pub fn random_pvm(dim: usize, rng: &mut SeededRng) -> Povm {
    let u = haar_unitary(dim, rng);
    let elements = (0..dim)
        .map(|k| {
            let col: Vec<Complex64> = (0..dim).map(|i| u.get(i, k)).collect();
            ComplexMatrix::outer(&col)
        })
        .collect();
    Povm::new(elements).expect("columns of a unitary form a valid PVM")
}

/// Random POVM with `outcomes` elements: E_i = S^{-1/2} A_i S^{-1/2} with
/// A_i Ginibre Gram matrices and S their sum. A draw whose S is singular
/// within tolerance is resampled; ten failures become an error.
pub fn random_povm(
    dim: usize,
    outcomes: usize,
    rng: &mut SeededRng,
) -> Result<Povm, QuantumError> {
    if dim == 0 {
        return Err(QuantumError::ZeroDim);
    }
    if outcomes == 0 {
        return Err(QuantumError::EmptyPovm);
    }
    let attempts = 10;
    for _ in 0..attempts {
        let parts: Vec<ComplexMatrix> = (0..outcomes)
            .map(|_| {
                let g = ginibre(dim, rng);
                g.matmul(&g.conjugate_transpose()).expect("same dims")
            })
            .collect();
        let mut sum = ComplexMatrix::zeros(dim);
        for a in &parts {
            sum = sum.add(a);
        }
        let eig = sum.hermitian_eig().expect("Gram sums are Hermitian");
        let min = eig.eigenvalues[0];
        let max = eig.eigenvalues[dim - 1];
        if min < 1e-8 * max {
            continue;
        }
        let inv_sqrt = inverse_sqrt_from_eig(&eig.eigenvalues, &eig.eigenvectors);
        let elements: Vec<ComplexMatrix> = parts
            .iter()
            .map(|a| {
                inv_sqrt
                    .matmul(a)
                    .and_then(|m| m.matmul(&inv_sqrt))
                    .expect("same dims")
                    .hermitian_part()
            })
            .collect();
        match Povm::new(elements) {
            Ok(povm) => return Ok(povm),
            Err(_) => continue,
        }
    }
    Err(QuantumError::SingularNormalization { attempts })
}

/// V diag(1/sqrt(max(lambda, floor))) V^dagger.
fn inverse_sqrt_from_eig(eigenvalues: &[f64], eigenvectors: &ComplexMatrix) -> ComplexMatrix {
    let floor = Tolerances::standard().eigenvalue_floor;
    let d = eigenvalues.len();
    let weights: Vec<f64> = eigenvalues
        .iter()
        .map(|&l| 1.0 / l.max(floor).sqrt())
        .collect();
    ComplexMatrix::from_fn(d, |i, j| {
        (0..d)
            .map(|k| eigenvectors.get(i, k) * weights[k] * eigenvectors.get(j, k).conj())
            .sum()
    })
}

/// Random instance pieces used by campaigns: a state of random rank.
pub fn random_state_of_random_rank(dim: usize, rng: &mut SeededRng) -> DensityMatrix {
    let rank = 1 + rng.index(dim);
    if rank == 1 {
        random_pure(dim, rng)
    } else {
        random_density(dim, rank, rng).expect("rank in range")
    }
}

/// Explicitly non-random mixed state helper for tests and demos.
pub fn diagonal_state(probs: &[f64]) -> Result<DensityMatrix, QuantumError> {
    let dim = probs.len();
    if dim == 0 {
        return Err(QuantumError::ZeroDim);
    }
    let mat = ComplexMatrix::from_fn(dim, |i, j| {
        if i == j {
            Complex64::new(probs[i], 0.0)
        } else {
            Complex64::ZERO
        }
    });
    DensityMatrix::new(mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_of_product;
    use crate::quantum::maximally_mixed;

    #[test]
    fn same_seed_reproduces_every_sampler() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        let ua = haar_unitary(4, &mut a);
        let ub = haar_unitary(4, &mut b);
        assert_eq!(ua, ub);
        let ra = random_pure(4, &mut a);
        let rb = random_pure(4, &mut b);
        assert_eq!(ra.matrix(), rb.matrix());
        let pa = random_povm(3, 4, &mut a).unwrap();
        let pb = random_povm(3, 4, &mut b).unwrap();
        for (x, y) in pa.elements().iter().zip(pb.elements()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn derived_streams_differ_from_parent_and_each_other() {
        let master = SeededRng::new(7);
        let mut c0 = master.derive(0);
        let mut c1 = master.derive(1);
        let mut c0_again = master.derive(0);
        let a = c0.normal();
        let b = c1.normal();
        assert_ne!(a, b);
        assert_eq!(a, c0_again.normal());
        assert_eq!(c0.seed(), 7);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = SeededRng::new(5);
        for dim in [1, 2, 5, 8] {
            let u = haar_unitary(dim, &mut rng);
            let gram = u.conjugate_transpose().matmul(&u).unwrap();
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-10);
        }
    }

    #[test]
    fn random_pure_states_have_unit_purity() {
        let mut rng = SeededRng::new(11);
        for _ in 0..20 {
            let rho = random_pure(3, &mut rng);
            assert!((rho.purity() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn random_pure_mean_approaches_maximally_mixed() {
        let mut rng = SeededRng::new(2024);
        let samples = 10_000;
        let mut mean = ComplexMatrix::zeros(2);
        for _ in 0..samples {
            mean = mean.add(random_pure(2, &mut rng).matrix());
        }
        mean = mean.scale_re(1.0 / samples as f64);
        let target = maximally_mixed(2).unwrap();
        assert!(mean.max_abs_diff(target.matrix()) < 0.02);
    }

    #[test]
    fn random_density_rank_controls_purity() {
        let mut rng = SeededRng::new(9);
        let full = random_density(2, 2, &mut rng).unwrap();
        assert_eq!(full.dim(), 2);
        assert!(matches!(
            random_density(2, 3, &mut rng).unwrap_err(),
            QuantumError::RankOutOfRange { rank: 3, dim: 2 }
        ));
        assert!(matches!(
            random_density(2, 0, &mut rng).unwrap_err(),
            QuantumError::RankOutOfRange { rank: 0, dim: 2 }
        ));

        // Median purity over seeds: rank-4 states sit strictly below pure ones.
        let mut rank4 = Vec::new();
        for seed in 0..200 {
            let mut r = SeededRng::new(seed);
            rank4.push(random_density(4, 4, &mut r).unwrap().purity());
        }
        rank4.sort_by(f64::total_cmp);
        let median4 = rank4[100];
        assert!(median4 < 0.9);
        let mut r = SeededRng::new(1);
        assert!((random_density(4, 1, &mut r).unwrap().purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn random_pvm_projectors_are_orthogonal() {
        let mut rng = SeededRng::new(3);
        let pvm = random_pvm(4, &mut rng);
        assert!(pvm.is_projective());
        for (i, a) in pvm.elements().iter().enumerate() {
            for (j, b) in pvm.elements().iter().enumerate() {
                let overlap = trace_of_product(a, b).re;
                if i == j {
                    assert!((overlap - 1.0).abs() < 1e-10);
                } else {
                    assert!(overlap.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn random_povm_elements_are_contractions() {
        let mut rng = SeededRng::new(8);
        let povm = random_povm(2, 3, &mut rng).unwrap();
        assert_eq!(povm.len(), 3);
        for e in povm.elements() {
            let eig = e.hermitian_eig().unwrap();
            assert!(eig.eigenvalues[0] >= -1e-9);
            assert!(eig.eigenvalues[1] <= 1.0 + 1e-9);
            // E^2 <= E for contractions.
            let sq = e.matmul(e).unwrap();
            let diff = e.sub(&sq);
            assert!(diff.is_psd(1e-9).unwrap());
        }
    }

    #[test]
    fn random_povm_rejects_empty_request() {
        let mut rng = SeededRng::new(1);
        assert!(matches!(
            random_povm(2, 0, &mut rng).unwrap_err(),
            QuantumError::EmptyPovm
        ));
    }

    #[test]
    fn diagonal_state_builds_classical_mixtures() {
        let rho = diagonal_state(&[0.7, 0.3]).unwrap();
        assert!((rho.purity() - 0.58).abs() < 1e-12);
    }
}
