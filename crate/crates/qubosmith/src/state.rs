//! Binary assignment with cached energy and local fields.
//!
//! The cached field `f_i = Q_ii + sum_{j != i} c_ij x_j` is the energy change
//! scale of variable `i` given all others fixed: flipping bit `i` changes the
//! energy by exactly `(1 - 2 x_i) * f_i`. This makes one Metropolis proposal
//! O(1) and one accepted flip O(deg(i)), which is what keeps sweep-based
//! solvers tractable at large `n`.

use crate::matrix::{BitVector, QuboMatrix};

/// Single-owner mutable assignment tied to the matrix it was built from.
///
/// May be moved between threads but never shared mutably; every solver read
/// or replica owns its own state. Index arguments out of `0..n` panic, like
/// slice indexing.
#[derive(Clone)]
pub struct EnergyState {
    bits: BitVector,
    energy: f64,
    fields: Vec<f64>,
}

impl EnergyState {
    /// Builds the cache from scratch: one full evaluation plus one
    /// field pass.
    pub fn new(q: &QuboMatrix, bits: BitVector) -> crate::Result<Self> {
        let energy = q.energy(&bits)?;
        let fields = q.local_fields(&bits);
        Ok(Self {
            bits,
            energy,
            fields,
        })
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        self.energy
    }

    #[inline]
    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    #[inline]
    pub fn field(&self, i: usize) -> f64 {
        self.fields[i]
    }

    /// Exact energy change if bit `i` were flipped; does not mutate.
    #[inline]
    pub fn flip_delta(&self, i: usize) -> f64 {
        (1.0 - 2.0 * self.bits.get(i) as f64) * self.fields[i]
    }

    /// Toggles bit `i`, updating the cached energy by the flip delta and
    /// every neighboring field by `+-c_ij`. Cost is proportional to the
    /// number of stored couplers incident to `i`. Returns the applied delta.
    ///
    /// `q` must be the matrix this state was built from.
    #[inline]
    pub fn apply_flip(&mut self, q: &QuboMatrix, i: usize) -> f64 {
        debug_assert_eq!(q.num_vars(), self.bits.len());
        let delta = self.flip_delta(i);
        self.energy += delta;
        self.bits.toggle(i);
        // new value 1 -> neighbors gain c_ij, new value 0 -> they lose it
        let sign = if self.bits.get(i) == 1 { 1.0 } else { -1.0 };
        q.update_fields_for_flip(&mut self.fields, i, sign);
        delta
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_qubo, GeneratorSpec};
    use crate::matrix::matrix_from_triples;
    use crate::rng::Rng;

    fn two_var_fixture() -> QuboMatrix {
        matrix_from_triples(2, [(0, 0, 1.0), (0, 1, -3.0), (1, 1, 1.0)]).unwrap()
    }

    #[test]
    fn flip_delta_hand_computed() {
        let q = two_var_fixture();
        let s = EnergyState::new(&q, BitVector::from_bits(&[1, 0])).unwrap();
        assert_eq!(s.energy(), 1.0);
        assert_eq!(s.flip_delta(1), -2.0);
    }

    #[test]
    fn flip_delta_is_odd_under_flip() {
        let q = random_qubo(&GeneratorSpec {
            n: 10,
            sigma: 1.0,
            seed: 4,
        })
        .unwrap();
        let mut rng = Rng::from_seed(8);
        let mut s = EnergyState::new(&q, BitVector::random(10, &mut rng)).unwrap();
        for i in 0..10 {
            let before = s.flip_delta(i);
            s.apply_flip(&q, i);
            let after = s.flip_delta(i);
            // f_i does not depend on x_i, so this holds exactly
            assert_eq!(before + after, 0.0);
            s.apply_flip(&q, i);
        }
    }

    #[test]
    fn double_flip_restores_state() {
        let q = random_qubo(&GeneratorSpec {
            n: 12,
            sigma: 1.0,
            seed: 5,
        })
        .unwrap();
        let mut rng = Rng::from_seed(2);
        let mut s = EnergyState::new(&q, BitVector::random(12, &mut rng)).unwrap();
        let e0 = s.energy();
        let bits0 = s.bits().clone();
        let fields0 = s.fields.clone();
        s.apply_flip(&q, 7);
        s.apply_flip(&q, 7);
        assert_eq!(*s.bits(), bits0);
        assert!((s.energy() - e0).abs() < 1e-9);
        for i in 0..12 {
            assert!((s.fields[i] - fields0[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn deltas_match_full_reevaluation() {
        let q = random_qubo(&GeneratorSpec {
            n: 16,
            sigma: 1.0,
            seed: 3,
        })
        .unwrap();
        let mut rng = Rng::from_seed(31);
        let mut s = EnergyState::new(&q, BitVector::random(16, &mut rng)).unwrap();
        let mut prev = q.energy(s.bits()).unwrap();
        // 10^5 random (state, i) pairs along a flip walk
        for _ in 0..100_000 {
            let i = rng.index(16);
            let delta = s.flip_delta(i);
            s.apply_flip(&q, i);
            let fresh = q.energy(s.bits()).unwrap();
            assert!(
                (delta - (fresh - prev)).abs() < 1e-9,
                "delta {delta} vs {}",
                fresh - prev
            );
            prev = fresh;
        }
    }

    #[test]
    fn cached_energy_tracks_scratch_energy() {
        let q = random_qubo(&GeneratorSpec {
            n: 12,
            sigma: 1.0,
            seed: 6,
        })
        .unwrap();
        let mut rng = Rng::from_seed(14);
        let mut s = EnergyState::new(&q, BitVector::random(12, &mut rng)).unwrap();
        for _ in 0..10_000 {
            s.apply_flip(&q, rng.index(12));
        }
        let fresh = q.energy(s.bits()).unwrap();
        assert!((s.energy() - fresh).abs() < 1e-8);
    }

    #[test]
    fn isolated_zero_variable_has_zero_delta() {
        // variable 2 has no couplers and zero diagonal
        let q = matrix_from_triples(3, [(0, 0, 1.0), (0, 1, -2.0)]).unwrap();
        let mut s = EnergyState::new(&q, BitVector::from_bits(&[1, 1, 0])).unwrap();
        let e = s.energy();
        assert_eq!(s.flip_delta(2), 0.0);
        s.apply_flip(&q, 2);
        assert_eq!(s.energy(), e);
    }

    #[test]
    #[should_panic]
    fn out_of_range_index_panics() {
        let q = two_var_fixture();
        let s = EnergyState::new(&q, BitVector::zeros(2)).unwrap();
        let _ = s.flip_delta(2);
    }

    #[test]
    fn sparse_matrix_incremental_consistency() {
        // ring plus a few chords, forced sparse by low density
        let mut triples = vec![(0usize, 0usize, 0.3)];
        let n = 40;
        for i in 0..n {
            triples.push((i, (i + 1) % n, if i % 2 == 0 { -1.0 } else { 0.5 }));
        }
        let q = matrix_from_triples(n, triples).unwrap();
        assert_eq!(q.storage_kind(), crate::matrix::StorageKind::SparseCoordinate);
        let mut rng = Rng::from_seed(21);
        let mut s = EnergyState::new(&q, BitVector::random(n, &mut rng)).unwrap();
        for _ in 0..20_000 {
            let i = rng.index(n);
            let d = s.flip_delta(i);
            let before = q.energy(s.bits()).unwrap();
            s.apply_flip(&q, i);
            let after = q.energy(s.bits()).unwrap();
            assert!((d - (after - before)).abs() < 1e-9);
        }
    }
}
