//! Canonical upper-triangular QUBO matrix and binary vectors.
//!
//! The energy of an assignment `x` is `sum over i <= j of Q_ij * x_i * x_j`;
//! diagonal entries are the linear coefficients (`x_i^2 = x_i`) and each
//! unordered interaction `{i, j}` is stored once with `i <= j`. Input with
//! `i > j` is normalized by swapping the indices and duplicate coordinates
//! are summed on ingestion, so all downstream code sees a single convention.

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Hard upper bound on the variable count.
pub const MAX_VARIABLES: usize = 50_000;

/// Density threshold at or above which the builder picks dense storage.
pub const DENSE_AUTO_THRESHOLD: f64 = 0.25;

/// A binary assignment; each element is 0 or 1.
///
/// `Ord` is lexicographic on the bit sequence, which is the tie-break order
/// used by the solvers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Builds from a 0/1 slice. Panics on values other than 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bit values must be 0 or 1");
        Self(bits.to_vec())
    }

    /// `n` fair random bits drawn from `rng` (one raw draw per bit, index
    /// order).
    pub fn random(n: usize, rng: &mut Rng) -> Self {
        Self((0..n).map(|_| rng.bit()).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u8) {
        debug_assert!(value <= 1);
        self.0[i] = value;
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        self.0[i] ^= 1;
    }

    #[inline]
    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// Hex-packed wire form: bit `k` occupies bit `k % 8` of byte `k / 8`
    /// (little-endian bit order), bytes rendered in order as lowercase hex.
    /// The variable count travels alongside the string since trailing pad
    /// bits are not self-describing.
    pub fn to_hex(&self) -> String {
        let mut bytes = vec![0u8; self.0.len().div_ceil(8)];
        for (k, &b) in self.0.iter().enumerate() {
            bytes[k / 8] |= b << (k % 8);
        }
        let mut s = String::with_capacity(bytes.len() * 2);
        for byte in bytes {
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    /// Inverse of [`to_hex`](Self::to_hex); `n` is the variable count.
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let expected = n.div_ceil(8);
        if hex.len() != expected * 2 {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "hex bit string has {} characters, expected {} for {} bits",
                    hex.len(),
                    expected * 2,
                    n
                ),
            });
        }
        let mut bytes = Vec::with_capacity(expected);
        for k in 0..expected {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16).map_err(|_| {
                Error::Parse {
                    line: 1,
                    message: format!("invalid hex byte at position {k}"),
                }
            })?;
            bytes.push(byte);
        }
        let mut bits = vec![0u8; n];
        for (k, bit) in bits.iter_mut().enumerate() {
            *bit = (bytes[k / 8] >> (k % 8)) & 1;
        }
        // pad bits beyond n must be zero
        if n % 8 != 0 && bytes[expected - 1] >> (n % 8) != 0 {
            return Err(Error::Parse {
                line: 1,
                message: "nonzero padding bits in hex bit string".into(),
            });
        }
        Ok(Self(bits))
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Wire form of a bit vector: hex-packed little-endian bytes plus the
/// explicit length.
#[derive(serde::Serialize, serde::Deserialize)]
struct BitVectorWire {
    n: usize,
    hex: String,
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BitVectorWire {
            n: self.len(),
            hex: self.to_hex(),
        }
        .serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let wire = BitVectorWire::deserialize(deserializer)?;
        BitVector::from_hex(wire.n, &wire.hex).map_err(serde::de::Error::custom)
    }
}

/// How coefficients are laid out in memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StorageKind {
    /// Row-major upper triangle, all `n(n+1)/2` slots present.
    DenseUpperTriangular,
    /// Coordinate list of the stored entries plus a symmetric adjacency
    /// index over the off-diagonal couplers.
    SparseCoordinate,
}

/// One stored coefficient, canonical `i <= j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub i: u32,
    pub j: u32,
    pub value: f64,
}

#[derive(Clone, Debug)]
enum Storage {
    Dense {
        /// `n(n+1)/2` slots, row-major: row `i` holds `Q_ii..Q_i(n-1)`.
        tri: Vec<f64>,
    },
    Sparse {
        /// Canonical entries sorted ascending by `(i, j)`.
        entries: Vec<Entry>,
        diag: Vec<f64>,
        /// CSR adjacency over off-diagonal couplers; each coupler appears in
        /// both endpoint rows.
        row_offsets: Vec<usize>,
        adj: Vec<(u32, f64)>,
    },
}

/// Immutable upper-triangular QUBO coefficient matrix.
///
/// Safe to share across threads; all solver mutability lives in
/// [`EnergyState`](crate::state::EnergyState).
#[derive(Clone, Debug)]
pub struct QuboMatrix {
    n: usize,
    /// Distinct off-diagonal coordinates ingested at build time. This is the
    /// interaction count of the density metric and is independent of the
    /// storage layout (a sparse set of couplers placed in dense storage is
    /// still a sparse set of interactions).
    interactions: usize,
    storage: Storage,
}

#[inline]
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * (2 * n - i + 1) / 2 + (j - i)
}

impl QuboMatrix {
    #[inline]
    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn storage_kind(&self) -> StorageKind {
        match self.storage {
            Storage::Dense { .. } => StorageKind::DenseUpperTriangular,
            Storage::Sparse { .. } => StorageKind::SparseCoordinate,
        }
    }

    /// Number of stored entries (diagonal included). Dense storage stores
    /// every slot.
    pub fn entry_count(&self) -> usize {
        match &self.storage {
            Storage::Dense { tri } => tri.len(),
            Storage::Sparse { entries, .. } => entries.len(),
        }
    }

    /// Number of stored strictly off-diagonal interaction coefficients.
    pub fn interaction_count(&self) -> usize {
        self.interactions
    }

    /// Stored-coupler density per the off-diagonal count over `C(n, 2)`.
    /// Errors for `n < 2` where the ratio is undefined.
    pub fn density(&self) -> Result<f64> {
        crate::gset::density(self.n, self.interaction_count())
    }

    #[inline]
    pub fn diagonal(&self, i: usize) -> f64 {
        match &self.storage {
            Storage::Dense { tri } => tri[tri_index(self.n, i, i)],
            Storage::Sparse { diag, .. } => diag[i],
        }
    }

    /// Stored coefficient for the unordered pair `{i, j}` (or the diagonal
    /// when `i == j`); 0.0 when absent.
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        match &self.storage {
            Storage::Dense { tri } => tri[tri_index(self.n, a, b)],
            Storage::Sparse { entries, .. } => {
                match entries.binary_search_by(|e| {
                    (e.i as usize, e.j as usize).cmp(&(a, b))
                }) {
                    Ok(pos) => entries[pos].value,
                    Err(_) => 0.0,
                }
            }
        }
    }

    /// Stored entries in ascending `(i, j)` order.
    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        EntryIter {
            matrix: self,
            pos: 0,
            row: 0,
            col: 0,
        }
    }

    /// Energy `sum_{i<=j} Q_ij x_i x_j`, accumulated in ascending `(i, j)`
    /// order so identical inputs give bit-identical sums.
    pub fn energy(&self, x: &BitVector) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let bits = x.as_slice();
        let mut acc = 0.0f64;
        match &self.storage {
            Storage::Dense { tri } => {
                for i in 0..self.n {
                    if bits[i] == 0 {
                        continue;
                    }
                    let base = tri_index(self.n, i, i);
                    let row = &tri[base..base + (self.n - i)];
                    acc += row[0];
                    for (off, &q) in row.iter().enumerate().skip(1) {
                        if bits[i + off] == 1 {
                            acc += q;
                        }
                    }
                }
            }
            Storage::Sparse { entries, .. } => {
                for e in entries {
                    if bits[e.i as usize] == 1 && bits[e.j as usize] == 1 {
                        acc += e.value;
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Local fields `f_i = Q_ii + sum_{j != i} c_ij x_j` for every variable.
    pub(crate) fn local_fields(&self, x: &BitVector) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let bits = x.as_slice();
        let mut fields = vec![0.0f64; self.n];
        match &self.storage {
            Storage::Dense { tri } => {
                for i in 0..self.n {
                    let base = tri_index(self.n, i, i);
                    fields[i] += tri[base];
                    for j in i + 1..self.n {
                        let c = tri[base + (j - i)];
                        if bits[j] == 1 {
                            fields[i] += c;
                        }
                        if bits[i] == 1 {
                            fields[j] += c;
                        }
                    }
                }
            }
            Storage::Sparse { entries, .. } => {
                for e in entries {
                    let (i, j) = (e.i as usize, e.j as usize);
                    if i == j {
                        fields[i] += e.value;
                    } else {
                        if bits[j] == 1 {
                            fields[i] += e.value;
                        }
                        if bits[i] == 1 {
                            fields[j] += e.value;
                        }
                    }
                }
            }
        }
        fields
    }

    /// Adds `sign * c_ij` to `fields[j]` for every stored coupler `{i, j}`;
    /// the update a flip of variable `i` applies to its neighbors.
    #[inline]
    pub(crate) fn update_fields_for_flip(&self, fields: &mut [f64], i: usize, sign: f64) {
        match &self.storage {
            Storage::Dense { tri } => {
                // column part: tri(j, i) for j < i, stride n - j - 1
                let mut idx = i; // tri_index(n, 0, i)
                for j in 0..i {
                    fields[j] += sign * tri[idx];
                    idx += self.n - j - 1;
                }
                // row part: contiguous tri(i, i+1)..tri(i, n-1)
                let base = tri_index(self.n, i, i);
                for j in i + 1..self.n {
                    fields[j] += sign * tri[base + (j - i)];
                }
            }
            Storage::Sparse {
                row_offsets, adj, ..
            } => {
                for &(j, c) in &adj[row_offsets[i]..row_offsets[i + 1]] {
                    fields[j as usize] += sign * c;
                }
            }
        }
    }

    /// Visits every off-diagonal neighbor of `i` (stored couplers, either
    /// orientation) as `(j, c_ij)`.
    #[inline]
    pub fn for_each_neighbor(&self, i: usize, mut f: impl FnMut(usize, f64)) {
        match &self.storage {
            Storage::Dense { tri } => {
                let mut idx = i;
                for j in 0..i {
                    f(j, tri[idx]);
                    idx += self.n - j - 1;
                }
                let base = tri_index(self.n, i, i);
                for j in i + 1..self.n {
                    f(j, tri[base + (j - i)]);
                }
            }
            Storage::Sparse {
                row_offsets, adj, ..
            } => {
                for &(j, c) in &adj[row_offsets[i]..row_offsets[i + 1]] {
                    f(j as usize, c);
                }
            }
        }
    }

    /// Off-diagonal neighbors of `i` (stored couplers, either orientation).
    pub fn neighbors(&self, i: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        self.for_each_neighbor(i, |j, c| out.push((j, c)));
        out
    }

    /// Approximate resident bytes of the coefficient storage.
    pub fn storage_bytes(&self) -> usize {
        match &self.storage {
            Storage::Dense { tri } => tri.len() * 8,
            Storage::Sparse {
                entries,
                diag,
                row_offsets,
                adj,
            } => entries.len() * 16 + diag.len() * 8 + row_offsets.len() * 8 + adj.len() * 16,
        }
    }

    /// Builds a dense matrix directly from a full upper triangle (row-major,
    /// `n(n+1)/2` values). Used by the generator to avoid materializing an
    /// entry list.
    pub(crate) fn from_dense_triangle(n: usize, tri: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_VARIABLES {
            return Err(Error::Config(format!(
                "variable count {n} outside 1..={MAX_VARIABLES}"
            )));
        }
        if tri.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: n * (n + 1) / 2,
                got: tri.len(),
            });
        }
        if let Some(pos) = tri.iter().position(|v| !v.is_finite()) {
            // recover (i, j) for the error message
            let mut i = 0;
            let mut rem = pos;
            while rem >= n - i {
                rem -= n - i;
                i += 1;
            }
            return Err(Error::NonFinite { i, j: i + rem });
        }
        Ok(Self {
            n,
            interactions: n * (n - 1) / 2,
            storage: Storage::Dense { tri },
        })
    }
}

struct EntryIter<'a> {
    matrix: &'a QuboMatrix,
    pos: usize,
    row: usize,
    col: usize,
}

impl Iterator for EntryIter<'_> {
    type Item = Entry;

    fn next(&mut self) -> Option<Entry> {
        match &self.matrix.storage {
            Storage::Dense { tri } => {
                if self.pos >= tri.len() {
                    return None;
                }
                let e = Entry {
                    i: self.row as u32,
                    j: self.col as u32,
                    value: tri[self.pos],
                };
                self.pos += 1;
                self.col += 1;
                if self.col == self.matrix.n {
                    self.row += 1;
                    self.col = self.row;
                }
                Some(e)
            }
            Storage::Sparse { entries, .. } => {
                let e = entries.get(self.pos).copied();
                self.pos += 1;
                e
            }
        }
    }
}

/// Accumulates `(i, j, value)` triples and normalizes them into a
/// [`QuboMatrix`]: indices with `i > j` are swapped, duplicates summed in
/// input order, and storage picked by density unless forced.
#[derive(Debug)]
pub struct QuboBuilder {
    n: usize,
    triples: Vec<(u32, u32, f64)>,
}

impl QuboBuilder {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VARIABLES {
            return Err(Error::Config(format!(
                "variable count {n} outside 1..={MAX_VARIABLES}"
            )));
        }
        Ok(Self {
            n,
            triples: Vec::new(),
        })
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) -> Result<&mut Self> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        if j >= self.n {
            return Err(Error::IndexOutOfRange { index: j, n: self.n });
        }
        if !value.is_finite() {
            return Err(Error::NonFinite { i, j });
        }
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.triples.push((a as u32, b as u32, value));
        Ok(self)
    }

    /// Finishes with automatic storage: dense when the off-diagonal density
    /// reaches [`DENSE_AUTO_THRESHOLD`], sparse otherwise.
    pub fn build(self) -> Result<QuboMatrix> {
        let entries = self.merge();
        let n = self.n;
        let off_diag = entries.iter().filter(|e| e.i != e.j).count() as u128;
        let max_pairs = (n as u128) * (n as u128 - 1) / 2;
        // off_diag / max_pairs >= 0.25, with n == 1 (no pairs) counting as dense
        let dense = off_diag * 4 >= max_pairs;
        Self::assemble(n, entries, if dense {
            StorageKind::DenseUpperTriangular
        } else {
            StorageKind::SparseCoordinate
        })
    }

    /// Finishes with an explicit storage choice.
    pub fn build_with_storage(self, kind: StorageKind) -> Result<QuboMatrix> {
        let entries = self.merge();
        Self::assemble(self.n, entries, kind)
    }

    fn merge(&self) -> Vec<Entry> {
        let mut triples = self.triples.clone();
        triples.sort_by_key(|&(i, j, _)| (i, j));
        let mut entries: Vec<Entry> = Vec::with_capacity(triples.len());
        for (i, j, v) in triples {
            match entries.last_mut() {
                Some(last) if last.i == i && last.j == j => last.value += v,
                _ => entries.push(Entry { i, j, value: v }),
            }
        }
        entries
    }

    fn assemble(n: usize, entries: Vec<Entry>, kind: StorageKind) -> Result<QuboMatrix> {
        let interactions = entries.iter().filter(|e| e.i != e.j).count();
        let storage = match kind {
            StorageKind::DenseUpperTriangular => {
                let mut tri = vec![0.0f64; n * (n + 1) / 2];
                for e in &entries {
                    tri[tri_index(n, e.i as usize, e.j as usize)] = e.value;
                }
                Storage::Dense { tri }
            }
            StorageKind::SparseCoordinate => {
                let mut diag = vec![0.0f64; n];
                let mut degree = vec![0usize; n];
                for e in &entries {
                    if e.i == e.j {
                        diag[e.i as usize] = e.value;
                    } else {
                        degree[e.i as usize] += 1;
                        degree[e.j as usize] += 1;
                    }
                }
                let mut row_offsets = Vec::with_capacity(n + 1);
                let mut acc = 0usize;
                row_offsets.push(0);
                for d in &degree {
                    acc += d;
                    row_offsets.push(acc);
                }
                let mut cursor = row_offsets.clone();
                let mut adj = vec![(0u32, 0.0f64); acc];
                for e in &entries {
                    if e.i != e.j {
                        adj[cursor[e.i as usize]] = (e.j, e.value);
                        cursor[e.i as usize] += 1;
                        adj[cursor[e.j as usize]] = (e.i, e.value);
                        cursor[e.j as usize] += 1;
                    }
                }
                Storage::Sparse {
                    entries,
                    diag,
                    row_offsets,
                    adj,
                }
            }
        };
        Ok(QuboMatrix {
            n,
            interactions,
            storage,
        })
    }
}

/// Convenience constructor from canonical-or-not triples.
pub fn matrix_from_triples(
    n: usize,
    triples: impl IntoIterator<Item = (usize, usize, f64)>,
) -> Result<QuboMatrix> {
    let mut b = QuboBuilder::new(n)?;
    for (i, j, v) in triples {
        b.add(i, j, v)?;
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var_fixture() -> QuboMatrix {
        // Q00 = 1, Q01 = -3, Q11 = 1
        matrix_from_triples(2, [(0, 0, 1.0), (0, 1, -3.0), (1, 1, 1.0)]).unwrap()
    }

    #[test]
    fn energy_empty_selection() {
        let q = two_var_fixture();
        assert_eq!(q.energy(&BitVector::from_bits(&[0, 0])).unwrap(), 0.0);
    }

    #[test]
    fn energy_hand_sum() {
        let q = two_var_fixture();
        assert_eq!(q.energy(&BitVector::from_bits(&[1, 1])).unwrap(), -1.0);
    }

    #[test]
    fn energy_dimension_mismatch() {
        let q = two_var_fixture();
        let err = q.energy(&BitVector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    /// Independent O(n^2) double-loop oracle over a full symmetric lookup.
    fn naive_energy(q: &QuboMatrix, x: &BitVector) -> f64 {
        let n = q.num_vars();
        let mut acc = 0.0;
        for i in 0..n {
            for j in i..n {
                acc += q.coefficient(i, j) * x.get(i) as f64 * x.get(j) as f64;
            }
        }
        acc
    }

    #[test]
    fn energy_matches_double_loop_oracle() {
        let spec = crate::generate::GeneratorSpec {
            n: 8,
            sigma: 0.1,
            seed: 7,
        };
        let q = crate::generate::random_qubo(&spec).unwrap();
        let mut rng = Rng::from_seed(123);
        for _ in 0..100 {
            let x = BitVector::random(8, &mut rng);
            let fast = q.energy(&x).unwrap();
            let slow = naive_energy(&q, &x);
            assert!((fast - slow).abs() < 1e-12, "fast {fast} slow {slow}");
        }
    }

    /// Storing (i, j, a) once must equal a dense full-matrix oracle that
    /// places `a` on (i, j) only -- no double counting.
    #[test]
    fn symmetrization_neutrality() {
        let n = 6;
        let mut rng = Rng::from_seed(42);
        let mut triples = Vec::new();
        let mut full = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.standard_normal();
                triples.push((i, j, v));
                full[i][j] = v;
            }
        }
        let q = matrix_from_triples(n, triples).unwrap();
        for assignment in 0..(1usize << n) {
            let bits: Vec<u8> = (0..n).map(|k| ((assignment >> k) & 1) as u8).collect();
            let x = BitVector::from_bits(&bits);
            let mut oracle = 0.0;
            for (i, row) in full.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    oracle += v * bits[i] as f64 * bits[j] as f64;
                }
            }
            assert!((q.energy(&x).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_swaps_and_sums() {
        // (1, 0) normalizes to (0, 1); duplicate (0, 1) entries sum
        let q = matrix_from_triples(2, [(1, 0, 2.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(q.coefficient(0, 1), 3.0);
        assert_eq!(q.coefficient(1, 0), 3.0);
        assert_eq!(q.interaction_count(), 1);
    }

    #[test]
    fn builder_rejects_bad_input() {
        let mut b = QuboBuilder::new(4).unwrap();
        assert!(matches!(
            b.add(0, 4, 1.0).unwrap_err(),
            Error::IndexOutOfRange { index: 4, .. }
        ));
        assert!(matches!(
            b.add(0, 1, f64::NAN).unwrap_err(),
            Error::NonFinite { .. }
        ));
        assert!(QuboBuilder::new(0).is_err());
        assert!(QuboBuilder::new(MAX_VARIABLES + 1).is_err());
    }

    #[test]
    fn storage_auto_selection() {
        // 25% of C(4,2) = 6 pairs is 1.5, so 2 couplers tip to dense
        let dense = matrix_from_triples(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(dense.storage_kind(), StorageKind::DenseUpperTriangular);
        let sparse = matrix_from_triples(4, [(0, 1, 1.0)]).unwrap();
        assert_eq!(sparse.storage_kind(), StorageKind::SparseCoordinate);
        // forced override
        let forced = {
            let mut b = QuboBuilder::new(4).unwrap();
            b.add(0, 1, 1.0).unwrap();
            b.build_with_storage(StorageKind::DenseUpperTriangular).unwrap()
        };
        assert_eq!(forced.storage_kind(), StorageKind::DenseUpperTriangular);
        assert_eq!(forced.entry_count(), 10); // n(n+1)/2 slots
    }

    #[test]
    fn dense_and_sparse_agree() {
        let triples = [(0, 0, 0.5), (0, 2, -1.25), (1, 3, 2.0), (3, 3, -0.75)];
        let d = {
            let mut b = QuboBuilder::new(4).unwrap();
            for &(i, j, v) in &triples {
                b.add(i, j, v).unwrap();
            }
            b.build_with_storage(StorageKind::DenseUpperTriangular).unwrap()
        };
        let s = {
            let mut b = QuboBuilder::new(4).unwrap();
            for &(i, j, v) in &triples {
                b.add(i, j, v).unwrap();
            }
            b.build_with_storage(StorageKind::SparseCoordinate).unwrap()
        };
        for assignment in 0..16usize {
            let bits: Vec<u8> = (0..4).map(|k| ((assignment >> k) & 1) as u8).collect();
            let x = BitVector::from_bits(&bits);
            assert_eq!(d.energy(&x).unwrap(), s.energy(&x).unwrap());
        }
        for i in 0..4 {
            let mut dn = d.neighbors(i);
            dn.retain(|&(_, c)| c != 0.0);
            let mut sn = s.neighbors(i);
            dn.sort_by_key(|&(j, _)| j);
            sn.sort_by_key(|&(j, _)| j);
            assert_eq!(dn, sn);
        }
    }

    #[test]
    fn deterministic_energy_is_bit_identical() {
        let spec = crate::generate::GeneratorSpec {
            n: 32,
            sigma: 1.0,
            seed: 9,
        };
        let q = crate::generate::random_qubo(&spec).unwrap();
        let mut rng = Rng::from_seed(1);
        let x = BitVector::random(32, &mut rng);
        let a = q.energy(&x).unwrap();
        let b = q.energy(&x).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn hex_round_trip() {
        let mut rng = Rng::from_seed(77);
        for n in [1usize, 7, 8, 9, 64, 101] {
            let x = BitVector::random(n, &mut rng);
            let hex = x.to_hex();
            let back = BitVector::from_hex(n, &hex).unwrap();
            assert_eq!(x, back);
        }
        assert!(BitVector::from_hex(5, "ff").is_err()); // nonzero padding
        assert!(BitVector::from_hex(5, "1f1f").is_err()); // wrong length
    }

    #[test]
    fn entries_iterate_ascending() {
        let q = matrix_from_triples(3, [(2, 2, 1.0), (0, 1, -1.0), (0, 0, 3.0)]).unwrap();
        let order: Vec<(u32, u32)> = q.entries().map(|e| (e.i, e.j)).collect();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(order, sorted);
    }
}
