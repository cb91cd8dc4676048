//! Linear algebra over the two element field.
//!
//! Vectors of `F_2^n` are packed into the low `n` bits of a `u32`: coordinate
//! `x_{i+1}` lives in bit `i`. With this encoding the inner product
//! `<S, x>` is the parity of `S & x`, and the integer value of a vector is
//! also its index into a truth table.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

/// Largest dimension for which `GL_n(F_2)` may be enumerated.
pub const MAX_ENUM_DIM: usize = 5;

#[inline]
pub(crate) fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Inner product over F2 of two packed vectors.
#[inline]
pub fn dot(a: u32, b: u32) -> bool {
    (a & b).count_ones() & 1 == 1
}

pub(crate) fn check_dim(what: &'static str, n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::DimensionOutOfRange {
            what,
            n,
            min: 1,
            max,
        });
    }
    Ok(())
}

/// A vector of `F_2^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorF2 {
    dim: usize,
    bits: u32,
}

impl VectorF2 {
    pub fn new(dim: usize, bits: u32) -> Result<Self> {
        check_dim("vector", dim, MAX_DIM)?;
        if bits & !low_mask(dim) != 0 {
            return Err(Error::InvalidParameter(format!(
                "value {bits:#x} has bits above dimension {dim}"
            )));
        }
        Ok(Self { dim, bits })
    }

    pub(crate) fn from_raw(dim: usize, bits: u32) -> Self {
        debug_assert!(bits & !low_mask(dim) == 0);
        Self { dim, bits }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, bits: 0 }
    }

    /// The standard basis vector with a one in coordinate `i` (zero based).
    pub fn unit(dim: usize, i: usize) -> Self {
        assert!(
            i < dim,
            "unit vector index {i} out of range for dimension {dim}"
        );
        Self { dim, bits: 1 << i }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Hamming weight.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn dot(&self, other: &VectorF2) -> bool {
        dot(self.bits, other.bits)
    }
}

impl std::ops::BitXor for VectorF2 {
    type Output = VectorF2;

    fn bitxor(self, rhs: VectorF2) -> VectorF2 {
        assert_eq!(
            self.dim, rhs.dim,
            "xor of vectors with different dimensions"
        );
        VectorF2 {
            dim: self.dim,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl fmt::Debug for VectorF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorF2(")?;
        for i in 0..self.dim {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

/// A square matrix over F2, stored as packed rows.
///
/// Bit `j` of row `i` is the entry `M[i][j]`, so `(Mx)_i = <row_i, x>`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixF2 {
    n: usize,
    rows: [u32; MAX_DIM],
}

impl MatrixF2 {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_DIM);
        let mut rows = [0u32; MAX_DIM];
        for (i, r) in rows.iter_mut().enumerate().take(n) {
            *r = 1 << i;
        }
        Self { n, rows }
    }

    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_DIM);
        Self {
            n,
            rows: [0; MAX_DIM],
        }
    }

    pub fn from_rows(n: usize, rows: &[u32]) -> Result<Self> {
        check_dim("matrix", n, MAX_DIM)?;
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rows.len(),
            });
        }
        let mut packed = [0u32; MAX_DIM];
        for (i, &r) in rows.iter().enumerate() {
            if r & !low_mask(n) != 0 {
                return Err(Error::InvalidParameter(format!(
                    "row {i} value {r:#x} exceeds dimension {n}"
                )));
            }
            packed[i] = r;
        }
        Ok(Self { n, rows: packed })
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(n: usize, columns: &[u32]) -> Result<Self> {
        let m = Self::from_rows(n, columns)?;
        Ok(m.transpose())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows[..self.n]
    }

    pub fn row(&self, i: usize) -> u32 {
        self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    /// Column `j` packed as a vector.
    pub fn column(&self, j: usize) -> u32 {
        let mut c = 0;
        for i in 0..self.n {
            c |= ((self.rows[i] >> j) & 1) << i;
        }
        c
    }

    /// `Mx` on packed vectors. No dimension checks.
    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        let mut y = 0;
        for i in 0..self.n {
            y |= (((self.rows[i] & x).count_ones()) & 1) << i;
        }
        y
    }

    /// Images `Mx` for every `x` in `F_2^n`, indexed by `x`.
    pub fn image_table(&self) -> Vec<u32> {
        let size = 1usize << self.n;
        let cols: Vec<u32> = (0..self.n).map(|j| self.column(j)).collect();
        let mut table = vec![0u32; size];
        for x in 1..size {
            let low = x.trailing_zeros() as usize;
            table[x] = table[x & (x - 1)] ^ cols[low];
        }
        table
    }

    pub fn mul_vec(&self, x: &VectorF2) -> Result<VectorF2> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.dim(),
            });
        }
        Ok(VectorF2::from_raw(self.n, self.apply(x.bits())))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &MatrixF2) -> Result<MatrixF2> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut out = MatrixF2::zero(self.n);
        for i in 0..self.n {
            let mut acc = 0;
            let mut r = self.rows[i];
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                acc ^= other.rows[j];
                r &= r - 1;
            }
            out.rows[i] = acc;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> MatrixF2 {
        let mut out = MatrixF2::zero(self.n);
        for j in 0..self.n {
            out.rows[j] = self.column(j);
        }
        out
    }

    /// Row rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        rank_of(self.rows())
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Gauss-Jordan inverse.
    pub fn invert(&self) -> Result<MatrixF2> {
        let n = self.n;
        let mut a = self.rows;
        let mut inv = MatrixF2::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| (a[r] >> col) & 1 == 1)
                .ok_or(Error::NotInvertible)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(MatrixF2 { n, rows: inv })
    }

    /// Parses the text format: `n` lines of `n` characters `0`/`1`.
    pub fn parse(text: &str) -> Result<MatrixF2> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.is_empty())
            .collect();
        let n = lines.len();
        check_dim("matrix", n, MAX_DIM)?;
        let mut rows = Vec::with_capacity(n);
        for (li, line) in lines.iter().enumerate() {
            let chars: Vec<char> = line.chars().collect();
            if chars.len() != n {
                return Err(Error::Parse {
                    line: li + 1,
                    column: chars.len().min(n) + 1,
                    msg: format!("expected {n} characters, found {}", chars.len()),
                });
            }
            let mut r = 0u32;
            for (j, c) in chars.iter().enumerate() {
                match c {
                    '0' => {}
                    '1' => r |= 1 << j,
                    other => {
                        return Err(Error::Parse {
                            line: li + 1,
                            column: j + 1,
                            msg: format!("illegal character {other:?}"),
                        })
                    }
                }
            }
            rows.push(r);
        }
        MatrixF2::from_rows(n, &rows)
    }
}

impl FromStr for MatrixF2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MatrixF2::parse(s)
    }
}

impl fmt::Display for MatrixF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for MatrixF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixF2[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            for j in 0..self.n {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
        }
        write!(f, "]")
    }
}

/// Rank of a list of packed vectors.
pub fn rank_of(vectors: &[u32]) -> usize {
    let mut echelon = Echelon::default();
    vectors.iter().filter(|&&v| echelon.insert(v)).count()
}

/// Incremental echelon basis keyed by leading bit.
#[derive(Default, Clone)]
pub(crate) struct Echelon {
    basis: Vec<u32>,
}

impl Echelon {
    pub(crate) fn reduce(&self, mut v: u32) -> u32 {
        for &b in &self.basis {
            let top = 31 - b.leading_zeros();
            if (v >> top) & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    /// Inserts `v`; returns `false` when `v` is already in the span.
    pub(crate) fn insert(&mut self, v: u32) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let pos = self
            .basis
            .iter()
            .position(|&b| b.leading_zeros() > r.leading_zeros())
            .unwrap_or(self.basis.len());
        self.basis.insert(pos, r);
        true
    }
}

/// `|GL_n(F_2)| = prod_{i=0}^{n-1} (2^n - 2^i)`.
pub fn gl_order(n: usize) -> BigUint {
    assert!(n <= MAX_DIM, "gl_order supports n <= {MAX_DIM}");
    let top = BigUint::from(1u32) << n;
    (0..n).fold(BigUint::from(1u32), |acc, i| {
        acc * (&top - (BigUint::from(1u32) << i))
    })
}

/// Streams every invertible `n x n` matrix exactly once.
///
/// Matrices are generated row by row, each row running through the integers
/// in increasing order and skipping the span of the rows above it. The
/// resulting order is lexicographic on the row sequence.
pub fn enumerate_gl(n: usize) -> Result<GlEnumerator> {
    check_dim("GL enumeration", n, MAX_ENUM_DIM)?;
    Ok(GlEnumerator::new(n, None))
}

/// The slice of [`enumerate_gl`] whose first row equals `first_row`, in the
/// same relative order.
pub fn enumerate_gl_with_first_row(n: usize, first_row: u32) -> Result<GlEnumerator> {
    check_dim("GL enumeration", n, MAX_ENUM_DIM)?;
    if first_row == 0 || first_row & !low_mask(n) != 0 {
        return Err(Error::InvalidParameter(format!(
            "first row {first_row:#x} is not a nonzero vector of dimension {n}"
        )));
    }
    Ok(GlEnumerator::new(n, Some(first_row)))
}

#[derive(Clone)]
pub struct GlEnumerator {
    n: usize,
    limit: u32,
    rows: [u32; MAX_ENUM_DIM],
    // spans[k]: elements of span(rows[..k]) as a bitmask over F_2^n
    spans: [u32; MAX_ENUM_DIM + 1],
    floor: usize,
    state: EnumState,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum EnumState {
    Fresh,
    Running,
    Done,
}

impl GlEnumerator {
    fn new(n: usize, first_row: Option<u32>) -> Self {
        let mut e = GlEnumerator {
            n,
            limit: 1 << n,
            rows: [0; MAX_ENUM_DIM],
            spans: [0; MAX_ENUM_DIM + 1],
            floor: 0,
            state: EnumState::Fresh,
        };
        e.spans[0] = 1;
        if let Some(r) = first_row {
            e.rows[0] = r;
            e.spans[1] = extend_span(e.spans[0], r, n);
            e.floor = 1;
        }
        e
    }

    fn next_candidate(&self, depth: usize, after: u32) -> Option<u32> {
        let span = self.spans[depth];
        (after + 1..self.limit).find(|&c| (span >> c) & 1 == 0)
    }

    fn fill_from(&mut self, depth: usize) {
        for k in depth..self.n {
            // a span of k < n rows is a proper subspace, so a candidate exists
            let c = self.next_candidate(k, 0).expect("proper subspace");
            self.rows[k] = c;
            self.spans[k + 1] = extend_span(self.spans[k], c, self.n);
        }
    }

    fn current(&self) -> MatrixF2 {
        let mut rows = [0u32; MAX_DIM];
        rows[..self.n].copy_from_slice(&self.rows[..self.n]);
        MatrixF2 { n: self.n, rows }
    }
}

fn extend_span(span: u32, v: u32, n: usize) -> u32 {
    let mut out = span;
    for e in 0..(1u32 << n) {
        if (span >> e) & 1 == 1 {
            out |= 1 << (e ^ v);
        }
    }
    out
}

impl Iterator for GlEnumerator {
    type Item = MatrixF2;

    fn next(&mut self) -> Option<MatrixF2> {
        match self.state {
            EnumState::Done => None,
            EnumState::Fresh => {
                self.fill_from(self.floor);
                self.state = EnumState::Running;
                Some(self.current())
            }
            EnumState::Running => {
                let mut depth = self.n;
                loop {
                    if depth == self.floor {
                        self.state = EnumState::Done;
                        return None;
                    }
                    depth -= 1;
                    if let Some(c) = self.next_candidate(depth, self.rows[depth]) {
                        self.rows[depth] = c;
                        self.spans[depth + 1] = extend_span(self.spans[depth], c, self.n);
                        self.fill_from(depth + 1);
                        return Some(self.current());
                    }
                }
            }
        }
    }
}

/// A basis of the span of some vectors, extended to an invertible change of
/// coordinates.
#[derive(Clone, Debug)]
pub struct BasisCompletion {
    /// Invertible `N` with `N * basis[i] = e_{i+1}`.
    pub transform: MatrixF2,
    /// Pivot vectors chosen from the input, in input order.
    pub basis: Vec<VectorF2>,
    /// Positions of the pivot vectors in the input.
    pub pivots: Vec<usize>,
}

impl BasisCompletion {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Picks a basis of `span(vectors)` (the first independent vectors in input
/// order), extends it with standard basis vectors, and returns the inverse of
/// the resulting basis matrix.
pub fn complete_basis(dim: usize, vectors: &[VectorF2]) -> Result<BasisCompletion> {
    check_dim("basis completion", dim, MAX_DIM)?;
    let mut echelon = Echelon::default();
    let mut basis = Vec::new();
    let mut pivots = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        if echelon.insert(v.bits()) {
            basis.push(*v);
            pivots.push(i);
        }
    }
    let mut columns: Vec<u32> = basis.iter().map(|v| v.bits()).collect();
    for j in 0..dim {
        if columns.len() == dim {
            break;
        }
        if echelon.insert(1 << j) {
            columns.push(1 << j);
        }
    }
    let change = MatrixF2::from_columns(dim, &columns)?;
    let transform = change.invert()?;
    Ok(BasisCompletion {
        transform,
        basis,
        pivots,
    })
}

/// Uniformly random element of `GL_n(F_2)` by rejection sampling.
pub fn random_gl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MatrixF2 {
    assert!((1..=MAX_DIM).contains(&n));
    loop {
        let rows: Vec<u32> = (0..n).map(|_| rng.gen::<u32>() & low_mask(n)).collect();
        let m = MatrixF2::from_rows(n, &rows).expect("masked rows");
        if m.is_invertible() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(n: usize, rows: &[u32]) -> MatrixF2 {
        MatrixF2::from_rows(n, rows).unwrap()
    }

    #[test]
    fn mat_vec_examples() {
        let id = MatrixF2::identity(3);
        assert_eq!(id.apply(0b101), 0b101);
        let swap = m(2, &[0b10, 0b01]);
        assert_eq!(swap.apply(0b01), 0b10);
        // rows (1,1) and (0,1): row 0 = bits {0,1}, row 1 = bit 1
        let upper = m(2, &[0b11, 0b10]);
        assert_eq!(upper.apply(0b11), 0b10);
    }

    #[test]
    fn mat_vec_matches_brute_force_2x2() {
        let upper = m(2, &[0b11, 0b10]);
        for x in 0..4u32 {
            let x1 = x & 1;
            let x2 = (x >> 1) & 1;
            // (Mx)_1 = x1 + x2, (Mx)_2 = x2
            let expect = (x1 ^ x2) | (x2 << 1);
            assert_eq!(upper.apply(x), expect);
        }
    }

    #[test]
    fn mul_vec_rejects_mismatch() {
        let id = MatrixF2::identity(3);
        let v = VectorF2::new(2, 1).unwrap();
        assert!(matches!(
            id.mul_vec(&v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invert_examples() {
        let id = MatrixF2::identity(4);
        assert_eq!(id.invert().unwrap(), id);
        assert_eq!(MatrixF2::zero(3).invert(), Err(Error::NotInvertible));
        let upper = m(2, &[0b11, 0b10]);
        assert_eq!(upper.invert().unwrap(), upper);
        assert_eq!(upper.mul(&upper).unwrap(), MatrixF2::identity(2));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(MatrixF2::identity(5).rank(), 5);
        assert_eq!(MatrixF2::zero(4).rank(), 0);
        assert_eq!(m(3, &[0b001, 0b010, 0b011]).rank(), 2);
    }

    #[test]
    fn rank_matches_span_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let rows: Vec<u32> = (0..4).map(|_| rng.gen::<u32>() & 0xf).collect();
            let mut span = std::collections::HashSet::new();
            for mask in 0..16u32 {
                let mut acc = 0;
                for (i, r) in rows.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        acc ^= r;
                    }
                }
                span.insert(acc);
            }
            assert_eq!(1usize << rank_of(&rows), span.len());
        }
    }

    #[test]
    fn gl_counts() {
        assert_eq!(enumerate_gl(1).unwrap().count(), 1);
        assert_eq!(enumerate_gl(2).unwrap().count(), 6);
        assert_eq!(enumerate_gl(3).unwrap().count(), 168);
        assert_eq!(gl_order(1), BigUint::from(1u32));
        assert_eq!(gl_order(3), BigUint::from(168u32));
        assert_eq!(gl_order(4), BigUint::from(20160u32));
    }

    #[test]
    fn gl2_matches_filtering_all_matrices() {
        let mut filtered = Vec::new();
        for r0 in 0..4u32 {
            for r1 in 0..4u32 {
                let mat = m(2, &[r0, r1]);
                if mat.is_invertible() {
                    filtered.push(mat);
                }
            }
        }
        let enumerated: Vec<MatrixF2> = enumerate_gl(2).unwrap().collect();
        assert_eq!(enumerated, filtered);
    }

    #[test]
    fn gl_enumeration_is_distinct_and_invertible() {
        let all: Vec<MatrixF2> = enumerate_gl(3).unwrap().collect();
        let set: std::collections::HashSet<_> = all.iter().copied().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|x| x.is_invertible()));
    }

    #[test]
    fn gl_first_row_slices_concatenate() {
        let full: Vec<MatrixF2> = enumerate_gl(3).unwrap().collect();
        let sliced: Vec<MatrixF2> = (1..8u32)
            .flat_map(|r| enumerate_gl_with_first_row(3, r).unwrap())
            .collect();
        assert_eq!(full, sliced);
    }

    #[test]
    fn gl_refuses_large_n() {
        assert!(matches!(
            enumerate_gl(6),
            Err(Error::DimensionOutOfRange { .. })
        ));
    }

    #[test]
    fn complete_basis_examples() {
        let units: Vec<VectorF2> = (0..3).map(|i| VectorF2::unit(3, i)).collect();
        let c = complete_basis(3, &units).unwrap();
        assert_eq!(c.transform, MatrixF2::identity(3));
        assert_eq!(c.rank(), 3);

        let c = complete_basis(3, &[]).unwrap();
        assert_eq!(c.transform, MatrixF2::identity(3));
        assert_eq!(c.rank(), 0);

        let v = VectorF2::new(2, 0b11).unwrap();
        let c = complete_basis(2, &[v]).unwrap();
        assert!(c.transform.is_invertible());
        assert_eq!(c.transform.apply(0b11), 0b01);
    }

    #[test]
    fn complete_basis_keeps_first_independent_vectors() {
        let vs: Vec<VectorF2> = [0b011, 0b101, 0b110, 0b001]
            .iter()
            .map(|&b| VectorF2::new(3, b).unwrap())
            .collect();
        let c = complete_basis(3, &vs).unwrap();
        assert_eq!(c.pivots, vec![0, 1, 3]);
        for (i, b) in c.basis.iter().enumerate() {
            assert_eq!(c.transform.apply(b.bits()), 1 << i);
        }
    }

    #[test]
    fn matrix_text_format() {
        let text = "110\n010\n001\n";
        let mat: MatrixF2 = text.parse().unwrap();
        assert_eq!(mat.rows(), &[0b011, 0b010, 0b100]);
        assert_eq!(mat.to_string(), text);
        assert!(matches!(
            MatrixF2::parse("10\n0x\n"),
            Err(Error::Parse {
                line: 2,
                column: 2,
                ..
            })
        ));
        assert!(matches!(
            MatrixF2::parse("101\n01\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn image_table_matches_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mat = random_gl(5, &mut rng);
        let table = mat.image_table();
        for x in 0..32u32 {
            assert_eq!(table[x as usize], mat.apply(x));
        }
    }
}
