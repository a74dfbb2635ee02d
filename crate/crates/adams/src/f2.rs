//! Bit-packed linear algebra over the field with two elements.
//!
//! Vectors are stored as `u64` words, matrices as rows of vectors, and
//! elimination works one word-xor at a time, so the cost of a reduction is
//! roughly `rows * cols * cols / 64`. Everything here is a pure function on
//! immutable inputs; callers are free to run reductions from many threads.
//!
//! The module also provides [`AffineSubspace`], a coset `b + span(U)` with the
//! direction basis kept in reduced row-echelon form and the basepoint reduced
//! against it, so equal subspaces are structurally equal.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum F2Error {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("subspace is not contained in the ambient span")]
    NotContained,
}

const WORD_BITS: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A vector over GF(2), packed 64 bits per word. Trailing pad bits are zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    /// Parses a string of '0'/'1' characters, most significant position first.
    pub fn from_bits(bits: &str) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, c) in bits.chars().enumerate() {
            if c == '1' {
                v.set(i, true);
            }
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = BitVec::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit, if any.
    pub fn first_set(&self) -> Option<usize> {
        for (w, word) in self.words.iter().enumerate() {
            if *word != 0 {
                return Some(w * WORD_BITS + word.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_set(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// A row-major matrix over GF(2); every row has length `cols`.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        BitMatrix { cols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            if row.get(j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            for (w, word) in row.words.iter().enumerate() {
                let mut bits = *word;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    t.rows[w * WORD_BITS + b].set(i, true);
                    bits &= bits - 1;
                }
            }
        }
        t
    }

    /// Matrix-vector product `self * x` where `x` has length `ncols`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        let mut out = BitVec::zeros(self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = 0u64;
            for (a, b) in row.words.iter().zip(&x.words) {
                acc ^= a & b;
            }
            out.set(i, acc.count_ones() % 2 == 1);
        }
        out
    }

    /// Reduced row-echelon form, pivot columns, and rank. Row space preserved.
    pub fn rref(&self) -> Rref {
        let mut rows = self.rows.clone();
        let nrows = rows.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == nrows {
                break;
            }
            let Some(src) = (r..nrows).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, src);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        Rref {
            matrix: BitMatrix {
                cols: self.cols,
                rows,
            },
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{ x : self * x = 0 }`, one vector per free column, ordered by
    /// free-column index.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let rref = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - rref.rank);
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (row, &p) in rref.matrix.rows.iter().zip(&rref.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * x = target`; `None` when the target is outside the
    /// column space. The returned solution has zero free variables.
    pub fn solve(&self, target: &BitVec) -> Option<BitVec> {
        assert_eq!(
            target.len(),
            self.nrows(),
            "target length must equal row count"
        );
        let mut rows = self.rows.clone();
        let mut rhs = target.clone();
        let nrows = rows.len();
        let mut x = BitVec::zeros(self.cols);
        let mut r = 0;
        let mut pivots = Vec::new();
        for c in 0..self.cols {
            if r == nrows {
                break;
            }
            let Some(src) = (r..nrows).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, src);
            let bit_r = rhs.get(r);
            let bit_src = rhs.get(src);
            rhs.set(r, bit_src);
            rhs.set(src, bit_r);
            let pivot_row = rows[r].clone();
            let pivot_rhs = rhs.get(r);
            for i in 0..nrows {
                if i != r && rows[i].get(c) {
                    let new = rhs.get(i) ^ pivot_rhs;
                    rows[i].xor_assign(&pivot_row);
                    rhs.set(i, new);
                }
            }
            pivots.push((r, c));
            r += 1;
        }
        // Inconsistent when some zero row has rhs 1.
        for i in r..nrows {
            if rhs.get(i) {
                return None;
            }
        }
        for &(row, col) in &pivots {
            if rhs.get(row) {
                x.set(col, true);
            }
        }
        Some(x)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}:", self.nrows(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Result of a reduced row-echelon computation.
pub struct Rref {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl Rref {
    /// Reduces `v` against the echelon rows: zeroes every pivot position.
    /// The result is the canonical representative of `v` modulo the row space.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut out = v.clone();
        for (row, &p) in self.matrix.rows.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        out
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Builds the RREF of the span of `vectors` inside `F_2^len`.
pub fn span_rref(vectors: &[BitVec], len: usize) -> Rref {
    BitMatrix::from_rows(vectors.to_vec(), len).rref()
}

/// Representatives projecting to a basis of `span(space) / span(sub)`.
///
/// Errors unless `sub` is contained in `span(space)`. The returned vectors are
/// reduced against the RREF of `sub` and then echelonized among themselves, so
/// the output is deterministic and the representatives have distinct lowest
/// set bits.
pub fn quotient_representatives(
    sub: &[BitVec],
    space: &[BitVec],
    len: usize,
) -> Result<Vec<BitVec>, F2Error> {
    let space_rref = span_rref(space, len);
    for v in sub {
        if v.len() != len {
            return Err(F2Error::LengthMismatch(v.len(), len));
        }
        if !space_rref.contains(v) {
            return Err(F2Error::NotContained);
        }
    }
    let sub_rref = span_rref(sub, len);
    let mut reduced = Vec::new();
    for v in space {
        reduced.push(sub_rref.reduce(v));
    }
    let reps_rref = span_rref(&reduced, len);
    Ok(reps_rref
        .matrix
        .rows()
        .iter()
        .take(reps_rref.rank)
        .cloned()
        .collect())
}

/// A coset `basepoint + span(directions)` of `F_2^ambient`, or the empty set.
///
/// The direction basis is kept in RREF and the basepoint is reduced against
/// it, so two equal subspaces compare equal structurally.
#[derive(Clone, PartialEq, Eq)]
pub struct AffineSubspace {
    ambient: usize,
    /// `None` encodes the empty set.
    inner: Option<(BitVec, Vec<BitVec>)>,
}

impl AffineSubspace {
    pub fn empty(ambient: usize) -> Self {
        AffineSubspace {
            ambient,
            inner: None,
        }
    }

    pub fn point(v: BitVec) -> Self {
        AffineSubspace {
            ambient: v.len(),
            inner: Some((v, Vec::new())),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let dirs = (0..ambient).map(|i| BitVec::unit(ambient, i)).collect();
        AffineSubspace {
            ambient,
            inner: Some((BitVec::zeros(ambient), dirs)),
        }
    }

    pub fn new(basepoint: BitVec, directions: &[BitVec]) -> Self {
        let ambient = basepoint.len();
        let rref = span_rref(directions, ambient);
        let base = rref.reduce(&basepoint);
        let dirs = rref
            .matrix
            .rows()
            .iter()
            .take(rref.rank)
            .cloned()
            .collect();
        AffineSubspace {
            ambient,
            inner: Some((base, dirs)),
        }
    }

    /// Smallest affine subspace containing all of `points`.
    pub fn hull(points: &[BitVec]) -> Self {
        let Some(first) = points.first() else {
            panic!("hull of an empty point set has no ambient dimension");
        };
        let mut dirs = Vec::new();
        for p in &points[1..] {
            let mut d = p.clone();
            d.xor_assign(first);
            dirs.push(d);
        }
        AffineSubspace::new(first.clone(), &dirs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_none()
    }

    /// Dimension of the direction space; `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        self.inner.as_ref().map(|(_, d)| d.len())
    }

    pub fn is_point(&self) -> bool {
        self.dim() == Some(0)
    }

    /// The canonical basepoint, when nonempty.
    pub fn basepoint(&self) -> Option<&BitVec> {
        self.inner.as_ref().map(|(b, _)| b)
    }

    pub fn directions(&self) -> &[BitVec] {
        match &self.inner {
            Some((_, d)) => d,
            None => &[],
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        match &self.inner {
            None => false,
            Some((base, dirs)) => {
                let mut diff = v.clone();
                diff.xor_assign(base);
                span_rref(dirs, self.ambient).contains(&diff)
            }
        }
    }

    /// Intersection of two cosets; `EMPTY` signals a contradiction.
    pub fn meet(&self, other: &AffineSubspace) -> AffineSubspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        let (Some((b1, u1)), Some((b2, u2))) = (&self.inner, &other.inner) else {
            return AffineSubspace::empty(self.ambient);
        };
        // Solve u1*a + u2*c = b1 + b2 for a basepoint of the intersection.
        let k1 = u1.len();
        let k2 = u2.len();
        let mut m = BitMatrix::zeros(self.ambient, k1 + k2);
        for (j, d) in u1.iter().enumerate() {
            for i in d.iter_set() {
                m.set(i, j, true);
            }
        }
        for (j, d) in u2.iter().enumerate() {
            for i in d.iter_set() {
                m.set(i, k1 + j, true);
            }
        }
        let mut rhs = b1.clone();
        rhs.xor_assign(b2);
        let Some(coeffs) = m.solve(&rhs) else {
            return AffineSubspace::empty(self.ambient);
        };
        let mut base = b1.clone();
        for (j, d) in u1.iter().enumerate() {
            if coeffs.get(j) {
                base.xor_assign(d);
            }
        }
        // Zassenhaus: rows [u|u] for u1 and [w|0] for u2; reduced rows with a
        // zero left half have their right half in span(u1) ∩ span(u2).
        let mut z_rows = Vec::with_capacity(k1 + k2);
        for d in u1 {
            let mut row = BitVec::zeros(2 * self.ambient);
            for i in d.iter_set() {
                row.set(i, true);
                row.set(self.ambient + i, true);
            }
            z_rows.push(row);
        }
        for d in u2 {
            let mut row = BitVec::zeros(2 * self.ambient);
            for i in d.iter_set() {
                row.set(i, true);
            }
            z_rows.push(row);
        }
        let z = span_rref(&z_rows, 2 * self.ambient);
        let mut dirs = Vec::new();
        for row in z.matrix.rows().iter().take(z.rank) {
            if (0..self.ambient).all(|i| !row.get(i)) {
                let mut d = BitVec::zeros(self.ambient);
                for i in 0..self.ambient {
                    if row.get(self.ambient + i) {
                        d.set(i, true);
                    }
                }
                if !d.is_zero() {
                    dirs.push(d);
                }
            }
        }
        AffineSubspace::new(base, &dirs)
    }

    /// Enumerates every point; intended for small direction dimensions.
    pub fn points(&self) -> Vec<BitVec> {
        let Some((base, dirs)) = &self.inner else {
            return Vec::new();
        };
        let k = dirs.len();
        assert!(k <= 20, "point enumeration over {k} directions is too large");
        let mut out = Vec::with_capacity(1 << k);
        for mask in 0u32..(1 << k) {
            let mut p = base.clone();
            for (j, d) in dirs.iter().enumerate() {
                if (mask >> j) & 1 == 1 {
                    p.xor_assign(d);
                }
            }
            out.push(p);
        }
        out
    }
}

impl fmt::Debug for AffineSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner {
            None => write!(f, "EMPTY({})", self.ambient),
            Some((b, d)) => write!(f, "{b:?} + span({} dirs)", d.len()),
        }
    }
}
