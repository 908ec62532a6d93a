//! Prime-field arithmetic and the dense matrix kernels used everywhere else:
//! rank, span membership and consistent linear solves over `F_q`.
//!
//! Over `F_2` the column-reduction kernel switches to a bit-packed path.
//! Both paths are public so they can be checked against each other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Field {
    q: u32,
}

/// The operations accepted by [`Field::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    /// Multiplicative inverse of the first operand; the second is ignored.
    Inv,
}

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let q = q as u64;
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if is_prime(q) {
            Ok(Self { q })
        } else {
            Err(Error::NotPrime(q))
        }
    }

    pub const fn binary() -> Self {
        Self { q: 2 }
    }

    pub fn order(self) -> u32 {
        self.q
    }

    pub fn is_binary(self) -> bool {
        self.q == 2
    }

    pub fn check(self, value: u32) -> Result<u32> {
        if value < self.q {
            Ok(value)
        } else {
            Err(Error::EntryOutOfRange { value, q: self.q })
        }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by Fermat's little theorem, `a^(q-2)`.
    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.q) {
            return Err(Error::NoInverse);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn apply(self, op: FieldOp, a: u32, b: u32) -> Result<u32> {
        let a = self.check(a)?;
        match op {
            FieldOp::Add => Ok(self.add(a, self.check(b)?)),
            FieldOp::Sub => Ok(self.sub(a, self.check(b)?)),
            FieldOp::Mul => Ok(self.mul(a, self.check(b)?)),
            FieldOp::Inv => self.inv(a),
        }
    }
}

impl TryFrom<u32> for Field {
    type Error = Error;

    fn try_from(q: u32) -> Result<Self> {
        Field::new(q)
    }
}

impl From<Field> for u32 {
    fn from(f: Field) -> u32 {
        f.q
    }
}

/// Dense row-major matrix over a prime field.
///
/// Rows are transmissions and columns are messages when the matrix is used
/// as a coding matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FMatrix {
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        for &v in &data {
            field.check(v)?;
        }
        Ok(Self {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut out = Self::zeros(field, n, n);
        for i in 0..n {
            out.data[i * n + i] = 1;
        }
        out
    }

    /// Builds a matrix from explicit rows. `cols` is only consulted when
    /// `rows` is empty.
    pub fn from_rows(field: Field, rows: &[Vec<u32>], cols: usize) -> Result<Self> {
        let cols = rows.first().map_or(cols, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(field, rows.len(), cols, data)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u32) -> Result<()> {
        self.field.check(value)?;
        self.data[r * self.cols + c] = value;
        Ok(())
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// The sub-matrix formed by the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> FMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        FMatrix {
            field: self.field,
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn transpose(&self) -> FMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            data.extend((0..self.rows).map(|r| self.get(r, c)));
        }
        FMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn push_row(&mut self, row: &[u32]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        for &v in row {
            self.field.check(v)?;
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(|&v| v == 0)
    }

    /// Copy of the matrix with every all-zero row removed.
    pub fn without_zero_rows(&self) -> FMatrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for r in 0..self.rows {
            if !self.is_zero_row(r) {
                data.extend_from_slice(self.row(r));
                rows += 1;
            }
        }
        FMatrix {
            field: self.field,
            rows,
            cols: self.cols,
            data,
        }
    }

    pub fn nonzero_rows(&self) -> usize {
        (0..self.rows).filter(|&r| !self.is_zero_row(r)).count()
    }

    /// `A·b`.
    pub fn mul_vec(&self, b: &[u32]) -> Result<Vec<u32>> {
        if b.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: b.len(),
            });
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(b)
                    .fold(0, |acc, (&a, &x)| f.add(acc, f.mul(a, x)))
            })
            .collect())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    q: Field,
    rows: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
}

impl Serialize for FMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            q: self.field,
            rows: self.row_vecs(),
            cols: (self.rows == 0).then_some(self.cols),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        FMatrix::from_rows(raw.q, &raw.rows, raw.cols.unwrap_or(0))
            .map_err(serde::de::Error::custom)
    }
}

/// Outcome of column-reducing a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnReduction {
    pub rank: usize,
    /// Pivot columns of the reduced row echelon form, ascending.
    pub pivots: Vec<usize>,
    /// `isolated[j]` is true iff column `j` is outside the span of the
    /// remaining columns.
    pub isolated: Vec<bool>,
}

impl ColumnReduction {
    pub fn isolated_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.isolated
            .iter()
            .enumerate()
            .filter_map(|(j, &iso)| iso.then_some(j))
    }
}

/// Column reduction, dispatching to the bit-packed kernel over `F_2`.
pub fn reduce_columns(m: &FMatrix) -> ColumnReduction {
    if m.field.is_binary() {
        reduce_columns_binary(m)
    } else {
        reduce_columns_generic(m)
    }
}

pub fn rank(m: &FMatrix) -> usize {
    reduce_columns(m).rank
}

/// In-place reduced row echelon form; returns the pivot columns.
fn rref_in_place(field: Field, rows: usize, cols: usize, data: &mut [u32]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&k| data[k * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = field.inv(data[r * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            data[r * cols + j] = field.mul(data[r * cols + j], inv);
        }
        for k in 0..rows {
            let factor = data[k * cols + c];
            if k == r || factor == 0 {
                continue;
            }
            for j in c..cols {
                let sub = field.mul(factor, data[r * cols + j]);
                data[k * cols + j] = field.sub(data[k * cols + j], sub);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Column `j` is outside the span of the others iff it is a pivot column and
/// its pivot row vanishes on every free column.
fn isolation_from_rref(
    cols: usize,
    pivots: &[usize],
    pivot_row_nonzero_free: impl Fn(usize) -> bool,
) -> Vec<bool> {
    let mut isolated = vec![false; cols];
    for (row, &c) in pivots.iter().enumerate() {
        isolated[c] = !pivot_row_nonzero_free(row);
    }
    isolated
}

pub fn reduce_columns_generic(m: &FMatrix) -> ColumnReduction {
    let mut data = m.data.clone();
    let pivots = rref_in_place(m.field, m.rows, m.cols, &mut data);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let isolated = isolation_from_rref(m.cols, &pivots, |row| {
        (0..m.cols).any(|c| !is_pivot[c] && data[row * m.cols + c] != 0)
    });
    ColumnReduction {
        rank: pivots.len(),
        pivots,
        isolated,
    }
}

/// Bit-packed reduction over `F_2`. Panics if the matrix is not binary.
pub fn reduce_columns_binary(m: &FMatrix) -> ColumnReduction {
    assert!(m.field.is_binary(), "bit-packed kernel requires F_2");
    let words = m.cols.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = (0..m.rows)
        .map(|r| {
            let mut bits = vec![0u64; words];
            for (c, &v) in m.row(r).iter().enumerate() {
                if v != 0 {
                    bits[c / 64] |= 1 << (c % 64);
                }
            }
            bits
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == rows.len() {
            break;
        }
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (r..rows.len()).find(|&k| rows[k][w] & bit != 0) else {
            continue;
        };
        rows.swap(p, r);
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && row[w] & bit != 0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }

    let mut free_mask = vec![u64::MAX; words];
    if !m.cols.is_multiple_of(64) {
        free_mask[words - 1] = (1u64 << (m.cols % 64)) - 1;
    }
    for &p in &pivots {
        free_mask[p / 64] &= !(1u64 << (p % 64));
    }
    let isolated = isolation_from_rref(m.cols, &pivots, |row| {
        rows[row].iter().zip(&free_mask).any(|(x, f)| x & f != 0)
    });
    ColumnReduction {
        rank: pivots.len(),
        pivots,
        isolated,
    }
}

pub fn rank_generic(m: &FMatrix) -> usize {
    reduce_columns_generic(m).rank
}

fn matrix_from_columns(field: Field, len: usize, columns: &[&[u32]]) -> Result<FMatrix> {
    let mut data = vec![0; len * columns.len()];
    for (c, col) in columns.iter().enumerate() {
        if col.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: col.len(),
            });
        }
        for (r, &v) in col.iter().enumerate() {
            data[r * columns.len() + c] = field.check(v)?;
        }
    }
    Ok(FMatrix {
        field,
        rows: len,
        cols: columns.len(),
        data,
    })
}

/// Whether `v` lies in the span of `columns`. The span of no columns is `{0}`.
pub fn in_span(v: &[u32], columns: &[Vec<u32>], field: Field) -> Result<bool> {
    let mut refs: Vec<&[u32]> = columns.iter().map(Vec::as_slice).collect();
    let without = rank(&matrix_from_columns(field, v.len(), &refs)?);
    refs.push(v);
    let with = rank(&matrix_from_columns(field, v.len(), &refs)?);
    Ok(with == without)
}

/// A particular solution of a consistent system plus, per coordinate,
/// whether every solution agrees on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<u32>,
    pub unique: Vec<bool>,
}

impl Solution {
    pub fn first_unique(&self) -> Option<usize> {
        self.unique.iter().position(|&u| u)
    }
}

/// Solves `M·x = rhs`. Free variables are set to zero in the particular
/// solution; `Error::Inconsistent` if `rhs` is outside the column space.
pub fn solve_consistent(m: &FMatrix, rhs: &[u32]) -> Result<Solution> {
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: rhs.len(),
        });
    }
    let field = m.field;
    let width = m.cols + 1;
    let mut aug = Vec::with_capacity(m.rows * width);
    for (r, &b) in rhs.iter().enumerate() {
        aug.extend_from_slice(m.row(r));
        aug.push(field.check(b)?);
    }
    let pivots = rref_in_place(field, m.rows, width, &mut aug);
    if pivots.last() == Some(&m.cols) {
        return Err(Error::Inconsistent);
    }
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut values = vec![0; m.cols];
    for (row, &c) in pivots.iter().enumerate() {
        values[c] = aug[row * width + m.cols];
    }
    let unique = isolation_from_rref(m.cols, &pivots, |row| {
        (0..m.cols).any(|c| !is_pivot[c] && aug[row * width + c] != 0)
    });
    Ok(Solution { values, unique })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    fn three_row() -> FMatrix {
        FMatrix::from_rows(f(2), &[vec![1, 1, 1], vec![0, 1, 1], vec![1, 1, 0]], 3).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(f(3).apply(FieldOp::Add, 2, 2).unwrap(), 1);
        assert_eq!(f(3).apply(FieldOp::Inv, 2, 0).unwrap(), 2);
        assert!(matches!(f(2).apply(FieldOp::Inv, 0, 0), Err(Error::NoInverse)));
        assert_eq!(f(5).apply(FieldOp::Sub, 1, 3).unwrap(), 3);
        assert_eq!(f(7).apply(FieldOp::Mul, 3, 5).unwrap(), 1);
        assert!(f(3).apply(FieldOp::Add, 3, 0).is_err());
    }

    #[test]
    fn inverses_are_inverses() {
        for q in [2, 3, 5, 7, 11, 13] {
            let fq = f(q);
            for a in 1..q {
                assert_eq!(fq.mul(a, fq.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn rejects_non_primes() {
        for q in [0, 1, 4, 6, 9, 15] {
            assert!(matches!(Field::new(q), Err(Error::NotPrime(_))));
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&FMatrix::identity(f(2), 2)), 2);
        assert_eq!(rank(&FMatrix::zeros(f(3), 3, 3)), 0);
        assert_eq!(rank(&three_row()), 3);
        assert_eq!(rank_generic(&three_row()), 3);
        assert_eq!(rank(&FMatrix::zeros(f(2), 0, 0)), 0);
        assert_eq!(rank(&FMatrix::zeros(f(5), 0, 4)), 0);
    }

    #[test]
    fn span_examples() {
        let two = f(2);
        assert!(!in_span(&[1, 0, 1], &[vec![1, 1, 1]], two).unwrap());
        assert!(in_span(&[1, 2, 0], &[vec![1, 2, 0]], f(3)).unwrap());
        assert!(in_span(&[0, 0, 0], &[], two).unwrap());
        assert!(!in_span(&[0, 1, 0], &[], two).unwrap());
        assert!(matches!(
            in_span(&[1, 0], &[vec![1, 0, 0]], two),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_three_row_system() {
        // b = (1, 0, 1) under the three-row code, client with R = {0, 1}.
        let a = three_row();
        let x = a.mul_vec(&[1, 0, 1]).unwrap();
        let sub = a.select_columns(&[0, 1]);
        // strip b_3 = 1 using column 2
        let rhs: Vec<u32> = (0..3).map(|k| two().sub(x[k], a.get(k, 2))).collect();
        let sol = solve_consistent(&sub, &rhs).unwrap();
        assert_eq!(sol.values, vec![1, 0]);
        assert_eq!(sol.unique, vec![true, true]);
        // b_2 = x_2 - b_3
        assert_eq!(two().sub(x[1], 1), sol.values[1]);
    }

    fn two() -> Field {
        Field::binary()
    }

    #[test]
    fn solve_trivial_and_degenerate() {
        let sol = solve_consistent(&FMatrix::identity(f(5), 1), &[3]).unwrap();
        assert_eq!(sol.values, vec![3]);
        assert_eq!(sol.unique, vec![true]);

        let zero = FMatrix::zeros(f(3), 1, 1);
        let sol = solve_consistent(&zero, &[0]).unwrap();
        assert_eq!(sol.unique, vec![false]);

        assert!(matches!(solve_consistent(&zero, &[1]), Err(Error::Inconsistent)));
    }

    #[test]
    fn json_form() {
        let text = r#"{"q":2,"rows":[[1,1,1],[0,1,1],[1,1,0]]}"#;
        let m: FMatrix = serde_json::from_str(text).unwrap();
        assert_eq!(m, three_row());
        assert_eq!(serde_json::to_string(&m).unwrap(), text);
        assert!(serde_json::from_str::<FMatrix>(r#"{"q":4,"rows":[[1]]}"#).is_err());
        assert!(serde_json::from_str::<FMatrix>(r#"{"q":3,"rows":[[3]]}"#).is_err());
        assert!(serde_json::from_str::<FMatrix>(r#"{"q":3,"rows":[[1],[1,2]]}"#).is_err());
    }

    #[test]
    fn pruning_zero_rows() {
        let m = FMatrix::from_rows(f(3), &[vec![0, 0], vec![1, 2], vec![0, 0]], 2).unwrap();
        let p = m.without_zero_rows();
        assert_eq!(p.rows(), 1);
        assert_eq!(m.nonzero_rows(), 1);
    }
}
