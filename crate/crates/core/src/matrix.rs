//! Exact dense matrix arithmetic.
//!
//! Two representations cover everything the construction needs:
//! [`IntMatrix`] holds 64-bit signed integers, and [`ScaledMatrix`] holds a
//! rational matrix as integer numerators over one shared positive
//! denominator. All operations are exact; overflow is detected and reported,
//! never wrapped. Multiplication picks between a popcount kernel for 0/1
//! operands, a tiled plain-integer kernel when an a-priori bound rules out
//! overflow, and a per-operation checked kernel otherwise. Results are
//! bit-identical regardless of tiling and thread count because integer
//! addition is associative.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Row-tile height for the integer kernel; also the parallel work unit.
const TILE_I: usize = 64;
/// Depth of the k-blocking in the integer kernel.
const TILE_K: usize = 128;

pub(crate) fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact rational number with a positive denominator, always reduced.
/// The arithmetic methods return `Result` so overflow surfaces as an error,
/// hence inherent methods rather than the std operator traits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: i64,
    den: i64,
}

#[allow(clippy::should_implement_trait)]
impl Ratio {
    pub fn new(num: i64, den: i64) -> Result<Ratio> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_i128(num: i128, den: i128) -> Result<Ratio> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd_i128(num, den).max(1);
        let n = sign * num / g;
        let d = sign * den / g;
        if n > i64::MAX as i128 || n < i64::MIN as i128 || d > i64::MAX as i128 {
            return Err(Error::Overflow("rational reduction"));
        }
        Ok(Ratio {
            num: n as i64,
            den: d as i64,
        })
    }

    pub fn integer(n: i64) -> Ratio {
        Ratio { num: n, den: 1 }
    }

    pub fn zero() -> Ratio {
        Ratio::integer(0)
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn as_integer(self) -> Option<i64> {
        if self.den == 1 {
            Some(self.num)
        } else {
            None
        }
    }

    pub fn add(self, o: Ratio) -> Result<Ratio> {
        Ratio::from_i128(
            self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128,
            self.den as i128 * o.den as i128,
        )
    }

    pub fn sub(self, o: Ratio) -> Result<Ratio> {
        Ratio::from_i128(
            self.num as i128 * o.den as i128 - o.num as i128 * self.den as i128,
            self.den as i128 * o.den as i128,
        )
    }

    pub fn mul(self, o: Ratio) -> Result<Ratio> {
        Ratio::from_i128(
            self.num as i128 * o.num as i128,
            self.den as i128 * o.den as i128,
        )
    }

    pub fn div(self, o: Ratio) -> Result<Ratio> {
        if o.num == 0 {
            return Err(Error::InvalidInput("division by zero rational".into()));
        }
        Ratio::from_i128(
            self.num as i128 * o.den as i128,
            self.den as i128 * o.num as i128,
        )
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Ratio", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den)?;
        st.end()
    }
}

/// Dense row-major matrix of exact 64-bit signed integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 16 && self.cols <= 16 {
            for r in 0..self.rows {
                writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
            }
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> IntMatrix {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        IntMatrix {
            rows,
            cols,
            data: vec![1; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<IntMatrix> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Ok(IntMatrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> i64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_zero_one(&self) -> bool {
        self.data.iter().all(|&e| e == 0 || e == 1)
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if self.at(r, c) != self.at(c, r) {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|e| e.abs()).max().unwrap_or(0)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn trace(&self) -> Result<i64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "trace of non-square matrix".into(),
            ));
        }
        let mut t: i64 = 0;
        for i in 0..self.rows {
            t = t
                .checked_add(self.at(i, i))
                .ok_or(Error::Overflow("trace"))?;
        }
        Ok(t)
    }

    pub fn row_sums(&self) -> Result<Vec<i64>> {
        let mut sums = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut s: i64 = 0;
            for c in 0..self.cols {
                s = s
                    .checked_add(self.at(r, c))
                    .ok_or(Error::Overflow("row sum"))?;
            }
            sums.push(s);
        }
        Ok(sums)
    }

    fn check_same_dims(&self, o: &IntMatrix, op: &str) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}: {}x{} vs {}x{}",
                op, self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &IntMatrix) -> Result<IntMatrix> {
        self.check_same_dims(o, "add")?;
        let mut data = Vec::with_capacity(self.data.len());
        for (a, b) in self.data.iter().zip(&o.data) {
            data.push(a.checked_add(*b).ok_or(Error::Overflow("matrix add"))?);
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn checked_sub(&self, o: &IntMatrix) -> Result<IntMatrix> {
        self.check_same_dims(o, "sub")?;
        let mut data = Vec::with_capacity(self.data.len());
        for (a, b) in self.data.iter().zip(&o.data) {
            data.push(a.checked_sub(*b).ok_or(Error::Overflow("matrix sub"))?);
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn checked_scale(&self, k: i64) -> Result<IntMatrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for a in &self.data {
            data.push(a.checked_mul(k).ok_or(Error::Overflow("matrix scale"))?);
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, o: &IntMatrix) -> Result<IntMatrix> {
        self.check_same_dims(o, "hadamard")?;
        let mut data = Vec::with_capacity(self.data.len());
        for (a, b) in self.data.iter().zip(&o.data) {
            data.push(a.checked_mul(*b).ok_or(Error::Overflow("hadamard"))?);
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Kronecker product; block (i, j) of the result equals `self[i][j] * o`.
    pub fn kron(&self, o: &IntMatrix) -> Result<IntMatrix> {
        let rows = self
            .rows
            .checked_mul(o.rows)
            .ok_or(Error::Overflow("kron dimensions"))?;
        let cols = self
            .cols
            .checked_mul(o.cols)
            .ok_or(Error::Overflow("kron dimensions"))?;
        rows.checked_mul(cols)
            .ok_or(Error::Overflow("kron dimensions"))?;
        let mut out = IntMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j];
                if a == 0 {
                    continue;
                }
                for r in 0..o.rows {
                    let dst = (i * o.rows + r) * cols + j * o.cols;
                    let src = r * o.cols;
                    for c in 0..o.cols {
                        let v = a
                            .checked_mul(o.data[src + c])
                            .ok_or(Error::Overflow("kron"))?;
                        out.data[dst + c] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact matrix product.
    ///
    /// Dispatch: popcount kernel when both operands are 0/1; plain tiled
    /// kernel when `max|a| * max|b| * inner_dim` provably fits in i64;
    /// per-operation checked kernel otherwise.
    pub fn matmul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.is_zero_one() && o.is_zero_one() {
            let a = PackedMatrix::from_zero_one(self)?;
            let bt = PackedMatrix::from_zero_one_transposed(o)?;
            return a.count_product(&bt);
        }
        let bound = self.max_abs() as i128 * o.max_abs() as i128 * self.cols as i128;
        if bound <= i64::MAX as i128 {
            Ok(self.mul_plain(o))
        } else {
            self.mul_checked(o)
        }
    }

    /// Reference triple-loop product with per-operation checks. Slow; kept as
    /// the oracle the tuned kernels are tested against.
    pub fn matmul_naive(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        self.mul_checked(o)
    }

    fn mul_plain(&self, o: &IntMatrix) -> IntMatrix {
        let (n, m, p) = (self.rows, self.cols, o.cols);
        let mut data = vec![0i64; n * p];
        data.par_chunks_mut(TILE_I * p)
            .enumerate()
            .for_each(|(ti, chunk)| {
                let i0 = ti * TILE_I;
                let rows_here = chunk.len() / p;
                for k0 in (0..m).step_by(TILE_K) {
                    let k1 = (k0 + TILE_K).min(m);
                    for di in 0..rows_here {
                        let arow = &self.data[(i0 + di) * m..(i0 + di) * m + m];
                        let crow = &mut chunk[di * p..(di + 1) * p];
                        for (k, &a) in arow.iter().enumerate().take(k1).skip(k0) {
                            if a == 0 {
                                continue;
                            }
                            let brow = &o.data[k * p..(k + 1) * p];
                            for j in 0..p {
                                crow[j] += a * brow[j];
                            }
                        }
                    }
                }
            });
        IntMatrix {
            rows: n,
            cols: p,
            data,
        }
    }

    fn mul_checked(&self, o: &IntMatrix) -> Result<IntMatrix> {
        let (n, m, p) = (self.rows, self.cols, o.cols);
        let mut data = vec![0i64; n * p];
        for i in 0..n {
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == 0 {
                    continue;
                }
                for j in 0..p {
                    let prod = a
                        .checked_mul(o.data[k * p + j])
                        .ok_or(Error::Overflow("matmul"))?;
                    data[i * p + j] = data[i * p + j]
                        .checked_add(prod)
                        .ok_or(Error::Overflow("matmul"))?;
                }
            }
        }
        Ok(IntMatrix {
            rows: n,
            cols: p,
            data,
        })
    }

    /// Coordinates of the first entry where the two matrices differ.
    pub fn first_diff(&self, o: &IntMatrix) -> Option<(usize, usize)> {
        if self.rows != o.rows || self.cols != o.cols {
            return Some((0, 0));
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.at(r, c) != o.at(r, c) {
                    return Some((r, c));
                }
            }
        }
        None
    }

    /// Dense text export: header "rows cols denominator", then row-major
    /// numerators one row per line. Integer matrices carry denominator 1.
    pub fn to_dense_text(&self) -> String {
        let mut s = format!("{} {} 1\n", self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_dense_text(text: &str) -> Result<IntMatrix> {
        let sm = ScaledMatrix::from_dense_text(text)?;
        if sm.den() != 1 {
            return Err(Error::InvalidInput(
                "dense text has non-unit denominator; use ScaledMatrix".into(),
            ));
        }
        Ok(sm.into_num())
    }

    /// Coordinate export for 0/1 matrices: header "rows cols", then one
    /// "row col" line per 1-entry in row-major order.
    pub fn to_coo_text(&self) -> Result<String> {
        if !self.is_zero_one() {
            return Err(Error::InvalidInput(
                "coordinate export requires a 0/1 matrix".into(),
            ));
        }
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.at(r, c) == 1 {
                    s.push_str(&format!("{} {}\n", r, c));
                }
            }
        }
        Ok(s)
    }

    pub fn from_coo_text(text: &str) -> Result<IntMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty coordinate text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::InvalidInput(format!("bad header: {header}")))
            })
            .collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(Error::InvalidInput(
                "coordinate header must be 'rows cols'".into(),
            ));
        }
        let mut m = IntMatrix::zeros(dims[0], dims[1]);
        for line in lines {
            let rc: Vec<usize> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::InvalidInput(format!("bad entry: {line}")))
                })
                .collect::<Result<_>>()?;
            if rc.len() != 2 || rc[0] >= dims[0] || rc[1] >= dims[1] {
                return Err(Error::InvalidInput(format!("bad coordinate: {line}")));
            }
            m.set(rc[0], rc[1], 1);
        }
        Ok(m)
    }
}

/// Bit-packed 0/1 matrix used by the popcount product kernel and by the
/// streaming certification path at large orders.
#[derive(Clone)]
pub struct PackedMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl PackedMatrix {
    pub fn from_zero_one(m: &IntMatrix) -> Result<PackedMatrix> {
        Self::pack(m, false)
    }

    pub fn from_zero_one_transposed(m: &IntMatrix) -> Result<PackedMatrix> {
        Self::pack(m, true)
    }

    fn pack(m: &IntMatrix, transpose: bool) -> Result<PackedMatrix> {
        let (rows, cols) = if transpose {
            (m.cols(), m.rows())
        } else {
            (m.rows(), m.cols())
        };
        let words_per_row = cols.div_ceil(64);
        let mut bits = vec![0u64; rows * words_per_row];
        for r in 0..rows {
            for c in 0..cols {
                let v = if transpose { m.at(c, r) } else { m.at(r, c) };
                match v {
                    0 => {}
                    1 => bits[r * words_per_row + c / 64] |= 1u64 << (c % 64),
                    _ => {
                        return Err(Error::InvalidInput(
                            "packed matrix requires 0/1 entries".into(),
                        ))
                    }
                }
            }
        }
        Ok(PackedMatrix {
            rows,
            cols,
            words_per_row,
            bits,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn row_count(&self, r: usize) -> i64 {
        self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
            .iter()
            .map(|w| w.count_ones() as i64)
            .sum()
    }

    /// Product counts against a matrix packed by columns: entry (i, j) is
    /// the number of positions where row i of self and column j of the
    /// original right operand are both 1.
    pub fn count_product(&self, other_t: &PackedMatrix) -> Result<IntMatrix> {
        if self.cols != other_t.cols {
            return Err(Error::DimensionMismatch(format!(
                "count_product: inner {} vs {}",
                self.cols, other_t.cols
            )));
        }
        let (n, p, w) = (self.rows, other_t.rows, self.words_per_row);
        let mut data = vec![0i64; n * p];
        data.par_chunks_mut(p).enumerate().for_each(|(i, crow)| {
            let arow = &self.bits[i * w..(i + 1) * w];
            for (j, out) in crow.iter_mut().enumerate() {
                let brow = &other_t.bits[j * w..(j + 1) * w];
                let mut acc = 0u32;
                for (x, y) in arow.iter().zip(brow) {
                    acc += (x & y).count_ones();
                }
                *out = acc as i64;
            }
        });
        Ok(IntMatrix {
            rows: n,
            cols: p,
            data,
        })
    }
}

/// Rational matrix: integer numerators over one shared positive denominator.
///
/// The canonical form divides out the gcd of all numerators and the
/// denominator; all public constructors and operations return canonical
/// values, so equality is plain structural equality.
#[derive(Clone, PartialEq, Eq)]
pub struct ScaledMatrix {
    num: IntMatrix,
    den: i64,
}

impl fmt::Debug for ScaledMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScaledMatrix(1/{}) ", self.den)?;
        self.num.fmt(f)
    }
}

impl ScaledMatrix {
    pub fn new(num: IntMatrix, den: i64) -> Result<ScaledMatrix> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let mut m = if den < 0 {
            ScaledMatrix {
                num: num.checked_scale(-1)?,
                den: den.checked_neg().ok_or(Error::Overflow("denominator"))?,
            }
        } else {
            ScaledMatrix { num, den }
        };
        m.canonicalize();
        Ok(m)
    }

    pub fn from_int(num: IntMatrix) -> ScaledMatrix {
        ScaledMatrix { num, den: 1 }
    }

    fn canonicalize(&mut self) {
        let mut g = self.den;
        for &e in self.num.data() {
            g = gcd_i64(g, e);
            if g == 1 {
                return;
            }
        }
        if g > 1 {
            for e in &mut self.num.data {
                *e /= g;
            }
            self.den /= g;
        }
    }

    pub fn num(&self) -> &IntMatrix {
        &self.num
    }

    pub fn into_num(self) -> IntMatrix {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn rows(&self) -> usize {
        self.num.rows()
    }

    pub fn cols(&self) -> usize {
        self.num.cols()
    }

    pub fn at(&self, r: usize, c: usize) -> Ratio {
        Ratio::new(self.num.at(r, c), self.den).expect("canonical denominators are nonzero")
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_symmetric(&self) -> bool {
        self.num.is_symmetric()
    }

    pub fn checked_add(&self, o: &ScaledMatrix) -> Result<ScaledMatrix> {
        let g = gcd_i64(self.den, o.den).max(1);
        let lcm = (self.den / g)
            .checked_mul(o.den)
            .ok_or(Error::Overflow("denominator lcm"))?;
        let a = self.num.checked_scale(lcm / self.den)?;
        let b = o.num.checked_scale(lcm / o.den)?;
        ScaledMatrix::new(a.checked_add(&b)?, lcm)
    }

    pub fn checked_sub(&self, o: &ScaledMatrix) -> Result<ScaledMatrix> {
        self.checked_add(&o.scale(Ratio::integer(-1))?)
    }

    pub fn scale(&self, k: Ratio) -> Result<ScaledMatrix> {
        ScaledMatrix::new(
            self.num.checked_scale(k.num())?,
            self.den
                .checked_mul(k.den())
                .ok_or(Error::Overflow("scale denominator"))?,
        )
    }

    pub fn matmul(&self, o: &ScaledMatrix) -> Result<ScaledMatrix> {
        ScaledMatrix::new(
            self.num.matmul(&o.num)?,
            self.den
                .checked_mul(o.den)
                .ok_or(Error::Overflow("product denominator"))?,
        )
    }

    pub fn hadamard(&self, o: &ScaledMatrix) -> Result<ScaledMatrix> {
        ScaledMatrix::new(
            self.num.hadamard(&o.num)?,
            self.den
                .checked_mul(o.den)
                .ok_or(Error::Overflow("product denominator"))?,
        )
    }

    pub fn trace(&self) -> Result<Ratio> {
        Ratio::new(self.num.trace()?, self.den)
    }

    pub fn is_idempotent(&self) -> Result<bool> {
        Ok(self.matmul(self)? == *self)
    }

    pub fn to_dense_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows(), self.cols(), self.den);
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|c| self.num.at(r, c).to_string())
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_dense_text(text: &str) -> Result<ScaledMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty dense text".into()))?;
        let head: Vec<i64> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::InvalidInput(format!("bad header: {header}")))
            })
            .collect::<Result<_>>()?;
        if head.len() != 3 || head[0] <= 0 || head[1] <= 0 || head[2] <= 0 {
            return Err(Error::InvalidInput(
                "dense header must be 'rows cols denominator'".into(),
            ));
        }
        let (rows, cols, den) = (head[0] as usize, head[1] as usize, head[2]);
        let mut data = Vec::with_capacity(rows * cols);
        for line in lines {
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad entry: {tok}")))?;
                data.push(v);
            }
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries, found {}",
                rows * cols,
                data.len()
            )));
        }
        ScaledMatrix::new(IntMatrix { rows, cols, data }, den)
    }
}

/// Accumulates sums of rational multiples of scaled matrices in i128,
/// avoiding per-term canonicalization. Used when re-verifying idempotent
/// expansions where dozens of terms enter one identity.
pub struct ScaledAccumulator {
    rows: usize,
    cols: usize,
    den: i128,
    data: Vec<i128>,
}

impl ScaledAccumulator {
    pub fn new(rows: usize, cols: usize) -> ScaledAccumulator {
        ScaledAccumulator {
            rows,
            cols,
            den: 1,
            data: vec![0; rows * cols],
        }
    }

    pub fn add_scaled(&mut self, m: &ScaledMatrix, coeff: Ratio) -> Result<()> {
        if m.rows() != self.rows || m.cols() != self.cols {
            return Err(Error::DimensionMismatch("accumulator add".into()));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let term_den = m.den() as i128 * coeff.den() as i128;
        let g = gcd_i128(self.den, term_den).max(1);
        let new_den = self
            .den
            .checked_mul(term_den / g)
            .ok_or(Error::Overflow("accumulator denominator"))?;
        if new_den > (1i128 << 96) {
            return Err(Error::Overflow("accumulator denominator"));
        }
        if new_den != self.den {
            let f = new_den / self.den;
            for e in &mut self.data {
                *e *= f;
            }
            self.den = new_den;
        }
        let scale = coeff.num() as i128 * (new_den / term_den);
        for (e, &n) in self.data.iter_mut().zip(m.num().data()) {
            *e += scale * n as i128;
        }
        Ok(())
    }

    /// Exact equality of the accumulated value against a scaled matrix.
    pub fn equals(&self, m: &ScaledMatrix) -> bool {
        if m.rows() != self.rows || m.cols() != self.cols {
            return false;
        }
        let md = m.den() as i128;
        self.data
            .iter()
            .zip(m.num().data())
            .all(|(&a, &b)| a * md == b as i128 * self.den)
    }

    pub fn first_diff(&self, m: &ScaledMatrix) -> Option<(usize, usize)> {
        let md = m.den() as i128;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.data[r * self.cols + c];
                let b = m.num().at(r, c) as i128;
                if a * md != b * self.den {
                    return Some((r, c));
                }
            }
        }
        None
    }
}

/// Trace of the product `a * b` without forming the product, as an exact
/// i128 numerator over `1`: sum over (r, c) of `a[r][c] * b[c][r]`.
pub fn product_trace(a: &IntMatrix, b: &IntMatrix) -> Result<i128> {
    if a.cols() != b.rows() || a.rows() != b.cols() {
        return Err(Error::DimensionMismatch("product_trace".into()));
    }
    let mut acc: i128 = 0;
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            acc += a.at(r, c) as i128 * b.at(c, r) as i128;
        }
    }
    Ok(acc)
}
