use std::fmt;
use std::ops::{Index, IndexMut};

use super::perm::Perm;
use super::ring::ModulusContext;
use crate::error::{Error, Result};

/// Dense integer matrix with overflow-checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn matmul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.checked_mul(other[(l, j)]).ok_or(Error::Overflow)?;
                    out[(i, j)] = out[(i, j)].checked_add(t).ok_or(Error::Overflow)?;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(
        &self,
        other: &IntMatrix,
        f: impl Fn(i64, i64) -> Option<i64>,
    ) -> Result<IntMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matadd(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, i64::checked_add)
    }

    pub fn matsub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, i64::checked_sub)
    }

    pub fn reduce_mod(&self, ctx: ModulusContext) -> ModMatrix {
        ModMatrix {
            ctx,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| ctx.reduce(x)).collect(),
        }
    }

    /// Upper unitriangular: ones on the diagonal, zeros below.
    pub fn is_upper_unitriangular(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| self[(i, i)] == 1 && (0..i).all(|j| self[(i, j)] == 0))
    }

    /// Exact integer inverse of an upper unitriangular matrix.
    pub fn inv_unitriangular_exact(&self) -> Result<IntMatrix> {
        if !self.is_upper_unitriangular() {
            return Err(Error::NotUnitriangular);
        }
        let n = self.rows;
        let mut inv = IntMatrix::identity(n);
        // Q * X = I, solved column by column from the bottom row up.
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let mut s: i64 = 0;
                for l in (i + 1)..=j {
                    let t = self[(i, l)]
                        .checked_mul(inv[(l, j)])
                        .ok_or(Error::Overflow)?;
                    s = s.checked_add(t).ok_or(Error::Overflow)?;
                }
                inv[(i, j)] = s.checked_neg().ok_or(Error::Overflow)?;
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, self.to_rows())
    }
}

fn write_rows<T: fmt::Display>(f: &mut fmt::Formatter<'_>, rows: Vec<Vec<T>>) -> fmt::Result {
    write!(f, "[")?;
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        let parts: Vec<String> = r.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))?;
    }
    write!(f, "]")
}

/// Permutation matrix with `(i, j)` entry `δ_{i, σ(j)}`.
///
/// With this convention `perm_matrix(σ∘τ) = perm_matrix(σ) · perm_matrix(τ)`.
pub fn perm_matrix(sigma: &Perm) -> IntMatrix {
    let m = sigma.size();
    let mut out = IntMatrix::zeros(m, m);
    for j in 0..m {
        out[(sigma.apply(j), j)] = 1;
    }
    out
}

/// The matrix unit `E_u^v` (1-based `u`, `v`).
pub fn elementary_matrix(u: usize, v: usize, size: usize) -> Result<IntMatrix> {
    if u == 0 || v == 0 || u > size || v > size {
        return Err(Error::IndexOutOfRange { u, v, size });
    }
    let mut out = IntMatrix::zeros(size, size);
    out[(u - 1, v - 1)] = 1;
    Ok(out)
}

/// Inverse of an upper unitriangular integer matrix, reduced mod p^k.
pub fn inv_unitriangular(q: &IntMatrix, ctx: ModulusContext) -> Result<ModMatrix> {
    if !q.is_upper_unitriangular() {
        return Err(Error::NotUnitriangular);
    }
    let q = q.reduce_mod(ctx);
    let n = q.rows;
    let mut inv = ModMatrix::identity(ctx, n);
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let mut s = 0;
            for l in (i + 1)..=j {
                s = ctx.add(s, ctx.mul(q[(i, l)], inv[(l, j)]));
            }
            inv[(i, j)] = ctx.neg(s);
        }
    }
    Ok(inv)
}

/// Dense matrix over Z/p^k with canonical entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    ctx: ModulusContext,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl ModMatrix {
    pub fn zeros(ctx: ModulusContext, rows: usize, cols: usize) -> Self {
        Self {
            ctx,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ctx: ModulusContext, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds from integer rows of width `cols`, reducing every entry.
    pub fn from_rows(ctx: ModulusContext, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix of width {cols}",
                r.len()
            )));
        }
        Ok(Self {
            ctx,
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| ctx.reduce(x)).collect(),
        })
    }

    pub(crate) fn from_residue_rows(ctx: ModulusContext, cols: usize, rows: Vec<Vec<u32>>) -> Self {
        debug_assert!(rows
            .iter()
            .all(|r| r.len() == cols && r.iter().all(|&x| x < ctx.modulus())));
        Self {
            ctx,
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn ctx(&self) -> ModulusContext {
        self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn matmul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let modulus = self.ctx.modulus() as u64;
        let mut out = ModMatrix::zeros(self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s: u64 = 0;
                for l in 0..self.cols {
                    s = (s + self[(i, l)] as u64 * other[(l, j)] as u64) % modulus;
                }
                out[(i, j)] = s as u32;
            }
        }
        Ok(out)
    }

    /// Product with an integer matrix on the right, reducing as it goes.
    pub fn mul_int(&self, other: &IntMatrix) -> Result<ModMatrix> {
        self.matmul(&other.reduce_mod(self.ctx))
    }

    pub fn matadd(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matadd".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ctx.add(a, b))
            .collect();
        Ok(ModMatrix {
            data,
            ..self.clone()
        })
    }

    /// Column `j` of the result is column `ω(j)` of `self`, i.e. `self · perm_matrix(ω)`.
    pub fn permute_columns(&self, omega: &Perm) -> ModMatrix {
        assert_eq!(omega.size(), self.cols);
        let mut out = ModMatrix::zeros(self.ctx, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, omega.apply(j))];
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == u32::from(i == j)))
    }
}

impl Index<(usize, usize)> for ModMatrix {
    type Output = u32;

    fn index(&self, (i, j): (usize, usize)) -> &u32 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ModMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u32 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, self.to_rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn perm_matrix_examples() {
        assert_eq!(perm_matrix(&Perm::identity(3)), IntMatrix::identity(3));
        let t = Perm::transposition(2, 1, 2).unwrap();
        assert_eq!(perm_matrix(&t), m(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn perm_matrix_is_a_homomorphism() {
        for n in [3, 4] {
            for s in Perm::all(n) {
                for t in Perm::all(n) {
                    let lhs = perm_matrix(&s.compose(&t));
                    let rhs = perm_matrix(&s).matmul(&perm_matrix(&t)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn elementary_matrices() {
        assert_eq!(elementary_matrix(1, 1, 2).unwrap(), m(&[&[1, 0], &[0, 0]]));
        assert_eq!(elementary_matrix(1, 2, 2).unwrap(), m(&[&[0, 1], &[0, 0]]));
        let d = elementary_matrix(1, 2, 2)
            .unwrap()
            .matsub(&elementary_matrix(1, 1, 2).unwrap())
            .unwrap();
        assert_eq!(d, m(&[&[-1, 1], &[0, 0]]));
        assert!(matches!(
            elementary_matrix(3, 1, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(elementary_matrix(0, 1, 2).is_err());
    }

    #[test]
    fn products_and_reduction() {
        let a = m(&[&[1, 2], &[0, 1]]);
        let b = m(&[&[1, -2], &[0, 1]]);
        assert_eq!(a.matmul(&b).unwrap(), IntMatrix::identity(2));
        assert_eq!(IntMatrix::identity(2).matmul(&a).unwrap(), a);
        let c = ModulusContext::new(2, 2).unwrap();
        assert_eq!(m(&[&[-1, -1]]).reduce_mod(c).to_rows(), vec![vec![3, 3]]);
        assert!(a.matmul(&m(&[&[1, 2, 3]])).is_err());
        assert!(a.matadd(&m(&[&[1]])).is_err());
        let big = m(&[&[i64::MAX]]);
        assert_eq!(big.matadd(&big), Err(Error::Overflow));
    }

    #[test]
    fn unitriangular_inverse_examples() {
        let c = ModulusContext::new(2, 2).unwrap();
        assert!(inv_unitriangular(&IntMatrix::identity(3), c)
            .unwrap()
            .is_identity());
        let q = m(&[&[1, 2], &[0, 1]]);
        assert_eq!(
            inv_unitriangular(&q, c).unwrap().to_rows(),
            vec![vec![1, 2], vec![0, 1]]
        );
        let q = m(&[&[1, 0, 1], &[0, 1, 1], &[0, 0, 1]]);
        let inv = inv_unitriangular(&q, c).unwrap();
        assert_eq!(
            inv.to_rows(),
            vec![vec![1, 0, 3], vec![0, 1, 3], vec![0, 0, 1]]
        );
        assert!(q.reduce_mod(c).matmul(&inv).unwrap().is_identity());
        assert_eq!(
            inv_unitriangular(&m(&[&[1, 0], &[1, 1]]), c),
            Err(Error::NotUnitriangular)
        );
        assert_eq!(
            inv_unitriangular(&m(&[&[2, 0], &[0, 1]]), c),
            Err(Error::NotUnitriangular)
        );
    }

    #[test]
    fn exact_inverse_agrees_with_modular_inverse() {
        let c = ModulusContext::new(3, 2).unwrap();
        let q = m(&[&[1, 4, 7, 2], &[0, 1, 5, 8], &[0, 0, 1, 3], &[0, 0, 0, 1]]);
        let exact = q.inv_unitriangular_exact().unwrap();
        assert_eq!(q.matmul(&exact).unwrap(), IntMatrix::identity(4));
        assert_eq!(exact.reduce_mod(c), inv_unitriangular(&q, c).unwrap());
    }
}
