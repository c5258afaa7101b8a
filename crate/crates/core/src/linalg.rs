//! Exact linear algebra over `ℤ` and `ℚ`: ranks, solves, integer kernels and
//! Smith normal forms. Matrices are lists of rows.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use core::ops::{Add, Mul, Sub};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn transpose<T: Clone>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    if rows.is_empty() {
        return Vec::new();
    }
    (0..rows[0].len()).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Row echelon form over `ℚ`; returns the pivot columns.
fn echelon(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] = &m[i][j] - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    smith_signed(rows).0.len()
}

/// Solves `Σ x_k cols[k] = target` over `ℚ`, if possible.
pub fn solve_in_span(cols: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigRational>> {
    let k = cols.len();
    let n = target.len();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| BigRational::from_integer(c[i].clone())).collect();
            row.push(BigRational::from_integer(target[i].clone()));
            row
        })
        .collect();
    let pivots = echelon(&mut m);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][k].clone();
    }
    Some(x)
}

/// Like [`solve_in_span`] but requires an integral solution.
pub fn solve_integral(cols: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigInt>> {
    let x = solve_in_span(cols, target)?;
    x.into_iter().map(|q| if q.is_integer() { Some(q.to_integer()) } else { None }).collect()
}

/// Entries the reductions below run on. `i128` is used as a fast path and
/// gives up (via `fits`) before a product could overflow.
trait Entry: Clone + Integer + Signed
where
    for<'a> &'a Self: Add<&'a Self, Output = Self> + Sub<&'a Self, Output = Self> + Mul<&'a Self, Output = Self>,
{
    fn fits(&self) -> bool;
}

impl Entry for i128 {
    fn fits(&self) -> bool {
        self.unsigned_abs() < 1 << 62
    }
}

impl Entry for BigInt {
    fn fits(&self) -> bool {
        true
    }
}

fn narrow(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    rows.iter().map(|r| r.iter().map(|x| i128::try_from(x).ok().filter(Entry::fits)).collect()).collect()
}

fn widen(rows: Vec<Vec<i128>>) -> IntMatrix {
    rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
}

/// Diagonal of a Smith form (signed, nonzero part) and the sign picked up by
/// swaps, so that for square input `det = sign * Π diag` at full rank.
fn smith_core<T: Entry>(mut m: Vec<Vec<T>>) -> Option<(Vec<T>, bool)>
where
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut flip = false;
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        'search: for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                    if m[i][j].abs().is_one() {
                        break 'search;
                    }
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        if bi != t {
            m.swap(t, bi);
            flip = !flip;
        }
        if bj != t {
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            flip = !flip;
        }
        let mut clean = true;
        for i in t + 1..rows {
            if m[i][t].is_zero() {
                continue;
            }
            let q = m[i][t].div_floor(&m[t][t]);
            for j in t..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let v = &m[i][j] - &(&q * &m[t][j]);
                if !v.fits() {
                    return None;
                }
                m[i][j] = v;
            }
            clean &= m[i][t].is_zero();
        }
        for j in t + 1..cols {
            if m[t][j].is_zero() {
                continue;
            }
            let q = m[t][j].div_floor(&m[t][t]);
            for i in t..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let v = &m[i][j] - &(&q * &m[i][t]);
                if !v.fits() {
                    return None;
                }
                m[i][j] = v;
            }
            clean &= m[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        if !m[t][t].abs().is_one() {
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(m[i][j].mod_floor(&m[t][t])).is_zero()));
            if let Some(i) = bad {
                for j in t..cols {
                    let v = &m[t][j] + &m[i][j];
                    if !v.fits() {
                        return None;
                    }
                    m[t][j] = v;
                }
                continue;
            }
        }
        diag.push(m[t][t].clone());
        t += 1;
    }
    Some((diag, flip))
}

fn smith_signed(a: &[Vec<BigInt>]) -> (Vec<BigInt>, bool) {
    if let Some((d, f)) = narrow(a).and_then(smith_core) {
        return (d.into_iter().map(BigInt::from).collect(), f);
    }
    smith_core(a.to_vec()).expect("unbounded entries")
}

pub fn determinant(rows: &[Vec<BigInt>]) -> BigRational {
    let n = rows.len();
    if n == 0 {
        return BigRational::one();
    }
    let (diag, flip) = smith_signed(rows);
    if diag.len() < n {
        return BigRational::zero();
    }
    let det: BigInt = diag.iter().product();
    BigRational::from_integer(if flip { -det } else { det })
}

/// Column reduction of `a` by unimodular `U`, also tracking `U⁻¹`. Columns
/// `piv..` of `U` span the integer kernel.
fn kernel_core<T: Entry>(mut m: Vec<Vec<T>>, cols: usize) -> Option<(Vec<Vec<T>>, Vec<Vec<T>>, usize)>
where
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let unit = || -> Vec<Vec<T>> { (0..cols).map(|i| (0..cols).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect() };
    let (mut u, mut ui) = (unit(), unit());
    let mut piv = 0;
    for r in 0..m.len() {
        if piv == cols {
            break;
        }
        for j in piv + 1..cols {
            if m[r][j].is_zero() {
                continue;
            }
            let (x, y) = (m[r][piv].clone(), m[r][j].clone());
            let e = x.extended_gcd(&y);
            let (a, b) = (e.x, e.y);
            let (c, d) = (-(y / e.gcd.clone()), x / e.gcd);
            // (col_piv, col_j) <- (a col_piv + b col_j, c col_piv + d col_j), determinant 1
            for row in m.iter_mut().chain(u.iter_mut()) {
                let (p, q) = (row[piv].clone(), row[j].clone());
                row[piv] = &(&a * &p) + &(&b * &q);
                row[j] = &(&c * &p) + &(&d * &q);
                if !row[piv].fits() || !row[j].fits() {
                    return None;
                }
            }
            for k in 0..cols {
                let (p, q) = (ui[piv][k].clone(), ui[j][k].clone());
                ui[piv][k] = &(&d * &p) - &(&c * &q);
                ui[j][k] = &(&a * &q) - &(&b * &p);
                if !ui[piv][k].fits() || !ui[j][k].fits() {
                    return None;
                }
            }
        }
        if !m[r][piv].is_zero() {
            piv += 1;
        }
    }
    Some((u, ui, piv))
}

/// A `ℤ`-basis of the integer kernel of a matrix, with coordinates.
#[derive(Clone, Debug)]
pub struct IntegerKernel {
    pub basis: IntMatrix,
    /// Columns of `U⁻¹`.
    inverse: IntMatrix,
    offset: usize,
}

impl IntegerKernel {
    pub fn new(a: &[Vec<BigInt>], cols: usize) -> Self {
        let (u, ui, piv) = match narrow(a).and_then(|m| kernel_core(m, cols)) {
            Some((u, ui, piv)) => (widen(u), widen(ui), piv),
            None => kernel_core(a.to_vec(), cols).expect("unbounded entries"),
        };
        let basis = (piv..cols).map(|j| u.iter().map(|row| row[j].clone()).collect()).collect();
        IntegerKernel { basis, inverse: transpose(&ui), offset: piv }
    }

    /// Coordinates of `v` in [`IntegerKernel::basis`], if `v` lies in the kernel.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut w = vec![BigInt::zero(); self.inverse.len()];
        for (col, x) in self.inverse.iter().zip(v).filter(|(_, x)| !x.is_zero()) {
            for (acc, a) in w.iter_mut().zip(col) {
                *acc += a * x;
            }
        }
        if w[..self.offset].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(w[self.offset..].to_vec())
    }
}

/// A `ℤ`-basis of `{x ∈ ℤ^cols : A x = 0}`, by unimodular column reduction.
pub fn integer_kernel(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    IntegerKernel::new(a, cols).basis
}

/// Nonzero invariant factors of the Smith normal form, each positive.
pub fn smith_invariants(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    smith_signed(a).0.into_iter().map(|x| x.abs()).collect()
}
