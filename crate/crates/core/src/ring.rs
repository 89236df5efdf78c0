//! Matrices over `Z/2^BITS` and the linear algebra behind disturbance vectors.
//!
//! With the σ functions replaced by the identity the message expansion
//! `W_i = W_{i-2} + W_{i-7} + W_{i-15} + W_{i-16}` is linear over the ring of
//! words. [`build_a`] is the one-word shift of that recurrence; sixteen
//! shifts give the block map taking one 16-word window to the next, and the
//! 64-word expansion matrix is `[I; B; B^2; B^3]` for that block map `B`.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::word::RingWord;

#[derive(Clone, PartialEq, Eq)]
pub struct RingMatrix<W> {
    rows: usize,
    cols: usize,
    data: Vec<W>,
}

impl<W: RingWord> RingMatrix<W> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RingMatrix {
            rows,
            cols,
            data: vec![W::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, W::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<W>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(RingMatrix {
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> W {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: W) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[W] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Copy of the rows in `range`.
    pub fn row_slice(&self, range: Range<usize>) -> Self {
        assert!(range.end <= self.rows);
        RingMatrix {
            rows: range.len(),
            cols: self.cols,
            data: self.data[range.start * self.cols..range.end * self.cols].to_vec(),
        }
    }

    pub fn vstack(blocks: &[&RingMatrix<W>]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::Dimension(
                "vstack with differing column counts".into(),
            ));
        }
        let mut data = Vec::new();
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(RingMatrix {
            rows: data.len() / cols.max(1),
            cols,
            data,
        })
    }

    pub fn mul(&self, rhs: &RingMatrix<W>) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).wrapping_add(&a.wrapping_mul(&rhs.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[W]) -> Result<Vec<W>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(x).fold(W::zero(), |acc, (a, b)| {
                    acc.wrapping_add(&a.wrapping_mul(b))
                })
            })
            .collect())
    }

    pub fn pow(&self, mut e: u32) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Reduction modulo 2, packed.
    pub fn mod2(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).low_bit());
            }
        }
        m
    }

    /// Inverse over the ring, by Gauss-Jordan elimination on odd pivots.
    pub fn invert(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n)
                .find(|&r| a.get(r, c).low_bit())
                .ok_or(Error::Singular)?;
            a.swap_rows(c, p);
            inv.swap_rows(c, p);
            let u = a.get(c, c).inverse_odd().expect("odd pivot");
            a.scale_row(c, u);
            inv.scale_row(c, u);
            for r in 0..n {
                let f = a.get(r, c);
                if r != c && !f.is_zero() {
                    a.sub_scaled_row(r, c, f);
                    inv.sub_scaled_row(r, c, f);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, r: usize, f: W) {
        for c in 0..self.cols {
            let v = self.get(r, c).wrapping_mul(&f);
            self.set(r, c, v);
        }
    }

    /// `row[dst] -= f * row[src]`.
    fn sub_scaled_row(&mut self, dst: usize, src: usize, f: W) {
        for c in 0..self.cols {
            let v = self
                .get(dst, c)
                .wrapping_sub(&f.wrapping_mul(&self.get(src, c)));
            self.set(dst, c, v);
        }
    }
}

impl<W: RingWord> fmt::Debug for RingMatrix<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = (W::BITS as usize).div_ceil(4);
        for r in 0..self.rows {
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{:0width$x}", v, width = width)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// One-word shift of the identity-σ expansion: maps `[W_j..W_{j+15}]` to
/// `[W_{j+1}..W_{j+16}]`.
pub fn build_a<W: RingWord>() -> RingMatrix<W> {
    let mut a = RingMatrix::zeros(16, 16);
    for r in 0..15 {
        a.set(r, r + 1, W::one());
    }
    for c in [0, 1, 9, 14] {
        a.set(15, c, W::one());
    }
    a
}

/// Maps one 16-word window of the expansion to the next: `A^16`.
pub fn build_block_map<W: RingWord>() -> RingMatrix<W> {
    build_a::<W>().pow(16).expect("square")
}

/// The 64x16 expansion matrix `[I; B; B^2; B^3]`.
pub fn build_e<W: RingWord>() -> RingMatrix<W> {
    let i = RingMatrix::identity(16);
    let b = build_block_map::<W>();
    let b2 = b.mul(&b).expect("square");
    let b3 = b2.mul(&b).expect("square");
    RingMatrix::vstack(&[&i, &b, &b2, &b3]).expect("same width")
}

pub fn invert<W: RingWord>(m: &RingMatrix<W>) -> Result<RingMatrix<W>> {
    m.invert()
}

/// Reduces a generating set of a submodule of `(Z/2^BITS)^n` to echelon form.
///
/// Pivots are normalised to powers of two; whenever a pivot row with
/// valuation `v` is taken, `2^(BITS-v)` times that row is fed back so that
/// elements annihilated only at higher powers of two are not lost.
pub fn echelon_generators<W: RingWord>(gens: Vec<Vec<W>>, n: usize) -> Vec<Vec<W>> {
    let mut pool: Vec<Vec<W>> = gens
        .into_iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .collect();
    let mut out = Vec::new();
    for c in 0..n {
        let Some(pi) = (0..pool.len())
            .filter(|&i| !pool[i][c].is_zero())
            .min_by_key(|&i| pool[i][c].valuation())
        else {
            continue;
        };
        let mut p = pool.swap_remove(pi);
        let v = p[c].valuation();
        let u = (p[c] >> v as usize).inverse_odd().expect("odd part");
        for x in p.iter_mut() {
            *x = x.wrapping_mul(&u);
        }
        let mut next = Vec::with_capacity(pool.len() + 1);
        for mut r in pool {
            if !r[c].is_zero() {
                let f = r[c] >> v as usize;
                for (a, b) in r.iter_mut().zip(&p) {
                    *a = a.wrapping_sub(&f.wrapping_mul(b));
                }
            }
            if r.iter().any(|x| !x.is_zero()) {
                next.push(r);
            }
        }
        let scale = W::pow2(W::BITS - v);
        let extra: Vec<W> = p.iter().map(|x| x.wrapping_mul(&scale)).collect();
        if extra.iter().any(|x| !x.is_zero()) {
            next.push(extra);
        }
        pool = next;
        out.push(p);
    }
    out
}

/// Membership test against the output of [`echelon_generators`].
pub fn module_contains<W: RingWord>(echelon: &[Vec<W>], x: &[W]) -> bool {
    let mut x = x.to_vec();
    for row in echelon {
        let Some(c) = row.iter().position(|v| !v.is_zero()) else {
            continue;
        };
        let v = row[c].valuation();
        if x[c].valuation() < v {
            return false;
        }
        let f = x[c] >> v as usize;
        for (a, b) in x.iter_mut().zip(row) {
            *a = a.wrapping_sub(&f.wrapping_mul(b));
        }
    }
    x.iter().all(|v| v.is_zero())
}

/// Drops generators that lie in the span of the remaining ones.
pub fn minimal_generators<W: RingWord>(mut gens: Vec<Vec<W>>) -> Vec<Vec<W>> {
    let n = gens.first().map_or(0, Vec::len);
    let mut i = 0;
    while i < gens.len() {
        let others: Vec<Vec<W>> = gens
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        if module_contains(&echelon_generators(others, n), &gens[i]) {
            gens.remove(i);
        } else {
            i += 1;
        }
    }
    gens
}

/// Generating set of `{x : M x = 0}` over `Z/2^BITS`, by lifting a mod-2
/// solution one bit plane at a time. The result is in echelon form and may
/// contain redundant generators; see [`minimal_generators`].
pub fn kernel<W: RingWord>(m: &RingMatrix<W>) -> Vec<Vec<W>> {
    let n = m.cols();
    let mut gens: Vec<Vec<W>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { W::one() } else { W::zero() })
                .collect()
        })
        .collect();
    for k in 0..W::BITS {
        if gens.is_empty() {
            break;
        }
        // Every generator already satisfies M g = 0 mod 2^k; find the
        // combinations that also clear bit k.
        let images: Vec<Vec<W>> = gens.iter().map(|g| m.mul_vec(g).expect("width")).collect();
        let mut sys = BitMatrix::zeros(m.rows(), gens.len());
        for (j, img) in images.iter().enumerate() {
            for (r, v) in img.iter().enumerate() {
                sys.set(r, j, (*v >> k as usize).low_bit());
            }
        }
        let mut next: Vec<Vec<W>> = sys
            .nullspace()
            .into_iter()
            .map(|c| {
                let mut v = vec![W::zero(); n];
                for j in c.ones() {
                    for (a, b) in v.iter_mut().zip(&gens[j]) {
                        *a = a.wrapping_add(b);
                    }
                }
                v
            })
            .collect();
        let two = W::one() + W::one();
        next.extend(
            gens.iter()
                .map(|g| g.iter().map(|x| x.wrapping_mul(&two)).collect::<Vec<W>>()),
        );
        gens = echelon_generators(next, n);
    }
    gens
}

/// Which eight backward words the second disturbance condition forces to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackwardWindow {
    /// Rows 8..15 of `B^-1`: the words `W_{-8}..W_{-1}` directly before the
    /// message. This is what keeps the delayed corrections inside the
    /// expansion and yields a collision.
    Near,
    /// Rows 0..7 of `B^-1`: the words `W_{-16}..W_{-9}`.
    Far,
}

impl BackwardWindow {
    pub fn rows(self) -> Range<usize> {
        match self {
            BackwardWindow::Near => 8..16,
            BackwardWindow::Far => 0..8,
        }
    }
}

/// The 16x16 system whose kernel is the set of message differences giving a
/// disturbance vector: the last eight expanded words vanish, and so do the
/// eight backward words selected by `window`.
pub fn disturbance_conditions<W: RingWord>(window: BackwardWindow) -> RingMatrix<W> {
    let b = build_block_map::<W>();
    let b3 = b.pow(3).expect("square");
    let binv = b.invert().expect("the block map is a bijection");
    RingMatrix::vstack(&[&b3.row_slice(8..16), &binv.row_slice(window.rows())]).expect("same width")
}

pub fn solve_disturbance_kernel_with<W: RingWord>(window: BackwardWindow) -> Vec<Vec<W>> {
    minimal_generators(kernel(&disturbance_conditions::<W>(window)))
}

/// Generators of the 32-bit disturbance kernel.
pub fn solve_disturbance_kernel() -> Vec<Vec<u32>> {
    solve_disturbance_kernel_with::<u32>(BackwardWindow::Near)
}

/// Formats a word vector as 8-digit lowercase hex strings.
pub fn hex_words(words: &[u32]) -> Vec<String> {
    words.iter().map(|w| format!("{w:08x}")).collect()
}

pub fn kernel_to_json(gens: &[Vec<u32>]) -> serde_json::Value {
    serde_json::Value::from(gens.iter().map(|g| hex_words(g)).collect::<Vec<_>>())
}
