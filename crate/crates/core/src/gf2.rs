//! Binary support vectors and dense GF(2) linear algebra.
//!
//! Z-type stabilisers and X-type logical chains are both described by their
//! support: the set of physical spins they act on. Commutation between an
//! X-chain and a Z-product is the parity of the overlap, products are XORs,
//! and every design question (independence, logical operators, labels)
//! reduces to elimination over GF(2).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected length {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },
}

const WORD: usize = 64;

/// Fixed-length bit vector indexed by physical spin.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SupportVector {
    len: usize,
    words: Vec<u64>,
}

impl SupportVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self, Gf2Error> {
        let mut v = Self::zeros(len);
        for &i in indices {
            if i >= len {
                return Err(Gf2Error::OutOfRange { index: i, len });
            }
            v.toggle(i);
        }
        Ok(v)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }

    fn check_len(&self, other: &Self) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::Dimension {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.xor_assign_unchecked(other);
        Ok(out)
    }

    fn xor_assign_unchecked(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<(), Gf2Error> {
        self.check_len(other)?;
        self.xor_assign_unchecked(other);
        Ok(())
    }

    pub fn and(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_len(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
        Ok(out)
    }

    /// Parity of `|self ∧ other|`, i.e. the GF(2) inner product.
    pub fn overlap_parity(&self, other: &Self) -> Result<bool, Gf2Error> {
        self.check_len(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    /// Lexicographic order on the ascending list of set indices: the vector
    /// whose first differing set index is smaller sorts first.
    pub fn cmp_lex(&self, other: &Self) -> std::cmp::Ordering {
        let mut a = self.iter_ones();
        let mut b = other.iter_ones();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return std::cmp::Ordering::Equal,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }

    fn leading_index(&self) -> Option<usize> {
        self.iter_ones().next()
    }
}

impl fmt::Debug for SupportVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SupportVector[{}]{:?}", self.len, self.indices())
    }
}

/// An X-type chain commutes with a Z-type product iff their overlap is even.
pub fn commutes(x_support: &SupportVector, z_support: &SupportVector) -> Result<bool, Gf2Error> {
    Ok(!x_support.overlap_parity(z_support)?)
}

/// Dense GF(2) matrix stored as rows of packed bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: Vec<SupportVector>,
    n_cols: usize,
}

/// Result of `m · x = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// `None` when the system is inconsistent.
    pub particular: Option<SupportVector>,
    pub nullspace: Vec<SupportVector>,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        self.particular.is_some()
    }
}

struct Echelon {
    rows: Vec<SupportVector>,
    pivots: Vec<usize>,
    rhs: Vec<bool>,
}

impl Gf2Matrix {
    pub fn new(rows: Vec<SupportVector>, n_cols: usize) -> Result<Self, Gf2Error> {
        for r in &rows {
            if r.len() != n_cols {
                return Err(Gf2Error::Dimension {
                    expected: n_cols,
                    found: r.len(),
                });
            }
        }
        Ok(Self { rows, n_cols })
    }

    pub fn from_index_rows(rows: &[Vec<usize>], n_cols: usize) -> Result<Self, Gf2Error> {
        let rows = rows
            .iter()
            .map(|r| SupportVector::from_indices(n_cols, r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { rows, n_cols })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| SupportVector::unit(n, i)).collect(),
            n_cols: n,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[SupportVector] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![SupportVector::zeros(self.rows.len()); self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                rows[c].set(r, true);
            }
        }
        Self {
            rows,
            n_cols: self.rows.len(),
        }
    }

    pub fn mul_vec(&self, x: &SupportVector) -> Result<Vec<bool>, Gf2Error> {
        self.rows.iter().map(|r| r.overlap_parity(x)).collect()
    }

    /// Reduced row echelon form. Pivot columns are taken lowest index first
    /// and rows are processed in input order, so the output is a pure
    /// function of the input.
    fn reduce(&self, rhs: Option<&[bool]>) -> Echelon {
        let mut rows = self.rows.clone();
        let mut b: Vec<bool> = rhs.map_or_else(|| vec![false; rows.len()], |r| r.to_vec());
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.n_cols {
            let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            b.swap(next, p);
            let pivot_row = rows[next].clone();
            let pivot_b = b[next];
            for r in 0..rows.len() {
                if r != next && rows[r].get(col) {
                    rows[r].xor_assign_unchecked(&pivot_row);
                    b[r] ^= pivot_b;
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        Echelon {
            rows,
            pivots,
            rhs: b,
        }
    }

    pub fn rank(&self) -> usize {
        self.reduce(None).pivots.len()
    }

    /// Solves `self · x = rhs` over GF(2).
    pub fn solve(&self, rhs: &[bool]) -> Result<Solution, Gf2Error> {
        if rhs.len() != self.rows.len() {
            return Err(Gf2Error::Dimension {
                expected: self.rows.len(),
                found: rhs.len(),
            });
        }
        let ech = self.reduce(Some(rhs));
        let rank = ech.pivots.len();
        let feasible = ech.rhs[rank..].iter().all(|&b| !b);

        let mut is_pivot = vec![false; self.n_cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }

        let particular = feasible.then(|| {
            let mut x = SupportVector::zeros(self.n_cols);
            for (r, &p) in ech.pivots.iter().enumerate() {
                if ech.rhs[r] {
                    x.set(p, true);
                }
            }
            x
        });

        let nullspace = (0..self.n_cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = SupportVector::unit(self.n_cols, free);
                for (r, &p) in ech.pivots.iter().enumerate() {
                    if ech.rows[r].get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();

        Ok(Solution {
            particular,
            nullspace,
        })
    }

    /// Finds coefficients `c` with `Σ c_r · row_r = target`, if any.
    pub fn express(&self, target: &SupportVector) -> Result<Solution, Gf2Error> {
        if target.len() != self.n_cols {
            return Err(Gf2Error::Dimension {
                expected: self.n_cols,
                found: target.len(),
            });
        }
        let bits: Vec<bool> = (0..self.n_cols).map(|i| target.get(i)).collect();
        self.transpose().solve(&bits)
    }

    /// Basis of the row space in reduced echelon form, with pivot columns.
    pub fn row_basis(&self) -> Vec<SupportVector> {
        let ech = self.reduce(None);
        let rank = ech.pivots.len();
        ech.rows.into_iter().take(rank).collect()
    }
}

/// Reduces `v` against an echelon basis (leading index of each basis vector
/// unique). Returns the residual.
pub fn reduce_against(basis: &[SupportVector], v: &SupportVector) -> SupportVector {
    let mut out = v.clone();
    for b in basis {
        if let Some(lead) = b.leading_index() {
            if out.get(lead) {
                out.xor_assign_unchecked(b);
            }
        }
    }
    out
}
