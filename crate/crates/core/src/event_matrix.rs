//! The binary event matrix `K`.
//!
//! Columns index the `N = 2^n` joint outcomes. Outcome `ℓ` is read as an
//! `n`-bit big-endian string `b_1 b_2 ⋯ b_n` with variable 1 as the most
//! significant bit; `b_i = 1` means `A_i` holds. Column 0 is `Ā_1⋯Ā_n`.
//!
//! The first `n` rows mark the outcomes of `Ā_i`, the remaining
//! `n(n-1)/2` rows mark the outcomes of `A_i A_j` in lexicographic pair
//! order. Rows are kept in compressed form as sorted column lists.

use std::fmt;

use thiserror::Error;

use crate::marginals::{marginal_count, pairs, MAX_VARIABLES, MIN_VARIABLES};

/// Largest `n` for which a dense copy of `K` may be materialized.
pub const MAX_DENSE_VARIABLES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventMatrixError {
    #[error("variable count {0} outside supported range {MIN_VARIABLES}..={MAX_VARIABLES}")]
    Size(usize),
    #[error("dense materialization refused for n = {0} (limit {MAX_DENSE_VARIABLES})")]
    TooLargeForDense(usize),
    #[error("invalid event {0:?} for n = {1}")]
    InvalidEvent(Event, usize),
    #[error("bit string {0:?} is not a valid outcome")]
    BadBits(String),
}

/// An event addressed by its variables (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    /// `Ā_i`
    Not(usize),
    /// `A_i`
    Holds(usize),
    /// `A_i A_j`
    Both(usize, usize),
}

/// A joint outcome, i.e. a column of `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutcomeIndex {
    n: usize,
    column: usize,
}

impl OutcomeIndex {
    pub fn new(n: usize, column: usize) -> Self {
        assert!(column < 1 << n, "column {column} out of range for n = {n}");
        Self { n, column }
    }

    pub fn from_bits(bits: &str) -> Result<Self, EventMatrixError> {
        let bad = || EventMatrixError::BadBits(bits.to_string());
        if bits.is_empty() || bits.len() > MAX_VARIABLES {
            return Err(bad());
        }
        let column = usize::from_str_radix(bits, 2).map_err(|_| bad())?;
        Ok(Self {
            n: bits.len(),
            column,
        })
    }

    pub fn column(&self) -> usize {
        self.column
    }

    /// Whether `A_i` holds in this outcome (1-based).
    pub fn holds(&self, i: usize) -> bool {
        self.column >> (self.n - i) & 1 == 1
    }

    pub fn bits(&self) -> String {
        format!("{:0width$b}", self.column, width = self.n)
    }

    /// Conjunction label such as `A1 ¬A2 A3`.
    pub fn label(&self) -> String {
        (1..=self.n)
            .map(|i| {
                if self.holds(i) {
                    format!("A{i}")
                } else {
                    format!("¬A{i}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for OutcomeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bits())
    }
}

/// An indicator row over `N` columns, stored as its sorted support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseRow {
    width: usize,
    cols: Vec<usize>,
}

impl SparseRow {
    /// Builds a row from any column list; duplicates collapse.
    pub fn new(width: usize, mut cols: Vec<usize>) -> Self {
        cols.sort_unstable();
        cols.dedup();
        assert!(cols.last().is_none_or(|&c| c < width));
        Self { width, cols }
    }

    pub fn empty(width: usize) -> Self {
        Self {
            width,
            cols: Vec::new(),
        }
    }

    pub fn full(width: usize) -> Self {
        Self {
            width,
            cols: (0..width).collect(),
        }
    }

    /// Row with a single one at `column`: the basis vector `|x⟩_column`.
    pub fn basis(width: usize, column: usize) -> Self {
        Self::new(width, vec![column])
    }

    pub fn from_dense(bits: &[u8]) -> Self {
        Self {
            width: bits.len(),
            cols: bits
                .iter()
                .enumerate()
                .filter(|(_, &b)| b != 0)
                .map(|(c, _)| c)
                .collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn ones(&self) -> usize {
        self.cols.len()
    }

    pub fn contains(&self, col: usize) -> bool {
        self.cols.binary_search(&col).is_ok()
    }

    pub fn complement(&self) -> Self {
        let mut cols = Vec::with_capacity(self.width - self.cols.len());
        let mut it = self.cols.iter().peekable();
        for c in 0..self.width {
            if it.peek() == Some(&&c) {
                it.next();
            } else {
                cols.push(c);
            }
        }
        Self {
            width: self.width,
            cols,
        }
    }

    pub fn to_dense(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.width];
        for &c in &self.cols {
            out[c] = 1;
        }
        out
    }

    /// Size of the intersection with another row.
    pub fn overlap(&self, other: &SparseRow) -> usize {
        let (mut a, mut b) = (self.cols.iter().peekable(), other.cols.iter().peekable());
        let mut count = 0;
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    count += 1;
                    a.next();
                    b.next();
                }
            }
        }
        count
    }
}

impl fmt::Display for SparseRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.to_dense() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Join of two canonical subspaces: the union of their supports.
pub fn join_rows(a: &SparseRow, b: &SparseRow) -> SparseRow {
    assert_eq!(a.width, b.width, "rows over different outcome spaces");
    let mut cols = Vec::with_capacity(a.cols.len() + b.cols.len());
    let (mut i, mut j) = (0, 0);
    while i < a.cols.len() && j < b.cols.len() {
        let (x, y) = (a.cols[i], b.cols[j]);
        cols.push(x.min(y));
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
    }
    cols.extend_from_slice(&a.cols[i..]);
    cols.extend_from_slice(&b.cols[j..]);
    SparseRow {
        width: a.width,
        cols,
    }
}

/// The `m × N` event matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventMatrix {
    n: usize,
    rows: Vec<SparseRow>,
}

impl EventMatrix {
    /// Assembles a matrix from explicit rows. Used by alternative builders;
    /// [`build`] is the canonical constructor.
    pub fn from_rows(n: usize, rows: Vec<SparseRow>) -> Result<Self, EventMatrixError> {
        if !(MIN_VARIABLES..=MAX_VARIABLES).contains(&n) {
            return Err(EventMatrixError::Size(n));
        }
        assert_eq!(rows.len(), marginal_count(n));
        assert!(rows.iter().all(|r| r.width == 1 << n));
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows `m = n(n+1)/2`.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns `N = 2^n`.
    pub fn width(&self) -> usize {
        1 << self.n
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Row `k`, 0-based.
    pub fn row(&self, k: usize) -> &SparseRow {
        &self.rows[k]
    }

    /// Row of `Ā_i`, `A_i A_j`, or the synthesized row of `A_i`.
    pub fn row_for_event(&self, event: Event) -> Result<SparseRow, EventMatrixError> {
        let n = self.n;
        let invalid = || EventMatrixError::InvalidEvent(event, n);
        match event {
            Event::Not(i) if (1..=n).contains(&i) => Ok(self.rows[i - 1].clone()),
            Event::Holds(i) if (1..=n).contains(&i) => Ok(self.rows[i - 1].complement()),
            Event::Both(i, j) if i != j && (1..=n).contains(&i) && (1..=n).contains(&j) => {
                let (i, j) = (i.min(j), i.max(j));
                let k = crate::marginals::pair_slot(n, i, j);
                Ok(self.rows[k - 1].clone())
            }
            _ => Err(invalid()),
        }
    }

    pub fn to_dense(&self) -> Result<Vec<Vec<u8>>, EventMatrixError> {
        if self.n > MAX_DENSE_VARIABLES {
            return Err(EventMatrixError::TooLargeForDense(self.n));
        }
        Ok(self.rows.iter().map(SparseRow::to_dense).collect())
    }

    /// One line of `0`/`1` characters per row.
    pub fn ascii_grid(&self) -> Result<String, EventMatrixError> {
        if self.n > MAX_DENSE_VARIABLES {
            return Err(EventMatrixError::TooLargeForDense(self.n));
        }
        Ok(self.rows.iter().map(|r| format!("{r}\n")).collect())
    }

    /// `(row, column)` pairs of the nonzero entries, 0-based, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(k, r)| r.cols.iter().map(move |&c| (k, c)))
            .collect()
    }

    /// Gram matrix `K K'` as row-major `m × m` counts of shared outcomes.
    pub fn gram(&self) -> Vec<f64> {
        let m = self.m();
        let mut g = vec![0.0; m * m];
        for a in 0..m {
            for b in a..m {
                let v = self.rows[a].overlap(&self.rows[b]) as f64;
                g[a * m + b] = v;
                g[b * m + a] = v;
            }
        }
        g
    }
}

/// Builds `K` for `n` variables in compressed form.
pub fn build(n: usize) -> Result<EventMatrix, EventMatrixError> {
    if !(MIN_VARIABLES..=MAX_VARIABLES).contains(&n) {
        return Err(EventMatrixError::Size(n));
    }
    let width = 1usize << n;
    let mut rows = Vec::with_capacity(marginal_count(n));
    for i in 1..=n {
        // runs of 2^(n-i) ones then 2^(n-i) zeros, starting with ones
        let run = 1usize << (n - i);
        let cols = (0..width)
            .step_by(2 * run)
            .flat_map(|start| start..start + run)
            .collect();
        rows.push(SparseRow { width, cols });
    }
    for (i, j) in pairs(n) {
        // A_i holds exactly where row Ā_i is zero
        let not_i = &rows[i - 1];
        let not_j = &rows[j - 1];
        let cols = (0..width)
            .filter(|&c| !not_i.contains(c) && !not_j.contains(c))
            .collect();
        rows.push(SparseRow { width, cols });
    }
    Ok(EventMatrix { n, rows })
}
