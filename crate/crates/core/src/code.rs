//! Sparse parity-check matrices, their Tanner graphs, and the alist format.
//!
//! A [`ParityCheckMatrix`] stores both adjacency views of the bipartite
//! Tanner graph: `rows[i]` lists the variable nodes checked by check node
//! `i`, and `cols[j]` lists the check nodes touching variable node `j`. Both
//! views are kept sorted ascending, and every decoder in this crate walks
//! neighbourhoods in that order, so results are bit-reproducible.

use std::fmt::Write as _;

use thiserror::Error;

/// Errors raised while building or reading a parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("parity-check matrix has no rows or no columns")]
    Empty,
    #[error("dense matrix row {row} has {len} entries, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("check node {0} has no neighbours")]
    EmptyRow(usize),
    #[error("variable node {0} has no neighbours")]
    EmptyColumn(usize),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("duplicate edge between check {check} and variable {var}")]
    DuplicateEdge { check: usize, var: usize },
    #[error("alist line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("expected a vector of length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("degree profile integrates to zero")]
    DegenerateProfile,
    #[error("invalid degree profile: {0}")]
    InvalidProfile(String),
}

/// A sparse binary `m x n` parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParityCheckMatrix {
    m: usize,
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from a dense 0/1 grid (one inner `Vec` per check node).
    pub fn from_dense<R: AsRef<[u8]>>(bits: &[R]) -> Result<Self, CodeError> {
        let m = bits.len();
        let n = bits.first().map_or(0, |r| r.as_ref().len());
        if m == 0 || n == 0 {
            return Err(CodeError::Empty);
        }
        let mut rows = Vec::with_capacity(m);
        for (i, row) in bits.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(CodeError::RaggedRow { row: i, len: row.len(), expected: n });
            }
            rows.push(row.iter().enumerate().filter(|(_, &b)| b != 0).map(|(j, _)| j).collect());
        }
        Self::from_rows(n, rows)
    }

    /// Builds a matrix from per-check neighbour lists. Lists may be unsorted;
    /// duplicates are rejected.
    pub fn from_rows(n: usize, mut rows: Vec<Vec<usize>>) -> Result<Self, CodeError> {
        let m = rows.len();
        if m == 0 || n == 0 {
            return Err(CodeError::Empty);
        }
        let mut cols = vec![Vec::new(); n];
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(CodeError::DuplicateEdge { check: i, var: w[0] });
                }
            }
            for &j in row.iter() {
                if j >= n {
                    return Err(CodeError::IndexOutOfRange { index: j, limit: n });
                }
                cols[j].push(i);
            }
        }
        if let Some(i) = rows.iter().position(Vec::is_empty) {
            return Err(CodeError::EmptyRow(i));
        }
        if let Some(j) = cols.iter().position(Vec::is_empty) {
            return Err(CodeError::EmptyColumn(j));
        }
        Ok(Self { m, n, rows, cols })
    }

    /// Number of check nodes (rows).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of variable nodes (columns), i.e. the block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Variable nodes adjacent to check node `i`, ascending.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    /// Check nodes adjacent to variable node `j`, ascending.
    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    /// Total number of ones in the matrix (Tanner graph edges).
    pub fn num_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    /// Design rate `(n - m) / n`.
    pub fn design_rate(&self) -> f64 {
        (self.n as f64 - self.m as f64) / self.n as f64
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.n]; self.m];
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                out[i][j] = 1;
            }
        }
        out
    }

    /// Computes `H x^T` over GF(2).
    pub fn syndrome(&self, x_hat: &[u8]) -> Result<Vec<u8>, CodeError> {
        if x_hat.len() != self.n {
            return Err(CodeError::LengthMismatch { expected: self.n, actual: x_hat.len() });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &j| acc ^ (x_hat[j] & 1)))
            .collect())
    }

    /// True when every parity check is satisfied. Panics on a length mismatch.
    pub fn is_codeword(&self, x_hat: &[u8]) -> bool {
        assert_eq!(x_hat.len(), self.n, "word length must equal n");
        self.rows.iter().all(|row| row.iter().fold(0u8, |acc, &j| acc ^ (x_hat[j] & 1)) == 0)
    }

    /// Mean variable-node degree realized by this graph: edges / n.
    pub fn empirical_connectivity(&self) -> f64 {
        self.num_edges() as f64 / self.n as f64
    }

    /// Reads the alist interchange format.
    ///
    /// Zero entries in the per-node index lists are treated as padding.
    pub fn read_alist(text: &str) -> Result<Self, CodeError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next_nums = |what: &str| -> Result<(usize, Vec<usize>), CodeError> {
            let (idx, line) = lines.next().ok_or_else(|| CodeError::Parse {
                line: 0,
                reason: format!("unexpected end of input reading {what}"),
            })?;
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| CodeError::Parse {
                        line: idx + 1,
                        reason: format!("invalid integer {t:?} in {what}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((idx + 1, nums))
        };
        let parse_err = |line: usize, reason: String| CodeError::Parse { line, reason };

        let (l1, dims) = next_nums("dimensions")?;
        let [n, m] = dims[..] else {
            return Err(parse_err(l1, "expected \"n m\"".into()));
        };
        if n == 0 || m == 0 {
            return Err(parse_err(l1, "dimensions must be positive".into()));
        }
        let (l2, maxes) = next_nums("maximum degrees")?;
        let [max_col, max_row] = maxes[..] else {
            return Err(parse_err(l2, "expected \"max_col_degree max_row_degree\"".into()));
        };
        let (l3, col_deg) = next_nums("column degrees")?;
        if col_deg.len() != n {
            return Err(parse_err(l3, format!("expected {n} column degrees, got {}", col_deg.len())));
        }
        let (l4, row_deg) = next_nums("row degrees")?;
        if row_deg.len() != m {
            return Err(parse_err(l4, format!("expected {m} row degrees, got {}", row_deg.len())));
        }
        if col_deg.iter().any(|&d| d > max_col) || row_deg.iter().any(|&d| d > max_row) {
            return Err(parse_err(l2, "a node degree exceeds the declared maximum".into()));
        }

        let mut read_lists = |count: usize, degrees: &[usize], limit: usize, what: &str| {
            let mut lists = Vec::with_capacity(count);
            for (k, &deg) in degrees.iter().enumerate() {
                let (line, nums) = next_nums(what)?;
                let mut entries = Vec::with_capacity(deg);
                for v in nums.into_iter().filter(|&v| v != 0) {
                    if v > limit {
                        return Err(parse_err(line, format!("index {v} exceeds {limit}")));
                    }
                    entries.push(v - 1);
                }
                if entries.len() != deg {
                    return Err(parse_err(
                        line,
                        format!("{what} {}: declared degree {deg} but {} entries listed", k + 1, entries.len()),
                    ));
                }
                let mut sorted = entries.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != entries.len() {
                    return Err(parse_err(line, format!("{what} {} lists an index twice", k + 1)));
                }
                lists.push(sorted);
            }
            Ok::<_, CodeError>(lists)
        };
        let cols = read_lists(n, &col_deg, m, "variable node")?;
        let rows = read_lists(m, &row_deg, n, "check node")?;

        let h = Self::from_rows(n, rows).map_err(|e| parse_err(0, e.to_string()))?;
        if h.cols != cols {
            return Err(parse_err(0, "row and column lists are inconsistent".into()));
        }
        Ok(h)
    }

    /// Writes the alist format: single spaces, 1-based indices, no padding,
    /// trailing newline.
    pub fn write_alist(&self) -> String {
        let mut out = String::new();
        let join = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let max_col = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let _ = writeln!(out, "{} {}", self.n, self.m);
        let _ = writeln!(out, "{max_col} {max_row}");
        let _ = writeln!(out, "{}", join(&mut self.cols.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.rows.iter().map(Vec::len)));
        for c in &self.cols {
            let _ = writeln!(out, "{}", join(&mut c.iter().map(|i| i + 1)));
        }
        for r in &self.rows {
            let _ = writeln!(out, "{}", join(&mut r.iter().map(|j| j + 1)));
        }
        out
    }
}

/// Edge-perspective degree distributions of an LDPC ensemble.
///
/// `lambda[k]` is the coefficient of `x^k` in `λ(x)`, i.e. the fraction of
/// edges attached to variable nodes of degree `k + 1`; likewise `nu` for
/// check nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    lambda: Vec<f64>,
    nu: Vec<f64>,
    design_rate: f64,
}

impl DegreeProfile {
    pub fn new(lambda: Vec<f64>, nu: Vec<f64>, design_rate: f64) -> Result<Self, CodeError> {
        for (name, poly) in [("lambda", &lambda), ("nu", &nu)] {
            if poly.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return Err(CodeError::InvalidProfile(format!("{name} has a negative coefficient")));
            }
            let sum: f64 = poly.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(CodeError::InvalidProfile(format!("{name} coefficients sum to {sum}")));
            }
        }
        if !(0.0..1.0).contains(&design_rate) {
            return Err(CodeError::InvalidProfile(format!("design rate {design_rate} outside [0, 1)")));
        }
        Ok(Self { lambda, nu, design_rate })
    }

    /// Regular ensemble with variable degree `dv` and check degree `dc`.
    pub fn regular(dv: usize, dc: usize) -> Result<Self, CodeError> {
        if dv == 0 || dc == 0 || dv > dc {
            return Err(CodeError::InvalidProfile(format!("bad regular degrees ({dv}, {dc})")));
        }
        let mut lambda = vec![0.0; dv];
        lambda[dv - 1] = 1.0;
        let mut nu = vec![0.0; dc];
        nu[dc - 1] = 1.0;
        Self::new(lambda, nu, 1.0 - dv as f64 / dc as f64)
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn design_rate(&self) -> f64 {
        self.design_rate
    }

    /// `1 / ∫₀¹ λ(x) dx`, the mean variable-node degree of the ensemble.
    pub fn average_connectivity(&self) -> Result<f64, CodeError> {
        let integral: f64 = self.lambda.iter().enumerate().map(|(k, c)| c / (k + 1) as f64).sum();
        if integral <= 0.0 {
            return Err(CodeError::DegenerateProfile);
        }
        Ok(1.0 / integral)
    }

    /// Fraction of variable nodes having degree `k + 1`, for each `k`.
    pub fn variable_node_fractions(&self) -> Vec<f64> {
        let weights: Vec<f64> = self.lambda.iter().enumerate().map(|(k, c)| c / (k + 1) as f64).collect();
        let total: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / total).collect()
    }
}
