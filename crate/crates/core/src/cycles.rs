//! Exact short-cycle census of a Tanner graph by lollipop-walk recursion.
//!
//! The graph is treated as one undirected graph on `m + n` vertices, checks
//! first. `P_l[u, w]` counts simple paths of length `l` from `u` to `w`. Paths
//! are grown one edge at a time from `P_l * A`, subtracting the walks that
//! revisit a vertex. Those fall into two families: walks that return to their
//! start (`D_l`) and walks that close onto an earlier interior vertex, which
//! are lollipops with a tail of length `q` and a cycle of length `c`. The
//! lollipop tables are themselves grown by the same scheme, with explicit
//! chord corrections for the short-girth cases where a tail may touch the
//! cycle twice.
//!
//! The diagonal of the tailless lollipop table `Lol(0, c)` counts closed
//! simple walks of length `c` through each vertex, so a check node lies on
//! `Lol(0, c)[i, i] / 2` cycles of length `c`.

use std::collections::HashMap;

use thiserror::Error;

use crate::code::ParityCheckMatrix;

/// Largest cycle length searched when no cap is given.
pub const DEFAULT_CAP: usize = 16;

/// Graphs with more vertices than this are refused by the DFS oracle.
pub const ORACLE_MAX_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("cycle length {0} must be even and at least 4")]
    InvalidLength(usize),
    #[error("cycle length {len} exceeds the search cap {cap}")]
    LengthCapExceeded { len: usize, cap: usize },
    #[error("walk counts of length {len} overflow 64 bits; graph too dense for an exact census")]
    IntegerOverflow { len: usize },
    #[error("oracle limited to {max} vertices, graph has {vertices}")]
    TooLarge { vertices: usize, max: usize },
}

/// Which side of the bipartition a walk starts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Check,
    Variable,
}

#[derive(Debug)]
struct Overflow;

/// Dense square table of walk counts.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Counts {
    v: usize,
    data: Vec<u64>,
}

impl Counts {
    fn zeros(v: usize) -> Self {
        Self { v, data: vec![0; v * v] }
    }

    fn identity(v: usize) -> Self {
        Self::from_diag(&vec![1; v])
    }

    fn from_diag(d: &[u64]) -> Self {
        let mut out = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            out.data[i * out.v + i] = x;
        }
        out
    }

    #[inline]
    fn get(&self, u: usize, w: usize) -> u64 {
        self.data[u * self.v + w]
    }

    #[inline]
    fn row(&self, u: usize) -> &[u64] {
        &self.data[u * self.v..(u + 1) * self.v]
    }

    fn add_at(&mut self, u: usize, w: usize, x: u64) -> Result<(), Overflow> {
        let e = &mut self.data[u * self.v + w];
        *e = e.checked_add(x).ok_or(Overflow)?;
        Ok(())
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// `A * self`.
    fn left_adj(&self, adj: &[Vec<usize>]) -> Result<Self, Overflow> {
        let mut out = Self::zeros(self.v);
        for (u, nbrs) in adj.iter().enumerate() {
            let dst = &mut out.data[u * self.v..(u + 1) * self.v];
            for &x in nbrs {
                for (d, &s) in dst.iter_mut().zip(self.row(x)) {
                    *d = d.checked_add(s).ok_or(Overflow)?;
                }
            }
        }
        Ok(out)
    }

    /// `self * A`.
    fn right_adj(&self, adj: &[Vec<usize>]) -> Result<Self, Overflow> {
        let mut out = Self::zeros(self.v);
        for u in 0..self.v {
            let src = self.row(u);
            for (w, nbrs) in adj.iter().enumerate() {
                let mut acc = 0u64;
                for &x in nbrs {
                    acc = acc.checked_add(src[x]).ok_or(Overflow)?;
                }
                out.data[u * self.v + w] = acc;
            }
        }
        Ok(out)
    }

    fn hadamard(&self, other: &Self) -> Result<Self, Overflow> {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a.checked_mul(b).ok_or(Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self { v: self.v, data })
    }

    fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.v);
        for u in 0..self.v {
            for w in 0..self.v {
                out.data[w * self.v + u] = self.get(u, w);
            }
        }
        out
    }

    /// Subtraction never underflows for a correct recursion; a negative
    /// count means a bug, not bad input.
    fn sub_assign(&mut self, other: &Self) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = a.checked_sub(b).expect("walk count went negative");
        }
    }

    /// `self -= diag(s) * other`, row `u` scaled by `s[u]`.
    fn sub_scaled_rows(&mut self, s: &[u64], other: &Self) -> Result<(), Overflow> {
        for (u, &k) in s.iter().enumerate() {
            for (a, &b) in self.data[u * self.v..(u + 1) * self.v].iter_mut().zip(other.row(u)) {
                let t = b.checked_mul(k).ok_or(Overflow)?;
                *a = a.checked_sub(t).expect("walk count went negative");
            }
        }
        Ok(())
    }

    fn sub_diag(&mut self, d: &[u64]) {
        for (i, &x) in d.iter().enumerate() {
            let e = &mut self.data[i * self.v + i];
            *e = e.checked_sub(x).expect("walk count went negative");
        }
    }

    fn clear_diag(&mut self) {
        for i in 0..self.v {
            self.data[i * self.v + i] = 0;
        }
    }

    fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<Vec<u64>> {
        rows.map(|u| self.row(u)[cols.clone()].to_vec()).collect()
    }
}

/// Chord corrections for lassos with tail `q'` on a cycle of length `c`.
struct Chords {
    start_l: Counts,
    start_k: Counts,
    join_l: Counts,
    join_k: Counts,
}

/// Path and lollipop walk tables, grown one length at a time.
#[derive(Debug, Clone)]
pub struct WalkTables {
    m: usize,
    n: usize,
    adj: Vec<Vec<usize>>,
    linked: Vec<bool>,
    deg: Vec<u64>,
    /// `p[l]`: simple paths of length `l`.
    p: Vec<Counts>,
    /// `d[l]`: walks of length `l + 1` whose last step returns to the start.
    d: Vec<Counts>,
    /// Closed simple walks of length `c` through each vertex.
    z: HashMap<usize, Vec<u64>>,
    y: HashMap<usize, Counts>,
    lol: HashMap<(usize, usize), Counts>,
    kt: HashMap<(usize, usize), Counts>,
}

impl WalkTables {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        let (m, n) = (h.m(), h.n());
        let v = m + n;
        let mut adj = vec![Vec::new(); v];
        for (i, row) in h.rows().iter().enumerate() {
            for &j in row {
                adj[i].push(m + j);
                adj[m + j].push(i);
            }
        }
        let mut linked = vec![false; v * v];
        for (u, nbrs) in adj.iter().enumerate() {
            for &w in nbrs {
                linked[u * v + w] = true;
            }
        }
        let deg: Vec<u64> = adj.iter().map(|a| a.len() as u64).collect();
        let mut a = Counts::zeros(v);
        for (u, nbrs) in adj.iter().enumerate() {
            for &w in nbrs {
                a.data[u * v + w] = 1;
            }
        }
        let d1 = Counts::from_diag(&deg);
        Self {
            m,
            n,
            adj,
            linked,
            deg,
            p: vec![Counts::identity(v), a],
            d: vec![Counts::zeros(v), d1],
            z: HashMap::new(),
            y: HashMap::new(),
            lol: HashMap::new(),
            kt: HashMap::new(),
        }
    }

    /// Longest path length tabulated so far.
    pub fn max_path_len(&self) -> usize {
        self.p.len() - 1
    }

    /// Longest cycle length whose closed-walk counts are available.
    pub fn max_cycle_len(&self) -> usize {
        self.p.len() - 1
    }

    /// The `m x n` biadjacency matrix.
    pub fn edge_matrix(&self) -> Vec<Vec<u64>> {
        self.p[1].block(0..self.m, self.m..self.m + self.n)
    }

    /// Simple path counts of length `len` starting on `from`. Even lengths
    /// end on the same side, odd lengths on the other.
    pub fn paths(&self, len: usize, from: Side) -> Option<Vec<Vec<u64>>> {
        let p = self.p.get(len)?;
        Some(p.block(self.side(from), self.side(self.end_side(from, len))))
    }

    /// Lollipop walks with a tail of `tail` edges closing a cycle of length
    /// `cycle`, by start and end vertex. `None` when not tabulated; an empty
    /// table (no cycles of that length) is reported as zeros.
    pub fn lollipops(&self, tail: usize, cycle: usize, from: Side) -> Option<Vec<Vec<u64>>> {
        if cycle < 4 || cycle % 2 == 1 || tail + cycle > self.max_path_len() {
            return None;
        }
        let rows = self.side(from);
        let cols = self.side(self.end_side(from, tail));
        Some(match self.lol.get(&(tail, cycle)) {
            Some(t) => t.block(rows, cols),
            None => vec![vec![0; cols.len()]; rows.len()],
        })
    }

    fn side(&self, s: Side) -> std::ops::Range<usize> {
        match s {
            Side::Check => 0..self.m,
            Side::Variable => self.m..self.m + self.n,
        }
    }

    fn end_side(&self, from: Side, len: usize) -> Side {
        match (from, len % 2) {
            (s, 0) => s,
            (Side::Check, _) => Side::Variable,
            (Side::Variable, _) => Side::Check,
        }
    }

    fn v(&self) -> usize {
        self.m + self.n
    }

    #[inline]
    fn linked(&self, u: usize, w: usize) -> bool {
        self.linked[u * self.v() + w]
    }

    /// Closed simple walks of length `c` per vertex, if `c` has been reached.
    fn closed(&self, c: usize) -> Option<Vec<u64>> {
        if c < 4 || c % 2 == 1 || c > self.max_cycle_len() {
            return None;
        }
        Some(self.z.get(&c).cloned().unwrap_or_else(|| vec![0; self.v()]))
    }

    /// Grows the tables until cycles of length `c` are counted.
    pub fn extend_to(&mut self, c: usize) -> Result<(), CycleError> {
        while self.max_cycle_len() < c {
            let l = self.max_path_len();
            self.step(l).map_err(|_| CycleError::IntegerOverflow { len: l + 1 })?;
        }
        Ok(())
    }

    fn girth_bound(&self, l: usize) -> usize {
        (4..=l).step_by(2).find(|c| self.z.contains_key(c)).unwrap_or(l + 2)
    }

    /// One growth step: closes cycles of length `l + 1`, extends every
    /// lollipop table to total length `l + 1`, then forms `P_{l+1}` and
    /// `D_{l+1}`.
    fn step(&mut self, l: usize) -> Result<(), Overflow> {
        let v = self.v();
        let c_new = l + 1;
        if c_new >= 4 && c_new.is_multiple_of(2) {
            let pc = &self.p[l];
            let mut zc = vec![0u64; v];
            let mut yc = Counts::zeros(v);
            for u in 0..v {
                for &x in &self.adj[u] {
                    let w = pc.get(u, x);
                    yc.data[u * v + x] = w;
                    zc[u] = zc[u].checked_add(w).ok_or(Overflow)?;
                }
            }
            if zc.iter().any(|&x| x != 0) {
                self.lol.insert((0, c_new), Counts::from_diag(&zc));
                self.kt.insert((0, c_new), yc.clone());
                self.z.insert(c_new, zc);
                self.y.insert(c_new, yc);
            }
        }

        let g = self.girth_bound(l);
        for c in (4..=l).step_by(2) {
            let q = l + 1 - c;
            if q < 1 || !self.z.contains_key(&c) {
                continue;
            }
                let (lol, kt) = if q == 1 {
                let join = self.chords(0, c, g)?;
                let zc = &self.z[&c];
                let yc = &self.y[&c];
                let mut lol = self.lol[&(0, c)].left_adj(&self.adj)?;
                lol.sub_assign(yc);
                lol.sub_assign(yc);

                let mut b1k = self.p[2].hadamard(&self.p[c - 2])?;
                if c == 4 {
                    b1k.sub_assign(&self.p[2]);
                }
                if c >= 6 {
                    if let Some(prev) = self.kt.get(&(1, c - 2)) {
                        b1k.sub_assign(prev);
                        b1k.sub_assign(&prev.transpose());
                    }
                }
                if let Some(mid) = self.middle(c, g)? {
                    b1k.sub_assign(&mid);
                }
                b1k.clear_diag();
                let mut kt = self.kt[&(0, c)].left_adj(&self.adj)?;
                kt.sub_assign(&b1k);
                kt.sub_diag(zc);
                if let Some(j) = &join {
                    lol.sub_assign(&j.join_l);
                    kt.sub_assign(&j.join_k);
                }
                (lol, kt)
            } else {
                let start = self.chords(q - 2, c, g)?;
                let join = self.chords(q - 1, c, g)?;
                let n1 = if q == 2 { 2 } else { 1 };
                let scale: Vec<u64> = self.deg.iter().map(|&d| d.saturating_sub(n1)).collect();
                let mut lol = self.lol[&(q - 1, c)].left_adj(&self.adj)?;
                let mut kt = self.kt[&(q - 1, c)].left_adj(&self.adj)?;
                // vertices with degree below n1 carry no lollipops, so the
                // saturated scale never hides a term
                if let Some(s) = &start {
                    add_assign(&mut lol, &s.start_l)?;
                    add_assign(&mut kt, &s.start_k)?;
                }
                lol.sub_scaled_rows(&scale, &self.lol[&(q - 2, c)])?;
                kt.sub_scaled_rows(&scale, &self.kt[&(q - 2, c)])?;
                if let Some(j) = &join {
                    lol.sub_assign(&j.join_l);
                    kt.sub_assign(&j.join_k);
                }
                (lol, kt)
            };
            self.lol.insert((q, c), lol);
            self.kt.insert((q, c), kt);
        }

        let mut pn = self.p[l].right_adj(&self.adj)?;
        pn.sub_assign(&self.d[l]);
        let mut dn = Counts::zeros(v);
        for u in 0..v {
            for w in 0..v {
                let x = self.p[l].get(u, w);
                dn.data[u * v + w] = x.checked_mul(self.deg[w]).ok_or(Overflow)? - x;
            }
        }
        for c in (4..=l + 1).step_by(2) {
            let q = l + 1 - c;
            if let Some(t) = self.lol.get(&(q, c)) {
                pn.sub_assign(t);
            }
            if let Some(t) = self.kt.get(&(q, c)) {
                dn.sub_assign(t);
            }
        }
        self.p.push(pn);
        self.d.push(dn);
        Ok(())
    }

    /// Enumerates lassos: simple paths `x_0 .. x_t`, `t = q' + c - 1`, whose
    /// end is adjacent to `x_{q'}`. Each chord from `x_0` to some `x_j`,
    /// `j >= 3`, is a walk the plain recursion miscounts.
    fn chords(&self, qp: usize, c: usize, g: usize) -> Result<Option<Chords>, Overflow> {
        if !(qp + 1 >= g || 2 * qp + c + 2 >= 2 * g) {
            return Ok(None);
        }
        let v = self.v();
        let t = qp + c - 1;
        let mut out = Chords {
            start_l: Counts::zeros(v),
            start_k: Counts::zeros(v),
            join_l: Counts::zeros(v),
            join_k: Counts::zeros(v),
        };
        let mut any = false;
        let mut res = Ok(());
        self.for_each_path(t, |p| {
            if res.is_err() || !self.linked(p[t], p[qp]) {
                return;
            }
            for j in 3..=t {
                if qp == 0 && j == t {
                    continue;
                }
                if self.linked(p[j], p[0]) {
                    any = true;
                    res = (|| {
                        out.start_l.add_at(p[0], p[qp], 1)?;
                        out.start_k.add_at(p[0], p[t], 1)?;
                        out.join_l.add_at(p[j], p[qp], 1)?;
                        out.join_k.add_at(p[j], p[t], 1)
                    })();
                }
            }
        });
        res?;
        Ok(any.then_some(out))
    }

    /// Paths `u .. v` of length `c - 2` counted once for every interior
    /// vertex `x_i`, `3 <= i < c - 4`, adjacent to both ends.
    fn middle(&self, c: usize, g: usize) -> Result<Option<Counts>, Overflow> {
        if !(c >= 8 && c + 2 >= 2 * g) {
            return Ok(None);
        }
        let len = c - 2;
        let mut out = Counts::zeros(self.v());
        let mut res = Ok(());
        self.for_each_path(len, |p| {
            let (u, w) = (p[0], p[len]);
            for &x in &p[3..c - 4] {
                if res.is_ok() && self.linked(x, u) && self.linked(x, w) {
                    res = out.add_at(u, w, 1);
                }
            }
        });
        res?;
        Ok((!out.is_zero()).then_some(out))
    }

    fn for_each_path(&self, len: usize, mut f: impl FnMut(&[usize])) {
        let mut path = Vec::with_capacity(len + 1);
        let mut on = vec![false; self.v()];
        for u in 0..self.v() {
            path.push(u);
            on[u] = true;
            self.extend_path(len, &mut path, &mut on, &mut f);
            on[u] = false;
            path.pop();
        }
    }

    fn extend_path(&self, len: usize, path: &mut Vec<usize>, on: &mut [bool], f: &mut impl FnMut(&[usize])) {
        if path.len() == len + 1 {
            f(path);
            return;
        }
        let last = *path.last().expect("path is non-empty");
        for &w in &self.adj[last] {
            if !on[w] {
                on[w] = true;
                path.push(w);
                self.extend_path(len, path, on, f);
                path.pop();
                on[w] = false;
            }
        }
    }
}

fn add_assign(a: &mut Counts, b: &Counts) -> Result<(), Overflow> {
    for (x, &y) in a.data.iter_mut().zip(&b.data) {
        *x = x.checked_add(y).ok_or(Overflow)?;
    }
    Ok(())
}

/// Cycle totals of one length: the cycle count and the number of those
/// cycles through each check node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCount {
    pub total: u64,
    pub per_check: Vec<u64>,
    /// Closed-walk trace over check nodes and over variable nodes. Every
    /// cycle visits both sides equally often, so the two must agree.
    pub trace_check: u64,
    pub trace_variable: u64,
}

fn validate_length(two_k: usize, cap: usize) -> Result<(), CycleError> {
    if two_k < 4 || two_k % 2 == 1 {
        return Err(CycleError::InvalidLength(two_k));
    }
    if two_k > cap {
        return Err(CycleError::LengthCapExceeded { len: two_k, cap });
    }
    Ok(())
}

fn read_count(t: &WalkTables, two_k: usize) -> CycleCount {
    let z = t.closed(two_k).expect("tables extended to this length");
    let trace_check: u64 = z[..t.m].iter().sum();
    let trace_variable: u64 = z[t.m..].iter().sum();
    CycleCount {
        total: trace_check / two_k as u64,
        per_check: z[..t.m].iter().map(|&x| x / 2).collect(),
        trace_check,
        trace_variable,
    }
}

/// Counts the cycles of length `two_k` (at most [`DEFAULT_CAP`]).
pub fn count_cycles_of_length(h: &ParityCheckMatrix, two_k: usize) -> Result<CycleCount, CycleError> {
    count_cycles_with_cap(h, two_k, DEFAULT_CAP)
}

pub fn count_cycles_with_cap(h: &ParityCheckMatrix, two_k: usize, cap: usize) -> Result<CycleCount, CycleError> {
    validate_length(two_k, cap)?;
    let mut t = WalkTables::new(h);
    t.extend_to(two_k)?;
    Ok(read_count(&t, two_k))
}

/// Girth and cycle participation at the girth.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleCensus {
    /// `None` when no cycle of length up to `cap` exists.
    pub girth: Option<usize>,
    pub cap: usize,
    pub total: u64,
    /// Cycles of girth length through each check node; empty when acyclic.
    pub per_check: Vec<u64>,
    pub mu_g: f64,
    pub m: usize,
}

impl CycleCensus {
    pub fn is_acyclic(&self) -> bool {
        self.girth.is_none()
    }
}

/// Finds the girth (up to `cap`) and the per-check counts at that length.
pub fn census(h: &ParityCheckMatrix, cap: usize) -> Result<CycleCensus, CycleError> {
    if cap < 4 || cap % 2 == 1 {
        return Err(CycleError::InvalidLength(cap));
    }
    let mut t = WalkTables::new(h);
    for two_k in (4..=cap).step_by(2) {
        t.extend_to(two_k)?;
        let count = read_count(&t, two_k);
        if count.total > 0 {
            let sum: u64 = count.per_check.iter().sum();
            return Ok(CycleCensus {
                girth: Some(two_k),
                cap,
                total: count.total,
                mu_g: sum as f64 / h.m() as f64,
                per_check: count.per_check,
                m: h.m(),
            });
        }
    }
    Ok(CycleCensus { girth: None, cap, total: 0, per_check: Vec::new(), mu_g: 0.0, m: h.m() })
}

/// Counts cycles of length `two_k` by exhaustive search. Each cycle is found
/// from its lowest vertex and kept in one of its two directions.
pub fn brute_force_cycle_oracle(h: &ParityCheckMatrix, two_k: usize) -> Result<(u64, Vec<u64>), CycleError> {
    if two_k < 4 || two_k % 2 == 1 {
        return Err(CycleError::InvalidLength(two_k));
    }
    let (m, n) = (h.m(), h.n());
    if m + n > ORACLE_MAX_VERTICES {
        return Err(CycleError::TooLarge { vertices: m + n, max: ORACLE_MAX_VERTICES });
    }
    let t = WalkTables::new(h);
    let mut total = 0u64;
    let mut per_check = vec![0u64; m];
    let mut path = Vec::with_capacity(two_k);
    let mut on = vec![false; m + n];

    fn dfs(
        t: &WalkTables,
        two_k: usize,
        path: &mut Vec<usize>,
        on: &mut [bool],
        found: &mut dyn FnMut(&[usize]),
    ) {
        let start = path[0];
        let last = *path.last().expect("path is non-empty");
        if path.len() == two_k {
            if t.linked(last, start) && path[1] < last {
                found(path);
            }
            return;
        }
        for &w in &t.adj[last] {
            if w > start && !on[w] {
                on[w] = true;
                path.push(w);
                dfs(t, two_k, path, on, found);
                path.pop();
                on[w] = false;
            }
        }
    }

    for s in 0..m + n {
        path.push(s);
        on[s] = true;
        dfs(&t, two_k, &mut path, &mut on, &mut |cyc| {
            total += 1;
            for &x in cyc.iter().filter(|&&x| x < m) {
                per_check[x] += 1;
            }
        });
        on[s] = false;
        path.pop();
    }
    Ok((total, per_check))
}
