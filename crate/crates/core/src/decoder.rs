//! Log-domain belief propagation with optional per-check reweighting.
//!
//! LLRs follow `L = log P(x=1) / P(x=0)`: bit 1 is sent as `+1`, bit 0 as
//! `-1`, so `L = 2y / sigma^2` and a positive belief decides 1.
//!
//! With this orientation `tanh(L/2) = P(1) - P(0)`, and the parity rule picks
//! up a factor `(-1)^(k+1)` for `k` incoming messages: a check whose other
//! neighbours all lean towards 0 says the target is 0 as well. For even check
//! degrees the factor is `+1`.
//!
//! All three decoders share one flooding engine. Messages live on edges in
//! check-major order: edge `e` of check `i` is the `e`-th entry of `h.row(i)`.

use thiserror::Error;

use crate::code::ParityCheckMatrix;
use crate::cycles::CycleCensus;

pub const DEFAULT_LLR_CLAMP: f64 = 50.0;
pub const DEFAULT_MAX_ITERATIONS: usize = 60;

/// Margin kept between the tanh product and 1 before inverting it.
const TANH_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("noise variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("received value at position {0} is not finite")]
    NonFiniteInput(usize),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid decoder configuration: {0}")]
    InvalidConfig(String),
    #[error("census describes {census} check nodes but the code has {code}")]
    CensusMismatch { census: usize, code: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    StandardBp,
    UrwBp,
    VfapBp,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::StandardBp, Variant::UrwBp, Variant::VfapBp];

    pub fn name(self) -> &'static str {
        match self {
            Variant::StandardBp => "standard_bp",
            Variant::UrwBp => "urw_bp",
            Variant::VfapBp => "vfap_bp",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard_bp" | "bp" => Ok(Variant::StandardBp),
            "urw_bp" | "urw" => Ok(Variant::UrwBp),
            "vfap_bp" | "vfap" => Ok(Variant::VfapBp),
            other => Err(DecodeError::InvalidConfig(format!("unknown decoder variant `{other}`"))),
        }
    }
}

/// Per-check reweighting factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightVector {
    rho: Vec<f64>,
}

impl ReweightVector {
    pub fn new(rho: Vec<f64>) -> Result<Self, DecodeError> {
        if let Some(i) = rho.iter().position(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(DecodeError::InvalidConfig(format!("rho[{i}] = {} is outside (0, 1]", rho[i])));
        }
        Ok(Self { rho })
    }

    pub fn uniform(m: usize, value: f64) -> Result<Self, DecodeError> {
        Self::new(vec![value; m])
    }

    pub fn ones(m: usize) -> Self {
        Self { rho: vec![1.0; m] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub variant: Variant,
    pub max_iterations: usize,
    pub llr_clamp: f64,
    /// URW constant; defaults to `2 / n_D`.
    pub rho_uniform: Option<f64>,
    /// VFAP value for cycle-heavy checks; defaults to `2 / n_D`.
    pub rho_v_override: Option<f64>,
}

impl DecoderConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            llr_clamp: DEFAULT_LLR_CLAMP,
            rho_uniform: None,
            rho_v_override: None,
        }
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        let bad = |s: String| Err(DecodeError::InvalidConfig(s));
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.llr_clamp > 0.0 && self.llr_clamp.is_finite()) {
            return bad(format!("llr_clamp must be positive and finite, got {}", self.llr_clamp));
        }
        for (name, r) in [("rho_uniform", self.rho_uniform), ("rho_v_override", self.rho_v_override)] {
            if let Some(r) = r {
                if !(r > 0.0 && r <= 1.0) {
                    return bad(format!("{name} = {r} is outside (0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// The reweighting vector this configuration uses on `h`.
    pub fn reweighting(&self, h: &ParityCheckMatrix, census: &CycleCensus) -> Result<ReweightVector, DecodeError> {
        self.validate()?;
        let default = || (2.0 / h.empirical_connectivity()).min(1.0);
        match self.variant {
            Variant::StandardBp => Ok(ReweightVector::ones(h.m())),
            Variant::UrwBp => ReweightVector::uniform(h.m(), self.rho_uniform.unwrap_or_else(default)),
            Variant::VfapBp => assign_faps(h, census, self.rho_v_override.unwrap_or_else(default)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub codeword: Vec<u8>,
    pub converged: bool,
    pub iterations_used: usize,
    pub final_beliefs: Vec<f64>,
}

/// Channel LLRs `2y / sigma^2`, clamped to `±clamp`.
pub fn init_llr(y: &[f64], sigma2: f64, clamp: f64) -> Result<Vec<f64>, DecodeError> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(DecodeError::NonPositiveVariance(sigma2));
    }
    if let Some(j) = y.iter().position(|v| !v.is_finite()) {
        return Err(DecodeError::NonFiniteInput(j));
    }
    Ok(y.iter().map(|&v| (2.0 * v / sigma2).clamp(-clamp, clamp)).collect())
}

#[inline]
fn check_from_product(prod: f64, incoming: usize, clamp: f64) -> f64 {
    // atanh on the magnitude keeps the rule exactly odd
    let p = prod.abs().min(1.0 - TANH_EPS);
    let out = (2.0 * p.atanh()).min(clamp).copysign(prod);
    if incoming.is_multiple_of(2) {
        -out
    } else {
        out
    }
}

/// Check-to-variable message from the other neighbours' messages.
pub fn check_update(incoming: &[f64], clamp: f64) -> f64 {
    let prod: f64 = incoming.iter().map(|&x| (x / 2.0).tanh()).product();
    check_from_product(prod, incoming.len(), clamp)
}

/// `L + sum(incoming)`, clamped.
pub fn variable_update_bp(llr: f64, incoming: &[f64], clamp: f64) -> f64 {
    incoming.iter().fold(llr, |acc, &x| acc + x).clamp(-clamp, clamp)
}

/// `L + sum(rho' * Lambda') - (1 - rho) * Lambda`, clamped. `incoming` holds
/// `(Lambda, rho)` pairs from the other checks, `excluded` the target check's.
pub fn variable_update_reweighted(llr: f64, incoming: &[(f64, f64)], excluded: (f64, f64), clamp: f64) -> f64 {
    let mut acc = incoming.iter().fold(llr, |acc, &(m, r)| acc + r * m);
    let (m, r) = excluded;
    if r != 1.0 {
        acc -= (1.0 - r) * m;
    }
    acc.clamp(-clamp, clamp)
}

/// `b_j = L_j + sum_i rho_i * Lambda_ij` over edges in check-major order.
pub fn compute_beliefs(h: &ParityCheckMatrix, llr: &[f64], c2v: &[f64], rho: &ReweightVector) -> Vec<f64> {
    let g = EdgeIndex::new(h);
    let mut b = vec![0.0; h.n()];
    g.beliefs(llr, c2v, rho.as_slice(), f64::INFINITY, &mut b);
    b
}

pub fn hard_decision(beliefs: &[f64]) -> Vec<u8> {
    beliefs.iter().map(|&b| u8::from(b > 0.0)).collect()
}

/// Checks on fewer girth-length cycles than average keep `rho = 1`; the rest
/// get `rho_v`.
pub fn assign_faps(h: &ParityCheckMatrix, census: &CycleCensus, rho_v: f64) -> Result<ReweightVector, DecodeError> {
    if census.m != h.m() {
        return Err(DecodeError::CensusMismatch { census: census.m, code: h.m() });
    }
    if !(rho_v > 0.0 && rho_v <= 1.0) {
        return Err(DecodeError::InvalidConfig(format!("rho_v = {rho_v} is outside (0, 1]")));
    }
    if census.is_acyclic() {
        return Ok(ReweightVector::ones(h.m()));
    }
    let rho = census.per_check.iter().map(|&s| if (s as f64) < census.mu_g { 1.0 } else { rho_v }).collect();
    ReweightVector::new(rho)
}

/// Edge bookkeeping shared by every frame.
#[derive(Debug, Clone)]
struct EdgeIndex {
    row_start: Vec<usize>,
    edge_var: Vec<usize>,
    edge_check: Vec<usize>,
    /// Edges of each variable, by increasing check index.
    var_edges: Vec<Vec<usize>>,
}

impl EdgeIndex {
    fn new(h: &ParityCheckMatrix) -> Self {
        let mut row_start = vec![0];
        let mut edge_var = Vec::with_capacity(h.num_edges());
        let mut edge_check = Vec::with_capacity(h.num_edges());
        let mut var_edges = vec![Vec::new(); h.n()];
        for (i, row) in h.rows().iter().enumerate() {
            for &j in row {
                var_edges[j].push(edge_var.len());
                edge_var.push(j);
                edge_check.push(i);
            }
            row_start.push(edge_var.len());
        }
        Self { row_start, edge_var, edge_check, var_edges }
    }

    fn beliefs(&self, llr: &[f64], c2v: &[f64], rho: &[f64], clamp: f64, out: &mut [f64]) {
        for (j, edges) in self.var_edges.iter().enumerate() {
            let b = edges.iter().fold(llr[j], |acc, &e| acc + rho[self.edge_check[e]] * c2v[e]);
            out[j] = b.clamp(-clamp, clamp);
        }
    }
}

/// A code, configuration and reweighting vector ready to decode frames.
#[derive(Debug, Clone)]
pub struct Decoder {
    h: ParityCheckMatrix,
    cfg: DecoderConfig,
    rho: ReweightVector,
    edges: EdgeIndex,
}

impl Decoder {
    pub fn new(h: &ParityCheckMatrix, cfg: DecoderConfig, rho: ReweightVector) -> Result<Self, DecodeError> {
        cfg.validate()?;
        if rho.len() != h.m() {
            return Err(DecodeError::LengthMismatch { expected: h.m(), got: rho.len() });
        }
        Ok(Self { edges: EdgeIndex::new(h), h: h.clone(), cfg, rho })
    }

    /// Builds the reweighting the configured variant calls for.
    pub fn for_variant(h: &ParityCheckMatrix, census: &CycleCensus, cfg: DecoderConfig) -> Result<Self, DecodeError> {
        let rho = cfg.reweighting(h, census)?;
        Self::new(h, cfg, rho)
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn rho(&self) -> &ReweightVector {
        &self.rho
    }

    pub fn code(&self) -> &ParityCheckMatrix {
        &self.h
    }

    /// Starts a frame from channel LLRs.
    pub fn engine(&self, llr: Vec<f64>) -> Result<DecoderEngine<'_>, DecodeError> {
        if llr.len() != self.h.n() {
            return Err(DecodeError::LengthMismatch { expected: self.h.n(), got: llr.len() });
        }
        if let Some(j) = llr.iter().position(|v| !v.is_finite()) {
            return Err(DecodeError::NonFiniteInput(j));
        }
        let e = self.edges.edge_var.len();
        let n = self.h.n();
        Ok(DecoderEngine {
            dec: self,
            llr,
            v2c: vec![0.0; e],
            c2v: vec![0.0; e],
            beliefs: vec![0.0; n],
            hard: vec![0; n],
            iteration: 0,
            converged: false,
            scratch: Vec::new(),
        })
    }

    pub fn decode(&self, y: &[f64], sigma2: f64) -> Result<DecodeResult, DecodeError> {
        if y.len() != self.h.n() {
            return Err(DecodeError::LengthMismatch { expected: self.h.n(), got: y.len() });
        }
        let llr = init_llr(y, sigma2, self.cfg.llr_clamp)?;
        self.decode_llr(llr)
    }

    pub fn decode_llr(&self, llr: Vec<f64>) -> Result<DecodeResult, DecodeError> {
        let mut eng = self.engine(llr)?;
        while eng.iteration < self.cfg.max_iterations && !eng.step() {}
        Ok(eng.into_result())
    }
}

/// Decodes one frame with `rho` as given.
pub fn decode(
    h: &ParityCheckMatrix,
    y: &[f64],
    sigma2: f64,
    cfg: &DecoderConfig,
    rho: &ReweightVector,
) -> Result<DecodeResult, DecodeError> {
    Decoder::new(h, cfg.clone(), rho.clone())?.decode(y, sigma2)
}

/// Message state of one frame, advanced one flooding iteration at a time.
#[derive(Debug, Clone)]
pub struct DecoderEngine<'a> {
    dec: &'a Decoder,
    llr: Vec<f64>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    beliefs: Vec<f64>,
    hard: Vec<u8>,
    iteration: usize,
    converged: bool,
    scratch: Vec<f64>,
}

impl DecoderEngine<'_> {
    /// Runs one iteration and reports whether the hard decision satisfies
    /// every check.
    pub fn step(&mut self) -> bool {
        let dec = self.dec;
        let g = &dec.edges;
        let clamp = dec.cfg.llr_clamp;
        let rho = dec.rho.as_slice();
        let reweighted = dec.cfg.variant != Variant::StandardBp;

        for (j, edges) in g.var_edges.iter().enumerate() {
            for &e in edges {
                let mut acc = self.llr[j];
                for &f in edges {
                    if f != e {
                        acc += if reweighted { rho[g.edge_check[f]] * self.c2v[f] } else { self.c2v[f] };
                    }
                }
                if reweighted {
                    let r = rho[g.edge_check[e]];
                    if r != 1.0 {
                        acc -= (1.0 - r) * self.c2v[e];
                    }
                }
                self.v2c[e] = acc.clamp(-clamp, clamp);
            }
        }

        for w in g.row_start.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            self.scratch.clear();
            self.scratch.extend(self.v2c[lo..hi].iter().map(|&x| (x / 2.0).tanh()));
            for e in lo..hi {
                let mut prod = 1.0;
                for (f, &t) in (lo..hi).zip(&self.scratch) {
                    if f != e {
                        prod *= t;
                    }
                }
                self.c2v[e] = check_from_product(prod, hi - lo - 1, clamp);
            }
        }

        if reweighted {
            g.beliefs(&self.llr, &self.c2v, rho, clamp, &mut self.beliefs);
        } else {
            for (j, edges) in g.var_edges.iter().enumerate() {
                let b = edges.iter().fold(self.llr[j], |acc, &e| acc + self.c2v[e]);
                self.beliefs[j] = b.clamp(-clamp, clamp);
            }
        }
        for (x, &b) in self.hard.iter_mut().zip(&self.beliefs) {
            *x = u8::from(b > 0.0);
        }
        self.iteration += 1;
        self.converged = dec.h.rows().iter().all(|row| row.iter().fold(0u8, |s, &j| s ^ self.hard[j]) == 0);
        self.converged
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn channel_llr(&self) -> &[f64] {
        &self.llr
    }

    pub fn beliefs(&self) -> &[f64] {
        &self.beliefs
    }

    pub fn hard_decision(&self) -> &[u8] {
        &self.hard
    }

    /// Variable-to-check messages in check-major edge order.
    pub fn v2c_messages(&self) -> &[f64] {
        &self.v2c
    }

    /// Check-to-variable messages in check-major edge order.
    pub fn c2v_messages(&self) -> &[f64] {
        &self.c2v
    }

    pub fn into_result(self) -> DecodeResult {
        DecodeResult {
            codeword: self.hard,
            converged: self.converged,
            iterations_used: self.iteration,
            final_beliefs: self.beliefs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{fixture_complete_bipartite, fixture_hamming_7_4};
    use crate::cycles::census;

    const C: f64 = DEFAULT_LLR_CLAMP;

    #[test]
    fn llr_initialization() {
        assert_eq!(init_llr(&[1.0, 0.0, 100.0], 0.5, C).unwrap(), vec![4.0, 0.0, 50.0]);
        assert_eq!(init_llr(&[100.0], 1.0, C).unwrap(), vec![50.0]);
        assert_eq!(init_llr(&[1.0], 0.0, C), Err(DecodeError::NonPositiveVariance(0.0)));
        assert_eq!(init_llr(&[f64::NAN], 1.0, C), Err(DecodeError::NonFiniteInput(0)));
    }

    #[test]
    fn check_rule() {
        assert_eq!(check_update(&[3.0, 0.0, -2.0], C), 0.0);
        // neighbours leaning 1 and 0 make the target lean 1
        let out = check_update(&[2.0, -1.0], C);
        let magnitude = 2.0 * (1.0f64.tanh() * 0.5f64.tanh()).atanh();
        assert!((out - magnitude).abs() < 1e-15);
        assert!((out - 0.735_325_664).abs() < 1e-6);
        // two neighbours leaning 0 make the target lean 0
        assert!(check_update(&[-2.0, -2.0], C) < 0.0);
        assert!(check_update(&[2.0, 2.0, 2.0], C) > 0.0);
        let sat = check_update(&[C; 5], C);
        assert!(sat > 28.0 && sat <= C);
        assert!(check_update(&[C; 4], C) < -28.0);
    }

    #[test]
    fn variable_rules() {
        assert_eq!(variable_update_bp(1.5, &[], C), 1.5);
        assert_eq!(variable_update_bp(1.0, &[2.0, -0.5], C), 2.5);
        assert_eq!(variable_update_reweighted(1.0, &[(2.0, 1.0), (-0.5, 1.0)], (7.0, 1.0), C), 2.5);
        assert_eq!(variable_update_reweighted(0.0, &[(2.0, 0.5)], (4.0, 0.5), C), -1.0);
        assert_eq!(variable_update_bp(40.0, &[40.0], C), C);
    }

    #[test]
    fn decisions() {
        assert_eq!(hard_decision(&[0.1, -0.1, 0.0, C]), vec![1, 0, 0, 1]);
    }

    #[test]
    fn beliefs_by_hand() {
        let h = fixture_complete_bipartite(2, 2);
        // edges: (0,0) (0,1) (1,0) (1,1)
        let rho = ReweightVector::new(vec![1.0, 0.5]).unwrap();
        let b = compute_beliefs(&h, &[1.0, -1.0], &[2.0, 3.0, 4.0, -6.0], &rho);
        assert_eq!(b, vec![1.0 + 2.0 + 2.0, -1.0 + 3.0 - 3.0]);
        assert_eq!(compute_beliefs(&h, &[1.0, -1.0], &[0.0; 4], &rho), vec![1.0, -1.0]);
    }

    #[test]
    fn fap_assignment() {
        let h = ParityCheckMatrix::from_rows(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap();
        let c = CycleCensus { girth: Some(8), cap: 16, total: 1, per_check: vec![0, 5, 5, 2], mu_g: 3.0, m: 4 };
        assert_eq!(assign_faps(&h, &c, 0.5).unwrap().as_slice(), &[1.0, 0.5, 0.5, 1.0]);
        let flat = CycleCensus { per_check: vec![3; 4], ..c.clone() };
        assert_eq!(assign_faps(&h, &flat, 0.5).unwrap().as_slice(), &[0.5; 4]);
        let wrong = CycleCensus { m: 3, per_check: vec![1; 3], ..c };
        assert_eq!(assign_faps(&h, &wrong, 0.5), Err(DecodeError::CensusMismatch { census: 3, code: 4 }));
        let tree = crate::construction::fixture_tree_code();
        let acyclic = census(&tree, 16).unwrap();
        assert_eq!(assign_faps(&tree, &acyclic, 0.5).unwrap(), ReweightVector::ones(3));
    }

    #[test]
    fn noiseless_frame_converges_at_once() {
        let h = fixture_hamming_7_4();
        let x = [1u8, 1, 1, 0, 0, 0, 0];
        assert!(h.is_codeword(&x));
        let y: Vec<f64> = x.iter().map(|&b| if b == 1 { 1.0 } else { -1.0 }).collect();
        let c = census(&h, 16).unwrap();
        for v in Variant::ALL {
            let d = Decoder::for_variant(&h, &c, DecoderConfig::new(v)).unwrap();
            let r = d.decode(&y, 0.1).unwrap();
            assert!(r.converged);
            assert_eq!(r.iterations_used, 1);
            assert_eq!(r.codeword, x);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = DecoderConfig::new(Variant::UrwBp);
        cfg.rho_uniform = Some(1.5);
        assert!(cfg.validate().is_err());
        assert!(DecoderConfig::new(Variant::StandardBp).with_max_iterations(0).validate().is_err());
        assert!("vfap_bp".parse::<Variant>().is_ok());
        assert!("min_sum".parse::<Variant>().is_err());
        assert!(ReweightVector::new(vec![0.0]).is_err());
    }

    #[test]
    fn default_rho_is_two_over_connectivity() {
        let h = crate::construction::peg_construct(&crate::construction::ConstructionSpec::regular(60, 30, 3, 4))
            .unwrap();
        let c = census(&h, 16).unwrap();
        let r = DecoderConfig::new(Variant::UrwBp).reweighting(&h, &c).unwrap();
        assert!(r.as_slice().iter().all(|&x| (x - 2.0 / 3.0).abs() < 1e-15));
    }
}
