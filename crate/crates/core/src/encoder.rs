//! Systematic encoding by GF(2) Gaussian elimination.

use thiserror::Error;

use crate::code::ParityCheckMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("parity-check matrix has rank {rank} < {m} rows")]
    RankDeficient { rank: usize, m: usize },
    #[error("message has {got} bits, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Maps `k = n - m` message bits onto codewords. Message bits sit at the
/// non-pivot columns of the reduced `H`; every pivot bit is the parity of
/// the message bits its reduced row touches.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    n: usize,
    info_cols: Vec<usize>,
    pivot_cols: Vec<usize>,
    /// For pivot row `r`, indices into the message of the bits it sums.
    parity_taps: Vec<Vec<usize>>,
}

impl SystematicEncoder {
    pub fn new(h: &ParityCheckMatrix) -> Result<Self, EncodeError> {
        let (m, n) = (h.m(), h.n());
        let words = n.div_ceil(64);
        let mut rows: Vec<Vec<u64>> = h
            .rows()
            .iter()
            .map(|r| {
                let mut w = vec![0u64; words];
                for &j in r {
                    w[j / 64] |= 1 << (j % 64);
                }
                w
            })
            .collect();
        let bit = |row: &[u64], j: usize| (row[j / 64] >> (j % 64)) & 1 == 1;

        let mut pivot_cols = Vec::with_capacity(m);
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&r| bit(&rows[r], col)) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && bit(row, col) {
                    row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
        if rank < m {
            return Err(EncodeError::RankDeficient { rank, m });
        }

        let mut is_pivot = vec![false; n];
        pivot_cols.iter().for_each(|&c| is_pivot[c] = true);
        let info_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let parity_taps = rows
            .iter()
            .map(|row| info_cols.iter().enumerate().filter(|&(_, &c)| bit(row, c)).map(|(k, _)| k).collect())
            .collect();
        Ok(Self { n, info_cols, pivot_cols, parity_taps })
    }

    pub fn k(&self) -> usize {
        self.info_cols.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Codeword positions that carry the message, in message order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_cols
    }

    pub fn encode(&self, msg: &[u8]) -> Result<Vec<u8>, EncodeError> {
        if msg.len() != self.k() {
            return Err(EncodeError::LengthMismatch { expected: self.k(), got: msg.len() });
        }
        let mut x = vec![0u8; self.n];
        for (&c, &b) in self.info_cols.iter().zip(msg) {
            x[c] = b & 1;
        }
        for (&c, taps) in self.pivot_cols.iter().zip(&self.parity_taps) {
            x[c] = taps.iter().fold(0, |acc, &k| acc ^ (msg[k] & 1));
        }
        Ok(x)
    }

    pub fn extract_message(&self, codeword: &[u8]) -> Vec<u8> {
        self.info_cols.iter().map(|&c| codeword[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{fixture_hamming_7_4, peg_construct, ConstructionSpec};
    use std::collections::BTreeSet;

    #[test]
    fn hamming_codebook_matches_null_space() {
        let h = fixture_hamming_7_4();
        let enc = SystematicEncoder::new(&h).unwrap();
        assert_eq!(enc.k(), 4);
        let encoded: BTreeSet<Vec<u8>> = (0..16u8)
            .map(|v| enc.encode(&(0..4).map(|i| (v >> i) & 1).collect::<Vec<_>>()).unwrap())
            .collect();
        let null_space: BTreeSet<Vec<u8>> = (0..128u8)
            .map(|v| (0..7).map(|i| (v >> i) & 1).collect::<Vec<u8>>())
            .filter(|x| h.is_codeword(x))
            .collect();
        assert_eq!(encoded.len(), 16);
        assert_eq!(encoded, null_space);
    }

    #[test]
    fn zero_message_and_recovery() {
        let h = fixture_hamming_7_4();
        let enc = SystematicEncoder::new(&h).unwrap();
        assert_eq!(enc.encode(&[0; 4]).unwrap(), vec![0; 7]);
        let msg = [1, 0, 1, 1];
        assert_eq!(enc.extract_message(&enc.encode(&msg).unwrap()), msg);
        assert!(enc.encode(&[1; 3]).is_err());
    }

    #[test]
    fn rank_deficient() {
        let h = ParityCheckMatrix::from_dense(&[[1u8, 1, 0], [1, 1, 0], [0, 1, 1]]).unwrap();
        assert_eq!(SystematicEncoder::new(&h).unwrap_err(), EncodeError::RankDeficient { rank: 2, m: 3 });
    }

    #[test]
    fn peg_codewords_satisfy_checks() {
        let h = peg_construct(&ConstructionSpec::regular(96, 48, 3, 2)).unwrap();
        let enc = SystematicEncoder::new(&h).unwrap();
        assert_eq!(enc.k(), 48);
        let msg: Vec<u8> = (0..enc.k()).map(|i| (i * 7 % 3 == 0) as u8).collect();
        assert!(h.is_codeword(&enc.encode(&msg).unwrap()));
    }
}
