//! Binary LDPC codes: alist I/O, progressive-edge-growth construction,
//! systematic encoding and normalized min-sum decoding.

mod decode;
mod peg;

use std::fmt::Write as _;
use std::sync::OnceLock;

pub use decode::{ldpc_decode, SoftDecoderOutput, LLR_CLIP, MIN_SUM_SCALE};
pub use peg::{peg_regular, standard_code_from_seed, STANDARD_SEED};

use super::gf2::{pack_bits, BitMatrix};
use crate::error::{config_err, Error, Result};

/// Sparse parity-check matrix plus a systematic encoder derived from it.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    /// Column indices per check row.
    check_adj: Vec<Vec<usize>>,
    /// Row indices per variable column.
    var_adj: Vec<Vec<usize>>,
    info_positions: Vec<usize>,
    /// RREF of H; row r determines the bit at `pivots[r]`.
    reduced: BitMatrix,
    pivots: Vec<usize>,
}

impl LdpcCode {
    /// Builds a code from per-check column lists.
    pub fn from_checks(n: usize, check_adj: Vec<Vec<usize>>) -> Result<Self> {
        let m = check_adj.len();
        let mut var_adj = vec![Vec::new(); n];
        let mut h = BitMatrix::zeros(m, n);
        for (r, cols) in check_adj.iter().enumerate() {
            for &c in cols {
                if c >= n {
                    return config_err(format!("check {r} references column {c} >= {n}"));
                }
                if h.get(r, c) {
                    return config_err(format!("duplicate entry ({r}, {c})"));
                }
                h.set(r, c, true);
                var_adj[c].push(r);
            }
        }
        // search pivots from the right so codes stored with parity columns
        // last keep their information bits in front
        let order: Vec<usize> = (0..n).rev().collect();
        let mut reduced = h;
        let pivots = reduced.rref_in_order(&order);
        if pivots.len() < m {
            log::debug!("parity-check matrix has rank {} < {m}", pivots.len());
        }
        let mut is_pivot = vec![false; n];
        pivots.iter().for_each(|&p| is_pivot[p] = true);
        let info_positions = (0..n).filter(|&c| !is_pivot[c]).collect();
        Ok(LdpcCode {
            n,
            check_adj,
            var_adj,
            info_positions,
            reduced,
            pivots,
        })
    }

    /// The shipped rate-1/2, n = 256 regular (3,6) code.
    pub fn standard() -> &'static LdpcCode {
        static CODE: OnceLock<LdpcCode> = OnceLock::new();
        CODE.get_or_init(|| LdpcCode::from_alist(STANDARD_ALIST).expect("shipped alist parses"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of information bits.
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    /// Number of parity checks (rows of H).
    pub fn checks(&self) -> usize {
        self.check_adj.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn check_adjacency(&self) -> &[Vec<usize>] {
        &self.check_adj
    }

    pub fn var_adjacency(&self) -> &[Vec<usize>] {
        &self.var_adj
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn edge_count(&self) -> usize {
        self.check_adj.iter().map(Vec::len).sum()
    }

    /// Per-check parity of `word`.
    pub fn syndrome(&self, word: &[u8]) -> Vec<u8> {
        self.check_adj
            .iter()
            .map(|cols| cols.iter().fold(0u8, |acc, &c| acc ^ (word[c] & 1)))
            .collect()
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n && self.syndrome(word).iter().all(|&s| s == 0)
    }

    pub fn extract_info(&self, word: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| word[p]).collect()
    }

    /// Parses the alist sparse-matrix format (1-based indices, zero padding
    /// allowed).
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut nums = text.split_whitespace().map(|t| {
            t.parse::<usize>()
                .map_err(|e| Error::Parse(format!("alist token {t:?}: {e}")))
        });
        let mut next = || -> Result<usize> {
            nums.next()
                .unwrap_or_else(|| Err(Error::Parse("alist ended early".into())))
        };
        let n = next()?;
        let m = next()?;
        let max_col = next()?;
        let max_row = next()?;
        let col_deg: Vec<usize> = (0..n).map(|_| next()).collect::<Result<_>>()?;
        let row_deg: Vec<usize> = (0..m).map(|_| next()).collect::<Result<_>>()?;
        // column lists are redundant with the row lists; read and cross-check
        let mut col_entries = Vec::with_capacity(n);
        for &d in &col_deg {
            let mut rows = Vec::new();
            for slot in 0..max_col {
                let v = next()?;
                if slot < d {
                    rows.push(v);
                }
            }
            col_entries.push(rows);
        }
        let mut check_adj = Vec::with_capacity(m);
        for &d in &row_deg {
            let mut cols = Vec::new();
            for slot in 0..max_row {
                let v = next()?;
                if slot < d {
                    if v == 0 {
                        return Err(Error::Parse("zero index in alist row list".into()));
                    }
                    cols.push(v - 1);
                }
            }
            check_adj.push(cols);
        }
        let code = Self::from_checks(n, check_adj)?;
        for (c, rows) in col_entries.iter().enumerate() {
            let mut want: Vec<usize> = rows.iter().map(|r| r.wrapping_sub(1)).collect();
            let mut have = code.var_adj[c].clone();
            want.sort_unstable();
            have.sort_unstable();
            if want != have {
                return Err(Error::Parse(format!("alist column {c} disagrees with row lists")));
            }
        }
        Ok(code)
    }

    pub fn to_alist(&self) -> String {
        let m = self.checks();
        let max_col = self.var_adj.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.check_adj.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = String::new();
        let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{} {m}", self.n);
        let _ = writeln!(s, "{max_col} {max_row}");
        let _ = writeln!(s, "{}", join(&mut self.var_adj.iter().map(Vec::len)));
        let _ = writeln!(s, "{}", join(&mut self.check_adj.iter().map(Vec::len)));
        for rows in &self.var_adj {
            let mut r: Vec<usize> = rows.iter().map(|x| x + 1).collect();
            r.sort_unstable();
            r.resize(max_col, 0);
            let _ = writeln!(s, "{}", join(&mut r.into_iter()));
        }
        for cols in &self.check_adj {
            let mut c: Vec<usize> = cols.iter().map(|x| x + 1).collect();
            c.sort_unstable();
            c.resize(max_row, 0);
            let _ = writeln!(s, "{}", join(&mut c.into_iter()));
        }
        s
    }
}

const STANDARD_ALIST: &str = include_str!("../../../data/ldpc_n256_r05.alist");

/// Systematic encoding: information bits land on [`LdpcCode::info_positions`].
pub fn ldpc_encode(info_bits: &[u8], code: &LdpcCode) -> Result<Vec<u8>> {
    if info_bits.len() != code.k() {
        return config_err(format!(
            "LDPC encoder expects {} information bits, got {}",
            code.k(),
            info_bits.len()
        ));
    }
    let mut word = vec![0u8; code.n];
    for (&p, &b) in code.info_positions.iter().zip(info_bits) {
        word[p] = b & 1;
    }
    let parity = code.reduced.mul_packed(&pack_bits(&word));
    for (r, &p) in code.pivots.iter().enumerate() {
        word[p] = parity[r];
    }
    Ok(word)
}
