use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, ONE};

/// What to do with branches whose blocks would run past the observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OffsetPolicy {
    /// Reject books with any out-of-range block.
    #[default]
    Strict,
    /// Reduce offsets modulo `M - q + 1`, so late branches wrap to the start
    /// of the observation.
    Wrap,
}

/// Pre-stored position matrices, encoded as the start row of each
/// identity block: `z[c][d] = ⌊M/D⌋ d + c q` (zero-based `c`, `d`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionBook {
    m: usize,
    rank: usize,
    q: usize,
    offsets: Vec<Vec<usize>>,
}

impl PositionBook {
    pub fn new(m: usize, rank: usize, q: usize, branches: usize) -> Result<Self> {
        Self::with_policy(m, rank, q, branches, OffsetPolicy::Strict)
    }

    /// Largest branch count whose blocks all fit, or 0 if none do.
    pub fn max_branches(m: usize, rank: usize, q: usize) -> usize {
        if rank == 0 || q == 0 {
            return 0;
        }
        let last = (m / rank) * (rank - 1) + q;
        if last > m {
            0
        } else {
            (m - last) / q + 1
        }
    }

    pub fn with_policy(m: usize, rank: usize, q: usize, branches: usize, policy: OffsetPolicy) -> Result<Self> {
        if m == 0 || rank == 0 || q == 0 || branches == 0 {
            return Err(Error::config(format!(
                "position book needs positive M, D, q, C (got {m}, {rank}, {q}, {branches})"
            )));
        }
        if q > m {
            return Err(Error::config(format!("block length q = {q} exceeds M = {m}")));
        }
        let max_c = Self::max_branches(m, rank, q);
        if policy == OffsetPolicy::Strict && branches > max_c {
            return Err(Error::InfeasibleBook {
                m,
                d: rank,
                q,
                c: branches,
                max_c,
            });
        }
        let span = m - q + 1;
        let offsets = (0..branches)
            .map(|c| {
                (0..rank)
                    .map(|d| {
                        let z = (m / rank) * d + c * q;
                        match policy {
                            OffsetPolicy::Strict => z,
                            OffsetPolicy::Wrap => z % span,
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(PositionBook { m, rank, q, offsets })
    }

    /// A book from explicit offsets, `offsets[c][d]`.
    pub fn from_offsets(m: usize, q: usize, offsets: Vec<Vec<usize>>) -> Result<Self> {
        let rank = offsets.first().map_or(0, Vec::len);
        if m == 0 || q == 0 || q > m || rank == 0 || offsets.iter().any(|row| row.len() != rank) {
            return Err(Error::config(
                "offset table must be a nonempty C × D array with 1 ≤ q ≤ M",
            ));
        }
        if let Some(&z) = offsets.iter().flatten().find(|&&z| z + q > m) {
            return Err(Error::config(format!(
                "block at offset {z} of length {q} exceeds M = {m}"
            )));
        }
        Ok(PositionBook { m, rank, q, offsets })
    }

    /// The single-branch book with `q = M` and every block at the origin,
    /// i.e. `P = I`: the projection is unconstrained.
    pub fn dense(m: usize, rank: usize) -> Result<Self> {
        if m == 0 || rank == 0 {
            return Err(Error::config("dense book needs M ≥ 1 and D ≥ 1"));
        }
        Ok(PositionBook {
            m,
            rank,
            q: m,
            offsets: vec![vec![0; rank]],
        })
    }

    pub fn observation_len(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn block_len(&self) -> usize {
        self.q
    }

    pub fn branches(&self) -> usize {
        self.offsets.len()
    }

    pub fn psi_len(&self) -> usize {
        self.q * self.rank
    }

    /// Zero-based branch `c`, basis `d`.
    pub fn offset(&self, c: usize, d: usize) -> usize {
        self.offsets[c][d]
    }

    pub fn offsets(&self) -> &[Vec<usize>] {
        &self.offsets
    }

    /// The explicit `MD × qD` position matrix of branch `c`.
    pub fn position_matrix(&self, c: usize) -> CMat {
        let mut p = CMat::zeros(self.m * self.rank, self.psi_len());
        for d in 0..self.rank {
            let z = self.offsets[c][d];
            for j in 0..self.q {
                p[(d * self.m + z + j, d * self.q + j)] = ONE;
            }
        }
        p
    }
}
