use serde::{Deserialize, Serialize};

use super::{smith_normal_form, IntLinAlgError, IntMatrix};
use crate::abelian::AbGroup;

/// Finite chain complex of free abelian groups `C_top -> … -> C_0`.
///
/// `differentials[p - 1]` is `d_p : C_p -> C_{p-1}`, a `ranks[p-1] x ranks[p]`
/// matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplexZ {
    pub ranks: Vec<usize>,
    pub differentials: Vec<IntMatrix>,
}

impl ChainComplexZ {
    pub fn new(ranks: Vec<usize>, differentials: Vec<IntMatrix>) -> Self {
        ChainComplexZ {
            ranks,
            differentials,
        }
    }

    /// All differentials zero.
    pub fn zero(ranks: Vec<usize>) -> Self {
        let differentials = ranks
            .windows(2)
            .map(|w| IntMatrix::zeros(w[0], w[1]))
            .collect();
        ChainComplexZ {
            ranks,
            differentials,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(p, &r)| if p % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }
}

/// Check shapes and `d_{p-1} d_p = 0`; reports the first failing `p`.
pub fn validate_complex(c: &ChainComplexZ) -> Result<(), IntLinAlgError> {
    if c.ranks.len() != c.differentials.len() + 1 && !(c.ranks.is_empty() && c.differentials.is_empty()) {
        return Err(IntLinAlgError::DifferentialCount {
            ranks: c.ranks.len(),
            differentials: c.differentials.len(),
        });
    }
    for (k, d) in c.differentials.iter().enumerate() {
        let p = k + 1;
        if d.rows() != c.ranks[p - 1] || d.cols() != c.ranks[p] {
            return Err(IntLinAlgError::DifferentialShape {
                p,
                expected: (c.ranks[p - 1], c.ranks[p]),
                found: (d.rows(), d.cols()),
            });
        }
    }
    for k in 1..c.differentials.len() {
        let prod = c.differentials[k - 1].checked_mul(&c.differentials[k])?;
        if !prod.is_zero() {
            return Err(IntLinAlgError::NonzeroComposition { p: k + 1 });
        }
    }
    Ok(())
}

/// `H_p = ker d_p / im d_{p+1}` for every `p`.
pub fn homology(c: &ChainComplexZ) -> Result<Vec<AbGroup>, IntLinAlgError> {
    validate_complex(c)?;
    let smiths: Vec<_> = c.differentials.iter().map(smith_normal_form).collect();
    let rank_of = |p: usize| -> usize {
        if p == 0 || p > smiths.len() {
            0
        } else {
            smiths[p - 1].rank()
        }
    };
    (0..c.ranks.len())
        .map(|p| {
            let cycles = c.ranks[p] - rank_of(p);
            let diag: Vec<_> = if p < smiths.len() {
                smiths[p]
                    .diagonal()
                    .into_iter()
                    .filter(|x| *x != num_bigint::BigInt::from(0))
                    .collect()
            } else {
                Vec::new()
            };
            Ok(AbGroup::from_diagonal(&diag, cycles)?)
        })
        .collect()
}
