use crate::error::{Error, Result};

/// Complex additions and multiplications per processed bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct OpCounts {
    pub adds: u64,
    pub mults: u64,
}

/// All tags accepted by [`complexity_counts`].
pub const COMPLEXITY_TAGS: [&str; 9] = [
    "full-lms",
    "full-rls",
    "mswf-lms",
    "mswf-rls",
    "avf",
    "saabf-lms",
    "saabf-rls",
    "generic-lms",
    "generic-rls",
];

/// Closed-form operation counts. `generic-*` is counted as the single-branch
/// SAABF with `q = M`, per joint iteration.
pub fn complexity_counts(tag: &str, m: usize, d: usize, q: usize, c: usize) -> Result<OpCounts> {
    if m == 0 || d == 0 || q == 0 || c == 0 {
        return Err(Error::config("complexity parameters must be positive"));
    }
    let (m, d, q, c) = (m as u64, d as u64, q as u64, c as u64);
    let (adds, mults) = match tag {
        "full-lms" => (2 * m, 2 * m + 1),
        "full-rls" => (3 * m * m + m, 4 * (m * m + m)),
        "mswf-lms" => (d * m * m + (d + 2) * m, (d + 1) * m * m + (3 * d + 2) * m + 2 * d + 1),
        "mswf-rls" => (
            d * m * m + (d + 2) * m + 3 * d * d - d,
            (d + 1) * m * m + (3 * d + 2) * m + 4 * (d * d + d),
        ),
        "avf" => ((3 * d + 1) * m * m + m - 2 * d - 1, (5 * d + 2) * m * m + (d + 1) * m),
        "saabf-lms" => (q * d * (c + 1) - c * d + c + d, d * m + 2 * d * q * (c + 1) + d + 2),
        "saabf-rls" => (
            4 * (q * d).pow(2) + c * d * (q - 1) + 3 * d * d + c + d,
            d * m + 5 * (q * d).pow(2) + 2 * c * d * q + 4 * d * d + 3 * d * q + 3 * d,
        ),
        "generic-lms" => return complexity_counts("saabf-lms", m as usize, d as usize, m as usize, 1),
        "generic-rls" => return complexity_counts("saabf-rls", m as usize, d as usize, m as usize, 1),
        other => return Err(Error::UnknownAlgorithm(other.to_string())),
    };
    Ok(OpCounts { adds, mults })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(
            complexity_counts("full-lms", 112, 1, 1, 1).unwrap(),
            OpCounts { adds: 224, mults: 225 }
        );
        assert_eq!(complexity_counts("saabf-lms", 112, 3, 3, 5).unwrap().mults, 449);
        assert_eq!(complexity_counts("saabf-rls", 112, 1, 1, 1).unwrap().adds, 9);
        assert_eq!(
            complexity_counts("generic-rls", 28, 3, 1, 1).unwrap(),
            complexity_counts("saabf-rls", 28, 3, 28, 1).unwrap()
        );
        assert!(matches!(
            complexity_counts("lms", 4, 1, 1, 1),
            Err(Error::UnknownAlgorithm(_))
        ));
        assert!(complexity_counts("full-lms", 0, 1, 1, 1).is_err());
    }

    #[test]
    fn avf_stays_nonnegative() {
        // M²(3D+1) dominates 2D+1 for every positive M, D.
        for d in 1..50 {
            assert!(complexity_counts("avf", 1, d, 1, 1).is_ok());
        }
    }
}
