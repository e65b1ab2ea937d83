//! Published degree distributions shipped with the crate.
//!
//! Table entries are printed to four digits and do not sum to exactly one,
//! so every preset is renormalised on construction.

use super::{CodecError, DegreeDistribution};

/// Jointly optimised fully-coded-cooperation designs for `M = 1..=4`
/// users at `k = 10000`, `δ = 0.01`.
pub fn fcc_table(users: usize) -> Result<DegreeDistribution, CodecError> {
    let pairs: &[(usize, f64)] = match users {
        1 => &[
            (1, 0.0098),
            (2, 0.4949),
            (3, 0.1597),
            (4, 0.1095),
            (6, 0.0437),
            (7, 0.0774),
            (14, 0.0026),
            (15, 0.0661),
            (50, 0.0358),
        ],
        2 => &[
            (1, 0.0067),
            (2, 0.4749),
            (3, 0.1543),
            (4, 0.0884),
            (5, 0.0550),
            (8, 0.0966),
            (20, 0.0466),
            (21, 0.0184),
            (50, 0.0586),
        ],
        3 => &[(1, 0.0050), (2, 0.4446), (3, 0.1050), (4, 0.1691), (11, 0.1753), (50, 0.1007)],
        4 => &[(1, 0.0061), (2, 0.4243), (3, 0.1843), (4, 0.0714), (9, 0.2249), (50, 0.0887)],
        _ => return Err(CodecError::UnknownPreset(format!("fcc table has no column M={users}"))),
    };
    DegreeDistribution::normalized(50, pairs.iter().copied())
}

/// Average degrees printed alongside [`fcc_table`].
pub fn fcc_table_mean(users: usize) -> Option<f64> {
    [5.5442, 7.0752, 8.8531, 8.15].get(users.checked_sub(1)?).copied()
}

/// Partially-coded-cooperation designs for `M = 2..=4` and `N/k` of 0.1 or
/// 0.05, `k = 10000`.
pub fn pcc_table(users: usize, n_over_k: f64) -> Result<DegreeDistribution, CodecError> {
    let tenth = (n_over_k - 0.1).abs() < 1e-9;
    let twentieth = (n_over_k - 0.05).abs() < 1e-9;
    let column: [f64; 9] = match (users, tenth, twentieth) {
        (2, true, _) => [0.0069, 0.4898, 0.1656, 0.0883, 0.0, 0.1169, 0.0666, 0.0207, 0.0447],
        (2, _, true) => [0.0069, 0.4889, 0.1691, 0.0743, 0.0224, 0.1050, 0.0693, 0.0187, 0.0451],
        (3, true, _) => [0.0057, 0.4907, 0.1660, 0.0883, 0.0, 0.1172, 0.0659, 0.0214, 0.0446],
        (3, _, true) => [0.0057, 0.4899, 0.1686, 0.0769, 0.0182, 0.1077, 0.0666, 0.0210, 0.0448],
        (4, true, _) => [0.0049, 0.4913, 0.1661, 0.0883, 0.0, 0.1173, 0.0653, 0.0220, 0.0445],
        (4, _, true) => [0.0049, 0.4905, 0.1680, 0.0799, 0.0135, 0.1106, 0.0644, 0.0230, 0.0448],
        _ => {
            return Err(CodecError::UnknownPreset(format!(
                "pcc table has no column M={users}, N/k={n_over_k}"
            )))
        }
    };
    const DEGREES: [usize; 9] = [1, 2, 3, 4, 5, 6, 13, 14, 50];
    DegreeDistribution::normalized(50, DEGREES.into_iter().zip(column))
}

/// Average degrees printed alongside [`pcc_table`] for `N/k = 0.1`.
pub fn pcc_table_mean(users: usize) -> Option<f64> {
    match users {
        2 => Some(5.93),
        3 | 4 => Some(5.92),
        _ => None,
    }
}

/// The small hand-picked law used to illustrate partial recovery:
/// `0.05x + 0.55x² + 0.25x⁴ + 0.05x⁶ + 0.1x⁸`.
pub fn partial_recovery_example() -> DegreeDistribution {
    DegreeDistribution::from_pairs(8, [(1, 0.05), (2, 0.55), (4, 0.25), (6, 0.05), (8, 0.1)])
        .expect("static distribution is valid")
}

/// Shokrollahi's point-to-point Raptor output distribution (k = 65536).
pub fn raptor_point_to_point() -> DegreeDistribution {
    DegreeDistribution::normalized(
        66,
        [
            (1, 0.007969),
            (2, 0.493570),
            (3, 0.166220),
            (4, 0.072646),
            (5, 0.082558),
            (8, 0.056058),
            (9, 0.037229),
            (19, 0.055590),
            (65, 0.025023),
            (66, 0.003135),
        ],
    )
    .expect("static distribution is valid")
}

/// Resolves a preset by name. Names: `fcc-m1`..`fcc-m4`, `pcc-m2`..`pcc-m4`
/// (N/k = 0.1), `pcc-m2-n05`..`pcc-m4-n05` (N/k = 0.05), `partial-example`,
/// `raptor-p2p`.
pub fn by_name(name: &str) -> Result<DegreeDistribution, CodecError> {
    let unknown = || CodecError::UnknownPreset(name.to_string());
    match name {
        "partial-example" => Ok(partial_recovery_example()),
        "raptor-p2p" => Ok(raptor_point_to_point()),
        _ => {
            if let Some(m) = name.strip_prefix("fcc-m") {
                let m: usize = m.parse().map_err(|_| unknown())?;
                return fcc_table(m);
            }
            if let Some(rest) = name.strip_prefix("pcc-m") {
                let (m, ratio) = match rest.split_once("-n05") {
                    Some((m, "")) => (m, 0.05),
                    _ => (rest, 0.1),
                };
                let m: usize = m.parse().map_err(|_| unknown())?;
                return pcc_table(m, ratio);
            }
            Err(unknown())
        }
    }
}

/// Every name accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "fcc-m1",
    "fcc-m2",
    "fcc-m3",
    "fcc-m4",
    "pcc-m2",
    "pcc-m3",
    "pcc-m4",
    "pcc-m2-n05",
    "pcc-m3-n05",
    "pcc-m4-n05",
    "partial-example",
    "raptor-p2p",
];
