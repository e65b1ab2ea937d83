//! Plain-text degree distribution files.
//!
//! ```text
//! # free-form comments
//! max_degree 50
//! checksum 3f1c0a9d2b7e4410
//! 1 0.0098
//! 2 0.4949
//! ```
//!
//! The checksum is the first 8 bytes (hex) of SHA-256 over the canonical
//! body: one `"{degree} {probability}\n"` line per entry in increasing
//! degree order, probabilities printed with Rust's shortest round-trip
//! formatting. The parser rejects files whose mass is outside `1 ± 1e-9`.

use sha2::{Digest, Sha256};

use super::{CodecError, DegreeDistribution};

/// Accepted deviation of a parsed file's total mass from one.
pub const FILE_MASS_TOLERANCE: f64 = 1e-9;

/// Checksum over `(degree, probability)` entries sorted by degree.
pub fn checksum(entries: &[(usize, f64)]) -> String {
    let mut hasher = Sha256::new();
    for (d, p) in entries {
        hasher.update(format!("{d} {p}\n").as_bytes());
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Renders a distribution in the text format.
pub fn write_distribution(dist: &DegreeDistribution) -> String {
    let entries: Vec<_> = dist.support().collect();
    let mut out = String::new();
    out.push_str("# degree distribution\n");
    out.push_str(&format!("max_degree {}\n", dist.max_degree()));
    out.push_str(&format!("checksum {}\n", checksum(&entries)));
    for (d, p) in &entries {
        out.push_str(&format!("{d} {p}\n"));
    }
    out
}

/// Parses the text format.
pub fn parse_distribution(text: &str) -> Result<DegreeDistribution, CodecError> {
    let mut max_degree = None;
    let mut declared_sum = None;
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| CodecError::Format { line: lineno + 1, message: msg.to_string() };
        let mut fields = line.split_whitespace();
        let (Some(key), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected exactly two fields"));
        };
        match key {
            "max_degree" => {
                if max_degree.is_some() {
                    return Err(bad("duplicate max_degree"));
                }
                let d: usize = value.parse().map_err(|_| bad("max_degree is not an integer"))?;
                if d == 0 {
                    return Err(bad("max_degree must be positive"));
                }
                max_degree = Some(d);
            }
            "checksum" => {
                if declared_sum.is_some() {
                    return Err(bad("duplicate checksum"));
                }
                declared_sum = Some(value.to_ascii_lowercase());
            }
            _ => {
                let d: usize = key.parse().map_err(|_| bad("degree is not an integer"))?;
                let p: f64 = value.parse().map_err(|_| bad("probability is not a number"))?;
                if !p.is_finite() || p < 0.0 {
                    return Err(bad("probability must be finite and non-negative"));
                }
                if entries.iter().any(|&(seen, _)| seen == d) {
                    return Err(bad("duplicate degree"));
                }
                entries.push((d, p));
            }
        }
    }
    let max_degree = max_degree.ok_or(CodecError::MissingHeader("max_degree"))?;
    let declared_sum = declared_sum.ok_or(CodecError::MissingHeader("checksum"))?;
    if let Some(&(d, _)) = entries.iter().find(|&&(d, _)| d == 0 || d > max_degree) {
        return Err(CodecError::InvalidDistribution(format!(
            "degree {d} outside 1..={max_degree}"
        )));
    }
    entries.sort_by_key(|&(d, _)| d);
    let actual = checksum(&entries);
    if actual != declared_sum {
        return Err(CodecError::ChecksumMismatch { declared: declared_sum, actual });
    }
    let mass: f64 = entries.iter().map(|(_, p)| p).sum();
    if (mass - 1.0).abs() > FILE_MASS_TOLERANCE {
        return Err(CodecError::InvalidDistribution(format!(
            "probabilities sum to {mass}, outside 1 ± {FILE_MASS_TOLERANCE}"
        )));
    }
    DegreeDistribution::normalized(max_degree, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::presets;

    #[test]
    fn round_trips_a_preset() {
        let dist = presets::fcc_table(2).unwrap();
        let text = write_distribution(&dist);
        let back = parse_distribution(&text).unwrap();
        assert!(back.tv_distance(&dist) < 1e-15);
    }

    #[test]
    fn rejects_tampered_checksum() {
        let dist = presets::partial_recovery_example();
        let text = write_distribution(&dist).replace("2 0.55", "2 0.56");
        assert!(matches!(parse_distribution(&text), Err(CodecError::ChecksumMismatch { .. })));
    }

    #[test]
    fn rejects_mass_outside_tolerance() {
        let entries = [(1, 0.5), (2, 0.5 + 2e-9)];
        let text = format!("max_degree 2\nchecksum {}\n1 0.5\n2 {}\n", checksum(&entries), 0.5 + 2e-9);
        assert!(matches!(parse_distribution(&text), Err(CodecError::InvalidDistribution(_))));
    }

    #[test]
    fn rejects_structural_errors() {
        for text in [
            "",
            "max_degree 2\n1 1.0\n",
            "checksum 00\n1 1.0\n",
            "max_degree x\n",
            "max_degree 2\nmax_degree 2\n",
            "max_degree 2 3\n",
            "max_degree 2\nchecksum 0\n1 nan\n",
        ] {
            assert!(parse_distribution(text).is_err(), "{text:?}");
        }
    }
}
