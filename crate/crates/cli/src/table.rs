use loopforms::pathfibration::coefficient_identity;

use crate::{CliError, Result};

/// The transgression coefficient identity for k = 1..=k_max as csv rows `k,lhs,rhs,equal`,
/// with both sides as exact reduced fractions.
pub fn coefficient_table(k_max: usize) -> Result<String> {
    if k_max < 1 {
        return Err(CliError::Config(format!("kmax must be at least 1, got {k_max}")));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["k", "lhs", "rhs", "equal"])?;
    for k in 1..=k_max {
        let row = coefficient_identity(k)?;
        writer.write_record([k.to_string(), row.lhs.to_string(), row.rhs.to_string(), row.equal.to_string()])?;
    }
    let bytes = writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of ascii fields"))
}
