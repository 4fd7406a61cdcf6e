use super::{BpInstance, InstanceError};
use crate::kernels::{norm1, ThinQr};

/// Result of the exact recovery condition test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErcReport {
    pub holds: bool,
    /// `max_{i∉S} ‖A_S⁺ a_i‖₁`; zero when every column is in the support.
    pub value: f64,
}

/// Exact recovery condition for the support of the planted solution.
pub fn check_erc(inst: &BpInstance) -> Result<ErcReport, InstanceError> {
    let support = inst
        .planted_support()
        .ok_or(InstanceError::NoPlantedSolution)?;
    let n = inst.cols();
    if support.is_empty() {
        return Ok(ErcReport {
            holds: true,
            value: 0.0,
        });
    }
    let a_s = inst.matrix.select_columns(&support);
    let qr = ThinQr::new(&a_s).map_err(|_| InstanceError::RankDeficientSupport)?;
    let mut in_support = vec![false; n];
    support.iter().for_each(|&i| in_support[i] = true);
    let off: Vec<usize> = (0..n).filter(|&i| !in_support[i]).collect();
    let cols = inst.matrix.select_columns(&off);
    let value = (0..off.len())
        .map(|k| norm1(&qr.least_squares(cols.column(k))))
        .fold(0.0, f64::max);
    Ok(ErcReport {
        holds: value < 1.0,
        value,
    })
}
