use super::CrackSet;
use crate::geometry::Rect;
use serde::Serialize;

/// Lower semicontinuity diagnostic for `H^1(K ∩ U)` along a sequence.
#[derive(Debug, Clone, Serialize)]
pub struct GolabReport {
    /// `H^1(K_n ∩ U)` for each member of the sequence.
    pub lengths: Vec<f64>,
    /// Hausdorff distance of each member to the limit.
    pub distances: Vec<f64>,
    pub component_counts: Vec<usize>,
    /// Minimum over the supplied tail, the finite stand-in for the lim inf.
    pub liminf_estimate: f64,
    pub limit_length: f64,
    pub tolerance: f64,
    /// `H^1(K ∩ U) <= liminf + tolerance`.
    pub semicontinuous: bool,
}

/// `region = None` means the whole plane.
pub fn golab_report(
    sequence: &[CrackSet],
    limit: &CrackSet,
    region: Option<&Rect>,
    tolerance: f64,
) -> GolabReport {
    assert!(
        !sequence.is_empty(),
        "golab_report needs a nonempty sequence"
    );
    let measure = |k: &CrackSet| match region {
        Some(r) => k.length_in(r),
        None => k.length(),
    };
    let lengths: Vec<f64> = sequence.iter().map(measure).collect();
    let liminf_estimate = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let limit_length = measure(limit);
    GolabReport {
        distances: sequence.iter().map(|k| k.hausdorff(limit)).collect(),
        component_counts: sequence.iter().map(CrackSet::component_count).collect(),
        semicontinuous: limit_length <= liminf_estimate + tolerance,
        lengths,
        liminf_estimate,
        limit_length,
        tolerance,
    }
}
