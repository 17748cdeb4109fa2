//! Shared fixtures for the integration and acceptance suites.

use raga_core::notes::{parse_scale_specs, ScaleSpec};

/// Eight well-known ragas with pairwise-distinct swara sets, used for
/// desk-scale experiments.
pub const DESK_SCALES: &str = "\
mohanam,S R2 G3 P D2 S';S' D2 P G3 R2 S
hamsadhwani,S R2 G3 P N3 S';S' N3 P G3 R2 S
mayamalavagowla,S R1 G3 M1 P D1 N3 S';S' N3 D1 P M1 G3 R1 S
sankarabharanam,S R2 G3 M1 P D2 N3 S';S' N3 D2 P M1 G3 R2 S
kharaharapriya,S R2 G2 M1 P D2 N2 S';S' N2 D2 P M1 G2 R2 S
kalyani,S R2 G3 M2 P D2 N3 S';S' N3 D2 P M2 G3 R2 S
hindolam,S G2 M1 D1 N2 S';S' N2 D1 M1 G2 S
shuddha_saveri,S R2 M1 P D2 S';S' D2 P M1 R2 S
";

pub fn desk_scales() -> Vec<ScaleSpec> {
    parse_scale_specs(DESK_SCALES).expect("fixture scales are valid")
}

/// Male and female shruti stand-ins: C3 and C4.
pub const DESK_SHRUTIS: [f64; 2] = [130.81, 261.63];
