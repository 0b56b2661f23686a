//! End-to-end experiments on the two systems: agreement of the finite-stage
//! `Inv⁰` data, the compatible splitting for `A`, and the quantitative
//! obstruction to one for `B`.

mod inv0;
mod obstruction;
mod splitting;

pub use inv0::{inv0_equivalence_report, Inv0Report, Inv0Step};
pub use obstruction::{
    admissible_stage, candidate_phases, corner_quotient_map, obstruction_experiment, project_row, InequalityRecord,
    ObstructionLedger, ObstructionRunner,
};
pub use splitting::{section_diagram_defects, splitting_for_a, SplitCheck, SplittingData};
