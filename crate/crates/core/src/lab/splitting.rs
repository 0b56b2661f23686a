use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::midrange_seminorm;
use crate::ktheory::{k1_induced, K1Vector};
use crate::space::Space;
use crate::system::{corner_unit_image, InductiveSystem, Projection};
use crate::unitary::{is_uniformly_varied, push_forward_uclass, LatticeMode, UClass};

/// Finite-stage check of the diagram: the section at corner `P_n` pushed to
/// stage `m` against the section at `P_m` included into `P_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitCheck {
    pub m: usize,
    pub windings_equal: bool,
    pub phase_defect: f64,
    /// The pushed section has constant determinant on every interval block.
    pub interval_determinants_constant: bool,
    /// K₁ image of the pushed section equals the pushed K₁ class.
    pub k1_consistent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplittingData {
    pub stage: usize,
    pub corner: Projection,
    pub section: UClass<f64>,
    /// `π(S(x)) = x` on windings.
    pub pi_s_identity: bool,
    pub checks: Vec<SplitCheck>,
}

/// Pushes the standard section `x ↦ [u^x]` at `P_n` to every later stage and
/// compares with the section at `P_m`; no hypothesis on the system, so this
/// also exhibits the failure for a system without uniformly varied
/// determinant.
pub fn section_diagram_defects(sys: &InductiveSystem, n: usize, x: i64, resolution: usize) -> Result<Vec<SplitCheck>> {
    sys.check_stage(n)?;
    let mode = LatticeMode::ModAllConstants;
    let section = UClass::<f64>::generator(n, sys.stage(n), n, x, None, resolution, mode)?;
    let k1 = K1Vector { stage: n, windings: section.windings() };
    let mut pushed = section;
    let mut pushed_k1 = k1;
    let mut out = Vec::new();
    for m in n + 1..=sys.stage_count() {
        pushed = push_forward_uclass(sys.step(m - 1), &pushed)?;
        pushed_k1 = k1_induced(sys.step(m - 1), &pushed_k1)?;
        let p_n = corner_unit_image(sys, n, m)?;
        let p_m = corner_unit_image(sys, m, m)?;
        let reference =
            UClass::generator(m, sys.stage(m), m, x, None, resolution, mode)?.include(&p_m.ranks, &p_n.ranks)?;
        let windings_equal = pushed.windings() == reference.windings();
        let diff = pushed
            .blocks
            .iter()
            .zip(&reference.blocks)
            .map(|(a, b)| a.phase.sub(&b.phase))
            .collect::<Result<Vec<_>>>()?;
        let phase_defect = diff.iter().map(midrange_seminorm).fold(0.0, f64::max);
        let interval_determinants_constant = pushed
            .blocks
            .iter()
            .zip(sys.stage(m))
            .filter(|(_, b)| b.space == Space::Interval)
            .all(|(u, _)| midrange_seminorm(&u.phase) <= 1e-9);
        out.push(SplitCheck {
            m,
            windings_equal,
            phase_defect,
            interval_determinants_constant,
            k1_consistent: pushed.windings() == pushed_k1.windings,
        });
    }
    Ok(out)
}

/// The compatible splitting at corner `P_n` of a system with uniformly
/// varied determinant.
pub fn splitting_for_a(sys: &InductiveSystem, n: usize, x: i64) -> Result<SplittingData> {
    let uvd = is_uniformly_varied(sys)?;
    if let Some(bad) = uvd.failures().next() {
        return Err(Error::NotUvd(format!(
            "step {} part ({},{}) has determinant degree {}",
            bad.step, bad.source_block, bad.target_block, bad.degree
        )));
    }
    let resolution = sys.params.grid_resolution;
    let section = UClass::generator(n, sys.stage(n), n, x, None, resolution, LatticeMode::ModAllConstants)?;
    let pi_s_identity = section.blocks[n - 1].winding == x.into();
    Ok(SplittingData {
        stage: n,
        corner: corner_unit_image(sys, n, n)?,
        pi_s_identity,
        checks: section_diagram_defects(sys, n, x, resolution)?,
        section,
    })
}
