use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::aff::{aff_induced, AffElement};
use crate::arith::{rational_to_f64, rational_to_string};
use crate::error::{Error, Result};
use crate::family::test_elements;
use crate::ktheory::{k0_of_ranks, rho};
use crate::system::{corner_unit_image, multiplicity_matrix, InductiveSystem};
use crate::Rational;

/// Per-step comparison of the two systems.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inv0Step {
    pub step: usize,
    /// `p_n^{k_n}`.
    pub prime_power: u64,
    pub blocks_equal: bool,
    pub multiplicities_equal: bool,
    /// Largest AffT distance over the nonnegative unit-ball family.
    pub defect: f64,
    /// `2/p_n^{k_n}`.
    pub bound: String,
    /// Largest `distance - 2·osc(f)/p_n^{k_n}` over the signed family.
    pub signed_excess: f64,
    /// Largest AffT distance on target blocks whose parts agree literally.
    pub identical_part_defect: f64,
    /// Largest difference of the images of `ρ` of the corner units.
    pub corner_unit_defect: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inv0Report {
    pub steps: Vec<Inv0Step>,
    /// Partial sums of `2/p_n^{k_n}`.
    pub partial_sums: Vec<String>,
    pub defect_sum: f64,
    /// `Σ 2/p_n^{k_n} + stage_count·margin`.
    pub defect_budget: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Stage-by-stage certificate that `A` and `B` carry the same K-theory and
/// scale and approximately intertwining AffT data.
pub fn inv0_equivalence_report(a: &InductiveSystem, b: &InductiveSystem, seed: u64) -> Result<Inv0Report> {
    if a.params != b.params {
        return Err(Error::ParamMismatch);
    }
    let n_grid = a.params.grid_resolution;
    let margin = 4.0 / n_grid as f64;
    let mut steps = Vec::new();
    let mut partial = Rational::zero();
    let mut partial_sums = Vec::new();
    let mut defect_sum = 0.0;
    for n in 1..a.stage_count() {
        let (ha, hb) = (a.step(n), b.step(n));
        let blocks_equal = ha.source() == hb.source() && ha.target() == hb.target();
        let multiplicities_equal = multiplicity_matrix(ha) == multiplicity_matrix(hb);
        let p = a.params.prime_power(n, n);
        let bound = Rational::new(BigInt::from(2), BigInt::from(p));
        partial += &bound;
        partial_sums.push(rational_to_string(&partial));
        let pf = p as f64;

        let nonneg = test_elements::<f64>(n, a.stage(n), n_grid, seed, true);
        let signed = test_elements::<f64>(n, a.stage(n), n_grid, seed, false);
        let mut defect = 0.0f64;
        let mut identical = 0.0f64;
        for (f, _) in &nonneg {
            let d = aff_induced(ha, f)?.sub(&aff_induced(hb, f)?)?;
            defect = defect.max(d.sup_norm());
            identical = identical.max(off_block_norm(&d, n - 1));
        }
        let mut signed_excess = f64::NEG_INFINITY;
        for (f, _) in &signed {
            let d = aff_induced(ha, f)?.sub(&aff_induced(hb, f)?)?;
            let osc = f.funcs.iter().map(|g| g.oscillation()).fold(0.0, f64::max);
            signed_excess = signed_excess.max(d.sup_norm() - 2.0 * osc / pf);
            identical = identical.max(off_block_norm(&d, n - 1));
        }

        let mut corner_unit_defect = 0.0f64;
        for k in 1..=n {
            let pk = corner_unit_image(a, k, n)?;
            if pk != corner_unit_image(b, k, n)? {
                corner_unit_defect = f64::INFINITY;
            }
            let x = k0_of_ranks(n, &pk.ranks);
            let r: AffElement<f64> = rho(&x, a.stage(n), n_grid)?;
            let d = aff_induced(ha, &r)?.sub(&aff_induced(hb, &r)?)?.sup_norm();
            corner_unit_defect = corner_unit_defect.max(d);
        }

        defect_sum += defect;
        let pass = blocks_equal
            && multiplicities_equal
            && defect <= rational_to_f64(&bound) + margin
            && signed_excess <= margin
            && identical <= 1e-12
            && corner_unit_defect <= 1e-12;
        steps.push(Inv0Step {
            step: n,
            prime_power: p,
            blocks_equal,
            multiplicities_equal,
            defect,
            bound: rational_to_string(&bound),
            signed_excess,
            identical_part_defect: identical,
            corner_unit_defect,
            pass,
        });
    }
    let defect_budget = rational_to_f64(&partial) + a.stage_count() as f64 * margin;
    let pass = steps.iter().all(|s| s.pass) && defect_sum < defect_budget;
    Ok(Inv0Report { steps, partial_sums, defect_sum, defect_budget, margin, pass })
}

/// Sup-norm of `d` away from the block with index `skip` (0-based).
fn off_block_norm(d: &AffElement<f64>, skip: usize) -> f64 {
    d.funcs.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, g)| g.sup_norm()).fold(0.0, f64::max)
}
