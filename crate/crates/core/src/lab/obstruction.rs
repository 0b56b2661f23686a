use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::aff::tail_contraction_bound;
use crate::arith::{big_pow, rational_to_f64, rational_to_string};
use crate::error::{Error, Result};
use crate::family::test_family;
use crate::grid::{midrange_seminorm, sup_norm, GridFunction};
use crate::space::Space;
use crate::system::{fast_winding, size_formula, InductiveSystem, StepHom};
use crate::unitary::{push_forward_uclass, quotient_norm_uclass, LatticeMode, UClass};
use crate::Rational;

/// Compatibility budget a splitting representative would have to meet.
const THRESHOLD: f64 = 1.0 / 16.0;

/// One inequality of the chain, with both sides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionLedger {
    pub n: usize,
    pub m: usize,
    /// `M = ‖h‖`.
    pub amplitude: f64,
    /// `l_{m-1}/[m,m-1]`.
    pub ratio: String,
    pub ratio_is_power_of_four: bool,
    /// Quotient norm of the pushed generator alone, `ratio/2`.
    pub ramp_norm: f64,
    /// Quotient norm of the pushed candidate in the block `m-1` row.
    pub quotient_norm: f64,
    pub tail_bound: String,
    pub tail_factor: String,
    /// `(1 - tail)·quotient_norm`.
    pub lower_bound: f64,
    /// Quotient norm after pushing the row to the last stage.
    pub last_stage_norm: f64,
    pub threshold: f64,
    pub threshold_violated: bool,
    pub trace: Vec<InequalityRecord>,
    #[serde(skip)]
    pub ramp: Option<GridFunction<f64>>,
}

impl ObstructionLedger {
    pub fn pass(&self) -> bool {
        self.ratio_is_power_of_four && self.threshold_violated && self.trace.iter().all(|r| r.holds)
    }
}

/// Whether `m` satisfies `n < m ≤ stage_count` and `4^{m-1} > 8M + 8`.
pub fn admissible_stage(n: usize, m: usize, stage_count: usize, amplitude: f64) -> bool {
    n < m && m <= stage_count && big_pow(4, (m - 1) as u32).to_f64().unwrap_or(f64::INFINITY) > 8.0 * amplitude + 8.0
}

/// The block-`n` row of every step from stage `n` on: the finite stages of
/// the corner `Q_n B Q_n`.
pub fn corner_quotient_map(sys: &InductiveSystem, n: usize) -> Result<Vec<StepHom>> {
    sys.check_stage(n)?;
    Ok((n..sys.stage_count()).map(|k| sys.step(k).restrict(&[n - 1], &[n - 1])).collect())
}

/// `π_n^♮`: the block-`n` component of a class (1-based).
pub fn project_row(u: &UClass<f64>, n: usize) -> Result<UClass<f64>> {
    if n == 0 || n > u.blocks.len() {
        return Err(Error::StageOutOfRange { stage: n, max: u.blocks.len() });
    }
    Ok(u.select(&[n - 1]))
}

/// Phase corrections `h` on the circle block: the circle test family scaled
/// to sup-norm 1, times each amplitude (amplitude 0 once).
pub fn candidate_phases(resolution: usize, seed: u64, amplitudes: &[f64]) -> Vec<(String, GridFunction<f64>)> {
    let fam = test_family::<f64>(Space::Circle, resolution, seed);
    let mut out = Vec::new();
    for &a in amplitudes {
        if a == 0.0 {
            out.push(("zero".to_string(), GridFunction::zeros(Space::Circle, resolution)));
            continue;
        }
        for t in &fam {
            let norm = sup_norm(&t.func);
            if norm > 0.0 {
                out.push((format!("{a} x {}", t.name), t.func.scale(a / norm)));
            }
        }
    }
    out
}

/// Replays the obstruction for candidate representatives `[g]·e^{2πih}` of
/// a splitting at corner `P_n`, caching the composite rows it needs.
pub struct ObstructionRunner<'a> {
    sys: &'a InductiveSystem,
    rows: HashMap<(usize, usize), StepHom>,
}

impl<'a> ObstructionRunner<'a> {
    pub fn new(sys: &'a InductiveSystem) -> Self {
        Self { sys, rows: HashMap::new() }
    }

    fn row(&mut self, n: usize, m: usize) -> Result<&StepHom> {
        if !self.rows.contains_key(&(n, m)) {
            let all: Vec<usize> = (0..self.sys.stage(n).len()).collect();
            let row = self.sys.composite(n, m)?.restrict(&all, &[m - 2]);
            self.rows.insert((n, m), row);
        }
        Ok(&self.rows[&(n, m)])
    }

    /// `h` is the phase correction on the circle block `n` of stage `n`;
    /// `m` is chosen as the smallest admissible stage when absent.
    pub fn run(&mut self, n: usize, h: &GridFunction<f64>, m: Option<usize>) -> Result<ObstructionLedger> {
        let sys = self.sys;
        sys.check_stage(n)?;
        let stage_count = sys.stage_count();
        let amplitude = sup_norm(h);
        let m = match m {
            Some(m) if admissible_stage(n, m, stage_count, amplitude) => m,
            Some(m) => return Err(Error::InadmissibleStage { m }),
            None => (n + 1..=stage_count)
                .find(|&m| admissible_stage(n, m, stage_count, amplitude))
                .ok_or(Error::StageBudgetExceeded { stage_count, amplitude })?,
        };
        let resolution = h.resolution();
        let margin = 4.0 / resolution as f64;
        let mode = LatticeMode::ModAllConstants;

        let ratio = Rational::new(
            BigInt::from(fast_winding(&sys.params, m - 1)),
            BigInt::from(size_formula(&sys.params.k_seq, m, m - 1)),
        );
        let four_power = Rational::from_integer(BigInt::from(big_pow(4, (m - 1) as u32)));
        let ratio_is_power_of_four = ratio == four_power;

        let generator = UClass::generator(n, sys.stage(n), n, 1, None, resolution, mode)?;
        let candidate = UClass::generator(n, sys.stage(n), n, 1, Some(h.clone()), resolution, mode)?;
        let row = self.row(n, m)?.clone();
        let ramp = push_forward_uclass(&row, &generator)?;
        let pushed = push_forward_uclass(&row, &candidate)?;
        let ramp_norm = quotient_norm_uclass(&ramp)?;
        let quotient_norm = quotient_norm_uclass(&pushed)?;

        let tail = tail_contraction_bound(sys, m - 1, m)?;
        let factor = rational_to_f64(&tail.factor);
        let lower_bound = factor * quotient_norm;

        let mut last = pushed.clone();
        for step in corner_quotient_map(sys, m - 1)?.iter().skip(1) {
            last = push_forward_uclass(step, &last)?;
        }
        let last_stage_norm = midrange_seminorm(&last.blocks[0].phase);

        let mut trace = Vec::new();
        let mut record = |name: &str, lhs: f64, rhs: f64, strict: bool| {
            let holds = if strict { lhs > rhs } else { lhs >= rhs };
            trace.push(InequalityRecord { name: name.into(), lhs, rhs, strict, holds });
        };
        let power = rational_to_f64(&four_power);
        record("4^(m-1) > 8M + 8", power, 8.0 * amplitude + 8.0, true);
        record("ramp quotient norm = 4^(m-1)/2", ramp_norm + margin, power / 2.0, false);
        record("ramp quotient norm = 4^(m-1)/2 (upper)", power / 2.0 + margin, ramp_norm, false);
        record("quotient norm >= 4^(m-1)/2 - M", quotient_norm + margin, power / 2.0 - amplitude, false);
        record("quotient norm >= 4M + 4", quotient_norm + margin, 4.0 * amplitude + 4.0, false);
        record("tail factor >= 3/4", factor, 0.75, false);
        record("corner lower bound >= 3", lower_bound + margin, 3.0, false);
        record("last-stage norm >= corner lower bound", last_stage_norm + margin, lower_bound, false);
        record("corner lower bound > 1/16", lower_bound, THRESHOLD, true);
        let threshold_violated = lower_bound > THRESHOLD;

        Ok(ObstructionLedger {
            n,
            m,
            amplitude,
            ratio: rational_to_string(&ratio),
            ratio_is_power_of_four,
            ramp_norm,
            quotient_norm,
            tail_bound: rational_to_string(&tail.bound),
            tail_factor: rational_to_string(&tail.factor),
            lower_bound,
            last_stage_norm,
            threshold: THRESHOLD,
            threshold_violated,
            trace,
            ramp: Some(ramp.blocks[0].phase.clone()),
        })
    }
}

/// One-off run of the obstruction for system `B` at corner `P_n`.
pub fn obstruction_experiment(
    sys: &InductiveSystem,
    n: usize,
    h: &GridFunction<f64>,
    m: Option<usize>,
) -> Result<ObstructionLedger> {
    ObstructionRunner::new(sys).run(n, h, m)
}
