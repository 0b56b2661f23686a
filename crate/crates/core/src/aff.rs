//! Continuous affine functions on the trace space, realized blockwise as
//! real functions on the spectra, and the maps steps induce on them.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grid::{sup_norm, GridFunction};
use crate::scalar::{CompensatedSum, Scalar};
use crate::system::{Block, InductiveSystem, Loc, Pattern, PatternEntry, Projection, SpectralMap, StepHom};
use crate::Rational;

/// One real function per block of a stage.
#[derive(Clone, Debug, PartialEq)]
pub struct AffElement<S> {
    pub stage: usize,
    pub funcs: Vec<GridFunction<S>>,
}

impl<S: Scalar> AffElement<S> {
    pub fn new(stage: usize, funcs: Vec<GridFunction<S>>) -> Self {
        Self { stage, funcs }
    }

    pub fn zeros(stage: usize, blocks: &[Block], resolution: usize) -> Self {
        Self::constants(stage, blocks, resolution, &vec![S::zero(); blocks.len()])
    }

    pub fn constants(stage: usize, blocks: &[Block], resolution: usize, values: &[S]) -> Self {
        let funcs = blocks.iter().zip(values).map(|(b, &v)| GridFunction::constant(b.space, resolution, v)).collect();
        Self { stage, funcs }
    }

    pub fn resolution(&self) -> usize {
        self.funcs.first().map_or(2, GridFunction::resolution)
    }

    pub fn check_blocks(&self, blocks: &[Block]) -> Result<()> {
        if self.funcs.len() != blocks.len() || self.funcs.iter().zip(blocks).any(|(f, b)| f.space() != b.space) {
            return Err(Error::BlockMismatch(format!(
                "element with {} functions does not fit {} blocks",
                self.funcs.len(),
                blocks.len()
            )));
        }
        Ok(())
    }

    /// Max over blocks of the sup-norm.
    pub fn sup_norm(&self) -> S {
        self.funcs.iter().map(sup_norm).fold(S::zero(), S::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn scale(&self, c: S) -> Self {
        Self { stage: self.stage, funcs: self.funcs.iter().map(|f| f.scale(c)).collect() }
    }

    fn zip(
        &self,
        other: &Self,
        op: impl Fn(&GridFunction<S>, &GridFunction<S>) -> Result<GridFunction<S>>,
    ) -> Result<Self> {
        if self.funcs.len() != other.funcs.len() {
            return Err(Error::BlockMismatch("elements have different block counts".into()));
        }
        let funcs = self.funcs.iter().zip(&other.funcs).map(|(a, b)| op(a, b)).collect::<Result<_>>()?;
        Ok(Self { stage: self.stage, funcs })
    }

    /// Restriction to the listed blocks (0-based).
    pub fn select(&self, blocks: &[usize]) -> Self {
        Self { stage: self.stage, funcs: blocks.iter().map(|&i| self.funcs[i].clone()).collect() }
    }
}

/// Adds `Σ_e w_e·f(λ_e(x_k))` to `acc[k]` for every target node `k`.
pub(crate) fn accumulate_pullback<S: Scalar>(
    acc: &mut [CompensatedSum<S>],
    f: &GridFunction<S>,
    entry: &PatternEntry,
    weight: S,
) {
    let n = f.resolution();
    match entry {
        PatternEntry::Map { map: SpectralMap::Const(p), .. } => {
            let c = weight * f.value_at_loc(Loc::of_point(p));
            acc.iter_mut().for_each(|a| a.add(c));
        }
        PatternEntry::Map { map, .. } => {
            for (k, a) in acc.iter_mut().enumerate() {
                a.add(weight * f.value_at_loc(map.locate(k, n)));
            }
        }
        PatternEntry::Progression { .. } => {
            let c = weight * progression_value_sum(f, entry);
            acc.iter_mut().for_each(|a| a.add(c));
        }
    }
}

/// Long progressions that stay inside one period: `f` is linear on each
/// grid cell, so the points of a cell contribute through their count and
/// their offset sum, at `O(N)` cost.
fn progression_sum_by_cells<S: Scalar>(f: &GridFunction<S>, entry: &PatternEntry) -> Option<f64> {
    let PatternEntry::Progression { start, step, count, .. } = entry else {
        return None;
    };
    let n = f.resolution();
    let count = *count;
    if f.space() == crate::space::Space::Point || count < 4 * n as u64 {
        return None;
    }
    let (x0, dx) = (crate::arith::rational_to_f64(start), crate::arith::rational_to_f64(step));
    let last = start + step * Rational::from_integer(BigInt::from(count - 1));
    if dx <= 0.0 || start.is_negative() || last >= Rational::one() {
        return None;
    }
    let s = f.samples();
    let node = |k: usize| s[k % s.len()].as_f64();
    let nf = n as f64;
    let mut total = CompensatedSum::<f64>::new();
    let mut r0 = 0u64;
    for k in 0..n {
        let r1 = if k + 1 == n { count } else { ((((k + 1) as f64 / nf - x0) / dx).ceil().max(0.0) as u64).min(count) };
        if r1 > r0 {
            let cnt = (r1 - r0) as f64;
            // Σ (N·x_r - k) over the cell, measured from its first point.
            let offset = cnt * (nf * (x0 + dx * r0 as f64) - k as f64) + nf * dx * cnt * (cnt - 1.0) / 2.0;
            let (a, b) = (node(k), node(k + 1));
            total.add(cnt * a + (b - a) * offset);
        }
        r0 = r1;
    }
    Some(total.value())
}

/// `Σ_r f(start + r·step)` over a progression entry, not counting `mult`.
pub(crate) fn progression_value_sum<S: Scalar>(f: &GridFunction<S>, entry: &PatternEntry) -> S {
    if let Some(v) = progression_sum_by_cells(f, entry) {
        return S::of_f64(v);
    }
    let sum: CompensatedSum<S> = match entry.progression_locs() {
        Some(locs) => locs.map(|loc| f.value_at_loc(loc)).collect(),
        None => entry.progression_points().iter().map(|r| f.value_at(crate::arith::rational_to_f64(r))).collect(),
    };
    sum.value()
}

/// A positive map between the affine function spaces of two direct sums:
/// `ξ(f)_j = Σ_i weight_ij · avg_{λ ∈ pattern_ij} f_i∘λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffMap {
    pub source: Vec<Block>,
    pub target: Vec<Block>,
    pub parts: Vec<Vec<Option<AffPart>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffPart {
    pub weight: Rational,
    pub pattern: Pattern,
}

impl AffMap {
    /// The map a step induces: `weight_ij = len_ij·size_i/size_j`.
    pub fn from_step(h: &StepHom) -> Self {
        let parts = (0..h.source().len())
            .map(|i| {
                (0..h.target().len())
                    .map(|j| {
                        h.part(i, j).map(|p| AffPart {
                            weight: Rational::new(
                                BigInt::from(p.rank_consumed()),
                                BigInt::from(h.target()[j].size.clone()),
                            ),
                            pattern: p.pattern.clone(),
                        })
                    })
                    .collect()
            })
            .collect();
        Self { source: h.source().to_vec(), target: h.target().to_vec(), parts }
    }

    pub fn apply<S: Scalar>(&self, f: &AffElement<S>) -> Result<AffElement<S>> {
        f.check_blocks(&self.source)?;
        let n = f.resolution();
        let funcs = self
            .target
            .iter()
            .enumerate()
            .map(|(j, tb)| {
                let mut acc = vec![CompensatedSum::new(); tb.space.sample_count(n)];
                for (i, fi) in f.funcs.iter().enumerate() {
                    let Some(part) = &self.parts[i][j] else { continue };
                    let len = Rational::from_integer(BigInt::from(part.pattern.len()));
                    for e in part.pattern.entries() {
                        let w = &part.weight * Rational::from_integer(BigInt::from(e.mult().clone())) / &len;
                        accumulate_pullback(&mut acc, fi, e, S::of_rational(&w));
                    }
                }
                GridFunction::new(tb.space, n, acc.iter().map(CompensatedSum::value).collect())
            })
            .collect::<Result<_>>()?;
        Ok(AffElement { stage: f.stage + 1, funcs })
    }
}

/// `AffT h`: `g_j(x) = (1/size_j)·Σ_i size_i·Σ_{λ ∈ pattern(i,j)} f_i(λ(x))`.
pub fn aff_induced<S: Scalar>(h: &StepHom, f: &AffElement<S>) -> Result<AffElement<S>> {
    let mut g = AffMap::from_step(h).apply(f)?;
    g.stage = h.to_stage;
    Ok(g)
}

/// Largest sup-norm distance between the images of the test elements.
pub fn aff_distance_of_steps<S: Scalar>(h1: &StepHom, h2: &StepHom, tests: &[AffElement<S>]) -> Result<S> {
    if h1.source() != h2.source() || h1.target() != h2.target() {
        return Err(Error::BlockMismatch("steps have different shapes".into()));
    }
    let mut worst = S::zero();
    for f in tests {
        let d = aff_induced(h1, f)?.sub(&aff_induced(h2, f)?)?.sup_norm();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// `Σ_{j=m}^{steps} p_n^{-k_j}` and the surviving factor `1 - Σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailBound {
    pub n: usize,
    pub m: usize,
    pub bound: Rational,
    pub factor: Rational,
}

/// Tail of the connecting maps on the row of block `n`, from step `m` on.
pub fn tail_contraction_bound(sys: &InductiveSystem, n: usize, m: usize) -> Result<TailBound> {
    if n == 0 || n >= m || m > sys.stage_count() + 1 {
        return Err(Error::InvalidParams(format!("tail bound needs 1 <= n < m <= stage_count + 1, got n={n}, m={m}")));
    }
    let bound = sys.params.tail_sum(n, m);
    if bound > crate::arith::rational(1, 4) {
        return Err(Error::InvalidParams(format!("tail sum {} exceeds 1/4", crate::arith::rational_to_string(&bound))));
    }
    let factor = Rational::one() - &bound;
    Ok(TailBound { n, m, bound, factor })
}

fn rank_ratio(num: &num_bigint::BigUint, den: &num_bigint::BigUint) -> Rational {
    Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// `ξ₁^{ij} = (rank q̄_j / rank p̄_j)·(rank p_i / rank q_i)·ξ₂^{ij}`: the map
/// between the corners `p, p̄` obtained from the one between `q, q̄`.
pub fn corner_restrict_aff_map(
    xi2: &AffMap,
    p: &Projection,
    q: &Projection,
    pbar: &Projection,
    qbar: &Projection,
) -> Result<AffMap> {
    if !p.is_below(q) || !pbar.is_below(qbar) {
        return Err(Error::BlockMismatch("corner restriction needs p <= q and p̄ <= q̄".into()));
    }
    if q.ranks.len() != xi2.source.len() || qbar.ranks.len() != xi2.target.len() {
        return Err(Error::BlockMismatch("projections do not fit the map".into()));
    }
    let mut out = xi2.clone();
    for (i, row) in out.parts.iter_mut().enumerate() {
        for (j, part) in row.iter_mut().enumerate() {
            let Some(part) = part else { continue };
            if pbar.ranks[j].is_zero() {
                return Err(Error::ZeroRankCorner { block: j + 1 });
            }
            if q.ranks[i].is_zero() {
                return Err(Error::ZeroRankCorner { block: i + 1 });
            }
            part.weight =
                &part.weight * rank_ratio(&qbar.ranks[j], &pbar.ranks[j]) * rank_ratio(&p.ranks[i], &q.ranks[i]);
        }
    }
    Ok(out)
}

/// The inclusion-induced map `AffT(pAp) → AffT(qAq)`: block `i` is scaled by
/// `rank p_i / rank q_i` (zero where `q_i = 0`).
pub fn iota_t<S: Scalar>(p: &Projection, q: &Projection, f: &AffElement<S>) -> Result<AffElement<S>> {
    if !p.is_below(q) || f.funcs.len() != p.ranks.len() {
        return Err(Error::BlockMismatch("inclusion needs p <= q of matching shape".into()));
    }
    let funcs = f
        .funcs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let c =
                if q.ranks[i].is_zero() { S::zero() } else { S::of_rational(&rank_ratio(&p.ranks[i], &q.ranks[i])) };
            g.scale(c)
        })
        .collect();
    Ok(AffElement { stage: f.stage, funcs })
}

/// Largest defect of `ι_T∘ξ^{p,p̄} = ξ^{q,q̄}∘ι_T` over the test elements.
pub fn corner_diagram_defect<S: Scalar>(
    xi_p: &AffMap,
    xi_q: &AffMap,
    (p, q): (&Projection, &Projection),
    (pbar, qbar): (&Projection, &Projection),
    tests: &[AffElement<S>],
) -> Result<S> {
    let mut worst = S::zero();
    for f in tests {
        let left = iota_t(pbar, qbar, &xi_p.apply(f)?)?;
        let right = xi_q.apply(&iota_t(p, q, f)?)?;
        worst = worst.max(left.sub(&right)?.sup_norm());
    }
    Ok(worst)
}

/// Interpolation error bound for a Lipschitz-`lip` function at resolution `n`.
pub fn grid_margin(lip: f64, n: usize) -> f64 {
    lip / n as f64
}
