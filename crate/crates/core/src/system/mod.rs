//! Building blocks, partial homomorphisms given by eigenvalue patterns, and
//! inductive systems.

mod builder;
mod params;
mod spectral;

pub use builder::{build_system_a, build_system_b, fast_winding, size_formula, SystemKind};
pub use params::SystemParams;
pub use spectral::{floor_sum, Loc, Pattern, PatternEntry, SpectralMap};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::{Space, SpectrumPoint};

/// `M_size(C(X))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub size: BigUint,
    pub space: Space,
}

impl Block {
    pub fn new(size: impl Into<BigUint>, space: Space) -> Self {
        let size = size.into();
        assert!(!size.is_zero(), "block size must be positive");
        Self { size, space }
    }
}

impl Serialize for Block {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        #[derive(Serialize)]
        struct Repr {
            size: String,
            space: Space,
        }
        Repr { size: self.size.to_string(), space: self.space }.serialize(s)
    }
}

/// Component of a step from one source block to one target block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialHom {
    pub source: Block,
    pub target: Block,
    pub pattern: Pattern,
}

impl PartialHom {
    /// Rank the part occupies in its target: pattern length times source size.
    pub fn rank_consumed(&self) -> BigUint {
        self.pattern.len() * &self.source.size
    }
}

/// A homomorphism between direct sums of blocks, `parts[i][j]` being the
/// component from source block `i` to target block `j` (0-based indices).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepHom {
    pub from_stage: usize,
    pub to_stage: usize,
    source: Vec<Block>,
    target: Vec<Block>,
    parts: Vec<Vec<Option<PartialHom>>>,
}

impl StepHom {
    /// Patterns indexed `[i][j]`; an empty pattern means a zero part.
    pub fn new(
        from_stage: usize,
        to_stage: usize,
        source: Vec<Block>,
        target: Vec<Block>,
        patterns: Vec<Vec<Pattern>>,
    ) -> Result<Self> {
        if patterns.len() != source.len() || patterns.iter().any(|row| row.len() != target.len()) {
            return Err(Error::BlockMismatch(format!(
                "pattern matrix does not have shape {}x{}",
                source.len(),
                target.len()
            )));
        }
        let mut parts = Vec::with_capacity(source.len());
        for (i, row) in patterns.into_iter().enumerate() {
            let mut out = Vec::with_capacity(target.len());
            for (j, pattern) in row.into_iter().enumerate() {
                if pattern.is_empty() {
                    out.push(None);
                    continue;
                }
                for e in pattern.entries() {
                    let domain_ok = e.domain().is_none_or(|d| d == target[j].space);
                    if !domain_ok || e.codomain() != source[i].space {
                        return Err(Error::BlockMismatch(format!(
                            "part ({},{}) entry {e:?} does not map {} into {}",
                            i + 1,
                            j + 1,
                            target[j].space,
                            source[i].space
                        )));
                    }
                }
                out.push(Some(PartialHom { source: source[i].clone(), target: target[j].clone(), pattern }));
            }
            parts.push(out);
        }
        Ok(Self { from_stage, to_stage, source, target, parts })
    }

    /// The identity of a direct sum.
    pub fn identity(stage: usize, blocks: Vec<Block>) -> Self {
        let n = blocks.len();
        let patterns = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i != j {
                            return Pattern::default();
                        }
                        let map = match blocks[i].space {
                            Space::Point => SpectralMap::Const(SpectrumPoint::point()),
                            Space::Interval => SpectralMap::IdentityInterval,
                            Space::Circle => SpectralMap::circle_winding(1),
                        };
                        Pattern::new(vec![PatternEntry::single(map)])
                    })
                    .collect()
            })
            .collect();
        Self::new(stage, stage, blocks.clone(), blocks, patterns).expect("identity is well formed")
    }

    pub fn source(&self) -> &[Block] {
        &self.source
    }

    pub fn target(&self) -> &[Block] {
        &self.target
    }

    /// Part from source block `i` to target block `j`, 0-based.
    pub fn part(&self, i: usize, j: usize) -> Option<&PartialHom> {
        self.parts[i][j].as_ref()
    }

    /// Every column uses up exactly its target block.
    pub fn is_unital(&self) -> bool {
        (0..self.target.len()).all(|j| self.column_rank(j) == self.target[j].size)
    }

    pub fn column_rank(&self, j: usize) -> BigUint {
        (0..self.source.len()).filter_map(|i| self.part(i, j)).map(PartialHom::rank_consumed).sum()
    }

    /// Keep only the given source rows and target columns (0-based).
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> StepHom {
        let patterns = rows
            .iter()
            .map(|&i| cols.iter().map(|&j| self.part(i, j).map(|p| p.pattern.clone()).unwrap_or_default()).collect())
            .collect();
        StepHom::new(
            self.from_stage,
            self.to_stage,
            rows.iter().map(|&i| self.source[i].clone()).collect(),
            cols.iter().map(|&j| self.target[j].clone()).collect(),
            patterns,
        )
        .expect("restriction of a valid step is valid")
    }

    /// Same parts with every pattern in canonical form.
    pub fn canonical(&self) -> StepHom {
        let mut out = self.clone();
        for row in &mut out.parts {
            for p in row.iter_mut().flatten() {
                p.pattern = p.pattern.canonical();
            }
        }
        out
    }
}

/// `g ∘ f`: first `f`, then `g`.
pub fn compose(g: &StepHom, f: &StepHom) -> Result<StepHom> {
    if g.source != f.target {
        return Err(Error::BlockMismatch(format!(
            "cannot compose: {} target blocks vs {} source blocks (or sizes differ)",
            f.target.len(),
            g.source.len()
        )));
    }
    let patterns = (0..f.source.len())
        .map(|i| {
            (0..g.target.len())
                .map(|k| {
                    let mut acc = Pattern::default();
                    for j in 0..f.target.len() {
                        if let (Some(fp), Some(gp)) = (f.part(i, j), g.part(j, k)) {
                            acc.concat(fp.pattern.after(&gp.pattern));
                        }
                    }
                    acc.canonical()
                })
                .collect()
        })
        .collect();
    StepHom::new(f.from_stage, g.to_stage, f.source.clone(), g.target.clone(), patterns)
}

/// Entry `(i,j)` is the number of diagonal entries in part `(i,j)`.
pub fn multiplicity_matrix(h: &StepHom) -> Vec<Vec<BigUint>> {
    (0..h.source.len())
        .map(|i| (0..h.target.len()).map(|j| h.part(i, j).map(|p| p.pattern.len()).unwrap_or_default()).collect())
        .collect()
}

/// A projection of a direct sum up to equivalence: its rank in each block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub stage: usize,
    pub ranks: Vec<BigUint>,
}

impl Projection {
    pub fn unit(stage: usize, blocks: &[Block]) -> Self {
        Self { stage, ranks: blocks.iter().map(|b| b.size.clone()).collect() }
    }

    /// `self ≤ other` blockwise.
    pub fn is_below(&self, other: &Projection) -> bool {
        self.ranks.len() == other.ranks.len() && self.ranks.iter().zip(&other.ranks).all(|(a, b)| a <= b)
    }

    /// `self - other`, defined when `other ≤ self`.
    pub fn minus(&self, other: &Projection) -> Result<Projection> {
        if !other.is_below(self) {
            return Err(Error::BlockMismatch("projection difference needs other <= self".into()));
        }
        Ok(Projection { stage: self.stage, ranks: self.ranks.iter().zip(&other.ranks).map(|(a, b)| a - b).collect() })
    }

    /// Image under a step: `rank'_j = Σ_i M(i,j)·rank_i`.
    pub fn push(&self, h: &StepHom) -> Result<Projection> {
        if self.ranks.len() != h.source.len() {
            return Err(Error::BlockMismatch(format!("{} ranks for {} blocks", self.ranks.len(), h.source.len())));
        }
        let m = multiplicity_matrix(h);
        let ranks =
            (0..h.target.len()).map(|j| self.ranks.iter().enumerate().map(|(i, r)| &m[i][j] * r).sum()).collect();
        Ok(Projection { stage: h.to_stage, ranks })
    }
}

impl Serialize for Projection {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        #[derive(Serialize)]
        struct Repr {
            stage: usize,
            ranks: Vec<String>,
        }
        Repr { stage: self.stage, ranks: self.ranks.iter().map(|r| r.to_string()).collect() }.serialize(s)
    }
}

/// Stages `1..=stage_count` and the steps between consecutive stages.
#[derive(Clone, Debug)]
pub struct InductiveSystem {
    pub kind: SystemKind,
    pub params: SystemParams,
    stages: Vec<Vec<Block>>,
    steps: Vec<StepHom>,
}

impl InductiveSystem {
    pub fn new(kind: SystemKind, params: SystemParams, stages: Vec<Vec<Block>>, steps: Vec<StepHom>) -> Result<Self> {
        if stages.len() != steps.len() + 1 {
            return Err(Error::BlockMismatch(format!("{} stages need {} steps", stages.len(), stages.len() - 1)));
        }
        for (k, step) in steps.iter().enumerate() {
            if step.source != stages[k] || step.target != stages[k + 1] {
                return Err(Error::BlockMismatch(format!(
                    "step {} does not connect stages {} and {}",
                    k + 1,
                    k + 1,
                    k + 2
                )));
            }
            if !step.is_unital() {
                return Err(Error::BlockMismatch(format!("step {} is not unital", k + 1)));
            }
        }
        Ok(Self { kind, params, stages, steps })
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Blocks of stage `n`, 1-based.
    pub fn stage(&self, n: usize) -> &[Block] {
        &self.stages[n - 1]
    }

    pub fn stages(&self) -> &[Vec<Block>] {
        &self.stages
    }

    /// Step `n`, from stage `n` to stage `n+1`.
    pub fn step(&self, n: usize) -> &StepHom {
        &self.steps[n - 1]
    }

    pub fn steps(&self) -> &[StepHom] {
        &self.steps
    }

    pub fn check_stage(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.stage_count() {
            return Err(Error::StageOutOfRange { stage: n, max: self.stage_count() });
        }
        Ok(())
    }

    /// `φ_{n,m}`; the identity when `n == m`.
    pub fn composite(&self, n: usize, m: usize) -> Result<StepHom> {
        self.check_stage(n)?;
        self.check_stage(m)?;
        if m < n {
            return Err(Error::StageOutOfRange { stage: m, max: self.stage_count() });
        }
        let mut acc = StepHom::identity(n, self.stage(n).to_vec());
        for k in n..m {
            acc = if k == n { self.step(k).clone() } else { compose(self.step(k), &acc)? };
        }
        Ok(acc)
    }
}

/// Image at stage `m` of the unit of block `n` of stage `n`.
pub fn corner_unit_image(sys: &InductiveSystem, n: usize, m: usize) -> Result<Projection> {
    sys.check_stage(n)?;
    sys.check_stage(m)?;
    if m < n {
        return Err(Error::StageOutOfRange { stage: m, max: sys.stage_count() });
    }
    let blocks = sys.stage(n);
    let mut p = Projection {
        stage: n,
        ranks: blocks
            .iter()
            .enumerate()
            .map(|(i, b)| if i + 1 == n { b.size.clone() } else { BigUint::zero() })
            .collect(),
    };
    for k in n..m {
        p = p.push(sys.step(k))?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: u32) -> Block {
        Block::new(n, Space::Circle)
    }

    fn winding_step(from: usize, w: i64) -> StepHom {
        StepHom::new(
            from,
            from + 1,
            vec![circle(1)],
            vec![circle(1)],
            vec![vec![Pattern::new(vec![PatternEntry::single(SpectralMap::circle_winding(w))])]],
        )
        .unwrap()
    }

    #[test]
    fn composing_windings_multiplies() {
        let c = compose(&winding_step(2, 3), &winding_step(1, 2)).unwrap();
        assert_eq!(c.part(0, 0).unwrap().pattern.entries()[0], PatternEntry::single(SpectralMap::circle_winding(6)));
    }

    #[test]
    fn identity_is_neutral() {
        let f = winding_step(1, 5);
        let id = StepHom::identity(2, f.target().to_vec());
        assert_eq!(compose(&id, &f).unwrap(), f.canonical());
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let f = winding_step(1, 2);
        let g = StepHom::identity(2, vec![Block::new(2u32, Space::Circle)]);
        assert!(matches!(compose(&g, &f), Err(Error::BlockMismatch(_))));
    }

    #[test]
    fn rejects_incompatible_spaces() {
        let r = StepHom::new(
            1,
            2,
            vec![Block::new(1u32, Space::Interval)],
            vec![Block::new(1u32, Space::Circle)],
            vec![vec![Pattern::new(vec![PatternEntry::single(SpectralMap::circle_winding(1))])]],
        );
        assert!(r.is_err());
    }
}
