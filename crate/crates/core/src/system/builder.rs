//! The two systems: `A` with determinant-neutral windings into the interval
//! blocks, `B` with one fast winding `e^{2πi l_n t}`.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;

use super::{Block, InductiveSystem, Pattern, PatternEntry, SpectralMap, StepHom, SystemParams};
use crate::arith::{big_pow, nth_prime, rational};
use crate::error::Result;
use crate::space::Space;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SystemKind {
    A,
    B,
    Custom,
}

/// `[n,i] = ∏_{j≤i} p_j^{k_j} · ∏_{i<j≤n-1} p_i^{k_j}` for `i ≤ n-1`,
/// `[n,n] = [n,n-1]`, `[1,1] = 1`.
pub fn size_formula(k_seq: &[u32], n: usize, i: usize) -> BigUint {
    assert!(1 <= i && i <= n);
    if n == 1 {
        return BigUint::one();
    }
    let i = i.min(n - 1);
    let mut out = BigUint::one();
    for j in 1..=i {
        out *= big_pow(nth_prime(j), k_seq[j - 1]);
    }
    for j in i + 1..n {
        out *= big_pow(nth_prime(i), k_seq[j - 1]);
    }
    out
}

/// Blocks of every stage via the recursion `[n+1,i] = [n,i]·p_i^{k_n}`,
/// `[n+1,n+1] = [n+1,n] = [n,n]·p_n^{k_n}`.
fn stage_blocks(params: &SystemParams) -> Vec<Vec<Block>> {
    let mut stages = vec![vec![Block::new(1u32, Space::Circle)]];
    for n in 1..params.stage_count {
        let prev = &stages[n - 1];
        let mut next: Vec<Block> = (1..n)
            .map(|i| Block::new(&prev[i - 1].size * BigUint::from(params.prime_power(i, n)), Space::Interval))
            .collect();
        let grown = &prev[n - 1].size * BigUint::from(params.prime_power(n, n));
        next.push(Block::new(grown.clone(), Space::Interval));
        next.push(Block::new(grown, Space::Circle));
        stages.push(next);
    }
    stages
}

fn step(params: &SystemParams, stages: &[Vec<Block>], n: usize, kind: SystemKind) -> Result<StepHom> {
    let (src, dst) = (&stages[n - 1], &stages[n]);
    let mut patterns = vec![vec![Pattern::default(); n + 1]; n];
    let t_n = params.t_seq[n - 1].clone();
    let z_n = params.z_seq[n - 1].clone();
    for i in 1..n {
        let p = params.prime_power(i, n);
        patterns[i - 1][i - 1] = Pattern::new(vec![
            PatternEntry::repeated(SpectralMap::IdentityInterval, p - 1),
            PatternEntry::single(SpectralMap::Const(t_n.clone())),
        ]);
    }
    let p = params.prime_power(n, n);
    let l = p - 1;
    let roots = |first: i64, count: u64| {
        PatternEntry::progression(Space::Circle, rational(first, l as i64), rational(1, l as i64), count)
    };
    patterns[n - 1][n - 1] = match kind {
        SystemKind::B => {
            let l_n = big_pow(4, n as u32) * &dst[n - 1].size;
            Pattern::new(vec![PatternEntry::single(SpectralMap::ExpWinding(BigInt::from(l_n))), roots(0, l)])
        }
        _ => {
            let mut entries = vec![
                PatternEntry::single(SpectralMap::exp_winding(1)),
                PatternEntry::single(SpectralMap::exp_winding(-1)),
            ];
            if l > 1 {
                entries.push(roots(1, l - 1));
            }
            Pattern::new(entries)
        }
    };
    patterns[n - 1][n] = Pattern::new(vec![
        PatternEntry::single(SpectralMap::circle_winding(1)),
        PatternEntry::repeated(SpectralMap::Const(z_n), p - 1),
    ]);
    StepHom::new(n, n + 1, src.clone(), dst.clone(), patterns)
}

fn build(params: &SystemParams, kind: SystemKind) -> Result<InductiveSystem> {
    params.validate()?;
    let stages = stage_blocks(params);
    let steps = (1..params.stage_count).map(|n| step(params, &stages, n, kind)).collect::<Result<Vec<_>>>()?;
    InductiveSystem::new(kind, params.clone(), stages, steps)
}

/// System `A`: part `(n,n)` of step `n` is `e^{2πit}, e^{-2πit}` and the
/// nontrivial `l`-th roots of unity, `l = p_n^{k_n} - 1`.
pub fn build_system_a(params: &SystemParams) -> Result<InductiveSystem> {
    build(params, SystemKind::A)
}

/// System `B`: part `(n,n)` of step `n` is `e^{2πi l_n t}`, `l_n = 4^n·[n+1,n]`,
/// and all `l`-th roots of unity.
pub fn build_system_b(params: &SystemParams) -> Result<InductiveSystem> {
    build(params, SystemKind::B)
}

/// `l_n = 4^n·[n+1,n]`.
pub fn fast_winding(params: &SystemParams, n: usize) -> BigUint {
    big_pow(4, n as u32) * size_formula(&params.k_seq, n + 1, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::multiplicity_matrix;

    #[test]
    fn stage_two_sizes() {
        let sys = build_system_a(&SystemParams::default()).unwrap();
        let sizes: Vec<u32> = sys.stage(2).iter().map(|b| b.size.to_u32_digits()[0]).collect();
        assert_eq!(sizes, vec![4, 4]);
    }

    #[test]
    fn sizes_match_closed_form() {
        let params = SystemParams::default();
        let sys = build_system_b(&params).unwrap();
        for n in 1..=params.stage_count {
            for (i, b) in sys.stage(n).iter().enumerate() {
                assert_eq!(b.size, size_formula(&params.k_seq, n, i + 1), "[{n},{}]", i + 1);
            }
        }
    }

    #[test]
    fn step_one_parts() {
        let params = SystemParams::default();
        let a = build_system_a(&params).unwrap();
        let b = build_system_b(&params).unwrap();
        assert_eq!(a.step(1).part(0, 0).unwrap().pattern.len(), BigUint::from(4u32));
        let bp = &b.step(1).part(0, 0).unwrap().pattern;
        assert_eq!(bp.entries()[0], PatternEntry::single(SpectralMap::exp_winding(16)));
        assert_eq!(bp.entries()[1].multiplicity(), BigUint::from(3u32));
        for n in 1..params.stage_count {
            assert_eq!(multiplicity_matrix(a.step(n)), multiplicity_matrix(b.step(n)));
        }
    }
}
