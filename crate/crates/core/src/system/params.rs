//! Parameters shared by the two systems.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{big_pow, nth_prime, primes, rational, van_der_corput};
use crate::error::{Error, Result};
use crate::space::{Space, SpectrumPoint};
use crate::Rational;

/// Step `n` (from stage `n` to stage `n+1`) uses `k_seq[n-1]`, `t_seq[n-1]`
/// and `z_seq[n-1]`; only the first `stage_count - 1` entries are read.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    pub k_seq: Vec<u32>,
    pub t_seq: Vec<SpectrumPoint>,
    pub z_seq: Vec<SpectrumPoint>,
    pub stage_count: usize,
    pub grid_resolution: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::with_default_sequences(vec![2, 3, 4, 5, 6], 6, 4096)
    }
}

impl SystemParams {
    /// `t_n = vdc(n)` and `z_n = e^{2πi·vdc(n)}` with `vdc` the base-2 van
    /// der Corput sequence.
    pub fn with_default_sequences(k_seq: Vec<u32>, stage_count: usize, grid_resolution: usize) -> Self {
        let steps = stage_count.saturating_sub(1).max(k_seq.len());
        let t_seq = (1..=steps as u64)
            .map(|n| SpectrumPoint::interval(van_der_corput(n)).expect("vdc lies in [0,1)"))
            .collect();
        let z_seq = (1..=steps as u64).map(|n| SpectrumPoint::circle(van_der_corput(n))).collect();
        Self { k_seq, t_seq, z_seq, stage_count, grid_resolution }
    }

    /// Number of connecting maps, `stage_count - 1`.
    pub fn steps(&self) -> usize {
        self.stage_count.saturating_sub(1)
    }

    /// `p_n`, 1-based.
    pub fn prime(&self, n: usize) -> u64 {
        nth_prime(n)
    }

    /// `k_j` for step `j`, 1-based.
    pub fn k(&self, j: usize) -> u32 {
        self.k_seq[j - 1]
    }

    /// `p_i^{k_j}`.
    pub fn prime_power(&self, i: usize, j: usize) -> u64 {
        let p = self.prime(i);
        p.checked_pow(self.k(j)).expect("prime power fits u64")
    }

    /// `Σ_{j=m}^{steps} p_n^{-k_j}`, empty (zero) when `m > steps`.
    pub fn tail_sum(&self, n: usize, m: usize) -> Rational {
        let p = self.prime(n);
        (m.max(1)..=self.steps())
            .map(|j| Rational::new(BigInt::from(1), BigInt::from(big_pow(p, self.k(j)))))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.stage_count == 0 {
            return bad("stage_count must be at least 1".into());
        }
        if self.grid_resolution < 2 {
            return bad(format!("grid_resolution must be at least 2, got {}", self.grid_resolution));
        }
        let steps = self.steps();
        if self.k_seq.len() < steps {
            return bad(format!("k_seq has {} entries but {steps} steps need one each", self.k_seq.len()));
        }
        if let Some(&k1) = self.k_seq.first() {
            if k1 < 2 {
                return bad(format!("k_1 must exceed 1, got {k1}"));
            }
        }
        if let Some(w) = self.k_seq.windows(2).find(|w| w[0] >= w[1]) {
            return bad(format!("k_seq must be strictly increasing, found {} then {}", w[0], w[1]));
        }
        let ps = primes(steps.max(1));
        for j in 1..=steps {
            if ps[j - 1].checked_pow(self.k(j)).is_none() {
                return bad(format!("p_{j}^k_{j} overflows 64 bits"));
            }
        }
        if self.t_seq.len() < steps || self.z_seq.len() < steps {
            return bad(format!("t_seq and z_seq need at least {steps} points"));
        }
        if let Some(p) = self.t_seq.iter().take(steps).find(|p| p.space() != Space::Interval) {
            return bad(format!("t_seq point {p} is not an interval point"));
        }
        if let Some(p) = self.z_seq.iter().take(steps).find(|p| p.space() != Space::Circle) {
            return bad(format!("z_seq point {p} is not a circle point"));
        }
        let quarter = rational(1, 4);
        for n in 1..steps {
            for m in n + 1..=steps {
                let tail = self.tail_sum(n, m);
                if tail > quarter {
                    return bad(format!(
                        "tail condition fails: sum_(j>={m}) p_{n}^(-k_j) = {} > 1/4",
                        crate::arith::rational_to_string(&tail)
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SystemParams::default().validate().unwrap();
    }

    #[test]
    fn tail_example() {
        let p = SystemParams::with_default_sequences(vec![2, 3, 4, 5], 5, 64);
        assert_eq!(p.tail_sum(1, 2), rational(7, 32));
        assert_eq!(p.tail_sum(1, 5), rational(0, 1));
        assert_eq!(p.tail_sum(3, 6), rational(0, 1));
    }

    #[test]
    fn rejects_bad_sequences() {
        for k in [vec![3, 3, 4], vec![1, 3, 4], vec![4, 3, 5]] {
            assert!(SystemParams::with_default_sequences(k, 4, 64).validate().is_err());
        }
        assert!(SystemParams::with_default_sequences(vec![2, 3, 4], 4, 1).validate().is_err());
    }

    #[test]
    fn default_sequences_are_van_der_corput() {
        let p = SystemParams::default();
        assert_eq!(p.t_seq[0].exact_coordinate().unwrap(), &rational(1, 2));
        assert_eq!(p.t_seq[2].exact_coordinate().unwrap(), &rational(3, 4));
        assert_eq!(p.z_seq[1].exact_coordinate().unwrap(), &rational(1, 4));
    }
}
