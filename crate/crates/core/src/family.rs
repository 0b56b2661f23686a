//! The fixed family of test functions behind every norm certificate: hats
//! at dyadic nodes, a ramp (a tent on the circle), trigonometric functions
//! up to frequency 8, and seeded random piecewise-linear functions.
//! Every member has sup-norm at most 1 and a recorded Lipschitz constant.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aff::AffElement;
use crate::grid::GridFunction;
use crate::scalar::Scalar;
use crate::space::Space;
use crate::system::Block;

pub const RANDOM_MEMBERS: usize = 100;
const MAX_FREQUENCY: u32 = 8;
const PL_PIECES: usize = 16;

#[derive(Clone, Debug)]
pub struct TestFunction<S> {
    pub name: String,
    pub func: GridFunction<S>,
    pub lipschitz: f64,
    pub nonnegative: bool,
}

fn dist(space: Space, x: f64, c: f64) -> f64 {
    let d = (x - c).abs();
    match space {
        Space::Circle => d.min(1.0 - d),
        _ => d,
    }
}

/// Piecewise-linear interpolation of `values` at `j/PL_PIECES`.
fn piecewise_linear(values: &[f64], x: f64) -> f64 {
    let pos = x.clamp(0.0, 1.0) * PL_PIECES as f64;
    let i = (pos.floor() as usize).min(PL_PIECES - 1);
    let w = pos - i as f64;
    values[i] * (1.0 - w) + values[i + 1] * w
}

/// Random walk with slopes in `[-1, 1]`; on the circle the drift is removed
/// so the walk closes up, and the result halved to keep the slope bound.
fn random_pl(space: Space, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let h = 1.0 / PL_PIECES as f64;
    let mut steps: Vec<f64> = (0..PL_PIECES).map(|_| rng.gen_range(-h..=h)).collect();
    let start: f64 = rng.gen_range(-0.5..=0.5);
    if space == Space::Circle {
        let drift = steps.iter().sum::<f64>() / PL_PIECES as f64;
        steps.iter_mut().for_each(|s| *s = (*s - drift) / 2.0);
    }
    let mut values = vec![start];
    for s in steps {
        values.push(values.last().copied().unwrap_or(0.0) + s);
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 1.0 {
        values.iter_mut().for_each(|v| *v /= peak);
    }
    values
}

/// The family on one space. Point blocks get constants only.
pub fn test_family<S: Scalar>(space: Space, resolution: usize, seed: u64) -> Vec<TestFunction<S>> {
    let mut out: Vec<TestFunction<S>> = Vec::new();
    let mut push = |name: String, lipschitz: f64, nonnegative: bool, f: &dyn Fn(f64) -> f64| {
        out.push(TestFunction {
            name,
            func: GridFunction::from_fn(space, resolution, |x| S::of_f64(f(x))),
            lipschitz,
            nonnegative,
        });
    };
    if space == Space::Point {
        for c in [0.0, 0.25, 0.5, 1.0, -0.5, -1.0] {
            push(format!("const {c}"), 0.0, c >= 0.0, &move |_| c);
        }
        return out;
    }
    for d in 1..=3u32 {
        let scale = (1u32 << d) as f64;
        for j in (1..(1u32 << d)).step_by(2) {
            let c = j as f64 / scale;
            push(format!("hat {j}/{}", 1u32 << d), scale, true, &move |x| (1.0 - dist(space, x, c) * scale).max(0.0));
        }
    }
    match space {
        Space::Circle => push("tent".into(), 2.0, true, &|x| 2.0 * dist(space, x, 0.0)),
        _ => push("ramp".into(), 1.0, true, &|x| x),
    }
    for nu in 1..=MAX_FREQUENCY {
        let w = TAU * nu as f64;
        push(format!("sin {nu}"), w, false, &move |x| (w * x).sin());
        push(format!("cos {nu}"), w, false, &move |x| (w * x).cos());
        push(format!("(1+sin {nu})/2"), w / 2.0, true, &move |x| (1.0 + (w * x).sin()) / 2.0);
        push(format!("(1+cos {nu})/2"), w / 2.0, true, &move |x| (1.0 + (w * x).cos()) / 2.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (space as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    for r in 0..RANDOM_MEMBERS {
        let values = random_pl(space, &mut rng);
        let v2 = values.clone();
        push(format!("random pl {r}"), 1.0, false, &move |x| piecewise_linear(&values, x));
        push(format!("random pl {r} shifted"), 0.5, true, &move |x| (1.0 + piecewise_linear(&v2, x)) / 2.0);
    }
    out
}

/// Elements of a stage built from the family: element `k` takes member
/// `k + 37·i` (cyclically) on block `i`. With `nonnegative_only` only the
/// nonnegative members are used.
pub fn test_elements<S: Scalar>(
    stage: usize,
    blocks: &[Block],
    resolution: usize,
    seed: u64,
    nonnegative_only: bool,
) -> Vec<(AffElement<S>, f64)> {
    let families: Vec<Vec<TestFunction<S>>> = blocks
        .iter()
        .map(|b| {
            test_family::<S>(b.space, resolution, seed)
                .into_iter()
                .filter(|t| !nonnegative_only || t.nonnegative)
                .collect()
        })
        .collect();
    let count = families.iter().map(Vec::len).max().unwrap_or(0);
    (0..count)
        .map(|k| {
            let picks: Vec<&TestFunction<S>> =
                families.iter().enumerate().map(|(i, fam)| &fam[(k + 37 * i) % fam.len()]).collect();
            let lip = picks.iter().map(|t| t.lipschitz).fold(0.0, f64::max);
            (AffElement::new(stage, picks.iter().map(|t| t.func.clone()).collect()), lip)
        })
        .collect()
}
