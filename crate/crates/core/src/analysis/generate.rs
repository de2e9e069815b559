//! Seeded random game instances.
//!
//! `beta` and `y` are uniform on `[0, 1]`, `r` is log-uniform on `(1, 10]`.
//! `t` and `f` are affine in `y` with `f < t` at both ends (hence everywhere),
//! and `p` is affine and strictly increasing inside `[0, 1]`. Half of the crash
//! curves are drawn near zero so that the reckless families show up.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::Curve;
use crate::model::{GameInstance, Mode, ModelCurves};

pub struct InstanceSampler {
    rng: ChaCha8Rng,
}

impl InstanceSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn curves(&mut self) -> ModelCurves {
        let rng = &mut self.rng;
        let t0 = rng.gen_range(0.05..=1.0);
        let t1 = rng.gen_range(0.05..=1.0);
        let f0 = t0 * rng.gen_range(0.0..0.999);
        let f1 = t1 * rng.gen_range(0.0..0.999);
        let (a, b) = if rng.gen_bool(0.5) {
            let a = rng.gen_range(0.0..0.9);
            (a, rng.gen_range(0.01..=(1.0 - a)))
        } else {
            let a = rng.gen_range(0.0..0.15);
            (a, rng.gen_range(0.001..0.3))
        };
        ModelCurves::new(
            Curve::affine(t0, t1 - t0),
            Curve::affine(f0, f1 - f0),
            Curve::affine(a, b),
        )
    }

    pub fn instance(&mut self, mode: Mode) -> GameInstance {
        let curves = self.curves();
        let beta = self.rng.gen_range(0.0..=1.0);
        let y = self.rng.gen_range(0.0..=1.0);
        let r = 10f64.powf(self.rng.gen_range(1e-6..=1.0));
        let exo_p = match mode {
            Mode::Exogenous => {
                let (lo, hi) = (curves.p.eval(0.0), curves.p.eval(1.0));
                Some(self.rng.gen_range(lo..=hi))
            }
            Mode::Endogenous => None,
        };
        GameInstance::new(beta, y, r, exo_p, curves).expect("sampler draws valid instances")
    }

    /// Endogenous and exogenous instances in alternation.
    pub fn mixed_batch(&mut self, count: usize) -> Vec<GameInstance> {
        (0..count)
            .map(|i| {
                let mode = if i % 2 == 0 {
                    Mode::Endogenous
                } else {
                    Mode::Exogenous
                };
                self.instance(mode)
            })
            .collect()
    }

    pub fn batch(&mut self, count: usize, mode: Mode) -> Vec<GameInstance> {
        (0..count).map(|_| self.instance(mode)).collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
