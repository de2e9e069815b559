//! Benchmark fixtures shared by the criterion benches.

use hazard_core::{Curve, GameInstance, ModelCurves};

/// The interior-family reference game (`p(d) = 0.1 + 0.4 d`).
pub fn interior_game() -> GameInstance {
    let curves = ModelCurves::new(Curve::constant(0.5), Curve::constant(0.1), Curve::affine(0.1, 0.4));
    GameInstance::new(1.0, 0.5, 3.0, None, curves).expect("valid fixture")
}

/// A game near the paradox region (`t = 0.9`, `f = 0.8`).
pub fn paradox_game() -> GameInstance {
    let curves = ModelCurves::new(Curve::constant(0.9), Curve::constant(0.8), Curve::affine(0.3, 0.7));
    GameInstance::new(1.0, 0.3, 2.0, None, curves).expect("valid fixture")
}
