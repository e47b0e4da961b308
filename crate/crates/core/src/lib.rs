//! Exact and statistical tools for weighted lacunary sums
//! `S_N(x) = sum_{k <= N} c_{k,N} f(n_k x)` on the torus.
//!
//! * [`sequences`]: exact big-integer lacunary sequences and the gap condition.
//! * [`fourier`]: finite Fourier series, norms and oscillatory integrals.
//! * [`weights`]: weight rows, Lindeberg ratio, size layers.
//! * [`diophantine`]: resonance counting and exact moments.
//! * [`blocks`]: long/buffer block partition and the dyadic martingale approximation.
//! * [`montecarlo`]: reproducible sampling with exact torus arithmetic.

pub mod blocks;
pub mod diophantine;
pub mod error;
pub mod fourier;
pub mod montecarlo;
pub mod sequences;
pub mod weights;

pub use error::{Error, Result};
pub use fourier::{Builtin, FourierFunction};
pub use sequences::LacunarySequence;
pub use weights::{WeightArray, WeightScheme};
