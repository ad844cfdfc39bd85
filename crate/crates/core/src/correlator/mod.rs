//! Two-particle EPR correlations: the per-momentum kernel, its sharp-momentum
//! closed form and Monte Carlo averages over wave packets.

mod distribution;
mod kernel;
pub(crate) mod mc;

pub use distribution::{momentum_for_velocity, MomentumDistribution, MomentumPair, MomentumProfile};
pub use kernel::{correlator_integrand, correlator_mixed, correlator_sharp, velocity_kernel};
pub use mc::{correlator_mc, CorrelatorEstimate, CHUNK_SIZE, MIN_SAMPLES};
