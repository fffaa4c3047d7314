//! Sagittal-plane walking on the linear inverted pendulum, stabilized by a
//! foot-placement law that regulates the angular momentum about the stance
//! contact.
//!
//! The crate is organized around one step cycle:
//!
//! - [`lip`] — the closed-form stance flow of `(p, L)` (CoM offset, angular
//!   momentum about the contact), plus an independent Runge-Kutta oracle;
//! - [`estimator`] — the running end-of-step momentum estimate;
//! - [`impact`] — the momentum-conserving step-exchange map;
//! - [`controller`] — the placement law that lands the end-of-next-step
//!   momentum on a target in a single step, and a velocity-parameterized
//!   baseline;
//! - [`simulator`] — the hybrid closed loop over many steps, with
//!   disturbance injection and full logging;
//! - [`analysis`] — step-to-step map, spectrum, and a randomized
//!   certificate of the one-step regulation property.
//!
//! Sign convention used throughout: relative positions are CoM minus foot,
//! positive forward. A foot planted ahead of the CoM therefore corresponds
//! to a negative placement value.
//!
//! All types are plain values and all operations are pure functions; they
//! can be shared and called from any number of threads.

pub mod analysis;
pub mod controller;
pub mod error;
pub mod estimator;
pub mod impact;
pub mod lip;
pub mod params;
pub mod simulator;

pub use error::{Error, Result};
pub use impact::FootPlacementCommand;
pub use lip::PendulumState;
pub use params::PendulumParams;
pub use simulator::{ScenarioConfig, TrajectoryLog};
