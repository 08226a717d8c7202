//! Equilibria of the finite-horizon SI social-distancing game.
//!
//! Individuals choose a spending rate `c(t)` that scales their infection
//! hazard by `(1 - m c)^+` while the epidemic follows SI dynamics. The crate
//! provides
//!
//! - [`model`]: the logistic prevalence and survival-probability closed forms,
//! - [`lambert`]: the real principal branch of Lambert W,
//! - [`delay`]: the restricted game over delay strategies (equilibrium,
//!   burden, stability checks),
//! - [`filippov`]: the general game's necessary conditions in
//!   decision-potential coordinates `(I, Φ)`,
//! - [`oracle`]: an RK4 simulator and brute-force best-response search that
//!   verify the closed forms independently,
//! - [`cli`]: the command implementations behind the `si-distancing` binary.
//!
//! ```
//! use si_distancing::{delay, GameParams};
//!
//! let params = GameParams::new(6.0, 0.02, 6.0)?;
//! let eq = delay::nash_equilibrium(&params);
//! assert!((eq.x_star - 2.87).abs() < 0.01);
//! # Ok::<(), si_distancing::Error>(())
//! ```

pub mod cli;
pub mod delay;
pub mod error;
pub mod filippov;
pub mod lambert;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{GameParams, Prevalence};
