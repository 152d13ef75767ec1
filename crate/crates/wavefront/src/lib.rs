//! Wave-front tracking for 2×2 strictly hyperbolic, genuinely nonlinear
//! systems of conservation laws.
//!
//! The crate evolves piecewise-constant approximations by an event-driven
//! front tracking scheme, propagates first-order shifts of the fronts, and
//! provides the diagnostics used to study total-variation decay and Lipschitz
//! dependence: Glimm functionals, covering schedules, Temple-class systems,
//! structured rough initial data and a finite-volume reference solver.

pub mod cli;
pub mod datagen;
pub mod error;
pub mod fit;
pub mod fronttrack;
pub mod glimm;
pub mod hypsys;
pub mod io;
pub mod oracle;
pub mod sensitivity;
pub mod temple;
pub mod wavecurves;

pub use error::{Error, Result};
pub use fronttrack::{EngineOptions, Front, Profile, StepData};
pub use hypsys::{DomainBox, EigenFrame, Family, HyperbolicSystem, RiemannPoint};
