//! Towers of algebraic curves: level equations and structure maps, point
//! counts over prime fields, genus and gonality bounds, genus-0 dynamical
//! towers over Q, and spectra of Schreier graphs.

pub mod algebra;
pub mod dynamics;
pub mod towers;
pub mod pointcount;
pub mod bounds;
pub mod spectra;
