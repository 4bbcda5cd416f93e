//! Solution sets of Laurent binomial systems over the algebraic torus.
pub mod binomial;
pub mod homotopy;
pub mod intlinalg;
pub mod lpkernel;
pub mod mspace;
pub mod numeric;
pub mod subdivision;
pub mod testing;

pub use binomial::{BinomialSystem, ComponentParametrization, SolutionStructure};
pub use intlinalg::{IntMatrix, SnfResult};
pub use lpkernel::{LiftedPointSet, LpAnswer};
pub use homotopy::{witness_set, WitnessOptions, WitnessPoint, WitnessSet};
pub use subdivision::{degree, subdivide, Cell, DegreeReport, SubdivideOptions, Subdivision};
