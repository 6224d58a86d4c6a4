//! Spectral exterior calculus on flat tori and a harness of compensated
//! compactness experiments built on it.

pub mod cli;
pub mod error;
pub mod extrapolate;
pub mod fft;
pub mod form;
pub mod grid;
pub mod harness;
pub mod hodge;
pub mod immersion;
pub mod io;
pub mod memory;
pub mod multi_index;
pub mod quadrature;
pub mod random;
pub mod sequence;
pub mod spectral;

pub use error::{HodgeError, Result};
pub use form::Form;
pub use grid::TorusGrid;
pub use multi_index::MultiIndex;
pub use spectral::SpectralForm;
