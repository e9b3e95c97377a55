//! Spectra, errors, information complexity and tractability verdicts for
//! approximation in spaces with tensor-product Gaussian covariance kernels.

pub mod complexity;
pub mod error;
pub mod extreal;
pub mod logreal;
pub mod quadrature;
pub mod shape;
pub mod sum;
pub mod sweep;
pub mod tensor;
pub mod tractability;
pub mod univariate;
pub mod verify;

pub use error::{GkError, Result};
pub use logreal::LogReal;
pub use shape::ShapeSequence;
pub use tensor::{avg_error, open_stream, worst_error, EigenStream, ErrorValue, TensorIndex};
pub use univariate::UnivariateSpectrum;
