//! Small-sample corrected chi-squared distributions.
//!
//! For a statistic X that is asymptotically normal with a singular idempotent
//! limiting covariance of rank k, the quadratic form T = X'X is asymptotically
//! chi-squared with k degrees of freedom. This crate computes the order-1/n
//! correction to that limit from the cumulant expansion of X: four scalar
//! constants (a, b, c, d) derived from the model's mean, covariance and
//! third/fourth cumulant coefficients, and the corrected CDF/PDF/quantiles
//! they induce. A Monte Carlo harness for the Pearson goodness-of-fit
//! statistic validates the correction empirically.

pub mod cli;
pub mod corrections;
pub mod distribution;
pub mod models;
pub mod montecarlo;
pub mod spectral;
pub mod tensors;

pub use corrections::{compute_constants, CorrectionConstants, CumulantModel};
pub use distribution::{chi2_cdf, CorrectedDistribution};
pub use models::{multinomial_model, MultinomialSpec};
pub use montecarlo::{compare, EmpiricalComparison};
pub use spectral::{split_idempotent, SpectralSplit};
pub use tensors::{Rotation, SymMatrix, SymTensor3, SymTensor4};
