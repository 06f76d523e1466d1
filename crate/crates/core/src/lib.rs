//! Computation toolkit for a Hamiltonian circle action whose
//! Duistermaat-Heckman function is not log-concave.
//!
//! * [`exterior`]: exact polynomial-coefficient differential forms.
//! * [`construction`]: the chart, connection, symplectic form and the
//!   symbolic verification battery.
//! * [`dh_measure`]: Monte-Carlo pushforward of Liouville measure.
//! * [`logconcavity`]: discrete and exact log-concavity analysis.
//! * [`toric`]: slice-volume profiles of convex polytopes.
//! * [`cli`]: the `dh-lab` command-line driver.

pub mod cli;
pub mod construction;
pub mod dh_measure;
pub mod exterior;
pub mod logconcavity;
pub mod toric;
