//! parosc: a quantum harmonic oscillator under a parametric frequency
//! drive.
//!
//! The oscillator frequency is modulated near twice its natural value,
//! `omega^2(tau) = g(tau) = 1 + h sin((2 + eps_bar) tau)`, over a window
//! of `nu` drive half-cycles. Starting from the ground state the
//! wavefunction stays Gaussian, `Psi = A(tau) exp(-B(tau) xi^2)`, so the
//! whole evolution reduces to four coupled real ODEs for `(A, B)`.
//!
//! The crate provides:
//!
//! * [`dynamics`] — adaptive integration of the `(A, B)` system through
//!   the drive window, with unitarity monitoring;
//! * [`spectral`] — occupation probabilities `p_n` of the unperturbed
//!   eigenstates (closed form and quadrature) and `<H_0>`;
//! * [`classical`] — the classical oscillator as an independent oracle:
//!   Riccati-linearized width, Floquet growth factors, and the
//!   parametric-resonance condition `|eps_bar/h| < 1/2`;
//! * [`analysis`] — power-law/exponential spectral fits, detuning sweeps
//!   and transition detection near `|r| = 1/2`.
//!
//! Everything is generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the `*64` aliases below pin the double-precision
//! variants the CLI uses.
//!
//! ```
//! use parosc::{DriveParams64, SimConfig64};
//! use parosc::dynamics::evolve;
//! use parosc::spectral::decompose;
//! use parosc::state::ground_state;
//!
//! let params = DriveParams64::from_ratio(0.03, 0.9, 300).unwrap();
//! let config = SimConfig64::default();
//! let evolved = evolve(&ground_state(), &params, &config).unwrap();
//! let spectrum = decompose(&evolved, &config);
//! assert!(spectrum.p(0).unwrap() > 0.8); // outside resonance the ground state dominates
//! ```

pub mod analysis;
pub mod classical;
pub mod drive;
pub mod dynamics;
pub mod error;
pub mod ode;
pub mod quadrature;
pub mod scalar;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub use analysis::{FitModel, FitResult, Regime, SweepResult, SweepRow};
pub use drive::{DriveParams, SimConfig};
pub use spectral::SpectralDecomposition;
pub use state::{GaussianState, TrajectorySample};

/// Double-precision aliases (the CLI lane).
pub type C64 = Complex<f64>;
pub type DriveParams64 = DriveParams<f64>;
pub type SimConfig64 = SimConfig<f64>;
pub type GaussianState64 = GaussianState<f64>;
pub type TrajectorySample64 = TrajectorySample<f64>;
pub type SpectralDecomposition64 = SpectralDecomposition<f64>;
pub type FitResult64 = FitResult<f64>;
pub type SweepResult64 = SweepResult<f64>;

/// Single-precision aliases.
pub type C32 = Complex<f32>;
pub type DriveParams32 = DriveParams<f32>;
pub type SimConfig32 = SimConfig<f32>;
pub type GaussianState32 = GaussianState<f32>;
