//! Exact construction, verification and interpolation of one-dimensional
//! wavelet sets.
//!
//! All set-theoretic work happens in the field ℚ + ℚπ ([`scalar`]), on finite
//! unions of half-open intervals ([`interval`]). On top of that:
//!
//! * [`congruence`] decides translation/dilation congruence with witnesses
//!   and certifies wavelet sets;
//! * [`families`] builds the classical examples (Shannon, Journé and their
//!   one-parameter paths, sets through a prescribed subset, non-dyadic sets);
//! * [`interpolation`] builds the homogeneous interpolation map between two
//!   wavelet sets and classifies it (involution, torsion, congruence powers);
//! * [`coefficient`] evaluates the coefficient criterion for interpolated
//!   wavelets and synthesizes them;
//! * [`spectral`] is a closed-form Fourier-side oracle used to check
//!   orthonormality numerically.

pub mod coefficient;
pub mod congruence;
pub mod cyclotomic;
pub mod error;
pub mod families;
pub mod interpolation;
pub mod interval;
pub mod rings;
pub mod scalar;
pub mod spectral;

pub use congruence::{
    dilation_congruence, is_wavelet_set, translation_congruence, CongruenceFailure,
    DilationWitness, TranslationWitness, WaveletSetCertificate, WaveletSetFailure,
};
pub use error::{Error, ParseError, Result};
pub use interval::{Interval, IntervalSet};
pub use scalar::{rat, ExactScalar};
