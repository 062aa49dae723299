//! Exact and numeric tools for the μ-sine subtraction law and the
//! d'Alembert-type equation on semigroups.

pub mod codec;
pub mod feq;
pub mod ideal;
pub mod linalg;
pub mod morphism;
pub mod oracle;
pub mod scalar;
pub mod semigroup;
pub mod window;

pub use feq::{Carrier, Context, ContextFile, DescriptorError, Residual};
pub use ideal::{chi_structure, is_compatible, ChiIdealStructure, CompatibilityReport};
pub use morphism::{CFun, CharValue, InvolutiveAutomorphism, MultiplicativeFunction, MuFunction};
pub use scalar::{Rational, Scalar};
pub use semigroup::{Canonical, ElementSet, FiniteSemigroup, SemigroupError, SemigroupFile};
pub use num_complex::Complex64;
pub use oracle::{completeness_sweep, OracleConfig, SweepReport};
pub use window::{builtin_lattice2d, builtin_line_with_inversion, verify_window, WindowCarrier};
