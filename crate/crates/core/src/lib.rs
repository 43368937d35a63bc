//! Exact algebra of chain complexes over integral group rings of finite groups.
//!
//! Arithmetic is exact throughout: coefficients are arbitrary-precision
//! integers and every linear problem is solved through Smith normal form.

pub mod complex;
pub mod dual_form;
pub mod error;
pub mod group;
pub mod grmat;
pub mod intmat;
pub mod io;
pub mod lens;

pub use complex::{ChainComplex, ChainHomotopy, ChainMap, Coefficients, Generators};
pub use dual_form::{DualFormView, NormalizedDuality, ObstructionReport, Segment, SegmentIso};
pub use error::{Error, GroupError, Result};
pub use group::{cyclic_group, group_from_table, FiniteGroup, GroupRingElement};
pub use grmat::GRMatrix;
pub use intmat::{AbelianGroupInfo, IntegerMatrix};
pub use lens::{lens_complex, lens_duality_map, LensInstance};
