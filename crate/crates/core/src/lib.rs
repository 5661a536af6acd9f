//! Canonical sphere bases for the even k-dimensional subcomplexes of the
//! n-simplex and the n-cube over Z₂.
//!
//! * [`cells`] encodes faces of `Δ_n` and `Q_n`.
//! * [`gf2`] is the bit-packed elimination engine.
//! * [`complex`] holds chains, boundaries and Betti numbers.
//! * [`bases`] builds the simplex and cube sphere bases.
//! * [`counting`] evaluates the closed-form counts exactly.
//! * [`decompose`] writes even subcomplexes as sums of basis spheres.
//! * [`conjectures`] runs the Z₂ cellular spanning tree check.

pub mod bases;
pub mod cells;
pub mod complex;
pub mod conjectures;
pub mod counting;
pub mod decompose;
pub mod error;
pub mod gf2;

pub use bases::{basis, cube_basis, simplex_basis, SphereBasis, SphereBasisElement};
pub use cells::{enumerate_cells, Ambient, Cell, Coord, CubeCell, Family, SimplexCell};
pub use complex::{betti, boundary_matrix, euler_characteristic, CellComplex, Chain, SkeletonSpec};
pub use conjectures::{spanning_tree_check, TreeCheckReport};
pub use decompose::{decompose, oracle_decompose, torus_build, DecompositionResult, Method};
pub use error::{Error, Result};
pub use gf2::{BitVec, Gf2Matrix};
