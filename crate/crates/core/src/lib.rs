//! Orientably-regular maps given as pairs of dart permutations.
//!
//! The crate validates maps, decides chirality, forms parallel products and
//! classifies them, tests the index-2 exceptional structure, searches for
//! chiral maps with alternating or symmetric groups, and builds certified
//! chiral smooth covers of hyperbolic maps.
//!
//! ```
//! use regmap::seed::torus_map_44;
//! use regmap::map::{is_reflexible, Chirality};
//!
//! let m = torus_map_44(2, 1).unwrap();
//! assert_eq!(m.darts(), 20);
//! assert_eq!(is_reflexible(&m).verdict, Chirality::Chiral);
//! ```

pub mod cli;
pub mod exceptional;
pub mod io;
pub mod map;
pub mod perm;
pub mod pipeline;
pub mod product;
pub mod seed;

pub use map::{Chirality, MapError, MapType, OrientedMap};
pub use perm::{Perm, PermError};
