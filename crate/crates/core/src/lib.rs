pub mod error;
pub mod frobcoh;
pub mod frobenius;
pub mod gen;
pub mod json;
pub mod lie;
pub mod linalg;
pub mod monodromy;
pub mod padic;
pub mod phinabla;
pub mod pi1;
pub mod series;
pub mod smatrix;

pub use error::{Error, Result};
