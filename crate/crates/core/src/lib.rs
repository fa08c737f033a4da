pub mod anderson;
pub mod error;
pub mod extension;
pub mod fq;
pub mod group;
pub mod io;
pub mod lattice;
pub mod lvalues;
pub mod matrix;
pub mod nuclear;
pub mod poly;
pub mod ratfunc;
pub mod residue;
pub mod ring;
pub mod series;
pub mod twisted;

pub use error::{Error, Result};
pub use ring::{Field, Ring};
