pub mod error;
pub mod exactla;

pub use error::{Error, Result};
pub mod statmodel;
pub mod check;
pub mod hilbert;
pub mod ratser;
pub mod braid;
pub mod classify;
pub mod koszul;
pub mod fock;
pub mod modelfile;
pub mod report;
pub mod replay;
