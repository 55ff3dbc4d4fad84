#![no_std]

extern crate alloc;

pub mod char_sums;
pub mod cocycle;
pub mod dft;
pub mod error;
pub mod group;
pub mod names;
pub mod primes;
pub mod sbh;
pub mod spectral;

pub use error::{Error, Result};
