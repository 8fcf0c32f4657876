#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod cohomology;
pub mod cremona;
pub mod exact;
pub mod families;
pub mod obstruction;
pub mod pell;
pub mod search;
pub mod staircase;
pub mod tiling;
pub mod weights;
