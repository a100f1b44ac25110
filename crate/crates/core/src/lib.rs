#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod equivalence;
pub mod invariants;
pub mod numerics;
pub mod states;
pub mod testkit;
