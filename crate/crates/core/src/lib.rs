//! Exact numerics for Sarkisov links through singular Fano threefolds of genus 12.

pub mod bounds;
pub mod dplattice;
pub mod enumerate;
pub mod icalc;
pub mod linkeq;
pub mod rational;
pub mod reftable;

pub use rational::{rat, Rational};
