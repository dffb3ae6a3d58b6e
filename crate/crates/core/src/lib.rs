// SPDX-License-Identifier: Apache-2.0
//! Gate-level models of early output dual-rail asynchronous adders.
//!
//! Netlist generators for single-bit and dual-bit early output full adders
//! and hybrid ripple-carry adders built from them, a deterministic
//! event-driven simulator with a four-phase handshake driver, static
//! critical-path analysis against closed-form latency expressions, and
//! functional oracles.

pub mod codes;
pub mod delay;
pub mod generators;
pub mod netlist;
pub mod simulator;
pub mod timing;
pub mod verification;
