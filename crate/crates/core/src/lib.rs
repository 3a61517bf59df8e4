//! Synthesis of unified causal theories from symbolic sensory sequences.
//!
//! A theory is a typed signature, a set of initial atoms, static and causal
//! rules, and exclusion constraints. Its trace is the deterministic state
//! sequence the rules generate under a frame axiom. The engine searches for
//! the cheapest theory whose trace covers an observed sequence while meeting
//! four unity conditions, then reads predictions off the trace.

pub mod lang;
pub mod trace;
pub mod unity;
pub mod cost;
pub mod synth;
pub mod domains;
pub mod eval;
