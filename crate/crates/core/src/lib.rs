//! Model checking of actor systems under injected grey failures.
//!
//! Systems are terms of a timed calculus with mailboxes, checkpoints and
//! latent messages; a curse assigns every node and link a health status per
//! time unit. Reliability properties reduce to weak barbed (bi)similarity on
//! the explored state spaces.

pub mod barbs;
pub mod curse;
pub mod dsl;
pub mod equivalence;
pub mod lts;
pub mod matching;
pub mod reliability;
pub mod report;
pub mod semantics;
pub mod syntax;
