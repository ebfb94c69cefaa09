//! Information-flow interfaces and components: relation algebra, stateless and
//! stateful checks, trace semantics, and a textual specification language.

pub mod relalg;
pub mod stateless;
pub mod stateful;
pub mod hypersem;
pub mod speclang;
pub mod cli;
