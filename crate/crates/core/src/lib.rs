//! PolyC: a small imperative language whose well-typed programs run in
//! polynomial time, together with the tooling around it: a type checker that
//! enforces the iterable-variable discipline, a big-step interpreter with cost
//! accounting, a Turing-machine compiler, instrumentation transforms, a
//! simple-form normalizer and the iterable-inference analysis.

pub mod syntax;
pub mod typecheck;
pub mod interp;
pub mod tm;
pub mod transform;
pub mod analysis;
