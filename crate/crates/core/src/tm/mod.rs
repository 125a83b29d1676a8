//! Turing machines: a direct simulator, the ternary tape encoding, the
//! polynomial clock generator and the compiler from machines to CorePolyC.
//!
//! The tape is one-way infinite over {0, 1, B}. State 0 starts, state 1
//! halts. Moving left from the leftmost cell leaves the head in place.

mod compile;
mod encode;
mod machine;

pub use compile::{clock_program, compile_tm, transition_blocks, DEFAULT_CLOCK_DEGREE};
pub use encode::{decode_output, encode_input};
pub use machine::{Configuration, Move, Symbol, Transition, TuringMachine, HALT, START};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TmError {
    #[error("line {line}: {message}")]
    Spec { line: usize, message: String },
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("input must be a binary string, found {0:?}")]
    NonBinaryInput(char),
    #[error("machine did not halt within {0} steps")]
    FuelExhausted(u64),
    #[error("malformed tape: {0}")]
    MalformedTape(String),
    #[error("clock degree must be at least 1")]
    ZeroDegree,
}

/// Runs `m` on `input` for at most `fuel` steps and returns the tape at halt,
/// trailing blanks stripped.
pub fn tm_run(m: &TuringMachine, input: &str, fuel: u64) -> Result<String, TmError> {
    let mut c = Configuration::initial(input)?;
    let mut steps = 0;
    while c.state != HALT {
        if steps == fuel {
            return Err(TmError::FuelExhausted(fuel));
        }
        c.step(m);
        steps += 1;
    }
    c.output()
}
