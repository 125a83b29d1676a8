use std::fmt::Write;

use crate::syntax::{parse_source, Mode, Program, Stmt, StmtKind};

use super::machine::{Move, Symbol, TuringMachine, HALT};
use super::TmError;

/// Clock degree used when none is given.
pub const DEFAULT_CLOCK_DEGREE: usize = 2;

/// Statements leaving `2^{d·size(z)^d}` in `o`, given an iterable `z`.
fn clock_body(d: usize) -> String {
    let mut s = String::from("int o; o=1; ");
    for j in 1..=d {
        let _ = write!(s, "for(i{j}<size(z)) ");
    }
    let _ = write!(s, "for(k<{d}){{ o=o+o; }}");
    s
}

/// A program whose output on `v` is `2^{d·size(v)^d−1}`, i.e. has size `d·size(v)^d`.
pub fn clock_program(d: usize) -> Result<Program, TmError> {
    if d == 0 {
        return Err(TmError::ZeroDegree);
    }
    let src = format!("int main(int x){{ iint z; z=x; {} return o/2; }}", clock_body(d));
    Ok(parse_source(&src, Mode::Core).expect("clock program parses"))
}

/// Compiles `m` into a CorePolyC program simulating `d·n^d` steps of `m` on the
/// encoded input (`n` is the size of the encoding).
///
/// `x` holds the cells from the head rightwards and `y` those left of it,
/// each as a ternary number under a leading 2. Every non-halting transition
/// becomes one guarded block inside the step loop.
pub fn compile_tm(m: &TuringMachine, d: usize) -> Result<Program, TmError> {
    if d == 0 {
        return Err(TmError::ZeroDegree);
    }
    let mut s = String::from("int main(int x){ int y; y=2; iint z; z=x; ");
    s += &clock_body(d);
    s += " iint cnt; cnt=o/2; int q; for(i<size(cnt)){ bool flag; ";
    for (q, a, t) in m.transitions() {
        if q == HALT {
            return Err(TmError::InvalidMachine("transition out of the halt state".into()));
        }
        let alpha = a.digit();
        let beta = t.write.digit();
        let _ = write!(s, "if(!flag && q=={q} && x%3=={alpha}){{ ");
        if a == Symbol::Blank {
            // On the sentinel the head reads a blank; grow the tape by one
            // blank cell so the write does not overwrite the sentinel.
            s += "if(x<3){ x=3*x+2; } else {} ";
        }
        let _ = write!(s, "x=x-{alpha}+{beta}; q={}; flag=true; ", t.next);
        s += match t.dir {
            Move::L => "if(y>2){ x=3*x+y%3; y=y/3; } else {} ",
            Move::R => "if(x>2){ y=3*y+x%3; x=x/3; } else { y=3*y+2; } ",
        };
        s += "} else {} ";
    }
    s += "} return x; }";
    Ok(parse_source(&s, Mode::Core).expect("compiled machine parses"))
}

/// The guarded transition blocks in the step loop of a compiled machine.
pub fn transition_blocks(p: &Program) -> usize {
    p.body
        .iter()
        .filter_map(|st| match &st.kind {
            StmtKind::For { counter, body, .. } if counter == "i" => Some(body),
            _ => None,
        })
        .map(|body| match &body.kind {
            StmtKind::Block(ss) => ss.iter().filter(|s: &&Stmt| matches!(s.kind, StmtKind::If(..))).count(),
            _ => 0,
        })
        .sum()
}
