use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::TmError;

pub const START: usize = 0;
pub const HALT: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Zero,
    One,
    Blank,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Blank];

    /// Ternary digit representing the symbol on the encoded tape.
    pub fn digit(self) -> u32 {
        match self {
            Symbol::Zero => 0,
            Symbol::One => 1,
            Symbol::Blank => 2,
        }
    }

    pub fn from_digit(d: u32) -> Option<Symbol> {
        Symbol::ALL.get(d as usize).copied()
    }

    pub fn from_bit(c: char) -> Result<Symbol, TmError> {
        match c {
            '0' => Ok(Symbol::Zero),
            '1' => Ok(Symbol::One),
            _ => Err(TmError::NonBinaryInput(c)),
        }
    }

    fn parse(s: &str) -> Option<Symbol> {
        match s {
            "0" => Some(Symbol::Zero),
            "1" => Some(Symbol::One),
            "B" => Some(Symbol::Blank),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Blank => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    L,
    R,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next: usize,
    pub write: Symbol,
    pub dir: Move,
}

/// A deterministic single-tape machine with states `0..num_states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    num_states: usize,
    transitions: BTreeMap<(usize, Symbol), Transition>,
}

impl TuringMachine {
    /// Checks that the halt state has no transitions and every other state has
    /// one per symbol.
    pub fn new(num_states: usize, transitions: BTreeMap<(usize, Symbol), Transition>) -> Result<Self, TmError> {
        if num_states < 2 {
            return Err(TmError::InvalidMachine("a machine needs at least the start and halt states".into()));
        }
        for (&(q, a), t) in &transitions {
            if q == HALT {
                return Err(TmError::InvalidMachine(format!("transition out of the halt state on {a}")));
            }
            if q >= num_states || t.next >= num_states {
                return Err(TmError::InvalidMachine(format!("state out of range in transition q{q} {a}")));
            }
        }
        for q in (0..num_states).filter(|&q| q != HALT) {
            for a in Symbol::ALL {
                if !transitions.contains_key(&(q, a)) {
                    return Err(TmError::InvalidMachine(format!("missing transition for q{q} {a}")));
                }
            }
        }
        Ok(TuringMachine { num_states, transitions })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn delta(&self, q: usize, a: Symbol) -> Option<&Transition> {
        self.transitions.get(&(q, a))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Symbol, &Transition)> {
        self.transitions.iter().map(|(&(q, a), t)| (q, a, t))
    }
}

fn parse_state(s: &str) -> Option<usize> {
    s.strip_prefix('q')?.parse().ok()
}

impl FromStr for TuringMachine {
    type Err = TmError;

    /// Reads the text format: `states: n`, `halt: 1`, then one
    /// `q<i> <sym> -> q<j> <sym'> <L|R>` per line. `#` starts a comment.
    fn from_str(src: &str) -> Result<Self, TmError> {
        let mut num_states = None;
        let mut transitions = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| TmError::Spec { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(n) = line.strip_prefix("states:") {
                num_states = Some(n.trim().parse::<usize>().map_err(|_| err(format!("bad state count '{}'", n.trim())))?);
                continue;
            }
            if let Some(h) = line.strip_prefix("halt:") {
                if h.trim() != HALT.to_string() {
                    return Err(err(format!("the halt state must be {HALT}")));
                }
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let [q, a, "->", r, b, d] = words[..] else {
                return Err(err(format!("expected 'q<i> <sym> -> q<j> <sym> <L|R>', found '{line}'")));
            };
            let q = parse_state(q).ok_or_else(|| err(format!("bad state '{q}'")))?;
            let next = parse_state(r).ok_or_else(|| err(format!("bad state '{r}'")))?;
            let a = Symbol::parse(a).ok_or_else(|| err(format!("bad symbol '{a}'")))?;
            let write = Symbol::parse(b).ok_or_else(|| err(format!("bad symbol '{b}'")))?;
            let dir = match d {
                "L" => Move::L,
                "R" => Move::R,
                _ => return Err(err(format!("bad move '{d}'"))),
            };
            if transitions.insert((q, a), Transition { next, write, dir }).is_some() {
                return Err(err(format!("duplicate transition for q{q} {a}")));
            }
        }
        let n = num_states.ok_or(TmError::Spec { line: 0, message: "missing 'states:' line".into() })?;
        TuringMachine::new(n, transitions)
    }
}

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.num_states)?;
        writeln!(f, "halt: {HALT}")?;
        for (q, a, t) in self.transitions() {
            writeln!(f, "q{q} {a} -> q{} {} {}", t.next, t.write, t.dir)?;
        }
        Ok(())
    }
}

/// A configuration `uqw`: the head reads the first symbol of `right`
/// (a blank when `right` is empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub left: Vec<Symbol>,
    pub state: usize,
    pub right: Vec<Symbol>,
}

impl Configuration {
    pub fn initial(input: &str) -> Result<Self, TmError> {
        let right = input.chars().map(Symbol::from_bit).collect::<Result<_, _>>()?;
        Ok(Configuration { left: Vec::new(), state: START, right })
    }

    pub fn head(&self) -> Symbol {
        self.right.first().copied().unwrap_or(Symbol::Blank)
    }

    /// Performs one transition; a configuration in the halt state is left unchanged.
    pub fn step(&mut self, m: &TuringMachine) {
        let Some(t) = m.delta(self.state, self.head()) else { return };
        if self.right.is_empty() {
            self.right.push(t.write);
        } else {
            self.right[0] = t.write;
        }
        self.state = t.next;
        match t.dir {
            Move::R => self.left.push(self.right.remove(0)),
            Move::L => {
                if let Some(s) = self.left.pop() {
                    self.right.insert(0, s);
                }
            }
        }
    }

    /// The whole tape as a binary string with trailing blanks stripped.
    pub fn output(&self) -> Result<String, TmError> {
        let mut tape: Vec<Symbol> = self.left.iter().chain(&self.right).copied().collect();
        while tape.last() == Some(&Symbol::Blank) {
            tape.pop();
        }
        if !self.left.is_empty() {
            return Err(TmError::MalformedTape("the head did not return to the leftmost cell".into()));
        }
        if tape.contains(&Symbol::Blank) {
            return Err(TmError::MalformedTape("blank inside the output".into()));
        }
        Ok(tape.iter().map(|s| s.to_string()).collect())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.left {
            write!(f, "{s}")?;
        }
        write!(f, "q{}", self.state)?;
        for s in &self.right {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}
