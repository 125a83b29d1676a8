//! Random well-typed core programs.
//!
//! Iterable variables are declared and assigned only in a prelude before any
//! loop, from expressions over the parameters, so loop bounds stay
//! proportional to the input size. After the prelude they are only read.

use rand::rngs::StdRng;
use rand::Rng;

pub struct ProgramGen<'r> {
    rng: &'r mut StdRng,
    fresh: usize,
    /// Assignable `int` variables in scope.
    ints: Vec<String>,
    /// Readable iterable variables in scope (prelude variables and loop counters).
    iters: Vec<String>,
    bools: Vec<String>,
    budget: usize,
}

const MAX_LOOP_DEPTH: usize = 3;

impl<'r> ProgramGen<'r> {
    pub fn new(rng: &'r mut StdRng) -> Self {
        ProgramGen { rng, fresh: 0, ints: Vec::new(), iters: Vec::new(), bools: Vec::new(), budget: 0 }
    }

    /// Source text of a fresh program with `arity` integer parameters.
    pub fn program(&mut self, arity: usize) -> String {
        self.fresh = 0;
        self.ints = (0..arity).map(|k| format!("x{k}")).collect();
        self.iters.clear();
        self.bools.clear();
        self.budget = self.rng.gen_range(4..=14);

        let params: Vec<String> = self.ints.iter().map(|x| format!("int {x}")).collect();
        let mut body = String::new();
        for _ in 0..self.rng.gen_range(1..=2) {
            let z = self.name("z");
            let e = self.int_expr(2);
            body += &format!("iint {z}; {z}={e}; ");
            self.iters.push(z);
        }
        for _ in 0..self.rng.gen_range(1..=2) {
            let v = self.name("v");
            body += &format!("int {v}; ");
            self.ints.push(v);
        }
        if self.rng.gen_bool(0.5) {
            let b = self.name("b");
            body += &format!("bool {b}; ");
            self.bools.push(b);
        }
        while self.budget > 0 {
            body += &self.stmt(0);
        }
        let ret = self.int_expr(2);
        format!("int main({}){{ {body}return {ret}; }}", params.join(","))
    }

    fn name(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn pick(&mut self, xs: &[String]) -> Option<String> {
        (!xs.is_empty()).then(|| xs[self.rng.gen_range(0..xs.len())].clone())
    }

    fn stmt(&mut self, loops: usize) -> String {
        self.budget = self.budget.saturating_sub(1);
        match self.rng.gen_range(0..10) {
            0..=3 => {
                let x = self.pick(&self.ints.clone()).unwrap();
                let e = self.int_expr(2);
                format!("{x}={e}; ")
            }
            4 if !self.bools.is_empty() => {
                let b = self.pick(&self.bools.clone()).unwrap();
                let e = self.bool_expr(2);
                format!("{b}={e}; ")
            }
            5 | 6 => {
                let c = self.bool_expr(2);
                let a = self.block(loops);
                let b = self.block(loops);
                format!("if({c}) {a} else {b} ")
            }
            7 | 8 if loops < MAX_LOOP_DEPTH => {
                let bound = if self.rng.gen_bool(0.75) {
                    format!("size({})", self.pick(&self.iters.clone()).unwrap())
                } else {
                    self.rng.gen_range(0..5).to_string()
                };
                let i = self.name("i");
                self.iters.push(i.clone());
                let body = self.block(loops + 1);
                self.iters.pop();
                format!("for({i}<{bound}) {body} ")
            }
            _ => self.block(loops),
        }
    }

    /// A braced block that may declare locals; they go out of scope after it.
    fn block(&mut self, loops: usize) -> String {
        let saved = (self.ints.len(), self.bools.len());
        let mut out = String::from("{ ");
        if self.rng.gen_bool(0.3) {
            let t = self.name("t");
            let e = self.int_expr(1);
            out += &format!("int {t}; {t}={e}; ");
            self.ints.push(t);
        }
        if self.rng.gen_bool(0.15) {
            let c = self.name("c");
            out += &format!("bool {c}; ");
            self.bools.push(c);
        }
        for _ in 0..self.rng.gen_range(0..=3) {
            if self.budget == 0 {
                break;
            }
            out += &self.stmt(loops);
        }
        self.ints.truncate(saved.0);
        self.bools.truncate(saved.1);
        out + "}"
    }

    fn int_expr(&mut self, depth: usize) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        if leaf {
            return match self.rng.gen_range(0..6) {
                0 => self.rng.gen_range(0..20).to_string(),
                1 => format!("0b{:b}", self.rng.gen_range(0..16)),
                2 if !self.iters.is_empty() => self.pick(&self.iters.clone()).unwrap(),
                3 if !self.iters.is_empty() => format!("size({})", self.pick(&self.iters.clone()).unwrap()),
                _ => self.pick(&self.ints.clone()).unwrap(),
            };
        }
        let a = self.int_expr(depth - 1);
        match self.rng.gen_range(0..7) {
            0 => format!("-({a})"),
            1 => format!("({a})"),
            k => {
                let b = self.int_expr(depth - 1);
                let op = ["+", "-", "/", "%", "+"][k - 2];
                format!("({a}){op}({b})")
            }
        }
    }

    fn bool_expr(&mut self, depth: usize) -> String {
        if depth == 0 || self.rng.gen_bool(0.5) {
            if !self.bools.is_empty() && self.rng.gen_bool(0.3) {
                return self.pick(&self.bools.clone()).unwrap();
            }
            let op = ["<", "<=", ">", ">=", "==", "!="][self.rng.gen_range(0..6)];
            return format!("{}{op}{}", self.int_expr(1), self.int_expr(1));
        }
        let a = self.bool_expr(depth - 1);
        match self.rng.gen_range(0..3) {
            0 => format!("!({a})"),
            1 => format!("({a})&&({})", self.bool_expr(depth - 1)),
            _ => format!("({a})||({})", self.bool_expr(depth - 1)),
        }
    }
}
