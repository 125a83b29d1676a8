#![allow(dead_code)]

pub mod program_gen;

use num_bigint::BigInt;
use polyc::interp::{run_program, ArrayRef, Value};
use polyc::syntax::{parse_source, Mode, Program, TypeAnnot};

pub fn corpus_source(name: &str) -> String {
    let path = format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn corpus_program(name: &str, mode: Mode) -> Program {
    parse_source(&corpus_source(name), mode).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn int_array(xs: &[i64]) -> Value {
    Value::Array(ArrayRef::new(TypeAnnot::Int, xs.iter().map(|&x| Value::int(x)).collect()))
}

/// The unary encoding `2^n - 1`, whose bit-size is `n`.
pub fn unary(n: usize) -> Value {
    Value::int((BigInt::from(1) << n) - 1)
}

pub fn run(p: &Program, args: &[Value]) -> Value {
    run_program(p, args, false).unwrap_or_else(|e| panic!("{e}")).output
}

/// Best total value over all item subsets within the weight capacity.
pub fn knapsack_oracle(w: &[i64], v: &[i64], cap: i64) -> i64 {
    let n = w.len();
    (0u32..1 << n)
        .filter_map(|mask| {
            let chosen = (0..n).filter(|i| mask >> i & 1 == 1);
            let weight: i64 = chosen.clone().map(|i| w[i]).sum();
            (weight <= cap).then(|| chosen.map(|i| v[i]).sum())
        })
        .max()
        .unwrap_or(0)
}

/// Breadth-first reachability over a row-major adjacency matrix of `m` nodes.
pub fn reachable_oracle(m: usize, adj: &[bool], s: usize, t: usize) -> bool {
    let mut seen = vec![false; m];
    let mut queue = std::collections::VecDeque::from([s]);
    seen[s] = true;
    while let Some(u) = queue.pop_front() {
        for v in 0..m {
            if adj[u * m + v] && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen[t]
}

pub fn adjacency_string(adj: &[bool]) -> Value {
    Value::str(&adj.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
}
