//! Programs shared by the benchmarks.

use mvsl::frontend::pretty_print;
use mvsl::oracle::{generate_program, GenConfig};

/// Copies a large array and mutates the copy element by element, so every
/// run pays one copy-on-write detach.
pub fn cow_array(len: usize) -> String {
    let elems: Vec<String> = (0..len).map(|i| i.to_string()).collect();
    let mut src = format!("var a: [Int] = [{}] in\nvar b: [Int] = a in\n", elems.join(", "));
    for i in 0..len.min(64) {
        src.push_str(&format!("b[{i}] = b[{i}] + 1 in\n"));
    }
    src.push_str("a[0] + b[0]\n");
    src
}

/// A closure passed by value and called through a higher-order function.
pub const CLOSURES: &str = "\
struct Pair { var fs: Int; var sn: Int } in
let twice = (f: (Int) -> Int, x: Int) -> Int { f(f(x)) } in
var p = Pair(1, 2) in
let k = 3 in
let add = (x: Int) -> Int { x + k } in
p.fs = twice(add, p.fs) in
p.sn = twice((y: Int) -> Int { y * 2 }, p.sn) in
[p, p, p]
";

/// Generated programs at a fixed budget.
pub fn generated(count: u64, budget: usize) -> Vec<String> {
    (0..count)
        .map(|s| pretty_print(&generate_program(&GenConfig::new(s, budget))))
        .collect()
}
