#![allow(dead_code)]

use rcndl_core::model::ConstraintSet;
use rcndl_core::parser::parse_program;
use rcndl_core::preprocess::{preprocess, PreparedNetwork};

pub const SIMPLE: &str = "?- A : [0.300000, 0.700000].
A -> B : [0.200000, 0.400000].
A -> C : [0.800000, 0.100000].
B.
C.
";

pub const CANCER: &str = "?- A : [0.800000, 0.200000].
A -> B : [0.200000, 0.800000].
A -> C : [0.050000, 0.200000].
B, C -> D : [0.050000, 0.800000, 0.800000, 0.800000].
C -> E : [0.600000, 0.800000].
D.
E.
";

pub fn network(src: &str) -> PreparedNetwork {
    preprocess(&parse_program(src).unwrap()).unwrap()
}

pub fn marginal(var: &str, p: f64, threshold: f64) -> ConstraintSet {
    ConstraintSet::marginal(var, p, threshold).unwrap()
}

pub fn assert_close(got: f64, want: f64, eps: f64, what: &str) {
    assert!(
        (got - want).abs() <= eps,
        "{what}: got {got}, want {want} (eps {eps})"
    );
}

use rand::seq::SliceRandom;
use rand::Rng;

/// A random RCNDL program over `m` variables `V0..`: a one-variable root
/// (or a two-variable clique when `m > 3` and the coin says so), then rules
/// whose heads are one or two earlier variables (one only if `single_heads`).
/// Every variable is declared observable.
pub fn random_program<R: Rng>(rng: &mut R, m: usize, single_heads: bool) -> String {
    let p = |rng: &mut R| rng.gen_range(0.05..0.95);
    let mut src = String::new();
    let root_vars = if m > 3 && rng.gen_bool(0.3) { 2 } else { 1 };
    if root_vars == 1 {
        let a = p(rng);
        src.push_str(&format!("?- V0 : [{}, {}].\n", 1.0 - a, a));
    } else {
        let mut w: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..1.0)).collect();
        let t: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= t);
        let fill = 1.0 - w[..3].iter().sum::<f64>();
        src.push_str(&format!(
            "?- V0, V1 : [{}, {}, {}, {}].\n",
            w[0],
            w[1],
            w[2],
            fill.max(0.0)
        ));
    }
    for j in root_vars..m {
        let earlier: Vec<usize> = (0..j).collect();
        let k = if single_heads || j < 2 || rng.gen_bool(0.5) {
            1
        } else {
            2
        };
        let mut head: Vec<usize> = earlier.choose_multiple(rng, k).copied().collect();
        head.sort_unstable();
        let names: Vec<String> = head.iter().map(|h| format!("V{h}")).collect();
        let cond: Vec<String> = (0..1 << k).map(|_| p(rng).to_string()).collect();
        src.push_str(&format!(
            "{} -> V{j} : [{}].\n",
            names.join(", "),
            cond.join(", ")
        ));
    }
    let obs: Vec<String> = (0..m).map(|j| format!("V{j}")).collect();
    src.push_str(&format!("{}.\n", obs.join(", ")));
    src
}

/// Random positive distribution over `n` states; with `zeros`, some states
/// are set to exactly zero.
pub fn random_probs<R: Rng>(rng: &mut R, n: usize, zeros: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            if zeros && rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen_range(0.01..1.0)
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    let t: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= t);
    v
}
