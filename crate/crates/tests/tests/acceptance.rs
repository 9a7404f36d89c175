//! One PASS/FAIL line per acceptance criterion, with the individual checks
//! indented above it. Exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};

use common::{random_probs, random_program};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcndl_cli::{cmd_check, load_network, oracle_report, parse_evidence, RunFlags};
use rcndl_core::engine::{dual_objective, jeffrey_on, jeffrey_update, lec_solve, SolverOptions};
use rcndl_core::model::{ConstraintKind, ConstraintSet, JointTable, LinearRow, Scope, VariableId};
use rcndl_core::oracle::{ce_decomposition_check, expand_full_joint, oracle_mce};
use rcndl_core::preprocess::{NodeKind, PreparedNetwork};
use rcndl_core::scheduler::{apply_evidence, run_reasoning, EvidenceSet, RunTrace};

const TOL: f64 = 5e-7;

struct Check {
    ok: bool,
    what: String,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn near(&mut self, what: impl Into<String>, got: f64, want: f64, tol: f64) {
        let diff = (got - want).abs();
        self.0.push(Check {
            ok: diff <= tol,
            what: format!(
                "{}: got {got:.9}, want {want:.6}, |diff| {diff:.2e} (tol {tol:.0e})",
                what.into()
            ),
        });
    }

    fn list(&mut self, what: &str, got: &[f64], want: &[f64], tol: f64) {
        for (i, (g, w)) in got.iter().zip(want).enumerate() {
            self.near(format!("{what}[{i}]"), *g, *w, tol);
        }
        if got.len() != want.len() {
            self.that(
                format!("{what}: {} entries, want {}", got.len(), want.len()),
                false,
            );
        }
    }

    fn that(&mut self, what: impl Into<String>, ok: bool) {
        self.0.push(Check {
            ok,
            what: what.into(),
        });
    }

    fn passed(&self) -> bool {
        self.0.iter().all(|c| c.ok)
    }
}

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn simple() -> PreparedNetwork {
    load_network(&models().join("simple.rcndl")).unwrap()
}

fn cancer() -> PreparedNetwork {
    load_network(&models().join("cancer.rcndl")).unwrap()
}

fn a() -> VariableId {
    "A".into()
}

fn evidence(text: &str, threshold: f64) -> Vec<ConstraintSet> {
    parse_evidence(text, threshold).unwrap()
}

fn run(
    net: &PreparedNetwork,
    cs: Vec<ConstraintSet>,
    policy: &str,
    max_passes: usize,
) -> (PreparedNetwork, RunTrace) {
    let ev = EvidenceSet::new(cs)
        .with_policy(policy)
        .with_max_passes(max_passes);
    run_reasoning(net, &ev).unwrap()
}

fn rule_table(net: &PreparedNetwork, body: &str) -> Vec<f64> {
    net.nodes()
        .iter()
        .find(|n| matches!(&n.kind, NodeKind::Rule { body: b, .. } if b.as_str() == body))
        .map(|n| n.table.probs().to_vec())
        .unwrap()
}

fn criterion_1(c: &mut Checks) {
    let out = cmd_check(&models().join("simple.rcndl"), false)
        .unwrap()
        .stdout;
    let compact = out.replace(' ', "");
    for want in [
        "[0.240000,0.060000,0.420000,0.280000]",
        "[0.060000,0.240000,0.630000,0.070000]",
        "[0.660000,0.340000]",
        "[0.690000,0.310000]",
    ] {
        c.that(
            format!("intermediate form lists {want}"),
            compact.contains(want),
        );
    }
}

fn criterion_2(c: &mut Checks) {
    let net = simple();
    let ac = net
        .nodes()
        .iter()
        .find(|n| n.scope() == &Scope::of(&["A", "C"]))
        .unwrap();
    let post =
        jeffrey_update(&ac.table, &ConstraintSet::marginal("C", 0.95, 0.0).unwrap()).unwrap();
    c.list(
        "[A,C] after P(C)=0.95",
        post.probs(),
        &[0.004348, 0.735484, 0.045652, 0.214516],
        TOL,
    );
    c.near(
        "P(A)",
        post.variable_marginal(&a()).unwrap()[1],
        0.260168,
        TOL,
    );
}

fn criterion_3(c: &mut Checks) {
    let net = simple();
    let cs = evidence("P(B) = 0.33; P(C) = 0.95", 0.01);
    let (post, trace) = run(&net, cs.clone(), "greatest-gradient", 100);
    let order: Vec<&str> = trace.steps.iter().map(|s| s.label.as_str()).collect();
    c.that(
        format!("threshold 0.01: order {order:?}, {} pass(es)", trace.passes),
        order == ["P(C)", "P(B)"] && trace.passes == 1,
    );

    let mut replay = net.clone();
    let wants = [
        [0.591866, 0.147966, 0.156101, 0.104067],
        [0.530171, 0.193740, 0.139829, 0.136260],
    ];
    for (step, want) in trace.steps.iter().zip(wants) {
        apply_evidence(&mut replay, &cs[step.constraint], &SolverOptions::default()).unwrap();
        c.list(
            &format!("[A,B] after {}", step.label),
            &rule_table(&replay, "B"),
            &want,
            TOL,
        );
    }
    c.near("P(A)", post.marginal(&a()).unwrap()[1], 0.276089, TOL);
    let gc = trace
        .final_gradients
        .iter()
        .find(|g| g.label == "P(C)")
        .unwrap();
    c.near("|grad C|", gc.norm, 0.002700, TOL);

    let (post, _) = run(
        &net,
        evidence("P(B) = 0.33; P(C) = 0.95", 0.001),
        "greatest-gradient",
        100,
    );
    c.near(
        "threshold 0.001: P(A)",
        post.marginal(&a()).unwrap()[1],
        0.274341,
        TOL,
    );
}

struct Row {
    b: f64,
    c: f64,
    b_first: [f64; 2],
    c_first: [Option<f64>; 2],
    mce: f64,
}

const TABLE: [Row; 6] = [
    Row {
        b: 0.33,
        c: 0.95,
        b_first: [0.290038, 0.274248],
        c_first: [Some(0.276089), Some(0.274341)],
        mce: 0.274364,
    },
    Row {
        b: 1.0,
        c: 0.15,
        b_first: [0.866627, 0.866627],
        c_first: [Some(0.895002), Some(0.866627)],
        mce: 0.866537,
    },
    Row {
        b: 0.15,
        c: 0.67,
        b_first: [0.429631, 0.435663],
        c_first: [Some(0.418813), Some(0.433291)],
        mce: 0.433053,
    },
    Row {
        b: 0.27,
        c: 0.05,
        b_first: [0.873383, 0.870505],
        c_first: [Some(0.869070), Some(0.871116)],
        mce: 0.871064,
    },
    Row {
        b: 0.65,
        c: 0.85,
        b_first: [0.379245, 0.398768],
        c_first: [Some(0.415431), Some(0.393405)],
        mce: 0.394492,
    },
    Row {
        b: 0.95,
        c: 0.85,
        b_first: [0.443543, 0.448283],
        c_first: [Some(0.457625), None],
        mce: 0.447418,
    },
];

/// Step 1 is the value after both constraints have been used once; step 2
/// after the fourth use in the first row and the third use elsewhere (the
/// final value when the run stops earlier).
fn table_steps(
    net: &PreparedNetwork,
    first: (&str, f64),
    second: (&str, f64),
    row: usize,
) -> [f64; 2] {
    let cs = vec![
        ConstraintSet::marginal(first.0, first.1, 0.0).unwrap(),
        ConstraintSet::marginal(second.0, second.1, 0.0).unwrap(),
    ];
    let (post, trace) = run(net, cs, "program", 2);
    let last = post.marginal(&a()).unwrap()[1];
    let at = |uses: usize| trace.marginal_after(uses, &a()).unwrap_or(last);
    [at(2), at(if row == 0 { 4 } else { 3 })]
}

fn criterion_4(c: &mut Checks) {
    let net = simple();
    for (i, r) in TABLE.iter().enumerate() {
        let bf = table_steps(&net, ("B", r.b), ("C", r.c), i);
        let cf = table_steps(&net, ("C", r.c), ("B", r.b), i);
        for s in 0..2 {
            c.near(
                format!("row {} B-first step {}", i + 1, s + 1),
                bf[s],
                r.b_first[s],
                TOL,
            );
            if let Some(want) = r.c_first[s] {
                c.near(
                    format!("row {} C-first step {}", i + 1, s + 1),
                    cf[s],
                    want,
                    TOL,
                );
            }
        }
        let cs = evidence(&format!("P(B) = {}; P(C) = {}", r.b, r.c), 0.0);
        let flags = RunFlags {
            threshold: 0.0,
            max_passes: 2,
            ..RunFlags::default()
        };
        let report = oracle_report(&net, cs, &flags).unwrap();
        c.near(
            format!("row {} oracle MCE", i + 1),
            report.oracle("A").unwrap(),
            r.mce,
            TOL,
        );
    }
}

fn criterion_5(c: &mut Checks) {
    let (post, trace) = run(
        &cancer(),
        evidence("D = false; E = true", 1e-3),
        "greatest-gradient",
        100,
    );
    c.that(
        format!("{} pass(es), converged {}", trace.passes, trace.converged),
        trace.passes == 1 && trace.converged,
    );
    c.near("P(A)", post.marginal(&a()).unwrap()[1], 0.097278, TOL);
    for g in &trace.final_gradients {
        c.that(
            format!("final gradient {} = {:e}", g.label, g.norm),
            g.norm == 0.0,
        );
    }
}

fn criterion_6(c: &mut Checks) {
    let net = cancer();
    let cs = evidence("P(D) = 0.75; P(E) = 0.10", 0.0);
    let (_, trace) = run(&net, cs.clone(), "greatest-gradient", 1);
    c.that(
        format!("greatest gradient uses {} first", trace.steps[0].label),
        trace.steps[0].label == "P(E)",
    );
    c.near(
        "E first, one pass: P(A)",
        trace.marginal_after(2, &a()).unwrap(),
        0.336083,
        TOL,
    );

    let joint = expand_full_joint(&net).unwrap();
    let truth = oracle_mce(&joint, &cs, 1e-12).unwrap();
    c.near(
        "oracle P(A)",
        truth.joint.marginal(&a()).unwrap()[1],
        0.336007,
        TOL,
    );

    let (_, trace) = run(&net, cs, "program", 2);
    let pass1 = trace.marginal_after(2, &a()).unwrap();
    let pass2 = trace.marginal_after(4, &a()).unwrap();
    c.that(
        format!(
            "D first: |P(A) - 0.336007| after pass 1 = {:.2e} (> 1e-4)",
            (pass1 - 0.336007).abs()
        ),
        (pass1 - 0.336007).abs() > 1e-4,
    );
    c.that(
        format!(
            "D first: |P(A) - 0.336007| after pass 2 = {:.2e} (<= 1e-4)",
            (pass2 - 0.336007).abs()
        ),
        (pass2 - 0.336007).abs() <= 1e-4,
    );
}

fn xscope(m: usize) -> Scope {
    let names: Vec<String> = (0..m).map(|i| format!("X{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Scope::of(&refs)
}

fn subscope<R: Rng>(rng: &mut R, s: &Scope) -> Scope {
    let k = rng.gen_range(1..=s.len());
    let mut vars: Vec<VariableId> = s.vars().choose_multiple(rng, k).cloned().collect();
    vars.shuffle(rng);
    Scope::new(vars).unwrap()
}

fn valid(t: &JointTable) -> bool {
    t.probs().iter().all(|&p| p >= 0.0) && (t.total() - 1.0).abs() <= 1e-9
}

fn criterion_7(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut all_valid = true;

    // (b)
    let mut worst_target = 0.0_f64;
    let mut worst_cond = 0.0_f64;
    for _ in 0..1000 {
        let s = xscope(rng.gen_range(1..=4));
        let table =
            JointTable::new(s.clone(), random_probs(&mut rng, s.num_states(), true)).unwrap();
        let part = subscope(&mut rng, &s);
        let prior = table.marginal_probs(&part).unwrap();
        let mut targets: Vec<f64> = prior
            .iter()
            .map(|&m| {
                if m > 0.0 {
                    rng.gen_range(0.0..1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let t: f64 = targets.iter().sum();
        targets.iter_mut().for_each(|x| *x /= t);
        let post = jeffrey_on(&table, &part, &targets).unwrap();
        all_valid &= valid(&post);
        let got = post.marginal_probs(&part).unwrap();
        for (g, w) in got.iter().zip(&targets) {
            worst_target = worst_target.max((g - w).abs());
        }
        let proj = s.projection(&part).unwrap();
        for (state, (&p0, &p1)) in table.probs().iter().zip(post.probs()).enumerate() {
            let l = proj[state];
            if prior[l] > 0.0 && targets[l] > 0.0 {
                worst_cond = worst_cond.max((p0 / prior[l] - p1 / got[l]).abs());
            }
        }
    }
    c.that(
        format!("(b) Jeffrey, 1000 instances: target error {worst_target:.1e}, conditional drift {worst_cond:.1e}"),
        worst_target <= 1e-12 && worst_cond <= 1e-12,
    );

    // (c)
    let mut worst_rel = 0.0_f64;
    let h = 1e-6;
    for _ in 0..100 {
        let s = xscope(rng.gen_range(1..=3));
        let n = s.num_states();
        let table = JointTable::new(s, random_probs(&mut rng, n, false)).unwrap();
        let rows: Vec<LinearRow> = (0..rng.gen_range(1..=2))
            .map(|_| LinearRow {
                coeffs: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                rhs: rng.gen_range(-0.5..0.5),
            })
            .collect();
        let lambda: Vec<f64> = (0..=rows.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, grad) = dual_objective(&table, &rows, &lambda).unwrap();
        let mut diff = 0.0;
        for k in 0..lambda.len() {
            let (mut up, mut down) = (lambda.clone(), lambda.clone());
            up[k] += h;
            down[k] -= h;
            let fd = (dual_objective(&table, &rows, &up).unwrap().0
                - dual_objective(&table, &rows, &down).unwrap().0)
                / (2.0 * h);
            diff += (grad[k] - fd).powi(2);
        }
        let size: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        worst_rel = worst_rel.max(diff.sqrt() / size.max(1e-12));
    }
    c.that(format!("(c) dual gradient vs central differences, 100 instances: max relative error {worst_rel:.1e}"), worst_rel <= 1e-5);

    // (d)
    let mut worst_lec = 0.0_f64;
    for _ in 0..100 {
        let s = xscope(rng.gen_range(1..=4));
        let table =
            JointTable::new(s.clone(), random_probs(&mut rng, s.num_states(), false)).unwrap();
        let part = subscope(&mut rng, &s);
        let targets = random_probs(&mut rng, part.num_states(), false);
        let con = ConstraintSet::new(
            "m",
            ConstraintKind::Marginal {
                scope: part,
                targets,
            },
            0.0,
        )
        .unwrap();
        let (lec, _) = lec_solve(&table, &con, &SolverOptions::default()).unwrap();
        all_valid &= valid(&lec);
        let jef = jeffrey_update(&table, &con).unwrap();
        for (x, y) in lec.probs().iter().zip(jef.probs()) {
            worst_lec = worst_lec.max((x - y).abs());
        }
    }
    c.that(
        format!("(d) dual solver vs Jeffrey, 100 instances: max difference {worst_lec:.1e}"),
        worst_lec <= 1e-6,
    );

    // (e), (g), (a)
    let mut worst_limit = 0.0_f64;
    let mut worst_consistency = 0.0_f64;
    for _ in 0..50 {
        let m = rng.gen_range(3..=5);
        let net = common::network(&random_program(&mut rng, m, false));
        let vars: Vec<usize> = (0..m).collect();
        let cs: Vec<ConstraintSet> = vars
            .choose_multiple(&mut rng, 2)
            .map(|&v| {
                ConstraintSet::marginal(&format!("V{v}"), rng.gen_range(0.1..0.9), 1e-7).unwrap()
            })
            .collect();
        let mut stepped = net.clone();
        for _ in 0..3 {
            for con in &cs {
                apply_evidence(&mut stepped, con, &SolverOptions::default()).unwrap();
                all_valid &= stepped.nodes().iter().all(|n| valid(&n.table));
                all_valid &= stepped.groups().iter().all(|g| valid(&g.joint));
                worst_consistency = worst_consistency.max(stepped.consistency_error());
            }
        }
        let (post, trace) = run(&net, cs.clone(), "greatest-gradient", 10_000);
        all_valid &= trace.converged;
        let truth = oracle_mce(&expand_full_joint(&net).unwrap(), &cs, 1e-12).unwrap();
        for v in net.variables() {
            worst_limit = worst_limit
                .max((post.marginal(v).unwrap()[1] - truth.joint.marginal(v).unwrap()[1]).abs());
        }
    }
    c.that(
        format!("(e) scheduler vs oracle, 50 networks: max difference {worst_limit:.1e}"),
        worst_limit <= 1e-4,
    );
    c.that(
        format!("(g) cross-clause consistency after every step: worst {worst_consistency:.1e}"),
        worst_consistency <= 1e-9,
    );
    c.that(
        "(a) every table nonnegative with unit sum after every operation",
        all_valid,
    );

    // (f)
    let cases: [(&str, PreparedNetwork, &str); 3] = [
        (
            "simple, threshold 0.001",
            simple(),
            "P(B) = 0.33; P(C) = 0.95",
        ),
        (
            "Cancer, D = false, E = true",
            cancer(),
            "D = false; E = true",
        ),
        (
            "Cancer, P(D) = 0.75, P(E) = 0.10",
            cancer(),
            "P(D) = 0.75; P(E) = 0.10",
        ),
    ];
    for (name, net, text) in cases {
        let (post, _) = run(&net, evidence(text, 0.001), "greatest-gradient", 100);
        let (full, parts) = ce_decomposition_check(&net, &post).unwrap();
        c.that(
            format!("(f) decomposition on {name}: full {full:.9} vs clause-wise {parts:.9}"),
            (full - parts).abs() <= 1e-9,
        );
    }
}

fn criterion_8(c: &mut Checks) {
    let net = simple();
    for threshold in [0.01, 0.001] {
        for (i, r) in TABLE.iter().enumerate() {
            for (name, text) in [
                ("B listed first", format!("P(B) = {}; P(C) = {}", r.b, r.c)),
                ("C listed first", format!("P(C) = {}; P(B) = {}", r.c, r.b)),
            ] {
                let (_, g) = run(&net, evidence(&text, threshold), "greatest-gradient", 100);
                let (_, p) = run(&net, evidence(&text, threshold), "program", 100);
                c.that(
                    format!(
                        "threshold {threshold}, row {}, {name}: greatest-gradient {} pass(es), program {}",
                        i + 1,
                        g.passes,
                        p.passes
                    ),
                    g.converged && p.converged && g.passes <= p.passes,
                );
            }
        }
    }
}

type Criterion = (&'static str, fn(&mut Checks));

fn main() {
    let criteria: [Criterion; 8] = [
        ("intermediate form", criterion_1),
        ("single Jeffrey step", criterion_2),
        ("iteration trace", criterion_3),
        (
            "constraint table, both orderings and MCE values",
            criterion_4,
        ),
        ("certain evidence in one pass", criterion_5),
        ("uncertain evidence, ordering and oracle", criterion_6),
        ("property suite", criterion_7),
        ("greatest gradient needs no more passes", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (title, f)) in criteria.iter().enumerate() {
        let mut checks = Checks::default();
        f(&mut checks);
        for ch in &checks.0 {
            println!("    [{}] {}", if ch.ok { " ok " } else { "MISS" }, ch.what);
        }
        let verdict = if checks.passed() { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} - {title}", i + 1);
        if !checks.passed() {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("all criteria pass");
    } else {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
