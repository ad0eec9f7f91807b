//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use dslice::alexander::{alexander_of, is_lspace_form};
use dslice::dinvariants::{axis_overlap_length, lens_d, surgery_d, v_value, DTable, VSequence};
use dslice::obstruction::{enumerate_metabolizers, metabolizer::rref, obstruct_family, LinkingForm, ObstructOptions};
use dslice::oracle::{oracle_v, transfer_report};
use dslice::signatures::{independence_check, jump_function, parse_relation};
use dslice::staircase::steps_from_alexander;
use dslice::{parse_knot, Exec, StepVector, Q};

const SAMPLES: [&str; 5] = ["T(2,3)", "T(2,5)", "T(2,7)", "T(3,4)", "T(3,5)"];

fn dslice(args: &[&str]) -> (Vec<u8>, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dslice")).args(args).output().unwrap();
    let took = start.elapsed();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    (out.stdout, took)
}

fn dslice_json(args: &[&str]) -> (Value, Duration) {
    let (out, took) = dslice(args);
    (serde_json::from_slice(&out).unwrap(), took)
}

fn steps(text: &str) -> StepVector {
    let delta = alexander_of(&parse_knot(text).unwrap()).unwrap();
    steps_from_alexander(&is_lspace_form(&delta).unwrap())
}

/// The sample knots, their doubles, and 20 random palindromic vectors with g <= 8.
fn tested_sequences() -> Vec<StepVector> {
    let mut out: Vec<StepVector> = SAMPLES.iter().flat_map(|k| [steps(k), steps(k).doubled()]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    while out.len() < 2 * SAMPLES.len() + 20 {
        let len = rng.gen_range(1..=4);
        let half: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=3)).collect();
        if half.iter().sum::<i64>() > 8 {
            continue;
        }
        let mut v = half.clone();
        v.extend(half.iter().rev());
        out.push(StepVector::new(v).unwrap());
    }
    out
}

/// Number of 2-dimensional isotropic subspaces of `(F_k)^4` under
/// `diag(1, -1, 1, -1) / k`: ordered isotropic bases divided by `|GL_2(F_k)|`.
fn isotropic_planes(k: i64) -> usize {
    let q = |v: &[i64; 4]| (v[0] * v[0] - v[1] * v[1] + v[2] * v[2] - v[3] * v[3]).rem_euclid(k);
    let b = |u: &[i64; 4], v: &[i64; 4]| (u[0] * v[0] - u[1] * v[1] + u[2] * v[2] - u[3] * v[3]).rem_euclid(k);
    let mut iso = Vec::new();
    for a in 0..k.pow(4) {
        let v = [a % k, a / k % k, a / (k * k) % k, a / (k * k * k)];
        if v != [0; 4] && q(&v) == 0 {
            iso.push(v);
        }
    }
    let mut bases = 0usize;
    for u in &iso {
        for v in &iso {
            let dependent = (1..k).any(|c| (0..4).all(|i| (c * u[i] - v[i]).rem_euclid(k) == 0));
            if b(u, v) == 0 && !dependent {
                bases += 1;
            }
        }
    }
    let gl2 = ((k * k - 1) * (k * k - k)) as usize;
    assert_eq!(bases % gl2, 0);
    bases / gl2
}

fn criterion_1() {
    for n in ["1", "2"] {
        let (v, took) = dslice_json(&["obstruct", "T(2,3)", "5", "7", "--n", n]);
        assert!(took < Duration::from_secs(10), "n = {n} took {took:?}");
        assert_eq!(v["not_slice"], true);
        for verdict in v["verdicts"].as_array().unwrap() {
            let k = verdict["prime"].as_i64().unwrap();
            assert_eq!(verdict["obstructed"], true, "k = {k}");
            let expected = if n == "1" { 2 } else { isotropic_planes(k) };
            assert_eq!(
                verdict["metabolizers"].as_u64().unwrap() as usize,
                expected,
                "k = {k}, n = {n}"
            );
            let certs = verdict["certificates"].as_array().unwrap();
            assert_eq!(certs.len(), expected);
            for c in certs {
                let d = c["dbar"].as_str().unwrap();
                assert_ne!(d, "0/1");
            }
        }
    }
}

fn criterion_2() {
    for n in ["1", "2"] {
        let (v, _) = dslice_json(&["obstruct", "T(2,3)", "3", "5", "--n", n]);
        let k3 = &v["verdicts"][0];
        assert_eq!(k3["prime"], 3);
        assert_eq!(k3["obstructed"], false);
        assert_eq!(k3["threshold"]["2m+1"], 3);
        let certs = k3["certificates"].as_array().unwrap();
        if n == "1" {
            assert_eq!(certs.len(), 2);
        }
        assert!(certs.iter().any(|c| c["dbar"].is_null()));
        if n == "1" {
            assert!(certs.iter().all(|c| c["dbar"].is_null()));
        }
    }
    // every element of both n = 1 metabolizers has vanishing d-bar
    let vs = VSequence::for_double(&steps("T(2,3)"), 3);
    let a = surgery_d(&vs, 3).unwrap();
    let b = DTable::lens(3).unwrap().negated();
    for m in [[1, 1], [1, 2]] {
        for c in 0..3 {
            let (x, y) = ((c * m[0]) % 3, (c * m[1]) % 3);
            assert_eq!(a.dbar[x as usize] + b.dbar[y as usize], Q::from_integer(0));
        }
    }
}

fn criterion_3() {
    let start = Instant::now();
    for k in SAMPLES {
        let r = transfer_report(&steps(k), None).unwrap();
        assert!(r.quotient_generators > 0);
        assert_eq!(r.quotient_rank, 0, "{k}");
    }
    assert!(start.elapsed() < Duration::from_secs(30), "took {:?}", start.elapsed());
}

fn criterion_4() {
    let seqs = tested_sequences();
    let exec = Exec::Parallel;
    let results = exec.map(&seqs, |st| {
        (0..=2 * st.genus() + 2).all(|s| oracle_v(st, s, None).unwrap() == v_value(st, s))
    });
    for (st, ok) in seqs.iter().zip(results) {
        assert!(ok, "{:?}", st.as_slice());
    }
}

fn criterion_5() {
    for st in tested_sequences() {
        let g = st.genus();
        let v = VSequence::new(&st, 2 * g + 2);
        for s in 0..v.s_max() {
            assert!(v.value(s) >= v.value(s + 1));
            assert!(v.value(s + 1) >= v.value(s) - 1);
        }
        for s in 2 * g..=v.s_max() {
            assert_eq!(v.value(s), 0);
        }
    }
}

fn criterion_6() {
    let doubles = tested_sequences().into_iter().map(|s| s.doubled());
    for d in doubles {
        let v = VSequence::new(&d, d.genus());
        for s in 0..=d.genus() {
            assert_eq!(
                v.value(0) - v.value(s),
                s - axis_overlap_length(&d, s),
                "{:?} s={s}",
                d.as_slice()
            );
            assert_eq!(v.overlap_length(s), axis_overlap_length(&d, s));
        }
    }
}

/// `-max (k - j^2) / 4k` over odd `j ≡ 2i - k (mod 2k)`.
fn lens_by_characteristic(k: i64, i: i64) -> Q {
    -(-3 * k..=3 * k)
        .filter(|j| (j - (2 * i - k)).rem_euclid(2 * k) == 0)
        .map(|j| Q::new(k - j * j, 4 * k))
        .max()
        .unwrap()
}

fn all_tables() -> Vec<DTable> {
    let mut tables = Vec::new();
    for k in [1, 3, 5, 7, 11, 13] {
        tables.push(DTable::lens(k).unwrap());
        for knot in SAMPLES {
            tables.push(surgery_d(&VSequence::for_double(&steps(knot), k), k).unwrap());
        }
    }
    tables
}

fn criterion_7() {
    for k in (1..=25).step_by(2) {
        let direct: Vec<Q> = (0..k).map(|i| lens_d(k, i).unwrap()).collect();
        let oracle: Vec<Q> = (0..k).map(|i| lens_by_characteristic(k, i)).collect();
        let relabeled: Vec<Q> = (0..k).map(|i| oracle[((k - i) % k) as usize]).collect();
        assert!(direct == oracle || direct == relabeled, "k = {k}");
    }
    for t in all_tables() {
        assert!(t.is_conjugation_symmetric(), "k = {}", t.k);
        for i in 1..t.k as usize {
            assert_eq!(t.d[i], t.d[t.k as usize - i]);
        }
    }
}

fn criterion_8() {
    for t in all_tables() {
        assert_eq!(t.dbar[0], Q::from_integer(0));
        let n = t.negated();
        for i in 0..t.k as usize {
            assert_eq!(n.d[i], -t.d[i]);
            assert_eq!(n.dbar[i], -t.dbar[i]);
        }
    }
}

fn criterion_9() {
    for k in [3, 5, 7, 11] {
        let form = LinkingForm::new(k, vec![1, -1]);
        let found: Vec<Vec<i64>> = enumerate_metabolizers(&form, 2, Exec::Sequential)
            .unwrap()
            .into_iter()
            .map(|m| m.basis[0].clone())
            .collect();
        // every order-k subgroup is generated by a nonzero vector
        let mut brute = BTreeSet::new();
        for a in 0..k {
            for b in 0..k {
                if (a, b) == (0, 0) {
                    continue;
                }
                let isotropic = (0..k).all(|c| (c * c * (a * a - b * b)).rem_euclid(k) == 0);
                if isotropic {
                    brute.insert(rref(k, vec![vec![a, b]]).remove(0));
                }
            }
        }
        assert_eq!(found, brute.into_iter().collect::<Vec<_>>());
        assert_eq!(found, vec![vec![1, 1], vec![1, k - 1]]);
    }
}

fn criterion_10() {
    let (u, _) = dslice_json(&["obstruct", "U", "5", "7", "--n", "2"]);
    assert_eq!(u["not_slice"], false);
    assert!(u["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v["obstructed"] == false));
    let opts = ObstructOptions::default();
    for companion in ["T(2,3)", "T(3,4)", "C(2,3;T(2,3))", "U"] {
        let r = obstruct_family(&parse_knot(companion).unwrap(), &[1], 2, &opts).unwrap();
        assert!(!r.not_slice, "{companion}");
        assert_eq!(r.verdicts[0].metabolizers, 1);
    }
    for (k1, k2) in [(3, 5), (5, 7), (5, 11), (7, 11), (11, 13)] {
        for companion in ["T(2,3)", "T(3,4)", "U"] {
            let j = parse_knot(&format!(
                "C(2,{k1};{companion}) # -T(2,{k1}) # -C(2,{k2};{companion}) # T(2,{k2})"
            ))
            .unwrap();
            let f = jump_function(&j).unwrap();
            assert_eq!(f.at(Q::new(1, 2 * k1)), 0);
            assert_eq!(f.at(Q::new(1, 2 * k2)), 0);
        }
    }
}

fn relation_text(coeffs: &[(i64, i64, i64)]) -> String {
    coeffs
        .iter()
        .flat_map(|&(k, n, m)| [(n, format!("T(2,{k})")), (m, format!("C(2,{k};T(2,3))"))])
        .filter(|(c, _)| *c != 0)
        .map(|(c, t)| format!("{}{}*{t}", if c < 0 { "-" } else { "+" }, c.abs()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn criterion_11() {
    let primes = [5, 7, 11];
    let opts = ObstructOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut unbalanced = 0;
    let mut dispatched = 0;
    for _ in 0..60 {
        let coeffs: Vec<(i64, i64, i64)> = primes
            .iter()
            .map(|&k| {
                let m = rng.gen_range(-2..=2);
                let n = if rng.gen_bool(0.5) { -m } else { rng.gen_range(-3..=3) };
                (k, n, m)
            })
            .collect();
        let text = relation_text(&coeffs);
        let cert = independence_check(&parse_relation(&text).unwrap(), &opts).unwrap();
        let off: Vec<i64> = coeffs.iter().filter(|c| c.1 != -c.2).map(|c| c.0).collect();
        for p in &cert.probes {
            let (_, n, m) = *coeffs.iter().find(|c| c.0 == p.k).unwrap();
            assert_eq!(p.total, -(n + m), "{text}");
            assert_eq!(p.forced, n == -m);
        }
        if !off.is_empty() {
            unbalanced += 1;
            assert!(cert.signature_obstructed && cert.not_slice, "{text}");
            assert!(cert.obstruction.is_none());
        } else if coeffs.iter().any(|c| c.2 != 0) {
            dispatched += 1;
            let report = cert.obstruction.as_ref().expect("residual dispatched");
            assert!(report.verdicts.iter().all(|v| v.obstructed), "{text}");
            assert!(cert.not_slice);
        }
    }
    assert!(unbalanced > 0 && dispatched > 0);
    for k in primes {
        for n in 1..=2 {
            let text = format!("{n}*T(2,{k}) - {n}*C(2,{k};T(2,3))");
            let cert = independence_check(&parse_relation(&text).unwrap(), &opts).unwrap();
            assert!(cert.probes[0].forced);
            assert!(cert.obstruction.unwrap().verdicts[0].obstructed, "{text}");
        }
    }
}

fn criterion_12() {
    let runs: [&[&str]; 6] = [
        &["obstruct", "T(2,3)", "5", "7", "--n", "2"],
        &["obstruct", "T(2,3)", "3", "5"],
        &["independence", "2*T(2,5) - 2*C(2,5;T(2,3)) + T(2,7) - C(2,7;T(2,3))"],
        &["vs", "T(3,5)", "--oracle"],
        &["dtable", "T(3,4)", "7"],
        &["obstruct", "T(2,3)", "5", "--n", "3", "--sample", "5", "--seed", "3"],
    ];
    for args in runs {
        let (a, _) = dslice(args);
        let (b, _) = dslice(args);
        assert_eq!(a, b, "{args:?}");
        let mut seq = vec!["--sequential"];
        seq.extend_from_slice(args);
        assert_eq!(a, dslice(&seq).0, "{args:?} sequential");
    }
}

fn main() {
    let criteria: [(&str, fn()); 12] = [
        ("family obstructed at k = 5, 7 for n = 1, 2", criterion_1),
        ("threshold sharpness at k = 3", criterion_2),
        ("acyclicity of the quotient complex", criterion_3),
        ("V-sequence oracle equivalence", criterion_4),
        ("monotonicity and unit steps", criterion_5),
        ("overlap identity", criterion_6),
        ("lens d-invariants and conjugation symmetry", criterion_7),
        ("spin normalization and orientation reversal", criterion_8),
        ("metabolizer census at n = 1", criterion_9),
        ("slice control", criterion_10),
        ("signature independence", criterion_11),
        ("determinism", criterion_12),
    ];
    std::panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name} ({:.2?})", i + 1, start.elapsed());
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
