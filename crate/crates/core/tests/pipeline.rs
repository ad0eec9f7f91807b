use dslice::alexander::{alexander_of, is_lspace_form};
use dslice::dinvariants::{convolved_v, v_value, VSequence};
use dslice::oracle::{oracle_v, tensor_v, transfer_report};
use dslice::staircase::steps_from_alexander;
use dslice::{parse_knot, StepVector};
use proptest::prelude::*;

const SAMPLES: [&str; 5] = ["T(2,3)", "T(2,5)", "T(2,7)", "T(3,4)", "T(3,5)"];

fn steps(text: &str) -> StepVector {
    let delta = alexander_of(&parse_knot(text).unwrap()).unwrap();
    steps_from_alexander(&is_lspace_form(&delta).unwrap())
}

fn palindrome(half: Vec<i64>) -> StepVector {
    let mut v = half.clone();
    v.extend(half.iter().rev());
    StepVector::new(v).unwrap()
}

#[test]
fn sample_steps() {
    let got: Vec<Vec<i64>> = SAMPLES.iter().map(|k| steps(k).as_slice().to_vec()).collect();
    assert_eq!(
        got,
        vec![
            vec![1, 1],
            vec![1, 1, 1, 1],
            vec![1, 1, 1, 1, 1, 1],
            vec![1, 2, 2, 1],
            vec![1, 2, 1, 1, 2, 1]
        ]
    );
}

#[test]
fn oracle_matches_formula_on_samples() {
    for k in SAMPLES {
        for st in [steps(k), steps(k).doubled()] {
            for s in 0..=2 * st.genus() + 2 {
                assert_eq!(oracle_v(&st, s, None).unwrap(), v_value(&st, s), "{k} {st:?} s={s}");
            }
        }
    }
}

#[test]
fn quotient_is_acyclic_and_homology_transfers() {
    for k in SAMPLES {
        let r = transfer_report(&steps(k), None).unwrap();
        assert!(r.quotient_generators > 0, "{k}");
        assert_eq!(r.quotient_rank, 0, "{k}");
        assert_eq!(r.tensor_rank, r.doubled_rank, "{k}");
        assert_eq!(r.tensor_rank, r.translates, "{k}");
    }
}

#[test]
fn tensor_oracle_matches_convolution() {
    for k in SAMPLES {
        let st = steps(k);
        let d = st.doubled();
        for s in 0..=d.genus() + 1 {
            let t = tensor_v(&st, s, None).unwrap();
            assert_eq!(t, convolved_v(&st, s), "{k} s={s}");
            if st.max_step() == 1 {
                assert_eq!(t, v_value(&d, s), "{k} s={s}");
            }
        }
    }
    // the doubled model overshoots once steps exceed 1
    assert_eq!(tensor_v(&steps("T(3,4)"), 0, None).unwrap(), 2);
    assert_eq!(v_value(&steps("T(3,4)").doubled(), 0), 3);
}

#[test]
fn doubled_v0_is_knot_genus() {
    for k in SAMPLES {
        let st = steps(k);
        assert_eq!(VSequence::for_double(&st, 0).value(0), st.genus(), "{k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_matches_formula(half in prop::collection::vec(1i64..=3, 1..=4)) {
        let st = palindrome(half);
        prop_assume!(st.genus() <= 6);
        for s in 0..=2 * st.genus() + 2 {
            prop_assert_eq!(oracle_v(&st, s, None).unwrap(), v_value(&st, s));
        }
    }

    #[test]
    fn v_sequence_shape(half in prop::collection::vec(1i64..=3, 0..=5)) {
        let st = palindrome(half).doubled();
        let g = st.genus();
        let v = VSequence::new(&st, 2 * g + 2);
        for s in 0..v.s_max() {
            prop_assert!(v.value(s) >= v.value(s + 1));
            prop_assert!(v.value(s + 1) >= v.value(s) - 1);
        }
        for s in g..=v.s_max() {
            prop_assert_eq!(v.value(s), 0);
        }
        for s in 0..=g {
            prop_assert_eq!(v.value(0) - v.value(s), s - v.overlap_length(s));
        }
    }
}
