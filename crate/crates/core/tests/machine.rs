mod common;

use haltkit::machine::{self, certify, BinStr, Certification, RunOutcome};
use proptest::prelude::*;

fn bits(p: &BinStr) -> Vec<bool> {
    p.bits().to_vec()
}

#[test]
fn interpreter_agrees_with_reference_up_to_12() {
    let empty = BinStr::empty();
    for p in common::all_programs(12) {
        let prog = BinStr::from_bits(p.clone());
        let ours = machine::run(&prog, &empty, 10_000);
        match (ours.halted(), common::resim(&p, &[], 10_000)) {
            (Some((out, steps)), Some((ref_out, ref_steps))) => {
                assert_eq!(out.bits(), &ref_out[..], "{prog}");
                assert_eq!(steps, ref_steps, "{prog}");
            }
            (None, None) => {}
            (a, b) => panic!("{prog}: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn certificates_are_sound_at_ten_times_budget() {
    let empty = BinStr::empty();
    let mut diverging = 0;
    for p in common::all_programs(12) {
        let prog = BinStr::from_bits(p.clone());
        match certify(&prog, &empty, 1_000, 100_000) {
            Certification::Halts { steps, output } => {
                let (out, s) = common::resim(&p, &[], 1_000).expect("reference halts");
                assert_eq!((output.bits(), steps), (&out[..], s), "{prog}");
            }
            Certification::Diverges { .. } => {
                diverging += 1;
                assert!(common::resim(&p, &[], 10_000).is_none(), "{prog} halts");
            }
            Certification::Unknown => panic!("{prog} left unknown"),
        }
    }
    assert_eq!(diverging, 2679);
}

#[test]
fn helper_programs() {
    let empty = BinStr::empty();
    assert!(matches!(
        machine::run(&machine::halt_program(), &empty, 1),
        RunOutcome::Halted { steps: 1, .. }
    ));
    assert!(matches!(
        certify(&machine::loop_program(), &empty, 100, 1000),
        Certification::Diverges { .. }
    ));
    let input: BinStr = "1101".parse().unwrap();
    let (out, _) = machine::run(&machine::echo_program(), &input, 1000).halted().map(|(o, s)| (o.clone(), s)).unwrap();
    assert_eq!(out, input);
}

fn arb_bits(max: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 0..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn run_matches_reference(p in arb_bits(36), input in arb_bits(8)) {
        let prog = BinStr::from_bits(p.clone());
        let inp = BinStr::from_bits(input.clone());
        let ours = machine::run(&prog, &inp, 3000).halted().map(|(o, s)| (o.bits().to_vec(), s));
        prop_assert_eq!(ours, common::resim(&p, &input, 3000));
    }

    #[test]
    fn certify_never_contradicts_reference(p in arb_bits(30)) {
        let prog = BinStr::from_bits(p.clone());
        match certify(&prog, &BinStr::empty(), 500, 10_000) {
            Certification::Halts { steps, .. } => {
                prop_assert_eq!(common::resim(&p, &[], 500).map(|r| r.1), Some(steps));
            }
            Certification::Diverges { .. } => prop_assert!(common::resim(&p, &[], 5000).is_none()),
            Certification::Unknown => {}
        }
    }

    #[test]
    fn binstr_text_roundtrip(p in arb_bits(64)) {
        let s = BinStr::from_bits(p);
        let back: BinStr = s.to_string().parse().unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(bits(&back).len(), s.len());
    }
}
