//! Independent implementation of the outcome-report wire layout,
//! cross-checked against the library's encoder/decoder so a second
//! implementation written from the format description alone interoperates.
//!
//! Layout: claimed bit (1 bit) ‖ N as 32-bit big-endian ‖ detection bitmap
//! (N bits, index order) ‖ outcomes of detected qubits in index order.

use proptest::prelude::*;
use relbc_core::channels::{decode_outcomes, encode_outcomes, Bits};

/// Encoder written directly from the format description, over plain chars.
fn independent_encode(claimed: bool, outcomes: &[bool], detected: &[bool]) -> String {
    let mut s = String::new();
    s.push(if claimed { '1' } else { '0' });
    s.push_str(&format!("{:032b}", detected.len() as u32));
    for &d in detected {
        s.push(if d { '1' } else { '0' });
    }
    for &o in outcomes {
        s.push(if o { '1' } else { '0' });
    }
    s
}

/// Decoder written directly from the format description.
fn independent_decode(bits: &str) -> Option<(bool, Vec<bool>, Vec<bool>)> {
    let chars: Vec<char> = bits.chars().collect();
    if chars.len() < 33 {
        return None;
    }
    let claimed = chars[0] == '1';
    let n = chars[1..33]
        .iter()
        .fold(0usize, |acc, &c| acc * 2 + (c == '1') as usize);
    if chars.len() < 33 + n {
        return None;
    }
    let detected: Vec<bool> = chars[33..33 + n].iter().map(|&c| c == '1').collect();
    let count = detected.iter().filter(|&&d| d).count();
    if chars.len() != 33 + n + count {
        return None;
    }
    let outcomes: Vec<bool> = chars[33 + n..].iter().map(|&c| c == '1').collect();
    Some((claimed, detected, outcomes))
}

#[test]
fn frozen_example_layout() {
    // claimed bit 0, N = 2, both detected, outcomes [1, 0]:
    // 0 ‖ 00000000000000000000000000000010 ‖ 11 ‖ 10
    let lib = encode_outcomes(false, &[true, false], &[true, true]).unwrap();
    assert_eq!(lib.to_binary_string(), format!("0{:032b}1110", 2u32));
    assert_eq!(
        lib.to_binary_string(),
        independent_encode(false, &[true, false], &[true, true])
    );
}

#[test]
fn library_decodes_independent_encodings() {
    let detected = vec![true, false, true, true, false];
    let outcomes = vec![false, true, true];
    let foreign = independent_encode(true, &outcomes, &detected);
    let parsed = decode_outcomes(&Bits::from_binary_string(&foreign).unwrap()).unwrap();
    assert!(parsed.claimed_bit);
    assert_eq!(parsed.detected, detected);
    assert_eq!(parsed.outcomes, outcomes);
}

proptest! {
    #[test]
    fn encoders_agree_bit_for_bit(
        claimed in any::<bool>(),
        detected in proptest::collection::vec(any::<bool>(), 0..120),
        raw_outcomes in proptest::collection::vec(any::<bool>(), 0..120),
    ) {
        let count = detected.iter().filter(|&&d| d).count();
        prop_assume!(raw_outcomes.len() >= count);
        let outcomes = &raw_outcomes[..count];

        let lib = encode_outcomes(claimed, outcomes, &detected).unwrap();
        let foreign = independent_encode(claimed, outcomes, &detected);
        prop_assert_eq!(lib.to_binary_string(), foreign.clone());

        // Each side decodes the other's bytes.
        let (c2, d2, o2) = independent_decode(&lib.to_binary_string()).unwrap();
        prop_assert_eq!(c2, claimed);
        prop_assert_eq!(&d2, &detected);
        prop_assert_eq!(&o2, outcomes);

        let parsed = decode_outcomes(&Bits::from_binary_string(&foreign).unwrap()).unwrap();
        prop_assert_eq!(parsed.claimed_bit, claimed);
        prop_assert_eq!(parsed.detected, detected);
        prop_assert_eq!(parsed.outcomes, outcomes);
    }
}
