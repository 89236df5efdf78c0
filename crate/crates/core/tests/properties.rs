use proptest::prelude::*;
use sha2::block_api::compress256;

use sha256_dc::codeword::{parse_word_file, resolve_layout, rotate_words, verify_codeword};
use sha256_dc::disturbance::apply_corrections;
use sha256_dc::primitives::{
    big_sigma0, big_sigma1, digest_bytes, expand_words, pad_single_block, small_sigma0,
    small_sigma1,
};
use sha256_dc::{compress, make_variant, ExpansionKind, MessageBlock, RegisterState};

const SBOXES: [(&str, fn(u32) -> u32); 4] = [
    ("Sigma0", big_sigma0),
    ("Sigma1", big_sigma1),
    ("sigma0", small_sigma0),
    ("sigma1", small_sigma1),
];

fn reference_compress(m: &MessageBlock) -> [u32; 8] {
    let mut state = sha256_dc::primitives::IV;
    let mut bytes = [0u8; 64];
    for (chunk, w) in bytes.chunks_exact_mut(4).zip(m.0) {
        chunk.copy_from_slice(&w.to_be_bytes());
    }
    compress256(&mut state, &[bytes]);
    state
}

fn block() -> impl Strategy<Value = MessageBlock> {
    any::<[u32; 16]>().prop_map(MessageBlock)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn sboxes_are_gf2_linear(x: u32, y: u32) {
        for (name, f) in SBOXES {
            prop_assert_eq!(f(x ^ y), f(x) ^ f(y), "{}", name);
        }
    }

    #[test]
    fn msb_addition_is_carry_free(x: u32, y: u32) {
        prop_assert_eq!(x.wrapping_add(0x8000_0000), x ^ 0x8000_0000);
        prop_assert_eq!((x ^ 0x8000_0000).wrapping_add(y), x.wrapping_add(y) ^ 0x8000_0000);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn xor_expansion_is_linear(a in block(), b in block()) {
        let kind = ExpansionKind::Sha256Xor;
        let lhs = expand_words(&a.xor(&b.0).0, kind, 64);
        let (ea, eb) = (expand_words(&a.0, kind, 64), expand_words(&b.0, kind, 64));
        let rhs: Vec<u32> = ea.iter().zip(&eb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn corrections_are_ring_linear(s in prop::collection::vec(any::<u32>(), 64), t in prop::collection::vec(any::<u32>(), 64), c in prop::array::uniform8(-8i64..8)) {
        let sum: Vec<u32> = s.iter().zip(&t).map(|(x, y)| x.wrapping_add(*y)).collect();
        let lhs = apply_corrections(&sum, &c);
        let (cs, ct) = (apply_corrections(&s, &c), apply_corrections(&t, &c));
        let rhs: Vec<u32> = cs.iter().zip(&ct).map(|(x, y)| x.wrapping_add(*y)).collect();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn standard_compression_matches_reference(m in block()) {
        let standard = make_variant("standard").unwrap();
        let ours = compress(RegisterState::iv(), &m, &standard);
        prop_assert_eq!(ours.to_array(), reference_compress(&m));
    }
}

#[test]
fn abc_matches_reference() {
    let m = pad_single_block(b"abc").unwrap();
    let ours = digest_bytes(&compress(
        RegisterState::iv(),
        &m,
        &make_variant("standard").unwrap(),
    ));
    let expect = reference_compress(&m);
    let expect: Vec<u8> = expect.iter().flat_map(|w| w.to_be_bytes()).collect();
    assert_eq!(ours.to_vec(), expect);
    assert_eq!(ours[..4], [0xba, 0x78, 0x16, 0xbf]);
}

#[test]
fn msb_addition_is_carry_free_at_eight_bits() {
    for x in 0..=u8::MAX {
        assert_eq!(x.wrapping_add(0x80), x ^ 0x80);
        for y in 0..=u8::MAX {
            assert_eq!((x ^ 0x80).wrapping_add(y), x.wrapping_add(y) ^ 0x80);
        }
    }
}

#[test]
fn sigma_weight_growth_is_bounded() {
    for (name, f) in SBOXES {
        for b in 0..32 {
            let w = f(1 << b).count_ones();
            assert!((1..=3).contains(&w), "{name} on bit {b} gives weight {w}");
        }
    }
}

#[test]
fn codewords_are_not_closed_under_rotation() {
    let file = parse_word_file(include_str!("../../../data/table5.hex")).unwrap();
    let (_, word) = resolve_layout(
        &file.words,
        file.grid_cols.unwrap(),
        ExpansionKind::Sha256Xor,
    )
    .unwrap();
    assert_eq!(
        verify_codeword(&word, ExpansionKind::Sha256Xor, 40).unwrap(),
        (true, 26)
    );
    let broken = (1..32).find(|&r| {
        !verify_codeword(&rotate_words(&word, r), ExpansionKind::Sha256Xor, 40)
            .unwrap()
            .0
    });
    assert!(broken.is_some());
}
