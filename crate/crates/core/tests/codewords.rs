use sha256_dc::codeword::{
    extend_codeword, longest_zero_run, parse_word_file, resolve_layout, verify_codeword, Layout,
};
use sha256_dc::ExpansionKind;

const KIND: ExpansionKind = ExpansionKind::Sha256Xor;

fn grid() -> (Vec<u32>, usize) {
    let file = parse_word_file(include_str!("../../../data/table5.hex")).unwrap();
    (file.words, file.grid_cols.unwrap())
}

#[test]
fn exactly_one_reading_of_the_grid_is_valid() {
    let (listing, cols) = grid();
    assert_eq!(listing.len(), 40);
    let valid: Vec<String> = Layout::ALL
        .into_iter()
        .filter(|l| verify_codeword(&l.apply(&listing, cols), KIND, 40).unwrap().0)
        .map(|l| l.to_string())
        .collect();
    assert_eq!(valid, ["column-major/lsb-first"]);
}

#[test]
fn resolved_word_extends_below_single_bit_minimum() {
    let (listing, cols) = grid();
    let (_, word) = resolve_layout(&listing, cols, KIND).unwrap();
    for (n, weight) in [(41, 35), (42, 38)] {
        let ext = extend_codeword(&word, KIND, n).unwrap();
        assert_eq!(verify_codeword(&ext, KIND, n).unwrap(), (true, weight));
    }
    let full = extend_codeword(&word, KIND, 64).unwrap();
    assert!(verify_codeword(&full, KIND, 64).unwrap().1 < 467);
    // no 16-word zero band in the 40-step word
    assert!(longest_zero_run(&word) < 16);
}
