mod support;

use proptest::prelude::*;
use support::trees::{first_mismatch, random_tree};

#[test]
fn hundred_thousand_insertions_match_recomputation() {
    let t = random_tree(7, 100_000);
    assert_eq!(first_mismatch(&t), None);
}

#[test]
fn solved_nodes_have_value_one() {
    let t = random_tree(11, 20_000);
    for n in t.nodes() {
        if n.solved {
            assert!((n.value - 1.0).abs() < 1e-12, "{}", n.value);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn small_trees_match_recomputation(seed in any::<u64>(), n in 1usize..500) {
        let t = random_tree(seed, n);
        prop_assert_eq!(first_mismatch(&t), None);
        prop_assert!(t.root().value <= 1.0 + 1e-12);
    }
}
