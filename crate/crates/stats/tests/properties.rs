use proptest::prelude::*;
use puf_trng_stats::nist::*;
use puf_trng_stats::*;

fn all_p_values(seq: &BitSequence) -> Vec<(&'static str, Vec<f64>)> {
    let mut out = Vec::new();
    let mut push = |name, r: Result<TestOutcome>| {
        if let Ok(o) = r {
            out.push((name, o.p_values));
        }
    };
    push("frequency", frequency_monobit(seq));
    push("block_frequency", block_frequency(seq, 8));
    push("cumulative_sums", cumulative_sums(seq));
    push("runs", runs(seq));
    push("longest_run", longest_run_of_ones(seq));
    push("rank", binary_matrix_rank(seq));
    push("fft", dft_spectral(seq));
    push("approximate_entropy", approximate_entropy(seq, 3));
    push("serial", serial(seq, 3));
    push("linear_complexity", linear_complexity(seq, 20));
    out
}

fn check_range(seq: &BitSequence) -> std::result::Result<(), TestCaseError> {
    for (name, ps) in all_p_values(seq) {
        for p in ps {
            prop_assert!((0.0..=1.0).contains(&p), "{name}: {p}");
        }
    }
    Ok(())
}

fn adversarial() -> impl Strategy<Value = Vec<u8>> {
    (1usize..6, 0u8..=255, 128usize..1200).prop_map(|(period, pattern, len)| {
        (0..len).map(|i| (pattern >> (i % period)) & 1).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_values_in_unit_interval(bits in prop::collection::vec(0u8..=1, 1..1500)) {
        check_range(&BitSequence::from_bits(bits))?;
    }

    #[test]
    fn p_values_in_unit_interval_on_periodic_input(bits in adversarial()) {
        check_range(&BitSequence::from_bits(bits))?;
    }

    #[test]
    fn p_values_in_unit_interval_on_rank_sized_input(
        bytes in prop::collection::vec(any::<u8>(), 4864..5200),
        bias in 0u8..4,
    ) {
        // thin out the ones to push statistics into the tails
        let bits: Vec<u8> = bytes.iter()
            .flat_map(|&b| (0..8).map(move |i| (b >> i) & 1))
            .enumerate()
            .map(|(i, b)| if (i as u8) % 4 < bias { 0 } else { b })
            .collect();
        check_range(&BitSequence::from_bits(bits))?;
    }

    #[test]
    fn ent_is_invariant_under_relabeling(
        bytes in prop::collection::vec(any::<u8>(), 6..3000),
        key in any::<u64>(),
    ) {
        // a bijection on byte values
        let mut perm: Vec<u8> = (0..=255).collect();
        let mut state = key | 1;
        for i in (1..256).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            perm.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let relabeled: Vec<u8> = bytes.iter().map(|&b| perm[b as usize]).collect();
        let a = ent_metrics(&bytes).unwrap();
        let b = ent_metrics(&relabeled).unwrap();
        prop_assert!((a.entropy_bits_per_byte - b.entropy_bits_per_byte).abs() < 1e-12);
        prop_assert!((a.chi_square - b.chi_square).abs() < 1e-9 * (1.0 + a.chi_square));
        prop_assert_eq!(a.optimum_compression_pct, b.optimum_compression_pct);
    }

    #[test]
    fn ent_is_invariant_under_reordering(
        mut bytes in prop::collection::vec(any::<u8>(), 6..3000),
        rotate in any::<usize>(),
    ) {
        let a = ent_metrics(&bytes).unwrap();
        bytes.sort_unstable();
        let k = rotate % bytes.len();
        bytes.rotate_left(k);
        let b = ent_metrics(&bytes).unwrap();
        prop_assert!((a.entropy_bits_per_byte - b.entropy_bits_per_byte).abs() < 1e-12);
        prop_assert!((a.chi_square - b.chi_square).abs() < 1e-9 * (1.0 + a.chi_square));
        prop_assert!((a.mean - b.mean).abs() < 1e-9);
    }

    #[test]
    fn cusum_reversal_symmetry(bits in prop::collection::vec(0u8..=1, 1..2000)) {
        let seq = BitSequence::from_bits(bits);
        let fwd = cumulative_sums(&seq).unwrap();
        let rev = cumulative_sums(&seq.reversed()).unwrap();
        prop_assert_eq!(fwd.p_values[0], rev.p_values[1]);
        prop_assert_eq!(fwd.p_values[1], rev.p_values[0]);
    }
}
