use smhc::channel::{extract_syndrome, logical_label};
use smhc::code::{build_original_code, build_subsystem_code, CodeSpec};
use smhc::decoders::{
    bd_logical_rate, evaluate_bd_genie, evaluate_decoder, exhaustive_map_table, joint_table,
    BlockMapDecoder, CachedDecoder, Decoder, MdDecoder,
};
use smhc::gf2::BitVec;
use smhc::harness::with_workers;

#[test]
fn block_map_equals_exhaustive_at_levels_one_and_two() {
    for r in 1..=2 {
        let code = build_subsystem_code(r).unwrap();
        let m = code.num_stabilizers();
        for p in [0.01, 0.04, 0.1] {
            let oracle = exhaustive_map_table(&code, p).unwrap();
            let dec = BlockMapDecoder::new(&code, p).unwrap();
            for s in 0..1u64 << m {
                let a = oracle.decision(s);
                let b = dec.decode(&BitVec::from_u64(s, m));
                assert_eq!(a.label, b.label, "r={r} p={p} s={s}");
                assert_eq!(a.tie_broken, b.tie_broken, "r={r} p={p} s={s}");
                let (pa, pb) = (a.posterior.unwrap(), b.posterior.unwrap());
                assert!((pa - pb).abs() < 1e-9, "posterior {pa} vs {pb}");
            }
        }
    }
}

#[test]
fn composed_joint_table_matches_enumeration() {
    for code in [build_subsystem_code(2).unwrap(), build_original_code(2).unwrap()] {
        let oracle = exhaustive_map_table(&code, 0.07).unwrap();
        let table = joint_table(&code, 0.07).unwrap();
        assert!((table.total() - 1.0).abs() < 1e-12);
        for s in 0..1u64 << code.num_stabilizers() {
            for l in 0..1u64 << code.num_logicals() {
                let (a, b) = (oracle.score(l, s), table.get(l, s));
                assert!((a - b).abs() <= 1e-12 * a.max(1e-300) + 1e-300, "s={s} l={l}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn level_one_odd_syndrome_is_a_four_way_tie() {
    // Each label coset of an odd syndrome holds one weight-1 and one weight-3
    // pattern, so all four labels are equally likely.
    let code = build_subsystem_code(1).unwrap();
    let t = exhaustive_map_table(&code, 0.1).unwrap();
    let each = 0.1 * 0.9f64.powi(3) + 0.1f64.powi(3) * 0.9;
    for l in 0..4 {
        assert!((t.score(l, 1) - each).abs() < 1e-15);
    }
    let d = t.decision(1);
    assert!(d.tie_broken);
    assert!(d.label.is_zero());
    assert!(t.decision(0).label.is_zero());
}

#[test]
fn decoding_is_deterministic() {
    let code = build_subsystem_code(3).unwrap();
    let dec = BlockMapDecoder::new(&code, 0.03).unwrap();
    for seed in 0..20u64 {
        let s = BitVec::from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 45, 19);
        assert_eq!(dec.decode(&s), dec.decode(&s));
    }
}

#[test]
fn level_three_zero_syndrome() {
    let code = build_subsystem_code(3).unwrap();
    let dec = BlockMapDecoder::new(&code, 0.01).unwrap();
    let out = dec.decode(&BitVec::zeros(19));
    assert!(out.label.is_zero());
    assert!(out.posterior.unwrap() > 0.999);
}

#[test]
fn bd_formula_matches_direct_sums() {
    for p in [0.01, 0.04, 0.1] {
        let direct = 1.0 - (1.0 - p as f64).powi(16) - 16.0 * p * (1.0 - p as f64).powi(15);
        let got = bd_logical_rate(2, p);
        assert!(((got - direct) / direct).abs() < 1e-12, "p={p}: {got} vs {direct}");
    }
}

#[test]
fn bd_genie_matches_formula() {
    let code = build_subsystem_code(2).unwrap();
    let res = evaluate_bd_genie(&code, 0.03, 200_000, 8).unwrap();
    let bd = bd_logical_rate(2, 0.03);
    assert!(res.ci_low <= bd && bd <= res.ci_high, "{res:?} vs {bd}");
}

#[test]
fn zero_noise_never_fails() {
    let code = build_subsystem_code(2).unwrap();
    let dec = BlockMapDecoder::new(&code, 0.0).unwrap();
    let res = evaluate_decoder(&dec, &code, 0.0, 1000, 1).unwrap();
    assert_eq!(res.errors, 0);
    assert_eq!(res.rate, 0.0);
}

#[test]
fn block_map_beats_bd_at_four_percent() {
    let code = build_subsystem_code(2).unwrap();
    let dec = CachedDecoder::new(BlockMapDecoder::new(&code, 0.04).unwrap());
    let res = evaluate_decoder(&dec, &code, 0.04, 200_000, 3).unwrap();
    assert!(res.ci_high < bd_logical_rate(2, 0.04), "{res:?}");
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let code = build_subsystem_code(3).unwrap();
    let dec = CachedDecoder::new(BlockMapDecoder::new(&code, 0.02).unwrap());
    let one = with_workers(1, || evaluate_decoder(&dec, &code, 0.02, 30_000, 5)).unwrap().unwrap();
    let three = with_workers(3, || evaluate_decoder(&dec, &code, 0.02, 30_000, 5)).unwrap().unwrap();
    assert_eq!(one, three);
}

/// Least weight per (syndrome, label) over all `2^n` patterns.
fn brute_force_costs(code: &CodeSpec) -> Vec<Vec<u32>> {
    let n = code.n();
    let m = code.num_stabilizers();
    let k = code.num_logicals();
    let mut best = vec![vec![u32::MAX; 1 << k]; 1 << m];
    for e in 0u64..1 << n {
        let ev = BitVec::from_u64(e, n);
        let s = extract_syndrome(code, &ev).unwrap().to_u64() as usize;
        let l = logical_label(code, &ev).unwrap().to_u64() as usize;
        best[s][l] = best[s][l].min(e.count_ones());
    }
    best
}

#[test]
fn md_costs_are_minimum_weights() {
    let code = build_original_code(2).unwrap();
    let dec = MdDecoder::new(&code).unwrap();
    let brute = brute_force_costs(&code);
    for (s, row) in brute.iter().enumerate() {
        assert_eq!(&dec.label_costs(&BitVec::from_u64(s as u64, 6)), row, "s={s}");
    }
}

#[test]
fn md_corrects_single_flips() {
    let code = build_original_code(2).unwrap();
    let dec = MdDecoder::new(&code).unwrap();
    for q in 0..16 {
        let e = BitVec::from_indices(16, [q]);
        let out = dec.decode(&extract_syndrome(&code, &e).unwrap());
        assert_eq!(out.label, logical_label(&code, &e).unwrap(), "qubit {q}");
        assert!(!out.tie_broken);
    }
    assert!(dec.decode(&BitVec::zeros(6)).label.is_zero());
}

#[test]
fn block_map_dominates_md() {
    for (r, p, shots) in [(2, 0.05, 200_000), (3, 0.05, 40_000)] {
        let code = build_original_code(r).unwrap();
        let map = CachedDecoder::new(BlockMapDecoder::new(&code, p).unwrap());
        let md = CachedDecoder::new(MdDecoder::new(&code).unwrap());
        let a = evaluate_decoder(&map, &code, p, shots, 21).unwrap();
        let b = evaluate_decoder(&md, &code, p, shots, 21).unwrap();
        // Same shots, so the optimal decoder can only lose by chance.
        assert!(a.errors <= b.errors || a.ci_low <= b.ci_high, "r={r}: {a:?} vs {b:?}");
    }
}
