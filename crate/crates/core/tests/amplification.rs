mod common;

use common::{bareiss_det, center, exact_rank};
use nomod::instances::*;
use nomod::mlwe_enhance::*;
use nomod::pipeline::{preprocess, InstanceKind, PipelineConfig};
use nomod::reduction::{embed, EmbeddedBasis, ReductionConfig};
use num_bigint::BigInt;
use proptest::prelude::*;

fn module_instance(n: usize, k: usize, l: usize, seed: u64) -> LweInstance {
    let spec = SecretFamily::Cbd { eta: 2 }.with_dim(n * k);
    mlwe_to_lwe(&gen_mlwe(n, k, l, 3329, &spec, &ErrorSpec::Cbd { eta: 2 }, seed).unwrap()).unwrap()
}

#[test]
fn blocks_are_circulant_orbits() {
    let inst = module_instance(8, 2, 4, 1);
    for block in blocks_from_instance(&inst).unwrap() {
        for j in 0..8 {
            assert_eq!(block.orbit_row(j as i64), inst.a[block.id * 8 + j]);
        }
        for rho in 0..8 {
            let rows = build_subsample(&block, rho).unwrap();
            assert_eq!(rows.len(), 9);
            for (j, row) in rows.iter().enumerate() {
                let (idx, sign) = subsample_source(j, rho, 8);
                let want: Vec<i64> = inst.a[block.id * 8 + idx].iter().map(|&x| sign * x).collect();
                assert_eq!(row, &want);
            }
        }
    }
}

#[test]
fn pruned_basis_has_full_rank_and_expected_volume() {
    let (n, h, g) = (8usize, 2usize, 3usize);
    let inst = module_instance(n, 2, 6, 2);
    let blocks = blocks_from_instance(&inst).unwrap();
    let sample_rows = (h + 1) * n;
    let mut schedule = OffsetSchedule::new(n, default_stride(n, 1), blocks.len(), 5);
    let mut asm = assemble_matrix(&blocks, sample_rows, 0, &mut schedule, 7).unwrap();
    asm.truncate(sample_rows);
    let q = Modulus::new(3329).unwrap();
    let full: EmbeddedBasis = embed(&asm.rows, 4, q).unwrap();
    let (pruned, bk) = project_and_prune(&full.original_rows(), sample_rows, g, n).unwrap();
    let m = h * n + g;
    assert_eq!(bk.active(), m);
    assert_eq!(pruned.len(), m + 16);
    assert_eq!(exact_rank(&pruned), pruned.len());
    let volume = BigInt::from(4).pow(m as u32) * BigInt::from(3329).pow(16);
    assert_eq!(bareiss_det(&pruned), volume);
    asm.truncate(m);
    let direct: EmbeddedBasis = embed(&asm.rows, 4, q).unwrap();
    assert_eq!(pruned, direct.original_rows());
    for row in &pruned {
        let back = reinsert(std::slice::from_ref(row), &bk).unwrap().remove(0);
        assert_eq!(back.len(), bk.full_width);
        assert!(bk.zeroed_cols.iter().all(|&c| back[c] == 0));
        assert_eq!(&project(&back, &bk), row);
    }
}

#[test]
fn assembled_rows_are_signed_instance_rows() {
    let inst = module_instance(8, 2, 5, 3);
    let blocks = blocks_from_instance(&inst).unwrap();
    let mut schedule = OffsetSchedule::new(8, 3, blocks.len(), 1);
    for idx in 0..4 {
        let asm = assemble_matrix(&blocks, 40, idx, &mut schedule, 11).unwrap();
        assert!(asm.rows.len() >= 40);
        for (row, src) in asm.rows.iter().zip(&asm.sources) {
            let want: Vec<i64> = inst.a[src.row].iter().map(|&x| src.sign * x).collect();
            assert_eq!(row, &want);
        }
    }
}

#[test]
fn automorphism_preserves_relation() {
    let inst = module_instance(8, 2, 3, 4);
    let t = inst.truth.as_ref().unwrap();
    for rot in 0..8 {
        let (a, b) = apply_automorphism(&inst.a, &inst.b, rot, 8).unwrap();
        let e: Vec<i64> = a
            .iter()
            .zip(&b)
            .map(|(row, &bi)| center(bi as i128 - row.iter().zip(&t.s).map(|(&x, &s)| x as i128 * s as i128).sum::<i128>(), 3329))
            .collect();
        let mut got: Vec<i64> = e.iter().map(|x| x.abs()).collect();
        let mut want: Vec<i64> = t.e.iter().map(|x| x.abs()).collect();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want);
    }
}

#[test]
fn amplified_samples_hold_relations() {
    let mut cfg = PipelineConfig::default();
    cfg.instance.kind = InstanceKind::Ring;
    cfg.instance.n = 8;
    cfg.instance.rank = 2;
    cfg.instance.q = 3329;
    cfg.instance.secret = SecretFamily::Cbd { eta: 2 };
    cfg.instance.error = ErrorSpec::Cbd { eta: 2 };
    cfg.reduction = ReductionConfig { block_start: 10, block_cap: 12, tour_budget: 4, ..Default::default() };
    cfg.matrices = 2;
    cfg.pool_capacity = 64;
    cfg.seed = 3;
    let inst = nomod::pipeline::generate_instance(&cfg).unwrap();
    let truth = inst.truth.clone().unwrap();
    let (pools, samples) = preprocess(&inst, &cfg).unwrap();
    assert!(samples.len() > 100);
    assert!(samples.len() <= cfg.matrices * cfg.pool_capacity * 8);
    assert_eq!(pools.matrices.len(), 2);
    let q = 3329i128;
    for s in &samples {
        assert_eq!(s.r.iter().map(|&x| x * x).sum::<i64>(), s.r_norm_sq);
        let x: Vec<i64> = (0..inst.n)
            .map(|j| center(s.r.iter().zip(&inst.a).map(|(&r, row)| r as i128 * row[j] as i128).sum(), 3329))
            .collect();
        assert_eq!(x, s.x);
        let xs: i128 = s.x.iter().zip(&truth.s).map(|(&a, &b)| a as i128 * b as i128).sum();
        let re: i128 = s.r.iter().zip(&truth.e).map(|(&a, &b)| a as i128 * b as i128).sum();
        assert_eq!((s.target as i128 - xs - re).rem_euclid(q), 0);
    }
}

proptest! {
    #[test]
    fn orbit_preserves_norms(v in prop::collection::vec(-50i64..50, 16)) {
        let norm: i64 = v.iter().map(|x| x * x).sum();
        let orbit = orbit_expand(&v, 8).unwrap();
        prop_assert!(!orbit.is_empty() && orbit.len() <= 8);
        prop_assert_eq!(orbit[0].1.clone(), v.clone());
        for (t, w) in &orbit {
            prop_assert_eq!(w.iter().map(|x| x * x).sum::<i64>(), norm);
            prop_assert_eq!(&rotate_parts(w, -(*t as i64), 8), &v);
        }
    }

    #[test]
    fn subsample_sources_cover_block(rho in 0usize..16) {
        let mut seen = [false; 16];
        for j in 0..16 {
            let (idx, sign) = subsample_source(j, rho, 16);
            prop_assert!(sign == 1 || sign == -1);
            seen[idx] = true;
        }
        prop_assert!(seen.iter().all(|&b| b));
    }
}
