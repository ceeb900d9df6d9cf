//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `-- --nocapture` to see the lines for passing
//! criteria; failing criteria carry the line in their panic message too).

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::{converge, pool, random_phantom, small_pool};

use gridtomo::bra::{
    apply_rounding, binary_round, bra, compute_alphas, simple_rounding_applicable, BraConfig,
};
use gridtomo::ghost::{
    build_bad_configuration, build_ghost_gu, build_ghost_index, enlarging_region, expand_fs,
    ghost_dimension,
};
use gridtomo::lattice::{check_binary_uniqueness, construct_set_odd_n, detect_structure};
use gridtomo::oracle::{alpha_closed_form, enumerate_binary_solutions, matrix_rank};
use gridtomo::phantom::{
    fixture_5x5_phantom, fixture_5x5_set, generate_phantom, PhantomKind, PhantomSpec, ShapeClass,
};
use gridtomo::projector::line_of;
use gridtomo::{Direction, DirectionSet, GridDims, Image, SparseProjectionMatrix};

fn criterion(n: u32, what: &str, f: impl FnOnce() -> Result<String, String>) {
    match f() {
        Ok(msg) => println!("ACCEPTANCE {n} PASS — {what}: {msg}"),
        Err(msg) => {
            println!("ACCEPTANCE {n} FAIL — {what}: {msg}");
            panic!("ACCEPTANCE {n} FAIL — {what}: {msg}");
        }
    }
}

fn multiset(values: &[f64]) -> BTreeMap<i64, usize> {
    let mut m = BTreeMap::new();
    for &v in values {
        *m.entry(v as i64).or_insert(0) += 1;
    }
    m
}

#[test]
fn acceptance_1_golden_5x5_end_to_end() {
    criterion(1, "golden 5x5 end to end", || {
        let start = Instant::now();
        let s = fixture_5x5_set();
        let grid = GridDims::new(5, 5);
        let phantom = fixture_5x5_phantom();
        let a = SparseProjectionMatrix::build(&s, grid);
        let p = a.forward_project(&phantom).map_err(|e| e.to_string())?;
        if p.len() != 36 {
            return Err(format!("expected 36 bins, got {}", p.len()));
        }
        let blocks = a.layout().split_blocks(p.values());
        // stored order: (1,0), (1,2), (0,1), (2,1)
        let expect: [(&str, Vec<i64>); 4] = [
            ("(1,0)", vec![4, 4, 2, 0, 0]),
            ("(1,2)", vec![1, 1, 1, 1, 2, 1, 2, 1, 0, 0, 0, 0, 0]),
            ("(0,1)", vec![2, 3, 3, 2, 0]),
            ("(2,1)", vec![1, 1, 2, 2, 1, 2, 1, 0, 0, 0, 0, 0, 0]),
        ];
        for (blk, (name, want)) in blocks.iter().zip(&expect) {
            let want_ms: BTreeMap<i64, usize> =
                want.iter().fold(BTreeMap::new(), |mut m, &v| {
                    *m.entry(v).or_insert(0) += 1;
                    m
                });
            if multiset(blk) != want_ms {
                return Err(format!("block {name} multiset mismatch: {blk:?}"));
            }
        }
        // the documented permutation onto the published vector is the block
        // reordering [(0,1), (2,1), (1,0), (1,2)]
        let published: Vec<f64> = [
            2, 3, 3, 2, 0, 1, 1, 2, 2, 1, 2, 1, 0, 0, 0, 0, 0, 0, 4, 4, 2, 0, 0, 1, 1, 1, 1, 2,
            1, 2, 1, 0, 0, 0, 0, 0,
        ]
        .iter()
        .map(|&v| v as f64)
        .collect();
        let permuted: Vec<f64> = [blocks[2], blocks[3], blocks[0], blocks[1]].concat();
        if permuted != published {
            return Err(format!("permuted vector mismatch: {permuted:?}"));
        }
        let res = bra(&s, grid, &p, &BraConfig::new(2)).map_err(|e| e.to_string())?;
        let wrong = res.binary.diff_count(&phantom);
        if wrong != 0 {
            return Err(format!("BRA at kappa=2 left {wrong} wrong pixels"));
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs_f64() >= 1.0 {
            return Err(format!("took {elapsed:?}, budget 1 s"));
        }
        Ok(format!(
            "36 bins, block multisets and permuted vector match, 0 wrong pixels at kappa=2 ({elapsed:?})"
        ))
    });
}

#[test]
fn acceptance_2_cgls_fidelity() {
    criterion(2, "kappa=2 CGLS iterate matches the published values", || {
        let start = Instant::now();
        let s = fixture_5x5_set();
        let grid = GridDims::new(5, 5);
        let a = SparseProjectionMatrix::build(&s, grid);
        let p = a
            .forward_project(&fixture_5x5_phantom())
            .map_err(|e| e.to_string())?;
        let (x2, _) = gridtomo::cgls(&a, &p, &gridtomo::SolverConfig::fixed(2))
            .map_err(|e| e.to_string())?;
        #[rustfmt::skip]
        let printed = [
            0.2001, 1.0044, 1.1276, 0.8812, 0.8075,
            0.2892, 0.9208, 0.8217, 1.0044, 0.9010,
            -0.1200, 0.0967, 0.6688, 0.8415, 0.3332,
            -0.2872, -0.1200, 0.1363, 0.1363, 0.0967,
            -0.2575, -0.0408, 0.0032, 0.2595, 0.0670,
        ];
        let mut worst = 0.0f64;
        for (i, (got, want)) in x2.values().iter().zip(printed).enumerate() {
            let err = (got - want).abs();
            worst = worst.max(err);
            if err >= 1e-3 {
                return Err(format!("entry {i}: {got} vs published {want}"));
            }
        }
        for (p, want) in [((0, 0), 0.2001), ((2, 0), 1.1276), ((0, 3), -0.2872)] {
            let got = x2.get(p);
            if (got - want).abs() >= 1e-3 {
                return Err(format!("spot value at {p:?}: {got} vs {want}"));
            }
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs_f64() >= 1.0 {
            return Err(format!("took {elapsed:?}, budget 1 s"));
        }
        Ok(format!(
            "all 25 entries within 1e-3 (worst {worst:.2e}), spot values at lambda0 and elsewhere confirmed ({elapsed:?})"
        ))
    });
}

/// Complete candidate space for 6x6: any member of a valid set has a <= h < 6
/// and |b| <= k < 6, so scanning normalized directions with a < 6, |b| < 6
/// covers every possibility.
fn uniqueness_sets_on_6x6() -> Vec<[Direction; 4]> {
    let grid = GridDims::new(6, 6);
    let mut candidates = Vec::new();
    for a in 0..6i64 {
        for b in -5..6i64 {
            if (a, b) == (0, 0) {
                continue;
            }
            if let Ok(d) = Direction::new(a, b) {
                if d.vector() == (a, b) {
                    candidates.push(d);
                }
            }
        }
    }
    let mut found = Vec::new();
    let c = candidates.len();
    for i in 0..c {
        for j in i + 1..c {
            for k in j + 1..c {
                for l in k + 1..c {
                    let dirs = [candidates[i], candidates[j], candidates[k], candidates[l]];
                    let h: i64 = dirs.iter().map(|d| d.a()).sum();
                    let kk: i64 = dirs.iter().map(|d| d.b().abs()).sum();
                    if h >= 6 || kk >= 6 {
                        continue;
                    }
                    let s = DirectionSet::new(dirs).expect("distinct by construction");
                    if check_binary_uniqueness(&s, grid).is_binary_uniqueness_set {
                        found.push(dirs);
                    }
                }
            }
        }
    }
    found
}

#[test]
fn acceptance_3_uniqueness_oracle_concordance() {
    criterion(3, "exhaustive enumeration concordance", || {
        let start = Instant::now();
        // 5x5 fixture set: 20 seeded random phantoms, one solution each
        let s5 = fixture_5x5_set();
        let g5 = GridDims::new(5, 5);
        let a5 = SparseProjectionMatrix::build(&s5, g5);
        for seed in 0..20u64 {
            let density = [0.3, 0.5, 0.7][(seed % 3) as usize];
            let phantom = random_phantom(g5, density, seed);
            let p = a5.forward_project(&phantom).map_err(|e| e.to_string())?;
            let res = enumerate_binary_solutions(&a5, &p, 2).map_err(|e| e.to_string())?;
            if res.solutions.len() != 1 {
                return Err(format!(
                    "5x5 seed {seed}: {} solutions, expected 1",
                    res.solutions.len()
                ));
            }
            if res.solutions[0].values() != phantom.values() {
                return Err(format!("5x5 seed {seed}: solution differs from phantom"));
            }
        }
        // two-direction control: the {(0,0),(1,1)} phantom has a mate
        let dirs = [Direction::new(1, 0).unwrap(), Direction::new(0, 1).unwrap()];
        let a2 = SparseProjectionMatrix::from_directions(&dirs, g5);
        let mut vals = vec![0.0; 25];
        vals[g5.index_of((0, 0))] = 1.0;
        vals[g5.index_of((1, 1))] = 1.0;
        let witness = Image::binary(g5, vals).unwrap();
        let p2 = a2.forward_project(&witness).map_err(|e| e.to_string())?;
        let res2 = enumerate_binary_solutions(&a2, &p2, 10).map_err(|e| e.to_string())?;
        if res2.solutions.len() < 2 {
            return Err("two-direction control failed to produce an ambiguity".into());
        }

        // supplementary evidence on 6x7, the smallest grid beyond 5x5 that
        // admits any set of binary uniqueness
        let s67 = DirectionSet::from_pairs([(1, 1), (1, -1), (1, 2), (1, -2)]).unwrap();
        let g67 = GridDims::new(6, 7);
        let a67 = SparseProjectionMatrix::build(&s67, g67);
        for seed in 0..5u64 {
            let phantom = random_phantom(g67, 0.5, 100 + seed);
            let p = a67.forward_project(&phantom).map_err(|e| e.to_string())?;
            let res = enumerate_binary_solutions(&a67, &p, 2).map_err(|e| e.to_string())?;
            if res.solutions.len() != 1 || res.solutions[0].values() != phantom.values() {
                return Err(format!("6x7 seed {seed}: enumeration disagrees"));
            }
        }

        // the stated 6x6 clause: at least one 4-direction set passing the
        // uniqueness check must exist there for the clause to be runnable
        let found = uniqueness_sets_on_6x6();
        let elapsed = start.elapsed();
        if elapsed.as_secs_f64() >= 60.0 {
            return Err(format!("took {elapsed:?}, budget 60 s"));
        }
        if found.is_empty() {
            return Err(format!(
                "5x5 clause PASSED (20/20 unique, two-direction control ambiguous as required) \
                 but the 6x6 clause is unsatisfiable: exhaustive search over the complete \
                 candidate space (all 4-subsets of normalized directions with a < 6, |b| < 6, \
                 filtered to h < 6, k < 6) finds NO set passing check_binary_uniqueness on 6x6. \
                 Any structured set has even h (= 2*sigma or 2*a4), and four distinct directions \
                 force h = k = 4, margins 2/2; conditions then require every direction's dominant \
                 coordinate >= 2, which eliminates (0,1)/(1,0)/(1,±1), forces all a_r = 1, and \
                 demands four distinct |b_r| >= 2, so k >= 10 — a contradiction. Concordance was \
                 instead demonstrated on 6x7 (5/5 unique with S = {{(1,1),(1,-1),(1,2),(1,-2)}}), \
                 the nearest grid where a qualifying set exists ({elapsed:?})"
            ));
        }
        Ok(format!(
            "20/20 unique on 5x5, control ambiguous, {} sets on 6x6 ({elapsed:?})",
            found.len()
        ))
    });
}

#[test]
fn acceptance_4_ghost_space_dimension() {
    criterion(4, "dense rank agrees with the region formula", || {
        let mut lines = Vec::new();
        for f in small_pool() {
            let a = SparseProjectionMatrix::build(&f.set, f.grid);
            let rank = matrix_rank(&a, 1e-10);
            let dim = ghost_dimension(&f.set, f.grid);
            if a.n() - rank != dim {
                return Err(format!(
                    "{}: n - rank = {} but (M-h)(N-k) = {dim}",
                    f.name,
                    a.n() - rank
                ));
            }
            lines.push(format!("{}: {} = {}", f.name, a.n() - rank, dim));
        }
        if lines.len() < 3 {
            return Err(format!("only {} small fixtures available", lines.len()));
        }
        Ok(lines.join("; "))
    });
}

#[test]
fn acceptance_5_alpha_bound_and_dual_formula() {
    criterion(5, "ghost weights on the 51x51 fixture", || {
        let start = Instant::now();
        let s = DirectionSet::from_pairs([(3, 5), (5, 3), (16, 15), (24, 23)]).unwrap();
        let grid = GridDims::new(51, 51);
        let a = SparseProjectionMatrix::build(&s, grid);
        let case = detect_structure(&s).map_err(|e| e.to_string())?;
        let bad = build_bad_configuration(&s, case).map_err(|e| e.to_string())?;
        let region = enlarging_region(&s, grid);
        let bound = 4.0 / 9.0 + 1e-6;
        let mut max_abs_alpha = 0.0f64;
        let mut max_deviation = 0.0f64;
        for seed in 0..50u64 {
            let density = 0.25 + 0.01 * seed as f64;
            let phantom = random_phantom(grid, density, 1000 + seed);
            let p = a.forward_project(&phantom).map_err(|e| e.to_string())?;
            let x = converge(&a, &p, 1e-10);
            let weights = compute_alphas(&x, &bad, &region);
            for (u, alpha) in weights.iter() {
                max_abs_alpha = max_abs_alpha.max(alpha.abs());
                if alpha.abs() > bound {
                    return Err(format!(
                        "seed {seed}: alpha at {u:?} = {alpha} exceeds 4/9 + 1e-6"
                    ));
                }
                let cf = alpha_closed_form(&phantom, &bad, u);
                max_deviation = max_deviation.max((alpha - cf).abs());
            }
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs_f64() >= 300.0 {
            return Err(format!("took {elapsed:?}, budget 5 min"));
        }
        if max_deviation > 1e-8 {
            return Err(format!(
                "bound clause PASSED (max |alpha| = {max_abs_alpha:.4}, within 4/9 + 1e-6 over \
                 50 phantoms) but the closed-form clause FAILED: recovered weights deviate from \
                 the separable 18-denominator expression by up to {max_deviation:.3e} \
                 (required 1e-8). The deviation is intrinsic, not numerical: on this fixture \
                 the enlarging regions overlap (e.g. pixels (5,5..7) lie in two of them), the \
                 squared norm over H is then not a separable sum of per-translation quadratics, \
                 and its true minimizer differs from the separable one. The recovered weights \
                 themselves are correct — they match ghost coefficients extracted by an \
                 independent dense least-squares route to ~1e-14, reconstruction is exact, and \
                 the same closed form does agree to <1e-8 on single-coverage fixtures of both \
                 sign cases (see the properties suite) ({elapsed:?})"
            ));
        }
        Ok(format!(
            "max |alpha| = {max_abs_alpha:.4}, max closed-form deviation = {max_deviation:.2e} ({elapsed:?})"
        ))
    });
}

#[test]
fn acceptance_6_exact_reconstruction_63x63() {
    criterion(6, "63x63 shape phantoms reconstruct exactly", || {
        let start = Instant::now();
        let s = construct_set_odd_n(63).map_err(|e| e.to_string())?;
        let grid = GridDims::new(63, 63);
        let a = SparseProjectionMatrix::build(&s, grid);
        let cap = 630;
        let schedule = [63, 126, 252, cap];
        let mut summary = Vec::new();
        for class in ShapeClass::ALL {
            for seed in 0..3u64 {
                let spec = PhantomSpec::new(PhantomKind::Shapes { class, seed }, grid);
                let phantom = generate_phantom(&spec).map_err(|e| e.to_string())?;
                let p = a.forward_project(&phantom).map_err(|e| e.to_string())?;
                let mut exact_at = None;
                for &kappa in &schedule {
                    let res =
                        bra(&s, grid, &p, &BraConfig::new(kappa)).map_err(|e| e.to_string())?;
                    if res.binary.diff_count(&phantom) == 0 {
                        exact_at = Some(kappa);
                        break;
                    }
                }
                match exact_at {
                    Some(kappa) => summary.push(format!("{}:{seed}@{kappa}", class.name())),
                    None => {
                        return Err(format!(
                            "{} seed {seed}: not exact within kappa <= {cap}",
                            class.name()
                        ))
                    }
                }
            }
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs_f64() >= 600.0 {
            return Err(format!("took {elapsed:?}, budget 10 min"));
        }
        Ok(format!("exact kappas: {} ({elapsed:?})", summary.join(" ")))
    });
}

#[test]
fn acceptance_7_radius_identity() {
    criterion(7, "central-radius identity at convergence", || {
        let start = Instant::now();
        let mut lines = Vec::new();
        for f in pool() {
            let a = SparseProjectionMatrix::build(&f.set, f.grid);
            let phantom = if f.name == "paper-5x5" {
                fixture_5x5_phantom()
            } else {
                random_phantom(f.grid, 0.5, 7)
            };
            let p = a.forward_project(&phantom).map_err(|e| e.to_string())?;
            let x = converge(&a, &p, 1e-11);
            let dist_sq: f64 = phantom
                .values()
                .iter()
                .zip(x.values())
                .map(|(t, v)| (t - v) * (t - v))
                .sum();
            let lhs = dist_sq + x.norm_l2_sq();
            let rhs = p.norm_l1() / 4.0;
            let err = (lhs - rhs).abs();
            let budget = 1e-9 * p.norm_l1();
            if err > budget {
                return Err(format!(
                    "{}: |{lhs} - {rhs}| = {err:.3e} exceeds 1e-9 * ||p||_1 = {budget:.3e}",
                    f.name
                ));
            }
            lines.push(format!("{}: {err:.1e}", f.name));
        }
        let elapsed = start.elapsed();
        Ok(format!("{} ({elapsed:?})", lines.join(", ")))
    });
}

#[test]
fn acceptance_8_structural_property_suite() {
    criterion(8, "structural properties across the fixture pool", || {
        let start = Instant::now();
        for f in pool() {
            let case = detect_structure(&f.set).map_err(|e| e.to_string())?;
            let bad = build_bad_configuration(&f.set, case).map_err(|e| e.to_string())?;
            let region = enlarging_region(&f.set, f.grid);
            let index = build_ghost_index(&bad, &region);

            // 15 terms, one double, annihilating line sums
            let fs = expand_fs(&f.set);
            if fs.len() != 15 || fs.terms().filter(|(_, c)| c.abs() == 2).count() != 1 {
                return Err(format!("{}: malformed configuration", f.name));
            }
            for &d in f.set.dirs() {
                let mut sums: BTreeMap<i64, i64> = BTreeMap::new();
                for (p, c) in fs.terms() {
                    *sums.entry(line_of(p, d)).or_insert(0) += c;
                }
                if sums.values().any(|&v| v != 0) {
                    return Err(format!("{}: nonzero line sum along {d}", f.name));
                }
            }

            // separation of the lambda0 and lambda_delta blocks, and the
            // single-coefficient identity on the lambda0 block
            for u in region.points() {
                let l0 = (bad.lambda0().0 + u.0, bad.lambda0().1 + u.1);
                let c0 = index.get(l0).ok_or_else(|| format!("{}: hole at {l0:?}", f.name))?;
                if c0.plus != vec![u] || !c0.minus.is_empty() || c0.delta.is_some() {
                    return Err(format!("{}: lambda0 block violated at {u:?}", f.name));
                }
                let ld = (bad.lambda_delta().0 + u.0, bad.lambda_delta().1 + u.1);
                let cd = index.get(ld).ok_or_else(|| format!("{}: hole at {ld:?}", f.name))?;
                if cd.delta != Some(u) || !cd.plus.is_empty() || !cd.minus.is_empty() {
                    return Err(format!("{}: doubled block violated at {u:?}", f.name));
                }
            }

            // ghosts vanish under projection; columns carry four ones
            let a = SparseProjectionMatrix::build(&f.set, f.grid);
            for u in region.points() {
                let g = build_ghost_gu(&bad, u, &region, f.grid).map_err(|e| e.to_string())?;
                let pg = a.forward_project(&g).map_err(|e| e.to_string())?;
                if pg.values().iter().any(|&v| v != 0.0) {
                    return Err(format!("{}: ghost at {u:?} does not vanish", f.name));
                }
            }
            let mut col_deg = vec![0usize; a.n()];
            for i in 0..a.m() {
                for &j in a.row(i) {
                    col_deg[j as usize] += 1;
                }
            }
            if col_deg.iter().any(|&d| d != 4) {
                return Err(format!("{}: column degree differs from 4", f.name));
            }

            // fast-path equivalence at convergence
            let phantom = if f.name == "paper-5x5" {
                fixture_5x5_phantom()
            } else {
                random_phantom(f.grid, 0.5, 13)
            };
            let p = a.forward_project(&phantom).map_err(|e| e.to_string())?;
            let x = converge(&a, &p, 1e-10);
            let weights = compute_alphas(&x, &bad, &region);
            let general = binary_round(
                &apply_rounding(&x, &weights, &index, &bad).map_err(|e| e.to_string())?,
            );
            if general.diff_count(&phantom) != 0 {
                return Err(format!("{}: corrected rounding missed the phantom", f.name));
            }
            if simple_rounding_applicable(&index) {
                let fast = binary_round(&x);
                if fast.diff_count(&general) != 0 {
                    return Err(format!("{}: fast path disagrees with corrected path", f.name));
                }
            }
        }
        let elapsed = start.elapsed();
        Ok(format!("all checks hold on {} fixtures ({elapsed:?})", pool().len()))
    });
}

#[test]
fn acceptance_9_protocol_and_disclosure() {
    criterion(9, "bench protocol exists and docs disclose the substitution", || {
        // the harness reproduces the two-column protocol on synthetic data
        let spec = PhantomSpec::new(
            PhantomKind::Fixture("paper-5x5".into()),
            GridDims::new(5, 5),
        );
        let rows = gridtomo::bench::run_bench(&spec, &fixture_5x5_set(), &[1, 2])
            .map_err(|e| e.to_string())?;
        let mut csv = Vec::new();
        gridtomo::bench::write_bench_csv(&mut csv, &rows).map_err(|e| e.to_string())?;
        let csv = String::from_utf8(csv).unwrap();
        if !csv.starts_with("kappa,cgls_percent,bra_percent") {
            return Err("bench CSV lacks the CGLS and BRA percent columns".into());
        }
        if rows[1].bra_percent != 100.0 {
            return Err("bench on the 5x5 fixture should reach 100% at kappa=2".into());
        }
        // documentation states the stand-in substitution
        let readme_path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md");
        let readme = std::fs::read_to_string(readme_path)
            .map_err(|e| format!("README.md unreadable: {e}"))?;
        let lower = readme.to_lowercase();
        for needle in ["synthetic", "not reproduced", "512"] {
            if !lower.contains(needle) {
                return Err(format!("README disclosure is missing {needle:?}"));
            }
        }
        Ok("CSV protocol columns present; README discloses the synthetic stand-ins".into())
    });
}
