use naft_core::cyc::CycNum;
use naft_core::fourier::{
    build_m_set, commuting_orbit_count, flip_pattern_families, ft_coset, ft_matrix,
    gl_cyclic_families, lusztig_pairing, lusztig_pairing_scan, pi_family_element,
    pi_u_character, pi_u_element, verify_flip, FamilyData,
};
use naft_core::group::FiniteGroup;

fn half() -> CycNum {
    CycNum::from_ratio(1, 2)
}

#[test]
fn m_set_sizes_match_small_group_counts() {
    assert_eq!(build_m_set(&FiniteGroup::cyclic(2)).unwrap().len(), 4);
    assert_eq!(build_m_set(&FiniteGroup::symmetric(3)).unwrap().len(), 8);
    assert_eq!(build_m_set(&FiniteGroup::elem_abelian_2(2)).unwrap().len(), 16);
    assert_eq!(build_m_set(&FiniteGroup::symmetric(4)).unwrap().len(), 21);
    assert_eq!(build_m_set(&FiniteGroup::symmetric(5)).unwrap().len(), 39);
}

#[test]
fn pairing_values_on_the_order_two_group() {
    let m = build_m_set(&FiniteGroup::cyclic(2)).unwrap();
    // Canonical order: (0,chi0), (0,chi1), (1,chi0), (1,chi1).
    assert_eq!(lusztig_pairing(&m, 0, 0).unwrap(), half());
    assert_eq!(lusztig_pairing(&m, 0, 3).unwrap(), half());
    let minus_half = CycNum::from_ratio(-1, 2);
    assert_eq!(lusztig_pairing(&m, 1, 2).unwrap(), minus_half);
}

#[test]
fn abelian_closed_form_matches_the_defining_sum() {
    for g in [
        FiniteGroup::elem_abelian_2(2),
        FiniteGroup::cyclic(6),
        FiniteGroup::product(vec![FiniteGroup::cyclic(2), FiniteGroup::cyclic(4)]),
    ] {
        let m = build_m_set(&g).unwrap();
        for a in 0..m.len() {
            for b in 0..m.len() {
                assert_eq!(
                    lusztig_pairing(&m, a, b).unwrap(),
                    lusztig_pairing_scan(&m, a, b).unwrap(),
                    "group {} entry ({a},{b})",
                    g.name()
                );
            }
        }
    }
}

#[test]
fn pairing_is_hermitian() {
    for g in [
        FiniteGroup::symmetric(3),
        FiniteGroup::cyclic(5),
        FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(2), 2),
    ] {
        let m = build_m_set(&g).unwrap();
        for a in 0..m.len() {
            for b in 0..m.len() {
                let ab = lusztig_pairing(&m, a, b).unwrap();
                let ba = lusztig_pairing(&m, b, a).unwrap();
                assert_eq!(ab, ba.conjugate(), "group {} pair ({a},{b})", g.name());
            }
        }
    }
}

#[test]
fn transform_of_the_order_two_group_matches_the_known_matrix() {
    let ft = ft_matrix(&FiniteGroup::cyclic(2)).unwrap();
    // Known matrix in the order (0,triv), (1,triv), (0,sgn), (1,sgn); our
    // canonical order is (0,triv), (0,sgn), (1,triv), (1,sgn).
    let perm = [0usize, 2, 1, 3];
    let want = [
        [1i64, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
    ];
    for i in 0..4 {
        for j in 0..4 {
            let got = &ft.entries[perm[i]][perm[j]];
            assert_eq!(got, &CycNum::from_ratio(want[i][j], 2), "entry ({i},{j})");
        }
    }
}

#[test]
fn transform_squares_to_identity_and_is_unitary() {
    for g in [
        FiniteGroup::cyclic(1),
        FiniteGroup::cyclic(6),
        FiniteGroup::elem_abelian_2(3),
        FiniteGroup::symmetric(3),
        FiniteGroup::symmetric(4),
        FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(2), 2),
    ] {
        let ft = ft_matrix(&g).unwrap();
        assert!(ft.is_involution(), "involution fails on {}", g.name());
        assert!(ft.is_unitary(), "unitarity fails on {}", g.name());
    }
}

#[test]
fn parameter_count_equals_commuting_orbit_count() {
    for g in [
        FiniteGroup::symmetric(3),
        FiniteGroup::symmetric(4),
        FiniteGroup::cyclic(12),
        FiniteGroup::elem_abelian_2(3),
        FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(2), 2),
        FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(3), 2),
    ] {
        let m = build_m_set(&g).unwrap();
        assert_eq!(
            m.len(),
            commuting_orbit_count(&g).unwrap(),
            "count mismatch on {}",
            g.name()
        );
    }
}

#[test]
fn four_member_family_combinations() {
    let gamma = FiniteGroup::cyclic(2);
    let fam = FamilyData::with_member_names(
        "c2-family",
        &gamma,
        vec!["1x1".into(), "ex2".into(), "11xe".into(), "theta".into()],
    )
    .unwrap();
    let pi_pp = pi_family_element(&fam, &vec![0], &vec![0]).unwrap();
    assert_eq!(fam.combination_string(&pi_pp), "1x1 + ex2");
    let pi_mm = pi_family_element(&fam, &vec![1], &vec![1]).unwrap();
    assert_eq!(fam.combination_string(&pi_mm), "11xe - theta");
    let pi_mp = pi_family_element(&fam, &vec![1], &vec![0]).unwrap();
    assert_eq!(fam.combination_string(&pi_mp), "11xe + theta");
    let pi_pm = pi_family_element(&fam, &vec![0], &vec![1]).unwrap();
    assert_eq!(fam.combination_string(&pi_pm), "1x1 - ex2");

    // The transform swaps the two entries of the defining pair.
    let ft = ft_matrix(&gamma).unwrap();
    assert_eq!(ft.apply(&pi_pm), pi_mp);
    assert_eq!(ft.apply(&pi_pp), pi_pp);

    // A singleton family is fixed.
    let single = FamilyData::with_member_names(
        "singleton",
        &FiniteGroup::cyclic(1),
        vec!["2xe".into()],
    )
    .unwrap();
    let v = pi_family_element(&single, &vec![0], &vec![0]).unwrap();
    assert_eq!(single.combination_string(&v), "2xe");
    let ft1 = ft_matrix(single.gamma()).unwrap();
    assert_eq!(ft1.apply(&v), v);
}

#[test]
fn element_mode_requires_a_commuting_pair() {
    let m = build_m_set(&FiniteGroup::symmetric(3)).unwrap();
    let err = pi_u_element(&m, &vec![1, 0, 2], &vec![1, 2, 0]);
    assert!(err.is_err());
}

#[test]
fn flip_identities_hold_on_small_groups() {
    for g in [
        FiniteGroup::cyclic(1),
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(7),
        FiniteGroup::elem_abelian_2(2),
        FiniteGroup::symmetric(3),
        FiniteGroup::symmetric(4),
        FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(2), 2),
    ] {
        let fam = FamilyData::generic("probe", &g).unwrap();
        let report = verify_flip(&fam).unwrap();
        assert!(
            report.passed(),
            "flip fails on {}: {:?}",
            g.name(),
            report.failures
        );
        assert!(report.element_pairs > 0);
        assert_eq!(report.basis_checks, fam.mset.len());
        if g.is_abelian() {
            let n = g.order() as usize;
            assert_eq!(report.character_pairs, n * n);
        }
    }
}

#[test]
fn flip_report_counts_on_the_cyclic_four_group() {
    let fam = FamilyData::generic("c4", &FiniteGroup::cyclic(4)).unwrap();
    let report = verify_flip(&fam).unwrap();
    assert_eq!(report.element_pairs, 16);
    assert_eq!(report.character_pairs, 16);
    assert_eq!(report.basis_checks, 16);
    assert!(report.passed());
}

#[test]
fn coset_transform_on_the_cyclic_double_cover() {
    let big = FiniteGroup::cyclic(4);
    let sub = big.subgroup(&[vec![2]]).unwrap();
    let cf = ft_coset(&big, &sub).unwrap();
    assert_eq!(cf.c, 2);
    assert_eq!(cf.m_len(), 4);
    assert_eq!(cf.mbar_len(), 4);
    assert_eq!(
        cf.mbar_blocks.iter().map(|b| b.rep.clone()).collect::<Vec<_>>(),
        vec![vec![1], vec![3]]
    );

    // Hand-evaluated entries; i is the primitive fourth root.
    let i = CycNum::root_of_unity(4, 1);
    let mi = CycNum::root_of_unity(4, -1);
    let one = CycNum::one();
    let neg = CycNum::from_integer(-1);
    let want: [[&CycNum; 4]; 4] = [
        [&one, &mi, &one, &mi],
        [&one, &mi, &neg, &i],
        [&one, &i, &one, &i],
        [&one, &i, &neg, &mi],
    ];
    for (r, row) in want.iter().enumerate() {
        for (cidx, cell) in row.iter().enumerate() {
            assert_eq!(cf.entries[r][cidx], *cell * &half(), "entry ({r},{cidx})");
        }
    }

    // Conjugate transpose inverts in both orders.
    assert!(cf.identity_check());

    // The plain transpose does not: its product with the matrix moves the
    // parameter with a non-real character to its inverse.
    let mut plain_ok = true;
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = CycNum::zero();
            for r in 0..4 {
                acc += &(&cf.entries[r][a] * &cf.entries[r][b]);
            }
            let want = if a == b { CycNum::one() } else { CycNum::zero() };
            if acc != want {
                plain_ok = false;
            }
        }
    }
    assert!(!plain_ok);
}

#[test]
fn trivial_quotient_degenerates_to_the_plain_transform() {
    let big = FiniteGroup::symmetric(3);
    let sub = big.subgroup(&[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
    assert_eq!(sub.order(), 6);
    let cf = ft_coset(&big, &sub).unwrap();
    assert_eq!(cf.c, 1);
    let ft = ft_matrix(&big).unwrap();
    assert_eq!(cf.m_len(), ft.len());
    for a in 0..ft.len() {
        for b in 0..ft.len() {
            assert_eq!(cf.entries[a][b], ft.entries[a][b], "entry ({a},{b})");
        }
    }
    assert!(cf.identity_check());
}

#[test]
fn coset_dimensions_match_on_swap_extensions() {
    // Swap extension of the Klein four group.
    let big = FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(2), 2);
    let sub = big.subgroup(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
    let cf = ft_coset(&big, &sub).unwrap();
    assert_eq!(cf.c, 2);
    assert_eq!(cf.m_len(), 4);
    assert_eq!(cf.mbar_len(), 4);
    assert!(cf.identity_check());

    // Same pattern over the cyclic group of order four.
    let big = FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(4), 2);
    let sub = big.subgroup(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
    let cf = ft_coset(&big, &sub).unwrap();
    assert_eq!(cf.m_len(), 16);
    assert_eq!(cf.mbar_len(), 16);
    assert!(cf.identity_check());

    // Index-two alternating subgroup: a single parameter on each side.
    let big = FiniteGroup::symmetric(3);
    let sub = big.subgroup(&[vec![1, 2, 0]]).unwrap();
    let cf = ft_coset(&big, &sub).unwrap();
    assert_eq!(cf.m_len(), 1);
    assert_eq!(cf.entries[0][0], CycNum::one());
    assert!(cf.identity_check());
}

#[test]
fn coset_transform_rejects_bad_inputs() {
    let big = FiniteGroup::symmetric(4);
    // Not normal.
    let sub = big.subgroup(&[vec![1, 0, 2, 3]]).unwrap();
    assert!(ft_coset(&big, &sub).is_err());
    // Normal but with a noncyclic quotient.
    let v4 = big
        .subgroup(&[vec![1, 0, 3, 2], vec![2, 3, 0, 1]])
        .unwrap();
    assert!(ft_coset(&big, &v4).is_err());
}

#[test]
fn family_tuples_small_cases() {
    let fams = gl_cyclic_families(2, 2).unwrap();
    assert_eq!(fams.len(), 3);
    let cs: Vec<usize> = fams.iter().map(|f| f.c).collect();
    assert_eq!(cs, vec![2, 1, 2]);
    let sizes: Vec<usize> = fams.iter().map(|f| f.data.mset.len()).collect();
    assert_eq!(sizes, vec![4, 1, 4]);
    assert_eq!(fams[0].tuple, vec!["[2]", "[2]"]);
    assert_eq!(fams[1].tuple, vec!["[2]", "[1,1]"]);
    assert!(fams[0].data.member_names.contains(&"r0#chi1".to_string()));

    let fams = gl_cyclic_families(1, 4).unwrap();
    assert_eq!(fams.len(), 1);
    assert_eq!(fams[0].c, 4);
    assert_eq!(fams[0].data.mset.len(), 16);
    assert_eq!(fams[0].data.member_names[5], "r1#chi1");
}

fn orbit_weight_sum(k: u64, d: usize, m: usize) -> usize {
    // Independent enumeration: rotation orbits of d-tuples of partitions of
    // k, each weighted by m / period.
    let p = naft_core::sym::partitions(k).len();
    let mut tuple = vec![0usize; d];
    let mut sum = 0usize;
    loop {
        let mut canonical = true;
        let mut period = d;
        for s in 1..d {
            let cmp = (0..d)
                .map(|i| tuple[(i + s) % d].cmp(&tuple[i]))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal);
            if cmp == std::cmp::Ordering::Less {
                canonical = false;
                break;
            }
            if cmp == std::cmp::Ordering::Equal && s < period {
                period = s;
            }
        }
        if canonical {
            sum += m / period;
        }
        let mut pos = d;
        loop {
            if pos == 0 {
                return sum;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < p {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn family_member_double_count() {
    for (k, m) in [(1usize, 4usize), (2, 2), (2, 3), (3, 2), (2, 4)] {
        let fams = gl_cyclic_families(k, m).unwrap();
        for r in 0..m {
            let lhs: usize = fams
                .iter()
                .filter(|f| r % f.period == 0)
                .map(|f| f.c)
                .sum();
            let d = if r == 0 { m } else { gcd(r, m) };
            let rhs = orbit_weight_sum(k as u64, d, m);
            assert_eq!(lhs, rhs, "k={k} m={m} r={r}");
        }
    }
}

#[test]
fn flip_pattern_shapes() {
    let fam = flip_pattern_families(&FiniteGroup::cyclic(1)).unwrap();
    assert_eq!(fam.gamma().order(), 2);
    assert_eq!(fam.mset.len(), 4);

    let fam = flip_pattern_families(&FiniteGroup::cyclic(2)).unwrap();
    assert_eq!(fam.gamma().classes().unwrap().len(), 5);
    assert_eq!(fam.mset.len(), 22);
    assert_eq!(
        fam.mset.len(),
        commuting_orbit_count(fam.gamma()).unwrap()
    );

    let fam = flip_pattern_families(&FiniteGroup::cyclic(4)).unwrap();
    assert_eq!(fam.gamma().classes().unwrap().len(), 14);

    let fam = flip_pattern_families(&FiniteGroup::elem_abelian_2(2)).unwrap();
    assert_eq!(fam.gamma().classes().unwrap().len(), 14);

    assert!(flip_pattern_families(&FiniteGroup::symmetric(3)).is_err());
}

#[test]
fn character_mode_flip_against_the_transform() {
    let g = FiniteGroup::cyclic(6);
    let m = build_m_set(&g).unwrap();
    let ft = ft_matrix(&g).unwrap();
    for sigma in 0..6 {
        for tau in 0..6 {
            let lhs = ft.apply(&pi_u_character(&m, sigma, tau).unwrap());
            let rhs = pi_u_character(&m, tau, sigma).unwrap();
            assert_eq!(lhs, rhs, "pair ({sigma},{tau})");
        }
    }
}
