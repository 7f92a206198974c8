//! Maximal compact classification: diagram construction, rotation groups,
//! and the stabilized-orbit-pair enumeration against hand-checked lists.

use naft_core::affine::{
    classes_for_twist, smax, AffineDiagramData, Isogeny, LieType, MaxCompactClass,
};

fn diagram(lt: LieType, rank: u64, iso: Isogeny) -> AffineDiagramData {
    AffineDiagramData::new(lt, rank, iso).expect("valid diagram")
}

fn quotients(classes: &[MaxCompactClass]) -> Vec<String> {
    classes.iter().map(|c| c.quotient.clone()).collect()
}

#[test]
fn node_counts_and_rotation_orders() {
    let cases = [
        (LieType::A, 1, 2, 2),
        (LieType::A, 5, 6, 6),
        (LieType::B, 2, 3, 2),
        (LieType::B, 4, 5, 2),
        (LieType::C, 2, 3, 2),
        (LieType::C, 5, 6, 2),
        (LieType::D, 4, 5, 4),
        (LieType::D, 5, 6, 4),
        (LieType::E6, 6, 7, 3),
        (LieType::E7, 7, 8, 2),
        (LieType::E8, 8, 9, 1),
        (LieType::F4, 4, 5, 1),
        (LieType::G2, 2, 3, 1),
    ];
    for (lt, rank, nodes, omega) in cases {
        let d = diagram(lt, rank, Isogeny::Adjoint);
        assert_eq!(d.node_count(), nodes, "{}", d.ambient_label());
        assert_eq!(d.omega_order(), omega, "{}", d.ambient_label());
        let sc = diagram(lt, rank, Isogeny::SimplyConnected);
        assert_eq!(sc.omega_order(), 1, "{}", sc.ambient_label());
    }
}

#[test]
fn constructor_rejects_bad_input() {
    assert!(AffineDiagramData::new(LieType::D, 3, Isogeny::Adjoint).is_err());
    assert!(AffineDiagramData::new(LieType::B, 1, Isogeny::Adjoint).is_err());
    assert!(AffineDiagramData::new(LieType::E6, 7, Isogeny::Adjoint).is_err());
    assert!(AffineDiagramData::new(LieType::A, 99, Isogeny::Adjoint).is_err());
    assert!(LieType::parse("H3").is_err());
    assert!(Isogeny::parse("split").is_err());
}

#[test]
fn parse_accepts_cli_forms() {
    let d = AffineDiagramData::parse("a", Some(3), Isogeny::Adjoint).unwrap();
    assert_eq!(d.ambient_label(), "A(3)");
    let e = AffineDiagramData::parse("E7", None, Isogeny::SimplyConnected).unwrap();
    assert_eq!(e.ambient_label(), "E7(7) sc");
    assert!(AffineDiagramData::parse("B", None, Isogeny::Adjoint).is_err());
}

#[test]
fn type_a_classes_follow_divisors() {
    // One class per divisor m of n: the orbit of node 0 under the rotation
    // subgroup of index m, leaving m chains of length n/m - 1.
    for n in 2u64..=6 {
        let d = diagram(LieType::A, n - 1, Isogeny::Adjoint);
        let classes = smax(&d).unwrap();
        let divisors: Vec<u64> = (1..=n).filter(|m| n % m == 0).collect();
        assert_eq!(classes.len(), divisors.len(), "A({}) class count", n - 1);
        for (cls, &m) in classes.iter().zip(divisors.iter()) {
            assert_eq!(cls.a_order as u64, m, "subgroup order for divisor {m}");
            let step = (n / m) as usize;
            let orbit: Vec<usize> = (0..m as usize).map(|t| t * step).collect();
            assert_eq!(cls.orbit, orbit);
            if m == n {
                assert_eq!(cls.quotient, "-");
                assert!(cls.components.is_empty());
            } else {
                assert_eq!(cls.components.len(), 1);
                let co = &cls.components[0];
                assert_eq!(co.label, format!("A{}", step - 1));
                assert_eq!(co.copies, m as usize);
                assert_eq!(co.auto_order, 1);
            }
        }
    }
}

#[test]
fn pgl2_serves_twists_unevenly() {
    let d = diagram(LieType::A, 1, Isogeny::Adjoint);
    let classes = smax(&d).unwrap();
    assert_eq!(quotients(&classes), vec!["A1", "-"]);
    assert_eq!(classes[0].twists, vec!["1"]);
    assert_eq!(classes[1].twists, vec!["1", "r^1"]);
    assert_eq!(classes_for_twist(&classes, "1").len(), 2);
    let twisted = classes_for_twist(&classes, "r^1");
    assert_eq!(twisted.len(), 1);
    assert_eq!(twisted[0].orbit, vec![0, 1]);
}

#[test]
fn rank_two_b_matches_hand_list() {
    let d = diagram(LieType::B, 2, Isogeny::Adjoint);
    let classes = smax(&d).unwrap();
    assert_eq!(classes.len(), 3);
    assert_eq!(classes[0].orbit, vec![0]);
    assert_eq!(classes[0].quotient, "B2");
    assert_eq!(classes[1].orbit, vec![0, 2]);
    assert_eq!(classes[1].quotient, "A1");
    assert_eq!(classes[2].orbit, vec![1]);
    assert_eq!(classes[2].quotient, "A1xA1");
    assert_eq!(classes[2].components[0].copies, 2);
}

#[test]
fn rank_two_c_simply_connected_keeps_every_vertex() {
    let d = diagram(LieType::C, 2, Isogeny::SimplyConnected);
    let classes = smax(&d).unwrap();
    assert_eq!(quotients(&classes), vec!["C2", "C1xC1", "C2"]);
    let orbits: Vec<Vec<usize>> = classes.iter().map(|c| c.orbit.clone()).collect();
    assert_eq!(orbits, vec![vec![0], vec![1], vec![2]]);
}

#[test]
fn rank_two_c_adjoint_matches_hand_list() {
    let d = diagram(LieType::C, 2, Isogeny::Adjoint);
    let classes = smax(&d).unwrap();
    assert_eq!(classes.len(), 3);
    assert_eq!(classes[0].orbit, vec![0]);
    assert_eq!(classes[0].quotient, "C2");
    assert_eq!(classes[1].orbit, vec![0, 2]);
    assert_eq!(classes[1].quotient, "A1");
    assert_eq!(classes[2].orbit, vec![1]);
    assert_eq!(classes[2].quotient, "C1xC1");
    assert_eq!(classes[2].components[0].copies, 2);
}

#[test]
fn type_b_adjoint_counts_and_quotients() {
    let b3 = smax(&diagram(LieType::B, 3, Isogeny::Adjoint)).unwrap();
    let mut q3 = quotients(&b3);
    q3.sort();
    assert_eq!(q3, vec!["A1xA1xA1", "A3", "B2", "B3"]);

    let b4 = smax(&diagram(LieType::B, 4, Isogeny::Adjoint)).unwrap();
    let mut q4 = quotients(&b4);
    q4.sort();
    assert_eq!(q4, vec!["A1xA1xB2", "A1xA3", "B3", "B4", "D4"]);
}

#[test]
fn type_c_adjoint_counts_and_quotients() {
    let c3 = smax(&diagram(LieType::C, 3, Isogeny::Adjoint)).unwrap();
    let mut q3 = quotients(&c3);
    q3.sort();
    assert_eq!(q3, vec!["A2", "C1xC1", "C1xC2", "C3"]);

    let c4 = smax(&diagram(LieType::C, 4, Isogeny::Adjoint)).unwrap();
    let mut q4 = quotients(&c4);
    q4.sort();
    assert_eq!(q4, vec!["A1xC1xC1", "A3", "C1xC3", "C2xC2", "C4"]);
}

#[test]
fn type_d_adjoint_counts_and_quotients() {
    let d4 = smax(&diagram(LieType::D, 4, Isogeny::Adjoint)).unwrap();
    let mut q4 = quotients(&d4);
    q4.sort();
    assert_eq!(q4, vec!["A1", "A1xA1xA1xA1", "A3", "A3", "A3", "D4"]);
    // Each order-two subgroup contributes one class with an induced
    // automorphism on its A3 quotient.
    let a3: Vec<&MaxCompactClass> =
        d4.iter().filter(|c| c.quotient == "A3").collect();
    assert_eq!(a3.len(), 3);
    for cls in a3 {
        assert_eq!(cls.a_order, 2);
        assert_eq!(cls.components[0].auto_order, 2);
    }

    let d5 = smax(&diagram(LieType::D, 5, Isogeny::Adjoint)).unwrap();
    let mut q5 = quotients(&d5);
    q5.sort();
    assert_eq!(q5, vec!["A1xA1xA1xA1", "A1xA1xA3", "A2", "D4", "D5"]);
}

#[test]
fn exceptional_adjoint_class_counts() {
    let e6 = smax(&diagram(LieType::E6, 6, Isogeny::Adjoint)).unwrap();
    let mut q6 = quotients(&e6);
    q6.sort();
    assert_eq!(q6, vec!["A1xA1xA1xA1", "A1xA5", "A2xA2xA2", "D4", "E6"]);
    let d4 = e6.iter().find(|c| c.quotient == "D4").unwrap();
    assert_eq!(d4.components[0].auto_order, 3);

    let e7 = smax(&diagram(LieType::E7, 7, Isogeny::Adjoint)).unwrap();
    let mut q7 = quotients(&e7);
    q7.sort();
    assert_eq!(
        q7,
        vec![
            "A1xA1xD4",
            "A1xA3xA3",
            "A1xD6",
            "A2xA2xA2",
            "A2xA5",
            "A7",
            "E6",
            "E7"
        ]
    );
    let a7 = e7.iter().find(|c| c.quotient == "A7").unwrap();
    assert_eq!(a7.components[0].auto_order, 2);
}

#[test]
fn trivial_rotation_groups_give_one_class_per_node() {
    let e8 = smax(&diagram(LieType::E8, 8, Isogeny::Adjoint)).unwrap();
    let mut q8 = quotients(&e8);
    q8.sort();
    assert_eq!(
        q8,
        vec![
            "A1xA2xA5", "A1xA7", "A1xE7", "A2xE6", "A3xD5", "A4xA4", "A8", "D8", "E8"
        ]
    );

    let f4 = smax(&diagram(LieType::F4, 4, Isogeny::Adjoint)).unwrap();
    let mut qf = quotients(&f4);
    qf.sort();
    assert_eq!(qf, vec!["A1xA3", "A1xC3", "A2xA2", "B4", "F4"]);

    let g2 = smax(&diagram(LieType::G2, 2, Isogeny::Adjoint)).unwrap();
    let mut qg = quotients(&g2);
    qg.sort();
    assert_eq!(qg, vec!["A1xA1", "A2", "G2"]);
}

#[test]
fn simply_connected_forms_keep_all_vertices() {
    // Trivial rotation group: every single-node orbit qualifies, nothing
    // else does.
    for (lt, rank) in [
        (LieType::A, 3),
        (LieType::B, 3),
        (LieType::C, 3),
        (LieType::D, 4),
        (LieType::E6, 6),
    ] {
        let d = diagram(lt, rank, Isogeny::SimplyConnected);
        let classes = smax(&d).unwrap();
        assert_eq!(classes.len(), d.node_count(), "{}", d.ambient_label());
        for cls in &classes {
            assert_eq!(cls.a_order, 1);
            assert_eq!(cls.orbit.len(), 1);
            assert_eq!(cls.twists, vec!["1"]);
        }
    }
}

#[test]
fn quotient_orderings_are_deterministic() {
    let d = diagram(LieType::E7, 7, Isogeny::Adjoint);
    let a = smax(&d).unwrap();
    let b = smax(&d).unwrap();
    assert_eq!(a, b);
    let json_a = serde_json::to_string(&a).unwrap();
    let json_b = serde_json::to_string(&b).unwrap();
    assert_eq!(json_a, json_b);
    assert!(json_a.contains("\"quotient\""));
    assert!(!json_a.contains("a_idx"));
}

#[test]
fn omega_composition_is_consistent() {
    let d = diagram(LieType::D, 5, Isogeny::Adjoint);
    assert_eq!(d.omega_order(), 4);
    // The generator has order four and its square fixes the chain.
    let gen = 1;
    let sq = d.omega_mul(gen, gen);
    let four = d.omega_mul(sq, sq);
    assert_eq!(d.omega()[four], (0..d.node_count()).collect::<Vec<_>>());
    assert_eq!(d.omega_inv(gen), d.omega_mul(sq, gen));
}
