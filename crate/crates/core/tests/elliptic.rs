use std::collections::BTreeMap;

use naft_core::chars::{self, CharTable};
use naft_core::cyc::{self, CycNum};
use naft_core::elliptic::{
    affine_elliptic_count, class_indicator, compact_pair_classes_type_a, ell_basis,
    ellip_compare, elliptic_classes, elliptic_classes_wreath, elliptic_pairing, gram_matrix,
    gram_rank, lift_class_function, matrix_rank, pgl_per_unipotent, twisted_elliptic_pairing,
    y_ell, AffineDiagram, DeltaRep, ReductiveDescriptor,
};
use naft_core::group::FiniteGroup;
use naft_core::sym;

fn int(v: i64) -> CycNum {
    CycNum::from_integer(v)
}

fn zeta(n: u64, k: i64) -> CycNum {
    CycNum::root_of_unity(n, k)
}

#[test]
fn zero_delta_pairing_is_plain_inner_product() {
    // the pairing conjugates its first argument, the inner product its
    // second, so the argument order swaps
    for g in [FiniteGroup::symmetric(3), FiniteGroup::cyclic(5)] {
        let delta = DeltaRep::zero(&g);
        let table = CharTable::of(&g).unwrap();
        for i in 0..table.nrows() {
            for j in 0..table.nrows() {
                let lhs = elliptic_pairing(&delta, table.row(i), table.row(j)).unwrap();
                let rhs = chars::inner_product(&g, table.row(j), table.row(i)).unwrap();
                assert_eq!(lhs, rhs, "{}: rows {i},{j}", g.name());
            }
        }
    }
}

#[test]
fn sign_delta_on_z2() {
    let g = FiniteGroup::cyclic(2);
    let table = CharTable::of(&g).unwrap();
    let c1 = g.class_of(&vec![1]).unwrap();
    let sign_row = (0..table.nrows())
        .find(|&i| *table.value(i, c1) == int(-1))
        .unwrap();
    let delta = DeltaRep::character(&table, sign_row).unwrap();

    let reps = elliptic_classes(&delta).unwrap();
    assert_eq!(reps.len(), 1);
    assert_eq!(reps[0], vec![1]);

    // the trivial character pairs with itself to 1
    let triv = (0..table.nrows())
        .find(|&i| table.row(i).iter().all(|v| v.is_one()))
        .unwrap();
    let p = elliptic_pairing(&delta, table.row(triv), table.row(triv)).unwrap();
    assert_eq!(p, int(1));

    assert_eq!(gram_rank(&delta).unwrap(), 1);
}

#[test]
fn hermitian_matches_inverse_evaluation_on_characters() {
    // on character rows, conjugating the first argument is the same as
    // evaluating it at inverse elements
    let g = FiniteGroup::symmetric(3);
    let delta = DeltaRep::reflection_symmetric(3).unwrap();
    let table = CharTable::of(&g).unwrap();
    let dets: Vec<CycNum> = g
        .classes()
        .unwrap()
        .iter()
        .map(|info| delta.det_one_minus(&info.rep).unwrap())
        .collect();
    for i in 0..table.nrows() {
        for j in 0..table.nrows() {
            let lhs = elliptic_pairing(&delta, table.row(i), table.row(j)).unwrap();
            let mut acc = CycNum::zero();
            for w in g.elements().unwrap() {
                let c = g.class_of(w).unwrap();
                let cinv = g.class_of(&g.inv(w)).unwrap();
                let term = &(&dets[c] * table.value(i, cinv)) * table.value(j, c);
                acc += &term;
            }
            let rhs = acc.scale(&num_rational::BigRational::new(
                num_bigint::BigInt::from(1),
                num_bigint::BigInt::from(g.order()),
            ));
            assert_eq!(lhs, rhs, "rows {i},{j}");
        }
    }
}

#[test]
fn pairing_is_hermitian_in_its_arguments() {
    let delta = DeltaRep::cyclic_rotation(5).unwrap();
    let g = delta.group().clone();
    let nc = g.classes().unwrap().len();
    let f: Vec<CycNum> = (0..nc).map(|c| zeta(5, c as i64)).collect();
    let fp: Vec<CycNum> = (0..nc).map(|c| &int(c as i64) + &zeta(10, c as i64)).collect();
    let ab = elliptic_pairing(&delta, &f, &fp).unwrap();
    let ba = elliptic_pairing(&delta, &fp, &f).unwrap();
    assert_eq!(ab.conjugate(), ba);
}

#[test]
fn stable_basis_orthogonality() {
    for delta in [
        DeltaRep::cyclic_rotation(6).unwrap(),
        DeltaRep::reflection_symmetric(4).unwrap(),
        DeltaRep::wreath_monomial(2, 2).unwrap(),
    ] {
        let g = delta.group().clone();
        let basis = ell_basis(&delta).unwrap();
        for (i, fi) in basis.functions.iter().enumerate() {
            for (j, fj) in basis.functions.iter().enumerate() {
                let p = elliptic_pairing(&delta, fi, fj).unwrap();
                if i != j {
                    assert!(p.is_zero(), "{}: off-diagonal ({i},{j})", g.name());
                } else {
                    // norm is the centralizer order times the weight of the
                    // inverse representative
                    let rep = &basis.reps[i];
                    let c = g.class_of(rep).unwrap();
                    let size = g.classes().unwrap()[c].size;
                    let z = (g.order() / size) as i64;
                    let winv = delta.det_one_minus(&g.inv(rep)).unwrap();
                    assert_eq!(p, &int(z) * &winv, "{}: norm {i}", g.name());
                    assert_eq!(basis.norms[i], p);
                }
            }
        }
    }
}

#[test]
fn ell_basis_small_examples() {
    // sign character of the two-element group: one elliptic class, and the
    // basis function is twice the indicator of the nontrivial class
    let g = FiniteGroup::cyclic(2);
    let table = CharTable::of(&g).unwrap();
    let c1 = g.class_of(&vec![1]).unwrap();
    let sign_row = (0..table.nrows())
        .find(|&i| *table.value(i, c1) == int(-1))
        .unwrap();
    let delta = DeltaRep::character(&table, sign_row).unwrap();
    let basis = ell_basis(&delta).unwrap();
    assert_eq!(basis.reps.len(), 1);
    let mut expected = vec![int(0), int(0)];
    expected[c1] = int(2);
    assert_eq!(basis.functions[0], expected);
    assert_eq!(basis.norms[0], int(4));

    // zero-dimensional weight on the Klein group: every class is elliptic
    let k4 = FiniteGroup::elem_abelian_2(2);
    let dz = DeltaRep::zero(&k4);
    let basis = ell_basis(&dz).unwrap();
    assert_eq!(basis.reps.len(), 4);
    for n in &basis.norms {
        assert_eq!(*n, int(4));
    }

    // trivial group
    let t = FiniteGroup::cyclic(1);
    let basis = ell_basis(&DeltaRep::zero(&t)).unwrap();
    assert_eq!(basis.reps.len(), 1);
    assert_eq!(basis.norms[0], int(1));
}

#[test]
fn twisted_pairing_reduces_to_plain_sum_on_whole_group() {
    let delta = DeltaRep::reflection_symmetric(3).unwrap();
    let g = delta.group().clone();
    let table = CharTable::of(&g).unwrap();
    let f = lift_class_function(&g, table.row(1)).unwrap();
    let fp = lift_class_function(&g, table.row(2)).unwrap();
    let tw = twisted_elliptic_pairing(&delta, &g, &g.id(), &f, &fp).unwrap();
    let plain = elliptic_pairing(&delta, table.row(1), table.row(2)).unwrap();
    assert_eq!(tw, plain);
}

#[test]
fn twisted_pairing_on_trivial_subgroup() {
    // single twisted term: the weight of theta times the product of values
    let g = FiniteGroup::cyclic(2);
    let table = CharTable::of(&g).unwrap();
    let c1 = g.class_of(&vec![1]).unwrap();
    let sign_row = (0..table.nrows())
        .find(|&i| *table.value(i, c1) == int(-1))
        .unwrap();
    let delta = DeltaRep::character(&table, sign_row).unwrap();
    let sub = g.subgroup(&[]).unwrap();
    let theta = vec![1i64];
    let idx = g.element_index(&theta).unwrap();
    let mut f = vec![CycNum::zero(); 2];
    f[idx] = int(3);
    let mut fp = vec![CycNum::zero(); 2];
    fp[idx] = int(5);
    let tw = twisted_elliptic_pairing(&delta, &sub, &theta, &f, &fp).unwrap();
    assert_eq!(tw, int(30), "det(1 - (-1)) = 2 times 3 times 5");
}

#[test]
fn twisted_pairing_frozen_values_for_extensions() {
    // cyclic group of order 4 over its index-two subgroup; the faithful
    // character is the weight, and the two extensions of the faithful
    // subgroup character pair to 1 against themselves and -1 crosswise
    let big = FiniteGroup::cyclic(4);
    let table = CharTable::of(&big).unwrap();
    let c1 = big.class_of(&vec![1]).unwrap();
    let chi1 = (0..table.nrows())
        .find(|&i| *table.value(i, c1) == zeta(4, 1))
        .unwrap();
    let chi3 = (0..table.nrows())
        .find(|&i| *table.value(i, c1) == zeta(4, 3))
        .unwrap();
    let delta = DeltaRep::character(&table, chi1).unwrap();
    let sub = big.subgroup(&[vec![2]]).unwrap();
    let theta = vec![1i64];
    let ext1 = lift_class_function(&big, table.row(chi1)).unwrap();
    let ext3 = lift_class_function(&big, table.row(chi3)).unwrap();
    let same = twisted_elliptic_pairing(&delta, &sub, &theta, &ext1, &ext1).unwrap();
    assert_eq!(same, int(1));
    let mixed = twisted_elliptic_pairing(&delta, &sub, &theta, &ext1, &ext3).unwrap();
    assert_eq!(mixed, int(-1));
}

#[test]
fn symmetric_reflection_elliptic_class_is_the_full_cycle() {
    for n in [3u32, 4, 5] {
        let delta = DeltaRep::reflection_symmetric(n).unwrap();
        let g = delta.group().clone();
        let reps = elliptic_classes(&delta).unwrap();
        assert_eq!(reps.len(), 1, "S{n}");
        assert_eq!(g.element_order(&reps[0]), u64::from(n), "S{n}");
    }
}

#[test]
fn signed_rank_two_elliptic_classes() {
    let delta = DeltaRep::reflection_signed(2).unwrap();
    let g = delta.group().clone();
    let reps = elliptic_classes(&delta).unwrap();
    assert_eq!(reps.len(), 2);
    let mut orders: Vec<u64> = reps.iter().map(|w| g.element_order(w)).collect();
    orders.sort_unstable();
    assert_eq!(orders, vec![2, 4], "central -1 and the rotations");
}

#[test]
fn abelian_faithful_elliptic_classes() {
    // a one-dimensional weight is elliptic exactly off its kernel
    let g = FiniteGroup::cyclic(6);
    let table = CharTable::of(&g).unwrap();
    let c1 = g.class_of(&vec![1]).unwrap();
    let faithful = (0..table.nrows())
        .find(|&i| *table.value(i, c1) == zeta(6, 1))
        .unwrap();
    let delta = DeltaRep::character(&table, faithful).unwrap();
    assert_eq!(elliptic_classes(&delta).unwrap().len(), 5);

    // the rotation action is elliptic exactly on the coprime power classes
    for n in 1..=10u64 {
        let delta = DeltaRep::cyclic_rotation(n).unwrap();
        assert_eq!(
            elliptic_classes(&delta).unwrap().len() as u64,
            cyc::phi(n),
            "rotation n = {n}"
        );
    }
}

#[test]
fn wreath_elliptic_counts_match_totient() {
    let grid: [(u32, u32); 10] = [
        (1, 1),
        (1, 4),
        (1, 6),
        (2, 2),
        (2, 3),
        (3, 2),
        (2, 4),
        (3, 3),
        (4, 2),
        (2, 5),
    ];
    for (m, d) in grid {
        let order = (sym::factorial(u64::from(m)).pow(d)) * u64::from(d);
        assert!(order <= 100_000, "grid entry ({m},{d}) too large");
        let reps = elliptic_classes_wreath(m, d).unwrap();
        assert_eq!(reps.len() as u64, cyc::phi(u64::from(d)), "(m,d) = ({m},{d})");
    }
}

#[test]
fn y_ell_pgl_counts_and_flip() {
    let y1 = y_ell(&ReductiveDescriptor::Pgl(1)).unwrap();
    assert_eq!(y1.len(), 1);
    assert!(y1.flip_is_involution());

    let y6 = y_ell(&ReductiveDescriptor::Pgl(6)).unwrap();
    assert_eq!(y6.len(), 2);
    assert!(y6.flip_is_involution());
    let flip = y6.flip.as_ref().unwrap();
    assert_eq!(flip[0], 1, "w^1 swaps with w^5");

    let y12 = y_ell(&ReductiveDescriptor::Pgl(12)).unwrap();
    assert_eq!(y12.len(), 4);
    let flip = y12.flip.as_ref().unwrap();
    assert!(y12.flip_is_involution());
    assert!((0..4).all(|i| flip[i] != i), "no fixed exponents for n = 12");

    let y2 = y_ell(&ReductiveDescriptor::Pgl(2)).unwrap();
    let flip = y2.flip.as_ref().unwrap();
    assert_eq!(flip[0], 0, "w^1 is self-dual for n = 2");
}

#[test]
fn y_ell_per_unipotent_sums_to_rank() {
    for n in 1..=12u64 {
        let per = pgl_per_unipotent(n).unwrap();
        assert_eq!(per.len(), sym::partitions(n).len());
        let total: usize = per.iter().map(|(_, c)| c).sum();
        assert_eq!(total as u64, n, "n = {n}");
        for (label, count) in &per {
            // nonzero exactly on rectangular partitions
            let rect = {
                let inner: Vec<u64> = label
                    .trim_matches(['[', ']'])
                    .split(',')
                    .map(|s| s.trim().parse().unwrap())
                    .collect();
                inner.iter().all(|&p| p == inner[0])
            };
            assert_eq!(*count > 0, rect, "label {label}");
        }
    }
}

#[test]
fn y_ell_rectangular_centralizer_matches_smaller_rank() {
    let y = y_ell(&ReductiveDescriptor::PglCentralizer(vec![2, 2, 2])).unwrap();
    assert_eq!(y.len(), 2, "three equal parts behave like rank three");
    assert!(y.flip_is_involution());

    let empty = y_ell(&ReductiveDescriptor::PglCentralizer(vec![3, 1])).unwrap();
    assert!(empty.is_empty());
    assert!(empty.flip_is_involution());
}

#[test]
fn y_ell_center_and_sl_dual() {
    let c3 = y_ell(&ReductiveDescriptor::Center(3)).unwrap();
    assert_eq!(c3.len(), 9);
    assert!(c3.flip_is_involution());
    let flip = c3.flip.as_ref().unwrap();
    // transpose has exactly n fixed points
    assert_eq!((0..9).filter(|&i| flip[i] == i).count(), 3);

    let reg = y_ell(&ReductiveDescriptor::SlDual(vec![4])).unwrap();
    assert_eq!(reg.len(), 16);
    assert!(reg.flip_is_involution());

    let nonreg = y_ell(&ReductiveDescriptor::SlDual(vec![2, 1])).unwrap();
    assert!(nonreg.is_empty());
}

#[test]
fn y_ell_o2_six_classes() {
    let y = y_ell(&ReductiveDescriptor::O2).unwrap();
    assert_eq!(y.len(), 6);
    assert!(y.flip_is_involution());
    let flip = y.flip.as_ref().unwrap();
    assert_eq!(flip, &vec![2, 3, 0, 1, 4, 5]);
    // fixed classes are exactly the ones with both labels off the center
    for (i, cls) in y.classes.iter().enumerate() {
        let central_s = cls.s_label == "1" || cls.s_label == "-1";
        let central_h = cls.h_label == "1" || cls.h_label == "-1";
        assert_eq!(flip[i] == i, !central_s && !central_h, "class {i}");
    }
}

#[test]
fn gram_rank_equals_elliptic_class_count() {
    let deltas = vec![
        DeltaRep::zero(&FiniteGroup::elem_abelian_2(2)),
        DeltaRep::zero(&FiniteGroup::symmetric(3)),
        DeltaRep::reflection_symmetric(3).unwrap(),
        DeltaRep::reflection_symmetric(4).unwrap(),
        DeltaRep::reflection_symmetric(5).unwrap(),
        DeltaRep::cyclic_rotation(8).unwrap(),
        DeltaRep::cyclic_rotation(12).unwrap(),
        DeltaRep::wreath_sum_zero(3, 2).unwrap(),
        DeltaRep::wreath_sum_zero(2, 3).unwrap(),
        DeltaRep::wreath_monomial(2, 2).unwrap(),
        DeltaRep::wreath_monomial(4, 2).unwrap(),
    ];
    for delta in deltas {
        let expected = elliptic_classes(&delta).unwrap().len();
        assert_eq!(
            gram_rank(&delta).unwrap(),
            expected,
            "group {}",
            delta.group().name()
        );
    }
}

#[test]
fn gram_rank_frozen_values() {
    for n in 1..=12u64 {
        let delta = DeltaRep::cyclic_rotation(n).unwrap();
        assert_eq!(
            gram_rank(&delta).unwrap() as u64,
            cyc::phi(n),
            "rotation n = {n}"
        );
    }
    for n in [3u32, 4, 5] {
        let delta = DeltaRep::reflection_symmetric(n).unwrap();
        assert_eq!(gram_rank(&delta).unwrap(), 1, "S{n}");
    }
    assert_eq!(
        gram_rank(&DeltaRep::zero(&FiniteGroup::elem_abelian_2(2))).unwrap(),
        4
    );
    assert_eq!(gram_rank(&DeltaRep::wreath_sum_zero(3, 2).unwrap()).unwrap(), 1);
    assert_eq!(gram_rank(&DeltaRep::wreath_sum_zero(2, 3).unwrap()).unwrap(), 2);
}

#[test]
fn gram_matrix_is_full_on_zero_weight() {
    // with the zero-dimensional weight the Gram matrix is the identity
    let g = FiniteGroup::symmetric(4);
    let table = CharTable::of(&g).unwrap();
    let delta = DeltaRep::zero(&g);
    let gram = gram_matrix(&table, &delta).unwrap();
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, int(i64::from(i == j)));
        }
    }
    assert_eq!(matrix_rank(&gram).unwrap(), table.nrows());
}

#[test]
fn explicit_matrices_validate_and_match() {
    let g = FiniteGroup::cyclic(2);
    let table = CharTable::of(&g).unwrap();
    let c1 = g.class_of(&vec![1]).unwrap();
    let sign_row = (0..table.nrows())
        .find(|&i| *table.value(i, c1) == int(-1))
        .unwrap();
    let by_char = DeltaRep::character(&table, sign_row).unwrap();

    let mut map = BTreeMap::new();
    map.insert(vec![0i64], vec![vec![int(1)]]);
    map.insert(vec![1i64], vec![vec![int(-1)]]);
    let by_mat = DeltaRep::from_matrices(&g, &map).unwrap();
    for w in g.elements().unwrap() {
        assert_eq!(
            by_char.det_one_minus(w).unwrap(),
            by_mat.det_one_minus(w).unwrap()
        );
    }

    let mut bad = BTreeMap::new();
    bad.insert(vec![0i64], vec![vec![int(1)]]);
    bad.insert(vec![1i64], vec![vec![int(2)]]);
    assert!(DeltaRep::from_matrices(&g, &bad).is_err(), "2 is not an involution value");
}

#[test]
fn compact_pair_totals_match_divisor_formula() {
    // independent count: summing Euler phi of d times the number of
    // partitions of n / d over divisors d of n
    for n in 1..=12u64 {
        let classes = compact_pair_classes_type_a(n).unwrap();
        let formula: usize = cyc::divisors(n)
            .into_iter()
            .map(|d| cyc::phi(d) as usize * sym::partitions(n / d).len())
            .sum();
        assert_eq!(classes.len(), formula, "n = {n}");
    }
    let totals: Vec<usize> = (1..=6u64)
        .map(|n| compact_pair_classes_type_a(n).unwrap().len())
        .collect();
    assert_eq!(totals, vec![1, 3, 5, 9, 11, 20]);
}

#[test]
fn compact_pair_minimal_stratum_count_is_rank() {
    for n in 1..=8u64 {
        let classes = compact_pair_classes_type_a(n).unwrap();
        let ones = vec![1u64; n as usize];
        let count = classes.iter().filter(|c| c.unipotent == ones).count();
        assert_eq!(count as u64, n, "n = {n}");
    }
}

#[test]
fn compact_pair_levi_blocks_are_rectangles() {
    let classes = compact_pair_classes_type_a(4).unwrap();
    let c = classes
        .iter()
        .find(|c| c.unipotent == vec![2, 2] && c.d == 2)
        .unwrap();
    assert_eq!(c.levi_blocks(), vec![(4, 1)]);
    assert_eq!(c.display(), "u=[2,2] d=2 k=1");
    for c in &classes {
        let total: u64 = c.levi_blocks().iter().map(|(s, r)| s * r).sum();
        assert_eq!(total, 4, "{}", c.display());
    }
}

// Exact model of the adjoint quotient of monomial matrices at a finite
// root-of-unity level: a permutation with coordinate exponents, taken up
// to a global exponent shift. Multiplication applies the right factor
// first. The commutator of two honest lifts is a global scalar exactly
// when the pair commutes in the quotient; the scalar is recorded as an
// exponent, and the pair has commuting lifts exactly when it vanishes.
// Conjugation inside the model misses the discrete Fourier conjugators
// that mix permutation and diagonal parts, so those are added as partial
// moves: conjugate by the Fourier matrix exactly over the cyclotomics and
// keep the edge whenever the result is again monomial at the same level.
mod monomial {
    use itertools::Itertools;
    use naft_core::cyc::CycNum;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::collections::{HashMap, HashSet};

    pub const NOSCAL: u16 = u16::MAX;

    #[derive(Clone, PartialEq, Eq, Hash)]
    pub struct MElem {
        pub perm: Vec<u8>,
        pub exps: Vec<u16>,
    }

    pub struct Model {
        pub n: usize,
        pub lvl: u16,
        pub elems: Vec<MElem>,
        pub mul: Vec<u32>,
        pub scalar: Vec<u16>,
        pub inv: Vec<u32>,
        pub gens: Vec<u32>,
    }

    fn canon(perm: Vec<u8>, mut exps: Vec<u16>, lvl: u16) -> MElem {
        let base = exps[0];
        for e in exps.iter_mut() {
            *e = (*e + lvl - base) % lvl;
        }
        MElem { perm, exps }
    }

    fn raw_mul(a: &MElem, b: &MElem, lvl: u16) -> (Vec<u8>, Vec<u16>) {
        let n = a.perm.len();
        let mut perm = vec![0u8; n];
        let mut exps = vec![0u16; n];
        for i in 0..n {
            let bi = b.perm[i] as usize;
            perm[i] = a.perm[bi];
            exps[i] = (b.exps[i] + a.exps[bi]) % lvl;
        }
        (perm, exps)
    }

    pub fn build(n: usize, lvl: u16) -> Model {
        let mut elems = Vec::new();
        for perm in (0..n as u8).permutations(n) {
            let combos = (lvl as usize).pow(n as u32 - 1);
            for mut code in 0..combos {
                let mut exps = vec![0u16; n];
                for e in exps.iter_mut().skip(1) {
                    *e = (code % lvl as usize) as u16;
                    code /= lvl as usize;
                }
                elems.push(MElem {
                    perm: perm.clone(),
                    exps,
                });
            }
        }
        let index: HashMap<MElem, u32> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let ne = elems.len();
        let mut mul = vec![0u32; ne * ne];
        let mut scalar = vec![NOSCAL; ne * ne];
        for a in 0..ne {
            for b in 0..ne {
                let (p, e) = raw_mul(&elems[a], &elems[b], lvl);
                let (q, f) = raw_mul(&elems[b], &elems[a], lvl);
                if p == q {
                    let d0 = (e[0] + lvl - f[0]) % lvl;
                    if (1..p.len()).all(|i| (e[i] + lvl - f[i]) % lvl == d0) {
                        scalar[a * ne + b] = d0;
                    }
                }
                mul[a * ne + b] = index[&canon(p, e, lvl)];
            }
        }
        let id = index[&MElem {
            perm: (0..n as u8).collect(),
            exps: vec![0; n],
        }];
        let mut inv = vec![0u32; ne];
        for a in 0..ne {
            inv[a] = (0..ne)
                .find(|&b| mul[a * ne + b] == id)
                .expect("group inverse") as u32;
        }
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<u8> = (0..n as u8).collect();
            swap.swap(0, 1);
            gens.push(index[&MElem {
                perm: swap,
                exps: vec![0; n],
            }]);
            let cycle: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
            gens.push(index[&MElem {
                perm: cycle,
                exps: vec![0; n],
            }]);
        }
        let mut bump = vec![0u16; n];
        bump[n - 1] = 1;
        gens.push(index[&MElem {
            perm: (0..n as u8).collect(),
            exps: bump,
        }]);
        Model {
            n,
            lvl,
            elems,
            mul,
            scalar,
            inv,
            gens,
        }
    }

    /// Conjugate one element by the Fourier matrix `(zeta_n^{ i j })` and
    /// return its index when the result is monomial at the model level.
    fn fourier_conj(
        e: &MElem,
        n: usize,
        lvl: u16,
        index: &HashMap<MElem, u32>,
    ) -> Option<u32> {
        let step = i64::from(lvl) / n as i64;
        let inv_n = BigRational::new(BigInt::from(1), BigInt::from(n as i64));
        let mut perm = vec![u8::MAX; n];
        let mut exps = vec![0u16; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = CycNum::zero();
                for l in 0..n {
                    let expo = step * (i as i64) * i64::from(e.perm[l])
                        + i64::from(e.exps[l])
                        - step * (l as i64) * (j as i64);
                    acc += &CycNum::root_of_unity(u64::from(lvl), expo);
                }
                let val = acc.scale(&inv_n);
                if val.is_zero() {
                    continue;
                }
                let (ord, k) = val.as_root_of_unity()?;
                if u64::from(lvl) % ord != 0 || perm[j] != u8::MAX {
                    return None;
                }
                perm[j] = i as u8;
                exps[j] = ((k * (u64::from(lvl) / ord)) % u64::from(lvl)) as u16;
            }
        }
        if perm.iter().any(|&p| p == u8::MAX) {
            return None;
        }
        let base = exps[0];
        for v in exps.iter_mut() {
            *v = (*v + lvl - base) % lvl;
        }
        index.get(&MElem { perm, exps }).copied()
    }

    fn fourier_map(model: &Model) -> Vec<Option<u32>> {
        assert_eq!(model.lvl as usize % model.n, 0);
        let index: HashMap<MElem, u32> = model
            .elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        model
            .elems
            .iter()
            .map(|e| fourier_conj(e, model.n, model.lvl, &index))
            .collect()
    }

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let up = parent[parent[x as usize] as usize];
            parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(parent: &mut [u32], a: u32, b: u32) {
        let ra = find(parent, a);
        let rb = find(parent, b);
        if ra != rb {
            parent[rb as usize] = ra;
        }
    }

    /// Number of equivalence classes of commuting pairs embedded from the
    /// sublevel `lvl / ratio`, closing under simultaneous conjugation and
    /// under multiplying either slot by an element whose lift commutes
    /// honestly with lifts of both slots.
    pub fn embedded_pair_classes(model: &Model, ratio: u16) -> usize {
        let ne = model.elems.len();
        let words = ne.div_ceil(64);
        let mut honest = vec![0u64; ne * words];
        for a in 0..ne {
            for b in 0..ne {
                if model.scalar[a * ne + b] == 0 {
                    honest[a * words + b / 64] |= 1u64 << (b % 64);
                }
            }
        }
        let conj: Vec<Vec<u32>> = model
            .gens
            .iter()
            .map(|&g| {
                (0..ne)
                    .map(|x| {
                        let gx = model.mul[g as usize * ne + x] as usize;
                        model.mul[gx * ne + model.inv[g as usize] as usize]
                    })
                    .collect()
            })
            .collect();
        let fourier = fourier_map(model);
        let mut parent: Vec<u32> = (0..(ne * ne) as u32).collect();
        for s in 0..ne {
            for h in 0..ne {
                if model.scalar[s * ne + h] == NOSCAL {
                    continue;
                }
                let slot = (s * ne + h) as u32;
                for cj in &conj {
                    union(
                        &mut parent,
                        slot,
                        cj[s] * ne as u32 + cj[h],
                    );
                }
                if let (Some(fs), Some(fh)) = (fourier[s], fourier[h]) {
                    union(&mut parent, slot, fs * ne as u32 + fh);
                }
                for w in 0..words {
                    let mut bits = honest[s * words + w] & honest[h * words + w];
                    while bits != 0 {
                        let t = w * 64 + bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let ht = model.mul[h * ne + t];
                        union(&mut parent, slot, (s * ne) as u32 + ht);
                        let st = model.mul[s * ne + t];
                        union(&mut parent, slot, st * ne as u32 + h as u32);
                    }
                }
            }
        }
        let embedded: Vec<bool> = model
            .elems
            .iter()
            .map(|e| e.exps.iter().all(|&x| x % ratio == 0))
            .collect();
        let mut roots = HashSet::new();
        for s in 0..ne {
            if !embedded[s] {
                continue;
            }
            for h in 0..ne {
                if !embedded[h] || model.scalar[s * ne + h] == NOSCAL {
                    continue;
                }
                roots.insert(find(&mut parent, (s * ne + h) as u32));
            }
        }
        roots.len()
    }
}

#[test]
fn compact_pair_rank_two_matches_brute_force() {
    // level 12 closure of pairs embedded at level 6
    let model = monomial::build(2, 12);
    let stratum = monomial::embedded_pair_classes(&model, 2);
    let classes = compact_pair_classes_type_a(2).unwrap();
    let ones = classes.iter().filter(|c| c.unipotent == vec![1, 1]).count();
    assert_eq!(stratum, ones, "minimal stratum");
    // the regular stratum has a trivial component group and adds one class
    assert_eq!(stratum + 1, classes.len());
}

#[test]
fn compact_pair_rank_three_matches_brute_force() {
    // level 18 closure of pairs embedded at level 6
    let model = monomial::build(3, 18);
    let stratum = monomial::embedded_pair_classes(&model, 3);
    let classes = compact_pair_classes_type_a(3).unwrap();
    let ones = classes
        .iter()
        .filter(|c| c.unipotent == vec![1, 1, 1])
        .count();
    assert_eq!(stratum, ones, "minimal stratum");
    // the subregular stratum has connected centralizer and the regular one
    // is trivial; each contributes a single class
    assert_eq!(stratum + 2, classes.len());
}

#[test]
fn affine_counts_type_a() {
    for m in 1..=11u32 {
        let out = affine_elliptic_count(&AffineDiagram::A(m)).unwrap();
        assert_eq!(out.total, m as usize + 1, "A{m} affine");
        assert_eq!(out.per.len(), m as usize + 1);
        assert!(out.per.iter().all(|p| p.count == 1));
    }
}

#[test]
fn affine_counts_other_types_frozen() {
    let cases: Vec<(AffineDiagram, Vec<usize>, usize)> = vec![
        (AffineDiagram::C(2), vec![2, 1, 2], 5),
        (AffineDiagram::C(3), vec![3, 2, 2, 3], 10),
        (AffineDiagram::C(4), vec![5, 3, 4, 3, 5], 20),
        (AffineDiagram::B(3), vec![3, 3, 1, 1], 8),
        (AffineDiagram::B(4), vec![5, 5, 2, 1, 3], 16),
        (AffineDiagram::D4, vec![3, 3, 1, 3, 3], 13),
        (AffineDiagram::G2, vec![3, 1, 1], 5),
        (AffineDiagram::F4, vec![9, 3, 1, 1, 5], 19),
    ];
    for (diagram, per, total) in cases {
        let out = affine_elliptic_count(&diagram).unwrap();
        let counts: Vec<usize> = out.per.iter().map(|p| p.count).collect();
        assert_eq!(counts, per, "{}", out.diagram);
        assert_eq!(out.total, total, "{}", out.diagram);
    }
}

#[test]
fn affine_labels_identify_subdiagrams() {
    let out = affine_elliptic_count(&AffineDiagram::B(3)).unwrap();
    let labels: Vec<&str> = out.per.iter().map(|p| p.label.as_str()).collect();
    assert_eq!(labels, vec!["B3", "B3", "A1xA1xA1", "A3"]);

    let out = affine_elliptic_count(&AffineDiagram::F4).unwrap();
    let labels: Vec<&str> = out.per.iter().map(|p| p.label.as_str()).collect();
    assert_eq!(labels, vec!["F4", "A1xC3", "A2xA2", "A1xA3", "B4"]);

    let parsed = AffineDiagram::parse("c2").unwrap();
    assert_eq!(parsed, AffineDiagram::C(2));
    assert!(AffineDiagram::parse("E8").is_err());
    assert!(AffineDiagram::parse("B9").is_err());
}

#[test]
fn ellip_compare_index_two_in_cyclic_four() {
    let big = FiniteGroup::cyclic(4);
    let table = CharTable::of(&big).unwrap();
    let c1 = big.class_of(&vec![1]).unwrap();
    let chi1 = (0..table.nrows())
        .find(|&i| *table.value(i, c1) == zeta(4, 1))
        .unwrap();
    let delta = DeltaRep::character(&table, chi1).unwrap();
    let sub = big.subgroup(&[vec![2]]).unwrap();
    let report = ellip_compare(&big, &sub, &delta).unwrap();
    assert!(report.passed(), "failures: {:?}", report.failures);
    // two subgroup characters, each stable, on two coset layers
    assert_eq!(report.checked, 16);
}

#[test]
fn ellip_compare_rotations_in_symmetric_three() {
    let delta = DeltaRep::reflection_symmetric(3).unwrap();
    let big = delta.group().clone();
    let sub = big.subgroup(&[vec![1, 2, 0]]).unwrap();
    let report = ellip_compare(&big, &sub, &delta).unwrap();
    assert!(report.passed(), "failures: {:?}", report.failures);
    // orbits: the trivial character on two layers, the rotation pair on one
    assert_eq!(report.checked, 9);
}

#[test]
fn ellip_compare_base_inside_wreath() {
    for k in [2u64, 4] {
        let delta = DeltaRep::wreath_monomial(k, 2).unwrap();
        let big = delta.group().clone();
        let g1 = big.wreath_assemble(&[vec![1], vec![0]], 0).unwrap();
        let g2 = big.wreath_assemble(&[vec![0], vec![1]], 0).unwrap();
        let sub = big.subgroup(&[g1, g2]).unwrap();
        let report = ellip_compare(&big, &sub, &delta).unwrap();
        assert!(report.passed(), "k = {k}, failures: {:?}", report.failures);
        assert!(report.checked > 0);
    }
}

#[test]
fn pairing_input_validation() {
    let delta = DeltaRep::reflection_symmetric(3).unwrap();
    let bad = vec![int(1); 2];
    assert!(elliptic_pairing(&delta, &bad, &bad).is_err());

    let g = delta.group().clone();
    let nc = g.classes().unwrap().len();
    let f = vec![int(1); nc];
    assert!(elliptic_pairing(&delta, &f, &f).is_ok());

    let short = vec![int(1); 3];
    assert!(twisted_elliptic_pairing(&delta, &g, &g.id(), &short, &short).is_err());
}

#[test]
fn class_indicator_matches_definition() {
    let g = FiniteGroup::symmetric(3);
    let w = vec![1i64, 0, 2];
    let f = class_indicator(&g, &w).unwrap();
    let c = g.class_of(&w).unwrap();
    for (j, v) in f.iter().enumerate() {
        assert_eq!(*v, int(i64::from(j == c)));
    }
}
