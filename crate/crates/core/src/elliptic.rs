//! Elliptic pairings and the enumeration of elliptic and compact pairs.
//!
//! A virtual representation `delta` of a finite group weights each class by
//! `det(1 - delta(h))`. Classes with nonzero weight are the elliptic ones,
//! and the weighted hermitian pairing on class functions descends to their
//! span, where scaled class indicators form an orthogonal basis. On top of
//! the pairing the module enumerates elliptic conjugacy classes, elliptic
//! pairs for the standard ambient descriptors, compact pair classes in
//! inner type A, and elliptic class counts for the maximal proper
//! subdiagrams of an affine diagram.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use once_cell::sync::OnceCell;

use crate::chars::CharTable;
use crate::cyc::{self, CycNum};
use crate::fourier::coset_exponents;
use crate::group::{FiniteGroup, Word};
use crate::sym;
use crate::{Error, Result};

fn ratio(num: i64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Dense square or rectangular matrix over the cyclotomic field.
pub type Matrix = Vec<Vec<CycNum>>;

fn identity_matrix(n: usize) -> Matrix {
    let mut m = vec![vec![CycNum::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = CycNum::one();
    }
    m
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let p = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![CycNum::zero(); p]; n];
    for i in 0..n {
        for (t, brow) in b.iter().enumerate() {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..p {
                if brow[j].is_zero() {
                    continue;
                }
                let term = &a[i][t] * &brow[j];
                out[i][j] += &term;
            }
        }
    }
    out
}

/// Row reduction over the field; returns the rank and, for square input
/// consumed without a zero pivot column, the determinant.
fn eliminate(rows: &mut [Vec<CycNum>]) -> Result<(usize, CycNum)> {
    let nrows = rows.len();
    let ncols = if nrows == 0 { 0 } else { rows[0].len() };
    let mut rank = 0usize;
    let mut det = CycNum::one();
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            det = CycNum::zero();
            continue;
        };
        if p != rank {
            rows.swap(p, rank);
            det = -&det;
        }
        let pivot = rows[rank][col].clone();
        det = &det * &pivot;
        let pinv = pivot.inv()?;
        for r in (rank + 1)..nrows {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] * &pinv;
            for c in col..ncols {
                let term = &factor * &rows[rank][c];
                rows[r][c] = &rows[r][c] - &term;
            }
        }
        rank += 1;
    }
    Ok((rank, det))
}

/// Rank of a matrix over the cyclotomic field.
pub fn matrix_rank(m: &Matrix) -> Result<usize> {
    let mut work = m.to_vec();
    Ok(eliminate(&mut work)?.0)
}

fn det(m: &Matrix) -> Result<CycNum> {
    let n = m.len();
    if n == 0 {
        return Ok(CycNum::one());
    }
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("determinant of non-square matrix".into()));
    }
    let mut work = m.to_vec();
    let (rank, d) = eliminate(&mut work)?;
    if rank < n {
        return Ok(CycNum::zero());
    }
    Ok(d)
}

#[derive(Clone)]
enum DeltaKind {
    /// Zero-dimensional representation; every weight is 1.
    Zero,
    /// One-dimensional representation given by its value on each class.
    Character(Vec<CycNum>),
    /// Coordinate permutation action restricted to the sum-zero subspace.
    SumZero,
    /// Natural signed permutation action.
    SignedNatural,
    /// Monomial action of a wreath product with cyclic base.
    MonomialWreath,
    /// Explicit matrices indexed by element position.
    Explicit(Vec<Matrix>),
}

/// Finite-dimensional representation used as the weight of the elliptic
/// pairing. Matrices are produced on demand; the class weights
/// `det(1 - delta(h))` are cached after the first request.
#[derive(Clone)]
pub struct DeltaRep {
    group: FiniteGroup,
    dim: usize,
    kind: DeltaKind,
    class_dets: OnceCell<Vec<CycNum>>,
}

impl DeltaRep {
    /// Zero-dimensional representation; all classes are elliptic.
    pub fn zero(group: &FiniteGroup) -> DeltaRep {
        DeltaRep {
            group: group.clone(),
            dim: 0,
            kind: DeltaKind::Zero,
            class_dets: OnceCell::new(),
        }
    }

    /// One-dimensional representation taken from a character table row.
    pub fn character(table: &CharTable, row: usize) -> Result<DeltaRep> {
        if row >= table.nrows() {
            return Err(Error::InvalidInput(format!("row {row} out of range")));
        }
        let deg = table.degree(row)?;
        if !deg.is_one() {
            return Err(Error::InvalidInput(format!(
                "row {row} has degree {deg}, expected 1"
            )));
        }
        Ok(DeltaRep {
            group: table.group().clone(),
            dim: 1,
            kind: DeltaKind::Character(table.row(row).to_vec()),
            class_dets: OnceCell::new(),
        })
    }

    /// Reflection representation of the symmetric group on `n` letters:
    /// the coordinate action restricted to the sum-zero subspace.
    pub fn reflection_symmetric(n: u32) -> Result<DeltaRep> {
        if n == 0 {
            return Err(Error::InvalidInput("need n >= 1".into()));
        }
        Ok(DeltaRep {
            group: FiniteGroup::symmetric(n),
            dim: n as usize - 1,
            kind: DeltaKind::SumZero,
            class_dets: OnceCell::new(),
        })
    }

    /// Rotation action of the cyclic group of order `n` on the sum-zero
    /// subspace of the coordinate space.
    pub fn cyclic_rotation(n: u64) -> Result<DeltaRep> {
        if n == 0 {
            return Err(Error::InvalidInput("need n >= 1".into()));
        }
        Ok(DeltaRep {
            group: FiniteGroup::cyclic(n),
            dim: n as usize - 1,
            kind: DeltaKind::SumZero,
            class_dets: OnceCell::new(),
        })
    }

    /// Coordinate action of the wreath product of the symmetric group on
    /// `m` letters by the cyclic group of order `d`, restricted to the
    /// sum-zero subspace of the `m * d`-dimensional coordinate space.
    pub fn wreath_sum_zero(m: u32, d: u32) -> Result<DeltaRep> {
        if m == 0 || d == 0 {
            return Err(Error::InvalidInput("need m, d >= 1".into()));
        }
        Ok(DeltaRep {
            group: FiniteGroup::wreath_cyclic(FiniteGroup::symmetric(m), d),
            dim: (m as usize) * (d as usize) - 1,
            kind: DeltaKind::SumZero,
            class_dets: OnceCell::new(),
        })
    }

    /// Natural signed permutation representation of the hyperoctahedral
    /// group of rank `n`.
    pub fn reflection_signed(n: u32) -> Result<DeltaRep> {
        if n == 0 {
            return Err(Error::InvalidInput("need n >= 1".into()));
        }
        Ok(DeltaRep {
            group: FiniteGroup::signed_permutation(n),
            dim: n as usize,
            kind: DeltaKind::SignedNatural,
            class_dets: OnceCell::new(),
        })
    }

    /// Monomial representation of the wreath product of the cyclic group
    /// of order `k` by the cyclic group of order `d`: coordinates are
    /// rotated by the shift and scaled by roots of unity.
    pub fn wreath_monomial(k: u64, d: u32) -> Result<DeltaRep> {
        if k == 0 || d == 0 {
            return Err(Error::InvalidInput("need k, d >= 1".into()));
        }
        Ok(DeltaRep {
            group: FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(k), d),
            dim: d as usize,
            kind: DeltaKind::MonomialWreath,
            class_dets: OnceCell::new(),
        })
    }

    /// Explicit representation from a full element-to-matrix map. The map
    /// must cover every element; the identity must map to the identity
    /// matrix and the homomorphism property is checked on sampled pairs.
    pub fn from_matrices(group: &FiniteGroup, matrices: &BTreeMap<Word, Matrix>) -> Result<DeltaRep> {
        let elements = group.elements()?;
        if matrices.len() != elements.len() {
            return Err(Error::InvalidInput(format!(
                "matrix map covers {} of {} elements",
                matrices.len(),
                elements.len()
            )));
        }
        let mut by_index: Vec<Matrix> = Vec::with_capacity(elements.len());
        let mut dim = None;
        for w in elements {
            let m = matrices
                .get(w)
                .ok_or_else(|| Error::InvalidInput(format!("no matrix for element {w:?}")))?;
            let d = *dim.get_or_insert(m.len());
            if m.len() != d || m.iter().any(|row| row.len() != d) {
                return Err(Error::InvalidInput("inconsistent matrix dimensions".into()));
            }
            by_index.push(m.clone());
        }
        let dim = dim.unwrap_or(0);
        let rep = DeltaRep {
            group: group.clone(),
            dim,
            kind: DeltaKind::Explicit(by_index),
            class_dets: OnceCell::new(),
        };
        let id_idx = group.element_index(&group.id())?;
        if let DeltaKind::Explicit(ms) = &rep.kind {
            if ms[id_idx] != identity_matrix(dim) {
                return Err(Error::InvalidInput("identity does not map to the identity matrix".into()));
            }
        }
        let sample: Vec<Word> = if group.order() <= 48 {
            elements.to_vec()
        } else {
            group.reduced_generators()?
        };
        for a in &sample {
            for b in elements {
                let ma = rep.matrix(a)?;
                let mb = rep.matrix(b)?;
                let mab = rep.matrix(&group.mul(a, b))?;
                if mat_mul(&ma, &mb) != mab {
                    return Err(Error::InvalidInput("matrix map is not a homomorphism".into()));
                }
            }
        }
        Ok(rep)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn coordinate_perm(&self, w: &Word) -> Result<Vec<usize>> {
        let g = &self.group;
        if g.symmetric_degree().is_some() {
            return Ok(w.iter().map(|&x| x as usize).collect());
        }
        if let Some(n) = g.cyclic_order() {
            let k = w[0].rem_euclid(n as i64) as usize;
            return Ok((0..n as usize).map(|i| (i + k) % n as usize).collect());
        }
        if let Ok((base, d)) = g.wreath_base() {
            if let Some(m) = base.symmetric_degree() {
                let (parts, shift) = g.wreath_parts(w)?;
                let (m, d, s) = (m as usize, d as usize, shift as usize);
                let mut perm = vec![0usize; m * d];
                for j in 0..d {
                    let jj = (j + s) % d;
                    for x in 0..m {
                        perm[j * m + x] = jj * m + parts[jj][x] as usize;
                    }
                }
                return Ok(perm);
            }
        }
        Err(Error::Unsupported(format!(
            "no coordinate action for group {}",
            g.name()
        )))
    }

    /// Matrix of the representation at one element.
    pub fn matrix(&self, w: &Word) -> Result<Matrix> {
        self.group.validate_word(w)?;
        match &self.kind {
            DeltaKind::Zero => Ok(Vec::new()),
            DeltaKind::Character(vals) => {
                let c = self.group.class_of(w)?;
                Ok(vec![vec![vals[c].clone()]])
            }
            DeltaKind::SumZero => {
                let perm = self.coordinate_perm(w)?;
                Ok(sum_zero_matrix(&perm))
            }
            DeltaKind::SignedNatural => {
                let n = self.dim;
                let mut m = vec![vec![CycNum::zero(); n]; n];
                for (i, &v) in w.iter().enumerate() {
                    let j = v.unsigned_abs() as usize - 1;
                    m[j][i] = CycNum::from_integer(if v > 0 { 1 } else { -1 });
                }
                Ok(m)
            }
            DeltaKind::MonomialWreath => {
                let (base, d) = self.group.wreath_base()?;
                let k = base
                    .cyclic_order()
                    .ok_or_else(|| Error::Unsupported("monomial action needs a cyclic base".into()))?;
                let (parts, shift) = self.group.wreath_parts(w)?;
                let d = d as usize;
                let s = shift as usize;
                let mut m = vec![vec![CycNum::zero(); d]; d];
                for j in 0..d {
                    let jj = (j + s) % d;
                    m[jj][j] = CycNum::root_of_unity(k, parts[jj][0]);
                }
                Ok(m)
            }
            DeltaKind::Explicit(ms) => {
                let idx = self.group.element_index(w)?;
                Ok(ms[idx].clone())
            }
        }
    }

    /// Matrices at one representative per conjugacy class.
    pub fn class_matrices(&self) -> Result<BTreeMap<Word, Matrix>> {
        let mut out = BTreeMap::new();
        for info in self.group.classes()? {
            out.insert(info.rep.clone(), self.matrix(&info.rep)?);
        }
        Ok(out)
    }

    /// Weight `det(1 - delta(w))` of a single element.
    pub fn det_one_minus(&self, w: &Word) -> Result<CycNum> {
        match &self.kind {
            DeltaKind::Zero => Ok(CycNum::one()),
            DeltaKind::Character(vals) => {
                let c = self.group.class_of(w)?;
                Ok(&CycNum::one() - &vals[c])
            }
            _ => {
                let m = self.matrix(w)?;
                let mut a = identity_matrix(self.dim);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        a[i][j] = &a[i][j] - &m[i][j];
                    }
                }
                det(&a)
            }
        }
    }

    /// Cached class weights, indexed by class.
    pub fn class_dets(&self) -> Result<&[CycNum]> {
        if let Some(d) = self.class_dets.get() {
            return Ok(d);
        }
        let mut dets = Vec::new();
        for info in self.group.classes()? {
            dets.push(self.det_one_minus(&info.rep)?);
        }
        let _ = self.class_dets.set(dets);
        Ok(self.class_dets.get().expect("just set"))
    }

    /// Whether the class of `w` carries a nonzero weight.
    pub fn is_elliptic(&self, w: &Word) -> Result<bool> {
        Ok(!self.det_one_minus(w)?.is_zero())
    }
}

/// Matrix of a coordinate permutation restricted to the sum-zero subspace,
/// in the basis `v_i = e_i - e_{i+1}`.
fn sum_zero_matrix(perm: &[usize]) -> Matrix {
    let n = perm.len();
    let dim = n.saturating_sub(1);
    let mut m = vec![vec![CycNum::zero(); dim]; dim];
    for i in 0..dim {
        let a = perm[i];
        let b = perm[i + 1];
        if a < b {
            for j in a..b {
                m[j][i] = CycNum::one();
            }
        } else {
            for j in b..a {
                m[j][i] = CycNum::from_integer(-1);
            }
        }
    }
    m
}

/// Class indicator function: 1 on the class of `w`, 0 elsewhere.
pub fn class_indicator(g: &FiniteGroup, w: &Word) -> Result<Vec<CycNum>> {
    let c = g.class_of(w)?;
    let mut out = vec![CycNum::zero(); g.classes()?.len()];
    out[c] = CycNum::one();
    Ok(out)
}

/// Spread a class function out to a function indexed by element position.
pub fn lift_class_function(g: &FiniteGroup, f: &[CycNum]) -> Result<Vec<CycNum>> {
    let classes = g.classes()?;
    if f.len() != classes.len() {
        return Err(Error::InvalidInput(format!(
            "class function has {} entries, group has {} classes",
            f.len(),
            classes.len()
        )));
    }
    let elements = g.elements()?.to_vec();
    let mut out = Vec::with_capacity(elements.len());
    for w in &elements {
        out.push(f[g.class_of(w)?].clone());
    }
    Ok(out)
}

/// Elliptic pairing of two class functions: the average over the group of
/// `det(1 - delta(h)) conj(f(h)) f'(h)`. On characters the conjugate of the
/// first argument agrees with evaluation at the inverse element, and with
/// this form the scaled class indicators of elliptic classes are orthogonal.
pub fn elliptic_pairing(delta: &DeltaRep, f: &[CycNum], fp: &[CycNum]) -> Result<CycNum> {
    let g = delta.group();
    let classes = g.classes()?.to_vec();
    if f.len() != classes.len() || fp.len() != classes.len() {
        return Err(Error::InvalidInput(format!(
            "pairing needs class functions of length {}",
            classes.len()
        )));
    }
    let dets = delta.class_dets()?.to_vec();
    let mut total = CycNum::zero();
    for (c, info) in classes.iter().enumerate() {
        if dets[c].is_zero() || (f[c].is_zero() && fp[c].is_zero()) {
            continue;
        }
        let term = &(&dets[c] * &f[c].conjugate()) * &fp[c];
        total += &term.scale(&ratio(info.size as i64, 1));
    }
    Ok(total.scale(&ratio(1, g.order())))
}

/// Twisted elliptic pairing along the coset `theta * sub`: the average over
/// `h` in `sub` of `det(1 - delta(theta h)) conj(f(theta h)) f'(theta h)`,
/// where `f` and `f'` are indexed by element position in the big group.
pub fn twisted_elliptic_pairing(
    delta: &DeltaRep,
    sub: &FiniteGroup,
    theta: &Word,
    f: &[CycNum],
    fp: &[CycNum],
) -> Result<CycNum> {
    let big = delta.group();
    big.validate_word(theta)?;
    let n = big.elements()?.len();
    if f.len() != n || fp.len() != n {
        return Err(Error::InvalidInput(format!(
            "twisted pairing needs element functions of length {n}"
        )));
    }
    let sub_elements = sub.elements()?.to_vec();
    let mut total = CycNum::zero();
    for h in &sub_elements {
        if !big.contains(h) {
            return Err(Error::Group("subgroup element not in ambient group".into()));
        }
        let x = big.mul(theta, h);
        let idx = big.element_index(&x)?;
        if f[idx].is_zero() && fp[idx].is_zero() {
            continue;
        }
        let w = delta.det_one_minus(&x)?;
        let term = &(&w * &f[idx].conjugate()) * &fp[idx];
        total += &term;
    }
    Ok(total.scale(&ratio(1, sub.order())))
}

/// Representatives of the elliptic conjugacy classes of the group of
/// `delta`, in canonical class order.
pub fn elliptic_classes(delta: &DeltaRep) -> Result<Vec<Word>> {
    let g = delta.group();
    let dets = delta.class_dets()?;
    let mut out = Vec::new();
    for (info, d) in g.classes()?.iter().zip(dets) {
        if !d.is_zero() {
            out.push(info.rep.clone());
        }
    }
    Ok(out)
}

/// Gram matrix of the elliptic pairing on the irreducible characters.
pub fn gram_matrix(table: &CharTable, delta: &DeltaRep) -> Result<Matrix> {
    if !table.group().same(delta.group()) {
        return Err(Error::InvalidInput("table and delta use different groups".into()));
    }
    let n = table.nrows();
    let mut m = vec![vec![CycNum::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = elliptic_pairing(delta, table.row(i), table.row(j))?;
        }
    }
    Ok(m)
}

/// Rank of the Gram matrix; equals the number of elliptic classes.
pub fn gram_rank(delta: &DeltaRep) -> Result<usize> {
    let table = CharTable::of(delta.group())?;
    matrix_rank(&gram_matrix(&table, delta)?)
}

/// Elliptic classes of the wreath product of the symmetric group on `m`
/// letters by the cyclic group of order `d`, for the sum-zero coordinate
/// action: one class per generator exponent of the cyclic part that is
/// coprime to `d`, represented by a full cycle in the first slot.
pub fn elliptic_classes_wreath(m: u32, d: u32) -> Result<Vec<Word>> {
    let delta = DeltaRep::wreath_sum_zero(m, d)?;
    let g = delta.group().clone();
    let base_cycle: Word = (0..m as i64).map(|i| (i + 1) % m as i64).collect();
    let base_id: Word = (0..m as i64).collect();
    let mut reps = Vec::new();
    let mut seen = Vec::new();
    for a in 1..=u64::from(d) {
        if a.gcd(&u64::from(d)) != 1 {
            continue;
        }
        let mut parts = vec![base_id.clone(); d as usize];
        parts[0] = base_cycle.clone();
        let w = g.wreath_assemble(&parts, a % d as u64)?;
        if !delta.is_elliptic(&w)? {
            return Err(Error::Data(format!(
                "expected elliptic representative for exponent {a}"
            )));
        }
        let c = g.class_of(&w)?;
        if seen.contains(&c) {
            return Err(Error::Data(format!(
                "representatives for coprime exponents collide at class {c}"
            )));
        }
        seen.push(c);
        reps.push(w);
    }
    let brute = elliptic_classes(&delta)?;
    if brute.len() != reps.len() {
        return Err(Error::Data(format!(
            "wreath elliptic count {} disagrees with class scan {}",
            reps.len(),
            brute.len()
        )));
    }
    Ok(reps)
}

/// Ambient descriptor for elliptic pair enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductiveDescriptor {
    /// Adjoint group of type A of the given rank plus one.
    Pgl(u64),
    /// Reductive centralizer of a unipotent class of the adjoint group,
    /// given by the Jordan partition.
    PglCentralizer(Vec<u64>),
    /// Centralizer data on the simply connected side, given by the Jordan
    /// partition of the unipotent part.
    SlDual(Vec<u64>),
    /// Pairs of central elements of the simply connected group of type A.
    Center(u64),
    /// Orthogonal group on a two-dimensional space.
    O2,
}

/// One elliptic pair class, described by display labels for both slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticPairClass {
    pub s_label: String,
    pub h_label: String,
}

/// Elliptic pair classes of an ambient descriptor together with the flip
/// permutation swapping the two slots, when the flip is defined.
#[derive(Clone, Debug)]
pub struct YEll {
    pub ambient: String,
    pub classes: Vec<EllipticPairClass>,
    pub flip: Option<Vec<usize>>,
}

impl YEll {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Check that the flip permutation is an involution of the class list.
    pub fn flip_is_involution(&self) -> bool {
        match &self.flip {
            None => true,
            Some(p) => {
                p.len() == self.classes.len()
                    && p.iter().all(|&i| i < p.len())
                    && (0..p.len()).all(|i| p[p[i]] == i)
            }
        }
    }
}

fn pgl_pair_classes(n: u64) -> (Vec<EllipticPairClass>, Vec<usize>) {
    let ks: Vec<u64> = (1..=n).filter(|k| k.gcd(&n) == 1).collect();
    let classes: Vec<EllipticPairClass> = ks
        .iter()
        .map(|k| EllipticPairClass {
            s_label: format!("s{n}"),
            h_label: format!("w^{k}"),
        })
        .collect();
    let flip: Vec<usize> = ks
        .iter()
        .map(|&k| {
            let kp = if n == 1 { 1 } else { n - k };
            ks.iter().position(|&x| x == kp).expect("coprime complement")
        })
        .collect();
    (classes, flip)
}

/// Elliptic pair classes of an ambient descriptor.
pub fn y_ell(desc: &ReductiveDescriptor) -> Result<YEll> {
    match desc {
        ReductiveDescriptor::Pgl(n) => {
            if *n == 0 {
                return Err(Error::InvalidInput("need n >= 1".into()));
            }
            let (classes, flip) = pgl_pair_classes(*n);
            Ok(YEll {
                ambient: format!("PGL{n}"),
                classes,
                flip: Some(flip),
            })
        }
        ReductiveDescriptor::PglCentralizer(parts) => {
            if parts.is_empty() || parts.iter().any(|&p| p == 0) {
                return Err(Error::InvalidInput("partition must have positive parts".into()));
            }
            let n: u64 = parts.iter().sum();
            let ambient = format!("PGL{n} centralizer {}", sym::partition_label(parts));
            let rectangular = parts.iter().all(|&p| p == parts[0]);
            if !rectangular {
                return Ok(YEll {
                    ambient,
                    classes: Vec::new(),
                    flip: Some(Vec::new()),
                });
            }
            let d = parts.len() as u64;
            let (classes, flip) = pgl_pair_classes(d);
            Ok(YEll {
                ambient,
                classes,
                flip: Some(flip),
            })
        }
        ReductiveDescriptor::SlDual(parts) => {
            if parts.is_empty() || parts.iter().any(|&p| p == 0) {
                return Err(Error::InvalidInput("partition must have positive parts".into()));
            }
            let n: u64 = parts.iter().sum();
            let ambient = format!("SL{n} dual {}", sym::partition_label(parts));
            if parts.len() != 1 {
                return Ok(YEll {
                    ambient,
                    classes: Vec::new(),
                    flip: Some(Vec::new()),
                });
            }
            let mut inner = y_ell(&ReductiveDescriptor::Center(n))?;
            inner.ambient = ambient;
            Ok(inner)
        }
        ReductiveDescriptor::Center(n) => {
            if *n == 0 {
                return Err(Error::InvalidInput("need n >= 1".into()));
            }
            let n = *n;
            let mut classes = Vec::with_capacity((n * n) as usize);
            let mut flip = Vec::with_capacity((n * n) as usize);
            for i in 0..n {
                for j in 0..n {
                    classes.push(EllipticPairClass {
                        s_label: format!("z^{i}"),
                        h_label: format!("z^{j}"),
                    });
                    flip.push((j * n + i) as usize);
                }
            }
            Ok(YEll {
                ambient: format!("Z{n} x Z{n}"),
                classes,
                flip: Some(flip),
            })
        }
        ReductiveDescriptor::O2 => {
            let mk = |s: &str, h: &str| EllipticPairClass {
                s_label: s.into(),
                h_label: h.into(),
            };
            Ok(YEll {
                ambient: "O2".into(),
                classes: vec![
                    mk("1", "d"),
                    mk("-1", "d"),
                    mk("d", "1"),
                    mk("d", "-1"),
                    mk("d", "d"),
                    mk("d", "-d"),
                ],
                flip: Some(vec![2, 3, 0, 1, 4, 5]),
            })
        }
    }
}

/// Number of elliptic pair classes for the centralizer of each unipotent
/// class of the adjoint group of type A, listed by Jordan partition.
pub fn pgl_per_unipotent(n: u64) -> Result<Vec<(String, usize)>> {
    if n == 0 || n > 12 {
        return Err(Error::TooLarge(format!("per-unipotent table needs 1 <= n <= 12, got {n}")));
    }
    let mut out = Vec::new();
    for parts in sym::partitions(n) {
        let y = y_ell(&ReductiveDescriptor::PglCentralizer(parts.clone()))?;
        out.push((sym::partition_label(&parts), y.len()));
    }
    Ok(out)
}

/// Orthogonal basis of the elliptic span: for each elliptic class
/// representative `h`, the class function `sum_phi phi(h) phi`, which
/// equals the centralizer order times the indicator of the class of the
/// inverse. Both the identity and the pairing norms are verified exactly.
#[derive(Clone, Debug)]
pub struct EllBasis {
    pub reps: Vec<Word>,
    pub functions: Vec<Vec<CycNum>>,
    pub norms: Vec<CycNum>,
}

pub fn ell_basis(delta: &DeltaRep) -> Result<EllBasis> {
    let g = delta.group();
    let table = CharTable::of(g)?;
    let classes = g.classes()?.to_vec();
    let reps = elliptic_classes(delta)?;
    let mut functions = Vec::with_capacity(reps.len());
    let mut norms = Vec::with_capacity(reps.len());
    for rep in &reps {
        let c = g.class_of(rep)?;
        let mut vals = vec![CycNum::zero(); classes.len()];
        for i in 0..table.nrows() {
            let at_h = table.value(i, c).clone();
            if at_h.is_zero() {
                continue;
            }
            for (j, v) in table.row(i).iter().enumerate() {
                let term = &at_h * v;
                vals[j] += &term;
            }
        }
        let cinv = g.class_of(&g.inv(rep))?;
        let zorder = g.order() / classes[c].size;
        for (j, v) in vals.iter().enumerate() {
            let expected = if j == cinv {
                CycNum::from_integer(zorder as i64)
            } else {
                CycNum::zero()
            };
            if *v != expected {
                return Err(Error::Chars(format!(
                    "character sum at class {j} is {v}, expected {expected}"
                )));
            }
        }
        norms.push(elliptic_pairing(delta, &vals, &vals)?);
        functions.push(vals);
    }
    Ok(EllBasis {
        reps,
        functions,
        norms,
    })
}

/// One compact pair class of inner type A: a Jordan partition, the order
/// of the commutator scalar of a lift of the pair, and the exponent that
/// pins the pair class among the primitive ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactPairClass {
    pub unipotent: Vec<u64>,
    pub d: u64,
    pub label: u64,
}

impl CompactPairClass {
    /// Block sizes of the pinned pseudo-Levi: each Jordan size `i` with
    /// multiplicity `r` contributes `r / d` blocks of size `i * d`, and the
    /// unipotent part of each block is a rectangle with `d` rows of `i`.
    pub fn levi_blocks(&self) -> Vec<(u64, u64)> {
        let mut mult: BTreeMap<u64, u64> = BTreeMap::new();
        for &p in &self.unipotent {
            *mult.entry(p).or_insert(0) += 1;
        }
        let mut out = Vec::new();
        for (&i, &r) in mult.iter().rev() {
            out.push((i * self.d, r / self.d));
        }
        out
    }

    pub fn display(&self) -> String {
        format!(
            "u={} d={} k={}",
            sym::partition_label(&self.unipotent),
            self.d,
            self.label
        )
    }
}

/// Compact pair classes of inner type A for rank parameter `n`: one class
/// per Jordan partition, divisor `d` of the gcd of its multiplicities, and
/// exponent coprime to `d`. Mixed commutator orders across blocks do not
/// lift to commuting pairs, so only the uniform data appears.
pub fn compact_pair_classes_type_a(n: u64) -> Result<Vec<CompactPairClass>> {
    if n == 0 || n > 12 {
        return Err(Error::TooLarge(format!("compact pair table needs 1 <= n <= 12, got {n}")));
    }
    let mut out = Vec::new();
    for parts in sym::partitions(n) {
        let mut mult: BTreeMap<u64, u64> = BTreeMap::new();
        for &p in &parts {
            *mult.entry(p).or_insert(0) += 1;
        }
        let g = mult.values().fold(0u64, |acc, &r| acc.gcd(&r));
        for d in cyc::divisors(g) {
            for k in 1..=d {
                if k.gcd(&d) == 1 {
                    out.push(CompactPairClass {
                        unipotent: parts.clone(),
                        d,
                        label: k,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Affine diagram labels supported by the elliptic count. Type A carries
/// the number of nodes of the finite diagram; other letters are capped at
/// rank four and handled by explicit reflection groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AffineDiagram {
    A(u32),
    B(u32),
    C(u32),
    D4,
    G2,
    F4,
}

impl AffineDiagram {
    pub fn parse(s: &str) -> Result<AffineDiagram> {
        let t = s.trim();
        if t.len() < 2 || !t.is_char_boundary(1) {
            return Err(Error::InvalidInput(format!("bad diagram label {t:?}")));
        }
        let (letter, rest) = t.split_at(1);
        let rank: u32 = rest
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad diagram label {t:?}")))?;
        let d = match letter {
            "A" | "a" => AffineDiagram::A(rank),
            "B" | "b" => AffineDiagram::B(rank),
            "C" | "c" => AffineDiagram::C(rank),
            "D" | "d" if rank == 4 => AffineDiagram::D4,
            "G" | "g" if rank == 2 => AffineDiagram::G2,
            "F" | "f" if rank == 4 => AffineDiagram::F4,
            _ => return Err(Error::InvalidInput(format!("bad diagram label {t:?}"))),
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AffineDiagram::A(r) if r >= 1 && r <= 64 => Ok(()),
            AffineDiagram::B(r) if (3..=4).contains(&r) => Ok(()),
            AffineDiagram::C(r) if (2..=4).contains(&r) => Ok(()),
            AffineDiagram::D4 | AffineDiagram::G2 | AffineDiagram::F4 => Ok(()),
            AffineDiagram::A(r) => Err(Error::TooLarge(format!("type A rank {r} out of range"))),
            AffineDiagram::B(r) => Err(Error::TooLarge(format!("type B rank {r} needs 3 <= r <= 4"))),
            AffineDiagram::C(r) => Err(Error::TooLarge(format!("type C rank {r} needs 2 <= r <= 4"))),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            AffineDiagram::A(r) => format!("A{r} affine"),
            AffineDiagram::B(r) => format!("B{r} affine"),
            AffineDiagram::C(r) => format!("C{r} affine"),
            AffineDiagram::D4 => "D4 affine".into(),
            AffineDiagram::G2 => "G2 affine".into(),
            AffineDiagram::F4 => "F4 affine".into(),
        }
    }

    fn rank(&self) -> usize {
        match *self {
            AffineDiagram::A(r) | AffineDiagram::B(r) | AffineDiagram::C(r) => r as usize,
            AffineDiagram::D4 | AffineDiagram::F4 => 4,
            AffineDiagram::G2 => 2,
        }
    }

    /// Generalized Cartan matrix of the affine diagram, node 0 first.
    fn cartan(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        let n = r + 1;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let bond = |i: usize, j: usize, ij: i64, ji: i64, a: &mut Vec<Vec<i64>>| {
            a[i][j] = ij;
            a[j][i] = ji;
        };
        match *self {
            AffineDiagram::A(1) => {
                bond(0, 1, -2, -2, &mut a);
            }
            AffineDiagram::A(_) => {
                for i in 0..n {
                    let j = (i + 1) % n;
                    a[i][j] = -1;
                    a[j][i] = -1;
                }
            }
            AffineDiagram::B(_) => {
                bond(0, 2, -1, -1, &mut a);
                bond(1, 2, -1, -1, &mut a);
                for i in 2..r - 1 {
                    bond(i, i + 1, -1, -1, &mut a);
                }
                bond(r - 1, r, -1, -2, &mut a);
            }
            AffineDiagram::C(_) => {
                bond(0, 1, -1, -2, &mut a);
                for i in 1..r - 1 {
                    bond(i, i + 1, -1, -1, &mut a);
                }
                bond(r - 1, r, -2, -1, &mut a);
            }
            AffineDiagram::D4 => {
                for o in [0usize, 1, 3, 4] {
                    bond(o, 2, -1, -1, &mut a);
                }
            }
            AffineDiagram::G2 => {
                bond(0, 1, -1, -1, &mut a);
                bond(1, 2, -1, -3, &mut a);
            }
            AffineDiagram::F4 => {
                bond(0, 1, -1, -1, &mut a);
                bond(1, 2, -1, -1, &mut a);
                bond(2, 3, -1, -2, &mut a);
                bond(3, 4, -1, -1, &mut a);
            }
        }
        a
    }
}

/// Elliptic class count of one maximal proper subdiagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParahoricCount {
    /// Index of the dropped node in the affine diagram.
    pub dropped: usize,
    /// Isomorphism label of the remaining finite diagram.
    pub label: String,
    /// Number of elliptic classes of its reflection group.
    pub count: usize,
}

/// Per-subdiagram and total elliptic class counts of an affine diagram.
#[derive(Clone, Debug)]
pub struct AffineCount {
    pub diagram: String,
    pub per: Vec<ParahoricCount>,
    pub total: usize,
}

const REFLECTION_CAP: usize = 2400;

/// Finite reflection group from a Cartan matrix, as integer matrices in
/// the root basis; returns the elements and errors past the closure cap.
fn reflection_group(cartan: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = cartan.len();
    let dim = n * n;
    let mut gens: Vec<Vec<i64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = vec![0i64; dim];
        for k in 0..n {
            for j in 0..n {
                let mut v = i64::from(k == j);
                if k == i {
                    v -= cartan[i][j];
                }
                s[k * n + j] = v;
            }
        }
        gens.push(s);
    }
    let mul = |a: &[i64], b: &[i64]| -> Vec<i64> {
        let mut out = vec![0i64; dim];
        for i in 0..n {
            for t in 0..n {
                let av = a[i * n + t];
                if av == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += av * b[t * n + j];
                }
            }
        }
        out
    };
    let id: Vec<i64> = (0..dim).map(|p| i64::from(p / n == p % n)).collect();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    index.insert(id.clone(), 0);
    let mut elements = vec![id];
    let mut frontier = 0usize;
    while frontier < elements.len() {
        let cur = elements[frontier].clone();
        frontier += 1;
        for s in &gens {
            let next = mul(&cur, s);
            if !index.contains_key(&next) {
                if elements.len() >= REFLECTION_CAP {
                    return Err(Error::TooLarge(format!(
                        "reflection group exceeds {REFLECTION_CAP} elements"
                    )));
                }
                index.insert(next.clone(), elements.len());
                elements.push(next);
            }
        }
    }
    Ok(elements)
}

fn int_det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        _ => {
            let mut total = 0i128;
            for (col, head) in m[0].iter().enumerate() {
                if *head == 0 {
                    continue;
                }
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != col)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1 } else { -1 };
                total += sign * head * int_det(&minor);
            }
            total
        }
    }
}

/// Number of conjugacy classes with no fixed vector in the root basis.
fn elliptic_count_of(cartan: &[Vec<i64>]) -> Result<usize> {
    let n = cartan.len();
    let elements = reflection_group(cartan)?;
    let index: HashMap<Vec<i64>, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let gens: Vec<usize> = {
        let mut g = Vec::new();
        for i in 0..n {
            let mut s = vec![0i64; n * n];
            for k in 0..n {
                for j in 0..n {
                    let mut v = i64::from(k == j);
                    if k == i {
                        v -= cartan[i][j];
                    }
                    s[k * n + j] = v;
                }
            }
            g.push(index[&s]);
        }
        g
    };
    let mul_idx = |a: usize, b: usize| -> usize {
        let (x, y) = (&elements[a], &elements[b]);
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for t in 0..n {
                let av = x[i * n + t];
                if av == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += av * y[t * n + j];
                }
            }
        }
        index[&out]
    };
    let mut seen = vec![false; elements.len()];
    let mut count = 0usize;
    for start in 0..elements.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut fr = 0usize;
        while fr < orbit.len() {
            let cur = orbit[fr];
            fr += 1;
            for &s in &gens {
                // generators are involutions, so s * cur * s conjugates
                let next = mul_idx(s, mul_idx(cur, s));
                if !seen[next] {
                    seen[next] = true;
                    orbit.push(next);
                }
            }
        }
        let m = &elements[start];
        let a: Vec<Vec<i128>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| i128::from(i == j) - i128::from(m[i * n + j]))
                    .collect()
            })
            .collect();
        if int_det(&a) != 0 {
            count += 1;
        }
    }
    Ok(count)
}

/// Isomorphism label of a finite diagram given by its Cartan matrix,
/// supported through rank four.
fn diagram_label(cartan: &[Vec<i64>]) -> Result<String> {
    let n = cartan.len();
    let mut comp = vec![usize::MAX; n];
    let mut ncomp = 0usize;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = ncomp;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if j != i && cartan[i][j] != 0 && comp[j] == usize::MAX {
                    comp[j] = ncomp;
                    stack.push(j);
                }
            }
        }
        ncomp += 1;
    }
    let mut labels = Vec::new();
    for c in 0..ncomp {
        let nodes: Vec<usize> = (0..n).filter(|&i| comp[i] == c).collect();
        labels.push(component_label(cartan, &nodes)?);
    }
    labels.sort();
    Ok(labels.join("x"))
}

fn component_label(cartan: &[Vec<i64>], nodes: &[usize]) -> Result<String> {
    let deg = |i: usize| -> usize {
        nodes
            .iter()
            .filter(|&&j| j != i && cartan[i][j] != 0)
            .count()
    };
    let bonds: Vec<(usize, usize, i64)> = nodes
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| {
            nodes[a + 1..]
                .iter()
                .filter(move |&&j| cartan[i][j] != 0)
                .map(move |&j| (i, j, cartan[i][j] * cartan[j][i]))
                .collect::<Vec<_>>()
        })
        .collect();
    match nodes.len() {
        1 => Ok("A1".into()),
        2 => match bonds[0].2 {
            1 => Ok("A2".into()),
            2 => Ok("C2".into()),
            3 => Ok("G2".into()),
            m => Err(Error::Unsupported(format!("bond multiplicity {m}"))),
        },
        3 => {
            let doubles: Vec<&(usize, usize, i64)> = bonds.iter().filter(|b| b.2 == 2).collect();
            match doubles.len() {
                0 => Ok("A3".into()),
                1 => {
                    let &&(i, j, _) = doubles.first().expect("one double bond");
                    let end = if deg(i) == 1 { i } else { j };
                    let other = if end == i { j } else { i };
                    // cartan[short][long] = -2, so a -2 in the end's row
                    // means the end node is short
                    if cartan[end][other] == -2 {
                        Ok("B3".into())
                    } else {
                        Ok("C3".into())
                    }
                }
                _ => Err(Error::Unsupported("multiple double bonds in rank 3".into())),
            }
        }
        4 => {
            if nodes.iter().any(|&i| deg(i) == 3) {
                return Ok("D4".into());
            }
            let doubles: Vec<&(usize, usize, i64)> = bonds.iter().filter(|b| b.2 == 2).collect();
            match doubles.len() {
                0 => Ok("A4".into()),
                1 => {
                    let &&(i, j, _) = doubles.first().expect("one double bond");
                    let end = [i, j].into_iter().find(|&x| deg(x) == 1);
                    match end {
                        None => Ok("F4".into()),
                        Some(e) => {
                            let other = if e == i { j } else { i };
                            if cartan[e][other] == -2 {
                                Ok("B4".into())
                            } else {
                                Ok("C4".into())
                            }
                        }
                    }
                }
                _ => Err(Error::Unsupported("multiple double bonds in rank 4".into())),
            }
        }
        r => Err(Error::Unsupported(format!("component rank {r} past 4"))),
    }
}

/// Elliptic class counts of the maximal proper subdiagrams of an affine
/// diagram, one per dropped node, and their total. Type A past rank four
/// uses the fact that its subdiagrams are chains whose reflection group
/// has a single elliptic class; everything else is enumerated directly.
pub fn affine_elliptic_count(diagram: &AffineDiagram) -> Result<AffineCount> {
    diagram.validate()?;
    let r = diagram.rank();
    if matches!(diagram, AffineDiagram::A(m) if *m >= 5) {
        let per: Vec<ParahoricCount> = (0..=r)
            .map(|dropped| ParahoricCount {
                dropped,
                label: format!("A{r}"),
                count: 1,
            })
            .collect();
        return Ok(AffineCount {
            diagram: diagram.label(),
            total: per.len(),
            per,
        });
    }
    let cartan = diagram.cartan();
    let n = cartan.len();
    let mut per = Vec::with_capacity(n);
    let mut total = 0usize;
    for dropped in 0..n {
        let kept: Vec<usize> = (0..n).filter(|&i| i != dropped).collect();
        let sub: Vec<Vec<i64>> = kept
            .iter()
            .map(|&i| kept.iter().map(|&j| cartan[i][j]).collect())
            .collect();
        let count = elliptic_count_of(&sub)?;
        let label = diagram_label(&sub)?;
        total += count;
        per.push(ParahoricCount {
            dropped,
            label,
            count,
        });
    }
    Ok(AffineCount {
        diagram: diagram.label(),
        per,
        total,
    })
}

/// Result of checking the restriction identity for twisted extensions on
/// a normal abelian subgroup with cyclic quotient.
#[derive(Clone, Debug)]
pub struct EllipCompareReport {
    /// Number of ordered pairs of basis functions compared.
    pub checked: usize,
    /// Human-readable descriptions of any identities that failed.
    pub failures: Vec<String>,
}

impl EllipCompareReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.failures.is_empty()
    }
}

struct OrbitExtension {
    /// Index of the chosen base row in the subgroup table.
    row: usize,
    /// Size of the quotient orbit of the row.
    orbit: u64,
    /// Canonical extension value at `alpha^orbit`.
    root: CycNum,
}

/// Check that the elliptic pairing of coset-supported twisted trace
/// functions on the big group decomposes as the averaged twisted pairing
/// of their canonical extensions on the subgroup. The subgroup must be
/// abelian and normal with cyclic quotient; `delta` lives on the big
/// group. Every ordered pair of basis functions is compared exactly.
pub fn ellip_compare(
    big: &FiniteGroup,
    sub: &FiniteGroup,
    delta: &DeltaRep,
) -> Result<EllipCompareReport> {
    if !delta.group().same(big) {
        return Err(Error::InvalidInput("delta must live on the big group".into()));
    }
    if !sub.is_abelian() {
        return Err(Error::Unsupported("subgroup must be abelian".into()));
    }
    if !big.is_normal_subgroup(sub)? {
        return Err(Error::Group("subgroup must be normal".into()));
    }
    if big.order() % sub.order() != 0 {
        return Err(Error::Group("subgroup order must divide group order".into()));
    }
    let c = big.order() / sub.order();
    let (alpha, expo) = coset_exponents(big, sub, c)?;
    let table = CharTable::of(sub)?;
    let nrows = table.nrows();
    let sub_classes = sub.classes()?.to_vec();

    // Permutation of rows induced by conjugation with alpha.
    let alpha_inv = big.inv(&alpha);
    let mut conj_class = Vec::with_capacity(sub_classes.len());
    for info in &sub_classes {
        let moved = big.mul(&big.mul(&alpha_inv, &info.rep), &alpha);
        conj_class.push(sub.class_of(&moved)?);
    }
    let mut act = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let moved: Vec<CycNum> = conj_class.iter().map(|&cc| table.value(i, cc).clone()).collect();
        let j = table
            .row_index_of(&moved)
            .ok_or_else(|| Error::Chars("conjugated row missing from table".into()))?;
        act.push(j);
    }

    // alpha^c lies in the subgroup; its value under a row pins the
    // canonical root of that row's extension
    let alpha_c_class = {
        let mut alpha_c = big.id();
        for _ in 0..c {
            alpha_c = big.mul(&alpha_c, &alpha);
        }
        sub.class_of(&alpha_c)?
    };

    // Orbit representatives with canonical extension data.
    let mut seen = vec![false; nrows];
    let mut orbits: Vec<OrbitExtension> = Vec::new();
    for start in 0..nrows {
        if seen[start] {
            continue;
        }
        let mut t = 1u64;
        let mut cur = act[start];
        seen[start] = true;
        while cur != start {
            seen[cur] = true;
            cur = act[cur];
            t += 1;
        }
        let c_sigma = c / t;
        let v = table.value(start, alpha_c_class).clone();
        let root = if c_sigma == 1 {
            v
        } else {
            let (ord, exp) = v.as_root_of_unity().ok_or_else(|| {
                Error::Chars("extension base value is not a root of unity".into())
            })?;
            CycNum::root_of_unity(ord * c_sigma, exp as i64)
        };
        orbits.push(OrbitExtension {
            row: start,
            orbit: t,
            root,
        });
    }

    // Element-level data shared by every basis function.
    let elements = big.elements()?.to_vec();
    let alpha_pow: Vec<Word> = {
        let mut pows = vec![big.id()];
        for _ in 1..=c {
            let last = pows.last().expect("nonempty").clone();
            pows.push(big.mul(&last, &alpha));
        }
        pows
    };

    // Canonical extension of an orbit row twisted by alpha^j, evaluated at
    // every element of the coset layer where it is defined.
    let extension_values = |oe: &OrbitExtension, j: u64| -> Result<Vec<CycNum>> {
        let t = oe.orbit;
        let mut vals = vec![CycNum::zero(); elements.len()];
        for (idx, w) in elements.iter().enumerate() {
            let e = expo[idx];
            if e % t != 0 {
                continue;
            }
            let x = big.mul(&big.mul(&alpha_pow[j as usize], w), &big.inv(&alpha_pow[j as usize]));
            // x = alpha^j w alpha^{-j} has the same coset exponent
            let steps = e / t;
            let hpart = big.mul(&x, &big.inv(&alpha_pow[(t * steps) as usize]));
            let ci = sub
                .class_of(&hpart)
                .map_err(|_| Error::Group("coset peel left the subgroup".into()))?;
            let mut v = table.value(oe.row, ci).clone();
            v = &v * &oe.root.pow(steps as i64);
            vals[idx] = v;
        }
        Ok(vals)
    };

    let zero = CycNum::zero();
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for (oi, o1) in orbits.iter().enumerate() {
        for g1 in (0..c).step_by(o1.orbit as usize) {
            for (oj, o2) in orbits.iter().enumerate() {
                for g2 in (0..c).step_by(o2.orbit as usize) {
                    // Basis functions: sum the twisted extensions over
                    // quotient coset representatives, supported on one layer.
                    let mut f1 = vec![CycNum::zero(); elements.len()];
                    for j in 0..o1.orbit {
                        let tv = extension_values(o1, j)?;
                        for (idx, v) in tv.into_iter().enumerate() {
                            if expo[idx] == g1 {
                                f1[idx] += &v;
                            }
                        }
                    }
                    let mut f2 = vec![CycNum::zero(); elements.len()];
                    for j in 0..o2.orbit {
                        let tv = extension_values(o2, j)?;
                        for (idx, v) in tv.into_iter().enumerate() {
                            if expo[idx] == g2 {
                                f2[idx] += &v;
                            }
                        }
                    }
                    // Left side: full pairing of the coset-supported sums.
                    let mut lhs = CycNum::zero();
                    for (idx, w) in elements.iter().enumerate() {
                        if f1[idx].is_zero() && f2[idx].is_zero() {
                            continue;
                        }
                        let wt = delta.det_one_minus(w)?;
                        let term = &(&wt * &f1[idx].conjugate()) * &f2[idx];
                        lhs += &term;
                    }
                    lhs = lhs.scale(&ratio(1, big.order()));
                    // Right side: averaged twisted pairings of extensions.
                    let rhs = if g1 != g2 {
                        zero.clone()
                    } else {
                        let theta = &alpha_pow[g1 as usize];
                        let mut acc = CycNum::zero();
                        for j1 in 0..o1.orbit {
                            let t1 = extension_values(o1, j1)?;
                            for j2 in 0..o2.orbit {
                                let t2 = extension_values(o2, j2)?;
                                let term =
                                    twisted_elliptic_pairing(delta, sub, theta, &t1, &t2)?;
                                acc += &term;
                            }
                        }
                        acc.scale(&ratio(1, c))
                    };
                    checked += 1;
                    if lhs != rhs {
                        failures.push(format!(
                            "rows ({},{}) layers ({g1},{g2}): full pairing {lhs}, decomposition {rhs}",
                            orbits[oi].row, orbits[oj].row
                        ));
                    }
                }
            }
        }
    }
    Ok(EllipCompareReport { checked, failures })
}
