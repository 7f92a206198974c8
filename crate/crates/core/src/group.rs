//! Finite groups given by explicit constructions.
//!
//! Elements are integer words whose meaning depends on the construction:
//! cyclic groups store one residue, elementary abelian 2-groups a bit tuple,
//! symmetric groups an image array, signed permutation groups signed images
//! `+-(j+1)`, products the concatenation of factor words, wreath products
//! `H wr Z/d` the `d` base words followed by the shift, split extensions the
//! base word followed by the cyclic exponent, and subgroups reuse parent
//! words verbatim.
//!
//! Multiplication, inversion, and identity are construction recursion and
//! never require enumeration. Element lists are built lazily and only when
//! the order is at most [`ENUM_CAP`]; conjugacy classes of symmetric and
//! wreath constructions are computed structurally so those groups stay
//! usable far beyond the enumeration cap.

use std::collections::HashMap;
use std::sync::Arc;

use num_integer::Integer;
use once_cell::sync::OnceCell;

use crate::sym;
use crate::{Error, Result};

/// Canonical element encoding.
pub type Word = Vec<i64>;

/// Largest group order for which explicit element lists are built.
pub const ENUM_CAP: u64 = 200_000;

/// One conjugacy class: canonical representative and size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub rep: Word,
    pub size: u64,
}

/// A validated automorphism of an enumerated group, stored as a permutation
/// of the element list.
#[derive(Clone, Debug)]
pub struct Automorphism {
    pub(crate) map: Vec<usize>,
    pub order: u64,
}

#[derive(Clone)]
enum Construction {
    Cyclic(u64),
    ElemAbelian2(u32),
    Symmetric(u32),
    SignedPermutation(u32),
    Product(Vec<FiniteGroup>),
    WreathCyclic { base: FiniteGroup, d: u32 },
    SemidirectCyclic { base: FiniteGroup, theta: Automorphism, c: u32 },
    Subgroup { parent: FiniteGroup, members: Arc<Vec<Word>>, gens: Vec<Word> },
}

struct Inner {
    construction: Construction,
    order: u64,
    name: String,
    elements: OnceCell<std::result::Result<ElementData, String>>,
    classes: OnceCell<std::result::Result<ClassData, String>>,
}

struct ElementData {
    list: Vec<Word>,
    index: HashMap<Word, usize>,
}

struct ClassData {
    classes: Vec<ClassInfo>,
    // Element -> class index, for enumerated groups only; structural
    // constructions resolve membership by invariants instead.
    of_element: Option<HashMap<Word, usize>>,
    // Wreath necklace key -> class index.
    wreath_key: Option<HashMap<(u64, Vec<usize>), usize>>,
}

/// A finite group with exact construction data.
#[derive(Clone)]
pub struct FiniteGroup {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.inner.name, self.inner.order)
    }
}

fn make(construction: Construction, order: u64, name: String) -> FiniteGroup {
    FiniteGroup {
        inner: Arc::new(Inner {
            construction,
            order,
            name,
            elements: OnceCell::new(),
            classes: OnceCell::new(),
        }),
    }
}

impl FiniteGroup {
    pub fn cyclic(n: u64) -> FiniteGroup {
        assert!(n >= 1);
        make(Construction::Cyclic(n), n, format!("Z{n}"))
    }

    pub fn elem_abelian_2(k: u32) -> FiniteGroup {
        make(Construction::ElemAbelian2(k), 1u64 << k, format!("Z2^{k}"))
    }

    pub fn symmetric(n: u32) -> FiniteGroup {
        assert!(n >= 1);
        make(Construction::Symmetric(n), sym::factorial(n as u64), format!("S{n}"))
    }

    pub fn signed_permutation(n: u32) -> FiniteGroup {
        assert!(n >= 1);
        let order = (1u64 << n) * sym::factorial(n as u64);
        make(Construction::SignedPermutation(n), order, format!("B{n}"))
    }

    pub fn product(factors: Vec<FiniteGroup>) -> FiniteGroup {
        assert!(!factors.is_empty());
        let order = factors.iter().map(|f| f.order()).product();
        let name = format!(
            "prod({})",
            factors.iter().map(|f| f.name().to_string()).collect::<Vec<_>>().join(",")
        );
        make(Construction::Product(factors), order, name)
    }

    /// The wreath product `base^d : Z/d` with the cyclic shift on top.
    pub fn wreath_cyclic(base: FiniteGroup, d: u32) -> FiniteGroup {
        assert!(d >= 1);
        let order = base.order().pow(d) * d as u64;
        let name = format!("wreath({},{d})", base.name());
        make(Construction::WreathCyclic { base, d }, order, name)
    }

    /// Split extension `base : Z/c` where the cyclic generator acts by
    /// `theta`; requires `theta^c = id`.
    pub fn semidirect_cyclic(
        base: &FiniteGroup,
        theta: &Automorphism,
        c: u32,
    ) -> Result<FiniteGroup> {
        if c == 0 {
            return Err(Error::Group("cyclic part must be positive".into()));
        }
        if c as u64 % theta.order != 0 {
            return Err(Error::Group(format!(
                "automorphism order {} does not divide the cyclic order {c}",
                theta.order
            )));
        }
        let order = base.order() * c as u64;
        let name = format!("semidirect({},{c})", base.name());
        Ok(make(
            Construction::SemidirectCyclic { base: base.clone(), theta: theta.clone(), c },
            order,
            name,
        ))
    }

    /// Subgroup generated by `gens` inside `self` (closure is enumerated).
    pub fn subgroup(&self, gens: &[Word]) -> Result<FiniteGroup> {
        for g in gens {
            self.validate_word(g)?;
        }
        let mut list: Vec<Word> = vec![self.id()];
        let mut index: HashMap<Word, usize> = HashMap::new();
        index.insert(self.id(), 0);
        let mut queue = vec![self.id()];
        while let Some(x) = queue.pop() {
            for g in gens {
                for y in [self.mul(&x, g), self.mul(g, &x)] {
                    if !index.contains_key(&y) {
                        index.insert(y.clone(), list.len());
                        list.push(y.clone());
                        queue.push(y);
                        if list.len() as u64 > ENUM_CAP {
                            return Err(Error::TooLarge(format!(
                                "subgroup closure exceeded {ENUM_CAP} elements"
                            )));
                        }
                    }
                }
            }
        }
        list.sort();
        let order = list.len() as u64;
        let name = format!("subgroup({}, order {order})", self.name());
        Ok(make(
            Construction::Subgroup {
                parent: self.clone(),
                members: Arc::new(list),
                gens: gens.to_vec(),
            },
            order,
            name,
        ))
    }

    pub fn order(&self) -> u64 {
        self.inner.order
    }

    /// True when both handles refer to the same underlying group value.
    pub fn same(&self, other: &FiniteGroup) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    /// Length of a valid element word.
    pub fn word_len(&self) -> usize {
        match &self.inner.construction {
            Construction::Cyclic(_) => 1,
            Construction::ElemAbelian2(k) => *k as usize,
            Construction::Symmetric(n) => *n as usize,
            Construction::SignedPermutation(n) => *n as usize,
            Construction::Product(fs) => fs.iter().map(|f| f.word_len()).sum(),
            Construction::WreathCyclic { base, d } => base.word_len() * *d as usize + 1,
            Construction::SemidirectCyclic { base, .. } => base.word_len() + 1,
            Construction::Subgroup { parent, .. } => parent.word_len(),
        }
    }

    pub fn id(&self) -> Word {
        match &self.inner.construction {
            Construction::Cyclic(_) => vec![0],
            Construction::ElemAbelian2(k) => vec![0; *k as usize],
            Construction::Symmetric(n) => (0..*n as i64).collect(),
            Construction::SignedPermutation(n) => (1..=*n as i64).collect(),
            Construction::Product(fs) => {
                let mut w = Vec::with_capacity(self.word_len());
                for f in fs {
                    w.extend(f.id());
                }
                w
            }
            Construction::WreathCyclic { base, d } => {
                let mut w = Vec::with_capacity(self.word_len());
                for _ in 0..*d {
                    w.extend(base.id());
                }
                w.push(0);
                w
            }
            Construction::SemidirectCyclic { base, .. } => {
                let mut w = base.id();
                w.push(0);
                w
            }
            Construction::Subgroup { parent, .. } => parent.id(),
        }
    }

    pub fn mul(&self, a: &Word, b: &Word) -> Word {
        match &self.inner.construction {
            Construction::Cyclic(n) => vec![(a[0] + b[0]).rem_euclid(*n as i64)],
            Construction::ElemAbelian2(_) => a.iter().zip(b).map(|(x, y)| x ^ y).collect(),
            // Apply b first, then a.
            Construction::Symmetric(_) => b.iter().map(|&i| a[i as usize]).collect(),
            Construction::SignedPermutation(_) => b
                .iter()
                .map(|&bi| {
                    let aj = a[bi.unsigned_abs() as usize - 1];
                    if bi < 0 {
                        -aj
                    } else {
                        aj
                    }
                })
                .collect(),
            Construction::Product(fs) => {
                let mut w = Vec::with_capacity(a.len());
                let mut off = 0;
                for f in fs {
                    let l = f.word_len();
                    w.extend(f.mul(&a[off..off + l].to_vec(), &b[off..off + l].to_vec()));
                    off += l;
                }
                w
            }
            Construction::WreathCyclic { base, d } => {
                let d = *d as usize;
                let l = base.word_len();
                let sa = a[d * l] as usize;
                let sb = b[d * l] as usize;
                let mut w = Vec::with_capacity(a.len());
                // (h, s_a)(h', s_b): coordinate i picks up h_i * h'_{i - s_a}.
                for i in 0..d {
                    let j = (i + d - sa % d) % d;
                    let hi = a[i * l..(i + 1) * l].to_vec();
                    let hj = b[j * l..(j + 1) * l].to_vec();
                    w.extend(base.mul(&hi, &hj));
                }
                w.push(((sa + sb) % d) as i64);
                w
            }
            Construction::SemidirectCyclic { base, theta, c } => {
                let l = base.word_len();
                let ea = a[l].rem_euclid(*c as i64) as u32;
                let eb = b[l].rem_euclid(*c as i64) as u32;
                // (x, e_a)(y, e_b) = (x * theta^{e_a}(y), e_a + e_b).
                let y = base.apply_automorphism(theta, &b[..l].to_vec(), ea as u64);
                let mut w = base.mul(&a[..l].to_vec(), &y);
                w.push(((ea + eb) % c) as i64);
                w
            }
            Construction::Subgroup { parent, .. } => parent.mul(a, b),
        }
    }

    pub fn inv(&self, a: &Word) -> Word {
        match &self.inner.construction {
            Construction::Cyclic(n) => vec![(-a[0]).rem_euclid(*n as i64)],
            Construction::ElemAbelian2(_) => a.clone(),
            Construction::Symmetric(n) => {
                let mut w = vec![0i64; *n as usize];
                for (i, &ai) in a.iter().enumerate() {
                    w[ai as usize] = i as i64;
                }
                w
            }
            Construction::SignedPermutation(n) => {
                let mut w = vec![0i64; *n as usize];
                for (i, &ai) in a.iter().enumerate() {
                    let j = ai.unsigned_abs() as usize - 1;
                    let v = i as i64 + 1;
                    w[j] = if ai < 0 { -v } else { v };
                }
                w
            }
            Construction::Product(fs) => {
                let mut w = Vec::with_capacity(a.len());
                let mut off = 0;
                for f in fs {
                    let l = f.word_len();
                    w.extend(f.inv(&a[off..off + l].to_vec()));
                    off += l;
                }
                w
            }
            Construction::WreathCyclic { base, d } => {
                let d = *d as usize;
                let l = base.word_len();
                let s = a[d * l] as usize % d;
                let mut w = Vec::with_capacity(a.len());
                // (h, s)^{-1} = (shift^{-s}(h^{-1}), -s).
                for i in 0..d {
                    let j = (i + s) % d;
                    w.extend(base.inv(&a[j * l..(j + 1) * l].to_vec()));
                }
                w.push(((d - s) % d) as i64);
                w
            }
            Construction::SemidirectCyclic { base, theta, c } => {
                let l = base.word_len();
                let e = a[l].rem_euclid(*c as i64) as u32;
                let einv = (*c - e) % *c;
                let xi = base.inv(&a[..l].to_vec());
                let mut w = base.apply_automorphism(theta, &xi, einv as u64);
                w.push(einv as i64);
                w
            }
            Construction::Subgroup { parent, .. } => parent.inv(a),
        }
    }

    pub fn conj(&self, g: &Word, x: &Word) -> Word {
        self.mul(&self.mul(g, x), &self.inv(g))
    }

    pub fn commute(&self, a: &Word, b: &Word) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn element_order(&self, a: &Word) -> u64 {
        let id = self.id();
        let mut acc = a.clone();
        let mut k = 1u64;
        while acc != id {
            acc = self.mul(&acc, a);
            k += 1;
        }
        k
    }

    fn apply_automorphism(&self, theta: &Automorphism, x: &Word, times: u64) -> Word {
        let data = self.element_data().expect("semidirect base must be enumerable");
        let mut idx = data.index[x];
        for _ in 0..times % theta.order.max(1) {
            idx = theta.map[idx];
        }
        data.list[idx].clone()
    }

    /// Checks that a word is a valid element encoding.
    pub fn validate_word(&self, w: &Word) -> Result<()> {
        if w.len() != self.word_len() {
            return Err(Error::Group(format!(
                "word length {} does not match group {}",
                w.len(),
                self.name()
            )));
        }
        let bad = |msg: &str| Err(Error::Group(format!("invalid word for {}: {msg}", self.name())));
        match &self.inner.construction {
            Construction::Cyclic(n) => {
                if w[0] < 0 || w[0] >= *n as i64 {
                    return bad("residue out of range");
                }
            }
            Construction::ElemAbelian2(_) => {
                if w.iter().any(|&b| b != 0 && b != 1) {
                    return bad("bits must be 0/1");
                }
            }
            Construction::Symmetric(n) => {
                let n = *n as usize;
                let mut seen = vec![false; n];
                for &x in w {
                    if x < 0 || x >= n as i64 || seen[x as usize] {
                        return bad("not a permutation");
                    }
                    seen[x as usize] = true;
                }
            }
            Construction::SignedPermutation(n) => {
                let n = *n as usize;
                let mut seen = vec![false; n];
                for &x in w {
                    let j = x.unsigned_abs() as usize;
                    if x == 0 || j > n || seen[j - 1] {
                        return bad("not a signed permutation");
                    }
                    seen[j - 1] = true;
                }
            }
            Construction::Product(fs) => {
                let mut off = 0;
                for f in fs {
                    let l = f.word_len();
                    f.validate_word(&w[off..off + l].to_vec())?;
                    off += l;
                }
            }
            Construction::WreathCyclic { base, d } => {
                let l = base.word_len();
                for i in 0..*d as usize {
                    base.validate_word(&w[i * l..(i + 1) * l].to_vec())?;
                }
                let s = w[*d as usize * l];
                if s < 0 || s >= *d as i64 {
                    return bad("shift out of range");
                }
            }
            Construction::SemidirectCyclic { base, c, .. } => {
                base.validate_word(&w[..base.word_len()].to_vec())?;
                let e = w[base.word_len()];
                if e < 0 || e >= *c as i64 {
                    return bad("cyclic exponent out of range");
                }
            }
            Construction::Subgroup { members, .. } => {
                if members.binary_search(w).is_err() {
                    return bad("not a member of the subgroup");
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.validate_word(w).is_ok()
    }

    /// Splits a wreath word into base coordinates and shift.
    pub fn wreath_parts(&self, w: &Word) -> Result<(Vec<Word>, u64)> {
        let Construction::WreathCyclic { base, d } = &self.inner.construction else {
            return Err(Error::Group("wreath_parts on a non-wreath group".into()));
        };
        let l = base.word_len();
        let parts = (0..*d as usize).map(|i| w[i * l..(i + 1) * l].to_vec()).collect();
        Ok((parts, w[*d as usize * l] as u64))
    }

    /// Builds a wreath word from base coordinates and shift.
    pub fn wreath_assemble(&self, parts: &[Word], shift: u64) -> Result<Word> {
        let Construction::WreathCyclic { base, d } = &self.inner.construction else {
            return Err(Error::Group("wreath_assemble on a non-wreath group".into()));
        };
        if parts.len() != *d as usize {
            return Err(Error::Group("wrong number of wreath coordinates".into()));
        }
        let mut w = Vec::with_capacity(self.word_len());
        for p in parts {
            base.validate_word(p)?;
            w.extend(p.iter().copied());
        }
        w.push((shift % *d as u64) as i64);
        Ok(w)
    }

    pub fn wreath_base(&self) -> Result<(&FiniteGroup, u32)> {
        match &self.inner.construction {
            Construction::WreathCyclic { base, d } => Ok((base, *d)),
            _ => Err(Error::Group("not a wreath product".into())),
        }
    }

    pub fn product_factors(&self) -> Option<&[FiniteGroup]> {
        match &self.inner.construction {
            Construction::Product(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn subgroup_parent(&self) -> Option<&FiniteGroup> {
        match &self.inner.construction {
            Construction::Subgroup { parent, .. } => Some(parent),
            _ => None,
        }
    }

    pub fn subgroup_gens(&self) -> Option<&[Word]> {
        match &self.inner.construction {
            Construction::Subgroup { gens, .. } => Some(gens),
            _ => None,
        }
    }

    pub fn cyclic_order(&self) -> Option<u64> {
        match &self.inner.construction {
            Construction::Cyclic(n) => Some(*n),
            _ => None,
        }
    }

    pub fn symmetric_degree(&self) -> Option<u32> {
        match &self.inner.construction {
            Construction::Symmetric(n) => Some(*n),
            _ => None,
        }
    }

    pub fn elem_abelian_rank(&self) -> Option<u32> {
        match &self.inner.construction {
            Construction::ElemAbelian2(k) => Some(*k),
            _ => None,
        }
    }

    pub fn signed_degree(&self) -> Option<u32> {
        match &self.inner.construction {
            Construction::SignedPermutation(n) => Some(*n),
            _ => None,
        }
    }

    pub fn semidirect_parts(&self) -> Option<(&FiniteGroup, u32)> {
        match &self.inner.construction {
            Construction::SemidirectCyclic { base, c, .. } => Some((base, *c)),
            _ => None,
        }
    }

    pub fn is_subgroup_construction(&self) -> bool {
        matches!(self.inner.construction, Construction::Subgroup { .. })
    }

    /// Greedy extraction of a small generating set from the element list;
    /// each accepted generator at least doubles the closure.
    pub fn reduced_generators(&self) -> Result<Vec<Word>> {
        let els = self.elements()?;
        let mut gens: Vec<Word> = Vec::new();
        let mut closure: std::collections::HashSet<Word> = std::collections::HashSet::new();
        closure.insert(self.id());
        for w in els {
            if closure.contains(w) {
                continue;
            }
            gens.push(w.clone());
            closure.clear();
            closure.insert(self.id());
            let mut queue = vec![self.id()];
            while let Some(x) = queue.pop() {
                for g in &gens {
                    let y = self.mul(&x, g);
                    if closure.insert(y.clone()) {
                        queue.push(y);
                    }
                }
            }
        }
        Ok(gens)
    }

    /// A small generating set.
    pub fn generators(&self) -> Vec<Word> {
        match &self.inner.construction {
            Construction::Cyclic(n) => {
                if *n == 1 {
                    vec![]
                } else {
                    vec![vec![1]]
                }
            }
            Construction::ElemAbelian2(k) => (0..*k as usize)
                .map(|i| {
                    let mut w = vec![0; *k as usize];
                    w[i] = 1;
                    w
                })
                .collect(),
            Construction::Symmetric(n) => {
                let n = *n as usize;
                if n < 2 {
                    return vec![];
                }
                let mut tr: Vec<i64> = (0..n as i64).collect();
                tr.swap(0, 1);
                let cyc: Vec<i64> = (0..n).map(|i| ((i + 1) % n) as i64).collect();
                if n == 2 {
                    vec![tr]
                } else {
                    vec![tr, cyc]
                }
            }
            Construction::SignedPermutation(n) => {
                let n = *n as usize;
                let mut gens = Vec::new();
                let mut flip: Vec<i64> = (1..=n as i64).collect();
                flip[0] = -1;
                gens.push(flip);
                if n >= 2 {
                    let mut tr: Vec<i64> = (1..=n as i64).collect();
                    tr.swap(0, 1);
                    gens.push(tr);
                    if n >= 3 {
                        let cyc: Vec<i64> = (0..n).map(|i| (((i + 1) % n) + 1) as i64).collect();
                        gens.push(cyc);
                    }
                }
                gens
            }
            Construction::Product(fs) => {
                let mut gens = Vec::new();
                let mut off = 0;
                let id = self.id();
                for f in fs {
                    let l = f.word_len();
                    for g in f.generators() {
                        let mut w = id.clone();
                        w[off..off + l].copy_from_slice(&g);
                        gens.push(w);
                    }
                    off += l;
                }
                gens
            }
            Construction::WreathCyclic { base, d } => {
                let mut gens = Vec::new();
                let id = self.id();
                let l = base.word_len();
                for g in base.generators() {
                    let mut w = id.clone();
                    w[..l].copy_from_slice(&g);
                    gens.push(w);
                }
                if *d > 1 {
                    let mut shift = id;
                    let last = shift.len() - 1;
                    shift[last] = 1;
                    gens.push(shift);
                }
                gens
            }
            Construction::SemidirectCyclic { base, c, .. } => {
                let mut gens = Vec::new();
                let id = self.id();
                let l = base.word_len();
                for g in base.generators() {
                    let mut w = id.clone();
                    w[..l].copy_from_slice(&g);
                    gens.push(w);
                }
                if *c > 1 {
                    let mut t = id;
                    t[l] = 1;
                    gens.push(t);
                }
                gens
            }
            Construction::Subgroup { gens, .. } => gens.clone(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if !self.commute(a, b) {
                    return false;
                }
            }
        }
        true
    }

    fn element_data(&self) -> Result<&ElementData> {
        let res = self.inner.elements.get_or_init(|| self.build_elements());
        res.as_ref().map_err(|e| Error::Group(e.clone()))
    }

    /// All elements in sorted word order (orders above [`ENUM_CAP`] fail).
    pub fn elements(&self) -> Result<&[Word]> {
        Ok(&self.element_data()?.list)
    }

    pub fn element_index(&self, w: &Word) -> Result<usize> {
        self.element_data()?
            .index
            .get(w)
            .copied()
            .ok_or_else(|| Error::Group(format!("element not in group {}", self.name())))
    }

    fn build_elements(&self) -> std::result::Result<ElementData, String> {
        if self.order() > ENUM_CAP {
            return Err(format!(
                "group {} of order {} exceeds the enumeration cap {ENUM_CAP}",
                self.name(),
                self.order()
            ));
        }
        let mut list: Vec<Word> = match &self.inner.construction {
            Construction::Cyclic(n) => (0..*n as i64).map(|k| vec![k]).collect(),
            Construction::ElemAbelian2(k) => {
                let k = *k as usize;
                (0..(1u64 << k))
                    .map(|mask| (0..k).map(|i| ((mask >> i) & 1) as i64).collect())
                    .collect()
            }
            Construction::Symmetric(n) => sym::all_permutations(*n as usize)
                .into_iter()
                .map(|p| p.into_iter().map(|x| x as i64).collect())
                .collect(),
            Construction::SignedPermutation(n) => {
                let n = *n as usize;
                let mut out = Vec::new();
                for p in sym::all_permutations(n) {
                    for mask in 0..(1u64 << n) {
                        out.push(
                            (0..n)
                                .map(|i| {
                                    let v = p[i] as i64 + 1;
                                    if (mask >> i) & 1 == 1 {
                                        -v
                                    } else {
                                        v
                                    }
                                })
                                .collect(),
                        );
                    }
                }
                out
            }
            Construction::Product(fs) => {
                let mut acc: Vec<Word> = vec![vec![]];
                for f in fs {
                    let fel = f.elements().map_err(|e| e.to_string())?;
                    let mut next = Vec::with_capacity(acc.len() * fel.len());
                    for a in &acc {
                        for b in fel {
                            let mut w = a.clone();
                            w.extend(b.iter().copied());
                            next.push(w);
                        }
                    }
                    acc = next;
                }
                acc
            }
            Construction::WreathCyclic { base, d } => {
                let bel = base.elements().map_err(|e| e.to_string())?;
                let mut acc: Vec<Word> = vec![vec![]];
                for _ in 0..*d {
                    let mut next = Vec::with_capacity(acc.len() * bel.len());
                    for a in &acc {
                        for b in bel {
                            let mut w = a.clone();
                            w.extend(b.iter().copied());
                            next.push(w);
                        }
                    }
                    acc = next;
                }
                let mut out = Vec::with_capacity(acc.len() * *d as usize);
                for a in acc {
                    for s in 0..*d as i64 {
                        let mut w = a.clone();
                        w.push(s);
                        out.push(w);
                    }
                }
                out
            }
            Construction::SemidirectCyclic { base, c, .. } => {
                let bel = base.elements().map_err(|e| e.to_string())?;
                let mut out = Vec::with_capacity(bel.len() * *c as usize);
                for b in bel {
                    for e in 0..*c as i64 {
                        let mut w = b.clone();
                        w.push(e);
                        out.push(w);
                    }
                }
                out
            }
            Construction::Subgroup { members, .. } => members.as_ref().clone(),
        };
        list.sort();
        let index = list.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(ElementData { list, index })
    }

    fn class_data(&self) -> Result<&ClassData> {
        let res = self.inner.classes.get_or_init(|| self.build_classes());
        res.as_ref().map_err(|e| Error::Group(e.clone()))
    }

    /// Conjugacy classes in a deterministic canonical order.
    pub fn classes(&self) -> Result<&[ClassInfo]> {
        Ok(&self.class_data()?.classes)
    }

    /// Index of the conjugacy class containing `w`.
    pub fn class_of(&self, w: &Word) -> Result<usize> {
        let data = self.class_data()?;
        if let Some(map) = &data.of_element {
            return map
                .get(w)
                .copied()
                .ok_or_else(|| Error::Group(format!("element not in group {}", self.name())));
        }
        match &self.inner.construction {
            Construction::Symmetric(_) => {
                let p: Vec<usize> = w.iter().map(|&x| x as usize).collect();
                let t = sym::cycle_type(&p);
                data.classes
                    .iter()
                    .position(|c| {
                        let rep: Vec<usize> = c.rep.iter().map(|&x| x as usize).collect();
                        sym::cycle_type(&rep) == t
                    })
                    .ok_or_else(|| Error::Group("cycle type not found".into()))
            }
            Construction::WreathCyclic { .. } => {
                let key = self.wreath_class_key(w)?;
                data.wreath_key
                    .as_ref()
                    .expect("wreath class data carries the key map")
                    .get(&key)
                    .copied()
                    .ok_or_else(|| Error::Group("wreath class key not found".into()))
            }
            _ => unreachable!("non-structural constructions store an element map"),
        }
    }

    /// Class invariant of a wreath element: shift plus the lex-least rotation
    /// of the base-class tuple of its cycle products.
    fn wreath_class_key(&self, w: &Word) -> Result<(u64, Vec<usize>)> {
        let Construction::WreathCyclic { base, d } = &self.inner.construction else {
            return Err(Error::Group("not a wreath product".into()));
        };
        let d = *d as u64;
        let (parts, a) = self.wreath_parts(w)?;
        let e = if a == 0 { d } else { a.gcd(&d) };
        let span = d / e;
        let mut tuple = Vec::with_capacity(e as usize);
        for r in 0..e {
            // Cycle product h_r h_{r-a} h_{r-2a} ... over the shift orbit.
            let mut p = base.id();
            for step in 0..span {
                let idx = ((r as i64 - (step as i64) * (a as i64)).rem_euclid(d as i64)) as usize;
                p = base.mul(&p, &parts[idx]);
            }
            tuple.push(base.class_of(&p)?);
        }
        Ok((a, lex_min_rotation(&tuple)))
    }

    fn build_classes(&self) -> std::result::Result<ClassData, String> {
        match &self.inner.construction {
            Construction::Symmetric(n) => {
                let n = *n as u64;
                let classes = sym::partitions(n)
                    .into_iter()
                    .map(|mu| ClassInfo {
                        rep: sym::rep_of_cycle_type(n, &mu)
                            .into_iter()
                            .map(|x| x as i64)
                            .collect(),
                        size: sym::symmetric_class_size(n, &mu),
                    })
                    .collect();
                Ok(ClassData { classes, of_element: None, wreath_key: None })
            }
            Construction::WreathCyclic { base, d } => {
                let d64 = *d as u64;
                let base_classes = base.classes().map_err(|e| e.to_string())?.to_vec();
                let b = base_classes.len();
                let mut classes = Vec::new();
                let mut key_map = HashMap::new();
                for a in 0..d64 {
                    let e = if a == 0 { d64 } else { a.gcd(&d64) };
                    if (b as u128).pow(e as u32) > 4_000_000 {
                        return Err(format!(
                            "wreath class enumeration too large: {b}^{e} tuples"
                        ));
                    }
                    let mut tuple = vec![0usize; e as usize];
                    loop {
                        let canon = lex_min_rotation(&tuple);
                        if canon == tuple {
                            let rotations = distinct_rotations(&tuple) as u64;
                            let size = base.order().pow((d64 - e) as u32)
                                * rotations
                                * tuple
                                    .iter()
                                    .map(|&ci| base_classes[ci].size)
                                    .product::<u64>();
                            // Representative: class reps at the orbit-lead
                            // coordinates, identity elsewhere.
                            let mut parts = vec![base.id(); d64 as usize];
                            for (r, &ci) in tuple.iter().enumerate() {
                                parts[r] = base_classes[ci].rep.clone();
                            }
                            let rep = self
                                .wreath_assemble(&parts, a)
                                .expect("wreath assembly of class rep");
                            key_map.insert((a, canon), classes.len());
                            classes.push(ClassInfo { rep, size });
                        }
                        // Advance the mixed-radix counter.
                        let mut i = 0usize;
                        loop {
                            if i == tuple.len() {
                                break;
                            }
                            tuple[i] += 1;
                            if tuple[i] < b {
                                break;
                            }
                            tuple[i] = 0;
                            i += 1;
                        }
                        if i == tuple.len() {
                            break;
                        }
                    }
                }
                let total: u64 = classes.iter().map(|c| c.size).sum();
                if total != self.order() {
                    return Err(format!(
                        "wreath class sizes sum to {total}, expected {}",
                        self.order()
                    ));
                }
                Ok(ClassData { classes, of_element: None, wreath_key: Some(key_map) })
            }
            _ => {
                let data = self.element_data().map_err(|e| e.to_string())?;
                let gens = {
                    // Conjugation orbits under a generating set reach the
                    // full class; fall back to all elements for subgroups.
                    let g = self.generators();
                    if g.is_empty() {
                        vec![self.id()]
                    } else {
                        g
                    }
                };
                let n = data.list.len();
                let mut class_of = vec![usize::MAX; n];
                let mut classes = Vec::new();
                for start in 0..n {
                    if class_of[start] != usize::MAX {
                        continue;
                    }
                    let cid = classes.len();
                    let mut orbit = vec![start];
                    class_of[start] = cid;
                    let mut qi = 0;
                    while qi < orbit.len() {
                        let x = data.list[orbit[qi]].clone();
                        qi += 1;
                        for g in &gens {
                            let y = self.conj(g, &x);
                            let yi = *data
                                .index
                                .get(&y)
                                .ok_or_else(|| "conjugate left the group".to_string())?;
                            if class_of[yi] == usize::MAX {
                                class_of[yi] = cid;
                                orbit.push(yi);
                            }
                        }
                    }
                    classes.push(ClassInfo {
                        rep: data.list[start].clone(),
                        size: orbit.len() as u64,
                    });
                }
                let of_element = data
                    .list
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (w.clone(), class_of[i]))
                    .collect();
                Ok(ClassData { classes, of_element: Some(of_element), wreath_key: None })
            }
        }
    }

    /// Centralizer of `x` as a subgroup (requires enumeration).
    pub fn centralizer(&self, x: &Word) -> Result<FiniteGroup> {
        let data = self.element_data()?;
        let members: Vec<Word> =
            data.list.iter().filter(|g| self.commute(g, x)).cloned().collect();
        // Build a subgroup with the member list as generators; closure is the
        // member set itself, so this is cheap and exact.
        let sub = self.subgroup(&members)?;
        debug_assert_eq!(sub.order() as usize, members.len());
        Ok(sub)
    }

    /// Whether the enumerated subgroup `h` is normal in `self`.
    pub fn is_normal_subgroup(&self, h: &FiniteGroup) -> Result<bool> {
        let members = h.elements()?;
        for g in self.generators() {
            for m in members {
                let c = self.conj(&g, m);
                if !h.contains(&c) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Left cosets of an enumerated subgroup: representatives plus an index
    /// map from every element of `self` to its coset.
    pub fn cosets_of(&self, h: &FiniteGroup) -> Result<Cosets> {
        let data = self.element_data()?;
        let hm = h.elements()?;
        let mut index_of: HashMap<Word, usize> = HashMap::new();
        let mut reps = Vec::new();
        for g in &data.list {
            if index_of.contains_key(g) {
                continue;
            }
            let cid = reps.len();
            for m in hm {
                index_of.insert(self.mul(g, m), cid);
            }
            reps.push(g.clone());
        }
        Ok(Cosets { reps, index_of })
    }

    /// Validates `image_of` as an automorphism and packages it as an element
    /// permutation with its order.
    pub fn automorphism_action<F>(&self, image_of: F) -> Result<Automorphism>
    where
        F: Fn(&Word) -> Word,
    {
        let data = self.element_data()?;
        let n = data.list.len();
        if (n as u64) * (n as u64) > 4_000_000 {
            return Err(Error::TooLarge(format!(
                "automorphism validation on order {n} is too expensive"
            )));
        }
        let mut map = vec![usize::MAX; n];
        for (i, w) in data.list.iter().enumerate() {
            let img = image_of(w);
            let j = *data
                .index
                .get(&img)
                .ok_or_else(|| Error::Group("automorphism image left the group".into()))?;
            map[i] = j;
        }
        let mut seen = vec![false; n];
        for &j in &map {
            if seen[j] {
                return Err(Error::Group("automorphism is not injective".into()));
            }
            seen[j] = true;
        }
        for (i, a) in data.list.iter().enumerate() {
            for (j, b) in data.list.iter().enumerate() {
                let prod = *data.index.get(&self.mul(a, b)).expect("closed");
                if map[prod] != *data.index.get(&self.mul(&data.list[map[i]], &data.list[map[j]])).expect("closed") {
                    return Err(Error::Group(format!(
                        "not a homomorphism at ({a:?}, {b:?})"
                    )));
                }
            }
        }
        // Order of the permutation.
        let mut order = 1u64;
        let mut cur: Vec<usize> = map.clone();
        let idperm: Vec<usize> = (0..n).collect();
        while cur != idperm {
            cur = cur.iter().map(|&i| map[i]).collect();
            order += 1;
        }
        Ok(Automorphism { map, order })
    }

    /// The inversion automorphism of an abelian group.
    pub fn inversion_automorphism(&self) -> Result<Automorphism> {
        if !self.is_abelian() {
            return Err(Error::Group("inversion is only an automorphism when abelian".into()));
        }
        self.automorphism_action(|w| self.inv(w))
    }

    /// Cyclic coordinate rotation on a product of identical factors.
    pub fn rotation_automorphism(&self) -> Result<Automorphism> {
        let Some(fs) = self.product_factors() else {
            return Err(Error::Group("rotation needs a product group".into()));
        };
        let l = fs[0].word_len();
        if fs.iter().any(|f| f.word_len() != l || f.order() != fs[0].order()) {
            return Err(Error::Group("rotation needs identical factors".into()));
        }
        let k = fs.len();
        self.automorphism_action(|w| {
            let mut out = Vec::with_capacity(w.len());
            out.extend_from_slice(&w[(k - 1) * l..]);
            out.extend_from_slice(&w[..(k - 1) * l]);
            out
        })
    }
}

/// Left-coset decomposition data.
pub struct Cosets {
    pub reps: Vec<Word>,
    pub index_of: HashMap<Word, usize>,
}

fn lex_min_rotation(t: &[usize]) -> Vec<usize> {
    let n = t.len();
    if n == 0 {
        return Vec::new();
    }
    (0..n)
        .map(|s| {
            let mut r = Vec::with_capacity(n);
            r.extend_from_slice(&t[s..]);
            r.extend_from_slice(&t[..s]);
            r
        })
        .min()
        .expect("nonempty")
}

fn distinct_rotations(t: &[usize]) -> usize {
    let n = t.len();
    if n == 0 {
        return 1;
    }
    let mut set = std::collections::HashSet::new();
    for s in 0..n {
        let mut r = Vec::with_capacity(n);
        r.extend_from_slice(&t[s..]);
        r.extend_from_slice(&t[..s]);
        set.insert(r);
    }
    set.len()
}
