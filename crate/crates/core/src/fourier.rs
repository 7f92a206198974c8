//! Nonabelian Fourier transform attached to a finite group.
//!
//! The parameter set pairs each conjugacy class with the irreducible
//! characters of the centralizer of its representative. On that set lives a
//! hermitian pairing, and the transform is the matrix of the pairing applied
//! as an involution. A coset variant handles a normal subgroup with cyclic
//! quotient, mapping parameters supported on the subgroup to parameters
//! supported on the generating coset. Family-level helpers expose the
//! virtual combinations whose transform is the flip of the defining pair.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::chars::{self, CharTable};
use crate::cyc::CycNum;
use crate::group::{FiniteGroup, Word};
use crate::{Error, Result};

/// One parameter: a class block together with a row of its centralizer table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MParam {
    /// Index into [`MSet::blocks`].
    pub block: usize,
    /// Row of the block's centralizer table.
    pub sigma: usize,
}

/// Shared per-class data: the class representative, its centralizer and the
/// centralizer's character table.
#[derive(Clone)]
pub struct ClassBlock {
    /// Class index in the group's canonical class order.
    pub class_idx: usize,
    pub rep: Word,
    pub cent: FiniteGroup,
    pub table: CharTable,
    /// Index of this block's first parameter in [`MSet::params`].
    pub first: usize,
}

/// Ordered parameter set of a group: classes in canonical order, then rows
/// of the centralizer table within each class.
#[derive(Clone)]
pub struct MSet {
    pub group: FiniteGroup,
    pub blocks: Vec<ClassBlock>,
    pub params: Vec<MParam>,
}

impl MSet {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Human-readable name of parameter `i`: class representative and
    /// character label.
    pub fn label(&self, i: usize) -> String {
        let p = &self.params[i];
        let b = &self.blocks[p.block];
        format!("({}; {})", word_label(&b.rep), b.table.label(p.sigma))
    }

    pub fn block_of(&self, i: usize) -> &ClassBlock {
        &self.blocks[self.params[i].block]
    }

    /// Parameter index for a given class index and table row.
    pub fn param_index(&self, class_idx: usize, sigma: usize) -> Option<usize> {
        let b = self.blocks.iter().find(|b| b.class_idx == class_idx)?;
        if sigma < b.table.nrows() {
            Some(b.first + sigma)
        } else {
            None
        }
    }
}

fn word_label(w: &Word) -> String {
    let parts: Vec<String> = w.iter().map(|k| k.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Build the parameter set of `gamma` in canonical order.
pub fn build_m_set(gamma: &FiniteGroup) -> Result<MSet> {
    let classes = gamma.classes()?;
    let mut blocks: Vec<ClassBlock> = Vec::with_capacity(classes.len());
    let mut params = Vec::new();
    for (ci, cl) in classes.iter().enumerate() {
        let cent = gamma.centralizer(&cl.rep)?;
        let table = chars::centralizer_table(gamma, &cl.rep, &cent)?;
        let first = params.len();
        for row in 0..table.nrows() {
            params.push(MParam { block: blocks.len(), sigma: row });
        }
        blocks.push(ClassBlock { class_idx: ci, rep: cl.rep.clone(), cent, table, first });
    }
    Ok(MSet { group: gamma.clone(), blocks, params })
}

/// Pairing of parameters `a` and `b`. Abelian groups use the closed form
/// sigma(y) tau(x^{-1}) / |G|; otherwise the defining sum over the group.
pub fn lusztig_pairing(m: &MSet, a: usize, b: usize) -> Result<CycNum> {
    if m.group.is_abelian() {
        let pa = &m.params[a];
        let ba = &m.blocks[pa.block];
        let pb = &m.params[b];
        let bb = &m.blocks[pb.block];
        let y = &bb.rep;
        let xinv = m.group.inv(&ba.rep);
        let sv = ba.table.value(pa.sigma, ba.cent.class_of(y)?);
        let tv = bb.table.value(pb.sigma, bb.cent.class_of(&xinv)?);
        let denom = BigRational::new(BigInt::from(1), BigInt::from(m.group.order()));
        return Ok((sv * tv).scale(&denom));
    }
    lusztig_pairing_scan(m, a, b)
}

/// Defining sum of the pairing, evaluated term by term over the group.
pub fn lusztig_pairing_scan(m: &MSet, a: usize, b: usize) -> Result<CycNum> {
    let pa = &m.params[a];
    let ba = &m.blocks[pa.block];
    let pb = &m.params[b];
    let bb = &m.blocks[pb.block];
    let g = &m.group;
    let x = &ba.rep;
    let y = &bb.rep;
    let xinv = g.inv(x);
    let mut acc = CycNum::zero();
    for w in g.elements()? {
        let t = g.conj(w, y);
        if !g.commute(x, &t) {
            continue;
        }
        let winv = g.inv(w);
        let u = g.conj(&winv, &xinv);
        let sv = ba.table.value(pa.sigma, ba.cent.class_of(&t)?);
        let tv = bb.table.value(pb.sigma, bb.cent.class_of(&u)?);
        acc += &(sv * tv);
    }
    let denom = BigRational::new(
        BigInt::from(1),
        BigInt::from(ba.cent.order()) * BigInt::from(bb.cent.order()),
    );
    Ok(acc.scale(&denom))
}

/// The transform matrix over a parameter set. `entries[a][b]` is the pairing
/// of parameters `a` and `b`; the operator acts through the transpose, so
/// `apply` sends a coefficient vector `v` to `a -> sum_b entries[b][a] v[b]`.
pub struct FtMatrix {
    pub mset: MSet,
    pub entries: Vec<Vec<CycNum>>,
}

/// Transform matrix of a group, over its canonical parameter set.
pub fn ft_matrix(gamma: &FiniteGroup) -> Result<FtMatrix> {
    ft_matrix_for(build_m_set(gamma)?)
}

/// Transform matrix over an already built parameter set.
pub fn ft_matrix_for(mset: MSet) -> Result<FtMatrix> {
    let n = mset.len();
    let mut entries = Vec::with_capacity(n);
    for a in 0..n {
        let mut row = Vec::with_capacity(n);
        for b in 0..n {
            row.push(lusztig_pairing(&mset, a, b)?);
        }
        entries.push(row);
    }
    Ok(FtMatrix { mset, entries })
}

impl FtMatrix {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Apply the transform to a coefficient vector.
    pub fn apply(&self, v: &[CycNum]) -> Vec<CycNum> {
        let n = self.len();
        let mut out = vec![CycNum::zero(); n];
        for (b, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let row = &self.entries[b];
            for (a, o) in out.iter_mut().enumerate() {
                *o += &(coeff * &row[a]);
            }
        }
        out
    }

    /// Exact check that the matrix squares to the identity.
    pub fn is_involution(&self) -> bool {
        let n = self.len();
        let one = CycNum::one();
        let zero = CycNum::zero();
        for a in 0..n {
            for c in 0..n {
                let mut acc = CycNum::zero();
                for b in 0..n {
                    acc += &(&self.entries[a][b] * &self.entries[b][c]);
                }
                let want = if a == c { &one } else { &zero };
                if &acc != want {
                    return false;
                }
            }
        }
        true
    }

    /// Exact check of unitarity with respect to the standard hermitian form.
    pub fn is_unitary(&self) -> bool {
        let n = self.len();
        let one = CycNum::one();
        let zero = CycNum::zero();
        for a in 0..n {
            for c in 0..n {
                let mut acc = CycNum::zero();
                for b in 0..n {
                    acc += &(&self.entries[a][b] * &self.entries[c][b].conjugate());
                }
                let want = if a == c { &one } else { &zero };
                if &acc != want {
                    return false;
                }
            }
        }
        true
    }
}

/// Coefficient vector of the combination attached to a commuting pair
/// (x, y): supported on the class block of x, with coefficient
/// sigma(y'^{-1}) at row sigma, where y' is y transported into the
/// centralizer of the block representative.
pub fn pi_u_element(m: &MSet, x: &Word, y: &Word) -> Result<Vec<CycNum>> {
    let g = &m.group;
    g.validate_word(x)?;
    g.validate_word(y)?;
    if !g.commute(x, y) {
        return Err(Error::InvalidInput(format!(
            "pi_u_element needs a commuting pair, got {} and {}",
            word_label(x),
            word_label(y)
        )));
    }
    let ci = g.class_of(x)?;
    let bi = m
        .blocks
        .iter()
        .position(|b| b.class_idx == ci)
        .ok_or_else(|| Error::Group("class without a parameter block".into()))?;
    let rep = m.blocks[bi].rep.clone();
    let mut g0 = None;
    for w in g.elements()? {
        if g.conj(w, x) == rep {
            g0 = Some(g.inv(w));
            break;
        }
    }
    let g0 = g0.ok_or_else(|| Error::Group("element not conjugate to its class rep".into()))?;
    let y_in_cent = g.conj(&g0, y);
    pi_u_element_at(m, bi, &y_in_cent)
}

/// Same combination with x already canonical: `bi` is the block of x's
/// class and `y_in_cent` lies in that block's centralizer.
fn pi_u_element_at(m: &MSet, bi: usize, y_in_cent: &Word) -> Result<Vec<CycNum>> {
    let block = &m.blocks[bi];
    let yc = block.cent.class_of(&m.group.inv(y_in_cent))?;
    let mut v = vec![CycNum::zero(); m.len()];
    for row in 0..block.table.nrows() {
        v[block.first + row] = block.table.value(row, yc).clone();
    }
    Ok(v)
}

/// Character-mode combination for an abelian group: coefficient tau(y) at
/// the parameter (y, sigma) for every class y.
pub fn pi_u_character(m: &MSet, sigma: usize, tau: usize) -> Result<Vec<CycNum>> {
    if !m.group.is_abelian() {
        return Err(Error::Unsupported(
            "character-mode combinations need an abelian group".into(),
        ));
    }
    let mut v = vec![CycNum::zero(); m.len()];
    for block in &m.blocks {
        if sigma >= block.table.nrows() || tau >= block.table.nrows() {
            return Err(Error::InvalidInput("character index out of range".into()));
        }
        let yc = block.cent.class_of(&block.rep)?;
        v[block.first + sigma] = block.table.value(tau, yc).clone();
    }
    Ok(v)
}

/// A family: a parameter set with a name for each member.
pub struct FamilyData {
    pub name: String,
    pub mset: MSet,
    pub member_names: Vec<String>,
}

impl FamilyData {
    /// Family with generated member names.
    pub fn generic(name: &str, gamma: &FiniteGroup) -> Result<FamilyData> {
        let mset = build_m_set(gamma)?;
        let member_names = (0..mset.len()).map(|i| mset.label(i)).collect();
        Ok(FamilyData { name: name.to_string(), mset, member_names })
    }

    /// Family with explicit member names in canonical parameter order. The
    /// names must be distinct and cover the parameter set exactly.
    pub fn with_member_names(
        name: &str,
        gamma: &FiniteGroup,
        names: Vec<String>,
    ) -> Result<FamilyData> {
        let mset = build_m_set(gamma)?;
        if names.len() != mset.len() {
            return Err(Error::InvalidInput(format!(
                "family {name} needs {} member names, got {}",
                mset.len(),
                names.len()
            )));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate member name {n}")));
            }
        }
        Ok(FamilyData { name: name.to_string(), mset, member_names: names })
    }

    pub fn gamma(&self) -> &FiniteGroup {
        &self.mset.group
    }

    pub fn member_index(&self, name: &str) -> Option<usize> {
        self.member_names.iter().position(|n| n == name)
    }

    /// Render a coefficient vector as a signed combination of member names.
    pub fn combination_string(&self, coeffs: &[CycNum]) -> String {
        let mut out = String::new();
        let one = CycNum::one();
        let minus_one = CycNum::from_integer(-1);
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c == &minus_one {
                out.push_str(if out.is_empty() { "-" } else { " - " });
            } else if !out.is_empty() {
                out.push_str(" + ");
            }
            if c != &one && c != &minus_one {
                out.push_str(&format!("({c})*"));
            }
            out.push_str(&self.member_names[i]);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Element-mode combination over a family.
pub fn pi_family_element(fam: &FamilyData, x: &Word, y: &Word) -> Result<Vec<CycNum>> {
    pi_u_element(&fam.mset, x, y)
}

/// Character-mode combination over a family with abelian group.
pub fn pi_family_character(fam: &FamilyData, sigma: usize, tau: usize) -> Result<Vec<CycNum>> {
    pi_u_character(&fam.mset, sigma, tau)
}

/// Outcome of the flip checks on one family.
pub struct FlipReport {
    pub group_name: String,
    /// Commuting ordered element pairs checked.
    pub element_pairs: usize,
    /// Character pairs checked (abelian groups only, zero otherwise).
    pub character_pairs: usize,
    /// Basis parameters checked against the averaged flip identity.
    pub basis_checks: usize,
    pub failures: Vec<String>,
}

impl FlipReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check the flip identities on a family: the transform of the element-mode
/// combination of (x, y) equals the combination of (y, x) for every
/// commuting ordered pair; for abelian groups the character-mode version;
/// and for each basis parameter (x, sigma) the identity obtained by
/// averaging the element-mode one over the centralizer of x.
pub fn verify_flip(fam: &FamilyData) -> Result<FlipReport> {
    let ft = ft_matrix_for(fam.mset.clone())?;
    verify_flip_with(fam, &ft)
}

/// Same checks, reusing an already built transform matrix.
pub fn verify_flip_with(fam: &FamilyData, ft: &FtMatrix) -> Result<FlipReport> {
    if fam.mset.len() != ft.mset.len() || fam.gamma().order() != ft.mset.group.order() {
        return Err(Error::InvalidInput(
            "family and transform live on different parameter sets".into(),
        ));
    }
    let m = &ft.mset;
    let g = &m.group;
    let n = m.len();
    let mut failures = Vec::new();

    // Conjugator memo: element -> (block, w with w * elt * w^{-1} = rep).
    let mut memo: HashMap<Word, (usize, Word)> = HashMap::new();
    for (bi, block) in m.blocks.iter().enumerate() {
        for w in g.elements()? {
            let x = g.conj(w, &block.rep);
            memo.entry(x).or_insert_with(|| (bi, g.inv(w)));
        }
    }

    // Per block and centralizer class: the combination vector and its image.
    let mut pi_store: Vec<Vec<Vec<CycNum>>> = Vec::with_capacity(m.blocks.len());
    let mut ft_store: Vec<Vec<Vec<CycNum>>> = Vec::with_capacity(m.blocks.len());
    for (bi, block) in m.blocks.iter().enumerate() {
        let ncl = block.cent.classes()?.len();
        let mut pis = Vec::with_capacity(ncl);
        let mut fts = Vec::with_capacity(ncl);
        for c in 0..ncl {
            let y = block.cent.classes()?[c].rep.clone();
            let v = pi_u_element_at(m, bi, &y)?;
            fts.push(ft.apply(&v));
            pis.push(v);
        }
        pi_store.push(pis);
        ft_store.push(fts);
    }

    // Element mode over every commuting ordered pair.
    let mut element_pairs = 0usize;
    let mut checked: HashSet<(usize, usize, usize, usize)> = HashSet::new();
    for x in g.elements()? {
        let (bx, g0x) = memo.get(x).expect("memo covers the group").clone();
        for y in g.elements()? {
            if !g.commute(x, y) {
                continue;
            }
            element_pairs += 1;
            let cy = m.blocks[bx].cent.class_of(&g.conj(&g0x, y))?;
            let (by, g0y) = memo.get(y).expect("memo covers the group").clone();
            let cx = m.blocks[by].cent.class_of(&g.conj(&g0y, x))?;
            if !checked.insert((bx, cy, by, cx)) {
                continue;
            }
            if ft_store[bx][cy] != pi_store[by][cx] {
                failures.push(format!(
                    "element pair ({}, {})",
                    word_label(x),
                    word_label(y)
                ));
            }
        }
    }

    // Character mode, abelian only.
    let mut character_pairs = 0usize;
    if g.is_abelian() {
        let nrows = m.blocks[0].table.nrows();
        for sigma in 0..nrows {
            for tau in 0..nrows {
                character_pairs += 1;
                let lhs = ft.apply(&pi_u_character(m, sigma, tau)?);
                let rhs = pi_u_character(m, tau, sigma)?;
                if lhs != rhs {
                    failures.push(format!("character pair ({sigma}, {tau})"));
                }
            }
        }
    }

    // Averaged identity on each basis parameter: the transform of the basis
    // vector at (x, sigma) equals the sigma-weighted centralizer average of
    // the flipped element-mode combinations.
    let mut basis_checks = 0usize;
    for (ai, pa) in m.params.iter().enumerate() {
        let block = &m.blocks[pa.block];
        basis_checks += 1;
        let mut rhs = vec![CycNum::zero(); n];
        for y in block.cent.elements()? {
            let sv = block.table.value(pa.sigma, block.cent.class_of(y)?);
            if sv.is_zero() {
                continue;
            }
            let (by, g0y) = memo.get(y).expect("memo covers the group").clone();
            let cx = m.blocks[by].cent.class_of(&g.conj(&g0y, &block.rep))?;
            for (t, r) in rhs.iter_mut().enumerate() {
                *r += &(sv * &pi_store[by][cx][t]);
            }
        }
        let denom = BigRational::new(BigInt::from(1), BigInt::from(block.cent.order()));
        let lhs: Vec<CycNum> = (0..n).map(|t| ft.entries[ai][t].clone()).collect();
        let rhs: Vec<CycNum> = rhs.into_iter().map(|r| r.scale(&denom)).collect();
        if lhs != rhs {
            failures.push(format!("basis parameter {}", m.label(ai)));
        }
    }

    if failures.len() > 40 {
        failures.truncate(40);
        failures.push("further failures suppressed".into());
    }
    Ok(FlipReport {
        group_name: g.name().to_string(),
        element_pairs,
        character_pairs,
        basis_checks,
        failures,
    })
}

/// Number of orbits of commuting ordered pairs under simultaneous
/// conjugation. Independent count of the parameter set size.
pub fn commuting_orbit_count(g: &FiniteGroup) -> Result<usize> {
    let els = g.elements()?;
    let mut canon: HashSet<(Word, Word)> = HashSet::new();
    for x in els {
        for y in els {
            if !g.commute(x, y) {
                continue;
            }
            let mut best: Option<(Word, Word)> = None;
            for w in els {
                let pair = (g.conj(w, x), g.conj(w, y));
                if best.as_ref().map(|b| &pair < b).unwrap_or(true) {
                    best = Some(pair);
                }
            }
            canon.insert(best.expect("group is nonempty"));
        }
    }
    Ok(canon.len())
}

/// Per-class data on the subgroup side of the coset transform.
pub struct CosetMBlock {
    pub class_idx: usize,
    pub rep: Word,
    /// Centralizer of the representative in the big group.
    pub zbig: FiniteGroup,
    pub table: CharTable,
}

/// Per-class data on the coset side.
pub struct CosetMBarBlock {
    pub class_idx: usize,
    pub rep: Word,
    /// Order of the centralizer in the big group (enters the pairing).
    pub zbig_order: u64,
    /// Centralizer intersected with the subgroup.
    pub zsub: FiniteGroup,
    pub table: CharTable,
}

/// The coset transform for a normal subgroup with cyclic quotient of order
/// `c`. Rows are indexed by coset-side parameters, columns by subgroup-side
/// parameters taken up to quotient-character twists.
pub struct CosetFt {
    pub big: FiniteGroup,
    pub sub: FiniteGroup,
    pub c: u64,
    pub alpha: Word,
    pub m_blocks: Vec<CosetMBlock>,
    /// Subgroup-side parameters: (block, representative row).
    pub m_params: Vec<(usize, usize)>,
    pub mbar_blocks: Vec<CosetMBarBlock>,
    /// Coset-side parameters: (block, representative row).
    pub mbar_params: Vec<(usize, usize)>,
    /// entries[i][j]: pairing of coset-side parameter i with subgroup-side
    /// parameter j, scaled by c.
    pub entries: Vec<Vec<CycNum>>,
}

pub(crate) fn coset_exponents(
    big: &FiniteGroup,
    sub: &FiniteGroup,
    c: u64,
) -> Result<(Word, Vec<u64>)> {
    let nels = big.elements()?.len();
    if c == 1 {
        return Ok((big.id(), vec![0; nels]));
    }
    let mut alpha = None;
    for w in big.elements()? {
        if sub.contains(w) {
            continue;
        }
        let mut p = w.clone();
        let mut k = 1u64;
        while !sub.contains(&p) {
            p = big.mul(&p, w);
            k += 1;
            if k > c {
                break;
            }
        }
        if k == c {
            alpha = Some(w.clone());
            break;
        }
    }
    let alpha = alpha.ok_or_else(|| {
        Error::InvalidInput("quotient by the subgroup is not cyclic".into())
    })?;
    let mut e = vec![u64::MAX; nels];
    let mut pow = big.id();
    for k in 0..c {
        for h in sub.elements()? {
            let w = big.mul(h, &pow);
            let idx = big.element_index(&w)?;
            if e[idx] != u64::MAX {
                return Err(Error::Group("coset sweep revisited an element".into()));
            }
            e[idx] = k;
        }
        pow = big.mul(&pow, &alpha);
    }
    if e.iter().any(|&k| k == u64::MAX) {
        return Err(Error::Group("coset sweep missed an element".into()));
    }
    Ok((alpha, e))
}

/// Build the coset transform for `sub` normal in `big` with cyclic quotient.
/// `sub` must be a subgroup construction whose parent is `big`.
pub fn ft_coset(big: &FiniteGroup, sub: &FiniteGroup) -> Result<CosetFt> {
    let parent = sub
        .subgroup_parent()
        .ok_or_else(|| Error::InvalidInput("coset transform needs a subgroup".into()))?;
    if !parent.same(big) {
        return Err(Error::InvalidInput(
            "subgroup was not constructed inside the given group".into(),
        ));
    }
    if !big.is_normal_subgroup(sub)? {
        return Err(Error::InvalidInput("subgroup is not normal".into()));
    }
    let c = big.order() / sub.order();
    let (alpha, e) = coset_exponents(big, sub, c)?;
    let target = if c == 1 { 0 } else { 1 };
    let zeta = CycNum::root_of_unity(c, 1);
    let classes = big.classes()?.to_vec();

    // Subgroup side: classes inside the subgroup whose big centralizer meets
    // the generating coset; rows must restrict irreducibly to the subgroup
    // part of the centralizer, and are then folded under quotient twists.
    let mut m_blocks = Vec::new();
    let mut m_params = Vec::new();
    for (ci, cl) in classes.iter().enumerate() {
        if e[big.element_index(&cl.rep)?] != 0 {
            continue;
        }
        let zbig = big.centralizer(&cl.rep)?;
        let mut meets = false;
        let mut zsub_members = Vec::new();
        for w in zbig.elements()? {
            let k = e[big.element_index(w)?];
            if k == target {
                meets = true;
            }
            if k == 0 {
                zsub_members.push(w.clone());
            }
        }
        if !meets {
            continue;
        }
        let table = chars::centralizer_table(big, &cl.rep, &zbig)?;
        let nrows = table.nrows();
        let zcl = zbig.classes()?.to_vec();
        // Restriction norm on the subgroup part decides admissibility.
        let mut admissible = vec![false; nrows];
        for (row, adm) in admissible.iter_mut().enumerate() {
            let mut acc = CycNum::zero();
            for w in &zsub_members {
                let v = table.value(row, zbig.class_of(w)?);
                acc += &(v * &v.conjugate());
            }
            let denom = BigRational::new(BigInt::from(1), BigInt::from(zsub_members.len()));
            *adm = acc.scale(&denom) == CycNum::one();
        }
        // Twist by the quotient character: multiply by zeta^(coset exponent).
        let mut twist_of = Vec::with_capacity(nrows);
        for row in 0..nrows {
            let twisted: Vec<CycNum> = zcl
                .iter()
                .enumerate()
                .map(|(k, info)| {
                    let ek = e[big.element_index(&info.rep).expect("member of big")];
                    table.value(row, k) * &zeta.pow(ek as i64)
                })
                .collect();
            let idx = table.row_index_of(&twisted).ok_or_else(|| {
                Error::Chars("twist of an irreducible row left the table".into())
            })?;
            twist_of.push(idx);
        }
        let bi = m_blocks.len();
        let mut visited = vec![false; nrows];
        for row in 0..nrows {
            if visited[row] || !admissible[row] {
                continue;
            }
            let mut cur = row;
            loop {
                visited[cur] = true;
                if !admissible[cur] {
                    return Err(Error::Chars(
                        "quotient twist broke restriction admissibility".into(),
                    ));
                }
                cur = twist_of[cur];
                if cur == row {
                    break;
                }
            }
            m_params.push((bi, row));
        }
        m_blocks.push(CosetMBlock { class_idx: ci, rep: cl.rep.clone(), zbig, table });
    }

    // Coset side: classes meeting the generating coset; characters of the
    // subgroup part of the centralizer, folded under conjugation by the full
    // centralizer.
    let mut mbar_blocks = Vec::new();
    let mut mbar_params = Vec::new();
    for (ci, cl) in classes.iter().enumerate() {
        if e[big.element_index(&cl.rep)?] != target {
            continue;
        }
        if c == 1 {
            // Degenerate case: both sides coincide; reuse the block data.
            let src = m_blocks
                .iter()
                .find(|b| b.class_idx == ci)
                .ok_or_else(|| Error::Group("degenerate coset block missing".into()))?;
            let bi = mbar_blocks.len();
            for row in 0..src.table.nrows() {
                mbar_params.push((bi, row));
            }
            mbar_blocks.push(CosetMBarBlock {
                class_idx: ci,
                rep: cl.rep.clone(),
                zbig_order: src.zbig.order(),
                zsub: src.zbig.clone(),
                table: src.table.clone(),
            });
            continue;
        }
        let zbig = big.centralizer(&cl.rep)?;
        let mut zsub_members = Vec::new();
        for w in zbig.elements()? {
            if e[big.element_index(w)?] == 0 {
                zsub_members.push(w.clone());
            }
        }
        let zsub = big.subgroup(&zsub_members)?;
        if zsub.order() != zsub_members.len() as u64 {
            return Err(Error::Group("centralizer subgroup part is not closed".into()));
        }
        let table = if zsub.is_abelian() {
            CharTable::of(&zsub)?
        } else {
            return Err(Error::Unsupported(format!(
                "nonabelian subgroup-part centralizer of order {} on the coset side",
                zsub.order()
            )));
        };
        let nrows = table.nrows();
        let zscl = zsub.classes()?.to_vec();
        // Conjugation by the full centralizer permutes the rows.
        let mut orbit_join: Vec<usize> = (0..nrows).collect();
        for gmem in zbig.elements()? {
            let ginv = big.inv(gmem);
            let perm: Result<Vec<usize>> = zscl
                .iter()
                .map(|info| zsub.class_of(&big.conj(&ginv, &info.rep)))
                .collect();
            let perm = perm?;
            for row in 0..nrows {
                let mapped: Vec<CycNum> =
                    perm.iter().map(|&k| table.value(row, k).clone()).collect();
                let idx = table.row_index_of(&mapped).ok_or_else(|| {
                    Error::Chars("conjugated row left the table".into())
                })?;
                // Union by minimum: both rows share one parameter.
                let a = orbit_join[row].min(orbit_join[idx]);
                let r1 = orbit_join[row];
                let r2 = orbit_join[idx];
                for v in orbit_join.iter_mut() {
                    if *v == r1 || *v == r2 {
                        *v = a;
                    }
                }
            }
        }
        let bi = mbar_blocks.len();
        let mut seen = HashSet::new();
        for row in 0..nrows {
            if orbit_join[row] == row && seen.insert(row) {
                mbar_params.push((bi, row));
            }
        }
        mbar_blocks.push(CosetMBarBlock {
            class_idx: ci,
            rep: cl.rep.clone(),
            zbig_order: zbig.order(),
            zsub,
            table,
        });
    }

    if m_params.len() != mbar_params.len() {
        return Err(Error::Group(format!(
            "coset parameter sets differ in size: {} vs {}",
            m_params.len(),
            mbar_params.len()
        )));
    }

    // Pairing entries, scaled by c.
    let mut entries = Vec::with_capacity(mbar_params.len());
    for &(bbi, brow) in &mbar_params {
        let bb = &mbar_blocks[bbi];
        let x = &bb.rep;
        let xinv = big.inv(x);
        let mut row_out = Vec::with_capacity(m_params.len());
        for &(mbi, mrow) in &m_params {
            let mb = &m_blocks[mbi];
            let y = &mb.rep;
            let mut acc = CycNum::zero();
            for w in big.elements()? {
                let t = big.conj(w, y);
                if !big.commute(x, &t) {
                    continue;
                }
                let u = big.conj(&big.inv(w), &xinv);
                let sv = bb.table.value(brow, bb.zsub.class_of(&t)?);
                let tv = mb.table.value(mrow, mb.zbig.class_of(&u)?);
                acc += &(sv * tv);
            }
            let scale = BigRational::new(
                BigInt::from(c),
                BigInt::from(bb.zbig_order) * BigInt::from(mb.zbig.order()),
            );
            row_out.push(acc.scale(&scale));
        }
        entries.push(row_out);
    }

    Ok(CosetFt {
        big: big.clone(),
        sub: sub.clone(),
        c,
        alpha,
        m_blocks,
        m_params,
        mbar_blocks,
        mbar_params,
        entries,
    })
}

impl CosetFt {
    pub fn m_len(&self) -> usize {
        self.m_params.len()
    }

    pub fn mbar_len(&self) -> usize {
        self.mbar_params.len()
    }

    pub fn m_label(&self, j: usize) -> String {
        let (bi, row) = self.m_params[j];
        let b = &self.m_blocks[bi];
        format!("({}; {})", word_label(&b.rep), b.table.label(row))
    }

    pub fn mbar_label(&self, i: usize) -> String {
        let (bi, row) = self.mbar_params[i];
        let b = &self.mbar_blocks[bi];
        format!("({}; {})", word_label(&b.rep), b.table.label(row))
    }

    /// Apply the transform to a vector over the subgroup-side parameters.
    pub fn forward(&self, f: &[CycNum]) -> Vec<CycNum> {
        self.entries
            .iter()
            .map(|row| {
                let mut acc = CycNum::zero();
                for (v, coeff) in row.iter().zip(f) {
                    acc += &(v * coeff);
                }
                acc
            })
            .collect()
    }

    /// Apply the inverse, the conjugate transpose of the entry matrix.
    pub fn inverse(&self, g: &[CycNum]) -> Vec<CycNum> {
        let n = self.m_len();
        let mut out = vec![CycNum::zero(); n];
        for (row, coeff) in self.entries.iter().zip(g) {
            if coeff.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(row) {
                *o += &(&v.conjugate() * coeff);
            }
        }
        out
    }

    /// Exact check that inverse and forward compose to the identity in both
    /// orders.
    pub fn identity_check(&self) -> bool {
        let n = self.m_len();
        let one = CycNum::one();
        let zero = CycNum::zero();
        for a in 0..n {
            for b in 0..n {
                let mut acc = CycNum::zero();
                for row in &self.entries {
                    acc += &(&row[a].conjugate() * &row[b]);
                }
                let want = if a == b { &one } else { &zero };
                if &acc != want {
                    return false;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let mut acc = CycNum::zero();
                for t in 0..n {
                    acc += &(&self.entries[a][t] * &self.entries[b][t].conjugate());
                }
                let want = if a == b { &one } else { &zero };
                if &acc != want {
                    return false;
                }
            }
        }
        true
    }
}

/// One rotation orbit of tuples of partitions, with its family data: the
/// group is cyclic of order c = length / period, and members are named by
/// the form index r (a multiple of the period) and a character index.
pub struct GlFamily {
    /// Partition labels of the canonical (lexicographically least) rotation.
    pub tuple: Vec<String>,
    pub period: usize,
    pub c: usize,
    pub data: FamilyData,
}

/// Families for m-tuples of partitions of k under cyclic rotation.
pub fn gl_cyclic_families(k: usize, m: usize) -> Result<Vec<GlFamily>> {
    if m == 0 {
        return Err(Error::InvalidInput("tuple length must be positive".into()));
    }
    let parts = crate::sym::partitions(k as u64);
    let p = parts.len();
    let total = (p as u64).checked_pow(m as u32).ok_or_else(|| {
        Error::TooLarge("tuple space overflows".into())
    })?;
    if total > 1_000_000 {
        return Err(Error::TooLarge(format!(
            "{total} tuples of partitions exceed the enumeration budget"
        )));
    }
    let labels: Vec<String> = parts.iter().map(|q| crate::sym::partition_label(q)).collect();
    let mut families = Vec::new();
    let mut tuple = vec![0usize; m];
    loop {
        // Keep only the lexicographically least rotation of each orbit.
        let mut canonical = true;
        let mut period = m;
        for s in 1..m {
            let rotated_cmp = (0..m)
                .map(|i| tuple[(i + s) % m].cmp(&tuple[i]))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal);
            if rotated_cmp == std::cmp::Ordering::Less {
                canonical = false;
                break;
            }
            if rotated_cmp == std::cmp::Ordering::Equal && s < period {
                period = s;
            }
        }
        if canonical {
            let c = m / period;
            let gamma = FiniteGroup::cyclic(c as u64);
            let tuple_labels: Vec<String> =
                tuple.iter().map(|&i| labels[i].clone()).collect();
            let name = format!("glfam(k={k},m={m})[{}]", tuple_labels.join("|"));
            let mut names = Vec::with_capacity(c * c);
            for j in 0..c {
                for i in 0..c {
                    names.push(format!("r{}#chi{}", j * period, i));
                }
            }
            let data = FamilyData::with_member_names(&name, &gamma, names)?;
            families.push(GlFamily { tuple: tuple_labels, period, c, data });
        }
        // Next tuple in odometer order.
        let mut pos = m;
        while pos > 0 {
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < p {
                break;
            }
            tuple[pos] = 0;
            if pos == 0 {
                return Ok(families);
            }
        }
    }
}

/// Family on the two-factor flip pattern: the wreath square of an abelian
/// group by the swap. The class count is l(l+3)/2 for base order l.
pub fn flip_pattern_families(gamma_u: &FiniteGroup) -> Result<FamilyData> {
    if !gamma_u.is_abelian() {
        return Err(Error::InvalidInput(
            "flip pattern needs an abelian base group".into(),
        ));
    }
    let big = FiniteGroup::wreath_cyclic(gamma_u.clone(), 2);
    let l = gamma_u.order();
    let expected = (l * (l + 3) / 2) as usize;
    let got = big.classes()?.len();
    if got != expected {
        return Err(Error::Group(format!(
            "flip pattern class count {got} does not match {expected}"
        )));
    }
    FamilyData::generic(&format!("flip({})", gamma_u.name()), &big)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_set_block_sizes_add_up() {
        let m = build_m_set(&FiniteGroup::symmetric(3)).unwrap();
        let sizes: Vec<usize> = m.blocks.iter().map(|b| b.table.nrows()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), m.len());
        assert_eq!(m.len(), 8);
    }

    #[test]
    fn abelian_pairing_agrees_with_scan() {
        let m = build_m_set(&FiniteGroup::cyclic(4)).unwrap();
        for a in 0..m.len() {
            for b in 0..m.len() {
                assert_eq!(
                    lusztig_pairing(&m, a, b).unwrap(),
                    lusztig_pairing_scan(&m, a, b).unwrap()
                );
            }
        }
    }

    #[test]
    fn trivial_group_transform_is_one() {
        let ft = ft_matrix(&FiniteGroup::cyclic(1)).unwrap();
        assert_eq!(ft.len(), 1);
        assert_eq!(ft.entries[0][0], CycNum::one());
        assert!(ft.is_involution());
        assert!(ft.is_unitary());
    }
}
