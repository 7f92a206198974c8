//! Exact character tables and class-function operations.
//!
//! Tables are built construction by construction: cyclic and elementary
//! abelian groups get explicit dual bases, symmetric groups use the
//! Murnaghan-Nakayama rule, products tensor their factor tables, and wreath
//! or split cyclic extensions go through the cyclic Clifford-Mackey method:
//! orbits of the quotient on the base characters, a canonical extension on
//! each stabilizer, and induction of its cyclic twists.
//!
//! Every produced table is certified on the spot: the rows must be exactly
//! orthonormal, have positive integer degrees with squares summing to the
//! group order, and be as numerous as the conjugacy classes. Those
//! conditions force the rows to be precisely the irreducible characters, so
//! no table with a construction bug can escape.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::cyc::CycNum;
use crate::group::{FiniteGroup, Word};
use crate::sym;
use crate::{Error, Result};

/// Character table: `rows[i][j]` is the i-th irreducible character at the
/// j-th conjugacy class of the group (class order as in `group.classes()`).
#[derive(Clone)]
pub struct CharTable {
    group: FiniteGroup,
    labels: Vec<String>,
    rows: Vec<Vec<CycNum>>,
}

impl CharTable {
    /// Builds the full irreducible character table of `g`.
    pub fn of(g: &FiniteGroup) -> Result<CharTable> {
        let table = if let Some(n) = g.cyclic_order() {
            cyclic_table(g, n)
        } else if let Some(k) = g.elem_abelian_rank() {
            elem_abelian_table(g, k)
        } else if let Some(n) = g.symmetric_degree() {
            symmetric_table(g, n)
        } else if g.product_factors().is_some() {
            product_table(g)?
        } else if g.wreath_base().is_ok() || g.semidirect_parts().is_some() {
            mackey(g)?.table
        } else if g.is_subgroup_construction() {
            if g.is_abelian() {
                abelian_duality_table(g)?
            } else {
                return Err(Error::Unsupported(format!(
                    "no generic table for nonabelian subgroup {}; use centralizer_table",
                    g.name()
                )));
            }
        } else if g.signed_degree().is_some() {
            return Err(Error::Unsupported(
                "signed permutation groups have no table builder".into(),
            ));
        } else {
            return Err(Error::Unsupported(format!("no table builder for {}", g.name())));
        };
        table.verify_complete()?;
        Ok(table)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn rows(&self) -> &[Vec<CycNum>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[CycNum] {
        &self.rows[i]
    }

    pub fn value(&self, i: usize, class: usize) -> &CycNum {
        &self.rows[i][class]
    }

    /// Index of the class of the identity element.
    pub fn identity_class(&self) -> Result<usize> {
        self.group.class_of(&self.group.id())
    }

    pub fn degree(&self, i: usize) -> Result<CycNum> {
        Ok(self.rows[i][self.identity_class()?].clone())
    }

    pub fn row_index_of(&self, values: &[CycNum]) -> Option<usize> {
        self.rows.iter().position(|r| r.as_slice() == values)
    }

    /// Certifies the table: row count equals class count, degrees are
    /// positive integers with squares summing to the group order, and the
    /// rows are exactly orthonormal. Together these force the rows to be
    /// the complete set of irreducible characters.
    pub fn verify_complete(&self) -> Result<()> {
        let classes = self.group.classes()?;
        if self.rows.len() != classes.len() {
            return Err(Error::Chars(format!(
                "{}: {} rows for {} classes",
                self.group.name(),
                self.rows.len(),
                classes.len()
            )));
        }
        let idc = self.identity_class()?;
        let mut sq = BigRational::from_integer(BigInt::from(0));
        for (i, row) in self.rows.iter().enumerate() {
            let deg = row[idc]
                .as_rational()
                .ok_or_else(|| Error::Chars(format!("row {i} has a nonrational degree")))?;
            if !deg.is_integer() || deg <= BigRational::from_integer(BigInt::from(0)) {
                return Err(Error::Chars(format!("row {i} has degree {deg}")));
            }
            sq += &deg * &deg;
        }
        if sq != BigRational::from_integer(BigInt::from(self.group.order())) {
            return Err(Error::Chars(format!(
                "{}: degree squares sum to {sq}, group order is {}",
                self.group.name(),
                self.group.order()
            )));
        }
        for i in 0..self.rows.len() {
            for j in i..self.rows.len() {
                let p = inner_product(&self.group, &self.rows[i], &self.rows[j])?;
                let expected = if i == j { CycNum::one() } else { CycNum::zero() };
                if p != expected {
                    return Err(Error::Chars(format!(
                        "{}: rows {i},{j} have inner product {p}",
                        self.group.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Class-function inner product `(1/|G|) sum |C| a(C) conj(b(C))`.
pub fn inner_product(g: &FiniteGroup, a: &[CycNum], b: &[CycNum]) -> Result<CycNum> {
    let classes = g.classes()?;
    if a.len() != classes.len() || b.len() != classes.len() {
        return Err(Error::Chars("class function length mismatch".into()));
    }
    let mut acc = CycNum::zero();
    for (j, c) in classes.iter().enumerate() {
        let term = &a[j] * &b[j].conjugate();
        acc += &term.scale(&BigRational::from_integer(BigInt::from(c.size)));
    }
    Ok(acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(g.order()))))
}

/// Restriction of a class function on `g` to the subgroup `h` (same word
/// encoding), as values on the classes of `h`.
pub fn restrict(f: &[CycNum], g: &FiniteGroup, h: &FiniteGroup) -> Result<Vec<CycNum>> {
    let hcl = h.classes()?;
    let mut out = Vec::with_capacity(hcl.len());
    for c in hcl {
        out.push(f[g.class_of(&c.rep)?].clone());
    }
    Ok(out)
}

/// Induction of a class function from the subgroup `h` to `g`, computed
/// through class fusion: `Ind f(C) = |Z_G(C)|/|H| * sum_{D -> C} |D| f(D)`.
pub fn induce(f: &[CycNum], h: &FiniteGroup, g: &FiniteGroup) -> Result<Vec<CycNum>> {
    let hcl = h.classes()?;
    let gcl = g.classes()?;
    if f.len() != hcl.len() {
        return Err(Error::Chars("class function length mismatch".into()));
    }
    let mut out = vec![CycNum::zero(); gcl.len()];
    for (d, info) in hcl.iter().enumerate() {
        let c = g.class_of(&info.rep)?;
        out[c] += &f[d].scale(&BigRational::from_integer(BigInt::from(info.size)));
    }
    for (c, info) in gcl.iter().enumerate() {
        let zg = BigRational::new(BigInt::from(g.order() / info.size), BigInt::from(h.order()));
        out[c] = out[c].scale(&zg);
    }
    Ok(out)
}

fn cyclic_table(g: &FiniteGroup, n: u64) -> CharTable {
    // Classes of Z/n are the sorted one-entry words, so class k is [k].
    let mut rows = Vec::with_capacity(n as usize);
    let mut labels = Vec::with_capacity(n as usize);
    for j in 0..n {
        let row = (0..n)
            .map(|k| CycNum::root_of_unity(n, (j * k % n) as i64))
            .collect();
        rows.push(row);
        labels.push(format!("chi{j}"));
    }
    CharTable { group: g.clone(), labels, rows }
}

fn elem_abelian_table(g: &FiniteGroup, k: u32) -> CharTable {
    let classes = g.classes().expect("elementary abelian groups enumerate");
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for m in 0..(1u64 << k) {
        let row = classes
            .iter()
            .map(|c| {
                let dot: i64 = c
                    .rep
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| ((m >> i) & 1) as i64 * b)
                    .sum();
                if dot % 2 == 0 {
                    CycNum::one()
                } else {
                    -CycNum::one()
                }
            })
            .collect();
        rows.push(row);
        labels.push(format!("chi{m}"));
    }
    CharTable { group: g.clone(), labels, rows }
}

fn symmetric_table(g: &FiniteGroup, n: u32) -> CharTable {
    let parts = sym::partitions(n as u64);
    let mut rows = Vec::with_capacity(parts.len());
    let mut labels = Vec::with_capacity(parts.len());
    for lam in &parts {
        let row = parts
            .iter()
            .map(|mu| CycNum::from_integer(sym::mn_character(lam, mu)))
            .collect();
        rows.push(row);
        labels.push(sym::partition_label(lam));
    }
    CharTable { group: g.clone(), labels, rows }
}

/// Tensor table of a product group. Row order is the odometer over factor
/// rows with the last factor moving fastest; `row = sum_i idx_i * prod_{j>i}
/// nrows_j`, which [`mackey`] relies on to read off tensor factors.
fn product_table(g: &FiniteGroup) -> Result<CharTable> {
    let factors = g.product_factors().expect("product construction").to_vec();
    let tables: Vec<CharTable> = factors.iter().map(CharTable::of).collect::<Result<_>>()?;
    let classes = g.classes()?;
    // Factor class indices for every product class.
    let mut fused: Vec<Vec<usize>> = Vec::with_capacity(classes.len());
    for c in classes {
        let mut idx = Vec::with_capacity(factors.len());
        let mut off = 0;
        for f in &factors {
            let l = f.word_len();
            idx.push(f.class_of(&c.rep[off..off + l].to_vec())?);
            off += l;
        }
        fused.push(idx);
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let radices: Vec<usize> = tables.iter().map(|t| t.nrows()).collect();
    let total: usize = radices.iter().product();
    for r in 0..total {
        let mut digits = vec![0usize; radices.len()];
        let mut rem = r;
        for i in (0..radices.len()).rev() {
            digits[i] = rem % radices[i];
            rem /= radices[i];
        }
        let row: Vec<CycNum> = fused
            .iter()
            .map(|idx| {
                let mut v = CycNum::one();
                for (f, (&ri, &ci)) in digits.iter().zip(idx).enumerate() {
                    v = &v * tables[f].value(ri, ci);
                }
                v
            })
            .collect();
        rows.push(row);
        labels.push(
            digits
                .iter()
                .enumerate()
                .map(|(f, &ri)| tables[f].label(ri).to_string())
                .collect::<Vec<_>>()
                .join("*"),
        );
    }
    Ok(CharTable { group: g.clone(), labels, rows })
}

/// Dual basis of an abelian group found by a homomorphism search over a
/// reduced generating set.
fn abelian_duality_table(g: &FiniteGroup) -> Result<CharTable> {
    let els = g.elements()?.to_vec();
    let classes = g.classes()?.to_vec();
    let gens = g.reduced_generators()?;
    if gens.is_empty() {
        return Ok(CharTable {
            group: g.clone(),
            labels: vec!["chi0".into()],
            rows: vec![vec![CycNum::one()]],
        });
    }
    let orders: Vec<u64> = gens.iter().map(|w| g.element_order(w)).collect();
    let index: HashMap<Word, usize> =
        els.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut found: HashMap<Vec<CycNum>, Vec<u64>> = HashMap::new();
    let mut tuple = vec![0u64; gens.len()];
    loop {
        // Try chi(gen_i) = zeta_{orders[i]}^{tuple[i]} and propagate.
        let imgs: Vec<CycNum> = tuple
            .iter()
            .zip(&orders)
            .map(|(&a, &n)| CycNum::root_of_unity(n, a as i64))
            .collect();
        let mut vals: Vec<Option<CycNum>> = vec![None; els.len()];
        let id_idx = index[&g.id()];
        vals[id_idx] = Some(CycNum::one());
        let mut queue = vec![id_idx];
        let mut ok = true;
        while let Some(xi) = queue.pop() {
            let xv = vals[xi].clone().expect("queued values are set");
            for (gi, gen) in gens.iter().enumerate() {
                let y = g.mul(&els[xi], gen);
                let yi = index[&y];
                let yv = &xv * &imgs[gi];
                match &vals[yi] {
                    Some(existing) => {
                        if *existing != yv {
                            ok = false;
                            break;
                        }
                    }
                    None => {
                        vals[yi] = Some(yv);
                        queue.push(yi);
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            let class_vals: Vec<CycNum> = classes
                .iter()
                .map(|c| vals[index[&c.rep]].clone().expect("connected Cayley graph"))
                .collect();
            found.entry(class_vals).or_insert_with(|| tuple.clone());
        }
        // Odometer over the exponent tuples.
        let mut i = 0;
        loop {
            if i == tuple.len() {
                break;
            }
            tuple[i] += 1;
            if tuple[i] < orders[i] {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
        if i == tuple.len() {
            break;
        }
    }
    if found.len() as u64 != g.order() {
        return Err(Error::Chars(format!(
            "duality search found {} characters for order {}",
            found.len(),
            g.order()
        )));
    }
    let mut pairs: Vec<(Vec<u64>, Vec<CycNum>)> =
        found.into_iter().map(|(v, t)| (t, v)).collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let rows: Vec<Vec<CycNum>> = pairs.iter().map(|(_, v)| v.clone()).collect();
    let labels = (0..rows.len()).map(|i| format!("chi{i}")).collect();
    Ok(CharTable { group: g.clone(), labels, rows })
}

/// How the canonical extension of an orbit representative is evaluated.
enum ExtKind {
    /// Stabilizer is the base subgroup itself; no extension involved.
    Whole,
    /// Linear invariant character of a split extension: trivial on the top
    /// generator.
    Linear,
    /// Wreath tensor character: product of base character values on the
    /// cycle products of the shift orbits.
    WreathTensor { digits: Vec<usize> },
}

/// One orbit of the cyclic quotient on the base characters.
pub struct MackeyOrbit {
    /// Row index in the base table of the lexicographically least member.
    pub rep_row: usize,
    /// Orbit member rows, starting at `rep_row`, in twist order.
    pub members: Vec<usize>,
    /// Orbit size; the stabilizer of the character is generated by `top^tt`.
    pub tt: u64,
    /// Number of extensions, `c / tt`.
    pub cc: u64,
    /// First row of this orbit's induced characters in the big table.
    pub first_big_row: usize,
}

/// Cyclic Clifford-Mackey data for a wreath or split cyclic extension
/// `G = N : Z/c`: the base table, the quotient orbits, the canonical
/// extensions, and the assembled table of `G`.
pub struct MackeyData {
    pub big: FiniteGroup,
    pub nsub: FiniteGroup,
    pub n_table: CharTable,
    pub c: u64,
    /// Generator of the quotient: identity word with top coordinate 1.
    pub top: Word,
    pub orbits: Vec<MackeyOrbit>,
    pub table: CharTable,
    kinds: Vec<ExtKind>,
    base_table: Option<CharTable>,
}

fn deembed(w: &Word) -> Word {
    w[..w.len() - 1].to_vec()
}

fn embed(n: &Word) -> Word {
    let mut w = n.clone();
    w.push(0);
    w
}

fn top_exp(w: &Word) -> u64 {
    *w.last().expect("extension words are nonempty") as u64
}

fn eval_extension(
    big: &FiniteGroup,
    nsub: &FiniteGroup,
    n_table: &CharTable,
    base_table: Option<&CharTable>,
    orbit: &MackeyOrbit,
    kind: &ExtKind,
    w: &Word,
) -> Result<CycNum> {
    let b = top_exp(w);
    if b % orbit.tt != 0 {
        return Err(Error::Chars(format!(
            "element with top exponent {b} is outside the stabilizer subgroup"
        )));
    }
    match kind {
        ExtKind::Whole | ExtKind::Linear => {
            let n = deembed(w);
            Ok(n_table.value(orbit.rep_row, nsub.class_of(&n)?).clone())
        }
        ExtKind::WreathTensor { digits } => {
            let (base, d) = big.wreath_base()?;
            let bt = base_table.expect("wreath extensions keep the base table");
            let (parts, a) = big.wreath_parts(w)?;
            let d = d as u64;
            let e = if a == 0 { d } else { a.gcd(&d) };
            let span = d / e;
            let mut val = CycNum::one();
            for r in 0..e {
                // Cycle product h_r h_{r-a} ... matching the group law.
                let mut p = base.id();
                for step in 0..span {
                    let idx = ((r as i64 - step as i64 * a as i64).rem_euclid(d as i64)) as usize;
                    p = base.mul(&p, &parts[idx]);
                }
                val = &val * bt.value(digits[r as usize], base.class_of(&p)?);
            }
            Ok(val)
        }
    }
}

impl MackeyData {
    /// Value of the canonical extension of orbit `oi`'s representative at a
    /// word of the big group whose top exponent lies in the stabilizer.
    pub fn extension_value(&self, oi: usize, w: &Word) -> Result<CycNum> {
        eval_extension(
            &self.big,
            &self.nsub,
            &self.n_table,
            self.base_table.as_ref(),
            &self.orbits[oi],
            &self.kinds[oi],
            w,
        )
    }

    /// Extension twisted by the m-th character of the cyclic stabilizer
    /// quotient.
    pub fn twisted_extension_value(&self, oi: usize, m: u64, w: &Word) -> Result<CycNum> {
        let orbit = &self.orbits[oi];
        let b = top_exp(w);
        let base = self.extension_value(oi, w)?;
        let tw = CycNum::root_of_unity(orbit.cc, (m * (b / orbit.tt)) as i64);
        Ok(&base * &tw)
    }
}

/// Runs the cyclic Clifford-Mackey construction on a wreath or split cyclic
/// extension.
pub fn mackey(big: &FiniteGroup) -> Result<MackeyData> {
    let (nsub, c, base_table) = if let Ok((base, d)) = big.wreath_base() {
        let n = FiniteGroup::product(vec![base.clone(); d as usize]);
        (n, d as u64, Some(CharTable::of(base)?))
    } else if let Some((base, c)) = big.semidirect_parts() {
        (base.clone(), c as u64, None)
    } else {
        return Err(Error::Unsupported(format!(
            "{} is not a cyclic extension of its base",
            big.name()
        )));
    };
    let n_table = CharTable::of(&nsub)?;
    let mut top = big.id();
    if c > 1 {
        let last = top.len() - 1;
        top[last] = 1;
    }
    let top_inv = big.inv(&top);
    // Class map of the quotient twist: class j goes to the class of
    // top * rep_j * top^{-1}.
    let ncl = nsub.classes()?.to_vec();
    let mut cmap = Vec::with_capacity(ncl.len());
    for cinfo in &ncl {
        let conj = big.mul(&big.mul(&top, &embed(&cinfo.rep)), &top_inv);
        cmap.push(nsub.class_of(&deembed(&conj))?);
    }
    let twist = |row: &[CycNum]| -> Vec<CycNum> {
        cmap.iter().map(|&j| row[j].clone()).collect()
    };
    let row_index: HashMap<&[CycNum], usize> =
        n_table.rows().iter().enumerate().map(|(i, r)| (r.as_slice(), i)).collect();
    let nrows = n_table.nrows();
    let mut visited = vec![false; nrows];
    let mut orbits = Vec::new();
    let mut kinds = Vec::new();
    let mut rows: Vec<Vec<CycNum>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let gcl = big.classes()?.to_vec();
    // Degree marker for the linearity test.
    let n_idc = nsub.class_of(&nsub.id())?;
    let wreath_digits = |row: usize| -> Result<Vec<usize>> {
        let (base, d) = big.wreath_base()?;
        let b = CharTable::of(base)?.nrows();
        let d = d as usize;
        let mut digits = vec![0usize; d];
        let mut rem = row;
        for i in (0..d).rev() {
            digits[i] = rem % b;
            rem /= b;
        }
        Ok(digits)
    };
    for i0 in 0..nrows {
        if visited[i0] {
            continue;
        }
        let mut members = vec![i0];
        visited[i0] = true;
        let mut cur = twist(n_table.row(i0));
        while cur.as_slice() != n_table.row(i0) {
            let idx = *row_index
                .get(cur.as_slice())
                .ok_or_else(|| Error::Chars("twist left the base table".into()))?;
            if !visited[idx] {
                visited[idx] = true;
                members.push(idx);
            }
            cur = twist(&cur);
        }
        let tt = members.len() as u64;
        if c % tt != 0 {
            return Err(Error::Chars(format!("orbit size {tt} does not divide {c}")));
        }
        let cc = c / tt;
        let kind = if tt == c {
            ExtKind::Whole
        } else if big.wreath_base().is_ok() {
            let digits = wreath_digits(i0)?;
            let d = digits.len();
            for j in 0..d {
                if digits[j] != digits[(j + tt as usize) % d] {
                    return Err(Error::Chars(
                        "invariant wreath character without a periodic pattern".into(),
                    ));
                }
            }
            ExtKind::WreathTensor { digits }
        } else if n_table.value(i0, n_idc) == &CycNum::one() {
            ExtKind::Linear
        } else {
            return Err(Error::Unsupported(
                "nonlinear invariant character of a split extension base".into(),
            ));
        };
        let orbit = MackeyOrbit { rep_row: i0, members, tt, cc, first_big_row: rows.len() };
        // Induce the cc twisted extensions from the stabilizer subgroup
        // N<top^tt>, with coset representatives top^i for i < tt.
        let mut new_rows: Vec<Vec<CycNum>> = vec![Vec::with_capacity(gcl.len()); cc as usize];
        for cinfo in &gcl {
            let mut vals = vec![CycNum::zero(); cc as usize];
            let mut conj = cinfo.rep.clone();
            let b = top_exp(&conj);
            for _ in 0..tt {
                if b % tt == 0 {
                    let ev =
                        eval_extension(big, &nsub, &n_table, base_table.as_ref(), &orbit, &kind, &conj)?;
                    for (m, v) in vals.iter_mut().enumerate() {
                        let tw = CycNum::root_of_unity(cc, (m as u64 * (b / tt)) as i64);
                        *v += &(&ev * &tw);
                    }
                }
                conj = big.mul(&big.mul(&top_inv, &conj), &top);
            }
            for (m, v) in vals.into_iter().enumerate() {
                new_rows[m].push(v);
            }
        }
        let rep_label = n_table.label(orbit.rep_row).to_string();
        for (m, r) in new_rows.into_iter().enumerate() {
            rows.push(r);
            if cc == 1 {
                labels.push(format!("ind({rep_label})"));
            } else {
                labels.push(format!("ext({rep_label})#{m}"));
            }
        }
        orbits.push(orbit);
        kinds.push(kind);
    }
    let table = CharTable { group: big.clone(), labels, rows };
    let data = MackeyData {
        big: big.clone(),
        nsub,
        n_table,
        c,
        top,
        orbits,
        table,
        kinds,
        base_table,
    };
    verify_extensions(&data)?;
    Ok(data)
}

/// Exhaustive certification of the canonical extensions on enumerable
/// groups: each extension restricts to its orbit representative, is
/// constant on conjugacy classes of the stabilizer subgroup, and has norm
/// one there. Skipped above the enumeration threshold.
fn verify_extensions(data: &MackeyData) -> Result<()> {
    if data.big.order() > 5_000 {
        return Ok(());
    }
    let els = data.big.elements()?.to_vec();
    for (oi, orbit) in data.orbits.iter().enumerate() {
        let k_els: Vec<&Word> = els.iter().filter(|w| top_exp(w) % orbit.tt == 0).collect();
        let k_order = k_els.len() as u64;
        let mut norm = CycNum::zero();
        for w in &k_els {
            let v = data.extension_value(oi, w)?;
            norm += &(&v * &v.conjugate());
        }
        if norm != CycNum::from_integer(k_order as i64) {
            return Err(Error::Chars(format!("orbit {oi}: extension norm is off")));
        }
        // Conjugation invariance within the stabilizer subgroup.
        for w in &k_els {
            let vw = data.extension_value(oi, w)?;
            for k in k_els.iter().take(24) {
                let c = data.big.conj(k, w);
                if data.extension_value(oi, &c)? != vw {
                    return Err(Error::Chars(format!(
                        "orbit {oi}: extension is not a class function"
                    )));
                }
            }
        }
        // Restriction to the base recovers the representative.
        for cinfo in data.nsub.classes()? {
            let v = data.extension_value(oi, &embed(&cinfo.rep))?;
            if &v != data.n_table.value(orbit.rep_row, data.nsub.class_of(&cinfo.rep)?) {
                return Err(Error::Chars(format!(
                    "orbit {oi}: extension does not restrict to its representative"
                )));
            }
        }
    }
    Ok(())
}

/// Character table of the centralizer `z` of `x` inside `ambient`. Abelian
/// centralizers go through duality; centralizers in symmetric groups are
/// transported from a structural model (direct factors per cycle length:
/// a symmetric group on the fixed points, a cyclic group for a unique
/// cycle, a wreath product for a repeated pair).
pub fn centralizer_table(ambient: &FiniteGroup, x: &Word, z: &FiniteGroup) -> Result<CharTable> {
    if z.is_abelian() {
        return CharTable::of(z);
    }
    if z.order() == ambient.order() {
        // Central x: the centralizer is the whole group, so transport the
        // ambient table onto z's own class ordering.
        let base = CharTable::of(ambient)?;
        let zcl = z.classes()?;
        let cols: Vec<usize> = zcl
            .iter()
            .map(|ci| ambient.class_of(&ci.rep))
            .collect::<Result<_>>()?;
        let rows = base
            .rows()
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let table = CharTable { group: z.clone(), labels: base.labels.clone(), rows };
        table.verify_complete()?;
        return Ok(table);
    }
    let Some(n) = ambient.symmetric_degree() else {
        return Err(Error::Unsupported(format!(
            "no centralizer table model inside {}",
            ambient.name()
        )));
    };
    let _ = n;
    // Cycle families of x by length.
    let cycles = cycles_of(x);
    let mut by_len: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    for cyc in cycles {
        match by_len.iter_mut().find(|(l, _)| *l == cyc.len()) {
            Some((_, v)) => v.push(cyc),
            None => by_len.push((cyc.len(), vec![cyc])),
        }
    }
    by_len.sort_by(|a, b| b.0.cmp(&a.0));
    enum Fam {
        Fixed(Vec<usize>),
        Single(Vec<usize>),
        Pair(Vec<usize>, Vec<usize>),
    }
    let mut fams = Vec::new();
    let mut factors = Vec::new();
    for (len, group_cycles) in by_len {
        if len == 1 {
            let points: Vec<usize> = group_cycles.iter().map(|c| c[0]).collect();
            factors.push(FiniteGroup::symmetric(points.len() as u32));
            fams.push(Fam::Fixed(points));
        } else if group_cycles.len() == 1 {
            factors.push(FiniteGroup::cyclic(len as u64));
            fams.push(Fam::Single(group_cycles.into_iter().next().expect("one cycle")));
        } else if group_cycles.len() == 2 {
            factors.push(FiniteGroup::wreath_cyclic(FiniteGroup::cyclic(len as u64), 2));
            let mut it = group_cycles.into_iter();
            fams.push(Fam::Pair(it.next().expect("first"), it.next().expect("second")));
        } else {
            return Err(Error::Unsupported(format!(
                "centralizer model with {} cycles of length {len} is not implemented",
                group_cycles.len()
            )));
        }
    }
    let model = FiniteGroup::product(factors);
    if model.order() != z.order() {
        return Err(Error::Chars(format!(
            "centralizer model order {} does not match subgroup order {}",
            model.order(),
            z.order()
        )));
    }
    // ambient word -> model word.
    let to_model = |w: &Word| -> Word {
        let mut out = Vec::with_capacity(model.word_len());
        for fam in &fams {
            match fam {
                Fam::Fixed(points) => {
                    for &p in points {
                        let img = w[p] as usize;
                        let pos = points.iter().position(|&q| q == img).expect("stable set");
                        out.push(pos as i64);
                    }
                }
                Fam::Single(cyc) => {
                    let img = w[cyc[0]] as usize;
                    let m = cyc.iter().position(|&q| q == img).expect("stable cycle");
                    out.push(m as i64);
                }
                Fam::Pair(c0, c1) => {
                    let locate = |p: usize| -> (usize, usize) {
                        if let Some(m) = c0.iter().position(|&q| q == p) {
                            (0, m)
                        } else {
                            (1, c1.iter().position(|&q| q == p).expect("stable pair"))
                        }
                    };
                    let (j0, m0) = locate(w[c0[0]] as usize);
                    let (j1, m1) = locate(w[c1[0]] as usize);
                    debug_assert_ne!(j0, j1);
                    let mut ks = [0i64; 2];
                    ks[j0] = m0 as i64;
                    ks[j1] = m1 as i64;
                    out.push(ks[0]);
                    out.push(ks[1]);
                    out.push(j0 as i64);
                }
            }
        }
        out
    };
    // model word -> ambient word (only needed for the roundtrip check).
    let from_model = |mw: &Word| -> Word {
        let mut img: Vec<i64> = (0..ambient.word_len() as i64).collect();
        let mut off = 0usize;
        for fam in &fams {
            match fam {
                Fam::Fixed(points) => {
                    for (j, &p) in points.iter().enumerate() {
                        img[p] = points[mw[off + j] as usize] as i64;
                    }
                    off += points.len();
                }
                Fam::Single(cyc) => {
                    let k = mw[off] as usize;
                    let i = cyc.len();
                    for (m, &p) in cyc.iter().enumerate() {
                        img[p] = cyc[(m + k) % i] as i64;
                    }
                    off += 1;
                }
                Fam::Pair(c0, c1) => {
                    let ks = [mw[off] as usize, mw[off + 1] as usize];
                    let s = mw[off + 2] as usize;
                    let i = c0.len();
                    let blocks = [c0, c1];
                    for (j, blk) in blocks.iter().enumerate() {
                        let tgt = blocks[(j + s) % 2];
                        let k = ks[(j + s) % 2];
                        for (m, &p) in blk.iter().enumerate() {
                            img[p] = tgt[(m + k) % i] as i64;
                        }
                    }
                    off += 3;
                }
            }
        }
        img
    };
    let mtab = CharTable::of(&model)?;
    let zcl = z.classes()?;
    let mut rows = Vec::with_capacity(mtab.nrows());
    for i in 0..mtab.nrows() {
        let mut row = Vec::with_capacity(zcl.len());
        for cinfo in zcl {
            let mw = to_model(&cinfo.rep);
            debug_assert_eq!(from_model(&mw), cinfo.rep, "model bijection roundtrip");
            row.push(mtab.value(i, model.class_of(&mw)?).clone());
        }
        rows.push(row);
    }
    let table = CharTable { group: z.clone(), labels: mtab.labels().to_vec(), rows };
    table.verify_complete()?;
    Ok(table)
}

fn cycles_of(w: &Word) -> Vec<Vec<usize>> {
    let n = w.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut p = w[start] as usize;
        while p != start {
            seen[p] = true;
            cyc.push(p);
            p = w[p] as usize;
        }
        cycles.push(cyc);
    }
    cycles.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    cycles
}
