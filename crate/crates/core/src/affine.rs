//! Affine Dynkin diagrams with their rotation groups Omega, and the
//! classification of maximal compact classes by stabilized orbit pairs:
//! Omega-orbits of pairs (A, O) where A is a subgroup of Omega and O is an
//! A-orbit of nodes whose setwise stabilizer in Omega is exactly A. Each
//! class carries the type of the complementary subdiagram together with the
//! induced A-action, and the list of inner twists it serves.

use serde::Serialize;

use crate::{Error, Result};

/// Families of affine diagrams. The letter determines the shape; exceptional
/// letters carry a fixed rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LieType {
    A,
    B,
    C,
    D,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl LieType {
    pub fn parse(s: &str) -> Result<LieType> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(LieType::A),
            "B" => Ok(LieType::B),
            "C" => Ok(LieType::C),
            "D" => Ok(LieType::D),
            "E6" => Ok(LieType::E6),
            "E7" => Ok(LieType::E7),
            "E8" => Ok(LieType::E8),
            "F4" => Ok(LieType::F4),
            "G2" => Ok(LieType::G2),
            other => Err(Error::InvalidInput(format!("unknown diagram type {other}"))),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            LieType::A => "A",
            LieType::B => "B",
            LieType::C => "C",
            LieType::D => "D",
            LieType::E6 => "E6",
            LieType::E7 => "E7",
            LieType::E8 => "E8",
            LieType::F4 => "F4",
            LieType::G2 => "G2",
        }
    }

    /// Rank forced by the letter, when there is one.
    pub fn fixed_rank(&self) -> Option<u64> {
        match self {
            LieType::E6 => Some(6),
            LieType::E7 => Some(7),
            LieType::E8 => Some(8),
            LieType::F4 => Some(4),
            LieType::G2 => Some(2),
            _ => None,
        }
    }
}

/// Isogeny class of the ambient split group: the adjoint form carries the
/// full rotation group, the simply connected form a trivial one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Isogeny {
    Adjoint,
    SimplyConnected,
}

impl Isogeny {
    pub fn parse(s: &str) -> Result<Isogeny> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adjoint" | "adj" => Ok(Isogeny::Adjoint),
            "sc" | "simplyconnected" | "simply-connected" => Ok(Isogeny::SimplyConnected),
            other => Err(Error::InvalidInput(format!("unknown isogeny {other}"))),
        }
    }
}

const MAX_RANK: u64 = 24;

/// An affine diagram: nodes with marks and root lengths, bonded edges, and
/// the rotation group as explicit node permutations.
#[derive(Clone, Debug)]
pub struct AffineDiagramData {
    lie_type: LieType,
    rank: u64,
    isogeny: Isogeny,
    marks: Vec<u64>,
    short: Vec<bool>,
    /// Undirected edges (u < v, bond multiplicity). Multiplicity 4 encodes
    /// the rank-one affine double link.
    edges: Vec<(usize, usize, u8)>,
    omega: Vec<Vec<usize>>,
    omega_names: Vec<String>,
}

impl AffineDiagramData {
    pub fn new(lie_type: LieType, rank: u64, isogeny: Isogeny) -> Result<AffineDiagramData> {
        if rank > MAX_RANK {
            return Err(Error::TooLarge(format!("rank {rank} exceeds the cap {MAX_RANK}")));
        }
        if let Some(fixed) = lie_type.fixed_rank() {
            if rank != fixed {
                return Err(Error::InvalidInput(format!(
                    "type {} has rank {fixed}, got {rank}",
                    lie_type.symbol()
                )));
            }
        }
        let min = match lie_type {
            LieType::A => 1,
            LieType::B | LieType::C => 2,
            LieType::D => 4,
            _ => rank.max(1),
        };
        if rank < min {
            return Err(Error::InvalidInput(format!(
                "type {} needs rank >= {min}, got {rank}",
                lie_type.symbol()
            )));
        }

        let r = rank as usize;
        let mut marks: Vec<u64>;
        let mut short: Vec<bool>;
        let mut edges: Vec<(usize, usize, u8)> = Vec::new();
        let mut gens: Vec<(Vec<usize>, String)> = Vec::new();

        match lie_type {
            LieType::A => {
                let n = r + 1;
                marks = vec![1; n];
                short = vec![false; n];
                if n == 2 {
                    edges.push((0, 1, 4));
                } else {
                    for i in 0..n - 1 {
                        edges.push((i, i + 1, 1));
                    }
                    edges.push((0, n - 1, 1));
                }
                let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
                gens.push((rot, "r^1".to_string()));
            }
            LieType::B if r == 2 => {
                marks = vec![1, 2, 1];
                short = vec![false, true, false];
                edges.push((0, 1, 2));
                edges.push((1, 2, 2));
                gens.push((vec![2, 1, 0], "s".to_string()));
            }
            LieType::B => {
                let n = r + 1;
                marks = vec![2; n];
                marks[0] = 1;
                marks[1] = 1;
                short = vec![false; n];
                short[r] = true;
                edges.push((0, 2, 1));
                edges.push((1, 2, 1));
                for i in 2..r - 1 {
                    edges.push((i, i + 1, 1));
                }
                edges.push((r - 1, r, 2));
                let mut swap: Vec<usize> = (0..n).collect();
                swap[0] = 1;
                swap[1] = 0;
                gens.push((swap, "s".to_string()));
            }
            LieType::C => {
                let n = r + 1;
                marks = vec![2; n];
                marks[0] = 1;
                marks[r] = 1;
                short = vec![true; n];
                short[0] = false;
                short[r] = false;
                edges.push((0, 1, 2));
                for i in 1..r - 1 {
                    edges.push((i, i + 1, 1));
                }
                edges.push((r - 1, r, 2));
                let rev: Vec<usize> = (0..n).map(|i| r - i).collect();
                gens.push((rev, "s".to_string()));
            }
            LieType::D => {
                let n = r + 1;
                marks = vec![2; n];
                for i in [0, 1, r - 1, r] {
                    marks[i] = 1;
                }
                short = vec![false; n];
                edges.push((0, 2, 1));
                edges.push((1, 2, 1));
                for i in 2..r - 2 {
                    edges.push((i, i + 1, 1));
                }
                edges.push((r - 2, r - 1, 1));
                edges.push((r - 2, r, 1));
                // Horizontal flip of the chain, exchanging the two forks.
                let mut h: Vec<usize> = (0..n).collect();
                h[0] = r - 1;
                h[1] = r;
                h[r - 1] = 0;
                h[r] = 1;
                for (j, hj) in h.iter_mut().enumerate().take(r - 1).skip(2) {
                    *hj = r - j;
                }
                if r % 2 == 0 {
                    let mut v: Vec<usize> = (0..n).collect();
                    v.swap(0, 1);
                    v.swap(r - 1, r);
                    gens.push((h, "dh".to_string()));
                    gens.push((v, "dv".to_string()));
                } else {
                    // Odd rank: the flip composed with one fork swap has
                    // order four and generates everything.
                    let mut d: Vec<usize> = (0..n).collect();
                    d[0] = r;
                    d[r] = 1;
                    d[1] = r - 1;
                    d[r - 1] = 0;
                    for (j, dj) in d.iter_mut().enumerate().take(r - 1).skip(2) {
                        *dj = r - j;
                    }
                    gens.push((d, "d^1".to_string()));
                }
            }
            LieType::E6 => {
                marks = vec![1, 2, 1, 2, 1, 2, 3];
                short = vec![false; 7];
                edges.extend([(0, 1, 1), (1, 6, 1), (2, 3, 1), (3, 6, 1), (4, 5, 1), (5, 6, 1)]);
                gens.push((vec![2, 3, 4, 5, 0, 1, 6], "r^1".to_string()));
            }
            LieType::E7 => {
                marks = vec![1, 2, 3, 4, 3, 2, 1, 2];
                short = vec![false; 8];
                edges.extend([
                    (0, 1, 1),
                    (1, 2, 1),
                    (2, 3, 1),
                    (3, 4, 1),
                    (4, 5, 1),
                    (5, 6, 1),
                    (3, 7, 1),
                ]);
                gens.push((vec![6, 5, 4, 3, 2, 1, 0, 7], "s".to_string()));
            }
            LieType::E8 => {
                marks = vec![1, 2, 3, 4, 5, 6, 4, 2, 3];
                short = vec![false; 9];
                edges.extend([
                    (0, 1, 1),
                    (1, 2, 1),
                    (2, 3, 1),
                    (3, 4, 1),
                    (4, 5, 1),
                    (5, 6, 1),
                    (6, 7, 1),
                    (5, 8, 1),
                ]);
            }
            LieType::F4 => {
                marks = vec![1, 2, 3, 4, 2];
                short = vec![false, false, false, true, true];
                edges.extend([(0, 1, 1), (1, 2, 1), (2, 3, 2), (3, 4, 1)]);
            }
            LieType::G2 => {
                marks = vec![1, 2, 3];
                short = vec![false, false, true];
                edges.extend([(0, 1, 1), (1, 2, 3)]);
            }
        }

        let n = marks.len();
        let mut omega: Vec<Vec<usize>> = vec![(0..n).collect()];
        let mut omega_names: Vec<String> = vec!["1".to_string()];
        if isogeny == Isogeny::Adjoint {
            // Close the generator set under composition, naming elements by
            // the word that first reaches them.
            let mut frontier = vec![0usize];
            while let Some(idx) = frontier.pop() {
                for (g, gname) in &gens {
                    let composed: Vec<usize> = omega[idx].iter().map(|&v| g[v]).collect();
                    if !omega.contains(&composed) {
                        let name = if omega_names[idx] == "1" {
                            gname.clone()
                        } else if let Some(pow) = power_name(&omega_names[idx], gname) {
                            pow
                        } else {
                            format!("{}{}", omega_names[idx], gname)
                        };
                        omega.push(composed);
                        omega_names.push(name);
                        frontier.push(omega.len() - 1);
                    }
                }
            }
        }

        let data = AffineDiagramData {
            lie_type,
            rank,
            isogeny,
            marks,
            short,
            edges,
            omega,
            omega_names,
        };
        data.validate()?;
        Ok(data)
    }

    /// Convenience form used by the command line: a type symbol, an optional
    /// rank (required for the classical letters), and an isogeny.
    pub fn parse(type_str: &str, rank: Option<u64>, isogeny: Isogeny) -> Result<AffineDiagramData> {
        let lt = LieType::parse(type_str)?;
        let rank = match (rank, lt.fixed_rank()) {
            (Some(r), _) => r,
            (None, Some(f)) => f,
            (None, None) => {
                return Err(Error::InvalidInput(format!(
                    "type {} needs an explicit rank",
                    lt.symbol()
                )))
            }
        };
        AffineDiagramData::new(lt, rank, isogeny)
    }

    pub fn lie_type(&self) -> LieType {
        self.lie_type
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn isogeny(&self) -> Isogeny {
        self.isogeny
    }

    pub fn node_count(&self) -> usize {
        self.marks.len()
    }

    pub fn marks(&self) -> &[u64] {
        &self.marks
    }

    pub fn is_short(&self, node: usize) -> bool {
        self.short[node]
    }

    pub fn edges(&self) -> &[(usize, usize, u8)] {
        &self.edges
    }

    pub fn omega(&self) -> &[Vec<usize>] {
        &self.omega
    }

    pub fn omega_names(&self) -> &[String] {
        &self.omega_names
    }

    pub fn omega_order(&self) -> usize {
        self.omega.len()
    }

    /// Index of the composite permutation `omega[a] . omega[b]` (apply b,
    /// then a).
    pub fn omega_mul(&self, a: usize, b: usize) -> usize {
        let n = self.node_count();
        let composed: Vec<usize> = (0..n).map(|v| self.omega[a][self.omega[b][v]]).collect();
        self.omega
            .iter()
            .position(|p| *p == composed)
            .expect("rotation group is closed")
    }

    pub fn omega_inv(&self, a: usize) -> usize {
        (0..self.omega_order())
            .find(|&b| {
                let ab = self.omega_mul(a, b);
                self.omega[ab].iter().enumerate().all(|(i, &v)| v == i)
            })
            .expect("rotation group has inverses")
    }

    pub fn ambient_label(&self) -> String {
        let iso = match self.isogeny {
            Isogeny::Adjoint => "",
            Isogeny::SimplyConnected => " sc",
        };
        format!("{}({}){}", self.lie_type.symbol(), self.rank, iso)
    }

    /// Negated Cartan pairing coefficient of neighbor `j` against node `i`.
    fn cartan_coeff(&self, i: usize, j: usize, mult: u8) -> u64 {
        if mult == 4 {
            return 2;
        }
        if self.short[i] && !self.short[j] {
            mult as u64
        } else {
            1
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if self.short.len() != n {
            return Err(Error::Data("length flags out of step with marks".into()));
        }
        for &(u, v, mult) in &self.edges {
            if u >= v || v >= n {
                return Err(Error::Data(format!("bad edge ({u},{v})")));
            }
            if !matches!(mult, 1 | 2 | 3 | 4) {
                return Err(Error::Data(format!("bad bond multiplicity {mult}")));
            }
        }
        // Null root identity: twice each mark equals the weighted sum of the
        // neighbor marks.
        for i in 0..n {
            let mut acc = 0u64;
            for &(u, v, mult) in &self.edges {
                if u == i {
                    acc += self.cartan_coeff(i, v, mult) * self.marks[v];
                } else if v == i {
                    acc += self.cartan_coeff(i, u, mult) * self.marks[u];
                }
            }
            if acc != 2 * self.marks[i] {
                return Err(Error::Data(format!("mark identity fails at node {i}")));
            }
        }
        // Rotation group: permutations preserving marks, lengths and bonds,
        // closed under composition, of the expected size.
        let expected = match (self.isogeny, self.lie_type) {
            (Isogeny::SimplyConnected, _) => 1,
            (_, LieType::A) => n,
            (_, LieType::B | LieType::C | LieType::E7) => 2,
            (_, LieType::D) => 4,
            (_, LieType::E6) => 3,
            (_, LieType::E8 | LieType::F4 | LieType::G2) => 1,
        };
        if self.omega.len() != expected {
            return Err(Error::Data(format!(
                "rotation group has order {}, expected {expected}",
                self.omega.len()
            )));
        }
        let edge_set: std::collections::BTreeSet<(usize, usize, u8)> =
            self.edges.iter().copied().collect();
        for p in &self.omega {
            let mut seen = vec![false; n];
            for &img in p {
                if img >= n || seen[img] {
                    return Err(Error::Data("rotation is not a permutation".into()));
                }
                seen[img] = true;
            }
            for i in 0..n {
                if self.marks[p[i]] != self.marks[i] || self.short[p[i]] != self.short[i] {
                    return Err(Error::Data("rotation breaks marks or lengths".into()));
                }
            }
            for &(u, v, mult) in &self.edges {
                let (a, b) = (p[u].min(p[v]), p[u].max(p[v]));
                if !edge_set.contains(&(a, b, mult)) {
                    return Err(Error::Data("rotation breaks adjacency".into()));
                }
            }
        }
        for a in 0..self.omega.len() {
            for b in 0..self.omega.len() {
                let ab = self.omega_mul(a, b);
                let ba = self.omega_mul(b, a);
                if ab != ba {
                    return Err(Error::Data("rotation group is not abelian".into()));
                }
            }
        }
        Ok(())
    }
}

fn power_name(prefix: &str, gen: &str) -> Option<String> {
    // "r^1" composed with "r^1" becomes "r^2", and so on.
    let (base, exp) = prefix.split_once('^')?;
    if !gen.starts_with(base) {
        return None;
    }
    let e: u64 = exp.parse().ok()?;
    Some(format!("{base}^{}", e + 1))
}

/// One orbit of complementary-diagram components under A: the component
/// type, how many copies A cycles through, and the order of the induced
/// automorphism group on one copy.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ComponentOrbit {
    pub label: String,
    pub copies: usize,
    pub auto_order: usize,
}

/// A maximal compact class: the subgroup A, its canonical node orbit, the
/// complementary diagram with its A-action, and the inner twists served.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxCompactClass {
    pub a_order: usize,
    pub a_elems: Vec<String>,
    #[serde(skip)]
    pub a_idx: Vec<usize>,
    pub orbit: Vec<usize>,
    pub components: Vec<ComponentOrbit>,
    pub quotient: String,
    pub twists: Vec<String>,
}

impl MaxCompactClass {
    pub fn serves_twist(&self, name: &str) -> bool {
        self.twists.iter().any(|t| t == name)
    }
}

/// All classes serving the given inner twist.
pub fn classes_for_twist<'a>(
    classes: &'a [MaxCompactClass],
    twist: &str,
) -> Vec<&'a MaxCompactClass> {
    classes.iter().filter(|c| c.serves_twist(twist)).collect()
}

/// Enumerate the maximal compact classes of a diagram.
pub fn smax(diag: &AffineDiagramData) -> Result<Vec<MaxCompactClass>> {
    let n = diag.node_count();
    let m = diag.omega_order();
    if m > 16 {
        return Err(Error::TooLarge(format!("rotation group of order {m} is too large")));
    }

    // Subgroups of the abelian rotation group, by subset closure.
    let mut subgroups: Vec<Vec<usize>> = Vec::new();
    for mask in 0u32..(1 << m) {
        if mask & 1 == 0 {
            continue;
        }
        let elems: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let closed = elems.iter().all(|&a| {
            elems.iter().all(|&b| elems.contains(&diag.omega_mul(a, b)))
                && elems.contains(&diag.omega_inv(a))
        });
        if closed {
            subgroups.push(elems);
        }
    }

    let mut seen: std::collections::BTreeSet<(Vec<usize>, Vec<usize>)> =
        std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for sub in &subgroups {
        // A-orbits on nodes.
        let mut orbit_of: Vec<Option<Vec<usize>>> = vec![None; n];
        for v in 0..n {
            if orbit_of[v].is_some() {
                continue;
            }
            let mut orb: Vec<usize> = sub.iter().map(|&a| diag.omega()[a][v]).collect();
            orb.sort_unstable();
            orb.dedup();
            for &w in &orb {
                orbit_of[w] = Some(orb.clone());
            }
        }
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            let orb = orbit_of[v].clone().expect("orbit computed");
            if orb[0] == v {
                orbits.push(orb);
            }
        }
        for orb in orbits {
            // Defining condition: the setwise stabilizer equals A.
            let stab: Vec<usize> = (0..m)
                .filter(|&g| {
                    let mut img: Vec<usize> = orb.iter().map(|&v| diag.omega()[g][v]).collect();
                    img.sort_unstable();
                    img == orb
                })
                .collect();
            if &stab != sub {
                continue;
            }
            // Canonical representative over the full rotation group.
            let mut canon = orb.clone();
            for g in 0..m {
                let mut img: Vec<usize> = orb.iter().map(|&v| diag.omega()[g][v]).collect();
                img.sort_unstable();
                if img < canon {
                    canon = img;
                }
            }
            if !seen.insert((sub.clone(), canon.clone())) {
                continue;
            }
            out.push(build_class(diag, sub, &canon)?);
        }
    }
    out.sort_by(|x, y| {
        (x.a_order, &x.a_idx, &x.orbit).cmp(&(y.a_order, &y.a_idx, &y.orbit))
    });
    Ok(out)
}

fn build_class(
    diag: &AffineDiagramData,
    sub: &[usize],
    orbit: &[usize],
) -> Result<MaxCompactClass> {
    let n = diag.node_count();
    let kept: Vec<usize> = (0..n).filter(|v| !orbit.contains(v)).collect();

    // Connected components of the kept subdiagram.
    let mut comp_of: Vec<Option<usize>> = vec![None; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for &start in &kept {
        if comp_of[start].is_some() {
            continue;
        }
        let id = components.len();
        let mut stack = vec![start];
        let mut comp = Vec::new();
        comp_of[start] = Some(id);
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &(a, b, _) in diag.edges() {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if kept.contains(&other) && comp_of[other].is_none() {
                    comp_of[other] = Some(id);
                    stack.push(other);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }

    // Group components into A-orbits and read off the action.
    let mut grouped: Vec<ComponentOrbit> = Vec::new();
    let mut used = vec![false; components.len()];
    for ci in 0..components.len() {
        if used[ci] {
            continue;
        }
        let mut orbit_ids = vec![ci];
        used[ci] = true;
        for &a in sub {
            let image = diag.omega()[a][components[ci][0]];
            let id = comp_of[image].ok_or_else(|| Error::Data("component image lost".into()))?;
            let mut img: Vec<usize> = components[ci].iter().map(|&v| diag.omega()[a][v]).collect();
            img.sort_unstable();
            if img != components[id] {
                return Err(Error::Data("rotation does not permute components".into()));
            }
            if !used[id] {
                used[id] = true;
                orbit_ids.push(id);
            }
        }
        let label = classify_component(diag, &components[ci])?;
        for &id in &orbit_ids {
            let other = classify_component(diag, &components[id])?;
            if other != label {
                return Err(Error::Data("component orbit mixes types".into()));
            }
        }
        // Automorphisms induced on one copy by its stabilizer inside A.
        let base = &components[ci];
        let mut restrictions: std::collections::BTreeSet<Vec<usize>> =
            std::collections::BTreeSet::new();
        for &a in sub {
            let mut img: Vec<usize> = base.iter().map(|&v| diag.omega()[a][v]).collect();
            img.sort_unstable();
            if img == *base {
                restrictions.insert(base.iter().map(|&v| diag.omega()[a][v]).collect());
            }
        }
        grouped.push(ComponentOrbit {
            label,
            copies: orbit_ids.len(),
            auto_order: restrictions.len(),
        });
    }
    grouped.sort();

    let mut expanded: Vec<String> = grouped
        .iter()
        .flat_map(|c| std::iter::repeat(c.label.clone()).take(c.copies))
        .collect();
    expanded.sort();
    let quotient = if expanded.is_empty() { "-".to_string() } else { expanded.join("x") };

    let names: Vec<String> = sub.iter().map(|&a| diag.omega_names()[a].clone()).collect();
    Ok(MaxCompactClass {
        a_order: sub.len(),
        a_elems: names.clone(),
        a_idx: sub.to_vec(),
        orbit: orbit.to_vec(),
        components: grouped,
        quotient,
        twists: names,
    })
}

/// Finite type of one connected subdiagram, in the naming scheme of the
/// ambient family: lone long nodes of a C-diagram stay C1, a two-node double
/// bond is C2 or B2 by ambient family, and chains with an end double bond
/// split into B or C by the length of the end node.
fn classify_component(diag: &AffineDiagramData, nodes: &[usize]) -> Result<String> {
    let k = nodes.len();
    if k == 0 {
        return Err(Error::InvalidInput("empty component".into()));
    }
    if k == 1 {
        let v = nodes[0];
        if diag.lie_type() == LieType::C && !diag.is_short(v) {
            return Ok("C1".to_string());
        }
        return Ok("A1".to_string());
    }
    let inside: Vec<(usize, usize, u8)> = diag
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v, _)| nodes.contains(&u) && nodes.contains(&v))
        .collect();
    if inside.len() != k - 1 {
        return Err(Error::Unsupported("component is not a tree".into()));
    }
    let mut degree = std::collections::BTreeMap::new();
    for &(u, v, _) in &inside {
        *degree.entry(u).or_insert(0usize) += 1;
        *degree.entry(v).or_insert(0usize) += 1;
    }
    let deg = |v: usize| degree.get(&v).copied().unwrap_or(0);

    if k == 2 {
        return Ok(match inside[0].2 {
            1 => "A2".to_string(),
            2 => {
                if diag.lie_type() == LieType::C {
                    "C2".to_string()
                } else {
                    "B2".to_string()
                }
            }
            3 => "G2".to_string(),
            _ => return Err(Error::Unsupported("unexpected bond".into())),
        });
    }

    let doubles: Vec<(usize, usize, u8)> =
        inside.iter().copied().filter(|&(_, _, m)| m >= 2).collect();
    match doubles.len() {
        0 => {
            let max_deg = nodes.iter().map(|&v| deg(v)).max().unwrap_or(0);
            if max_deg <= 2 {
                return Ok(format!("A{k}"));
            }
            if max_deg > 3 || nodes.iter().filter(|&&v| deg(v) == 3).count() != 1 {
                return Err(Error::Unsupported("unrecognized branching".into()));
            }
            let center = *nodes.iter().find(|&&v| deg(v) == 3).expect("branch node");
            let mut arms: Vec<usize> = Vec::new();
            for &(u, v, _) in &inside {
                let start = if u == center {
                    v
                } else if v == center {
                    u
                } else {
                    continue;
                };
                // Walk outward from the branch node.
                let mut len = 1;
                let mut prev = center;
                let mut cur = start;
                loop {
                    let next = inside.iter().find_map(|&(a, b, _)| {
                        if a == cur && b != prev {
                            Some(b)
                        } else if b == cur && a != prev {
                            Some(a)
                        } else {
                            None
                        }
                    });
                    match next {
                        Some(w) => {
                            prev = cur;
                            cur = w;
                            len += 1;
                        }
                        None => break,
                    }
                }
                arms.push(len);
            }
            arms.sort_unstable();
            match arms.as_slice() {
                [1, 1, _] => Ok(format!("D{k}")),
                [1, 2, 2] => Ok("E6".to_string()),
                [1, 2, 3] => Ok("E7".to_string()),
                [1, 2, 4] => Ok("E8".to_string()),
                _ => Err(Error::Unsupported("unrecognized branched type".into())),
            }
        }
        1 => {
            let (u, v, mult) = doubles[0];
            if mult != 2 {
                return Err(Error::Unsupported("triple bond in a large component".into()));
            }
            if nodes.iter().map(|&w| deg(w)).max().unwrap_or(0) > 2 {
                return Err(Error::Unsupported("double bond with branching".into()));
            }
            let end = if deg(u) == 1 {
                Some(u)
            } else if deg(v) == 1 {
                Some(v)
            } else {
                None
            };
            match end {
                Some(e) => {
                    if diag.is_short(e) {
                        Ok(format!("B{k}"))
                    } else {
                        Ok(format!("C{k}"))
                    }
                }
                None => {
                    if k == 4 {
                        Ok("F4".to_string())
                    } else {
                        Err(Error::Unsupported("interior double bond".into()))
                    }
                }
            }
        }
        _ => Err(Error::Unsupported("multiple double bonds".into())),
    }
}
