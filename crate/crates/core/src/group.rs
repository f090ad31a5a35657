//! Concrete discrete groups: ℤⁿ, finite groups given by a multiplication
//! table, and finite products of these.
//!
//! Elements carry an integer vector (all ℤⁿ factors concatenated in factor
//! order) and an index vector (one entry per finite factor). Haar measure is
//! counting measure and every supported group is unimodular.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ComplexRepr;

/// Default cap on the number of elements a truncation window may hold.
pub const DEFAULT_WINDOW_CAP: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Element {
    pub ints: Vec<i64>,
    pub idx: Vec<usize>,
}

impl Element {
    pub fn new(ints: Vec<i64>, idx: Vec<usize>) -> Self {
        Self { ints, idx }
    }

    pub fn zn(ints: impl Into<Vec<i64>>) -> Self {
        Self {
            ints: ints.into(),
            idx: Vec::new(),
        }
    }

    pub fn finite(i: usize) -> Self {
        Self {
            ints: Vec::new(),
            idx: vec![i],
        }
    }

    /// Sup norm of the integer part.
    pub fn int_radius(&self) -> u64 {
        self.ints.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    /// ℓ¹ norm of the integer part.
    pub fn int_l1(&self) -> u64 {
        self.ints.iter().map(|v| v.unsigned_abs()).sum()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.ints.is_empty(), self.idx.is_empty()) {
            (false, true) => write!(f, "{:?}", self.ints),
            (true, false) if self.idx.len() == 1 => write!(f, "#{}", self.idx[0]),
            _ => write!(f, "({:?}; {:?})", self.ints, self.idx),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ElementRepr {
    Index(usize),
    Ints(Vec<i64>),
    Full {
        #[serde(default)]
        z: Vec<i64>,
        #[serde(default)]
        f: Vec<usize>,
    },
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match ElementRepr::deserialize(d)? {
            ElementRepr::Index(i) => Element::finite(i),
            ElementRepr::Ints(v) => Element::zn(v),
            ElementRepr::Full { z, f } => Element::new(z, f),
        })
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Element", 2)?;
        st.serialize_field("z", &self.ints)?;
        st.serialize_field("f", &self.idx)?;
        st.end()
    }
}

/// Irreducible unitary representation of a finite group, one matrix per element.
#[derive(Clone, Debug)]
pub struct Irrep {
    pub dim: usize,
    pub matrices: Vec<DMatrix<Complex64>>,
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    /// Small generating set (each element outside the span of the previous ones).
    generators: Vec<usize>,
    irreps: Vec<Irrep>,
}

impl FiniteGroup {
    /// Builds a group from a row-major multiplication table, checking the
    /// Latin-square property, the identity, inverses and associativity.
    pub fn from_table(name: impl Into<String>, order: usize, table: Vec<usize>) -> Result<Self> {
        let name = name.into();
        if order == 0 {
            return Err(Error::InvalidGroup(format!("{name}: order must be positive")));
        }
        if table.len() != order * order {
            return Err(Error::InvalidGroup(format!(
                "{name}: table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if let Some(bad) = table.iter().find(|&&v| v >= order) {
            return Err(Error::InvalidGroup(format!("{name}: table entry {bad} out of range")));
        }
        let mut seen = vec![false; order];
        for r in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for c in 0..order {
                let v = table[r * order + c];
                if seen[v] {
                    return Err(Error::InvalidGroup(format!("{name}: row {r} repeats {v}")));
                }
                seen[v] = true;
            }
        }
        for c in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for r in 0..order {
                let v = table[r * order + c];
                if seen[v] {
                    return Err(Error::InvalidGroup(format!("{name}: column {c} repeats {v}")));
                }
                seen[v] = true;
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e * order + x] == x && table[x * order + e] == x))
            .ok_or_else(|| Error::InvalidGroup(format!("{name}: no identity element")))?;
        // Row scan: the inverse of x is the unique y with x·y = e.
        let mut inverses = vec![0; order];
        for (x, inv) in inverses.iter_mut().enumerate() {
            *inv = (0..order)
                .find(|&y| table[x * order + y] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("{name}: {x} has no inverse")))?;
            if table[*inv * order + x] != identity {
                return Err(Error::InvalidGroup(format!("{name}: left and right inverse of {x} differ")));
            }
        }
        let generators = generating_set(order, identity, &table);
        // Light's test: elements g with (a·g)·c = a·(g·c) for all a, c are
        // closed under products, so checking a generating set suffices.
        for &g in &generators {
            for a in 0..order {
                let ag = table[a * order + g];
                for c in 0..order {
                    if table[ag * order + c] != table[a * order + table[g * order + c]] {
                        return Err(Error::InvalidGroup(format!(
                            "{name}: not associative at ({a},{g},{c})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            name,
            order,
            table,
            identity,
            inverses,
            generators,
            irreps: Vec::new(),
        })
    }

    /// Attaches irreps given on generators, extending them to all elements
    /// along a breadth-first word spanning tree. Homomorphism and unitarity
    /// are checked by the caller through the dual-data validation.
    pub fn with_generator_irreps(
        mut self,
        generators: &[usize],
        irreps: Vec<(usize, Vec<DMatrix<Complex64>>)>,
    ) -> Result<Self> {
        if generators.iter().any(|&g| g >= self.order) {
            return Err(Error::InvalidGroup(format!("{}: generator out of range", self.name)));
        }
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.order];
        let mut reached = vec![false; self.order];
        reached[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        let mut visit_order = vec![self.identity];
        while let Some(x) = queue.pop_front() {
            for (gi, &g) in generators.iter().enumerate() {
                let y = self.mul(x, g);
                if !reached[y] {
                    reached[y] = true;
                    parent[y] = Some((x, gi));
                    visit_order.push(y);
                    queue.push_back(y);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(Error::InvalidGroup(format!("{}: generators do not generate the group", self.name)));
        }
        let mut out = Vec::with_capacity(irreps.len());
        for (k, (dim, gens)) in irreps.into_iter().enumerate() {
            if gens.len() != generators.len() {
                return Err(Error::InvalidGroup(format!(
                    "{}: irrep {k} has {} generator matrices, expected {}",
                    self.name,
                    gens.len(),
                    generators.len()
                )));
            }
            if gens.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
                return Err(Error::InvalidGroup(format!("{}: irrep {k} has wrong matrix size", self.name)));
            }
            let mut mats = vec![DMatrix::<Complex64>::zeros(dim, dim); self.order];
            mats[self.identity] = DMatrix::identity(dim, dim);
            for &y in &visit_order[1..] {
                let (x, gi) = parent[y].expect("non-identity element has a parent");
                mats[y] = &mats[x] * &gens[gi];
            }
            out.push(Irrep { dim, matrices: mats });
        }
        self.irreps = out;
        Ok(self)
    }

    /// Attaches irreps given explicitly for every element.
    pub fn with_element_irreps(mut self, irreps: Vec<Irrep>) -> Result<Self> {
        for (k, ir) in irreps.iter().enumerate() {
            if ir.matrices.len() != self.order
                || ir.matrices.iter().any(|m| m.nrows() != ir.dim || m.ncols() != ir.dim)
            {
                return Err(Error::InvalidGroup(format!("{}: irrep {k} has wrong shape", self.name)));
            }
        }
        self.irreps = irreps;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }
    pub fn table(&self) -> &[usize] {
        &self.table
    }
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }
    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }
    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

#[derive(Clone, Debug)]
pub enum FactorKind {
    Zn(usize),
    Finite(Arc<FiniteGroup>),
}

/// A flattened factor together with its slots in [`Element`].
#[derive(Clone, Debug)]
pub struct Factor {
    pub kind: FactorKind,
    pub int_offset: usize,
    pub idx_offset: usize,
}

impl Factor {
    pub fn int_range(&self) -> std::ops::Range<usize> {
        match self.kind {
            FactorKind::Zn(d) => self.int_offset..self.int_offset + d,
            FactorKind::Finite(_) => self.int_offset..self.int_offset,
        }
    }
    pub fn is_infinite(&self) -> bool {
        matches!(self.kind, FactorKind::Zn(_))
    }
}

#[derive(Clone, Debug)]
pub enum GroupKind {
    Zn(usize),
    Finite(Arc<FiniteGroup>),
    Product(Vec<GroupSpec>),
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    kind: GroupKind,
    factors: Vec<Factor>,
    int_dim: usize,
}

impl GroupSpec {
    pub fn zn(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGroup("ℤⁿ needs dimension ≥ 1".into()));
        }
        Ok(Self::from_kind(GroupKind::Zn(dim), 1))
    }

    pub fn finite(g: FiniteGroup) -> Self {
        Self::from_kind(GroupKind::Finite(Arc::new(g)), 1)
    }

    pub fn finite_shared(g: Arc<FiniteGroup>) -> Self {
        Self::from_kind(GroupKind::Finite(g), 1)
    }

    /// Product of groups; nesting depth is capped at 2.
    pub fn product(parts: Vec<GroupSpec>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidGroup("product of an empty list".into()));
        }
        if parts.iter().any(|p| p.depth() >= 2) {
            return Err(Error::InvalidGroup("product nesting depth exceeds 2".into()));
        }
        Ok(Self::from_kind(GroupKind::Product(parts), 0))
    }

    fn from_kind(kind: GroupKind, _hint: usize) -> Self {
        let mut factors = Vec::new();
        let (mut io, mut fo) = (0, 0);
        fn push(k: &GroupKind, factors: &mut Vec<Factor>, io: &mut usize, fo: &mut usize) {
            match k {
                GroupKind::Zn(d) => {
                    factors.push(Factor {
                        kind: FactorKind::Zn(*d),
                        int_offset: *io,
                        idx_offset: *fo,
                    });
                    *io += d;
                }
                GroupKind::Finite(g) => {
                    factors.push(Factor {
                        kind: FactorKind::Finite(g.clone()),
                        int_offset: *io,
                        idx_offset: *fo,
                    });
                    *fo += 1;
                }
                GroupKind::Product(ps) => {
                    for p in ps {
                        push(&p.kind, factors, io, fo);
                    }
                }
            }
        }
        push(&kind, &mut factors, &mut io, &mut fo);
        Self {
            kind,
            factors,
            int_dim: io,
        }
    }

    fn depth(&self) -> usize {
        match &self.kind {
            GroupKind::Product(ps) => 1 + ps.iter().map(|p| p.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }
    /// Total dimension of the ℤⁿ part.
    pub fn int_dim(&self) -> usize {
        self.int_dim
    }
    pub fn finite_factors(&self) -> impl Iterator<Item = &FiniteGroup> {
        self.factors.iter().filter_map(|f| match &f.kind {
            FactorKind::Finite(g) => Some(g.as_ref()),
            _ => None,
        })
    }
    /// Order of the finite part (1 when there is none).
    pub fn finite_order(&self) -> usize {
        self.finite_factors().map(|g| g.order()).product()
    }
    pub fn is_finite(&self) -> bool {
        self.int_dim == 0
    }
    pub fn is_abelian(&self) -> bool {
        self.finite_factors().all(|g| g.is_abelian())
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            GroupKind::Zn(d) => format!("Z^{d}"),
            GroupKind::Finite(g) => g.name().to_string(),
            GroupKind::Product(ps) => ps.iter().map(|p| p.describe()).collect::<Vec<_>>().join(" x "),
        }
    }

    pub fn identity(&self) -> Element {
        Element {
            ints: vec![0; self.int_dim],
            idx: self.finite_factors().map(|g| g.identity()).collect(),
        }
    }

    pub fn validate(&self, x: &Element) -> Result<()> {
        let n_idx = self.factors.len() - self.factors.iter().filter(|f| f.is_infinite()).count();
        let ok = x.ints.len() == self.int_dim
            && x.idx.len() == n_idx
            && self.finite_factors().zip(&x.idx).all(|(g, &i)| i < g.order());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                element: x.to_string(),
                group: self.describe(),
            })
        }
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.mul(x, y))
    }

    pub fn inverse(&self, x: &Element) -> Result<Element> {
        self.validate(x)?;
        Ok(self.inv(x))
    }

    /// Group law without validation.
    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        Element {
            ints: x.ints.iter().zip(&y.ints).map(|(a, b)| a + b).collect(),
            idx: self
                .finite_factors()
                .zip(x.idx.iter().zip(&y.idx))
                .map(|(g, (&a, &b))| g.mul(a, b))
                .collect(),
        }
    }

    pub fn inv(&self, x: &Element) -> Element {
        Element {
            ints: x.ints.iter().map(|a| -a).collect(),
            idx: self.finite_factors().zip(&x.idx).map(|(g, &a)| g.inv(a)).collect(),
        }
    }

    /// Modular function; identically one on discrete groups.
    pub fn modular_function(&self, x: &Element) -> Result<f64> {
        self.validate(x)?;
        Ok(1.0)
    }

    /// Mixed-radix index of the finite part, first finite factor slowest.
    pub fn finite_flat_index(&self, idx: &[usize]) -> usize {
        self.finite_factors()
            .zip(idx)
            .fold(0, |acc, (g, &i)| acc * g.order() + i)
    }

    pub fn finite_from_flat(&self, mut flat: usize) -> Vec<usize> {
        let orders: Vec<usize> = self.finite_factors().map(|g| g.order()).collect();
        let mut out = vec![0; orders.len()];
        for (slot, &o) in out.iter_mut().zip(&orders).rev() {
            *slot = flat % o;
            flat /= o;
        }
        out
    }

    pub fn window_size(&self, radius: usize) -> u128 {
        let side = 2 * radius as u128 + 1;
        side.pow(self.int_dim as u32) * self.finite_order() as u128
    }

    pub fn enumerate_window(&self, radius: usize) -> Result<Vec<Element>> {
        self.enumerate_window_capped(radius, DEFAULT_WINDOW_CAP)
    }

    /// Box `[-radius, radius]ⁿ` on ℤ parts, all elements on finite parts, in
    /// lexicographic product order (first factor slowest).
    pub fn enumerate_window_capped(&self, radius: usize, cap: usize) -> Result<Vec<Element>> {
        let requested = self.window_size(radius);
        if requested > cap as u128 {
            return Err(Error::WindowOverflow { requested, cap });
        }
        let r = radius as i64;
        let mut out = vec![Element::default()];
        for f in &self.factors {
            let mut next = Vec::with_capacity(out.len());
            for base in &out {
                match &f.kind {
                    FactorKind::Zn(d) => {
                        let mut coords = vec![-r; *d];
                        loop {
                            let mut e = base.clone();
                            e.ints.extend_from_slice(&coords);
                            next.push(e);
                            // odometer, last coordinate fastest
                            let mut k = *d;
                            loop {
                                if k == 0 {
                                    break;
                                }
                                k -= 1;
                                if coords[k] < r {
                                    coords[k] += 1;
                                    coords[k + 1..].iter_mut().for_each(|c| *c = -r);
                                    break;
                                }
                                if k == 0 {
                                    coords.clear();
                                }
                            }
                            if coords.is_empty() {
                                break;
                            }
                        }
                    }
                    FactorKind::Finite(g) => {
                        for i in 0..g.order() {
                            let mut e = base.clone();
                            e.idx.push(i);
                            next.push(e);
                        }
                    }
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// Window elements with an index lookup.
#[derive(Clone, Debug)]
pub struct Window {
    pub elements: Vec<Element>,
    index: HashMap<Element, usize>,
}

impl Window {
    pub fn new(elements: Vec<Element>) -> Self {
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Self { elements, index }
    }
    pub fn position(&self, x: &Element) -> Option<usize> {
        self.index.get(x).copied()
    }
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Built-in catalog

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Greedy generating set: scan elements in order and keep each one not yet
/// reached by right products of the kept ones. At most `log₂ |G|` survive.
fn generating_set(order: usize, identity: usize, table: &[usize]) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut reached = vec![false; order];
    reached[identity] = true;
    let mut members = vec![identity];
    for x in 0..order {
        if reached[x] {
            continue;
        }
        gens.push(x);
        // Re-close from scratch; subgroup sizes at least double each time.
        reached.iter_mut().for_each(|r| *r = false);
        reached[identity] = true;
        members.clear();
        members.push(identity);
        let mut i = 0;
        while i < members.len() {
            let m = members[i];
            for &g in &gens {
                let y = table[m * order + g];
                if !reached[y] {
                    reached[y] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
    }
    gens
}

fn mat(dim: usize, entries: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(dim, dim, entries)
}

fn scalar(v: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_element(1, 1, v)
}

fn key(m: &DMatrix<Complex64>) -> Vec<i64> {
    m.iter()
        .flat_map(|z| [(z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64])
        .collect()
}

/// Enumerates a finite matrix group from faithful generators and builds its
/// table; generator irreps are extended by the word tree.
fn matrix_group(
    name: &str,
    gens: &[DMatrix<Complex64>],
    irreps: Vec<(usize, Vec<DMatrix<Complex64>>)>,
) -> FiniteGroup {
    let dim = gens[0].nrows();
    let mut elems = vec![DMatrix::<Complex64>::identity(dim, dim)];
    let mut lookup = HashMap::from([(key(&elems[0]), 0usize)]);
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let p = &elems[i] * g;
            let k = key(&p);
            if !lookup.contains_key(&k) {
                lookup.insert(k, elems.len());
                elems.push(p);
            }
        }
        i += 1;
    }
    let order = elems.len();
    let mut table = vec![0; order * order];
    for a in 0..order {
        for b in 0..order {
            table[a * order + b] = lookup[&key(&(&elems[a] * &elems[b]))];
        }
    }
    let gen_idx: Vec<usize> = gens.iter().map(|g| lookup[&key(g)]).collect();
    FiniteGroup::from_table(name, order, table)
        .and_then(|g| g.with_generator_irreps(&gen_idx, irreps))
        .expect("catalog group is valid")
}

/// Cyclic group ℤ/m with its m characters.
pub fn cyclic(m: usize) -> FiniteGroup {
    assert!(m >= 1);
    let table = (0..m * m).map(|k| (k / m + k % m) % m).collect();
    let irreps = (0..m)
        .map(|k| Irrep {
            dim: 1,
            matrices: (0..m)
                .map(|a| scalar(Complex64::from_polar(1.0, std::f64::consts::TAU * ((k * a) % m) as f64 / m as f64)))
                .collect(),
        })
        .collect();
    FiniteGroup::from_table(format!("Z/{m}"), m, table)
        .and_then(|g| g.with_element_irreps(irreps))
        .expect("cyclic group is valid")
}

/// Symmetric group S₃ generated by a transposition and a 3-cycle.
pub fn s3() -> FiniteGroup {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let perm = |p: [usize; 3]| {
        let mut m = DMatrix::from_element(3, 3, z);
        for (i, &j) in p.iter().enumerate() {
            m[(j, i)] = o;
        }
        m
    };
    let s = perm([1, 0, 2]);
    let r = perm([1, 2, 0]);
    let (cs, sn) = ((2.0 * std::f64::consts::PI / 3.0).cos(), (2.0 * std::f64::consts::PI / 3.0).sin());
    let irreps = vec![
        (1, vec![scalar(o), scalar(o)]),
        (1, vec![scalar(-o), scalar(o)]),
        (
            2,
            vec![
                mat(2, &[o, z, z, -o]),
                mat(2, &[c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)]),
            ],
        ),
    ];
    matrix_group("S3", &[s, r], irreps)
}

/// Dihedral group of the square, order 8.
pub fn d4() -> FiniteGroup {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let perm = |p: [usize; 4]| {
        let mut m = DMatrix::from_element(4, 4, z);
        for (i, &j) in p.iter().enumerate() {
            m[(j, i)] = o;
        }
        m
    };
    let r = perm([1, 2, 3, 0]);
    let s = perm([3, 2, 1, 0]);
    let mut irreps = Vec::new();
    for (rs, ss) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        irreps.push((1, vec![scalar(c(rs, 0.0)), scalar(c(ss, 0.0))]));
    }
    irreps.push((2, vec![mat(2, &[z, -o, o, z]), mat(2, &[o, z, z, -o])]));
    matrix_group("D4", &[r, s], irreps)
}

/// Quaternion group Q₈ from its defining 2-dimensional representation.
pub fn q8() -> FiniteGroup {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let qi = mat(2, &[i, z, z, -i]);
    let qj = mat(2, &[z, o, -o, z]);
    let mut irreps = Vec::new();
    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        irreps.push((1, vec![scalar(c(a, 0.0)), scalar(c(b, 0.0))]));
    }
    irreps.push((2, vec![qi.clone(), qj.clone()]));
    matrix_group("Q8", &[qi, qj], irreps)
}

/// Looks up a catalog group: `S3`, `D4`, `Q8`, or `Z<m>` / `Z/<m>`.
pub fn catalog(name: &str) -> Result<FiniteGroup> {
    match name {
        "S3" => Ok(s3()),
        "D4" => Ok(d4()),
        "Q8" => Ok(q8()),
        _ => {
            let digits = name.strip_prefix("Z/").or_else(|| name.strip_prefix('Z'));
            match digits.and_then(|d| d.parse::<usize>().ok()) {
                Some(m) if (1..=4096).contains(&m) => Ok(cyclic(m)),
                _ => Err(Error::InvalidGroup(format!("unknown catalog group {name:?}"))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON interface

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IrrepJson {
    pub dim: usize,
    /// One row-major matrix per generator (or per element when no generators are given).
    pub matrices: Vec<Vec<Vec<ComplexRepr>>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteGroupJson {
    #[serde(default)]
    pub name: Option<String>,
    pub order: usize,
    pub table: Vec<usize>,
    #[serde(default)]
    pub generators: Option<Vec<usize>>,
    pub irreps: Vec<IrrepJson>,
}

fn matrix_from_rows(dim: usize, rows: &[Vec<ComplexRepr>]) -> Result<DMatrix<Complex64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidGroup(format!("matrix is not {dim}x{dim}")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j].into()))
}

impl FiniteGroupJson {
    /// Validates the table and the irreps (homomorphism, unitarity,
    /// irreducibility, completeness) before returning the group.
    pub fn into_group(self) -> Result<FiniteGroup> {
        let name = self.name.clone().unwrap_or_else(|| format!("G{}", self.order));
        let g = FiniteGroup::from_table(name, self.order, self.table)?;
        let g = match &self.generators {
            Some(gens) => {
                let irreps = self
                    .irreps
                    .iter()
                    .map(|ir| {
                        let ms = ir
                            .matrices
                            .iter()
                            .map(|m| matrix_from_rows(ir.dim, m))
                            .collect::<Result<Vec<_>>>()?;
                        Ok((ir.dim, ms))
                    })
                    .collect::<Result<Vec<_>>>()?;
                g.with_generator_irreps(gens, irreps)?
            }
            None => {
                let irreps = self
                    .irreps
                    .iter()
                    .map(|ir| {
                        let ms = ir
                            .matrices
                            .iter()
                            .map(|m| matrix_from_rows(ir.dim, m))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Irrep { dim: ir.dim, matrices: ms })
                    })
                    .collect::<Result<Vec<_>>>()?;
                g.with_element_irreps(irreps)?
            }
        };
        crate::fourier::validate_irreps(&g)?;
        Ok(g)
    }
}

/// Group source as it appears in problem configurations.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDef {
    Zn { dim: usize },
    Finite {
        #[serde(default)]
        catalog: Option<String>,
        #[serde(default, flatten)]
        explicit: Option<FiniteGroupJson>,
    },
    Product { factors: Vec<GroupDef> },
}

impl GroupDef {
    pub fn build(&self) -> Result<GroupSpec> {
        match self {
            GroupDef::Zn { dim } => GroupSpec::zn(*dim),
            GroupDef::Finite { catalog: Some(name), explicit: None } => Ok(GroupSpec::finite(catalog(name)?)),
            GroupDef::Finite { catalog: None, explicit: Some(j) } => Ok(GroupSpec::finite(j.clone().into_group()?)),
            GroupDef::Finite { .. } => Err(Error::InvalidGroup(
                "finite group needs exactly one of `catalog` or an explicit table".into(),
            )),
            GroupDef::Product { factors } => {
                GroupSpec::product(factors.iter().map(|f| f.build()).collect::<Result<_>>()?)
            }
        }
    }
}
