//! Canonical representation and arithmetic for the supported finitely
//! generated groups, their windows, balls, and Cayley graphs.
//!
//! Every element carries its group spec and is kept in canonical form:
//! free words are freely reduced, residues lie in `[0, n)`. Elements of the
//! same group are totally ordered (lexicographically on the payload) so that
//! windows, pattern indices, and certificates are reproducible byte-for-byte.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Result, WcError};
use crate::graph::LocalGraph;

/// A finitely generated group from the supported families, together with its
/// distinguished (ordered) generating set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupSpec {
    /// Z^d with the standard basis as generators.
    FreeAbelian(u32),
    /// Z/nZ with +1 as generator.
    Cyclic(u64),
    /// Z^2/(mZ x nZ) with the two unit translations as generators.
    Torus(u64, u64),
    /// Free group on k generators a, b, c, ...
    Free(u32),
    /// Direct product; generators are the factors' generators in order.
    DirectProduct(Vec<GroupSpec>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElemPayload {
    /// Integer vector, for FreeAbelian(d).
    Vector(Vec<i64>),
    /// Residue in [0, n), for Cyclic(n).
    Residue(u64),
    /// Residue pair, for Torus(m, n).
    Residues(u64, u64),
    /// Freely reduced word; letter i+1 is generator i, -(i+1) its inverse.
    Word(Vec<i32>),
    /// One element per factor, for DirectProduct.
    Tuple(Vec<GroupElem>),
}

/// A canonical group element tagged with its spec.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElem {
    spec: GroupSpec,
    payload: ElemPayload,
}

impl GroupSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::FreeAbelian(d) if *d >= 1 => Ok(()),
            GroupSpec::Cyclic(n) if *n >= 1 => Ok(()),
            GroupSpec::Torus(m, n) if *m >= 1 && *n >= 1 => Ok(()),
            GroupSpec::Free(k) if *k >= 1 => Ok(()),
            GroupSpec::DirectProduct(fs) if !fs.is_empty() => {
                for f in fs {
                    f.validate()?;
                }
                Ok(())
            }
            _ => Err(WcError::InvalidArgument(format!(
                "group family parameters must be positive: {self}"
            ))),
        }
    }

    /// Number of distinguished generators.
    pub fn generator_count(&self) -> usize {
        match self {
            GroupSpec::FreeAbelian(d) => *d as usize,
            GroupSpec::Cyclic(_) => 1,
            GroupSpec::Torus(_, _) => 2,
            GroupSpec::Free(k) => *k as usize,
            GroupSpec::DirectProduct(fs) => fs.iter().map(|f| f.generator_count()).sum(),
        }
    }

    /// The i-th distinguished generator.
    pub fn generator(&self, i: usize) -> GroupElem {
        assert!(i < self.generator_count(), "generator index out of range");
        let payload = match self {
            GroupSpec::FreeAbelian(d) => {
                let mut v = vec![0i64; *d as usize];
                v[i] = 1;
                ElemPayload::Vector(v)
            }
            GroupSpec::Cyclic(n) => ElemPayload::Residue(if *n == 1 { 0 } else { 1 }),
            GroupSpec::Torus(m, n) => {
                if i == 0 {
                    ElemPayload::Residues(if *m == 1 { 0 } else { 1 }, 0)
                } else {
                    ElemPayload::Residues(0, if *n == 1 { 0 } else { 1 })
                }
            }
            GroupSpec::Free(_) => ElemPayload::Word(vec![i as i32 + 1]),
            GroupSpec::DirectProduct(fs) => {
                let mut rest = i;
                let mut tuple: Vec<GroupElem> = fs.iter().map(|f| f.identity()).collect();
                for (fi, f) in fs.iter().enumerate() {
                    let c = f.generator_count();
                    if rest < c {
                        tuple[fi] = f.generator(rest);
                        break;
                    }
                    rest -= c;
                }
                ElemPayload::Tuple(tuple)
            }
        };
        GroupElem { spec: self.clone(), payload }
    }

    pub fn generators(&self) -> Vec<GroupElem> {
        (0..self.generator_count()).map(|i| self.generator(i)).collect()
    }

    /// Short printable name for the i-th generator (used in DOT exports and
    /// action files).
    pub fn generator_name(&self, i: usize) -> String {
        match self {
            GroupSpec::FreeAbelian(_) => format!("e{}", i + 1),
            GroupSpec::Cyclic(_) => "t".to_string(),
            GroupSpec::Torus(_, _) => format!("e{}", i + 1),
            GroupSpec::Free(_) => {
                let c = (b'a' + i as u8) as char;
                c.to_string()
            }
            GroupSpec::DirectProduct(fs) => {
                let mut rest = i;
                for (fi, f) in fs.iter().enumerate() {
                    let c = f.generator_count();
                    if rest < c {
                        return format!("f{}.{}", fi + 1, f.generator_name(rest));
                    }
                    rest -= c;
                }
                unreachable!()
            }
        }
    }

    pub fn identity(&self) -> GroupElem {
        let payload = match self {
            GroupSpec::FreeAbelian(d) => ElemPayload::Vector(vec![0; *d as usize]),
            GroupSpec::Cyclic(_) => ElemPayload::Residue(0),
            GroupSpec::Torus(_, _) => ElemPayload::Residues(0, 0),
            GroupSpec::Free(_) => ElemPayload::Word(vec![]),
            GroupSpec::DirectProduct(fs) => {
                ElemPayload::Tuple(fs.iter().map(|f| f.identity()).collect())
            }
        };
        GroupElem { spec: self.clone(), payload }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::FreeAbelian(d) => write!(f, "Z^{d}"),
            GroupSpec::Cyclic(n) => write!(f, "Z/{n}"),
            GroupSpec::Torus(m, n) => write!(f, "T{m}x{n}"),
            GroupSpec::Free(k) => write!(f, "F{k}"),
            GroupSpec::DirectProduct(fs) => {
                write!(f, "prod(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = WcError;

    fn from_str(s: &str) -> Result<GroupSpec> {
        let s = s.trim();
        let bad = || WcError::Parse(format!("unrecognized group spec: {s:?}"));
        if let Some(rest) = s.strip_prefix("Z^") {
            let d: u32 = rest.parse().map_err(|_| bad())?;
            return check(GroupSpec::FreeAbelian(d));
        }
        if let Some(rest) = s.strip_prefix("Z/") {
            let n: u64 = rest.parse().map_err(|_| bad())?;
            return check(GroupSpec::Cyclic(n));
        }
        if let Some(rest) = s.strip_prefix('T') {
            if let Some((m, n)) = rest.split_once('x') {
                let m: u64 = m.parse().map_err(|_| bad())?;
                let n: u64 = n.parse().map_err(|_| bad())?;
                return check(GroupSpec::Torus(m, n));
            }
        }
        if let Some(rest) = s.strip_prefix('F') {
            if let Ok(k) = rest.parse::<u32>() {
                return check(GroupSpec::Free(k));
            }
        }
        if let Some(rest) = s.strip_prefix("prod(").and_then(|r| r.strip_suffix(')')) {
            let parts = split_top_level(rest, ',');
            let fs = parts
                .iter()
                .map(|p| p.parse::<GroupSpec>())
                .collect::<Result<Vec<_>>>()?;
            return check(GroupSpec::DirectProduct(fs));
        }
        Err(bad())
    }
}

fn check(spec: GroupSpec) -> Result<GroupSpec> {
    spec.validate()?;
    Ok(spec)
}

/// Split on `sep` ignoring separators nested inside parentheses.
fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(c);
            }
            c if c == sep && depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            c => cur.push(c),
        }
    }
    parts.push(cur);
    parts
}

impl GroupElem {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn payload(&self) -> &ElemPayload {
        &self.payload
    }

    pub fn is_identity(&self) -> bool {
        match &self.payload {
            ElemPayload::Vector(v) => v.iter().all(|&x| x == 0),
            ElemPayload::Residue(r) => *r == 0,
            ElemPayload::Residues(a, b) => *a == 0 && *b == 0,
            ElemPayload::Word(w) => w.is_empty(),
            ElemPayload::Tuple(t) => t.iter().all(|e| e.is_identity()),
        }
    }

    /// Group multiplication; both operands must come from the same spec.
    pub fn mul(&self, other: &GroupElem) -> Result<GroupElem> {
        if self.spec != other.spec {
            return Err(WcError::MismatchedSpecs(
                self.spec.to_string(),
                other.spec.to_string(),
            ));
        }
        let payload = match (&self.spec, &self.payload, &other.payload) {
            (_, ElemPayload::Vector(a), ElemPayload::Vector(b)) => {
                ElemPayload::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupSpec::Cyclic(n), ElemPayload::Residue(a), ElemPayload::Residue(b)) => {
                ElemPayload::Residue((a + b) % n)
            }
            (
                GroupSpec::Torus(m, n),
                ElemPayload::Residues(a1, a2),
                ElemPayload::Residues(b1, b2),
            ) => ElemPayload::Residues((a1 + b1) % m, (a2 + b2) % n),
            (_, ElemPayload::Word(a), ElemPayload::Word(b)) => {
                let mut w = a.clone();
                for &l in b {
                    if w.last().map_or(false, |&x| x == -l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                ElemPayload::Word(w)
            }
            (_, ElemPayload::Tuple(a), ElemPayload::Tuple(b)) => ElemPayload::Tuple(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.mul(y))
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => unreachable!("payload/spec mismatch"),
        };
        Ok(GroupElem { spec: self.spec.clone(), payload })
    }

    pub fn inv(&self) -> GroupElem {
        let payload = match (&self.spec, &self.payload) {
            (_, ElemPayload::Vector(v)) => ElemPayload::Vector(v.iter().map(|x| -x).collect()),
            (GroupSpec::Cyclic(n), ElemPayload::Residue(r)) => {
                ElemPayload::Residue(if *r == 0 { 0 } else { n - r })
            }
            (GroupSpec::Torus(m, n), ElemPayload::Residues(a, b)) => ElemPayload::Residues(
                if *a == 0 { 0 } else { m - a },
                if *b == 0 { 0 } else { n - b },
            ),
            (_, ElemPayload::Word(w)) => {
                ElemPayload::Word(w.iter().rev().map(|&l| -l).collect())
            }
            (_, ElemPayload::Tuple(t)) => {
                ElemPayload::Tuple(t.iter().map(|e| e.inv()).collect())
            }
            _ => unreachable!("payload/spec mismatch"),
        };
        GroupElem { spec: self.spec.clone(), payload }
    }

    /// Build a free-abelian element directly from a vector.
    pub fn from_vector(spec: &GroupSpec, v: Vec<i64>) -> Result<GroupElem> {
        match spec {
            GroupSpec::FreeAbelian(d) if v.len() == *d as usize => Ok(GroupElem {
                spec: spec.clone(),
                payload: ElemPayload::Vector(v),
            }),
            _ => Err(WcError::InvalidArgument(format!(
                "vector of length {} does not fit {spec}",
                v.len()
            ))),
        }
    }

    /// Build a cyclic element from an arbitrary integer (reduced mod n).
    pub fn from_residue(spec: &GroupSpec, r: i64) -> Result<GroupElem> {
        match spec {
            GroupSpec::Cyclic(n) => Ok(GroupElem {
                spec: spec.clone(),
                payload: ElemPayload::Residue(r.rem_euclid(*n as i64) as u64),
            }),
            _ => Err(WcError::InvalidArgument(format!("{spec} is not cyclic"))),
        }
    }

    /// Build a torus element from an arbitrary integer pair.
    pub fn from_residues(spec: &GroupSpec, a: i64, b: i64) -> Result<GroupElem> {
        match spec {
            GroupSpec::Torus(m, n) => Ok(GroupElem {
                spec: spec.clone(),
                payload: ElemPayload::Residues(
                    a.rem_euclid(*m as i64) as u64,
                    b.rem_euclid(*n as i64) as u64,
                ),
            }),
            _ => Err(WcError::InvalidArgument(format!("{spec} is not a torus"))),
        }
    }

    /// Build a free-group element from letters; reduces eagerly.
    pub fn from_word(spec: &GroupSpec, letters: &[i32]) -> Result<GroupElem> {
        let k = match spec {
            GroupSpec::Free(k) => *k as i32,
            _ => return Err(WcError::InvalidArgument(format!("{spec} is not free"))),
        };
        let mut w: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 || l.abs() > k {
                return Err(WcError::InvalidArgument(format!(
                    "letter {l} out of range for {spec}"
                )));
            }
            if w.last().map_or(false, |&x| x == -l) {
                w.pop();
            } else {
                w.push(l);
            }
        }
        Ok(GroupElem { spec: spec.clone(), payload: ElemPayload::Word(w) })
    }

    pub fn from_tuple(spec: &GroupSpec, parts: Vec<GroupElem>) -> Result<GroupElem> {
        match spec {
            GroupSpec::DirectProduct(fs) if fs.len() == parts.len() => {
                for (f, p) in fs.iter().zip(&parts) {
                    if p.spec() != f {
                        return Err(WcError::MismatchedSpecs(f.to_string(), p.spec.to_string()));
                    }
                }
                Ok(GroupElem { spec: spec.clone(), payload: ElemPayload::Tuple(parts) })
            }
            _ => Err(WcError::InvalidArgument(format!(
                "{spec} is not a product of {} factors",
                parts.len()
            ))),
        }
    }

    /// Parse the text form (`Z2:(1,-2)`, `F2:abA`, `Z6:3`, `T2x3:(1,2)`)
    /// against a known spec.
    pub fn parse(spec: &GroupSpec, s: &str) -> Result<GroupElem> {
        let s = s.trim();
        let bad = |msg: &str| WcError::Parse(format!("element {s:?} for {spec}: {msg}"));
        let body = match s.split_once(':') {
            Some((_prefix, body)) => body,
            // Bare payload (no family prefix) is accepted; the spec gives
            // the family anyway.
            None => s,
        };
        match spec {
            GroupSpec::FreeAbelian(d) => {
                let inner = body
                    .strip_prefix('(')
                    .and_then(|b| b.strip_suffix(')'))
                    .ok_or_else(|| bad("expected (v1,...,vd)"))?;
                let v: Vec<i64> = inner
                    .split(',')
                    .map(|x| x.trim().parse::<i64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad integer"))?;
                if v.len() != *d as usize {
                    return Err(bad("wrong dimension"));
                }
                GroupElem::from_vector(spec, v)
            }
            GroupSpec::Cyclic(_) => {
                let r: i64 = body.trim().parse().map_err(|_| bad("bad residue"))?;
                GroupElem::from_residue(spec, r)
            }
            GroupSpec::Torus(_, _) => {
                let inner = body
                    .strip_prefix('(')
                    .and_then(|b| b.strip_suffix(')'))
                    .ok_or_else(|| bad("expected (a,b)"))?;
                let mut it = inner.split(',');
                let a: i64 = it
                    .next()
                    .and_then(|x| x.trim().parse().ok())
                    .ok_or_else(|| bad("bad residue"))?;
                let b: i64 = it
                    .next()
                    .and_then(|x| x.trim().parse().ok())
                    .ok_or_else(|| bad("bad residue"))?;
                if it.next().is_some() {
                    return Err(bad("expected exactly two residues"));
                }
                GroupElem::from_residues(spec, a, b)
            }
            GroupSpec::Free(k) => {
                let body = body.trim();
                if body == "e" || body.is_empty() {
                    return Ok(spec.identity());
                }
                let mut letters = Vec::new();
                for c in body.chars() {
                    let l = if c.is_ascii_lowercase() {
                        (c as u8 - b'a') as i32 + 1
                    } else if c.is_ascii_uppercase() {
                        -((c as u8 - b'A') as i32 + 1)
                    } else {
                        return Err(bad("letters must be a-z / A-Z"));
                    };
                    if l.unsigned_abs() > *k {
                        return Err(bad("letter out of range"));
                    }
                    letters.push(l);
                }
                GroupElem::from_word(spec, &letters)
            }
            GroupSpec::DirectProduct(fs) => {
                let inner = body
                    .strip_prefix('(')
                    .and_then(|b| b.strip_suffix(')'))
                    .ok_or_else(|| bad("expected (e1|e2|...)"))?;
                let parts = split_top_level(inner, '|');
                if parts.len() != fs.len() {
                    return Err(bad("wrong number of factors"));
                }
                let elems = fs
                    .iter()
                    .zip(&parts)
                    .map(|(f, p)| GroupElem::parse(f, p))
                    .collect::<Result<Vec<_>>>()?;
                GroupElem::from_tuple(spec, elems)
            }
        }
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.spec, &self.payload) {
            (GroupSpec::FreeAbelian(d), ElemPayload::Vector(v)) => {
                write!(f, "Z{d}:(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            (GroupSpec::Cyclic(n), ElemPayload::Residue(r)) => write!(f, "Z{n}:{r}"),
            (GroupSpec::Torus(m, n), ElemPayload::Residues(a, b)) => {
                write!(f, "T{m}x{n}:({a},{b})")
            }
            (GroupSpec::Free(k), ElemPayload::Word(w)) => {
                write!(f, "F{k}:")?;
                if w.is_empty() {
                    return write!(f, "e");
                }
                for &l in w {
                    let c = if l > 0 {
                        (b'a' + (l - 1) as u8) as char
                    } else {
                        (b'A' + (-l - 1) as u8) as char
                    };
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            (GroupSpec::DirectProduct(_), ElemPayload::Tuple(t)) => {
                write!(f, "prod:(")?;
                for (i, e) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            _ => unreachable!("payload/spec mismatch"),
        }
    }
}

/// A finite subset of the group, deduplicated and kept in the canonical
/// element order. The identity is not inserted automatically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Window {
    elems: Vec<GroupElem>,
}

impl Window {
    pub fn new(elems: Vec<GroupElem>) -> Result<Window> {
        if elems.is_empty() {
            return Err(WcError::InvalidArgument("empty window".into()));
        }
        let spec = elems[0].spec().clone();
        for e in &elems {
            if *e.spec() != spec {
                return Err(WcError::MismatchedSpecs(spec.to_string(), e.spec().to_string()));
            }
        }
        let set: BTreeSet<GroupElem> = elems.into_iter().collect();
        Ok(Window { elems: set.into_iter().collect() })
    }

    pub fn spec(&self) -> &GroupSpec {
        self.elems[0].spec()
    }

    pub fn elems(&self) -> &[GroupElem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, e: &GroupElem) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn index_of(&self, e: &GroupElem) -> Option<usize> {
        self.elems.binary_search(e).ok()
    }

    /// Closed under inversion (the identity is its own inverse).
    pub fn is_symmetric(&self) -> bool {
        self.elems.iter().all(|e| self.contains(&e.inv()))
    }

    /// Comma-separated text form.
    pub fn to_text(&self) -> String {
        self.elems
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(spec: &GroupSpec, s: &str) -> Result<Window> {
        let parts = split_top_level(s.trim(), ',');
        // FreeAbelian and Torus payloads contain commas inside parentheses;
        // split_top_level keeps those intact, but bare `a,b` pairs from the
        // CLI shorthand need re-grouping. We first try element-at-a-time.
        let elems = parts
            .iter()
            .filter(|p| !p.trim().is_empty())
            .map(|p| GroupElem::parse(spec, p))
            .collect::<Result<Vec<_>>>()?;
        Window::new(elems)
    }
}

/// All elements of word length at most `radius` with respect to the
/// distinguished symmetric generating set, in canonical order.
pub fn ball(spec: &GroupSpec, radius: usize) -> Result<Window> {
    spec.validate()?;
    let mut seen: BTreeSet<GroupElem> = BTreeSet::new();
    let mut frontier: Vec<GroupElem> = vec![spec.identity()];
    seen.insert(spec.identity());
    let gens = spec.generators();
    for _ in 0..radius {
        let mut next = Vec::new();
        for v in &frontier {
            for g in &gens {
                for w in [v.mul(g)?, v.mul(&g.inv())?] {
                    if seen.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Window::new(seen.into_iter().collect())
}

/// The Cayley graph of the group restricted to the radius-r ball: vertices
/// are ball elements (IDs = positions in canonical order), and for every
/// vertex v and generator g there is a g-labelled edge {v, vg} whenever both
/// endpoints lie in the ball.
pub fn cayley_graph(spec: &GroupSpec, radius: usize) -> Result<LocalGraph> {
    let b = ball(spec, radius)?;
    let mut g = LocalGraph::new(b.len());
    let gens = spec.generators();
    for (vi, v) in b.elems().iter().enumerate() {
        for (gi, gen) in gens.iter().enumerate() {
            let w = v.mul(gen)?;
            if let Some(wi) = b.index_of(&w) {
                g.add_edge(vi, wi, Some(gi));
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z2() -> GroupSpec {
        GroupSpec::FreeAbelian(2)
    }

    #[test]
    fn free_abelian_mul() {
        let a = GroupElem::from_vector(&z2(), vec![1, 0]).unwrap();
        let b = GroupElem::from_vector(&z2(), vec![2, 3]).unwrap();
        let c = a.mul(&b).unwrap();
        assert_eq!(c, GroupElem::from_vector(&z2(), vec![3, 3]).unwrap());
    }

    #[test]
    fn free_reduction_on_mul() {
        let f2 = GroupSpec::Free(2);
        let ab = GroupElem::from_word(&f2, &[1, 2]).unwrap();
        let binv = GroupElem::from_word(&f2, &[-2]).unwrap();
        let r = ab.mul(&binv).unwrap();
        assert_eq!(r, GroupElem::from_word(&f2, &[1]).unwrap());
    }

    #[test]
    fn cyclic_mul_wraps() {
        let z6 = GroupSpec::Cyclic(6);
        let a = GroupElem::from_residue(&z6, 4).unwrap();
        let b = GroupElem::from_residue(&z6, 5).unwrap();
        assert_eq!(a.mul(&b).unwrap(), GroupElem::from_residue(&z6, 3).unwrap());
    }

    #[test]
    fn inv_examples() {
        let a = GroupElem::from_vector(&z2(), vec![1, -2]).unwrap();
        assert_eq!(a.inv(), GroupElem::from_vector(&z2(), vec![-1, 2]).unwrap());

        let f2 = GroupSpec::Free(2);
        let ab = GroupElem::from_word(&f2, &[1, 2]).unwrap();
        assert_eq!(ab.inv(), GroupElem::from_word(&f2, &[-2, -1]).unwrap());

        let z5 = GroupSpec::Cyclic(5);
        let two = GroupElem::from_residue(&z5, 2).unwrap();
        assert_eq!(two.inv(), GroupElem::from_residue(&z5, 3).unwrap());
    }

    #[test]
    fn mismatched_specs_error() {
        let a = GroupElem::from_residue(&GroupSpec::Cyclic(5), 1).unwrap();
        let b = GroupElem::from_residue(&GroupSpec::Cyclic(6), 1).unwrap();
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn ball_z1_radius_2() {
        let z1 = GroupSpec::FreeAbelian(1);
        let b = ball(&z1, 2).unwrap();
        let got: Vec<i64> = b
            .elems()
            .iter()
            .map(|e| match e.payload() {
                ElemPayload::Vector(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(got, vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn ball_free2_sizes() {
        let f2 = GroupSpec::Free(2);
        assert_eq!(ball(&f2, 0).unwrap().len(), 1);
        assert_eq!(ball(&f2, 1).unwrap().len(), 5);
        // 1 + 4 + 4*3, cross-checked below against a BFS oracle.
        assert_eq!(ball(&f2, 2).unwrap().len(), 17);
    }

    /// Independent BFS oracle for ball sizes: expand words and reduce
    /// naively, counting distinct canonical strings.
    fn ball_size_oracle(spec: &GroupSpec, radius: usize) -> usize {
        let mut seen = BTreeSet::new();
        let mut frontier = vec![spec.identity()];
        seen.insert(spec.identity().to_string());
        for _ in 0..radius {
            let mut next = Vec::new();
            for v in &frontier {
                for g in spec.generators() {
                    for w in [v.mul(&g).unwrap(), v.mul(&g.inv()).unwrap()] {
                        if seen.insert(w.to_string()) {
                            next.push(w);
                        }
                    }
                }
            }
            frontier = next;
        }
        seen.len()
    }

    #[test]
    fn ball_sizes_match_oracle() {
        for (spec, r) in [
            (GroupSpec::FreeAbelian(2), 3),
            (GroupSpec::Free(2), 3),
            (GroupSpec::Cyclic(7), 5),
            (GroupSpec::Torus(3, 4), 4),
        ] {
            for radius in 0..=r {
                assert_eq!(
                    ball(&spec, radius).unwrap().len(),
                    ball_size_oracle(&spec, radius),
                    "{spec} radius {radius}"
                );
            }
        }
    }

    #[test]
    fn ball_monotone() {
        let f2 = GroupSpec::Free(2);
        for r in 0..3 {
            let small = ball(&f2, r).unwrap();
            let big = ball(&f2, r + 1).unwrap();
            for e in small.elems() {
                assert!(big.contains(e));
            }
        }
    }

    #[test]
    fn cayley_cyclic5_is_5_cycle() {
        let g = cayley_graph(&GroupSpec::Cyclic(5), 3).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 5);
        assert!(g.is_connected());
        assert_eq!(g.girth(), Some(5));
    }

    #[test]
    fn cayley_z2_radius1_is_cross() {
        let g = cayley_graph(&z2(), 1).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn cayley_free_is_tree() {
        for r in 1..=3 {
            let g = cayley_graph(&GroupSpec::Free(2), r).unwrap();
            assert_eq!(g.edge_count(), g.vertex_count() - 1);
            assert!(g.is_connected());
            assert_eq!(g.girth(), None, "free group Cayley ball must be acyclic");
        }
    }

    #[test]
    fn spec_roundtrip() {
        for s in ["Z^2", "Z/6", "T2x3", "F2", "prod(Z^1,F2)"] {
            let spec: GroupSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }

    #[test]
    fn elem_text_roundtrip() {
        let cases: Vec<(GroupSpec, &str)> = vec![
            (GroupSpec::FreeAbelian(2), "Z2:(1,-2)"),
            (GroupSpec::Cyclic(6), "Z6:3"),
            (GroupSpec::Free(2), "F2:abA"),
            (GroupSpec::Free(2), "F2:e"),
            (GroupSpec::Torus(2, 3), "T2x3:(1,2)"),
        ];
        for (spec, text) in cases {
            let e = GroupElem::parse(&spec, text).unwrap();
            assert_eq!(e.to_string(), text);
        }
    }

    #[test]
    fn window_dedupes_and_sorts() {
        let z1 = GroupSpec::FreeAbelian(1);
        let e = |x: i64| GroupElem::from_vector(&z1, vec![x]).unwrap();
        let w = Window::new(vec![e(1), e(0), e(1), e(-1)]).unwrap();
        assert_eq!(w.len(), 3);
        assert!(w.is_symmetric());
    }

    fn arb_elem(spec: GroupSpec) -> impl Strategy<Value = GroupElem> {
        let s = spec.clone();
        match spec {
            GroupSpec::FreeAbelian(d) => prop::collection::vec(-5i64..=5, d as usize)
                .prop_map(move |v| GroupElem::from_vector(&s, v).unwrap())
                .boxed(),
            GroupSpec::Cyclic(_) => (-20i64..=20)
                .prop_map(move |r| GroupElem::from_residue(&s, r).unwrap())
                .boxed(),
            GroupSpec::Torus(_, _) => ((-9i64..=9), (-9i64..=9))
                .prop_map(move |(a, b)| GroupElem::from_residues(&s, a, b).unwrap())
                .boxed(),
            GroupSpec::Free(k) => prop::collection::vec(
                (1..=k as i32).prop_flat_map(|l| prop_oneof![Just(l), Just(-l)]),
                0..6,
            )
            .prop_map(move |w| GroupElem::from_word(&s, &w).unwrap())
            .boxed(),
            GroupSpec::DirectProduct(_) => unimplemented!(),
        }
    }

    proptest! {
        #[test]
        fn group_laws_z2(
            a in arb_elem(GroupSpec::FreeAbelian(2)),
            b in arb_elem(GroupSpec::FreeAbelian(2)),
            c in arb_elem(GroupSpec::FreeAbelian(2)),
        ) {
            group_laws(&GroupSpec::FreeAbelian(2), &a, &b, &c);
        }

        #[test]
        fn group_laws_free(
            a in arb_elem(GroupSpec::Free(2)),
            b in arb_elem(GroupSpec::Free(2)),
            c in arb_elem(GroupSpec::Free(2)),
        ) {
            group_laws(&GroupSpec::Free(2), &a, &b, &c);
        }

        #[test]
        fn group_laws_cyclic(
            a in arb_elem(GroupSpec::Cyclic(6)),
            b in arb_elem(GroupSpec::Cyclic(6)),
            c in arb_elem(GroupSpec::Cyclic(6)),
        ) {
            group_laws(&GroupSpec::Cyclic(6), &a, &b, &c);
        }

        #[test]
        fn group_laws_torus(
            a in arb_elem(GroupSpec::Torus(3, 4)),
            b in arb_elem(GroupSpec::Torus(3, 4)),
            c in arb_elem(GroupSpec::Torus(3, 4)),
        ) {
            group_laws(&GroupSpec::Torus(3, 4), &a, &b, &c);
        }
    }

    fn group_laws(spec: &GroupSpec, a: &GroupElem, b: &GroupElem, c: &GroupElem) {
        let id = spec.identity();
        assert_eq!(id.mul(a).unwrap(), *a);
        assert_eq!(a.mul(&id).unwrap(), *a);
        assert_eq!(a.mul(&a.inv()).unwrap(), id);
        assert_eq!(
            a.mul(b).unwrap().mul(c).unwrap(),
            a.mul(&b.mul(c).unwrap()).unwrap()
        );
    }
}
