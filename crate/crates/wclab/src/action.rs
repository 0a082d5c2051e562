//! Finite group actions on `{0, ..., n-1}`: constructions (cycles, tori,
//! products, coinduction, Schreier realizations of 4-regular graphs),
//! Schreier graphs, and the chi invariant.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Result, WcError};
use crate::graph::LocalGraph;
use crate::group::{ball, ElemPayload, GroupElem, GroupSpec};
use crate::rng::SplitMix64;

/// A finite action of a group on points `0..n`: one permutation per
/// distinguished generator. The defining relations of the group family are
/// verified at construction, so every word in the generators acts
/// consistently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAction {
    spec: GroupSpec,
    n: usize,
    perms: Vec<Vec<usize>>,
    inv_perms: Vec<Vec<usize>>,
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n
        && p.iter().all(|&x| {
            if x < n && !seen[x] {
                seen[x] = true;
                true
            } else {
                false
            }
        })
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // (p ∘ q)(x) = p(q(x))
    q.iter().map(|&x| p[x]).collect()
}

fn perm_pow(p: &[usize], k: u64) -> Vec<usize> {
    let mut r: Vec<usize> = (0..p.len()).collect();
    for _ in 0..k {
        r = compose(p, &r);
    }
    r
}

fn is_identity_perm(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

/// Check the family relations for `perms[offset..offset+gen_count]`.
fn check_relations(spec: &GroupSpec, perms: &[Vec<usize>], offset: usize) -> Result<()> {
    let commute = |i: usize, j: usize| -> Result<()> {
        if compose(&perms[i], &perms[j]) != compose(&perms[j], &perms[i]) {
            return Err(WcError::RelationViolated(format!(
                "generators {i} and {j} must commute in {spec}"
            )));
        }
        Ok(())
    };
    match spec {
        GroupSpec::FreeAbelian(d) => {
            for i in 0..*d as usize {
                for j in i + 1..*d as usize {
                    commute(offset + i, offset + j)?;
                }
            }
        }
        GroupSpec::Cyclic(n) => {
            if !is_identity_perm(&perm_pow(&perms[offset], *n)) {
                return Err(WcError::RelationViolated(format!(
                    "generator must have order dividing {n}"
                )));
            }
        }
        GroupSpec::Torus(m, n) => {
            if !is_identity_perm(&perm_pow(&perms[offset], *m)) {
                return Err(WcError::RelationViolated(format!(
                    "first generator must have order dividing {m}"
                )));
            }
            if !is_identity_perm(&perm_pow(&perms[offset + 1], *n)) {
                return Err(WcError::RelationViolated(format!(
                    "second generator must have order dividing {n}"
                )));
            }
            commute(offset, offset + 1)?;
        }
        GroupSpec::Free(_) => {}
        GroupSpec::DirectProduct(fs) => {
            let mut off = offset;
            let mut spans = Vec::new();
            for f in fs {
                let c = f.generator_count();
                check_relations(f, perms, off)?;
                spans.push((off, c));
                off += c;
            }
            for (ai, &(ao, ac)) in spans.iter().enumerate() {
                for &(bo, bc) in &spans[ai + 1..] {
                    for i in 0..ac {
                        for j in 0..bc {
                            commute(ao + i, bo + j)?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

impl FiniteAction {
    pub fn new(spec: GroupSpec, n: usize, perms: Vec<Vec<usize>>) -> Result<FiniteAction> {
        spec.validate()?;
        if n == 0 {
            return Err(WcError::InvalidArgument("action needs at least one point".into()));
        }
        if perms.len() != spec.generator_count() {
            return Err(WcError::InvalidArgument(format!(
                "{spec} needs {} generator permutations, got {}",
                spec.generator_count(),
                perms.len()
            )));
        }
        for (i, p) in perms.iter().enumerate() {
            if !is_permutation(p, n) {
                return Err(WcError::NotAPermutation(format!(
                    "generator {i} image list is not a bijection on [{n}]"
                )));
            }
        }
        check_relations(&spec, &perms, 0)?;
        let inv_perms = perms.iter().map(|p| invert(p)).collect();
        Ok(FiniteAction { spec, n, perms, inv_perms })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn generator_perm(&self, i: usize) -> &[usize] {
        &self.perms[i]
    }

    fn apply_gen(&self, i: usize, power: i64, mut x: usize) -> usize {
        let (p, k) = if power >= 0 {
            (&self.perms[i], power as u64)
        } else {
            (&self.inv_perms[i], (-power) as u64)
        };
        for _ in 0..k {
            x = p[x];
        }
        x
    }

    /// Evaluate the action of `g` on point `x`.
    pub fn act(&self, g: &GroupElem, x: usize) -> Result<usize> {
        if g.spec() != &self.spec {
            return Err(WcError::MismatchedSpecs(
                self.spec.to_string(),
                g.spec().to_string(),
            ));
        }
        if x >= self.n {
            return Err(WcError::PointOutOfRange { point: x, n: self.n });
        }
        Ok(self.act_payload(g.payload(), 0, x))
    }

    fn act_payload(&self, payload: &ElemPayload, offset: usize, mut x: usize) -> usize {
        match payload {
            ElemPayload::Vector(v) => {
                // Generators commute (validated), so order is irrelevant.
                for (i, &e) in v.iter().enumerate() {
                    x = self.apply_gen(offset + i, e, x);
                }
                x
            }
            ElemPayload::Residue(r) => self.apply_gen(offset, *r as i64, x),
            ElemPayload::Residues(a, b) => {
                x = self.apply_gen(offset, *a as i64, x);
                self.apply_gen(offset + 1, *b as i64, x)
            }
            ElemPayload::Word(w) => {
                // a(l1 l2 ... lk) = a(l1) ∘ ... ∘ a(lk): apply right-to-left.
                for &l in w.iter().rev() {
                    let i = l.unsigned_abs() as usize - 1;
                    x = self.apply_gen(offset + i, l.signum() as i64, x);
                }
                x
            }
            ElemPayload::Tuple(t) => {
                let mut off = offset;
                for part in t {
                    x = self.act_payload(part.payload(), off, x);
                    off += part.spec().generator_count();
                }
                x
            }
        }
    }

    /// The permutation induced by `g` on all points.
    pub fn perm_of(&self, g: &GroupElem) -> Result<Vec<usize>> {
        (0..self.n).map(|x| self.act(g, x)).collect()
    }

    /// Schreier graph: one generator-labelled edge {x, g·x} per point per
    /// generator; loops and parallel edges kept.
    pub fn schreier(&self) -> LocalGraph {
        let mut g = LocalGraph::new(self.n);
        for (gi, p) in self.perms.iter().enumerate() {
            for (x, &y) in p.iter().enumerate() {
                g.add_edge(x, y, Some(gi));
            }
        }
        g
    }

    pub fn is_transitive(&self) -> bool {
        self.schreier().is_connected()
    }

    /// True iff no nonidentity element of the radius-`radius` ball fixes
    /// any point.
    pub fn is_free_up_to(&self, radius: usize) -> Result<bool> {
        for g in ball(&self.spec, radius)?.elems() {
            if g.is_identity() {
                continue;
            }
            for x in 0..self.n {
                if self.act(g, x)? == x {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Diagonal product action on `self.n * other.n` points; point
    /// `(x, y)` is encoded as `x * other.n + y`.
    pub fn product(&self, other: &FiniteAction) -> Result<FiniteAction> {
        if self.spec != other.spec {
            return Err(WcError::MismatchedSpecs(
                self.spec.to_string(),
                other.spec.to_string(),
            ));
        }
        let n = self.n * other.n;
        let perms = self
            .perms
            .iter()
            .zip(&other.perms)
            .map(|(p, q)| {
                (0..n)
                    .map(|z| p[z / other.n] * other.n + q[z % other.n])
                    .collect()
            })
            .collect();
        FiniteAction::new(self.spec.clone(), n, perms)
    }

    /// Line-oriented text form (see `from_text`).
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "group {}", self.spec);
        let _ = writeln!(out, "points {}", self.n);
        for (i, p) in self.perms.iter().enumerate() {
            let images = p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "gen {}: {}", self.spec.generator_name(i), images);
        }
        out
    }

    /// Parse `group <spec>` / `points <n>` / one `gen <name>: images` line
    /// per generator, in generator order.
    pub fn from_text(text: &str) -> Result<FiniteAction> {
        let mut spec: Option<GroupSpec> = None;
        let mut n: Option<usize> = None;
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut names: Vec<String> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("group ") {
                spec = Some(rest.trim().parse()?);
            } else if let Some(rest) = line.strip_prefix("points ") {
                n = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| WcError::Parse(format!("bad points line: {line}")))?,
                );
            } else if let Some(rest) = line.strip_prefix("gen ") {
                let (name, images) = rest
                    .split_once(':')
                    .ok_or_else(|| WcError::Parse(format!("bad gen line: {line}")))?;
                names.push(name.trim().to_string());
                let p = images
                    .split_whitespace()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| WcError::Parse(format!("bad gen line: {line}")))?;
                perms.push(p);
            } else {
                return Err(WcError::Parse(format!("unrecognized action line: {line}")));
            }
        }
        let spec = spec.ok_or_else(|| WcError::Parse("missing group line".into()))?;
        let n = n.ok_or_else(|| WcError::Parse("missing points line".into()))?;
        let expected: Vec<String> = (0..spec.generator_count())
            .map(|i| spec.generator_name(i))
            .collect();
        if names != expected {
            return Err(WcError::Parse(format!(
                "generator lines must be {expected:?} in order, got {names:?}"
            )));
        }
        FiniteAction::new(spec, n, perms)
    }

    /// Schreier graph as DOT with generator names as edge labels.
    pub fn schreier_dot(&self) -> String {
        let names: Vec<String> = (0..self.spec.generator_count())
            .map(|i| self.spec.generator_name(i))
            .collect();
        self.schreier().to_dot(&names)
    }
}

/// The translation action of Z on Z/nZ (the n-cycle c_n).
pub fn make_cycle(n: usize) -> Result<FiniteAction> {
    if n == 0 {
        return Err(WcError::InvalidArgument("cycle action needs n >= 1".into()));
    }
    let p = (0..n).map(|x| (x + 1) % n).collect();
    FiniteAction::new(GroupSpec::FreeAbelian(1), n, vec![p])
}

/// The translation action of Z^2 on the m x n torus (c_{m,n}); point
/// `(i, j)` is encoded as `i * n + j`.
pub fn make_torus(m: usize, n: usize) -> Result<FiniteAction> {
    if m == 0 || n == 0 {
        return Err(WcError::InvalidArgument("torus action needs m,n >= 1".into()));
    }
    let total = m * n;
    let p1 = (0..total).map(|z| ((z / n + 1) % m) * n + z % n).collect();
    let p2 = (0..total).map(|z| (z / n) * n + (z % n + 1) % n).collect();
    FiniteAction::new(GroupSpec::FreeAbelian(2), total, vec![p1, p2])
}

/// chi(g, a): least number of g-independent sets covering the points, or
/// Infinite when g fixes a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiValue {
    Finite(usize),
    Infinite,
}

impl fmt::Display for ChiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChiValue::Finite(k) => write!(f, "{k}"),
            ChiValue::Infinite => write!(f, "inf"),
        }
    }
}

/// Exact chi via the cycle structure of the permutation induced by `g`:
/// Infinite on any fixed point, else 2 if all cycles are even, else 3.
pub fn chi(a: &FiniteAction, g: &GroupElem) -> Result<ChiValue> {
    let p = a.perm_of(g)?;
    let mut seen = vec![false; p.len()];
    let mut worst = 0usize;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            len += 1;
            x = p[x];
        }
        if len == 1 {
            return Ok(ChiValue::Infinite);
        }
        worst = worst.max(if len % 2 == 0 { 2 } else { 3 });
    }
    Ok(ChiValue::Finite(worst))
}

/// Brute-force chi: try every assignment of points to k sets for k = 2, 3,
/// ..., requiring g·S ∩ S = ∅ for each set. Exponential; cross-check only.
pub fn chi_brute_force(a: &FiniteAction, g: &GroupElem) -> Result<ChiValue> {
    let p = a.perm_of(g)?;
    if p.iter().enumerate().any(|(x, &y)| x == y) {
        return Ok(ChiValue::Infinite);
    }
    // Covering by k independent sets is exactly proper k-coloring of the
    // graph joining x with g·x (sets may be taken disjoint).
    fn colorable(p: &[usize], k: usize, colors: &mut Vec<usize>, x: usize) -> bool {
        if x == p.len() {
            return true;
        }
        for c in 0..k {
            let clash = colors[..x]
                .iter()
                .enumerate()
                .any(|(y, &cy)| cy == c && (p[x] == y || p[y] == x));
            if !clash {
                colors.push(c);
                if colorable(p, k, colors, x + 1) {
                    return true;
                }
                colors.pop();
            }
        }
        false
    }
    for k in 2.. {
        if colorable(&p, k, &mut Vec::new(), 0) {
            return Ok(ChiValue::Finite(k));
        }
    }
    unreachable!()
}

/// A supported finite-index inclusion for coinduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inclusion {
    /// dZ inside Z, transversal {0, ..., d-1}.
    ZIndex(u64),
    /// (mZ x nZ) inside Z^2, transversal {0..m} x {0..n}.
    Z2Index(u64, u64),
}

impl Inclusion {
    pub fn index(&self) -> u64 {
        match self {
            Inclusion::ZIndex(d) => *d,
            Inclusion::Z2Index(m, n) => m * n,
        }
    }
}

const COINDUCE_MAX_POINTS: u64 = 1 << 22;

/// Coinduce a finite action of the subgroup up to the ambient group.
///
/// Points of the result are functions from the transversal R to the points
/// of `a`, encoded in base `a.n` with the digit at transversal position r
/// holding the value at r. The ambient generator shifts transversal slots
/// and applies the subgroup generator of `a` on wrap-around, which is the
/// cocycle law (γ·x)(r) = δ⁻¹ ·_a x(r') for γ⁻¹r = r'δ.
pub fn coinduce(a: &FiniteAction, inc: &Inclusion) -> Result<FiniteAction> {
    let base = a.point_count() as u64;
    let slots = inc.index();
    if slots == 0 {
        return Err(WcError::UnsupportedInclusion("index must be positive".into()));
    }
    let total = (0..slots).try_fold(1u64, |acc, _| {
        acc.checked_mul(base).filter(|&t| t <= COINDUCE_MAX_POINTS)
    });
    let total = total.ok_or_else(|| {
        WcError::InvalidArgument(format!(
            "coinduced action too large: {base}^{slots} points"
        ))
    })? as usize;

    let digits = |mut code: usize, k: u64| -> Vec<usize> {
        let mut d = Vec::with_capacity(k as usize);
        for _ in 0..k {
            d.push(code % base as usize);
            code /= base as usize;
        }
        d
    };
    let encode = |d: &[usize]| -> usize {
        d.iter().rev().fold(0usize, |acc, &x| acc * base as usize + x)
    };

    match inc {
        Inclusion::ZIndex(d) => {
            if *a.spec() != GroupSpec::FreeAbelian(1) {
                return Err(WcError::UnsupportedInclusion(format!(
                    "dZ <= Z coinduction needs a Z-action on the subgroup, got {}",
                    a.spec()
                )));
            }
            let sigma = a.generator_perm(0);
            let perm = (0..total)
                .map(|code| {
                    let f = digits(code, *d);
                    // (γ·f)(r) = f(r-1) for r >= 1, and σ(f(d-1)) at r = 0.
                    let mut out = vec![0usize; *d as usize];
                    for r in 1..*d as usize {
                        out[r] = f[r - 1];
                    }
                    out[0] = sigma[f[*d as usize - 1]];
                    encode(&out)
                })
                .collect();
            FiniteAction::new(GroupSpec::FreeAbelian(1), total, vec![perm])
        }
        Inclusion::Z2Index(m, n) => {
            if *a.spec() != GroupSpec::FreeAbelian(2) {
                return Err(WcError::UnsupportedInclusion(format!(
                    "(mZ x nZ) <= Z^2 coinduction needs a Z^2-action, got {}",
                    a.spec()
                )));
            }
            let (m, n) = (*m as usize, *n as usize);
            let slot = |i: usize, j: usize| i * n + j;
            let sigma1 = a.generator_perm(0);
            let sigma2 = a.generator_perm(1);
            let mut perms = Vec::new();
            for axis in 0..2 {
                let p = (0..total)
                    .map(|code| {
                        let f = digits(code, (m * n) as u64);
                        let mut out = vec![0usize; m * n];
                        for i in 0..m {
                            for j in 0..n {
                                out[slot(i, j)] = if axis == 0 {
                                    if i >= 1 {
                                        f[slot(i - 1, j)]
                                    } else {
                                        sigma1[f[slot(m - 1, j)]]
                                    }
                                } else if j >= 1 {
                                    f[slot(i, j - 1)]
                                } else {
                                    sigma2[f[slot(i, n - 1)]]
                                };
                            }
                        }
                        encode(&out)
                    })
                    .collect();
                perms.push(p);
            }
            FiniteAction::new(GroupSpec::FreeAbelian(2), total, perms)
        }
    }
}

/// Realize a connected 4-regular multigraph as the Schreier graph of an
/// F2-action: orient along an Eulerian circuit (so in-degree = out-degree
/// = 2 everywhere), then split the out-arcs into two permutations by
/// 2-coloring the arc conflict cycles.
pub fn action_from_4regular(g: &LocalGraph) -> Result<FiniteAction> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(WcError::Graph("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(WcError::Graph("graph must be connected".into()));
    }
    for v in 0..n {
        if g.degree(v) != 4 {
            return Err(WcError::Graph(format!(
                "vertex {v} has degree {}, need 4",
                g.degree(v)
            )));
        }
    }

    // Hierholzer's algorithm, deterministic: start at the vertex with the
    // least ID, take incident edges in index order.
    let start = (0..n).min_by_key(|&v| g.id_of(v)).unwrap();
    let mut adj = g.adjacency();
    for l in &mut adj {
        l.sort_unstable_by_key(|&(_, ei)| ei);
    }
    let mut next_slot = vec![0usize; n];
    let mut used = vec![false; g.edge_count()];
    let mut stack = vec![start];
    // Record traversal direction per edge: arc (tail, head).
    let mut arcs: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); g.edge_count()];
    while let Some(&v) = stack.last() {
        let mut advanced = false;
        while next_slot[v] < adj[v].len() {
            let (w, ei) = adj[v][next_slot[v]];
            next_slot[v] += 1;
            if !used[ei] {
                used[ei] = true;
                arcs[ei] = (v, w);
                stack.push(w);
                advanced = true;
                break;
            }
        }
        if !advanced {
            stack.pop();
        }
    }
    if used.iter().any(|&u| !u) {
        return Err(WcError::Graph("graph has no Eulerian circuit".into()));
    }

    // Each vertex now has out-degree 2 and in-degree 2. Split arcs into two
    // permutations: walk the conflict cycles alternating tail-mates and
    // head-mates, coloring arcs alternately.
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ei, &(t, h)) in arcs.iter().enumerate() {
        out_arcs[t].push(ei);
        in_arcs[h].push(ei);
    }
    debug_assert!(out_arcs.iter().all(|l| l.len() == 2));
    debug_assert!(in_arcs.iter().all(|l| l.len() == 2));
    let tail_mate = |ei: usize| -> usize {
        let (t, _) = arcs[ei];
        if out_arcs[t][0] == ei { out_arcs[t][1] } else { out_arcs[t][0] }
    };
    let head_mate = |ei: usize| -> usize {
        let (_, h) = arcs[ei];
        if in_arcs[h][0] == ei { in_arcs[h][1] } else { in_arcs[h][0] }
    };
    let mut color: Vec<Option<usize>> = vec![None; arcs.len()];
    for e0 in 0..arcs.len() {
        if color[e0].is_some() {
            continue;
        }
        // Alternate: an arc and its tail-mate must differ, an arc and its
        // head-mate must differ; following mates alternately traces a cycle
        // of even length (tail/head steps alternate), so 2 colors suffice.
        let mut e = e0;
        let mut c = 0usize;
        let mut step_tail = true;
        loop {
            color[e] = Some(c);
            let nxt = if step_tail { tail_mate(e) } else { head_mate(e) };
            step_tail = !step_tail;
            c = 1 - c;
            e = nxt;
            if e == e0 && step_tail {
                break;
            }
        }
    }

    let mut perms = vec![vec![usize::MAX; n], vec![usize::MAX; n]];
    for (ei, &(t, h)) in arcs.iter().enumerate() {
        let c = color[ei].unwrap();
        if perms[c][t] != usize::MAX {
            return Err(WcError::Graph("arc split failed: duplicate out-arc color".into()));
        }
        perms[c][t] = h;
    }
    let action = FiniteAction::new(GroupSpec::Free(2), n, perms)?;
    debug_assert!(edge_multiset(&action.schreier()) == edge_multiset(g));
    Ok(action)
}

/// Unordered edge multiset (endpoint pairs, labels ignored).
pub fn edge_multiset(g: &LocalGraph) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for e in g.edges() {
        *m.entry((e.u.min(e.v), e.u.max(e.v))).or_insert(0) += 1;
    }
    m
}

/// Build a connected 4-regular graph of girth at least `girth` on
/// `tree_size` vertices: start from a spanning path, then pair the missing
/// degree slots at random, only joining vertices at distance >= girth - 1
/// in the graph built so far. The output girth is re-verified; failed
/// attempts retry with fresh randomness. Deterministic for a fixed seed.
pub fn random_large_girth_4regular(
    tree_size: usize,
    girth: usize,
    seed: u64,
    max_retries: u64,
) -> Result<LocalGraph> {
    if tree_size < 2 {
        return Err(WcError::InvalidArgument("need at least 2 vertices".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let need_dist = girth.saturating_sub(1);
    for _attempt in 0..max_retries.max(1) {
        let mut g = LocalGraph::new(tree_size);
        for v in 0..tree_size - 1 {
            g.add_edge(v, v + 1, None);
        }
        // Stubs: each vertex needs degree 4.
        let mut stubs: Vec<usize> = Vec::new();
        for v in 0..tree_size {
            for _ in g.degree(v)..4 {
                stubs.push(v);
            }
        }
        let mut ok = true;
        while !stubs.is_empty() {
            let u = stubs[0];
            let dist = g.bfs_distances(u);
            let candidates: Vec<usize> = (1..stubs.len())
                .filter(|&i| {
                    let v = stubs[i];
                    v != u && dist[v].map_or(true, |d| d >= need_dist)
                })
                .collect();
            let Some(&pick) = candidates
                .get(rng.next_below(candidates.len().max(1) as u64) as usize)
            else {
                ok = false;
                break;
            };
            let v = stubs[pick];
            g.add_edge(u, v, None);
            stubs.remove(pick);
            stubs.remove(0);
        }
        if !ok {
            continue;
        }
        let girth_ok = match g.girth() {
            None => true,
            Some(got) => got >= girth,
        };
        if girth_ok && g.is_connected() && (0..tree_size).all(|v| g.degree(v) == 4) {
            return Ok(g);
        }
    }
    Err(WcError::GirthGenerationFailed { attempts: max_retries.max(1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Window;

    fn z1() -> GroupSpec {
        GroupSpec::FreeAbelian(1)
    }

    fn z_elem(k: i64) -> GroupElem {
        GroupElem::from_vector(&z1(), vec![k]).unwrap()
    }

    fn z2_elem(a: i64, b: i64) -> GroupElem {
        GroupElem::from_vector(&GroupSpec::FreeAbelian(2), vec![a, b]).unwrap()
    }

    #[test]
    fn cycle_translation() {
        let c5 = make_cycle(5).unwrap();
        assert_eq!(c5.act(&z_elem(7), 1).unwrap(), 3);
        assert_eq!(c5.act(&z1().identity(), 2).unwrap(), 2);
    }

    #[test]
    fn torus_translation() {
        let c23 = make_torus(2, 3).unwrap();
        // (0,0) encoded 0; (1,1) encoded 1*3+1 = 4.
        assert_eq!(c23.act(&z2_elem(1, 1), 0).unwrap(), 4);
        // (m, 0) acts as identity.
        for x in 0..6 {
            assert_eq!(c23.act(&z2_elem(2, 0), x).unwrap(), x);
        }
        assert!(c23.is_transitive());
    }

    #[test]
    fn cycle_examples() {
        let c3 = make_cycle(3).unwrap();
        assert_eq!(c3.generator_perm(0), &[1, 2, 0]);
        let c1 = make_cycle(1).unwrap();
        assert_eq!(c1.generator_perm(0), &[0]);
    }

    #[test]
    fn homomorphism_law_random() {
        let mut rng = SplitMix64::new(11);
        let c7 = make_cycle(7).unwrap();
        let t34 = make_torus(3, 4).unwrap();
        for _ in 0..200 {
            let g = z_elem(rng.next_below(21) as i64 - 10);
            let h = z_elem(rng.next_below(21) as i64 - 10);
            let x = rng.next_below(7) as usize;
            assert_eq!(
                c7.act(&g.mul(&h).unwrap(), x).unwrap(),
                c7.act(&g, c7.act(&h, x).unwrap()).unwrap()
            );
            let g2 = z2_elem(rng.next_below(9) as i64 - 4, rng.next_below(9) as i64 - 4);
            let h2 = z2_elem(rng.next_below(9) as i64 - 4, rng.next_below(9) as i64 - 4);
            let y = rng.next_below(12) as usize;
            assert_eq!(
                t34.act(&g2.mul(&h2).unwrap(), y).unwrap(),
                t34.act(&g2, t34.act(&h2, y).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn product_counts_and_transitivity() {
        let c2 = make_cycle(2).unwrap();
        let c3 = make_cycle(3).unwrap();
        let p22 = c2.product(&c2).unwrap();
        assert_eq!(p22.point_count(), 4);
        assert!(!p22.is_transitive(), "diagonal is invariant");
        let p23 = c2.product(&c3).unwrap();
        assert!(p23.is_transitive());
    }

    #[test]
    fn product_projections_equivariant() {
        let c3 = make_cycle(3).unwrap();
        let c4 = make_cycle(4).unwrap();
        let p = c3.product(&c4).unwrap();
        let g = z_elem(5);
        for z in 0..12 {
            let gz = p.act(&g, z).unwrap();
            assert_eq!(gz / 4, c3.act(&g, z / 4).unwrap());
            assert_eq!(gz % 4, c4.act(&g, z % 4).unwrap());
        }
    }

    #[test]
    fn c6_isomorphic_to_product_c2_c3() {
        // Both are transitive Z-actions on 6 points; find an explicit
        // equivariant bijection by choosing the image of point 0.
        let c6 = make_cycle(6).unwrap();
        let p = make_cycle(2).unwrap().product(&make_cycle(3).unwrap()).unwrap();
        let gen = z_elem(1);
        let found = (0..6).any(|img0| {
            let mut phi = vec![usize::MAX; 6];
            let mut x = 0usize;
            let mut y = img0;
            for _ in 0..6 {
                phi[x] = y;
                x = c6.act(&gen, x).unwrap();
                y = p.act(&gen, y).unwrap();
            }
            let mut sorted = phi.clone();
            sorted.sort_unstable();
            sorted == (0..6).collect::<Vec<_>>()
        });
        assert!(found);
    }

    #[test]
    fn schreier_shapes() {
        let s5 = make_cycle(5).unwrap().schreier();
        assert_eq!(s5.vertex_count(), 5);
        assert_eq!(s5.edge_count(), 5);
        assert_eq!(s5.girth(), Some(5));

        let s1 = make_cycle(1).unwrap().schreier();
        assert_eq!(s1.vertex_count(), 1);
        assert_eq!(s1.edge_count(), 1);
        assert_eq!(s1.girth(), Some(1), "single loop");

        let s22 = make_torus(2, 2).unwrap().schreier();
        assert_eq!(s22.vertex_count(), 4);
        assert_eq!(s22.edge_count(), 8, "each generator pairs points twice");
    }

    #[test]
    fn freeness_radius() {
        let c5 = make_cycle(5).unwrap();
        assert!(c5.is_free_up_to(4).unwrap());
        assert!(!c5.is_free_up_to(5).unwrap(), "+5 acts as identity");
        let c33 = make_torus(3, 3).unwrap();
        assert!(c33.is_free_up_to(2).unwrap());
        assert!(!c33.is_free_up_to(3).unwrap());
    }

    #[test]
    fn freeness_matches_chi_definition() {
        for a in [make_cycle(4).unwrap(), make_torus(2, 3).unwrap()] {
            for r in 1..=4 {
                let free = a.is_free_up_to(r).unwrap();
                let by_chi = ball(a.spec(), r)
                    .unwrap()
                    .elems()
                    .iter()
                    .filter(|g| !g.is_identity())
                    .all(|g| chi(&a, g).unwrap() != ChiValue::Infinite);
                assert_eq!(free, by_chi, "{} radius {r}", a.spec());
            }
        }
    }

    #[test]
    fn chi_small_cases() {
        let c2 = make_cycle(2).unwrap();
        assert_eq!(chi(&c2, &z_elem(1)).unwrap(), ChiValue::Finite(2));
        let c1 = make_cycle(1).unwrap();
        assert_eq!(chi(&c1, &z_elem(1)).unwrap(), ChiValue::Infinite);
        let c3 = make_cycle(3).unwrap();
        assert_eq!(chi(&c3, &z_elem(1)).unwrap(), ChiValue::Finite(3));
        let c22 = make_torus(2, 2).unwrap();
        assert_eq!(chi(&c22, &z2_elem(1, 0)).unwrap(), ChiValue::Finite(2));
    }

    #[test]
    fn chi_matches_brute_force_cycles() {
        for n in 1..=12 {
            let cn = make_cycle(n).unwrap();
            for k in 0..=n as i64 {
                let g = z_elem(k);
                assert_eq!(
                    chi(&cn, &g).unwrap(),
                    chi_brute_force(&cn, &g).unwrap(),
                    "c_{n}, g = {k}"
                );
            }
        }
    }

    #[test]
    fn chi_matches_brute_force_random_perms() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..20 {
            let n = 2 + rng.next_below(7) as usize;
            // Random permutation by Fisher-Yates.
            let mut p: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.next_below(i as u64 + 1) as usize;
                p.swap(i, j);
            }
            let a = FiniteAction::new(z1(), n, vec![p]).unwrap();
            let g = z_elem(1);
            assert_eq!(chi(&a, &g).unwrap(), chi_brute_force(&a, &g).unwrap());
        }
    }

    #[test]
    fn relation_checks_reject_bad_perms() {
        // Cyclic(3) generator of order 2 violates the order relation.
        assert!(FiniteAction::new(GroupSpec::Cyclic(3), 2, vec![vec![1, 0]]).is_err());
        // Non-commuting Z^2 generators.
        let swap01 = vec![1, 0, 2];
        let swap12 = vec![0, 2, 1];
        assert!(
            FiniteAction::new(GroupSpec::FreeAbelian(2), 3, vec![swap01, swap12]).is_err()
        );
        // Not a bijection.
        assert!(FiniteAction::new(z1(), 2, vec![vec![0, 0]]).is_err());
    }

    #[test]
    fn action_text_roundtrip() {
        let a = make_torus(2, 3).unwrap();
        let text = a.to_text();
        let back = FiniteAction::from_text(&text).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn coinduce_identity_index() {
        let c3 = make_cycle(3).unwrap();
        let co = coinduce(&c3, &Inclusion::ZIndex(1)).unwrap();
        assert_eq!(co, c3);
    }

    #[test]
    fn coinduce_trivial_action_is_coordinate_swap() {
        // Trivial Z-action on 2 points, coinduced along 2Z <= Z: Z acts on
        // the 4 functions {0,1}^2 by swapping the two coordinates.
        let trivial = FiniteAction::new(z1(), 2, vec![vec![0, 1]]).unwrap();
        let co = coinduce(&trivial, &Inclusion::ZIndex(2)).unwrap();
        assert_eq!(co.point_count(), 4);
        // Codes: f = (f(0), f(1)) -> f(0) + 2 f(1). Swap: 1 <-> 2.
        assert_eq!(co.generator_perm(0), &[0, 2, 1, 3]);
        let g1 = z_elem(1);
        let fixed = (0..4)
            .filter(|&x| co.act(&g1, x).unwrap() == x)
            .count();
        assert_eq!(fixed, 2);
    }

    #[test]
    fn coinduce_cocycle_law_z2() {
        // c_2 as a Z^2-action on the subgroup side (both generators swap),
        // coinduced along (2Z x 2Z) <= Z^2: relations must hold and the
        // element (2,0) must act like the subgroup generator slot-wise.
        let sub = FiniteAction::new(
            GroupSpec::FreeAbelian(2),
            2,
            vec![vec![1, 0], vec![1, 0]],
        )
        .unwrap();
        let co = coinduce(&sub, &Inclusion::Z2Index(2, 2)).unwrap();
        assert_eq!(co.point_count(), 16);
        // (2,0) is in the subgroup: on each function it applies sigma1 to
        // every slot (since shifting twice wraps each row exactly once).
        let g = z2_elem(2, 0);
        for code in 0..16usize {
            let expect = (0..4).fold(0usize, |acc, r| {
                let bit = (code >> r) & 1;
                acc | ((1 - bit) << r)
            });
            assert_eq!(co.act(&g, code).unwrap(), expect);
        }
    }

    /// All equivariant maps between two actions of the same group, found by
    /// brute force over all functions (oracle-sized inputs only).
    fn hom_count(from: &FiniteAction, to: &FiniteAction, gens: &[GroupElem]) -> usize {
        let n = from.point_count();
        let m = to.point_count();
        let total = (m as u64).pow(n as u32);
        (0..total)
            .filter(|&code| {
                let f: Vec<usize> = (0..n)
                    .map(|i| ((code / (m as u64).pow(i as u32)) % m as u64) as usize)
                    .collect();
                gens.iter().all(|g| {
                    (0..n).all(|x| {
                        f[from.act(g, x).unwrap()] == to.act(g, f[x]).unwrap()
                    })
                })
            })
            .count()
    }

    #[test]
    fn coinduce_adjunction_count() {
        // b = c_2 as Z-action; restrict to 2Z (generator acts by +2 = id);
        // a = trivial on 2 points. |hom(b|_Delta, a)| must equal
        // |hom(b, coinduce(a))|.
        let b = make_cycle(2).unwrap();
        let a = FiniteAction::new(z1(), 2, vec![vec![0, 1]]).unwrap();
        // b restricted to 2Z: generator (of the subgroup, = +2 in Z) acts as
        // the identity on b's 2 points.
        let b_restricted = FiniteAction::new(z1(), 2, vec![vec![0, 1]]).unwrap();
        let co = coinduce(&a, &Inclusion::ZIndex(2)).unwrap();
        let g1 = vec![z_elem(1)];
        let lhs = hom_count(&b_restricted, &a, &g1);
        let rhs = hom_count(&b, &co, &g1);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, 4);
    }

    #[test]
    fn four_regular_single_vertex_two_loops() {
        let mut g = LocalGraph::new(1);
        g.add_edge(0, 0, None);
        g.add_edge(0, 0, None);
        let a = action_from_4regular(&g).unwrap();
        assert_eq!(a.generator_perm(0), &[0]);
        assert_eq!(a.generator_perm(1), &[0]);
    }

    #[test]
    fn four_regular_k5() {
        let mut g = LocalGraph::new(5);
        for u in 0..5 {
            for v in u + 1..5 {
                g.add_edge(u, v, None);
            }
        }
        let a = action_from_4regular(&g).unwrap();
        assert_eq!(edge_multiset(&a.schreier()), edge_multiset(&g));
    }

    #[test]
    fn four_regular_doubled_cycle() {
        let mut g = LocalGraph::new(6);
        for v in 0..6 {
            g.add_edge(v, (v + 1) % 6, None);
            g.add_edge(v, (v + 1) % 6, None);
        }
        let a = action_from_4regular(&g).unwrap();
        assert_eq!(edge_multiset(&a.schreier()), edge_multiset(&g));
    }

    #[test]
    fn four_regular_random_graphs_roundtrip() {
        let mut count = 0;
        for seed in 0..100u64 {
            let size = 6 + (seed % 20) as usize * 2;
            if let Ok(g) = random_large_girth_4regular(size, 1, seed, 5) {
                let a = action_from_4regular(&g).unwrap();
                assert_eq!(edge_multiset(&a.schreier()), edge_multiset(&g), "seed {seed}");
                count += 1;
                if count >= 50 {
                    return;
                }
            }
        }
        assert!(count >= 50, "only {count} random 4-regular graphs generated");
    }

    #[test]
    fn four_regular_rejects_bad_inputs() {
        let mut tri = LocalGraph::new(3);
        tri.add_edge(0, 1, None);
        tri.add_edge(1, 2, None);
        tri.add_edge(2, 0, None);
        assert!(action_from_4regular(&tri).is_err(), "degree 2, not 4");
    }

    #[test]
    fn girth_generator_girth1_first_try() {
        let g = random_large_girth_4regular(10, 1, 3, 1).unwrap();
        assert!(g.is_connected());
        assert!((0..10).all(|v| g.degree(v) == 4));
    }

    #[test]
    fn girth_generator_girth4() {
        let g = random_large_girth_4regular(200, 4, 7, 50).unwrap();
        assert!(g.girth().map_or(true, |c| c >= 4));
        assert!(g.is_connected());
        assert!((0..200).all(|v| g.degree(v) == 4));
    }

    #[test]
    fn girth_generator_deterministic() {
        let a = random_large_girth_4regular(100, 3, 12, 50).unwrap();
        let b = random_large_girth_4regular(100, 3, 12, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn high_girth_schreier_action_is_free_on_ball() {
        // Mirrors the girth argument: girth >= 2r+1 forces freeness up to r.
        let g = random_large_girth_4regular(300, 5, 21, 100).unwrap();
        assert!(g.girth().map_or(true, |c| c >= 5));
        let a = action_from_4regular(&g).unwrap();
        assert!(a.is_free_up_to(2).unwrap());
    }

    #[test]
    fn window_of_action_elements_parses() {
        // Smoke test tying the group text forms to action evaluation.
        let w = Window::parse(&z1(), "Z1:(0),Z1:(1)").unwrap();
        let c4 = make_cycle(4).unwrap();
        assert_eq!(c4.act(&w.elems()[1], 3).unwrap(), 0);
    }
}
