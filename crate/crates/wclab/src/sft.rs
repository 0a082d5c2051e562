//! Shifts of finite type: construction of the coloring, period, and tiling
//! shifts, the homomorphism search from finite actions into SFTs, and the
//! classical one-dimensional decisions (nonemptiness, mixing).

use std::collections::{BTreeMap, BTreeSet};

use crate::action::FiniteAction;
use crate::csp::{Constraint, Csp, SolveOutcome, VarOrder};
use crate::error::{Result, WcError};
use crate::group::{GroupElem, GroupSpec, Window};

/// How the allowed window patterns are represented.
///
/// `Explicit` lists full window tuples. `EdgeFactored` stores, per
/// non-identity window element, the set of (value at identity, value at that
/// element) pairs; a tuple is allowed iff every pair check passes. The
/// factored form is required for the larger tiling shifts, whose explicit
/// tables would be astronomically large.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AllowedSet {
    Explicit(BTreeSet<Vec<usize>>),
    /// Keyed by window slot index (identity slot excluded).
    EdgeFactored(BTreeMap<usize, BTreeSet<(usize, usize)>>),
}

/// A shift of finite type: alphabet, window of definition, allowed patterns.
/// A labelling f of an action is a point of the SFT when the pattern
/// γ ↦ f(γ·x) is allowed at every point x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftSpec {
    group: GroupSpec,
    alphabet: Vec<String>,
    window: Window,
    allowed: AllowedSet,
    /// When set to p: a structural invariant promised by the constructor
    /// that every valid configuration on every finite action partitions the
    /// points into blocks of exactly p (as tiling shifts do), so no action
    /// whose point count is not a multiple of p admits a homomorphism.
    block_size: Option<usize>,
}

impl SftSpec {
    pub fn new_explicit(
        group: GroupSpec,
        alphabet: Vec<String>,
        window: Window,
        tuples: BTreeSet<Vec<usize>>,
    ) -> Result<SftSpec> {
        if alphabet.is_empty() {
            return Err(WcError::InvalidArgument("alphabet must be nonempty".into()));
        }
        if window.spec() != &group {
            return Err(WcError::MismatchedSpecs(
                group.to_string(),
                window.spec().to_string(),
            ));
        }
        for t in &tuples {
            if t.len() != window.len() || t.iter().any(|&s| s >= alphabet.len()) {
                return Err(WcError::InvalidArgument(format!(
                    "allowed tuple {t:?} does not fit window/alphabet"
                )));
            }
        }
        Ok(SftSpec {
            group,
            alphabet,
            window,
            allowed: AllowedSet::Explicit(tuples),
            block_size: None,
        })
    }

    pub fn new_edge_factored(
        group: GroupSpec,
        alphabet: Vec<String>,
        window: Window,
        pairs: BTreeMap<usize, BTreeSet<(usize, usize)>>,
    ) -> Result<SftSpec> {
        if alphabet.is_empty() {
            return Err(WcError::InvalidArgument("alphabet must be nonempty".into()));
        }
        if window.spec() != &group {
            return Err(WcError::MismatchedSpecs(
                group.to_string(),
                window.spec().to_string(),
            ));
        }
        let id_slot = window
            .index_of(&group.identity())
            .ok_or_else(|| {
                WcError::InvalidArgument(
                    "edge-factored SFT window must contain the identity".into(),
                )
            })?;
        for slot in 0..window.len() {
            if slot == id_slot {
                continue;
            }
            let p = pairs.get(&slot).ok_or_else(|| {
                WcError::InvalidArgument(format!(
                    "edge-factored SFT missing pair set for window slot {slot}"
                ))
            })?;
            if p.iter().any(|&(a, b)| a >= alphabet.len() || b >= alphabet.len()) {
                return Err(WcError::InvalidArgument(format!(
                    "pair set for slot {slot} has out-of-range symbols"
                )));
            }
        }
        if pairs.contains_key(&id_slot) || pairs.len() != window.len() - 1 {
            return Err(WcError::InvalidArgument(
                "edge-factored pair sets must cover exactly the non-identity slots".into(),
            ));
        }
        Ok(SftSpec {
            group,
            alphabet,
            window,
            allowed: AllowedSet::EdgeFactored(pairs),
            block_size: None,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn allowed(&self) -> &AllowedSet {
        &self.allowed
    }

    pub fn block_size(&self) -> Option<usize> {
        self.block_size
    }

    /// Declare the block-partition invariant (see the field doc). Only call
    /// this for SFTs where the invariant is actually a theorem: the tiling
    /// constructors prove it because a cell's symbol determines its whole
    /// piece, membership is mutual, and distinct pieces are disjoint.
    pub fn with_block_size(mut self, p: usize) -> SftSpec {
        self.block_size = Some(p);
        self
    }

    /// Is the full-window tuple (in window order) allowed?
    pub fn is_allowed(&self, tuple: &[usize]) -> bool {
        if tuple.len() != self.window.len() || tuple.iter().any(|&s| s >= self.alphabet.len())
        {
            return false;
        }
        match &self.allowed {
            AllowedSet::Explicit(set) => set.contains(tuple),
            AllowedSet::EdgeFactored(pairs) => {
                let id_slot = self.window.index_of(&self.group.identity()).unwrap();
                pairs
                    .iter()
                    .all(|(&slot, set)| set.contains(&(tuple[id_slot], tuple[slot])))
            }
        }
    }

    /// True when no tuple at all is allowed (so the SFT is trivially empty).
    pub fn no_allowed_tuples(&self) -> bool {
        match &self.allowed {
            AllowedSet::Explicit(set) => set.is_empty(),
            AllowedSet::EdgeFactored(pairs) => pairs.values().any(|p| p.is_empty()),
        }
    }

    /// Expand to an explicit tuple list; refuses when the table would exceed
    /// `cap` candidate tuples.
    pub fn to_explicit_tuples(&self, cap: u64) -> Result<BTreeSet<Vec<usize>>> {
        match &self.allowed {
            AllowedSet::Explicit(set) => Ok(set.clone()),
            AllowedSet::EdgeFactored(_) => {
                let k = self.alphabet.len() as u64;
                let total = (0..self.window.len())
                    .try_fold(1u64, |acc, _| acc.checked_mul(k).filter(|&t| t <= cap))
                    .ok_or_else(|| {
                        WcError::InvalidArgument(
                            "edge-factored SFT too large to expand explicitly".into(),
                        )
                    })?;
                let mut out = BTreeSet::new();
                let w = self.window.len();
                for code in 0..total {
                    let mut c = code;
                    let mut t = vec![0usize; w];
                    for slot in (0..w).rev() {
                        t[slot] = (c % k) as usize;
                        c /= k;
                    }
                    if self.is_allowed(&t) {
                        out.insert(t);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Translate the window by `shift` (multiplying every element on the
    /// left); the subshift is unchanged, patterns are re-indexed.
    pub fn translate(&self, shift: &GroupElem) -> Result<SftSpec> {
        let new_elems: Vec<GroupElem> = self
            .window
            .elems()
            .iter()
            .map(|e| shift.mul(e))
            .collect::<Result<Vec<_>>>()?;
        let new_window = Window::new(new_elems)?;
        // Map old slot -> new slot.
        let slot_map: Vec<usize> = self
            .window
            .elems()
            .iter()
            .map(|e| new_window.index_of(&shift.mul(e).unwrap()).unwrap())
            .collect();
        let allowed = match &self.allowed {
            AllowedSet::Explicit(set) => {
                let mut out = BTreeSet::new();
                for t in set {
                    let mut nt = vec![0usize; t.len()];
                    for (old, &new) in slot_map.iter().enumerate() {
                        nt[new] = t[old];
                    }
                    out.insert(nt);
                }
                AllowedSet::Explicit(out)
            }
            AllowedSet::EdgeFactored(pairs) => AllowedSet::EdgeFactored(
                pairs
                    .iter()
                    .map(|(&slot, set)| (slot_map[slot], set.clone()))
                    .collect(),
            ),
        };
        Ok(SftSpec {
            group: self.group.clone(),
            alphabet: self.alphabet.clone(),
            window: new_window,
            allowed,
            block_size: self.block_size,
        })
    }

    pub fn symbol_index(&self, name: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| WcError::Parse(format!("unknown symbol {name:?}")))
    }

    /// Line-oriented text form (see `from_text`).
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "group {}", self.group);
        let _ = writeln!(out, "alphabet {}", self.alphabet.join(" "));
        let _ = writeln!(out, "window {}", self.window.to_text());
        if let Some(p) = self.block_size {
            let _ = writeln!(out, "blocks {p}");
        }
        match &self.allowed {
            AllowedSet::Explicit(set) => {
                for t in set {
                    let names: Vec<&str> =
                        t.iter().map(|&s| self.alphabet[s].as_str()).collect();
                    let _ = writeln!(out, "allow {}", names.join(" "));
                }
            }
            AllowedSet::EdgeFactored(pairs) => {
                for (&slot, set) in pairs {
                    let elem = &self.window.elems()[slot];
                    for &(a, b) in set {
                        let _ = writeln!(
                            out,
                            "pair {} {} {}",
                            elem, self.alphabet[a], self.alphabet[b]
                        );
                    }
                }
            }
        }
        out
    }

    /// Parse `group`/`alphabet`/`window` headers followed by either `allow
    /// <symbol per slot>` lines (explicit) or `pair <elem> <a> <b>` lines
    /// (edge-factored); the two kinds must not be mixed.
    pub fn from_text(text: &str) -> Result<SftSpec> {
        let mut group: Option<GroupSpec> = None;
        let mut alphabet: Option<Vec<String>> = None;
        let mut window: Option<Window> = None;
        let mut allow_lines: Vec<String> = Vec::new();
        let mut pair_lines: Vec<String> = Vec::new();
        let mut block_size: Option<usize> = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("group ") {
                group = Some(rest.trim().parse()?);
            } else if let Some(rest) = line.strip_prefix("alphabet ") {
                alphabet = Some(rest.split_whitespace().map(String::from).collect());
            } else if let Some(rest) = line.strip_prefix("window ") {
                let g = group.as_ref().ok_or_else(|| {
                    WcError::Parse("window line before group line".into())
                })?;
                window = Some(Window::parse(g, rest)?);
            } else if let Some(rest) = line.strip_prefix("blocks ") {
                block_size = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| WcError::Parse(format!("bad blocks line: {line}")))?,
                );
            } else if let Some(rest) = line.strip_prefix("allow ") {
                allow_lines.push(rest.to_string());
            } else if let Some(rest) = line.strip_prefix("pair ") {
                pair_lines.push(rest.to_string());
            } else {
                return Err(WcError::Parse(format!("unrecognized SFT line: {line}")));
            }
        }
        let group = group.ok_or_else(|| WcError::Parse("missing group line".into()))?;
        let alphabet = alphabet.ok_or_else(|| WcError::Parse("missing alphabet line".into()))?;
        let window = window.ok_or_else(|| WcError::Parse("missing window line".into()))?;
        if !pair_lines.is_empty() && !allow_lines.is_empty() {
            return Err(WcError::Parse("cannot mix allow and pair lines".into()));
        }
        let probe = SftSpec {
            group: group.clone(),
            alphabet: alphabet.clone(),
            window: window.clone(),
            allowed: AllowedSet::Explicit(BTreeSet::new()),
            block_size: None,
        };
        let finish = |x: SftSpec| match block_size {
            Some(p) => x.with_block_size(p),
            None => x,
        };
        if pair_lines.is_empty() {
            let mut tuples = BTreeSet::new();
            for l in &allow_lines {
                let names: Vec<&str> = l.split_whitespace().collect();
                if names.len() != window.len() {
                    return Err(WcError::Parse(format!(
                        "allow line has {} symbols, window has {}",
                        names.len(),
                        window.len()
                    )));
                }
                let t = names
                    .iter()
                    .map(|n| probe.symbol_index(n))
                    .collect::<Result<Vec<_>>>()?;
                tuples.insert(t);
            }
            SftSpec::new_explicit(group, alphabet, window, tuples).map(finish)
        } else {
            let mut pairs: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
            let id_slot = window.index_of(&group.identity());
            for slot in 0..window.len() {
                if Some(slot) != id_slot {
                    pairs.entry(slot).or_default();
                }
            }
            for l in &pair_lines {
                let parts: Vec<&str> = l.split_whitespace().collect();
                let [elem, a, b] = parts.as_slice() else {
                    return Err(WcError::Parse(format!("bad pair line: {l}")));
                };
                let e = GroupElem::parse(&group, elem)?;
                let slot = window.index_of(&e).ok_or_else(|| {
                    WcError::Parse(format!("pair element {e} not in window"))
                })?;
                let a = probe.symbol_index(a)?;
                let b = probe.symbol_index(b)?;
                pairs.entry(slot).or_default().insert((a, b));
            }
            SftSpec::new_edge_factored(group, alphabet, window, pairs).map(finish)
        }
    }
}

/// Convenience: a window of Z offsets.
pub fn z_window(offsets: &[i64]) -> Window {
    let z = GroupSpec::FreeAbelian(1);
    Window::new(
        offsets
            .iter()
            .map(|&o| GroupElem::from_vector(&z, vec![o]).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Convenience: a window of Z^2 offsets.
pub fn z2_window(offsets: &[(i64, i64)]) -> Window {
    let z2 = GroupSpec::FreeAbelian(2);
    Window::new(
        offsets
            .iter()
            .map(|&(a, b)| GroupElem::from_vector(&z2, vec![a, b]).unwrap())
            .collect(),
    )
    .unwrap()
}

/// The proper-coloring shift over a symmetric window: configurations are
/// exactly the proper colorings of the Cayley graph on W-edges, with
/// |W ∖ {id}| + 1 colors.
pub fn proper_coloring_sft(w: &Window) -> Result<SftSpec> {
    if !w.is_symmetric() {
        return Err(WcError::NonSymmetricWindow(w.to_text()));
    }
    let group = w.spec().clone();
    let id = group.identity();
    let non_id: Vec<GroupElem> = w
        .elems()
        .iter()
        .filter(|e| !e.is_identity())
        .cloned()
        .collect();
    if non_id.is_empty() {
        return Err(WcError::InvalidArgument(
            "coloring window needs a non-identity element".into(),
        ));
    }
    let k = non_id.len() + 1;
    let alphabet: Vec<String> = (0..k).map(|c| c.to_string()).collect();
    let mut elems = non_id.clone();
    elems.push(id.clone());
    let window = Window::new(elems)?;
    let id_slot = window.index_of(&id).unwrap();
    let differ: BTreeSet<(usize, usize)> = (0..k)
        .flat_map(|a| (0..k).filter(move |&b| a != b).map(move |b| (a, b)))
        .collect();
    let pairs: BTreeMap<usize, BTreeSet<(usize, usize)>> = (0..window.len())
        .filter(|&s| s != id_slot)
        .map(|s| (s, differ.clone()))
        .collect();
    SftSpec::new_edge_factored(group, alphabet, window, pairs)
}

/// The period-p shift: alphabet Z/p, window {0,1}, successor must be +1.
/// Nonempty homomorphism target for c_m exactly when p divides m.
pub fn period_sft(p: usize) -> Result<SftSpec> {
    if p == 0 {
        return Err(WcError::InvalidArgument("period must be positive".into()));
    }
    let alphabet: Vec<String> = (0..p).map(|c| c.to_string()).collect();
    let tuples: BTreeSet<Vec<usize>> = (0..p).map(|i| vec![i, (i + 1) % p]).collect();
    SftSpec::new_explicit(GroupSpec::FreeAbelian(1), alphabet, z_window(&[0, 1]), tuples)
}

/// Enumerate the connected (in the left Cayley sense: u adjacent to g·u)
/// size-p subsets of the group that contain the identity, in canonical
/// order. These are the tile shapes as seen from one of their cells.
pub fn rooted_pieces(spec: &GroupSpec, p: usize) -> Result<Vec<BTreeSet<GroupElem>>> {
    if p == 0 {
        return Err(WcError::InvalidArgument("piece size must be positive".into()));
    }
    let gens = spec.generators();
    let steps: Vec<GroupElem> = gens
        .iter()
        .flat_map(|g| [g.clone(), g.inv()])
        .collect();
    let mut level: BTreeSet<BTreeSet<GroupElem>> =
        [[spec.identity()].into_iter().collect()].into_iter().collect();
    for _ in 1..p {
        let mut next = BTreeSet::new();
        for s in &level {
            for u in s {
                for g in &steps {
                    let v = g.mul(u)?;
                    if !s.contains(&v) {
                        let mut bigger = s.clone();
                        bigger.insert(v);
                        next.insert(bigger);
                    }
                }
            }
        }
        level = next;
    }
    Ok(level.into_iter().collect())
}

const TILING_Z2_MAX: usize = 5;
const TILING_FREE_MAX: usize = 3;

fn tiling_sft(spec: &GroupSpec, p: usize) -> Result<SftSpec> {
    let pieces = rooted_pieces(spec, p)?;
    let index_of = |s: &BTreeSet<GroupElem>| pieces.binary_search_by(|x| x.cmp(s)).ok();
    let alphabet: Vec<String> = (0..pieces.len()).map(|i| format!("t{i}")).collect();
    let gens = spec.generators();
    let mut elems: Vec<GroupElem> = gens.iter().flat_map(|g| [g.clone(), g.inv()]).collect();
    elems.push(spec.identity());
    let window = Window::new(elems)?;
    let id_slot = window.index_of(&spec.identity()).unwrap();
    let mut pairs: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for slot in 0..window.len() {
        if slot == id_slot {
            continue;
        }
        let gamma = &window.elems()[slot];
        let gamma_inv = gamma.inv();
        let mut set = BTreeSet::new();
        for (i, t) in pieces.iter().enumerate() {
            if t.contains(gamma) {
                // Neighbor is in the same tile: its view is T·γ⁻¹.
                let shifted: BTreeSet<GroupElem> = t
                    .iter()
                    .map(|u| u.mul(&gamma_inv))
                    .collect::<Result<_>>()?;
                let j = index_of(&shifted).ok_or_else(|| {
                    WcError::InvalidArgument("tile shift left the alphabet".into())
                })?;
                set.insert((i, j));
            } else {
                // Different tiles: the neighbor's tile must not reach back.
                for (j, t2) in pieces.iter().enumerate() {
                    if !t2.contains(&gamma_inv) {
                        set.insert((i, j));
                    }
                }
            }
        }
        pairs.insert(slot, set);
    }
    // A configuration assigns each cell a rooted piece; the pair rules force
    // all p cells of that piece to carry matching labels, membership is
    // mutual, and two pieces sharing a cell coincide. So valid labellings
    // partition the points into blocks of exactly p cells.
    Ok(SftSpec::new_edge_factored(spec.clone(), alphabet, window, pairs)?.with_block_size(p))
}

/// The Z^2 tiling shift T_p: configurations correspond exactly to tilings
/// of the plane by connected p-cell polyomino pieces.
pub fn tiling_sft_z2(p: usize) -> Result<SftSpec> {
    if p == 0 || p > TILING_Z2_MAX {
        return Err(WcError::InvalidArgument(format!(
            "tiling piece size must be in 1..={TILING_Z2_MAX}"
        )));
    }
    tiling_sft(&GroupSpec::FreeAbelian(2), p)
}

/// The F2 tiling shift for small pieces (rooted subtrees of the Cayley
/// tree of size p).
pub fn tiling_sft_free2(p: usize) -> Result<SftSpec> {
    if p == 0 || p > TILING_FREE_MAX {
        return Err(WcError::InvalidArgument(format!(
            "free-group tiling piece size must be in 1..={TILING_FREE_MAX}"
        )));
    }
    tiling_sft(&GroupSpec::Free(2), p)
}

/// Homomorphism search result. `Yes` carries the labelling (one symbol per
/// point) and, when hit patterns were requested, the anchor point chosen for
/// each hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomVerdict {
    Yes { labelling: Vec<usize>, hit_points: Vec<usize> },
    No,
    Unknown,
}

impl HomVerdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            HomVerdict::Yes { .. } => 0,
            HomVerdict::No => 1,
            HomVerdict::Unknown => 2,
        }
    }
}

/// Search for a labelling of `a` landing in the SFT `x`, with every pattern
/// in `hits` required to occur at at least one point. Exhaustive (so `No` is
/// a proof) unless the node budget (0 = unlimited) runs out.
pub fn hom_exists(
    a: &FiniteAction,
    x: &SftSpec,
    hits: &[Vec<usize>],
    order: VarOrder,
    budget: u64,
) -> Result<HomVerdict> {
    if a.spec() != x.group() {
        return Err(WcError::MismatchedSpecs(
            a.spec().to_string(),
            x.group().to_string(),
        ));
    }
    for h in hits {
        if h.len() != x.window().len() || h.iter().any(|&s| s >= x.alphabet().len()) {
            return Err(WcError::InvalidArgument(format!(
                "hit pattern {h:?} does not fit the SFT window/alphabet"
            )));
        }
    }
    let n = a.point_count();
    // Block-partition invariant: configurations split the points into
    // blocks of exactly `p`, so a non-multiple point count is an immediate
    // refutation — a counting argument that plain backtracking would have
    // to rediscover by exhausting the whole search space.
    if let Some(p) = x.block_size() {
        if p > 0 && n % p != 0 {
            return Ok(HomVerdict::No);
        }
    }
    // neighbor[x][slot] = the point (window elem)·x.
    let mut neighbor = vec![vec![0usize; x.window().len()]; n];
    for pt in 0..n {
        for (slot, e) in x.window().elems().iter().enumerate() {
            neighbor[pt][slot] = a.act(e, pt)?;
        }
    }

    let mut csp = Csp::new(n, x.alphabet().len());
    match x.allowed() {
        AllowedSet::Explicit(tuples) => {
            let tuples: Vec<Vec<usize>> = tuples.iter().cloned().collect();
            for pt in 0..n {
                csp.add_constraint(Constraint::Table {
                    scope: neighbor[pt].clone(),
                    tuples: tuples.clone(),
                });
            }
        }
        AllowedSet::EdgeFactored(pairs) => {
            let id_slot = x.window().index_of(&x.group().identity()).unwrap();
            let k = x.alphabet().len();
            for (&slot, set) in pairs {
                let mut matrix = vec![vec![false; k]; k];
                for &(p, q) in set {
                    matrix[p][q] = true;
                }
                for pt in 0..n {
                    csp.add_constraint(Constraint::Pairs {
                        u: neighbor[pt][id_slot],
                        v: neighbor[pt][slot],
                        allowed: matrix.clone(),
                    });
                }
            }
        }
    }

    // Enumerate anchor points for the hit patterns (in lexicographic order
    // of the anchor tuple) and solve the CSP with the induced forced
    // assignments. Incompatible anchor choices are skipped without search.
    fn assign_hit(
        forced: &mut BTreeMap<usize, usize>,
        neighbor: &[Vec<usize>],
        anchor: usize,
        hit: &[usize],
    ) -> Option<Vec<usize>> {
        let mut added = Vec::new();
        for (slot, &sym) in hit.iter().enumerate() {
            let var = neighbor[anchor][slot];
            match forced.get(&var) {
                Some(&existing) if existing != sym => {
                    for v in added {
                        forced.remove(&v);
                    }
                    return None;
                }
                Some(_) => {}
                None => {
                    forced.insert(var, sym);
                    added.push(var);
                }
            }
        }
        Some(added)
    }

    fn try_hits(
        csp: &Csp,
        neighbor: &[Vec<usize>],
        hits: &[Vec<usize>],
        next: usize,
        forced: &mut BTreeMap<usize, usize>,
        anchors: &mut Vec<usize>,
        order: VarOrder,
        budget: u64,
        saw_budget: &mut bool,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        if next == hits.len() {
            let list: Vec<(usize, usize)> =
                forced.iter().map(|(&v, &s)| (v, s)).collect();
            return match csp.solve(order, budget, &list) {
                SolveOutcome::Sat(sol) => Some((sol, anchors.clone())),
                SolveOutcome::Unsat => None,
                SolveOutcome::Budget => {
                    *saw_budget = true;
                    None
                }
            };
        }
        for anchor in 0..neighbor.len() {
            if let Some(added) = assign_hit(forced, neighbor, anchor, &hits[next]) {
                anchors.push(anchor);
                let r = try_hits(
                    csp, neighbor, hits, next + 1, forced, anchors, order, budget,
                    saw_budget,
                );
                anchors.pop();
                for v in added {
                    forced.remove(&v);
                }
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }

    let mut saw_budget = false;
    let result = try_hits(
        &csp,
        &neighbor,
        hits,
        0,
        &mut BTreeMap::new(),
        &mut Vec::new(),
        order,
        budget,
        &mut saw_budget,
    );
    Ok(match result {
        Some((labelling, hit_points)) => {
            debug_assert!(verify_hom(&labelling, a, x)?);
            HomVerdict::Yes { labelling, hit_points }
        }
        None if saw_budget => HomVerdict::Unknown,
        None => HomVerdict::No,
    })
}

/// Independent certificate check: every point's window pattern is allowed.
pub fn verify_hom(labelling: &[usize], a: &FiniteAction, x: &SftSpec) -> Result<bool> {
    if labelling.len() != a.point_count() {
        return Ok(false);
    }
    if labelling.iter().any(|&s| s >= x.alphabet().len()) {
        return Ok(false);
    }
    for pt in 0..a.point_count() {
        let tuple: Vec<usize> = x
            .window()
            .elems()
            .iter()
            .map(|e| a.act(e, pt).map(|q| labelling[q]))
            .collect::<Result<_>>()?;
        if !x.is_allowed(&tuple) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Check that each hit pattern occurs at at least one point of `labelling`.
pub fn verify_hits(
    labelling: &[usize],
    a: &FiniteAction,
    x: &SftSpec,
    hits: &[Vec<usize>],
) -> Result<bool> {
    for h in hits {
        let mut found = false;
        for pt in 0..a.point_count() {
            let tuple: Vec<usize> = x
                .window()
                .elems()
                .iter()
                .map(|e| a.act(e, pt).map(|q| labelling[q]))
                .collect::<Result<_>>()?;
            if tuple == *h {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

const TRANSFER_CAP: u64 = 1 << 20;

/// The de Bruijn transfer graph of a Z-SFT after normalizing the window to
/// the interval {0, ..., l-1}: nodes are allowed-extendable (l-1)-tuples,
/// edges are allowed l-tuples.
struct TransferGraph {
    len: usize,
    /// Node = (l-1)-tuple encoded in base |A|; `edges[u]` lists (v, symbol
    /// emitted) meaning the l-tuple u·last(v) is allowed.
    edges: Vec<Vec<usize>>,
    num_symbols: usize,
}

fn normalize_z(x: &SftSpec) -> Result<(usize, Vec<Vec<usize>>)> {
    if *x.group() != GroupSpec::FreeAbelian(1) {
        return Err(WcError::InvalidArgument(format!(
            "Z-SFT operation needs group Z^1, got {}",
            x.group()
        )));
    }
    let offsets: Vec<i64> = x
        .window()
        .elems()
        .iter()
        .map(|e| match e.payload() {
            crate::group::ElemPayload::Vector(v) => v[0],
            _ => unreachable!(),
        })
        .collect();
    let min = *offsets.iter().min().unwrap();
    let max = *offsets.iter().max().unwrap();
    let l = ((max - min) as usize + 1).max(2);
    let slot_of: Vec<usize> = offsets.iter().map(|&o| (o - min) as usize).collect();
    let k = x.alphabet().len() as u64;
    let total = (0..l)
        .try_fold(1u64, |acc, _| acc.checked_mul(k).filter(|&t| t <= TRANSFER_CAP))
        .ok_or_else(|| {
            WcError::InvalidArgument("Z-SFT window too large for transfer graph".into())
        })?;
    // Fill gap slots by extension: a full interval tuple is allowed iff its
    // restriction to the original window slots is allowed.
    let tuples = x.to_explicit_tuples(TRANSFER_CAP)?;
    let mut full = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut t = vec![0usize; l];
        for slot in (0..l).rev() {
            t[slot] = (c % k) as usize;
            c /= k;
        }
        let restricted: Vec<usize> = slot_of.iter().map(|&s| t[s]).collect();
        if tuples.contains(&restricted) {
            full.push(t);
        }
    }
    Ok((l, full))
}

fn transfer_graph(x: &SftSpec) -> Result<TransferGraph> {
    let (l, full) = normalize_z(x)?;
    let k = x.alphabet().len();
    let node_count = k.pow((l - 1) as u32);
    let encode = |t: &[usize]| t.iter().fold(0usize, |acc, &s| acc * k + s);
    let mut edges = vec![Vec::new(); node_count];
    for t in &full {
        let u = encode(&t[..l - 1]);
        let v = encode(&t[1..]);
        edges[u].push(v);
    }
    Ok(TransferGraph { len: l, edges, num_symbols: k })
}

impl TransferGraph {
    fn decode(&self, mut node: usize) -> Vec<usize> {
        let l = self.len - 1;
        let mut t = vec![0usize; l];
        for slot in (0..l).rev() {
            t[slot] = node % self.num_symbols;
            node /= self.num_symbols;
        }
        t
    }

    /// Find any cycle; returns the node sequence around it.
    fn find_cycle(&self) -> Option<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Gray,
            Black,
        }
        let n = self.edges.len();
        let mut mark = vec![Mark::White; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if mark[root] != Mark::White {
                continue;
            }
            // Iterative DFS with per-node edge cursor.
            let mut cursor = vec![0usize; n];
            let mut stack = vec![root];
            mark[root] = Mark::Gray;
            while let Some(&u) = stack.last() {
                if cursor[u] < self.edges[u].len() {
                    let v = self.edges[u][cursor[u]];
                    cursor[u] += 1;
                    match mark[v] {
                        Mark::White => {
                            mark[v] = Mark::Gray;
                            parent[v] = u;
                            stack.push(v);
                        }
                        Mark::Gray => {
                            // Found a cycle v -> ... -> u -> v.
                            let mut cyc = vec![u];
                            let mut w = u;
                            while w != v {
                                w = parent[w];
                                cyc.push(w);
                            }
                            cyc.reverse();
                            return Some(cyc);
                        }
                        Mark::Black => {}
                    }
                } else {
                    mark[u] = Mark::Black;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Iteratively drop nodes without outgoing or incoming edges; returns
    /// the surviving node set and its edge lists.
    fn essential_part(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let n = self.edges.len();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            let mut indeg = vec![0usize; n];
            let mut outdeg = vec![0usize; n];
            for u in 0..n {
                if !alive[u] {
                    continue;
                }
                for &v in &self.edges[u] {
                    if alive[v] {
                        outdeg[u] += 1;
                        indeg[v] += 1;
                    }
                }
            }
            for u in 0..n {
                if alive[u] && (indeg[u] == 0 || outdeg[u] == 0) {
                    alive[u] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let nodes: Vec<usize> = (0..n).filter(|&u| alive[u]).collect();
        let edges: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&u| self.edges[u].iter().copied().filter(|&v| alive[v]).collect())
            .collect();
        (nodes, edges)
    }
}

/// Nonemptiness for Z-SFTs: a configuration exists iff the transfer graph
/// has a cycle. Returns a periodic witness word (self-checked) or `None`.
pub fn nonempty_z(x: &SftSpec) -> Result<Option<Vec<usize>>> {
    let tg = transfer_graph(x)?;
    let Some(cycle) = tg.find_cycle() else {
        return Ok(None);
    };
    let word: Vec<usize> = cycle.iter().map(|&u| tg.decode(u)[0]).collect();
    if !check_periodic_word(x, &word)? {
        return Err(WcError::InvalidArgument(
            "internal error: transfer-graph witness failed verification".into(),
        ));
    }
    Ok(Some(word))
}

/// Does the periodic bi-infinite repetition of `word` lie in the Z-SFT?
pub fn check_periodic_word(x: &SftSpec, word: &[usize]) -> Result<bool> {
    if *x.group() != GroupSpec::FreeAbelian(1) {
        return Err(WcError::InvalidArgument("periodic word check needs a Z-SFT".into()));
    }
    if word.is_empty() || word.iter().any(|&s| s >= x.alphabet().len()) {
        return Ok(false);
    }
    let offsets: Vec<i64> = x
        .window()
        .elems()
        .iter()
        .map(|e| match e.payload() {
            crate::group::ElemPayload::Vector(v) => v[0],
            _ => unreachable!(),
        })
        .collect();
    let m = word.len() as i64;
    for pos in 0..word.len() as i64 {
        let tuple: Vec<usize> = offsets
            .iter()
            .map(|&o| word[(pos + o).rem_euclid(m) as usize])
            .collect();
        if !x.is_allowed(&tuple) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Topological mixing for nonempty Z-SFTs: the essential part of the
/// transfer graph must be a single strongly connected component whose cycle
/// lengths have gcd 1.
pub fn is_mixing_z(x: &SftSpec) -> Result<bool> {
    if nonempty_z(x)?.is_none() {
        return Err(WcError::InvalidArgument(
            "mixing is undefined for the empty SFT".into(),
        ));
    }
    let tg = transfer_graph(x)?;
    let (nodes, edges) = tg.essential_part();
    if nodes.is_empty() {
        return Ok(false);
    }
    // Strong connectivity: forward and backward reachability from nodes[0]
    // (indices are positions in `nodes`).
    let index_of = |u: usize| nodes.binary_search(&u).unwrap();
    let m = nodes.len();
    let mut fwd = vec![false; m];
    let mut stack = vec![0usize];
    fwd[0] = true;
    while let Some(i) = stack.pop() {
        for &v in &edges[i] {
            let j = index_of(v);
            if !fwd[j] {
                fwd[j] = true;
                stack.push(j);
            }
        }
    }
    let mut redges: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for &v in &edges[i] {
            redges[index_of(v)].push(i);
        }
    }
    let mut bwd = vec![false; m];
    let mut stack = vec![0usize];
    bwd[0] = true;
    while let Some(i) = stack.pop() {
        for &j in &redges[i] {
            if !bwd[j] {
                bwd[j] = true;
                stack.push(j);
            }
        }
    }
    if !(0..m).all(|i| fwd[i] && bwd[i]) {
        return Ok(false);
    }
    // Aperiodicity: gcd over edges of (level(u) + 1 - level(v)).
    let mut level = vec![i64::MIN; m];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut g: i64 = 0;
    while let Some(i) = queue.pop_front() {
        for &v in &edges[i] {
            let j = index_of(v);
            if level[j] == i64::MIN {
                level[j] = level[i] + 1;
                queue.push_back(j);
            } else {
                g = gcd(g, (level[i] + 1 - level[j]).abs());
            }
        }
    }
    Ok(g == 1)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Verdict of the bounded Z^2 nonemptiness search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Z2Verdict {
    /// A periodic configuration on the m x n torus (torus labelling
    /// verified against the SFT).
    Yes { m: usize, n: usize, config: Vec<usize> },
    /// No locally admissible labelling of the square of radius `ball`.
    No { ball: usize },
    Unknown,
}

/// Bounded nonemptiness for Z^2-SFTs: search periodic configurations on all
/// tori up to n_max x n_max; failing that, try to refute by exhausting the
/// labellings of the (2 n_max + 1)-square. Undecidable in general, hence
/// the three-valued answer.
pub fn nonempty_z2_bounded(x: &SftSpec, n_max: usize, budget: u64) -> Result<Z2Verdict> {
    if *x.group() != GroupSpec::FreeAbelian(2) {
        return Err(WcError::InvalidArgument(format!(
            "Z^2 nonemptiness needs group Z^2, got {}",
            x.group()
        )));
    }
    if n_max == 0 {
        return Err(WcError::InvalidArgument("n_max must be at least 1".into()));
    }
    if x.no_allowed_tuples() {
        return Ok(Z2Verdict::No { ball: 0 });
    }
    for m in 1..=n_max {
        for n in 1..=n_max {
            let torus = crate::action::make_torus(m, n)?;
            if let HomVerdict::Yes { labelling, .. } =
                hom_exists(&torus, x, &[], VarOrder::Mrv, budget)?
            {
                if !verify_hom(&labelling, &torus, x)? {
                    return Err(WcError::InvalidArgument(
                        "internal error: torus certificate failed verification".into(),
                    ));
                }
                return Ok(Z2Verdict::Yes { m, n, config: labelling });
            }
        }
    }
    // Refutation attempt on the square [-n_max, n_max]^2: constraints apply
    // wherever the whole translated window stays inside.
    let offsets: Vec<(i64, i64)> = x
        .window()
        .elems()
        .iter()
        .map(|e| match e.payload() {
            crate::group::ElemPayload::Vector(v) => (v[0], v[1]),
            _ => unreachable!(),
        })
        .collect();
    let r = n_max as i64;
    let side = 2 * r + 1;
    let var = |i: i64, j: i64| ((i + r) * side + (j + r)) as usize;
    let mut csp = Csp::new((side * side) as usize, x.alphabet().len());
    let tuples_explicit = match x.allowed() {
        AllowedSet::Explicit(t) => Some(t.iter().cloned().collect::<Vec<_>>()),
        AllowedSet::EdgeFactored(_) => None,
    };
    for i in -r..=r {
        for j in -r..=r {
            let inside = offsets
                .iter()
                .all(|&(a, b)| (-r..=r).contains(&(i + a)) && (-r..=r).contains(&(j + b)));
            if !inside {
                continue;
            }
            match (&tuples_explicit, x.allowed()) {
                (Some(tuples), _) => {
                    let scope: Vec<usize> =
                        offsets.iter().map(|&(a, b)| var(i + a, j + b)).collect();
                    csp.add_constraint(Constraint::Table {
                        scope,
                        tuples: tuples.clone(),
                    });
                }
                (None, AllowedSet::EdgeFactored(pairs)) => {
                    let id_slot = x.window().index_of(&x.group().identity()).unwrap();
                    let k = x.alphabet().len();
                    for (&slot, set) in pairs {
                        let mut matrix = vec![vec![false; k]; k];
                        for &(p, q) in set {
                            matrix[p][q] = true;
                        }
                        let (a, b) = offsets[slot];
                        let (ia, ib) = offsets[id_slot];
                        csp.add_constraint(Constraint::Pairs {
                            u: var(i + ia, j + ib),
                            v: var(i + a, j + b),
                            allowed: matrix,
                        });
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    match csp.solve(VarOrder::Mrv, budget, &[]) {
        SolveOutcome::Unsat => Ok(Z2Verdict::No { ball: n_max }),
        _ => Ok(Z2Verdict::Unknown),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{make_cycle, make_torus};

    fn golden_mean() -> SftSpec {
        // Forbid 11 on window {0,1} over alphabet {0,1}.
        let tuples: BTreeSet<Vec<usize>> =
            [vec![0, 0], vec![0, 1], vec![1, 0]].into_iter().collect();
        SftSpec::new_explicit(
            GroupSpec::FreeAbelian(1),
            vec!["0".into(), "1".into()],
            z_window(&[0, 1]),
            tuples,
        )
        .unwrap()
    }

    fn full_shift_z(k: usize) -> SftSpec {
        let tuples: BTreeSet<Vec<usize>> = (0..k).map(|s| vec![s]).collect();
        SftSpec::new_explicit(
            GroupSpec::FreeAbelian(1),
            (0..k).map(|s| s.to_string()).collect(),
            z_window(&[0]),
            tuples,
        )
        .unwrap()
    }

    #[test]
    fn verify_hom_golden_mean() {
        let c4 = make_cycle(4).unwrap();
        let x = golden_mean();
        assert!(verify_hom(&[0, 1, 0, 1], &c4, &x).unwrap());
        assert!(!verify_hom(&[0, 1, 1, 1], &c4, &x).unwrap());
    }

    #[test]
    fn hom_period_divisibility() {
        let p3 = period_sft(3).unwrap();
        let c6 = make_cycle(6).unwrap();
        match hom_exists(&c6, &p3, &[], VarOrder::Static, 0).unwrap() {
            HomVerdict::Yes { labelling, .. } => {
                assert!(verify_hom(&labelling, &c6, &p3).unwrap());
            }
            other => panic!("expected Yes, got {other:?}"),
        }
        let c4 = make_cycle(4).unwrap();
        assert_eq!(
            hom_exists(&c4, &p3, &[], VarOrder::Static, 0).unwrap(),
            HomVerdict::No
        );
    }

    #[test]
    fn hom_full_shift_trivial() {
        let x = full_shift_z(2);
        let c5 = make_cycle(5).unwrap();
        match hom_exists(&c5, &x, &[], VarOrder::Static, 0).unwrap() {
            HomVerdict::Yes { labelling, .. } => {
                assert_eq!(labelling, vec![0; 5], "lexicographically least witness");
            }
            other => panic!("expected Yes, got {other:?}"),
        }
    }

    #[test]
    fn hom_with_hits() {
        // Golden-mean target on c_4 requiring the pattern (1,0) to occur.
        let x = golden_mean();
        let c4 = make_cycle(4).unwrap();
        match hom_exists(&c4, &x, &[vec![1, 0]], VarOrder::Static, 0).unwrap() {
            HomVerdict::Yes { labelling, hit_points } => {
                assert!(verify_hom(&labelling, &c4, &x).unwrap());
                assert!(verify_hits(&labelling, &c4, &x, &[vec![1, 0]]).unwrap());
                assert_eq!(hit_points.len(), 1);
            }
            other => panic!("expected Yes, got {other:?}"),
        }
        // Impossible hit: (1,1) is not allowed, anchoring forces a clash...
        // it is simply never allowed, so the verdict is No.
        assert_eq!(
            hom_exists(&c4, &x, &[vec![1, 1]], VarOrder::Static, 0).unwrap(),
            HomVerdict::No
        );
    }

    #[test]
    fn proper_coloring_examples() {
        let w = z_window(&[-1, 1]);
        let cw = proper_coloring_sft(&w).unwrap();
        assert_eq!(cw.alphabet().len(), 3);
        let c3 = make_cycle(3).unwrap();
        match hom_exists(&c3, &cw, &[], VarOrder::Static, 0).unwrap() {
            HomVerdict::Yes { labelling, .. } => {
                assert!(verify_hom(&labelling, &c3, &cw).unwrap());
            }
            other => panic!("expected Yes, got {other:?}"),
        }
        let c1 = make_cycle(1).unwrap();
        assert_eq!(
            hom_exists(&c1, &cw, &[], VarOrder::Static, 0).unwrap(),
            HomVerdict::No,
            "self-loop is uncolorable"
        );
    }

    #[test]
    fn proper_coloring_rejects_asymmetric_window() {
        assert!(proper_coloring_sft(&z_window(&[0, 1])).is_err());
    }

    #[test]
    fn rooted_piece_counts_z2() {
        // p * (number of fixed polyominoes of size p): the classic counts
        // are 1, 2, 6, 19, 63.
        let expected = [1usize, 4, 18, 76, 315];
        for (p, &want) in (1..=5).zip(&expected) {
            let got = rooted_pieces(&GroupSpec::FreeAbelian(2), p).unwrap().len();
            assert_eq!(got, want, "p = {p}");
        }
    }

    #[test]
    fn rooted_piece_counts_free2() {
        let expected = [1usize, 4, 18];
        for (p, &want) in (1..=3).zip(&expected) {
            let got = rooted_pieces(&GroupSpec::Free(2), p).unwrap().len();
            assert_eq!(got, want, "p = {p}");
        }
    }

    #[test]
    fn tiling_sft_alphabet_sizes() {
        assert_eq!(tiling_sft_z2(1).unwrap().alphabet().len(), 1);
        assert_eq!(tiling_sft_z2(2).unwrap().alphabet().len(), 4);
        assert!(tiling_sft_z2(6).is_err());
        assert_eq!(tiling_sft_free2(3).unwrap().alphabet().len(), 18);
        assert!(tiling_sft_free2(4).is_err());
    }

    #[test]
    fn tiling_p1_full_shift() {
        let t1 = tiling_sft_z2(1).unwrap();
        let torus = make_torus(3, 3).unwrap();
        assert!(matches!(
            hom_exists(&torus, &t1, &[], VarOrder::Static, 0).unwrap(),
            HomVerdict::Yes { .. }
        ));
    }

    #[test]
    fn tiling_domino_parity() {
        let t2 = tiling_sft_z2(2).unwrap();
        let odd = make_torus(3, 3).unwrap();
        assert_eq!(
            hom_exists(&odd, &t2, &[], VarOrder::Mrv, 0).unwrap(),
            HomVerdict::No,
            "9 cells cannot be tiled by dominoes"
        );
        let even = make_torus(2, 3).unwrap();
        match hom_exists(&even, &t2, &[], VarOrder::Mrv, 0).unwrap() {
            HomVerdict::Yes { labelling, .. } => {
                assert!(verify_hom(&labelling, &even, &t2).unwrap());
            }
            other => panic!("expected Yes, got {other:?}"),
        }
    }

    #[test]
    fn nonempty_z_examples() {
        let gm = golden_mean();
        let w = nonempty_z(&gm).unwrap().expect("golden mean is nonempty");
        assert!(check_periodic_word(&gm, &w).unwrap());

        let empty = SftSpec::new_explicit(
            GroupSpec::FreeAbelian(1),
            vec!["0".into(), "1".into()],
            z_window(&[0, 1]),
            BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(nonempty_z(&empty).unwrap(), None);

        let p3 = period_sft(3).unwrap();
        let w = nonempty_z(&p3).unwrap().expect("period-3 shift is nonempty");
        assert_eq!(w.len() % 3, 0, "witness period must be a multiple of 3");
        assert!(check_periodic_word(&p3, &w).unwrap());
    }

    #[test]
    fn nonempty_z_gap_window() {
        // Window {0, 2} with constraint x(0) = x(2): nonempty (constant).
        let tuples: BTreeSet<Vec<usize>> = [vec![0, 0], vec![1, 1]].into_iter().collect();
        let x = SftSpec::new_explicit(
            GroupSpec::FreeAbelian(1),
            vec!["0".into(), "1".into()],
            z_window(&[0, 2]),
            tuples,
        )
        .unwrap();
        let w = nonempty_z(&x).unwrap().expect("nonempty");
        assert!(check_periodic_word(&x, &w).unwrap());
    }

    #[test]
    fn mixing_examples() {
        assert!(is_mixing_z(&full_shift_z(2)).unwrap());
        assert!(is_mixing_z(&golden_mean()).unwrap());
        let p2 = period_sft(2).unwrap();
        assert!(!is_mixing_z(&p2).unwrap(), "strict period 2 is not mixing");
        let empty = SftSpec::new_explicit(
            GroupSpec::FreeAbelian(1),
            vec!["0".into()],
            z_window(&[0]),
            BTreeSet::new(),
        )
        .unwrap();
        assert!(is_mixing_z(&empty).is_err());
    }

    #[test]
    fn z2_bounded_examples() {
        let t2 = tiling_sft_z2(2).unwrap();
        match nonempty_z2_bounded(&t2, 2, 0).unwrap() {
            Z2Verdict::Yes { m, n, config } => {
                let torus = make_torus(m, n).unwrap();
                assert!(verify_hom(&config, &torus, &t2).unwrap());
            }
            other => panic!("expected Yes, got {other:?}"),
        }

        let empty = SftSpec::new_explicit(
            GroupSpec::FreeAbelian(2),
            vec!["0".into()],
            z2_window(&[(0, 0), (1, 0)]),
            BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(
            nonempty_z2_bounded(&empty, 2, 0).unwrap(),
            Z2Verdict::No { ball: 0 }
        );

        // Full shift: immediate 1x1 certificate.
        let full: BTreeSet<Vec<usize>> = [vec![0], vec![1]].into_iter().collect();
        let fs = SftSpec::new_explicit(
            GroupSpec::FreeAbelian(2),
            vec!["0".into(), "1".into()],
            z2_window(&[(0, 0)]),
            full,
        )
        .unwrap();
        assert!(matches!(
            nonempty_z2_bounded(&fs, 1, 0).unwrap(),
            Z2Verdict::Yes { m: 1, n: 1, .. }
        ));
    }

    #[test]
    fn z2_bounded_refutes_contradiction() {
        // Window {0, 1, 2} along a row with only 010 allowed: overlapping
        // translates force x(n) = 0 and x(n) = 1 simultaneously, so the
        // subshift is empty and the square search must refute it.
        let tuples: BTreeSet<Vec<usize>> = BTreeSet::from([vec![0, 1, 0]]);
        let bad = SftSpec::new_explicit(
            GroupSpec::FreeAbelian(2),
            vec!["0".into(), "1".into()],
            z2_window(&[(0, 0), (1, 0), (2, 0)]),
            tuples,
        )
        .unwrap();
        assert_eq!(
            nonempty_z2_bounded(&bad, 2, 0).unwrap(),
            Z2Verdict::No { ball: 2 }
        );
    }

    #[test]
    fn translation_invariance_of_hom() {
        let x = golden_mean();
        let shift = GroupElem::from_vector(&GroupSpec::FreeAbelian(1), vec![-1]).unwrap();
        let y = x.translate(&shift).unwrap();
        let c5 = make_cycle(5).unwrap();
        let vx = hom_exists(&c5, &x, &[], VarOrder::Static, 0).unwrap();
        let vy = hom_exists(&c5, &y, &[], VarOrder::Static, 0).unwrap();
        assert_eq!(
            matches!(vx, HomVerdict::Yes { .. }),
            matches!(vy, HomVerdict::Yes { .. })
        );
    }

    #[test]
    fn sft_text_roundtrip_explicit() {
        let x = golden_mean();
        let text = x.to_text();
        let back = SftSpec::from_text(&text).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn sft_text_roundtrip_edge_factored() {
        let x = proper_coloring_sft(&z_window(&[-1, 1])).unwrap();
        let text = x.to_text();
        let back = SftSpec::from_text(&text).unwrap();
        assert_eq!(x, back);
        let t3 = tiling_sft_z2(3).unwrap();
        let back3 = SftSpec::from_text(&t3.to_text()).unwrap();
        assert_eq!(t3, back3);
    }

    #[test]
    fn greedy_colorability_of_loop_free_schreier() {
        // |W|+1 colors always suffice when the W-Schreier graph is
        // loop-free; check via hom_exists on a couple of actions.
        let w = z_window(&[-1, 1]);
        let cw = proper_coloring_sft(&w).unwrap();
        for n in 2..=7 {
            let cn = make_cycle(n).unwrap();
            assert!(
                matches!(
                    hom_exists(&cn, &cw, &[], VarOrder::Static, 0).unwrap(),
                    HomVerdict::Yes { .. }
                ),
                "c_{n} must be 3-colorable"
            );
        }
    }
}
