//! Local patterns of labelled finite actions, pattern-set enumeration and
//! realization, and the window-level weak-containment comparator.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::FiniteAction;
use crate::csp::VarOrder;
use crate::error::{Result, WcError};
use crate::group::Window;
use crate::sft::{hom_exists, HomVerdict, SftSpec};

/// A k-coloring of the points of an action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labelling {
    action: FiniteAction,
    k: usize,
    colors: Vec<usize>,
}

impl Labelling {
    pub fn new(action: FiniteAction, k: usize, colors: Vec<usize>) -> Result<Labelling> {
        if colors.len() != action.point_count() {
            return Err(WcError::InvalidArgument(format!(
                "labelling has {} colors for {} points",
                colors.len(),
                action.point_count()
            )));
        }
        if k == 0 || colors.iter().any(|&c| c >= k) {
            return Err(WcError::InvalidArgument(
                "labelling colors out of range".into(),
            ));
        }
        Ok(Labelling { action, k, colors })
    }

    pub fn action(&self) -> &FiniteAction {
        &self.action
    }

    pub fn num_colors(&self) -> usize {
        self.k
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, x: usize) -> usize {
        self.colors[x]
    }

    /// The labelling x ↦ f(γ·x) (translate of f by γ).
    pub fn translate(&self, gamma: &crate::group::GroupElem) -> Result<Labelling> {
        let colors = (0..self.colors.len())
            .map(|x| self.action.act(gamma, x).map(|y| self.colors[y]))
            .collect::<Result<Vec<_>>>()?;
        Labelling::new(self.action.clone(), self.k, colors)
    }
}

/// The W-local pattern set of a labelling: the set of tuples
/// (f(γ·x))_{γ ∈ W} over all points x, stored in window order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatternSet {
    window: Window,
    k: usize,
    patterns: BTreeSet<Vec<usize>>,
}

impl PatternSet {
    pub fn new(window: Window, k: usize, patterns: BTreeSet<Vec<usize>>) -> Result<PatternSet> {
        for p in &patterns {
            if p.len() != window.len() || p.iter().any(|&c| c >= k) {
                return Err(WcError::InvalidArgument(format!(
                    "pattern {p:?} does not fit window/colors"
                )));
            }
        }
        Ok(PatternSet { window, k, patterns })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn num_colors(&self) -> usize {
        self.k
    }

    pub fn patterns(&self) -> &BTreeSet<Vec<usize>> {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn is_subset_of(&self, other: &PatternSet) -> bool {
        self.window == other.window && self.patterns.is_subset(&other.patterns)
    }

    /// Apply a color map to every pattern entry.
    pub fn map_colors(&self, phi: &[usize], new_k: usize) -> Result<PatternSet> {
        let patterns = self
            .patterns
            .iter()
            .map(|p| p.iter().map(|&c| phi[c]).collect())
            .collect();
        PatternSet::new(self.window.clone(), new_k, patterns)
    }

    /// Text form: `group`, `window`, `colors` headers, then one pattern per
    /// line in window order.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "group {}", self.window.spec());
        let _ = writeln!(out, "window {}", self.window.to_text());
        let _ = writeln!(out, "colors {}", self.k);
        for p in &self.patterns {
            let line: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PatternSet> {
        let mut group = None;
        let mut window = None;
        let mut k = None;
        let mut patterns = BTreeSet::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("group ") {
                group = Some(rest.trim().parse::<crate::group::GroupSpec>()?);
            } else if let Some(rest) = line.strip_prefix("window ") {
                let g = group.as_ref().ok_or_else(|| {
                    WcError::Parse("window line before group line".into())
                })?;
                window = Some(Window::parse(g, rest)?);
            } else if let Some(rest) = line.strip_prefix("colors ") {
                k = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| WcError::Parse(format!("bad colors line: {line}")))?,
                );
            } else {
                let p = line
                    .split_whitespace()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| WcError::Parse(format!("bad pattern line: {line}")))?;
                patterns.insert(p);
            }
        }
        let window = window.ok_or_else(|| WcError::Parse("missing window line".into()))?;
        let k = k.ok_or_else(|| WcError::Parse("missing colors line".into()))?;
        PatternSet::new(window, k, patterns)
    }
}

/// p_W(f, a): evaluate the window at every point and collect the distinct
/// tuples.
pub fn patterns_of(f: &Labelling, w: &Window) -> Result<PatternSet> {
    if w.spec() != f.action().spec() {
        return Err(WcError::MismatchedSpecs(
            f.action().spec().to_string(),
            w.spec().to_string(),
        ));
    }
    let mut patterns = BTreeSet::new();
    for x in 0..f.action().point_count() {
        let p: Vec<usize> = w
            .elems()
            .iter()
            .map(|g| f.action().act(g, x).map(|y| f.color(y)))
            .collect::<Result<_>>()?;
        patterns.insert(p);
    }
    PatternSet::new(w.clone(), f.num_colors(), patterns)
}

/// Result of pattern-set enumeration; `exact` is false when the labelling
/// space exceeded the budget and only a prefix was explored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationResult {
    pub sets: BTreeSet<PatternSet>,
    pub exact: bool,
}

/// All W-local pattern sets of k-labellings of `a`.
///
/// Exact when k^n fits the budget; in that case labellings are enumerated
/// up to color renaming (restricted-growth canonical forms) and each
/// canonical pattern set is closed under color injections into [k], which
/// reproduces the full raw family. Otherwise the first `budget` labellings
/// in lexicographic order are evaluated and the result is flagged partial.
pub fn enumerate_pattern_sets(
    a: &FiniteAction,
    w: &Window,
    k: usize,
    budget: u64,
) -> Result<EnumerationResult> {
    if k == 0 {
        return Err(WcError::InvalidArgument("need at least one color".into()));
    }
    let n = a.point_count();
    let space: Option<u64> = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(k as u64));
    let exact = space.map_or(false, |s| s <= budget);
    let mut sets = BTreeSet::new();
    if exact {
        // Restricted-growth strings: colors appear in first-use order.
        let mut colors = vec![0usize; n];
        enumerate_rgs(a, w, k, &mut colors, 1, 0, &mut sets)?;
        Ok(EnumerationResult { sets, exact: true })
    } else {
        let mut colors = vec![0usize; n];
        let mut count = 0u64;
        loop {
            if count >= budget {
                break;
            }
            count += 1;
            let f = Labelling::new(a.clone(), k, colors.clone())?;
            sets.insert(patterns_of(&f, w)?);
            // Next labelling in lexicographic order.
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(EnumerationResult { sets, exact: true });
                }
                pos -= 1;
                colors[pos] += 1;
                if colors[pos] < k {
                    break;
                }
                colors[pos] = 0;
            }
        }
        Ok(EnumerationResult { sets, exact: false })
    }
}

fn enumerate_rgs(
    a: &FiniteAction,
    w: &Window,
    k: usize,
    colors: &mut Vec<usize>,
    pos: usize,
    used: usize,
    sets: &mut BTreeSet<PatternSet>,
) -> Result<()> {
    let used = used.max(1);
    let n = colors.len();
    if pos == n {
        let f = Labelling::new(a.clone(), used, colors.clone())?;
        let base = patterns_of(&f, w)?;
        // Close under injections [used] -> [k].
        let mut phi = vec![usize::MAX; used];
        inject(&base, k, &mut phi, 0, &mut Vec::new(), sets)?;
        return Ok(());
    }
    for c in 0..=used.min(k - 1) {
        colors[pos] = c;
        enumerate_rgs(a, w, k, colors, pos + 1, used.max(c + 1), sets)?;
    }
    Ok(())
}

fn inject(
    base: &PatternSet,
    k: usize,
    phi: &mut Vec<usize>,
    pos: usize,
    taken: &mut Vec<usize>,
    sets: &mut BTreeSet<PatternSet>,
) -> Result<()> {
    if pos == phi.len() {
        sets.insert(base.map_colors(phi, k)?);
        return Ok(());
    }
    for target in 0..k {
        if !taken.contains(&target) {
            phi[pos] = target;
            taken.push(target);
            inject(base, k, phi, pos + 1, taken, sets)?;
            taken.pop();
        }
    }
    Ok(())
}

/// Find a labelling of `a` whose pattern set equals `target` exactly, or
/// prove there is none. The subset direction is enforced as an SFT
/// constraint, the coverage direction by one required-occurrence witness per
/// pattern; the search is exhaustive and the witness is self-checked.
pub fn realize_pattern_set(a: &FiniteAction, target: &PatternSet) -> Result<Option<Labelling>> {
    if target.window().spec() != a.spec() {
        return Err(WcError::MismatchedSpecs(
            a.spec().to_string(),
            target.window().spec().to_string(),
        ));
    }
    if target.is_empty() {
        // A nonempty action always produces at least one pattern.
        return Ok(None);
    }
    let alphabet: Vec<String> = (0..target.num_colors()).map(|c| c.to_string()).collect();
    let sft = SftSpec::new_explicit(
        a.spec().clone(),
        alphabet,
        target.window().clone(),
        target.patterns().clone(),
    )?;
    let hits: Vec<Vec<usize>> = target.patterns().iter().cloned().collect();
    match hom_exists(a, &sft, &hits, VarOrder::Static, 0)? {
        HomVerdict::Yes { labelling, .. } => {
            let f = Labelling::new(a.clone(), target.num_colors(), labelling)?;
            if patterns_of(&f, target.window())? != *target {
                return Err(WcError::InvalidArgument(
                    "internal error: realization witness failed self-check".into(),
                ));
            }
            Ok(Some(f))
        }
        HomVerdict::No => Ok(None),
        HomVerdict::Unknown => unreachable!("unbudgeted search cannot be Unknown"),
    }
}

/// Verdict of the one-scale weak-containment comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContainmentVerdict {
    /// Every pattern set of b was realized on a; witnesses attached.
    Yes(Vec<(PatternSet, Labelling)>),
    /// A pattern set of b that no labelling of a realizes.
    No(PatternSet),
    /// Enumeration of b's pattern sets was cut short and no counterexample
    /// surfaced among those seen.
    Unknown { checked: usize },
}

/// Does a weakly contain b at scale (W, k): is every W-local pattern set of
/// a k-labelling of b realizable by a labelling of a?
pub fn weakly_contains_at(
    a: &FiniteAction,
    b: &FiniteAction,
    w: &Window,
    k: usize,
    budget: u64,
) -> Result<ContainmentVerdict> {
    if a.spec() != b.spec() {
        return Err(WcError::MismatchedSpecs(
            a.spec().to_string(),
            b.spec().to_string(),
        ));
    }
    let enumeration = enumerate_pattern_sets(b, w, k, budget)?;
    let mut witnesses = Vec::new();
    for target in &enumeration.sets {
        match realize_pattern_set(a, target)? {
            Some(f) => witnesses.push((target.clone(), f)),
            None => return Ok(ContainmentVerdict::No(target.clone())),
        }
    }
    if enumeration.exact {
        Ok(ContainmentVerdict::Yes(witnesses))
    } else {
        Ok(ContainmentVerdict::Unknown { checked: witnesses.len() })
    }
}

/// A local rule A^W -> A', applied at every point of a labelled action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRule {
    window: Window,
    k_in: usize,
    k_out: usize,
    table: BTreeMap<Vec<usize>, usize>,
}

impl LocalRule {
    pub fn new(
        window: Window,
        k_in: usize,
        k_out: usize,
        table: BTreeMap<Vec<usize>, usize>,
    ) -> Result<LocalRule> {
        for (p, &c) in &table {
            if p.len() != window.len() || p.iter().any(|&x| x >= k_in) || c >= k_out {
                return Err(WcError::InvalidArgument(format!(
                    "rule entry {p:?} -> {c} does not fit window/colors"
                )));
            }
        }
        Ok(LocalRule { window, k_in, k_out, table })
    }

    /// A total rule built from a function on window tuples.
    pub fn from_fn(
        window: Window,
        k_in: usize,
        k_out: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<LocalRule> {
        let mut table = BTreeMap::new();
        let mut tuple = vec![0usize; window.len()];
        loop {
            table.insert(tuple.clone(), f(&tuple));
            let mut pos = tuple.len();
            loop {
                if pos == 0 {
                    return LocalRule::new(window, k_in, k_out, table);
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < k_in {
                    break;
                }
                tuple[pos] = 0;
            }
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn output_colors(&self) -> usize {
        self.k_out
    }

    /// Does this rule map every allowed pattern of `from` to a symbol such
    /// that the induced configurations land in `to`? Checked on the allowed
    /// tables; used to chain hom-certificates.
    pub fn eval(&self, pattern: &[usize]) -> Result<usize> {
        self.table
            .get(pattern)
            .copied()
            .ok_or_else(|| WcError::MissingRuleEntry(format!("{pattern:?}")))
    }
}

/// Apply a local rule pointwise: g(x) = rule(γ ↦ f(γ·x)).
pub fn apply_local_rule(rule: &LocalRule, f: &Labelling) -> Result<Labelling> {
    if rule.window().spec() != f.action().spec() {
        return Err(WcError::MismatchedSpecs(
            f.action().spec().to_string(),
            rule.window().spec().to_string(),
        ));
    }
    let mut out = Vec::with_capacity(f.action().point_count());
    for x in 0..f.action().point_count() {
        let p: Vec<usize> = rule
            .window()
            .elems()
            .iter()
            .map(|g| f.action().act(g, x).map(|y| f.color(y)))
            .collect::<Result<_>>()?;
        out.push(rule.eval(&p)?);
    }
    Labelling::new(f.action().clone(), rule.output_colors(), out)
}
