//! A small finite-domain constraint solver: chronological backtracking with
//! forward checking, used for SFT homomorphism search and pattern-set
//! realization. Deterministic: with static ordering and ascending values,
//! the first solution found is the lexicographically least one.
//!
//! Domains are bitsets and binary constraints keep per-value row masks, so
//! arc revision costs O(domain/64) words per value.

/// A constraint over variables with a shared value range.
#[derive(Debug, Clone)]
pub enum Constraint {
    /// The scope tuple must match one of `tuples` (positions may repeat a
    /// variable).
    Table { scope: Vec<usize>, tuples: Vec<Vec<usize>> },
    /// `allowed[a][b]` permits u = a together with v = b.
    Pairs { u: usize, v: usize, allowed: Vec<Vec<bool>> },
}

impl Constraint {
    fn vars(&self) -> Vec<usize> {
        match self {
            Constraint::Table { scope, .. } => {
                let mut v = scope.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
            Constraint::Pairs { u, v, .. } => {
                if u == v {
                    vec![*u]
                } else {
                    vec![*u, *v]
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A full assignment satisfying every constraint.
    Sat(Vec<usize>),
    /// Exhaustive refutation.
    Unsat,
    /// Node budget exhausted before a decision was reached.
    Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarOrder {
    /// Ascending variable index: first solution is lexicographically least.
    Static,
    /// Minimum remaining values, ties by index: faster refutations.
    Mrv,
}

pub struct Csp {
    num_vars: usize,
    num_values: usize,
    constraints: Vec<Constraint>,
    watching: Vec<Vec<usize>>,
}

const WORD: usize = 64;

fn blocks(n: usize) -> usize {
    n.div_ceil(WORD)
}

fn row_masks(allowed: &[Vec<bool>], num_values: usize) -> Vec<Vec<u64>> {
    allowed
        .iter()
        .map(|row| {
            let mut mask = vec![0u64; blocks(num_values)];
            for (b, &ok) in row.iter().enumerate() {
                if ok {
                    mask[b / WORD] |= 1 << (b % WORD);
                }
            }
            mask
        })
        .collect()
}

/// Per-constraint data precomputed for fast revision.
enum Compiled {
    Table,
    /// Row masks in both directions: `u_rows[a]` = values of v compatible
    /// with u = a; `v_rows[b]` = values of u compatible with v = b.
    Pairs { u_rows: Vec<Vec<u64>>, v_rows: Vec<Vec<u64>> },
}

struct Search<'a> {
    csp: &'a Csp,
    /// domains[var]: bitset of still-possible values.
    domains: Vec<Vec<u64>>,
    sizes: Vec<usize>,
    compiled: Vec<Compiled>,
    /// Removal log for backtracking.
    trail: Vec<(usize, usize)>,
    nodes: u64,
    budget: u64,
}

impl Csp {
    pub fn new(num_vars: usize, num_values: usize) -> Csp {
        Csp {
            num_vars,
            num_values,
            constraints: Vec::new(),
            watching: vec![Vec::new(); num_vars],
        }
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        let idx = self.constraints.len();
        for v in c.vars() {
            assert!(v < self.num_vars, "constraint variable out of range");
            self.watching[v].push(idx);
        }
        self.constraints.push(c);
    }

    /// Solve with optional pre-assignments. `budget` bounds the number of
    /// search nodes (decisions); 0 means unlimited.
    pub fn solve(
        &self,
        order: VarOrder,
        budget: u64,
        forced: &[(usize, usize)],
    ) -> SolveOutcome {
        if self.num_values == 0 {
            return if self.num_vars == 0 {
                SolveOutcome::Sat(Vec::new())
            } else {
                SolveOutcome::Unsat
            };
        }
        let full: Vec<u64> = {
            let mut m = vec![u64::MAX; blocks(self.num_values)];
            let extra = blocks(self.num_values) * WORD - self.num_values;
            if extra > 0 {
                *m.last_mut().unwrap() >>= extra;
            }
            m
        };
        let compiled = self
            .constraints
            .iter()
            .map(|c| match c {
                Constraint::Table { .. } => Compiled::Table,
                Constraint::Pairs { allowed, .. } => {
                    let u_rows = row_masks(allowed, self.num_values);
                    let transposed: Vec<Vec<bool>> = (0..self.num_values)
                        .map(|b| (0..self.num_values).map(|a| allowed[a][b]).collect())
                        .collect();
                    let v_rows = row_masks(&transposed, self.num_values);
                    Compiled::Pairs { u_rows, v_rows }
                }
            })
            .collect();
        let mut s = Search {
            csp: self,
            domains: vec![full; self.num_vars],
            sizes: vec![self.num_values; self.num_vars],
            compiled,
            trail: Vec::new(),
            nodes: 0,
            budget: if budget == 0 { u64::MAX } else { budget },
        };
        for &(var, val) in forced {
            if val >= self.num_values || !s.assign(var, val) {
                return SolveOutcome::Unsat;
            }
        }
        // Initial full propagation pass.
        for ci in 0..self.constraints.len() {
            if !s.revise(ci) {
                return SolveOutcome::Unsat;
            }
        }
        match s.search(order) {
            Some(true) => {
                let assignment = (0..self.num_vars)
                    .map(|v| s.first_value(v).unwrap())
                    .collect();
                SolveOutcome::Sat(assignment)
            }
            Some(false) => SolveOutcome::Unsat,
            None => SolveOutcome::Budget,
        }
    }
}

fn mask_intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

impl<'a> Search<'a> {
    fn has(&self, var: usize, val: usize) -> bool {
        self.domains[var][val / WORD] >> (val % WORD) & 1 == 1
    }

    fn first_value(&self, var: usize) -> Option<usize> {
        for (i, &w) in self.domains[var].iter().enumerate() {
            if w != 0 {
                return Some(i * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    fn remove(&mut self, var: usize, val: usize) -> bool {
        if self.has(var, val) {
            self.domains[var][val / WORD] &= !(1 << (val % WORD));
            self.sizes[var] -= 1;
            self.trail.push((var, val));
            if self.sizes[var] == 0 {
                return false;
            }
        }
        true
    }

    /// Narrow `var` to exactly `val` and propagate.
    fn assign(&mut self, var: usize, val: usize) -> bool {
        if !self.has(var, val) {
            return false;
        }
        let mut changed = false;
        for block in 0..self.domains[var].len() {
            let mut extra = self.domains[var][block];
            if block == val / WORD {
                extra &= !(1 << (val % WORD));
            }
            while extra != 0 {
                let v = block * WORD + extra.trailing_zeros() as usize;
                extra &= extra - 1;
                if !self.remove(var, v) {
                    return false;
                }
                changed = true;
            }
        }
        if changed || self.sizes[var] == 1 {
            return self.propagate_from(var);
        }
        true
    }

    /// Re-filter every constraint watching `var` (and cascade through
    /// variables whose domains shrink).
    fn propagate_from(&mut self, var: usize) -> bool {
        let mut queue = vec![var];
        while let Some(v) = queue.pop() {
            for ci in self.csp.watching[v].clone() {
                let before = self.trail.len();
                if !self.revise(ci) {
                    return false;
                }
                for &(w, _) in &self.trail[before..] {
                    if !queue.contains(&w) {
                        queue.push(w);
                    }
                }
            }
        }
        true
    }

    /// Enforce arc consistency on one constraint against current domains.
    fn revise(&mut self, ci: usize) -> bool {
        let csp = self.csp;
        match &csp.constraints[ci] {
            Constraint::Table { scope, tuples } => {
                let mut support: Vec<Vec<bool>> = scope
                    .iter()
                    .map(|_| vec![false; self.csp.num_values])
                    .collect();
                let mut any = false;
                'tuples: for t in tuples {
                    for (pos, &v) in scope.iter().enumerate() {
                        if !self.has(v, t[pos]) {
                            continue 'tuples;
                        }
                    }
                    any = true;
                    for (pos, _) in scope.iter().enumerate() {
                        support[pos][t[pos]] = true;
                    }
                }
                if !any {
                    return false;
                }
                for (pos, &v) in scope.iter().enumerate() {
                    for val in 0..self.csp.num_values {
                        if self.has(v, val) && !support[pos][val] {
                            if !self.remove(v, val) {
                                return false;
                            }
                        }
                    }
                }
                true
            }
            Constraint::Pairs { u, v, allowed } => {
                let (u, v) = (*u, *v);
                if u == v {
                    let mut doomed = Vec::new();
                    for block in 0..self.domains[u].len() {
                        let mut w = self.domains[u][block];
                        while w != 0 {
                            let a = block * WORD + w.trailing_zeros() as usize;
                            w &= w - 1;
                            if !allowed[a][a] {
                                doomed.push(a);
                            }
                        }
                    }
                    for a in doomed {
                        if !self.remove(u, a) {
                            return false;
                        }
                    }
                    return true;
                }
                // Collect unsupported values under an immutable borrow of
                // the compiled row masks, then apply the removals. Values
                // that lose their last support during the removals are
                // caught by the propagation fixpoint re-running revise.
                let mut doomed: Vec<(usize, usize)> = Vec::new();
                {
                    let Compiled::Pairs { u_rows, v_rows } = &self.compiled[ci] else {
                        unreachable!("compiled data matches constraint kind");
                    };
                    for (x, rows, other) in [(u, u_rows, v), (v, v_rows, u)] {
                        for block in 0..self.domains[x].len() {
                            let mut w = self.domains[x][block];
                            while w != 0 {
                                let a = block * WORD + w.trailing_zeros() as usize;
                                w &= w - 1;
                                if !mask_intersects(&rows[a], &self.domains[other]) {
                                    doomed.push((x, a));
                                }
                            }
                        }
                    }
                }
                for (x, a) in doomed {
                    if !self.remove(x, a) {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn pick_var(&self, order: VarOrder) -> Option<usize> {
        match order {
            VarOrder::Static => (0..self.csp.num_vars).find(|&v| self.sizes[v] > 1),
            VarOrder::Mrv => (0..self.csp.num_vars)
                .filter(|&v| self.sizes[v] > 1)
                .min_by_key(|&v| self.sizes[v]),
        }
    }

    /// Some(true) = solved, Some(false) = exhausted, None = out of budget.
    fn search(&mut self, order: VarOrder) -> Option<bool> {
        let Some(var) = self.pick_var(order) else {
            return Some(true);
        };
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        for val in 0..self.csp.num_values {
            if !self.has(var, val) {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(var, val) {
                match self.search(order) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => return None,
                }
            }
            while self.trail.len() > mark {
                let (w, x) = self.trail.pop().unwrap();
                self.domains[w][x / WORD] |= 1 << (x % WORD);
                self.sizes[w] += 1;
            }
        }
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ne_matrix(k: usize) -> Vec<Vec<bool>> {
        (0..k).map(|a| (0..k).map(|b| a != b).collect()).collect()
    }

    #[test]
    fn triangle_three_colors() {
        let mut csp = Csp::new(3, 3);
        for (u, v) in [(0, 1), (1, 2), (2, 0)] {
            csp.add_constraint(Constraint::Pairs { u, v, allowed: ne_matrix(3) });
        }
        match csp.solve(VarOrder::Static, 0, &[]) {
            SolveOutcome::Sat(a) => {
                assert_eq!(a, vec![0, 1, 2], "lexicographically least coloring");
            }
            other => panic!("expected Sat, got {other:?}"),
        }
    }

    #[test]
    fn triangle_two_colors_unsat() {
        let mut csp = Csp::new(3, 2);
        for (u, v) in [(0, 1), (1, 2), (2, 0)] {
            csp.add_constraint(Constraint::Pairs { u, v, allowed: ne_matrix(2) });
        }
        assert_eq!(csp.solve(VarOrder::Static, 0, &[]), SolveOutcome::Unsat);
        assert_eq!(csp.solve(VarOrder::Mrv, 0, &[]), SolveOutcome::Unsat);
    }

    #[test]
    fn table_constraint_filters() {
        // Variables 0,1 must form one of the tuples (0,1) or (1,0); forcing
        // var 0 = 1 leaves only (1,0).
        let mut csp = Csp::new(2, 2);
        csp.add_constraint(Constraint::Table {
            scope: vec![0, 1],
            tuples: vec![vec![0, 1], vec![1, 0]],
        });
        assert_eq!(
            csp.solve(VarOrder::Static, 0, &[(0, 1)]),
            SolveOutcome::Sat(vec![1, 0])
        );
    }

    #[test]
    fn repeated_variable_in_scope() {
        // (x, x) must be in {(0,1),(1,1)}: only x = 1 works.
        let mut csp = Csp::new(1, 2);
        csp.add_constraint(Constraint::Table {
            scope: vec![0, 0],
            tuples: vec![vec![0, 1], vec![1, 1]],
        });
        assert_eq!(csp.solve(VarOrder::Static, 0, &[]), SolveOutcome::Sat(vec![1]));
    }

    #[test]
    fn self_pair_constraint() {
        let mut csp = Csp::new(1, 2);
        // (x, x) allowed only for x = 0: matrix allows (0,0) only.
        csp.add_constraint(Constraint::Pairs {
            u: 0,
            v: 0,
            allowed: vec![vec![true, false], vec![false, false]],
        });
        assert_eq!(csp.solve(VarOrder::Static, 0, &[]), SolveOutcome::Sat(vec![0]));
    }

    #[test]
    fn budget_reports_unknown() {
        let n = 6;
        let mut csp = Csp::new(n, 2);
        for i in 0..n {
            csp.add_constraint(Constraint::Pairs {
                u: i,
                v: (i + 1) % n,
                allowed: ne_matrix(2),
            });
        }
        match csp.solve(VarOrder::Static, 1, &[]) {
            SolveOutcome::Sat(_) | SolveOutcome::Budget => {}
            SolveOutcome::Unsat => panic!("should not refute within budget 1"),
        }
    }

    #[test]
    fn forced_conflict_is_unsat() {
        let mut csp = Csp::new(2, 2);
        csp.add_constraint(Constraint::Pairs { u: 0, v: 1, allowed: ne_matrix(2) });
        assert_eq!(
            csp.solve(VarOrder::Static, 0, &[(0, 1), (1, 1)]),
            SolveOutcome::Unsat
        );
    }

    #[test]
    fn wide_domain_past_word_boundary() {
        // 70 values exercises the multi-word bitset paths.
        let mut csp = Csp::new(2, 70);
        let mut allowed = vec![vec![false; 70]; 70];
        allowed[69][68] = true;
        csp.add_constraint(Constraint::Pairs { u: 0, v: 1, allowed });
        assert_eq!(
            csp.solve(VarOrder::Static, 0, &[]),
            SolveOutcome::Sat(vec![69, 68])
        );
    }
}
