//! Probing: tentatively fix a variable to 0 and to 1, analyze both
//! subproblems, and turn agreements into fixes and disagreements into
//! variable relations.
//!
//! Labels found in only one branch are kept as nonnegative penalty terms
//! `C·[x_k = a]·[x_j ≠ w]` on a working copy of the problem. Every
//! deduction from one probe holds simultaneously in some optimum of the
//! working problem, and penalties vanish on that optimum, so the working
//! minimum never changes. The returned reduction is built from the
//! original problem without penalties.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::model::{Qubo, Reduction, Substitution};
use crate::network::{NetworkError, ScaledQubo};
use crate::persistency::{analyze_scaled, pct, PersistencyError};
use crate::scalar::{format_rational, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions<T> {
    /// Upper limit on sweeps; the loop also stops at a fixpoint.
    pub max_passes: usize,
    /// Energy of a known feasible assignment. Enables fixing `x_k = 1 − a`
    /// whenever the bound with `x_k = a` exceeds it.
    pub incumbent: Option<T>,
}

impl<T> Default for ProbeOptions<T> {
    fn default() -> Self {
        ProbeOptions {
            max_passes: 10,
            incumbent: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome<T> {
    fixed: BTreeMap<usize, bool>,
    relations: Vec<(usize, usize, bool)>,
    bound: Rational,
    passes: usize,
    reduction: Reduction<T>,
}

impl<T: Scalar> ProbeOutcome<T> {
    pub fn fixed(&self) -> &BTreeMap<usize, bool> {
        &self.fixed
    }

    /// `(j, i, complemented)`: `x_j = x_i`, or `1 − x_i`, with `i < j` and
    /// `x_i` unresolved.
    pub fn relations(&self) -> &[(usize, usize, bool)] {
        &self.relations
    }

    pub fn bound(&self) -> Rational {
        self.bound
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    /// Fixed and relation-eliminated variables as a percentage.
    pub fn probe_pct(&self) -> f64 {
        pct(self.reduction.eliminated(), self.reduction.original_vars())
    }

    /// The original problem with all fixes and relations applied.
    pub fn reduction(&self) -> &Reduction<T> {
        &self.reduction
    }

    /// `var,value,class` rows, relation rows `j = i` / `j = !i`, then a
    /// `probe_pct,bound,passes` summary.
    pub fn to_records(&self) -> String {
        let mut out = String::from("var,value,class\n");
        for (&v, &b) in &self.fixed {
            let _ = writeln!(out, "{v},{},probe", u8::from(b));
        }
        for &(j, i, c) in &self.relations {
            let _ = writeln!(out, "{j} = {}{i}", if c { "!" } else { "" });
        }
        let _ = writeln!(out, "probe_pct,bound,passes");
        let _ = writeln!(
            out,
            "{:.2},{},{}",
            self.probe_pct(),
            format_rational(&self.bound),
            self.passes
        );
        out
    }
}

pub fn probe<T: Scalar>(q: &Qubo<T>, max_passes: usize) -> Result<ProbeOutcome<T>, PersistencyError> {
    probe_with(
        q,
        &ProbeOptions {
            max_passes,
            incumbent: None,
        },
    )
}

pub fn probe_with<T: Scalar>(
    q: &Qubo<T>,
    options: &ProbeOptions<T>,
) -> Result<ProbeOutcome<T>, PersistencyError> {
    let scaled = ScaledQubo::from_qubo(q)?;
    let incumbent = match options.incumbent {
        Some(u) => Some(u.to_rational().ok_or_else(|| NetworkError::NonFinite(format!("{u:?}")))?),
        None => None,
    };
    let n = scaled.num_vars();
    let mut work = Working::new(&scaled);
    let mut best = analyze_scaled(&scaled)?.bound();
    let mut seen: HashSet<(usize, bool, usize, bool)> = HashSet::new();
    let mut penalty: Option<i64> = None;
    let mut passes = 0;

    while passes < options.max_passes.max(1) {
        passes += 1;
        let mut changed = false;

        let base = analyze_scaled(&work.snapshot())?;
        best = best.max(base.bound());
        for (&v, &b) in base.weak() {
            if work.is_free(v) {
                work.fix(v, b);
                changed = true;
            }
        }
        let c = match penalty {
            Some(c) => c,
            None => {
                let c = work.penalty_weight(n)?;
                penalty = Some(c);
                c
            }
        };

        for k in 0..n {
            if !work.is_free(k) {
                continue;
            }
            let snap = work.snapshot();
            let (r0, r1) = rayon::join(
                || analyze_scaled(&snap.conditioned(k, false)),
                || analyze_scaled(&snap.conditioned(k, true)),
            );
            let (r0, r1) = (r0?, r1?);
            best = best.max(r0.bound().min(r1.bound()));

            if let Some(u) = incumbent {
                let (over0, over1) = (r0.bound() > u, r1.bound() > u);
                if over0 != over1 {
                    work.fix(k, over0);
                    changed = true;
                    continue;
                }
            }

            for j in 0..n {
                if j == k || !work.is_free(j) {
                    continue;
                }
                match (r0.weak().get(&j), r1.weak().get(&j)) {
                    (Some(&a), Some(&b)) if a == b => {
                        work.fix(j, a);
                        changed = true;
                    }
                    (Some(&a), Some(_)) => {
                        work.relate(j, k, a);
                        changed = true;
                    }
                    (Some(&w), None) => {
                        if seen.insert((k, false, j, !w)) {
                            work.add_penalty(c, (k, false), (j, !w));
                            changed = true;
                        }
                    }
                    (None, Some(&w)) => {
                        if seen.insert((k, true, j, !w)) {
                            work.add_penalty(c, (k, true), (j, !w));
                            changed = true;
                        }
                    }
                    (None, None) => {}
                }
            }
        }
        if !changed || (0..n).all(|v| !work.is_free(v)) {
            break;
        }
    }

    let mut fixed = BTreeMap::new();
    let mut subs = BTreeMap::new();
    let mut relations = Vec::new();
    for (v, s) in work.state.iter().enumerate() {
        match *s {
            VarState::Free => {}
            VarState::Fixed(b) => {
                fixed.insert(v, b);
            }
            VarState::Sub(t, c) => {
                subs.insert(
                    v,
                    Substitution {
                        target: t,
                        complemented: c,
                    },
                );
                relations.push((v, t, c));
            }
        }
    }
    let reduction = q.eliminate(&fixed, &subs)?;
    Ok(ProbeOutcome {
        fixed,
        relations,
        bound: best,
        passes,
        reduction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Free,
    Fixed(bool),
    /// `x_v = x_t ⊕ c` with `t` free and `t < v`.
    Sub(usize, bool),
}

#[derive(Debug, Clone, Copy)]
enum Lit {
    Const(bool),
    Var(usize, bool),
}

/// The working problem in the original index space. Eliminated variables
/// keep their slot and have no terms.
struct Working {
    denom: i64,
    offset: i64,
    linear: Vec<i64>,
    adj: Vec<BTreeMap<usize, i64>>,
    state: Vec<VarState>,
}

impl Working {
    fn new(q: &ScaledQubo) -> Self {
        let n = q.num_vars();
        let mut adj = vec![BTreeMap::new(); n];
        for &(i, j, c) in &q.quad {
            adj[i].insert(j, c);
            adj[j].insert(i, c);
        }
        Working {
            denom: q.denom,
            offset: q.offset,
            linear: q.linear.clone(),
            adj,
            state: vec![VarState::Free; n],
        }
    }

    fn is_free(&self, v: usize) -> bool {
        self.state[v] == VarState::Free
    }

    fn snapshot(&self) -> ScaledQubo {
        let mut quad = Vec::new();
        for (i, row) in self.adj.iter().enumerate() {
            quad.extend(row.range(i + 1..).map(|(&j, &c)| (i, j, c)));
        }
        ScaledQubo {
            denom: self.denom,
            offset: self.offset,
            linear: self.linear.clone(),
            quad,
        }
    }

    fn penalty_weight(&self, n: usize) -> Result<i64, NetworkError> {
        let mut total: i64 = 1;
        for &c in &self.linear {
            total = total.checked_add(c.checked_abs().ok_or(NetworkError::Overflow)?).ok_or(NetworkError::Overflow)?;
        }
        for (i, row) in self.adj.iter().enumerate() {
            for (_, &c) in row.range(i + 1..) {
                total = total.checked_add(c.checked_abs().ok_or(NetworkError::Overflow)?).ok_or(NetworkError::Overflow)?;
            }
        }
        // Room for a penalty on every ordered pair and branch.
        let slots = i64::try_from(2 * n * n + 1).map_err(|_| NetworkError::Overflow)?;
        total
            .checked_mul(slots)
            .and_then(|t| t.checked_mul(4))
            .ok_or(NetworkError::Overflow)?;
        Ok(total)
    }

    fn resolve(&self, v: usize) -> Lit {
        match self.state[v] {
            VarState::Free => Lit::Var(v, false),
            VarState::Fixed(b) => Lit::Const(b),
            VarState::Sub(t, c) => Lit::Var(t, c),
        }
    }

    fn add_quad(&mut self, i: usize, j: usize, c: i64) {
        if c == 0 {
            return;
        }
        if i == j {
            self.linear[i] += c;
            return;
        }
        for (a, b) in [(i, j), (j, i)] {
            let e = self.adj[a].entry(b).or_insert(0);
            *e += c;
            if *e == 0 {
                self.adj[a].remove(&b);
            }
        }
    }

    fn fix(&mut self, v: usize, value: bool) {
        if let Lit::Var(r, c) = self.resolve(v) {
            self.fix_root(r, value ^ c);
        }
    }

    fn fix_root(&mut self, r: usize, value: bool) {
        let row = std::mem::take(&mut self.adj[r]);
        for (m, c) in row {
            self.adj[m].remove(&r);
            if value {
                self.linear[m] += c;
            }
        }
        if value {
            self.offset += self.linear[r];
        }
        self.linear[r] = 0;
        self.state[r] = VarState::Fixed(value);
        for s in self.state.iter_mut() {
            if let VarState::Sub(t, c) = *s {
                if t == r {
                    *s = VarState::Fixed(value ^ c);
                }
            }
        }
    }

    /// Records `x_a = x_b ⊕ flip`.
    fn relate(&mut self, a: usize, b: usize, flip: bool) {
        match (self.resolve(a), self.resolve(b)) {
            (Lit::Const(_), Lit::Const(_)) => {}
            (Lit::Const(va), Lit::Var(r, c)) => self.fix_root(r, va ^ flip ^ c),
            (Lit::Var(r, c), Lit::Const(vb)) => self.fix_root(r, vb ^ flip ^ c),
            (Lit::Var(ra, ca), Lit::Var(rb, cb)) => {
                if ra != rb {
                    self.substitute_root(ra.max(rb), ra.min(rb), ca ^ cb ^ flip);
                }
            }
        }
    }

    /// Eliminates free `j` via `x_j = x_t ⊕ comp`.
    fn substitute_root(&mut self, j: usize, t: usize, comp: bool) {
        let row = std::mem::take(&mut self.adj[j]);
        for (m, c) in row {
            self.adj[m].remove(&j);
            if comp {
                self.linear[m] += c;
                self.add_quad(t, m, -c);
            } else {
                self.add_quad(t, m, c);
            }
        }
        let a = std::mem::replace(&mut self.linear[j], 0);
        if comp {
            self.offset += a;
            self.linear[t] -= a;
        } else {
            self.linear[t] += a;
        }
        self.state[j] = VarState::Sub(t, comp);
        for s in self.state.iter_mut() {
            if let VarState::Sub(u, c) = *s {
                if u == j {
                    *s = VarState::Sub(t, c ^ comp);
                }
            }
        }
    }

    /// Adds `c·[x_a = va]·[x_b = vb]`.
    fn add_penalty(&mut self, c: i64, (a, va): (usize, bool), (b, vb): (usize, bool)) {
        // indicator: Err(const) or Ok((root, wanted value))
        let ind = |l: Lit, want: bool| match l {
            Lit::Const(x) => Err(x == want),
            Lit::Var(r, cm) => Ok((r, want ^ cm)),
        };
        let single = |w: &mut Working, r: usize, want: bool| {
            if want {
                w.linear[r] += c;
            } else {
                w.offset += c;
                w.linear[r] -= c;
            }
        };
        match (ind(self.resolve(a), va), ind(self.resolve(b), vb)) {
            (Err(false), _) | (_, Err(false)) => {}
            (Err(true), Err(true)) => self.offset += c,
            (Err(true), Ok((r, w))) | (Ok((r, w)), Err(true)) => single(self, r, w),
            (Ok((r1, w1)), Ok((r2, w2))) => {
                if r1 == r2 {
                    if w1 == w2 {
                        single(self, r1, w1);
                    }
                    return;
                }
                // (o1 + s1·x1)(o2 + s2·x2)
                let (o1, s1) = if w1 { (0, 1) } else { (1, -1) };
                let (o2, s2) = if w2 { (0, 1) } else { (1, -1) };
                self.offset += c * o1 * o2;
                self.linear[r2] += c * o1 * s2;
                self.linear[r1] += c * o2 * s1;
                self.add_quad(r1, r2, c * s1 * s2);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::all_assignments;

    fn min_energy(q: &Qubo<i64>) -> i64 {
        all_assignments(q.num_vars()).map(|x| q.energy(&x)).min().unwrap()
    }

    #[test]
    fn fully_persistent_problem_resolves_in_first_pass() {
        let mut q = Qubo::<i64>::new(3);
        q.add_linear(0, -2);
        q.add_linear(1, 1);
        q.add_quadratic(0, 2, -3);
        let out = probe(&q, 10).unwrap();
        assert_eq!(out.probe_pct(), 100.0);
        assert_eq!(out.passes(), 1);
        assert_eq!(out.reduction().delta(), min_energy(&q));
    }

    #[test]
    fn frustrated_triangle_gets_resolved() {
        let mut q = Qubo::<i64>::new(3);
        for i in 0..3 {
            q.add_linear(i, -1);
        }
        q.add_quadratic(0, 1, 2);
        q.add_quadratic(1, 2, 2);
        q.add_quadratic(0, 2, 2);
        let out = probe(&q, 10).unwrap();
        let red = out.reduction();
        let rest = if red.reduced().num_vars() == 0 {
            red.delta()
        } else {
            min_energy(red.reduced()) + red.delta()
        };
        assert_eq!(rest, min_energy(&q));
        assert!(out.bound() <= Rational::from_integer(min_energy(&q)));
    }

    #[test]
    fn equality_relation_is_found() {
        // x0 and x1 strongly coupled to agree; no fixed values
        let mut q = Qubo::<i64>::new(3);
        q.add_linear(0, 3);
        q.add_linear(1, 3);
        q.add_quadratic(0, 1, -10);
        q.add_quadratic(1, 2, 1);
        q.add_quadratic(0, 2, 1);
        q.add_linear(2, -1);
        let out = probe(&q, 10).unwrap();
        let red = out.reduction();
        assert_eq!(min_energy(red.reduced()) + red.delta(), min_energy(&q));
        assert!(out.probe_pct() > 0.0);
    }

    #[test]
    fn incumbent_bound_fixes_variable() {
        let mut q = Qubo::<i64>::new(2);
        q.add_linear(0, -5);
        q.add_linear(1, 1);
        q.add_quadratic(0, 1, 1);
        let out = probe_with(
            &q,
            &ProbeOptions {
                max_passes: 3,
                incumbent: Some(-5),
            },
        )
        .unwrap();
        assert_eq!(out.fixed().get(&0), Some(&true));
    }

    #[test]
    fn records_list_relations() {
        let mut q = Qubo::<i64>::new(2);
        q.add_linear(0, 1);
        q.add_linear(1, 1);
        q.add_quadratic(0, 1, -3);
        let out = probe(&q, 5).unwrap();
        let text = out.to_records();
        assert!(text.starts_with("var,value,class\n"));
        assert!(text.contains("probe_pct,bound,passes"));
    }
}
