//! Strong and weak persistencies read off the residual implication network.
//!
//! With a symmetric maximum flow, every literal reachable from the source in
//! the residual network is 1 in every minimizer (strong). Any consistent set
//! of literals that contains those and is closed under residual successors
//! can be set to 1 without increasing the energy (weak).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ModelError, Qubo, Reduction};
use crate::network::{max_flow, NetworkError, ScaledQubo, SINK, SOURCE};
use crate::scalar::{format_rational, Rational, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PersistencyError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("persistency result covers {got} variables but the problem has {expected}")]
    Mismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMode {
    Strong,
    Weak,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistencyResult {
    num_vars: usize,
    strong: BTreeMap<usize, bool>,
    weak: BTreeMap<usize, bool>,
    bound: Rational,
}

impl PersistencyResult {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Values shared by every minimizer.
    pub fn strong(&self) -> &BTreeMap<usize, bool> {
        &self.strong
    }

    /// Values shared by at least one minimizer; contains `strong`.
    pub fn weak(&self) -> &BTreeMap<usize, bool> {
        &self.weak
    }

    /// Roof-dual lower bound.
    pub fn bound(&self) -> Rational {
        self.bound
    }

    pub fn strong_pct(&self) -> f64 {
        pct(self.strong.len(), self.num_vars)
    }

    pub fn weak_pct(&self) -> f64 {
        pct(self.weak.len(), self.num_vars)
    }

    /// `var,value,class` rows followed by a `strong_pct,weak_pct,bound`
    /// summary.
    pub fn to_records(&self) -> String {
        let mut out = String::from("var,value,class\n");
        for (&v, &b) in &self.weak {
            let class = if self.strong.contains_key(&v) { "strong" } else { "weak" };
            let _ = writeln!(out, "{v},{},{class}", u8::from(b));
        }
        let _ = writeln!(out, "strong_pct,weak_pct,bound");
        let _ = writeln!(
            out,
            "{:.2},{:.2},{}",
            self.strong_pct(),
            self.weak_pct(),
            format_rational(&self.bound)
        );
        out
    }
}

pub(crate) fn pct(count: usize, total: usize) -> f64 {
    if total == 0 {
        100.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

pub fn analyze<T: Scalar>(q: &Qubo<T>) -> Result<PersistencyResult, PersistencyError> {
    Ok(analyze_scaled(&ScaledQubo::from_qubo(q)?)?)
}

pub(crate) fn analyze_scaled(q: &ScaledQubo) -> Result<PersistencyResult, NetworkError> {
    let n = q.num_vars();
    let net = q.network()?;
    let flow = max_flow(&net);
    let adj = flow.residual_graph(&net);
    let bound = net.constant() + flow.value_rational();

    let nodes = net.num_nodes();
    let mut in_t = vec![false; nodes];
    let mut stack = vec![SOURCE];
    in_t[SOURCE] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !in_t[v] {
                in_t[v] = true;
                stack.push(v);
            }
        }
    }
    debug_assert!(!in_t[SINK]);

    let mut strong = BTreeMap::new();
    for i in 0..n {
        let (p, m) = (2 + 2 * i, 3 + 2 * i);
        debug_assert!(!(in_t[p] && in_t[m]));
        if in_t[p] {
            strong.insert(i, true);
        } else if in_t[m] {
            strong.insert(i, false);
        }
    }

    let comp = scc_ids(&adj);
    let mut weak = strong.clone();
    let mut mark = vec![0u32; nodes];
    let mut stamp = 0u32;
    let mut added = Vec::new();
    for i in 0..n {
        if weak.contains_key(&i) {
            continue;
        }
        let (p, m) = (2 + 2 * i, 3 + 2 * i);
        if comp.id[p] == comp.id[m] {
            continue;
        }
        // Tarjan numbers components in reverse topological order, so a
        // path x̄_i ⇝ x_i requires id[x̄_i] > id[x_i].
        let may_fail = comp.id[m] > comp.id[p];
        stamp += 1;
        let value = if close(&adj, m, may_fail.then_some(p), &mut in_t, &mut mark, stamp, &mut added) {
            false
        } else {
            stamp += 1;
            let ok = close(&adj, p, None, &mut in_t, &mut mark, stamp, &mut added);
            debug_assert!(ok);
            true
        };
        weak.insert(i, value);
        for &u in &added {
            if u >= 2 && u / 2 - 1 != i {
                weak.entry(u / 2 - 1).or_insert(u & 1 == 0);
            }
        }
    }

    Ok(PersistencyResult {
        num_vars: n,
        strong,
        weak,
        bound,
    })
}

/// Adds the residual closure of `start` to `in_t`, unless it reaches
/// `forbidden`, in which case nothing is added and `false` is returned.
fn close(
    adj: &[Vec<usize>],
    start: usize,
    forbidden: Option<usize>,
    in_t: &mut [bool],
    mark: &mut [u32],
    stamp: u32,
    added: &mut Vec<usize>,
) -> bool {
    added.clear();
    mark[start] = stamp;
    added.push(start);
    let mut head = 0;
    while head < added.len() {
        let u = added[head];
        head += 1;
        for &v in &adj[u] {
            if in_t[v] || mark[v] == stamp {
                continue;
            }
            if Some(v) == forbidden {
                added.clear();
                return false;
            }
            mark[v] = stamp;
            added.push(v);
        }
    }
    for &u in added.iter() {
        in_t[u] = true;
    }
    true
}

struct Components {
    id: Vec<usize>,
}

/// Iterative Tarjan; ids in reverse topological order of the condensation.
fn scc_ids(adj: &[Vec<usize>]) -> Components {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut id = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_id = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            if *pos < adj[u].len() {
                let v = adj[u][*pos];
                *pos += 1;
                if index[v] == UNSEEN {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[u]);
                }
                if low[u] == index[u] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        id[w] = next_id;
                        if w == u {
                            break;
                        }
                    }
                    next_id += 1;
                }
            }
        }
    }
    Components { id }
}

/// Fixes the strong or weak set of `r`.
pub fn reduce<T: Scalar>(
    q: &Qubo<T>,
    r: &PersistencyResult,
    mode: ReductionMode,
) -> Result<Reduction<T>, PersistencyError> {
    if r.num_vars != q.num_vars() {
        return Err(PersistencyError::Mismatch {
            expected: q.num_vars(),
            got: r.num_vars,
        });
    }
    let set = match mode {
        ReductionMode::Strong => &r.strong,
        ReductionMode::Weak => &r.weak,
    };
    Ok(q.eliminate(set, &BTreeMap::new())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::all_assignments;

    fn minimizers(q: &Qubo<i64>) -> (i64, Vec<Vec<bool>>) {
        let all: Vec<(i64, Vec<bool>)> = all_assignments(q.num_vars())
            .map(|x| (q.energy(&x), x))
            .collect();
        let min = all.iter().map(|(e, _)| *e).min().unwrap();
        (min, all.into_iter().filter(|(e, _)| *e == min).map(|(_, x)| x).collect())
    }

    #[test]
    fn single_negative_linear_is_strong() {
        let mut q = Qubo::<i64>::new(1);
        q.add_linear(0, -2);
        let r = analyze(&q).unwrap();
        assert_eq!(r.strong().get(&0), Some(&true));
        assert_eq!(r.weak().get(&0), Some(&true));
        assert_eq!(r.bound(), Rational::from_integer(-2));
    }

    #[test]
    fn isolated_variable_weak_zero() {
        let q = Qubo::<i64>::new(2);
        let r = analyze(&q).unwrap();
        assert!(r.strong().is_empty());
        assert_eq!(r.weak().get(&0), Some(&false));
        assert_eq!(r.weak().get(&1), Some(&false));
    }

    #[test]
    fn frustrated_cycle_leaves_variables_open() {
        // 2-cycle of antiferromagnetic pairs on a triangle: roof dual is not tight
        let mut q = Qubo::<i64>::new(3);
        for i in 0..3 {
            q.add_linear(i, -1);
        }
        q.add_quadratic(0, 1, 2);
        q.add_quadratic(1, 2, 2);
        q.add_quadratic(0, 2, 2);
        let r = analyze(&q).unwrap();
        assert!(r.weak().is_empty());
        let (min, _) = minimizers(&q);
        assert!(r.bound() <= Rational::from_integer(min));
    }

    #[test]
    fn reduction_keeps_an_optimum() {
        let mut q = Qubo::<i64>::new(4);
        q.add_linear(0, -3);
        q.add_linear(1, 2);
        q.add_linear(3, -1);
        q.add_quadratic(0, 1, -4);
        q.add_quadratic(1, 2, 3);
        q.add_quadratic(2, 3, -2);
        let r = analyze(&q).unwrap();
        let (min, opt) = minimizers(&q);
        for (&v, &b) in r.strong() {
            assert!(opt.iter().all(|x| x[v] == b));
        }
        let red = reduce(&q, &r, ReductionMode::Weak).unwrap();
        let (rmin, _) = minimizers(red.reduced());
        assert_eq!(rmin + red.delta(), min);
    }

    #[test]
    fn empty_result_reduces_to_identity() {
        let q = Qubo::<i64>::new(0);
        let r = analyze(&q).unwrap();
        let red = reduce(&q, &r, ReductionMode::Strong).unwrap();
        assert_eq!(red, Reduction::identity(&q));
    }

    #[test]
    fn mismatched_result_rejected() {
        let r = analyze(&Qubo::<i64>::new(2)).unwrap();
        assert_eq!(
            reduce(&Qubo::<i64>::new(3), &r, ReductionMode::Weak),
            Err(PersistencyError::Mismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn records_have_summary() {
        let mut q = Qubo::<i64>::new(2);
        q.add_linear(0, -2);
        let text = analyze(&q).unwrap().to_records();
        assert_eq!(
            text,
            "var,value,class\n0,1,strong\n1,0,weak\nstrong_pct,weak_pct,bound\n50.00,100.00,-2\n"
        );
    }

    #[test]
    fn tarjan_orders_components_reverse_topologically() {
        let adj = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let c = scc_ids(&adj);
        assert_eq!(c.id[1], c.id[2]);
        assert!(c.id[0] > c.id[1] && c.id[1] > c.id[3]);
    }
}
