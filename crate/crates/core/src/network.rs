//! Implication networks, exact maximum flow and the roof-dual bound.
//!
//! Node layout: `0` is the source (the constant-one literal `x_0`), `1` is
//! the sink (`x̄_0`), and variable `i` owns nodes `2 + 2i` (`x_i`) and
//! `3 + 2i` (`x̄_i`). The complement of node `u` is therefore `u ^ 1`.
//!
//! A posiform term `c·u·v` becomes the arc pair `u → v̄`, `v → ū`, each of
//! capacity `c/2`; a linear term `c·u` is treated as `c·u·x_0` and becomes
//! `x_0 → ū`, `u → x̄_0`. Capacities are stored as integers in units of
//! `1/scale`, where `scale = 2·lcm(denominators)`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::Qubo;
use crate::posiform::{to_posiform, Literal, Posiform};
use crate::scalar::{lcm_denominators, Rational, Scalar};

pub const SOURCE: usize = 0;
pub const SINK: usize = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("coefficient {0} is not finite or not exactly representable")]
    NonFinite(String),
    #[error("capacities overflow 64-bit integers after scaling")]
    Overflow,
}

pub fn literal_node(l: Literal) -> usize {
    2 + 2 * l.var + usize::from(l.complemented)
}

pub fn complement_node(u: usize) -> usize {
    u ^ 1
}

/// Literal represented by a node, `None` for source and sink.
pub fn node_literal(u: usize) -> Option<Literal> {
    (u >= 2).then(|| Literal {
        var: (u - 2) / 2,
        complemented: u & 1 == 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicationNetwork {
    num_vars: usize,
    /// Sorted by `(from, to)`, parallel arcs merged.
    arcs: Vec<Arc>,
    scale: i64,
    constant: Rational,
}

impl ImplicationNetwork {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_nodes(&self) -> usize {
        2 * self.num_vars + 2
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Capacities are integers in units of `1/scale`.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Constant term of the originating posiform.
    pub fn constant(&self) -> Rational {
        self.constant
    }

    pub fn find_arc(&self, from: usize, to: usize) -> Option<usize> {
        self.arcs
            .binary_search_by(|a| (a.from, a.to).cmp(&(from, to)))
            .ok()
    }

    /// The skew-symmetric partner `v̄ → ū` of arc `u → v`.
    pub fn mate(&self, arc: usize) -> Option<usize> {
        let a = self.arcs[arc];
        self.find_arc(complement_node(a.to), complement_node(a.from))
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.arcs.len()).all(|e| match self.mate(e) {
            Some(m) => self.arcs[m].capacity == self.arcs[e].capacity,
            None => false,
        })
    }

    /// `<from> <to> <capacity>` per arc, capacities in network units.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# nodes {} arcs {} scale {} (0 = source, 1 = sink, 2+2i = x_i, 3+2i = !x_i)",
            self.num_nodes(),
            self.arcs.len(),
            self.scale
        );
        for a in &self.arcs {
            let _ = writeln!(out, "{} {} {}", a.from, a.to, a.capacity);
        }
        out
    }
}

fn exact<T: Scalar>(c: &T) -> Result<Rational, NetworkError> {
    c.to_rational()
        .filter(|_| c.is_finite_value())
        .ok_or_else(|| NetworkError::NonFinite(format!("{c:?}")))
}

pub fn build_network<T: Scalar>(p: &Posiform<T>) -> Result<ImplicationNetwork, NetworkError> {
    let constant = exact(&p.constant())?;
    let linear: Vec<(Literal, Rational)> = p
        .linear()
        .iter()
        .map(|(&u, c)| Ok((u, exact(c)?)))
        .collect::<Result<_, NetworkError>>()?;
    let quadratic: Vec<(Literal, Literal, Rational)> = p
        .quadratic()
        .iter()
        .map(|(&(u, v), c)| Ok((u, v, exact(c)?)))
        .collect::<Result<_, NetworkError>>()?;

    let lcm = lcm_denominators(
        linear
            .iter()
            .map(|(_, c)| c)
            .chain(quadratic.iter().map(|(_, _, c)| c)),
    )
    .ok_or(NetworkError::Overflow)?;
    let scale = lcm.checked_mul(2).ok_or(NetworkError::Overflow)?;
    // c/2 in units of 1/scale is c·lcm.
    let units = |c: &Rational| -> Result<i64, NetworkError> {
        c.numer()
            .checked_mul(lcm / c.denom())
            .ok_or(NetworkError::Overflow)
    };

    let mut raw: Vec<Arc> = Vec::with_capacity(2 * (linear.len() + quadratic.len()));
    let mut push_pair = |u: usize, v: usize, cap: i64| {
        // term u·v: u → v̄ and v → ū
        raw.push(Arc {
            from: u,
            to: complement_node(v),
            capacity: cap,
        });
        raw.push(Arc {
            from: v,
            to: complement_node(u),
            capacity: cap,
        });
    };
    for (u, c) in &linear {
        push_pair(literal_node(*u), SOURCE, units(c)?);
    }
    for (u, v, c) in &quadratic {
        push_pair(literal_node(*u), literal_node(*v), units(c)?);
    }

    assemble(p.num_vars(), raw, scale, constant)
}

fn assemble(
    num_vars: usize,
    mut raw: Vec<Arc>,
    scale: i64,
    constant: Rational,
) -> Result<ImplicationNetwork, NetworkError> {
    raw.sort_unstable_by_key(|a| (a.from, a.to));
    let mut arcs: Vec<Arc> = Vec::with_capacity(raw.len());
    let mut total: i64 = 0;
    for a in raw {
        total = total.checked_add(a.capacity).ok_or(NetworkError::Overflow)?;
        match arcs.last_mut() {
            Some(last) if last.from == a.from && last.to == a.to => {
                last.capacity += a.capacity;
            }
            _ => arcs.push(a),
        }
    }
    Ok(ImplicationNetwork {
        num_vars,
        arcs,
        scale,
        constant,
    })
}

/// A QUBO with all coefficients multiplied by a common `denom` so that they
/// are integers. Working form for repeated analyses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ScaledQubo {
    pub denom: i64,
    pub offset: i64,
    pub linear: Vec<i64>,
    /// `(i, j, c)` with `i < j`, `c ≠ 0`, no duplicate pairs.
    pub quad: Vec<(usize, usize, i64)>,
}

impl ScaledQubo {
    pub fn from_qubo<T: Scalar>(q: &Qubo<T>) -> Result<Self, NetworkError> {
        let offset = exact(&q.offset())?;
        let linear: Vec<(usize, Rational)> = q
            .linear()
            .iter()
            .map(|(&i, c)| Ok((i, exact(c)?)))
            .collect::<Result<_, NetworkError>>()?;
        let quad: Vec<(usize, usize, Rational)> = q
            .quadratic()
            .iter()
            .map(|(&(i, j), c)| Ok((i, j, exact(c)?)))
            .collect::<Result<_, NetworkError>>()?;
        let denom = lcm_denominators(
            std::iter::once(&offset)
                .chain(linear.iter().map(|(_, c)| c))
                .chain(quad.iter().map(|(_, _, c)| c)),
        )
        .ok_or(NetworkError::Overflow)?;
        let int = |c: &Rational| -> Result<i64, NetworkError> {
            c.numer()
                .checked_mul(denom / c.denom())
                .ok_or(NetworkError::Overflow)
        };
        let mut lin = vec![0i64; q.num_vars()];
        for (i, c) in &linear {
            lin[*i] = int(c)?;
        }
        Ok(ScaledQubo {
            denom,
            offset: int(&offset)?,
            linear: lin,
            quad: quad
                .iter()
                .map(|(i, j, c)| Ok((*i, *j, int(c)?)))
                .collect::<Result<_, NetworkError>>()?,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn value(&self, v: i64) -> Rational {
        Rational::new(v, self.denom)
    }

    /// The problem with `x_k = value` substituted; `k` becomes isolated.
    pub fn conditioned(&self, k: usize, value: bool) -> Self {
        let mut out = ScaledQubo {
            denom: self.denom,
            offset: self.offset,
            linear: self.linear.clone(),
            quad: Vec::with_capacity(self.quad.len()),
        };
        out.linear[k] = 0;
        if value {
            out.offset += self.linear[k];
        }
        for &(i, j, c) in &self.quad {
            if i == k || j == k {
                if value {
                    out.linear[i + j - k] += c;
                }
            } else {
                out.quad.push((i, j, c));
            }
        }
        out
    }

    /// Network of the posiform obtained with the same rules as
    /// [`to_posiform`], scale `2·denom`.
    pub fn network(&self) -> Result<ImplicationNetwork, NetworkError> {
        let mut lin = self.linear.clone();
        let mut constant = self.offset;
        let mut raw = Vec::with_capacity(2 * (self.quad.len() + lin.len()));
        let node = |i: usize, comp: bool| 2 + 2 * i + usize::from(comp);
        for &(i, j, a) in &self.quad {
            let (u, v, cap) = if a > 0 {
                (node(i, false), node(j, false), a)
            } else {
                lin[i] = lin[i].checked_add(a).ok_or(NetworkError::Overflow)?;
                (node(i, false), node(j, true), a.checked_neg().ok_or(NetworkError::Overflow)?)
            };
            raw.push(Arc { from: u, to: v ^ 1, capacity: cap });
            raw.push(Arc { from: v, to: u ^ 1, capacity: cap });
        }
        for (i, &a) in lin.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let (u, cap) = if a > 0 {
                (node(i, false), a)
            } else {
                constant = constant.checked_add(a).ok_or(NetworkError::Overflow)?;
                (node(i, true), a.checked_neg().ok_or(NetworkError::Overflow)?)
            };
            raw.push(Arc { from: u, to: SINK, capacity: cap });
            raw.push(Arc { from: SOURCE, to: u ^ 1, capacity: cap });
        }
        let scale = self.denom.checked_mul(2).ok_or(NetworkError::Overflow)?;
        assemble(self.num_vars(), raw, scale, self.value(constant))
    }
}

/// A symmetric maximum flow and its residual network.
///
/// Per-arc quantities are kept doubled (units of `1/(2·scale)`) so that the
/// symmetrized flow `(f + f̄)/2` stays integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult {
    value: i64,
    scale: i64,
    flow_x2: Vec<i64>,
    residual_x2: Vec<i64>,
}

impl FlowResult {
    pub fn source(&self) -> usize {
        SOURCE
    }

    pub fn sink(&self) -> usize {
        SINK
    }

    /// Flow value in network units.
    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn value_rational(&self) -> Rational {
        Rational::new(self.value, self.scale)
    }

    /// Doubled symmetric flow on each arc.
    pub fn arc_flow_x2(&self) -> &[i64] {
        &self.flow_x2
    }

    /// Doubled residual capacity of each arc; the reverse residual of arc
    /// `e` equals `arc_flow_x2()[e]`.
    pub fn residual_x2(&self) -> &[i64] {
        &self.residual_x2
    }

    /// Successor lists of the residual network (arcs with positive
    /// residual capacity, forward or reverse).
    pub fn residual_graph(&self, net: &ImplicationNetwork) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); net.num_nodes()];
        for (e, a) in net.arcs.iter().enumerate() {
            if self.residual_x2[e] > 0 {
                adj[a.from].push(a.to);
            }
            if self.flow_x2[e] > 0 {
                adj[a.to].push(a.from);
            }
        }
        adj
    }
}

/// Dinic's blocking-flow algorithm on integer capacities.
struct Dinic {
    offsets: Vec<usize>,
    edges_of: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i64>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl Dinic {
    fn new(num_nodes: usize, arcs: &[Arc]) -> Self {
        let m = arcs.len();
        let mut to = Vec::with_capacity(2 * m);
        let mut cap = Vec::with_capacity(2 * m);
        let mut degree = vec![0usize; num_nodes + 1];
        for a in arcs {
            to.push(a.to);
            cap.push(a.capacity);
            to.push(a.from);
            cap.push(0);
            degree[a.from] += 1;
            degree[a.to] += 1;
        }
        let mut offsets = vec![0usize; num_nodes + 1];
        for u in 0..num_nodes {
            offsets[u + 1] = offsets[u] + degree[u];
        }
        let mut fill = offsets.clone();
        let mut edges_of = vec![0usize; 2 * m];
        for (e, a) in arcs.iter().enumerate() {
            edges_of[fill[a.from]] = 2 * e;
            fill[a.from] += 1;
            edges_of[fill[a.to]] = 2 * e + 1;
            fill[a.to] += 1;
        }
        Dinic {
            offsets,
            edges_of,
            to,
            cap,
            level: vec![-1; num_nodes],
            cursor: vec![0; num_nodes],
        }
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.edges_of[self.offsets[u]..self.offsets[u + 1]] {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    /// One augmenting path in the level graph; 0 when blocked.
    fn augment(&mut self, s: usize, t: usize, path: &mut Vec<usize>) -> i64 {
        path.clear();
        let mut u = s;
        loop {
            if u == t {
                let f = path.iter().map(|&e| self.cap[e]).min().unwrap_or(0);
                for &e in path.iter() {
                    self.cap[e] -= f;
                    self.cap[e ^ 1] += f;
                }
                return f;
            }
            let mut advanced = false;
            while self.cursor[u] < self.offsets[u + 1] {
                let e = self.edges_of[self.cursor[u]];
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                self.cursor[u] += 1;
            }
            if !advanced {
                self.level[u] = -1;
                match path.pop() {
                    None => return 0,
                    Some(e) => {
                        u = self.to[e ^ 1];
                        self.cursor[u] += 1;
                    }
                }
            }
        }
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0i64;
        let mut path = Vec::new();
        while self.bfs(s, t) {
            self.cursor.copy_from_slice(&self.offsets[..self.level.len()]);
            loop {
                let f = self.augment(s, t, &mut path);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    fn arc_flow(&self, arc: usize) -> i64 {
        self.cap[2 * arc + 1]
    }
}

/// Exact maximum source→sink flow, symmetrized so that the flow on `u → v`
/// equals the flow on `v̄ → ū`.
pub fn max_flow(net: &ImplicationNetwork) -> FlowResult {
    let mut dinic = Dinic::new(net.num_nodes(), &net.arcs);
    let value = dinic.run(SOURCE, SINK);
    let mut flow_x2 = vec![0i64; net.arcs.len()];
    let mut residual_x2 = vec![0i64; net.arcs.len()];
    for (e, a) in net.arcs.iter().enumerate() {
        let mate = net.mate(e).expect("implication network must be skew-symmetric");
        flow_x2[e] = dinic.arc_flow(e) + dinic.arc_flow(mate);
        residual_x2[e] = 2 * a.capacity - flow_x2[e];
    }
    FlowResult {
        value,
        scale: net.scale,
        flow_x2,
        residual_x2,
    }
}

/// Rejects QUBOs with coefficients that have no exact value.
pub fn check_finite<T: Scalar>(q: &Qubo<T>) -> Result<(), NetworkError> {
    exact(&q.offset())?;
    for c in q.linear().values().chain(q.quadratic().values()) {
        exact(c)?;
    }
    Ok(())
}

/// Roof-dual lower bound of a QUBO: posiform constant plus max-flow value.
pub fn roof_dual<T: Scalar>(q: &Qubo<T>) -> Result<Rational, NetworkError> {
    check_finite(q)?;
    let net = build_network(&to_posiform(q))?;
    let flow = max_flow(&net);
    Ok(net.constant + flow.value_rational())
}
