//! Maximum Clique and Maximum Cut encodings.

use thiserror::Error;

use crate::graphs::Graph;
use crate::model::{Assignment, IsingModel, ModelError, Qubo};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("clique size K = {k} outside 1..={n}")]
    CliqueSizeOutOfRange { k: usize, n: usize },
    #[error("penalty weights must be positive")]
    NonPositiveWeight,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CliqueEncoding<T> {
    /// `−A·Σ x_v + B·Σ_{uv ∉ E} x_u x_v`.
    ComplementPenalty { a: T, b: T },
    /// `A·(K − Σ x_v)² + B·(C(K,2) − Σ_{uv ∈ E} x_u x_v)`.
    FixedSize { a: T, b: T, k: usize },
}

impl<T: Scalar> CliqueEncoding<T> {
    /// `A = 1`, `B = 2`.
    pub fn complement_penalty() -> Self {
        CliqueEncoding::ComplementPenalty {
            a: T::one(),
            b: T::from_int(2),
        }
    }

    /// `A = K + 1`, `B = 1`.
    pub fn fixed_size(k: usize) -> Self {
        CliqueEncoding::FixedSize {
            a: T::from_int(k as i64 + 1),
            b: T::one(),
            k,
        }
    }
}

pub fn clique_qubo<T: Scalar>(g: &Graph, enc: &CliqueEncoding<T>) -> Result<Qubo<T>, ProblemError> {
    let n = g.n();
    let mut q = Qubo::new(n);
    match *enc {
        CliqueEncoding::ComplementPenalty { a, b } => {
            if a <= T::zero() || b <= T::zero() {
                return Err(ProblemError::NonPositiveWeight);
            }
            for v in 0..n {
                q.add_linear(v, -a);
            }
            for u in 0..n {
                for v in u + 1..n {
                    if !g.has_edge(u, v) {
                        q.add_quadratic(u, v, b);
                    }
                }
            }
        }
        CliqueEncoding::FixedSize { a, b, k } => {
            if k < 1 || k > n {
                return Err(ProblemError::CliqueSizeOutOfRange { k, n });
            }
            if a <= T::zero() || b <= T::zero() {
                return Err(ProblemError::NonPositiveWeight);
            }
            let kk = T::from_int(k as i64);
            let pairs = T::from_int((k * (k - 1) / 2) as i64);
            q.add_offset(a * kk * kk + b * pairs);
            let lin = a * (T::one() - kk - kk);
            for v in 0..n {
                q.add_linear(v, lin);
            }
            for u in 0..n {
                for v in u + 1..n {
                    let c = if g.has_edge(u, v) { a + a - b } else { a + a };
                    q.add_quadratic(u, v, c);
                }
            }
        }
    }
    Ok(q)
}

/// Minimization form `−f` of the cut value
/// `f(x) = Σ_{uv ∈ E} x_u(1 − x_v) + (1 − x_u)x_v`.
pub fn maxcut_qubo<T: Scalar>(g: &Graph) -> Qubo<T> {
    let mut q = Qubo::new(g.n());
    let two = T::from_int(2);
    for (u, v) in g.edges() {
        q.add_linear(u, -T::one());
        q.add_linear(v, -T::one());
        q.add_quadratic(u, v, two);
    }
    q
}

/// `Σ_{uv ∈ E} s_u s_v`; cut value `= (|E| − energy) / 2`.
pub fn maxcut_ising<T: Scalar>(g: &Graph) -> IsingModel<T> {
    let mut m = IsingModel::new(g.n());
    for (u, v) in g.edges() {
        m.add_coupling(u, v, T::one());
    }
    m
}

/// Dense `n²` size, the count of a full coefficient matrix.
pub fn dense_size<T: Scalar>(q: &Qubo<T>) -> usize {
    q.num_vars() * q.num_vars()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedClique {
    pub vertices: Vec<usize>,
    pub is_clique: bool,
}

pub fn decode_clique(g: &Graph, a: &Assignment) -> Result<DecodedClique, ProblemError> {
    check_len(g, a)?;
    let vertices: Vec<usize> = a
        .to_binary()
        .to_bools()
        .iter()
        .enumerate()
        .filter_map(|(v, &b)| b.then_some(v))
        .collect();
    let is_clique = g.is_clique(&vertices);
    Ok(DecodedClique { vertices, is_clique })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedCut {
    /// Side of each vertex.
    pub side: Vec<bool>,
    pub value: usize,
}

pub fn decode_cut(g: &Graph, a: &Assignment) -> Result<DecodedCut, ProblemError> {
    check_len(g, a)?;
    let side = a.to_binary().to_bools();
    let value = cut_value(g, &side);
    Ok(DecodedCut { side, value })
}

pub fn cut_value(g: &Graph, side: &[bool]) -> usize {
    g.edges().filter(|&(u, v)| side[u] != side[v]).count()
}

fn check_len(g: &Graph, a: &Assignment) -> Result<(), ProblemError> {
    if a.len() != g.n() {
        return Err(ModelError::DimensionMismatch {
            expected: g.n(),
            got: a.len(),
        }
        .into());
    }
    Ok(())
}
