//! QUBO and Ising models, energy evaluation, conversion between the two,
//! and variable elimination (fixing and substitution).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("assignment has {got} values, problem has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("value {value} at position {index} is outside the {domain:?} domain")]
    ValueOutOfDomain { index: usize, value: i8, domain: Domain },
    #[error("{got:?} assignment evaluated against a {expected:?} problem")]
    DomainMismatch { expected: Domain, got: Domain },
    #[error("variable index {index} out of range for {num_vars} variables")]
    InvalidIndex { index: usize, num_vars: usize },
    #[error("variable {0} cannot be substituted by itself")]
    SelfSubstitution(usize),
    #[error("variable {0} is both eliminated and used as a substitution target")]
    ConflictingElimination(usize),
    #[error("coefficient {0} is not exactly representable after conversion")]
    Inexact(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] IoErrorKind),
}

/// `std::io::Error` is not `PartialEq`; keep the message only.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("i/o error: {0}")]
pub struct IoErrorKind(pub String);

impl From<std::io::Error> for ModelError {
    fn from(e: std::io::Error) -> Self {
        ModelError::Io(IoErrorKind(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// x ∈ {0, 1}
    Binary,
    /// s ∈ {-1, +1}
    Spin,
}

/// A full assignment, tagged with its value domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    domain: Domain,
    values: Vec<i8>,
}

impl Assignment {
    pub fn binary(values: Vec<i8>) -> Result<Self, ModelError> {
        Self::new(Domain::Binary, values)
    }

    pub fn spin(values: Vec<i8>) -> Result<Self, ModelError> {
        Self::new(Domain::Spin, values)
    }

    pub fn new(domain: Domain, values: Vec<i8>) -> Result<Self, ModelError> {
        for (index, &value) in values.iter().enumerate() {
            let ok = match domain {
                Domain::Binary => value == 0 || value == 1,
                Domain::Spin => value == -1 || value == 1,
            };
            if !ok {
                return Err(ModelError::ValueOutOfDomain { index, value, domain });
            }
        }
        Ok(Assignment { domain, values })
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Assignment {
            domain: Domain::Binary,
            values: bits.iter().map(|&b| i8::from(b)).collect(),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Binary view; spins map through x = (s + 1) / 2.
    pub fn to_bools(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v == 1).collect()
    }

    pub fn to_spin(&self) -> Assignment {
        match self.domain {
            Domain::Spin => self.clone(),
            Domain::Binary => Assignment {
                domain: Domain::Spin,
                values: self.values.iter().map(|&v| 2 * v - 1).collect(),
            },
        }
    }

    pub fn to_binary(&self) -> Assignment {
        match self.domain {
            Domain::Binary => self.clone(),
            Domain::Spin => Assignment {
                domain: Domain::Binary,
                values: self.values.iter().map(|&v| (v + 1) / 2).collect(),
            },
        }
    }
}

fn canonical_pair(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

fn accumulate<K: Ord, T: Scalar>(map: &mut BTreeMap<K, T>, key: K, c: T) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let sum = *e.get() + c;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// Sparse quadratic objective over binary variables:
/// `offset + Σ a_i x_i + Σ_{i<j} a_ij x_i x_j`.
///
/// Quadratic keys are stored as `(i, j)` with `i < j`, repeated insertions
/// accumulate, and zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo<T> {
    num_vars: usize,
    linear: BTreeMap<usize, T>,
    quadratic: BTreeMap<(usize, usize), T>,
    offset: T,
}

impl<T: Scalar> Qubo<T> {
    pub fn new(num_vars: usize) -> Self {
        Qubo {
            num_vars,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: T::zero(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn linear(&self) -> &BTreeMap<usize, T> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), T> {
        &self.quadratic
    }

    pub fn linear_coeff(&self, i: usize) -> T {
        self.linear.get(&i).copied().unwrap_or_else(T::zero)
    }

    pub fn quadratic_coeff(&self, i: usize, j: usize) -> T {
        self.quadratic
            .get(&canonical_pair(i, j))
            .copied()
            .unwrap_or_else(T::zero)
    }

    pub fn add_offset(&mut self, c: T) {
        self.offset = self.offset + c;
    }

    #[track_caller]
    pub fn add_linear(&mut self, i: usize, c: T) {
        assert!(i < self.num_vars, "variable {i} out of range");
        accumulate(&mut self.linear, i, c);
    }

    /// Adds `c·x_i·x_j`; `i == j` folds into the linear term since x² = x.
    #[track_caller]
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: T) {
        assert!(
            i < self.num_vars && j < self.num_vars,
            "pair ({i}, {j}) out of range"
        );
        if i == j {
            accumulate(&mut self.linear, i, c);
        } else {
            accumulate(&mut self.quadratic, canonical_pair(i, j), c);
        }
    }

    /// Number of stored nonzero linear and quadratic coefficients.
    pub fn size(&self) -> usize {
        self.linear.len() + self.quadratic.len()
    }

    /// Energy of a binary assignment given as booleans. Panics on length
    /// mismatch; use [`Qubo::evaluate`] for checked evaluation.
    pub fn energy(&self, x: &[bool]) -> T {
        assert_eq!(x.len(), self.num_vars);
        let mut e = self.offset;
        for (&i, &c) in &self.linear {
            if x[i] {
                e = e + c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if x[i] && x[j] {
                e = e + c;
            }
        }
        e
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<T, ModelError> {
        if a.domain() != Domain::Binary {
            return Err(ModelError::DomainMismatch {
                expected: Domain::Binary,
                got: a.domain(),
            });
        }
        if a.len() != self.num_vars {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_vars,
                got: a.len(),
            });
        }
        Ok(self.energy(&a.to_bools()))
    }

    /// Adjacency lists `(neighbour, a_ij)` for every variable.
    pub fn neighbours(&self) -> Vec<Vec<(usize, T)>> {
        let mut adj = vec![Vec::new(); self.num_vars];
        for (&(i, j), &c) in &self.quadratic {
            adj[i].push((j, c));
            adj[j].push((i, c));
        }
        adj
    }

    /// Variables that appear in at least one stored term.
    pub fn support(&self) -> Vec<bool> {
        let mut used = vec![false; self.num_vars];
        for &i in self.linear.keys() {
            used[i] = true;
        }
        for &(i, j) in self.quadratic.keys() {
            used[i] = true;
            used[j] = true;
        }
        used
    }

    pub fn to_ising(&self) -> Result<IsingModel<T>, ModelError> {
        qubo_to_ising(self)
    }

    /// Eliminates variables: `fixed` pins values, `substitutions` maps
    /// `j ↦ (i, complemented)` meaning `x_j = x_i` (or `1 − x_i`). The
    /// survivors are renumbered in ascending original order.
    pub fn eliminate(
        &self,
        fixed: &BTreeMap<usize, bool>,
        substitutions: &BTreeMap<usize, Substitution>,
    ) -> Result<Reduction<T>, ModelError> {
        let n = self.num_vars;
        for &v in fixed.keys().chain(substitutions.keys()) {
            if v >= n {
                return Err(ModelError::InvalidIndex { index: v, num_vars: n });
            }
        }
        for (&j, s) in substitutions {
            if s.target >= n {
                return Err(ModelError::InvalidIndex {
                    index: s.target,
                    num_vars: n,
                });
            }
            if s.target == j {
                return Err(ModelError::SelfSubstitution(j));
            }
            if fixed.contains_key(&j)
                || fixed.contains_key(&s.target)
                || substitutions.contains_key(&s.target)
            {
                return Err(ModelError::ConflictingElimination(j));
            }
        }

        let mut surviving = Vec::new();
        let mut new_index = vec![usize::MAX; n];
        for v in 0..n {
            if !fixed.contains_key(&v) && !substitutions.contains_key(&v) {
                new_index[v] = surviving.len();
                surviving.push(v);
            }
        }
        let image = |v: usize| -> Image {
            if let Some(&b) = fixed.get(&v) {
                Image::Const(b)
            } else if let Some(s) = substitutions.get(&v) {
                Image::Lit(new_index[s.target], s.complemented)
            } else {
                Image::Lit(new_index[v], false)
            }
        };

        let mut reduced = Qubo::new(surviving.len());
        reduced.offset = self.offset;
        let mut delta = T::zero();
        for (&i, &c) in &self.linear {
            match image(i) {
                Image::Const(true) => delta = delta + c,
                Image::Const(false) => {}
                Image::Lit(k, false) => reduced.add_linear(k, c),
                Image::Lit(k, true) => {
                    delta = delta + c;
                    reduced.add_linear(k, -c);
                }
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            match (image(i), image(j)) {
                (Image::Const(false), _) | (_, Image::Const(false)) => {}
                (Image::Const(true), Image::Const(true)) => delta = delta + c,
                (Image::Const(true), Image::Lit(k, comp)) | (Image::Lit(k, comp), Image::Const(true)) => {
                    if comp {
                        delta = delta + c;
                        reduced.add_linear(k, -c);
                    } else {
                        reduced.add_linear(k, c);
                    }
                }
                (Image::Lit(k1, c1), Image::Lit(k2, c2)) => {
                    if k1 == k2 {
                        // ℓ·ℓ = ℓ, ℓ·ℓ̄ = 0
                        if c1 == c2 {
                            if c1 {
                                delta = delta + c;
                                reduced.add_linear(k1, -c);
                            } else {
                                reduced.add_linear(k1, c);
                            }
                        }
                    } else {
                        // (c1 + s1·y1)(c2 + s2·y2) with s = 1 − 2c
                        let s1 = if c1 { -T::one() } else { T::one() };
                        let s2 = if c2 { -T::one() } else { T::one() };
                        if c1 && c2 {
                            delta = delta + c;
                        }
                        if c1 {
                            reduced.add_linear(k2, c * s2);
                        }
                        if c2 {
                            reduced.add_linear(k1, c * s1);
                        }
                        reduced.add_quadratic(k1, k2, c * s1 * s2);
                    }
                }
            }
        }

        Ok(Reduction {
            original_vars: n,
            fixed: fixed.clone(),
            substitutions: substitutions.clone(),
            surviving,
            reduced,
            delta,
        })
    }

    /// Serializes to the `p qubo` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p qubo {} {}", self.num_vars, self.size());
        if !self.offset.is_zero() {
            let _ = writeln!(out, "o {}", self.offset.to_text());
        }
        for (&i, c) in &self.linear {
            let _ = writeln!(out, "{i} {i} {}", c.to_text());
        }
        for (&(i, j), c) in &self.quadratic {
            let _ = writeln!(out, "{i} {j} {}", c.to_text());
        }
        out
    }

    /// Reads the `p qubo <num_vars> <num_terms>` text format. Lines
    /// starting with `#` are comments; `o <value>` sets the offset.
    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, ModelError> {
        let mut qubo: Option<Qubo<T>> = None;
        let mut declared_terms = 0usize;
        let mut seen_terms = 0usize;
        let mut offset = T::zero();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ModelError::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "p" => {
                    if qubo.is_some() {
                        return Err(err("duplicate header".into()));
                    }
                    if fields.len() != 4 || fields[1] != "qubo" {
                        return Err(err(format!("malformed header `{line}`")));
                    }
                    let n = fields[2]
                        .parse()
                        .map_err(|_| err(format!("bad variable count `{}`", fields[2])))?;
                    declared_terms = fields[3]
                        .parse()
                        .map_err(|_| err(format!("bad term count `{}`", fields[3])))?;
                    qubo = Some(Qubo::new(n));
                }
                "o" => {
                    if fields.len() != 2 {
                        return Err(err("offset line needs exactly one value".into()));
                    }
                    let v = T::parse_text(fields[1])
                        .ok_or_else(|| err(format!("bad coefficient `{}`", fields[1])))?;
                    offset = offset + v;
                }
                _ => {
                    let q = qubo
                        .as_mut()
                        .ok_or_else(|| err("term before `p qubo` header".into()))?;
                    if fields.len() != 3 {
                        return Err(err(format!("expected `i j coeff`, got `{line}`")));
                    }
                    let i: usize = fields[0]
                        .parse()
                        .map_err(|_| err(format!("bad index `{}`", fields[0])))?;
                    let j: usize = fields[1]
                        .parse()
                        .map_err(|_| err(format!("bad index `{}`", fields[1])))?;
                    if i >= q.num_vars || j >= q.num_vars {
                        return Err(err(format!(
                            "index out of range for {} variables",
                            q.num_vars
                        )));
                    }
                    let c = T::parse_text(fields[2])
                        .ok_or_else(|| err(format!("bad coefficient `{}`", fields[2])))?;
                    q.add_quadratic(i, j, c);
                    seen_terms += 1;
                }
            }
        }
        let mut q = qubo.ok_or(ModelError::Parse {
            line: 0,
            message: "missing `p qubo` header".into(),
        })?;
        if seen_terms != declared_terms {
            return Err(ModelError::Parse {
                line: 0,
                message: format!("header declares {declared_terms} terms, found {seen_terms}"),
            });
        }
        q.offset = offset;
        Ok(q)
    }
}

#[derive(Clone, Copy)]
enum Image {
    Const(bool),
    Lit(usize, bool),
}

/// Quadratic form over spins: `offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<T> {
    num_vars: usize,
    fields: BTreeMap<usize, T>,
    couplings: BTreeMap<(usize, usize), T>,
    offset: T,
}

impl<T: Scalar> IsingModel<T> {
    pub fn new(num_vars: usize) -> Self {
        IsingModel {
            num_vars,
            fields: BTreeMap::new(),
            couplings: BTreeMap::new(),
            offset: T::zero(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn fields(&self) -> &BTreeMap<usize, T> {
        &self.fields
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), T> {
        &self.couplings
    }

    pub fn add_offset(&mut self, c: T) {
        self.offset = self.offset + c;
    }

    #[track_caller]
    pub fn add_field(&mut self, i: usize, h: T) {
        assert!(i < self.num_vars, "spin {i} out of range");
        accumulate(&mut self.fields, i, h);
    }

    /// Adds `J·s_i·s_j`; `i == j` folds into the offset since s² = 1.
    #[track_caller]
    pub fn add_coupling(&mut self, i: usize, j: usize, c: T) {
        assert!(
            i < self.num_vars && j < self.num_vars,
            "pair ({i}, {j}) out of range"
        );
        if i == j {
            self.offset = self.offset + c;
        } else {
            accumulate(&mut self.couplings, canonical_pair(i, j), c);
        }
    }

    /// Energy of a spin configuration given as booleans (`true` = +1).
    pub fn energy_bools(&self, up: &[bool]) -> T {
        assert_eq!(up.len(), self.num_vars);
        let spin = |b: bool| if b { T::one() } else { -T::one() };
        let mut e = self.offset;
        for (&i, &h) in &self.fields {
            e = e + h * spin(up[i]);
        }
        for (&(i, j), &c) in &self.couplings {
            e = e + c * spin(up[i]) * spin(up[j]);
        }
        e
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<T, ModelError> {
        if a.domain() != Domain::Spin {
            return Err(ModelError::DomainMismatch {
                expected: Domain::Spin,
                got: a.domain(),
            });
        }
        if a.len() != self.num_vars {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_vars,
                got: a.len(),
            });
        }
        Ok(self.energy_bools(&a.to_bools()))
    }

    pub fn to_qubo(&self) -> Qubo<T> {
        ising_to_qubo(self)
    }
}

/// Substitutes s = 2x − 1; integer coefficients stay integral.
pub fn ising_to_qubo<T: Scalar>(m: &IsingModel<T>) -> Qubo<T> {
    let two = T::from_int(2);
    let four = T::from_int(4);
    let mut q = Qubo::new(m.num_vars);
    q.offset = m.offset;
    for (&i, &h) in &m.fields {
        q.add_linear(i, two * h);
        q.offset = q.offset - h;
    }
    for (&(i, j), &c) in &m.couplings {
        q.add_quadratic(i, j, four * c);
        q.add_linear(i, -(two * c));
        q.add_linear(j, -(two * c));
        q.offset = q.offset + c;
    }
    q
}

/// Substitutes x = (s + 1) / 2. Fails for integer coefficient types when a
/// coefficient is not divisible by 2 (linear) or 4 (quadratic).
pub fn qubo_to_ising<T: Scalar>(q: &Qubo<T>) -> Result<IsingModel<T>, ModelError> {
    let mut m = IsingModel::new(q.num_vars);
    m.offset = q.offset;
    let inexact = |c: &T| ModelError::Inexact(c.to_text());
    for (&i, c) in &q.linear {
        let half = c.exact_div(2).ok_or_else(|| inexact(c))?;
        m.add_field(i, half);
        m.offset = m.offset + half;
    }
    for (&(i, j), c) in &q.quadratic {
        let quarter = c.exact_div(4).ok_or_else(|| inexact(c))?;
        m.add_coupling(i, j, quarter);
        m.add_field(i, quarter);
        m.add_field(j, quarter);
        m.offset = m.offset + quarter;
    }
    Ok(m)
}

/// `x_j = x_target` or, when `complemented`, `x_j = 1 − x_target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Substitution {
    pub target: usize,
    pub complemented: bool,
}

/// Result of eliminating variables from a [`Qubo`].
///
/// For every assignment `y` of `reduced`,
/// `original.energy(lift(y)) == reduced.energy(y) + delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<T> {
    original_vars: usize,
    fixed: BTreeMap<usize, bool>,
    substitutions: BTreeMap<usize, Substitution>,
    surviving: Vec<usize>,
    reduced: Qubo<T>,
    delta: T,
}

impl<T: Scalar> Reduction<T> {
    pub fn identity(q: &Qubo<T>) -> Self {
        Reduction {
            original_vars: q.num_vars,
            fixed: BTreeMap::new(),
            substitutions: BTreeMap::new(),
            surviving: (0..q.num_vars).collect(),
            reduced: q.clone(),
            delta: T::zero(),
        }
    }

    pub fn original_vars(&self) -> usize {
        self.original_vars
    }

    pub fn fixed(&self) -> &BTreeMap<usize, bool> {
        &self.fixed
    }

    pub fn substitutions(&self) -> &BTreeMap<usize, Substitution> {
        &self.substitutions
    }

    /// Original indices of the reduced variables, in reduced order.
    pub fn surviving(&self) -> &[usize] {
        &self.surviving
    }

    pub fn reduced(&self) -> &Qubo<T> {
        &self.reduced
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Number of original variables removed from the problem.
    pub fn eliminated(&self) -> usize {
        self.original_vars - self.surviving.len()
    }

    /// Full original assignment from an assignment of the reduced problem.
    pub fn lift(&self, y: &[bool]) -> Vec<bool> {
        assert_eq!(y.len(), self.surviving.len());
        let mut x = vec![false; self.original_vars];
        for (k, &v) in self.surviving.iter().enumerate() {
            x[v] = y[k];
        }
        for (&v, &b) in &self.fixed {
            x[v] = b;
        }
        for (&j, s) in &self.substitutions {
            x[j] = x[s.target] ^ s.complemented;
        }
        x
    }

    /// Composes with a reduction of `self.reduced()`. Substitutions are kept
    /// canonical: every target is a surviving variable.
    pub fn then(&self, next: &Reduction<T>) -> Reduction<T> {
        assert_eq!(next.original_vars, self.surviving.len());
        let to_orig = |k: usize| self.surviving[k];
        let mut fixed = self.fixed.clone();
        for (&k, &b) in &next.fixed {
            fixed.insert(to_orig(k), b);
        }
        let mut substitutions = BTreeMap::new();
        // Previous substitutions whose target was eliminated in `next`.
        let resolve = |orig_target: usize, comp: bool| -> Result<Substitution, bool> {
            let k = self
                .surviving
                .binary_search(&orig_target)
                .expect("substitution target must survive");
            if let Some(&b) = next.fixed.get(&k) {
                Err(b ^ comp)
            } else if let Some(s) = next.substitutions.get(&k) {
                Ok(Substitution {
                    target: to_orig(s.target),
                    complemented: comp ^ s.complemented,
                })
            } else {
                Ok(Substitution {
                    target: orig_target,
                    complemented: comp,
                })
            }
        };
        for (&j, s) in &self.substitutions {
            match resolve(s.target, s.complemented) {
                Ok(sub) => {
                    substitutions.insert(j, sub);
                }
                Err(b) => {
                    fixed.insert(j, b);
                }
            }
        }
        for (&k, s) in &next.substitutions {
            substitutions.insert(
                to_orig(k),
                Substitution {
                    target: to_orig(s.target),
                    complemented: s.complemented,
                },
            );
        }
        Reduction {
            original_vars: self.original_vars,
            fixed,
            substitutions,
            surviving: next.surviving.iter().map(|&k| to_orig(k)).collect(),
            reduced: next.reduced.clone(),
            delta: self.delta + next.delta,
        }
    }
}

/// Pins variables to values. Fixed-at-1 coefficients fold into linear terms
/// and `delta`; fixed-at-0 terms vanish.
pub fn fix_variables<T: Scalar>(
    q: &Qubo<T>,
    partial: &BTreeMap<usize, bool>,
) -> Result<Reduction<T>, ModelError> {
    q.eliminate(partial, &BTreeMap::new())
}

/// Eliminates `x_j` via `x_j = x_i` (or `1 − x_i` when `complemented`).
pub fn substitute<T: Scalar>(
    q: &Qubo<T>,
    j: usize,
    i: usize,
    complemented: bool,
) -> Result<Reduction<T>, ModelError> {
    if i == j {
        return Err(ModelError::SelfSubstitution(j));
    }
    let mut subs = BTreeMap::new();
    subs.insert(
        j,
        Substitution {
            target: i,
            complemented,
        },
    );
    q.eliminate(&BTreeMap::new(), &subs)
}

/// Iterates all 2^n binary assignments (n ≤ 25).
#[cfg(test)]
pub(crate) fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    assert!(n <= 25);
    (0u64..(1u64 << n)).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}
