//! Polyvector fields with polynomial coefficients.
//!
//! A degree-`p` multivector is a finite sum `Σ f_I ∂_I` where `I` runs over
//! strictly increasing `p`-tuples of coordinate indices and `∂_I` is the wedge
//! of the coordinate fields. Wedge products carry no factorial weights, so a
//! bivector acts on differentials as
//! `π(df, dg) = Σ_{i<j} π^{ij} (∂_i f ∂_j g − ∂_j f ∂_i g)`.
//!
//! The Schouten bracket is fixed by
//!
//! 1. `[f, g] = 0` for functions,
//! 2. `[X, f] = X(f)` for a vector field `X`,
//! 3. `[X, Y]` is the commutator of vector fields,
//! 4. `[A, B∧C] = [A, B]∧C + (−1)^{(a−1)·b} B∧[A, C]`,
//! 5. `[A, B] = −(−1)^{(a−1)(b−1)} [B, A]`.
//!
//! With this convention `π` is Poisson iff `[π, π] = 0`, and `[π, f]` is the
//! contraction of `π` with `df` over the second index.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::poly::{
    first_pos, parse_expr, same_table, Accumulator, Expr, PolyError, Polynomial, VarId, VarTable,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MultivecError {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("bracket of two functions has no degree")]
    FunctionBracket,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("`{0}` is not a coordinate")]
    NotACoordinate(String),
    #[error("coefficient still depends on `{0}` after evaluation")]
    NotNumeric(String),
    #[error("expected a multivector of degree {expected}, got {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A strictly increasing tuple of coordinate indices, stored as a bit set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Basis(u64);

impl Basis {
    pub const EMPTY: Basis = Basis(0);

    pub fn single(i: usize) -> Self {
        assert!(i < 64);
        Basis(1 << i)
    }

    /// From strictly increasing indices; `None` if not strictly increasing.
    pub fn from_indices(idx: &[usize]) -> Option<Self> {
        let mut bits = 0u64;
        for w in idx.windows(2) {
            if w[0] >= w[1] {
                return None;
            }
        }
        for &i in idx {
            if i >= 64 {
                return None;
            }
            bits |= 1 << i;
        }
        Some(Basis(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    fn without(self, i: usize) -> Basis {
        Basis(self.0 & !(1 << i))
    }

    fn below(self, i: usize) -> Basis {
        Basis(self.0 & ((1u64 << i) - 1))
    }

    fn above(self, i: usize) -> Basis {
        if i >= 63 {
            Basis(0)
        } else {
            Basis(self.0 & !((1u64 << (i + 1)) - 1))
        }
    }

    /// `∂_self ∧ ∂_other = sign · ∂_(self ∪ other)`, or `None` if they overlap.
    pub fn wedge(self, other: Basis) -> Option<(Basis, i32)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count inversions: pairs (i in self, j in other) with i > j
        let mut inv = 0u32;
        for j in other.iter() {
            inv += self.above(j).0.count_ones();
        }
        Some((Basis(self.0 | other.0), if inv.is_multiple_of(2) { 1 } else { -1 }))
    }

    fn lex_key(self) -> Vec<usize> {
        self.indices()
    }
}

/// A polyvector field of fixed degree over the coordinates of a variable table.
#[derive(Clone)]
pub struct Multivector {
    vars: Arc<VarTable>,
    degree: usize,
    terms: BTreeMap<Basis, Polynomial>,
}

impl PartialEq for Multivector {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.vars, &other.vars)
            && (self.terms == other.terms)
            && (self.degree == other.degree || self.terms.is_empty())
    }
}

impl Eq for Multivector {}

fn check_same(a: &Arc<VarTable>, b: &Arc<VarTable>) -> Result<(), MultivecError> {
    if same_table(a, b) {
        Ok(())
    } else {
        Err(MultivecError::ChartMismatch)
    }
}

fn sign(s: i32) -> Rational {
    Rational::from_integer(s as i64)
}

impl Multivector {
    pub fn zero(vars: &Arc<VarTable>, degree: usize) -> Self {
        Multivector {
            vars: vars.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(f: Polynomial) -> Self {
        let vars = f.vars().clone();
        let mut m = Self::zero(&vars, 0);
        if !f.is_zero() {
            m.terms.insert(Basis::EMPTY, f);
        }
        m
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate_field(vars: &Arc<VarTable>, i: usize) -> Self {
        assert!(i < vars.n_coords(), "coordinate index out of range");
        Self::from_terms(vars, 1, [(Basis::single(i), Polynomial::one(vars))])
    }

    pub fn from_terms(
        vars: &Arc<VarTable>,
        degree: usize,
        terms: impl IntoIterator<Item = (Basis, Polynomial)>,
    ) -> Self {
        let mut m = Self::zero(vars, degree);
        for (b, p) in terms {
            assert_eq!(b.degree(), degree, "basis degree mismatch");
            assert!(
                b.iter().all(|i| i < vars.n_coords()),
                "basis index beyond coordinates"
            );
            m.add_component(b, p);
        }
        m
    }

    fn add_component(&mut self, b: Basis, p: Polynomial) {
        if p.is_zero() {
            return;
        }
        match self.terms.remove(&b) {
            Some(old) => {
                let s = &old + &p;
                if !s.is_zero() {
                    self.terms.insert(b, s);
                }
            }
            None => {
                self.terms.insert(b, p);
            }
        }
    }

    /// Vector field `Σ comps[i] ∂_i`.
    pub fn vector_field(vars: &Arc<VarTable>, comps: &[Polynomial]) -> Self {
        Self::from_terms(
            vars,
            1,
            comps
                .iter()
                .enumerate()
                .map(|(i, p)| (Basis::single(i), p.clone())),
        )
    }

    /// `Σ x_i ∂_i` over the listed coordinates.
    pub fn euler(vars: &Arc<VarTable>, coords: impl IntoIterator<Item = usize>) -> Self {
        Self::from_terms(
            vars,
            1,
            coords
                .into_iter()
                .map(|i| (Basis::single(i), Polynomial::var(vars, i))),
        )
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Basis, &Polynomial)> {
        self.terms.iter().map(|(b, p)| (*b, p))
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total number of monomials across all components.
    pub fn monomial_count(&self) -> usize {
        self.terms.values().map(Polynomial::len).sum()
    }

    pub fn component(&self, b: Basis) -> Polynomial {
        self.terms
            .get(&b)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.vars))
    }

    /// Component on a possibly unsorted index tuple, with the permutation sign.
    pub fn component_at(&self, idx: &[usize]) -> Polynomial {
        let mut sorted = idx.to_vec();
        let mut s = 1;
        // bubble sort for the parity; tuples are tiny
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                match sorted[j].cmp(&sorted[j + 1]) {
                    std::cmp::Ordering::Greater => {
                        sorted.swap(j, j + 1);
                        s = -s;
                    }
                    std::cmp::Ordering::Equal => return Polynomial::zero(&self.vars),
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        let b = Basis::from_indices(&sorted).expect("sorted");
        self.component(b).scale(&sign(s))
    }

    /// Scalar part of a degree-0 multivector.
    pub fn as_function(&self) -> Result<Polynomial, MultivecError> {
        if self.degree != 0 && !self.is_zero() {
            return Err(MultivecError::WrongDegree {
                expected: 0,
                found: self.degree,
            });
        }
        Ok(self.component(Basis::EMPTY))
    }

    /// Components `X^i` of a vector field, indexed by coordinate.
    pub fn vector_components(&self) -> Vec<Polynomial> {
        assert!(self.degree == 1 || self.is_zero());
        (0..self.vars.n_coords())
            .map(|i| self.component(Basis::single(i)))
            .collect()
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&Polynomial) -> Polynomial) -> Self {
        let mut out = Self::zero(&self.vars, self.degree);
        for (b, p) in &self.terms {
            out.add_component(*b, f(p));
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map_coefficients(|p| p.scale(c))
    }

    pub fn mul_function(&self, f: &Polynomial) -> Self {
        assert!(same_table(&self.vars, f.vars()));
        self.map_coefficients(|p| p * f)
    }

    pub fn substitute(&self, assignment: &HashMap<VarId, Rational>) -> Self {
        self.map_coefficients(|p| p.substitute(assignment))
    }

    pub fn compose(&self, assignment: &HashMap<VarId, Polynomial>) -> Self {
        self.map_coefficients(|p| p.compose(assignment))
    }

    /// Same multivector over another table; coordinates and variables are
    /// matched by name.
    pub fn relabel(&self, target: &Arc<VarTable>) -> Result<Self, MultivecError> {
        let coord_map: Vec<usize> = self
            .vars
            .coordinate_names()
            .map(|n| match target.lookup(n) {
                Some(v) if target.is_coordinate(v) => Ok(v),
                _ => Err(MultivecError::NotACoordinate(n.to_string())),
            })
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(target, self.degree);
        for (b, p) in &self.terms {
            let idx: Vec<usize> = b.iter().map(|i| coord_map[i]).collect();
            let mut nb = Basis::EMPTY;
            let mut s = 1;
            for i in idx {
                let (w, t) = nb.wedge(Basis::single(i)).expect("distinct");
                nb = w;
                s *= t;
            }
            out.add_component(nb, p.relabel(target)?.scale(&sign(s)));
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, MultivecError> {
        check_same(&self.vars, &other.vars)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(MultivecError::DegreeMismatch(self.degree, other.degree));
        }
        let mut out = if self.is_zero() {
            other.clone()
        } else {
            self.clone()
        };
        if !self.is_zero() {
            for (b, p) in &other.terms {
                out.add_component(*b, p.clone());
            }
        }
        Ok(out)
    }

    /// `A ∧ B`.
    pub fn wedge(&self, other: &Self) -> Result<Self, MultivecError> {
        check_same(&self.vars, &other.vars)?;
        let mut acc: FxHashMap<Basis, Accumulator> = FxHashMap::default();
        for (ba, pa) in &self.terms {
            for (bb, pb) in &other.terms {
                if let Some((b, s)) = ba.wedge(*bb) {
                    acc.entry(b)
                        .or_insert_with(|| Accumulator::new(&self.vars))
                        .add_product(pa, pb, &sign(s));
                }
            }
        }
        Ok(Self::from_accumulators(
            &self.vars,
            self.degree + other.degree,
            acc,
        ))
    }

    fn from_accumulators(
        vars: &Arc<VarTable>,
        degree: usize,
        acc: FxHashMap<Basis, Accumulator>,
    ) -> Self {
        let mut out = Self::zero(vars, degree);
        for (b, a) in acc {
            let p = a.finish();
            if !p.is_zero() {
                out.terms.insert(b, p);
            }
        }
        out
    }

    /// Schouten bracket `[A, B]`, of degree `a + b − 1`.
    pub fn schouten(&self, other: &Self) -> Result<Self, MultivecError> {
        check_same(&self.vars, &other.vars)?;
        if self.degree + other.degree == 0 {
            return Err(MultivecError::FunctionBracket);
        }
        Ok(bracket(self, other))
    }

    /// Hamiltonian vector field `π(f) = [π, f]`.
    pub fn ham(&self, f: &Polynomial) -> Self {
        assert!(same_table(&self.vars, f.vars()), "chart mismatch");
        if self.degree == 0 {
            return Self::zero(&self.vars, 0);
        }
        bracket(self, &Self::function(f.clone()))
    }

    /// `L_X A = [X, A]` for a vector field `X`.
    pub fn lie_derivative(&self, a: &Self) -> Result<Self, MultivecError> {
        if self.degree != 1 && !self.is_zero() {
            return Err(MultivecError::WrongDegree {
                expected: 1,
                found: self.degree,
            });
        }
        check_same(&self.vars, &a.vars)?;
        if self.is_zero() {
            return Ok(Self::zero(&self.vars, a.degree));
        }
        Ok(bracket(self, a))
    }

    /// `X(f)` for a vector field.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        assert!(self.degree == 1 || self.is_zero());
        let mut acc = Accumulator::new(&self.vars);
        for (b, p) in &self.terms {
            let i = b.iter().next().expect("vector field");
            acc.add_product(p, &f.partial_derivative(i), &Rational::ONE);
        }
        acc.finish()
    }

    /// `π(df, dg)` for a bivector.
    pub fn pair(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        assert!(self.degree == 2 || self.is_zero());
        let n = self.vars.n_coords();
        let df: Vec<Polynomial> = (0..n).map(|i| f.partial_derivative(i)).collect();
        let dg: Vec<Polynomial> = (0..n).map(|i| g.partial_derivative(i)).collect();
        let mut acc = Accumulator::new(&self.vars);
        for (b, p) in &self.terms {
            let idx = b.indices();
            let (i, j) = (idx[0], idx[1]);
            let cross = &(&df[i] * &dg[j]) - &(&df[j] * &dg[i]);
            acc.add_product(p, &cross, &Rational::ONE);
        }
        acc.finish()
    }

    /// Numeric coefficient matrix of a bivector at a point given as values of
    /// every variable it depends on.
    pub fn bivector_matrix(
        &self,
        point: &HashMap<VarId, Rational>,
    ) -> Result<Vec<Vec<Rational>>, MultivecError> {
        if self.degree != 2 && !self.is_zero() {
            return Err(MultivecError::WrongDegree {
                expected: 2,
                found: self.degree,
            });
        }
        let n = self.vars.n_coords();
        let mut m = vec![vec![Rational::ZERO; n]; n];
        for (b, p) in &self.terms {
            let v = p.substitute(point);
            let c = v.as_constant().ok_or_else(|| {
                let (mono, _) = &v.terms()[0];
                let var = mono.powers().next().map(|(v, _)| v).unwrap_or(0);
                MultivecError::NotNumeric(self.vars.name(var).to_string())
            })?;
            let idx = b.indices();
            m[idx[0]][idx[1]] = c.clone();
            m[idx[1]][idx[0]] = -c;
        }
        Ok(m)
    }

    /// Largest coordinate degree among the coefficients.
    pub fn coefficient_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(|p| p.coord_degree()).max()
    }

    pub fn is_coord_homogeneous(&self, d: u32) -> bool {
        self.terms.values().all(|p| p.is_coord_homogeneous(d))
    }

    /// Sorted components for printing and serialization.
    pub fn sorted_terms(&self) -> Vec<(Vec<usize>, &Polynomial)> {
        let mut v: Vec<(Vec<usize>, &Polynomial)> =
            self.terms.iter().map(|(b, p)| (b.lex_key(), p)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Reads the multivector text form, e.g. `(x1 - 2*x2) * d/dx1 ^ d/dx3`.
    pub fn parse(src: &str, vars: &Arc<VarTable>) -> Result<Self, MultivecError> {
        eval_mv(&parse_expr(src)?, vars)
    }
}

fn eval_mv(e: &Expr, vars: &Arc<VarTable>) -> Result<Multivector, MultivecError> {
    Ok(match e {
        Expr::Num(r) => Multivector::function(Polynomial::constant(vars, r.clone())),
        Expr::Var(name, pos) => match vars.lookup(name) {
            Some(v) => Multivector::function(Polynomial::var(vars, v)),
            None => {
                return Err(PolyError::UnknownVariableAt {
                    name: name.clone(),
                    pos: *pos,
                }
                .into())
            }
        },
        Expr::Basis(name, _) => match vars.lookup(name) {
            Some(v) if vars.is_coordinate(v) => Multivector::coordinate_field(vars, v),
            _ => return Err(MultivecError::NotACoordinate(name.clone())),
        },
        Expr::Neg(a) => -eval_mv(a, vars)?,
        Expr::Add(a, b) => eval_mv(a, vars)?.checked_add(&eval_mv(b, vars)?)?,
        Expr::Sub(a, b) => eval_mv(a, vars)?.checked_add(&-eval_mv(b, vars)?)?,
        Expr::Mul(a, b) | Expr::Wedge(a, b) => eval_mv(a, vars)?.wedge(&eval_mv(b, vars)?)?,
        Expr::Pow(a, k) => {
            let base = eval_mv(a, vars)?;
            if base.degree != 0 {
                return Err(PolyError::Syntax {
                    pos: first_pos(a),
                    msg: "power of a non-scalar".into(),
                }
                .into());
            }
            Multivector::function(base.as_function()?.pow(*k))
        }
    })
}

struct Prepared<'a> {
    basis: Basis,
    coef: &'a Polynomial,
    /// `∂_i coef` for every coordinate `i`, `None` when zero.
    grads: Vec<Option<Polynomial>>,
}

fn prepare(m: &Multivector) -> Vec<Prepared<'_>> {
    let n = m.vars.n_coords();
    m.terms
        .par_iter()
        .map(|(b, p)| Prepared {
            basis: *b,
            coef: p,
            grads: (0..n)
                .map(|i| {
                    let d = p.partial_derivative(i);
                    (!d.is_zero()).then_some(d)
                })
                .collect(),
        })
        .collect()
}

/// Expansion of `[f ∂_I, g ∂_J]` from the axioms, with `a = |I|`:
///
/// `[f∂_I, g] = (−1)^{a+1} Σ_k (−1)^{k−1} f ∂_{i_k}g ∂_{I∖i_k}` and
/// `[f∂_I, ∂_j] = −∂_j f ∂_I`, combined through the Leibniz rule in the
/// second slot.
fn bracket_pair(
    a_deg: usize,
    x: &Prepared<'_>,
    y: &Prepared<'_>,
    acc: &mut FxHashMap<Basis, Accumulator>,
    vars: &Arc<VarTable>,
) {
    let (bi, bj) = (x.basis, y.basis);
    // part 1: [f∂_I, g] ∧ ∂_J
    for (k, i) in bi.iter().enumerate() {
        let Some(dg) = &y.grads[i] else { continue };
        let Some((b, w)) = bi.without(i).wedge(bj) else {
            continue;
        };
        // (−1)^{a+1} (−1)^{k}, k zero-based
        let s = if (a_deg + 1 + k).is_multiple_of(2) { 1 } else { -1 };
        acc.entry(b)
            .or_insert_with(|| Accumulator::new(vars))
            .add_product(x.coef, dg, &sign(s * w));
    }
    // part 2: g [f∂_I, ∂_J]
    for (k, j) in bj.iter().enumerate() {
        let Some(df) = &x.grads[j] else { continue };
        let Some((b1, w1)) = bj.below(j).wedge(bi) else {
            continue;
        };
        let Some((b, w2)) = b1.wedge(bj.above(j)) else {
            continue;
        };
        let leib = if (a_deg + 1) % 2 == 1 && k % 2 == 1 {
            // (a−1)(k) odd
            -1
        } else {
            1
        };
        acc.entry(b)
            .or_insert_with(|| Accumulator::new(vars))
            .add_product(y.coef, df, &sign(-leib * w1 * w2));
    }
}

fn bracket(a: &Multivector, b: &Multivector) -> Multivector {
    let vars = &a.vars;
    let degree = a.degree + b.degree - 1;
    if a.is_zero() || b.is_zero() {
        return Multivector::zero(vars, degree);
    }
    let pa = prepare(a);
    let pb = prepare(b);
    let acc = pa
        .par_iter()
        .map(|x| {
            let mut acc: FxHashMap<Basis, Accumulator> = FxHashMap::default();
            for y in &pb {
                bracket_pair(a.degree, x, y, &mut acc, vars);
            }
            acc
        })
        .reduce(FxHashMap::default, |mut l, r| {
            for (k, v) in r {
                match l.get_mut(&k) {
                    Some(existing) => existing.absorb(v),
                    None => {
                        l.insert(k, v);
                    }
                }
            }
            l
        });
    Multivector::from_accumulators(vars, degree, acc)
}

impl<'a> Add<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn add(self, rhs: &'a Multivector) -> Multivector {
        self.checked_add(rhs).expect("incompatible multivectors")
    }
}

impl<'a> Sub<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &'a Multivector) -> Multivector {
        self.checked_add(&-rhs).expect("incompatible multivectors")
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        &self + &rhs
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        &self - &rhs
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(&Rational::from_integer(-1))
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        -&self
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        if self.degree == 0 {
            return write!(f, "{}", self.component(Basis::EMPTY));
        }
        for (n, (idx, p)) in self.sorted_terms().into_iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({p}) *")?;
            for (k, i) in idx.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ^")?;
                }
                write!(f, " d/d{}", self.vars.name(*i))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector[{}]({self})", self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn t3() -> Arc<VarTable> {
        VarTable::new(&["x1", "x2", "x3"], &["J1", "J2", "J3"]).unwrap()
    }

    fn mv(t: &Arc<VarTable>, s: &str) -> Multivector {
        Multivector::parse(s, t).unwrap()
    }

    fn poly(t: &Arc<VarTable>, s: &str) -> Polynomial {
        parse_polynomial(s, t).unwrap()
    }

    #[test]
    fn basis_wedge_signs() {
        let (b, s) = Basis::single(2).wedge(Basis::single(0)).unwrap();
        assert_eq!(b.indices(), vec![0, 2]);
        assert_eq!(s, -1);
        assert!(Basis::single(1).wedge(Basis::single(1)).is_none());
        let i02 = Basis::from_indices(&[0, 2]).unwrap();
        let (b, s) = i02.wedge(Basis::single(1)).unwrap();
        assert_eq!(b.indices(), vec![0, 1, 2]);
        assert_eq!(s, -1);
        assert!(Basis::from_indices(&[2, 1]).is_none());
    }

    #[test]
    fn wedge_of_coordinate_fields() {
        let t = t3();
        let d1 = Multivector::coordinate_field(&t, 0);
        let d2 = Multivector::coordinate_field(&t, 1);
        let w = d1.wedge(&d2).unwrap();
        assert_eq!(w.degree(), 2);
        assert_eq!(w.component_at(&[0, 1]), Polynomial::one(&t));
        assert_eq!(w.component_at(&[1, 0]), -Polynomial::one(&t));
        assert!(d1.wedge(&d1).unwrap().is_zero());
    }

    #[test]
    fn vector_field_bracket_is_commutator() {
        let t = t3();
        let x = mv(&t, "x2*d/dx1");
        let y = mv(&t, "x1^2*d/dx2");
        let c = x.schouten(&y).unwrap();
        assert_eq!(c, mv(&t, "x2*2*x1*d/dx2 - x1^2*d/dx1"));
        let f = poly(&t, "x1*x3");
        assert_eq!(x.schouten(&Multivector::function(f.clone())).unwrap().as_function().unwrap(), x.apply(&f));
    }

    #[test]
    fn ham_contracts_second_index() {
        let t = t3();
        let p = mv(&t, "d/dx1 ^ d/dx2");
        let g = poly(&t, "x1*x3 + x2^2");
        // [∂1∧∂2, g] = ∂2 g ∂1 − ∂1 g ∂2
        assert_eq!(p.ham(&g), mv(&t, "2*x2*d/dx1 - x3*d/dx2"));
        let f = poly(&t, "x1 + x2*x3");
        assert_eq!(p.ham(&f).apply(&g), p.pair(&g, &f));
    }

    #[test]
    fn coordinate_fields_commute() {
        let t = t3();
        let d1 = Multivector::coordinate_field(&t, 0);
        let d3 = Multivector::coordinate_field(&t, 2);
        assert!(d1.schouten(&d3).unwrap().is_zero());
    }

    #[test]
    fn function_bracket_rejected() {
        let t = t3();
        let f = Multivector::function(poly(&t, "x1"));
        assert_eq!(f.schouten(&f), Err(MultivecError::FunctionBracket));
    }

    #[test]
    fn chart_mismatch_rejected() {
        let t = t3();
        let u = VarTable::new(&["y1"], &[] as &[&str]).unwrap();
        let a = Multivector::coordinate_field(&t, 0);
        let b = Multivector::coordinate_field(&u, 0);
        assert_eq!(a.wedge(&b), Err(MultivecError::ChartMismatch));
        assert_eq!(a.schouten(&b), Err(MultivecError::ChartMismatch));
    }

    #[test]
    fn text_round_trip() {
        let t = t3();
        let p = mv(&t, "x1*d/dx2^d/dx3 + x2*d/dx3^d/dx1 + x3*d/dx1^d/dx2");
        let s = p.to_string();
        assert_eq!(s, "(x3) * d/dx1 ^ d/dx2 + (-x2) * d/dx1 ^ d/dx3 + (x1) * d/dx2 ^ d/dx3");
        assert_eq!(mv(&t, &s), p);
        assert!(Multivector::parse("d/dJ1", &t).is_err());
        assert!(Multivector::parse("d/dx1 + x1", &t).is_err());
    }

    #[test]
    fn bivector_matrix_requires_numbers() {
        let t = t3();
        let p = mv(&t, "x1*d/dx2^d/dx3");
        let mut pt = HashMap::new();
        pt.insert(0, Rational::from_integer(5));
        let m = p.bivector_matrix(&pt).unwrap();
        assert_eq!(m[1][2], Rational::from_integer(5));
        assert_eq!(m[2][1], Rational::from_integer(-5));
        assert!(p.bivector_matrix(&HashMap::new()).is_err());
    }
}
