use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{Monomial, PolyError, VarId, VarTable};
use crate::rational::Rational;

/// Products with more term pairs than this are split across threads.
const PAR_THRESHOLD: usize = 1 << 14;

/// Sparse polynomial with exact rational coefficients.
///
/// Terms are kept sorted in descending graded-lexicographic order with no zero
/// coefficients, so structural equality is mathematical equality.
#[derive(Clone)]
pub struct Polynomial {
    vars: Arc<VarTable>,
    terms: Vec<(Monomial, Rational)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

pub(crate) fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn assert_same(a: &Arc<VarTable>, b: &Arc<VarTable>) {
    assert!(
        same_table(a, b),
        "polynomial operands live over different variable tables"
    );
}

impl Polynomial {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(vars: &Arc<VarTable>, c: Rational) -> Self {
        Self::monomial(vars, Monomial::one(), c)
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::constant(vars, Rational::ONE)
    }

    pub fn monomial(vars: &Arc<VarTable>, m: Monomial, c: Rational) -> Self {
        let terms = if c.is_zero() { vec![] } else { vec![(m, c)] };
        Polynomial {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn var(vars: &Arc<VarTable>, v: VarId) -> Self {
        Self::monomial(vars, Monomial::var(v), Rational::ONE)
    }

    pub fn var_named(vars: &Arc<VarTable>, name: &str) -> Result<Self, PolyError> {
        Ok(Self::var(vars, vars.get(name)?))
    }

    /// Collects arbitrary (possibly repeated, possibly zero) terms into canonical form.
    pub fn from_terms(
        vars: &Arc<VarTable>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut acc = Accumulator::new(vars);
        for (m, c) in terms {
            acc.add_term(m, &c);
        }
        acc.finish()
    }

    fn from_sorted(vars: Arc<VarTable>, terms: Vec<(Monomial, Rational)>) -> Self {
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { vars, terms }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant term value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::ZERO),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// Total degree (`None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    /// Set of degrees in the coordinate variables alone.
    fn coord_degrees(&self) -> impl Iterator<Item = u32> + '_ {
        let n = self.vars.n_coords();
        self.terms.iter().map(move |(m, _)| m.degree_below(n))
    }

    /// True if every term has coordinate degree `d`. Zero is homogeneous of every degree.
    pub fn is_coord_homogeneous(&self, d: u32) -> bool {
        self.coord_degrees().all(|e| e == d)
    }

    pub fn coord_degree(&self) -> Option<u32> {
        self.coord_degrees().max()
    }

    /// Whether any term involves variable `v`.
    pub fn involves(&self, v: VarId) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(v) > 0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, k)| (m.clone(), k * c))
            .collect();
        Self::from_sorted(self.vars.clone(), terms)
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        // multiplying by a monomial preserves the grlex order
        let terms = self
            .terms
            .iter()
            .map(|(m, k)| (m.mul(mono), k * c))
            .collect();
        Self::from_sorted(self.vars.clone(), terms)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        assert_same(&self.vars, &other.vars);
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let fix = |c: &Rational| if negate_other { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.grlex_cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), fix(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), fix(c))));
        Self::from_sorted(self.vars.clone(), out)
    }

    /// Formal partial derivative with respect to variable `v`.
    pub fn partial_derivative(&self, v: VarId) -> Self {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            m.derivative(v)
                .map(|(k, dm)| (dm, c * &Rational::from_integer(k as i64)))
        });
        Self::from_terms(&self.vars, terms)
    }

    pub fn partial_named(&self, name: &str) -> Result<Self, PolyError> {
        Ok(self.partial_derivative(self.vars.get(name)?))
    }

    /// Replaces the assigned variables by rational values; others are untouched.
    pub fn substitute(&self, assignment: &HashMap<VarId, Rational>) -> Self {
        if assignment.is_empty() {
            return self.clone();
        }
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for (v, e) in m.powers() {
                match assignment.get(&v) {
                    Some(val) => {
                        if val.is_zero() {
                            return None;
                        }
                        coef = &coef * &val.pow(e);
                    }
                    None => rest.push((v, e)),
                }
            }
            Some((Monomial::from_powers(rest), coef))
        });
        Self::from_terms(&self.vars, terms)
    }

    /// Substitution by name, for convenience in tests and tools.
    pub fn substitute_named(&self, assignment: &[(&str, Rational)]) -> Result<Self, PolyError> {
        let mut map = HashMap::new();
        for (name, val) in assignment {
            map.insert(self.vars.get(name)?, val.clone());
        }
        Ok(self.substitute(&map))
    }

    /// Replaces the assigned variables by polynomials over the same table.
    pub fn compose(&self, assignment: &HashMap<VarId, Polynomial>) -> Self {
        let mut out = Accumulator::new(&self.vars);
        let mut power_cache: HashMap<(VarId, u32), Polynomial> = HashMap::new();
        for (m, c) in &self.terms {
            let mut factor = Polynomial::constant(&self.vars, c.clone());
            let mut rest = Vec::new();
            for (v, e) in m.powers() {
                match assignment.get(&v) {
                    Some(p) => {
                        assert_same(&self.vars, &p.vars);
                        let pe = power_cache
                            .entry((v, e))
                            .or_insert_with(|| p.pow(e))
                            .clone();
                        factor = &factor * &pe;
                    }
                    None => rest.push((v, e)),
                }
            }
            let rest = Monomial::from_powers(rest);
            for (fm, fc) in &factor.terms {
                out.add_term(fm.mul(&rest), fc);
            }
        }
        out.finish()
    }

    /// Same polynomial over another table, matching variables by name.
    pub fn relabel(&self, target: &Arc<VarTable>) -> Result<Self, PolyError> {
        if same_table(&self.vars, target) {
            let mut p = self.clone();
            p.vars = target.clone();
            return Ok(p);
        }
        let map: Vec<VarId> = (0..self.vars.len())
            .map(|v| target.get(self.vars.name(v)))
            .collect::<Result<_, _>>()?;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.remap(|v| map[v]), c.clone()));
        Ok(Self::from_terms(target, terms))
    }

    /// Groups terms by their monomial in the variables selected by `pick`.
    /// Each value holds the complementary factor.
    pub fn collect_by(&self, pick: impl Fn(VarId) -> bool) -> Vec<(Monomial, Polynomial)> {
        let mut groups: FxHashMap<Monomial, Vec<(Monomial, Rational)>> = FxHashMap::default();
        for (m, c) in &self.terms {
            let (key, rest) = m.split(&pick);
            groups.entry(key).or_default().push((rest, c.clone()));
        }
        let mut out: Vec<(Monomial, Polynomial)> = groups
            .into_iter()
            .map(|(k, ts)| (k, Polynomial::from_terms(&self.vars, ts)))
            .collect();
        out.sort_by(|a, b| b.0.grlex_cmp(&a.0));
        out
    }

    /// Splits into coefficients of powers of `v`: `self = Σ_k v^k · out[k]`.
    pub fn coefficients_in(&self, v: VarId) -> Vec<Polynomial> {
        let mut out: Vec<Vec<(Monomial, Rational)>> = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            if out.len() <= e {
                out.resize_with(e + 1, Vec::new);
            }
            let (_, rest) = m.split(|w| w == v);
            out[e].push((rest, c.clone()));
        }
        out.into_iter()
            .map(|ts| Polynomial::from_terms(&self.vars, ts))
            .collect()
    }

    /// Largest absolute coefficient numerator/denominator size, for diagnostics.
    pub fn max_coefficient_bits(&self) -> u64 {
        self.terms
            .iter()
            .map(|(_, c)| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

/// Mutable sum of terms, used for products and bracket expansion.
pub struct Accumulator {
    vars: Arc<VarTable>,
    map: FxHashMap<Monomial, Rational>,
}

impl Accumulator {
    pub fn new(vars: &Arc<VarTable>) -> Self {
        Accumulator {
            vars: vars.clone(),
            map: FxHashMap::default(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.map.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn add(&mut self, p: &Polynomial) {
        self.add_scaled(p, &Rational::ONE);
    }

    pub fn add_scaled(&mut self, p: &Polynomial, s: &Rational) {
        debug_assert!(same_table(&self.vars, &p.vars));
        for (m, c) in &p.terms {
            self.add_term(m.clone(), &(c * s));
        }
    }

    /// `self += s · a · b`.
    pub fn add_product(&mut self, a: &Polynomial, b: &Polynomial, s: &Rational) {
        debug_assert!(same_table(&self.vars, &a.vars) && same_table(&a.vars, &b.vars));
        for (ma, ca) in &a.terms {
            let cas = ca * s;
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), &(&cas * cb));
            }
        }
    }

    pub fn absorb(&mut self, other: Accumulator) {
        if self.map.len() < other.map.len() {
            let mine = std::mem::replace(&mut self.map, other.map);
            for (m, c) in mine {
                self.add_term(m, &c);
            }
        } else {
            for (m, c) in other.map {
                self.add_term(m, &c);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.map.values().all(Rational::is_zero)
    }

    pub fn finish(self) -> Polynomial {
        let mut terms: Vec<(Monomial, Rational)> =
            self.map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.grlex_cmp(&a.0));
        Polynomial::from_sorted(self.vars, terms)
    }
}

fn multiply(a: &Polynomial, b: &Polynomial) -> Polynomial {
    assert_same(&a.vars, &b.vars);
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero(&a.vars);
    }
    if a.len() == 1 {
        return b.mul_monomial(&a.terms[0].0, &a.terms[0].1);
    }
    if b.len() == 1 {
        return a.mul_monomial(&b.terms[0].0, &b.terms[0].1);
    }
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if outer.len() * inner.len() < PAR_THRESHOLD {
        let mut acc = Accumulator::new(&a.vars);
        acc.add_product(outer, inner, &Rational::ONE);
        return acc.finish();
    }
    let chunk = (outer.len() / rayon::current_num_threads().max(1)).max(16);
    let acc = outer
        .terms
        .par_chunks(chunk)
        .map(|block| {
            let mut acc = Accumulator::new(&a.vars);
            for (m, c) in block {
                for (mb, cb) in &inner.terms {
                    acc.add_term(m.mul(mb), &(c * cb));
                }
            }
            acc
        })
        .reduce(
            || Accumulator::new(&a.vars),
            |mut x, y| {
                x.absorb(y);
                x
            },
        );
    acc.finish()
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.merge(rhs, false)
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.merge(rhs, true)
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        multiply(self, rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&Rational::from_integer(-1))
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &'a Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Polynomial> for &'a Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_polynomial(self))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Arc<VarTable> {
        VarTable::new(&["x", "y", "z"], &["b"]).unwrap()
    }

    fn p(t: &Arc<VarTable>, s: &str) -> Polynomial {
        super::super::parse_polynomial(s, t).unwrap()
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let t = table();
        let a = p(&t, "x^2 + 3*x*y - y");
        assert!((&a - &a).terms().is_empty());
        let b = p(&t, "y - 1");
        assert!((&(&a * &b) - &(&b * &a)).is_zero());
    }

    #[test]
    fn derivative_and_substitution() {
        let t = table();
        let a = p(&t, "x^2*y + b*z");
        assert_eq!(a.partial_named("x").unwrap(), p(&t, "2*x*y"));
        assert!(p(&t, "7").partial_named("x").unwrap().is_zero());
        let s = a
            .substitute_named(&[("b", Rational::ZERO), ("y", Rational::from_integer(2))])
            .unwrap();
        assert_eq!(s, p(&t, "2*x^2"));
    }

    #[test]
    fn compose_substitutes_polynomials() {
        let t = table();
        let a = p(&t, "x*y + b");
        let mut map = HashMap::new();
        map.insert(t.get("x").unwrap(), p(&t, "y + z"));
        assert_eq!(a.compose(&map), p(&t, "y^2 + y*z + b"));
    }

    #[test]
    fn large_products_match_serial() {
        let t = table();
        let a = p(&t, "(x + y + z + b + 1)^6");
        let b = p(&t, "(x - y + 2*z - b + 3)^5");
        let mut acc = Accumulator::new(&t);
        acc.add_product(&a, &b, &Rational::ONE);
        assert_eq!(&a * &b, acc.finish());
    }

    #[test]
    fn coefficients_in_variable() {
        let t = table();
        let a = p(&t, "x^2*y + x*z + y");
        let cs = a.coefficients_in(t.get("x").unwrap());
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], p(&t, "y"));
        assert_eq!(cs[1], p(&t, "z"));
        assert_eq!(cs[2], p(&t, "y"));
    }
}
