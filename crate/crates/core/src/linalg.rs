//! Exact linear algebra over the rationals.
//!
//! Systems are reduced with integer rows: every row is kept primitive (content
//! stripped, leading entry positive) and combined by cross multiplication, so
//! no fractions appear until the solution is read off.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::multivec::{Basis, Multivector};
use crate::poly::{Monomial, Polynomial, VarId, VarTable};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("inconsistent linear system ({rows} equations, {cols} unknowns)")]
    Inconsistent { rows: usize, cols: usize },
    #[error("row has {got} entries, expected {expected}")]
    Width { got: usize, expected: usize },
    #[error("returned solution does not satisfy the system")]
    Verification,
    #[error("{0} lies outside the coefficient space")]
    OutsideSpace(String),
}

type Row = Vec<(usize, BigInt)>;

/// A system `A x = b` with sparse rational rows.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    cols: usize,
    rows: Vec<Vec<(usize, Rational)>>,
    rhs: Vec<Rational>,
}

/// Particular solution plus a basis of the kernel of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
}

impl LinearSystem {
    pub fn new(cols: usize) -> Self {
        LinearSystem {
            cols,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `Σ c_j x_j = rhs`; zero coefficients are dropped.
    pub fn push(&mut self, coeffs: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) {
        let mut row: Vec<(usize, Rational)> = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        row.sort_by_key(|e| e.0);
        assert!(row.iter().all(|(j, _)| *j < self.cols), "column out of range");
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn push_dense(&mut self, coeffs: &[Rational], rhs: Rational) -> Result<(), LinalgError> {
        if coeffs.len() != self.cols {
            return Err(LinalgError::Width {
                got: coeffs.len(),
                expected: self.cols,
            });
        }
        self.push(coeffs.iter().cloned().enumerate(), rhs);
        Ok(())
    }

    /// Solves the system; every returned vector is checked against the rows.
    pub fn solve(&self) -> Result<Solution, LinalgError> {
        let mut ech = Echelon::new(self.cols);
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            if !ech.insert(integer_row(row, b, self.cols)) {
                return Err(LinalgError::Inconsistent {
                    rows: self.rows.len(),
                    cols: self.cols,
                });
            }
        }
        let sol = ech.solution();
        if !self.satisfied_by(&sol.particular, false) || !sol.kernel.iter().all(|k| self.satisfied_by(k, true)) {
            return Err(LinalgError::Verification);
        }
        Ok(sol)
    }

    /// Residual check of `x`; `homogeneous` tests `A x = 0` instead.
    pub fn satisfied_by(&self, x: &[Rational], homogeneous: bool) -> bool {
        self.rows.par_iter().zip(self.rhs.par_iter()).all(|(row, b)| {
            let mut s = Rational::ZERO;
            for (j, c) in row {
                if !x[*j].is_zero() {
                    s += &(c * &x[*j]);
                }
            }
            if homogeneous {
                s.is_zero()
            } else {
                &s == b
            }
        })
    }
}

fn integer_row(row: &[(usize, Rational)], rhs: &Rational, cols: usize) -> Row {
    let mut l = BigInt::one();
    for (_, c) in row {
        l = l.lcm(&c.denom());
    }
    if !rhs.is_zero() {
        l = l.lcm(&rhs.denom());
    }
    let conv = |c: &Rational| c.numer() * (&l / c.denom());
    let mut out: Row = row.iter().map(|(j, c)| (*j, conv(c))).collect();
    if !rhs.is_zero() {
        out.push((cols, conv(rhs)));
    }
    primitive(&mut out);
    out
}

/// Divides out the content and makes the leading entry positive.
fn primitive(row: &mut Row) {
    let mut g = BigInt::zero();
    for (_, c) in row.iter() {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if row.first().is_some_and(|(_, c)| c.is_negative()) {
        g = -g;
    }
    if !g.is_zero() && !g.is_one() {
        for (_, c) in row.iter_mut() {
            *c = &*c / &g;
        }
    }
}

fn entry(row: &Row, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

/// `a·r − b·p`, merged by column.
fn combine(a: &BigInt, r: &Row, b: &BigInt, p: &Row) -> Row {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map_or(usize::MAX, |e| e.0);
        let cj = p.get(j).map_or(usize::MAX, |e| e.0);
        let (col, v) = if ci < cj {
            i += 1;
            (ci, a * &r[i - 1].1)
        } else if cj < ci {
            j += 1;
            (cj, -(b * &p[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (ci, a * &r[i - 1].1 - b * &p[j - 1].1)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    out
}

/// Reduced row echelon form built one row at a time.
struct Echelon {
    cols: usize,
    pivots: BTreeMap<usize, Row>,
}

impl Echelon {
    fn new(cols: usize) -> Self {
        Echelon {
            cols,
            pivots: BTreeMap::new(),
        }
    }

    /// Returns `false` when the row reduces to `0 = nonzero`.
    fn insert(&mut self, mut row: Row) -> bool {
        let hits: Vec<usize> = row
            .iter()
            .map(|e| e.0)
            .filter(|c| self.pivots.contains_key(c))
            .collect();
        for c in hits {
            let p = &self.pivots[&c];
            let Some(rc) = entry(&row, c).cloned() else { continue };
            let lead = entry(p, c).expect("pivot entry").clone();
            let g = lead.gcd(&rc);
            row = combine(&(&lead / &g), &row, &(&rc / &g), p);
            primitive(&mut row);
        }
        let Some(&(lead_col, _)) = row.first() else {
            return true;
        };
        if lead_col == self.cols {
            return false;
        }
        let lead = row[0].1.clone();
        for p in self.pivots.values_mut() {
            if let Some(pc) = entry(p, lead_col).cloned() {
                let g = lead.gcd(&pc);
                *p = combine(&(&lead / &g), p, &(&pc / &g), &row);
                primitive(p);
            }
        }
        self.pivots.insert(lead_col, row);
        true
    }

    fn solution(&self) -> Solution {
        let frac = |n: &BigInt, d: &BigInt| Rational::from_bigints(n.clone(), d.clone());
        let mut particular = vec![Rational::ZERO; self.cols];
        for (&c, row) in &self.pivots {
            if let Some(b) = entry(row, self.cols) {
                particular[c] = frac(b, &row[0].1);
            }
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains_key(c)).collect();
        let kernel = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::ZERO; self.cols];
                v[f] = Rational::ONE;
                for (&c, row) in &self.pivots {
                    if let Some(x) = entry(row, f) {
                        v[c] = -frac(x, &row[0].1);
                    }
                }
                v
            })
            .collect();
        Solution { particular, kernel }
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut s = Rational::ZERO;
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += &(x * y);
        }
    }
    s
}

/// Removes from `v` its orthogonal projection onto `span` (standard dot
/// product); the result is the same for any spanning set.
pub fn project_out(v: &[Rational], span: &[Vec<Rational>]) -> Vec<Rational> {
    if span.is_empty() {
        return v.to_vec();
    }
    let mut gram = LinearSystem::new(span.len());
    for s in span {
        let row: Vec<Rational> = span.iter().map(|t| dot(s, t)).collect();
        gram.push_dense(&row, dot(s, v)).expect("square");
    }
    let coef = gram.solve().expect("Gram systems are consistent").particular;
    let mut out = v.to_vec();
    for (c, s) in coef.iter().zip(span) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(s) {
            *o -= &(c * x);
        }
    }
    out
}

impl Solution {
    /// The solution orthogonal to `span`, normally the kernel itself.
    pub fn canonical(&self, span: &[Vec<Rational>]) -> Vec<Rational> {
        project_out(&self.particular, span)
    }

    /// The unique solution, if the kernel is trivial.
    pub fn unique(&self) -> Option<&[Rational]> {
        self.kernel.is_empty().then_some(self.particular.as_slice())
    }
}

/// Homogeneous polynomials of one degree in a chosen set of coordinates,
/// with the monomials as basis.
#[derive(Debug, Clone)]
pub struct PolySpace {
    vars: Arc<VarTable>,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl PolySpace {
    pub fn homogeneous(vars: &Arc<VarTable>, coords: &[VarId], degree: u32) -> Self {
        let mut basis = Vec::new();
        fn rec(coords: &[VarId], left: u32, cur: &mut Vec<(VarId, u32)>, out: &mut Vec<Monomial>) {
            if left == 0 {
                out.push(Monomial::from_powers(cur.iter().copied()));
                return;
            }
            let Some((&v, rest)) = coords.split_first() else { return };
            for e in (0..=left).rev() {
                if e > 0 {
                    cur.push((v, e));
                }
                rec(rest, left - e, cur, out);
                if e > 0 {
                    cur.pop();
                }
            }
        }
        rec(coords, degree, &mut Vec::new(), &mut basis);
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        PolySpace {
            vars: vars.clone(),
            basis,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn element(&self, i: usize) -> Polynomial {
        Polynomial::monomial(&self.vars, self.basis[i].clone(), Rational::ONE)
    }

    pub fn elements(&self) -> Vec<Polynomial> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    pub fn poly(&self, v: &[Rational]) -> Polynomial {
        Polynomial::from_terms(
            &self.vars,
            self.basis.iter().cloned().zip(v.iter().cloned()).filter(|(_, c)| !c.is_zero()),
        )
    }

    pub fn coords_of(&self, p: &Polynomial) -> Result<Vec<Rational>, LinalgError> {
        let mut v = vec![Rational::ZERO; self.dim()];
        for (m, c) in p.terms() {
            let i = self.index.get(m).ok_or_else(|| LinalgError::OutsideSpace(p.to_string()))?;
            v[*i] = c.clone();
        }
        Ok(v)
    }
}

/// Finds rational `c` with `Σ c_j images[j] = target`, matching every
/// `(basis, monomial)` component. Monomials may contain parameters, in which
/// case the solution is forced to be independent of them.
pub fn solve_combination(images: &[Multivector], target: &Multivector) -> Result<Solution, LinalgError> {
    let mut keys: HashMap<(Basis, Monomial), usize> = HashMap::new();
    let mut rows: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let mut slot = |b: Basis, m: &Monomial, rows: &mut Vec<Vec<(usize, Rational)>>, rhs: &mut Vec<Rational>| {
        *keys.entry((b, m.clone())).or_insert_with(|| {
            rows.push(Vec::new());
            rhs.push(Rational::ZERO);
            rows.len() - 1
        })
    };
    for (j, img) in images.iter().enumerate() {
        for (b, p) in img.terms() {
            for (m, c) in p.terms() {
                let r = slot(b, m, &mut rows, &mut rhs);
                rows[r].push((j, c.clone()));
            }
        }
    }
    for (b, p) in target.terms() {
        for (m, c) in p.terms() {
            let r = slot(b, m, &mut rows, &mut rhs);
            rhs[r] = c.clone();
        }
    }
    let mut sys = LinearSystem::new(images.len());
    for (row, b) in rows.into_iter().zip(rhs) {
        sys.push(row, b);
    }
    sys.solve()
}

/// The unique rational `r` with `a = r·b`, if one exists.
pub fn ratio(a: &Multivector, b: &Multivector) -> Option<Rational> {
    if b.is_zero() {
        return None;
    }
    let sol = solve_combination(std::slice::from_ref(b), a).ok()?;
    sol.unique().map(|v| v[0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepoisson::builtin;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn solves_with_kernel() {
        // x + y + z = 6, x - y = 0, 2x + 2y + 2z = 12
        let mut s = LinearSystem::new(3);
        s.push_dense(&[r(1), r(1), r(1)], r(6)).unwrap();
        s.push_dense(&[r(1), r(-1), r(0)], r(0)).unwrap();
        s.push_dense(&[r(2), r(2), r(2)], r(12)).unwrap();
        let sol = s.solve().unwrap();
        assert_eq!(sol.kernel.len(), 1);
        assert!(s.satisfied_by(&sol.particular, false));
        let k = &sol.kernel[0];
        assert_eq!(k[0], k[1]);
        assert_eq!(&k[2], &(-&(&k[0] + &k[1])));
        let c = sol.canonical(&sol.kernel);
        assert!(dot(&c, k).is_zero());
        assert!(s.satisfied_by(&c, false));
    }

    #[test]
    fn detects_inconsistency() {
        let mut s = LinearSystem::new(2);
        s.push_dense(&[r(1), r(1)], r(1)).unwrap();
        s.push_dense(&[r(2), r(2)], r(3)).unwrap();
        assert!(matches!(s.solve(), Err(LinalgError::Inconsistent { .. })));
    }

    #[test]
    fn rational_entries() {
        let mut s = LinearSystem::new(2);
        s.push_dense(&[Rational::new(1, 2), Rational::new(1, 3)], r(1)).unwrap();
        s.push_dense(&[Rational::new(-1, 4), r(5)], Rational::new(2, 7)).unwrap();
        let sol = s.solve().unwrap();
        assert!(sol.unique().is_some());
        assert!(s.satisfied_by(&sol.particular, false));
    }

    #[test]
    fn random_systems_verify() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (m, n) = (rng.gen_range(1..8), rng.gen_range(1..8));
            let x: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(-9..10), rng.gen_range(1..5))).collect();
            let mut s = LinearSystem::new(n);
            for _ in 0..m {
                let row: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(-3..4), rng.gen_range(1..4))).collect();
                let b = dot(&row, &x);
                s.push_dense(&row, b).unwrap();
            }
            let sol = s.solve().unwrap();
            assert!(s.satisfied_by(&sol.particular, false));
            assert!(sol.kernel.len() + m.min(n) >= n);
        }
    }

    #[test]
    fn poly_space_dims() {
        let c = builtin("sl3").unwrap();
        let coords: Vec<usize> = (0..8).collect();
        assert_eq!(PolySpace::homogeneous(c.vars(), &coords, 2).dim(), 36);
        assert_eq!(PolySpace::homogeneous(c.vars(), &coords, 3).dim(), 120);
        let s = PolySpace::homogeneous(c.vars(), &coords, 2);
        let q = c.parse("x12*x21 - 3*y13^2").unwrap();
        assert_eq!(s.poly(&s.coords_of(&q).unwrap()), q);
    }

    #[test]
    fn ratio_of_multivectors() {
        let c = builtin("so3").unwrap();
        let p = c.poisson();
        assert_eq!(ratio(&p.scale(&Rational::new(-3, 2)), p), Some(Rational::new(-3, 2)));
        let e = c.euler();
        assert_eq!(ratio(&e, &p.ham(&c.coord("x1").unwrap())), None);
    }
}
