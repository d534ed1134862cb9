//! Magri–Lenard chains of a pencil, Casimir checks for `π₂`, shifted
//! Casimirs, involution matrices and rank sampling.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clpencil::{assemble, is_numeric, solve_poly, CLData, CLPencil, ClError};
use crate::linalg::{self, LinalgError, LinearSystem, PolySpace};
use crate::liepoisson::Chart;
use crate::multivec::{MultivecError, Multivector};
use crate::poly::{format_polynomial, Polynomial, VarId};
use crate::rational::Rational;
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("seed is not a Casimir of π₁: {0} residual terms in π₁(f₀)")]
    NotCasimir(usize),
    #[error("seed must be a nonzero homogeneous polynomial in the coordinates")]
    NotHomogeneous,
    #[error("chain solving needs numeric bivectors and seed")]
    NotNumeric,
    #[error("not a Casimir of π₂: {0} residual terms")]
    NotPi2Casimir(usize),
    #[error("chart has no parameter named {0}")]
    NoParameter(String),
    #[error(transparent)]
    Cl(#[from] ClError),
    #[error(transparent)]
    Multivec(#[from] MultivecError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Two compatible Poisson bivectors on one chart.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub chart: Chart,
    pub pi1: Multivector,
    pub pi2: Multivector,
}

impl Pencil {
    pub fn new(chart: Chart, pi1: Multivector, pi2: Multivector) -> Self {
        Pencil { chart, pi1, pi2 }
    }

    /// `π₁ + t·π₂`.
    pub fn member(&self, t: &Polynomial) -> Multivector {
        &self.pi1 + &self.pi2.mul_function(t)
    }

    /// Substitutes numeric parameter values into both bivectors.
    pub fn substitute(&self, values: &HashMap<VarId, Rational>) -> Pencil {
        Pencil {
            chart: self.chart.clone(),
            pi1: self.pi1.substitute(values),
            pi2: self.pi2.substitute(values),
        }
    }
}

impl From<CLPencil> for Pencil {
    fn from(p: CLPencil) -> Self {
        Pencil::new(p.chart, p.pi1, p.pi2)
    }
}

/// A chain `f₀, f₁, …` with `π₁(f₀) = 0` and `π₁(f_{i+1}) + π₂(f_i) = 0`.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub members: Vec<Polynomial>,
    /// Casimirs of `π₁` in the degree of each solved member.
    pub kernels: Vec<Vec<Polynomial>>,
    /// Step at which no continuation exists, if any.
    pub obstruction: Option<usize>,
}

impl ChainState {
    pub fn kernel_dims(&self) -> Vec<usize> {
        self.kernels.iter().map(Vec::len).collect()
    }

    /// Residual monomials of every defining relation, recomputed.
    pub fn check(&self, pencil: &Pencil) -> VerificationReport {
        VerificationReport::timed("chain_relations", |r| {
            r.residual("π₁(f₀)", pencil.pi1.ham(&self.members[0]).monomial_count());
            for (i, w) in self.members.windows(2).enumerate() {
                let lhs = &pencil.pi1.ham(&w[1]) + &pencil.pi2.ham(&w[0]);
                r.residual(format!("π₁(f{}) + π₂(f{i})", i + 1), lhs.monomial_count());
            }
            r.kernel_dims = self.kernel_dims();
        })
    }

    /// Display lines `f_i = …`.
    pub fn lines(&self) -> Vec<String> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, f)| format!("f{i} = {}", format_polynomial(f)))
            .collect()
    }
}

fn numeric_pencil(pencil: &Pencil) -> bool {
    let vars = pencil.chart.vars();
    is_numeric(vars, &pencil.pi1) && is_numeric(vars, &pencil.pi2)
}

/// Extends `f0` by `steps` members. Each member is the solution orthogonal
/// to the Casimirs of `π₁` of its degree. A step without solution ends the
/// chain and is recorded in `obstruction`.
pub fn chain_extend(pencil: &Pencil, f0: &Polynomial, steps: usize) -> Result<ChainState, ChainError> {
    let vars = pencil.chart.vars();
    let degree = match f0.coord_degree() {
        Some(d) if f0.is_coord_homogeneous(d) => d,
        _ => return Err(ChainError::NotHomogeneous),
    };
    if !numeric_pencil(pencil) || !is_numeric(vars, &Multivector::function(f0.clone())) {
        return Err(ChainError::NotNumeric);
    }
    let res = pencil.pi1.ham(f0);
    if !res.is_zero() {
        return Err(ChainError::NotCasimir(res.monomial_count()));
    }
    let coords: Vec<VarId> = (0..vars.n_coords()).collect();
    let mut state = ChainState {
        members: vec![f0.clone()],
        kernels: Vec::new(),
        obstruction: None,
    };
    for i in 0..steps {
        let space = PolySpace::homogeneous(vars, &coords, degree + i as u32 + 1);
        let target = pencil.pi2.ham(&state.members[i]).scale(&-Rational::ONE);
        match solve_poly(&space, |f| pencil.pi1.ham(f), &target) {
            Ok(fam) => {
                state.members.push(fam.canonical);
                state.kernels.push(fam.kernel);
            }
            Err(LinalgError::Inconsistent { .. }) => {
                state.obstruction = Some(i + 1);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(state)
}

/// Whether `f − g` lies in the span of `kernel`.
pub fn equal_modulo(f: &Polynomial, g: &Polynomial, kernel: &[Polynomial]) -> bool {
    let diff = f - g;
    if diff.is_zero() {
        return true;
    }
    let images: Vec<Multivector> = kernel.iter().map(|k| Multivector::function(k.clone())).collect();
    linalg::solve_combination(&images, &Multivector::function(diff)).is_ok()
}

/// Coefficients `r₀, …, r_k` of `r` in `x₀`.
fn x0_coefficients(r: &Polynomial) -> Vec<Polynomial> {
    let mut c = r.coefficients_in(0);
    if c.is_empty() {
        c.push(Polynomial::zero(r.vars()));
    }
    c
}

/// Checks that `r` (on the extended chart) is a Casimir of the `π₂` built
/// from `data`, equation by equation in the coefficients of `r` in `x₀`, and
/// by direct contraction. The two verdicts must agree.
pub fn casimir_verify(data: &CLData, r: &Polynomial) -> Result<VerificationReport, ChainError> {
    let (ext, pi2) = assemble(data)?;
    let vars = ext.vars();
    let r = r.relabel(vars).map_err(MultivecError::from)?;
    let p1 = ext.poisson();
    let pi = data.pi().relabel(vars)?;
    let hq = p1.ham(&data.q().relabel(vars).map_err(MultivecError::from)?);
    Ok(VerificationReport::timed("casimir_verify", |rep| {
        let rs = x0_coefficients(&r);
        let k = rs.len() - 1;
        let results: Vec<(String, usize)> = (0..=k)
            .into_par_iter()
            .flat_map_iter(|j| {
                let mut out = vec![(format!("π₁(q)r{j}"), hq.apply(&rs[j]).len())];
                let mut v = pi.ham(&rs[j]);
                if j < k {
                    let c = Rational::from_integer(j as i64 + 1);
                    v = &v - &hq.mul_function(&rs[j + 1].scale(&c));
                }
                if j > 0 {
                    v = &v + &p1.ham(&rs[j - 1]);
                }
                out.push((format!("x0^{j} coefficient"), v.monomial_count()));
                if j == k {
                    out.push((format!("x0^{} coefficient", k + 1), p1.ham(&rs[k]).monomial_count()));
                }
                out
            })
            .collect();
        let mut system_ok = true;
        for (name, n) in results {
            system_ok &= n == 0;
            rep.residual(name, n);
        }
        let direct = pi2.ham(&r).monomial_count();
        rep.residual("π₂(r)", direct);
        if system_ok != (direct == 0) {
            rep.fail("equation system and direct contraction disagree");
        }
    }))
}

/// `C(λ) = r(x₀ + λ)` with its Taylor coefficients in `λ`.
#[derive(Debug, Clone)]
pub struct ShiftedCasimir {
    pub shifted: Polynomial,
    /// `r, r', …, r^{(k)}/k!`.
    pub taylor: Vec<Polynomial>,
    pub report: VerificationReport,
}

/// Shifts a Casimir of `π₂` along the central point. `lambda` names a
/// parameter of the chart.
pub fn shift_casimir(pencil: &Pencil, r: &Polynomial, lambda: &str) -> Result<ShiftedCasimir, ChainError> {
    let vars = pencil.chart.vars();
    let lam = vars
        .lookup(lambda)
        .filter(|&v| !vars.is_coordinate(v))
        .ok_or_else(|| ChainError::NoParameter(lambda.to_string()))?;
    let res = pencil.pi2.ham(r);
    if !res.is_zero() {
        return Err(ChainError::NotPi2Casimir(res.monomial_count()));
    }
    let lam_p = Polynomial::var(vars, lam);
    let x0 = Polynomial::var(vars, 0);
    let shifted = r.compose(&HashMap::from([(0, &x0 + &lam_p)]));
    let taylor = shifted.coefficients_in(lam);
    let report = VerificationReport::timed("shift_casimir", |rep| {
        let member = &pencil.pi2 + &pencil.pi1.mul_function(&lam_p);
        rep.residual("(π₂+λπ₁)(C(λ))", member.ham(&shifted).monomial_count());
        let k = taylor.len() - 1;
        rep.residual("π₂(f0)", pencil.pi2.ham(&taylor[0]).monomial_count());
        for j in 1..=k {
            let v = &pencil.pi1.ham(&taylor[j - 1]) + &pencil.pi2.ham(&taylor[j]);
            rep.residual(format!("π₁(f{}) + π₂(f{j})", j - 1), v.monomial_count());
        }
        rep.residual(format!("π₁(f{k})"), pencil.pi1.ham(&taylor[k]).monomial_count());
    });
    Ok(ShiftedCasimir {
        shifted,
        taylor,
        report,
    })
}

/// Pairwise brackets of named functions under one bivector.
#[derive(Debug, Clone)]
pub struct InvolutionMatrix {
    pub names: Vec<String>,
    pub entries: Vec<Vec<Polynomial>>,
}

impl InvolutionMatrix {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Polynomial::is_zero)
    }

    /// `(f, g, terms)` for each nonzero entry above the diagonal.
    pub fn nonzero(&self) -> Vec<(String, String, usize)> {
        let n = self.names.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.entries[i][j].is_zero() {
                    out.push((self.names[i].clone(), self.names[j].clone(), self.entries[i][j].len()));
                }
            }
        }
        out
    }

    pub fn report(&self, check: &str) -> VerificationReport {
        let mut r = VerificationReport::new(check);
        for (f, g, n) in self.nonzero() {
            r.residual(format!("{{{f},{g}}}"), n);
        }
        r
    }
}

/// `{f, g}_π = π(df, dg)` for every pair.
pub fn involution_matrix(funcs: &[(String, Polynomial)], pi: &Multivector) -> InvolutionMatrix {
    let n = funcs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<Polynomial> = pairs.par_iter().map(|&(i, j)| pi.pair(&funcs[i].1, &funcs[j].1)).collect();
    let zero = Polynomial::zero(pi.vars());
    let mut entries = vec![vec![zero; n]; n];
    for ((i, j), v) in pairs.into_iter().zip(values) {
        entries[j][i] = -&v;
        entries[i][j] = v;
    }
    InvolutionMatrix {
        names: funcs.iter().map(|(s, _)| s.clone()).collect(),
        entries,
    }
}

/// Exact rank of a square rational matrix.
pub fn rank(m: &[Vec<Rational>]) -> usize {
    let n = m.first().map_or(0, Vec::len);
    let mut sys = LinearSystem::new(n);
    for row in m {
        sys.push_dense(row, Rational::ZERO).expect("rows have equal width");
    }
    let sol = sys.solve().expect("homogeneous systems are consistent");
    n - sol.kernel.len()
}

/// Rank of a numeric bivector at a point of the coordinates.
pub fn rank_at(pi: &Multivector, point: &[Rational]) -> Result<usize, MultivecError> {
    let sub = point.iter().cloned().enumerate().collect();
    Ok(rank(&pi.bivector_matrix(&sub)?))
}

/// A seeded point with small rational coordinates.
pub fn random_point(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankStats {
    pub dim: usize,
    pub ranks: Vec<usize>,
    pub generic_rank: usize,
    pub generic_corank: usize,
}

/// Ranks of `π₁ + λπ₂` at `points` seeded random points.
pub fn pencil_rank_sample(
    pi1: &Multivector,
    pi2: &Multivector,
    lambda: &Rational,
    points: usize,
    seed: u64,
) -> Result<RankStats, MultivecError> {
    let member = pi1.checked_add(&pi2.scale(lambda))?;
    let dim = pi1.vars().n_coords();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<Rational>> = (0..points).map(|_| random_point(&mut rng, dim)).collect();
    let ranks = pts
        .par_iter()
        .map(|p| rank_at(&member, p))
        .collect::<Result<Vec<_>, _>>()?;
    let generic_rank = ranks.iter().copied().max().unwrap_or(0);
    Ok(RankStats {
        dim,
        ranks,
        generic_rank,
        generic_corank: dim - generic_rank,
    })
}

/// The unique rational `t` with `π(known + t·part) = 0`, independent of all
/// parameters, if it exists.
pub fn solve_scalar(pi: &Multivector, known: &Polynomial, part: &Polynomial) -> Option<Rational> {
    let target = pi.ham(known).scale(&-Rational::ONE);
    linalg::ratio(&target, &pi.ham(part))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clpencil::{build_cl, tautological};
    use crate::liepoisson::{builtin, central_extend};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn so3_taut() -> (CLData, Pencil) {
        let so3 = builtin("so3").unwrap();
        let mut d = tautological(&so3, &so3.parse("x1").unwrap()).unwrap();
        d.verify();
        let p = build_cl(&d).unwrap();
        (d, p.into())
    }

    #[test]
    fn zero_datum_chain_is_powers() {
        // π₂ = x₀π₁: the chain of x₀ stops immediately, f₁ Casimir
        let ext = central_extend(&builtin("so3").unwrap()).unwrap();
        let x0 = ext.coord("x0").unwrap();
        let pencil = Pencil::new(ext.clone(), ext.poisson().clone(), ext.poisson().mul_function(&x0));
        let st = chain_extend(&pencil, &x0, 2).unwrap();
        assert!(st.members[1].is_zero() && st.members[2].is_zero());
        // Casimirs of so3+x0 in degree 2 and 3: x0², C2 ; x0³, x0·C2
        assert_eq!(st.kernel_dims(), vec![2, 2]);
        assert!(st.check(&pencil).passed());
    }

    #[test]
    fn tautological_chain_relations() {
        let (_, pencil) = so3_taut();
        let x0 = pencil.chart.coord("x0").unwrap();
        let st = chain_extend(&pencil, &x0, 3).unwrap();
        assert_eq!(st.obstruction, None);
        assert!(st.check(&pencil).passed());
        // f₁ = q = x1²/2 modulo degree-2 Casimirs
        let q = pencil.chart.parse("1/2*x1^2").unwrap();
        assert!(equal_modulo(&st.members[1], &q, &st.kernels[0]));
        // members commute under both bivectors
        let c2 = pencil.chart.casimir("C2").unwrap();
        let other = chain_extend(&pencil, &c2, 1).unwrap();
        let funcs: Vec<(String, Polynomial)> = st
            .members
            .iter()
            .chain(&other.members)
            .enumerate()
            .map(|(i, f)| (format!("f{i}"), f.clone()))
            .collect();
        assert!(involution_matrix(&funcs, &pencil.pi1).is_zero());
        assert!(involution_matrix(&funcs, &pencil.pi2).is_zero());
    }

    #[test]
    fn chain_rejects_non_casimir() {
        let (_, pencil) = so3_taut();
        let x1 = pencil.chart.coord("x1").unwrap();
        assert!(matches!(chain_extend(&pencil, &x1, 1), Err(ChainError::NotCasimir(_))));
        let mixed = &pencil.chart.coord("x0").unwrap() + &pencil.chart.casimir("C2").unwrap();
        assert_eq!(chain_extend(&pencil, &mixed, 1).unwrap_err(), ChainError::NotHomogeneous);
    }

    #[test]
    fn casimir_system_agrees_with_contraction() {
        let (d, pencil) = so3_taut();
        // Casimirs and non-Casimirs alike
        for text in ["x0 - x1", "x1^2 + x2^2 + x3^2", "x0^2", "x0*x1"] {
            let f = pencil.chart.parse(text).unwrap();
            let rep = casimir_verify(&d, &f).unwrap();
            let direct = pencil.pi2.ham(&f).is_zero();
            assert_eq!(rep.passed(), direct, "{text}: {:?}", rep.details);
        }
    }

    #[test]
    fn shift_of_powers_of_x0() {
        let ext = central_extend(&builtin("so3").unwrap()).unwrap();
        let x0 = ext.coord("x0").unwrap();
        let pencil = Pencil::new(ext.clone(), ext.poisson().clone(), ext.poisson().mul_function(&x0));
        let r3 = x0.pow(3);
        let s = shift_casimir(&pencil, &r3, "lambda").unwrap();
        assert!(s.report.passed(), "{:?}", s.report.details);
        assert_eq!(s.shifted, ext.parse("(x0 + lambda)^3").unwrap());
        assert_eq!(s.taylor.len(), 4);
        assert_eq!(s.taylor[1], ext.parse("3*x0^2").unwrap());
        let c2 = ext.casimir("C2").unwrap();
        let s = shift_casimir(&pencil, &c2, "lambda").unwrap();
        assert_eq!(s.shifted, c2);
        assert!(matches!(shift_casimir(&pencil, &c2, "x1"), Err(ChainError::NoParameter(_))));
        let x1 = ext.coord("x1").unwrap();
        assert!(matches!(shift_casimir(&pencil, &x1, "lambda"), Err(ChainError::NotPi2Casimir(_))));
    }

    #[test]
    fn involution_matrix_is_antisymmetric() {
        let so3 = builtin("so3").unwrap();
        let f: Vec<(String, Polynomial)> = ["x1", "x2", "x1*x3"]
            .iter()
            .map(|s| (s.to_string(), so3.parse(s).unwrap()))
            .collect();
        let m = involution_matrix(&f, so3.poisson());
        assert!(!m.is_zero());
        for i in 0..3 {
            assert!(m.entries[i][i].is_zero());
            for j in 0..3 {
                assert_eq!(m.entries[i][j], -&m.entries[j][i]);
            }
        }
        assert_eq!(m.entries[0][1], so3.parse("x3").unwrap());
        assert_eq!(m.report("demo").residual_terms, 4);
    }

    #[test]
    fn rank_samples() {
        let so3 = builtin("so3").unwrap();
        let zero = Multivector::zero(so3.vars(), 2);
        let s = pencil_rank_sample(so3.poisson(), &zero, &r(0), 20, 1).unwrap();
        assert_eq!((s.generic_rank, s.generic_corank), (2, 1));
        let gl3 = builtin("gl3").unwrap();
        let zero = Multivector::zero(gl3.vars(), 2);
        let s = pencil_rank_sample(gl3.poisson(), &zero, &r(0), 20, 2).unwrap();
        assert_eq!(s.generic_corank, 3);
        assert_eq!(s, pencil_rank_sample(gl3.poisson(), &zero, &r(0), 20, 2).unwrap());
    }

    #[test]
    fn rank_of_small_matrices() {
        // second row is twice the first
        let m = vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)], vec![r(0), r(1), r(1)]];
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&[vec![r(0); 2], vec![r(0); 2]]), 0);
    }

    #[test]
    fn tautological_singular_hyperplane() {
        let sl3 = builtin("sl3").unwrap();
        let mut d = tautological(&sl3, &sl3.parse("x12 + y13").unwrap()).unwrap();
        d.verify();
        let p = build_cl(&d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = p.chart.dim();
        let generic = (0..5)
            .map(|_| rank_at(&p.pi2, &random_point(&mut rng, n)).unwrap())
            .max()
            .unwrap();
        let x = p.chart.parse("x12 + y13").unwrap();
        let on_plane = (0..5)
            .map(|_| {
                let mut pt = random_point(&mut rng, n);
                let sub: HashMap<VarId, Rational> = pt.iter().cloned().enumerate().collect();
                pt[0] = x.substitute(&sub).as_constant().unwrap();
                rank_at(&p.pi2, &pt).unwrap()
            })
            .max()
            .unwrap();
        assert!(on_plane < generic, "{on_plane} vs {generic}");
    }

    #[test]
    fn scalar_solve() {
        let ext = central_extend(&builtin("so3").unwrap()).unwrap();
        let x0 = ext.coord("x0").unwrap();
        let pi2 = ext.poisson().mul_function(&x0);
        let c2 = ext.casimir("C2").unwrap();
        // anything works for t when part is Casimir: no unique scalar
        assert_eq!(solve_scalar(&pi2, &x0, &c2), None);
        let x1 = ext.coord("x1").unwrap();
        let known = x1.scale(&r(3));
        assert_eq!(solve_scalar(ext.poisson(), &known, &x1), Some(r(-3)));
    }
}
