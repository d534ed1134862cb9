//! Centrally linearizable pencils: the basic identities for a pair `(X, q)`,
//! assembly of `π₂` on the central extension, the inverse problems for `q`
//! and `m`, and the elementary constructions.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, LinalgError, PolySpace};
use crate::liepoisson::{builtin, central_extend, Chart, LieError};
use crate::multivec::{MultivecError, Multivector};
use crate::poly::{format_polynomial, Polynomial, VarId, VarTable};
use crate::rational::Rational;
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClError {
    #[error("{what} must be homogeneous of degree {degree} in the coordinates")]
    Degree { what: &'static str, degree: u32 },
    #[error("{0} must be given on an unextended chart")]
    Extended(String),
    #[error("{0} has symbolic parameters; this solver needs numeric data")]
    NotNumeric(&'static str),
    #[error("basic identities not verified for this datum")]
    Unverified,
    #[error("no quadratic q satisfies [π,π] = 2π₁(q)∧π₁ for this field")]
    NotAdmissible,
    #[error("no cubic m satisfies π₁(m) = [X, π₁(q)]")]
    NoCubic,
    #[error("assembled bivector fails: {0:?}")]
    PostCheck(Vec<String>),
    #[error("r-matrix datum gives [π,π] with {0} residual terms")]
    NotYangBaxter(usize),
    #[error("q is not a Casimir of π₁")]
    NotCasimir,
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Multivec(#[from] MultivecError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A quadratic field `X` and quadratic hamiltonian `q` on `s*`.
#[derive(Debug, Clone)]
pub struct CLData {
    chart: Chart,
    x: Multivector,
    q: Polynomial,
    m: Option<Polynomial>,
    verified: bool,
}

impl CLData {
    pub fn new(chart: &Chart, x: Multivector, q: Polynomial) -> Result<Self, ClError> {
        if chart.is_central_extended() {
            return Err(ClError::Extended(chart.name().to_string()));
        }
        check_degrees(&x, &q)?;
        Ok(CLData {
            chart: chart.clone(),
            x,
            q,
            m: None,
            verified: false,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn x(&self) -> &Multivector {
        &self.x
    }

    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    pub fn m(&self) -> Option<&Polynomial> {
        self.m.as_ref()
    }

    pub fn set_m(&mut self, m: Polynomial) {
        self.m = Some(m);
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// `π = [X, π₁]`.
    pub fn pi(&self) -> Multivector {
        pi_of(&self.chart, &self.x)
    }

    /// Runs [`check_basic`] and records the outcome.
    pub fn verify(&mut self) -> VerificationReport {
        let r = check_basic(&self.chart, &self.x, &self.q).expect("degrees checked at construction");
        self.verified = r.passed();
        r
    }

    /// Marks the datum verified without recomputing; for data whose basic
    /// identities were established by a separate symbolic check.
    pub fn assume_verified(&mut self) {
        self.verified = true;
    }

    /// Text form: chart name, `X` components and `q`.
    pub fn to_record(&self) -> CLRecord {
        CLRecord {
            chart: self.chart.name().to_string(),
            x: self.x.to_string(),
            q: format_polynomial(&self.q),
            m: self.m.as_ref().map(format_polynomial),
            verified: self.verified,
        }
    }
}

/// Serialized form of [`CLData`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CLRecord {
    pub chart: String,
    pub x: String,
    pub q: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    pub verified: bool,
}

impl CLRecord {
    /// Parses the record back against a builtin chart.
    pub fn load(&self) -> Result<CLData, ClError> {
        let chart = builtin(&self.chart)?;
        let x = Multivector::parse(&self.x, chart.vars())?;
        let q = chart.parse(&self.q)?;
        let mut d = CLData::new(&chart, x, q)?;
        if let Some(m) = &self.m {
            d.m = Some(chart.parse(m)?);
        }
        d.verified = self.verified;
        Ok(d)
    }
}

fn check_degrees(x: &Multivector, q: &Polynomial) -> Result<(), ClError> {
    if x.degree() != 1 || !(x.is_zero() || x.is_coord_homogeneous(2)) {
        return Err(ClError::Degree {
            what: "X",
            degree: 2,
        });
    }
    if !(q.is_zero() || q.is_coord_homogeneous(2)) {
        return Err(ClError::Degree {
            what: "q",
            degree: 2,
        });
    }
    Ok(())
}

fn pi_of(chart: &Chart, x: &Multivector) -> Multivector {
    x.lie_derivative(chart.poisson()).expect("same chart")
}

/// The residuals `R1 = [π,π] − 2π₁(q)∧π₁` and `R2 = [π, π₁(q)]`.
pub fn basic_residuals(
    chart: &Chart,
    x: &Multivector,
    q: &Polynomial,
) -> Result<(Multivector, Multivector), ClError> {
    check_degrees(x, q)?;
    let p1 = chart.poisson();
    let pi = pi_of(chart, x);
    let hq = p1.ham(q);
    let (pp, rhs) = rayon::join(|| pi.schouten(&pi), || hq.wedge(p1));
    let r1 = &pp? - &rhs?.scale(&Rational::from_integer(2));
    let r2 = pi.schouten(&hq)?;
    Ok((r1, r2))
}

/// Checks the two basic identities for `(X, q)`.
pub fn check_basic(chart: &Chart, x: &Multivector, q: &Polynomial) -> Result<VerificationReport, ClError> {
    let mut out = Err(ClError::Unverified);
    let report = VerificationReport::timed("basic_identities", |r| match basic_residuals(chart, x, q) {
        Ok((r1, r2)) => {
            r.residual("R1 [π,π] − 2π₁(q)∧π₁", r1.monomial_count());
            r.residual("R2 [π,π₁(q)]", r2.monomial_count());
            out = Ok(());
        }
        Err(e) => out = Err(e),
    });
    out.map(|_| report)
}

/// `π₂` on the central extension, with the extended chart.
#[derive(Debug, Clone)]
pub struct CLPencil {
    pub chart: Chart,
    pub pi1: Multivector,
    pub pi2: Multivector,
    pub report: VerificationReport,
}

/// `π₂ = π − π₁(q)∧∂₀ + x₀π₁` without the post-checks.
pub fn assemble(data: &CLData) -> Result<(Chart, Multivector), ClError> {
    let ext = central_extend(data.chart())?;
    let vars = ext.vars();
    let p1 = ext.poisson();
    let pi = data.pi().relabel(vars)?;
    let hq = p1.ham(&data.q().relabel(vars).map_err(MultivecError::from)?);
    let d0 = Multivector::coordinate_field(vars, 0);
    let x0 = Polynomial::var(vars, 0);
    let pi2 = &(&pi - &hq.wedge(&d0)?) + &p1.mul_function(&x0);
    Ok((ext, pi2))
}

/// Evaluation of the central point `a`: `x₀ = 1`, other coordinates 0.
pub fn at_central_point(chart: &Chart, m: &Multivector) -> Multivector {
    let vars = chart.vars();
    let sub = (0..vars.n_coords())
        .map(|i| (i, Rational::from_integer(i64::from(i == 0))))
        .collect();
    m.substitute(&sub)
}

/// Adds the residuals of `[π₂,π₂] = 0`, `π₂|_a = 0` and `[∂₀, π₂] = π₁`.
pub fn post_checks(ext: &Chart, pi2: &Multivector, r: &mut VerificationReport) {
    let p1 = ext.poisson();
    let (jac, lin) = rayon::join(
        || pi2.schouten(pi2).expect("same chart"),
        || {
            let d0 = Multivector::coordinate_field(ext.vars(), 0);
            d0.lie_derivative(pi2).expect("same chart")
        },
    );
    r.residual("[π₂,π₂]", jac.monomial_count());
    r.residual("π₂|_a", at_central_point(ext, pi2).monomial_count());
    r.residual("[∂₀,π₂] − π₁", (&lin - p1).monomial_count());
}

/// Assembles `π₂` and checks `[π₂,π₂] = 0`, `π₂|_a = 0` and `[∂₀, π₂] = π₁`.
pub fn build_cl(data: &CLData) -> Result<CLPencil, ClError> {
    if !data.is_verified() {
        return Err(ClError::Unverified);
    }
    let mut pencil = None;
    let report = VerificationReport::timed("build_cl", |r| match assemble(data) {
        Ok((ext, pi2)) => {
            post_checks(&ext, &pi2, r);
            pencil = Some(Ok((ext.clone(), ext.poisson().clone(), pi2)));
        }
        Err(e) => pencil = Some(Err(e)),
    });
    let (chart, pi1, pi2) = pencil.expect("closure ran")?;
    if !report.passed() {
        return Err(ClError::PostCheck(report.details));
    }
    Ok(CLPencil {
        chart,
        pi1,
        pi2,
        report,
    })
}

/// An affine family `particular + span(kernel)` of polynomials.
#[derive(Debug, Clone)]
pub struct PolyFamily {
    /// The member orthogonal to the kernel.
    pub canonical: Polynomial,
    pub kernel: Vec<Polynomial>,
}

fn coordinate_ids(chart: &Chart) -> Vec<VarId> {
    (0..chart.dim()).collect()
}

pub(crate) fn is_numeric(vars: &Arc<VarTable>, m: &Multivector) -> bool {
    m.terms()
        .all(|(_, p)| p.terms().iter().all(|(mono, _)| mono.powers().all(|(v, _)| vars.is_coordinate(v))))
}

/// Solves the homogeneous-polynomial equation `L(f) = target` over the
/// monomial basis of `space`, where `L` is linear.
pub(crate) fn solve_poly(
    space: &PolySpace,
    map: impl Fn(&Polynomial) -> Multivector + Sync + Send,
    target: &Multivector,
) -> Result<PolyFamily, LinalgError> {
    let images: Vec<Multivector> = space.elements().par_iter().map(&map).collect();
    let sol = linalg::solve_combination(&images, target)?;
    let canonical = space.poly(&sol.canonical(&sol.kernel));
    let kernel = sol.kernel.iter().map(|k| space.poly(k)).collect();
    Ok(PolyFamily { canonical, kernel })
}

/// All quadratic `q` with `2π₁(q)∧π₁ = [π,π]`; numeric `X` only.
pub fn solve_q(chart: &Chart, x: &Multivector) -> Result<PolyFamily, ClError> {
    check_degrees(x, &Polynomial::zero(chart.vars()))?;
    if !is_numeric(chart.vars(), x) {
        return Err(ClError::NotNumeric("X"));
    }
    let p1 = chart.poisson();
    let pi = pi_of(chart, x);
    let target = pi.schouten(&pi)?;
    let space = PolySpace::homogeneous(chart.vars(), &coordinate_ids(chart), 2);
    let two = Rational::from_integer(2);
    solve_poly(&space, |f| p1.ham(f).wedge(p1).expect("same chart").scale(&two), &target).map_err(|e| match e {
        LinalgError::Inconsistent { .. } => ClError::NotAdmissible,
        e => e.into(),
    })
}

/// The cubic `m` with `π₁(m) = [X, π₁(q)]`, canonical modulo cubic Casimirs.
pub fn solve_m(chart: &Chart, x: &Multivector, q: &Polynomial) -> Result<PolyFamily, ClError> {
    check_degrees(x, q)?;
    if !is_numeric(chart.vars(), x) || !is_numeric(chart.vars(), &Multivector::function(q.clone())) {
        return Err(ClError::NotNumeric("(X, q)"));
    }
    let p1 = chart.poisson();
    let target = x.lie_derivative(&p1.ham(q))?;
    let space = PolySpace::homogeneous(chart.vars(), &coordinate_ids(chart), 3);
    solve_poly(&space, |f| p1.ham(f), &target).map_err(|e| match e {
        LinalgError::Inconsistent { .. } => ClError::NoCubic,
        e => e.into(),
    })
}

/// `X = x·E`, `q = x²/2` for a linear function `x`.
pub fn tautological(chart: &Chart, x: &Polynomial) -> Result<CLData, ClError> {
    if !(x.is_zero() || x.is_coord_homogeneous(1)) {
        return Err(ClError::Degree {
            what: "x",
            degree: 1,
        });
    }
    let xf = chart.euler().mul_function(x);
    let q = (x * x).scale(&Rational::new(1, 2));
    CLData::new(chart, xf, q)
}

/// The Sklyanin datum on `so(3)`: `X = 0`, `q = ½ Σ J_i x_i²`. With `None`
/// the `J_i` stay symbolic.
pub fn sklyanin(j: Option<[Rational; 3]>) -> Result<CLData, ClError> {
    let chart = builtin("so3")?;
    let vars = chart.vars().clone();
    let mut q = Polynomial::zero(&vars);
    for i in 0..3 {
        let ji = match &j {
            Some(v) => Polynomial::constant(&vars, v[i].clone()),
            None => Polynomial::var_named(&vars, &format!("J{}", i + 1)).map_err(LieError::from)?,
        };
        let xi = Polynomial::var(&vars, i);
        q = &q + &(&ji * &(&xi * &xi));
    }
    let q = q.scale(&Rational::new(1, 2));
    CLData::new(&chart, Multivector::zero(&vars, 1), q)
}

/// `X = Σ r^{ij} x_i π₁(x_j)` with a Casimir hamiltonian.
///
/// Accepts the datum only if `[π,π] = 0`; the returned data are verified, and
/// the registered Casimirs of `π₁` are checked to stay Casimirs of `π₂`.
pub fn rmatrix_cl(r: &[Vec<Rational>], chart: &Chart, q_cas: &Polynomial) -> Result<(CLData, CLPencil), ClError> {
    let n = chart.dim();
    let vars = chart.vars();
    let p1 = chart.poisson();
    if !p1.ham(q_cas).is_zero() {
        return Err(ClError::NotCasimir);
    }
    let mut x = Multivector::zero(vars, 1);
    for (i, row) in r.iter().enumerate().take(n) {
        for (j, c) in row.iter().enumerate().take(n) {
            if c.is_zero() {
                continue;
            }
            let xi = Polynomial::var(vars, i);
            let hj = p1.ham(&Polynomial::var(vars, j));
            x = &x + &hj.mul_function(&xi.scale(c));
        }
    }
    let pi = pi_of(chart, &x);
    let pp = pi.schouten(&pi)?;
    if !pp.is_zero() {
        return Err(ClError::NotYangBaxter(pp.monomial_count()));
    }
    let mut data = CLData::new(chart, x, q_cas.clone())?;
    let basic = data.verify();
    if !basic.passed() {
        return Err(ClError::PostCheck(basic.details));
    }
    let mut pencil = build_cl(&data)?;
    for (name, c) in pencil.chart.casimirs().to_vec() {
        let h = pencil.pi2.ham(&c);
        pencil.report.residual(format!("π₂({name})"), h.monomial_count());
    }
    if !pencil.report.passed() {
        return Err(ClError::PostCheck(pencil.report.details));
    }
    Ok((data, pencil))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepoisson::StructureConstants;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn tautological_so3_matches_closed_form() {
        let c = builtin("so3").unwrap();
        let x = c.coord("x1").unwrap();
        let mut d = tautological(&c, &x).unwrap();
        assert!(d.verify().passed());
        let pencil = build_cl(&d).unwrap();
        // (x0 − x)π₁ − π₁(x)∧(E + x∂₀)
        let e = &pencil.chart;
        let v = e.vars();
        let xe = x.relabel(v).unwrap();
        let x0 = Polynomial::var(v, 0);
        let p1 = e.poisson();
        let d0 = Multivector::coordinate_field(v, 0);
        let field = &e.euler() + &d0.mul_function(&xe);
        let expect = &p1.mul_function(&(&x0 - &xe)) - &p1.ham(&xe).wedge(&field).unwrap();
        assert_eq!(pencil.pi2, expect);
    }

    #[test]
    fn x_tilde_generates_pi2() {
        let c = builtin("sl2").unwrap();
        let x = c.coord("h").unwrap();
        let mut d = tautological(&c, &x).unwrap();
        assert!(d.verify().passed());
        let (ext, pi2) = assemble(&d).unwrap();
        let v = ext.vars();
        let d0 = Multivector::coordinate_field(v, 0);
        let x0 = Polynomial::var(v, 0);
        let xt = &(&d.x().relabel(v).unwrap() + &d0.mul_function(&d.q().relabel(v).unwrap()))
            - &ext.euler().mul_function(&x0);
        assert_eq!(xt.lie_derivative(ext.poisson()).unwrap(), pi2);
    }

    #[test]
    fn sklyanin_symbolic_matches_display() {
        let mut d = sklyanin(None).unwrap();
        let rep = d.verify();
        assert!(rep.passed(), "{:?}", rep.details);
        assert!(d.chart().poisson().ham(d.q()).wedge(d.chart().poisson()).unwrap().is_zero());
        let p = build_cl(&d).unwrap();
        let e = p.chart.vars();
        let text = "x0*x1*d/dx2^d/dx3 + x0*x2*d/dx3^d/dx1 + x0*x3*d/dx1^d/dx2 \
            + x2*x3*(J2-J3)*d/dx0^d/dx1 + x1*x2*(J1-J2)*d/dx0^d/dx3 + x3*x1*(J3-J1)*d/dx0^d/dx2";
        assert_eq!(p.pi2, Multivector::parse(text, e).unwrap());
    }

    #[test]
    fn sklyanin_casimir_case() {
        let mut d = sklyanin(Some([r(1), r(1), r(1)])).unwrap();
        assert!(d.verify().passed());
        let p = build_cl(&d).unwrap();
        let x0 = Polynomial::var(p.chart.vars(), 0);
        assert_eq!(p.pi2, p.pi1.mul_function(&x0));
    }

    #[test]
    fn zero_datum() {
        let c = builtin("sl3").unwrap();
        let mut d = CLData::new(&c, Multivector::zero(c.vars(), 1), Polynomial::zero(c.vars())).unwrap();
        assert!(d.verify().passed());
        let p = build_cl(&d).unwrap();
        assert_eq!(p.pi2, p.pi1.mul_function(&Polynomial::var(p.chart.vars(), 0)));
    }

    #[test]
    fn build_requires_verification() {
        let c = builtin("so3").unwrap();
        let d = tautological(&c, &c.coord("x2").unwrap()).unwrap();
        assert!(matches!(build_cl(&d), Err(ClError::Unverified)));
    }

    #[test]
    fn degrees_enforced() {
        let c = builtin("so3").unwrap();
        let e = c.euler();
        assert!(CLData::new(&c, e, Polynomial::zero(c.vars())).is_err());
    }

    #[test]
    fn solve_q_tautological_so3() {
        let c = builtin("so3").unwrap();
        let x = c.coord("x3").unwrap();
        let d = tautological(&c, &x).unwrap();
        let fam = solve_q(&c, d.x()).unwrap();
        // so(3) quadratics with π₁(q)∧π₁ = 0: all of them are admissible
        // directions, so compare modulo the kernel.
        let diff = &fam.canonical - d.q();
        let space = PolySpace::homogeneous(c.vars(), &[0, 1, 2], 2);
        let kernel: Vec<Vec<Rational>> = fam.kernel.iter().map(|k| space.coords_of(k).unwrap()).collect();
        let rest = linalg::project_out(&space.coords_of(&diff).unwrap(), &kernel);
        assert!(rest.iter().all(Rational::is_zero));
        assert!(check_basic(&c, d.x(), &fam.canonical).unwrap().residual_terms == 0
            || !fam.kernel.is_empty());
    }

    #[test]
    fn solve_q_hamiltonian_field() {
        let c = builtin("sl3").unwrap();
        let f = c.parse("x12*x23 - 2*y13*x31 + x21^2").unwrap();
        let x = c.poisson().ham(&f);
        let fam = solve_q(&c, &x).unwrap();
        assert!(fam.canonical.is_zero());
        assert_eq!(fam.kernel.len(), 1);
        let c2 = c.casimir("C2").unwrap();
        assert!(linalg::ratio(
            &Multivector::function(fam.kernel[0].clone()),
            &Multivector::function(c2)
        )
        .is_some());
        assert!(check_basic(&c, &x, &Polynomial::zero(c.vars())).unwrap().passed());
    }

    #[test]
    fn solve_m_tautological_sl2() {
        let c = builtin("sl2").unwrap();
        let x = c.coord("e").unwrap();
        let d = tautological(&c, &x).unwrap();
        let fam = solve_m(&c, d.x(), d.q()).unwrap();
        let p1 = c.poisson();
        let lhs = p1.ham(&fam.canonical);
        let rhs = d.x().lie_derivative(&p1.ham(d.q())).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn solve_m_casimir_q_is_zero() {
        let c = builtin("sl3").unwrap();
        let x = c.poisson().ham(&c.parse("x12*x21").unwrap());
        let fam = solve_m(&c, &x, &c.casimir("C2").unwrap()).unwrap();
        assert!(fam.canonical.is_zero());
        assert_eq!(fam.kernel.len(), 1);
    }

    #[test]
    fn tautological_solvable_algebra() {
        // [e1, e2] = e2
        let sc = StructureConstants::from_json(r#"{"dim":2,"c":[[0,1,1,1]]}"#).unwrap();
        let c = Chart::from_structure("aff1", sc).unwrap();
        for name in ["x1", "x2"] {
            let mut d = tautological(&c, &c.coord(name).unwrap()).unwrap();
            assert!(d.verify().passed());
            build_cl(&d).unwrap();
        }
    }

    #[test]
    fn rmatrix_zero_and_so3() {
        let c = builtin("so3").unwrap();
        let cas = c.casimir("C2").unwrap();
        let zero = vec![vec![Rational::ZERO; 3]; 3];
        let (_, p) = rmatrix_cl(&zero, &c, &cas).unwrap();
        assert_eq!(p.pi2, p.pi1.mul_function(&Polynomial::var(p.chart.vars(), 0)));
        let mut rr = zero.clone();
        rr[0][1] = r(1);
        rr[1][0] = r(-1);
        let (_, p) = rmatrix_cl(&rr, &c, &cas).unwrap();
        let v = p.chart.vars();
        let f = &Polynomial::var(v, 0) - &Polynomial::var(v, 3).scale(&r(2));
        assert_eq!(p.pi2, p.pi1.mul_function(&f));
    }

    #[test]
    fn rmatrix_sl3_acceptance_matches_direct_check() {
        let c = builtin("sl3").unwrap();
        let cas = c.casimir("C2").unwrap();
        let idx = |n: &str| c.vars().lookup(n).unwrap();
        for (a, b) in [("y13", "y23"), ("x12", "x21"), ("x12", "x13")] {
            let mut rr = vec![vec![Rational::ZERO; 8]; 8];
            rr[idx(a)][idx(b)] = r(1);
            rr[idx(b)][idx(a)] = r(-1);
            let p1 = c.poisson();
            let xf = &p1.ham(&c.coord(b).unwrap()).mul_function(&c.coord(a).unwrap())
                - &p1.ham(&c.coord(a).unwrap()).mul_function(&c.coord(b).unwrap());
            let pi = xf.lie_derivative(p1).unwrap();
            let direct = pi.schouten(&pi).unwrap().is_zero();
            let got = rmatrix_cl(&rr, &c, &cas);
            assert_eq!(got.is_ok(), direct, "{a} {b}");
            if a == "y13" {
                assert!(direct, "Cartan r is a Yang–Baxter solution");
            }
            if !direct {
                assert!(matches!(got, Err(ClError::NotYangBaxter(_))));
            }
        }
    }

    #[test]
    fn record_round_trip() {
        let c = builtin("sl3").unwrap();
        let mut d = tautological(&c, &c.coord("y13").unwrap()).unwrap();
        d.verify();
        let rec = d.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back: CLRecord = serde_json::from_str(&json).unwrap();
        let d2 = back.load().unwrap();
        assert_eq!(d2.x(), d.x());
        assert_eq!(d2.q(), d.q());
        assert!(d2.is_verified());
    }
}
