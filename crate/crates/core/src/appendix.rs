//! The ten-parameter family of quadratic vector fields on `sl(3)*` and its
//! companion polynomials, loaded from `data/appendix_sl3.txt`.

use std::collections::HashMap;

use crate::liepoisson::{builtin, Chart, LieError};
use crate::multivec::{MultivecError, Multivector};
use crate::poly::{parse_polynomial, PolyError, Polynomial};
use crate::rational::Rational;
use crate::report::VerificationReport;

pub const DATA: &str = include_str!("../data/appendix_sl3.txt");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AppendixError {
    #[error("record `{0}` missing from the data file")]
    Missing(String),
    #[error("malformed record header `{0}`")]
    Header(String),
    #[error("record `{name}`: {source}")]
    Parse {
        name: String,
        #[source]
        source: MultivecError,
    },
    #[error("regeneration failed for {0:?}")]
    Regeneration(Vec<String>),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A point of the parameter space, numeric or symbolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamPoint {
    Numeric([Rational; 10]),
    /// `b0..b9` stay as parameter variables.
    Symbolic,
    /// `b = (0,0,0,0,-1/2,g2/2,0,2,0,g3/2)` with `g2`, `g3` symbolic.
    Sokolov,
}

impl ParamPoint {
    /// The unit vector `e_i`.
    pub fn unit(i: usize) -> Self {
        let mut b: [Rational; 10] = std::array::from_fn(|_| Rational::ZERO);
        b[i] = Rational::ONE;
        ParamPoint::Numeric(b)
    }

    pub fn numeric(values: &[Rational]) -> Option<Self> {
        let b: [Rational; 10] = values.to_vec().try_into().ok()?;
        Some(ParamPoint::Numeric(b))
    }
}

/// One raw record of the data file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub name: String,
    pub chart: String,
    pub text: String,
}

/// Splits the data file into records.
pub fn records(data: &str) -> Result<Vec<Record>, AppendixError> {
    let mut out: Vec<Record> = Vec::new();
    let mut cur: Option<Record> = None;
    for line in data.lines() {
        let t = line.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            if let Some(r) = cur.take() {
                out.push(r);
            }
            continue;
        }
        if !line.starts_with(char::is_whitespace) {
            if let Some(r) = cur.take() {
                out.push(r);
            }
            let (head, rest) = t
                .split_once('=')
                .ok_or_else(|| AppendixError::Header(t.to_string()))?;
            let (name, chart) = head
                .split_once('@')
                .ok_or_else(|| AppendixError::Header(t.to_string()))?;
            cur = Some(Record {
                name: name.trim().to_string(),
                chart: chart.trim().to_string(),
                text: rest.trim().to_string(),
            });
        } else if let Some(r) = cur.as_mut() {
            if !r.text.is_empty() {
                r.text.push(' ');
            }
            r.text.push_str(t);
        }
    }
    if let Some(r) = cur {
        out.push(r);
    }
    Ok(out)
}

/// `x_kl` with `X_i = −[P(x_kl), X_j]`, as `(i, kl, j)`.
pub const REGENERATION: [(usize, &str, usize); 9] = [
    (1, "x12", 0),
    (2, "x13", 0),
    (3, "x21", 0),
    (4, "x23", 0),
    (5, "x31", 0),
    (6, "x32", 0),
    (7, "x12", 6),
    (8, "x13", 4),
    (9, "x31", 3),
];

/// Factor applied to the printed `X0`; the regeneration relations for
/// `X1..X6` hold for half the printed field.
pub const X0_SCALE: (i64, i64) = (1, 2);

/// Parameter labels exchanged in the printed `Q_b`, `k_b`, `M_b` relative to
/// the labels of the `X_i`.
pub const B_RELABEL: [(usize, usize); 2] = [(3, 4), (7, 8)];

/// Sign applied to the printed `M_b` so that `M_b = m_b − X_b Q_b` with
/// `P(m_b) = [X_b, P(Q_b)]`.
pub const M_B_SIGN: i64 = -1;

/// The loaded family on the sl(3) chart.
#[derive(Debug, Clone)]
pub struct Appendix {
    chart: Chart,
    generators: Vec<Multivector>,
    printed_x0: Multivector,
    q_b: Polynomial,
    k_b: Polynomial,
    m_b: Polynomial,
    records: Vec<Record>,
}

impl Appendix {
    /// Parses the shipped data and fails unless every regeneration relation
    /// reproduces the stored generator exactly.
    pub fn load() -> Result<Self, AppendixError> {
        let a = Self::load_unchecked()?;
        let report = a.regen_check();
        if !report.passed() {
            return Err(AppendixError::Regeneration(report.details));
        }
        Ok(a)
    }

    /// Parses the shipped data without the regeneration check.
    pub fn load_unchecked() -> Result<Self, AppendixError> {
        Self::from_data(DATA)
    }

    /// Parses `data` and applies [`X0_SCALE`], [`B_RELABEL`] and [`M_B_SIGN`].
    pub fn from_data(data: &str) -> Result<Self, AppendixError> {
        let mut a = Self::from_data_raw(data)?;
        let vars = a.chart.vars().clone();
        let b = |i: usize| vars.lookup(&format!("b{i}")).expect("b registered");
        let swap: HashMap<usize, Polynomial> = B_RELABEL
            .iter()
            .flat_map(|&(u, v)| [(b(u), Polynomial::var(&vars, b(v))), (b(v), Polynomial::var(&vars, b(u)))])
            .collect();
        a.q_b = a.q_b.compose(&swap);
        a.k_b = a.k_b.compose(&swap);
        a.m_b = a.m_b.compose(&swap).scale(&Rational::from_integer(M_B_SIGN));
        a.generators[0] = a.generators[0].scale(&Rational::new(X0_SCALE.0, X0_SCALE.1));
        Ok(a)
    }

    /// Parses `data` exactly as printed, without the corrections.
    pub fn from_data_raw(data: &str) -> Result<Self, AppendixError> {
        let chart = builtin("sl3")?;
        let records = records(data)?;
        let find = |name: &str| {
            records
                .iter()
                .find(|r| r.name == name && r.chart == "sl3")
                .ok_or_else(|| AppendixError::Missing(name.to_string()))
        };
        let parse_mv = |name: &str| -> Result<Multivector, AppendixError> {
            Multivector::parse(&find(name)?.text, chart.vars()).map_err(|source| {
                AppendixError::Parse {
                    name: name.to_string(),
                    source,
                }
            })
        };
        let parse_p = |name: &str| -> Result<Polynomial, AppendixError> {
            parse_polynomial(&find(name)?.text, chart.vars()).map_err(|e| AppendixError::Parse {
                name: name.to_string(),
                source: e.into(),
            })
        };
        let generators = (0..10)
            .map(|i| parse_mv(&format!("X{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Appendix {
            printed_x0: generators[0].clone(),
            q_b: parse_p("Q_b")?,
            k_b: parse_p("k_b")?,
            m_b: parse_p("M_b")?,
            generators,
            chart,
            records,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn generator(&self, i: usize) -> &Multivector {
        &self.generators[i]
    }

    pub fn generators(&self) -> &[Multivector] {
        &self.generators
    }

    /// `X0` as printed, before [`X0_SCALE`].
    pub fn printed_x0(&self) -> &Multivector {
        &self.printed_x0
    }

    /// Substitution of `b0..b9` realizing `p`; empty for the symbolic point.
    pub fn assignment(&self, p: &ParamPoint) -> HashMap<usize, Polynomial> {
        let vars = self.chart.vars();
        let b = |i: usize| vars.lookup(&format!("b{i}")).expect("b registered");
        match p {
            ParamPoint::Symbolic => HashMap::new(),
            ParamPoint::Numeric(vals) => (0..10)
                .map(|i| (b(i), Polynomial::constant(vars, vals[i].clone())))
                .collect(),
            ParamPoint::Sokolov => {
                let text = ["0", "0", "0", "0", "-1/2", "1/2*g2", "0", "2", "0", "1/2*g3"];
                (0..10)
                    .map(|i| (b(i), parse_polynomial(text[i], vars).expect("static")))
                    .collect()
            }
        }
    }

    fn at(&self, p: &Polynomial, point: &ParamPoint) -> Polynomial {
        match point {
            ParamPoint::Symbolic => p.clone(),
            _ => p.compose(&self.assignment(point)),
        }
    }

    /// `X_b = Σ b_i X_i`.
    pub fn x_b(&self, point: &ParamPoint) -> Multivector {
        let vars = self.chart.vars();
        let sub = self.assignment(point);
        let mut out = Multivector::zero(vars, 1);
        for (i, x) in self.generators.iter().enumerate() {
            let bi = Polynomial::var_named(vars, &format!("b{i}")).expect("b registered");
            let coef = match point {
                ParamPoint::Symbolic => bi,
                _ => bi.compose(&sub),
            };
            if !coef.is_zero() {
                out = &out + &x.mul_function(&coef);
            }
        }
        out
    }

    pub fn q_b(&self, point: &ParamPoint) -> Polynomial {
        self.at(&self.q_b, point)
    }

    pub fn k_b(&self, point: &ParamPoint) -> Polynomial {
        self.at(&self.k_b, point)
    }

    pub fn m_b(&self, point: &ParamPoint) -> Polynomial {
        self.at(&self.m_b, point)
    }

    /// Recomputes `X_1..X_9` from the bracket relations.
    pub fn regen_check(&self) -> VerificationReport {
        VerificationReport::timed("appendix.regeneration", |r| {
            let p = self.chart.poisson();
            for (i, kl, j) in REGENERATION {
                let h = p.ham(&self.chart.coord(kl).expect("coordinate"));
                let regen = -h.lie_derivative(&self.generators[j]).expect("vector field");
                let diff = &regen - &self.generators[i];
                r.residual(format!("X{i} = -[P({kl}), X{j}]"), diff.monomial_count());
            }
        })
    }

    /// Checks `P(M_b) = [X_b, P(Q_b)] − P(X_b Q_b)` symbolically in `b`,
    /// the defining property of `M_b` up to cubic Casimirs.
    pub fn m_b_check(&self) -> VerificationReport {
        VerificationReport::timed("appendix.m_b_definition", |r| {
            let p = self.chart.poisson();
            let x = self.x_b(&ParamPoint::Symbolic);
            let q = &self.q_b;
            let rhs = &x.lie_derivative(&p.ham(q)).expect("vector field") - &p.ham(&x.apply(q));
            r.residual("P(M_b) − [X_b,P(Q_b)] + P(X_b Q_b)", (&p.ham(&self.m_b) - &rhs).monomial_count());
        })
    }

    /// The dual-module image `x_ij ↦ x_ji` of a field on the sl(3) chart.
    pub fn transpose_field(&self, x: &Multivector) -> Multivector {
        transpose_field(&self.chart, x)
    }
}

const TRANSPOSE: [usize; 8] = [2, 4, 0, 5, 1, 3, 6, 7];

fn transpose_map(chart: &Chart) -> HashMap<usize, Polynomial> {
    (0..8)
        .map(|i| (i, Polynomial::var(chart.vars(), TRANSPOSE[i])))
        .collect()
}

/// `x_ij ↦ x_ji` on coefficients and on the coordinate fields.
pub fn transpose_field(chart: &Chart, x: &Multivector) -> Multivector {
    let sub = transpose_map(chart);
    let comps = x.vector_components();
    let mut out = vec![Polynomial::zero(chart.vars()); 8];
    for (i, c) in comps.iter().enumerate() {
        out[TRANSPOSE[i]] = c.compose(&sub);
    }
    Multivector::vector_field(chart.vars(), &out)
}

pub fn transpose_poly(chart: &Chart, p: &Polynomial) -> Polynomial {
    p.compose(&transpose_map(chart))
}

/// `q_ij = x_ij x_ji − ½ (x_ii − x_jj)²` with the diagonal resolved.
pub fn q_ij(chart: &Chart, i: usize, j: usize) -> Polynomial {
    let m = crate::liepoisson::sl3_matrix(chart).expect("sl3 chart");
    let d = &m[i - 1][i - 1] - &m[j - 1][j - 1];
    &(&m[i - 1][j - 1] * &m[j - 1][i - 1]) - &(&d * &d).scale(&Rational::new(1, 2))
}

/// `P_ij q_ab` for `{a, b} = {j, k}` or `{i, k}` with `k` the third index.
pub fn p_q(chart: &Chart, i: usize, j: usize, a: usize, b: usize) -> Polynomial {
    let m = crate::liepoisson::sl3_matrix(chart).expect("sl3 chart");
    let k = 6 - i - j;
    let x = |r: usize, c: usize| m[r - 1][c - 1].clone();
    let set = |u: usize, v: usize| (u.min(v), u.max(v));
    if set(a, b) == set(j, k) {
        &(&x(i, k) * &x(k, j)) - &(&x(i, j) * &(&x(j, j) - &x(k, k)))
    } else if set(a, b) == set(i, k) {
        &(&x(i, j) * &(&x(i, i) - &x(k, k))) - &(&x(i, k) * &x(k, j))
    } else {
        panic!("P_{i}{j} q_{a}{b} is not a listed generator")
    }
}

/// `q0 = −¼ (q12 + q23 + q13)`.
pub fn q0(chart: &Chart) -> Polynomial {
    let s = &(&q_ij(chart, 1, 2) + &q_ij(chart, 2, 3)) + &q_ij(chart, 1, 3);
    s.scale(&Rational::new(-1, 4))
}

/// The 27 listed generators of the quadratic module `U`.
pub fn u_generators(chart: &Chart) -> Vec<(String, Polynomial)> {
    let mut out = Vec::new();
    for mono in [
        "x23^2", "x23*x13", "x13^2", "x21*x23", "x12*x13", "x21^2", "x12^2", "x21*x31", "x12*x32",
        "x31^2", "x31*x32", "x32^2",
    ] {
        out.push((mono.to_string(), chart.parse(mono).expect("static")));
    }
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        out.push((format!("q{i}{j}"), q_ij(chart, i, j)));
    }
    for (i, j, a, b) in [
        (2, 3, 2, 1),
        (2, 3, 1, 3),
        (1, 3, 2, 3),
        (1, 3, 1, 2),
        (2, 1, 2, 3),
        (2, 1, 3, 1),
        (1, 2, 1, 3),
        (1, 2, 3, 2),
        (3, 1, 1, 2),
        (3, 1, 3, 2),
        (3, 2, 1, 2),
        (3, 2, 3, 1),
    ] {
        out.push((format!("P{i}{j}q{a}{b}"), p_q(chart, i, j, a, b)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_parse_and_round_trip() {
        let a = Appendix::load_unchecked().unwrap();
        assert_eq!(a.records().len(), 13);
        for x in a.generators() {
            assert!(x.is_coord_homogeneous(2));
            let back = Multivector::parse(&x.to_string(), a.chart().vars()).unwrap();
            assert_eq!(&back, x);
        }
        for p in [&a.q_b, &a.k_b, &a.m_b] {
            assert_eq!(&parse_polynomial(&p.to_string(), a.chart().vars()).unwrap(), p);
        }
    }

    #[test]
    fn q12_expansion() {
        let c = builtin("sl3").unwrap();
        let q12 = q_ij(&c, 1, 2);
        assert_eq!(q12, c.parse("x12*x21 - 1/2*(y13 - y23)^2").unwrap());
        assert_eq!(q12.len(), 4);
        assert_eq!(q12.partial_named("y13").unwrap(), c.parse("-(y13 - y23)").unwrap());
    }

    #[test]
    fn q_at_e0_is_24_q0() {
        let a = Appendix::load_unchecked().unwrap();
        let c = a.chart();
        let q = a.q_b(&ParamPoint::unit(0));
        let expect = c
            .parse("6*(-x12*x21 - x13*x31 - x23*x32 + y13^2 - y13*y23 + y23^2)")
            .unwrap();
        assert_eq!(q, expect);
        assert_eq!(q, q0(c).scale(&Rational::from_integer(24)));
        assert!(a.q_b(&ParamPoint::Numeric(std::array::from_fn(|_| Rational::ZERO))).is_zero());
    }

    #[test]
    fn x_b_basics() {
        let a = Appendix::load_unchecked().unwrap();
        assert_eq!(&a.x_b(&ParamPoint::unit(0)), a.generator(0));
        assert_eq!(a.printed_x0(), &a.generator(0).scale(&Rational::from_integer(2)));
        let zero = ParamPoint::Numeric(std::array::from_fn(|_| Rational::ZERO));
        assert!(a.x_b(&zero).is_zero());
        let sok = a.x_b(&ParamPoint::Sokolov);
        let c = a.chart();
        let g2 = c.coord("g2").unwrap();
        let g3 = c.coord("g3").unwrap();
        let half = Rational::new(1, 2);
        let expect = &(&(&a.generator(7).scale(&Rational::from_integer(2))
            - &a.generator(4).scale(&half))
            + &a.generator(5).mul_function(&g2.scale(&half)))
            + &a.generator(9).mul_function(&g3.scale(&half));
        assert_eq!(sok, expect);
    }

    #[test]
    fn regeneration_holds() {
        let a = Appendix::load_unchecked().unwrap();
        let r = a.regen_check();
        assert!(r.passed(), "{:?}", r.details);
    }

    #[test]
    fn printed_x0_fails_regeneration_by_a_factor_two() {
        let raw = Appendix::from_data_raw(DATA).unwrap();
        let r = raw.regen_check();
        assert_eq!(r.details.len(), 6, "{:?}", r.details);
        let p = raw.chart().poisson();
        let h = p.ham(&raw.chart().coord("x12").unwrap());
        let regen = -h.lie_derivative(raw.generator(0)).unwrap();
        assert_eq!(regen, raw.generator(1).scale(&Rational::from_integer(2)));
    }

    #[test]
    fn k_b_is_half_x_b_c2() {
        let a = Appendix::load().unwrap();
        let c2 = a.chart().casimir("C2").unwrap();
        let k = a.x_b(&ParamPoint::Symbolic).apply(&c2).scale(&Rational::new(1, 2));
        assert_eq!(k, a.k_b(&ParamPoint::Symbolic));
    }

    #[test]
    fn m_b_satisfies_its_definition() {
        let a = Appendix::load().unwrap();
        assert!(a.m_b_check().passed());
        let raw = Appendix::from_data_raw(DATA).unwrap();
        assert!(raw.m_b.is_coord_homogeneous(3));
    }

    #[test]
    fn u_generators_are_quadratic() {
        let c = builtin("sl3").unwrap();
        let u = u_generators(&c);
        assert_eq!(u.len(), 27);
        assert!(u.iter().all(|(_, p)| p.is_coord_homogeneous(2) && !p.is_zero()));
    }

    #[test]
    fn transpose_is_involutive() {
        let a = Appendix::load_unchecked().unwrap();
        let x = a.generator(3);
        assert_eq!(&a.transpose_field(&a.transpose_field(x)), x);
    }
}
