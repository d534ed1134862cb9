//! Structure constants, coordinate charts on Lie algebra duals, Lie–Poisson
//! bivectors and trace Casimirs.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::multivec::{Basis, Multivector};
use crate::poly::{PolyError, Polynomial, VarTable};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("structure constant index ({i}, {j}, {k}) out of range for dimension {dim}")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        k: usize,
        dim: usize,
    },
    #[error("entry ({i}, {j}, {k}) breaks antisymmetry")]
    NotAntisymmetric { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails on ({i}, {j}, {k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),
    #[error("chart `{0}` is already centrally extended")]
    AlreadyExtended(String),
    #[error("chart `{chart}` has no Casimir `{name}`")]
    UnsupportedCasimir { chart: String, name: String },
    #[error("expected {expected} coordinate names, got {found}")]
    CoordinateCount { expected: usize, found: usize },
    #[error("malformed structure constants: {0}")]
    Format(String),
    #[error("Lie–Poisson bivector fails [P,P] = 0 ({0} residual terms)")]
    NotPoisson(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`, stored for `i < j` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    brackets: BTreeMap<(usize, usize), BTreeMap<usize, Rational>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coef {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct ScDoc {
    dim: usize,
    c: Vec<(usize, usize, usize, Coef)>,
}

impl StructureConstants {
    /// Builds from entries `(i, j, k, c)`. Entries with `i > j` are folded onto
    /// `(j, i)` with the sign flipped and must agree with any explicit `(j, i)`
    /// entry; `i == j` must carry zero. Jacobi is checked.
    pub fn new(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
    ) -> Result<Self, LieError> {
        let mut brackets: BTreeMap<(usize, usize), BTreeMap<usize, Rational>> = BTreeMap::new();
        let mut seen: BTreeMap<(usize, usize, usize), (bool, Rational)> = BTreeMap::new();
        for (i, j, k, c) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(LieError::IndexOutOfRange { i, j, k, dim });
            }
            if c.is_zero() {
                continue;
            }
            if i == j {
                return Err(LieError::NotAntisymmetric { i, j, k });
            }
            let (a, b, v) = if i < j { (i, j, c) } else { (j, i, -c) };
            let flipped = i > j;
            if let Some((was_flipped, prev)) = seen.get(&(a, b, k)) {
                if *was_flipped != flipped && *prev != v {
                    return Err(LieError::NotAntisymmetric { i, j, k });
                }
                if *was_flipped == flipped {
                    return Err(LieError::Format(format!("duplicate entry ({i}, {j}, {k})")));
                }
                continue;
            }
            seen.insert((a, b, k), (flipped, v.clone()));
            brackets.entry((a, b)).or_default().insert(k, v);
        }
        let sc = StructureConstants { dim, brackets };
        sc.check_jacobi()?;
        Ok(sc)
    }

    /// Reads `{"dim": n, "c": [[i, j, k, "p/q"], ...]}` with 0-based indices.
    pub fn from_json(text: &str) -> Result<Self, LieError> {
        let doc: ScDoc = serde_json::from_str(text).map_err(|e| LieError::Format(e.to_string()))?;
        let mut entries = Vec::with_capacity(doc.c.len());
        for (i, j, k, c) in doc.c {
            let c = match c {
                Coef::Int(n) => Rational::from_integer(n),
                Coef::Text(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| LieError::Format(format!("bad rational `{s}` in ({i}, {j}, {k})")))?,
            };
            entries.push((i, j, k, c));
        }
        Self::new(doc.dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c[i][j][k]` for any ordering of `i`, `j`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Rational {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Rational::ZERO,
            Less => self.lookup(i, j, k),
            Greater => -self.lookup(j, i, k),
        }
    }

    fn lookup(&self, i: usize, j: usize, k: usize) -> Rational {
        self.brackets
            .get(&(i, j))
            .and_then(|m| m.get(&k))
            .cloned()
            .unwrap_or(Rational::ZERO)
    }

    /// Nonzero `(k, c)` of `[e_i, e_j]`, any ordering.
    pub fn bracket(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        if i == j {
            return Vec::new();
        }
        let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
        self.brackets
            .get(&(a, b))
            .map(|m| {
                m.iter()
                    .map(|(k, c)| (*k, c * &Rational::from_integer(s)))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Entries `(i, j, k, c)` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> {
        self.brackets
            .iter()
            .flat_map(|(&(i, j), m)| m.iter().map(move |(&k, c)| (i, j, k, c)))
    }

    fn check_jacobi(&self) -> Result<(), LieError> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc = vec![Rational::ZERO; n];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (l, cab) in self.bracket(a, b) {
                            for (m, clc) in self.bracket(l, c) {
                                acc[m] += &(&cab * &clc);
                            }
                        }
                    }
                    if acc.iter().any(|x| !x.is_zero()) {
                        return Err(LieError::Jacobi { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Same algebra with a zero row prepended (index 0 becomes central).
    fn shifted(&self) -> Self {
        let brackets = self
            .brackets
            .iter()
            .map(|(&(i, j), m)| {
                (
                    (i + 1, j + 1),
                    m.iter().map(|(&k, c)| (k + 1, c.clone())).collect(),
                )
            })
            .collect();
        StructureConstants {
            dim: self.dim + 1,
            brackets,
        }
    }
}

/// Linear coordinates on a Lie algebra dual together with its Lie–Poisson
/// bivector and known Casimirs.
#[derive(Debug, Clone)]
pub struct Chart {
    name: String,
    vars: Arc<VarTable>,
    sc: StructureConstants,
    central: bool,
    poisson: Multivector,
    casimirs: Vec<(String, Polynomial)>,
}

/// Parameter variables registered on every builtin chart.
pub const SL3_PARAMS: [&str; 13] = [
    "b0", "b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8", "b9", "g2", "g3", "lambda",
];

pub const SL3_COORDS: [&str; 8] = ["x12", "x13", "x21", "x23", "x31", "x32", "y13", "y23"];

impl Chart {
    /// A chart over `vars` whose coordinates carry the structure constants in
    /// order. Builds and verifies the Lie–Poisson bivector.
    pub fn new(
        name: impl Into<String>,
        vars: Arc<VarTable>,
        sc: StructureConstants,
    ) -> Result<Self, LieError> {
        if vars.n_coords() != sc.dim() {
            return Err(LieError::CoordinateCount {
                expected: sc.dim(),
                found: vars.n_coords(),
            });
        }
        let poisson = build_lie_poisson(&vars, &sc);
        let pp = poisson.schouten(&poisson).expect("same chart");
        if !pp.is_zero() {
            return Err(LieError::NotPoisson(pp.monomial_count()));
        }
        Ok(Chart {
            name: name.into(),
            vars,
            sc,
            central: false,
            poisson,
            casimirs: Vec::new(),
        })
    }

    /// Chart with coordinates `x1..xn` and the single parameter `lambda`.
    pub fn from_structure(name: impl Into<String>, sc: StructureConstants) -> Result<Self, LieError> {
        let coords: Vec<String> = (1..=sc.dim()).map(|i| format!("x{i}")).collect();
        let vars = VarTable::new(&coords, &["lambda".to_string()])?;
        Self::new(name, vars, sc)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn structure(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn dim(&self) -> usize {
        self.vars.n_coords()
    }

    pub fn is_central_extended(&self) -> bool {
        self.central
    }

    /// Index of `x0` on an extended chart.
    pub fn central_coordinate(&self) -> Option<usize> {
        self.central.then_some(0)
    }

    /// The Lie–Poisson bivector.
    pub fn poisson(&self) -> &Multivector {
        &self.poisson
    }

    pub fn coord(&self, name: &str) -> Result<Polynomial, LieError> {
        Ok(Polynomial::var_named(&self.vars, name)?)
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial, LieError> {
        Ok(crate::poly::parse_polynomial(text, &self.vars)?)
    }

    /// Euler field over the non-central coordinates.
    pub fn euler(&self) -> Multivector {
        let start = usize::from(self.central);
        Multivector::euler(&self.vars, start..self.dim())
    }

    pub fn casimirs(&self) -> &[(String, Polynomial)] {
        &self.casimirs
    }

    pub fn register_casimir(&mut self, name: impl Into<String>, p: Polynomial) {
        self.casimirs.push((name.into(), p));
    }

    /// A registered Casimir by name (`C2`, `C3`, `x0`, ...).
    pub fn casimir(&self, name: &str) -> Result<Polynomial, LieError> {
        self.casimirs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p.clone())
            .ok_or_else(|| LieError::UnsupportedCasimir {
                chart: self.name.clone(),
                name: name.to_string(),
            })
    }
}

fn build_lie_poisson(vars: &Arc<VarTable>, sc: &StructureConstants) -> Multivector {
    let mut terms = Vec::new();
    for (&(i, j), m) in &sc.brackets {
        let coef = Polynomial::from_terms(
            vars,
            m.iter()
                .map(|(&k, c)| (crate::poly::Monomial::var(k), c.clone())),
        );
        terms.push((Basis::from_indices(&[i, j]).expect("i < j"), coef));
    }
    Multivector::from_terms(vars, 2, terms)
}

/// `P = Σ_{i<j} {x_i, x_j} ∂_i ∧ ∂_j`.
pub fn lie_poisson(chart: &Chart) -> Multivector {
    chart.poisson.clone()
}

/// Appends a central coordinate `x0` at index 0 with zero brackets.
pub fn central_extend(chart: &Chart) -> Result<Chart, LieError> {
    if chart.central {
        return Err(LieError::AlreadyExtended(chart.name.clone()));
    }
    let vars = chart.vars.with_leading_coordinate("x0")?;
    let sc = chart.sc.shifted();
    let name = if chart.name == "sl3" {
        "gl3".to_string()
    } else {
        format!("{}+x0", chart.name)
    };
    let mut out = Chart::new(name, vars.clone(), sc)?;
    out.central = true;
    out.register_casimir("x0", Polynomial::var(&vars, 0));
    for (n, p) in &chart.casimirs {
        out.register_casimir(n.clone(), p.relabel(&vars)?);
    }
    Ok(out)
}

/// One of `so3`, `sl2`, `sl3`, `gl3`.
pub fn builtin(name: &str) -> Result<Chart, LieError> {
    match name {
        "so3" => so3(),
        "sl2" => sl2(),
        "sl3" => sl3(),
        "gl3" => central_extend(&sl3()?),
        other => Err(LieError::UnknownAlgebra(other.to_string())),
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["so3", "sl2", "sl3", "gl3"];

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn so3() -> Result<Chart, LieError> {
    let sc = StructureConstants::new(3, [(0, 1, 2, r(1)), (1, 2, 0, r(1)), (2, 0, 1, r(1))])?;
    let vars = VarTable::new(&["x1", "x2", "x3"], &["J1", "J2", "J3", "lambda"])?;
    let mut c = Chart::new("so3", vars, sc)?;
    let c2 = c.parse("x1^2 + x2^2 + x3^2")?;
    c.register_casimir("C2", c2);
    Ok(c)
}

fn sl2() -> Result<Chart, LieError> {
    // h, e, f with [h,e] = 2e, [h,f] = -2f, [e,f] = h
    let sc = StructureConstants::new(3, [(0, 1, 1, r(2)), (0, 2, 2, r(-2)), (1, 2, 0, r(1))])?;
    let vars = VarTable::new(&["h", "e", "f"], &["lambda"])?;
    let mut c = Chart::new("sl2", vars, sc)?;
    let c2 = c.parse("1/2*h^2 + 2*e*f")?;
    c.register_casimir("C2", c2);
    Ok(c)
}

type Mat3 = [[Rational; 3]; 3];

fn zero3() -> Mat3 {
    std::array::from_fn(|_| std::array::from_fn(|_| Rational::ZERO))
}

/// Matrix of the sl(3) basis element dual to chart coordinate `c`.
fn sl3_element(c: usize) -> Mat3 {
    let mut m = zero3();
    match c {
        0..=5 => {
            let (i, j) = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)][c];
            m[i][j] = r(1);
        }
        6 => {
            m[0][0] = r(1);
            m[2][2] = r(-1);
        }
        7 => {
            m[1][1] = r(1);
            m[2][2] = r(-1);
        }
        _ => unreachable!(),
    }
    m
}

fn commutator(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = zero3();
    for i in 0..3 {
        for j in 0..3 {
            let mut s = Rational::ZERO;
            for k in 0..3 {
                s += &(&a[i][k] * &b[k][j]);
                s -= &(&b[i][k] * &a[k][j]);
            }
            out[i][j] = s;
        }
    }
    out
}

/// Coordinates of a traceless matrix in the chart basis.
fn sl3_coords(m: &Mat3) -> Vec<(usize, Rational)> {
    let mut out = Vec::new();
    for (c, (i, j)) in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)].iter().enumerate() {
        if !m[*i][*j].is_zero() {
            out.push((c, m[*i][*j].clone()));
        }
    }
    // diag(a, b, c) = a (e11 - e33) + b (e22 - e33) when a + b + c = 0
    if !m[0][0].is_zero() {
        out.push((6, m[0][0].clone()));
    }
    if !m[1][1].is_zero() {
        out.push((7, m[1][1].clone()));
    }
    out
}

fn sl3() -> Result<Chart, LieError> {
    let mut entries = Vec::new();
    for a in 0..8 {
        for b in a + 1..8 {
            let m = commutator(&sl3_element(a), &sl3_element(b));
            for (k, c) in sl3_coords(&m) {
                entries.push((a, b, k, c));
            }
        }
    }
    let sc = StructureConstants::new(8, entries)?;
    let vars = VarTable::new(&SL3_COORDS, &SL3_PARAMS)?;
    let mut chart = Chart::new("sl3", vars, sc)?;
    let m = sl3_matrix(&chart)?;
    let m2 = matmul(&m, &m);
    let m3 = matmul(&m2, &m);
    let tr = |x: &[[Polynomial; 3]; 3]| &(&x[0][0] + &x[1][1]) + &x[2][2];
    chart.register_casimir("C2", tr(&m2));
    chart.register_casimir("C3", tr(&m3));
    Ok(chart)
}

/// The coordinate matrix `M` with `M_ij = x_ij` and the diagonal resolved
/// from `y13`, `y23` under the trace-zero condition.
pub fn sl3_matrix(chart: &Chart) -> Result<[[Polynomial; 3]; 3], LieError> {
    let p = |s: &str| chart.parse(s);
    Ok([
        [p("2/3*y13 - 1/3*y23")?, p("x12")?, p("x13")?],
        [p("x21")?, p("2/3*y23 - 1/3*y13")?, p("x23")?],
        [p("x31")?, p("x32")?, p("-1/3*y13 - 1/3*y23")?],
    ])
}

fn matmul(a: &[[Polynomial; 3]; 3], b: &[[Polynomial; 3]; 3]) -> [[Polynomial; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = &a[i][0] * &b[0][j];
            for k in 1..3 {
                s = &s + &(&a[i][k] * &b[k][j]);
            }
            s
        })
    })
}

/// Registered `C2` or `C3` of an sl(3) or gl(3) chart.
pub fn casimir(chart: &Chart, name: &str) -> Result<Polynomial, LieError> {
    if !matches!(name, "C2" | "C3") || !matches!(chart.name(), "sl3" | "gl3") {
        return Err(LieError::UnsupportedCasimir {
            chart: chart.name().to_string(),
            name: name.to_string(),
        });
    }
    chart.casimir(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so3_bivector_matches_cyclic_form() {
        let c = builtin("so3").unwrap();
        let expect = Multivector::parse(
            "x1*d/dx2^d/dx3 + x2*d/dx3^d/dx1 + x3*d/dx1^d/dx2",
            c.vars(),
        )
        .unwrap();
        assert_eq!(lie_poisson(&c), expect);
    }

    #[test]
    fn sl3_brackets() {
        let c = builtin("sl3").unwrap();
        let p = c.poisson();
        let x12 = c.coord("x12").unwrap();
        let x21 = c.coord("x21").unwrap();
        assert_eq!(p.pair(&x12, &x21), c.parse("y13 - y23").unwrap());
        let y13 = c.coord("y13").unwrap();
        // [e11 - e33, e13] = 2 e13
        assert_eq!(p.pair(&y13, &c.coord("x13").unwrap()), c.parse("2*x13").unwrap());
        assert_eq!(c.vars().coordinate_names().collect::<Vec<_>>(), SL3_COORDS);
    }

    #[test]
    fn casimirs_are_central() {
        for name in ["sl3", "gl3"] {
            let c = builtin(name).unwrap();
            for k in ["C2", "C3"] {
                let f = casimir(&c, k).unwrap();
                assert!(c.poisson().ham(&f).is_zero(), "{name} {k}");
            }
        }
        for name in ["so3", "sl2"] {
            let c = builtin(name).unwrap();
            assert!(c.poisson().ham(&c.casimir("C2").unwrap()).is_zero());
        }
    }

    #[test]
    fn c2_closed_form_and_value() {
        let c = builtin("sl3").unwrap();
        let c2 = casimir(&c, "C2").unwrap();
        let expect = c
            .parse("2*(x12*x21 + x13*x31 + x23*x32) + 2/3*(y13^2 - y13*y23 + y23^2)")
            .unwrap();
        assert_eq!(c2, expect);
        let v = c2
            .substitute_named(&[("y13", r(3)), ("y23", r(0))])
            .unwrap()
            .substitute_named(&[
                ("x12", r(0)),
                ("x13", r(0)),
                ("x21", r(0)),
                ("x23", r(0)),
                ("x31", r(0)),
                ("x32", r(0)),
            ])
            .unwrap();
        assert_eq!(v.as_constant(), Some(r(6)));
    }

    #[test]
    fn central_extension() {
        let gl = builtin("gl3").unwrap();
        assert!(gl.is_central_extended());
        assert_eq!(gl.dim(), 9);
        let x0 = gl.coord("x0").unwrap();
        assert!(gl.poisson().ham(&x0).is_zero());
        let sl = builtin("sl3").unwrap();
        assert_eq!(
            sl.poisson().relabel(gl.vars()).unwrap(),
            gl.poisson().clone()
        );
        assert_eq!(
            central_extend(&gl).unwrap_err(),
            LieError::AlreadyExtended("gl3".into())
        );
    }

    #[test]
    fn abelian_is_zero() {
        let sc = StructureConstants::new(2, []).unwrap();
        let c = Chart::from_structure("ab2", sc).unwrap();
        assert!(c.poisson().is_zero());
    }

    #[test]
    fn json_loader() {
        let sc = StructureConstants::from_json(
            r#"{"dim": 3, "c": [[0,1,2,"1"],[1,2,0,"1"],[2,0,1,1]]}"#,
        )
        .unwrap();
        assert_eq!(sc.get(1, 0, 2), r(-1));
        let bad = StructureConstants::from_json(
            r#"{"dim": 2, "c": [[0,1,1,"1"],[1,0,1,"1"]]}"#,
        );
        assert_eq!(bad, Err(LieError::NotAntisymmetric { i: 1, j: 0, k: 1 }));
        let jac = StructureConstants::from_json(
            r#"{"dim": 3, "c": [[0,1,2,"1"],[1,2,0,"1"],[2,0,1,"2"],[0,2,0,"1"]]}"#,
        );
        assert!(matches!(jac, Err(LieError::Jacobi { .. })));
        assert!(matches!(
            StructureConstants::from_json(r#"{"dim": 2, "c": [[0,5,1,"1"]]}"#),
            Err(LieError::IndexOutOfRange { .. })
        ));
    }
}
