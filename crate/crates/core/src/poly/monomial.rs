use std::cmp::Ordering;

use smallvec::SmallVec;

use super::VarId;

/// Power product stored as sorted `(variable, exponent)` pairs with no zero
/// exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    powers: SmallVec<[(u16, u16); 6]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VarId) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: VarId, e: u32) -> Self {
        let mut m = Monomial::one();
        if e > 0 {
            m.powers.push((v as u16, e as u16));
        }
        m
    }

    /// Builds from an arbitrary list of powers; merges repeats and drops zeros.
    pub fn from_powers(powers: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut v: Vec<(u16, u16)> = powers
            .into_iter()
            .filter(|&(_, e)| e > 0)
            .map(|(v, e)| (v as u16, e as u16))
            .collect();
        v.sort_unstable();
        let mut out: SmallVec<[(u16, u16); 6]> = SmallVec::new();
        for (var, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => out.push((var, e)),
            }
        }
        Monomial { powers: out }
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn powers(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.powers.iter().map(|&(v, e)| (v as VarId, e as u32))
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().map(|&(_, e)| e as u32).sum()
    }

    /// Degree counting only variables with id below `n`.
    pub fn degree_below(&self, n: usize) -> u32 {
        self.powers
            .iter()
            .filter(|&&(v, _)| (v as usize) < n)
            .map(|&(_, e)| e as u32)
            .sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.powers
            .iter()
            .find(|&&(w, _)| w as usize == v)
            .map_or(0, |&(_, e)| e as u32)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.powers, &other.powers);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { powers: out }
    }

    /// `∂/∂v` of the monomial as `(multiplier, monomial)`, or `None` if `v` is absent.
    pub fn derivative(&self, v: VarId) -> Option<(u32, Monomial)> {
        let pos = self.powers.iter().position(|&(w, _)| w as usize == v)?;
        let e = self.powers[pos].1;
        let mut m = self.clone();
        if e == 1 {
            m.powers.remove(pos);
        } else {
            m.powers[pos].1 = e - 1;
        }
        Some((e as u32, m))
    }

    /// Splits off the powers of variables for which `pick` returns true.
    pub fn split(&self, pick: impl Fn(VarId) -> bool) -> (Monomial, Monomial) {
        let mut yes = Monomial::one();
        let mut no = Monomial::one();
        for &(v, e) in &self.powers {
            if pick(v as VarId) {
                yes.powers.push((v, e));
            } else {
                no.powers.push((v, e));
            }
        }
        (yes, no)
    }

    /// Re-indexes variables through `map`; the result is re-sorted.
    pub fn remap(&self, map: impl Fn(VarId) -> VarId) -> Monomial {
        Monomial::from_powers(self.powers().map(|(v, e)| (map(v), e)))
    }

    /// Graded lexicographic comparison: higher total degree first, then the
    /// larger exponent of the earliest variable wins.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (&self.powers, &other.powers);
        for (x, y) in a.iter().zip(b.iter()) {
            if x.0 != y.0 {
                // the one carrying the earlier variable is larger
                return y.0.cmp(&x.0);
            }
            if x.1 != y.1 {
                return x.1.cmp(&y.1);
            }
        }
        a.len().cmp(&b.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_merges_exponents() {
        let a = Monomial::from_powers([(0, 2), (3, 1)]);
        let b = Monomial::from_powers([(1, 1), (3, 2)]);
        let p = a.mul(&b);
        assert_eq!(p.powers().collect::<Vec<_>>(), vec![(0, 2), (1, 1), (3, 3)]);
        assert_eq!(p.degree(), 6);
    }

    #[test]
    fn derivative_drops_exhausted_variable() {
        let a = Monomial::from_powers([(0, 1), (2, 3)]);
        let (k, d) = a.derivative(0).unwrap();
        assert_eq!(k, 1);
        assert_eq!(d, Monomial::var_pow(2, 3));
        assert!(a.derivative(1).is_none());
    }

    #[test]
    fn grlex_order() {
        let x = Monomial::var(0);
        let y = Monomial::var(1);
        let xx = Monomial::var_pow(0, 2);
        let xy = x.mul(&y);
        let yy = Monomial::var_pow(1, 2);
        assert_eq!(xx.grlex_cmp(&xy), Ordering::Greater);
        assert_eq!(xy.grlex_cmp(&yy), Ordering::Greater);
        assert_eq!(yy.grlex_cmp(&x), Ordering::Greater);
        assert_eq!(x.grlex_cmp(&y), Ordering::Greater);
        assert_eq!(x.grlex_cmp(&Monomial::one()), Ordering::Greater);
    }
}
