use crate::Complex64;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Which four variables a [`Poly4`] is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Ball entries `(z11, z12, z21, z22)`.
    Ball,
    /// Tube components `(w^0, w^1, w^2, w^3)`.
    Tube,
}

/// Polynomial in four complex variables with exact exponent bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly4 {
    chart: Chart,
    terms: BTreeMap<[u32; 4], Complex64>,
}

impl Poly4 {
    pub fn zero(chart: Chart) -> Self {
        Self {
            chart,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: Chart, c: Complex64) -> Self {
        Self::monomial(chart, [0; 4], c)
    }

    pub fn monomial(chart: Chart, exps: [u32; 4], c: Complex64) -> Self {
        let mut p = Self::zero(chart);
        if c != Complex64::new(0.0, 0.0) {
            p.terms.insert(exps, c);
        }
        p
    }

    /// The `k`-th coordinate function.
    pub fn variable(chart: Chart, k: usize) -> Self {
        let mut exps = [0; 4];
        exps[k] = 1;
        Self::monomial(chart, exps, Complex64::new(1.0, 0.0))
    }

    pub fn from_terms(chart: Chart, terms: impl IntoIterator<Item = ([u32; 4], Complex64)>) -> Self {
        let mut p = Self::zero(chart);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32; 4]) -> Complex64 {
        self.terms.get(exps).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn add_term(&mut self, exps: [u32; 4], c: Complex64) {
        let entry = self.terms.entry(exps).or_default();
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&exps);
        }
    }

    fn assert_chart(&self, other: &Poly4) {
        assert_eq!(self.chart, other.chart, "polynomials in different charts");
    }

    pub fn scale(&self, c: Complex64) -> Poly4 {
        Poly4::from_terms(self.chart, self.terms.iter().map(|(e, v)| (*e, v * c)))
    }

    /// `∂/∂x_k`.
    pub fn derivative(&self, k: usize) -> Poly4 {
        Poly4::from_terms(
            self.chart,
            self.terms.iter().filter(|(e, _)| e[k] > 0).map(|(e, v)| {
                let mut d = *e;
                d[k] -= 1;
                (d, v * e[k] as f64)
            }),
        )
    }

    pub fn eval(&self, x: &[Complex64; 4]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| (0..4).fold(*c, |acc, k| acc * x[k].powu(e[k])))
            .sum()
    }

    /// Homogeneous component of the given degree.
    pub fn homogeneous_part(&self, degree: u32) -> Poly4 {
        Poly4::from_terms(
            self.chart,
            self.terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == degree)
                .map(|(e, v)| (*e, *v)),
        )
    }

    /// Drops terms with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Poly4 {
        Poly4::from_terms(
            self.chart,
            self.terms.iter().filter(|(_, v)| v.norm() > tol).map(|(e, v)| (*e, *v)),
        )
    }
}

impl Add for &Poly4 {
    type Output = Poly4;

    fn add(self, rhs: &Poly4) -> Poly4 {
        self.assert_chart(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Sub for &Poly4 {
    type Output = Poly4;

    fn sub(self, rhs: &Poly4) -> Poly4 {
        self + &(-rhs)
    }
}

impl Neg for &Poly4 {
    type Output = Poly4;

    fn neg(self) -> Poly4 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Poly4 {
    type Output = Poly4;

    // Exponents add when monomials multiply.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Poly4) -> Poly4 {
        self.assert_chart(rhs);
        let mut out = Poly4::zero(self.chart);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(std::array::from_fn(|k| ea[k] + eb[k]), ca * cb);
            }
        }
        out
    }
}

/// All exponent tuples of total degree `degree`, in lexicographic order.
pub fn monomials_of_degree(degree: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for a in (0..=degree).rev() {
        for b in (0..=degree - a).rev() {
            for c in (0..=degree - a - b).rev() {
                out.push([a, b, c, degree - a - b - c]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_and_derivative() {
        let x = Poly4::variable(Chart::Ball, 0);
        let y = Poly4::variable(Chart::Ball, 3);
        let p = &(&x * &x) * &y;
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.derivative(0).coefficient(&[1, 0, 0, 1]), c(2.0));
        assert!(p.derivative(1).is_zero());
        let pt = [c(2.0), c(0.0), c(0.0), c(3.0)];
        assert_eq!(p.eval(&pt), c(12.0));
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Poly4::variable(Chart::Tube, 1);
        assert!((&x - &x).is_zero());
        assert_eq!((&x - &x).degree(), None);
    }

    #[test]
    fn monomial_counts() {
        for d in 0..6 {
            assert_eq!(monomials_of_degree(d).len(), ((d + 1) * (d + 2) * (d + 3) / 6) as usize);
        }
    }
}
