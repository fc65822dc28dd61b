//! Sparse multivariate polynomials over the complex numbers, univariate root
//! solving and root continuation along paths.

pub(crate) mod parse;
mod roots;
mod track;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use parse::{parse_complex, Lexer, Token, TokenKind, Variables};
pub use roots::{univariate_roots, Root, RootConfig, RootSet, RootWarning, UniPoly};
pub use track::{track_roots, Permutation, PolyFamily, TrackConfig, Tracking};

/// Exponent vector of a monomial.
pub type Exponents = Vec<u32>;

/// A polynomial in `num_vars` variables with complex coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by exponent vector, so iteration and
/// evaluation order are deterministic. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePoly {
    num_vars: usize,
    terms: BTreeMap<Exponents, Complex64>,
}

/// What to do with one variable in [`SparsePoly::specialize`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Substitution {
    /// Leave the variable free.
    Keep,
    /// Replace by a complex value.
    Value(Complex64),
    /// Replace by `offset + slope * t` with a fresh trailing variable `t`.
    Affine { offset: Complex64, slope: Complex64 },
}

impl SparsePoly {
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// The coordinate function `x_index`.
    pub fn var(num_vars: usize, index: usize) -> Result<Self> {
        if index >= num_vars {
            return Err(Error::VariableOutOfRange { index, num_vars });
        }
        let mut e = vec![0; num_vars];
        e[index] = 1;
        let mut p = Self::zero(num_vars);
        p.add_term(e, Complex64::new(1.0, 0.0));
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated monomials.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Complex64)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> Complex64 {
        self.terms.get(e).copied().unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Lowest total degree among the terms (order of vanishing at 0).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    pub fn max_coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: point.len() });
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = *c;
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= x.powu(k);
                }
            }
            acc += m;
        }
        acc
    }

    /// Σ |c_α| |x^α|, the natural scale for relative residuals at `point`.
    pub(crate) fn abs_eval_unchecked(&self, point: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| point.iter().zip(e).fold(c.norm(), |m, (x, &k)| m * x.norm().powi(k as i32)))
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut p = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), c * s);
        }
        p
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), *c);
        }
        Ok(p)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut p = Self::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        Ok(p)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::constant(self.num_vars, Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same arity");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same arity");
            }
        }
        result
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: other.num_vars });
        }
        Ok(())
    }

    /// Substitutes values or affine forms `offset + slope * t` for some
    /// variables. The result has the kept variables in their original order,
    /// followed by `t` when at least one affine substitution is present.
    pub fn specialize(&self, subs: &[Substitution]) -> Result<Self> {
        if subs.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: subs.len() });
        }
        let kept: Vec<usize> = (0..self.num_vars).filter(|&i| matches!(subs[i], Substitution::Keep)).collect();
        let has_t = subs.iter().any(|s| matches!(s, Substitution::Affine { .. }));
        let out_vars = kept.len() + usize::from(has_t);
        let mut out = Self::zero(out_vars);

        // powers of each affine form as dense polynomials in t
        let mut affine_pows: Vec<Vec<Vec<Complex64>>> = vec![Vec::new(); self.num_vars];
        for (i, s) in subs.iter().enumerate() {
            if let Substitution::Affine { offset, slope } = *s {
                let maxdeg = self.degree_in(i).unwrap_or(0) as usize;
                let mut pows = vec![vec![Complex64::new(1.0, 0.0)]];
                for _ in 0..maxdeg {
                    let prev = pows.last().unwrap();
                    pows.push(dense_mul(prev, &[offset, slope]));
                }
                affine_pows[i] = pows;
            }
        }

        for (e, c) in &self.terms {
            let mut coef = *c;
            let mut tpoly = vec![Complex64::new(1.0, 0.0)];
            for (i, s) in subs.iter().enumerate() {
                match *s {
                    Substitution::Keep => {}
                    Substitution::Value(v) => {
                        if e[i] > 0 {
                            coef *= v.powu(e[i]);
                        }
                    }
                    Substitution::Affine { .. } => {
                        if e[i] > 0 {
                            tpoly = dense_mul(&tpoly, &affine_pows[i][e[i] as usize]);
                        }
                    }
                }
            }
            let mut base_exp: Exponents = kept.iter().map(|&i| e[i]).collect();
            if has_t {
                base_exp.push(0);
                for (deg, tc) in tpoly.iter().enumerate() {
                    let mut ex = base_exp.clone();
                    ex[out_vars - 1] = deg as u32;
                    out.add_term(ex, coef * tc);
                }
            } else {
                out.add_term(base_exp, coef);
            }
        }
        Ok(out)
    }

    /// `P(offset + M w)` where `M` is given by rows: `x_i = offset_i + Σ_j M_ij w_j`.
    pub fn compose_affine(&self, offset: &[Complex64], rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = self.num_vars;
        if offset.len() != n || rows.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: offset.len().min(rows.len()) });
        }
        let m = rows.first().map_or(0, Vec::len);
        let forms: Vec<SparsePoly> = (0..n)
            .map(|i| {
                let mut f = SparsePoly::constant(m, offset[i]);
                for (j, &a) in rows[i].iter().enumerate() {
                    let mut e = vec![0; m];
                    e[j] = 1;
                    f.add_term(e, a);
                }
                f
            })
            .collect();
        let mut pow_cache: Vec<Vec<SparsePoly>> =
            forms.iter().map(|f| vec![SparsePoly::constant(m, Complex64::new(1.0, 0.0)), f.clone()]).collect();
        let mut out = SparsePoly::zero(m);
        for (e, c) in &self.terms {
            let mut term = SparsePoly::constant(m, *c);
            for i in 0..n {
                let k = e[i] as usize;
                while pow_cache[i].len() <= k {
                    let next = pow_cache[i].last().unwrap().mul(&forms[i])?;
                    pow_cache[i].push(next);
                }
                if k > 0 {
                    term = term.mul(&pow_cache[i][k])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Splits `P` as `Σ_d c_d(other vars) · x_var^d`, returning `c_d` as
    /// polynomials in the remaining variables (original order, `var` removed).
    pub fn coefficients_in(&self, var: usize) -> Result<Vec<SparsePoly>> {
        if var >= self.num_vars {
            return Err(Error::VariableOutOfRange { index: var, num_vars: self.num_vars });
        }
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![SparsePoly::zero(self.num_vars - 1); deg + 1];
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let d = rest.remove(var) as usize;
            out[d].add_term(rest, *c);
        }
        Ok(out)
    }

    /// Dense coefficients (low to high) of a polynomial in one variable.
    pub fn to_univariate(&self) -> Result<UniPoly> {
        if self.num_vars != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.num_vars });
        }
        let deg = self.degree_in(0).unwrap_or(0) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (e, c) in &self.terms {
            coeffs[e[0] as usize] = *c;
        }
        Ok(UniPoly::new(coeffs))
    }

    /// Parses an expression in the given variables, e.g. `x^2 - y^2 + z^3`.
    pub fn parse(text: &str, vars: &Variables) -> Result<Self> {
        parse::parse_poly(text, vars)
    }

    /// Canonical text form using the given variable names. Parsing it back
    /// reproduces the polynomial exactly.
    pub fn to_string_with(&self, vars: &Variables) -> String {
        parse::print_poly(self, vars)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = Variables::indexed(self.num_vars);
        f.write_str(&self.to_string_with(&vars))
    }
}

pub(crate) fn dense_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
