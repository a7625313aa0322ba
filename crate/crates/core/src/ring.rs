//! The group ring `Q[Γ]` of a finitely generated abelian group.
//!
//! # Text grammar
//!
//! ```text
//! element   := "0" | signed_term (("+" | "-") term)*
//! signed_term := ["-"] term
//! term      := factor ("*" factor)*
//! factor    := coeff | generator ["^" integer]
//! coeff     := digits ["/" digits]
//! generator := "t" [index] | "s" [index]
//! ```
//!
//! A generator kind with a single member is written without an index (`t`,
//! `s`); otherwise generators are indexed from 1 (`t1`, `t2`, `s1`). Unit
//! coefficients are omitted, so `A_11` of the two-orbit example renders as
//! `t + t^-1` and `A_12` as `1 + t`. Rendering lists the identity term first,
//! then terms by increasing free degree with positive exponents first.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

pub type Rational = BigRational;

pub fn rational(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    spec: Arc<GroupSpec>,
    terms: BTreeMap<GroupElement, Rational>,
}

impl GroupRingElement {
    pub fn zero(spec: Arc<GroupSpec>) -> Self {
        Self {
            spec,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(spec: Arc<GroupSpec>) -> Self {
        let id = spec.identity();
        Self::monomial(spec, id, Rational::one())
    }

    pub fn monomial(spec: Arc<GroupSpec>, element: GroupElement, coeff: Rational) -> Self {
        debug_assert!(spec.contains(&element));
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(element, coeff);
        }
        Self { spec, terms }
    }

    /// Sums `coeff * element` over the iterator, merging repeated elements.
    pub fn from_terms(
        spec: Arc<GroupSpec>,
        terms: impl IntoIterator<Item = (GroupElement, Rational)>,
    ) -> Self {
        let mut out = Self::zero(spec);
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
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

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, g: &GroupElement) -> Rational {
        self.terms.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub(crate) fn add_term(&mut self, g: GroupElement, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: other.spec.to_string(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero(self.spec.clone());
        }
        Self {
            spec: self.spec.clone(),
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c * k)).collect(),
        }
    }

    /// Distributive product; exponents combine by the group law.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.spec.clone());
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(self.spec.add(g, h), a * b);
            }
        }
        Ok(out)
    }

    /// The involution `γ ↦ γ⁻¹` extended linearly.
    pub fn star(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (self.spec.inverse(g), c.clone()))
                .collect(),
        }
    }

    /// Coefficient of the identity element, i.e. the von Neumann trace
    /// `<a δ_e, δ_e>`.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&self.spec.identity())
    }

    /// Substitutes `t_j ↦ e^{iθ_j}` and `s_i ↦ e^{2πi m_i / n_i}`.
    pub fn evaluate(&self, p: &TorusCharacterPoint) -> Complex64 {
        debug_assert!(p.is_consistent_with(&self.spec));
        self.terms
            .iter()
            .map(|(g, c)| {
                let phase = p.phase(&self.spec, g);
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), phase)
            })
            .sum()
    }

    /// Largest `|u_j|` over terms, per free axis.
    pub fn free_radius(&self) -> Vec<u64> {
        let mut radius = vec![0; self.spec.free_rank()];
        for g in self.terms.keys() {
            for (r, x) in radius.iter_mut().zip(g.free_part()) {
                *r = (*r).max(x.unsigned_abs());
            }
        }
        radius
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by_key(|(g, _)| display_key(g));
        let mut out = String::new();
        for (i, (g, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let body = g.render();
            if g.is_identity() {
                out.push_str(&magnitude.to_string());
            } else if magnitude.is_one() {
                out.push_str(&body);
            } else {
                out.push_str(&format!("{magnitude}*{body}"));
            }
        }
        out
    }

    /// Parses the text grammar documented at module level.
    pub fn parse(spec: Arc<GroupSpec>, text: &str) -> Result<Self> {
        Parser::new(spec, text).parse()
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn display_key(g: &GroupElement) -> (bool, u64, Vec<std::cmp::Reverse<i64>>, Vec<u64>) {
    (
        !g.is_identity(),
        g.free_degree(),
        g.free_part().iter().map(|&x| std::cmp::Reverse(x)).collect(),
        g.torsion_part().to_vec(),
    )
}

/// A point of the Pontryagin dual `T^r x Z_{n_1}^ x ... x Z_{n_k}^`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusCharacterPoint {
    pub angles: Vec<f64>,
    pub characters: Vec<u64>,
}

impl TorusCharacterPoint {
    pub fn new(angles: Vec<f64>, characters: Vec<u64>) -> Self {
        Self { angles, characters }
    }

    pub fn is_consistent_with(&self, spec: &GroupSpec) -> bool {
        self.angles.len() == spec.free_rank()
            && self.characters.len() == spec.torsion().len()
            && self.characters.iter().zip(spec.torsion()).all(|(m, n)| m < n)
    }

    /// Argument of the character value at `g`.
    pub fn phase(&self, spec: &GroupSpec, g: &GroupElement) -> f64 {
        let free: f64 = g
            .free_part()
            .iter()
            .zip(&self.angles)
            .map(|(&u, &theta)| u as f64 * theta)
            .sum();
        let torsion: f64 = g
            .torsion_part()
            .iter()
            .zip(&self.characters)
            .zip(spec.torsion())
            .map(|((&w, &m), &n)| {
                // Reduce w*m mod n first so the angle stays small and exact.
                let k = (w as u128 * m as u128 % n as u128) as f64;
                std::f64::consts::TAU * k / n as f64
            })
            .sum();
        free + torsion
    }
}

struct Parser<'a> {
    spec: Arc<GroupSpec>,
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(spec: Arc<GroupSpec>, src: &'a str) -> Self {
        Self { spec, src, pos: 0 }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let negative = self.eat('-');
        self.skip_ws();
        let d = self.digits().ok_or_else(|| self.err("expected integer"))?;
        let v: i64 = d.parse().map_err(|_| self.err("integer out of range"))?;
        Ok(if negative { -v } else { v })
    }

    fn parse(mut self) -> Result<GroupRingElement> {
        let mut out = GroupRingElement::zero(self.spec.clone());
        let mut sign = if self.eat('-') { -1 } else { 1 };
        loop {
            let (g, c) = self.term()?;
            out.add_term(g, c * rational(sign));
            self.skip_ws();
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                break;
            }
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("trailing input"));
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(GroupElement, Rational)> {
        let mut coeff = Rational::one();
        let mut free = vec![0i64; self.spec.free_rank()];
        let mut torsion = vec![0i64; self.spec.torsion().len()];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num: BigInt = self.digits().unwrap().parse().unwrap();
                    let mut value = BigRational::from_integer(num);
                    if self.eat('/') {
                        self.skip_ws();
                        let den: BigInt = self
                            .digits()
                            .ok_or_else(|| self.err("expected denominator"))?
                            .parse()
                            .unwrap();
                        if den.is_zero() {
                            return Err(self.err("zero denominator"));
                        }
                        value /= BigRational::from_integer(den);
                    }
                    coeff *= value;
                }
                Some(kind @ ('t' | 's')) => {
                    self.pos += 1;
                    let index = self.digits().map(|d| d.parse::<usize>());
                    let count = if kind == 't' { free.len() } else { torsion.len() };
                    let slot = match index {
                        None if count == 1 => 0,
                        Some(Ok(i)) if i >= 1 && i <= count && count > 1 => i - 1,
                        _ => return Err(self.err(&format!("unknown generator {kind}"))),
                    };
                    let exp = if self.eat('^') { self.integer()? } else { 1 };
                    if kind == 't' {
                        free[slot] += exp;
                    } else {
                        torsion[slot] += exp;
                    }
                }
                _ => return Err(self.err("expected coefficient or generator")),
            }
            if !self.eat('*') {
                break;
            }
        }
        let g = self.spec.element(free, torsion)?;
        Ok((g, coeff))
    }
}
