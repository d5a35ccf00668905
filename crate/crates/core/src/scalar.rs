//! The scalar coefficient field: multivariate polynomial fractions over the
//! Gaussian rationals, in atoms drawn from base variables, named constants and
//! unknown-function jets.
//!
//! Every expression is kept in canonical form (expanded numerator and
//! denominator, reduced by their gcd, denominator with leading coefficient 1),
//! so two expressions are equal exactly when their representations are.

use crate::atom::Atom;
use crate::error::PvaError;
use crate::gauss::GRat;
use crate::gcd;
use crate::multi::MultiIndex;
use num_bigint::BigInt;
use num_rational::BigRational;
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A power product of atoms, sorted by the atom order. The empty product is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub SmallVec<[(Atom, u32); 3]>);

impl Mono {
    pub fn one() -> Self {
        Mono(SmallVec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Mono(SmallVec::from_iter([(a, 1)]))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn degree_of(&self, a: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out: SmallVec<[(Atom, u32); 3]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.0[i..].iter().cloned());
        out.extend(other.0[j..].iter().cloned());
        Mono(out)
    }

    /// Componentwise division; `None` when not divisible.
    pub fn checked_div(&self, other: &Mono) -> Option<Mono> {
        let mut out: SmallVec<[(Atom, u32); 3]> = SmallVec::new();
        let mut i = 0;
        for (a, e) in &other.0 {
            loop {
                if i >= self.0.len() {
                    return None;
                }
                match self.0[i].0.cmp(a) {
                    Ordering::Less => {
                        out.push(self.0[i].clone());
                        i += 1;
                    }
                    Ordering::Equal => {
                        if self.0[i].1 < *e {
                            return None;
                        }
                        if self.0[i].1 > *e {
                            out.push((a.clone(), self.0[i].1 - e));
                        }
                        i += 1;
                        break;
                    }
                    Ordering::Greater => return None,
                }
            }
        }
        out.extend(self.0[i..].iter().cloned());
        Some(Mono(out))
    }

    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut out: SmallVec<[(Atom, u32); 3]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Mono(out)
    }
}

// Graded lexicographic order; a genuine monomial order, so leading-term
// division is well-founded.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let (mut i, mut j) = (0, 0);
                loop {
                    match (self.0.get(i), other.0.get(j)) {
                        (None, None) => return Ordering::Equal,
                        // remaining factors on one side only: that side has
                        // positive exponent on a later atom; with equal total
                        // degree the earlier-atom side is larger in lex.
                        (None, Some(_)) => return Ordering::Greater,
                        (Some(_), None) => return Ordering::Less,
                        (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                            Ordering::Less => return Ordering::Greater,
                            Ordering::Greater => return Ordering::Less,
                            Ordering::Equal => match ea.cmp(eb) {
                                Ordering::Equal => {
                                    i += 1;
                                    j += 1;
                                }
                                ord => return ord,
                            },
                        },
                    }
                }
            })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (k, (a, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{:?}", a)?;
            } else {
                write!(f, "{:?}^{}", a, e)?;
            }
        }
        Ok(())
    }
}

/// Expanded multivariate polynomial over `GRat`. Terms are sorted by
/// descending monomial order and never carry zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    pub terms: Vec<(Mono, GRat)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(GRat::one())
    }

    pub fn constant(c: GRat) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Mono::one(), c)],
            }
        }
    }

    pub fn atom(a: Atom) -> Self {
        Poly {
            terms: vec![(Mono::atom(a), GRat::one())],
        }
    }

    pub fn from_terms(terms: Vec<(Mono, GRat)>) -> Self {
        let mut map: BTreeMap<Mono, GRat> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match map.entry(m) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += &c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
            }
        }
        let mut terms: Vec<(Mono, GRat)> = map.into_iter().collect();
        terms.reverse();
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn as_constant(&self) -> Option<GRat> {
        if self.is_zero() {
            Some(GRat::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Mono, GRat)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.total_degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_of(a)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &GRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(mm, c)| (mm.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut set = BTreeSet::new();
        for (m, _) in &self.terms {
            for (a, _) in &m.0 {
                set.insert(a.clone());
            }
        }
        set
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal derivative with respect to the base variable `u^v` (0-based),
    /// chaining into unknown-function jets: `d F_D / d u^v = F_{D+E_v}`.
    pub fn base_partial(&self, v: usize) -> Poly {
        let mut out: Vec<(Mono, GRat)> = Vec::new();
        for (m, c) in &self.terms {
            for (idx, (a, e)) in m.0.iter().enumerate() {
                let da = match a {
                    Atom::Base(w) => {
                        if *w as usize == v {
                            Some(None)
                        } else {
                            None
                        }
                    }
                    Atom::Const(_) => None,
                    Atom::Jet(name, d) => Some(Some(Atom::Jet(name.clone(), d.bump(v)))),
                };
                let Some(da) = da else { continue };
                let mut rest: SmallVec<[(Atom, u32); 3]> = SmallVec::new();
                for (k, (b, eb)) in m.0.iter().enumerate() {
                    if k == idx {
                        if *eb > 1 {
                            rest.push((b.clone(), eb - 1));
                        }
                    } else {
                        rest.push((b.clone(), *eb));
                    }
                }
                let mut mono = Mono(rest);
                if let Some(j) = da {
                    mono = mono.mul(&Mono::atom(j));
                }
                out.push((mono, c * &GRat::from_int(*e as i64)));
            }
        }
        Poly::from_terms(out)
    }

    /// Formal partial derivative with respect to a single atom.
    pub fn partial_atom(&self, a: &Atom) -> Poly {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let e = m.degree_of(a);
            if e == 0 {
                continue;
            }
            let rest = m.checked_div(&Mono::atom(a.clone())).unwrap();
            out.push((rest, c * &GRat::from_int(e as i64)));
        }
        Poly::from_terms(out)
    }

    /// Exact evaluation at a point assigning a `GRat` to every atom.
    pub fn eval(&self, point: &dyn Fn(&Atom) -> GRat) -> GRat {
        let mut acc = GRat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (a, e) in &m.0 {
                let v = point(a);
                for _ in 0..*e {
                    t *= &v;
                }
            }
            acc += &t;
        }
        acc
    }

    /// Exact division; panics when the division is not exact (internal use on
    /// gcd cofactors only).
    pub fn div_exact(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = d.as_constant() {
            return self.scale(&c.inv());
        }
        let mut rem = self.clone();
        let mut quo: Vec<(Mono, GRat)> = Vec::new();
        let (dm, dc) = d.leading().unwrap();
        let dc_inv = dc.inv();
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().unwrap();
            let qm = rm
                .checked_div(dm)
                .expect("inexact polynomial division (monomial)");
            let qc = rc * &dc_inv;
            let t = Poly {
                terms: vec![(qm, qc)],
            };
            rem = &rem - &(&t * d);
            quo.extend(t.terms);
        }
        Poly::from_terms(quo)
    }

    /// Content of the polynomial as a monomial (componentwise minimum of all
    /// term monomials).
    pub fn mono_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Mono::one();
        };
        let mut acc = first.clone();
        for (m, _) in it {
            acc = acc.gcd(m);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// Replace unknown-function jets by derivatives of assigned expressions;
    /// also substitutes plain atoms (base variables, constants) when mapped.
    /// A jet atom `F_D` maps to the `D`-th base-partial of the expression
    /// assigned to `F`.
    pub fn substitute(&self, subst: &Subst) -> ScalarExpr {
        let mut acc = ScalarExpr::zero();
        for (m, c) in &self.terms {
            let mut term = ScalarExpr::from_grat(c.clone());
            for (a, e) in &m.0 {
                let v = subst.atom_value(a);
                let mut p = ScalarExpr::one();
                for _ in 0..*e {
                    p = &p * &v;
                }
                term = &term * &p;
            }
            acc = &acc + &term;
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            match rhs.terms[j].0.cmp(&self.terms[i].0) {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(rhs.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &rhs.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(rhs.terms[j..].iter().cloned());
        Poly { terms: out }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut map: BTreeMap<Mono, GRat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match map.entry(m) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += &c;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
        let mut terms: Vec<(Mono, GRat)> = map.into_iter().collect();
        terms.reverse();
        Poly { terms }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "{:?}", m)?;
            } else {
                write!(f, "{}*{:?}", c, m)?;
            }
        }
        Ok(())
    }
}

/// A canonical rational expression `num/den`. Invariants: `den` is nonzero,
/// `gcd(num, den) = 1`, and the leading coefficient of `den` is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    num: Poly,
    den: Poly,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        ScalarExpr {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_grat(c: GRat) -> Self {
        ScalarExpr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_grat(GRat::from_int(n))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_grat(GRat::from_frac(num, den))
    }

    pub fn imag_unit() -> Self {
        Self::from_grat(GRat::i())
    }

    pub fn atom(a: Atom) -> Self {
        ScalarExpr {
            num: Poly::atom(a),
            den: Poly::one(),
        }
    }

    pub fn base(i: usize) -> Self {
        Self::atom(Atom::base(i))
    }

    pub fn func(name: &str, deriv: MultiIndex) -> Self {
        Self::atom(Atom::func(name, deriv))
    }

    pub fn func0(name: &str, n: usize) -> Self {
        Self::atom(Atom::func0(name, n))
    }

    /// Build from a numerator/denominator pair and reduce to canonical form.
    pub fn from_ratio(num: Poly, den: Poly) -> Result<Self, PvaError> {
        if den.is_zero() {
            return Err(PvaError::ZeroDivide);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return ScalarExpr::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd::poly_gcd(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g), den.div_exact(&g))
            }
        };
        // normalize: leading coefficient of den becomes 1
        let lc = &den.leading().unwrap().1;
        if lc.is_one() {
            return ScalarExpr { num, den };
        }
        let inv = lc.inv();
        ScalarExpr {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.as_constant().map_or(false, |c| c.is_one())
            && self.num.as_constant().map_or(false, |c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_grat(&self) -> Option<GRat> {
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(&n / &d),
            _ => None,
        }
    }

    pub fn inv(&self) -> Result<ScalarExpr, PvaError> {
        if self.is_zero() {
            return Err(PvaError::ZeroDivide);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &ScalarExpr) -> Result<ScalarExpr, PvaError> {
        if rhs.is_zero() {
            return Err(PvaError::ZeroDivide);
        }
        Ok(Self::reduced(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn pow(&self, e: i32) -> Result<ScalarExpr, PvaError> {
        if e < 0 && self.is_zero() {
            return Err(PvaError::ZeroDivide);
        }
        let p = self.num.pow(e.unsigned_abs());
        let q = self.den.pow(e.unsigned_abs());
        Ok(if e >= 0 {
            Self::reduced(p, q)
        } else {
            Self::reduced(q, p)
        })
    }

    pub fn scale(&self, c: &GRat) -> ScalarExpr {
        if c.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.num.atoms();
        s.extend(self.den.atoms());
        s
    }

    /// Formal partial derivative with respect to the base variable `u^v`
    /// (0-based), with the chain rule through unknown-function jets.
    pub fn base_partial(&self, v: usize) -> ScalarExpr {
        let dn = self.num.base_partial(v);
        if self.den.as_constant().is_some() {
            return Self::reduced(dn, self.den.clone());
        }
        let dd = self.den.base_partial(v);
        // (n/d)' = (n'd - nd')/d^2
        Self::reduced(&(&dn * &self.den) - &(&self.num * &dd), &self.den * &self.den)
    }

    /// Iterated base partial along a multi-index over the base variables.
    pub fn base_partial_multi(&self, d: &MultiIndex) -> ScalarExpr {
        let mut acc = self.clone();
        for (v, &k) in d.0.iter().enumerate() {
            for _ in 0..k {
                acc = acc.base_partial(v);
            }
        }
        acc
    }

    pub fn substitute(&self, subst: &Subst) -> Result<ScalarExpr, PvaError> {
        let n = self.num.substitute(subst);
        let d = self.den.substitute(subst);
        n.div(&d)
    }

    /// Exact evaluation; fails with `ZeroDivide` when the denominator
    /// vanishes at the point.
    pub fn eval(&self, point: &dyn Fn(&Atom) -> GRat) -> Result<GRat, PvaError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(PvaError::ZeroDivide);
        }
        Ok(&self.num.eval(point) / &d)
    }

    /// Scale so the leading numerator coefficient becomes +1; used when
    /// canonicalizing condition systems.
    pub fn monic(&self) -> ScalarExpr {
        match self.num.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.inv();
                ScalarExpr {
                    num: self.num.scale(&inv),
                    den: self.den.clone(),
                }
            }
        }
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return ScalarExpr::reduced(&self.num + &rhs.num, self.den.clone());
        }
        ScalarExpr::reduced(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        self + &(-rhs)
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || rhs.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().map_or(false, |c| c.is_one()) {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

/// Substitution table for unknown functions and plain atoms. Function
/// assignments chain through derivatives: the jet `F_D` maps to the `D`-th
/// base-partial of the expression assigned to `F`.
pub struct Subst {
    funcs: BTreeMap<String, ScalarExpr>,
    plain: BTreeMap<Atom, ScalarExpr>,
    cache: std::cell::RefCell<BTreeMap<Atom, ScalarExpr>>,
}

impl Subst {
    pub fn new() -> Self {
        Subst {
            funcs: BTreeMap::new(),
            plain: BTreeMap::new(),
            cache: std::cell::RefCell::new(BTreeMap::new()),
        }
    }

    pub fn assign_func(&mut self, name: &str, value: ScalarExpr) {
        self.funcs.insert(name.to_string(), value);
        self.cache.borrow_mut().clear();
    }

    pub fn assign_atom(&mut self, atom: Atom, value: ScalarExpr) {
        self.plain.insert(atom, value);
        self.cache.borrow_mut().clear();
    }

    pub fn func_names(&self) -> impl Iterator<Item = &str> {
        self.funcs.keys().map(|s| s.as_str())
    }

    pub fn has_func(&self, name: &str) -> bool {
        self.funcs.contains_key(name)
    }

    pub fn atom_value(&self, a: &Atom) -> ScalarExpr {
        if let Some(v) = self.plain.get(a) {
            return v.clone();
        }
        if let Atom::Jet(name, d) = a {
            if let Some(base) = self.funcs.get(name.as_ref()) {
                if let Some(v) = self.cache.borrow().get(a) {
                    return v.clone();
                }
                let v = base.base_partial_multi(d);
                self.cache.borrow_mut().insert(a.clone(), v.clone());
                return v;
            }
        }
        ScalarExpr::atom(a.clone())
    }
}

impl Default for Subst {
    fn default() -> Self {
        Self::new()
    }
}

pub(crate) fn big_rational_from(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ScalarExpr {
        ScalarExpr::base(0)
    }

    fn q() -> ScalarExpr {
        ScalarExpr::base(1)
    }

    #[test]
    fn commutativity_cancels() {
        let lhs = &(&p() * &q()) - &(&q() * &p());
        assert!(lhs.is_zero());
    }

    #[test]
    fn exact_cancellation() {
        // (p^2 - q^2)/(p - q) = p + q
        let num = &(&p() * &p()) - &(&q() * &q());
        let den = &p() - &q();
        let r = num.div(&den).unwrap();
        assert_eq!(r, &p() + &q());
    }

    #[test]
    fn gaussian_unit() {
        let i = ScalarExpr::imag_unit();
        assert_eq!(&i * &i, ScalarExpr::from_int(-1));
    }

    #[test]
    fn zero_divide_reported() {
        assert!(matches!(p().div(&ScalarExpr::zero()), Err(PvaError::ZeroDivide)));
    }

    #[test]
    fn base_partial_of_product() {
        // d/dp (p^2 q) = 2 p q
        let e = &(&p() * &p()) * &q();
        let d = e.base_partial(0);
        assert_eq!(d, &(&ScalarExpr::from_int(2) * &p()) * &q());
    }

    #[test]
    fn base_partial_increments_jets() {
        let f = ScalarExpr::func0("F", 2);
        let d = f.base_partial(0);
        assert_eq!(d, ScalarExpr::func("F", MultiIndex::from_slice(&[1, 0])));
        // mixed partials commute
        let dpq = f.base_partial(0).base_partial(1);
        let dqp = f.base_partial(1).base_partial(0);
        assert_eq!(dpq, dqp);
        assert_eq!(dpq, ScalarExpr::func("F", MultiIndex::from_slice(&[1, 1])));
    }

    #[test]
    fn quotient_rule() {
        // d/dp (p/q) = 1/q ; d/dq (p/q) = -p/q^2
        let e = p().div(&q()).unwrap();
        assert_eq!(e.base_partial(0), ScalarExpr::one().div(&q()).unwrap());
        let m = (-&p()).div(&(&q() * &q())).unwrap();
        assert_eq!(e.base_partial(1), m);
    }

    #[test]
    fn substitution_chains_derivatives() {
        // F := p^2, so F_(1,0) substitutes to 2p
        let mut s = Subst::new();
        s.assign_func("F", &p() * &p());
        let jet = ScalarExpr::func("F", MultiIndex::from_slice(&[1, 0]));
        assert_eq!(
            jet.substitute(&s).unwrap(),
            &ScalarExpr::from_int(2) * &p()
        );
    }
}
