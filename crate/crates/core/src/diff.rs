//! Differential polynomials: polynomials in the jet variables `u^i_I` with
//! scalar-expression coefficients in the 0-jets, together with the `d`
//! commuting total derivatives, the variational derivative and the grading
//! by total derivative order.

use crate::atom::Atom;
use crate::error::PvaError;
use crate::multi::MultiIndex;
use crate::scalar::{ScalarExpr, Subst};
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Number of spatial directions `d` and of generators `n`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Dims {
    pub d: u8,
    pub n: u8,
}

impl Dims {
    pub fn new(d: usize, n: usize) -> Result<Self, PvaError> {
        if !(1..=4).contains(&d) || !(1..=4).contains(&n) {
            return Err(PvaError::UnsupportedDims {
                d: d as u8,
                n: n as u8,
                what: "dims must satisfy 1 <= d,n <= 4",
            });
        }
        Ok(Dims {
            d: d as u8,
            n: n as u8,
        })
    }

    pub fn d(&self) -> usize {
        self.d as usize
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn check(&self, other: &Dims) -> Result<(), PvaError> {
        if self != other {
            return Err(PvaError::DimensionMismatch {
                expected_d: self.d,
                expected_n: self.n,
                got_d: other.d,
                got_n: other.n,
            });
        }
        Ok(())
    }
}

/// A jet variable `u^i_I` with `|I| >= 1`; the 0-jets live inside the scalar
/// coefficients as base variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JetVar {
    pub gen: u8,
    pub idx: MultiIndex,
}

impl JetVar {
    pub fn new(gen: usize, idx: MultiIndex) -> Self {
        debug_assert!(idx.order() >= 1, "0-jets are base variables");
        JetVar {
            gen: gen as u8,
            idx,
        }
    }

    pub fn gen(&self) -> usize {
        self.gen as usize
    }
}

// Graded lexicographic by (|I|, I, i).
impl Ord for JetVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.idx.cmp(&other.idx).then_with(|| self.gen.cmp(&other.gen))
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}_{:?}", self.gen + 1, self.idx)
    }
}

/// Multiset of jet variables, sorted. The empty product is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JetMono(pub SmallVec<[(JetVar, u32); 2]>);

impl JetMono {
    pub fn one() -> Self {
        JetMono(SmallVec::new())
    }

    pub fn var(v: JetVar) -> Self {
        JetMono(SmallVec::from_iter([(v, 1)]))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Total differential degree `Σ |I| · multiplicity`.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.idx.order() * e).sum()
    }

    pub fn mul(&self, other: &JetMono) -> JetMono {
        let mut out: SmallVec<[(JetVar, u32); 2]> = SmallVec::new();
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
        JetMono(out)
    }
}

impl Ord for JetMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for JetMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for JetMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{:?}", v)?;
            } else {
                write!(f, "{:?}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// Result of the degree grading.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Degree {
    Homogeneous(u32),
    NonHomogeneous,
    Zero,
}

/// A differential polynomial: a finite sum of scalar coefficients times jet
/// monomials, canonical (no zero coefficients, fixed monomial order).
#[derive(Clone, PartialEq, Eq)]
pub struct DiffPoly {
    dims: Dims,
    terms: BTreeMap<JetMono, ScalarExpr>,
}

impl DiffPoly {
    pub fn zero(dims: Dims) -> Self {
        DiffPoly {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_scalar(dims: Dims, c: ScalarExpr) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(JetMono::one(), c);
        }
        DiffPoly { dims, terms }
    }

    pub fn one(dims: Dims) -> Self {
        Self::from_scalar(dims, ScalarExpr::one())
    }

    /// The generator `u^i` (0-based) as a differential polynomial: its 0-jet,
    /// i.e. the base variable inside the coefficient ring.
    pub fn generator(dims: Dims, i: usize) -> Self {
        Self::from_scalar(dims, ScalarExpr::base(i))
    }

    /// The jet `u^i_I`; for `|I| = 0` this is the generator itself.
    pub fn jet(dims: Dims, gen: usize, idx: MultiIndex) -> Self {
        assert_eq!(idx.len(), dims.d(), "jet index length must equal d");
        if idx.is_zero() {
            return Self::generator(dims, gen);
        }
        let mut terms = BTreeMap::new();
        terms.insert(JetMono::var(JetVar::new(gen, idx)), ScalarExpr::one());
        DiffPoly { dims, terms }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JetMono, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient of the trivial monomial (the purely scalar part).
    pub fn scalar_part(&self) -> ScalarExpr {
        self.terms
            .get(&JetMono::one())
            .cloned()
            .unwrap_or_else(ScalarExpr::zero)
    }

    pub fn as_scalar(&self) -> Option<ScalarExpr> {
        if self.terms.is_empty() {
            return Some(ScalarExpr::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&JetMono::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    fn insert(&mut self, m: JetMono, c: ScalarExpr) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn scale(&self, c: &ScalarExpr) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero(self.dims);
        }
        let mut out = DiffPoly::zero(self.dims);
        for (m, k) in &self.terms {
            out.insert(m.clone(), k * c);
        }
        out
    }

    /// All jet variables occurring in monomials.
    pub fn jet_vars(&self) -> Vec<JetVar> {
        let mut set = std::collections::BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in &m.0 {
                set.insert(v.clone());
            }
        }
        set.into_iter().collect()
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut set = std::collections::BTreeSet::new();
        for (_, c) in &self.terms {
            set.extend(c.atoms());
        }
        set
    }

    /// Maximal jet order appearing (0 for purely scalar polynomials).
    pub fn max_jet_order(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.idx.order()))
            .max()
            .unwrap_or(0)
    }

    /// Partial derivative with respect to the jet `u^i_I`. For `|I| = 0` this
    /// is the partial with respect to the base variable, acting on the
    /// coefficients (with the chain rule through unknown-function jets).
    pub fn jet_partial(&self, gen: usize, idx: &MultiIndex) -> DiffPoly {
        if idx.is_zero() {
            let mut out = DiffPoly::zero(self.dims);
            for (m, c) in &self.terms {
                out.insert(m.clone(), c.base_partial(gen));
            }
            return out;
        }
        let v = JetVar::new(gen, idx.clone());
        let mut out = DiffPoly::zero(self.dims);
        for (m, c) in &self.terms {
            let Some(pos) = m.0.iter().position(|(w, _)| *w == v) else {
                continue;
            };
            let e = m.0[pos].1;
            let mut rest: SmallVec<[(JetVar, u32); 2]> = SmallVec::new();
            for (k, (w, ew)) in m.0.iter().enumerate() {
                if k == pos {
                    if *ew > 1 {
                        rest.push((w.clone(), ew - 1));
                    }
                } else {
                    rest.push((w.clone(), *ew));
                }
            }
            out.insert(
                JetMono(rest),
                c.scale(&crate::gauss::GRat::from_int(e as i64)),
            );
        }
        out
    }

    /// Nonzero partials `∂f/∂u^i_I` over all generators and multi-indices
    /// (including `I = 0`), as `((gen, I), ∂f/∂u^i_I)` pairs.
    pub fn all_jet_partials(&self) -> Vec<((usize, MultiIndex), DiffPoly)> {
        let mut out = Vec::new();
        for i in 0..self.dims.n() {
            let zero = MultiIndex::zero(self.dims.d());
            let p = self.jet_partial(i, &zero);
            if !p.is_zero() {
                out.push(((i, zero), p));
            }
        }
        for v in self.jet_vars() {
            let p = self.jet_partial(v.gen(), &v.idx);
            if !p.is_zero() {
                out.push(((v.gen(), v.idx), p));
            }
        }
        out
    }

    /// Total derivative `∂_α` (0-based direction).
    pub fn total_derivative(&self, alpha: usize) -> DiffPoly {
        assert!(alpha < self.dims.d(), "direction out of range");
        let mut out = DiffPoly::zero(self.dims);
        for ((gen, idx), part) in self.all_jet_partials() {
            let shifted = DiffPoly::jet(self.dims, gen, idx.bump(alpha));
            out.add_assign_owned(&shifted * &part);
        }
        out
    }

    /// Iterated total derivative `∂^I`.
    pub fn total_derivative_multi(&self, idx: &MultiIndex) -> DiffPoly {
        let mut acc = self.clone();
        for (alpha, &k) in idx.0.iter().enumerate() {
            for _ in 0..k {
                acc = acc.total_derivative(alpha);
            }
        }
        acc
    }

    /// Variational derivative `δf/δu^i = Σ_I (−∂)^I ∂f/∂u^i_I`.
    pub fn variational_derivative(&self, gen: usize) -> DiffPoly {
        let mut acc = DiffPoly::zero(self.dims);
        for ((g, idx), part) in self.all_jet_partials() {
            if g != gen {
                continue;
            }
            let sign = if idx.order() % 2 == 0 { 1 } else { -1 };
            let term = part.total_derivative_multi(&idx);
            acc.add_assign_owned(term.scale(&ScalarExpr::from_int(sign)));
        }
        acc
    }

    /// The grading: `deg u^i_I = |I|`, 0-jet functions have degree 0.
    pub fn degree(&self) -> Degree {
        if self.terms.is_empty() {
            return Degree::Zero;
        }
        let mut it = self.terms.keys().map(|m| m.degree());
        let first = it.next().unwrap();
        if it.all(|d| d == first) {
            Degree::Homogeneous(first)
        } else {
            Degree::NonHomogeneous
        }
    }

    pub fn substitute(&self, subst: &Subst) -> Result<DiffPoly, PvaError> {
        let mut out = DiffPoly::zero(self.dims);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.substitute(subst)?);
        }
        Ok(out)
    }

    /// Exact evaluation with values for both scalar atoms and jet variables.
    pub fn eval(
        &self,
        atom_point: &dyn Fn(&Atom) -> crate::gauss::GRat,
        jet_point: &dyn Fn(&JetVar) -> crate::gauss::GRat,
    ) -> Result<crate::gauss::GRat, PvaError> {
        let mut acc = crate::gauss::GRat::zero();
        for (m, c) in &self.terms {
            let mut t = c.eval(atom_point)?;
            for (v, e) in &m.0 {
                let val = jet_point(v);
                for _ in 0..*e {
                    t *= &val;
                }
            }
            acc += &t;
        }
        Ok(acc)
    }
}

impl DiffPoly {
    /// In-place accumulation, avoiding the clone of a growing left side.
    pub fn add_assign_ref(&mut self, rhs: &DiffPoly) {
        self.dims.check(&rhs.dims).expect("dims mismatch");
        for (m, c) in &rhs.terms {
            self.insert(m.clone(), c.clone());
        }
    }

    pub fn add_assign_owned(&mut self, rhs: DiffPoly) {
        self.dims.check(&rhs.dims).expect("dims mismatch");
        for (m, c) in rhs.terms {
            self.insert(m, c);
        }
    }
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        self + &(-rhs)
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c))
                .collect(),
        }
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        self.dims.check(&rhs.dims).expect("dims mismatch");
        let mut out = DiffPoly::zero(self.dims);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{:?}", c)?;
            } else if c.is_one() {
                write!(f, "{:?}", m)?;
            } else {
                write!(f, "({:?})*{:?}", c, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1() -> Dims {
        Dims::new(1, 1).unwrap()
    }

    fn u(dims: Dims) -> DiffPoly {
        DiffPoly::generator(dims, 0)
    }

    fn u_x(dims: Dims) -> DiffPoly {
        DiffPoly::jet(dims, 0, MultiIndex::from_slice(&[1]))
    }

    #[test]
    fn total_derivative_of_square() {
        // ∂(u^2) = 2 u u_x
        let dims = d1();
        let f = &u(dims) * &u(dims);
        let df = f.total_derivative(0);
        let expected = (&u(dims) * &u_x(dims)).scale(&ScalarExpr::from_int(2));
        assert_eq!(df, expected);
    }

    #[test]
    fn total_derivative_shifts_jets() {
        let dims = d1();
        let df = u_x(dims).total_derivative(0);
        assert_eq!(df, DiffPoly::jet(dims, 0, MultiIndex::from_slice(&[2])));
    }

    #[test]
    fn jet_partials() {
        // f = u u_x : ∂f/∂u_x = u, ∂f/∂u = u_x
        let dims = d1();
        let f = &u(dims) * &u_x(dims);
        assert_eq!(f.jet_partial(0, &MultiIndex::from_slice(&[1])), u(dims));
        assert_eq!(f.jet_partial(0, &MultiIndex::from_slice(&[0])), u_x(dims));
    }

    #[test]
    fn variational_derivative_kills_total_derivatives() {
        // u u_x = ∂(u^2/2) so δ/δu (u u_x) = 0
        let dims = d1();
        let f = &u(dims) * &u_x(dims);
        assert!(f.variational_derivative(0).is_zero());
    }

    #[test]
    fn variational_derivative_of_u_uxx() {
        // δ/δu (u u_xx) = u_xx + ∂^2 u = 2 u_xx
        let dims = d1();
        let uxx = DiffPoly::jet(dims, 0, MultiIndex::from_slice(&[2]));
        let f = &u(dims) * &uxx;
        assert_eq!(
            f.variational_derivative(0),
            uxx.scale(&ScalarExpr::from_int(2))
        );
    }

    #[test]
    fn degree_grading() {
        let dims = d1();
        let uxx = DiffPoly::jet(dims, 0, MultiIndex::from_slice(&[2]));
        assert_eq!((&u_x(dims) * &uxx).degree(), Degree::Homogeneous(3));
        assert_eq!(u(dims).degree(), Degree::Homogeneous(0));
        assert_eq!((&u(dims) + &u_x(dims)).degree(), Degree::NonHomogeneous);
    }

    #[test]
    fn commuting_total_derivatives_2d() {
        let dims = Dims::new(2, 2).unwrap();
        // f = p q_x + F(p,q) p_y^2
        let p = DiffPoly::generator(dims, 0);
        let qx = DiffPoly::jet(dims, 1, MultiIndex::from_slice(&[1, 0]));
        let py = DiffPoly::jet(dims, 0, MultiIndex::from_slice(&[0, 1]));
        let ff = DiffPoly::from_scalar(dims, ScalarExpr::func0("F", 2));
        let f = &(&p * &qx) + &(&ff * &(&py * &py));
        let ab = f.total_derivative(0).total_derivative(1);
        let ba = f.total_derivative(1).total_derivative(0);
        assert_eq!(ab, ba);
    }
}
