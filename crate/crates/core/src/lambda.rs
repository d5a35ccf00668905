//! Polynomials in the formal variables `λ_1..λ_d` (and `μ_1..μ_d` inside
//! Jacobi computations) with differential-polynomial coefficients, the
//! master-formula extension of a generator bracket to the whole algebra, and
//! the skewsymmetry / Jacobi residuals that characterize a Poisson vertex
//! algebra.

use crate::diff::{DiffPoly, Dims};
use crate::error::PvaError;
use crate::multi::MultiIndex;
use crate::scalar::{ScalarExpr, Subst};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent pair of a `λ^N μ^M` monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LKey {
    pub lam: MultiIndex,
    pub mu: MultiIndex,
}

impl LKey {
    pub fn zero(d: usize) -> Self {
        LKey {
            lam: MultiIndex::zero(d),
            mu: MultiIndex::zero(d),
        }
    }

    pub fn order(&self) -> u32 {
        self.lam.order() + self.mu.order()
    }
}

impl fmt::Debug for LKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l^{:?}", self.lam)?;
        if !self.mu.is_zero() {
            write!(f, " m^{:?}", self.mu)?;
        }
        Ok(())
    }
}

/// Which formal variable a shift operator `±(v_α + ∂_α)` introduces.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ShiftVar {
    Lambda,
    Mu,
    /// `λ_α + μ_α + ∂_α`, used in the third Jacobi term.
    LambdaPlusMu,
}

/// Polynomial in `λ` (and `μ`) with `DiffPoly` coefficients; canonical (no
/// zero coefficients). The `μ` part is identically absent outside Jacobi
/// computations.
#[derive(Clone, PartialEq, Eq)]
pub struct LambdaPoly {
    dims: Dims,
    terms: BTreeMap<LKey, DiffPoly>,
}

impl LambdaPoly {
    pub fn zero(dims: Dims) -> Self {
        LambdaPoly {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_diff(p: DiffPoly) -> Self {
        let dims = p.dims();
        let mut out = Self::zero(dims);
        out.insert(LKey::zero(dims.d()), p);
        out
    }

    pub fn from_term(key: LKey, p: DiffPoly) -> Self {
        let mut out = Self::zero(p.dims());
        out.insert(key, p);
        out
    }

    /// The monomial `λ_α` (0-based direction).
    pub fn lambda_var(dims: Dims, alpha: usize) -> Self {
        Self::from_term(
            LKey {
                lam: MultiIndex::unit(dims.d(), alpha),
                mu: MultiIndex::zero(dims.d()),
            },
            DiffPoly::one(dims),
        )
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_mu_free(&self) -> bool {
        self.terms.keys().all(|k| k.mu.is_zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LKey, &DiffPoly)> {
        self.terms.iter()
    }

    fn insert(&mut self, key: LKey, p: DiffPoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &p;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
        }
    }

    /// Move every `λ` exponent to the `μ` slot (for inner brackets written in
    /// `μ`). Requires a μ-free input.
    pub fn lambda_to_mu(&self) -> LambdaPoly {
        debug_assert!(self.is_mu_free());
        let mut out = Self::zero(self.dims);
        for (k, c) in &self.terms {
            out.insert(
                LKey {
                    lam: MultiIndex::zero(self.dims.d()),
                    mu: k.lam.clone(),
                },
                c.clone(),
            );
        }
        out
    }

    /// In-place accumulation.
    pub fn add_assign_ref(&mut self, rhs: &LambdaPoly) {
        self.dims.check(&rhs.dims).expect("dims mismatch");
        for (k, p) in &rhs.terms {
            self.insert(k.clone(), p.clone());
        }
    }

    pub fn add_assign_owned(&mut self, rhs: LambdaPoly) {
        self.dims.check(&rhs.dims).expect("dims mismatch");
        for (k, p) in rhs.terms {
            self.insert(k, p);
        }
    }

    /// Coefficient at `λ = μ = 0`.
    pub fn at_zero(&self) -> DiffPoly {
        self.terms
            .get(&LKey::zero(self.dims.d()))
            .cloned()
            .unwrap_or_else(|| DiffPoly::zero(self.dims))
    }

    pub fn scale(&self, c: &ScalarExpr) -> LambdaPoly {
        let mut out = Self::zero(self.dims);
        for (k, p) in &self.terms {
            out.insert(k.clone(), p.scale(c));
        }
        out
    }

    pub fn mul_diff(&self, c: &DiffPoly) -> LambdaPoly {
        let mut out = Self::zero(self.dims);
        for (k, p) in &self.terms {
            out.insert(k.clone(), p * c);
        }
        out
    }

    /// Partial derivative with respect to `u^i_M`, termwise on coefficients.
    pub fn jet_partial(&self, gen: usize, idx: &MultiIndex) -> LambdaPoly {
        let mut out = Self::zero(self.dims);
        for (k, p) in &self.terms {
            out.insert(k.clone(), p.jet_partial(gen, idx));
        }
        out
    }

    /// Nonzero partials over all generators and jet orders present, including
    /// the base-variable partial at order 0.
    pub fn all_jet_partials(&self, gen: usize) -> Vec<(MultiIndex, LambdaPoly)> {
        let mut idxs: std::collections::BTreeSet<MultiIndex> =
            std::collections::BTreeSet::new();
        idxs.insert(MultiIndex::zero(self.dims.d()));
        for (_, p) in &self.terms {
            for v in p.jet_vars() {
                if v.gen() == gen {
                    idxs.insert(v.idx.clone());
                }
            }
        }
        let mut out = Vec::new();
        for idx in idxs {
            let dp = self.jet_partial(gen, &idx);
            if !dp.is_zero() {
                out.push((idx, dp));
            }
        }
        out
    }

    /// Apply a single shift operator `s·(v_α + ∂_α)` with `s = ±1`.
    fn apply_shift_once(&self, alpha: usize, var: ShiftVar, negate: bool) -> LambdaPoly {
        let mut out = Self::zero(self.dims);
        for (k, p) in &self.terms {
            let sp = if negate { -p } else { p.clone() };
            match var {
                ShiftVar::Lambda => out.insert(
                    LKey {
                        lam: k.lam.bump(alpha),
                        mu: k.mu.clone(),
                    },
                    sp.clone(),
                ),
                ShiftVar::Mu => out.insert(
                    LKey {
                        lam: k.lam.clone(),
                        mu: k.mu.bump(alpha),
                    },
                    sp.clone(),
                ),
                ShiftVar::LambdaPlusMu => {
                    out.insert(
                        LKey {
                            lam: k.lam.bump(alpha),
                            mu: k.mu.clone(),
                        },
                        sp.clone(),
                    );
                    out.insert(
                        LKey {
                            lam: k.lam.clone(),
                            mu: k.mu.bump(alpha),
                        },
                        sp.clone(),
                    );
                }
            }
            out.insert(k.clone(), if negate { -&p.total_derivative(alpha) } else { p.total_derivative(alpha) });
        }
        out
    }

    /// Apply `Π_α (±(v_α + ∂_α))^{M_α}`.
    pub fn apply_shift(&self, m: &MultiIndex, var: ShiftVar, negate: bool) -> LambdaPoly {
        let mut acc = self.clone();
        for (alpha, &k) in m.0.iter().enumerate() {
            for _ in 0..k {
                acc = acc.apply_shift_once(alpha, var, negate);
            }
        }
        acc
    }

    /// Total jet order of the coefficients (for prolongation bookkeeping).
    pub fn max_jet_order(&self) -> u32 {
        self.terms.values().map(|p| p.max_jet_order()).max().unwrap_or(0)
    }

    pub fn substitute(&self, subst: &Subst) -> Result<LambdaPoly, PvaError> {
        let mut out = Self::zero(self.dims);
        for (k, p) in &self.terms {
            out.insert(k.clone(), p.substitute(subst)?);
        }
        Ok(out)
    }
}

impl Add for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        self + &(-rhs)
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly {
            dims: self.dims,
            terms: self.terms.iter().map(|(k, p)| (k.clone(), -p)).collect(),
        }
    }
}

impl Mul for &LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        self.dims.check(&rhs.dims).expect("dims mismatch");
        let mut out = LambdaPoly::zero(self.dims);
        for (ka, pa) in &self.terms {
            for (kb, pb) in &rhs.terms {
                out.insert(
                    LKey {
                        lam: &ka.lam + &kb.lam,
                        mu: &ka.mu + &kb.mu,
                    },
                    pa * pb,
                );
            }
        }
        out
    }
}

impl fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (key, p)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if key.order() == 0 {
                write!(f, "{:?}", p)?;
            } else {
                write!(f, "({:?})·{:?}", p, key)?;
            }
        }
        Ok(())
    }
}

/// The generator-level bracket `{u^i_λ u^j}`: an `n×n` table of μ-free
/// λ-polynomials. By the symbol correspondence this table is the transpose of
/// the coefficient table of the defining operator (see [`symbol_roundtrip`]).
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorBracket {
    dims: Dims,
    table: Vec<LambdaPoly>,
}

impl fmt::Debug for GeneratorBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((i, j), e) in self.entries() {
            writeln!(f, "({},{}): {:?}", i + 1, j + 1, e)?;
        }
        Ok(())
    }
}

impl GeneratorBracket {
    pub fn new(dims: Dims, table: Vec<LambdaPoly>) -> Result<Self, PvaError> {
        if table.len() != dims.n() * dims.n() {
            return Err(PvaError::Invalid(format!(
                "bracket table must have n*n = {} entries, got {}",
                dims.n() * dims.n(),
                table.len()
            )));
        }
        for e in &table {
            dims.check(&e.dims())?;
            if !e.is_mu_free() {
                return Err(PvaError::Invalid(
                    "bracket entries must be mu-free".into(),
                ));
            }
        }
        Ok(GeneratorBracket { dims, table })
    }

    pub fn zero(dims: Dims) -> Self {
        GeneratorBracket {
            dims,
            table: vec![LambdaPoly::zero(dims); dims.n() * dims.n()],
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// `{u^i_λ u^j}` (0-based indices).
    pub fn entry(&self, i: usize, j: usize) -> &LambdaPoly {
        &self.table[i * self.dims.n() + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: LambdaPoly) {
        assert!(v.is_mu_free());
        self.table[i * self.dims.n() + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &LambdaPoly)> {
        let n = self.dims.n();
        self.table
            .iter()
            .enumerate()
            .map(move |(k, e)| ((k / n, k % n), e))
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|e| e.is_zero())
    }

    pub fn map(&self, f: impl Fn(&LambdaPoly) -> LambdaPoly) -> GeneratorBracket {
        GeneratorBracket {
            dims: self.dims,
            table: self.table.iter().map(f).collect(),
        }
    }

    pub fn substitute(&self, subst: &Subst) -> Result<GeneratorBracket, PvaError> {
        let mut table = Vec::with_capacity(self.table.len());
        for e in &self.table {
            table.push(e.substitute(subst)?);
        }
        Ok(GeneratorBracket {
            dims: self.dims,
            table,
        })
    }

    /// True when every entry is homogeneous of the given degree (grading:
    /// `deg λ^N = |N|`, `deg u^i_I = |I|`).
    pub fn is_homogeneous_of(&self, degree: u32) -> bool {
        self.table.iter().all(|e| {
            e.terms().all(|(k, p)| {
                p.terms().all(|(m, _)| k.order() + m.degree() == degree)
            })
        })
    }
}

/// `Σ_N C_N (λ+∂)^N target`: the bracket polynomial applied to a density with
/// the shift convention, expanded with multi-index binomials.
pub fn shifted_apply(l: &LambdaPoly, target: &DiffPoly) -> LambdaPoly {
    debug_assert!(l.is_mu_free());
    let mut acc = LambdaPoly::zero(l.dims());
    let base = LambdaPoly::from_diff(target.clone());
    for (key, c) in l.terms() {
        let shifted = base.apply_shift(&key.lam, ShiftVar::Lambda, false);
        acc.add_assign_owned(shifted.mul_diff(c));
    }
    acc
}

/// `Σ_N (−λ−∂)^N C_N`, the arrow convention: the derivations act on the
/// bracket's own coefficients.
pub fn arrow_negate(l: &LambdaPoly) -> LambdaPoly {
    debug_assert!(l.is_mu_free());
    let mut acc = LambdaPoly::zero(l.dims());
    for (key, c) in l.terms() {
        let emb = LambdaPoly::from_diff(c.clone());
        acc.add_assign_owned(emb.apply_shift(&key.lam, ShiftVar::Lambda, true));
    }
    acc
}

/// Master-formula core. Computes the bracket of `f_arg` with `target`, where
/// both may carry formal `λ`/`μ` exponents that ride along inertly, the
/// generator entries are taken from `bracket`, and the shift operators
/// introduce the formal variable selected by `var`:
///
/// `Σ_{i,j,M,N} (∂T/∂u^j_N) · (v+∂)^N [ entry(i,j)_S (v+∂)^S [ (−v−∂)^M (∂F/∂u^i_M) ] ]`
pub fn master_apply(
    f_arg: &LambdaPoly,
    target: &LambdaPoly,
    bracket: &GeneratorBracket,
    var: ShiftVar,
) -> LambdaPoly {
    let dims = bracket.dims();
    let n = dims.n();
    let mut acc = LambdaPoly::zero(dims);
    for i in 0..n {
        for (m_idx, df) in f_arg.all_jet_partials(i) {
            let inner = df.apply_shift(&m_idx, var, true);
            for j in 0..n {
                let entry = bracket.entry(i, j);
                if entry.is_zero() {
                    continue;
                }
                let mut mid = LambdaPoly::zero(dims);
                for (s_key, c_s) in entry.terms() {
                    let shifted = inner.apply_shift(&s_key.lam, var, false);
                    mid.add_assign_owned(shifted.mul_diff(c_s));
                }
                for (n_idx, dt) in target.all_jet_partials(j) {
                    let out = mid.apply_shift(&n_idx, var, false);
                    acc.add_assign_owned(&out * &dt);
                }
            }
        }
    }
    acc
}

/// The λ-bracket of two densities by the master formula.
pub fn master_bracket(
    f: &DiffPoly,
    g: &DiffPoly,
    bracket: &GeneratorBracket,
) -> Result<LambdaPoly, PvaError> {
    bracket.dims().check(&f.dims())?;
    bracket.dims().check(&g.dims())?;
    Ok(master_apply(
        &LambdaPoly::from_diff(f.clone()),
        &LambdaPoly::from_diff(g.clone()),
        bracket,
        ShiftVar::Lambda,
    ))
}

/// Skewsymmetry residual: entry `(i,j)` is `{u^i_λ u^j} + →{u^j_{−λ−∂} u^i}`;
/// the bracket is skew exactly when every entry vanishes.
pub fn skew_residual(bracket: &GeneratorBracket) -> Vec<Vec<LambdaPoly>> {
    let n = bracket.dims().n();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &*bracket.entry(i, j) + &arrow_negate(bracket.entry(j, i)))
                .collect()
        })
        .collect()
}

pub fn is_skew(bracket: &GeneratorBracket) -> bool {
    skew_residual(bracket)
        .iter()
        .all(|row| row.iter().all(|e| e.is_zero()))
}

/// One entry of the PVA-Jacobi residual:
/// `{u^i_λ {u^j_μ u^k}} − {u^j_μ {u^i_λ u^k}} − {{u^i_λ u^j}_{λ+μ} u^k}`,
/// with `outer` supplying the outermost bracket table and `inner` the nested
/// one (they differ when expanding a deformation order by order).
pub fn jacobi_term(
    outer: &GeneratorBracket,
    inner: &GeneratorBracket,
    i: usize,
    j: usize,
    k: usize,
) -> (LambdaPoly, LambdaPoly, LambdaPoly) {
    let dims = outer.dims();
    let gen = |x: usize| LambdaPoly::from_diff(DiffPoly::generator(dims, x));
    let t1 = master_apply(&gen(i), &inner.entry(j, k).lambda_to_mu(), outer, ShiftVar::Lambda);
    let t2 = master_apply(&gen(j), inner.entry(i, k), outer, ShiftVar::Mu);
    let t3 = master_apply(inner.entry(i, j), &gen(k), outer, ShiftVar::LambdaPlusMu);
    (t1, t2, t3)
}

/// Jacobi residual without the skewness precondition (used internally when
/// generating compatibility conditions on non-skew ansatz data).
pub fn jacobi_residual_unchecked(bracket: &GeneratorBracket) -> Vec<Vec<Vec<LambdaPoly>>> {
    let n = bracket.dims().n();
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .collect();
    let computed: Vec<((usize, usize, usize), LambdaPoly)> = triples
        .par_iter()
        .map(|&(i, j, k)| {
            let (t1, t2, t3) = jacobi_term(bracket, bracket, i, j, k);
            ((i, j, k), &(&t1 - &t2) - &t3)
        })
        .collect();
    let mut out =
        vec![vec![vec![LambdaPoly::zero(bracket.dims()); n]; n]; n];
    for ((i, j, k), v) in computed {
        out[i][j][k] = v;
    }
    out
}

/// PVA-Jacobi residual on generators. Errors with `NotSkew` when the
/// skewsymmetry precondition fails.
pub fn jacobi_residual(
    bracket: &GeneratorBracket,
) -> Result<Vec<Vec<Vec<LambdaPoly>>>, PvaError> {
    let skew = skew_residual(bracket);
    for (i, row) in skew.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                return Err(PvaError::NotSkew { i, j });
            }
        }
    }
    Ok(jacobi_residual_unchecked(bracket))
}

pub fn is_jacobi(bracket: &GeneratorBracket) -> Result<bool, PvaError> {
    Ok(jacobi_residual(bracket)?
        .iter()
        .all(|p| p.iter().all(|r| r.iter().all(|e| e.is_zero()))))
}

/// The bracket of densities induced at `λ = 0`; on skew Jacobi brackets it
/// descends to a Lie bracket of local functionals.
pub fn bracket_at_zero(
    f: &DiffPoly,
    g: &DiffPoly,
    bracket: &GeneratorBracket,
) -> Result<DiffPoly, PvaError> {
    Ok(master_bracket(f, g, bracket)?.at_zero())
}

/// Coefficient table `P^{ji}_S` of a local differential operator, indexed
/// `[j][i]` with one `(S, coefficient)` map per entry.
pub type OperatorTable = Vec<Vec<BTreeMap<MultiIndex, DiffPoly>>>;

/// Build the generator bracket whose `(i,j)` entry is the symbol
/// `Σ_S P^{ji}_S λ^S` of the operator. Note the index transposition: the
/// `(i,j)` bracket entry reads the `[j][i]` operator entry.
pub fn symbol_roundtrip(dims: Dims, ops: &OperatorTable) -> Result<GeneratorBracket, PvaError> {
    let n = dims.n();
    if ops.len() != n || ops.iter().any(|r| r.len() != n) {
        return Err(PvaError::Invalid("operator table must be n×n".into()));
    }
    let mut table = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = LambdaPoly::zero(dims);
            for (s, c) in &ops[j][i] {
                e = &e
                    + &LambdaPoly::from_term(
                        LKey {
                            lam: s.clone(),
                            mu: MultiIndex::zero(dims.d()),
                        },
                        c.clone(),
                    );
            }
            table.push(e);
        }
    }
    GeneratorBracket::new(dims, table)
}

/// Inverse accessor: the operator coefficient table of a bracket.
pub fn operator_table(bracket: &GeneratorBracket) -> OperatorTable {
    let n = bracket.dims().n();
    let mut ops: OperatorTable = vec![vec![BTreeMap::new(); n]; n];
    for ((i, j), e) in bracket.entries() {
        for (key, c) in e.terms() {
            ops[j][i].insert(key.lam.clone(), c.clone());
        }
    }
    ops
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarExpr;

    fn d1() -> Dims {
        Dims::new(1, 1).unwrap()
    }

    /// `{u_λ u} = λ` — the constant hydrodynamic bracket for d = n = 1.
    fn gardner(dims: Dims) -> GeneratorBracket {
        let mut b = GeneratorBracket::zero(dims);
        b.set_entry(0, 0, LambdaPoly::lambda_var(dims, 0));
        b
    }

    fn u(dims: Dims) -> DiffPoly {
        DiffPoly::generator(dims, 0)
    }

    fn ux(dims: Dims) -> DiffPoly {
        DiffPoly::jet(dims, 0, MultiIndex::from_slice(&[1]))
    }

    #[test]
    fn shifted_apply_on_generator() {
        // (λ+∂) u = λu + u_x
        let dims = d1();
        let l = LambdaPoly::lambda_var(dims, 0);
        let r = shifted_apply(&l, &u(dims));
        let expected = &LambdaPoly::from_term(
            LKey {
                lam: MultiIndex::from_slice(&[1]),
                mu: MultiIndex::from_slice(&[0]),
            },
            u(dims),
        ) + &LambdaPoly::from_diff(ux(dims));
        assert_eq!(r, expected);
    }

    #[test]
    fn shifted_apply_by_one_is_identity() {
        let dims = d1();
        let one = LambdaPoly::from_diff(DiffPoly::one(dims));
        let g = &u(dims) * &ux(dims);
        assert_eq!(shifted_apply(&one, &g), LambdaPoly::from_diff(g));
    }

    #[test]
    fn shifted_apply_square() {
        // (λ+∂)^2 u = λ^2 u + 2λ u_x + u_xx
        let dims = d1();
        let l2 = &LambdaPoly::lambda_var(dims, 0) * &LambdaPoly::lambda_var(dims, 0);
        let r = shifted_apply(&l2, &u(dims));
        let uxx = DiffPoly::jet(dims, 0, MultiIndex::from_slice(&[2]));
        let mut expected = LambdaPoly::from_diff(uxx);
        expected = &expected
            + &LambdaPoly::from_term(
                LKey {
                    lam: MultiIndex::from_slice(&[1]),
                    mu: MultiIndex::from_slice(&[0]),
                },
                ux(dims).scale(&ScalarExpr::from_int(2)),
            );
        expected = &expected
            + &LambdaPoly::from_term(
                LKey {
                    lam: MultiIndex::from_slice(&[2]),
                    mu: MultiIndex::from_slice(&[0]),
                },
                u(dims),
            );
        assert_eq!(r, expected);
    }

    #[test]
    fn arrow_negate_is_involution() {
        let dims = d1();
        // L = u λ + u u_x
        let l = &LambdaPoly::lambda_var(dims, 0).mul_diff(&u(dims))
            + &LambdaPoly::from_diff(&u(dims) * &ux(dims));
        assert_eq!(arrow_negate(&arrow_negate(&l)), l);
    }

    #[test]
    fn virasoro_charge_zero_is_skew() {
        // L = {p_λ p} = −2pλ − p_x satisfies L + →(−λ−∂)L = 0
        let dims = d1();
        let l = &LambdaPoly::lambda_var(dims, 0).mul_diff(&u(dims).scale(&ScalarExpr::from_int(-2)))
            + &LambdaPoly::from_diff((-&ux(dims)).clone());
        let an = arrow_negate(&l);
        assert_eq!(an, -&l);
        assert!((&l + &an).is_zero());
    }

    #[test]
    fn skew_residual_detects_even_part() {
        // {u_λ u} = u is not skew: residual 2u
        let dims = d1();
        let mut b = GeneratorBracket::zero(dims);
        b.set_entry(0, 0, LambdaPoly::from_diff(u(dims)));
        let r = skew_residual(&b);
        let expected = LambdaPoly::from_diff(u(dims).scale(&ScalarExpr::from_int(2)));
        assert_eq!(r[0][0], expected);
        assert!(matches!(
            jacobi_residual(&b),
            Err(PvaError::NotSkew { .. })
        ));
        // {u_λ u} = uλ + u: the λ-odd part is fine, the even part survives
        // together with the derivative of the λ-coefficient: 2u − u_x
        let mut b2 = GeneratorBracket::zero(dims);
        b2.set_entry(
            0,
            0,
            &LambdaPoly::lambda_var(dims, 0).mul_diff(&u(dims)) + &LambdaPoly::from_diff(u(dims)),
        );
        let r2 = skew_residual(&b2);
        let expected2 = &LambdaPoly::from_diff(u(dims).scale(&ScalarExpr::from_int(2)))
            - &LambdaPoly::from_diff(ux(dims));
        assert_eq!(r2[0][0], expected2);
    }

    #[test]
    fn master_on_generators_returns_entry() {
        let dims = d1();
        let b = gardner(dims);
        let r = master_bracket(&u(dims), &u(dims), &b).unwrap();
        assert_eq!(&r, b.entry(0, 0));
    }

    #[test]
    fn left_sesquilinearity_on_gardner() {
        // {∂u_λ u} = −λ {u_λ u}
        let dims = d1();
        let b = gardner(dims);
        let lhs = master_bracket(&ux(dims), &u(dims), &b).unwrap();
        let rhs = &LambdaPoly::lambda_var(dims, 0) * b.entry(0, 0);
        assert_eq!(lhs, -&rhs);
    }

    #[test]
    fn kdv_magri_from_miura_density() {
        // v = u^2 + i u_x over {u_λ u} = λ gives
        // {v_λ v} = λ^3 + 4vλ + 2∂v
        let dims = d1();
        let b = gardner(dims);
        let i = ScalarExpr::imag_unit();
        let v = &(&u(dims) * &u(dims)) + &ux(dims).scale(&i);
        let r = master_bracket(&v, &v, &b).unwrap();

        let dv = v.total_derivative(0);
        let lam = LambdaPoly::lambda_var(dims, 0);
        let expected = &(&(&(&lam * &lam) * &lam)
            + &lam.mul_diff(&v.scale(&ScalarExpr::from_int(4))))
            + &LambdaPoly::from_diff(dv.scale(&ScalarExpr::from_int(2)));
        assert_eq!(r, expected);
    }

    #[test]
    fn gardner_satisfies_jacobi() {
        let dims = d1();
        assert!(is_jacobi(&gardner(dims)).unwrap());
    }

    #[test]
    fn symbol_roundtrip_magri() {
        // P = d^3/dx^3 + 4u d/dx + 2u_x  ->  {u_λ u} = λ^3 + 4uλ + 2u_x
        let dims = d1();
        let mut entry: BTreeMap<MultiIndex, DiffPoly> = BTreeMap::new();
        entry.insert(MultiIndex::from_slice(&[3]), DiffPoly::one(dims));
        entry.insert(
            MultiIndex::from_slice(&[1]),
            u(dims).scale(&ScalarExpr::from_int(4)),
        );
        entry.insert(
            MultiIndex::from_slice(&[0]),
            ux(dims).scale(&ScalarExpr::from_int(2)),
        );
        let ops = vec![vec![entry]];
        let b = symbol_roundtrip(dims, &ops).unwrap();
        let lam = LambdaPoly::lambda_var(dims, 0);
        let expected = &(&(&(&lam * &lam) * &lam)
            + &lam.mul_diff(&u(dims).scale(&ScalarExpr::from_int(4))))
            + &LambdaPoly::from_diff(ux(dims).scale(&ScalarExpr::from_int(2)));
        assert_eq!(b.entry(0, 0), &expected);
        // and back
        let ops2 = operator_table(&b);
        assert_eq!(ops2, ops);
        // Magri bracket is skew and Jacobi
        assert!(is_skew(&b));
        assert!(is_jacobi(&b).unwrap());
    }

    #[test]
    fn bracket_at_zero_vanishes_on_self() {
        // {u, u} for {u_λ u} = λ: the λ^0 coefficient of λ is 0, and any
        // bracket of a density with itself has zero variational derivative
        let dims = d1();
        let b = gardner(dims);
        let r = bracket_at_zero(&u(dims), &u(dims), &b).unwrap();
        assert!(r.is_zero());
        assert!(r.variational_derivative(0).is_zero());
    }

    #[test]
    fn bracket_at_zero_hamiltonian_characteristic() {
        // {h(u)_λ u}|_{λ=0} over {u_λ u} = λ is ∂(h') = h'' u_x
        let dims = d1();
        let b = gardner(dims);
        let h = DiffPoly::from_scalar(dims, ScalarExpr::func0("h", 1));
        let r = bracket_at_zero(&h, &u(dims), &b).unwrap();
        let hpp = ScalarExpr::func("h", MultiIndex::from_slice(&[2]));
        assert_eq!(r, ux(dims).scale(&hpp));
    }
}
