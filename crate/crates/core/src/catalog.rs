//! The bracket catalog: hydrodynamic (degree-1) brackets from metric data,
//! the three d=n=2 normal forms, generation of the Mokhov-type compatibility
//! conditions from first principles, and the generic degree-2 deformation
//! ansatz with its skew parametrization.

use crate::cond::ConditionSystem;
use crate::diff::{DiffPoly, Dims};
use crate::error::PvaError;
use crate::lambda::{
    jacobi_residual_unchecked, skew_residual, GeneratorBracket, LKey, LambdaPoly,
};
use crate::multi::MultiIndex;
use crate::scalar::ScalarExpr;
use std::collections::{BTreeMap, BTreeSet};

/// Metric and connection data of a hydrodynamic bracket:
/// `{u^i_λ u^j} = Σ_α g^{ijα} λ_α + Σ_{α,k} b^{ijα}_k ∂_α u^k`,
/// with every entry a function of the 0-jets only.
#[derive(Clone, Debug)]
pub struct HydroData {
    dims: Dims,
    g: Vec<ScalarExpr>,
    b: Vec<ScalarExpr>,
}

impl HydroData {
    pub fn zero(dims: Dims) -> Self {
        let n = dims.n();
        let d = dims.d();
        HydroData {
            dims,
            g: vec![ScalarExpr::zero(); n * n * d],
            b: vec![ScalarExpr::zero(); n * n * d * n],
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    fn gi(&self, i: usize, j: usize, alpha: usize) -> usize {
        (i * self.dims.n() + j) * self.dims.d() + alpha
    }

    fn bi(&self, i: usize, j: usize, alpha: usize, k: usize) -> usize {
        ((i * self.dims.n() + j) * self.dims.d() + alpha) * self.dims.n() + k
    }

    pub fn g(&self, i: usize, j: usize, alpha: usize) -> &ScalarExpr {
        &self.g[self.gi(i, j, alpha)]
    }

    pub fn b(&self, i: usize, j: usize, alpha: usize, k: usize) -> &ScalarExpr {
        &self.b[self.bi(i, j, alpha, k)]
    }

    pub fn set_g(&mut self, i: usize, j: usize, alpha: usize, v: ScalarExpr) {
        let idx = self.gi(i, j, alpha);
        self.g[idx] = v;
    }

    pub fn set_b(&mut self, i: usize, j: usize, alpha: usize, k: usize, v: ScalarExpr) {
        let idx = self.bi(i, j, alpha, k);
        self.b[idx] = v;
    }

    /// Fully generic data: every `g^{ijα}` and `b^{ijα}_k` a fresh unknown
    /// function of the 0-jets.
    pub fn generic(dims: Dims) -> Self {
        let mut h = Self::zero(dims);
        let n = dims.n();
        for i in 0..n {
            for j in 0..n {
                for alpha in 0..dims.d() {
                    h.set_g(
                        i,
                        j,
                        alpha,
                        ScalarExpr::func0(&format!("g{}{}_{}", i + 1, j + 1, alpha + 1), n),
                    );
                    for k in 0..n {
                        h.set_b(
                            i,
                            j,
                            alpha,
                            k,
                            ScalarExpr::func0(
                                &format!("b{}{}_{}_{}", i + 1, j + 1, alpha + 1, k + 1),
                                n,
                            ),
                        );
                    }
                }
            }
        }
        h
    }

    pub fn function_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in self.g.iter().chain(&self.b) {
            for a in e.atoms() {
                if let Some(name) = a.func_name() {
                    out.insert(name.to_string());
                }
            }
        }
        out
    }

    /// Extract hydrodynamic data from a degree-1 bracket; errors when the
    /// bracket is not of hydrodynamic shape.
    pub fn from_bracket(bracket: &GeneratorBracket) -> Result<HydroData, PvaError> {
        let dims = bracket.dims();
        let mut h = Self::zero(dims);
        for ((i, j), entry) in bracket.entries() {
            for (key, dp) in entry.terms() {
                if !key.mu.is_zero() {
                    return Err(PvaError::NotHydrodynamic);
                }
                match key.lam.order() {
                    1 => {
                        let alpha = (0..dims.d()).find(|&a| key.lam[a] == 1).unwrap();
                        let c = dp.as_scalar().ok_or(PvaError::NotHydrodynamic)?;
                        h.set_g(i, j, alpha, c);
                    }
                    0 => {
                        for (mono, c) in dp.terms() {
                            if mono.0.len() != 1 || mono.0[0].1 != 1 {
                                return Err(PvaError::NotHydrodynamic);
                            }
                            let v = &mono.0[0].0;
                            if v.idx.order() != 1 {
                                return Err(PvaError::NotHydrodynamic);
                            }
                            let alpha = (0..dims.d()).find(|&a| v.idx[a] == 1).unwrap();
                            h.set_b(i, j, alpha, v.gen(), c.clone());
                        }
                    }
                    _ => return Err(PvaError::NotHydrodynamic),
                }
            }
        }
        Ok(h)
    }
}

/// Build the degree-1 homogeneous bracket from hydrodynamic data.
pub fn make_hydro(h: &HydroData) -> GeneratorBracket {
    let dims = h.dims();
    let n = dims.n();
    let d = dims.d();
    let mut bracket = GeneratorBracket::zero(dims);
    for i in 0..n {
        for j in 0..n {
            let mut e = LambdaPoly::zero(dims);
            for alpha in 0..d {
                let gc = h.g(i, j, alpha);
                if !gc.is_zero() {
                    e = &e
                        + &LambdaPoly::from_term(
                            LKey {
                                lam: MultiIndex::unit(d, alpha),
                                mu: MultiIndex::zero(d),
                            },
                            DiffPoly::from_scalar(dims, gc.clone()),
                        );
                }
                for k in 0..n {
                    let bc = h.b(i, j, alpha, k);
                    if !bc.is_zero() {
                        let jet = DiffPoly::jet(dims, k, MultiIndex::unit(d, alpha));
                        e = &e + &LambdaPoly::from_diff(jet.scale(bc));
                    }
                }
            }
            bracket.set_entry(i, j, e);
        }
    }
    bracket
}

/// The catalog of normal forms for d = n = 2 (plus the Lie–Poisson bracket,
/// whose shape is the same in any dimension d = n).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NormalForm {
    P1,
    P2,
    LiePoisson,
}

impl NormalForm {
    pub fn parse(s: &str) -> Option<NormalForm> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Some(NormalForm::P1),
            "p2" => Some(NormalForm::P2),
            "lp" | "lie-poisson" | "liepoisson" => Some(NormalForm::LiePoisson),
            _ => None,
        }
    }
}

/// The hydrodynamic data of a catalog bracket.
pub fn normal_form_data(which: NormalForm, dims: Dims) -> Result<HydroData, PvaError> {
    let n = dims.n();
    match which {
        NormalForm::P1 => {
            if dims.d() != 2 || n != 2 {
                return Err(PvaError::UnsupportedDims {
                    d: dims.d,
                    n: dims.n,
                    what: "constant normal form (first)",
                });
            }
            let mut h = HydroData::zero(dims);
            // {p_i λ p_j} = δ_ij λ_i
            for i in 0..2 {
                h.set_g(i, i, i, ScalarExpr::one());
            }
            Ok(h)
        }
        NormalForm::P2 => {
            if dims.d() != 2 || n != 2 {
                return Err(PvaError::UnsupportedDims {
                    d: dims.d,
                    n: dims.n,
                    what: "constant normal form (second)",
                });
            }
            let mut h = HydroData::zero(dims);
            // {p_i λ p_j} = δ_{i+j,3} λ_1 + δ_ij δ_{j2} λ_2 (1-based indices)
            h.set_g(0, 1, 0, ScalarExpr::one());
            h.set_g(1, 0, 0, ScalarExpr::one());
            h.set_g(1, 1, 1, ScalarExpr::one());
            Ok(h)
        }
        NormalForm::LiePoisson => {
            if dims.d() != n {
                return Err(PvaError::UnsupportedDims {
                    d: dims.d,
                    n: dims.n,
                    what: "Lie-Poisson bracket needs d = n",
                });
            }
            let mut h = HydroData::zero(dims);
            // {p_i λ p_j} = −(p_i λ_j + p_j λ_i + ∂_i p_j)
            for i in 0..n {
                for j in 0..n {
                    let prev = h.g(i, j, j).clone();
                    h.set_g(i, j, j, &prev - &ScalarExpr::base(i));
                    let prev = h.g(i, j, i).clone();
                    h.set_g(i, j, i, &prev - &ScalarExpr::base(j));
                    h.set_b(i, j, i, j, ScalarExpr::from_int(-1));
                }
            }
            Ok(h)
        }
    }
}

pub fn normal_form(which: NormalForm, dims: Dims) -> Result<GeneratorBracket, PvaError> {
    Ok(make_hydro(&normal_form_data(which, dims)?))
}

/// Generate the full compatibility condition system for hydrodynamic data
/// from first principles: coefficients of the skew residual first (the
/// metric-symmetry and connection classes), then every coefficient of the
/// Jacobi residual.
pub fn mokhov_conditions(h: &HydroData) -> ConditionSystem {
    let bracket = make_hydro(h);
    let mut sys = ConditionSystem::new(h.function_names());
    for row in skew_residual(&bracket) {
        for e in row {
            sys.collect_lambda(&e);
        }
    }
    for plane in jacobi_residual_unchecked(&bracket) {
        for row in plane {
            for e in row {
                sys.collect_lambda(&e);
            }
        }
    }
    sys
}

fn i1(x: usize) -> usize {
    x + 1
}

/// Canonical names of the ansatz coefficient functions; index symmetries are
/// resolved before naming, so symmetric slots share one atom.
pub fn ansatz_name_a(a: usize, b: usize, i: usize, j: usize) -> String {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    format!("A{}{}_{}{}", i1(a), i1(b), i1(i), i1(j))
}

pub fn ansatz_name_b(a: usize, b: usize, l: usize, i: usize, j: usize) -> String {
    format!("B{}_{}{}_{}{}", i1(a), i1(b), i1(l), i1(i), i1(j))
}

pub fn ansatz_name_c(a: usize, l: usize, b: usize, m: usize, i: usize, j: usize) -> String {
    let ((a, l), (b, m)) = if (a, l) <= (b, m) {
        ((a, l), (b, m))
    } else {
        ((b, m), (a, l))
    };
    format!("C{}{}_{}{}_{}{}", i1(a), i1(l), i1(b), i1(m), i1(i), i1(j))
}

pub fn ansatz_name_d(a: usize, b: usize, l: usize, i: usize, j: usize) -> String {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    format!("D{}{}_{}_{}{}", i1(a), i1(b), i1(l), i1(i), i1(j))
}

/// Tilde-parameter names for the skew-solved form (d = n = 2): the
/// `(1,2)`-antisymmetric parts of `A`, `C`, `D` and the `(i,j)`-symmetric
/// parts of `B` (which for `i = j` coincide with `B` itself).
pub fn tilde_name_a(a: usize, b: usize) -> String {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    format!("At{}{}", i1(a), i1(b))
}

pub fn tilde_name_b(a: usize, b: usize, l: usize, i: usize, j: usize) -> String {
    debug_assert!((i, j) != (1, 0));
    format!("Bt{}_{}{}_{}{}", i1(a), i1(b), i1(l), i1(i), i1(j))
}

pub fn tilde_name_c(a: usize, l: usize, b: usize, m: usize) -> String {
    let ((a, l), (b, m)) = if (a, l) <= (b, m) {
        ((a, l), (b, m))
    } else {
        ((b, m), (a, l))
    };
    format!("Ct{}{}_{}{}", i1(a), i1(l), i1(b), i1(m))
}

pub fn tilde_name_d(a: usize, b: usize, l: usize) -> String {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    format!("Dt{}{}_{}", i1(a), i1(b), i1(l))
}

/// Coefficient tables of a degree-2 homogeneous bracket, stored on canonical
/// index tuples. Symmetry (`A`, `D` in `(a,b)`; `C` under `(al) ↔ (bm)`) is
/// resolved by the accessors.
#[derive(Clone, Debug)]
pub struct DeformationAnsatz {
    dims: Dims,
    pub a: BTreeMap<(usize, usize, usize, usize), ScalarExpr>,
    pub b: BTreeMap<(usize, usize, usize, usize, usize), ScalarExpr>,
    pub c: BTreeMap<(usize, usize, usize, usize, usize, usize), ScalarExpr>,
    pub d: BTreeMap<(usize, usize, usize, usize, usize), ScalarExpr>,
}

impl DeformationAnsatz {
    pub fn empty(dims: Dims) -> Self {
        DeformationAnsatz {
            dims,
            a: BTreeMap::new(),
            b: BTreeMap::new(),
            c: BTreeMap::new(),
            d: BTreeMap::new(),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    fn akey(a: usize, b: usize, i: usize, j: usize) -> (usize, usize, usize, usize) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        (a, b, i, j)
    }

    fn ckey(
        a: usize,
        l: usize,
        b: usize,
        m: usize,
        i: usize,
        j: usize,
    ) -> (usize, usize, usize, usize, usize, usize) {
        let ((a, l), (b, m)) = if (a, l) <= (b, m) {
            ((a, l), (b, m))
        } else {
            ((b, m), (a, l))
        };
        (a, l, b, m, i, j)
    }

    pub fn get_a(&self, a: usize, b: usize, i: usize, j: usize) -> ScalarExpr {
        self.a
            .get(&Self::akey(a, b, i, j))
            .cloned()
            .unwrap_or_else(ScalarExpr::zero)
    }

    pub fn get_b(&self, a: usize, b: usize, l: usize, i: usize, j: usize) -> ScalarExpr {
        self.b
            .get(&(a, b, l, i, j))
            .cloned()
            .unwrap_or_else(ScalarExpr::zero)
    }

    pub fn get_c(&self, a: usize, l: usize, b: usize, m: usize, i: usize, j: usize) -> ScalarExpr {
        self.c
            .get(&Self::ckey(a, l, b, m, i, j))
            .cloned()
            .unwrap_or_else(ScalarExpr::zero)
    }

    pub fn get_d(&self, a: usize, b: usize, l: usize, i: usize, j: usize) -> ScalarExpr {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.d
            .get(&(a, b, l, i, j))
            .cloned()
            .unwrap_or_else(ScalarExpr::zero)
    }

    pub fn set_a(&mut self, a: usize, b: usize, i: usize, j: usize, v: ScalarExpr) {
        self.a.insert(Self::akey(a, b, i, j), v);
    }

    pub fn set_b(&mut self, a: usize, b: usize, l: usize, i: usize, j: usize, v: ScalarExpr) {
        self.b.insert((a, b, l, i, j), v);
    }

    pub fn set_c(
        &mut self,
        a: usize,
        l: usize,
        b: usize,
        m: usize,
        i: usize,
        j: usize,
        v: ScalarExpr,
    ) {
        self.c.insert(Self::ckey(a, l, b, m, i, j), v);
    }

    pub fn set_d(&mut self, a: usize, b: usize, l: usize, i: usize, j: usize, v: ScalarExpr) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.d.insert((a, b, l, i, j), v);
    }

    /// The fully generic ansatz: one fresh unknown function per canonical
    /// index tuple (108 functions for d = n = 2).
    pub fn generic(dims: Dims) -> Self {
        let n = dims.n();
        let d = dims.d();
        let mut out = Self::empty(dims);
        for i in 0..n {
            for j in 0..n {
                for a in 0..d {
                    for b in a..d {
                        out.set_a(a, b, i, j, ScalarExpr::func0(&ansatz_name_a(a, b, i, j), n));
                        for l in 0..n {
                            out.set_d(
                                a,
                                b,
                                l,
                                i,
                                j,
                                ScalarExpr::func0(&ansatz_name_d(a, b, l, i, j), n),
                            );
                        }
                    }
                    for b in 0..d {
                        for l in 0..n {
                            out.set_b(
                                a,
                                b,
                                l,
                                i,
                                j,
                                ScalarExpr::func0(&ansatz_name_b(a, b, l, i, j), n),
                            );
                        }
                    }
                    for l in 0..n {
                        for b in 0..d {
                            for m in 0..n {
                                if (a, l) <= (b, m) {
                                    out.set_c(
                                        a,
                                        l,
                                        b,
                                        m,
                                        i,
                                        j,
                                        ScalarExpr::func0(&ansatz_name_c(a, l, b, m, i, j), n),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of distinct coefficient functions (after index symmetries).
    pub fn free_function_count(&self) -> usize {
        self.function_names().len()
    }

    pub fn function_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in self
            .a
            .values()
            .chain(self.b.values())
            .chain(self.c.values())
            .chain(self.d.values())
        {
            for at in e.atoms() {
                if let Some(nm) = at.func_name() {
                    out.insert(nm.to_string());
                }
            }
        }
        out
    }

    /// Assemble the degree-2 bracket
    /// `Σ A λ_a λ_b + Σ B ∂_b p_l λ_a + Σ C ∂_a p_l ∂_b p_m + Σ D ∂_{ab} p_l`
    /// with all sums over the full index ranges.
    pub fn bracket(&self) -> GeneratorBracket {
        let dims = self.dims;
        let n = dims.n();
        let d = dims.d();
        let mut out = GeneratorBracket::zero(dims);
        for i in 0..n {
            for j in 0..n {
                let mut e = LambdaPoly::zero(dims);
                for a in 0..d {
                    for b in 0..d {
                        let av = self.get_a(a, b, i, j);
                        if !av.is_zero() {
                            e = &e
                                + &LambdaPoly::from_term(
                                    LKey {
                                        lam: &MultiIndex::unit(d, a) + &MultiIndex::unit(d, b),
                                        mu: MultiIndex::zero(d),
                                    },
                                    DiffPoly::from_scalar(dims, av),
                                );
                        }
                        for l in 0..n {
                            let bv = self.get_b(a, b, l, i, j);
                            if !bv.is_zero() {
                                let jet = DiffPoly::jet(dims, l, MultiIndex::unit(d, b));
                                e = &e
                                    + &LambdaPoly::from_term(
                                        LKey {
                                            lam: MultiIndex::unit(d, a),
                                            mu: MultiIndex::zero(d),
                                        },
                                        jet.scale(&bv),
                                    );
                            }
                            let dv = self.get_d(a, b, l, i, j);
                            if !dv.is_zero() {
                                let jet = DiffPoly::jet(
                                    dims,
                                    l,
                                    &MultiIndex::unit(d, a) + &MultiIndex::unit(d, b),
                                );
                                e = &e + &LambdaPoly::from_diff(jet.scale(&dv));
                            }
                            for m in 0..n {
                                let cv = self.get_c(a, l, b, m, i, j);
                                if !cv.is_zero() {
                                    let ja = DiffPoly::jet(dims, l, MultiIndex::unit(d, a));
                                    let jb = DiffPoly::jet(dims, m, MultiIndex::unit(d, b));
                                    e = &e + &LambdaPoly::from_diff((&ja * &jb).scale(&cv));
                                }
                            }
                        }
                    }
                }
                out.set_entry(i, j, e);
            }
        }
        out
    }

    /// Read the coefficient tables back off a degree-2 bracket.
    pub fn from_bracket(bracket: &GeneratorBracket) -> Result<Self, PvaError> {
        let dims = bracket.dims();
        if !bracket.is_homogeneous_of(2) {
            return Err(PvaError::Invalid(
                "deformation bracket must be homogeneous of degree 2".into(),
            ));
        }
        let d = dims.d();
        let half = ScalarExpr::from_frac(1, 2);
        let mut out = Self::empty(dims);
        for ((i, j), entry) in bracket.entries() {
            for (key, dp) in entry.terms() {
                match key.lam.order() {
                    2 => {
                        let c = dp.as_scalar().ok_or_else(|| {
                            PvaError::Invalid("nonscalar λλ coefficient".into())
                        })?;
                        let dirs: Vec<usize> =
                            (0..d).flat_map(|x| (0..key.lam[x] as usize).map(move |_| x)).collect();
                        let (a, b) = (dirs[0], dirs[1]);
                        // λ_a λ_b with a≠b picks up A^{ab}+A^{ba} = 2A^{ab}
                        let v = if a == b { c } else { &c * &half };
                        out.set_a(a, b, i, j, v);
                    }
                    1 => {
                        let a = (0..d).find(|&x| key.lam[x] == 1).unwrap();
                        for (mono, c) in dp.terms() {
                            if mono.0.len() != 1 || mono.0[0].1 != 1 {
                                return Err(PvaError::Invalid(
                                    "λ-linear part must be linear in first jets".into(),
                                ));
                            }
                            let v = &mono.0[0].0;
                            if v.idx.order() != 1 {
                                return Err(PvaError::Invalid(
                                    "λ-linear part must carry first-order jets".into(),
                                ));
                            }
                            let bdir = (0..d).find(|&x| v.idx[x] == 1).unwrap();
                            out.set_b(a, bdir, v.gen(), i, j, c.clone());
                        }
                    }
                    0 => {
                        for (mono, c) in dp.terms() {
                            let factors: Vec<_> = mono.0.iter().collect();
                            let total: u32 = factors.iter().map(|(_, e)| *e).sum();
                            match total {
                                1 => {
                                    let v = &factors[0].0;
                                    if v.idx.order() == 2 {
                                        let dirs: Vec<usize> = (0..d)
                                            .flat_map(|x| {
                                                (0..v.idx[x] as usize).map(move |_| x)
                                            })
                                            .collect();
                                        let (a, b) = (dirs[0], dirs[1]);
                                        let val = if a == b { c.clone() } else { c * &half };
                                        out.set_d(a, b, v.gen(), i, j, val);
                                    } else {
                                        return Err(PvaError::Invalid(
                                            "degree-2 part has unexpected jet order".into(),
                                        ));
                                    }
                                }
                                2 => {
                                    let (va, vb) = if factors.len() == 1 {
                                        (&factors[0].0, &factors[0].0)
                                    } else {
                                        (&factors[0].0, &factors[1].0)
                                    };
                                    if va.idx.order() != 1 || vb.idx.order() != 1 {
                                        return Err(PvaError::Invalid(
                                            "quadratic part must use first jets".into(),
                                        ));
                                    }
                                    let a = (0..d).find(|&x| va.idx[x] == 1).unwrap();
                                    let b = (0..d).find(|&x| vb.idx[x] == 1).unwrap();
                                    let same = (a, va.gen()) == (b, vb.gen());
                                    let val = if same { c.clone() } else { c * &half };
                                    out.set_c(a, va.gen(), b, vb.gen(), i, j, val);
                                }
                                _ => {
                                    return Err(PvaError::Invalid(
                                        "degree-2 part has unexpected monomial".into(),
                                    ))
                                }
                            }
                        }
                    }
                    _ => {
                        return Err(PvaError::Invalid(
                            "λ-degree above 2 in a first-order deformation".into(),
                        ))
                    }
                }
            }
        }
        Ok(out)
    }

    /// Tilde parameters of a skew degree-2 bracket (d = n = 2): the
    /// `(1,2)`-antisymmetric parts of `A`, `C`, `D` and the symmetric parts
    /// of `B`, as a name → value table (34 + 9 entries, 43 total).
    pub fn tilde_values(&self) -> BTreeMap<String, ScalarExpr> {
        let half = ScalarExpr::from_frac(1, 2);
        let mut out = BTreeMap::new();
        let d = self.dims.d();
        let n = self.dims.n();
        for a in 0..d {
            for b in a..d {
                let v = &(&self.get_a(a, b, 0, 1) - &self.get_a(a, b, 1, 0)) * &half;
                out.insert(tilde_name_a(a, b), v);
                for l in 0..n {
                    let v = &(&self.get_d(a, b, l, 0, 1) - &self.get_d(a, b, l, 1, 0)) * &half;
                    out.insert(tilde_name_d(a, b, l), v);
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                for l in 0..n {
                    for (i, j) in [(0usize, 0usize), (1, 1), (0, 1)] {
                        let v = if i == j {
                            self.get_b(a, b, l, i, j)
                        } else {
                            &(&self.get_b(a, b, l, 0, 1) + &self.get_b(a, b, l, 1, 0)) * &half
                        };
                        out.insert(tilde_name_b(a, b, l, i, j), v);
                    }
                }
            }
        }
        for a in 0..d {
            for l in 0..n {
                for b in 0..d {
                    for m in 0..n {
                        if (a, l) <= (b, m) {
                            let v = &(&self.get_c(a, l, b, m, 0, 1)
                                - &self.get_c(a, l, b, m, 1, 0))
                                * &half;
                            out.insert(tilde_name_c(a, l, b, m), v);
                        }
                    }
                }
            }
        }
        out
    }
}

/// The generic deformation ansatz and its bracket.
pub fn deformation_ansatz(dims: Dims) -> (GeneratorBracket, DeformationAnsatz) {
    let ans = DeformationAnsatz::generic(dims);
    (ans.bracket(), ans)
}

/// Coefficient collection of the skew residual on a deformation ansatz.
pub fn skew_deformation_conditions(ans: &DeformationAnsatz) -> ConditionSystem {
    let bracket = ans.bracket();
    let mut sys = ConditionSystem::new(ans.function_names());
    for row in skew_residual(&bracket) {
        for e in row {
            sys.collect_lambda(&e);
        }
    }
    sys
}

/// Build the skew-by-construction degree-2 bracket parametrized by the 43
/// tilde functions (d = n = 2). `values` may assign expressions to (some of)
/// the tilde names; unassigned names stay as fresh unknown functions.
pub fn apply_tilde(
    dims: Dims,
    values: &BTreeMap<String, ScalarExpr>,
) -> Result<DeformationAnsatz, PvaError> {
    if dims.d() != 2 || dims.n() != 2 {
        return Err(PvaError::UnsupportedDims {
            d: dims.d,
            n: dims.n,
            what: "tilde parametrization",
        });
    }
    let n = dims.n();
    let d = dims.d();
    let look = |name: String| -> ScalarExpr {
        values
            .get(&name)
            .cloned()
            .unwrap_or_else(|| ScalarExpr::func0(&name, n))
    };
    let at = |a: usize, b: usize| look(tilde_name_a(a, b));
    let bt = |a: usize, b: usize, l: usize, i: usize, j: usize| {
        if i == j {
            look(tilde_name_b(a, b, l, i, i))
        } else {
            look(tilde_name_b(a, b, l, 0, 1))
        }
    };
    let ct = |a: usize, l: usize, b: usize, m: usize| look(tilde_name_c(a, l, b, m));
    let dt = |a: usize, b: usize, l: usize| look(tilde_name_d(a, b, l));

    let quarter = ScalarExpr::from_frac(1, 4);
    let mut out = DeformationAnsatz::empty(dims);
    for a in 0..d {
        for b in a..d {
            // A_{11} = A_{22} = 0, A_{12} = Ã = −A_{21}
            out.set_a(a, b, 0, 0, ScalarExpr::zero());
            out.set_a(a, b, 1, 1, ScalarExpr::zero());
            out.set_a(a, b, 0, 1, at(a, b));
            out.set_a(a, b, 1, 0, -&at(a, b));
        }
    }
    for a in 0..d {
        for b in 0..d {
            for l in 0..n {
                // B_{ii} = B̃_{ii}; B_{12/21} = B̃_{12} ± ∂Ã^{ab}/∂p_l
                out.set_b(a, b, l, 0, 0, bt(a, b, l, 0, 0));
                out.set_b(a, b, l, 1, 1, bt(a, b, l, 1, 1));
                let da = at(a, b).base_partial(l);
                out.set_b(a, b, l, 0, 1, &bt(a, b, l, 0, 1) + &da);
                out.set_b(a, b, l, 1, 0, &bt(a, b, l, 0, 1) - &da);
            }
        }
    }
    for a in 0..d {
        for l in 0..n {
            for b in 0..d {
                for m in 0..n {
                    if (a, l) > (b, m) {
                        continue;
                    }
                    // C symmetric part from derivatives of B̃; antisymmetric
                    // part is the tilde C
                    for (i, j) in [(0usize, 0usize), (1, 1)] {
                        let v = &(&bt(a, b, m, i, j).base_partial(l)
                            + &bt(b, a, l, i, j).base_partial(m))
                            * &quarter;
                        out.set_c(a, l, b, m, i, j, v);
                    }
                    let sym12 = &(&bt(a, b, m, 0, 1).base_partial(l)
                        + &bt(b, a, l, 0, 1).base_partial(m))
                        * &quarter;
                    out.set_c(a, l, b, m, 0, 1, &sym12 + &ct(a, l, b, m));
                    out.set_c(a, l, b, m, 1, 0, &sym12 - &ct(a, l, b, m));
                }
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            for l in 0..n {
                // D symmetric part from B̃; antisymmetric part is the tilde D
                for (i, j) in [(0usize, 0usize), (1, 1)] {
                    let v = &(&bt(a, b, l, i, j) + &bt(b, a, l, i, j)) * &quarter;
                    out.set_d(a, b, l, i, j, v);
                }
                let sym12 = &(&bt(a, b, l, 0, 1) + &bt(b, a, l, 0, 1)) * &quarter;
                out.set_d(a, b, l, 0, 1, &sym12 + &dt(a, b, l));
                out.set_d(a, b, l, 1, 0, &sym12 - &dt(a, b, l));
            }
        }
    }
    Ok(out)
}

/// The 43 tilde names for d = n = 2, in a fixed order.
pub fn tilde_names() -> Vec<String> {
    let mut out = Vec::new();
    for a in 0..2 {
        for b in a..2 {
            out.push(tilde_name_a(a, b));
        }
    }
    for (i, j) in [(0usize, 0usize), (1, 1), (0, 1)] {
        for a in 0..2 {
            for b in 0..2 {
                for l in 0..2 {
                    out.push(tilde_name_b(a, b, l, i, j));
                }
            }
        }
    }
    for a in 0..2 {
        for l in 0..2 {
            for b in 0..2 {
                for m in 0..2 {
                    if (a, l) <= (b, m) {
                        out.push(tilde_name_c(a, l, b, m));
                    }
                }
            }
        }
    }
    for a in 0..2 {
        for b in a..2 {
            for l in 0..2 {
                out.push(tilde_name_d(a, b, l));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond::eliminate_functions;
    use crate::lambda::{is_jacobi, is_skew};
    use crate::scalar::Subst;

    fn d22() -> Dims {
        Dims::new(2, 2).unwrap()
    }

    #[test]
    fn p1_entries() {
        let b = normal_form(NormalForm::P1, d22()).unwrap();
        assert!(b.entry(0, 1).is_zero());
        assert_eq!(b.entry(0, 0), &LambdaPoly::lambda_var(d22(), 0));
        assert_eq!(b.entry(1, 1), &LambdaPoly::lambda_var(d22(), 1));
    }

    #[test]
    fn p2_entries() {
        let b = normal_form(NormalForm::P2, d22()).unwrap();
        assert_eq!(b.entry(0, 1), &LambdaPoly::lambda_var(d22(), 0));
        assert_eq!(b.entry(1, 0), &LambdaPoly::lambda_var(d22(), 0));
        assert_eq!(b.entry(1, 1), &LambdaPoly::lambda_var(d22(), 1));
        assert!(b.entry(0, 0).is_zero());
    }

    #[test]
    fn lp_entry_12() {
        // {p_1 λ p_2} = −(p_1 λ_2 + p_2 λ_1 + ∂_1 p_2)
        let dims = d22();
        let b = normal_form(NormalForm::LiePoisson, dims).unwrap();
        let p1 = ScalarExpr::base(0);
        let p2 = ScalarExpr::base(1);
        let expected = &(&LambdaPoly::lambda_var(dims, 1)
            .scale(&(-&p1))
            + &LambdaPoly::lambda_var(dims, 0).scale(&(-&p2)))
            + &LambdaPoly::from_diff(
                DiffPoly::jet(dims, 1, MultiIndex::from_slice(&[1, 0]))
                    .scale(&ScalarExpr::from_int(-1)),
            );
        assert_eq!(b.entry(0, 1), &expected);
    }

    #[test]
    fn catalog_brackets_are_pva() {
        for which in [NormalForm::P1, NormalForm::P2, NormalForm::LiePoisson] {
            let b = normal_form(which, d22()).unwrap();
            assert!(is_skew(&b), "{:?} skew", which);
            assert!(is_jacobi(&b).unwrap(), "{:?} jacobi", which);
        }
    }

    #[test]
    fn make_hydro_single_component() {
        // g^{11,1} = 1, b = 0 (d = n = 1) gives {u_λ u} = λ
        let dims = Dims::new(1, 1).unwrap();
        let mut h = HydroData::zero(dims);
        h.set_g(0, 0, 0, ScalarExpr::one());
        let b = make_hydro(&h);
        assert_eq!(b.entry(0, 0), &LambdaPoly::lambda_var(dims, 0));
        let sys = mokhov_conditions(&h);
        assert!(sys.is_empty());
    }

    #[test]
    fn mokhov_detects_nonpoisson_scalar_metric() {
        // g^{11,1} = u, b = 0 (d = n = 1): ∂g/∂u = 1 ≠ 2b = 0
        let dims = Dims::new(1, 1).unwrap();
        let mut h = HydroData::zero(dims);
        h.set_g(0, 0, 0, ScalarExpr::base(0));
        let sys = mokhov_conditions(&h);
        assert!(!sys.is_empty());
    }

    #[test]
    fn mokhov_vanishes_on_catalog_data() {
        for which in [NormalForm::P1, NormalForm::P2, NormalForm::LiePoisson] {
            let h = normal_form_data(which, d22()).unwrap();
            let sys = mokhov_conditions(&h);
            assert!(sys.is_empty(), "{:?}: {:?}", which, sys.eqs);
        }
    }

    #[test]
    fn ansatz_counts_108() {
        let (bracket, ans) = deformation_ansatz(d22());
        assert_eq!(ans.free_function_count(), 108);
        assert!(bracket.is_homogeneous_of(2));
        // round-trip through table extraction
        let back = DeformationAnsatz::from_bracket(&bracket).unwrap();
        assert_eq!(back.bracket(), bracket);
    }

    #[test]
    fn ansatz_c_symmetry_by_construction() {
        let ans = DeformationAnsatz::generic(d22());
        assert_eq!(ans.get_c(0, 1, 1, 0, 0, 1), ans.get_c(1, 0, 0, 1, 0, 1));
        assert_eq!(ans.get_a(0, 1, 1, 0), ans.get_a(1, 0, 1, 0));
        assert_eq!(ans.get_d(1, 0, 1, 0, 0), ans.get_d(0, 1, 1, 0, 0));
    }

    #[test]
    fn skew_solving_leaves_43() {
        let ans = DeformationAnsatz::generic(d22());
        let sys = skew_deformation_conditions(&ans);
        let keep: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
        let elim = eliminate_functions(&sys, &keep).unwrap();
        assert!(
            elim.residual.is_empty(),
            "skew system must be purely algebraic: {:?}",
            elim.residual.eqs
        );
        assert_eq!(108 - elim.solved.len(), 43);
    }

    #[test]
    fn tilde_bracket_is_skew_identically() {
        let ans = apply_tilde(d22(), &BTreeMap::new()).unwrap();
        assert_eq!(ans.function_names().len(), 43);
        let bracket = ans.bracket();
        assert!(is_skew(&bracket));
        assert!(bracket.is_homogeneous_of(2));
        // skew conditions on the generic ansatz vanish under the tilde form
        let generic = DeformationAnsatz::generic(d22());
        let sys = skew_deformation_conditions(&generic);
        let mut subst = Subst::new();
        let tilde = apply_tilde(d22(), &BTreeMap::new()).unwrap();
        for ((a, b, i, j), v) in &tilde.a {
            subst.assign_func(&ansatz_name_a(*a, *b, *i, *j), v.clone());
        }
        for ((a, b, l, i, j), v) in &tilde.b {
            subst.assign_func(&ansatz_name_b(*a, *b, *l, *i, *j), v.clone());
        }
        for ((a, l, b, m, i, j), v) in &tilde.c {
            subst.assign_func(&ansatz_name_c(*a, *l, *b, *m, *i, *j), v.clone());
        }
        for ((a, b, l, i, j), v) in &tilde.d {
            subst.assign_func(&ansatz_name_d(*a, *b, *l, *i, *j), v.clone());
        }
        for e in sys.substituted(&subst).unwrap() {
            assert!(e.is_zero(), "residual {:?}", e);
        }
        // all tildes zero gives the zero bracket
        let mut zeros = BTreeMap::new();
        for name in tilde_names() {
            zeros.insert(name, ScalarExpr::zero());
        }
        let zb = apply_tilde(d22(), &zeros).unwrap().bracket();
        assert!(zb.is_zero());
    }

    #[test]
    fn zero_jet_entry_rejected() {
        // a bracket entry with a second-order jet is not hydrodynamic
        let dims = d22();
        let mut b = GeneratorBracket::zero(dims);
        b.set_entry(
            0,
            0,
            LambdaPoly::from_diff(DiffPoly::jet(dims, 0, MultiIndex::from_slice(&[2, 0]))),
        );
        assert!(matches!(
            HydroData::from_bracket(&b),
            Err(PvaError::NotHydrodynamic)
        ));
    }
}
