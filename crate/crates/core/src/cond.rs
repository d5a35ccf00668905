//! Condition systems: finite sets of scalar equations (`= 0`) in the jets of
//! unknown functions, produced by coefficient collection on bracket
//! residuals, plus the linear-algebra toolkit used to solve, reduce and
//! compare them (function elimination, prolongation, compatibility
//! conditions, and zero-set sampling).

use crate::atom::Atom;
use crate::error::PvaError;
use crate::gauss::GRat;
use crate::lambda::LambdaPoly;
use crate::sample;
use crate::scalar::{Mono, Poly, ScalarExpr, Subst};
use std::collections::{BTreeMap, BTreeSet};

/// A finite system of equations `e = 0`, each a canonical scalar expression
/// in unknown-function jets (and base variables / constants). Equations are
/// stored with denominators cleared, scaled to leading coefficient +1, and
/// deduplicated.
#[derive(Clone, Debug)]
pub struct ConditionSystem {
    pub eqs: Vec<ScalarExpr>,
    pub unknowns: BTreeSet<String>,
}

impl ConditionSystem {
    pub fn new(unknowns: impl IntoIterator<Item = String>) -> Self {
        ConditionSystem {
            eqs: Vec::new(),
            unknowns: unknowns.into_iter().collect(),
        }
    }

    /// Canonicalize one raw condition: clear denominators, make monic.
    fn canon(e: &ScalarExpr) -> Option<ScalarExpr> {
        if e.is_zero() {
            return None;
        }
        let cleared = ScalarExpr::from_ratio(e.num().clone(), Poly::one()).unwrap();
        Some(cleared.monic())
    }

    pub fn push(&mut self, e: ScalarExpr) {
        if let Some(c) = Self::canon(&e) {
            if !self.eqs.contains(&c) {
                self.eqs.push(c);
            }
        }
    }

    pub fn extend(&mut self, it: impl IntoIterator<Item = ScalarExpr>) {
        for e in it {
            self.push(e);
        }
    }

    /// Append every scalar coefficient of a λ-polynomial residual (one per
    /// `λ^N μ^M ×` jet-monomial bucket), in sorted bucket order.
    pub fn collect_lambda(&mut self, residual: &LambdaPoly) {
        let mut bucket: Vec<ScalarExpr> = Vec::new();
        for (_, dp) in residual.terms() {
            for (_, c) in dp.terms() {
                bucket.push(c.clone());
            }
        }
        self.extend(bucket);
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    /// Sort equations canonically (size, then expression order).
    pub fn sort(&mut self) {
        self.eqs.sort_by(|a, b| {
            (a.num().terms.len(), format!("{:?}", a)).cmp(&(b.num().terms.len(), format!("{:?}", b)))
        });
    }

    /// All jets of the designated unknowns appearing in the system.
    pub fn unknown_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for e in &self.eqs {
            for a in e.atoms() {
                if let Some(name) = a.func_name() {
                    if self.unknowns.contains(name) {
                        out.insert(a);
                    }
                }
            }
        }
        out
    }

    /// Maximal derivative order of any unknown jet in the system.
    pub fn max_unknown_order(&self) -> u32 {
        self.unknown_atoms()
            .iter()
            .map(|a| match a {
                Atom::Jet(_, d) => d.order(),
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Substitute an assignment; returns the per-equation results without
    /// requiring coverage of every unknown.
    pub fn substituted(&self, subst: &Subst) -> Result<Vec<ScalarExpr>, PvaError> {
        self.eqs.iter().map(|e| e.substitute(subst)).collect()
    }

    /// Per-equation residual report after substituting an assignment that
    /// must cover every unknown of the system.
    pub fn verify_assignment(&self, subst: &Subst) -> Result<Vec<ScalarExpr>, PvaError> {
        for name in &self.unknowns {
            let used = self
                .eqs
                .iter()
                .any(|e| e.atoms().iter().any(|a| a.func_name() == Some(name)));
            if used && !subst.has_func(name) {
                return Err(PvaError::IncompleteAssignment { name: name.clone() });
            }
        }
        self.substituted(subst)
    }

    /// Formal total derivatives of every equation with respect to the base
    /// variables, keeping unknown-jet orders at or below `cap`. The original
    /// equations are included.
    pub fn prolong(&self, n_base: usize, cap: u32) -> ConditionSystem {
        let mut out = ConditionSystem::new(self.unknowns.iter().cloned());
        let mut frontier: Vec<ScalarExpr> = Vec::new();
        for e in &self.eqs {
            out.push(e.clone());
            frontier.push(e.clone());
        }
        loop {
            let mut next = Vec::new();
            for e in &frontier {
                let order = max_jet_order_of(e, &self.unknowns);
                if order >= cap {
                    continue;
                }
                for v in 0..n_base {
                    let de = e.base_partial(v);
                    if let Some(c) = Self::canon(&de) {
                        if !out.eqs.contains(&c) {
                            out.eqs.push(c.clone());
                            next.push(c);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out
    }
}

fn max_jet_order_of(e: &ScalarExpr, unknowns: &BTreeSet<String>) -> u32 {
    e.atoms()
        .iter()
        .filter_map(|a| match a {
            Atom::Jet(name, d) if unknowns.contains(name.as_ref()) => Some(d.order()),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// Decomposition of an equation as `Σ coeff(col) · col + constant = 0`,
/// linear in the designated unknown-jet atoms.
#[derive(Clone, Debug)]
pub struct LinearForm {
    pub coeffs: BTreeMap<Atom, ScalarExpr>,
    pub constant: ScalarExpr,
}

/// Split `e` into a form linear in the jets of `unknowns`. Errors when some
/// monomial is nonlinear in them or a denominator involves them.
pub fn linear_form(e: &ScalarExpr, unknowns: &BTreeSet<String>) -> Result<LinearForm, PvaError> {
    let is_unknown = |a: &Atom| a.func_name().map_or(false, |n| unknowns.contains(n));
    if e.den().atoms().iter().any(is_unknown) {
        return Err(PvaError::NonLinearSystem(
            "denominator involves unknown jets".into(),
        ));
    }
    let den_inv = ScalarExpr::from_ratio(Poly::one(), e.den().clone()).unwrap();
    let mut coeffs: BTreeMap<Atom, Poly> = BTreeMap::new();
    let mut constant = Poly::zero();
    for (m, c) in &e.num().terms {
        let unknown_factors: Vec<(Atom, u32)> = m
            .0
            .iter()
            .filter(|(a, _)| is_unknown(a))
            .map(|(a, e)| (a.clone(), *e))
            .collect();
        match unknown_factors.len() {
            0 => {
                constant = &constant
                    + &Poly {
                        terms: vec![(m.clone(), c.clone())],
                    }
            }
            1 if unknown_factors[0].1 == 1 => {
                let a = unknown_factors[0].0.clone();
                let rest = m.checked_div(&Mono::atom(a.clone())).unwrap();
                let entry = coeffs.entry(a).or_insert_with(Poly::zero);
                *entry = &*entry
                    + &Poly {
                        terms: vec![(rest, c.clone())],
                    };
            }
            _ => {
                return Err(PvaError::NonLinearSystem(format!(
                    "monomial {:?} is nonlinear in the unknowns",
                    m
                )))
            }
        }
    }
    Ok(LinearForm {
        coeffs: coeffs
            .into_iter()
            .map(|(a, p)| {
                (
                    a,
                    &ScalarExpr::from_ratio(p, Poly::one()).unwrap() * &den_inv,
                )
            })
            .collect(),
        constant: &ScalarExpr::from_ratio(constant, Poly::one()).unwrap() * &den_inv,
    })
}

/// Result of eliminating unknown functions from a condition system by linear
/// substitution.
#[derive(Clone, Debug)]
pub struct FunctionElimination {
    /// Solved functions, in elimination order, fully back-substituted so each
    /// right-hand side involves only retained functions.
    pub solved: Vec<(String, ScalarExpr)>,
    /// Conditions (current, reduced forms) that were used up by solving.
    pub consumed: Vec<ScalarExpr>,
    /// Conditions left over after all substitutions (the residual system).
    pub residual: ConditionSystem,
    /// Unknowns never eliminated.
    pub free: BTreeSet<String>,
}

/// Repeatedly pick a condition containing an order-0 jet of an eliminable
/// function linearly (with no other jets of that function), solve for it and
/// substitute everywhere, chaining through derivatives. When no condition
/// qualifies, one round of sparse row reduction over the jet atoms combines
/// conditions until an order-0 occurrence is isolated. `keep` lists the
/// functions that must never be eliminated; the pivot preference (plain
/// constant coefficients, then small conditions) matches solved tables
/// obtained "by direct inspection".
pub fn eliminate_functions(
    sys: &ConditionSystem,
    keep: &BTreeSet<String>,
) -> Result<FunctionElimination, PvaError> {
    // direct pass first: it reproduces tables found "by direct inspection"
    let direct = eliminate_once(sys, keep, false)?;
    if elimination_complete(&direct, sys, keep) {
        return Ok(direct);
    }
    // some functions only occur in combinations; reduce the pristine system
    // first, then eliminate again
    let reduced = eliminate_once(sys, keep, true)?;
    if elimination_complete(&reduced, sys, keep)
        || reduced.solved.len() >= direct.solved.len()
    {
        Ok(reduced)
    } else {
        Ok(direct)
    }
}

fn elimination_complete(
    r: &FunctionElimination,
    sys: &ConditionSystem,
    keep: &BTreeSet<String>,
) -> bool {
    r.residual.eqs.iter().all(|e| {
        e.atoms().iter().all(|a| match a.func_name() {
            Some(n) => {
                !sys.unknowns.contains(n) || keep.contains(n) || !r.free.contains(n)
            }
            None => true,
        })
    })
}

fn eliminate_once(
    sys: &ConditionSystem,
    keep: &BTreeSet<String>,
    reduce_first: bool,
) -> Result<FunctionElimination, PvaError> {
    let mut work: Vec<ScalarExpr> = if reduce_first {
        if std::env::var_os("PVAKIT_TRACE").is_some() {
            eprintln!("[elim] row-reduction round ({} conditions)", sys.eqs.len());
        }
        rref_conditions(&sys.eqs, &sys.unknowns, keep, &BTreeSet::new())?
    } else {
        sys.eqs.clone()
    };
    let mut solved: Vec<(String, ScalarExpr)> = Vec::new();
    let mut consumed: Vec<ScalarExpr> = Vec::new();
    let mut eliminated: BTreeSet<String> = BTreeSet::new();
    greedy_pass(
        sys,
        keep,
        &mut work,
        &mut solved,
        &mut consumed,
        &mut eliminated,
    )?;

    let mut residual = ConditionSystem::new(sys.unknowns.iter().cloned());
    residual.extend(work.into_iter().filter(|e| !e.is_zero()));
    residual.sort();
    let free: BTreeSet<String> = sys
        .unknowns
        .iter()
        .filter(|n| !eliminated.contains(*n))
        .cloned()
        .collect();
    Ok(FunctionElimination {
        solved,
        consumed,
        residual,
        free,
    })
}

fn greedy_pass(
    sys: &ConditionSystem,
    keep: &BTreeSet<String>,
    work: &mut Vec<ScalarExpr>,
    solved: &mut Vec<(String, ScalarExpr)>,
    consumed: &mut Vec<ScalarExpr>,
    eliminated: &mut BTreeSet<String>,
) -> Result<bool, PvaError> {
    let mut progress = false;
    loop {
        // candidate: (cost, eq index, function name)
        let mut best: Option<(u64, usize, String)> = None;
        for (ei, e) in work.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let atoms = e.atoms();
            let mut per_func: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
            for a in &atoms {
                if let Atom::Jet(name, _) = a {
                    if sys.unknowns.contains(name.as_ref()) {
                        per_func.entry(name.as_ref()).or_default().push(a);
                    }
                }
            }
            let unknown_atom_count: usize = per_func.values().map(|v| v.len()).sum();
            for (name, jets) in &per_func {
                if keep.contains(*name) || eliminated.contains(*name) {
                    continue;
                }
                // only the plain order-0 jet may appear, exactly linearly
                if jets.len() != 1 {
                    continue;
                }
                let Atom::Jet(_, d) = jets[0] else { unreachable!() };
                if !d.is_zero() {
                    continue;
                }
                let Some(coeff) = linear_only_in(e, jets[0]) else {
                    continue;
                };
                let coeff_const = coeff.as_grat().is_some();
                let cost = (if coeff_const { 0u64 } else { 1 << 40 })
                    + ((unknown_atom_count as u64) << 20)
                    + e.num().terms.len() as u64;
                if best.as_ref().map_or(true, |(c, _, _)| cost < *c) {
                    best = Some((cost, ei, name.to_string()));
                }
            }
        }
        let Some((_, ei, name)) = best else {
            return Ok(progress);
        };
        let e = work[ei].clone();
        // e = coeff*T + rest  =>  T = -rest/coeff
        let only: BTreeSet<String> = BTreeSet::from([name.clone()]);
        let lf = linear_form(&e, &only)?;
        debug_assert_eq!(lf.coeffs.len(), 1);
        let (atom, coeff) = lf.coeffs.iter().next().unwrap();
        debug_assert!(matches!(atom, Atom::Jet(_, d) if d.is_zero()));
        let value = (-&lf.constant).div(coeff)?;
        consumed.push(e);
        let mut subst = Subst::new();
        subst.assign_func(&name, value.clone());
        let mentions = |e: &ScalarExpr| {
            e.atoms()
                .iter()
                .any(|a| a.func_name() == Some(name.as_str()))
        };
        for w in work.iter_mut() {
            if mentions(w) {
                let s = w.substitute(&subst)?;
                *w = ConditionSystem::canon(&s).unwrap_or_else(ScalarExpr::zero);
            }
        }
        for (_, v) in solved.iter_mut() {
            if mentions(v) {
                *v = v.substitute(&subst)?;
            }
        }
        if std::env::var_os("PVAKIT_TRACE").is_some() {
            eprintln!("[elim] solved {} ({} conditions live)", name, work.iter().filter(|w| !w.is_zero()).count());
        }
        solved.push((name.clone(), value));
        eliminated.insert(name);
        progress = true;
    }
}

/// Sparse fraction-free row reduction of a linear condition set over its
/// unknown-jet atoms. Columns are ordered so that order-0 atoms of
/// still-eliminable functions are pivoted first, exposing solvable
/// occurrences that only exist as linear combinations of the given
/// conditions. Rows that do not mention any eliminable function pass through
/// untouched.
fn rref_conditions(
    eqs: &[ScalarExpr],
    unknowns: &BTreeSet<String>,
    keep: &BTreeSet<String>,
    eliminated: &BTreeSet<String>,
) -> Result<Vec<ScalarExpr>, PvaError> {
    let eligible = |name: &str| {
        unknowns.contains(name) && !keep.contains(name) && !eliminated.contains(name)
    };
    let mut inert: Vec<ScalarExpr> = Vec::new();
    let mut active: Vec<&ScalarExpr> = Vec::new();
    for e in eqs {
        if e.is_zero() {
            continue;
        }
        if e.atoms().iter().any(|a| a.func_name().map_or(false, &eligible)) {
            active.push(e);
        } else {
            inert.push(e.clone());
        }
    }

    // column universe: jets of still-eliminable functions only; everything
    // else (free-function jets) rides along in an inert tail per row
    let mut atoms: BTreeSet<Atom> = BTreeSet::new();
    for e in &active {
        for a in e.atoms() {
            if let Some(n) = a.func_name() {
                if eligible(n) {
                    atoms.insert(a);
                }
            }
        }
    }
    let mut cols: Vec<Atom> = atoms.into_iter().collect();
    let col_rank = |a: &Atom| -> (u8, u32) {
        let Atom::Jet(_, d) = a else { unreachable!() };
        if d.is_zero() {
            (0, 0)
        } else {
            (1, d.order())
        }
    };
    cols.sort_by(|a, b| col_rank(a).cmp(&col_rank(b)).then_with(|| a.cmp(b)));
    let index: BTreeMap<Atom, usize> =
        cols.iter().cloned().enumerate().map(|(k, a)| (a, k)).collect();

    struct Row {
        coeffs: BTreeMap<usize, ScalarExpr>,
        tail: ScalarExpr,
    }
    let elig_names: BTreeSet<String> = unknowns
        .iter()
        .filter(|n| eligible(n))
        .cloned()
        .collect();
    let mut rows: Vec<Row> = Vec::new();
    for e in active {
        let lf = linear_form(e, &elig_names)?;
        let coeffs: BTreeMap<usize, ScalarExpr> = lf
            .coeffs
            .into_iter()
            .map(|(a, c)| (index[&a], c))
            .collect();
        rows.push(Row {
            coeffs,
            tail: lf.constant,
        });
    }
    if std::env::var_os("PVAKIT_TRACE").is_some() {
        eprintln!("[rref] {} active rows, {} columns", rows.len(), cols.len());
    }

    let ncols = cols.len();
    let mut used: Vec<bool> = vec![false; rows.len()];
    for col in 0..ncols {
        let Some(r) = (0..rows.len())
            .filter(|&r| !used[r] && rows[r].coeffs.contains_key(&col))
            .min_by_key(|&r| {
                let c = &rows[r].coeffs[&col];
                (
                    if c.as_grat().is_some() {
                        0
                    } else if c.num().terms.len() == 1 && c.den().is_constant() {
                        1
                    } else {
                        2
                    },
                    rows[r].coeffs.len(),
                    c.num().terms.len(),
                )
            })
        else {
            continue;
        };
        used[r] = true;
        // normalize the pivot row so the pivot becomes 1
        let pv_inv = rows[r].coeffs[&col].inv()?;
        let pcoeffs: BTreeMap<usize, ScalarExpr> = rows[r]
            .coeffs
            .iter()
            .map(|(k, v)| (*k, v * &pv_inv))
            .collect();
        let ptail = &rows[r].tail * &pv_inv;
        rows[r].coeffs = pcoeffs.clone();
        rows[r].tail = ptail.clone();
        for rr in 0..rows.len() {
            if rr == r || !rows[rr].coeffs.contains_key(&col) {
                continue;
            }
            let f = rows[rr].coeffs[&col].clone();
            for (k, v) in &pcoeffs {
                let delta = &f * v;
                let entry = rows[rr].coeffs.entry(*k).or_insert_with(ScalarExpr::zero);
                *entry = &*entry - &delta;
                if entry.is_zero() {
                    rows[rr].coeffs.remove(k);
                }
            }
            let delta = &f * &ptail;
            rows[rr].tail = &rows[rr].tail - &delta;
        }
    }

    let mut out = inert;
    for row in rows {
        if row.coeffs.is_empty() && row.tail.is_zero() {
            continue;
        }
        let mut e = row.tail;
        for (k, v) in row.coeffs {
            e = &e + &(&v * &ScalarExpr::atom(cols[k].clone()));
        }
        if let Some(c) = ConditionSystem::canon(&e) {
            out.push(c);
        }
    }
    Ok(out)
}

/// The coefficient of `atom` when `e` is linear in it and contains no other
/// jet of the same function; `None` otherwise.
fn linear_only_in(e: &ScalarExpr, atom: &Atom) -> Option<ScalarExpr> {
    let name = atom.func_name()?;
    let mut coeff = Poly::zero();
    for (m, c) in &e.num().terms {
        let deg = m.degree_of(atom);
        let others = m
            .0
            .iter()
            .any(|(a, _)| a != atom && a.func_name() == Some(name));
        if others || deg > 1 {
            return None;
        }
        if deg == 1 {
            let rest = m.checked_div(&Mono::atom(atom.clone())).unwrap();
            coeff = &coeff
                + &Poly {
                    terms: vec![(rest, c.clone())],
                };
        }
    }
    if e.den().atoms().iter().any(|a| a.func_name() == Some(name)) {
        return None;
    }
    if coeff.is_zero() {
        None
    } else {
        ScalarExpr::from_ratio(coeff, e.den().clone()).ok()
    }
}

/// Sparse linear system over the scalar field: rows `Σ coeff·col = rhs`.
#[derive(Clone, Debug)]
pub struct LinSys {
    pub cols: Vec<Atom>,
    pub rows: Vec<(Vec<ScalarExpr>, ScalarExpr)>,
}

impl LinSys {
    /// Build from equations `Σ coeff·unknown-jet + constant = 0`, moving the
    /// constant to the right-hand side.
    pub fn from_conditions(
        eqs: &[ScalarExpr],
        unknowns: &BTreeSet<String>,
    ) -> Result<LinSys, PvaError> {
        let mut colset: BTreeSet<Atom> = BTreeSet::new();
        let forms: Vec<LinearForm> = eqs
            .iter()
            .map(|e| linear_form(e, unknowns))
            .collect::<Result<_, _>>()?;
        for f in &forms {
            colset.extend(f.coeffs.keys().cloned());
        }
        let cols: Vec<Atom> = colset.into_iter().collect();
        let rows = forms
            .into_iter()
            .map(|f| {
                let row: Vec<ScalarExpr> = cols
                    .iter()
                    .map(|c| f.coeffs.get(c).cloned().unwrap_or_else(ScalarExpr::zero))
                    .collect();
                (row, -&f.constant)
            })
            .collect();
        Ok(LinSys { cols, rows })
    }

    /// Gaussian elimination over the scalar field.
    pub fn row_reduce(&self) -> LinSys {
        let mut rows = self.rows.clone();
        let ncols = self.cols.len();
        let mut pivot_row = 0;
        for col in 0..ncols {
            let Some(prow) = (pivot_row..rows.len())
                .filter(|&r| !rows[r].0[col].is_zero())
                .min_by_key(|&r| {
                    let c = &rows[r].0[col];
                    (
                        if c.as_grat().is_some() { 0 } else { 1 },
                        c.num().terms.len() + c.den().terms.len(),
                    )
                })
            else {
                continue;
            };
            rows.swap(pivot_row, prow);
            let pv = rows[pivot_row].0[col].clone();
            let pv_inv = pv.inv().unwrap();
            for c in 0..ncols {
                rows[pivot_row].0[c] = &rows[pivot_row].0[c] * &pv_inv;
            }
            rows[pivot_row].1 = &rows[pivot_row].1 * &pv_inv;
            for r in 0..rows.len() {
                if r == pivot_row || rows[r].0[col].is_zero() {
                    continue;
                }
                let factor = rows[r].0[col].clone();
                for c in 0..ncols {
                    let delta = &factor * &rows[pivot_row].0[c];
                    rows[r].0[c] = &rows[r].0[c] - &delta;
                }
                let delta = &factor * &rows[pivot_row].1;
                rows[r].1 = &rows[r].1 - &delta;
            }
            pivot_row += 1;
            if pivot_row == rows.len() {
                break;
            }
        }
        LinSys {
            cols: self.cols.clone(),
            rows,
        }
    }

    /// Rows reading `0 = rhs` with `rhs ≠ 0` after reduction.
    pub fn obstructions(&self) -> Vec<ScalarExpr> {
        self.rows
            .iter()
            .filter(|(row, rhs)| row.iter().all(|c| c.is_zero()) && !rhs.is_zero())
            .map(|(_, rhs)| rhs.clone())
            .collect()
    }
}

/// Compatibility conditions of an inhomogeneous linear system for unknown
/// functions: prolong the equations up to `jet_cap` and eliminate every jet
/// of the `eliminate` functions; whatever relations remain among the
/// right-hand sides are the obstructions to solvability.
pub fn compatibility_conditions(
    sys: &ConditionSystem,
    eliminate: &BTreeSet<String>,
    n_base: usize,
    jet_cap: u32,
) -> Result<ConditionSystem, PvaError> {
    let prolonged = sys.prolong(n_base, jet_cap);
    let linsys = LinSys::from_conditions(&prolonged.eqs, eliminate)?;
    let reduced = linsys.row_reduce();
    let mut out = ConditionSystem::new(
        sys.unknowns
            .iter()
            .filter(|u| !eliminate.contains(*u))
            .cloned(),
    );
    out.extend(reduced.obstructions());
    out.sort();
    Ok(out)
}

/// Specialize every non-unknown atom (base variables, constants) at a seeded
/// random rational point, turning each equation into a GRat-linear row over
/// the unknown-jet atoms.
fn specialize_rows(
    eqs: &[ScalarExpr],
    unknowns: &BTreeSet<String>,
    cols: &[Atom],
    seed: u64,
) -> Result<Vec<Vec<GRat>>, PvaError> {
    let mut rows = Vec::with_capacity(eqs.len());
    for e in eqs {
        let lf = linear_form(e, unknowns)?;
        if !lf.constant.is_zero() {
            return Err(PvaError::NonLinearSystem(
                "inhomogeneous term in homogeneous sampling".into(),
            ));
        }
        let mut row = Vec::with_capacity(cols.len());
        for c in cols {
            let coeff = lf.coeffs.get(c).cloned().unwrap_or_else(ScalarExpr::zero);
            row.push(sample::random_eval_with(
                &coeff,
                seed,
                sample::DEFAULT_RETRIES,
            )?);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn grat_rank(mut rows: Vec<Vec<GRat>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv();
        for c in col..ncols {
            rows[rank][c] = &rows[rank][c] * &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..ncols {
                    let d = &f * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &d;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Outcome of a sampled zero-set comparison of two linear systems.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub seeds_tested: Vec<u64>,
    pub failures: Vec<u64>,
    pub rank_a: usize,
    pub rank_b: usize,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Zero-set equivalence of two systems linear in the unknown jets, checked at
/// seeded random rational points for the non-unknown atoms. Both systems are
/// first prolonged to a common jet order so that differential consequences
/// are compared as well; equality of the row spaces at a sampled point is
/// equality of the solution spaces there, which covers membership in both
/// directions at once.
pub fn zero_set_equivalent(
    a: &ConditionSystem,
    b: &ConditionSystem,
    n_base: usize,
    jet_cap: u32,
    seeds: impl IntoIterator<Item = u64>,
) -> Result<EquivalenceReport, PvaError> {
    let unknowns: BTreeSet<String> = a.unknowns.union(&b.unknowns).cloned().collect();
    let cap = jet_cap
        .max(a.max_unknown_order())
        .max(b.max_unknown_order());
    let pa = a.prolong(n_base, cap);
    let pb = b.prolong(n_base, cap);
    let mut colset: BTreeSet<Atom> = BTreeSet::new();
    for e in pa.eqs.iter().chain(&pb.eqs) {
        for at in e.atoms() {
            if at.func_name().map_or(false, |n| unknowns.contains(n)) {
                colset.insert(at);
            }
        }
    }
    let cols: Vec<Atom> = colset.into_iter().collect();
    let mut report = EquivalenceReport {
        seeds_tested: Vec::new(),
        failures: Vec::new(),
        rank_a: 0,
        rank_b: 0,
    };
    for seed in seeds {
        report.seeds_tested.push(seed);
        let ra = specialize_rows(&pa.eqs, &unknowns, &cols, seed)?;
        let rb = specialize_rows(&pb.eqs, &unknowns, &cols, seed)?;
        let rank_a = grat_rank(ra.clone());
        let rank_b = grat_rank(rb.clone());
        let mut all = ra;
        all.extend(rb);
        let rank_ab = grat_rank(all);
        report.rank_a = rank_a;
        report.rank_b = rank_b;
        if !(rank_a == rank_b && rank_b == rank_ab) {
            report.failures.push(seed);
        }
    }
    Ok(report)
}

/// Exact ℚ(i)-span equality of two polynomial systems in the unknown jets:
/// each equation is a coefficient vector over the union of monomials, and
/// row spaces are compared by rank. Span equality certifies identical zero
/// sets outright.
pub fn span_equivalent(a: &ConditionSystem, b: &ConditionSystem) -> bool {
    let mut monos: BTreeSet<Mono> = BTreeSet::new();
    for e in a.eqs.iter().chain(&b.eqs) {
        debug_assert!(e.den().is_constant());
        for (m, _) in &e.num().terms {
            monos.insert(m.clone());
        }
    }
    let cols: Vec<Mono> = monos.into_iter().collect();
    let to_row = |e: &ScalarExpr| -> Vec<GRat> {
        let map: BTreeMap<&Mono, &GRat> = e.num().terms.iter().map(|(m, c)| (m, c)).collect();
        cols.iter()
            .map(|m| map.get(m).map(|c| (*c).clone()).unwrap_or_else(GRat::zero))
            .collect()
    };
    let ra: Vec<Vec<GRat>> = a.eqs.iter().map(to_row).collect();
    let rb: Vec<Vec<GRat>> = b.eqs.iter().map(to_row).collect();
    let rank_a = grat_rank(ra.clone());
    let rank_b = grat_rank(rb.clone());
    let mut all = ra;
    all.extend(rb);
    let rank_ab = grat_rank(all);
    rank_a == rank_b && rank_b == rank_ab
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi::MultiIndex;

    fn names(ns: &[&str]) -> BTreeSet<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    fn f0(name: &str) -> ScalarExpr {
        ScalarExpr::func0(name, 2)
    }

    fn fj(name: &str, d: &[u16]) -> ScalarExpr {
        ScalarExpr::func(name, MultiIndex::from_slice(d))
    }

    #[test]
    fn canonicalization_dedups_and_scales() {
        let mut sys = ConditionSystem::new(["T".to_string()]);
        let e = f0("T").scale(&GRat::from_int(3));
        sys.push(e.clone());
        sys.push((-&e).clone());
        sys.push(ScalarExpr::zero());
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.eqs[0], f0("T"));
    }

    #[test]
    fn eliminate_simple_chain() {
        // T = p·S, and an equation on T's derivative follows suit:
        // { T − p·S, T_{(0,1)} − W } forces W = p·S_{(0,1)}
        let p = ScalarExpr::base(0);
        let mut sys = ConditionSystem::new(names(&["T", "S", "W"]));
        sys.push(&f0("T") - &(&p * &f0("S")));
        sys.push(&fj("T", &[0, 1]) - &f0("W"));
        let elim = eliminate_functions(&sys, &names(&["S"])).unwrap();
        assert!(elim.residual.is_empty());
        let solved: BTreeMap<_, _> = elim.solved.iter().cloned().collect();
        assert_eq!(solved["T"], &p * &f0("S"));
        assert_eq!(solved["W"], &p * &fj("S", &[0, 1]));
    }

    #[test]
    fn obstruction_detection() {
        // h_pq = 0 and h_pq = c1 are incompatible: obstruction c1
        let c1 = ScalarExpr::atom(Atom::constant("c1"));
        let mut sys = ConditionSystem::new(names(&["h"]));
        sys.push(fj("h", &[1, 1]).clone());
        sys.push(&fj("h", &[1, 1]) - &c1);
        let obs = compatibility_conditions(&sys, &names(&["h"]), 2, 3).unwrap();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs.eqs[0], c1);
    }

    #[test]
    fn compatibility_uses_cross_derivatives() {
        // h_p = A, h_q = B  =>  A_q − B_p = 0
        let mut sys = ConditionSystem::new(names(&["h", "A", "B"]));
        sys.push(&fj("h", &[1, 0]) - &f0("A"));
        sys.push(&fj("h", &[0, 1]) - &f0("B"));
        let obs = compatibility_conditions(&sys, &names(&["h"]), 2, 2).unwrap();
        assert_eq!(obs.len(), 1);
        let expect = ConditionSystem::canon(&(&fj("A", &[0, 1]) - &fj("B", &[1, 0]))).unwrap();
        assert_eq!(obs.eqs[0], expect);
    }

    #[test]
    fn zero_set_sampling_detects_difference() {
        // {T_p = 0} vs {T_p = 0, T_q = 0}
        let mut a = ConditionSystem::new(names(&["T"]));
        a.push(fj("T", &[1, 0]));
        let mut b = ConditionSystem::new(names(&["T"]));
        b.push(fj("T", &[1, 0]));
        b.push(fj("T", &[0, 1]));
        let rep = zero_set_equivalent(&a, &b, 2, 1, 0..5).unwrap();
        assert!(!rep.passed());
        let rep2 = zero_set_equivalent(&a, &a, 2, 1, 0..5).unwrap();
        assert!(rep2.passed());
    }

    #[test]
    fn span_equivalence_on_scaled_system() {
        let mut a = ConditionSystem::new(names(&["T"]));
        a.push(&f0("T") + &fj("T", &[1, 0]));
        let mut b = ConditionSystem::new(names(&["T"]));
        b.push((&f0("T") + &fj("T", &[1, 0])).scale(&GRat::from_frac(-7, 3)));
        assert!(span_equivalent(&a, &b));
        b.push(fj("T", &[0, 1]));
        assert!(!span_equivalent(&a, &b));
    }
}
