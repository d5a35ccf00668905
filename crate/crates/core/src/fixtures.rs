//! Reference data transcribed from published tables: condition systems and
//! solved-parameter tables that the generated computations are compared
//! against. Each fixture ships as a text file in the shared expression
//! grammar; lines whose printed source is suspect (label collisions, broken
//! index symmetry) carry a flag and, where applicable, an alternative
//! reading. The comparison code reports which reading matches the generated
//! result.

use crate::cond::ConditionSystem;
use crate::diff::Dims;
use crate::error::PvaError;
use crate::multi::MultiIndex;
use crate::parse::{parse_scalar, Context};
use crate::print::Names;
use crate::scalar::{ScalarExpr, Subst};
use std::collections::{BTreeMap, BTreeSet};

/// An equation system fixture; flags/alternatives are keyed by 1-based
/// equation index.
#[derive(Clone, Debug)]
pub struct FixtureSystem {
    pub eqs: Vec<ScalarExpr>,
    pub flags: BTreeMap<usize, String>,
    pub alts: BTreeMap<usize, ScalarExpr>,
}

impl FixtureSystem {
    pub fn system(&self) -> ConditionSystem {
        let mut names = BTreeSet::new();
        for e in &self.eqs {
            for a in e.atoms() {
                if let Some(n) = a.func_name() {
                    names.insert(n.to_string());
                }
            }
        }
        let mut sys = ConditionSystem::new(names);
        sys.extend(self.eqs.iter().cloned());
        sys
    }

    /// The system with every flagged equation replaced by its alternative
    /// reading (where one is recorded).
    pub fn system_with_alts(&self) -> ConditionSystem {
        let mut eqs = self.eqs.clone();
        for (idx, alt) in &self.alts {
            eqs[idx - 1] = alt.clone();
        }
        let mut names = BTreeSet::new();
        for e in &eqs {
            for a in e.atoms() {
                if let Some(n) = a.func_name() {
                    names.insert(n.to_string());
                }
            }
        }
        let mut sys = ConditionSystem::new(names);
        sys.extend(eqs);
        sys
    }
}

/// A named-assignment fixture (solved-parameter table).
#[derive(Clone, Debug)]
pub struct FixtureAssign {
    pub entries: Vec<(String, ScalarExpr)>,
    pub flags: BTreeMap<String, String>,
    pub alts: BTreeMap<String, ScalarExpr>,
}

impl FixtureAssign {
    pub fn get(&self, name: &str) -> Option<&ScalarExpr> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    /// Resolve the table transitively: right-hand sides referring to other
    /// assigned names are substituted until only unassigned functions remain.
    /// Entries in `use_alts` take their alternative reading.
    pub fn resolved(
        &self,
        use_alts: &BTreeSet<String>,
    ) -> Result<BTreeMap<String, ScalarExpr>, PvaError> {
        let mut table: BTreeMap<String, ScalarExpr> = BTreeMap::new();
        for (n, v) in &self.entries {
            let v = if use_alts.contains(n) {
                self.alts
                    .get(n)
                    .cloned()
                    .ok_or_else(|| PvaError::Invalid(format!("no alternative for {}", n)))?
            } else {
                v.clone()
            };
            table.insert(n.clone(), v);
        }
        for _round in 0..64 {
            let mut subst = Subst::new();
            for (n, v) in &table {
                subst.assign_func(n, v.clone());
            }
            let mut changed = false;
            let mut next = BTreeMap::new();
            for (n, v) in &table {
                let needs = v
                    .atoms()
                    .iter()
                    .any(|a| a.func_name().map_or(false, |f| f != n && table.contains_key(f)));
                if needs {
                    next.insert(n.clone(), v.substitute(&subst)?);
                    changed = true;
                } else {
                    next.insert(n.clone(), v.clone());
                }
            }
            table = next;
            if !changed {
                return Ok(table);
            }
        }
        Err(PvaError::Invalid(
            "assignment table does not resolve (cyclic references)".into(),
        ))
    }

    pub fn as_subst(&self, use_alts: &BTreeSet<String>) -> Result<Subst, PvaError> {
        let mut subst = Subst::new();
        for (n, v) in self.resolved(use_alts)? {
            subst.assign_func(&n, v);
        }
        Ok(subst)
    }
}

/// One parsed fixture file.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub dims: Dims,
    pub ctx: Context,
    pub systems: BTreeMap<String, FixtureSystem>,
    pub assigns: BTreeMap<String, FixtureAssign>,
}

impl Fixture {
    pub fn system(&self, name: &str) -> &FixtureSystem {
        &self.systems[name]
    }

    pub fn assign(&self, name: &str) -> &FixtureAssign {
        &self.assigns[name]
    }
}

pub fn parse_fixture(name: &str, text: &str) -> Result<Fixture, PvaError> {
    let mut dims = Dims::new(2, 2)?;
    let mut gens: Vec<String> = vec!["u1".into(), "u2".into()];
    let mut systems: BTreeMap<String, FixtureSystem> = BTreeMap::new();
    let mut assigns: BTreeMap<String, FixtureAssign> = BTreeMap::new();
    enum Section {
        None,
        System(String),
        Assign(String),
    }
    let mut section = Section::None;
    let mut ctx = Context::new(dims);

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: &str| PvaError::Parse {
            line: lineno + 1,
            col: 1,
            msg: format!("{} ({})", msg, name),
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("dims:") {
            let parts: Vec<usize> = rest
                .split_whitespace()
                .map(|x| x.parse().unwrap())
                .collect();
            dims = Dims::new(parts[0], parts[1])?;
            ctx = Context::new(dims).with_names(Names { gens: gens.clone() });
            continue;
        }
        if let Some(rest) = line.strip_prefix("generators:") {
            gens = rest.split_whitespace().map(|s| s.to_string()).collect();
            ctx = Context::new(dims).with_names(Names { gens: gens.clone() });
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            let inner = &line[1..line.len() - 1];
            let mut it = inner.split_whitespace();
            match (it.next(), it.next()) {
                (Some("system"), Some(n)) => {
                    section = Section::System(n.to_string());
                    systems.insert(
                        n.to_string(),
                        FixtureSystem {
                            eqs: Vec::new(),
                            flags: BTreeMap::new(),
                            alts: BTreeMap::new(),
                        },
                    );
                }
                (Some("assign"), Some(n)) => {
                    section = Section::Assign(n.to_string());
                    assigns.insert(
                        n.to_string(),
                        FixtureAssign {
                            entries: Vec::new(),
                            flags: BTreeMap::new(),
                            alts: BTreeMap::new(),
                        },
                    );
                }
                _ => return Err(err("bad section header")),
            }
            continue;
        }
        match &section {
            Section::System(n) => {
                let sys = systems.get_mut(n).unwrap();
                if let Some(rest) = line.strip_prefix("eq:") {
                    sys.eqs.push(parse_scalar(rest.trim(), &ctx)?);
                } else if let Some(rest) = line.strip_prefix("flag ") {
                    let (idx, note) = rest
                        .split_once(':')
                        .ok_or_else(|| err("flag needs `index: note`"))?;
                    sys.flags.insert(
                        idx.trim().parse().map_err(|_| err("bad flag index"))?,
                        note.trim().into(),
                    );
                } else if let Some(rest) = line.strip_prefix("alt ") {
                    let (idx, expr) = rest
                        .split_once(':')
                        .ok_or_else(|| err("alt needs `index: expr`"))?;
                    sys.alts.insert(
                        idx.trim().parse().map_err(|_| err("bad alt index"))?,
                        parse_scalar(expr.trim(), &ctx)?,
                    );
                } else {
                    return Err(err("unexpected line in system section"));
                }
            }
            Section::Assign(n) => {
                let asg = assigns.get_mut(n).unwrap();
                if let Some(rest) = line.strip_prefix("set ") {
                    let (name, expr) = rest
                        .split_once('=')
                        .ok_or_else(|| err("set needs `name = expr`"))?;
                    asg.entries
                        .push((name.trim().to_string(), parse_scalar(expr.trim(), &ctx)?));
                } else if let Some(rest) = line.strip_prefix("flag ") {
                    let (name, note) = rest
                        .split_once(':')
                        .ok_or_else(|| err("flag needs `name: note`"))?;
                    asg.flags.insert(name.trim().into(), note.trim().into());
                } else if let Some(rest) = line.strip_prefix("alt ") {
                    let (name, expr) = rest
                        .split_once('=')
                        .ok_or_else(|| err("alt needs `name = expr`"))?;
                    asg.alts
                        .insert(name.trim().to_string(), parse_scalar(expr.trim(), &ctx)?);
                } else {
                    return Err(err("unexpected line in assign section"));
                }
            }
            Section::None => return Err(err("content before any section")),
        }
    }
    Ok(Fixture {
        name: name.to_string(),
        dims,
        ctx,
        systems,
        assigns,
    })
}

macro_rules! fixture_files {
    ($(($name:literal, $file:literal)),* $(,)?) => {
        pub fn list() -> Vec<&'static str> {
            vec![$($name),*]
        }
        pub fn raw(name: &str) -> Option<&'static str> {
            match name {
                $($name => Some(include_str!(concat!("../fixtures/", $file))),)*
                _ => None,
            }
        }
    };
}

fixture_files![
    ("mokhov", "mokhov_d2n2.txt"),
    ("symmetry-p1", "symmetry_p1.txt"),
    ("symmetry-p2", "symmetry_p2.txt"),
    ("symmetry-lp", "symmetry_lp.txt"),
    ("hamiltonian-p1", "hamiltonian_p1.txt"),
    ("hamiltonian-p2", "hamiltonian_p2.txt"),
    ("hamiltonian-lp", "hamiltonian_lp.txt"),
    ("pvaj-p1", "pvaj_p1.txt"),
    ("pvaj-p2", "pvaj_p2.txt"),
    ("pvaj-lp", "pvaj_lp.txt"),
    ("miura-p1", "miura_p1.txt"),
    ("miura-p2", "miura_p2.txt"),
    ("miura-lp", "miura_lp.txt"),
    ("appendix-p1", "appendix_p1.txt"),
    ("appendix-p2", "appendix_p2.txt"),
    ("appendix-lp", "appendix_lp.txt"),
];

pub fn load(name: &str) -> Result<Fixture, PvaError> {
    let text =
        raw(name).ok_or_else(|| PvaError::Invalid(format!("unknown fixture `{}`", name)))?;
    parse_fixture(name, text)
}

// ---------------------------------------------------------------------------
// Programmatic transcriptions: tables whose published form is schematic in
// the indices, instantiated by looping. These are rendered into the shipped
// text files; a test guards that file and transcription agree.

fn g(i: usize, j: usize, alpha: usize) -> ScalarExpr {
    ScalarExpr::func0(&format!("g{}{}_{}", i + 1, j + 1, alpha + 1), 2)
}

fn b(i: usize, j: usize, alpha: usize, k: usize) -> ScalarExpr {
    ScalarExpr::func0(&format!("b{}{}_{}_{}", i + 1, j + 1, alpha + 1, k + 1), 2)
}

fn d_u(e: &ScalarExpr, k: usize) -> ScalarExpr {
    e.base_partial(k)
}

/// The full compatibility conditions on hydrodynamic data for d = n = 2, in
/// the order: metric symmetry, connection compatibility, then the five
/// Jacobi-derived families (cyclic sums written out, Einstein sums over the
/// internal index).
pub fn mokhov_transcription() -> ConditionSystem {
    let n = 2usize;
    let d = 2usize;
    let mut names: BTreeSet<String> = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            for al in 0..d {
                names.insert(format!("g{}{}_{}", i + 1, j + 1, al + 1));
                for k in 0..n {
                    names.insert(format!("b{}{}_{}_{}", i + 1, j + 1, al + 1, k + 1));
                }
            }
        }
    }
    let mut sys = ConditionSystem::new(names);

    // metric symmetry: g^{ijα} = g^{jiα}
    for al in 0..d {
        for i in 0..n {
            for j in (i + 1)..n {
                sys.push(&g(i, j, al) - &g(j, i, al));
            }
        }
    }
    // connection compatibility: ∂g^{ijα}/∂u^k = b^{ijα}_k + b^{jiα}_k
    for i in 0..n {
        for j in 0..n {
            for al in 0..d {
                for k in 0..n {
                    sys.push(&(&d_u(&g(i, j, al), k) - &b(i, j, al, k)) - &b(j, i, al, k));
                }
            }
        }
    }
    // cyclic in (α,β):  Σ (g^{aiα} b^{jkβ}_a − g^{ajβ} b^{ikα}_a) = 0
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for al in 0..d {
                    for be in al..d {
                        let mut e = ScalarExpr::zero();
                        for (x, y) in [(al, be), (be, al)] {
                            for a in 0..n {
                                e = &e + &(&g(a, i, x) * &b(j, k, y, a));
                                e = &e - &(&g(a, j, y) * &b(i, k, x, a));
                            }
                        }
                        sys.push(e);
                    }
                }
            }
        }
    }
    // cyclic in (i,j,k): the same combination
    for al in 0..d {
        for be in 0..d {
            for (i0, j0, k0) in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)] {
                let mut e = ScalarExpr::zero();
                for (i, j, k) in [(i0, j0, k0), (j0, k0, i0), (k0, i0, j0)] {
                    for a in 0..n {
                        e = &e + &(&g(a, i, al) * &b(j, k, be, a));
                        e = &e - &(&g(a, j, be) * &b(i, k, al, a));
                    }
                }
                sys.push(e);
            }
        }
    }
    // cyclic in (α,β) with curvature-type terms
    let m5_block = |i: usize, j: usize, k: usize, r: usize, x: usize, y: usize| {
        let mut e = ScalarExpr::zero();
        for a in 0..n {
            let curv = &d_u(&b(j, k, y, a), r) - &d_u(&b(j, k, y, r), a);
            e = &e + &(&g(a, i, x) * &curv);
            e = &e + &(&b(i, j, x, a) * &b(a, k, y, r));
            e = &e - &(&b(i, k, x, a) * &b(a, j, y, r));
        }
        e
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for r in 0..n {
                    for al in 0..d {
                        for be in al..d {
                            let e =
                                &m5_block(i, j, k, r, al, be) + &m5_block(i, j, k, r, be, al);
                            sys.push(e);
                        }
                    }
                }
            }
        }
    }
    // the mixed-index relation (both sides of the printed equality)
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for r in 0..n {
                    for al in 0..d {
                        for be in 0..d {
                            let mut lhs = ScalarExpr::zero();
                            let mut rhs = ScalarExpr::zero();
                            for a in 0..n {
                                lhs = &lhs + &(&g(a, i, be) * &d_u(&b(j, k, al, r), a));
                                lhs = &lhs - &(&b(i, j, be, a) * &b(a, k, al, r));
                                lhs = &lhs - &(&b(i, k, be, a) * &b(j, a, al, r));
                                rhs = &rhs + &(&g(a, j, al) * &d_u(&b(i, k, be, r), a));
                                rhs = &rhs - &(&b(j, a, al, a) * &b(a, k, be, r));
                                rhs = &rhs - &(&b(j, k, al, a) * &b(i, a, be, r));
                            }
                            sys.push(&lhs - &rhs);
                        }
                    }
                }
            }
        }
    }
    // derivative relation: ∂_s[αβ block] + ∂_r[βα block] + cyclic-(i,j,k)
    // torsion-derivative terms
    for (i0, j0, k0) in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)] {
        for r in 0..n {
            for s in 0..n {
                for al in 0..d {
                    for be in 0..d {
                        let mut e = d_u(&m5_block(i0, j0, k0, r, al, be), s);
                        e = &e + &d_u(&m5_block(i0, j0, k0, s, be, al), r);
                        for (i, j, k) in [(i0, j0, k0), (j0, k0, i0), (k0, i0, j0)] {
                            for a in 0..n {
                                let t1 = &d_u(&b(j, k, al, s), a) - &d_u(&b(j, k, al, a), s);
                                e = &e + &(&b(a, i, be, r) * &t1);
                                let t2 = &d_u(&b(j, k, be, r), a) - &d_u(&b(j, k, be, a), r);
                                e = &e + &(&b(a, i, al, s) * &t2);
                            }
                        }
                        sys.push(e);
                    }
                }
            }
        }
    }
    sys
}

fn a_vf(a: usize, b: usize, i: usize) -> ScalarExpr {
    ScalarExpr::func0(&crate::defo::first_order_name(a, b, i), 2)
}

fn delta(x: usize, y: usize) -> ScalarExpr {
    if x == y {
        ScalarExpr::one()
    } else {
        ScalarExpr::zero()
    }
}

/// First-order symmetry conditions of the first constant normal form, as
/// printed (schematic in the indices, instantiated over the full ranges).
pub fn symmetry_p1_transcription() -> ConditionSystem {
    let n = 2usize;
    let mut names: BTreeSet<String> = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                names.insert(crate::defo::first_order_name(a, b, i));
            }
        }
    }
    let mut sys = ConditionSystem::new(names);
    let dp = |e: &ScalarExpr, l: usize| e.base_partial(l);
    // algebraic family
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let e = &(&(&(&a_vf(a, b, j) * &delta(b, i))
                        + &(&a_vf(b, a, j) * &delta(a, i)))
                        - &(&a_vf(a, b, i) * &delta(b, j)))
                        - &(&a_vf(b, a, i) * &delta(a, j));
                    sys.push(e);
                }
            }
        }
    }
    // first-derivative family
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        let e = &(&(&(&dp(&a_vf(b, l, i), j) * &delta(a, j))
                            - &(&dp(&a_vf(a, j, i), l) * &delta(b, j)))
                            - &(&dp(&a_vf(b, j, i), l) * &delta(a, j)))
                            + &(&dp(&a_vf(b, l, j), i) * &delta(a, i));
                        sys.push(e);
                    }
                }
            }
        }
    }
    // second-derivative family
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        for m in 0..n {
                            let e = &(&(&(&dp(&dp(&a_vf(a, l, i), j), m) * &delta(b, j))
                                + &(&dp(&dp(&a_vf(b, m, i), j), l) * &delta(a, j)))
                                - &(&dp(&dp(&a_vf(a, j, i), l), m) * &delta(b, j)))
                                - &(&dp(&dp(&a_vf(b, j, i), l), m) * &delta(a, j));
                            sys.push(e);
                        }
                    }
                }
            }
        }
    }
    // mixed first-derivative family
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        let e = &(&(&(&dp(&a_vf(a, l, i), j) * &delta(b, j))
                            + &(&dp(&a_vf(b, l, i), j) * &delta(a, j)))
                            - &(&dp(&a_vf(a, j, i), l) * &delta(b, j)))
                            - &(&dp(&a_vf(b, j, i), l) * &delta(a, j));
                        sys.push(e);
                    }
                }
            }
        }
    }
    sys
}

/// Render a programmatic condition system in the fixture file format.
pub fn render_system(title: &str, comment: &str, sys: &ConditionSystem) -> String {
    let names = Names::from_list(&["p", "q"]);
    let mut out = String::new();
    out.push_str(&format!("# {}\n", comment));
    out.push_str("dims: 2 2\ngenerators: p q\n\n");
    out.push_str(&format!("[system {}]\n", title));
    for e in &sys.eqs {
        out.push_str(&format!("eq: {}\n", crate::print::scalar_text(e, &names)));
    }
    out
}

/// The explicit solution family of the first normal form's symmetry system:
/// second derivatives of a potential plus two constants.
pub fn symmetry_p1_solution() -> Vec<(String, ScalarExpr)> {
    let kpp = ScalarExpr::func("K", MultiIndex::from_slice(&[2, 0]));
    let kpq = ScalarExpr::func("K", MultiIndex::from_slice(&[1, 1]));
    let kqq = ScalarExpr::func("K", MultiIndex::from_slice(&[0, 2]));
    let c1 = ScalarExpr::atom(crate::atom::Atom::constant("c1"));
    let c2 = ScalarExpr::atom(crate::atom::Atom::constant("c2"));
    vec![
        ("A11_1".into(), kpp),
        ("A11_2".into(), ScalarExpr::zero()),
        ("A12_1".into(), kpq.clone()),
        ("A12_2".into(), c1),
        ("A21_1".into(), c2),
        ("A21_2".into(), kpq),
        ("A22_1".into(), ScalarExpr::zero()),
        ("A22_2".into(), kqq),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixture_files_parse() {
        for name in list() {
            let f = load(name).unwrap_or_else(|e| panic!("fixture {}: {}", name, e));
            assert!(
                !f.systems.is_empty() || !f.assigns.is_empty(),
                "fixture {} is empty",
                name
            );
        }
    }

    #[test]
    fn generated_fixture_files_match_transcriptions() {
        // the two index-schematic tables are instantiated by code; the
        // shipped files must agree with the transcription exactly
        let mok = load("mokhov").unwrap();
        let code = mokhov_transcription();
        let file = mok.system("mokhov").system();
        assert_eq!(code.eqs, file.eqs, "mokhov fixture file out of date");

        let symp1 = load("symmetry-p1").unwrap();
        let code = symmetry_p1_transcription();
        let file = symp1.system("symmetry-p1").system();
        assert_eq!(code.eqs, file.eqs, "symmetry-p1 fixture file out of date");
    }

    #[test]
    fn assign_resolution_is_transitive() {
        let f = load("appendix-p2").unwrap();
        let table = f.assign("appendix-p2").resolved(&BTreeSet::new()).unwrap();
        for (n, v) in &table {
            for a in v.atoms() {
                if let Some(fname) = a.func_name() {
                    assert!(
                        !table.contains_key(fname) || fname == n,
                        "{} still references {}",
                        n,
                        fname
                    );
                }
            }
        }
    }
}
