//! Text rendering of expressions in the shared grammar (round-trippable
//! through the parser), plus display-only LaTeX and machine-readable
//! S-expression emitters.

use crate::atom::Atom;
use crate::diff::{DiffPoly, JetMono, JetVar};
use crate::gauss::GRat;
use crate::lambda::{GeneratorBracket, LKey, LambdaPoly};
use crate::multi::MultiIndex;
use crate::scalar::{Mono, Poly, ScalarExpr};
use num_traits::{One, Signed, Zero};

/// Maps generator indices to display names (`u1..un` by default).
#[derive(Clone, Debug)]
pub struct Names {
    pub gens: Vec<String>,
}

impl Names {
    pub fn default_for(n: usize) -> Names {
        Names {
            gens: (1..=n).map(|k| format!("u{}", k)).collect(),
        }
    }

    pub fn from_list(gens: &[&str]) -> Names {
        Names {
            gens: gens.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn gen_name(&self, i: usize) -> &str {
        &self.gens[i]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g == name)
    }
}

fn multi_index_text(d: &MultiIndex) -> String {
    let parts: Vec<String> = d.0.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn grat_text(c: &GRat) -> String {
    let rat = |r: &num_rational::BigRational| -> String {
        if r.denom().is_one() {
            format!("{}", r.numer())
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    };
    if c.im.is_zero() {
        rat(&c.re)
    } else if c.re.is_zero() {
        if c.im.is_one() {
            "i".into()
        } else if (-&c.im).is_one() {
            "-i".into()
        } else {
            format!("{}*i", rat(&c.im))
        }
    } else {
        let im = if c.im.is_one() {
            "i".into()
        } else if (-&c.im).is_one() {
            "-i".into()
        } else {
            format!("{}*i", rat(&c.im))
        };
        format!(
            "({}{}{})",
            rat(&c.re),
            if c.im.is_positive() || im.starts_with('-') {
                if im.starts_with('-') { "" } else { "+" }
            } else {
                ""
            },
            im
        )
    }
}

pub fn atom_text(a: &Atom, names: &Names) -> String {
    match a {
        Atom::Base(i) => names.gen_name(*i as usize).to_string(),
        Atom::Const(name) => name.to_string(),
        Atom::Jet(name, d) => {
            if d.is_zero() {
                format!("F[{}]", name)
            } else {
                let parts: Vec<String> = d.0.iter().map(|x| x.to_string()).collect();
                format!("F[{}; {}]", name, parts.join(","))
            }
        }
    }
}

fn mono_text(m: &Mono, names: &Names) -> String {
    let mut parts = Vec::new();
    for (a, e) in &m.0 {
        if *e == 1 {
            parts.push(atom_text(a, names));
        } else {
            parts.push(format!("{}^{}", atom_text(a, names), e));
        }
    }
    parts.join("*")
}

fn poly_text(p: &Poly, names: &Names) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms.iter().enumerate() {
        let coeff = grat_text(c);
        let body = if m.is_one() {
            coeff
        } else if c.is_one() {
            mono_text(m, names)
        } else if (-c).is_one() {
            format!("-{}", mono_text(m, names))
        } else {
            format!("{}*{}", coeff, mono_text(m, names))
        };
        if k == 0 {
            out.push_str(&body);
        } else if let Some(rest) = body.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&body);
        }
    }
    out
}

pub fn scalar_text(e: &ScalarExpr, names: &Names) -> String {
    if e.den().as_constant().map_or(false, |c| c.is_one()) {
        poly_text(e.num(), names)
    } else {
        format!("({})/({})", poly_text(e.num(), names), poly_text(e.den(), names))
    }
}

pub fn jet_var_text(v: &JetVar, names: &Names) -> String {
    format!("{}_{}", names.gen_name(v.gen()), multi_index_text(&v.idx))
}

fn jet_mono_text(m: &JetMono, names: &Names) -> String {
    let mut parts = Vec::new();
    for (v, e) in &m.0 {
        if *e == 1 {
            parts.push(jet_var_text(v, names));
        } else {
            parts.push(format!("{}^{}", jet_var_text(v, names), e));
        }
    }
    parts.join("*")
}

pub fn diff_text(p: &DiffPoly, names: &Names) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut pieces = Vec::new();
    for (m, c) in p.terms() {
        if m.is_one() {
            pieces.push(scalar_text(c, names));
        } else if c.is_one() {
            pieces.push(jet_mono_text(m, names));
        } else if (-c).is_one() {
            pieces.push(format!("-{}", jet_mono_text(m, names)));
        } else {
            let ct = scalar_text(c, names);
            let needs_parens = ct.contains('+') || ct.contains(" - ");
            if needs_parens {
                pieces.push(format!("({})*{}", ct, jet_mono_text(m, names)));
            } else {
                pieces.push(format!("{}*{}", ct, jet_mono_text(m, names)));
            }
        }
    }
    pieces.join(" + ")
}

fn lkey_text(k: &LKey) -> String {
    let mut parts = Vec::new();
    for (alpha, &e) in k.lam.0.iter().enumerate() {
        if e == 1 {
            parts.push(format!("l{}", alpha + 1));
        } else if e > 1 {
            parts.push(format!("l{}^{}", alpha + 1, e));
        }
    }
    for (alpha, &e) in k.mu.0.iter().enumerate() {
        if e == 1 {
            parts.push(format!("m{}", alpha + 1));
        } else if e > 1 {
            parts.push(format!("m{}^{}", alpha + 1, e));
        }
    }
    parts.join("*")
}

pub fn lambda_text(l: &LambdaPoly, names: &Names) -> String {
    if l.is_zero() {
        return "0".into();
    }
    let mut pieces = Vec::new();
    let mut terms: Vec<_> = l.terms().collect();
    terms.reverse();
    for (k, p) in terms {
        let kt = lkey_text(k);
        if kt.is_empty() {
            pieces.push(diff_text(p, names));
        } else {
            let pt = diff_text(p, names);
            if pt == "1" {
                pieces.push(kt);
            } else if pt == "-1" {
                pieces.push(format!("-{}", kt));
            } else if pt.contains('+') || pt.contains(" - ") {
                pieces.push(format!("({})*{}", pt, kt));
            } else {
                pieces.push(format!("{}*{}", pt, kt));
            }
        }
    }
    pieces.join(" + ")
}

pub fn bracket_text(b: &GeneratorBracket, names: &Names) -> String {
    let mut out = String::new();
    for ((i, j), e) in b.entries() {
        out.push_str(&format!("{} {} = {}\n", i + 1, j + 1, lambda_text(e, names)));
    }
    out
}

// ---------------------------------------------------------------------------
// LaTeX (display only)

fn atom_latex(a: &Atom, names: &Names) -> String {
    match a {
        Atom::Base(i) => format!("{}", names.gen_name(*i as usize)),
        Atom::Const(name) => {
            if let Some(rest) = name.strip_prefix('c') {
                if rest.chars().all(|ch| ch.is_ascii_digit()) {
                    return format!("c_{{{}}}", rest);
                }
            }
            name.to_string()
        }
        Atom::Jet(name, d) => {
            if d.is_zero() {
                name.to_string()
            } else {
                let parts: Vec<String> = d.0.iter().map(|x| x.to_string()).collect();
                format!("{}_{{({})}}", name, parts.join(","))
            }
        }
    }
}

pub fn scalar_latex(e: &ScalarExpr, names: &Names) -> String {
    let poly = |p: &Poly| -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in p.terms.iter().enumerate() {
            let mut body = String::new();
            if m.is_one() {
                body.push_str(&grat_text(c));
            } else {
                if !c.is_one() {
                    if (-c).is_one() {
                        body.push('-');
                    } else {
                        body.push_str(&grat_text(c));
                        body.push_str("\\,");
                    }
                }
                let factors: Vec<String> = m
                    .0
                    .iter()
                    .map(|(a, e)| {
                        if *e == 1 {
                            atom_latex(a, names)
                        } else {
                            format!("{}^{{{}}}", atom_latex(a, names), e)
                        }
                    })
                    .collect();
                body.push_str(&factors.join("\\,"));
            }
            if k > 0 && !body.starts_with('-') {
                out.push_str(" + ");
            } else if k > 0 {
                out.push(' ');
            }
            out.push_str(&body);
        }
        out
    };
    if e.den().as_constant().map_or(false, |c| c.is_one()) {
        poly(e.num())
    } else {
        format!("\\frac{{{}}}{{{}}}", poly(e.num()), poly(e.den()))
    }
}

pub fn lambda_latex(l: &LambdaPoly, names: &Names) -> String {
    if l.is_zero() {
        return "0".into();
    }
    let mut pieces = Vec::new();
    let mut terms: Vec<_> = l.terms().collect();
    terms.reverse();
    for (key, p) in terms {
        let mut kt = String::new();
        for (alpha, &e) in key.lam.0.iter().enumerate() {
            if e == 1 {
                kt.push_str(&format!("\\lambda_{{{}}}", alpha + 1));
            } else if e > 1 {
                kt.push_str(&format!("\\lambda_{{{}}}^{{{}}}", alpha + 1, e));
            }
        }
        for (alpha, &e) in key.mu.0.iter().enumerate() {
            if e == 1 {
                kt.push_str(&format!("\\mu_{{{}}}", alpha + 1));
            } else if e > 1 {
                kt.push_str(&format!("\\mu_{{{}}}^{{{}}}", alpha + 1, e));
            }
        }
        let mut pt = String::new();
        let mut first = true;
        for (m, c) in p.terms() {
            let mono: Vec<String> = m
                .0
                .iter()
                .map(|(v, e)| {
                    let jet = format!(
                        "{}_{{{}}}",
                        names.gen_name(v.gen()),
                        multi_index_text(&v.idx)
                    );
                    if *e == 1 {
                        jet
                    } else {
                        format!("{}^{{{}}}", jet, e)
                    }
                })
                .collect();
            let coeff = scalar_latex(c, names);
            if !first {
                pt.push_str(" + ");
            }
            first = false;
            if mono.is_empty() {
                pt.push_str(&coeff);
            } else if coeff == "1" {
                pt.push_str(&mono.join("\\,"));
            } else {
                pt.push_str(&format!("({})\\,{}", coeff, mono.join("\\,")));
            }
        }
        if kt.is_empty() {
            pieces.push(pt);
        } else if pt == "1" {
            pieces.push(kt);
        } else {
            pieces.push(format!("\\left({}\\right){}", pt, kt));
        }
    }
    pieces.join(" + ")
}

// ---------------------------------------------------------------------------
// S-expressions (machine interchange)

pub fn scalar_sexpr(e: &ScalarExpr, names: &Names) -> String {
    let poly = |p: &Poly| -> String {
        let mut terms = Vec::new();
        for (m, c) in &p.terms {
            let mut factors = vec![format!("(num {})", grat_text(c))];
            for (a, e) in &m.0 {
                let at = match a {
                    Atom::Base(i) => format!("(gen {})", names.gen_name(*i as usize)),
                    Atom::Const(name) => format!("(const {})", name),
                    Atom::Jet(name, d) => {
                        let parts: Vec<String> = d.0.iter().map(|x| x.to_string()).collect();
                        format!("(jet {} ({}))", name, parts.join(" "))
                    }
                };
                if *e == 1 {
                    factors.push(at);
                } else {
                    factors.push(format!("(pow {} {})", at, e));
                }
            }
            terms.push(format!("(* {})", factors.join(" ")));
        }
        format!("(+ {})", terms.join(" "))
    };
    if e.den().as_constant().map_or(false, |c| c.is_one()) {
        poly(e.num())
    } else {
        format!("(/ {} {})", poly(e.num()), poly(e.den()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::Dims;

    #[test]
    fn scalar_rendering() {
        let names = Names::from_list(&["p", "q"]);
        let p = ScalarExpr::base(0);
        let q = ScalarExpr::base(1);
        let e = &(&p * &p) - &q.scale(&GRat::from_frac(1, 2));
        assert_eq!(scalar_text(&e, &names), "p^2 - 1/2*q");
    }

    #[test]
    fn lambda_rendering() {
        let dims = Dims::new(2, 2).unwrap();
        let names = Names::from_list(&["p", "q"]);
        let b = crate::catalog::normal_form(crate::catalog::NormalForm::LiePoisson, dims).unwrap();
        let t = lambda_text(b.entry(0, 1), &names);
        assert_eq!(t, "-q*l1 + -p*l2 + -q_(1,0)");
    }
}
