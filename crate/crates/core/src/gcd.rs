//! Multivariate polynomial gcd over the Gaussian rationals, by monomial
//! content extraction plus a primitive pseudo-remainder sequence in a chosen
//! main variable. Degrees in this crate stay small, so the classic algorithm
//! is plenty.

use crate::atom::Atom;
use crate::gauss::GRat;
use crate::scalar::{Mono, Poly};
use std::collections::BTreeMap;

/// Gcd normalized to leading coefficient 1 (so it is canonical).
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return monic(b);
    }
    if b.is_zero() {
        return monic(a);
    }
    // monomial arguments: the gcd is the monomial-content gcd
    if a.terms.len() == 1 || b.terms.len() == 1 {
        let g = a.mono_content().gcd(&b.mono_content());
        return Poly {
            terms: vec![(g, GRat::one())],
        };
    }
    let ca = a.mono_content();
    let cb = b.mono_content();
    let gm = ca.gcd(&cb);
    let a1 = a.div_exact(&Poly {
        terms: vec![(ca, GRat::one())],
    });
    let b1 = b.div_exact(&Poly {
        terms: vec![(cb, GRat::one())],
    });
    let gmono = Poly {
        terms: vec![(gm, GRat::one())],
    };
    if a1.is_constant() || b1.is_constant() {
        return monic(&gmono);
    }
    let Some(var) = pick_main_var(&a1, &b1) else {
        return monic(&gmono);
    };
    let g = prs_gcd(&to_univar(&a1, &var), &to_univar(&b1, &var), &var);
    monic(&(&gmono * &g))
}

fn monic(p: &Poly) -> Poly {
    match p.leading() {
        None => Poly::zero(),
        Some((_, c)) => p.scale(&c.inv()),
    }
}

/// Pick an atom occurring in both polynomials, preferring a small maximal
/// degree to keep the remainder sequence short.
fn pick_main_var(a: &Poly, b: &Poly) -> Option<Atom> {
    let aa = a.atoms();
    let bb = b.atoms();
    aa.intersection(&bb)
        .min_by_key(|v| a.degree_in(v).max(b.degree_in(v)))
        .cloned()
}

type UPoly = BTreeMap<u32, Poly>;

fn to_univar(p: &Poly, var: &Atom) -> UPoly {
    let mut out: UPoly = BTreeMap::new();
    for (m, c) in &p.terms {
        let e = m.degree_of(var);
        let rest = if e == 0 {
            m.clone()
        } else {
            m.checked_div(&Mono(smallvec::smallvec![(var.clone(), e)]))
                .unwrap()
        };
        let t = Poly {
            terms: vec![(rest, c.clone())],
        };
        let entry = out.entry(e).or_insert_with(Poly::zero);
        *entry = &*entry + &t;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn from_univar(u: &UPoly, var: &Atom) -> Poly {
    let mut acc = Poly::zero();
    for (e, c) in u {
        let m = Poly {
            terms: vec![(
                if *e == 0 {
                    Mono::one()
                } else {
                    Mono(smallvec::smallvec![(var.clone(), *e)])
                },
                GRat::one(),
            )],
        };
        acc = &acc + &(c * &m);
    }
    acc
}

fn udeg(u: &UPoly) -> u32 {
    u.keys().next_back().copied().unwrap_or(0)
}

fn ulead(u: &UPoly) -> Poly {
    u.values().next_back().cloned().unwrap_or_else(Poly::zero)
}

fn uscale(u: &UPoly, c: &Poly) -> UPoly {
    u.iter()
        .map(|(e, p)| (*e, p * c))
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

fn ushift(u: &UPoly, k: u32) -> UPoly {
    u.iter().map(|(e, p)| (e + k, p.clone())).collect()
}

fn usub(a: &UPoly, b: &UPoly) -> UPoly {
    let mut out = a.clone();
    for (e, p) in b {
        let entry = out.entry(*e).or_insert_with(Poly::zero);
        *entry = &*entry - p;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Pseudo-remainder of `a` by `b` in the main variable.
fn uprem(a: &UPoly, b: &UPoly) -> UPoly {
    let db = udeg(b);
    let lb = ulead(b);
    let mut r = a.clone();
    while !r.is_empty() && udeg(&r) >= db {
        let dr = udeg(&r);
        let lr = ulead(&r);
        // lb * r - lr * x^(dr-db) * b kills the leading term
        r = usub(&uscale(&r, &lb), &uscale(&ushift(b, dr - db), &lr));
        if r.get(&dr).is_some() {
            r.remove(&dr);
        }
    }
    r
}

/// Content of a univariate polynomial: gcd of its coefficients.
fn ucontent(u: &UPoly) -> Poly {
    let mut acc = Poly::zero();
    for c in u.values() {
        acc = poly_gcd(&acc, c);
        if acc.is_constant() && !acc.is_zero() {
            break;
        }
    }
    acc
}

fn uprimitive(u: &UPoly) -> (Poly, UPoly) {
    let c = ucontent(u);
    if c.is_zero() {
        return (Poly::zero(), BTreeMap::new());
    }
    let pp = u
        .iter()
        .map(|(e, p)| (*e, p.div_exact(&c)))
        .collect::<UPoly>();
    (c, pp)
}

fn prs_gcd(a: &UPoly, b: &UPoly, var: &Atom) -> Poly {
    let (ca, mut f) = uprimitive(a);
    let (cb, mut g) = uprimitive(b);
    let content = poly_gcd(&ca, &cb);
    if udeg(&f) < udeg(&g) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = uprem(&f, &g);
        if r.is_empty() {
            break;
        }
        let (_, rp) = uprimitive(&r);
        f = g;
        g = rp;
        if udeg(&g) == 0 {
            // gcd is the content alone
            return content;
        }
    }
    &from_univar(&g, var) * &content
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarExpr;

    fn p() -> Poly {
        Poly::atom(Atom::base(0))
    }

    fn q() -> Poly {
        Poly::atom(Atom::base(1))
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        let a = &(&p() * &p()) - &(&q() * &q());
        let b = &p() - &q();
        let g = poly_gcd(&a, &b);
        assert_eq!(g, b);
    }

    #[test]
    fn gcd_monomials() {
        let a = &(&p() * &p()) * &q();
        let b = &p() * &q();
        assert_eq!(poly_gcd(&a, &b), b);
    }

    #[test]
    fn coprime_gives_constant() {
        let a = &p() + &Poly::one();
        let b = &q() + &Poly::one();
        assert!(poly_gcd(&a, &b).is_constant());
    }

    #[test]
    fn shared_quadratic_factor() {
        // (p+q)^2 * (p - 2q) vs (p+q) * (3p + q)
        let s = &p() + &q();
        let a = &(&s * &s) * &(&p() - &(&Poly::constant(GRat::from_int(2)) * &q()));
        let b = &s * &(&(&Poly::constant(GRat::from_int(3)) * &p()) + &q());
        let g = poly_gcd(&a, &b);
        // monic normalization of p+q is itself
        assert_eq!(g, s);
        let _ = ScalarExpr::from_ratio(a, b).unwrap();
    }
}
