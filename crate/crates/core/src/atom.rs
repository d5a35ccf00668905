//! Atoms of the scalar coefficient ring: base variables (0-jets), named
//! constants, and jets of unknown functions of the base variables.

use crate::multi::MultiIndex;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// An indeterminate of the coefficient ring. The fixed total order
/// (base variables < constants < unknown-function jets, then by name, then by
/// derivative multi-index) pins the canonical form of every expression.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// 0-jet `u^i` of the i-th generator (0-based index).
    Base(u8),
    /// A named constant such as `c1`.
    Const(Arc<str>),
    /// Jet of an unknown function of the base variables: the function name
    /// together with the orders of `∂/∂u^1 … ∂/∂u^n` applied. Jets of the
    /// same name with different derivative indices are independent atoms;
    /// mixed partials commute because the index is a plain multi-index.
    Jet(Arc<str>, MultiIndex),
}

impl Atom {
    pub fn base(i: usize) -> Atom {
        Atom::Base(i as u8)
    }

    pub fn constant(name: &str) -> Atom {
        Atom::Const(Arc::from(name))
    }

    pub fn func(name: &str, deriv: MultiIndex) -> Atom {
        Atom::Jet(Arc::from(name), deriv)
    }

    /// Order-0 jet of an unknown function of `n` base variables.
    pub fn func0(name: &str, n: usize) -> Atom {
        Atom::Jet(Arc::from(name), MultiIndex::zero(n))
    }

    fn rank(&self) -> u8 {
        match self {
            Atom::Base(_) => 0,
            Atom::Const(_) => 1,
            Atom::Jet(..) => 2,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Atom::Base(_))
    }

    pub fn func_name(&self) -> Option<&str> {
        match self {
            Atom::Jet(name, _) => Some(name),
            _ => None,
        }
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (Atom::Base(a), Atom::Base(b)) => a.cmp(b),
            (Atom::Const(a), Atom::Const(b)) => a.cmp(b),
            (Atom::Jet(a, da), Atom::Jet(b, db)) => a.cmp(b).then_with(|| da.cmp(db)),
            _ => unreachable!(),
        })
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Base(i) => write!(f, "u{}", i + 1),
            Atom::Const(name) => write!(f, "{}", name),
            Atom::Jet(name, d) => {
                if d.is_zero() {
                    write!(f, "F[{}]", name)
                } else {
                    write!(f, "F[{};{}]", name, join_u16(&d.0))
                }
            }
        }
    }
}

pub(crate) fn join_u16(xs: &[u16]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
