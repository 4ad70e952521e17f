//! Executable models.
//!
//! * the standard model `N` ([`standard_eval`]);
//! * the black-hole model `N ∪ {∞}` in its `Q` and `Q+` variants
//!   ([`ninfty_eval`]);
//! * the model of `T`-reduced terms for a [`ReducedSystem`](crate::ReducedSystem)
//!   ([`reduced`]);
//! * its extension by predecessors and an absorbing element ([`ext`]), used
//!   only to spot-check that the reduced-term model extends to a model of `Q`.

pub mod ext;
pub mod reduced;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero as _};
use serde::{Deserialize, Serialize};

use crate::term::{Folded, Term, VarId};

pub use ext::{check_q_axioms_ext, ext_model_ops, ExtElem, ExtOp};
pub use reduced::{check_qforall_axioms, reduced_model_eval, Axiom, AxiomReport, ReducedModel, Violation};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("variable x{0} has no value")]
    Unbound(VarId),
    #[error("model value exceeds the budget of {limit} term nodes")]
    Budget { limit: u64 },
    #[error("malformed element: {0}")]
    Malformed(String),
}

/// Which black-hole model: in `Q`, `0 * ∞ = ∞`; in `Q+`, `0 * ∞ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Q,
    #[serde(rename = "qplus")]
    QPlus,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Q => "q",
            Variant::QPlus => "qplus",
        })
    }
}

/// An element of `N ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Fin(BigUint),
    Infinity,
}

impl ExtNat {
    pub fn fin(n: impl Into<BigUint>) -> ExtNat {
        ExtNat::Fin(n.into())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtNat::Infinity)
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            ExtNat::Fin(n) => Some(n),
            ExtNat::Infinity => None,
        }
    }

    pub fn succ(self) -> ExtNat {
        match self {
            ExtNat::Fin(n) => ExtNat::Fin(n + 1u32),
            ExtNat::Infinity => ExtNat::Infinity,
        }
    }

    pub fn add(self, other: ExtNat) -> ExtNat {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a + b),
            _ => ExtNat::Infinity,
        }
    }

    pub fn mul(self, other: ExtNat, variant: Variant) -> ExtNat {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a * b),
            (ExtNat::Infinity, ExtNat::Fin(b)) if b.is_zero() => ExtNat::Fin(b),
            (ExtNat::Fin(a), ExtNat::Infinity) if a.is_zero() && variant == Variant::QPlus => ExtNat::Fin(a),
            _ => ExtNat::Infinity,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Infinity => f.write_str("∞"),
        }
    }
}

/// Value of `t` in the black-hole model. Finite values are computed in
/// binary, so this is polynomial in `|t|` and the sizes of the inputs.
pub fn ninfty_eval(
    t: &Term,
    valuation: &BTreeMap<VarId, ExtNat>,
    variant: Variant,
) -> Result<ExtNat, ModelError> {
    t.fold(|node: Folded<ExtNat>| {
        Ok(match node {
            Folded::Zero => ExtNat::Fin(BigUint::zero()),
            Folded::Var(v) => valuation.get(&v).cloned().ok_or(ModelError::Unbound(v))?,
            Folded::Succ(a) => a.succ(),
            Folded::Add(a, b) => a.add(b),
            Folded::Mul(a, b) => a.mul(b, variant),
        })
    })
}

/// Value of `t` when every variable is `∞`.
pub fn eval_at_infinity(t: &Term, variant: Variant) -> ExtNat {
    let r: Result<ExtNat, std::convert::Infallible> = t.fold(|node: Folded<ExtNat>| {
        Ok(match node {
            Folded::Zero => ExtNat::Fin(BigUint::zero()),
            Folded::Var(_) => ExtNat::Infinity,
            Folded::Succ(a) => a.succ(),
            Folded::Add(a, b) => a.add(b),
            Folded::Mul(a, b) => a.mul(b, variant),
        })
    });
    match r {
        Ok(v) => v,
        Err(never) => match never {},
    }
}

/// `Some(n)` when `Q` proves `t = n` outright, i.e. when `t` is finite at the
/// all-`∞` valuation.
pub fn constant_fold(t: &Term) -> Option<BigUint> {
    match eval_at_infinity(t, Variant::Q) {
        ExtNat::Fin(n) => Some(n),
        ExtNat::Infinity => None,
    }
}

/// Value of `t` in the standard model.
pub fn standard_eval(t: &Term, valuation: &BTreeMap<VarId, BigUint>) -> Result<BigUint, ModelError> {
    t.fold(|node| {
        Ok(match node {
            Folded::Zero => BigUint::zero(),
            Folded::Var(v) => valuation.get(&v).cloned().ok_or(ModelError::Unbound(v))?,
            Folded::Succ(a) => a + 1u32,
            Folded::Add(a, b) => a + b,
            Folded::Mul(a, b) => a * b,
        })
    })
}

/// All `(k, m)` with `k + m = n`, ascending in `k`.
pub fn decompose_sum(n: &BigUint) -> Vec<(BigUint, BigUint)> {
    let mut out = Vec::new();
    let mut k = BigUint::zero();
    while &k <= n {
        out.push((k.clone(), n - &k));
        k += 1u32;
    }
    out
}

/// One way a product `x * y = n` can hold in a model of the universal
/// fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductBranch {
    /// `x = 0`, with nothing known about `y`.
    LeftZero,
    /// `x = k` and `y = m` with `k * m = n`.
    Factors(BigUint, BigUint),
}

/// The branches of `x * y = n` for `n > 0`: [`ProductBranch::LeftZero`]
/// followed by all factor pairs, ascending in the left factor.
pub fn decompose_prod(n: &BigUint) -> Vec<ProductBranch> {
    let mut out = vec![ProductBranch::LeftZero];
    if n.is_zero() {
        return out;
    }
    let mut small = Vec::new();
    let root = n.sqrt();
    let mut k = BigUint::one();
    while k <= root {
        if (n % &k).is_zero() {
            small.push(k.clone());
        }
        k += 1u32;
    }
    let mut pairs: Vec<(BigUint, BigUint)> = small.iter().map(|k| (k.clone(), n / k)).collect();
    for k in small.iter().rev() {
        let m = n / k;
        if &m != k {
            pairs.push((m, k.clone()));
        }
    }
    out.extend(pairs.into_iter().map(|(k, m)| ProductBranch::Factors(k, m)));
    out
}

pub(crate) fn to_usize(n: &BigUint, limit: u64) -> Result<usize, ModelError> {
    match n.to_u64() {
        Some(k) if k <= limit => Ok(k as usize),
        _ => Err(ModelError::Budget { limit }),
    }
}
