//! Closed-form lower bounds on the equivariant covering type.
//!
//! Inputs such as the G-genus, cohomology degrees, or fixed-set dimensions are
//! supplied by the caller. Every evaluator returns a [`BoundReport`] echoing them.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::group::{GroupError, OrbitType, OrbitTypePoset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("degree list is empty")]
    EmptyDegreeList,
    #[error("{m} and {n} are not powers of one prime with m <= n")]
    NotPrimePowers { m: u64, n: u64 },
    #[error("parity violation: {0}")]
    ParityViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("orbit types are not linearly ordered")]
    NotLinearlyOrdered,
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `ct_G(X)`.
    CtG,
    /// `ct(X^G) + sct_G(X, X^G)`, a lower bound for `ct_G(X)`.
    CtGViaFixedSet,
    /// Relative strict covering type `sct_G(X, X^G)`.
    SctGRelative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub quantity: Quantity,
    pub lower: u64,
    pub upper: Option<u64>,
    pub theorem: &'static str,
    pub inputs: BTreeMap<String, Value>,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(quantity: Quantity, lower: u64, theorem: &'static str, inputs: Value) -> Self {
        let inputs = match inputs {
            Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        BoundReport {
            quantity,
            lower,
            upper: None,
            theorem,
            inputs,
            notes: Vec::new(),
        }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

/// `ct_G(X) ≥ γ(γ+1)/2` when the orbit types of `X` are linearly ordered.
pub fn genus_lower_bound(gamma: u64) -> Result<BoundReport, EstimateError> {
    if gamma == 0 {
        return Err(EstimateError::InvalidInput(
            "G-genus must be at least 1".into(),
        ));
    }
    Ok(BoundReport::new(
        Quantity::CtG,
        gamma * (gamma + 1) / 2,
        "estimate-by-genus",
        json!({ "gamma": gamma }),
    ))
}

/// [`genus_lower_bound`] after checking that the given orbit types form a chain.
pub fn genus_lower_bound_for(
    poset: &OrbitTypePoset,
    types: &[&OrbitType],
    gamma: u64,
) -> Result<BoundReport, EstimateError> {
    if !poset.is_linearly_ordered(types)? {
        return Err(EstimateError::NotLinearlyOrdered);
    }
    genus_lower_bound(gamma)
}

/// `i₁ + 2i₂ + ⋯ + n·i_n + (n+1)` for a non-zero product of classes of degrees `i_k`,
/// taken with the degrees in ascending order.
pub fn arithmetic_bound(degrees: &[u64]) -> Result<BoundReport, EstimateError> {
    if degrees.is_empty() {
        return Err(EstimateError::EmptyDegreeList);
    }
    if degrees.contains(&0) {
        return Err(EstimateError::InvalidInput(
            "degrees must be at least 1".into(),
        ));
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as u64;
    let sum: u64 = sorted.iter().zip(1..).map(|(&i, k)| k * i).sum();
    Ok(BoundReport::new(
        Quantity::CtG,
        sum + n + 1,
        "arithmetic",
        json!({ "degrees": degrees }),
    )
    .note(format!("degrees used in ascending order: {sorted:?}")))
}

/// `ct_G(P(V)) ≥ (n+1)²` for a projective space of complex dimension `n`.
pub fn projective_bound(n: u64) -> BoundReport {
    let d = 2 * n;
    BoundReport::new(
        Quantity::CtG,
        (n + 1).pow(2),
        "projective-space",
        json!({ "n": n, "real_dimension": d }),
    )
    .note(format!(
        "dimension form (d+2)^2/4 with d = {d}: {}",
        (d + 2).pow(2) / 4
    ))
}

fn prime_base(x: u64) -> Option<u64> {
    if x < 2 {
        return None;
    }
    let p = (2..).find(|p| x.is_multiple_of(*p)).unwrap();
    let mut y = x;
    while y.is_multiple_of(p) {
        y /= p;
    }
    (y == 1).then_some(p)
}

fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|q| q * q <= p)
            .all(|q| !p.is_multiple_of(q))
}

/// `½(1+c)(2+c)` with `c = ⌈(d−1)m/n⌉`, for spheres whose length data lie in `𝒜_{m,n}`.
pub fn sphere_zpk_bound(d: u64, m: u64, n: u64) -> Result<BoundReport, EstimateError> {
    if d == 0 {
        return Err(EstimateError::InvalidInput(
            "dimension must be at least 1".into(),
        ));
    }
    let same_prime = match (prime_base(m), prime_base(n)) {
        (Some(a), Some(b)) => a == b,
        (None, Some(_)) => m == 1,
        (None, None) => m == 1 && n == 1,
        (Some(_), None) => false,
    };
    if !same_prime || m > n {
        return Err(EstimateError::NotPrimePowers { m, n });
    }
    let c = ((d - 1) * m).div_ceil(n);
    Ok(BoundReport::new(
        Quantity::CtG,
        (1 + c) * (2 + c) / 2,
        "spheres-cyclic-p-power",
        json!({ "d": d, "m": m, "n": n }),
    ))
}

/// `ct_G` of a join of representation spheres of cyclic factors: the sum of the parts.
pub fn cyclic_join_additivity(components: &[u64]) -> Result<BoundReport, EstimateError> {
    if components.is_empty() {
        return Err(EstimateError::InvalidInput("no components".into()));
    }
    let mut r = BoundReport::new(
        Quantity::CtG,
        components.iter().sum(),
        "cyclic-join-additivity",
        json!({ "components": components }),
    );
    r.upper = Some(r.lower);
    Ok(r)
}

/// Bounds for a `Z_p^k` action on an `F_p`-cohomology `n`-sphere whose fixed set is
/// a cohomology `r`-sphere (`None` when the action has no fixed points).
pub fn cohomology_sphere_bound(
    n: u64,
    p: u64,
    r: Option<u64>,
) -> Result<BoundReport, EstimateError> {
    if !is_prime(p) {
        return Err(EstimateError::InvalidInput(format!("{p} is not prime")));
    }
    let inputs = json!({ "n": n, "p": p, "r": r });
    let tag = "cohomology-spheres-p-torus";
    match r {
        None if p == 2 => Ok(BoundReport::new(
            Quantity::CtG,
            (n + 1) * (n + 2) / 2,
            tag,
            inputs,
        )),
        None => {
            if n.is_multiple_of(2) {
                return Err(EstimateError::ParityViolation(format!(
                    "free action of an odd p-torus needs odd n, got {n}"
                )));
            }
            let d = n.div_ceil(2);
            Ok(BoundReport::new(
                Quantity::CtG,
                d * (d + 1) / 2,
                tag,
                inputs,
            ))
        }
        Some(r) => {
            if r >= n {
                return Err(EstimateError::InvalidInput(format!(
                    "fixed sphere dimension {r} must be below {n}"
                )));
            }
            let fixed = r + 2;
            let relative = if p == 2 {
                (n - r - 1) * (n - r + 2) / 2
            } else {
                if !(n - r).is_multiple_of(2) {
                    return Err(EstimateError::ParityViolation(format!(
                        "odd p-torus needs n - r even, got {}",
                        n - r
                    )));
                }
                let d = (n - r) / 2;
                ((d - 1) * (d + 1)).div_ceil(2)
            };
            Ok(
                BoundReport::new(Quantity::CtGViaFixedSet, fixed + relative, tag, inputs)
                    .note(format!("ct of fixed sphere: {fixed}"))
                    .note(format!("relative strict covering type part: {relative}")),
            )
        }
    }
}

/// `sct_G(X, X^G) + ct(X^G) ≤ ct_G(X)`. Equality is only conjectured.
pub fn relative_sct_decomposition(
    ct_fixed: u64,
    sct_relative: u64,
) -> Result<BoundReport, EstimateError> {
    if ct_fixed == 0 || sct_relative == 0 {
        return Err(EstimateError::InvalidInput(
            "both parts must be at least 1".into(),
        ));
    }
    Ok(BoundReport::new(
        Quantity::CtGViaFixedSet,
        ct_fixed + sct_relative,
        "relative-covering-type",
        json!({ "ct_fixed": ct_fixed, "sct_relative": sct_relative }),
    )
    .note("equality is conjectural"))
}
