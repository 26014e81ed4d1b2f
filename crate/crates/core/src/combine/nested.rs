//! Two-level compositions `ρₒ □ₐ (ρ_L □ₐ′ ρ_R)` and their place on the ternary
//! parameter family, where they are exactly the points with some `cos δᵢⱼ = 0`.

use serde::{Deserialize, Serialize};

use super::params::{PDelta, PARAM_TOL};
use super::{combine2, Sign};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Tolerance on `|cos δᵢⱼ|` when recognizing a nested point.
pub const NESTED_TOL: f64 = 1e-9;

/// Which state sits outside the inner combination.
///
/// `First` is `ρ₁ □ (ρ₂ □ ρ₃)`, `Second` is `ρ₂ □ (ρ₃ □ ρ₁)`, `Third` is `ρ₃ □ (ρ₁ □ ρ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Ordering {
    First,
    Second,
    Third,
}

impl Ordering {
    pub const ALL: [Ordering; 3] = [Ordering::First, Ordering::Second, Ordering::Third];

    /// 0-based slots `(outer, inner left, inner right)`.
    pub fn slots(self) -> (usize, usize, usize) {
        match self {
            Ordering::First => (0, 1, 2),
            Ordering::Second => (1, 2, 0),
            Ordering::Third => (2, 0, 1),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Ordering::First => 1,
            Ordering::Second => 2,
            Ordering::Third => 3,
        }
    }
}

impl TryFrom<u8> for Ordering {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Ordering::First),
            2 => Ok(Ordering::Second),
            3 => Ok(Ordering::Third),
            _ => Err(Error::out_of_range("ordering", format!("{n} not in 1..=3"))),
        }
    }
}

impl From<Ordering> for u8 {
    fn from(o: Ordering) -> u8 {
        o.number()
    }
}

// Angles are stored as (δ₁₂, δ₂₃, δ₃₁); δ between slots i and i+1 (mod 3) lives at index i.
fn delta_index(from: usize, to: usize) -> usize {
    debug_assert_eq!((from + 1) % 3, to);
    from
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedSpec {
    pub ordering: Ordering,
    pub a: f64,
    pub a_prime: f64,
    pub s: Sign,
    pub s_prime: Sign,
}

impl NestedSpec {
    pub fn new(ordering: Ordering, a: f64, a_prime: f64, s: Sign, s_prime: Sign) -> Result<Self> {
        for (name, w) in [("a", a), ("a'", a_prime)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::out_of_range(name, format!("{w} not in [0, 1]")));
            }
        }
        Ok(NestedSpec {
            ordering,
            a,
            a_prime,
            s,
            s_prime,
        })
    }

    /// First-order weights `(p₁, p₂, p₃)` of the composition.
    pub fn weights(&self) -> [f64; 3] {
        let (o, l, r) = self.ordering.slots();
        let mut p = [0.0; 3];
        p[o] = self.a;
        p[l] = (1.0 - self.a) * self.a_prime;
        p[r] = (1.0 - self.a) * (1.0 - self.a_prime);
        p
    }

    /// All twelve `(ordering, s, s′)` choices at the given weights.
    pub fn all_for_weights(p: [f64; 3]) -> Result<Vec<NestedSpec>> {
        let mut out = Vec::with_capacity(12);
        for ordering in Ordering::ALL {
            for s in [Sign::Plus, Sign::Minus] {
                for s_prime in [Sign::Plus, Sign::Minus] {
                    out.push(nested_spec_for_weights(p, ordering, s, s_prime)?);
                }
            }
        }
        Ok(out)
    }
}

/// `combine2(ρₒ, combine2(ρ_L, ρ_R, a′, s′), a, s)`.
pub fn nested_expand(spec: &NestedSpec, states: [&DensityMatrix; 3]) -> Result<DensityMatrix> {
    let (o, l, r) = spec.ordering.slots();
    let inner = combine2(states[l], states[r], spec.a_prime, spec.s_prime)?;
    combine2(states[o], &inner, spec.a, spec.s)
}

/// `(a, a′)` reproducing the weights `p`: `a = pₒ`, `a′ = p_L / (1 − pₒ)`.
pub fn nested_params_for_weights(p: [f64; 3], ordering: Ordering) -> Result<(f64, f64)> {
    if p.iter().any(|&x| x < -PARAM_TOL) || (p.iter().sum::<f64>() - 1.0).abs() > PARAM_TOL {
        return Err(Error::ConstraintViolation(format!("weights {p:?}")));
    }
    let (o, l, r) = ordering.slots();
    let rest = p[l].max(0.0) + p[r].max(0.0);
    if rest <= PARAM_TOL {
        return Err(Error::DegenerateOuterWeight);
    }
    Ok((p[o].clamp(0.0, 1.0), (p[l].max(0.0) / rest).clamp(0.0, 1.0)))
}

pub fn nested_spec_for_weights(p: [f64; 3], ordering: Ordering, s: Sign, s_prime: Sign) -> Result<NestedSpec> {
    let (a, a_prime) = nested_params_for_weights(p, ordering)?;
    NestedSpec::new(ordering, a, a_prime, s, s_prime)
}

/// Weights and angles of the ternary point equal to the nested composition.
pub fn delta_from_nested(spec: &NestedSpec) -> Result<PDelta> {
    let p = spec.weights();
    if p.iter().any(|&x| x <= 0.0) {
        return Err(Error::DegenerateWeight { weights: p });
    }
    let (o, l, r) = spec.ordering.slots();
    let (ss, sp) = (spec.s.value(), spec.s_prime.value());
    let inner = p[l] + p[r];
    let (wl, wr) = ((p[l] / inner).sqrt(), (p[r] / inner).sqrt());

    let mut delta = [0.0; 3];
    // δ_LR: cos = 0, sin = −s′.
    delta[delta_index(l, r)] = f64::atan2(-sp, 0.0);
    // δ_Rₒ: sin = s·√(p_R/(p_L+p_R)), cos = −s·s′·√(p_L/(p_L+p_R)).
    delta[delta_index(r, o)] = f64::atan2(ss * wr, -ss * sp * wl);
    // δₒL: sin = −s·√(p_L/(p_L+p_R)), cos = s·s′·√(p_R/(p_L+p_R)).
    delta[delta_index(o, l)] = f64::atan2(-ss * wl, ss * sp * wr);
    PDelta::new(p, delta)
}

/// Recognizes a nested point: some `|cos δᵢⱼ| < NESTED_TOL`.
pub fn nested_from_delta(pd: &PDelta) -> Result<NestedSpec> {
    let p = pd.weights();
    if p.iter().any(|&x| x <= 0.0) {
        return Err(Error::DegenerateWeight { weights: p });
    }
    let deltas = pd.deltas();
    let (idx, cos_min) = deltas
        .iter()
        .map(|d| d.cos().abs())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three angles");
    if cos_min >= NESTED_TOL {
        return Err(Error::NotNested);
    }
    // The vanishing angle sits between the inner pair (L, R) = (idx, idx + 1).
    let ordering = match idx {
        1 => Ordering::First,
        2 => Ordering::Second,
        _ => Ordering::Third,
    };
    let (o, l, r) = ordering.slots();
    let s_prime = if deltas[delta_index(l, r)].sin() < 0.0 {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let s = if deltas[delta_index(r, o)].sin() > 0.0 {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let (a, a_prime) = nested_params_for_weights(p, ordering)?;
    NestedSpec::new(ordering, a, a_prime, s, s_prime)
}
