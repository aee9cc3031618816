//! Independent brute-force oracle for M* and L*.
//!
//! Enumerates every sequence of X^n explicitly, sorts by exact probability,
//! and evaluates both limits directly from their definitions: no type-class
//! combinatorics, no closed-form rank sums, no shared code with the
//! production path. Results are exact rationals/integers so equality checks
//! against the fast path carry zero tolerance.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::levels::eps_parts;
use crate::source::DiscreteSource;

/// Hard cap on |supp|^n for explicit enumeration.
const SEQUENCE_CAP: u64 = 1 << 24;

/// Exhaustively computes (M*(n, eps), L*(eps | X^n)).
///
/// Ties in the probability ordering are broken arbitrarily by the sort; both
/// outputs are invariant to that choice.
pub fn brute_force_oracle(
    src: &DiscreteSource,
    n: u32,
    eps: &BigRational,
) -> Result<(BigUint, BigRational)> {
    let (e, f) = eps_parts(eps)?;
    let m = src.support_size() as u64;
    let total = (m as f64).powi(n as i32);
    if total > SEQUENCE_CAP as f64 {
        return Err(Error::SizeCapExceeded(format!(
            "{m}^{n} sequences exceed the brute-force cap of 2^24"
        )));
    }
    if e == f {
        // eps = 1: the empty set achieves error 1, and the cutoff zeroes all mass.
        return Ok((BigUint::zero(), BigRational::zero()));
    }

    let (weights, d) = src.scaled_weights();
    let denom = d.pow(n);

    // Every sequence, one numerator each.
    let mut numerators: Vec<BigUint> = Vec::with_capacity(total as usize);
    let mut stack: Vec<BigUint> = vec![BigUint::one()];
    enumerate_sequences(&weights, n, &mut stack, &mut numerators);
    debug_assert_eq!(numerators.len() as f64, total);
    numerators.sort_unstable_by(|a, b| b.cmp(a));

    // M*: count sequences until the captured mass reaches 1 - eps.
    let target = (&f - &e) * &denom; // masses compared at scale f
    let mut cum_scaled = BigUint::zero();
    let mut m_star = 0u64;
    for numer in &numerators {
        cum_scaled += numer * &f;
        m_star += 1;
        if cum_scaled >= target {
            break;
        }
    }

    // L*: expectation of the eps-cutoff of floor(log2 rank), from the
    // definition. First the distribution of Z = floor(log2 r)...
    let mut z_atoms: Vec<(u32, BigUint)> = Vec::new(); // (value, scaled mass)
    for (idx, numer) in numerators.iter().enumerate() {
        let rank = idx as u64 + 1;
        let z = 63 - rank.leading_zeros(); // floor(log2 rank)
        match z_atoms.last_mut() {
            Some((v, mass)) if *v == z => *mass += numer,
            _ => z_atoms.push((z, numer.clone())),
        }
    }
    // ...then the boundary (eta, beta) with P{Z > eta} + beta P{Z = eta} = eps,
    // walking the atoms from the top.
    let mut tail = BigUint::zero(); // scaled by f... mass * f vs eps * denom
    let eps_mass = &e * &denom;
    let mut eta_idx = z_atoms.len();
    for i in (0..z_atoms.len()).rev() {
        let with_atom = &tail + &z_atoms[i].1 * &f;
        if with_atom > eps_mass {
            eta_idx = i;
            break;
        }
        tail = with_atom;
    }
    debug_assert!(eta_idx < z_atoms.len());
    // E = sum_{z < eta} z p(z) + (1 - beta) eta p(eta), with
    // (1 - beta) p(eta) = (1 - eps) - P{Z < eta}^c ... assembled exactly.
    let denom_rat = BigRational::new(BigInt::from(&f * &denom), BigInt::one());
    let mut expectation_scaled = BigRational::zero(); // numerator over f * denom
    for (z, mass) in &z_atoms[..eta_idx] {
        expectation_scaled +=
            BigRational::from(BigInt::from(*z)) * BigRational::from(BigInt::from(mass * &f));
    }
    let at_mass = &z_atoms[eta_idx].1 * &f;
    let beta_num = &eps_mass - &tail; // beta = beta_num / at_mass
    let kept = &at_mass - &beta_num; // (1 - beta) * mass * f
    expectation_scaled +=
        BigRational::from(BigInt::from(z_atoms[eta_idx].0)) * BigRational::from(BigInt::from(kept));
    let l_star = expectation_scaled / denom_rat;

    Ok((BigUint::from(m_star), l_star))
}

fn enumerate_sequences(
    weights: &[BigUint],
    remaining: u32,
    stack: &mut Vec<BigUint>,
    out: &mut Vec<BigUint>,
) {
    let current = stack.last().expect("stack never empty").clone();
    if remaining == 0 {
        out.push(current);
        return;
    }
    for w in weights {
        stack.push(&current * w);
        enumerate_sequences(weights, remaining - 1, stack, out);
        stack.pop();
    }
}
