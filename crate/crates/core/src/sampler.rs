//! Sparse sign representations sampled from an approximating function.
//!
//! Given `p` with `|p(x) - f(x)| <= alpha`, drawing characters `chi_S` with
//! probability `|p^(S)| / ||p||_1` and signing them by `sign(p^(S))` yields a
//! multiset whose normalized sum is pointwise close to `p` on most inputs, so
//! `F = sign(sum a_S chi_S)` agrees with `f` on all but a small fraction of
//! inputs.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::f2::VectorF2;
use crate::fourier::{
    chi, hamming_distance, sign_of_weighted_parities, BooleanFunction, RealFunction,
};
use crate::lp::approx_spectral_norm;

/// Multiplier in the sample size `C t^2 (1 - alpha)^-2 ln(4 / delta)`.
pub const SAMPLE_CONSTANT: f64 = 8.0;

/// Seeds tried by [`find_close_sign_function`] before giving up.
pub const MAX_ATTEMPTS: u32 = 64;

/// A multiset of signed characters `(S, a_S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedParitySet {
    n: usize,
    entries: Vec<(u32, i8)>,
}

impl SignedParitySet {
    pub fn new(n: usize, entries: Vec<(u32, i8)>) -> Result<Self> {
        for &(s, a) in &entries {
            VectorF2::new(n, s)?;
            if a != 1 && a != -1 {
                return Err(Error::InvalidParameter(format!("sign {a} is not +/-1")));
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(u32, i8)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Net signed multiplicity of every character, zero weights dropped,
    /// sorted by the character's integer encoding.
    pub fn merged(&self) -> Vec<(u32, i64)> {
        let mut net = std::collections::BTreeMap::new();
        for &(s, a) in &self.entries {
            *net.entry(s).or_insert(0i64) += a as i64;
        }
        net.into_iter().filter(|&(_, w)| w != 0).collect()
    }

    /// `sum a_S chi_S(x)` over the multiset.
    pub fn sum_at(&self, x: u32) -> i64 {
        self.entries
            .iter()
            .map(|&(s, a)| (a * chi(s, x)) as i64)
            .sum()
    }
}

/// Draws `count` i.i.d. characters with probability `|p^(S)| / ||p||_1`.
pub fn sample_signed_parities<R: Rng + ?Sized>(
    p: &RealFunction,
    count: usize,
    rng: &mut R,
) -> Result<SignedParitySet> {
    let support: Vec<(u32, f64)> = p.coeffs().iter().map(|(&s, &c)| (s, c)).collect();
    if support.is_empty() || p.l1_norm() <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let dist = WeightedIndex::new(support.iter().map(|(_, c)| c.abs()))
        .map_err(|_| Error::DegenerateDistribution)?;
    let entries = (0..count)
        .map(|_| {
            let (s, c) = support[dist.sample(rng)];
            (s, if c < 0.0 { -1 } else { 1 })
        })
        .collect();
    Ok(SignedParitySet { n: p.n(), entries })
}

/// `F = sign(sum a_S chi_S)` with `sign(0) = +1`.
pub fn build_sign_function(sp: &SignedParitySet) -> Result<BooleanFunction> {
    if sp.is_empty() {
        return Err(Error::InvalidParameter("empty parity set".into()));
    }
    sign_of_weighted_parities(sp.n, &sp.merged())
}

/// `|p(x) - (||p||_1 / |S|) sum a_S chi_S(x)|`.
pub fn sampling_residual(p: &RealFunction, sp: &SignedParitySet, x: u32) -> f64 {
    let scale = p.l1_norm() / sp.len() as f64;
    (p.eval(x) - scale * sp.sum_at(x) as f64).abs()
}

/// `ceil(C t^2 (1 - alpha)^-2 ln(4 / delta))`.
pub fn sample_size(t: f64, alpha: f64, delta: f64) -> usize {
    let n = SAMPLE_CONSTANT * t * t / ((1.0 - alpha) * (1.0 - alpha)) * (4.0 / delta).ln();
    (n.ceil() as usize).max(1)
}

/// A verified sign representation close to a target function.
#[derive(Clone, Debug)]
pub struct SignRepresentation {
    pub function: BooleanFunction,
    pub parities: SignedParitySet,
    /// The approximating function the characters were drawn from.
    pub witness: RealFunction,
    /// 1 when the first seed succeeded.
    pub attempts: u32,
    pub distance: crate::Rational,
}

/// Builds `F = sign(sum a_S chi_S)` with `delta(f, F) <= delta`.
///
/// The witness comes from the `alpha`-approximate norm LP. Each attempt draws
/// [`sample_size`] characters from an RNG seeded with `seed + attempt` and
/// checks the distance exactly; the first attempt within `delta` is returned.
pub fn find_close_sign_function(
    f: &BooleanFunction,
    alpha: f64,
    delta: f64,
    seed: u64,
) -> Result<SignRepresentation> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 1)"
        )));
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} outside (0, 1/2]"
        )));
    }
    let witness = approx_spectral_norm(f, alpha)?.witness;
    let count = sample_size(witness.l1_norm(), alpha, delta);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let parities = sample_signed_parities(&witness, count, &mut rng)?;
        let function = build_sign_function(&parities)?;
        let distance = hamming_distance(f, &function)?;
        if (*distance.numer() as f64) <= delta * (*distance.denom() as f64) {
            return Ok(SignRepresentation {
                function,
                parities,
                witness,
                attempts: attempt + 1,
                distance,
            });
        }
    }
    Err(Error::SamplerExhausted {
        delta,
        attempts: MAX_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::sign_function;
    use crate::Rational;

    fn and2() -> BooleanFunction {
        BooleanFunction::from_predicate(2, |x| x == 0b11).unwrap()
    }

    #[test]
    fn point_mass_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = RealFunction::new(3, [(0b110, 0.9)]).unwrap();
        let sp = sample_signed_parities(&p, 5, &mut rng).unwrap();
        assert_eq!(sp.entries(), &[(0b110, 1); 5]);

        let p = RealFunction::new(3, [(0b011, -1.0)]).unwrap();
        let sp = sample_signed_parities(&p, 7, &mut rng).unwrap();
        assert!(sp.entries().iter().all(|&e| e == (0b011, -1)));
    }

    #[test]
    fn empirical_frequency_matches_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = RealFunction::new(2, [(0b01, 0.5), (0b10, -0.5)]).unwrap();
        let sp = sample_signed_parities(&p, 10_000, &mut rng).unwrap();
        let a = sp.entries().iter().filter(|e| e.0 == 0b01).count();
        let freq = a as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.05, "frequency {freq}");
        assert!(sp
            .entries()
            .iter()
            .all(|&(s, a)| (s == 0b01 && a == 1) || (s == 0b10 && a == -1)));
    }

    #[test]
    fn zero_function_is_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            sample_signed_parities(&RealFunction::zero(3), 4, &mut rng),
            Err(Error::DegenerateDistribution)
        );
    }

    #[test]
    fn build_sign_function_examples() {
        let single = SignedParitySet::new(3, vec![(0b101, 1)]).unwrap();
        let chi_t = BooleanFunction::parity(3, 0b101).unwrap();
        assert_eq!(build_sign_function(&single).unwrap(), chi_t);
        let double = SignedParitySet::new(3, vec![(0b101, 1), (0b101, 1)]).unwrap();
        assert_eq!(build_sign_function(&double).unwrap(), chi_t);
        let and = SignedParitySet::new(2, vec![(0b01, 1), (0b10, 1), (0b11, -1)]).unwrap();
        assert_eq!(build_sign_function(&and).unwrap(), and2());
        let empty = SignedParitySet::new(2, vec![]).unwrap();
        assert!(build_sign_function(&empty).is_err());
    }

    #[test]
    fn build_sign_function_matches_real_sign() {
        let sp = SignedParitySet::new(3, vec![(1, 1), (2, -1), (7, 1), (7, 1), (0, -1)]).unwrap();
        let p = RealFunction::new(3, sp.entries().iter().map(|&(s, a)| (s, a as f64))).unwrap();
        assert_eq!(build_sign_function(&sp).unwrap(), sign_function(&p));
    }

    #[test]
    fn close_sign_function_for_parity() {
        let f = BooleanFunction::parity(4, 0b1001).unwrap();
        let rep = find_close_sign_function(&f, 1.0 / 3.0, 0.05, 9).unwrap();
        assert_eq!(rep.function, f);
        assert_eq!(rep.distance, Rational::from_integer(0));
        assert!(rep.parities.entries().iter().all(|&e| e == (0b1001, 1)));
    }

    #[test]
    fn close_sign_function_for_and2() {
        let f = and2();
        let rep = find_close_sign_function(&f, 1.0 / 3.0, 0.1, 4).unwrap();
        let d = hamming_distance(&f, &rep.function).unwrap();
        assert!(*d.numer() as f64 <= 0.1 * *d.denom() as f64);
        assert_eq!(
            rep.parities.len(),
            sample_size(rep.witness.l1_norm(), 1.0 / 3.0, 0.1)
        );
    }

    #[test]
    fn residual_bound_implies_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let alpha = 1.0 / 3.0;
        for seed in 0..20u64 {
            let f = BooleanFunction::from_predicate(4, |_| rng.gen()).unwrap();
            let rep = find_close_sign_function(&f, alpha, 0.1, seed).unwrap();
            for x in 0..16u32 {
                if sampling_residual(&rep.witness, &rep.parities, x) < 1.0 - alpha {
                    assert_eq!(rep.function.value(x), f.value(x));
                }
            }
        }
    }

    #[test]
    fn sample_size_formula() {
        // 8 * 1 * 9/4 * ln(40) = 66.4
        assert_eq!(sample_size(1.0, 1.0 / 3.0, 0.1), 67);
        assert_eq!(sample_size(2.0 / 3.0, 1.0 / 3.0, 0.05), 36);
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = and2();
        assert!(find_close_sign_function(&f, 1.0, 0.1, 0).is_err());
        assert!(find_close_sign_function(&f, 0.3, 0.0, 0).is_err());
        assert!(find_close_sign_function(&f, 0.3, 0.6, 0).is_err());
    }
}
