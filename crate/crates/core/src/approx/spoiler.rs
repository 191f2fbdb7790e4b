use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::machine::BinStr;
use crate::rational::{ceil_mul, format_rational, Rational};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SpoilerError {
    #[error("total mass {0} does not exceed 1/2")]
    TriggerNotMet(String),
    #[error("support string {0} is shorter than the minimum length")]
    BelowMinimum(BinStr),
    #[error("ceil(eps/2 * 2^{0}) exceeds eps * 2^{0}")]
    MinimumTooShort(usize),
    #[error("invalid probability {0}")]
    InvalidProbability(String),
}

/// Strings added by one carving round and the probability mass they take.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Spoiler {
    pub added: Vec<BinStr>,
    #[serde(serialize_with = "ser_rational")]
    pub carved_mass: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub mass: Rational,
    /// `(n, strings added at length n)`.
    pub per_length: Vec<(usize, u64)>,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_rational(r))
}

/// For every length `n` carrying probability, add the `ceil(eps/2 · 2^n)`
/// most likely strings of that length (ties and zero-probability filler in
/// lexicographic order).
pub fn sparse_spoiler(
    dist: &BTreeMap<BinStr, Rational>,
    eps: Rational,
    min_len: usize,
) -> Result<Spoiler, SpoilerError> {
    let zero = Rational::from_integer(0);
    let half = Rational::new(1, 2);
    if eps <= zero || eps > Rational::from_integer(1) {
        return Err(SpoilerError::InvalidProbability(format_rational(&eps)));
    }
    let mut by_len: BTreeMap<usize, Vec<(&BinStr, Rational)>> = BTreeMap::new();
    let mut mass = zero;
    for (s, &p) in dist {
        if p < zero {
            return Err(SpoilerError::InvalidProbability(format_rational(&p)));
        }
        if s.len() < min_len {
            return Err(SpoilerError::BelowMinimum(s.clone()));
        }
        mass += p;
        by_len.entry(s.len()).or_default().push((s, p));
    }
    if mass > Rational::from_integer(1) {
        return Err(SpoilerError::InvalidProbability(format_rational(&mass)));
    }
    if ceil_mul(&(eps * half), 1u64 << min_len) as i128 > (eps * Rational::from_integer(1i128 << min_len)).floor().to_integer() {
        return Err(SpoilerError::MinimumTooShort(min_len));
    }
    if mass <= half {
        return Err(SpoilerError::TriggerNotMet(format_rational(&mass)));
    }

    let mut added = Vec::new();
    let mut per_length = Vec::new();
    let mut carved = zero;
    for (n, mut strings) in by_len {
        assert!(n < 63, "length {n} too large");
        let quota = ceil_mul(&(eps * half), 1u64 << n);
        // BTreeMap iteration already gives lexicographic order within a
        // length; the stable sort keeps it for ties.
        strings.sort_by_key(|s| std::cmp::Reverse(s.1));
        let mut chosen: Vec<BinStr> = Vec::new();
        for (s, p) in strings.iter().take(quota as usize) {
            carved += *p;
            chosen.push((*s).clone());
        }
        if (chosen.len() as u64) < quota {
            let support: BTreeSet<&BinStr> = strings.iter().map(|(s, _)| *s).collect();
            let filler = (0..1u64 << n)
                .map(|k| BinStr::from_u64(k, n))
                .filter(|s| !support.contains(s))
                .take((quota - chosen.len() as u64) as usize);
            chosen.extend(filler);
        }
        per_length.push((n, quota));
        added.extend(chosen);
    }
    Ok(Spoiler {
        added,
        carved_mass: carved,
        mass,
        per_length,
    })
}

/// A random distribution with dyadic probabilities on strings of lengths
/// `min_len..=max_len`, total mass in `(1/2, 1]`.
pub fn random_dyadic_distribution<R: Rng>(
    rng: &mut R,
    min_len: usize,
    max_len: usize,
    support: usize,
) -> BTreeMap<BinStr, Rational> {
    assert!(support >= 1 && min_len <= max_len && max_len < 63);
    const RES: u32 = 16;
    let total_units = 1u64 << RES;
    // mass strictly above one half
    let mass_units = rng.random_range(total_units / 2 + 1..=total_units);
    let mut cuts: Vec<u64> = (0..support - 1).map(|_| rng.random_range(0..=mass_units)).collect();
    cuts.push(0);
    cuts.push(mass_units);
    cuts.sort_unstable();
    let mut dist: BTreeMap<BinStr, Rational> = BTreeMap::new();
    for w in cuts.windows(2) {
        let n = rng.random_range(min_len..=max_len);
        let s = BinStr::from_u64(rng.random_range(0..1u64 << n), n);
        *dist.entry(s).or_insert(Rational::from_integer(0)) += Rational::new((w[1] - w[0]) as i128, total_units as i128);
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::bs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_single_length() {
        let n = 6;
        let each = Rational::new(33, 64 * 64);
        let dist: BTreeMap<_, _> = (0..64).map(|k| (BinStr::from_u64(k, n), each)).collect();
        let eps = Rational::new(1, 4);
        let sp = sparse_spoiler(&dist, eps, n).unwrap();
        assert_eq!(sp.added.len(), 8);
        assert_eq!(sp.added[0], bs("000000"));
        assert!(sp.carved_mass >= eps / Rational::from_integer(4) * sp.mass);
    }

    #[test]
    fn trigger_and_preconditions() {
        let dist: BTreeMap<_, _> = [(bs("0000"), Rational::new(1, 2))].into_iter().collect();
        assert!(matches!(sparse_spoiler(&dist, Rational::new(1, 4), 4), Err(SpoilerError::TriggerNotMet(_))));
        let dist: BTreeMap<_, _> = [(bs("00"), Rational::new(3, 4))].into_iter().collect();
        assert!(matches!(sparse_spoiler(&dist, Rational::new(1, 4), 4), Err(SpoilerError::BelowMinimum(_))));
        // ceil(1/16 * 4) = 1 > floor(1/8 * 4) = 0
        let dist: BTreeMap<_, _> = [(bs("00"), Rational::new(3, 4))].into_iter().collect();
        assert_eq!(sparse_spoiler(&dist, Rational::new(1, 8), 2), Err(SpoilerError::MinimumTooShort(2)));
    }

    #[test]
    fn filler_is_lexicographic() {
        let dist: BTreeMap<_, _> = [(bs("111"), Rational::new(3, 4))].into_iter().collect();
        let sp = sparse_spoiler(&dist, Rational::new(1, 1), 3).unwrap();
        assert_eq!(sp.added, vec![bs("111"), bs("000"), bs("001"), bs("010")]);
        assert_eq!(sp.carved_mass, Rational::new(3, 4));
    }

    #[test]
    fn random_distributions_trigger() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let d = random_dyadic_distribution(&mut rng, 4, 8, 10);
            let mass: Rational = d.values().sum();
            assert!(mass > Rational::new(1, 2) && mass <= Rational::from_integer(1));
        }
    }
}
