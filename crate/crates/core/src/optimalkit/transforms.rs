use std::collections::{HashMap, HashSet};

use super::stream::{HaltEvent, Machine};
use crate::machine::BinStr;

/// Re-seat the k-th event of length n at the k-th n-bit string, so that
/// the defined strings of every length always form a lexicographic initial
/// segment.
pub fn left_total(u: &Machine) -> Machine {
    let src = u.clone();
    Machine::new(format!("left_total({})", u.name()), u.max_len(), move || {
        Box::new(reseat(src.events()))
    })
}

/// Drop events whose output already appeared at the same program length,
/// then re-seat as [`left_total`] does.
pub fn dedupe_values(u: &Machine) -> Machine {
    let src = u.clone();
    Machine::new(format!("dedupe({})", u.name()), u.max_len(), move || {
        let mut seen: HashSet<(usize, BinStr)> = HashSet::new();
        let fresh = src
            .events()
            .filter(move |e| seen.insert((e.program.len(), e.output.clone())));
        Box::new(reseat(fresh))
    })
}

/// `0p` for every program `p` of `u`; the window grows by one.
pub fn prepend_zero(u: &Machine) -> Machine {
    let src = u.clone();
    Machine::new(format!("zero({})", u.name()), u.max_len() + 1, move || {
        Box::new(src.events().map(|mut e| {
            e.program = e.program.prepend(false);
            e
        }))
    })
}

fn reseat(events: impl Iterator<Item = HaltEvent> + Send + 'static) -> impl Iterator<Item = HaltEvent> + Send {
    let mut next_seat: HashMap<usize, u64> = HashMap::new();
    events.enumerate().map(move |(i, mut e)| {
        let n = e.program.len();
        let k = next_seat.entry(n).or_insert(0);
        assert!(n >= 64 || *k < (1u64 << n), "more than 2^{n} events of length {n}");
        e.program = BinStr::from_u64(*k, n);
        *k += 1;
        e.seq = i as u64;
        e
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::bs;

    #[test]
    fn left_total_reseats() {
        let u = Machine::from_pairs("u", 2, vec![(bs("10"), bs("1")), (bs("01"), bs("0"))]);
        let v: Vec<_> = left_total(&u)
            .events()
            .map(|e| (e.program.to_string(), e.output.to_string()))
            .collect();
        assert_eq!(v, vec![("00".into(), "1".into()), ("01".into(), "0".into())]);
    }

    #[test]
    fn dedupe_drops_repeats() {
        let u = Machine::from_pairs("u", 2, vec![(bs("10"), bs("1")), (bs("01"), bs("1")), (bs("1"), bs("1"))]);
        let v = dedupe_values(&u).materialize();
        assert_eq!(v.len(), 2);
        assert_eq!((v[0].program.clone(), v[0].output.clone()), (bs("00"), bs("1")));
        assert_eq!((v[1].program.clone(), v[1].seq), (bs("0"), 1));
    }

    #[test]
    fn prepend_zero_shifts() {
        let u = Machine::from_pairs("u", 1, vec![(bs(""), bs("1")), (bs("1"), bs(""))]);
        let v = prepend_zero(&u);
        assert_eq!(v.max_len(), 2);
        let progs: Vec<_> = v.events().map(|e| e.program).collect();
        assert_eq!(progs, vec![bs("0"), bs("01")]);
    }
}
