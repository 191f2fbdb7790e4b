//! Test-side reference implementations, written without the library's
//! interpreter or tables.

#![allow(dead_code)]

use std::collections::HashMap;

/// Straightforward DeskVM interpreter over raw bits: opcodes are decoded
/// on the fly and brackets are matched by scanning.
pub fn resim(bits: &[bool], input: &[bool], budget: u64) -> Option<(Vec<bool>, u64)> {
    let nops = bits.len().div_ceil(3);
    let op = |i: usize| -> u8 {
        (0..3).fold(0u8, |acc, k| (acc << 1) | bits.get(3 * i + k).copied().unwrap_or(false) as u8)
    };
    let mut tape: HashMap<i64, bool> = HashMap::new();
    let mut head = 0i64;
    let mut pc = 0usize;
    let mut out = Vec::new();
    let mut read = 0usize;
    let mut steps = 0u64;
    while steps < budget {
        if pc >= nops {
            return None;
        }
        steps += 1;
        let cell = *tape.get(&head).unwrap_or(&false);
        let mut next = pc + 1;
        match op(pc) {
            0 => return Some((out, steps)),
            1 => head += 1,
            2 => head -= 1,
            3 => {
                tape.insert(head, !cell);
            }
            4 => out.push(cell),
            5 if !cell => {
                let mut depth = 0;
                for j in pc + 1..nops {
                    match op(j) {
                        5 => depth += 1,
                        6 if depth == 0 => {
                            next = j + 1;
                            break;
                        }
                        6 => depth -= 1,
                        _ => {}
                    }
                }
            }
            6 if cell => {
                let mut depth = 0;
                for j in (0..pc).rev() {
                    match op(j) {
                        6 => depth += 1,
                        5 if depth == 0 => {
                            next = j + 1;
                            break;
                        }
                        5 => depth -= 1,
                        _ => {}
                    }
                }
            }
            7 => match input.get(read) {
                Some(&b) => {
                    tape.insert(head, b);
                    read += 1;
                }
                None => return Some((out, steps)),
            },
            _ => {}
        }
        pc = next;
    }
    None
}

/// All bit strings of length at most `n`, length-lex.
pub fn all_programs(n: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for len in 0..=n {
        for k in 0..(1u64 << len) {
            out.push((0..len).map(|i| (k >> (len - 1 - i)) & 1 == 1).collect());
        }
    }
    out
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Brute-force tables for DeskVM on empty input: per-length halting
/// counts, BB per length, K per output string and B per m.
pub struct BruteTables {
    pub h: Vec<u64>,
    pub bb: Vec<u64>,
    pub k: HashMap<String, usize>,
    pub b: Vec<u64>,
}

fn length_lex_index(s: &str) -> u64 {
    // index = 2^len - 1 + binary value
    let v = s.chars().fold(0u64, |acc, c| acc * 2 + (c == '1') as u64);
    (1u64 << s.len()) - 1 + v
}

pub fn brute_tables(n: usize, budget: u64) -> BruteTables {
    let mut h = vec![0u64; n + 1];
    let mut bb_exact = vec![0u64; n + 1];
    let mut k: HashMap<String, usize> = HashMap::new();
    for p in all_programs(n) {
        if let Some((out, steps)) = resim(&p, &[], budget) {
            h[p.len()] += 1;
            bb_exact[p.len()] = bb_exact[p.len()].max(steps);
            let y = bits_to_string(&out);
            let e = k.entry(y).or_insert(p.len());
            *e = (*e).min(p.len());
        }
    }
    let mut bb = Vec::new();
    let mut acc = 0;
    for v in bb_exact {
        acc = acc.max(v);
        bb.push(acc);
    }
    let b = (0..=n)
        .map(|m| {
            k.iter()
                .filter(|(_, &len)| len <= m)
                .map(|(y, _)| length_lex_index(y))
                .max()
                .unwrap_or(0)
        })
        .collect();
    BruteTables { h, bb, k, b }
}
