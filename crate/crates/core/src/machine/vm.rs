//! DeskVM: a binary tape machine with 3-bit opcodes.
//!
//! | bits | op    | effect                                                  |
//! |------|-------|---------------------------------------------------------|
//! | 000  | HALT  | stop, emit the output buffer                            |
//! | 001  | RIGHT | move head right                                         |
//! | 010  | LEFT  | move head left                                          |
//! | 011  | FLIP  | invert the current cell                                 |
//! | 100  | OUT   | append the current cell to the output buffer            |
//! | 101  | OPEN  | if cell is 0, jump past the matching CLOSE              |
//! | 110  | CLOSE | if cell is 1, jump past the matching OPEN               |
//! | 111  | READ  | load the next input bit into the cell; halt at end of input |
//!
//! A trailing partial opcode is padded with zeros. Unmatched brackets are
//! no-ops. Running off the end of the program is an endless no-op loop, so
//! a program halts only by executing HALT (or READ on exhausted input).
//! Every executed opcode costs one step, including the one that halts.

use super::binstr::BinStr;

pub const OPCODE_BITS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Halt,
    Right,
    Left,
    Flip,
    Out,
    Open,
    Close,
    Read,
}

impl Op {
    pub fn from_code(code: u8) -> Op {
        match code & 0b111 {
            0 => Op::Halt,
            1 => Op::Right,
            2 => Op::Left,
            3 => Op::Flip,
            4 => Op::Out,
            5 => Op::Open,
            6 => Op::Close,
            _ => Op::Read,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Op::Halt => 0,
            Op::Right => 1,
            Op::Left => 2,
            Op::Flip => 3,
            Op::Out => 4,
            Op::Open => 5,
            Op::Close => 6,
            Op::Read => 7,
        }
    }
}

/// Assemble a list of ops back into program bits.
pub fn assemble(ops: &[Op]) -> BinStr {
    let mut out = BinStr::empty();
    for op in ops {
        let c = op.code();
        for i in (0..OPCODE_BITS).rev() {
            out.push((c >> i) & 1 == 1);
        }
    }
    out
}

/// A decoded program with precomputed bracket targets.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    /// For each position, the index of the matching bracket if any.
    partner: Vec<Option<usize>>,
}

impl Program {
    pub fn decode(bits: &BinStr) -> Program {
        let ops: Vec<Op> = bits
            .bits()
            .chunks(OPCODE_BITS)
            .map(|chunk| {
                let mut code = 0u8;
                for i in 0..OPCODE_BITS {
                    code = (code << 1) | chunk.get(i).copied().unwrap_or(false) as u8;
                }
                Op::from_code(code)
            })
            .collect();
        let mut partner = vec![None; ops.len()];
        let mut stack = Vec::new();
        for (i, op) in ops.iter().enumerate() {
            match op {
                Op::Open => stack.push(i),
                Op::Close => {
                    if let Some(j) = stack.pop() {
                        partner[i] = Some(j);
                        partner[j] = Some(i);
                    }
                }
                _ => {}
            }
        }
        Program { ops, partner }
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Two-way unbounded tape of bits, blank cells read as 0.
#[derive(Clone, Debug, Default)]
pub struct Tape {
    cells: Vec<bool>,
    /// Absolute position of `cells[0]`.
    origin: i64,
}

impl Tape {
    pub fn get(&self, pos: i64) -> bool {
        let i = pos - self.origin;
        if i < 0 {
            return false;
        }
        self.cells.get(i as usize).copied().unwrap_or(false)
    }

    pub fn set(&mut self, pos: i64, bit: bool) {
        if self.cells.is_empty() {
            self.origin = pos;
        }
        if pos < self.origin {
            let grow = (self.origin - pos) as usize;
            let mut cells = vec![false; grow];
            cells.extend_from_slice(&self.cells);
            self.cells = cells;
            self.origin = pos;
        }
        let i = (pos - self.origin) as usize;
        if i >= self.cells.len() {
            self.cells.resize(i + 1, false);
        }
        self.cells[i] = bit;
    }

    /// Inclusive range of positions holding a 1, if any.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.cells.iter().position(|&b| b)?;
        let last = self.cells.iter().rposition(|&b| b)?;
        Some((self.origin + first as i64, self.origin + last as i64))
    }
}

/// Complete machine configuration.
#[derive(Clone, Debug, Default)]
pub struct Config {
    pub pc: usize,
    pub tape: Tape,
    pub head: i64,
    pub input_pos: usize,
    pub output: BinStr,
    pub steps: u64,
}

impl Config {
    /// Canonical encoding of the control-relevant state: program counter,
    /// input position and the tape seen from the head. The output buffer is
    /// write-only and does not influence future transitions, so it is left
    /// out; two configs with equal keys have identical futures up to output.
    pub fn control_key(&self) -> Vec<u8> {
        let (lo, hi) = match self.tape.support() {
            Some((a, b)) => (a.min(self.head), b.max(self.head)),
            None => (self.head, self.head),
        };
        let mut key = Vec::with_capacity(24 + ((hi - lo) as usize) / 8 + 1);
        key.extend_from_slice(&(self.pc as u64).to_le_bytes());
        key.extend_from_slice(&(self.input_pos as u64).to_le_bytes());
        key.extend_from_slice(&((self.head - lo) as u64).to_le_bytes());
        let mut byte = 0u8;
        let mut n = 0;
        for pos in lo..=hi {
            byte = (byte << 1) | self.tape.get(pos) as u8;
            n += 1;
            if n == 8 {
                key.push(byte);
                byte = 0;
                n = 0;
            }
        }
        if n > 0 {
            key.push(byte << (8 - n));
        }
        key.push(n as u8);
        key
    }
}

/// What a single step did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Continue,
    Halted,
    /// The program counter is past the last opcode; every further step is a
    /// no-op.
    OffEnd,
}

/// Execute one opcode. Does nothing and reports `OffEnd` when the program
/// counter is past the end (the caller accounts for the idle step).
pub fn step(program: &Program, input: &BinStr, cfg: &mut Config) -> StepResult {
    let Some(&op) = program.ops.get(cfg.pc) else {
        return StepResult::OffEnd;
    };
    cfg.steps += 1;
    let cell = cfg.tape.get(cfg.head);
    match op {
        Op::Halt => return StepResult::Halted,
        Op::Right => cfg.head += 1,
        Op::Left => cfg.head -= 1,
        Op::Flip => cfg.tape.set(cfg.head, !cell),
        Op::Out => cfg.output.push(cell),
        Op::Open => {
            if !cell {
                if let Some(close) = program.partner[cfg.pc] {
                    cfg.pc = close + 1;
                    return StepResult::Continue;
                }
            }
        }
        Op::Close => {
            if cell {
                if let Some(open) = program.partner[cfg.pc] {
                    cfg.pc = open + 1;
                    return StepResult::Continue;
                }
            }
        }
        Op::Read => match input.get(cfg.input_pos) {
            Some(bit) => {
                cfg.tape.set(cfg.head, bit);
                cfg.input_pos += 1;
            }
            None => return StepResult::Halted,
        },
    }
    cfg.pc += 1;
    StepResult::Continue
}
