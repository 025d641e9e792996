//! The pinned space-metered interpreter (instruction set version 1).
//!
//! The machine has four tapes:
//!
//! * the **program** (read-only, length known to the machine),
//! * the **condition** (read-only, addressed through a head `chead` and a
//!   bound `fend`; it is normally an [`encode_condition`] tuple),
//! * the **work tape**, a growable bit buffer whose length is the only
//!   metered resource (`space_cells`),
//! * the **output** (write-only).
//!
//! Instructions are decoded from a complete prefix-free code, so every bit
//! string is a syntactically admissible program. A program halts when the
//! instruction pointer reaches the end of the program, or through `LIT`/`RPT`.
//!
//! | code       | name  | effect |
//! |------------|-------|--------|
//! | `0`        | LIT   | append the remaining program bits to the output; halt |
//! | `100`      | FLD   | read the field at `chead` and append it to the output |
//! | `101 rr`   | RPT   | push the remaining program bits onto the work tape, output the work tape `2^(rr+1)` times; halt |
//! | `1100 γ(k)`| SKIP  | skip `k >= 1` fields |
//! | `1101`     | LOAD  | read the field at `chead` and push it onto the work tape |
//! | `11100`    | OPEN  | read the header at `chead`; move into the field and set `fend` to its end |
//! | `11101`    | OUTW  | append the whole work tape to the output |
//! | `111100`   | CP1   | copy one condition bit to the output |
//! | `111101`   | NOT1  | copy one condition bit, inverted |
//! | `111110`   | MARK  | set the loop target to the next instruction |
//! | `111111`   | LOOP  | if `chead < fend`, jump to the loop target (initially 0) |
//!
//! A field is `γ(len + 1) || bits` where `γ` is the Elias-gamma code. Reading
//! past `fend`, a malformed header, or a truncated instruction is a fault and
//! yields [`Outcome::Invalid`].
//!
//! Constants that follow from the encoding: the empty program prints the empty
//! string ([`C_EMPTY`]` = 0`); `0 || x` prints `x` ([`C_LITERAL`]` = 1`); `100`
//! prints the first condition field ([`C_COPY`]` = 3`).
//!
//! Control flow (`ip`, loop target, `chead`, `fend`, work-tape length) never
//! depends on the work tape *contents* or the output. A halting run therefore
//! never repeats a control configuration, which gives the closed-form step
//! bound [`configuration_bound`], and lets [`run_program`] recognise a repeated
//! configuration at a loop jump as certified non-halting.

use crate::bits::{decode_field, gamma_decode, BitString};

pub const ISA_VERSION: u32 = 1;
/// Length of the program printing the empty string (the empty program).
pub const C_EMPTY: usize = 0;
/// Overhead of the literal-print idiom: `C(x) <= |x| + C_LITERAL`.
pub const C_LITERAL: usize = 1;
/// Length of the first-field copy idiom: `C(x | x) <= C_COPY`.
pub const C_COPY: usize = 3;

pub type Program = BitString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepCap {
    /// [`configuration_bound`] for the program, condition, and space.
    ConfigurationBound,
    Fixed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VmLimits {
    pub space_cells: usize,
    pub step_cap: StepCap,
}

impl VmLimits {
    pub fn new(space_cells: usize) -> Self {
        Self {
            space_cells,
            step_cap: StepCap::ConfigurationBound,
        }
    }

    pub fn with_step_cap(space_cells: usize, cap: u64) -> Self {
        Self {
            space_cells,
            step_cap: StepCap::Fixed(cap),
        }
    }

    pub fn resolve_cap(&self, program_len: usize, condition_len: usize) -> u64 {
        match self.step_cap {
            StepCap::ConfigurationBound => configuration_bound(program_len, condition_len, self.space_cells),
            StepCap::Fixed(cap) => cap,
        }
    }
}

/// Number of distinct control configurations:
/// `(|p| + 1)^2 * (|c| + 1)^2 * (S + 1)` for instruction pointer, loop target,
/// condition head, field bound, and work-tape length. Saturates at `u64::MAX`.
pub fn configuration_bound(program_len: usize, condition_len: usize, space_cells: usize) -> u64 {
    let p = program_len as u128 + 1;
    let c = condition_len as u128 + 1;
    let s = space_cells as u128 + 1;
    u64::try_from(p * p * c * c * s).unwrap_or(u64::MAX)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Outcome {
    Halted(BitString),
    SpaceExceeded,
    StepExceeded,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunOutcome {
    pub kind: Outcome,
    pub cells_used: usize,
    pub steps_used: u64,
}

impl RunOutcome {
    pub fn output(&self) -> Option<&BitString> {
        match &self.kind {
            Outcome::Halted(out) => Some(out),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Lit,
    Fld,
    Rpt(u8),
    Skip(u64),
    Load,
    Open,
    OutW,
    Cp1,
    Not1,
    Mark,
    Loop,
}

impl Op {
    pub fn mnemonic(&self) -> String {
        match self {
            Op::Lit => "LIT".into(),
            Op::Fld => "FLD".into(),
            Op::Rpt(rr) => format!("RPT x{}", 2u32 << rr),
            Op::Skip(k) => format!("SKIP {k}"),
            Op::Load => "LOAD".into(),
            Op::Open => "OPEN".into(),
            Op::OutW => "OUTW".into(),
            Op::Cp1 => "CP1".into(),
            Op::Not1 => "NOT1".into(),
            Op::Mark => "MARK".into(),
            Op::Loop => "LOOP".into(),
        }
    }
}

/// Decodes the instruction at `ip`. `None` means the program ends inside an
/// opcode or operand.
pub fn decode_op(program: &[bool], ip: usize) -> Option<(Op, usize)> {
    let bit = |i: usize| program.get(ip + i).copied();
    if !bit(0)? {
        return Some((Op::Lit, ip + 1));
    }
    if !bit(1)? {
        if !bit(2)? {
            return Some((Op::Fld, ip + 3));
        }
        let rr = (bit(3)? as u8) << 1 | bit(4)? as u8;
        return Some((Op::Rpt(rr), ip + 5));
    }
    if !bit(2)? {
        if !bit(3)? {
            let (k, next) = gamma_decode(program, ip + 4, program.len())?;
            return Some((Op::Skip(k), next));
        }
        return Some((Op::Load, ip + 4));
    }
    if !bit(3)? {
        return Some((if bit(4)? { Op::OutW } else { Op::Open }, ip + 5));
    }
    let op = match (bit(4)?, bit(5)?) {
        (false, false) => Op::Cp1,
        (false, true) => Op::Not1,
        (true, false) => Op::Mark,
        (true, true) => Op::Loop,
    };
    Some((op, ip + 6))
}

/// Human-readable listing, e.g. `FLD; LIT 01`. A truncated tail is shown as
/// `<truncated ...>`.
pub fn disassemble(program: &BitString) -> String {
    let bits = program.bits();
    let mut ip = 0;
    let mut parts = Vec::new();
    while ip < bits.len() {
        match decode_op(bits, ip) {
            Some((Op::Lit, next)) => {
                parts.push(format!("LIT {}", BitString::from(&bits[next..])).trim_end().to_string());
                break;
            }
            Some((op @ Op::Rpt(_), next)) => {
                parts.push(
                    format!("{} {}", op.mnemonic(), BitString::from(&bits[next..]))
                        .trim_end()
                        .to_string(),
                );
                break;
            }
            Some((op, next)) => {
                parts.push(op.mnemonic());
                ip = next;
            }
            None => {
                parts.push(format!("<truncated {}>", BitString::from(&bits[ip..])));
                break;
            }
        }
    }
    parts.join("; ")
}

struct Machine<'a> {
    program: &'a [bool],
    condition: &'a [bool],
    space: usize,
    cap: u64,
    ip: usize,
    mark: usize,
    chead: usize,
    fend: usize,
    work: Vec<bool>,
    out: Vec<bool>,
    steps: u64,
    cells_used: usize,
}

enum Step {
    Continue,
    Done(Outcome),
}

impl<'a> Machine<'a> {
    fn new(program: &'a BitString, condition: &'a BitString, limits: VmLimits) -> Self {
        Self {
            program: program.bits(),
            condition: condition.bits(),
            space: limits.space_cells,
            cap: limits.resolve_cap(program.len(), condition.len()),
            ip: 0,
            mark: 0,
            chead: 0,
            fend: condition.len(),
            work: Vec::new(),
            out: Vec::new(),
            steps: 0,
            cells_used: 0,
        }
    }

    fn finish(self, kind: Outcome) -> RunOutcome {
        RunOutcome {
            kind,
            cells_used: self.cells_used,
            steps_used: self.steps,
        }
    }

    fn field(&mut self) -> Option<(usize, usize)> {
        let span = decode_field(self.condition, self.chead, self.fend)?;
        self.chead = span.1;
        Some(span)
    }

    fn push_work(&mut self, bits: &[bool]) -> bool {
        if self.work.len() + bits.len() > self.space {
            return false;
        }
        self.work.extend_from_slice(bits);
        self.cells_used = self.cells_used.max(self.work.len());
        true
    }

    fn step(&mut self) -> Step {
        if self.ip == self.program.len() {
            return Step::Done(Outcome::Halted(BitString::from_bits(std::mem::take(&mut self.out))));
        }
        if self.steps >= self.cap {
            return Step::Done(Outcome::StepExceeded);
        }
        let Some((op, next)) = decode_op(self.program, self.ip) else {
            return Step::Done(Outcome::Invalid);
        };
        self.steps += 1;
        self.ip = next;
        match op {
            Op::Lit => {
                self.out.extend_from_slice(&self.program[next..]);
                self.ip = self.program.len();
            }
            Op::Fld => match self.field() {
                Some((a, b)) => self.out.extend_from_slice(&self.condition[a..b]),
                None => return Step::Done(Outcome::Invalid),
            },
            Op::Rpt(rr) => {
                if !self.push_work(&self.program[next..]) {
                    return Step::Done(Outcome::SpaceExceeded);
                }
                for _ in 0..(2usize << rr) {
                    self.out.extend_from_slice(&self.work);
                }
                self.ip = self.program.len();
            }
            Op::Skip(k) => {
                for _ in 0..k {
                    if self.field().is_none() {
                        return Step::Done(Outcome::Invalid);
                    }
                }
            }
            Op::Load => match self.field() {
                Some((a, b)) => {
                    if !self.push_work(&self.condition[a..b]) {
                        return Step::Done(Outcome::SpaceExceeded);
                    }
                }
                None => return Step::Done(Outcome::Invalid),
            },
            Op::Open => match decode_field(self.condition, self.chead, self.fend) {
                Some((a, b)) => {
                    self.chead = a;
                    self.fend = b;
                }
                None => return Step::Done(Outcome::Invalid),
            },
            Op::OutW => self.out.extend_from_slice(&self.work),
            Op::Cp1 | Op::Not1 => {
                if self.chead >= self.fend {
                    return Step::Done(Outcome::Invalid);
                }
                self.out.push(self.condition[self.chead] ^ (op == Op::Not1));
                self.chead += 1;
            }
            Op::Mark => self.mark = next,
            Op::Loop => {
                if self.chead < self.fend {
                    self.ip = self.mark;
                }
            }
        }
        Step::Continue
    }
}

/// Runs `program` on `condition` under `limits`.
///
/// Loop jumps are monitored: if the machine arrives at a loop target in a
/// control configuration it has already been in since its last progress on
/// (`chead`, `fend`, work length), the run can never halt, and the outcome
/// is reported as [`Outcome::StepExceeded`] with `steps_used` equal to the
/// resolved cap, exactly as [`run_program_unaccelerated`] would report.
pub fn run_program(program: &Program, condition: &BitString, limits: VmLimits) -> RunOutcome {
    let mut m = Machine::new(program, condition, limits);
    let mut progress = (m.chead, m.fend, m.work.len());
    let mut targets: Vec<usize> = Vec::new();
    loop {
        let before = m.ip;
        if let Step::Done(kind) = m.step() {
            return m.finish(kind);
        }
        // A backward transfer only happens through a taken LOOP.
        if m.ip <= before {
            let now = (m.chead, m.fend, m.work.len());
            if now != progress {
                progress = now;
                targets.clear();
            }
            if targets.contains(&m.ip) {
                m.steps = m.cap;
                return m.finish(Outcome::StepExceeded);
            }
            targets.push(m.ip);
        }
    }
}

/// Reference execution without cycle recognition: runs until halt, fault,
/// or the step cap.
pub fn run_program_unaccelerated(program: &Program, condition: &BitString, limits: VmLimits) -> RunOutcome {
    let mut m = Machine::new(program, condition, limits);
    loop {
        if let Step::Done(kind) = m.step() {
            return m.finish(kind);
        }
    }
}

/// Every bit string of length `0..=max_length`, in canonical order.
pub fn enumerate_programs(max_length: usize) -> impl Iterator<Item = Program> {
    BitString::all_up_to(max_length)
}

/// Number of programs of length at most `max_length`: `2^(max_length+1) - 1`.
pub fn program_count(max_length: usize) -> u64 {
    (1u64 << (max_length + 1)) - 1
}
