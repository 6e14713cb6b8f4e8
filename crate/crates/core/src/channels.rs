//! One-time-pad secured classical channels and the message envelope carried
//! by the scheduler.
//!
//! The outcome report has a bit-exact wire layout so independent
//! implementations interoperate: claimed bit (1 bit), qubit count N as a
//! 32-bit big-endian integer, the detection bitmap (N bits, index order),
//! then the outcomes of detected qubits packed in index order.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::qubits::BB84State;
use crate::spacetime::{Event, Wing};

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("one-time pad {pad_id} exhausted: {needed} bits requested, {remaining} remain")]
    PadExhausted {
        pad_id: u32,
        needed: usize,
        remaining: usize,
    },
    #[error("{outcomes} outcomes for {detected} detected qubits")]
    OutcomeCountMismatch { outcomes: usize, detected: usize },
    #[error("malformed outcome report: {0}")]
    MalformedReport(&'static str),
    #[error("bit strings differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// A bit string with explicit length, packed MSB-first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    bytes: Vec<u8>,
    len: usize,
}

impl Bits {
    pub fn new() -> Self {
        Bits::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Bits {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Bits::with_capacity(bits.len());
        for &b in bits {
            out.push(b);
        }
        out
    }

    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut out = Bits {
            bytes: vec![0u8; len.div_ceil(8)],
            len,
        };
        for byte in &mut out.bytes {
            *byte = rng.random();
        }
        out.mask_tail();
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        if i >= self.len {
            return None;
        }
        Some(self.bytes[i / 8] >> (7 - i % 8) & 1 == 1)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 1 << (7 - self.len % 8);
        }
        self.len += 1;
    }

    /// Append a 32-bit big-endian integer.
    pub fn push_u32_be(&mut self, v: u32) {
        for i in (0..32).rev() {
            self.push(v >> i & 1 == 1);
        }
    }

    /// Read a 32-bit big-endian integer starting at bit offset `at`.
    pub fn read_u32_be(&self, at: usize) -> Option<u32> {
        if at + 32 > self.len {
            return None;
        }
        let mut v = 0u32;
        for i in 0..32 {
            v = v << 1 | self.get(at + i).unwrap() as u32;
        }
        Some(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i).unwrap())
    }

    /// Bitwise XOR; both operands must have equal length.
    pub fn xor(&self, other: &Bits) -> Result<Bits, ChannelError> {
        if self.len != other.len {
            return Err(ChannelError::LengthMismatch(self.len, other.len));
        }
        let bytes = self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Bits {
            bytes,
            len: self.len,
        })
    }

    fn slice(&self, start: usize, len: usize) -> Bits {
        let mut out = Bits::with_capacity(len);
        for i in start..start + len {
            out.push(self.get(i).unwrap());
        }
        out
    }

    fn mask_tail(&mut self) {
        let used = self.len % 8;
        if used != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xFFu8 << (8 - used);
            }
        }
    }

    pub fn to_binary_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_binary_string(s: &str) -> Result<Bits, ChannelError> {
        let mut out = Bits::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return Err(ChannelError::MalformedReport("non-binary character")),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_binary_string())
    }
}

/// Pre-shared one-time pad. Each channel endpoint owns one mirrored copy
/// and consumes bits front-to-front; a bit range is never handed out twice.
#[derive(Debug, Clone, PartialEq)]
pub struct OneTimePad {
    pad_id: u32,
    bits: Bits,
    consumed: usize,
}

impl OneTimePad {
    pub fn from_bits(pad_id: u32, bits: Bits) -> Self {
        OneTimePad {
            pad_id,
            bits,
            consumed: 0,
        }
    }

    pub fn from_rng<R: Rng>(pad_id: u32, len: usize, rng: &mut R) -> Self {
        OneTimePad::from_bits(pad_id, Bits::random(len, rng))
    }

    pub fn pad_id(&self) -> u32 {
        self.pad_id
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn consumed_prefix(&self) -> usize {
        self.consumed
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.consumed
    }

    fn take_segment(&mut self, len: usize) -> Result<Bits, ChannelError> {
        if self.remaining() < len {
            return Err(ChannelError::PadExhausted {
                pad_id: self.pad_id,
                needed: len,
                remaining: self.remaining(),
            });
        }
        let seg = self.bits.slice(self.consumed, len);
        self.consumed += len;
        Ok(seg)
    }

    /// XOR the plaintext with the next unconsumed pad segment and advance
    /// the offset. Exhaustion is an explicit error, never silent reuse.
    pub fn encrypt(&mut self, plaintext: &Bits) -> Result<Bits, ChannelError> {
        let seg = self.take_segment(plaintext.len())?;
        plaintext.xor(&seg)
    }

    /// Inverse of `encrypt` on the mirrored pad copy; XOR is an involution,
    /// so the operation is identical and consumes the same segment.
    pub fn decrypt(&mut self, ciphertext: &Bits) -> Result<Bits, ChannelError> {
        self.encrypt(ciphertext)
    }
}

/// Agents of one protocol run, named by the point they sit next to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentId {
    AliceP,
    BobP,
    AliceWing(Wing),
    BobWing(Wing),
}

impl AgentId {
    pub const ALL: [AgentId; 6] = [
        AgentId::AliceP,
        AgentId::BobP,
        AgentId::AliceWing(Wing::Q0),
        AgentId::AliceWing(Wing::Q1),
        AgentId::BobWing(Wing::Q0),
        AgentId::BobWing(Wing::Q1),
    ];

    pub fn label(&self) -> &'static str {
        match self {
            AgentId::AliceP => "aliceP",
            AgentId::BobP => "bobP",
            AgentId::AliceWing(Wing::Q0) => "aliceQ0",
            AgentId::AliceWing(Wing::Q1) => "aliceQ1",
            AgentId::BobWing(Wing::Q0) => "bobQ0",
            AgentId::BobWing(Wing::Q1) => "bobQ1",
        }
    }

    pub fn from_label(s: &str) -> Option<AgentId> {
        AgentId::ALL.into_iter().find(|a| a.label() == s)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    QubitBatch,
    DetectionReport,
    OutcomeRelay,
    Unveil,
}

impl MessageKind {
    pub fn label(&self) -> &'static str {
        match self {
            MessageKind::QubitBatch => "qubit-batch",
            MessageKind::DetectionReport => "detection-report",
            MessageKind::OutcomeRelay => "outcome-relay",
            MessageKind::Unveil => "unveil",
        }
    }
}

/// What a message carries.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Bob's prepared states in transit to Alice.
    QubitBatch(Vec<BB84State>),
    /// Plaintext bitmap of which qubits Alice detected.
    DetectionReport(Bits),
    /// Pad-encrypted outcome report on one of Alice's internal channels.
    OutcomeRelay(Bits),
    /// Plaintext outcome report handed over to Bob's wing agent.
    Unveil(Bits),
}

impl Payload {
    pub fn kind(&self) -> MessageKind {
        match self {
            Payload::QubitBatch(_) => MessageKind::QubitBatch,
            Payload::DetectionReport(_) => MessageKind::DetectionReport,
            Payload::OutcomeRelay(_) => MessageKind::OutcomeRelay,
            Payload::Unveil(_) => MessageKind::Unveil,
        }
    }

    pub fn bits(&self) -> Option<&Bits> {
        match self {
            Payload::QubitBatch(_) => None,
            Payload::DetectionReport(b) | Payload::OutcomeRelay(b) | Payload::Unveil(b) => Some(b),
        }
    }
}

/// A message envelope: who, where and when it was emitted and received,
/// and what it carries. Causal consistency of (emission, reception) is
/// enforced by the scheduler, not at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub sender: AgentId,
    pub receiver: AgentId,
    pub emission: Event,
    pub reception: Event,
    pub payload: Payload,
}

impl Message {
    pub fn kind(&self) -> MessageKind {
        self.payload.kind()
    }
}

/// Decoded outcome report.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeReport {
    pub claimed_bit: bool,
    pub detected: Vec<bool>,
    /// Outcomes of detected qubits, in index order.
    pub outcomes: Vec<bool>,
}

impl OutcomeReport {
    /// Declared outcomes keyed by qubit index.
    pub fn declared(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.detected
            .iter()
            .enumerate()
            .filter(|(_, &d)| d)
            .zip(&self.outcomes)
            .map(|((i, _), &o)| (i, o))
    }
}

/// Serialize a claimed bit, detection bitmap and outcome list into the
/// wire layout described at module level.
pub fn encode_outcomes(
    claimed_bit: bool,
    outcomes: &[bool],
    detected: &[bool],
) -> Result<Bits, ChannelError> {
    let detected_count = detected.iter().filter(|&&d| d).count();
    if outcomes.len() != detected_count {
        return Err(ChannelError::OutcomeCountMismatch {
            outcomes: outcomes.len(),
            detected: detected_count,
        });
    }
    if detected.len() > u32::MAX as usize {
        return Err(ChannelError::MalformedReport("qubit count exceeds u32"));
    }
    let mut bits = Bits::with_capacity(33 + detected.len() + outcomes.len());
    bits.push(claimed_bit);
    bits.push_u32_be(detected.len() as u32);
    for &d in detected {
        bits.push(d);
    }
    for &o in outcomes {
        bits.push(o);
    }
    Ok(bits)
}

/// Exact inverse of `encode_outcomes`; rejects any length inconsistency.
pub fn decode_outcomes(bits: &Bits) -> Result<OutcomeReport, ChannelError> {
    if bits.len() < 33 {
        return Err(ChannelError::MalformedReport("shorter than header"));
    }
    let claimed_bit = bits.get(0).unwrap();
    let n = bits.read_u32_be(1).unwrap() as usize;
    if bits.len() < 33 + n {
        return Err(ChannelError::MalformedReport("truncated detection bitmap"));
    }
    let detected: Vec<bool> = (0..n).map(|i| bits.get(33 + i).unwrap()).collect();
    let detected_count = detected.iter().filter(|&&d| d).count();
    if bits.len() != 33 + n + detected_count {
        return Err(ChannelError::MalformedReport("outcome section length"));
    }
    let outcomes: Vec<bool> = (0..detected_count)
        .map(|i| bits.get(33 + n + i).unwrap())
        .collect();
    Ok(OutcomeReport {
        claimed_bit,
        detected,
        outcomes,
    })
}

/// Plaintext detection report sent back to Bob at P: qubit count then the
/// detection bitmap.
pub fn encode_detection(detected: &[bool]) -> Bits {
    let mut bits = Bits::with_capacity(32 + detected.len());
    bits.push_u32_be(detected.len() as u32);
    for &d in detected {
        bits.push(d);
    }
    bits
}

pub fn decode_detection(bits: &Bits) -> Result<Vec<bool>, ChannelError> {
    let n = bits
        .read_u32_be(0)
        .ok_or(ChannelError::MalformedReport("shorter than header"))? as usize;
    if bits.len() != 32 + n {
        return Err(ChannelError::MalformedReport("detection bitmap length"));
    }
    Ok((0..n).map(|i| bits.get(32 + i).unwrap()).collect())
}
