//! Deterministic two-party protocol for tolerant linear-isomorphism testing.
//!
//! Alice holds `f`, Bob holds `g`. They first exchange `ceil(||.||_{1,1/3})`
//! as Elias-gamma integers; whoever holds the smaller norm becomes the sender.
//! The sender builds a sparse sign representation `F` of its function,
//! changes coordinates so that the characters of `F` live in
//! `span{e_1..e_l}`, and ships the result. The receiver rebuilds `F` up to
//! that change of coordinates and compares it with its own function under
//! the linear (or affine) distance.
//!
//! Payload layout of the sender's message, all integers Elias-gamma coded:
//!
//! ```text
//! gamma(l + 1) | l sign bits for e_1..e_l | gamma(w + 1)
//!   | w x ( l-bit label, coordinate 1 first | sign bit | gamma(multiplicity) )
//!   | l x gamma(multiplicity of e_i)
//! ```
//!
//! A sign bit is `1` for `+1`. Characters sampled more than once are merged
//! into one entry carrying the absolute net multiplicity.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::f2::{complete_basis, MatrixF2, VectorF2};
use crate::fourier::{
    affine_distance, linear_distance, sign_of_weighted_parities, BooleanFunction,
};
use crate::lp::approx_spectral_norm;
use crate::sampler::{find_close_sign_function, SignRepresentation};
use crate::Rational;

/// Approximation level of the norms compared in the first step.
pub const PROTOCOL_ALPHA: f64 = 1.0 / 3.0;

// Slack for comparing exact dyadic distances against float thresholds.
const THRESHOLD_TOL: f64 = 1e-12;

/// A string of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn append(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Appends the low `width` bits of `value`, least significant first.
    pub fn push_lsb_first(&mut self, value: u32, width: usize) {
        for i in 0..width {
            self.push((value >> i) & 1 == 1);
        }
    }

    pub fn push_gamma(&mut self, k: u64) {
        self.append(&elias_gamma(k));
    }

    /// A prefix of `len` bits.
    pub fn truncated(&self, len: usize) -> BitString {
        BitString(self.0[..len.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 1,
                    column: i + 1,
                    msg: format!("illegal bit {other:?}"),
                }),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitString)
    }
}

/// Elias-gamma code of `k >= 1`: `floor(log2 k)` zeros, then `k` in binary.
///
/// Callers that need to send zero encode `k + 1`.
pub fn elias_gamma(k: u64) -> BitString {
    assert!(k >= 1, "Elias-gamma is defined for positive integers");
    let width = 64 - k.leading_zeros() as usize;
    let mut out = BitString(vec![false; width - 1]);
    for i in (0..width).rev() {
        out.push((k >> i) & 1 == 1);
    }
    out
}

/// Sequential reader over a [`BitString`].
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        Self {
            bits: &bits.0,
            pos: 0,
        }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    fn truncated(&self) -> Error {
        Error::Decode {
            pos: self.pos,
            msg: "unexpected end of payload".into(),
        }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let b = *self.bits.get(self.pos).ok_or_else(|| self.truncated())?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_lsb_first(&mut self, width: usize) -> Result<u32> {
        let mut v = 0;
        for i in 0..width {
            if self.read_bit()? {
                v |= 1 << i;
            }
        }
        Ok(v)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        let start = self.pos;
        let mut zeros = 0;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(Error::Decode {
                    pos: start,
                    msg: "Elias-gamma prefix too long".into(),
                });
            }
        }
        let mut k: u64 = 1;
        for _ in 0..zeros {
            k = (k << 1) | self.read_bit()? as u64;
        }
        Ok(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    fn from(sender: Party) -> Self {
        match sender {
            Party::Alice => Direction::AliceToBob,
            Party::Bob => Direction::BobToAlice,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    CompareNorms,
    SendF,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub direction: Direction,
    pub step: Step,
    pub payload: BitString,
}

impl Message {
    pub fn bit_len(&self) -> usize {
        self.payload.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    /// The distance fell strictly between the two thresholds, which cannot
    /// happen when the inputs satisfy the promise.
    PromiseViolation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DistanceMode {
    #[default]
    Linear,
    Affine,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolParams {
    pub epsilon: f64,
    pub omega: f64,
    pub mode: DistanceMode,
}

impl ProtocolParams {
    pub fn new(epsilon: f64, omega: f64, mode: DistanceMode) -> Result<Self> {
        let p = Self {
            epsilon,
            omega,
            mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.omega > 0.0 && self.epsilon + self.omega <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need epsilon >= 0, omega > 0, epsilon + omega <= 1 (got {}, {})",
                self.epsilon, self.omega
            )));
        }
        Ok(())
    }

    pub fn accept_threshold(&self) -> f64 {
        self.epsilon + self.omega / 4.0
    }

    pub fn reject_threshold(&self) -> f64 {
        self.epsilon + 3.0 * self.omega / 4.0
    }
}

/// Everything exchanged in one run, plus the receiver's conclusion.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub total_bits: usize,
    /// `None` for distance estimation runs.
    pub verdict: Option<Verdict>,
    /// Distance between the rebuilt function and the receiver's function.
    pub distance: Rational,
    pub sender: Party,
    /// `min(||f||_{1,1/3}, ||g||_{1,1/3})`.
    pub t: f64,
}

impl Transcript {
    fn new(
        messages: Vec<Message>,
        verdict: Option<Verdict>,
        distance: Rational,
        sender: Party,
        t: f64,
    ) -> Self {
        let total_bits = messages.iter().map(Message::bit_len).sum();
        Self {
            messages,
            total_bits,
            verdict,
            distance,
            sender,
            t,
        }
    }

    /// Bits sent by one party.
    pub fn bits_from(&self, party: Party) -> usize {
        let dir = Direction::from(party);
        self.messages
            .iter()
            .filter(|m| m.direction == dir)
            .map(Message::bit_len)
            .sum()
    }

    /// Line-oriented rendering: one line per message, then the total and the
    /// conclusion.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&format!(
                "{:?} {:?} {} {}\n",
                m.direction,
                m.step,
                m.bit_len(),
                m.payload
            ));
        }
        out.push_str(&format!("TOTAL {}\n", self.total_bits));
        let d = format!("d={}/{}", self.distance.numer(), self.distance.denom());
        match self.verdict {
            Some(v) => out.push_str(&format!("VERDICT {v:?} {d}\n")),
            None => out.push_str(&format!("ESTIMATE {d}\n")),
        }
        out
    }
}

/// `c * t^4 * log2(1/omega)^2`.
pub fn communication_budget(c: f64, t: f64, omega: f64) -> f64 {
    let l = (1.0 / omega).log2();
    c * t.powi(4) * l * l
}

/// First step: Alice sends `gamma(kf)`, Bob answers `gamma(kg)`. Alice
/// becomes the sender iff `kf <= kg`.
pub fn step1_compare_norms(kf: u64, kg: u64) -> (Party, usize) {
    let (winner, msgs) = step1_messages(kf, kg);
    (winner, msgs.iter().map(Message::bit_len).sum())
}

fn step1_messages(kf: u64, kg: u64) -> (Party, Vec<Message>) {
    let msgs = vec![
        Message {
            direction: Direction::AliceToBob,
            step: Step::CompareNorms,
            payload: elias_gamma(kf.max(1)),
        },
        Message {
            direction: Direction::BobToAlice,
            step: Step::CompareNorms,
            payload: elias_gamma(kg.max(1)),
        },
    ];
    let winner = if kf <= kg { Party::Alice } else { Party::Bob };
    (winner, msgs)
}

/// The sender's message and the data behind it.
#[derive(Clone, Debug)]
pub struct EncodedFunction {
    pub payload: BitString,
    /// `M` such that the receiver rebuilds exactly `F o M`.
    pub matrix: MatrixF2,
    pub representation: SignRepresentation,
    /// `l`, the dimension of the span of the sampled characters.
    pub rank: usize,
    /// `w`, the number of merged characters outside the chosen basis.
    pub extra: usize,
}

/// Canonicalizes a sign representation and serializes it.
pub fn encode_representation(rep: SignRepresentation) -> Result<EncodedFunction> {
    let n = rep.function.n();
    let merged = rep.parities.merged();
    let support: Vec<VectorF2> = merged
        .iter()
        .map(|&(s, _)| VectorF2::new(n, s))
        .collect::<Result<_>>()?;
    let completion = complete_basis(n, &support)?;
    // zero when every sampled character is chi_0 or all weights cancel
    let rank = completion.rank();
    let transform = completion.transform;

    let mut payload = BitString::new();
    payload.push_gamma(rank as u64 + 1);
    for &i in &completion.pivots {
        payload.push(merged[i].1 > 0);
    }
    let extra: Vec<usize> = (0..merged.len())
        .filter(|i| !completion.pivots.contains(i))
        .collect();
    payload.push_gamma(extra.len() as u64 + 1);
    for &i in &extra {
        let (s, w) = merged[i];
        let label = transform.apply(s);
        debug_assert!(label >> rank == 0);
        payload.push_lsb_first(label, rank);
        payload.push(w > 0);
        payload.push_gamma(w.unsigned_abs());
    }
    for &i in &completion.pivots {
        payload.push_gamma(merged[i].1.unsigned_abs());
    }
    Ok(EncodedFunction {
        payload,
        // chi_S(M x) = chi_{M^T S}(x), so M^T = N puts S at N S
        matrix: transform.transpose(),
        extra: extra.len(),
        rank,
        representation: rep,
    })
}

/// Builds `F` with `delta(f, F) <= delta` and encodes it.
pub fn sender_encode(f: &BooleanFunction, delta: f64, seed: u64) -> Result<EncodedFunction> {
    let rep = find_close_sign_function(f, PROTOCOL_ALPHA, delta, seed)?;
    encode_representation(rep)
}

/// Alice's message after winning the first step: `F` within `omega / 4`.
pub fn alice_encode_f(f: &BooleanFunction, omega: f64, seed: u64) -> Result<EncodedFunction> {
    sender_encode(f, omega / 4.0, seed)
}

/// Parses a payload into `(label, signed multiplicity)` pairs.
pub fn decode_payload(n: usize, payload: &BitString) -> Result<Vec<(u32, i64)>> {
    let mut r = BitReader::new(payload);
    let rank = r.read_gamma()? - 1;
    if rank as usize > n {
        return Err(Error::Decode {
            pos: 0,
            msg: format!("rank {rank} exceeds {n}"),
        });
    }
    let rank = rank as usize;
    let mut basis_signs = Vec::with_capacity(rank);
    for _ in 0..rank {
        basis_signs.push(if r.read_bit()? { 1i64 } else { -1 });
    }
    let extra = r.read_gamma()? - 1;
    // labels are distinct and avoid e_1..e_l
    if extra > (1u64 << rank) - rank as u64 {
        return Err(Error::Decode {
            pos: r.position(),
            msg: format!("{extra} labels cannot be distinct in dimension {rank}"),
        });
    }
    let mut terms = Vec::with_capacity(rank + extra as usize);
    for _ in 0..extra {
        let label = r.read_lsb_first(rank)?;
        let sign = if r.read_bit()? { 1i64 } else { -1 };
        let mult = r.read_gamma()? as i64;
        terms.push((label, sign * mult));
    }
    for (i, sign) in basis_signs.into_iter().enumerate() {
        let mult = r.read_gamma()? as i64;
        terms.push((1 << i, sign * mult));
    }
    if r.remaining() != 0 {
        return Err(Error::Decode {
            pos: r.position(),
            msg: format!("{} trailing bits", r.remaining()),
        });
    }
    Ok(terms)
}

/// Rebuilds the sender's function from a payload.
pub fn decode_function(n: usize, payload: &BitString) -> Result<BooleanFunction> {
    sign_of_weighted_parities(n, &decode_payload(n, payload)?)
}

fn distance_in_mode(
    f: &BooleanFunction,
    g: &BooleanFunction,
    mode: DistanceMode,
) -> Result<Rational> {
    Ok(match mode {
        DistanceMode::Linear => linear_distance(f, g)?.distance,
        DistanceMode::Affine => affine_distance(f, g)?.distance,
    })
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The receiver's last step: rebuild `F'` and threshold `delta_L(F', g)`.
pub fn bob_decide(
    g: &BooleanFunction,
    payload: &BitString,
    params: &ProtocolParams,
) -> Result<(Verdict, Rational)> {
    params.validate()?;
    let rebuilt = decode_function(g.n(), payload)?;
    let d = distance_in_mode(&rebuilt, g, params.mode)?;
    let dv = to_f64(d);
    let verdict = if dv <= params.accept_threshold() + THRESHOLD_TOL {
        Verdict::Accept
    } else if dv >= params.reject_threshold() - THRESHOLD_TOL {
        Verdict::Reject
    } else {
        Verdict::PromiseViolation
    };
    Ok((verdict, d))
}

struct Roles<'a> {
    sender: Party,
    sender_fn: &'a BooleanFunction,
    receiver_fn: &'a BooleanFunction,
    messages: Vec<Message>,
    t: f64,
}

fn negotiate<'a>(f: &'a BooleanFunction, g: &'a BooleanFunction) -> Result<Roles<'a>> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: g.n(),
        });
    }
    let nf = approx_spectral_norm(f, PROTOCOL_ALPHA)?;
    let ng = approx_spectral_norm(g, PROTOCOL_ALPHA)?;
    let (sender, messages) = step1_messages(nf.ceiling(), ng.ceiling());
    let (sender_fn, receiver_fn) = match sender {
        Party::Alice => (f, g),
        Party::Bob => (g, f),
    };
    Ok(Roles {
        sender,
        sender_fn,
        receiver_fn,
        messages,
        t: nf.value.min(ng.value),
    })
}

/// Runs the full protocol on `(f, g)`. Deterministic in `(f, g, params, seed)`.
pub fn run_protocol(
    f: &BooleanFunction,
    g: &BooleanFunction,
    params: &ProtocolParams,
    seed: u64,
) -> Result<Transcript> {
    params.validate()?;
    let max = match params.mode {
        DistanceMode::Linear => crate::f2::MAX_ENUM_DIM,
        DistanceMode::Affine => crate::fourier::MAX_AFFINE_DIM,
    };
    crate::f2::check_dim("protocol", f.n(), max)?;
    let mut roles = negotiate(f, g)?;
    let encoded = alice_encode_f(roles.sender_fn, params.omega, seed)?;
    let (verdict, d) = bob_decide(roles.receiver_fn, &encoded.payload, params)?;
    roles.messages.push(Message {
        direction: Direction::from(roles.sender),
        step: Step::SendF,
        payload: encoded.payload,
    });
    Ok(Transcript::new(
        roles.messages,
        Some(verdict),
        d,
        roles.sender,
        roles.t,
    ))
}

/// One-shot distance estimate: the sender ships `F` with
/// `delta(F, own) <= epsilon`, the receiver outputs `delta_L(F', other)`,
/// which is within `epsilon` of `delta_L(f, g)`.
pub fn estimate_linear_distance(
    f: &BooleanFunction,
    g: &BooleanFunction,
    epsilon: f64,
    seed: u64,
) -> Result<(Rational, Transcript)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} outside (0, 1)"
        )));
    }
    crate::f2::check_dim("distance estimation", f.n(), crate::f2::MAX_ENUM_DIM)?;
    let mut roles = negotiate(f, g)?;
    // the sampler caps its target distance at 1/2
    let encoded = sender_encode(roles.sender_fn, epsilon.min(0.5), seed)?;
    let rebuilt = decode_function(roles.receiver_fn.n(), &encoded.payload)?;
    let delta = linear_distance(&rebuilt, roles.receiver_fn)?.distance;
    roles.messages.push(Message {
        direction: Direction::from(roles.sender),
        step: Step::SendF,
        payload: encoded.payload,
    });
    let transcript = Transcript::new(roles.messages, None, delta, roles.sender, roles.t);
    Ok((delta, transcript))
}
