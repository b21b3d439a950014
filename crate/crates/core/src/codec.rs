// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Payload-level XOR encoding and per-client decode simulation.
//!
//! A client decodes a frame when exactly one symbol of its support is
//! unknown to it; the recovered payload joins its cache and may enable
//! later frames. Frames are processed once, in transmission order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::code::IndexCode;
use crate::instance::{symbol_name, ClientId, Instance, SymbolId};

/// Payload draws used by [`verify_code_valid`].
pub const VERIFY_DRAWS: u64 = 3;
const VERIFY_SEED: u64 = 0x5eed_c0de;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("transmission {transmission} references unknown symbol {}", symbol_name(*.symbol))]
    UnknownSymbol {
        transmission: usize,
        symbol: SymbolId,
    },
    #[error("{frames} frames for a code of length {code_len}")]
    FrameCount { frames: usize, code_len: usize },
}

/// True payloads, all of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PayloadStore {
    payload_size: usize,
    payloads: Vec<Vec<u8>>,
}

impl PayloadStore {
    /// # Panics
    /// If payload lengths differ.
    pub fn new(payloads: Vec<Vec<u8>>) -> Self {
        let payload_size = payloads.first().map_or(0, Vec::len);
        assert!(
            payloads.iter().all(|p| p.len() == payload_size),
            "payloads must share one length"
        );
        Self {
            payload_size,
            payloads,
        }
    }

    pub fn random(symbols: usize, payload_size: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let payloads = (0..symbols)
            .map(|_| {
                let mut p = vec![0u8; payload_size];
                rng.fill_bytes(&mut p);
                p
            })
            .collect();
        Self {
            payload_size,
            payloads,
        }
    }

    pub fn payload_size(&self) -> usize {
        self.payload_size
    }

    pub fn symbols(&self) -> usize {
        self.payloads.len()
    }

    pub fn get(&self, s: SymbolId) -> Option<&[u8]> {
        self.payloads.get(s).map(Vec::as_slice)
    }
}

fn xor_into(acc: &mut [u8], other: &[u8]) {
    acc.iter_mut().zip(other).for_each(|(a, b)| *a ^= b);
}

/// Frame `t` is the bytewise XOR of transmission `t`'s support.
pub fn encode(code: &IndexCode, store: &PayloadStore) -> Result<Vec<Vec<u8>>, CodecError> {
    code.transmissions()
        .iter()
        .enumerate()
        .map(|(t, tx)| {
            let mut frame = vec![0u8; store.payload_size()];
            for &s in tx.support() {
                let p = store.get(s).ok_or(CodecError::UnknownSymbol {
                    transmission: t,
                    symbol: s,
                })?;
                xor_into(&mut frame, p);
            }
            Ok(frame)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClientState {
    /// Symbols the client can reconstruct, starting from its has set.
    pub known: BTreeSet<SymbolId>,
    /// Payloads decoded from frames (side information excluded).
    pub recovered_payloads: BTreeMap<SymbolId, Vec<u8>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecodeMode {
    /// One pass over frames in transmission order.
    #[default]
    Sequential,
    /// Re-scan all frames until nothing new decodes. Diagnostic only.
    Fixpoint,
}

/// Runs every client over the frames.
///
/// Cached payloads for the has sets are taken from `store`; side
/// information that is out of range for the store is ignored.
pub fn simulate_decode(
    inst: &Instance,
    code: &IndexCode,
    frames: &[Vec<u8>],
    store: &PayloadStore,
    mode: DecodeMode,
) -> Result<Vec<ClientState>, CodecError> {
    if frames.len() != code.len() {
        return Err(CodecError::FrameCount {
            frames: frames.len(),
            code_len: code.len(),
        });
    }
    Ok(inst
        .clients
        .iter()
        .map(|client| {
            let mut payloads: BTreeMap<SymbolId, Vec<u8>> = client
                .has
                .iter()
                .filter_map(|&s| store.get(s).map(|p| (s, p.to_vec())))
                .collect();
            let mut known: BTreeSet<SymbolId> = client.has.clone();
            let mut recovered = BTreeMap::new();
            loop {
                let mut progressed = false;
                for (tx, frame) in code.transmissions().iter().zip(frames) {
                    let mut missing = tx.support().iter().filter(|s| !known.contains(s));
                    let (Some(&x), None) = (missing.next(), missing.next()) else {
                        continue;
                    };
                    let mut value = frame.clone();
                    let mut complete = true;
                    for s in tx.support().iter().filter(|&&s| s != x) {
                        match payloads.get(s) {
                            Some(p) => xor_into(&mut value, p),
                            None => complete = false,
                        }
                    }
                    if !complete {
                        continue;
                    }
                    known.insert(x);
                    payloads.insert(x, value.clone());
                    recovered.insert(x, value);
                    progressed = true;
                }
                if mode == DecodeMode::Sequential || !progressed {
                    break;
                }
            }
            ClientState {
                known,
                recovered_payloads: recovered,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub valid: bool,
    /// Clients missing wanted symbols at the end, with what they lack.
    pub unsatisfied: Vec<(ClientId, Vec<SymbolId>)>,
    /// `(client, symbol)` pairs whose decoded bytes differ from the truth.
    pub corrupted: Vec<(ClientId, SymbolId)>,
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return write!(f, "valid: every client decodes its want set");
        }
        writeln!(f, "invalid:")?;
        for (c, missing) in &self.unsatisfied {
            let names: Vec<_> = missing.iter().map(|&s| symbol_name(s)).collect();
            writeln!(f, "  c{} cannot decode {}", c + 1, names.join(", "))?;
        }
        for (c, s) in &self.corrupted {
            writeln!(f, "  c{} decoded wrong bytes for {}", c + 1, symbol_name(*s))?;
        }
        Ok(())
    }
}

/// Certifies a code with [`VERIFY_DRAWS`] random payload draws at the
/// instance's payload size.
pub fn verify_code_valid(inst: &Instance, code: &IndexCode) -> ValidityReport {
    verify_code_with(inst, code, inst.payload_size(), VERIFY_DRAWS, VERIFY_SEED, DecodeMode::Sequential)
}

pub fn verify_code_with(
    inst: &Instance,
    code: &IndexCode,
    payload_size: usize,
    draws: u64,
    seed: u64,
    mode: DecodeMode,
) -> ValidityReport {
    let mut unsatisfied: BTreeMap<ClientId, BTreeSet<SymbolId>> = BTreeMap::new();
    let mut corrupted: BTreeSet<(ClientId, SymbolId)> = BTreeSet::new();
    let mut broken = false;
    for draw in 0..draws.max(1) {
        let store = PayloadStore::random(inst.k, payload_size, seed.wrapping_add(draw));
        let states = match encode(code, &store)
            .and_then(|frames| simulate_decode(inst, code, &frames, &store, mode))
        {
            Ok(s) => s,
            Err(_) => {
                broken = true;
                break;
            }
        };
        for (ci, (client, state)) in inst.clients.iter().zip(&states).enumerate() {
            let missing: BTreeSet<_> = client.want.difference(&state.known).copied().collect();
            if !missing.is_empty() {
                unsatisfied.entry(ci).or_default().extend(missing);
            }
            for (&s, bytes) in &state.recovered_payloads {
                if store.get(s) != Some(bytes.as_slice()) {
                    corrupted.insert((ci, s));
                }
            }
        }
    }
    if broken {
        // Unknown symbols: nobody can be certified.
        for (ci, client) in inst.clients.iter().enumerate() {
            if !client.want.is_empty() {
                unsatisfied.insert(ci, client.want.clone());
            }
        }
    }
    ValidityReport {
        valid: unsatisfied.is_empty() && corrupted.is_empty(),
        unsatisfied: unsatisfied
            .into_iter()
            .map(|(c, s)| (c, s.into_iter().collect()))
            .collect(),
        corrupted: corrupted.into_iter().collect(),
    }
}
