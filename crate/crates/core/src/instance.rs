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

//! The index coding problem instance: clients with has/want sets over a
//! universe of `k` symbols.
//!
//! Symbols and clients are 0-based internally. Everything user-facing
//! (files, `Display`, DOT) uses 1-based names: symbol `p1`, client `c1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::IndexCode;

/// 0-based symbol id; `p{id + 1}` in files.
pub type SymbolId = usize;
/// 0-based client id; `c{id + 1}` in reports.
pub type ClientId = usize;

/// Formats a 0-based symbol id with its 1-based file name.
pub fn symbol_name(id: SymbolId) -> String {
    format!("p{}", id + 1)
}

/// Parses `p<N>` with `N >= 1` into a 0-based id.
pub fn parse_symbol_name(name: &str) -> Option<SymbolId> {
    let digits = name.strip_prefix('p')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    match digits.parse::<usize>() {
        Ok(n) if n >= 1 => Some(n - 1),
        _ => None,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Client {
    pub has: BTreeSet<SymbolId>,
    pub want: BTreeSet<SymbolId>,
}

impl Client {
    pub fn new<H, W>(has: H, want: W) -> Self
    where
        H: IntoIterator<Item = SymbolId>,
        W: IntoIterator<Item = SymbolId>,
    {
        Self {
            has: has.into_iter().collect(),
            want: want.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    /// Size of the symbol universe.
    pub k: usize,
    /// Payload length in bytes; `None` means the file omitted it (treated as 1).
    pub payload_size_bytes: Option<usize>,
    pub clients: Vec<Client>,
}

impl Instance {
    pub fn new(k: usize, clients: Vec<Client>) -> Self {
        Self {
            k,
            payload_size_bytes: None,
            clients,
        }
    }

    /// Builds a single-unicast instance: client `i` wants `p_i` and holds
    /// `has_sets[i]`.
    pub fn single_unicast<S>(has_sets: Vec<S>) -> Self
    where
        S: IntoIterator<Item = SymbolId>,
    {
        let n = has_sets.len();
        let clients = has_sets
            .into_iter()
            .enumerate()
            .map(|(i, has)| Client::new(has, [i]))
            .collect();
        Self::new(n, clients)
    }

    pub fn n(&self) -> usize {
        self.clients.len()
    }

    pub fn payload_size(&self) -> usize {
        self.payload_size_bytes.unwrap_or(1)
    }

    /// `k = n` and client `i` wants exactly `{p_i}`.
    pub fn is_single_unicast(&self) -> bool {
        self.k == self.n()
            && self
                .clients
                .iter()
                .enumerate()
                .all(|(i, c)| c.want.len() == 1 && c.want.contains(&i))
    }

    /// Lists every broken invariant; empty means the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.payload_size_bytes == Some(0) {
            out.push(Violation {
                client: None,
                rule: Rule::PayloadSize,
                detail: "payload_size_bytes must be positive".into(),
            });
        }
        for (ci, c) in self.clients.iter().enumerate() {
            for (set, label) in [(&c.has, "has"), (&c.want, "want")] {
                for &s in set.iter().filter(|&&s| s >= self.k) {
                    out.push(Violation {
                        client: Some(ci),
                        rule: Rule::SymbolOutOfRange,
                        detail: format!(
                            "{} set names {} but k = {}",
                            label,
                            symbol_name(s),
                            self.k
                        ),
                    });
                }
            }
            for &s in c.want.intersection(&c.has) {
                out.push(Violation {
                    client: Some(ci),
                    rule: Rule::WantsHeldSymbol,
                    detail: format!("{} is both wanted and held", symbol_name(s)),
                });
            }
        }
        out
    }

    /// Reduces a unicast instance to single-unicast form: one virtual client
    /// per wanted symbol, inheriting the has set of the client that wants it.
    ///
    /// Virtual clients are ordered by the original id of the symbol they
    /// want, so virtual client `i` wants symbol `i` of the compacted universe.
    /// Symbols nobody wants are dropped (also from has sets) and clients with
    /// empty want sets vanish.
    pub fn reduce_to_single_unicast(&self) -> Result<Reduction, ReduceError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(ReduceError::Invalid(violations));
        }
        let mut wanted_by: BTreeMap<SymbolId, ClientId> = BTreeMap::new();
        for (ci, c) in self.clients.iter().enumerate() {
            for &s in &c.want {
                if let Some(&other) = wanted_by.get(&s) {
                    return Err(ReduceError::Multicast {
                        symbol: s,
                        first: other,
                        second: ci,
                    });
                }
                wanted_by.insert(s, ci);
            }
        }
        let symbol_origin: Vec<SymbolId> = wanted_by.keys().copied().collect();
        let compact: BTreeMap<SymbolId, SymbolId> = symbol_origin
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let client_origin: Vec<ClientId> = wanted_by.values().copied().collect();
        let clients = client_origin
            .iter()
            .enumerate()
            .map(|(v, &orig)| {
                let has = self.clients[orig]
                    .has
                    .iter()
                    .filter_map(|s| compact.get(s).copied());
                Client::new(has, [v])
            })
            .collect();
        Ok(Reduction {
            instance: Instance {
                k: symbol_origin.len(),
                payload_size_bytes: self.payload_size_bytes,
                clients,
            },
            client_origin,
            symbol_origin,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if file.n != file.clients.len() {
            return Err(ParseError::Field {
                field: "n".into(),
                message: format!(
                    "declares {} clients but `clients` has {}",
                    file.n,
                    file.clients.len()
                ),
            });
        }
        Ok(Self {
            k: file.k,
            payload_size_bytes: file.payload_size_bytes,
            clients: file
                .clients
                .into_iter()
                .map(|c| Client {
                    has: c.has.into_iter().map(|s| s.0).collect(),
                    want: c.want.into_iter().map(|s| s.0).collect(),
                })
                .collect(),
        })
    }

    /// Canonical pretty-printed JSON document.
    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            n: self.n(),
            k: self.k,
            payload_size_bytes: self.payload_size_bytes,
            clients: self
                .clients
                .iter()
                .map(|c| ClientFile {
                    has: c.has.iter().map(|&s| Symbol(s)).collect(),
                    want: c.want.iter().map(|&s| Symbol(s)).collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
        s.push('\n');
        s
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |set: &BTreeSet<SymbolId>| {
            set.iter().map(|&s| symbol_name(s)).collect::<Vec<_>>().join(",")
        };
        writeln!(f, "n={} k={}", self.n(), self.k)?;
        for (i, c) in self.clients.iter().enumerate() {
            writeln!(f, "c{}: W={{{}}} H={{{}}}", i + 1, names(&c.want), names(&c.has))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    SymbolOutOfRange,
    WantsHeldSymbol,
    PayloadSize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub client: Option<ClientId>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.client {
            Some(c) => write!(f, "client c{}: {}", c + 1, self.detail),
            None => write!(f, "{}", self.detail),
        }
    }
}

/// Output of [`Instance::reduce_to_single_unicast`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub instance: Instance,
    /// `client_origin[v]` is the original client behind virtual client `v`.
    pub client_origin: Vec<ClientId>,
    /// `symbol_origin[s]` is the original id of compacted symbol `s`.
    pub symbol_origin: Vec<SymbolId>,
}

impl Reduction {
    /// Rewrites a code over the compacted universe into original symbol ids.
    pub fn lift_code(&self, code: &IndexCode) -> IndexCode {
        IndexCode::new(
            code.transmissions()
                .iter()
                .map(|t| t.support().iter().map(|&s| self.symbol_origin[s]).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("symbol {} is wanted by both c{} and c{}", symbol_name(*.symbol), .first + 1, .second + 1)]
    Multicast {
        symbol: SymbolId,
        first: ClientId,
        second: ClientId,
    },
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

pub(crate) fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

/// Coding gain `k / ℓ`, kept as an exact ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodingGain {
    symbols: usize,
    length: usize,
}

impl CodingGain {
    /// `None` when `length` is zero.
    pub fn new(symbols: usize, length: usize) -> Option<Self> {
        (length > 0).then_some(Self { symbols, length })
    }

    pub fn value(&self) -> f64 {
        self.symbols as f64 / self.length as f64
    }

    /// Numerator and denominator in lowest terms.
    pub fn reduced(&self) -> (usize, usize) {
        let g = gcd(self.symbols, self.length);
        (self.symbols / g, self.length / g)
    }
}

impl fmt::Display for CodingGain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.reduced();
        write!(f, "{num}/{den} ({:.4})", self.value())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Symbol(SymbolId);

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&symbol_name(self.0))
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        parse_symbol_name(&name)
            .map(Symbol)
            .ok_or_else(|| de::Error::custom(format!("bad symbol name `{name}`, expected p1, p2, ...")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payload_size_bytes: Option<usize>,
    clients: Vec<ClientFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClientFile {
    has: Vec<Symbol>,
    want: Vec<Symbol>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, Fixture};

    #[test]
    fn motivating_example_is_valid() {
        assert!(fixture(Fixture::Motivating).validate().is_empty());
    }

    #[test]
    fn want_has_overlap_names_client() {
        let inst = Instance::single_unicast(vec![vec![0, 1], vec![]]);
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].client, Some(0));
        assert_eq!(v[0].rule, Rule::WantsHeldSymbol);
        assert!(v[0].to_string().starts_with("client c1"));
    }

    #[test]
    fn out_of_range_symbol_names_client() {
        let mut inst = fixture(Fixture::Motivating);
        inst.clients[1].has.insert(inst.k);
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].client, Some(1));
        assert_eq!(v[0].rule, Rule::SymbolOutOfRange);
        assert!(v[0].to_string().contains("p6"));
    }

    #[test]
    fn parse_motivating_fixture_file() {
        let text = r#"{
          "n": 5, "k": 5,
          "clients": [
            {"has": ["p2"], "want": ["p1"]},
            {"has": ["p3", "p4"], "want": ["p2"]},
            {"has": ["p1", "p4"], "want": ["p3"]},
            {"has": ["p1", "p5"], "want": ["p4"]},
            {"has": ["p2", "p3"], "want": ["p5"]}
          ]
        }"#;
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.clients[4].has, BTreeSet::from([1, 2]));
        assert_eq!(inst, fixture(Fixture::Motivating));
    }

    #[test]
    fn empty_document_round_trips() {
        let inst = Instance::parse(r#"{"n":0,"k":0,"clients":[]}"#).unwrap();
        assert_eq!(inst.n(), 0);
        let text = inst.to_json();
        assert_eq!(text, "{\n  \"n\": 0,\n  \"k\": 0,\n  \"clients\": []\n}\n");
        assert_eq!(Instance::parse(&text).unwrap(), inst);
    }

    #[test]
    fn unknown_field_is_named() {
        let err = Instance::parse(r#"{"n":0,"k":0,"clients":[],"wants":1}"#).unwrap_err();
        assert!(err.to_string().contains("wants"), "{err}");
        let err = Instance::parse(r#"{"n":1,"k":1,"clients":[{"has":[],"wnt":["p1"]}]}"#)
            .unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
        assert!(err.to_string().contains("wnt"), "{err}");
    }

    #[test]
    fn bad_symbol_and_count_mismatch() {
        let err = Instance::parse(r#"{"n":1,"k":1,"clients":[{"has":["q1"],"want":["p1"]}]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("q1"));
        let err = Instance::parse(r#"{"n":2,"k":1,"clients":[{"has":[],"want":["p1"]}]}"#)
            .unwrap_err();
        assert!(matches!(err, ParseError::Field { ref field, .. } if field == "n"));
        assert_eq!(parse_symbol_name("p0"), None);
        assert_eq!(parse_symbol_name("p+1"), None);
        assert_eq!(parse_symbol_name("p12"), Some(11));
    }

    #[test]
    fn reduction_of_single_unicast_is_identity() {
        let inst = fixture(Fixture::Motivating);
        let r = inst.reduce_to_single_unicast().unwrap();
        assert_eq!(r.instance, inst);
        assert_eq!(r.client_origin, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.symbol_origin, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn reduction_splits_multi_want_client() {
        let inst = Instance::new(2, vec![Client::new([], [0, 1])]);
        let r = inst.reduce_to_single_unicast().unwrap();
        assert_eq!(r.instance.n(), 2);
        assert!(r.instance.is_single_unicast());
        assert!(r.instance.clients.iter().all(|c| c.has.is_empty()));
        assert_eq!(r.client_origin, vec![0, 0]);
    }

    #[test]
    fn reduction_inherits_has_sets() {
        let inst = Instance::new(
            3,
            vec![Client::new([1], [0, 2]), Client::new([0, 2], [1])],
        );
        let r = inst.reduce_to_single_unicast().unwrap();
        assert_eq!(r.instance.n(), 3);
        assert_eq!(r.client_origin, vec![0, 1, 0]);
        assert_eq!(r.instance.clients[0].has, BTreeSet::from([1]));
        assert_eq!(r.instance.clients[2].has, BTreeSet::from([1]));
        assert_eq!(r.instance.clients[1].has, BTreeSet::from([0, 2]));
    }

    #[test]
    fn reduction_drops_unwanted_symbols_and_idle_clients() {
        // p2 is wanted by nobody; c2 wants nothing.
        let inst = Instance::new(
            3,
            vec![
                Client::new([1, 2], [0]),
                Client::new([0], []),
                Client::new([0, 1], [2]),
            ],
        );
        let r = inst.reduce_to_single_unicast().unwrap();
        assert_eq!(r.symbol_origin, vec![0, 2]);
        assert_eq!(r.client_origin, vec![0, 2]);
        assert_eq!(r.instance.clients[0].has, BTreeSet::from([1]));
        assert_eq!(r.instance.clients[1].has, BTreeSet::from([0]));
    }

    #[test]
    fn multicast_is_rejected() {
        let inst = Instance::new(1, vec![Client::new([], [0]), Client::new([], [0])]);
        let err = inst.reduce_to_single_unicast().unwrap_err();
        assert!(matches!(err, ReduceError::Multicast { symbol: 0, first: 0, second: 1 }));
    }

    #[test]
    fn coding_gain_display() {
        let g = CodingGain::new(5, 3).unwrap();
        assert_eq!(g.to_string(), "5/3 (1.6667)");
        assert_eq!(CodingGain::new(4, 2).unwrap().reduced(), (2, 1));
        assert!(CodingGain::new(4, 0).is_none());
    }
}
