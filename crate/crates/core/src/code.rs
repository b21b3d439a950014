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

//! Index codes: ordered lists of XOR combinations.

use std::collections::BTreeSet;
use std::fmt;

use crate::instance::{parse_symbol_name, symbol_name, ParseError, SymbolId};

/// One broadcast frame: the XOR of the payloads in `support`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodedSymbol {
    support: BTreeSet<SymbolId>,
}

impl CodedSymbol {
    /// `None` for an empty support.
    pub fn new<I: IntoIterator<Item = SymbolId>>(support: I) -> Option<Self> {
        let support: BTreeSet<_> = support.into_iter().collect();
        (!support.is_empty()).then_some(Self { support })
    }

    pub fn support(&self) -> &BTreeSet<SymbolId> {
        &self.support
    }
}

impl fmt::Display for CodedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.support.iter().map(|&s| symbol_name(s)).collect();
        f.write_str(&parts.join("⊕"))
    }
}

/// Transmission order matters: later frames may rely on cache entries
/// gained from earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexCode {
    transmissions: Vec<CodedSymbol>,
}

impl IndexCode {
    /// # Panics
    /// If any support is empty.
    pub fn new(supports: Vec<BTreeSet<SymbolId>>) -> Self {
        Self {
            transmissions: supports
                .into_iter()
                .map(|s| CodedSymbol::new(s).expect("coded symbol with empty support"))
                .collect(),
        }
    }

    pub fn from_symbols(transmissions: Vec<CodedSymbol>) -> Self {
        Self { transmissions }
    }

    pub fn push(&mut self, t: CodedSymbol) {
        self.transmissions.push(t);
    }

    pub fn transmissions(&self) -> &[CodedSymbol] {
        &self.transmissions
    }

    /// Code length ℓ.
    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }

    /// Supports as unordered content, for order-insensitive comparison.
    pub fn support_set(&self) -> BTreeSet<BTreeSet<SymbolId>> {
        self.transmissions.iter().map(|t| t.support.clone()).collect()
    }

    pub fn reversed(&self) -> Self {
        Self {
            transmissions: self.transmissions.iter().rev().cloned().collect(),
        }
    }

    /// Code file: a JSON array of transmissions, each an array of symbol names.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let raw: Vec<Vec<String>> = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut transmissions = Vec::with_capacity(raw.len());
        for (t, names) in raw.into_iter().enumerate() {
            let mut support = BTreeSet::new();
            for name in names {
                let id = parse_symbol_name(&name).ok_or_else(|| ParseError::Field {
                    field: format!("[{t}]"),
                    message: format!("bad symbol name `{name}`"),
                })?;
                support.insert(id);
            }
            transmissions.push(CodedSymbol::new(support).ok_or_else(|| ParseError::Field {
                field: format!("[{t}]"),
                message: "empty transmission".into(),
            })?);
        }
        Ok(Self { transmissions })
    }

    /// Compact single-line JSON, e.g. `[["p1","p2"],["p3"]]`.
    pub fn to_json(&self) -> String {
        let raw: Vec<Vec<String>> = self
            .transmissions
            .iter()
            .map(|t| t.support.iter().map(|&s| symbol_name(s)).collect())
            .collect();
        serde_json::to_string(&raw).expect("code serializes")
    }
}

impl fmt::Display for IndexCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.transmissions.iter().map(|t| t.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_file_format() {
        let code = IndexCode::parse(r#"[["p1","p2"],["p3","p5"],["p2","p3","p4"]]"#).unwrap();
        assert_eq!(code.len(), 3);
        assert_eq!(code.to_string(), "{p1⊕p2, p3⊕p5, p2⊕p3⊕p4}");
        assert_eq!(code.to_json(), r#"[["p1","p2"],["p3","p5"],["p2","p3","p4"]]"#);
    }

    #[test]
    fn rejects_empty_and_bad_names() {
        assert!(IndexCode::parse(r#"[["p1"],[]]"#).is_err());
        assert!(IndexCode::parse(r#"[["x1"]]"#).is_err());
        assert!(IndexCode::parse(r#"{"a":1}"#).is_err());
    }
}
