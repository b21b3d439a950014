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

//! Small hand-written instances used throughout the tests and the CLI.

use std::fmt;
use std::str::FromStr;

use crate::generate::GenError;
use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// Five clients, no mutual side information; piggybacking reaches ℓ = 3.
    Motivating,
    /// Two clients each holding the other's symbol.
    AliceBob,
    /// Four clients where a single vertex-disjoint cycle exists but ℓ = 2.
    FutureWork,
}

impl Fixture {
    pub const ALL: [Fixture; 3] = [Fixture::Motivating, Fixture::AliceBob, Fixture::FutureWork];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Motivating => "motivating",
            Fixture::AliceBob => "alice-bob",
            Fixture::FutureWork => "future-work",
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| GenError::UnknownFixture(s.to_string()))
    }
}

/// Single-unicast instance for the named fixture (`W_i = {p_i}`).
pub fn fixture(which: Fixture) -> Instance {
    // Has sets, 1-based as written on paper.
    let has: &[&[usize]] = match which {
        Fixture::Motivating => &[&[2], &[3, 4], &[1, 4], &[1, 5], &[2, 3]],
        Fixture::AliceBob => &[&[2], &[1]],
        Fixture::FutureWork => &[&[4], &[1, 3], &[1, 2], &[2, 3]],
    };
    Instance::single_unicast(
        has.iter()
            .map(|h| h.iter().map(|&s| s - 1).collect::<Vec<_>>())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn names_round_trip() {
        for f in Fixture::ALL {
            assert_eq!(f.name().parse::<Fixture>().unwrap(), f);
        }
        assert!(matches!(
            "nope".parse::<Fixture>(),
            Err(GenError::UnknownFixture(_))
        ));
    }

    #[test]
    fn transcriptions() {
        let m = fixture(Fixture::Motivating);
        let has: Vec<BTreeSet<usize>> = m.clients.iter().map(|c| c.has.clone()).collect();
        assert_eq!(
            has,
            vec![
                BTreeSet::from([1]),
                BTreeSet::from([2, 3]),
                BTreeSet::from([0, 3]),
                BTreeSet::from([0, 4]),
                BTreeSet::from([1, 2]),
            ]
        );
        let ab = fixture(Fixture::AliceBob);
        assert_eq!(ab.n(), 2);
        assert!(ab.clients.iter().all(|c| c.has.len() == 1));
        let fw = fixture(Fixture::FutureWork);
        assert_eq!(fw.clients[0].has, BTreeSet::from([3]));
        assert_eq!(fw.clients[3].has, BTreeSet::from([1, 2]));
        for f in Fixture::ALL {
            assert!(fixture(f).validate().is_empty());
        }
    }
}
