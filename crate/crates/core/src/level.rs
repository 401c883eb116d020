use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Ordinal of a fluxonium eigenstate: `g = 0`, `e = 1`, `f = 2`, `h = 3`,
/// `i = 4`. Higher levels are written `L5`, `L6`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelLabel(pub u8);

const NAMES: [&str; 5] = ["g", "e", "f", "h", "i"];

impl LevelLabel {
    pub const G: LevelLabel = LevelLabel(0);
    pub const E: LevelLabel = LevelLabel(1);
    pub const F: LevelLabel = LevelLabel(2);
    pub const H: LevelLabel = LevelLabel(3);
    pub const I: LevelLabel = LevelLabel(4);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// True for the computational subspace {g, e}.
    pub fn is_computational(self) -> bool {
        self.0 < 2
    }
}

impl fmt::Display for LevelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match NAMES.get(self.index()) {
            Some(name) => f.write_str(name),
            None => write!(f, "L{}", self.0),
        }
    }
}

impl FromStr for LevelLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(pos) = NAMES.iter().position(|n| *n == s) {
            return Ok(LevelLabel(pos as u8));
        }
        s.strip_prefix('L')
            .and_then(|rest| rest.parse::<u8>().ok())
            .map(LevelLabel)
            .ok_or_else(|| format!("unknown level label `{s}`"))
    }
}

impl Serialize for LevelLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LevelLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in 0..12u8 {
            let label = LevelLabel(k);
            assert_eq!(label.to_string().parse::<LevelLabel>().unwrap(), label);
        }
        assert_eq!(LevelLabel::H.to_string(), "h");
        assert!("x".parse::<LevelLabel>().is_err());
    }
}
