//! Five-part dive codes such as `201B`.
//!
//! Grammar (FINA-style numbering):
//!
//! ```text
//! non-twisting  <group 1-4><flying 0|1><half-somersaults 1-9><pose>
//! armstand      6<direction 1-3><half-somersaults 1-9><pose>
//! twisting      5<group 1-4><half-somersaults 1-9><half-twists 1-9><pose>
//! pose          A straight | B pike | C tuck | D free
//! ```
//!
//! Groups and directions: 1 forward, 2 back, 3 reverse, 4 inward.
//! Armstand codes set the handstand flag; twisting armstand codes are not
//! supported.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rotation {
    Forward,
    Back,
    Reverse,
    Inward,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation::Forward, Rotation::Back, Rotation::Reverse, Rotation::Inward];

    fn digit(self) -> u8 {
        match self {
            Rotation::Forward => 1,
            Rotation::Back => 2,
            Rotation::Reverse => 3,
            Rotation::Inward => 4,
        }
    }

    fn from_digit(d: u8) -> Option<Self> {
        Self::ALL.get((d as usize).wrapping_sub(1)).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pose {
    Straight,
    Pike,
    Tuck,
    Free,
}

impl Pose {
    pub const ALL: [Pose; 4] = [Pose::Straight, Pose::Pike, Pose::Tuck, Pose::Free];

    fn letter(self) -> char {
        match self {
            Pose::Straight => 'A',
            Pose::Pike => 'B',
            Pose::Tuck => 'C',
            Pose::Free => 'D',
        }
    }

    fn from_letter(c: u8) -> Option<Self> {
        match c {
            b'A' => Some(Pose::Straight),
            b'B' => Some(Pose::Pike),
            b'C' => Some(Pose::Tuck),
            b'D' => Some(Pose::Free),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiveCode {
    pub rotation: Rotation,
    pub somersault_halves: u8,
    pub twist_halves: u8,
    pub pose: Pose,
    pub handstand: bool,
    /// Raw flying digit of non-twisting codes.
    #[serde(default)]
    pub flying: bool,
}

impl DiveCode {
    pub fn is_twisting(&self) -> bool {
        self.twist_halves > 0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::input(msg.to_string()));
        if !(1..=9).contains(&self.somersault_halves) {
            return bad("somersault halves must be 1-9");
        }
        if self.twist_halves > 9 {
            return bad("twist halves must be 0-9");
        }
        if self.is_twisting() && self.handstand {
            return bad("twisting armstand codes are not supported");
        }
        if self.is_twisting() && self.flying {
            return bad("twisting codes carry no flying digit");
        }
        if self.handstand && self.flying {
            return bad("armstand codes carry no flying digit");
        }
        if self.handstand && self.rotation == Rotation::Inward {
            return bad("armstand codes have no inward direction");
        }
        Ok(())
    }
}

impl fmt::Display for DiveCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rotation.digit();
        let p = self.pose.letter();
        if self.is_twisting() {
            write!(f, "5{r}{}{}{p}", self.somersault_halves, self.twist_halves)
        } else if self.handstand {
            write!(f, "6{r}{}{p}", self.somersault_halves)
        } else {
            write!(f, "{r}{}{}{p}", u8::from(self.flying), self.somersault_halves)
        }
    }
}

impl FromStr for DiveCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_code(s)
    }
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse { position, message: message.into() }
}

pub fn parse_code(text: &str) -> Result<DiveCode> {
    let bytes = text.as_bytes();
    if let Some(i) = bytes.iter().position(|b| !b.is_ascii()) {
        return Err(err(i + 1, "non-ASCII character"));
    }
    let digit_at = |i: usize, what: &str| -> Result<u8> {
        match bytes.get(i) {
            None => Err(err(i + 1, format!("unexpected end, expected {what}"))),
            Some(b) if b.is_ascii_digit() => Ok(b - b'0'),
            Some(b) => Err(err(i + 1, format!("expected {what}, found '{}'", *b as char))),
        }
    };
    let halves_at = |i: usize, what: &str| -> Result<u8> {
        let d = digit_at(i, what)?;
        if d == 0 {
            return Err(err(i + 1, format!("{what} must be 1-9")));
        }
        Ok(d)
    };
    let pose_at = |i: usize| -> Result<Pose> {
        match bytes.get(i) {
            None => Err(err(i + 1, "unexpected end, expected pose letter A-D")),
            Some(b) => Pose::from_letter(*b)
                .ok_or_else(|| err(i + 1, format!("unknown pose '{}'", *b as char))),
        }
    };
    let end_at = |i: usize| -> Result<()> {
        if bytes.len() > i {
            Err(err(i + 1, "trailing characters"))
        } else {
            Ok(())
        }
    };

    let lead = digit_at(0, "group digit")?;
    let code = match lead {
        1..=4 => {
            let flying = match digit_at(1, "flying digit")? {
                0 => false,
                1 => true,
                _ => return Err(err(2, "flying digit must be 0 or 1")),
            };
            let somersault_halves = halves_at(2, "half-somersault count")?;
            let pose = pose_at(3)?;
            end_at(4)?;
            DiveCode {
                rotation: Rotation::from_digit(lead).unwrap(),
                somersault_halves,
                twist_halves: 0,
                pose,
                handstand: false,
                flying,
            }
        }
        5 => {
            let group = digit_at(1, "rotation group")?;
            let rotation = match group {
                1..=4 => Rotation::from_digit(group).unwrap(),
                6 => return Err(err(2, "twisting armstand codes are not supported")),
                _ => return Err(err(2, format!("unknown rotation group {group}"))),
            };
            let somersault_halves = halves_at(2, "half-somersault count")?;
            let twist_halves = halves_at(3, "half-twist count")?;
            let pose = pose_at(4)?;
            end_at(5)?;
            DiveCode { rotation, somersault_halves, twist_halves, pose, handstand: false, flying: false }
        }
        6 => {
            let dir = digit_at(1, "armstand direction")?;
            let rotation = match dir {
                1..=3 => Rotation::from_digit(dir).unwrap(),
                _ => return Err(err(2, format!("unknown armstand direction {dir}"))),
            };
            let somersault_halves = halves_at(2, "half-somersault count")?;
            let pose = pose_at(3)?;
            end_at(4)?;
            DiveCode { rotation, somersault_halves, twist_halves: 0, pose, handstand: true, flying: false }
        }
        d => return Err(err(1, format!("unknown group digit {d}"))),
    };
    Ok(code)
}

pub fn format_code(code: &DiveCode) -> Result<String> {
    code.validate()?;
    Ok(code.to_string())
}

/// Every code the grammar accepts.
pub fn enumerate_codes() -> Vec<DiveCode> {
    let mut out = Vec::new();
    for rotation in Rotation::ALL {
        for flying in [false, true] {
            for halves in 1..=9 {
                for pose in Pose::ALL {
                    out.push(DiveCode { rotation, somersault_halves: halves, twist_halves: 0, pose, handstand: false, flying });
                }
            }
        }
        for halves in 1..=9 {
            for twists in 1..=9 {
                for pose in Pose::ALL {
                    out.push(DiveCode { rotation, somersault_halves: halves, twist_halves: twists, pose, handstand: false, flying: false });
                }
            }
        }
        if rotation != Rotation::Inward {
            for halves in 1..=9 {
                for pose in Pose::ALL {
                    out.push(DiveCode { rotation, somersault_halves: halves, twist_halves: 0, pose, handstand: true, flying: false });
                }
            }
        }
    }
    out
}
