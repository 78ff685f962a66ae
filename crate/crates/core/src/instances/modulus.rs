use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Integer modulus `q >= 2`. Residues are kept in the centered window `(-q/2, q/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Modulus(i64);

impl Modulus {
    pub fn new(q: i64) -> Result<Self> {
        if q < 2 {
            return param(format!("modulus must be >= 2, got {q}"));
        }
        Ok(Self(q))
    }

    #[inline]
    pub fn value(self) -> i64 {
        self.0
    }

    #[inline]
    pub fn center(self, x: i64) -> i64 {
        center_mod(x, self.0)
    }

    #[inline]
    pub fn center_wide(self, x: i128) -> i64 {
        let q = self.0 as i128;
        let mut r = x.rem_euclid(q);
        if r > q / 2 {
            r -= q;
        }
        r as i64
    }
}

impl TryFrom<i64> for Modulus {
    type Error = Error;

    fn try_from(q: i64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<Modulus> for i64 {
    fn from(q: Modulus) -> i64 {
        q.0
    }
}

/// Centered representative of `x` modulo `q`, in `(-q/2, q/2]`.
#[inline]
pub fn center_mod(x: i64, q: i64) -> i64 {
    debug_assert!(q >= 2);
    let r = x.rem_euclid(q);
    if r > q / 2 {
        r - q
    } else {
        r
    }
}
