use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable count any truth table may use, whatever the configuration says.
pub const HARD_MAX_VARS: u32 = 20;
pub const DEFAULT_MAX_VARS: u32 = 16;
pub const DEFAULT_MAX_EXPANSION: u64 = 1 << 24;
/// Longest string a bounded string quantifier may enumerate.
pub const DEFAULT_MAX_STRING_LEN: u64 = 16;

/// Scale caps shared by every exhaustive procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_vars: u32,
    pub max_expansion: u64,
    pub max_string_len: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vars: DEFAULT_MAX_VARS,
            max_expansion: DEFAULT_MAX_EXPANSION,
            max_string_len: DEFAULT_MAX_STRING_LEN,
        }
    }
}

impl Limits {
    pub fn new(max_vars: u32, max_expansion: u64) -> Result<Self> {
        if max_vars > HARD_MAX_VARS {
            return Err(Error::Scale {
                what: "max-n",
                value: max_vars as u64,
                max: HARD_MAX_VARS as u64,
            });
        }
        Ok(Limits {
            max_vars,
            max_expansion,
            ..Limits::default()
        })
    }

    pub fn check_vars(&self, n: u32) -> Result<()> {
        if n > self.max_vars {
            Err(Error::Scale {
                what: "variable count",
                value: n as u64,
                max: self.max_vars as u64,
            })
        } else {
            Ok(())
        }
    }
}
