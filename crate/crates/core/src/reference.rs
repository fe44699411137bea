//! Known optimized codes for k = 4 and k = 8, bundled as text fixtures.

use crate::codes::{Codebook, GeneratorMatrix};
use crate::error::{Error, Result};

/// General codebook optimized for absolute difference, rate 4/7.
pub const ABS_4_7: &str = include_str!("../fixtures/abs_4_7.txt");
/// General codebook optimized for squared difference, rate 4/7.
pub const SQUARED_4_7: &str = include_str!("../fixtures/squared_4_7.txt");
/// Two's-complement codebook optimized for squared difference, rate 4/7.
pub const SQUARED_TWOS_4_7: &str = include_str!("../fixtures/squared_twos_4_7.txt");
/// Linear code optimized for squared difference, rate 4/7.
pub const LINEAR_SQUARED_4_7: &str = include_str!("../fixtures/linear_squared_4_7.txt");
/// Linear code optimized for squared difference, rate 8/12.
pub const LINEAR_SQUARED_8_12: &str = include_str!("../fixtures/linear_squared_8_12.txt");

pub const CODEBOOK_NAMES: [&str; 3] = ["abs_4_7", "squared_4_7", "squared_twos_4_7"];
pub const GENERATOR_NAMES: [&str; 2] = ["linear_squared_4_7", "linear_squared_8_12"];

pub fn codebook(name: &str) -> Result<Codebook> {
    let text = match name {
        "abs_4_7" => ABS_4_7,
        "squared_4_7" => SQUARED_4_7,
        "squared_twos_4_7" => SQUARED_TWOS_4_7,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown reference codebook {other:?}"
            )))
        }
    };
    Codebook::parse_text(text)
}

pub fn generator(name: &str) -> Result<GeneratorMatrix> {
    let text = match name {
        "linear_squared_4_7" => LINEAR_SQUARED_4_7,
        "linear_squared_8_12" => LINEAR_SQUARED_8_12,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown reference generator {other:?}"
            )))
        }
    };
    GeneratorMatrix::parse_text(text)
}
