//! The shipped example programs.

use crate::error::{Error, Result};
use crate::parse::parse_program;
use crate::rule::Program;

pub const SUM: &str = include_str!("../programs/sum.mpl");
pub const FIB: &str = include_str!("../programs/fib.mpl");
pub const GCD: &str = include_str!("../programs/gcd.mpl");
pub const REV: &str = include_str!("../programs/rev.mpl");
pub const SORT: &str = include_str!("../programs/sort.mpl");

pub const NAMES: [&str; 5] = ["sum", "fib", "gcd", "rev", "sort"];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "sum" => SUM,
        "fib" => FIB,
        "gcd" => GCD,
        "rev" => REV,
        "sort" => SORT,
        _ => return None,
    })
}

pub fn builtin(name: &str) -> Result<Program> {
    let text = source(name).ok_or_else(|| {
        Error::Config(format!("unknown program `{name}` (expected one of {})", NAMES.join(", ")))
    })?;
    Ok(parse_program(text)?)
}
