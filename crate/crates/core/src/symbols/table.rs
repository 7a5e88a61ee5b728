//! Plain-text table form of a symbol expansion.
//!
//! ```text
//! # cwcs symbol table v1
//! rank 2
//! cutoff 16
//! leading 0.0
//! den 1
//! steps 6
//! loss 0.0
//! # step order dir mode row col re im
//! 0 0.0 + 0 0 0 1.0 0.0
//! ```
//!
//! Only non-zero entries are listed. Floats use the shortest representation
//! that parses back to the same bits, so the round trip is exact.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::expansion::{HomogeneousSymbol, SymbolExpansion};
use super::fourier::FourierMatrix;
use crate::error::{Error, Result};

const MAGIC: &str = "# cwcs symbol table v1";

pub fn to_table(e: &SymbolExpansion) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC}").unwrap();
    writeln!(s, "rank {}", e.rank()).unwrap();
    writeln!(s, "cutoff {}", e.cutoff()).unwrap();
    writeln!(s, "leading {:?}", e.leading_order()).unwrap();
    writeln!(s, "den {}", e.step_denominator()).unwrap();
    writeln!(s, "steps {}", e.components().len() - 1).unwrap();
    writeln!(s, "loss {:?}", e.truncation_loss()).unwrap();
    writeln!(s, "# step order dir mode row col re im").unwrap();
    for (j, c) in e.components().iter().enumerate() {
        for (dir, f) in [('+', &c.plus), ('-', &c.minus)] {
            for k in f.modes() {
                for row in 0..f.rank() {
                    for col in 0..f.rank() {
                        let z = f.entry(k, row, col);
                        if z.re.to_bits() != 0 || z.im.to_bits() != 0 {
                            writeln!(s, "{j} {:?} {dir} {k} {row} {col} {:?} {:?}", c.order, z.re, z.im).unwrap();
                        }
                    }
                }
            }
        }
    }
    s
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("symbol table line {line}: {msg}"))
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (n, l) = lines.next().ok_or_else(|| Error::Parse(format!("symbol table: missing `{key}`")))?;
    let v = l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')).ok_or_else(|| bad(n, format!("expected `{key}`")))?;
    Ok((n, v.trim()))
}

fn num<T: std::str::FromStr>(n: usize, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(n, format!("cannot parse `{v}`")))
}

pub fn from_table(text: &str) -> Result<SymbolExpansion> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => return Err(Error::Parse("symbol table: missing header".into())),
    }
    let (n, v) = header(&mut lines, "rank")?;
    let rank: usize = num(n, v)?;
    let (n, v) = header(&mut lines, "cutoff")?;
    let cutoff: usize = num(n, v)?;
    let (n, v) = header(&mut lines, "leading")?;
    let leading: f64 = num(n, v)?;
    let (n, v) = header(&mut lines, "den")?;
    let den: u32 = num(n, v)?;
    let (n, v) = header(&mut lines, "steps")?;
    let steps: usize = num(n, v)?;
    let (n, v) = header(&mut lines, "loss")?;
    let loss: f64 = num(n, v)?;
    if den == 0 || rank == 0 {
        return Err(bad(n, "rank and den must be positive"));
    }
    let mut comps: Vec<HomogeneousSymbol> = (0..=steps)
        .map(|j| HomogeneousSymbol {
            order: leading - j as f64 / den as f64,
            plus: FourierMatrix::zeros(rank, cutoff),
            minus: FourierMatrix::zeros(rank, cutoff),
        })
        .collect();
    for (n, line) in lines {
        if line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 8 {
            return Err(bad(n, "expected 8 fields"));
        }
        let j: usize = num(n, f[0])?;
        let order: f64 = num(n, f[1])?;
        let k: i64 = num(n, f[3])?;
        let (row, col): (usize, usize) = (num(n, f[4])?, num(n, f[5])?);
        let z = Complex64::new(num(n, f[6])?, num(n, f[7])?);
        let comp = comps.get_mut(j).ok_or_else(|| bad(n, "step beyond declared depth"))?;
        if order.to_bits() != comp.order.to_bits() {
            return Err(bad(n, format!("order {order} does not match step {j}")));
        }
        if k.unsigned_abs() as usize > cutoff || row >= rank || col >= rank {
            return Err(bad(n, "index out of range"));
        }
        let target = match f[2] {
            "+" => &mut comp.plus,
            "-" => &mut comp.minus,
            d => return Err(bad(n, format!("unknown direction `{d}`"))),
        };
        target.set_entry(k, row, col, z);
    }
    Ok(SymbolExpansion::raw(leading, den, rank, cutoff, comps, loss))
}
