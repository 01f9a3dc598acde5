//! Text form of the bulk-bitwise instruction.
//!
//! ```text
//! instr = "bbop" addr "," addr "," ( addr | "_" ) "," func [ "," len ]
//! addr  = "0x" hexdigit { hexdigit }          (byte address)
//! func  = "copy" | "not" | "and" | "or" | "nand" | "nor" | "xor" | "xnor"
//! len   = digit { digit }                     (bits; default one row)
//! ```
//!
//! Operands are `dest, src1, src2`. Unary functions take `_` for src2.
//! Keywords are case-insensitive and whitespace is free around tokens.

use crate::backends::BackendKind;
use crate::error::{Error, Result};
use crate::threshold::TlpeFunc;
use serde::{Deserialize, Serialize};
use std::fmt;

/// One vector instruction bound to a back-end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbopInstruction {
    pub func: TlpeFunc,
    pub dest: u64,
    pub src1: u64,
    pub src2: Option<u64>,
    /// Vector length in bits; `None` means one full row.
    pub len_bits: Option<u64>,
    pub backend: BackendKind,
}

impl BbopInstruction {
    pub fn len_or(&self, row_bits: u64) -> u64 {
        self.len_bits.unwrap_or(row_bits)
    }

    /// Text form accepted by [`decode`].
    pub fn print(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BbopInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bbop {:#x}, {:#x}, ", self.dest, self.src1)?;
        match self.src2 {
            Some(a) => write!(f, "{a:#x}")?,
            None => f.write_str("_")?,
        }
        write!(f, ", {}", self.func.name())?;
        if let Some(n) = self.len_bits {
            write!(f, ", {n}")?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos + 1,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    /// Next run of characters that are not whitespace or commas.
    fn word(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let len = self.text[start..]
            .find(|c: char| c.is_whitespace() || c == ',')
            .unwrap_or(self.text.len() - start);
        if len == 0 {
            return self.err(format!("expected {what}"));
        }
        self.pos += len;
        Ok((start, &self.text[start..start + len]))
    }

    fn comma(&mut self, what: &str) -> Result<()> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(',') {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `,` before {what}"))
        }
    }

    fn addr(&mut self, what: &str, allow_blank: bool) -> Result<Option<u64>> {
        let (start, w) = self.word(what)?;
        if allow_blank && w == "_" {
            return Ok(None);
        }
        let hex = w.strip_prefix("0x").or_else(|| w.strip_prefix("0X"));
        match hex.map(|h| u64::from_str_radix(h, 16)) {
            Some(Ok(v)) => Ok(Some(v)),
            _ => Err(Error::Syntax {
                pos: start + 1,
                msg: format!("{what} must be a hex byte address like 0x2000, got `{w}`"),
            }),
        }
    }
}

/// Parse one instruction for `backend`. Functions the back-end cannot run
/// are rejected here.
pub fn decode(text: &str, backend: BackendKind) -> Result<BbopInstruction> {
    let mut c = Cursor { text, pos: 0 };
    let (start, kw) = c.word("`bbop`")?;
    if !kw.eq_ignore_ascii_case("bbop") {
        return Err(Error::Syntax {
            pos: start + 1,
            msg: format!("expected `bbop`, got `{kw}`"),
        });
    }
    let dest = c.addr("dest", false)?.expect("not blank");
    c.comma("src1")?;
    let src1 = c.addr("src1", false)?.expect("not blank");
    c.comma("src2")?;
    c.skip_ws();
    let src2_pos = c.pos;
    let src2 = c.addr("src2", true)?;
    c.comma("func")?;
    let (fpos, fname) = c.word("func")?;
    let func: TlpeFunc = fname.parse().map_err(|_| Error::Syntax {
        pos: fpos + 1,
        msg: format!("unknown function `{fname}`"),
    })?;
    let mut len_bits = None;
    if !c.at_end() {
        c.comma("len")?;
        let (lpos, lw) = c.word("len")?;
        len_bits = Some(lw.parse::<u64>().map_err(|_| Error::Syntax {
            pos: lpos + 1,
            msg: format!("length must be a decimal bit count, got `{lw}`"),
        })?);
    }
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    if func == TlpeFunc::AddBit {
        return Err(Error::Unsupported("bbop covers bitwise functions; additions go through exec_add_rows".into()));
    }
    if func.is_unary() != src2.is_none() {
        let msg = if func.is_unary() {
            format!("{func} takes one source; write `_` for src2")
        } else {
            format!("{func} needs a second source")
        };
        return Err(Error::Syntax {
            pos: src2_pos + 1,
            msg,
        });
    }
    backend.require(func)?;
    Ok(BbopInstruction {
        func,
        dest,
        src1,
        src2,
        len_bits,
        backend,
    })
}
