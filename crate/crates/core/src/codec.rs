//! Bit-level encodings: the decoder, its inverse, and an independently
//! written reference decoder used for differential testing.

use std::fmt;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::formats::{Domain, Format, Signedness};
use crate::model::{self, Value};
use crate::numerics::XReal;

/// Largest width [`enumerate`] will expand.
pub const ENUMERATE_MAX_WIDTH: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("encoding {n} is out of range for {format} (needs n < 2^{})", format.width())]
    OutOfRange { n: u64, format: Format },
    #[error("{value} is not a valid value of {format}")]
    InvalidValue { value: Value, format: Format },
    #[error("{0} has too many encodings to enumerate (K > {ENUMERATE_MAX_WIDTH})")]
    FormatTooLarge(Format),
    #[error("i/o error while exporting: {0}")]
    Io(String),
}

/// An integer encoding `0 <= n < 2^K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Encoding(pub u64);

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Splits a non-negative finite encoding into `(m, e)`.
///
/// `T = n mod 2^(P-1)` is the trailing significand and
/// `floor(n / 2^(P-1))` the raw exponent field; raw exponent zero is the
/// subnormal row.
pub fn finite_fields(f: &Format, bias: i64, n: u64) -> (i64, i64) {
    let p = f.precision() as i64;
    let implicit = 1u64 << (p - 1);
    let trailing = n % implicit;
    let raw_exp = (n / implicit) as i64;
    if raw_exp == 0 {
        (trailing as i64, 1 - bias - p + 1)
    } else {
        ((trailing + implicit) as i64, raw_exp - bias - p + 1)
    }
}

/// A single-constant corruption of the codec, for checking that the
/// verification suites are able to fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// NaN moved one slot down.
    NanSlot,
    /// Infinities moved one slot down.
    InfSlot,
    /// Exponent bias off by one.
    Bias,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [Mutation::NanSlot, Mutation::InfSlot, Mutation::Bias];
}

/// The constants the decoder and encoder are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Codec {
    format: Format,
    nan: u64,
    pos_inf: Option<u64>,
    neg_inf: Option<u64>,
    bias: i64,
}

impl Codec {
    pub fn new(f: &Format) -> Codec {
        let k = f.width();
        let half = 1u64 << (k - 1);
        let full = 1u64 << k;
        let (nan, pos_inf, neg_inf) = match (f.signedness(), f.domain()) {
            (Signedness::Signed, Domain::Extended) => (half, Some(half - 1), Some(full - 1)),
            (Signedness::Signed, Domain::Finite) => (half, None, None),
            (Signedness::Unsigned, Domain::Extended) => (full - 1, Some(full - 2), None),
            (Signedness::Unsigned, Domain::Finite) => (full - 1, None, None),
        };
        Codec {
            format: *f,
            nan,
            pos_inf,
            neg_inf,
            bias: f.bias(),
        }
    }

    pub fn mutated(f: &Format, mutation: Mutation) -> Codec {
        let mut c = Codec::new(f);
        match mutation {
            Mutation::NanSlot => c.nan -= 1,
            Mutation::InfSlot => {
                c.pos_inf = c.pos_inf.map(|n| n - 1);
                c.neg_inf = c.neg_inf.map(|n| n - 1);
            }
            Mutation::Bias => c.bias += 1,
        }
        c
    }

    pub fn format(&self) -> &Format {
        &self.format
    }

    pub fn nan_encoding(&self) -> u64 {
        self.nan
    }

    pub fn pos_inf_encoding(&self) -> Option<u64> {
        self.pos_inf
    }

    pub fn neg_inf_encoding(&self) -> Option<u64> {
        self.neg_inf
    }

    fn decode_fin(&self, n: u64) -> Value {
        let (m, e) = finite_fields(&self.format, self.bias, n);
        Value::Finite { m, e }
    }

    pub fn decode(&self, n: u64) -> Result<Value, CodecError> {
        let f = &self.format;
        if n >= f.encoding_count() {
            return Err(CodecError::OutOfRange { n, format: *f });
        }
        if n == self.nan {
            return Ok(Value::NaN);
        }
        if self.pos_inf == Some(n) {
            return Ok(Value::POS_INF);
        }
        if self.neg_inf == Some(n) {
            return Ok(Value::NEG_INF);
        }
        let half = 1u64 << (f.width() - 1);
        Ok(match f.signedness() {
            Signedness::Signed if n >= half => self.decode_fin(n - half).negate(),
            _ => self.decode_fin(n),
        })
    }

    pub fn encode(&self, v: &Value) -> Result<Encoding, CodecError> {
        let f = &self.format;
        let invalid = || CodecError::InvalidValue { value: *v, format: *f };
        v.validate(f).map_err(|_| invalid())?;
        let n = match *v {
            Value::NaN => self.nan,
            Value::Inf { sign: false } => self.pos_inf.ok_or_else(invalid)?,
            Value::Inf { sign: true } => self.neg_inf.ok_or_else(invalid)?,
            Value::Finite { m, e } => {
                let p = f.precision() as i64;
                let implicit = 1i64 << (p - 1);
                let mag = m.abs();
                let positive = if mag < implicit && e == 1 - self.bias - p + 1 {
                    mag
                } else {
                    (mag - implicit) + (e + p - 1 + self.bias) * implicit
                };
                let positive = u64::try_from(positive).map_err(|_| invalid())?;
                if m < 0 {
                    positive + (1u64 << (f.width() - 1))
                } else {
                    positive
                }
            }
        };
        if n >= f.encoding_count() {
            return Err(invalid());
        }
        Ok(Encoding(n))
    }
}

/// Decodes `n` under `f`.
pub fn decode(f: &Format, n: Encoding) -> Result<Value, CodecError> {
    Codec::new(f).decode(n.0)
}

/// Decodes a non-negative finite encoding without special-value checks.
pub fn decode_fin(f: &Format, n: u64) -> Value {
    Codec::new(f).decode_fin(n)
}

/// Encodes a value of `f`; inverse of [`decode`].
pub fn encode_bits(f: &Format, v: &Value) -> Result<Encoding, CodecError> {
    Codec::new(f).encode(v)
}

/// Decoder written directly from the field description of the format:
/// an optional sign bit, a `W`-bit biased exponent field and a `P-1`-bit
/// trailing significand with an implicit leading one for non-zero
/// exponent fields. Special values are recognised on the bit pattern
/// before any field is interpreted.
pub fn decode_reference(f: &Format, n: Encoding) -> Result<Value, CodecError> {
    let bits = n.0;
    let k = f.width();
    let p = f.precision();
    if k < 64 && bits >> k != 0 {
        return Err(CodecError::OutOfRange { n: bits, format: *f });
    }
    let all_ones = (1u64 << k) - 1;
    let signed = f.signedness() == Signedness::Signed;
    let extended = f.domain() == Domain::Extended;

    // sign bit and magnitude bits
    let (negative, magnitude, magnitude_ones) = if signed {
        let sign_bit = 1u64 << (k - 1);
        (bits & sign_bit != 0, bits & (sign_bit - 1), sign_bit - 1)
    } else {
        (false, bits, all_ones)
    };

    if signed {
        // the would-be negative zero is the NaN
        if negative && magnitude == 0 {
            return Ok(Value::NaN);
        }
        if extended && magnitude == magnitude_ones {
            return Ok(Value::Inf { sign: negative });
        }
    } else {
        if bits == all_ones {
            return Ok(Value::NaN);
        }
        if extended && bits == all_ones - 1 {
            return Ok(Value::POS_INF);
        }
    }

    let exp_bits = if signed { k - p } else { k - p + 1 };
    let bias: i64 = 1 << (exp_bits - 1);
    let frac_bits = p - 1;
    let frac_mask = (1u64 << frac_bits) - 1;
    let exp_field = (magnitude >> frac_bits) as i64;
    let frac = (magnitude & frac_mask) as i64;

    // value = significand * 2^(unbiased exponent - frac_bits)
    let (significand, msb_exp) = if exp_field == 0 {
        (frac, 1 - bias)
    } else {
        (frac | (1i64 << frac_bits), exp_field - bias)
    };
    let lsb_exp = msb_exp - frac_bits as i64;
    Ok(Value::Finite {
        m: if negative { -significand } else { significand },
        e: lsb_exp,
    })
}

/// One row of a format's encoding table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub encoding: Encoding,
    pub value: Value,
    pub real: XReal,
}

impl Row {
    /// Coarse classification used in exported tables.
    pub fn class(&self, f: &Format) -> &'static str {
        match self.value {
            Value::NaN => "nan",
            Value::Inf { .. } => "inf",
            Value::Finite { m: 0, .. } => "zero",
            Value::Finite { m, e } if model::is_subnormal(f, m, e) => "subnormal",
            Value::Finite { .. } => "normal",
        }
    }
}

/// Every encoding of `f` in order, with its value and its real.
pub fn enumerate(f: &Format) -> Result<Vec<Row>, CodecError> {
    enumerate_with(&Codec::new(f))
}

pub fn enumerate_with(codec: &Codec) -> Result<Vec<Row>, CodecError> {
    let f = codec.format();
    if f.width() > ENUMERATE_MAX_WIDTH {
        return Err(CodecError::FormatTooLarge(*f));
    }
    (0..f.encoding_count())
        .map(|n| {
            let value = codec.decode(n)?;
            Ok(Row {
                encoding: Encoding(n),
                real: model::eval(&value),
                value,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct RowRecord<'a> {
    encoding: u64,
    binary: String,
    class: &'a str,
    m: String,
    e: String,
    value: String,
}

fn record<'a>(f: &Format, row: &'a Row) -> RowRecord<'a> {
    let (m, e) = match row.value {
        Value::Finite { m, e } => (m.to_string(), e.to_string()),
        _ => (String::new(), String::new()),
    };
    RowRecord {
        encoding: row.encoding.0,
        binary: format!("{:0width$b}", row.encoding.0, width = f.width() as usize),
        class: row.class(f),
        m,
        e,
        value: row.real.to_decimal_string(),
    }
}

/// Writes the table as CSV with columns
/// `encoding,binary,class,m,e,value`.
pub fn write_csv<W: Write>(f: &Format, rows: &[Row], mut out: W) -> Result<(), CodecError> {
    let io = |e: std::io::Error| CodecError::Io(e.to_string());
    writeln!(out, "encoding,binary,class,m,e,value").map_err(io)?;
    for row in rows {
        let r = record(f, row);
        writeln!(out, "{},{},{},{},{},{}", r.encoding, r.binary, r.class, r.m, r.e, r.value).map_err(io)?;
    }
    Ok(())
}

/// Same table as [`write_csv`], one JSON object per line.
pub fn write_jsonl<W: Write>(f: &Format, rows: &[Row], mut out: W) -> Result<(), CodecError> {
    for row in rows {
        let line = serde_json::to_string(&record(f, row)).map_err(|e| CodecError::Io(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| CodecError::Io(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Dyadic;

    fn fmt(s: &str) -> Format {
        s.parse().unwrap()
    }

    fn dec(f: &str, n: u64) -> Value {
        decode(&fmt(f), Encoding(n)).unwrap()
    }

    #[test]
    fn special_values() {
        assert_eq!(dec("8p4se", 128), Value::NaN);
        assert_eq!(dec("8p4se", 127), Value::POS_INF);
        assert_eq!(dec("8p4se", 255), Value::NEG_INF);
        assert_eq!(dec("8p4ue", 254), Value::POS_INF);
        assert_eq!(dec("8p4ue", 255), Value::NaN);
        assert_eq!(dec("8p4sf", 128), Value::NaN);
        assert_eq!(dec("8p4sf", 127), Value::Finite { m: 15, e: 4 });
    }

    #[test]
    fn finite_decodes() {
        assert_eq!(dec("8p4se", 126), Value::Finite { m: 14, e: 4 });
        assert_eq!(dec("4p2se", 5), Value::Finite { m: 3, e: -1 });
        assert_eq!(dec("8p4se", 0), Value::Finite { m: 0, e: -10 });
        assert_eq!(dec("8p4se", 131), Value::Finite { m: -3, e: -10 });
    }

    #[test]
    fn out_of_range() {
        let f = fmt("8p4se");
        assert!(matches!(decode(&f, Encoding(256)), Err(CodecError::OutOfRange { .. })));
        assert!(matches!(decode_reference(&f, Encoding(256)), Err(CodecError::OutOfRange { .. })));
    }

    #[test]
    fn encode_examples() {
        let f = fmt("8p4se");
        assert_eq!(encode_bits(&f, &Value::Finite { m: 14, e: 4 }), Ok(Encoding(126)));
        assert_eq!(encode_bits(&f, &Value::Finite { m: -3, e: -10 }), Ok(Encoding(131)));
        assert_eq!(encode_bits(&fmt("8p4ue"), &Value::NaN), Ok(Encoding(255)));
        assert!(matches!(
            encode_bits(&f, &Value::Finite { m: 15, e: 4 }),
            Err(CodecError::InvalidValue { .. })
        ));
        assert!(encode_bits(&fmt("8p4sf"), &Value::POS_INF).is_err());
    }

    #[test]
    fn reference_agrees_on_examples() {
        for (f, n) in [("8p4se", 128), ("8p4se", 127), ("8p4se", 255), ("8p4ue", 254), ("8p4se", 126), ("4p2se", 5), ("8p4se", 0)] {
            assert_eq!(decode_reference(&fmt(f), Encoding(n)).unwrap(), dec(f, n), "{f} {n}");
        }
    }

    #[test]
    fn enumerate_3p1ue() {
        let rows = enumerate(&fmt("3p1ue")).unwrap();
        let reals: Vec<String> = rows.iter().map(|r| r.real.to_decimal_string()).collect();
        assert_eq!(reals, ["0", "0.125", "0.25", "0.5", "1", "2", "+Inf", "NaN"]);
    }

    #[test]
    fn enumerate_4p2se_positive_half() {
        let rows = enumerate(&fmt("4p2se")).unwrap();
        assert_eq!(rows.len(), 16);
        let expected = ["0", "0.25", "0.5", "0.75", "1", "1.5", "2"];
        for (row, want) in rows.iter().zip(expected) {
            assert_eq!(row.real, XReal::Finite(Dyadic::parse(want).unwrap()));
        }
        assert_eq!(rows[7].value, Value::POS_INF);
    }

    #[test]
    fn enumerate_guard() {
        assert!(matches!(enumerate(&fmt("17p4se")), Err(CodecError::FormatTooLarge(_))));
    }

    #[test]
    fn mutations_change_something() {
        let f = fmt("6p3se");
        for m in Mutation::ALL {
            assert_ne!(Codec::mutated(&f, m), Codec::new(&f), "{m:?}");
        }
    }

    #[test]
    fn csv_export() {
        let f = fmt("3p1ue");
        let rows = enumerate(&f).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "encoding,binary,class,m,e,value");
        assert_eq!(lines[1], "0,000,zero,0,-3,0");
        assert_eq!(lines[2], "1,001,normal,1,-3,0.125");
        assert_eq!(lines[7], "6,110,inf,,,+Inf");
        assert_eq!(lines[8], "7,111,nan,,,NaN");
    }
}
