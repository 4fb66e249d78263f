//! Text formats for fields and elements.
//!
//! Fields: `Qp:p=5,prec=20` or `Fq:p=2,f=2,prec=20,modulus=1-1-1` (modulus
//! coefficients low degree first). Elements are arithmetic expressions over
//! integers, `t` / `pi` (the uniformizer) and `O(...)` precision terms:
//! `1 + 2*t + t^3 + O(t^5)`, `3/7 - 5^2`, `(1 + t)^-1`.

use std::fmt::Write as _;

use super::local::{FieldKind, LocalElem, LocalField};
use crate::error::{Error, Result};

pub fn parse_field(s: &str) -> Result<LocalField> {
    let s = s.trim();
    let (head, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidField(format!("expected `Qp:...` or `Fq:...`, got `{s}`")))?;
    let mut p = None;
    let mut f = None;
    let mut prec = None;
    let mut modulus = None;
    for kv in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidField(format!("expected key=value, got `{kv}`")))?;
        let num = |v: &str| -> Result<i64> {
            v.trim().parse().map_err(|_| Error::InvalidField(format!("bad number `{v}` for `{k}`")))
        };
        match k.trim() {
            "p" => p = Some(num(v)?),
            "f" => f = Some(num(v)?),
            "prec" => prec = Some(num(v)?),
            "modulus" => {
                let cs: Result<Vec<u32>> = v
                    .split('-')
                    .map(|c| c.trim().parse().map_err(|_| Error::InvalidField(format!("bad modulus `{v}`"))))
                    .collect();
                modulus = Some(cs?);
            }
            other => return Err(Error::InvalidField(format!("unknown key `{other}`"))),
        }
    }
    let p = p.ok_or_else(|| Error::InvalidField("missing `p`".into()))?;
    if !(2..=1_000_000).contains(&p) {
        return Err(Error::InvalidField(format!("p = {p} out of range")));
    }
    let prec = prec.unwrap_or(20);
    match head.trim() {
        "Qp" => {
            if f.is_some_and(|f| f != 1) || modulus.is_some() {
                return Err(Error::InvalidField("Qp takes only p and prec".into()));
            }
            LocalField::qp(p as u32, prec)
        }
        "Fq" => {
            let f = f.unwrap_or(1);
            if !(1..=20).contains(&f) {
                return Err(Error::InvalidField(format!("f = {f} out of range")));
            }
            LocalField::laurent(p as u32, f as u32, prec, modulus)
        }
        other => Err(Error::InvalidField(format!("unknown field family `{other}`"))),
    }
}

/// Canonical spec string of a field.
pub fn field_spec(f: &LocalField) -> String {
    match f.kind() {
        FieldKind::Padic => format!("Qp:p={},prec={}", f.p(), f.prec()),
        FieldKind::Laurent => {
            let k = f.residue_field();
            let m: Vec<String> = k.modulus().iter().map(|c| c.to_string()).collect();
            if k.f() == 1 {
                format!("Fq:p={},f=1,prec={}", f.p(), f.prec())
            } else {
                format!("Fq:p={},f={},prec={},modulus={}", f.p(), k.f(), f.prec(), m.join("-"))
            }
        }
    }
}

struct Parser<'a> {
    f: &'a LocalField,
    s: &'a [u8],
    pos: usize,
    /// Absolute precision from `O(...)` terms.
    big_o: Option<i64>,
}

enum Value {
    Elem(LocalElem),
    /// A bare integer literal, kept so `5^3` in `Q_p` and exponent parsing
    /// behave as expected.
    Int(i64),
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.pos, msg))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse(start, "integer too large"))
    }

    fn to_elem(&self, v: Value, at: usize) -> Result<LocalElem> {
        match v {
            Value::Elem(e) => Ok(e),
            Value::Int(n) => match self.f.kind() {
                FieldKind::Padic => Ok(self.f.from_int(n)),
                FieldKind::Laurent => {
                    if n < 0 || n >= self.f.q() as i64 {
                        return Err(Error::parse(at, format!("residue index {n} not below q = {}", self.f.q())));
                    }
                    Ok(self.f.from_residue(n as u32))
                }
            },
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        loop {
            let at = self.pos;
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = self.combine(acc, rhs, b'+', at)?;
            } else if self.peek() == Some(b'-') {
                self.pos += 1;
                let rhs = self.term()?;
                acc = self.combine(acc, rhs, b'-', at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        loop {
            let at = self.pos;
            if self.eat(b'*') {
                let rhs = self.factor()?;
                acc = self.combine(acc, rhs, b'*', at)?;
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                acc = self.combine(acc, rhs, b'/', at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn combine(&mut self, a: Value, b: Value, op: u8, at: usize) -> Result<Value> {
        if let (Value::Int(x), Value::Int(y)) = (&a, &b) {
            if self.f.kind() == FieldKind::Padic && op != b'/' {
                let r = match op {
                    b'+' => x.checked_add(*y),
                    b'-' => x.checked_sub(*y),
                    _ => x.checked_mul(*y),
                };
                if let Some(r) = r {
                    return Ok(Value::Int(r));
                }
            }
        }
        let x = self.to_elem(a, at)?;
        let y = self.to_elem(b, at)?;
        let f = self.f;
        Ok(Value::Elem(match op {
            b'+' => f.add(&x, &y),
            b'-' => f.sub(&x, &y),
            b'*' => f.mul(&x, &y),
            _ => f.div(&x, &y).map_err(|e| Error::parse(at, e.to_string()))?,
        }))
    }

    fn factor(&mut self) -> Result<Value> {
        let at = self.pos;
        if self.eat(b'-') {
            let v = self.factor()?;
            return Ok(match v {
                Value::Int(n) if self.f.kind() == FieldKind::Padic => Value::Int(-n),
                v => Value::Elem(self.f.neg(&self.to_elem(v, at)?)),
            });
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let e = self.int()?;
            let e = if neg { -e } else { e };
            if let Value::Int(n) = base {
                if self.f.kind() == FieldKind::Padic && e >= 0 {
                    if let Some(r) = u32::try_from(e).ok().and_then(|e| n.checked_pow(e)) {
                        return Ok(Value::Int(r));
                    }
                }
            }
            let b = self.to_elem(base, at)?;
            return Ok(Value::Elem(self.f.pow(&b, e).map_err(|err| Error::parse(at, err.to_string()))?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Value::Int(self.int()?)),
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(v)
            }
            Some(b't') if self.f.kind() == FieldKind::Laurent => {
                self.pos += 1;
                Ok(Value::Elem(self.f.uniformizer()))
            }
            Some(b'p') if self.s[self.pos..].starts_with(b"pi") => {
                self.pos += 2;
                Ok(Value::Elem(self.f.uniformizer()))
            }
            Some(b'O') => {
                self.pos += 1;
                if !self.eat(b'(') {
                    return self.err("expected `(` after `O`");
                }
                let v = self.expr()?;
                let at = self.pos;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                let e = self.to_elem(v, at)?;
                let a = match e.val() {
                    Some(v) => v,
                    None => return Err(Error::parse(at, "O(0) is not a precision")),
                };
                self.big_o = Some(self.big_o.map_or(a, |b: i64| b.min(a)));
                Ok(Value::Elem(self.f.zero_mod(a)))
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_elem(f: &LocalField, s: &str) -> Result<LocalElem> {
    let mut p = Parser { f, s: s.as_bytes(), pos: 0, big_o: None };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return p.err("trailing input");
    }
    let e = p.to_elem(v, 0)?;
    Ok(match p.big_o {
        Some(a) => f.truncate(&e, a),
        None => e,
    })
}

/// Series display, lowest term first, with a trailing `O(...)` for inexact
/// elements.
pub fn format_elem(f: &LocalField, x: &LocalElem) -> String {
    let u = f.uniformizer_name();
    let mut out = String::new();
    if let Some(v) = x.val() {
        for (i, &d) in x.stored_digits().iter().enumerate() {
            if d == 0 {
                continue;
            }
            let k = v + i as i64;
            if !out.is_empty() {
                out.push_str(" + ");
            }
            let pw = match k {
                0 => String::new(),
                1 => u.clone(),
                k if k < 0 => format!("{u}^({k})"),
                k => format!("{u}^{k}"),
            };
            match (d, pw.is_empty()) {
                (d, true) => write!(out, "{d}").unwrap(),
                (1, false) => out.push_str(&pw),
                (d, false) => write!(out, "{d}*{pw}").unwrap(),
            }
        }
    }
    if let Some(a) = x.abs_prec() {
        if !out.is_empty() {
            out.push_str(" + ");
        }
        if a < 0 {
            write!(out, "O({u}^({a}))").unwrap();
        } else {
            write!(out, "O({u}^{a})").unwrap();
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_specs_round_trip() {
        for s in ["Qp:p=5,prec=20", "Fq:p=2,f=2,prec=16,modulus=1-1-1", "Fq:p=3,f=1,prec=10"] {
            let f = parse_field(s).unwrap();
            assert_eq!(field_spec(&f), s);
        }
        assert!(parse_field("Qp:p=6,prec=5").is_err());
        assert!(parse_field("Fq:p=2,f=2,modulus=1-0-1").is_err());
        assert!(parse_field("Zp:p=5").is_err());
    }

    #[test]
    fn laurent_display() {
        let f = parse_field("Fq:p=3,f=1,prec=10").unwrap();
        let x = parse_elem(&f, "1 + 2*t + t^3 + O(t^5)").unwrap();
        assert_eq!(format_elem(&f, &x), "1 + 2*t + t^3 + O(t^5)");
        let y = parse_elem(&f, "t^-2 + 1").unwrap();
        assert_eq!(format_elem(&f, &y), "t^(-2) + 1");
    }

    #[test]
    fn padic_expressions() {
        let f = parse_field("Qp:p=5,prec=8").unwrap();
        let x = parse_elem(&f, "3 + 5^2").unwrap();
        assert_eq!(format_elem(&f, &x), "3 + 5^2");
        let y = parse_elem(&f, "1/2").unwrap();
        assert!(f.eq(&f.mul(&y, &f.from_int(2)), &f.one()));
        let z = parse_elem(&f, "-1 + O(5^3)").unwrap();
        assert_eq!(format_elem(&f, &z), "4 + 4*5 + 4*5^2 + O(5^3)");
    }

    #[test]
    fn parse_errors_carry_position() {
        let f = parse_field("Fq:p=2,f=1,prec=10").unwrap();
        match parse_elem(&f, "1 + 3") {
            Err(Error::Parse { .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_elem(&f, "1 + (t").is_err());
        assert!(parse_elem(&f, "1/0").is_err());
    }
}
