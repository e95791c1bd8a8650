//! Interval endpoints: `[lo, hi)`-style intervals whose endpoints are
//! arithmetic expressions in decimals, `tau`, `sqrt5` and `pi`.
//!
//! Expressions free of `pi` are evaluated exactly in ℚ(√5).

use fibdiff_core::{Bound, Surd, Window};

#[derive(Clone, Copy, Debug)]
struct Value {
    exact: Option<Surd>,
    approx: f64,
}

impl Value {
    fn exact(s: Surd) -> Self {
        Value { exact: Some(s), approx: s.to_f64() }
    }

    fn approx(x: f64) -> Self {
        Value { exact: None, approx: x }
    }

    fn combine(self, o: Value, exact: fn(Surd, Surd) -> Option<Surd>, approx: fn(f64, f64) -> f64) -> Value {
        let a = approx(self.approx, o.approx);
        match (self.exact, o.exact) {
            (Some(x), Some(y)) => match exact(x, y) {
                Some(s) => Value::exact(s),
                None => Value::approx(a),
            },
            _ => Value::approx(a),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<char> {
        self.src[self.pos..].chars().find(|c| !c.is_whitespace())
    }

    fn bump(&mut self) -> Option<char> {
        while let Some(c) = self.src[self.pos..].chars().next() {
            self.pos += c.len_utf8();
            if !c.is_whitespace() {
                return Some(c);
            }
        }
        None
    }

    fn expr(&mut self) -> Result<Value, String> {
        let mut v = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.bump();
            let r = self.term()?;
            v = if op == '+' {
                v.combine(r, Surd::checked_add, |a, b| a + b)
            } else {
                v.combine(r, Surd::checked_sub, |a, b| a - b)
            };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<Value, String> {
        let mut v = self.factor()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.bump();
            let r = self.factor()?;
            if op == '*' {
                v = v.combine(r, Surd::checked_mul, |a, b| a * b);
            } else {
                if r.approx == 0.0 {
                    return Err("division by zero".into());
                }
                v = v.combine(r, Surd::checked_div, |a, b| a / b);
            }
        }
        Ok(v)
    }

    fn factor(&mut self) -> Result<Value, String> {
        match self.peek() {
            Some('-') => {
                self.bump();
                let v = self.factor()?;
                Ok(Value { exact: v.exact.and_then(Surd::checked_neg), approx: -v.approx })
            }
            Some('+') => {
                self.bump();
                self.factor()
            }
            Some('(') => {
                self.bump();
                let v = self.expr()?;
                match self.bump() {
                    Some(')') => Ok(v),
                    _ => Err("missing ')'".into()),
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.src.len() - self.src[self.pos..].trim_start().len();
                let len = self.src[start..].chars().take_while(|c| c.is_ascii_alphanumeric()).count();
                self.pos = start + len;
                match &self.src[start..start + len] {
                    "tau" => Ok(Value::exact(Surd::tau())),
                    "sqrt5" => Ok(Value::exact(Surd::sqrt5())),
                    "pi" => Ok(Value::approx(std::f64::consts::PI)),
                    other => Err(format!("unknown name {other:?}")),
                }
            }
            Some(c) => Err(format!("unexpected {c:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }

    fn number(&mut self) -> Result<Value, String> {
        let start = self.src.len() - self.src[self.pos..].trim_start().len();
        let rest = &self.src[start..];
        let mut len = 0;
        let bytes = rest.as_bytes();
        while len < bytes.len() && (bytes[len].is_ascii_digit() || bytes[len] == b'.') {
            len += 1;
        }
        if len < bytes.len() && (bytes[len] == b'e' || bytes[len] == b'E') {
            let mut j = len + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                len = j;
            }
        }
        let text = &rest[..len];
        self.pos = start + len;
        let approx: f64 = text.parse().map_err(|_| format!("bad number {text:?}"))?;
        Ok(match decimal(text) {
            Some(s) => Value { exact: Some(s), approx },
            None => Value::approx(approx),
        })
    }
}

/// Exact value of a decimal literal such as `0.125` or `1e-3`.
fn decimal(text: &str) -> Option<Surd> {
    let (mant, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: i128 = format!("{int}{frac}").parse().ok()?;
    let exp = exp - frac.len() as i32;
    let ten = |e: u32| 10i128.checked_pow(e);
    if exp >= 0 {
        digits.checked_mul(ten(exp as u32)?).map(Surd::from_int)
    } else {
        Surd::rational(digits, ten((-exp) as u32)?).ok()
    }
}

fn to_bound(v: Value) -> Bound {
    match v.exact {
        Some(s) => Bound::Exact(s),
        None => Bound::Approx(v.approx),
    }
}

/// Evaluates an endpoint expression.
pub fn parse_expr(src: &str) -> Result<Bound, String> {
    let mut p = Parser { src, pos: 0 };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(format!("trailing input in {src:?}"));
    }
    if !v.approx.is_finite() {
        return Err(format!("{src:?} is not finite"));
    }
    Ok(to_bound(v))
}

/// A float-valued expression, e.g. for `--n 1e4`.
pub fn parse_number(src: &str) -> Result<f64, String> {
    parse_expr(src).map(Bound::to_f64)
}

/// `[lo, hi]`, `(lo, hi)`, `[lo, hi)`, `(lo, hi]`, or `lo,hi` (closed).
pub fn parse_interval(src: &str) -> Result<Window, String> {
    let s = src.trim();
    let (lo_closed, s) = match s.chars().next() {
        Some('[') => (true, &s[1..]),
        Some('(') => (false, &s[1..]),
        _ => (true, s),
    };
    let (hi_closed, s) = match s.chars().last() {
        Some(']') => (true, &s[..s.len() - 1]),
        Some(')') if src.trim().starts_with(['[', '(']) => (false, &s[..s.len() - 1]),
        _ => (true, s),
    };
    let comma = top_level_comma(s).ok_or_else(|| format!("interval {src:?} needs two endpoints"))?;
    let lo = parse_expr(&s[..comma])?;
    let hi = parse_expr(&s[comma + 1..])?;
    Window::new(lo, hi, lo_closed, hi_closed).map_err(|e| format!("interval {src:?}: {e}"))
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Comma-separated list of expressions.
pub fn parse_list(src: &str) -> Result<Vec<f64>, String> {
    src.split(',').filter(|p| !p.trim().is_empty()).map(parse_number).collect()
}

/// Canonical text of an interval for config headers.
pub fn show_interval(w: &Window) -> String {
    format!(
        "{}{},{}{}",
        if w.lo_closed { '[' } else { '(' },
        show_bound(w.lo),
        show_bound(w.hi),
        if w.hi_closed { ']' } else { ')' }
    )
}

fn show_bound(b: Bound) -> String {
    match b {
        Bound::Exact(s) => s.to_string(),
        Bound::Approx(x) => format!("{x:.16e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert_eq!(parse_expr("tau-1").unwrap(), Bound::Exact(Surd::tau() - Surd::ONE));
        assert_eq!(parse_expr("0.1").unwrap(), Bound::Exact(Surd::rational(1, 10).unwrap()));
        assert_eq!(parse_expr("1e4").unwrap(), Bound::Exact(Surd::from_int(10000)));
        assert_eq!(parse_expr("-(1 + sqrt5)/2").unwrap(), Bound::Exact(-Surd::tau()));
        assert_eq!(parse_expr("2*-3").unwrap(), Bound::Exact(Surd::from_int(-6)));
    }

    #[test]
    fn approx_values() {
        let b = parse_expr("1/(2*pi*tau)").unwrap();
        assert!(
            matches!(b, Bound::Approx(x) if (x - 1.0 / (2.0 * std::f64::consts::PI * fibdiff_core::TAU)).abs() < 1e-16)
        );
    }

    #[test]
    fn intervals() {
        let w = parse_interval("[-1, tau-1)").unwrap();
        assert_eq!(w, Window::fibonacci());
        let w = parse_interval("-2,2").unwrap();
        assert!(w.lo_closed && w.hi_closed);
        let w = parse_interval("(-0.1, 0.1)").unwrap();
        assert!(!w.lo_closed && !w.hi_closed);
        assert_eq!(show_interval(&parse_interval("[0,1]").unwrap()), "[0,1]");
        for bad in ["[1,0]", "[1]", "[a,b]", "[1,2,3]", "[1/0, 2]"] {
            assert!(parse_interval(bad).is_err(), "{bad}");
        }
    }
}
