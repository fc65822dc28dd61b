use super::PshExpr;
use crate::error::Result;
use crate::poly::parse::{describe, parse_expr, print_poly, Cursor};
use crate::poly::{TokenKind, Variables};

pub(super) fn parse_psh(text: &str, vars: &Variables) -> Result<PshExpr> {
    let mut cur = Cursor::new(text)?;
    let e = parse_sum(&mut cur, vars)?;
    cur.expect_end()?;
    Ok(e)
}

fn parse_number(cur: &mut Cursor) -> Result<f64> {
    match cur.peek().clone() {
        TokenKind::Num(v) => {
            cur.bump();
            if *cur.peek() == TokenKind::Slash {
                cur.bump();
                match cur.peek().clone() {
                    TokenKind::Num(d) if d != 0.0 => {
                        cur.bump();
                        Ok(v / d)
                    }
                    other => cur.error(format!("expected a nonzero denominator, found {}", describe(&other))),
                }
            } else {
                Ok(v)
            }
        }
        other => cur.error(format!("expected a number, found {}", describe(&other))),
    }
}

fn parse_sum(cur: &mut Cursor, vars: &Variables) -> Result<PshExpr> {
    let mut terms = Vec::new();
    if *cur.peek() == TokenKind::Minus {
        cur.bump();
        terms.push(PshExpr::Const(-parse_number(cur)?));
    } else {
        terms.push(parse_product(cur, vars)?);
    }
    loop {
        match cur.peek() {
            TokenKind::Plus => {
                cur.bump();
                terms.push(parse_product(cur, vars)?);
            }
            TokenKind::Minus => {
                cur.bump();
                if !matches!(cur.peek(), TokenKind::Num(_)) {
                    return cur.error("only constants may be subtracted");
                }
                let v = parse_number(cur)?;
                if *cur.peek() == TokenKind::Star {
                    return cur.error("negative multipliers are not plurisubharmonic");
                }
                terms.push(PshExpr::Const(-v));
            }
            _ => break,
        }
    }
    Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { PshExpr::Sum(terms) })
}

fn parse_product(cur: &mut Cursor, vars: &Variables) -> Result<PshExpr> {
    if matches!(cur.peek(), TokenKind::Num(_)) {
        let c = parse_number(cur)?;
        if *cur.peek() == TokenKind::Star {
            cur.bump();
            let inner = parse_product(cur, vars)?;
            return Ok(PshExpr::ScalarMul(c, Box::new(inner)));
        }
        return Ok(PshExpr::Const(c));
    }
    parse_atom(cur, vars)
}

fn parse_atom(cur: &mut Cursor, vars: &Variables) -> Result<PshExpr> {
    match cur.peek().clone() {
        TokenKind::Ident(name) if name == "log" => {
            cur.bump();
            match cur.peek() {
                TokenKind::Bar => {
                    cur.bump();
                    let h = parse_expr(cur, vars)?;
                    cur.expect(TokenKind::Bar, "closing `|`")?;
                    Ok(PshExpr::LogAbs(h))
                }
                TokenKind::LParen => {
                    cur.bump();
                    let mut parts = vec![parse_abs_power(cur, vars)?];
                    while *cur.peek() == TokenKind::Plus {
                        cur.bump();
                        parts.push(parse_abs_power(cur, vars)?);
                    }
                    cur.expect(TokenKind::RParen, "`)`")?;
                    Ok(PshExpr::LogSumAbsPow(parts))
                }
                other => cur.error(format!("expected `|` or `(` after log, found {}", describe(other))),
            }
        }
        TokenKind::Ident(name) if name == "max" => {
            cur.bump();
            cur.expect(TokenKind::LParen, "`(`")?;
            let mut args = vec![parse_sum(cur, vars)?];
            while *cur.peek() == TokenKind::Comma {
                cur.bump();
                args.push(parse_sum(cur, vars)?);
            }
            cur.expect(TokenKind::RParen, "`)`")?;
            Ok(PshExpr::Max(args))
        }
        TokenKind::LParen => {
            cur.bump();
            let inner = parse_sum(cur, vars)?;
            cur.expect(TokenKind::RParen, "`)`")?;
            Ok(inner)
        }
        other => cur.error(format!("expected log, max, a number or `(`, found {}", describe(&other))),
    }
}

fn parse_abs_power(cur: &mut Cursor, vars: &Variables) -> Result<(crate::poly::SparsePoly, f64)> {
    cur.expect(TokenKind::Bar, "`|`")?;
    let h = parse_expr(cur, vars)?;
    cur.expect(TokenKind::Bar, "closing `|`")?;
    let a = if *cur.peek() == TokenKind::Caret {
        cur.bump();
        if *cur.peek() == TokenKind::LParen {
            cur.bump();
            let a = parse_number(cur)?;
            cur.expect(TokenKind::RParen, "`)`")?;
            a
        } else {
            parse_number(cur)?
        }
    } else {
        1.0
    };
    Ok((h, a))
}

pub(super) fn print_psh(e: &PshExpr, vars: &Variables) -> String {
    match e {
        PshExpr::LogAbs(h) => format!("log|{}|", print_poly(h, vars)),
        PshExpr::LogSumAbsPow(parts) => {
            let inner: Vec<String> = parts
                .iter()
                .map(|(h, a)| {
                    if *a == 1.0 {
                        format!("|{}|", print_poly(h, vars))
                    } else {
                        format!("|{}|^{}", print_poly(h, vars), a)
                    }
                })
                .collect();
            format!("log({})", inner.join(" + "))
        }
        PshExpr::Sum(children) => {
            let mut out = String::new();
            for (i, c) in children.iter().enumerate() {
                match c {
                    PshExpr::Const(v) if *v < 0.0 => {
                        out.push_str(if i == 0 { "-" } else { " - " });
                        out.push_str(&format!("{}", -v));
                    }
                    _ => {
                        if i > 0 {
                            out.push_str(" + ");
                        }
                        out.push_str(&print_psh(c, vars));
                    }
                }
            }
            out
        }
        PshExpr::ScalarMul(c, child) => match child.as_ref() {
            PshExpr::Sum(_) | PshExpr::Const(_) => format!("{}*({})", c, print_psh(child, vars)),
            _ => format!("{}*{}", c, print_psh(child, vars)),
        },
        PshExpr::Max(children) => {
            let inner: Vec<String> = children.iter().map(|c| print_psh(c, vars)).collect();
            format!("max({})", inner.join(", "))
        }
        PshExpr::Const(v) => {
            if *v < 0.0 {
                format!("({})", v)
            } else {
                format!("{}", v)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::poly::SparsePoly;

    fn xyz() -> Variables {
        Variables::new(["x", "y", "z"]).unwrap()
    }

    #[test]
    fn grammar_shapes() {
        let v = xyz();
        let e = parse_psh("1/2*log(|x|^2 + |y|^2) - 3", &v).unwrap();
        match e {
            PshExpr::Sum(ref t) => {
                assert!(matches!(t[0], PshExpr::ScalarMul(c, _) if c == 0.5));
                assert_eq!(t[1], PshExpr::Const(-3.0));
            }
            other => panic!("{other:?}"),
        }
        let m = parse_psh("max(log|x|, 2*log|y| + 1)", &v).unwrap();
        assert!(matches!(m, PshExpr::Max(ref a) if a.len() == 2));
        let p = parse_psh("log(|x|^(1/3))", &v).unwrap();
        assert!(matches!(p, PshExpr::LogSumAbsPow(ref a) if (a[0].1 - 1.0 / 3.0).abs() < 1e-16));
    }

    #[test]
    fn rejects_non_psh_forms() {
        let v = xyz();
        assert!(parse_psh("log|x| - log|y|", &v).is_err());
        assert!(parse_psh("log|x| - 2*log|y|", &v).is_err());
        assert!(matches!(parse_psh("log|q|", &v), Err(Error::UnknownVariable(_))));
        assert!(matches!(parse_psh("log|x", &v), Err(Error::Parse { .. })));
    }

    #[test]
    fn print_round_trip() {
        let v = xyz();
        for text in [
            "log(|(x+y)^2| + |x-y| + |z^2|)",
            "max(log|x|, 0.5*log(|y|^2 + |z|^3)) - 1.5",
            "2*(log|x| + log|y|)",
            "-2 + 3*log|x*y - z|",
        ] {
            let e = parse_psh(text, &v).unwrap();
            let printed = print_psh(&e, &v);
            let again = parse_psh(&printed, &v).unwrap();
            assert_eq!(e, again, "{text} -> {printed}");
        }
        let h = SparsePoly::var(3, 0).unwrap();
        assert_eq!(print_psh(&PshExpr::LogAbs(h), &v), "log|x|");
    }
}
