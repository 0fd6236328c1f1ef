use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::lexer::{tokenize, Span, Tok, Token};
use crate::error::{Error, Result};
use crate::operator::OperatorSymbol;
use crate::polyalg::{HomPoly, MultiIndex, PolyMatrix, Rational};

/// Operator text plus the name used in diagnostics.
#[derive(Clone, Debug)]
pub struct OperatorSource {
    pub text: String,
    pub file: String,
}

impl OperatorSource {
    pub fn new(text: impl Into<String>, file: impl Into<String>) -> Self {
        OperatorSource { text: text.into(), file: file.into() }
    }
}

struct RawTerm {
    coeff: Rational,
    /// 1-based variable index → exponent.
    exps: BTreeMap<usize, u32>,
    span: Span,
}

struct RawPoly {
    terms: Vec<RawTerm>,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
    prefix: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax_at(&self, span: Span, message: String, expected: &[&str]) -> Error {
        Error::Syntax {
            file: self.file.into(),
            line: span.line,
            column: span.column,
            message,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> Error {
        let t = self.peek();
        self.syntax_at(t.span, format!("unexpected {}", t.tok.describe()), expected)
    }

    fn expect(&mut self, want: Tok) -> Result<Span> {
        if self.peek().tok == want {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[want.symbol()]))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Span> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => Ok(self.bump().span),
            _ => Err(self.unexpected(&[kw])),
        }
    }

    fn expect_int(&mut self) -> Result<(BigInt, Span)> {
        match &self.peek().tok {
            Tok::Int(s) => {
                let v: BigInt = s.parse().expect("lexer produced digits");
                Ok((v, self.bump().span))
            }
            _ => Err(self.unexpected(&["INT"])),
        }
    }

    fn expect_small_int(&mut self) -> Result<(usize, Span)> {
        let (v, span) = self.expect_int()?;
        let v = usize::try_from(&v)
            .ok()
            .filter(|&x| x <= 1 << 20)
            .ok_or_else(|| self.syntax_at(span, format!("integer {v} is too large"), &["INT"]))?;
        Ok((v, span))
    }

    /// Variable index if the next token starts a factor.
    fn factor_start(&self) -> bool {
        match &self.peek().tok {
            Tok::Ident(s) => {
                s == self.prefix
                    || (s.starts_with(self.prefix)
                        && s.len() > self.prefix.len()
                        && s[self.prefix.len()..].bytes().all(|b| b.is_ascii_digit()))
            }
            _ => false,
        }
    }

    fn parse_factor(&mut self) -> Result<(usize, u32, Span)> {
        let t = self.bump();
        let Tok::Ident(s) = &t.tok else { unreachable!("checked by factor_start") };
        let idx = if s == self.prefix {
            self.expect_small_int()?.0
        } else {
            s[self.prefix.len()..]
                .parse::<usize>()
                .map_err(|_| self.syntax_at(t.span, format!("bad variable `{s}`"), &[]))?
        };
        if idx == 0 {
            return Err(self.syntax_at(t.span, "variables are numbered from 1".into(), &[]));
        }
        let mut e = 1;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let (v, span) = self.expect_small_int()?;
            e = u32::try_from(v).map_err(|_| self.syntax_at(span, "exponent too large".into(), &[]))?;
        }
        Ok((idx, e, t.span))
    }

    fn parse_term(&mut self, negative: bool) -> Result<RawTerm> {
        let start = self.peek().span;
        let mut coeff: Option<Rational> = None;
        if let Tok::Int(_) = self.peek().tok {
            let (num, _) = self.expect_int()?;
            let mut c = Rational::from_integer(num);
            if self.peek().tok == Tok::Slash {
                self.bump();
                let (den, span) = self.expect_int()?;
                if den.is_zero() {
                    return Err(self.syntax_at(span, "zero denominator".into(), &["nonzero INT"]));
                }
                c /= Rational::from_integer(den);
            }
            coeff = Some(c);
            if self.peek().tok == Tok::Star {
                self.bump();
                if !self.factor_start() {
                    let want = format!("{}<i>", self.prefix);
                    return Err(self.unexpected(&[want.as_str()]));
                }
            }
        }
        let mut exps = BTreeMap::new();
        let mut any_factor = false;
        while self.factor_start() {
            let (i, e, _) = self.parse_factor()?;
            *exps.entry(i).or_insert(0) += e;
            any_factor = true;
            if self.peek().tok == Tok::Star {
                self.bump();
                if !self.factor_start() {
                    let want = format!("{}<i>", self.prefix);
                    return Err(self.unexpected(&[want.as_str()]));
                }
            }
        }
        if coeff.is_none() && !any_factor {
            let want = format!("{}<i>", self.prefix);
            return Err(self.unexpected(&["INT", want.as_str()]));
        }
        let mut c = coeff.unwrap_or_else(|| Rational::from_integer(1.into()));
        if negative {
            c = -c;
        }
        Ok(RawTerm { coeff: c, exps, span: start })
    }

    fn parse_poly(&mut self) -> Result<RawPoly> {
        let mut negative = false;
        if self.peek().tok == Tok::Minus {
            self.bump();
            negative = true;
        }
        let mut terms = vec![self.parse_term(negative)?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.parse_term(false)?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(self.parse_term(true)?);
                }
                _ => break,
            }
        }
        Ok(RawPoly { terms })
    }

    fn parse_matrix(&mut self) -> Result<(Vec<Vec<RawPoly>>, Vec<Span>)> {
        self.expect(Tok::LBracket)?;
        let mut rows = Vec::new();
        let mut spans = Vec::new();
        loop {
            spans.push(self.expect(Tok::LBracket)?);
            let mut row = vec![self.parse_poly()?];
            loop {
                match self.peek().tok {
                    Tok::Comma => {
                        self.bump();
                        row.push(self.parse_poly()?);
                    }
                    Tok::RBracket => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.unexpected(&[",", "]", "+", "-"])),
                }
            }
            rows.push(row);
            match self.peek().tok {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBracket => {
                    self.bump();
                    break;
                }
                _ => return Err(self.unexpected(&[",", "]"])),
            }
        }
        Ok((rows, spans))
    }

    fn build_poly(&self, raw: &RawPoly, n: usize, degree: u32, cell: Option<(usize, usize)>) -> Result<HomPoly> {
        let mut terms = Vec::new();
        for t in &raw.terms {
            if t.coeff.is_zero() {
                continue;
            }
            let mut ex = vec![0u32; n];
            for (&i, &e) in &t.exps {
                if i > n {
                    return Err(self.syntax_at(
                        t.span,
                        format!("variable {}{i} out of range for vars = {n}", self.prefix),
                        &[],
                    ));
                }
                ex[i - 1] += e;
            }
            let alpha = MultiIndex::new(ex);
            if alpha.degree() != degree {
                let (row, col) = cell.unwrap_or((0, 0));
                return Err(Error::Homogeneity {
                    file: self.file.into(),
                    line: t.span.line,
                    column: t.span.column,
                    row,
                    col,
                    order: degree,
                    monomial: HomPoly::monomial(alpha, t.coeff.clone()).render(self.prefix),
                });
            }
            terms.push((alpha, t.coeff.clone()));
        }
        HomPoly::from_terms(n, degree, terms)
    }

    fn parse_operator(&mut self) -> Result<OperatorSymbol> {
        self.expect_keyword("operator")?;
        let name = match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                s
            }
            _ => return Err(self.unexpected(&["IDENT"])),
        };
        self.expect(Tok::LBrace)?;
        let mut vars = None;
        let mut from = None;
        let mut order = None;
        let mut symbol = None;
        let close;
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::RBrace => {
                    close = self.bump().span;
                    break;
                }
                Tok::Ident(f) if ["vars", "from", "order", "symbol"].contains(&f.as_str()) => {
                    let f = f.clone();
                    self.bump();
                    self.expect(Tok::Eq)?;
                    let dup = match f.as_str() {
                        "vars" => vars.replace(self.expect_small_int()?).is_some(),
                        "from" => from.replace(self.expect_small_int()?).is_some(),
                        "order" => order.replace(self.expect_small_int()?).is_some(),
                        _ => symbol.replace(self.parse_matrix()?).is_some(),
                    };
                    if dup {
                        return Err(self.syntax_at(t.span, format!("duplicate field `{f}`"), &[]));
                    }
                    self.expect(Tok::Semi)?;
                }
                _ => return Err(self.unexpected(&["vars", "from", "order", "symbol", "}"])),
            }
        }
        let missing = |what: &str| self.syntax_at(close, format!("missing field `{what}`"), &[what]);
        let (n, nspan) = vars.ok_or_else(|| missing("vars"))?;
        let (dim_from, fspan) = from.ok_or_else(|| missing("from"))?;
        let (l, ospan) = order.ok_or_else(|| missing("order"))?;
        let (raw, row_spans) = symbol.ok_or_else(|| missing("symbol"))?;
        if n == 0 {
            return Err(self.syntax_at(nspan, "vars must be at least 1".into(), &[]));
        }
        if l == 0 {
            return Err(self.syntax_at(ospan, "order must be at least 1".into(), &[]));
        }
        if dim_from == 0 {
            return Err(self.syntax_at(fspan, "from must be at least 1".into(), &[]));
        }
        let mut rows = Vec::with_capacity(raw.len());
        for (i, (r, span)) in raw.iter().zip(&row_spans).enumerate() {
            if r.len() != dim_from {
                return Err(Error::Dimension(format!(
                    "{}:{}:{}: row {} has {} entries but from = {dim_from}",
                    self.file,
                    span.line,
                    span.column,
                    i + 1,
                    r.len()
                )));
            }
            let row = r
                .iter()
                .enumerate()
                .map(|(j, p)| self.build_poly(p, n, l as u32, Some((i, j))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        OperatorSymbol::new(name, PolyMatrix::from_rows(n, l as u32, rows)?)
    }
}

fn parser<'a>(text: &str, file: &'a str, prefix: &'a str) -> Result<Parser<'a>> {
    Ok(Parser { toks: tokenize(text, file)?, pos: 0, file, prefix })
}

/// Every operator in a file, in order.
pub fn parse_operators(src: &OperatorSource) -> Result<Vec<OperatorSymbol>> {
    let mut p = parser(&src.text, &src.file, "d")?;
    let mut out = vec![p.parse_operator()?];
    while p.peek().tok != Tok::Eof {
        out.push(p.parse_operator()?);
    }
    Ok(out)
}

/// The single operator in a file.
pub fn parse_operator(src: &OperatorSource) -> Result<OperatorSymbol> {
    let mut p = parser(&src.text, &src.file, "d")?;
    let op = p.parse_operator()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(op)
}

/// A standalone homogeneous polynomial in `prefix1 … prefixN`, e.g.
/// `v1*v4 - v2*v3`. The degree is taken from the first nonzero term.
pub fn parse_polynomial(text: &str, nvars: usize, prefix: &str) -> Result<HomPoly> {
    let mut p = parser(text, "<polynomial>", prefix)?;
    let raw = p.parse_poly()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected(&["+", "-", "end of input"]));
    }
    let degree = raw
        .terms
        .iter()
        .find(|t| !t.coeff.is_zero())
        .map_or(0, |t| t.exps.values().sum::<u32>());
    p.build_poly(&raw, nvars, degree, None)
}
