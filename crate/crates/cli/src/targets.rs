//! Built-in target maps for compile and bench runs.

use std::sync::Arc;

use gdn_approx::Polynomial;
use gdn_manifold::linalg::{sym_decode, sym_encode};
use gdn_manifold::zoo::mobius_add;
use gdn_manifold::{Error, ManifoldKind, ManifoldSpec, Matrix, Result};

pub const ROTATION_ANGLE: f64 = 0.5;
pub const MOBIUS_SHIFT: f64 = 0.1;
pub const TARGET_NAMES: &str = "rotation, mobius-shift, spd-congruence, poly:<expr>[;<expr>...]";

pub type PointFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

#[derive(Clone)]
pub struct Target {
    pub name: String,
    pub f: PointFn,
}

impl Target {
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.f)(x)
    }
}

impl std::fmt::Debug for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Target({})", self.name)
    }
}

fn same_space(name: &str, domain: &ManifoldSpec, codomain: &ManifoldSpec) -> Result<()> {
    if domain != codomain {
        return Err(Error::validation(format!(
            "target '{name}' maps a space to itself; got {} -> {}",
            domain.id, codomain.id
        )));
    }
    Ok(())
}

/// Congruence matrix `I + 0.1 U` with `U` the strictly upper ones.
pub fn congruence_matrix(n: usize) -> Matrix {
    let mut x = Matrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            x[(i, j)] = 0.1;
        }
    }
    x
}

pub fn resolve_target(name: &str, domain: &ManifoldSpec, codomain: &ManifoldSpec) -> Result<Target> {
    let f: PointFn = match name {
        "rotation" => {
            same_space(name, domain, codomain)?;
            if !matches!(domain.kind, ManifoldKind::Sphere { .. } | ManifoldKind::Euclidean { .. }) || domain.point_len < 2 {
                return Err(Error::validation("rotation needs a sphere or a Euclidean space of dimension >= 2"));
            }
            let (c, s) = (ROTATION_ANGLE.cos(), ROTATION_ANGLE.sin());
            Arc::new(move |x: &[f64]| {
                let mut y = x.to_vec();
                y[0] = c * x[0] - s * x[1];
                y[1] = s * x[0] + c * x[1];
                Ok(y)
            })
        }
        "mobius-shift" => {
            same_space(name, domain, codomain)?;
            let ManifoldKind::Poincare { p, c } = domain.kind else {
                return Err(Error::validation("mobius-shift needs a Poincare ball"));
            };
            let mut a = vec![0.0; p];
            a[0] = MOBIUS_SHIFT / c.sqrt();
            Arc::new(move |x: &[f64]| Ok(mobius_add(&a, x, c)))
        }
        "spd-congruence" => {
            same_space(name, domain, codomain)?;
            let ManifoldKind::Spd { n } = domain.kind else {
                return Err(Error::validation("spd-congruence needs an SPD space"));
            };
            let x = congruence_matrix(n);
            Arc::new(move |v: &[f64]| {
                let a = sym_encode(v)?;
                sym_decode(&x.transpose().matmul(&a).matmul(&x).symmetrize())
            })
        }
        _ => match name.strip_prefix("poly:") {
            Some(exprs) => {
                let (ManifoldKind::Euclidean { p }, ManifoldKind::Euclidean { p: m }) = (domain.kind, codomain.kind) else {
                    return Err(Error::validation("poly targets need Euclidean domain and codomain"));
                };
                let polys = exprs.split(';').map(|e| parse_polynomial(e, p)).collect::<Result<Vec<_>>>()?;
                if polys.len() != m {
                    return Err(Error::validation(format!(
                        "poly target has {} components but the codomain has dimension {m}",
                        polys.len()
                    )));
                }
                Arc::new(move |x: &[f64]| Ok(polys.iter().map(|q| q.eval(x)).collect()))
            }
            None => {
                return Err(Error::validation(format!("unknown target '{name}'; valid targets: {TARGET_NAMES}")));
            }
        },
    };
    Ok(Target { name: name.to_string(), f })
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Var(usize),
    Op(char),
}

fn tokenize(src: &str, dim: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == 'e') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Num(s.parse().map_err(|_| Error::Parse(format!("bad number '{s}' in '{src}'")))?));
        } else if ch == 'x' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let k: usize = s.parse().map_err(|_| Error::Parse(format!("variable needs an index, as in x1, in '{src}'")))?;
            if k == 0 || k > dim {
                return Err(Error::Parse(format!("variable x{k} outside x1..x{dim} in '{src}'")));
            }
            out.push(Token::Var(k - 1));
        } else if "+-*^()".contains(ch) {
            out.push(Token::Op(ch));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected '{ch}' in '{src}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    dim: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at token {} in '{}'", self.pos + 1, self.src))
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs) } else { acc.add(&rhs.scale(-1.0)) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while let Some(Token::Op('*')) = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        if let Some(Token::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(self.factor()?.scale(-1.0));
        }
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let Some(Token::Num(e)) = self.peek().cloned() else {
                return Err(self.err("exponent must be a nonnegative integer"));
            };
            if e < 0.0 || e.fract() != 0.0 || e > 64.0 {
                return Err(self.err("exponent must be a nonnegative integer"));
            }
            self.pos += 1;
            let mut out = Polynomial::constant(self.dim, 1.0);
            for _ in 0..e as u32 {
                out = out.mul(&base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Polynomial::constant(self.dim, v)),
            Token::Var(k) => Ok(Polynomial::variable(self.dim, k)),
            Token::Op('(') => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::Op(')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err("missing ')'")),
                }
            }
            Token::Op(c) => Err(self.err(&format!("unexpected '{c}'"))),
        }
    }
}

/// Parses `+ - * ^`, parentheses, numbers and variables `x1..x{dim}`.
pub fn parse_polynomial(src: &str, dim: usize) -> Result<Polynomial> {
    let tokens = tokenize(src, dim)?;
    let mut parser = Parser { tokens, pos: 0, dim, src };
    let poly = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.err("trailing input"));
    }
    Ok(poly)
}
