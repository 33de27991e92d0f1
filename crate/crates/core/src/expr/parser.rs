use super::dag::{DagBuilder, Func1, NodeId};
use super::token::{lex, Tok, Token};
use super::ExprError;

/// Parse `source` into `builder`, returning the root node. Multiple sources
/// parsed into one builder share subtrees and the symbol table.
pub fn parse_into(builder: &mut DagBuilder, source: &str) -> Result<NodeId, ExprError> {
    let tokens = lex(source)?;
    let mut p = Parser {
        b: builder,
        toks: tokens,
        pos: 0,
    };
    let root = p.expr()?;
    p.expect_eof()?;
    Ok(root)
}

struct Parser<'b> {
    b: &'b mut DagBuilder,
    toks: Vec<Token>,
    pos: usize,
}

impl<'b> Parser<'b> {
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

    fn err(&self, msg: impl Into<String>) -> ExprError {
        let t = self.peek();
        ExprError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        }
    }

    fn expect_eof(&self) -> Result<(), ExprError> {
        match self.peek().tok {
            Tok::Eof => Ok(()),
            _ => Err(self.err("expected end of expression")),
        }
    }

    fn expr(&mut self) -> Result<NodeId, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = self.b.add(lhs, rhs);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = self.b.sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<NodeId, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = self.b.mul(lhs, rhs);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = self.b.div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<NodeId, ExprError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(self.b.neg(inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<NodeId, ExprError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let mut sign = 1i32;
        if self.peek().tok == Tok::Minus {
            self.bump();
            sign = -1;
        }
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                self.bump();
                Ok(self.b.pow(base, sign * v as i32))
            }
            _ => Err(ExprError::NonIntegerExponent {
                line: t.line,
                col: t.col,
            }),
        }
    }

    fn atom(&mut self) -> Result<NodeId, ExprError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(self.b.num(v)),
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while self.peek().tok == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    if self.peek().tok != Tok::RParen {
                        return Err(self.err("expected `)` or `,`"));
                    }
                    self.bump();
                    self.call(&name, args, t.line, t.col)
                } else if name == "pi" {
                    Ok(self.b.num(std::f64::consts::PI))
                } else {
                    Ok(self.b.sym(&name))
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Eof => Err(ExprError::Syntax {
                line: t.line,
                col: t.col,
                msg: "unexpected end of expression".into(),
            }),
            other => Err(ExprError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("unexpected token `{other:?}`"),
            }),
        }
    }

    fn call(
        &mut self,
        name: &str,
        args: Vec<NodeId>,
        line: u32,
        col: u32,
    ) -> Result<NodeId, ExprError> {
        let arity = |expected: usize| -> Result<(), ExprError> {
            if args.len() != expected {
                Err(ExprError::WrongArity {
                    name: name.to_string(),
                    expected,
                    got: args.len(),
                })
            } else {
                Ok(())
            }
        };
        let f = match name {
            "sin" => Func1::Sin,
            "cos" => Func1::Cos,
            "tan" => Func1::Tan,
            "exp" => Func1::Exp,
            "log" => Func1::Log,
            "sqrt" => Func1::Sqrt,
            "bumppoly3" => Func1::BumpPoly(3),
            "bumppoly5" => Func1::BumpPoly(5),
            "atan2" => {
                arity(2)?;
                return Ok(self.b.atan2(args[0], args[1]));
            }
            _ => {
                return Err(ExprError::UnknownFunction {
                    name: name.to_string(),
                    line,
                    col,
                })
            }
        };
        arity(1)?;
        Ok(self.b.call1(f, args[0]))
    }
}
