//! Smooth scalar expressions with exact forward-mode first and second
//! derivatives.
//!
//! Expressions are parsed into a hash-consed DAG ([`Dag`]); structurally
//! identical subtrees are shared, which keeps stacked constructions (normal
//! fields, bump deformations) compact. Evaluation is jet propagation: a jet
//! carries the value, the gradient with respect to the declared variables and
//! the packed upper triangle of the Hessian. No finite differencing anywhere.
//!
//! Symbols are role-agnostic in the DAG; whether a symbol is a variable
//! (seeded with a unit gradient) or a parameter (constant for the evaluation)
//! is decided when a [`Program`] is compiled. Sweeps therefore re-bind
//! parameters without re-parsing.
//!
//! Grammar (EBNF):
//! ```text
//! expr    := term { ("+" | "-") term }
//! term    := unary { ("*" | "/") unary }
//! unary   := "-" unary | power
//! power   := atom [ "^" [ "-" ] integer ]
//! atom    := number | ident | ident "(" expr { "," expr } ")" | "(" expr ")"
//! ```
//! Functions: `sin cos tan exp log sqrt atan2 bumppoly3 bumppoly5`; `pi` is a
//! built-in constant. Exponents are constant integers, so `^` stays total and
//! smooth. `bumppolyK(s)` is `(1-s)^K` for `s < 1` and `0` otherwise; it is
//! the compactly supported profile used by surface bumps (`C^{K-1}` at the
//! support boundary).

mod dag;
mod deriv;
mod jet;
mod parser;
mod print;
mod subst;
mod token;

pub use dag::{Dag, DagBuilder, Func1, Node, NodeId};
pub use deriv::differentiate;
pub use jet::{EvalError, JetSlab, Order, Program};
pub use parser::parse_into;
pub use print::print_node;
pub use subst::substitute;

use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
    #[error("unknown function `{name}` at line {line}, column {col}")]
    UnknownFunction { name: String, line: u32, col: u32 },
    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    WrongArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("exponent must be a constant integer at line {line}, column {col}")]
    NonIntegerExponent { line: u32, col: u32 },
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("domain error: {what} in `{subexpr}`")]
    Domain { what: String, subexpr: String },
}

/// A parsed scalar expression: one root in a shared DAG.
#[derive(Debug, Clone)]
pub struct Expression {
    dag: Arc<Dag>,
    root: NodeId,
}

/// Several expressions over one shared DAG (e.g. the three components of an
/// embedding map). Compiling the set evaluates all roots in one pass.
#[derive(Debug, Clone)]
pub struct ExprSet {
    pub dag: Arc<Dag>,
    pub roots: Vec<NodeId>,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Expression, ExprError> {
        let mut b = DagBuilder::new();
        let root = parse_into(&mut b, source)?;
        Ok(Expression {
            dag: Arc::new(b.finish()),
            root,
        })
    }

    pub fn dag(&self) -> &Arc<Dag> {
        &self.dag
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Names of all symbols (variables or parameters) referenced.
    pub fn symbols(&self) -> Vec<String> {
        self.dag
            .reachable_symbols(self.root)
            .into_iter()
            .map(|i| self.dag.symbol_name(i).to_string())
            .collect()
    }

    /// Evaluate value plus derivatives with respect to `vars`.
    pub fn eval_jet(
        &self,
        vars: &[(&str, f64)],
        params: &[(&str, f64)],
        order: Order,
    ) -> Result<JetValue, ExprError> {
        let set = ExprSet {
            dag: self.dag.clone(),
            roots: vec![self.root],
        };
        let var_names: Vec<&str> = vars.iter().map(|(n, _)| *n).collect();
        let mut prog = Program::compile(&set, &var_names, params)?;
        let values: Vec<f64> = vars.iter().map(|(_, v)| *v).collect();
        let slab = prog.eval(&values, order).map_err(|e| e.into_expr_error())?;
        let n = vars.len();
        let mut gradient = vec![0.0; n];
        let mut hessian = vec![0.0; n * (n + 1) / 2];
        if order >= Order::Grad {
            for (k, g) in gradient.iter_mut().enumerate() {
                *g = slab.grad(0, k);
            }
        }
        if order >= Order::Hess {
            let mut idx = 0;
            for k in 0..n {
                for l in k..n {
                    hessian[idx] = slab.hess(0, k, l);
                    idx += 1;
                }
            }
        }
        Ok(JetValue {
            value: slab.value(0),
            gradient,
            hessian,
        })
    }

    pub fn eval(&self, vars: &[(&str, f64)], params: &[(&str, f64)]) -> Result<f64, ExprError> {
        Ok(self.eval_jet(vars, params, Order::Value)?.value)
    }
}

impl std::fmt::Display for Expression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", print_node(&self.dag, self.root))
    }
}

impl ExprSet {
    /// Parse several sources into one shared DAG.
    pub fn parse_all(sources: &[&str]) -> Result<ExprSet, ExprError> {
        let mut b = DagBuilder::new();
        let mut roots = Vec::with_capacity(sources.len());
        for s in sources {
            roots.push(parse_into(&mut b, s)?);
        }
        Ok(ExprSet {
            dag: Arc::new(b.finish()),
            roots,
        })
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.roots
            .iter()
            .map(|&r| print_node(&self.dag, r))
            .collect()
    }
}

/// Value, gradient, and packed symmetric Hessian of an expression at a point.
///
/// The Hessian is stored once per unordered variable pair, row-major over the
/// upper triangle: for variables `(x0..x_{n-1})` entry `(k,l)` with `k <= l`
/// sits at `k*n - k*(k-1)/2 + (l-k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetValue {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<f64>,
}

impl JetValue {
    pub fn hess(&self, k: usize, l: usize) -> f64 {
        let n = self.gradient.len();
        let (k, l) = if k <= l { (k, l) } else { (l, k) };
        self.hessian[k * (2 * n - k + 1) / 2 + (l - k)]
    }
}

#[cfg(test)]
mod tests;
