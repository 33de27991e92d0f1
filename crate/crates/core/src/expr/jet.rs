use super::dag::{Dag, Func1, Node, NodeId};
use super::print::print_node;
use super::{ExprError, ExprSet};
use std::sync::Arc;

/// Requested derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Value,
    Grad,
    Hess,
}

impl Order {
    pub fn from_u8(o: u8) -> Option<Order> {
        match o {
            0 => Some(Order::Value),
            1 => Some(Order::Grad),
            2 => Some(Order::Hess),
            _ => None,
        }
    }

    fn stride(self, n: usize) -> usize {
        match self {
            Order::Value => 1,
            Order::Grad => 1 + n,
            Order::Hess => 1 + n + n * (n + 1) / 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub what: String,
    pub subexpr: String,
}

impl EvalError {
    pub fn into_expr_error(self) -> ExprError {
        ExprError::Domain {
            what: self.what,
            subexpr: self.subexpr,
        }
    }
}

impl std::fmt::Display for EvalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "domain error: {} in `{}`", self.what, self.subexpr)
    }
}

impl std::error::Error for EvalError {}

#[derive(Debug, Clone, Copy)]
enum Bind {
    Var(usize),
    Param(usize),
}

/// Compiled evaluator for an [`ExprSet`]: symbol roles resolved, scratch
/// reused across calls. Cloning gives an independent evaluator (one per
/// worker thread).
#[derive(Debug, Clone)]
pub struct Program {
    dag: Arc<Dag>,
    roots: Vec<NodeId>,
    root_idx: Vec<usize>,
    live: Vec<bool>,
    bind: Vec<Bind>,
    n_vars: usize,
    param_names: Vec<String>,
    param_vals: Vec<f64>,
    scratch: Vec<f64>,
}

/// View of the evaluated jets, one per root of the compiled set.
pub struct JetSlab<'a> {
    data: &'a [f64],
    offsets: &'a [usize],
    stride: usize,
    n: usize,
    order: Order,
}

impl<'a> JetSlab<'a> {
    #[inline]
    pub fn value(&self, root: usize) -> f64 {
        self.data[self.offsets[root] * self.stride]
    }

    #[inline]
    pub fn grad(&self, root: usize, k: usize) -> f64 {
        debug_assert!(self.order >= Order::Grad);
        self.data[self.offsets[root] * self.stride + 1 + k]
    }

    /// Second derivative with respect to variables `k` and `l`.
    #[inline]
    pub fn hess(&self, root: usize, k: usize, l: usize) -> f64 {
        debug_assert!(self.order >= Order::Hess);
        let (k, l) = if k <= l { (k, l) } else { (l, k) };
        let idx = k * (2 * self.n - k + 1) / 2 + (l - k);
        self.data[self.offsets[root] * self.stride + 1 + self.n + idx]
    }
}

impl Program {
    /// Resolve symbol roles: names in `vars` become differentiation
    /// variables (in the given order), names in `params` become re-bindable
    /// constants. Any other referenced symbol is an error.
    pub fn compile(
        set: &ExprSet,
        vars: &[&str],
        params: &[(&str, f64)],
    ) -> Result<Program, ExprError> {
        let dag = set.dag.clone();
        let live = dag.live_mask(&set.roots);
        let mut bind = Vec::with_capacity(dag.symbols().len());
        let mut param_names = Vec::new();
        let mut param_vals = Vec::new();
        let live_syms: std::collections::HashSet<u16> = {
            let mut s = std::collections::HashSet::new();
            for &r in &set.roots {
                for sym in dag.reachable_symbols(r) {
                    s.insert(sym);
                }
            }
            s
        };
        for (i, name) in dag.symbols().iter().enumerate() {
            if let Some(vi) = vars.iter().position(|v| v == name) {
                bind.push(Bind::Var(vi));
            } else if let Some(pi) = params.iter().position(|(p, _)| p == name) {
                bind.push(Bind::Param(param_names.len()));
                param_names.push(name.clone());
                param_vals.push(params[pi].1);
            } else if live_syms.contains(&(i as u16)) {
                return Err(ExprError::UnboundSymbol(name.clone()));
            } else {
                // dead symbol: bind as param slot that is never read
                bind.push(Bind::Param(param_names.len()));
                param_names.push(name.clone());
                param_vals.push(f64::NAN);
            }
        }
        Ok(Program {
            dag,
            root_idx: set.roots.iter().map(|r| r.idx()).collect(),
            roots: set.roots.clone(),
            live,
            bind,
            n_vars: vars.len(),
            param_names,
            param_vals,
            scratch: Vec::new(),
        })
    }

    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), ExprError> {
        match self.param_names.iter().position(|p| p == name) {
            Some(i) => {
                self.param_vals[i] = value;
                Ok(())
            }
            None => Err(ExprError::UnboundSymbol(name.to_string())),
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.param_names
            .iter()
            .position(|p| p == name)
            .map(|i| self.param_vals[i])
    }

    pub fn n_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn describe(&self, node: NodeId) -> String {
        print_node(&self.dag, node)
    }

    /// Evaluate all roots at the given variable values. Deterministic:
    /// identical inputs give bit-identical outputs.
    pub fn eval(&mut self, var_vals: &[f64], order: Order) -> Result<JetSlab<'_>, EvalError> {
        assert_eq!(var_vals.len(), self.n_vars, "variable count mismatch");
        let n = self.n_vars;
        let stride = order.stride(n);
        let need = self.dag.len() * stride;
        if self.scratch.len() != need {
            self.scratch.resize(need, 0.0);
        }
        let n_hess = match order {
            Order::Hess => n * (n + 1) / 2,
            _ => 0,
        };
        let n_grad = if order >= Order::Grad { n } else { 0 };

        for i in 0..self.dag.len() {
            if !self.live[i] {
                continue;
            }
            let node = self.dag.node(NodeId(i as u32));
            let (lo, hi) = self.scratch.split_at_mut(i * stride);
            let out = &mut hi[..stride];
            let ch = |id: NodeId| -> &[f64] { &lo[id.idx() * stride..id.idx() * stride + stride] };
            match node {
                Node::Num(bits) => {
                    out[0] = f64::from_bits(bits);
                    out[1..].fill(0.0);
                }
                Node::Sym(s) => {
                    out[1..].fill(0.0);
                    match self.bind[s as usize] {
                        Bind::Var(vi) => {
                            out[0] = var_vals[vi];
                            if order >= Order::Grad {
                                out[1 + vi] = 1.0;
                            }
                        }
                        Bind::Param(pi) => out[0] = self.param_vals[pi],
                    }
                }
                Node::Neg(a) => {
                    let a = ch(a);
                    for k in 0..stride {
                        out[k] = -a[k];
                    }
                }
                Node::Add(a, b) => {
                    let (a, b) = (ch(a), ch(b));
                    for k in 0..stride {
                        out[k] = a[k] + b[k];
                    }
                }
                Node::Sub(a, b) => {
                    let (a, b) = (ch(a), ch(b));
                    for k in 0..stride {
                        out[k] = a[k] - b[k];
                    }
                }
                Node::Mul(a, b) => {
                    let (a, b) = (ch(a), ch(b));
                    // Exact zero annihilates: needed where a compactly
                    // supported factor multiplies an expression that is
                    // undefined outside the support (e.g. a chart
                    // transition composed into a bump).
                    if a.iter().all(|&x| x == 0.0) || b.iter().all(|&x| x == 0.0) {
                        out.fill(0.0);
                    } else {
                        compose2(
                            out,
                            a,
                            b,
                            a[0] * b[0],
                            b[0],
                            a[0],
                            0.0,
                            1.0,
                            0.0,
                            n_grad,
                            n_hess,
                            n,
                        );
                    }
                }
                Node::Div(a, b) => {
                    let (a, b) = (ch(a), ch(b));
                    let (x, y) = (a[0], b[0]);
                    compose2(
                        out,
                        a,
                        b,
                        x / y,
                        1.0 / y,
                        -x / (y * y),
                        0.0,
                        -1.0 / (y * y),
                        2.0 * x / (y * y * y),
                        n_grad,
                        n_hess,
                        n,
                    );
                }
                Node::Pow(a, k) => {
                    let a = ch(a);
                    let x = a[0];
                    let f = x.powi(k);
                    let df = k as f64 * x.powi(k - 1);
                    let ddf = (k as f64) * (k as f64 - 1.0) * x.powi(k - 2);
                    compose1(out, a, f, df, ddf, n_grad, n_hess, n);
                }
                Node::Un(func, a) => {
                    let a = ch(a);
                    let x = a[0];
                    let (f, df, ddf) = match func {
                        Func1::Sin => (x.sin(), x.cos(), -x.sin()),
                        Func1::Cos => (x.cos(), -x.sin(), -x.cos()),
                        Func1::Tan => {
                            let t = x.tan();
                            let sec2 = 1.0 + t * t;
                            (t, sec2, 2.0 * t * sec2)
                        }
                        Func1::Exp => {
                            let e = x.exp();
                            (e, e, e)
                        }
                        Func1::Log => {
                            if x <= 0.0 {
                                return Err(self.domain_error(
                                    NodeId(i as u32),
                                    "log of non-positive value",
                                ));
                            }
                            (x.ln(), 1.0 / x, -1.0 / (x * x))
                        }
                        Func1::Sqrt => {
                            if x < 0.0 {
                                return Err(self
                                    .domain_error(NodeId(i as u32), "sqrt of negative value"));
                            }
                            let s = x.sqrt();
                            (s, 0.5 / s, -0.25 / (x * s))
                        }
                        Func1::BumpPoly(kk) => {
                            if !x.is_finite() || x >= 1.0 {
                                out.fill(0.0);
                                continue;
                            }
                            let k = kk as f64;
                            let w = 1.0 - x;
                            let base = |p: i32| -> f64 {
                                if p < 0 {
                                    0.0
                                } else {
                                    w.powi(p)
                                }
                            };
                            (
                                base(kk as i32),
                                -k * base(kk as i32 - 1),
                                k * (k - 1.0) * base(kk as i32 - 2),
                            )
                        }
                    };
                    compose1(out, a, f, df, ddf, n_grad, n_hess, n);
                }
                Node::Atan2(ya, xa) => {
                    let (a, b) = (ch(ya), ch(xa));
                    let (y, x) = (a[0], b[0]);
                    let q = x * x + y * y;
                    compose2(
                        out,
                        a,
                        b,
                        y.atan2(x),
                        x / q,
                        -y / q,
                        -2.0 * x * y / (q * q),
                        (y * y - x * x) / (q * q),
                        2.0 * x * y / (q * q),
                        n_grad,
                        n_hess,
                        n,
                    );
                }
            }
        }

        Ok(JetSlab {
            data: &self.scratch,
            offsets: &self.root_idx,
            stride,
            n,
            order,
        })
    }

    pub fn root_node(&self, root: usize) -> NodeId {
        self.roots[root]
    }

    fn domain_error(&self, node: NodeId, what: &str) -> EvalError {
        EvalError {
            what: what.to_string(),
            subexpr: print_node(&self.dag, node),
        }
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn compose1(
    out: &mut [f64],
    a: &[f64],
    f: f64,
    df: f64,
    ddf: f64,
    n_grad: usize,
    n_hess: usize,
    n: usize,
) {
    out[0] = f;
    for i in 0..n_grad {
        out[1 + i] = df * a[1 + i];
    }
    let mut idx = 0;
    for k in 0..n {
        for l in k..n {
            if idx >= n_hess {
                break;
            }
            out[1 + n + idx] = df * a[1 + n + idx] + ddf * a[1 + k] * a[1 + l];
            idx += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn compose2(
    out: &mut [f64],
    a: &[f64],
    b: &[f64],
    f: f64,
    fa: f64,
    fb: f64,
    faa: f64,
    fab: f64,
    fbb: f64,
    n_grad: usize,
    n_hess: usize,
    n: usize,
) {
    out[0] = f;
    for i in 0..n_grad {
        out[1 + i] = fa * a[1 + i] + fb * b[1 + i];
    }
    let mut idx = 0;
    for k in 0..n {
        for l in k..n {
            if idx >= n_hess {
                break;
            }
            let (ak, al) = (a[1 + k], a[1 + l]);
            let (bk, bl) = (b[1 + k], b[1 + l]);
            out[1 + n + idx] = fa * a[1 + n + idx]
                + fb * b[1 + n + idx]
                + faa * ak * al
                + fab * (ak * bl + al * bk)
                + fbb * bk * bl;
            idx += 1;
        }
    }
}
