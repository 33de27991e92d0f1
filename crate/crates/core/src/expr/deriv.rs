use super::dag::{DagBuilder, Func1, Node, NodeId};
use std::collections::HashMap;

/// Symbolic partial derivative of `node` with respect to the symbol `var`,
/// built into the same DAG. Used to construct derived expressions (unit
/// normals of embeddings); pointwise evaluation still goes through jets.
pub fn differentiate(b: &mut DagBuilder, node: NodeId, var: &str) -> NodeId {
    let var_id = b.sym(var);
    let var_sym = match b.dag().node(var_id) {
        Node::Sym(s) => s,
        _ => unreachable!(),
    };
    let mut memo = HashMap::new();
    diff(b, node, var_sym, &mut memo)
}

fn diff(
    b: &mut DagBuilder,
    id: NodeId,
    var: u16,
    memo: &mut HashMap<NodeId, NodeId>,
) -> NodeId {
    if let Some(&d) = memo.get(&id) {
        return d;
    }
    let out = match b.dag().node(id) {
        Node::Num(_) => b.num(0.0),
        Node::Sym(s) => {
            if s == var {
                b.num(1.0)
            } else {
                b.num(0.0)
            }
        }
        Node::Neg(a) => {
            let da = diff(b, a, var, memo);
            b.neg(da)
        }
        Node::Add(a, c) => {
            let (da, dc) = (diff(b, a, var, memo), diff(b, c, var, memo));
            b.add(da, dc)
        }
        Node::Sub(a, c) => {
            let (da, dc) = (diff(b, a, var, memo), diff(b, c, var, memo));
            b.sub(da, dc)
        }
        Node::Mul(a, c) => {
            let (da, dc) = (diff(b, a, var, memo), diff(b, c, var, memo));
            let t1 = b.mul(da, c);
            let t2 = b.mul(a, dc);
            b.add(t1, t2)
        }
        Node::Div(a, c) => {
            // (a' c - a c') / c^2
            let (da, dc) = (diff(b, a, var, memo), diff(b, c, var, memo));
            let t1 = b.mul(da, c);
            let t2 = b.mul(a, dc);
            let num = b.sub(t1, t2);
            let den = b.pow(c, 2);
            b.div(num, den)
        }
        Node::Pow(a, k) => {
            let da = diff(b, a, var, memo);
            let kk = b.num(k as f64);
            let p = b.pow(a, k - 1);
            let t = b.mul(kk, p);
            b.mul(t, da)
        }
        Node::Un(f, a) => {
            let da = diff(b, a, var, memo);
            let g = match f {
                Func1::Sin => b.call1(Func1::Cos, a),
                Func1::Cos => {
                    let s = b.call1(Func1::Sin, a);
                    b.neg(s)
                }
                Func1::Tan => {
                    let t = b.call1(Func1::Tan, a);
                    let t2 = b.pow(t, 2);
                    let one = b.num(1.0);
                    b.add(one, t2)
                }
                Func1::Exp => b.call1(Func1::Exp, a),
                Func1::Log => {
                    let one = b.num(1.0);
                    b.div(one, a)
                }
                Func1::Sqrt => {
                    let s = b.call1(Func1::Sqrt, a);
                    let two = b.num(2.0);
                    let d = b.mul(two, s);
                    let one = b.num(1.0);
                    b.div(one, d)
                }
                Func1::BumpPoly(0) => b.num(0.0),
                Func1::BumpPoly(k) => {
                    let inner = b.call1(Func1::BumpPoly(k - 1), a);
                    let c = b.num(-(k as f64));
                    b.mul(c, inner)
                }
            };
            b.mul(g, da)
        }
        Node::Atan2(y, x) => {
            // (x y' - y x') / (x^2 + y^2)
            let (dy, dx) = (diff(b, y, var, memo), diff(b, x, var, memo));
            let t1 = b.mul(x, dy);
            let t2 = b.mul(y, dx);
            let num = b.sub(t1, t2);
            let x2 = b.pow(x, 2);
            let y2 = b.pow(y, 2);
            let den = b.add(x2, y2);
            b.div(num, den)
        }
    };
    memo.insert(id, out);
    out
}
