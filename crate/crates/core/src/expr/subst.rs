use super::dag::{DagBuilder, Node, NodeId};
use std::collections::HashMap;

/// Rebuild `root` with the symbols in `map` replaced by other nodes
/// (composition of expressions, used to carry a bump deformation into the
/// other charts of an atlas through a transition map).
pub fn substitute(
    b: &mut DagBuilder,
    root: NodeId,
    map: &HashMap<u16, NodeId>,
) -> NodeId {
    let mut memo: HashMap<NodeId, NodeId> = HashMap::new();
    subst(b, root, map, &mut memo)
}

fn subst(
    b: &mut DagBuilder,
    id: NodeId,
    map: &HashMap<u16, NodeId>,
    memo: &mut HashMap<NodeId, NodeId>,
) -> NodeId {
    if let Some(&m) = memo.get(&id) {
        return m;
    }
    let out = match b.dag().node(id) {
        Node::Sym(s) => map.get(&s).copied().unwrap_or(id),
        Node::Num(_) => id,
        Node::Neg(a) => {
            let a = subst(b, a, map, memo);
            b.neg(a)
        }
        Node::Add(x, y) => {
            let (x, y) = (subst(b, x, map, memo), subst(b, y, map, memo));
            b.add(x, y)
        }
        Node::Sub(x, y) => {
            let (x, y) = (subst(b, x, map, memo), subst(b, y, map, memo));
            b.sub(x, y)
        }
        Node::Mul(x, y) => {
            let (x, y) = (subst(b, x, map, memo), subst(b, y, map, memo));
            b.mul(x, y)
        }
        Node::Div(x, y) => {
            let (x, y) = (subst(b, x, map, memo), subst(b, y, map, memo));
            b.div(x, y)
        }
        Node::Pow(a, k) => {
            let a = subst(b, a, map, memo);
            b.pow(a, k)
        }
        Node::Un(f, a) => {
            let a = subst(b, a, map, memo);
            b.call1(f, a)
        }
        Node::Atan2(x, y) => {
            let (x, y) = (subst(b, x, map, memo), subst(b, y, map, memo));
            b.atan2(x, y)
        }
    };
    memo.insert(id, out);
    out
}
