use super::dag::{Dag, Node, NodeId};

// Precedence: additive 1, multiplicative 2, unary minus 3, power 4, atom 5.
fn prec(dag: &Dag, id: NodeId) -> u8 {
    match dag.node(id) {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(..) => 3,
        Node::Pow(..) => 4,
        Node::Num(bits) => {
            if f64::from_bits(bits) < 0.0 {
                3
            } else {
                5
            }
        }
        _ => 5,
    }
}

/// Pretty-print a node. Parenthesization preserves tree structure exactly:
/// parse(print(e)) re-interns to the same node.
pub fn print_node(dag: &Dag, id: NodeId) -> String {
    let mut s = String::new();
    write_node(dag, id, &mut s);
    s
}

fn child(dag: &Dag, id: NodeId, min_prec: u8, out: &mut String) {
    if prec(dag, id) < min_prec {
        out.push('(');
        write_node(dag, id, out);
        out.push(')');
    } else {
        write_node(dag, id, out);
    }
}

fn write_node(dag: &Dag, id: NodeId, out: &mut String) {
    match dag.node(id) {
        Node::Num(bits) => {
            let v = f64::from_bits(bits);
            out.push_str(&format!("{v}"));
        }
        Node::Sym(s) => out.push_str(dag.symbol_name(s)),
        Node::Neg(a) => {
            out.push('-');
            child(dag, a, 4, out);
        }
        Node::Add(a, b) => {
            child(dag, a, 1, out);
            out.push_str(" + ");
            child(dag, b, 2, out);
        }
        Node::Sub(a, b) => {
            child(dag, a, 1, out);
            out.push_str(" - ");
            child(dag, b, 2, out);
        }
        Node::Mul(a, b) => {
            child(dag, a, 2, out);
            out.push('*');
            child(dag, b, 3, out);
        }
        Node::Div(a, b) => {
            child(dag, a, 2, out);
            out.push('/');
            child(dag, b, 3, out);
        }
        Node::Pow(a, k) => {
            child(dag, a, 5, out);
            out.push('^');
            out.push_str(&k.to_string());
        }
        Node::Un(f, a) => {
            out.push_str(&f.name());
            out.push('(');
            write_node(dag, a, out);
            out.push(')');
        }
        Node::Atan2(y, x) => {
            out.push_str("atan2(");
            write_node(dag, y, out);
            out.push_str(", ");
            write_node(dag, x, out);
            out.push(')');
        }
    }
}
