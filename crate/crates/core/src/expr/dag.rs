use std::collections::HashMap;
use std::sync::Arc;

/// Index of a node within a [`Dag`]. Construction order is topological:
/// children always precede parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Unary functions. `BumpPoly(k)` is `(1-x)^k` clamped to 0 on `x >= 1`,
/// with all derivatives forced to zero outside the support (including for
/// non-finite input, which by construction only occurs where the composed
/// profile is identically zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func1 {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    BumpPoly(u8),
}

impl Func1 {
    pub fn name(self) -> String {
        match self {
            Func1::Sin => "sin".into(),
            Func1::Cos => "cos".into(),
            Func1::Tan => "tan".into(),
            Func1::Exp => "exp".into(),
            Func1::Log => "log".into(),
            Func1::Sqrt => "sqrt".into(),
            Func1::BumpPoly(k) => format!("bumppoly{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    /// Literal, stored as bits so the node is hashable.
    Num(u64),
    /// Symbol-table index; variable/parameter role is fixed at compile time.
    Sym(u16),
    Neg(NodeId),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Div(NodeId, NodeId),
    Pow(NodeId, i32),
    Un(Func1, NodeId),
    Atan2(NodeId, NodeId),
}

/// Hash-consed expression DAG with a shared symbol table.
#[derive(Debug, Clone, Default)]
pub struct Dag {
    nodes: Vec<Node>,
    symbols: Vec<String>,
}

impl Dag {
    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id.idx()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn symbol_name(&self, i: u16) -> &str {
        &self.symbols[i as usize]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn num_value(&self, id: NodeId) -> Option<f64> {
        match self.node(id) {
            Node::Num(bits) => Some(f64::from_bits(bits)),
            _ => None,
        }
    }

    /// Symbol indices reachable from `root`.
    pub fn reachable_symbols(&self, root: NodeId) -> Vec<u16> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if seen[id.idx()] {
                continue;
            }
            seen[id.idx()] = true;
            match self.node(id) {
                Node::Sym(s) => {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
                Node::Neg(a) | Node::Un(_, a) | Node::Pow(a, _) => stack.push(a),
                Node::Add(a, b)
                | Node::Sub(a, b)
                | Node::Mul(a, b)
                | Node::Div(a, b)
                | Node::Atan2(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Num(_) => {}
            }
        }
        out.sort_unstable();
        out
    }

    /// Mark nodes reachable from any of `roots`.
    pub fn live_mask(&self, roots: &[NodeId]) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = roots.to_vec();
        while let Some(id) = stack.pop() {
            if live[id.idx()] {
                continue;
            }
            live[id.idx()] = true;
            match self.node(id) {
                Node::Neg(a) | Node::Un(_, a) | Node::Pow(a, _) => stack.push(a),
                Node::Add(a, b)
                | Node::Sub(a, b)
                | Node::Mul(a, b)
                | Node::Div(a, b)
                | Node::Atan2(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                _ => {}
            }
        }
        live
    }
}

/// Builder with hash-consing and light constant folding. The folding rules
/// (`x*0 -> 0`, `x+0 -> x`, `x*1 -> x`, `x^1 -> x`, numeric folding) keep
/// symbolic derivatives compact.
#[derive(Debug, Clone)]
pub struct DagBuilder {
    dag: Dag,
    index: HashMap<Node, NodeId>,
    sym_index: HashMap<String, u16>,
}

impl Default for DagBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl DagBuilder {
    pub fn new() -> Self {
        DagBuilder {
            dag: Dag::default(),
            index: HashMap::new(),
            sym_index: HashMap::new(),
        }
    }

    /// Re-open an existing DAG for extension (used when deriving bumped
    /// embeddings from a base chart).
    pub fn extend(dag: &Arc<Dag>) -> Self {
        let dag = (**dag).clone();
        let mut index = HashMap::with_capacity(dag.nodes.len());
        for (i, n) in dag.nodes.iter().enumerate() {
            index.insert(*n, NodeId(i as u32));
        }
        let mut sym_index = HashMap::with_capacity(dag.symbols.len());
        for (i, s) in dag.symbols.iter().enumerate() {
            sym_index.insert(s.clone(), i as u16);
        }
        DagBuilder {
            dag,
            index,
            sym_index,
        }
    }

    pub fn finish(self) -> Dag {
        self.dag
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = NodeId(self.dag.nodes.len() as u32);
        self.dag.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    pub fn num(&mut self, v: f64) -> NodeId {
        // normalize -0.0 so folding stays deterministic
        let v = if v == 0.0 { 0.0 } else { v };
        self.intern(Node::Num(v.to_bits()))
    }

    pub fn sym(&mut self, name: &str) -> NodeId {
        if let Some(&i) = self.sym_index.get(name) {
            return self.intern(Node::Sym(i));
        }
        let i = self.dag.symbols.len() as u16;
        self.dag.symbols.push(name.to_string());
        self.sym_index.insert(name.to_string(), i);
        self.intern(Node::Sym(i))
    }

    fn num_of(&self, id: NodeId) -> Option<f64> {
        self.dag.num_value(id)
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        if let Some(x) = self.num_of(a) {
            return self.num(-x);
        }
        if let Node::Neg(inner) = self.dag.node(a) {
            return inner;
        }
        self.intern(Node::Neg(a))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.num_of(a), self.num_of(b)) {
            (Some(x), Some(y)) => return self.num(x + y),
            (Some(x), None) if x == 0.0 => return b,
            (None, Some(y)) if y == 0.0 => return a,
            _ => {}
        }
        self.intern(Node::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.num_of(a), self.num_of(b)) {
            (Some(x), Some(y)) => return self.num(x - y),
            (None, Some(y)) if y == 0.0 => return a,
            (Some(x), None) if x == 0.0 => return self.neg(b),
            _ => {}
        }
        if a == b {
            return self.num(0.0);
        }
        self.intern(Node::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.num_of(a), self.num_of(b)) {
            (Some(x), Some(y)) => return self.num(x * y),
            (Some(x), None) => {
                if x == 0.0 {
                    return self.num(0.0);
                }
                if x == 1.0 {
                    return b;
                }
                if x == -1.0 {
                    return self.neg(b);
                }
            }
            (None, Some(y)) => {
                if y == 0.0 {
                    return self.num(0.0);
                }
                if y == 1.0 {
                    return a;
                }
                if y == -1.0 {
                    return self.neg(a);
                }
            }
            _ => {}
        }
        self.intern(Node::Mul(a, b))
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.num_of(a), self.num_of(b)) {
            (Some(x), Some(y)) if y != 0.0 => return self.num(x / y),
            (Some(x), None) if x == 0.0 => return self.num(0.0),
            (None, Some(y)) if y == 1.0 => return a,
            _ => {}
        }
        self.intern(Node::Div(a, b))
    }

    pub fn pow(&mut self, a: NodeId, k: i32) -> NodeId {
        if k == 0 {
            return self.num(1.0);
        }
        if k == 1 {
            return a;
        }
        if let Some(x) = self.num_of(a) {
            return self.num(x.powi(k));
        }
        self.intern(Node::Pow(a, k))
    }

    pub fn call1(&mut self, f: Func1, a: NodeId) -> NodeId {
        self.intern(Node::Un(f, a))
    }

    pub fn atan2(&mut self, y: NodeId, x: NodeId) -> NodeId {
        self.intern(Node::Atan2(y, x))
    }

    /// Import a node (with its subtree) from another DAG.
    pub fn import(&mut self, src: &Dag, root: NodeId) -> NodeId {
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        self.import_rec(src, root, &mut map)
    }

    fn import_rec(
        &mut self,
        src: &Dag,
        id: NodeId,
        map: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        if let Some(&m) = map.get(&id) {
            return m;
        }
        let out = match src.node(id) {
            Node::Num(bits) => self.num(f64::from_bits(bits)),
            Node::Sym(s) => {
                let name = src.symbol_name(s).to_string();
                self.sym(&name)
            }
            Node::Neg(a) => {
                let a = self.import_rec(src, a, map);
                self.neg(a)
            }
            Node::Add(a, b) => {
                let (a, b) = (self.import_rec(src, a, map), self.import_rec(src, b, map));
                self.add(a, b)
            }
            Node::Sub(a, b) => {
                let (a, b) = (self.import_rec(src, a, map), self.import_rec(src, b, map));
                self.sub(a, b)
            }
            Node::Mul(a, b) => {
                let (a, b) = (self.import_rec(src, a, map), self.import_rec(src, b, map));
                self.mul(a, b)
            }
            Node::Div(a, b) => {
                let (a, b) = (self.import_rec(src, a, map), self.import_rec(src, b, map));
                self.div(a, b)
            }
            Node::Pow(a, k) => {
                let a = self.import_rec(src, a, map);
                self.pow(a, k)
            }
            Node::Un(f, a) => {
                let a = self.import_rec(src, a, map);
                self.call1(f, a)
            }
            Node::Atan2(a, b) => {
                let (a, b) = (self.import_rec(src, a, map), self.import_rec(src, b, map));
                self.atan2(a, b)
            }
        };
        map.insert(id, out);
        out
    }
}
