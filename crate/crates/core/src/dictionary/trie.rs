//! Prefix tree with one level per curve vertex.
//!
//! Each node keeps its children sorted by lattice vertex, so a lookup is one
//! ordered search per level and iteration is lexicographic. Nodes live in an
//! arena; detached nodes go on a free list and are reused.

use super::Payload;

const ROOT: u32 = 0;

#[derive(Clone, Debug, Default)]
struct Node {
    children: Vec<u32>,
    payload: Option<Payload>,
}

#[derive(Clone, Debug)]
pub(crate) struct PrefixTree {
    dim: usize,
    nodes: Vec<Node>,
    /// Vertex of node `i` lives at `vertices[i * dim..(i + 1) * dim]`.
    vertices: Vec<i64>,
    free: Vec<u32>,
    entries: usize,
}

impl PrefixTree {
    pub(crate) fn new(dim: usize) -> Self {
        PrefixTree {
            dim,
            nodes: vec![Node::default()],
            vertices: vec![0; dim],
            free: Vec::new(),
            entries: 0,
        }
    }

    fn vertex(&self, node: u32) -> &[i64] {
        &self.vertices[node as usize * self.dim..(node as usize + 1) * self.dim]
    }

    fn search(&self, parent: u32, v: &[i64]) -> Result<usize, usize> {
        self.nodes[parent as usize]
            .children
            .binary_search_by(|&c| self.vertex(c).cmp(v))
    }

    fn find(&self, cells: &[i64]) -> Option<u32> {
        let mut node = ROOT;
        for v in cells.chunks_exact(self.dim) {
            let idx = self.search(node, v).ok()?;
            node = self.nodes[node as usize].children[idx];
        }
        Some(node)
    }

    fn alloc(&mut self, v: &[i64]) -> u32 {
        match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = Node::default();
                self.vertices[id as usize * self.dim..(id as usize + 1) * self.dim].copy_from_slice(v);
                id
            }
            None => {
                let id = self.nodes.len() as u32;
                self.nodes.push(Node::default());
                self.vertices.extend_from_slice(v);
                id
            }
        }
    }

    pub(crate) fn get(&self, cells: &[i64]) -> Option<&Payload> {
        self.find(cells).and_then(|n| self.nodes[n as usize].payload.as_ref())
    }

    pub(crate) fn get_mut(&mut self, cells: &[i64]) -> Option<&mut Payload> {
        let n = self.find(cells)?;
        self.nodes[n as usize].payload.as_mut()
    }

    pub(crate) fn insert(&mut self, cells: &[i64], payload: Payload) {
        let mut node = ROOT;
        for v in cells.chunks_exact(self.dim) {
            node = match self.search(node, v) {
                Ok(idx) => self.nodes[node as usize].children[idx],
                Err(idx) => {
                    let child = self.alloc(v);
                    self.nodes[node as usize].children.insert(idx, child);
                    child
                }
            };
        }
        if self.nodes[node as usize].payload.replace(payload).is_none() {
            self.entries += 1;
        }
    }

    pub(crate) fn remove(&mut self, cells: &[i64]) -> Option<Payload> {
        let mut path = Vec::with_capacity(cells.len() / self.dim + 1);
        let mut node = ROOT;
        path.push(node);
        for v in cells.chunks_exact(self.dim) {
            let idx = self.search(node, v).ok()?;
            node = self.nodes[node as usize].children[idx];
            path.push(node);
        }
        let payload = self.nodes[node as usize].payload.take()?;
        self.entries -= 1;
        // Detach nodes that no longer lead to any entry.
        while path.len() > 1 {
            let child = path.pop().expect("non-empty path");
            let n = &self.nodes[child as usize];
            if !n.children.is_empty() || n.payload.is_some() {
                break;
            }
            let parent = *path.last().expect("parent exists");
            let v = self.vertex(child).to_vec();
            let idx = self.search(parent, &v).expect("child is linked");
            self.nodes[parent as usize].children.remove(idx);
            self.free.push(child);
        }
        Some(payload)
    }

    pub(crate) fn len(&self) -> usize {
        self.entries
    }

    /// Live nodes, excluding the root.
    pub(crate) fn node_count(&self) -> usize {
        self.nodes.len() - self.free.len() - 1
    }

    /// Visits entries in lexicographic key order.
    pub(crate) fn for_each(&self, mut visit: impl FnMut(&[i64], &Payload)) {
        let mut key = Vec::new();
        self.walk(ROOT, &mut key, &mut visit);
    }

    fn walk(&self, node: u32, key: &mut Vec<i64>, visit: &mut impl FnMut(&[i64], &Payload)) {
        let n = &self.nodes[node as usize];
        if let Some(p) = &n.payload {
            visit(key, p);
        }
        for &c in &n.children {
            key.extend_from_slice(self.vertex(c));
            self.walk(c, key, visit);
            key.truncate(key.len() - self.dim);
        }
    }

    #[cfg(test)]
    pub(crate) fn children_sorted(&self) -> bool {
        self.nodes.iter().enumerate().all(|(i, n)| {
            self.free.contains(&(i as u32))
                || n.children
                    .windows(2)
                    .all(|w| self.vertex(w[0]).cmp(self.vertex(w[1])) == std::cmp::Ordering::Less)
        })
    }
}
