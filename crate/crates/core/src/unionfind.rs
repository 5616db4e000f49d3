/// Disjoint sets over `0..len` with union by size and path halving.
///
/// Every class also tracks its smallest member, which gives callers a
/// representative that does not depend on the order of unions.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    min: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        Self { parent: (0..len).collect(), size: vec![1; len], min: (0..len).collect() }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Appends `n` singleton classes and returns the first new index.
    pub fn grow(&mut self, n: usize) -> usize {
        let start = self.parent.len();
        self.parent.extend(start..start + n);
        self.size.extend(std::iter::repeat_n(1, n));
        self.min.extend(start..start + n);
        start
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`. Returns false if they were already one class.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.min[ra] = self.min[ra].min(self.min[rb]);
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn class_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    /// Smallest member of the class containing `x`.
    pub fn class_min(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.min[r]
    }
}
