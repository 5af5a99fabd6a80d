//! Activity-ordered variable heap for branching (indexed binary max-heap).

const ABSENT: usize = usize::MAX;

#[derive(Debug, Default)]
pub(crate) struct VarHeap {
    heap: Vec<u32>,
    /// Position of each variable id in `heap`, or `ABSENT`.
    pos: Vec<usize>,
}

impl VarHeap {
    pub fn new() -> Self {
        VarHeap {
            heap: Vec::new(),
            pos: vec![ABSENT],
        }
    }

    pub fn grow(&mut self, num_vars: usize) {
        self.pos.resize(num_vars + 1, ABSENT);
    }

    pub fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != ABSENT
    }

    /// Ties break toward the smaller variable id so the order is total.
    fn better(a: u32, b: u32, activity: &[f64]) -> bool {
        let (aa, ab) = (activity[a as usize], activity[b as usize]);
        aa > ab || (aa == ab && a < b)
    }

    pub fn insert(&mut self, v: u32, activity: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, activity);
    }

    pub fn pop(&mut self, activity: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, activity);
        }
        Some(top)
    }

    /// Restore order after `v`'s activity increased.
    pub fn on_bump(&mut self, v: u32, activity: &[f64]) {
        let p = self.pos[v as usize];
        if p != ABSENT {
            self.sift_up(p, activity);
        }
    }

    fn sift_up(&mut self, mut i: usize, activity: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::better(self.heap[i], self.heap[parent], activity) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize, activity: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && Self::better(self.heap[l], self.heap[best], activity) {
                best = l;
            }
            if r < self.heap.len() && Self::better(self.heap[r], self.heap[best], activity) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i;
        self.pos[self.heap[j] as usize] = j;
    }
}
