/// A set of group elements packed into 64-bit words; hashable and cheap to
/// intersect.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(order: usize) -> Self {
        Self { words: vec![0; order.div_ceil(64)] }
    }

    pub fn from_elements(order: usize, elements: &[usize]) -> Self {
        let mut s = Self::empty(order);
        for &g in elements {
            s.insert(g);
        }
        s
    }

    pub fn insert(&mut self, g: usize) {
        self.words[g / 64] |= 1 << (g % 64);
    }

    pub fn contains(&self, g: usize) -> bool {
        self.words[g / 64] >> (g % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Members in increasing order.
    pub fn to_vec(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(i * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Image under a permutation of the element indices.
    pub fn map(&self, perm: &[usize]) -> Self {
        let mut out = Self { words: vec![0; self.words.len()] };
        for (i, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.insert(perm[i * 64 + b]);
                w &= w - 1;
            }
        }
        out
    }
}
