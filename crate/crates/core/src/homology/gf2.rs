//! Linear algebra over the two-element field.

/// Bit-packed vector over `GF(2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Highest set index.
    pub fn low(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

/// Rank of a family of vectors: elimination keyed by the highest set bit.
pub fn rank(vectors: &[BitVec]) -> usize {
    let mut pivots: std::collections::HashMap<usize, BitVec> = std::collections::HashMap::new();
    for v in vectors {
        let mut v = v.clone();
        while let Some(low) = v.low() {
            match pivots.get(&low) {
                Some(p) => v.xor_assign(p),
                None => {
                    pivots.insert(low, v);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Basis of `{c : Σ c_i v_i = 0}`, as bit vectors over the column indices.
pub fn kernel(columns: &[BitVec]) -> Vec<BitVec> {
    let m = columns.len();
    let mut pivots: std::collections::HashMap<usize, (BitVec, BitVec)> = std::collections::HashMap::new();
    let mut out = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        let mut comb = BitVec::zeros(m);
        comb.flip(j);
        loop {
            match v.low() {
                None => {
                    out.push(comb);
                    break;
                }
                Some(low) => match pivots.get(&low) {
                    Some((pv, pc)) => {
                        v.xor_assign(pv);
                        comb.xor_assign(pc);
                    }
                    None => {
                        pivots.insert(low, (v, comb));
                        break;
                    }
                },
            }
        }
    }
    out
}

/// Sparse column matrix over `GF(2)`; each column is a sorted index list.
#[derive(Clone, Debug, Default)]
pub struct SparseColumns {
    pub columns: Vec<Vec<usize>>,
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl SparseColumns {
    pub fn new(columns: Vec<Vec<usize>>) -> Self {
        Self { columns }
    }

    /// Standard left-to-right column reduction.
    ///
    /// Returns `low[j]`: the pivot row of reduced column `j`, or `None` when
    /// the column reduced to zero.
    pub fn reduce(&self) -> Vec<Option<usize>> {
        let mut cols = self.columns.clone();
        let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        let mut lows = vec![None; cols.len()];
        for j in 0..cols.len() {
            while let Some(&low) = cols[j].last() {
                match owner.get(&low) {
                    Some(&k) => {
                        let reduced = sym_diff(&cols[j], &cols[k]);
                        cols[j] = reduced;
                    }
                    None => {
                        owner.insert(low, j);
                        lows[j] = Some(low);
                        break;
                    }
                }
            }
            if lows[j].is_none() {
                cols[j].clear();
            }
        }
        lows
    }

    pub fn rank(&self) -> usize {
        self.reduce().iter().filter(|l| l.is_some()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitvec_basics() {
        let mut v = BitVec::zeros(130);
        assert!(v.is_zero());
        v.flip(3);
        v.flip(129);
        assert_eq!(v.low(), Some(129));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![3, 129]);
        let w = BitVec::from_indices(130, &[129]);
        v.xor_assign(&w);
        assert_eq!(v.low(), Some(3));
    }

    #[test]
    fn rank_and_kernel_agree() {
        // columns: e0+e1, e1+e2, e0+e2 (dependent), e3
        let cols = vec![
            BitVec::from_indices(4, &[0, 1]),
            BitVec::from_indices(4, &[1, 2]),
            BitVec::from_indices(4, &[0, 2]),
            BitVec::from_indices(4, &[3]),
        ];
        assert_eq!(rank(&cols), 3);
        let k = kernel(&cols);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].ones().collect::<Vec<_>>(), vec![0, 1, 2]);
        let sparse = SparseColumns::new(vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![3]]);
        assert_eq!(sparse.rank(), 3);
    }
}
