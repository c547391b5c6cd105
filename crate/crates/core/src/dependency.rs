//! Dependency graphs over the potential edges of a random graph.

use crate::error::{Error, Result};
use crate::graph::{pair_count, EdgeIndex};

/// A symmetric, irreflexive relation on the canonical edge indices of a
/// graph on `n` vertices, together with its declared degree bound `d`.
///
/// Stored as compressed rows: the neighbours of edge `e` are
/// `targets[offsets[e]..offsets[e + 1]]`, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencySpec {
    n: usize,
    d: usize,
    offsets: Vec<usize>,
    targets: Vec<u64>,
}

impl DependencySpec {
    /// Spec in which the edges of each block are mutually dependent and
    /// edges in different blocks are not. Blocks must be disjoint.
    pub(crate) fn from_blocks<'a, I>(n: usize, d: usize, blocks: I) -> Self
    where
        I: IntoIterator<Item = &'a [EdgeIndex]>,
    {
        let edges = pair_count(n) as usize;
        let mut lists: Vec<&'a [EdgeIndex]> = vec![&[]; edges];
        for block in blocks {
            for e in block {
                lists[e.0 as usize] = block;
            }
        }
        let mut offsets = Vec::with_capacity(edges + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for (e, block) in lists.iter().enumerate() {
            let start = targets.len();
            targets.extend(block.iter().map(|f| f.0).filter(|&f| f != e as u64));
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        DependencySpec { n, d, offsets, targets }
    }

    /// Build from explicit neighbour lists (one per edge index) and check
    /// every invariant: indices in range, no self-dependence, symmetry and
    /// the degree bound.
    pub fn from_neighbor_lists(n: usize, d: usize, lists: Vec<Vec<EdgeIndex>>) -> Result<Self> {
        let edges = pair_count(n) as usize;
        if lists.len() != edges {
            return Err(Error::invalid(format!(
                "expected {edges} neighbour lists for n = {n}, got {}",
                lists.len()
            )));
        }
        let mut offsets = Vec::with_capacity(edges + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in lists {
            let mut row: Vec<u64> = list.into_iter().map(|e| e.0).collect();
            row.sort_unstable();
            row.dedup();
            targets.extend(row);
            offsets.push(targets.len());
        }
        let spec = DependencySpec { n, d, offsets, targets };
        spec.validate()?;
        Ok(spec)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// The declared bound `d`.
    pub fn bound(&self) -> usize {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, e: EdgeIndex) -> impl Iterator<Item = EdgeIndex> + '_ {
        let e = e.0 as usize;
        self.targets[self.offsets[e]..self.offsets[e + 1]].iter().map(|&f| EdgeIndex(f))
    }

    pub fn degree(&self, e: EdgeIndex) -> usize {
        let e = e.0 as usize;
        self.offsets[e + 1] - self.offsets[e]
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn are_dependent(&self, a: EdgeIndex, b: EdgeIndex) -> bool {
        let a = a.0 as usize;
        self.targets[self.offsets[a]..self.offsets[a + 1]].binary_search(&b.0).is_ok()
    }

    pub fn validate(&self) -> Result<()> {
        let edges = self.edge_count() as u64;
        for e in 0..edges {
            for f in self.neighbors(EdgeIndex(e)) {
                if f.0 >= edges {
                    return Err(Error::invalid(format!("edge {e} depends on out-of-range edge {}", f.0)));
                }
                if f.0 == e {
                    return Err(Error::invalid(format!("edge {e} is listed as depending on itself")));
                }
                if !self.are_dependent(f, EdgeIndex(e)) {
                    return Err(Error::invalid(format!(
                        "dependency {e} -> {} is not symmetric",
                        f.0
                    )));
                }
            }
        }
        if self.max_degree() > self.d {
            return Err(Error::invalid(format!(
                "max dependency degree {} exceeds the declared bound {}",
                self.max_degree(),
                self.d
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: u64) -> EdgeIndex {
        EdgeIndex(k)
    }

    #[test]
    fn blocks_give_cliques() {
        let blocks: Vec<Vec<EdgeIndex>> = vec![vec![e(0), e(2), e(4)], vec![e(1)], vec![e(3), e(5)]];
        let spec = DependencySpec::from_blocks(4, 2, blocks.iter().map(|b| b.as_slice()));
        assert_eq!(spec.max_degree(), 2);
        assert_eq!(spec.neighbors(e(2)).collect::<Vec<_>>(), vec![e(0), e(4)]);
        assert_eq!(spec.degree(e(1)), 0);
        assert!(spec.are_dependent(e(3), e(5)));
        assert!(!spec.are_dependent(e(0), e(1)));
        spec.validate().unwrap();
    }

    #[test]
    fn explicit_lists_are_validated() {
        let mut lists = vec![Vec::new(); 3];
        lists[0] = vec![e(1)];
        assert!(DependencySpec::from_neighbor_lists(3, 1, lists.clone()).is_err());
        lists[1] = vec![e(0)];
        let ok = DependencySpec::from_neighbor_lists(3, 1, lists.clone()).unwrap();
        assert_eq!(ok.max_degree(), 1);
        assert!(DependencySpec::from_neighbor_lists(3, 0, lists.clone()).is_err());
        lists[2] = vec![e(2)];
        assert!(DependencySpec::from_neighbor_lists(3, 1, lists).is_err());
        assert!(DependencySpec::from_neighbor_lists(3, 1, vec![Vec::new(); 2]).is_err());
    }
}
