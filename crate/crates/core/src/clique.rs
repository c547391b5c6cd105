//! Exact maximum clique by branch and bound with greedy-colouring bounds.
//!
//! Candidates are coloured greedily (each colour class is an independent
//! set), so the number of colours bounds the clique that can still be built
//! from them. Vertices are expanded in reverse colour order and a branch is
//! cut as soon as `current + colour <= best`.
//!
//! Exact only. Past roughly 60 vertices at moderate density the search can
//! take a long time; callers are expected to stay within that budget.

use crate::graph::{iter_bits, Graph};

/// Size of a maximum clique of `g`.
pub fn clique_number(g: &Graph) -> usize {
    let n = g.vertex_count();
    let words = n.div_ceil(64);
    let mut candidates = vec![0u64; words];
    for v in 0..n {
        candidates[v / 64] |= 1u64 << (v % 64);
    }
    let mut best = 1;
    expand(g, 0, candidates, &mut best);
    best
}

fn expand(g: &Graph, size: usize, mut candidates: Vec<u64>, best: &mut usize) {
    let (order, colors) = color_sort(g, &candidates);
    for i in (0..order.len()).rev() {
        if size + colors[i] <= *best {
            return;
        }
        let v = order[i];
        let next: Vec<u64> = candidates.iter().zip(g.row(v)).map(|(c, r)| c & r).collect();
        if next.iter().all(|&w| w == 0) {
            if size + 1 > *best {
                *best = size + 1;
            }
        } else {
            expand(g, size + 1, next, best);
        }
        candidates[v / 64] &= !(1u64 << (v % 64));
    }
}

fn first_bit(words: &[u64]) -> Option<usize> {
    iter_bits(words).next()
}

/// Greedy sequential colouring. Returns vertices ordered by colour and the
/// (1-based) colour of each position.
fn color_sort(g: &Graph, candidates: &[u64]) -> (Vec<usize>, Vec<usize>) {
    let mut uncolored = candidates.to_vec();
    let mut order = Vec::new();
    let mut colors = Vec::new();
    let mut color = 0;
    while uncolored.iter().any(|&w| w != 0) {
        color += 1;
        let mut available = uncolored.clone();
        while let Some(v) = first_bit(&available) {
            order.push(v);
            colors.push(color);
            uncolored[v / 64] &= !(1u64 << (v % 64));
            available[v / 64] &= !(1u64 << (v % 64));
            for (a, r) in available.iter_mut().zip(g.row(v)) {
                *a &= !r;
            }
        }
    }
    (order, colors)
}
