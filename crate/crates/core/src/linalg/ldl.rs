//! Multifrontal sparse LDLᵀ for symmetric (possibly indefinite) matrices.
//!
//! The fill-reducing ordering is a nested dissection built from BFS level
//! structures; supernodes are fundamental supernodes of the postordered
//! elimination tree, optionally amalgamated. Pivots are not permuted, so
//! indefinite systems need a known sign per pivot (quasi-definite matrices).

use nalgebra::{DMatrix, DVectorView, DVectorViewMut};

use super::SparseMatrix;
use crate::error::{Error, Result};

/// What to do with a pivot whose sign disagrees with its expected sign or
/// whose magnitude is tiny.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PivotPolicy {
    /// Replace the pivot by `±delta` with the expected sign.
    Regularize { delta: f64 },
    /// Fail with [`Error::NotSpd`] when a pivot is `<= threshold`
    /// (all pivots are expected positive).
    Positive { threshold: f64 },
}

const LEAF_SIZE: usize = 64;
const BLOCK: usize = 32;
const RELAX_TINY: usize = 4;
const RELAX_WIDTH: usize = 16;
const RELAX_WIDE: usize = 48;

/// Symbolic analysis of a symmetric sparsity pattern.
#[derive(Debug, Clone)]
pub struct LdlSymbolic {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// Columns of supernode `s` are `sn_start[s]..sn_start[s + 1]`.
    sn_start: Vec<usize>,
    /// Off-block row indices of each supernode, ascending.
    sn_rows: Vec<Vec<usize>>,
    sn_children: Vec<Vec<usize>>,
    /// Per supernode: `(csr_position, local_row, local_col)` of the lower
    /// entries that are assembled into its front.
    sn_entries: Vec<Vec<(usize, u32, u32)>>,
    /// Pattern fingerprint of the analyzed matrix.
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

/// Numeric factor `P A Pᵀ = L D Lᵀ`.
#[derive(Debug, Clone)]
pub struct SparseLdl {
    symbolic: LdlSymbolic,
    /// Per supernode, the dense `rows × width` block of `L` (column-major,
    /// unit diagonal stored implicitly).
    blocks: Vec<Vec<f64>>,
    d: Vec<f64>,
    regularized: usize,
    factored: bool,
}

impl LdlSymbolic {
    /// Analyzes a square matrix whose pattern is symmetric.
    pub fn analyze(a: &SparseMatrix) -> Result<Self> {
        if a.n_cols() != a.n_rows() {
            return Err(Error::Invalid("LDLᵀ needs a square matrix".into()));
        }
        let (adj_ptr, adj) = symmetric_graph(a);
        let nd = nested_dissection(a.n_rows(), &adj_ptr, &adj);
        Self::analyze_graph(a, &adj_ptr, &adj, nd)
    }

    /// Analysis with a caller-supplied fill-reducing ordering,
    /// `order[new] = old`.
    pub fn analyze_ordered(a: &SparseMatrix, order: &[usize]) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::Invalid("LDLᵀ needs a square matrix".into()));
        }
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&o| o >= n || std::mem::replace(&mut seen[o], true)) {
            return Err(Error::Invalid("ordering is not a permutation".into()));
        }
        let (adj_ptr, adj) = symmetric_graph(a);
        Self::analyze_graph(a, &adj_ptr, &adj, order.to_vec())
    }

    fn analyze_graph(a: &SparseMatrix, adj_ptr: &[usize], adj: &[usize], nd: Vec<usize>) -> Result<Self> {
        let n = a.n_rows();

        // postorder the elimination tree of the dissected ordering so that
        // supernodes are contiguous
        let parent = etree(n, adj_ptr, adj, &nd);
        let post = postorder(&parent);
        let perm: Vec<usize> = post.iter().map(|&k| nd[k]).collect();
        let mut iperm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let parent = etree(n, adj_ptr, adj, &perm);

        // column structures by merging children (postorder: children first)
        let mut n_children = vec![0usize; n];
        for p in parent.iter().flatten() {
            n_children[*p] += 1;
        }
        let mut pending: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut col_count = vec![0usize; n];
        let mut first_struct: Vec<Option<Vec<usize>>> = vec![None; n];
        let mut mark = vec![usize::MAX; n];
        // supernode detection happens on the fly
        let mut sn_start = Vec::new();
        for j in 0..n {
            let old = perm[j];
            let mut s: Vec<usize> = Vec::new();
            mark[j] = j;
            for &o in &adj[adj_ptr[old]..adj_ptr[old + 1]] {
                let i = iperm[o];
                if i > j && mark[i] != j {
                    mark[i] = j;
                    s.push(i);
                }
            }
            for i in std::mem::take(&mut pending[j]) {
                if i > j && mark[i] != j {
                    mark[i] = j;
                    s.push(i);
                }
            }
            s.sort_unstable();
            col_count[j] = s.len();
            let starts_new =
                j == 0 || parent[j - 1] != Some(j) || n_children[j] != 1 || col_count[j - 1] != col_count[j] + 1;
            if starts_new {
                sn_start.push(j);
                first_struct[j] = Some(s.clone());
            }
            if let Some(p) = parent[j] {
                // the parent inherits everything but itself
                let mut inherited = s;
                if pending[p].is_empty() {
                    pending[p] = inherited;
                } else {
                    pending[p].append(&mut inherited);
                }
            }
        }
        sn_start.push(n);

        let mut sn_start_v = sn_start;
        let mut sn_rows: Vec<Vec<usize>> = Vec::with_capacity(sn_start_v.len());
        for w in sn_start_v.windows(2) {
            let (f, l) = (w[0], w[1]);
            let s = first_struct[f].take().unwrap();
            sn_rows.push(s.into_iter().filter(|&i| i >= l).collect());
        }
        amalgamate(&mut sn_start_v, &mut sn_rows);

        let ns = sn_rows.len();
        let mut col_sn = vec![0usize; n];
        for s in 0..ns {
            for c in sn_start_v[s]..sn_start_v[s + 1] {
                col_sn[c] = s;
            }
        }
        let mut sn_children = vec![Vec::new(); ns];
        for s in 0..ns {
            if let Some(&r) = sn_rows[s].first() {
                sn_children[col_sn[r]].push(s);
            }
        }

        let mut sn_entries: Vec<Vec<(usize, u32, u32)>> = vec![Vec::new(); ns];
        let mut local = vec![0u32; n];
        for s in 0..ns {
            let (f, l) = (sn_start_v[s], sn_start_v[s + 1]);
            for c in f..l {
                local[c] = (c - f) as u32;
            }
            for (k, &r) in sn_rows[s].iter().enumerate() {
                local[r] = (l - f + k) as u32;
            }
            for c in f..l {
                let old = perm[c];
                let (cols, _) = a.row(old);
                // symmetric pattern: row `old` equals column `old`
                for (k, &oc) in cols.iter().enumerate() {
                    let r = iperm[oc];
                    if r >= c {
                        sn_entries[s].push((a.row_ptr()[old] + k, local[r], (c - f) as u32));
                    }
                }
            }
        }

        Ok(Self {
            n,
            perm,
            sn_start: sn_start_v,
            sn_rows,
            sn_children,
            sn_entries,
            row_ptr: a.row_ptr().to_vec(),
            col_idx: a.col_idx().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries of `L` including padding from amalgamation.
    pub fn factor_nnz(&self) -> usize {
        (0..self.sn_rows.len())
            .map(|s| {
                let w = self.sn_start[s + 1] - self.sn_start[s];
                w * (w + 1) / 2 + w * self.sn_rows[s].len()
            })
            .sum()
    }
}

impl LdlSymbolic {
    /// Approximate floating-point operations of one numeric factorization.
    pub fn factor_flops(&self) -> f64 {
        (0..self.sn_rows.len())
            .map(|s| {
                let w = (self.sn_start[s + 1] - self.sn_start[s]) as f64;
                let m = self.sn_rows[s].len() as f64;
                // panel factorization plus the trailing rank-w update
                w * w * w / 3.0 + w * w * m + w * m * m
            })
            .sum()
    }

    /// Largest front dimension.
    pub fn max_front(&self) -> usize {
        (0..self.sn_rows.len())
            .map(|s| self.sn_start[s + 1] - self.sn_start[s] + self.sn_rows[s].len())
            .max()
            .unwrap_or(0)
    }
}

/// Relaxed amalgamation: merges a supernode into its parent when the child
/// ends right before the parent starts and the explicit zeros this adds stay
/// below a width-dependent fraction of the merged block.
fn amalgamate(sn_start: &mut Vec<usize>, sn_rows: &mut Vec<Vec<usize>>) {
    let entries = |w: usize, m: usize| w * (w + 1) / 2 + w * m;
    let ns = sn_rows.len();
    let mut out_start = Vec::with_capacity(ns + 1);
    let mut out_rows: Vec<Vec<usize>> = Vec::with_capacity(ns);
    // structural nonzeros of each output supernode
    let mut out_nz: Vec<usize> = Vec::with_capacity(ns);
    for s in 0..ns {
        let (f, l) = (sn_start[s], sn_start[s + 1]);
        let nz = entries(l - f, sn_rows[s].len());
        if let (Some(prev_rows), Some(&pf), Some(&prev_nz)) = (out_rows.last(), out_start.last(), out_nz.last()) {
            // previous (child) must have its first off-block row inside s
            let is_child = prev_rows.first().is_some_and(|&r| r >= f && r < l);
            if is_child {
                let mut merged: Vec<usize> = prev_rows
                    .iter()
                    .copied()
                    .filter(|&r| r >= l)
                    .chain(sn_rows[s].iter().copied())
                    .collect();
                merged.sort_unstable();
                merged.dedup();
                let width = l - pf;
                let total = entries(width, merged.len());
                let zeros = total - (prev_nz + nz).min(total);
                let fraction = zeros as f64 / total as f64;
                let accept = width <= RELAX_TINY
                    || (width <= RELAX_WIDTH && fraction < 0.8)
                    || (width <= RELAX_WIDE && fraction < 0.1)
                    || fraction < 0.05;
                if accept {
                    *out_rows.last_mut().unwrap() = merged;
                    *out_nz.last_mut().unwrap() = prev_nz + nz;
                    continue;
                }
            }
        }
        out_start.push(f);
        out_rows.push(std::mem::take(&mut sn_rows[s]));
        out_nz.push(nz);
    }
    out_start.push(*sn_start.last().unwrap());
    *sn_start = out_start;
    *sn_rows = out_rows;
}

/// Adjacency lists of the symmetrized pattern without the diagonal.
fn symmetric_graph(a: &SparseMatrix) -> (Vec<usize>, Vec<usize>) {
    let n = a.n_rows();
    let mut deg = vec![0usize; n + 1];
    for (i, j, _) in a.triplets() {
        if i != j {
            deg[i + 1] += 1;
            deg[j + 1] += 1;
        }
    }
    for i in 0..n {
        deg[i + 1] += deg[i];
    }
    let mut next = deg.clone();
    let mut adj = vec![0usize; deg[n]];
    for (i, j, _) in a.triplets() {
        if i != j {
            adj[next[i]] = j;
            next[i] += 1;
            adj[next[j]] = i;
            next[j] += 1;
        }
    }
    // dedupe each list
    let mut ptr = vec![0usize; n + 1];
    let mut out = Vec::with_capacity(adj.len() / 2);
    for i in 0..n {
        let list = &mut adj[deg[i]..deg[i + 1]];
        list.sort_unstable();
        let mut last = usize::MAX;
        for &j in list.iter() {
            if j != last {
                out.push(j);
                last = j;
            }
        }
        ptr[i + 1] = out.len();
    }
    (ptr, out)
}

/// Elimination tree of the graph under `perm` (`perm[new] = old`).
fn etree(n: usize, ptr: &[usize], adj: &[usize], perm: &[usize]) -> Vec<Option<usize>> {
    let mut iperm = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        iperm[old] = new;
    }
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut ancestor: Vec<Option<usize>> = vec![None; n];
    for k in 0..n {
        let old = perm[k];
        for &o in &adj[ptr[old]..ptr[old + 1]] {
            let mut i = iperm[o];
            if i >= k {
                continue;
            }
            // walk from i to the root of its current subtree, compressing
            while let Some(a) = ancestor[i] {
                if a == k {
                    break;
                }
                ancestor[i] = Some(k);
                i = a;
            }
            if ancestor[i].is_none() {
                ancestor[i] = Some(k);
                parent[i] = Some(k);
            }
        }
    }
    parent
}

fn postorder(parent: &[Option<usize>]) -> Vec<usize> {
    let n = parent.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for (i, p) in parent.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(i),
            None => roots.push(i),
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for r in roots {
        stack.push((r, 0));
        while let Some((v, k)) = stack.pop() {
            if k < children[v].len() {
                stack.push((v, k + 1));
                stack.push((children[v][k], 0));
            } else {
                order.push(v);
            }
        }
    }
    order
}

struct Dissection<'a> {
    ptr: &'a [usize],
    adj: &'a [usize],
    stamp: Vec<u32>,
    level: Vec<u32>,
    current: u32,
}

impl Dissection<'_> {
    fn mark(&mut self, nodes: &[usize]) -> u32 {
        self.current += 1;
        for &v in nodes {
            self.stamp[v] = self.current;
        }
        self.current
    }

    /// BFS inside the marked set; returns nodes in visit order and the number
    /// of levels. `level` is filled for visited nodes.
    fn bfs(&mut self, start: usize, tag: u32, visit: u32) -> (Vec<usize>, usize) {
        let mut order = vec![start];
        self.stamp[start] = visit;
        self.level[start] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in &self.adj[self.ptr[v]..self.ptr[v + 1]] {
                if self.stamp[w] == tag {
                    self.stamp[w] = visit;
                    self.level[w] = self.level[v] + 1;
                    order.push(w);
                }
            }
        }
        let levels = self.level[*order.last().unwrap()] as usize + 1;
        (order, levels)
    }

    fn degree_in(&self, v: usize, tag: u32) -> usize {
        self.adj[self.ptr[v]..self.ptr[v + 1]]
            .iter()
            .filter(|&&w| self.stamp[w] == tag)
            .count()
    }

    fn dissect(&mut self, nodes: Vec<usize>, out: &mut Vec<usize>) {
        if nodes.len() <= LEAF_SIZE {
            out.extend(nodes);
            return;
        }
        let tag = self.mark(&nodes);

        // split into connected components first
        let visit = {
            self.current += 1;
            self.current
        };
        let mut components: Vec<Vec<usize>> = Vec::new();
        for &v in &nodes {
            if self.stamp[v] == tag {
                let (comp, _) = self.bfs(v, tag, visit);
                components.push(comp);
            }
        }
        if components.len() > 1 {
            for c in components {
                self.dissect(c, out);
            }
            return;
        }
        let comp = components.pop().unwrap();

        // pseudo-peripheral start node
        let mut start = comp[0];
        let mut best_levels = 0;
        let mut order = Vec::new();
        for _ in 0..4 {
            let tag = self.mark(&comp);
            self.current += 1;
            let visit = self.current;
            let (o, levels) = self.bfs(start, tag, visit);
            if levels <= best_levels {
                break;
            }
            best_levels = levels;
            let last_level = self.level[*o.last().unwrap()];
            let tag_after = visit;
            // among the last level pick the node of minimum degree
            let cand = o
                .iter()
                .rev()
                .take_while(|&&v| self.level[v] == last_level)
                .copied()
                .min_by_key(|&v| (self.degree_in(v, tag_after), v))
                .unwrap();
            order = o;
            start = cand;
        }
        // `order` and `level` hold the BFS from the best start so far
        let levels = best_levels;
        if levels < 3 {
            out.extend(comp);
            return;
        }
        let mut size = vec![0usize; levels];
        for &v in &order {
            size[self.level[v] as usize] += 1;
        }
        let n = order.len();
        let mut before = 0usize;
        let mut best: Option<(usize, f64)> = None;
        let mut median = 1;
        for l in 0..levels {
            let after = n - before - size[l];
            if before < n / 2 {
                median = l;
            }
            if l >= 1 && l + 1 < levels && before.min(after) * 4 >= n {
                let score = size[l] as f64;
                if best.is_none_or(|(_, s)| score < s) {
                    best = Some((l, score));
                }
            }
            before += size[l];
        }
        let sep_level = best.map_or(median.clamp(1, levels - 2), |(l, _)| l) as u32;

        let mut part_a = Vec::new();
        let mut part_b = Vec::new();
        let mut sep = Vec::new();
        for &v in &order {
            let lv = self.level[v];
            if lv < sep_level {
                part_a.push(v);
            } else if lv > sep_level {
                part_b.push(v);
            } else {
                let touches_b = self.adj[self.ptr[v]..self.ptr[v + 1]]
                    .iter()
                    .any(|&w| self.stamp[w] == self.current && self.level[w] == sep_level + 1);
                if touches_b {
                    sep.push(v);
                } else {
                    part_a.push(v);
                }
            }
        }
        self.dissect(part_a, out);
        self.dissect(part_b, out);
        out.extend(sep);
    }
}

/// Nested-dissection ordering of a graph in adjacency form (both directions
/// stored, no self loops), `perm[new] = old`.
pub fn nested_dissection_order(ptr: &[usize], adj: &[usize]) -> Vec<usize> {
    nested_dissection(ptr.len() - 1, ptr, adj)
}

fn nested_dissection(n: usize, ptr: &[usize], adj: &[usize]) -> Vec<usize> {
    let mut d = Dissection {
        ptr,
        adj,
        stamp: vec![0; n],
        level: vec![0; n],
        current: 0,
    };
    let mut out = Vec::with_capacity(n);
    d.dissect((0..n).collect(), &mut out);
    out
}

impl SparseLdl {
    pub fn new(symbolic: LdlSymbolic) -> Self {
        Self {
            symbolic,
            blocks: Vec::new(),
            d: Vec::new(),
            regularized: 0,
            factored: false,
        }
    }

    /// Analyzes and factors in one step.
    pub fn factorize(a: &SparseMatrix, signs: Option<&[i8]>, policy: PivotPolicy) -> Result<Self> {
        let mut f = Self::new(LdlSymbolic::analyze(a)?);
        f.factor(a, signs, policy)?;
        Ok(f)
    }

    pub fn symbolic(&self) -> &LdlSymbolic {
        &self.symbolic
    }

    /// Number of pivots replaced under [`PivotPolicy::Regularize`].
    pub fn regularized_pivots(&self) -> usize {
        self.regularized
    }

    /// Numeric factorization of a matrix with the analyzed pattern.
    /// `signs[i]` is the expected pivot sign of original row `i` (all positive
    /// when `None`).
    pub fn factor(&mut self, a: &SparseMatrix, signs: Option<&[i8]>, policy: PivotPolicy) -> Result<()> {
        let sym = &self.symbolic;
        if a.row_ptr() != sym.row_ptr.as_slice() || a.col_idx() != sym.col_idx.as_slice() {
            return Err(Error::Invalid(
                "matrix pattern differs from the analyzed pattern".into(),
            ));
        }
        let n = sym.n;
        let ns = sym.sn_rows.len();
        let values = a.values();
        let mut d = vec![0.0; n];
        let mut blocks: Vec<Vec<f64>> = Vec::with_capacity(ns);
        let mut updates: Vec<Option<(Vec<usize>, DMatrix<f64>)>> = vec![None; ns];
        let mut local = vec![0usize; n];
        let mut regularized = 0;

        for s in 0..ns {
            let (f, l) = (sym.sn_start[s], sym.sn_start[s + 1]);
            let w = l - f;
            let rows = &sym.sn_rows[s];
            let nr = w + rows.len();
            let mut front = DMatrix::<f64>::zeros(nr, nr);
            for &(pos, r, c) in &sym.sn_entries[s] {
                front[(r as usize, c as usize)] += values[pos];
            }
            for c in f..l {
                local[c] = c - f;
            }
            for (k, &r) in rows.iter().enumerate() {
                local[r] = w + k;
            }
            for &c in &sym.sn_children[s] {
                let (crow, u) = updates[c].take().expect("child processed before parent");
                let idx: Vec<usize> = crow.iter().map(|&r| local[r]).collect();
                for (b, &ib) in idx.iter().enumerate() {
                    for (a_, &ia) in idx.iter().enumerate().skip(b) {
                        front[(ia, ib)] += u[(a_, b)];
                    }
                }
            }

            let pivot_signs: Vec<f64> = (f..l)
                .map(|c| match signs {
                    Some(sg) if sg[sym.perm[c]] < 0 => -1.0,
                    _ => 1.0,
                })
                .collect();
            factor_front(&mut front, w, &pivot_signs, policy, &mut d[f..l], &mut regularized).map_err(|k| {
                Error::NotSpd {
                    pivot: sym.perm[f + k],
                    value: d[f + k],
                }
            })?;

            let mut block = Vec::with_capacity(nr * w);
            for j in 0..w {
                block.extend_from_slice(&front.as_slice()[j * nr..(j + 1) * nr]);
            }
            blocks.push(block);
            if !rows.is_empty() {
                let m = rows.len();
                let u = front.view((w, w), (m, m)).into_owned();
                updates[s] = Some((rows.clone(), u));
            }
        }
        self.blocks = blocks;
        self.d = d;
        self.regularized = regularized;
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert!(self.factored, "solve before factor");
        let sym = &self.symbolic;
        let n = sym.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = sym.perm.iter().map(|&o| b[o]).collect();
        let ns = sym.sn_rows.len();
        let mut tmp = Vec::new();
        for s in 0..ns {
            let (f, l) = (sym.sn_start[s], sym.sn_start[s + 1]);
            let w = l - f;
            let rows = &sym.sn_rows[s];
            let nr = w + rows.len();
            let blk = &self.blocks[s];
            for j in 0..w {
                let xj = x[f + j];
                if xj != 0.0 {
                    for i in j + 1..w {
                        x[f + i] -= blk[j * nr + i] * xj;
                    }
                }
            }
            if !rows.is_empty() {
                let m = rows.len();
                tmp.clear();
                tmp.resize(m, 0.0);
                let lmat = nalgebra::DMatrixView::from_slice_generic(blk, nalgebra::Dyn(nr), nalgebra::Dyn(w));
                let xs = DVectorView::from_slice(&x[f..l], w);
                let mut t = DVectorViewMut::from_slice(&mut tmp, m);
                t.gemv(1.0, &lmat.rows(w, m), &xs, 0.0);
                for (k, &r) in rows.iter().enumerate() {
                    x[r] -= tmp[k];
                }
            }
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for s in (0..ns).rev() {
            let (f, l) = (sym.sn_start[s], sym.sn_start[s + 1]);
            let w = l - f;
            let rows = &sym.sn_rows[s];
            let nr = w + rows.len();
            let blk = &self.blocks[s];
            if !rows.is_empty() {
                let m = rows.len();
                tmp.clear();
                tmp.extend(rows.iter().map(|&r| x[r]));
                let lmat = nalgebra::DMatrixView::from_slice_generic(blk, nalgebra::Dyn(nr), nalgebra::Dyn(w));
                let xr = DVectorView::from_slice(&tmp, m);
                let mut xs = DVectorViewMut::from_slice(&mut x[f..l], w);
                xs.gemv_tr(-1.0, &lmat.rows(w, m), &xr, 1.0);
            }
            for j in (0..w).rev() {
                let mut acc = x[f + j];
                for i in j + 1..w {
                    acc -= blk[j * nr + i] * x[f + i];
                }
                x[f + j] = acc;
            }
        }
        for (new, &old) in sym.perm.iter().enumerate() {
            b[old] = x[new];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Diagonal of `D` in factor order.
    pub fn pivots(&self) -> &[f64] {
        &self.d
    }
}

/// Partial dense LDLᵀ of the leading `w` columns of a symmetric front stored
/// in its lower triangle. On return column `j < w` holds `L[:, j]` below the
/// diagonal, `d` the pivots, and the trailing block the Schur complement.
/// Returns the local index of a rejected pivot on failure.
fn factor_front(
    front: &mut DMatrix<f64>,
    w: usize,
    signs: &[f64],
    policy: PivotPolicy,
    d: &mut [f64],
    regularized: &mut usize,
) -> std::result::Result<(), usize> {
    let nr = front.nrows();
    let mut k0 = 0;
    while k0 < w {
        let k1 = (k0 + BLOCK).min(w);
        // factor the panel columns k0..k1 with right-looking updates confined
        // to the panel
        for k in k0..k1 {
            let mut piv = front[(k, k)];
            match policy {
                PivotPolicy::Regularize { delta } => {
                    let s = signs[k];
                    if !(s * piv > delta) {
                        piv = s * delta.max((s * piv).max(0.0));
                        if piv == 0.0 {
                            piv = s * delta;
                        }
                        *regularized += 1;
                    }
                }
                PivotPolicy::Positive { threshold } => {
                    if !(piv > threshold) {
                        d[k] = piv;
                        return Err(k);
                    }
                }
            }
            d[k] = piv;
            let inv = 1.0 / piv;
            // column k below the diagonal becomes L[:, k]; keep D*L in row k
            // of the upper triangle scratch is unnecessary since we rescale
            for i in k + 1..nr {
                front[(i, k)] *= inv;
            }
            for j in k + 1..k1 {
                let ljk = front[(j, k)] * piv;
                if ljk != 0.0 {
                    for i in j..nr {
                        let lik = front[(i, k)];
                        front[(i, j)] -= lik * ljk;
                    }
                }
            }
        }
        if k1 < w {
            // remaining pivot columns, all rows below them
            let m = nr - k1;
            let b = k1 - k0;
            let mut wmat = front.view((k1, k0), (m, b)).into_owned();
            for (c, &dk) in d[k0..k1].iter().enumerate() {
                wmat.column_mut(c).scale_mut(dk);
            }
            let lt = front.view((k1, k0), (w - k1, b)).transpose();
            let mut target = front.view_mut((k1, k1), (m, w - k1));
            target.gemm(-1.0, &wmat, &lt, 1.0);
        }
        k0 = k1;
    }
    if w < nr {
        // contribution block in one rank-w update, lower triangle by strips
        let m = nr - w;
        let mut wmat = front.view((w, 0), (m, w)).into_owned();
        for (c, &dk) in d[..w].iter().enumerate() {
            wmat.column_mut(c).scale_mut(dk);
        }
        let lt = front.view((w, 0), (m, w)).transpose();
        let mut j0 = 0;
        while j0 < m {
            let j1 = (j0 + 4 * BLOCK).min(m);
            let mut target = front.view_mut((w + j0, w + j0), (m - j0, j1 - j0));
            target.gemm(-1.0, &wmat.rows(j0, m - j0), &lt.columns(j0, j1 - j0), 1.0);
            j0 = j1;
        }
    }
    Ok(())
}
