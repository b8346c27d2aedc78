//! Left-looking sparse LU factorization (Gilbert–Peierls) with row pivoting.
//!
//! Column `k` of `L\A(:,k)` is computed by a sparse triangular solve whose
//! nonzero pattern is found by a depth-first search over the graph of the
//! columns of `L` built so far. No fill-reducing ordering is applied.

use super::{LinalgError, SparseMatrix};

/// Pivot magnitude below this fraction of the largest input entry is singular.
pub const SINGULARITY_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotPolicy {
    /// Largest remaining magnitude in the column; the diagonal wins ties.
    #[default]
    Partial,
    /// Always pivot on the diagonal. Used to test positive definiteness.
    Diagonal,
}

/// `P·M = L·U` with `L` unit lower triangular and `U` upper triangular,
/// both stored by columns.
#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    /// `perm[k]` is the original row placed at position `k`.
    perm: Vec<usize>,
}

pub fn lu_factorize(m: &SparseMatrix) -> Result<Factorization, LinalgError> {
    lu_factorize_with(m, PivotPolicy::Partial)
}

pub fn lu_factorize_with(m: &SparseMatrix, policy: PivotPolicy) -> Result<Factorization, LinalgError> {
    let n = m.require_square()?;
    let cutoff = SINGULARITY_CUTOFF * m.max_abs();
    // Rows of the transpose are the columns of `m`.
    let cols = m.transpose();

    let mut f = Factorization {
        n,
        l_ptr: Vec::with_capacity(n + 1),
        l_idx: Vec::with_capacity(4 * m.nnz()),
        l_val: Vec::with_capacity(4 * m.nnz()),
        u_ptr: Vec::with_capacity(n + 1),
        u_idx: Vec::with_capacity(4 * m.nnz()),
        u_val: Vec::with_capacity(4 * m.nnz()),
        perm: vec![usize::MAX; n],
    };
    let mut pinv = vec![usize::MAX; n];
    let mut x = vec![0.0; n];
    let mut reach = Reach::new(n);

    for k in 0..n {
        f.l_ptr.push(f.l_idx.len());
        f.u_ptr.push(f.u_idx.len());

        let (b_idx, b_val) = cols.row(k);
        let top = reach.run(&f.l_ptr, &f.l_idx, &pinv, b_idx);
        let pattern = &reach.xi[top..];
        for &i in pattern {
            x[i] = 0.0;
        }
        for (&i, &v) in b_idx.iter().zip(b_val) {
            x[i] = v;
        }
        for &j in pattern {
            let col = pinv[j];
            if col == usize::MAX {
                continue;
            }
            let xj = x[j];
            for p in f.l_ptr[col] + 1..f.l_ptr[col + 1] {
                x[f.l_idx[p]] -= f.l_val[p] * xj;
            }
        }

        let mut pivot_row = usize::MAX;
        let mut best = -1.0;
        for &i in pattern {
            if pinv[i] == usize::MAX {
                let a = x[i].abs();
                if a > best || (a == best && i == k) {
                    best = a;
                    pivot_row = i;
                }
            } else {
                f.u_idx.push(pinv[i]);
                f.u_val.push(x[i]);
            }
        }
        if policy == PivotPolicy::Diagonal {
            if pinv[k] != usize::MAX || !pattern.contains(&k) {
                return Err(LinalgError::SingularMatrix { column: k, pivot: 0.0 });
            }
            pivot_row = k;
        }
        if pivot_row == usize::MAX || x[pivot_row].abs() < cutoff || x[pivot_row] == 0.0 {
            let pivot = if pivot_row == usize::MAX { 0.0 } else { x[pivot_row] };
            return Err(LinalgError::SingularMatrix { column: k, pivot });
        }

        let pivot = x[pivot_row];
        f.u_idx.push(k);
        f.u_val.push(pivot);
        pinv[pivot_row] = k;
        f.perm[k] = pivot_row;
        f.l_idx.push(pivot_row);
        f.l_val.push(1.0);
        for &i in pattern {
            if pinv[i] == usize::MAX {
                f.l_idx.push(i);
                f.l_val.push(x[i] / pivot);
            }
            x[i] = 0.0;
        }
    }
    f.l_ptr.push(f.l_idx.len());
    f.u_ptr.push(f.u_idx.len());
    for i in f.l_idx.iter_mut() {
        *i = pinv[*i];
    }
    Ok(f)
}

/// Workspace for the depth-first reachability search.
struct Reach {
    xi: Vec<usize>,
    stack: Vec<usize>,
    pstack: Vec<usize>,
    marked: Vec<bool>,
}

impl Reach {
    fn new(n: usize) -> Self {
        Self {
            xi: vec![0; n],
            stack: Vec::new(),
            pstack: Vec::new(),
            marked: vec![false; n],
        }
    }

    /// Writes the rows reachable from `seeds` in topological order into
    /// `xi[top..]` and returns `top`.
    fn run(&mut self, l_ptr: &[usize], l_idx: &[usize], pinv: &[usize], seeds: &[usize]) -> usize {
        let n = self.xi.len();
        let mut top = n;
        let n_cols = l_ptr.len();
        for &seed in seeds {
            if self.marked[seed] {
                continue;
            }
            self.stack.clear();
            self.pstack.clear();
            self.stack.push(seed);
            self.pstack.push(usize::MAX);
            while let Some(&j) = self.stack.last() {
                let head = self.stack.len() - 1;
                let col = pinv[j];
                let (start, end) = if col == usize::MAX || col >= n_cols {
                    (0, 0)
                } else {
                    let end = l_ptr.get(col + 1).copied().unwrap_or(l_idx.len());
                    (l_ptr[col], end)
                };
                if !self.marked[j] {
                    self.marked[j] = true;
                    self.pstack[head] = start;
                }
                let mut descended = false;
                let mut p = self.pstack[head];
                while p < end {
                    let i = l_idx[p];
                    p += 1;
                    if !self.marked[i] {
                        self.pstack[head] = p;
                        self.stack.push(i);
                        self.pstack.push(usize::MAX);
                        descended = true;
                        break;
                    }
                }
                if !descended {
                    self.stack.pop();
                    self.pstack.pop();
                    top -= 1;
                    self.xi[top] = j;
                }
            }
        }
        for &i in &self.xi[top..] {
            self.marked[i] = false;
        }
        top
    }
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal of `U`, in pivot order.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.u_val[self.u_ptr[k + 1] - 1]).collect()
    }

    /// Row permutation: `permutation()[k]` is the source row of pivot `k`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Number of stored entries in `L` and `U` together.
    pub fn nnz(&self) -> usize {
        self.l_idx.len() + self.u_idx.len()
    }

    fn check_len(&self, r: &[f64]) -> Result<(), LinalgError> {
        if r.len() == self.n {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch {
                expected: self.n,
                found: r.len(),
            })
        }
    }

    /// Solves `M y = r`.
    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.check_len(r)?;
        let mut y: Vec<f64> = self.perm.iter().map(|&i| r[i]).collect();
        self.forward_l(&mut y);
        self.backward_u(&mut y);
        Ok(y)
    }

    /// Solves `M y = r` overwriting `r`; `work` must have the same length.
    pub fn solve_in_place(&self, r: &mut [f64], work: &mut [f64]) -> Result<(), LinalgError> {
        self.check_len(r)?;
        self.check_len(work)?;
        for (w, &i) in work.iter_mut().zip(&self.perm) {
            *w = r[i];
        }
        self.forward_l(work);
        self.backward_u(work);
        r.copy_from_slice(work);
        Ok(())
    }

    /// Solves `Mᵀ y = r`.
    pub fn solve_transposed(&self, r: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.check_len(r)?;
        let mut w = r.to_vec();
        for k in 0..self.n {
            let last = self.u_ptr[k + 1] - 1;
            let mut s = w[k];
            for p in self.u_ptr[k]..last {
                s -= self.u_val[p] * w[self.u_idx[p]];
            }
            w[k] = s / self.u_val[last];
        }
        for k in (0..self.n).rev() {
            let mut s = w[k];
            for p in self.l_ptr[k] + 1..self.l_ptr[k + 1] {
                s -= self.l_val[p] * w[self.l_idx[p]];
            }
            w[k] = s;
        }
        let mut y = vec![0.0; self.n];
        for (k, &i) in self.perm.iter().enumerate() {
            y[i] = w[k];
        }
        Ok(y)
    }

    fn forward_l(&self, x: &mut [f64]) {
        for k in 0..self.n {
            let xk = x[k];
            if xk == 0.0 {
                continue;
            }
            for p in self.l_ptr[k] + 1..self.l_ptr[k + 1] {
                x[self.l_idx[p]] -= self.l_val[p] * xk;
            }
        }
    }

    fn backward_u(&self, x: &mut [f64]) {
        for k in (0..self.n).rev() {
            let last = self.u_ptr[k + 1] - 1;
            x[k] /= self.u_val[last];
            let xk = x[k];
            if xk == 0.0 {
                continue;
            }
            for p in self.u_ptr[k]..last {
                x[self.u_idx[p]] -= self.u_val[p] * xk;
            }
        }
    }
}
