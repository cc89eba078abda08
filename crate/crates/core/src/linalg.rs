//! Dense matrices over p-adic fields; elimination with min-valuation pivots.

use num_rational::Rational64;

use crate::padic::PadicField;

#[derive(Clone, Debug)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: PadicField> Mat<S> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: S) {
        self.data[i * self.cols + j] = x;
    }

    pub fn map<T: PadicField>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.rows);
        Mat::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).mul(o.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
            }
            acc
        })
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.get(i, 0).mul(&v[0]);
                for k in 1..self.cols {
                    acc = acc.add(&self.get(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &S) -> Mat<S> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| c.mul(a)).collect() }
    }

    pub fn neg(&self) -> Mat<S> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.neg()).collect() }
    }

    /// [self; o]
    pub fn vstack(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Mat { rows: self.rows + o.rows, cols: self.cols, data }
    }

    /// [self | o]
    pub fn hstack(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.rows, o.rows);
        Mat::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols { self.get(i, j).clone() } else { o.get(i, j - self.cols).clone() }
        })
    }

    /// Submatrix of the given columns.
    pub fn columns(&self, idx: &[usize]) -> Mat<S> {
        Mat::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn min_valuation(&self) -> Option<Rational64> {
        self.data.iter().filter_map(|x| x.val()).min()
    }

    pub fn all_negligible(&self, guard: i64) -> bool {
        self.data.iter().all(|x| x.is_negligible(guard))
    }
}

/// Gauss-Jordan reduction with full min-valuation pivoting.
pub struct Reduction<S> {
    pub rank: usize,
    /// (row, column) of each pivot, in elimination order
    pub pivots: Vec<(usize, usize)>,
    /// valuation of each pivot when chosen; non-decreasing, so these are the elementary divisors over Z_p
    pub pivot_vals: Vec<Rational64>,
    reduced: Mat<S>,
}

pub fn reduce<S: PadicField>(m: &Mat<S>, guard: i64) -> Reduction<S> {
    let mut a = m.clone();
    let (r, c) = (a.rows, a.cols);
    let mut row_used = vec![false; r];
    let mut col_used = vec![false; c];
    let mut pivots = Vec::new();
    let mut pivot_vals = Vec::new();
    loop {
        let mut best: Option<(usize, usize, Rational64)> = None;
        for i in (0..r).filter(|&i| !row_used[i]) {
            for j in (0..c).filter(|&j| !col_used[j]) {
                let x = a.get(i, j);
                if x.is_negligible(guard) {
                    continue;
                }
                let v = x.val().expect("non-negligible has a valuation");
                if best.as_ref().is_none_or(|b| v < b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((pi, pj, pv)) = best else { break };
        row_used[pi] = true;
        col_used[pj] = true;
        pivots.push((pi, pj));
        pivot_vals.push(pv);
        let inv = a.get(pi, pj).inv().expect("pivot is invertible");
        for j in 0..c {
            let x = a.get(pi, j).mul(&inv);
            a.set(pi, j, x);
        }
        for i in 0..r {
            if i == pi || a.get(i, pj).val().is_none() {
                continue;
            }
            let f = a.get(i, pj).clone();
            for j in 0..c {
                if a.get(pi, j).val().is_none() {
                    continue;
                }
                let x = a.get(i, j).sub(&f.mul(a.get(pi, j)));
                a.set(i, j, x);
            }
        }
    }
    Reduction { rank: pivots.len(), pivots, pivot_vals, reduced: a }
}

pub fn rank<S: PadicField>(m: &Mat<S>, guard: i64) -> usize {
    reduce(m, guard).rank
}

impl<S: PadicField> Reduction<S> {
    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self, template: &S, prec: i64) -> Vec<Vec<S>> {
        let c = self.reduced.cols;
        let pivot_cols: Vec<bool> = {
            let mut v = vec![false; c];
            for &(_, j) in &self.pivots {
                v[j] = true;
            }
            v
        };
        let zero = template.zero_at(prec);
        let one = template.one_at(prec);
        (0..c)
            .filter(|&f| !pivot_cols[f])
            .map(|f| {
                let mut v = vec![zero.clone(); c];
                v[f] = one.clone();
                for &(pi, pj) in &self.pivots {
                    v[pj] = self.reduced.get(pi, f).neg();
                }
                v
            })
            .collect()
    }
}

pub fn kernel<S: PadicField>(m: &Mat<S>, guard: i64, template: &S, prec: i64) -> Vec<Vec<S>> {
    reduce(m, guard).kernel(template, prec)
}
