//! Dense matrices over a Euclidean ring, Smith normal form, ranks over fields.

use super::ring::{Euclidean, Field, Pid};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<T>>) -> Option<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Matrix { rows, cols, data: entries.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn select_cols(&self, cols: impl IntoIterator<Item = usize>) -> Self {
        let cols: Vec<usize> = cols.into_iter().collect();
        Matrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize>) -> Self {
        let rows: Vec<usize> = rows.into_iter().collect();
        Matrix::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Matrix::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols { self.get(i, j).clone() } else { o.get(i, j - self.cols).clone() }
        })
    }

    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        Matrix::from_fn(self.rows + o.rows, self.cols, |i, j| {
            if i < self.rows { self.get(i, j).clone() } else { o.get(i - self.rows, j).clone() }
        })
    }
}

impl<R: Euclidean> Matrix<R> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| R::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { R::one() } else { R::zero() })
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        Matrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = R::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc = acc.add(&a.mul(o.get(k, j)));
                }
            }
            acc
        })
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &R) {
        for j in 0..self.cols {
            let v = self.get(dst, j).add(&c.mul(self.get(src, j)));
            self.set(dst, j, v);
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &R) {
        for i in 0..self.rows {
            let v = self.get(i, dst).add(&self.get(i, src).mul(c));
            self.set(i, dst, v);
        }
    }

    fn scale_row(&mut self, i: usize, c: &R) {
        for j in 0..self.cols {
            let v = self.get(i, j).mul(c);
            self.set(i, j, v);
        }
    }

    fn scale_col(&mut self, j: usize, c: &R) {
        for i in 0..self.rows {
            let v = self.get(i, j).mul(c);
            self.set(i, j, v);
        }
    }
}

impl<R: Pid> Matrix<R> {
    pub fn reduce(&self, f: &R) -> Matrix<R::Residue> {
        self.map(|x| x.reduce(f))
    }
}

/// U A V = diag(d), U and V invertible, d a divisibility chain, zeros last.
#[derive(Clone, Debug)]
pub struct Smith<R> {
    pub diag: Vec<R>,
    pub rank: usize,
    pub u: Matrix<R>,
    pub u_inv: Matrix<R>,
    pub v: Matrix<R>,
    pub v_inv: Matrix<R>,
}

impl<R: Euclidean> Smith<R> {
    /// Nonzero invariant factors that are not units.
    pub fn torsion(&self) -> Vec<R> {
        self.diag[..self.rank].iter().filter(|d| !d.is_unit()).cloned().collect()
    }

    /// Columns of V spanning the kernel.
    pub fn kernel(&self) -> Matrix<R> {
        self.v.select_cols(self.rank..self.v.cols())
    }

    /// Basis of the column span: U^-1 columns scaled by the invariant factors.
    pub fn image(&self) -> Matrix<R> {
        let mut b = self.u_inv.select_cols(0..self.rank);
        for (j, d) in self.diag[..self.rank].iter().enumerate() {
            b.scale_col(j, d);
        }
        b
    }

    /// Rank modulo a prime f: invariant factors not divisible by f.
    pub fn rank_mod(&self, f: &R) -> usize {
        self.diag[..self.rank].iter().filter(|d| !f.divides(d)).count()
    }
}

/// Smith form with transforms.
pub fn smith<R: Euclidean>(a: &Matrix<R>) -> Smith<R> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut u_inv = Matrix::identity(m);
    let mut v = Matrix::identity(n);
    let mut v_inv = Matrix::identity(n);

    // row op E: d <- E d, u <- E u, u_inv <- u_inv E^-1
    macro_rules! row_add {
        ($dst:expr, $src:expr, $c:expr) => {{
            let c: R = $c;
            d.add_row($dst, $src, &c);
            u.add_row($dst, $src, &c);
            u_inv.add_col($src, $dst, &c.neg());
        }};
    }
    macro_rules! row_swap {
        ($a:expr, $b:expr) => {{
            d.swap_rows($a, $b);
            u.swap_rows($a, $b);
            u_inv.swap_cols($a, $b);
        }};
    }
    // column op E: d <- d E, v <- v E, v_inv <- E^-1 v_inv
    macro_rules! col_add {
        ($dst:expr, $src:expr, $c:expr) => {{
            let c: R = $c;
            d.add_col($dst, $src, &c);
            v.add_col($dst, $src, &c);
            v_inv.add_row($src, $dst, &c.neg());
        }};
    }
    macro_rules! col_swap {
        ($a:expr, $b:expr) => {{
            d.swap_cols($a, $b);
            v.swap_cols($a, $b);
            v_inv.swap_rows($a, $b);
        }};
    }

    let mut rank = 0;
    for t in 0..m.min(n) {
        // smallest nonzero entry in the lower-right block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = d.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.smaller(d.get(bi, bj))) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        row_swap!(t, bi);
        col_swap!(t, bj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let (q, r) = d.get(i, t).div_rem(d.get(t, t));
                row_add!(i, t, q.neg());
                if !r.is_zero() {
                    row_swap!(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let (q, r) = d.get(t, j).div_rem(d.get(t, t));
                col_add!(j, t, q.neg());
                if !r.is_zero() {
                    col_swap!(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(t, t).divides(d.get(i, j))));
            match bad {
                Some(i) => row_add!(t, i, R::one()),
                None => break,
            }
        }
        let (c, c_inv) = d.get(t, t).canonical_unit();
        d.scale_row(t, &c);
        u.scale_row(t, &c);
        u_inv.scale_col(t, &c_inv);
        rank = t + 1;
    }
    let diag = (0..m.min(n)).map(|i| d.get(i, i).clone()).collect();
    Smith { diag, rank, u, u_inv, v, v_inv }
}

/// Rank over a field by elimination.
pub fn field_rank<F: Field>(a: &Matrix<F>) -> usize {
    let mut m = a.clone();
    let mut rank = 0;
    for j in 0..m.cols() {
        let Some(piv) = (rank..m.rows()).find(|&i| !m.get(i, j).is_zero()) else { continue };
        for k in 0..m.cols() {
            m.data.swap(rank * m.cols + k, piv * m.cols + k);
        }
        let inv = m.get(rank, j).inv();
        for i in rank + 1..m.rows() {
            if m.get(i, j).is_zero() {
                continue;
            }
            let c = m.get(i, j).mul(&inv);
            for k in j..m.cols() {
                let v = m.get(i, k).sub(&c.mul(m.get(rank, k)));
                m.set(i, k, v);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn z(rows: &[&[i64]]) -> Matrix<BigInt> {
        let c = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(rows.len(), c, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn smith_examples() {
        let a = z(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![2.into(), 6.into(), 12.into()]);
        assert_eq!(s.u.mul(&a).mul(&s.v), Matrix::from_fn(3, 3, |i, j| if i == j { s.diag[i].clone() } else { 0.into() }));
        assert_eq!(s.u.mul(&s.u_inv), Matrix::identity(3));
        assert_eq!(s.v.mul(&s.v_inv), Matrix::identity(3));
        let k = smith(&z(&[&[1, 2, 3]])).kernel();
        assert_eq!(k.cols(), 2);
        assert!(z(&[&[1, 2, 3]]).mul(&k).is_zero());
        let empty: Matrix<BigInt> = Matrix::zero(0, 3);
        assert_eq!(smith(&empty).rank, 0);
    }
}
