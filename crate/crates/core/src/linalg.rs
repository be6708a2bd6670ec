//! Small dense real-valued matrix and vector kernel.
//!
//! Storage is row-major `f64`. Everything the network needs lives here:
//! products (plain and transposed), elementwise tanh and its derivative,
//! squared distances, a max-shifted softmax, and vector means.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    pub fn from_vec(data: Vec<f64>) -> Self {
        Vector(data)
    }

    pub fn filled(len: usize, value: f64) -> Self {
        Vector(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        self.check_len("dot", other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    /// `self += scale * other`
    pub fn axpy(&mut self, scale: f64, other: &Vector) -> Result<()> {
        self.check_len("axpy", other)?;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += scale * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.check_len("sub", other)?;
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn hadamard(&self, other: &Vector) -> Result<Vector> {
        self.check_len("hadamard", other)?;
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect(),
        ))
    }

    pub fn scaled(&self, scale: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * scale).collect())
    }

    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &x) in self.0.iter().enumerate() {
            match best {
                Some((_, b)) if x <= b => {}
                _ => best = Some((i, x)),
            }
        }
        best.map(|(i, _)| i)
    }

    fn check_len(&self, op: &'static str, other: &Vector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::shape(
                op,
                format!("[{}]", self.len()),
                format!("[{}]", other.len()),
            ));
        }
        Ok(())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(data: Vec<f64>) -> Self {
        Vector(data)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "Matrix::from_vec",
                format!("{rows}x{cols}"),
                format!("{} values", data.len()),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::shape(
                    "Matrix::from_rows",
                    format!("row of {cols}"),
                    format!("row of {}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `Aᵀ·v` without materializing the transpose.
    pub fn matvec_transposed(&self, v: &Vector) -> Result<Vector> {
        if self.rows != v.len() {
            return Err(Error::shape(
                "matvec_transposed",
                format!("({self})ᵀ"),
                format!("[{}]", v.len()),
            ));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(Vector(out))
    }

    /// `self += scale · u·vᵀ`
    pub fn add_outer(&mut self, scale: f64, u: &Vector, v: &Vector) -> Result<()> {
        if self.rows != u.len() || self.cols != v.len() {
            return Err(Error::shape(
                "add_outer",
                self.to_string(),
                format!("[{}]x[{}]", u.len(), v.len()),
            ));
        }
        for (i, &ui) in u.iter().enumerate() {
            let s = scale * ui;
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, &vj) in row.iter_mut().zip(v.iter()) {
                *r += s * vj;
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::shape("matmul", a, b));
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for l in 0..a.cols {
            let ail = a[(i, l)];
            if ail == 0.0 {
                continue;
            }
            let brow = b.row(l);
            let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for (o, &blj) in orow.iter_mut().zip(brow) {
                *o += ail * blj;
            }
        }
    }
    Ok(out)
}

pub fn matvec(a: &Matrix, v: &Vector) -> Result<Vector> {
    if a.cols != v.len() {
        return Err(Error::shape("matvec", a, format!("[{}]", v.len())));
    }
    Ok(Vector(
        (0..a.rows)
            .map(|i| a.row(i).iter().zip(v.iter()).map(|(x, y)| x * y).sum())
            .collect(),
    ))
}

pub fn tanh_map(v: &Vector) -> Vector {
    Vector(v.iter().map(|x| x.tanh()).collect())
}

/// Derivative of tanh expressed through its output: `1 - y²`.
pub fn tanh_prime_from_output(y: &Vector) -> Vector {
    Vector(y.iter().map(|y| 1.0 - y * y).collect())
}

pub fn frob_sq_diff(a: &Vector, b: &Vector) -> Result<f64> {
    a.check_len("frob_sq_diff", b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn softmax(z: &Vector) -> Result<Vector> {
    if z.is_empty() {
        return Err(Error::Empty("softmax"));
    }
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(Vector(exps.into_iter().map(|e| e / sum).collect()))
}

pub fn mean_of<'a, I>(vectors: I) -> Result<Vector>
where
    I: IntoIterator<Item = &'a Vector>,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or(Error::Empty("mean_of"))?;
    let mut acc = first.clone();
    let mut n = 1usize;
    for v in iter {
        acc.axpy(1.0, v).map_err(|_| {
            Error::shape("mean_of", format!("[{}]", first.len()), format!("[{}]", v.len()))
        })?;
        n += 1;
    }
    let inv = 1.0 / n as f64;
    for x in acc.as_mut_slice() {
        *x *= inv;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn matmul_examples() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(matmul(&Matrix::identity(2), &a).unwrap(), a);
        let b = m(&[&[5.0], &[6.0]]);
        assert_eq!(matmul(&a, &b).unwrap(), m(&[&[17.0], &[39.0]]));
        let z = Matrix::zeros(2, 2);
        let any = m(&[&[1.5, -2.0, 3.0], &[0.25, 7.0, -1.0]]);
        assert_eq!(matmul(&z, &any).unwrap(), Matrix::zeros(2, 3));
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let err = matmul(&Matrix::zeros(2, 3), &Matrix::zeros(2, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2x3"), "{msg}");
        assert!(matches!(err, Error::Shape { .. }));
    }

    #[test]
    fn matvec_examples() {
        let v = Vector::from(vec![1.0, 2.0, 3.0]);
        assert_eq!(matvec(&Matrix::identity(3), &v).unwrap(), v);
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(
            matvec(&a, &Vector::from(vec![1.0, 1.0])).unwrap(),
            Vector::from(vec![3.0, 7.0])
        );
        assert_eq!(matvec(&Matrix::zeros(2, 3), &v).unwrap(), Vector::zeros(2));
        assert!(matvec(&a, &v).is_err());
    }

    #[test]
    fn matvec_transposed_matches_explicit_transpose() {
        let a = m(&[&[1.0, -2.0, 0.5], &[3.0, 4.0, -1.0]]);
        let v = Vector::from(vec![0.3, -0.7]);
        let direct = matvec(&a.transpose(), &v).unwrap();
        assert_eq!(a.matvec_transposed(&v).unwrap(), direct);
    }

    #[test]
    fn tanh_examples() {
        assert_eq!(tanh_map(&Vector::zeros(3)), Vector::zeros(3));
        let sat = tanh_map(&Vector::from(vec![50.0]))[0];
        assert!(sat > 1.0 - 1e-12 && sat <= 1.0);
        assert_eq!(tanh_map(&Vector::from(vec![1.0]))[0], 0.7615941559557649);
    }

    #[test]
    fn tanh_prime_examples() {
        let out = tanh_prime_from_output(&Vector::from(vec![0.0, 1.0, 0.5]));
        assert_eq!(out.as_slice(), &[1.0, 0.0, 0.75]);
    }

    #[test]
    fn frob_examples() {
        let a = Vector::from(vec![1.0, 0.0]);
        assert_eq!(frob_sq_diff(&a, &a).unwrap(), 0.0);
        assert_eq!(frob_sq_diff(&a, &Vector::from(vec![0.0, 1.0])).unwrap(), 2.0);
        assert_eq!(
            frob_sq_diff(&Vector::from(vec![3.0]), &Vector::from(vec![0.0])).unwrap(),
            9.0
        );
        assert!(frob_sq_diff(&a, &Vector::zeros(3)).is_err());
    }

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax(&Vector::zeros(2)).unwrap().as_slice(), &[0.5, 0.5]);
        for c in [-1000.0, 0.0, 3.5, 1000.0] {
            let p = softmax(&Vector::filled(3, c)).unwrap();
            for x in p.iter() {
                assert!((x - 1.0 / 3.0).abs() < 1e-15);
            }
        }
        let p = softmax(&Vector::from(vec![1f64.ln(), 2f64.ln(), 3f64.ln()])).unwrap();
        for (x, e) in p.iter().zip([1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]) {
            assert!((x - e).abs() < 1e-15, "{x} vs {e}");
        }
        assert!(softmax(&Vector::zeros(0)).is_err());
    }

    #[test]
    fn softmax_survives_huge_logits() {
        let p = softmax(&Vector::from(vec![800.0, 0.0])).unwrap();
        assert!(p.is_finite());
        assert_eq!(p[0], 1.0);
    }

    #[test]
    fn mean_examples() {
        let one = Vector::from(vec![1.0, 1.0]);
        assert_eq!(mean_of([&one]).unwrap(), one);
        let a = Vector::from(vec![0.0, 0.0]);
        let b = Vector::from(vec![2.0, 4.0]);
        assert_eq!(mean_of([&a, &b]).unwrap().as_slice(), &[1.0, 2.0]);
        let v = Vector::from(vec![0.1, -0.3, 0.7]);
        let copies = vec![v.clone(); 7];
        let mean = mean_of(&copies).unwrap();
        for (x, y) in mean.iter().zip(v.iter()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(matches!(mean_of(&Vec::<Vector>::new()), Err(Error::Empty(_))));
        assert!(mean_of([&a, &Vector::zeros(3)]).is_err());
    }

    #[test]
    fn argmax_prefers_first_of_ties() {
        assert_eq!(Vector::from(vec![0.2, 0.5, 0.5]).argmax(), Some(1));
        assert_eq!(Vector::zeros(0).argmax(), None);
    }
}
