//! Minimal fixed-capacity d×d matrices (d ≤ 3) used by the index algebra.
//!
//! A full linear-algebra dependency is not warranted: the library only needs
//! diagonal/unipotent matrices, products, determinants, and vector application.

use crate::scalar::Scalar;

/// Dense d×d matrix over the working scalar, d ∈ {2, 3}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<T> {
    pub d: usize,
    pub a: [[T; 3]; 3],
}

/// Dense d×d integer matrix; shear arithmetic stays exact here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IMat {
    pub d: usize,
    pub a: [[i64; 3]; 3],
}

impl<T: Scalar> Mat<T> {
    pub fn zero(d: usize) -> Self {
        Mat { d, a: [[T::zero(); 3]; 3] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zero(d);
        for i in 0..d {
            m.a[i][i] = T::one();
        }
        m
    }

    pub fn diag(d: usize, entries: &[T]) -> Self {
        debug_assert_eq!(entries.len(), d);
        let mut m = Self::zero(d);
        for i in 0..d {
            m.a[i][i] = entries[i];
        }
        m
    }

    pub fn mul(&self, rhs: &Mat<T>) -> Mat<T> {
        debug_assert_eq!(self.d, rhs.d);
        let mut out = Mat::zero(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                let mut acc = T::zero();
                for l in 0..self.d {
                    acc += self.a[i][l] * rhs.a[l][j];
                }
                out.a[i][j] = acc;
            }
        }
        out
    }

    pub fn apply(&self, v: [T; 3]) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for i in 0..self.d {
            let mut acc = T::zero();
            for l in 0..self.d {
                acc += self.a[i][l] * v[l];
            }
            out[i] = acc;
        }
        out
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut out = Mat::zero(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                out.a[i][j] = self.a[j][i];
            }
        }
        out
    }

    pub fn det(&self) -> T {
        let a = &self.a;
        match self.d {
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            3 => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
            _ => unreachable!("d ∈ {{2,3}}"),
        }
    }
}

impl IMat {
    pub fn identity(d: usize) -> Self {
        let mut a = [[0i64; 3]; 3];
        for (i, row) in a.iter_mut().enumerate().take(d) {
            row[i] = 1;
        }
        IMat { d, a }
    }

    pub fn mul(&self, rhs: &IMat) -> IMat {
        debug_assert_eq!(self.d, rhs.d);
        let mut out = IMat { d: self.d, a: [[0; 3]; 3] };
        for i in 0..self.d {
            for j in 0..self.d {
                let mut acc = 0i64;
                for l in 0..self.d {
                    acc += self.a[i][l] * rhs.a[l][j];
                }
                out.a[i][j] = acc;
            }
        }
        out
    }

    pub fn det(&self) -> i64 {
        let a = &self.a;
        match self.d {
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            3 => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
            _ => unreachable!("d ∈ {{2,3}}"),
        }
    }

    pub fn to_mat<T: Scalar>(&self) -> Mat<T> {
        let mut out = Mat::zero(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                out.a[i][j] = T::from_i64(self.a[i][j]).expect("small integer");
            }
        }
        out
    }
}
