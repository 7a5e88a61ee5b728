use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::linalg::CMat;

/// Matrix-valued trigonometric polynomial `sum_{|k| <= N} c_k e^{i k x}` on
/// the circle. Coefficients are stored flat, `r x r` row-major per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierMatrix {
    cutoff: usize,
    rank: usize,
    data: Vec<Complex64>,
}

impl FourierMatrix {
    pub fn zeros(rank: usize, cutoff: usize) -> Self {
        FourierMatrix { cutoff, rank, data: vec![Complex64::new(0.0, 0.0); (2 * cutoff + 1) * rank * rank] }
    }

    /// The constant loop with value `m`.
    pub fn constant(m: &CMat, cutoff: usize) -> Self {
        let mut f = FourierMatrix::zeros(m.nrows(), cutoff);
        f.set_mode(0, m);
        f
    }

    pub fn identity(rank: usize, cutoff: usize) -> Self {
        FourierMatrix::constant(&CMat::identity(rank, rank), cutoff)
    }

    pub fn from_modes(rank: usize, cutoff: usize, modes: &[(i64, CMat)]) -> Self {
        let mut f = FourierMatrix::zeros(rank, cutoff);
        for (k, m) in modes {
            f.set_mode(*k, m);
        }
        f
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn offset(&self, k: i64) -> Option<usize> {
        let n = self.cutoff as i64;
        (k.abs() <= n).then(|| (k + n) as usize * self.rank * self.rank)
    }

    pub fn mode(&self, k: i64) -> CMat {
        let r = self.rank;
        match self.offset(k) {
            Some(o) => CMat::from_row_slice(r, r, &self.data[o..o + r * r]),
            None => CMat::zeros(r, r),
        }
    }

    pub fn set_mode(&mut self, k: i64, m: &CMat) {
        let r = self.rank;
        let o = self.offset(k).expect("mode beyond cutoff");
        for i in 0..r {
            for j in 0..r {
                self.data[o + i * r + j] = m[(i, j)];
            }
        }
    }

    pub fn entry(&self, k: i64, i: usize, j: usize) -> Complex64 {
        self.offset(k).map_or(Complex64::new(0.0, 0.0), |o| self.data[o + i * self.rank + j])
    }

    pub fn set_entry(&mut self, k: i64, i: usize, j: usize, v: Complex64) {
        let o = self.offset(k).expect("mode beyond cutoff");
        self.data[o + i * self.rank + j] = v;
    }

    fn block(&self, k: i64) -> &[Complex64] {
        let o = self.offset(k).expect("mode beyond cutoff");
        &self.data[o..o + self.rank * self.rank]
    }

    fn mode_is_zero(&self, k: i64) -> bool {
        self.block(k).iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let n = self.cutoff as i64;
        -n..=n
    }

    pub fn scale(&self, c: Complex64) -> Self {
        FourierMatrix { cutoff: self.cutoff, rank: self.rank, data: self.data.iter().map(|z| z * c).collect() }
    }

    /// `d^order/dx^order`: mode `k` gets multiplied by `(i k)^order`.
    pub fn derivative(&self, order: u32) -> Self {
        if order == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        let r2 = self.rank * self.rank;
        for k in self.modes() {
            let f = Complex64::new(0.0, k as f64).powu(order);
            let o = self.offset(k).unwrap();
            for z in &mut out.data[o..o + r2] {
                *z *= f;
            }
        }
        out
    }

    /// Applies a scalar multiplier per mode.
    pub fn map_modes(&self, f: impl Fn(i64) -> Complex64) -> Self {
        let mut out = self.clone();
        let r2 = self.rank * self.rank;
        for k in self.modes() {
            let m = f(k);
            let o = self.offset(k).unwrap();
            for z in &mut out.data[o..o + r2] {
                *z *= m;
            }
        }
        out
    }

    /// Pointwise product, truncated back to the cutoff. Returns the product
    /// and the discarded energy `sum |c_k|^2` over modes beyond the cutoff.
    pub fn mul_truncated(&self, o: &FourierMatrix) -> (FourierMatrix, f64) {
        assert_eq!(self.rank, o.rank, "rank mismatch in Fourier product");
        assert_eq!(self.cutoff, o.cutoff, "cutoff mismatch in Fourier product");
        let (r, n) = (self.rank, self.cutoff as i64);
        let mut out = FourierMatrix::zeros(r, self.cutoff);
        let mut overflow = std::collections::BTreeMap::<i64, Vec<Complex64>>::new();
        let a_modes: Vec<i64> = self.modes().filter(|&k| !self.mode_is_zero(k)).collect();
        let b_modes: Vec<i64> = o.modes().filter(|&k| !o.mode_is_zero(k)).collect();
        for &ka in &a_modes {
            let a = self.block(ka);
            for &kb in &b_modes {
                let b = o.block(kb);
                let k = ka + kb;
                let dst: &mut [Complex64] = if k.abs() <= n {
                    let off = (k + n) as usize * r * r;
                    &mut out.data[off..off + r * r]
                } else {
                    overflow.entry(k).or_insert_with(|| vec![Complex64::new(0.0, 0.0); r * r])
                };
                for i in 0..r {
                    for l in 0..r {
                        let ail = a[i * r + l];
                        if ail.re == 0.0 && ail.im == 0.0 {
                            continue;
                        }
                        for j in 0..r {
                            dst[i * r + j] += ail * b[l * r + j];
                        }
                    }
                }
            }
        }
        let loss = overflow.values().flatten().map(|z| z.norm_sqr()).sum();
        (out, loss)
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = FourierMatrix::zeros(self.rank, self.cutoff);
        for k in self.modes() {
            out.set_mode(-k, &self.mode(k).adjoint());
        }
        out
    }

    /// Value at `x`.
    pub fn eval(&self, x: f64) -> CMat {
        let mut m = CMat::zeros(self.rank, self.rank);
        for k in self.modes() {
            m += self.mode(k) * Complex64::from_polar(1.0, k as f64 * x);
        }
        m
    }

    /// `sqrt(sum_k ||c_k||_F^2)`.
    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Zero mode of the pointwise trace, i.e. `(2 pi)^{-1} int tr f dx`.
    pub fn mean_trace(&self) -> Complex64 {
        (0..self.rank).map(|i| self.entry(0, i, i)).sum()
    }

    /// `(2 pi)^{-1} int w(x) tr f(x) dx` for a scalar weight given by modes.
    pub fn weighted_mean_trace(&self, weight: &[(i64, Complex64)]) -> Complex64 {
        weight
            .iter()
            .map(|&(k, w)| w * (0..self.rank).map(|i| self.entry(-k, i, i)).sum::<Complex64>())
            .sum()
    }
}

impl Add for &FourierMatrix {
    type Output = FourierMatrix;
    fn add(self, o: &FourierMatrix) -> FourierMatrix {
        assert_eq!((self.rank, self.cutoff), (o.rank, o.cutoff), "shape mismatch in Fourier sum");
        FourierMatrix {
            cutoff: self.cutoff,
            rank: self.rank,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &FourierMatrix {
    type Output = FourierMatrix;
    fn sub(self, o: &FourierMatrix) -> FourierMatrix {
        self + &(-o)
    }
}

impl Neg for &FourierMatrix {
    type Output = FourierMatrix;
    fn neg(self) -> FourierMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &FourierMatrix {
    type Output = FourierMatrix;
    fn mul(self, o: &FourierMatrix) -> FourierMatrix {
        self.mul_truncated(o).0
    }
}
