//! Small helpers shared by the form, connection and symbol code.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn complexify(m: &DMatrix<f64>) -> CMat {
    m.map(c)
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn permutation_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All permutations of `0..n` in lexicographic order with their signs.
pub fn permutations(n: usize) -> Vec<(f64, Vec<usize>)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter().map(|p| (permutation_sign(&p), p)).collect()
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A shuffle of `0..n` into consecutive blocks, each block increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Shuffle {
    pub sign: f64,
    pub blocks: Vec<Vec<usize>>,
}

/// All shuffles of `0..sum(sizes)` into blocks of the given sizes. These are
/// the terms of the wedge product `a_1 ^ ... ^ a_m` of forms of degrees
/// `sizes` under the determinant normalisation (`dx ^ dy (e_x, e_y) = 1`).
pub fn shuffles(sizes: &[usize]) -> Vec<Shuffle> {
    fn rec(sizes: &[usize], remaining: &[usize], blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Shuffle>) {
        if blocks.len() == sizes.len() {
            let flat: Vec<usize> = blocks.iter().flatten().copied().collect();
            out.push(Shuffle { sign: permutation_sign(&flat), blocks: blocks.clone() });
            return;
        }
        let k = sizes[blocks.len()];
        for pick in subsets(remaining.len(), k) {
            let block: Vec<usize> = pick.iter().map(|&i| remaining[i]).collect();
            let rest: Vec<usize> = remaining.iter().copied().filter(|x| !block.contains(x)).collect();
            blocks.push(block);
            rec(sizes, &rest, blocks, out);
            blocks.pop();
        }
    }
    let n: usize = sizes.iter().sum();
    let all: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    rec(sizes, &all, &mut Vec::new(), &mut out);
    out
}

/// Bitmask of a set of slot indices.
pub fn mask(idx: &[usize]) -> usize {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}
