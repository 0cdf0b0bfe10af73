//! Inner products with a fixed reduction order: the vector is split into
//! fixed-size chunks whose partial sums are added in index order, so the
//! result is bit-identical for any number of worker threads.

use rayon::prelude::*;

use crate::C64;

const CHUNK: usize = 1 << 12;

fn chunked_sum<T, F>(len: usize, zero: T, f: F) -> T
where
    T: Copy + Send + std::ops::Add<Output = T>,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
{
    if len <= CHUNK {
        return f(0..len);
    }
    let parts: Vec<T> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(len)))
        .collect();
    parts.into_iter().fold(zero, |a, b| a + b)
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    chunked_sum(x.len(), 0.0, |r| r.map(|i| x[i] * y[i]).sum())
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `⟨x|y⟩ = Σ conj(x_i) y_i`.
pub fn cdot(x: &[C64], y: &[C64]) -> C64 {
    assert_eq!(x.len(), y.len());
    chunked_sum(x.len(), C64::default(), |r| {
        r.map(|i| x[i].conj() * y[i]).fold(C64::default(), |a, b| a + b)
    })
}

pub fn cnorm(x: &[C64]) -> f64 {
    chunked_sum(x.len(), 0.0, |r| r.map(|i| x[i].norm_sqr()).sum()).sqrt()
}

/// `y += a x`.
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scale(a: f64, x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v *= a);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_dot_matches_exact_small_integers() {
        let n = 3 * CHUNK + 17;
        let x: Vec<f64> = (0..n).map(|i| (i % 7) as f64).collect();
        let y: Vec<f64> = (0..n).map(|i| (i % 5) as f64).collect();
        let exact: f64 = (0..n).map(|i| ((i % 7) * (i % 5)) as f64).sum();
        assert_eq!(dot(&x, &y), exact);
    }

    #[test]
    fn complex_inner_product_conjugates_left() {
        let x = vec![C64::new(0.0, 1.0)];
        let y = vec![C64::new(1.0, 0.0)];
        assert_eq!(cdot(&x, &y), C64::new(0.0, -1.0));
    }
}
