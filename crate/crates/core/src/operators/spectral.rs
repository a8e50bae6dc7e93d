//! FFT helpers for periodic grids and for odd/even extensions of bounded data.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

type Plan = Arc<dyn Fft<f64>>;

fn plans() -> &'static RwLock<HashMap<(usize, bool), Plan>> {
    static PLANS: OnceLock<RwLock<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    PLANS.get_or_init(|| RwLock::new(HashMap::new()))
}

fn plan(n: usize, forward: bool) -> Plan {
    if let Some(p) = plans().read().expect("fft plan cache poisoned").get(&(n, forward)) {
        return p.clone();
    }
    let mut planner = FftPlanner::new();
    let p = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    plans()
        .write()
        .expect("fft plan cache poisoned")
        .entry((n, forward))
        .or_insert(p)
        .clone()
}

/// Normalized forward transform: `û_k = (1/n) Σ_j u_j e^{-2πi jk/n}`.
pub fn forward(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(n, true).process(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// Inverse of [`forward`], returning the real part.
pub fn inverse(mut coeffs: Vec<Complex64>) -> Vec<f64> {
    let n = coeffs.len();
    plan(n, false).process(&mut coeffs);
    coeffs.into_iter().map(|c| c.re).collect()
}

/// Signed integer wavenumber of FFT index `j` (Nyquist reported as `+n/2`).
pub fn index_wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

pub fn is_nyquist(j: usize, n: usize) -> bool {
    n % 2 == 0 && j == n / 2
}

/// Applies a Fourier multiplier on a periodic grid of the given length.
///
/// The closure receives the physical wavenumber `2πk/L` and whether the
/// mode is the Nyquist mode.
pub fn apply_multiplier(
    values: &[f64],
    length: f64,
    symbol: impl Fn(f64, bool) -> Complex64,
) -> Vec<f64> {
    let n = values.len();
    let mut c = forward(values);
    let scale = 2.0 * PI / length;
    for (j, cj) in c.iter_mut().enumerate() {
        let k = index_wavenumber(j, n) as f64 * scale;
        *cj *= symbol(k, is_nyquist(j, n));
    }
    inverse(c)
}

/// Symbol of `d^m/dx^m`; odd derivatives annihilate the Nyquist mode.
pub fn derivative_symbol(k: f64, order: usize, nyquist: bool) -> Complex64 {
    if nyquist && order % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, k).powu(order as u32)
}

/// 2/3-rule truncation: zero every mode with `|k| > n/3`.
pub fn dealias(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let cutoff = n as i64 / 3;
    let mut c = forward(values);
    for (j, cj) in c.iter_mut().enumerate() {
        if index_wavenumber(j, n).abs() > cutoff {
            *cj = Complex64::new(0.0, 0.0);
        }
    }
    inverse(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Extends bounded samples `u_0..u_n` to a `2n`-periodic sequence with the
/// given reflection symmetry about both endpoints.
pub fn reflect_extend(values: &[f64], parity: Parity) -> Vec<f64> {
    let n = values.len() - 1;
    let mut ext = Vec::with_capacity(2 * n);
    ext.extend_from_slice(values);
    for j in (1..n).rev() {
        ext.push(match parity {
            Parity::Odd => -values[j],
            Parity::Even => values[j],
        });
    }
    ext
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_round_trip() {
        let v: Vec<f64> = (0..48).map(|j| ((j * 7 % 11) as f64).sin()).collect();
        let back = inverse(forward(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn wavenumbers() {
        assert_eq!(index_wavenumber(0, 8), 0);
        assert_eq!(index_wavenumber(4, 8), 4);
        assert_eq!(index_wavenumber(5, 8), -3);
        assert!(is_nyquist(4, 8));
        assert!(!is_nyquist(3, 7));
    }

    #[test]
    fn reflection_lengths() {
        let v = [0.0, 1.0, 2.0, 0.0];
        assert_eq!(reflect_extend(&v, Parity::Odd), vec![0.0, 1.0, 2.0, 0.0, -2.0, -1.0]);
        assert_eq!(reflect_extend(&v, Parity::Even), vec![0.0, 1.0, 2.0, 0.0, 2.0, 1.0]);
    }
}
