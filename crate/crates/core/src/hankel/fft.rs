use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::check_len;
use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::scalar::{Backend, Real};

/// `u_n = Σ_k m_{n+k} g_k` for `n < out` by cyclic convolution of the
/// moments with the reversed coefficient vector.
///
/// Needs `moments.len() ≥ out + g.len() - 1`. The transform length is the
/// next power of two above that, which rules out wrap-around.
pub fn hankel_correlate(moments: &[f64], g: &[f64], out: usize) -> Vec<f64> {
    if out == 0 {
        return Vec::new();
    }
    if g.is_empty() {
        return vec![0.0; out];
    }
    let k = g.len();
    let needed = out + k - 1;
    assert!(moments.len() >= needed, "not enough moments for the requested output");
    let len = needed.next_power_of_two().max(2);
    let mut a: Vec<Complex<f64>> = moments[..needed]
        .iter()
        .map(|&m| Complex::new(m, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    let mut b: Vec<Complex<f64>> = g
        .iter()
        .rev()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);
    forward.process(&mut a);
    forward.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    inverse.process(&mut a);
    let scale = 1.0 / len as f64;
    a[k - 1..k - 1 + out].iter().map(|c| c.re * scale).collect()
}

/// FFT evaluation of the truncated row action; float backend only.
pub fn matvec_fft<T: Real>(ms: &MomentSequence<T>, g: &[T], dim: usize) -> Result<Vec<T>> {
    if ms.backend() != Backend::F64 {
        return Err(Error::UnsupportedBackend {
            operation: "matvec_fft".into(),
            backend: ms.backend().to_string(),
        });
    }
    check_len(g, dim)?;
    if dim == 0 {
        return Ok(Vec::new());
    }
    let ctx = ms.ctx();
    let moments: Vec<f64> = ms.moments(2 * dim - 1)?.iter().map(T::to_f64).collect();
    let g: Vec<f64> = g.iter().map(T::to_f64).collect();
    Ok(hankel_correlate(&moments, &g, dim)
        .into_iter()
        .map(|x| T::from_f64(x, ctx))
        .collect())
}
