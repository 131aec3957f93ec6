//! Multi-dimensional complex FFTs built from rustfft line transforms.
//!
//! Plans are cached in a thread-local planner, so each worker owns its plans.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `X(k) = Σ_x x(x) e^{-ik·x}` (unnormalized).
    Forward,
    /// `x(x) = Σ_k X(k) e^{+ik·x}` (unnormalized).
    Inverse,
}

/// In-place transform of a row-major `size^dim` array.
pub(crate) fn fft_nd(data: &mut [Complex64], dim: usize, size: usize, dir: Direction) {
    debug_assert_eq!(data.len(), size.pow(dim as u32));
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            Direction::Forward => p.plan_fft_forward(size),
            Direction::Inverse => p.plan_fft_inverse(size),
        }
    });
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let total = data.len();
    let mut lines = vec![Complex64::default(); total];
    for axis in 0..dim {
        let stride = size.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        // gather every line along `axis` into contiguous storage
        let block = stride * size;
        let mut line = 0;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let dst = &mut lines[line * size..(line + 1) * size];
                for (i, d) in dst.iter_mut().enumerate() {
                    *d = data[base + i * stride];
                }
                line += 1;
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        let mut line = 0;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let src = &lines[line * size..(line + 1) * size];
                for (i, s) in src.iter().enumerate() {
                    data[base + i * stride] = *s;
                }
                line += 1;
            }
        }
    }
}

/// Digits of `idx` in base `size`, checked against `keep`.
fn digits_kept(mut idx: usize, count: usize, size: usize, keep: &[bool]) -> bool {
    for _ in 0..count {
        if !keep[idx % size] {
            return false;
        }
        idx /= size;
    }
    true
}

/// [`fft_nd`] for data that live on a centered box: axis indices `i` with
/// `keep[i]` false are zero on input (inverse) or discarded on output
/// (forward). Lines that are identically zero, or whose every output is
/// discarded, are skipped. Kept entries match the full transform exactly.
pub(crate) fn fft_nd_boxed(data: &mut [Complex64], dim: usize, size: usize, dir: Direction, keep: &[bool]) {
    debug_assert_eq!(data.len(), size.pow(dim as u32));
    debug_assert_eq!(keep.len(), size);
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            Direction::Forward => p.plan_fft_forward(size),
            Direction::Inverse => p.plan_fft_inverse(size),
        }
    });
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); size];
    let total = data.len();
    for axis in 0..dim {
        let inner_axes = dim - 1 - axis;
        let stride = size.pow(inner_axes as u32);
        let block = stride * size;
        for (b, outer) in (0..total).step_by(block).enumerate() {
            // forward: earlier axes are already transformed and only their
            // kept entries survive; inverse: later axes are still untouched
            if dir == Direction::Forward && !digits_kept(b, axis, size, keep) {
                continue;
            }
            for inner in 0..stride {
                if dir == Direction::Inverse && !digits_kept(inner, inner_axes, size, keep) {
                    continue;
                }
                let base = outer + inner;
                if stride == 1 {
                    fft.process_with_scratch(&mut data[base..base + size], &mut scratch);
                    continue;
                }
                for (i, d) in line.iter_mut().enumerate() {
                    *d = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, s) in line.iter().enumerate() {
                    data[base + i * stride] = *s;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], dim: usize, size: usize, sign: f64) -> Vec<Complex64> {
        let total = data.len();
        let coords = |mut idx: usize| {
            let mut c = vec![0usize; dim];
            for a in (0..dim).rev() {
                c[a] = idx % size;
                idx /= size;
            }
            c
        };
        (0..total)
            .map(|kidx| {
                let kc = coords(kidx);
                let mut acc = Complex64::default();
                for (xidx, &v) in data.iter().enumerate() {
                    let xc = coords(xidx);
                    let phase: usize = kc.iter().zip(&xc).map(|(a, b)| a * b).sum();
                    let ang = sign * 2.0 * std::f64::consts::PI * (phase % size) as f64 / size as f64;
                    acc += v * Complex64::from_polar(1.0, ang);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_in_2d_and_3d() {
        for (dim, size) in [(2, 6), (3, 4)] {
            let total: usize = size * size * if dim == 3 { size } else { 1 };
            let data: Vec<Complex64> = (0..total)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let mut fwd = data.clone();
            fft_nd(&mut fwd, dim, size, Direction::Forward);
            let expect = naive_dft(&data, dim, size, -1.0);
            for (a, b) in fwd.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-11);
            }
            let mut inv = data.clone();
            fft_nd(&mut inv, dim, size, Direction::Inverse);
            let expect = naive_dft(&data, dim, size, 1.0);
            for (a, b) in inv.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn boxed_transform_agrees_on_kept_entries() {
        for (dim, size, half) in [(2usize, 10usize, 3usize), (3, 8, 2)] {
            let keep: Vec<bool> = (0..size).map(|i| i <= half || i >= size - half).collect();
            let total = size.pow(dim as u32);
            let kept = |i: usize| digits_kept(i, dim, size, &keep);
            let data: Vec<Complex64> = (0..total)
                .map(|i| {
                    let v = Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos());
                    if kept(i) { v } else { Complex64::default() }
                })
                .collect();
            let mut full = data.clone();
            fft_nd(&mut full, dim, size, Direction::Inverse);
            let mut boxed = data.clone();
            fft_nd_boxed(&mut boxed, dim, size, Direction::Inverse, &keep);
            for (a, b) in full.iter().zip(&boxed) {
                assert!((a - b).norm() < 1e-13);
            }

            let mut full = full.clone();
            let mut boxed = full.clone();
            fft_nd(&mut full, dim, size, Direction::Forward);
            fft_nd_boxed(&mut boxed, dim, size, Direction::Forward, &keep);
            for i in (0..total).filter(|&i| kept(i)) {
                assert!((full[i] - boxed[i]).norm() < 1e-12);
            }
        }
    }
}
