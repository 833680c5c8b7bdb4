use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalised 2-D transforms on kx-major buffers of length `nx * ny`.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_x: planner.plan_fft_inverse(nx),
            inv_y: planner.plan_fft_inverse(ny),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd_x, &self.fwd_y);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv_x, &self.inv_y);
    }

    fn run(&self, data: &mut [Complex64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        assert_eq!(
            data.len(),
            self.nx * self.ny,
            "buffer does not match the plan"
        );
        // rows are contiguous in y
        fy.process(data);
        let mut cols = vec![Complex64::new(0.0, 0.0); data.len()];
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                cols[iy * self.nx + ix] = data[ix * self.ny + iy];
            }
        }
        fx.process(&mut cols);
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                data[ix * self.ny + iy] = cols[iy * self.nx + ix];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode() {
        let (nx, ny) = (8, 4);
        let fft = Fft2::new(nx, ny);
        let mut buf: Vec<Complex64> = (0..nx * ny)
            .map(|i| {
                let (ix, iy) = (i / ny, i % ny);
                let phase = 2.0 * PI * (2.0 * ix as f64 / nx as f64 + iy as f64 / ny as f64);
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        fft.forward(&mut buf);
        for (i, z) in buf.iter().enumerate() {
            let want = if i == 2 * ny + 1 {
                (nx * ny) as f64
            } else {
                0.0
            };
            assert!((z.re - want).abs() < 1e-9 && z.im.abs() < 1e-9);
        }
        fft.inverse(&mut buf);
        assert!((buf[0].re - (nx * ny) as f64).abs() < 1e-9);
    }
}
