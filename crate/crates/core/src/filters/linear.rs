use num_complex::Complex64;

use super::{check_sample, StepResult, NORM_EPS};
use crate::error::Result;
use crate::kernels::ComplexVector;

fn herm_dot(w: &[Complex64], z: &[Complex64]) -> Complex64 {
    w.iter().zip(z).map(|(w, z)| w.conj() * z).sum()
}

fn herm_dot_conj(w: &[Complex64], z: &[Complex64]) -> Complex64 {
    w.iter().zip(z).map(|(w, z)| w.conj() * z.conj()).sum()
}

/// Normalized complex LMS: `d̂ = w^H z`, `w ← w + μ e* z / ‖z‖²`.
#[derive(Debug, Clone)]
pub struct Nclms {
    mu: f64,
    weights: Vec<Complex64>,
    n: u64,
}

impl Nclms {
    pub fn new(input_dim: usize, mu: f64) -> Self {
        Self {
            mu,
            weights: vec![Complex64::new(0.0, 0.0); input_dim],
            n: 0,
        }
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn iteration(&self) -> u64 {
        self.n
    }

    pub fn predict(&self, z: &ComplexVector) -> Result<Complex64> {
        check_sample(z, Complex64::new(0.0, 0.0), self.weights.len())?;
        Ok(herm_dot(&self.weights, z.as_slice()))
    }

    pub fn step(&mut self, z: &ComplexVector, d: Complex64) -> Result<StepResult> {
        check_sample(z, d, self.weights.len())?;
        let res = StepResult::new(d, herm_dot(&self.weights, z.as_slice()), false, 0)?;
        let scale = self.mu / z.norm_sqr().max(NORM_EPS);
        let g = res.error.conj() * scale;
        for (w, zi) in self.weights.iter_mut().zip(z) {
            *w += g * zi;
        }
        self.n += 1;
        Ok(res)
    }
}

/// Widely-linear NCLMS: `d̂ = h^H z + g^H z*`.
///
/// Both weight vectors take a normalized LMS step on the augmented regressor
/// `(z, z*)`, whose squared norm is `2‖z‖²`.
#[derive(Debug, Clone)]
pub struct WlNclms {
    mu: f64,
    h: Vec<Complex64>,
    g: Vec<Complex64>,
    n: u64,
}

impl WlNclms {
    pub fn new(input_dim: usize, mu: f64) -> Self {
        Self {
            mu,
            h: vec![Complex64::new(0.0, 0.0); input_dim],
            g: vec![Complex64::new(0.0, 0.0); input_dim],
            n: 0,
        }
    }

    /// Weights acting on `z`.
    pub fn linear_weights(&self) -> &[Complex64] {
        &self.h
    }

    /// Weights acting on `z*`.
    pub fn conjugate_weights(&self) -> &[Complex64] {
        &self.g
    }

    pub fn iteration(&self) -> u64 {
        self.n
    }

    fn output(&self, z: &[Complex64]) -> Complex64 {
        herm_dot(&self.h, z) + herm_dot_conj(&self.g, z)
    }

    pub fn predict(&self, z: &ComplexVector) -> Result<Complex64> {
        check_sample(z, Complex64::new(0.0, 0.0), self.h.len())?;
        Ok(self.output(z.as_slice()))
    }

    pub fn step(&mut self, z: &ComplexVector, d: Complex64) -> Result<StepResult> {
        check_sample(z, d, self.h.len())?;
        let res = StepResult::new(d, self.output(z.as_slice()), false, 0)?;
        let scale = self.mu / (2.0 * z.norm_sqr()).max(NORM_EPS);
        let e = res.error.conj() * scale;
        for ((h, g), zi) in self.h.iter_mut().zip(self.g.iter_mut()).zip(z) {
            *h += e * zi;
            *g += e * zi.conj();
        }
        self.n += 1;
        Ok(res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cgauss(rng: &mut ChaCha8Rng) -> Complex64 {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * std::f64::consts::FRAC_1_SQRT_2
    }

    fn norm(v: &[Complex64]) -> f64 {
        v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn nclms_hand_recursion() {
        let mut f = Nclms::new(1, 1.0);
        let z = ComplexVector::new(vec![c(1.0, 0.0)]).unwrap();
        let r = f.step(&z, c(1.0, 0.0)).unwrap();
        assert_eq!(r.prediction, c(0.0, 0.0));
        assert_eq!(r.error, c(1.0, 0.0));
        assert_eq!(f.weights(), &[c(1.0, 0.0)]);
        assert_eq!(f.predict(&z).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn nclms_zero_error_leaves_weights() {
        let mut f = Nclms::new(2, 0.3);
        let z = ComplexVector::new(vec![c(0.5, 1.0), c(-1.0, 0.2)]).unwrap();
        f.step(&z, c(1.0, -1.0)).unwrap();
        let before = f.weights().to_vec();
        let d = f.predict(&z).unwrap();
        let r = f.step(&z, d).unwrap();
        assert_eq!(r.error, c(0.0, 0.0));
        assert_eq!(f.weights(), before.as_slice());
    }

    #[test]
    fn nclms_zero_input_is_guarded() {
        let mut f = Nclms::new(2, 0.5);
        let z = ComplexVector::zeros(2).unwrap();
        let r = f.step(&z, c(1.0, 1.0)).unwrap();
        assert!(r.prediction.is_finite());
        assert!(f.weights().iter().all(|w| *w == c(0.0, 0.0)));
    }

    #[test]
    fn wl_conjugate_branch_vanishes_on_strictly_linear_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let target = [c(0.8, -0.3), c(-0.2, 0.5), c(0.1, 0.1)];
        let mut f = WlNclms::new(3, 0.1);
        let mut hist = [c(0.0, 0.0); 3];
        for _ in 0..2000 {
            hist.rotate_right(1);
            hist[0] = cgauss(&mut rng);
            let z = ComplexVector::new(hist.to_vec()).unwrap();
            let d: Complex64 = target.iter().zip(&hist).map(|(w, x)| w.conj() * x).sum();
            f.step(&z, d).unwrap();
        }
        let (h, g) = (norm(f.linear_weights()), norm(f.conjugate_weights()));
        assert!(g < 0.1 * h, "‖g‖ = {g}, ‖h‖ = {h}");
    }

    #[test]
    fn wl_learns_conjugation_where_nclms_cannot() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut wl = WlNclms::new(1, 0.2);
        let mut lin = Nclms::new(1, 0.2);
        let (mut wl_err, mut lin_err) = (0.0, 0.0);
        let steps = 3000;
        let tail = 500;
        for n in 0..steps {
            let x = cgauss(&mut rng);
            let z = ComplexVector::new(vec![x]).unwrap();
            let d = x.conj();
            let a = wl.step(&z, d).unwrap();
            let b = lin.step(&z, d).unwrap();
            if n >= steps - tail {
                wl_err += a.error.norm_sqr() / tail as f64;
                lin_err += b.error.norm_sqr() / tail as f64;
            }
        }
        assert!(wl_err < 0.01, "WL steady state {wl_err}");
        assert!(lin_err > 0.5, "NCLMS steady state {lin_err}");
    }
}
