use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::matrix::ComplexVector;

/// Vector p-norm: (sum |x_i|^p)^(1/p); max modulus at p = inf.
pub fn vector_p_norm(x: &ComplexVector, p: PExponent) -> f64 {
    match p {
        PExponent::Infinity => x.entries().iter().map(|z| z.norm()).fold(0.0, f64::max),
        PExponent::Finite(v) if v == 1.0 => x.entries().iter().map(|z| z.norm()).sum(),
        PExponent::Finite(v) if v == 2.0 => {
            x.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        }
        PExponent::Finite(v) => {
            // scale by the max modulus so powf stays in range
            let m = x.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            let s: f64 = x
                .entries()
                .iter()
                .map(|z| (z.norm() / m).powf(v))
                .sum();
            m * s.powf(1.0 / v)
        }
    }
}

/// Bilinear dual pairing <eta, xi> = sum_i xi_i eta_i (no conjugation).
pub fn holder_pairing(eta: &ComplexVector, xi: &ComplexVector) -> Result<Complex64> {
    if eta.dim() != xi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "pairing of dims {} and {}",
            eta.dim(),
            xi.dim()
        )));
    }
    Ok(eta
        .entries()
        .iter()
        .zip(xi.entries())
        .map(|(e, x)| e * x)
        .sum())
}

/// Duality map into the q' unit sphere: returns eta with ||eta||_{q'} = 1 and
/// <eta, y> = ||y||_q (bilinear pairing, hence the conjugated phase).
/// Coordinates where y_i = 0 map to 0; y = 0 maps to the zero vector.
pub fn duality_map(y: &ComplexVector, q: PExponent) -> ComplexVector {
    let n = y.dim();
    if y.is_zero() {
        return ComplexVector::zeros(n);
    }
    match q {
        // q = inf: point mass (conjugate phase) at the first max-modulus coordinate
        PExponent::Infinity => {
            let mut best = 0.0;
            let mut idx = 0;
            for (i, z) in y.entries().iter().enumerate() {
                let m = z.norm();
                if m > best {
                    best = m;
                    idx = i;
                }
            }
            let mut eta = ComplexVector::zeros(n);
            eta.entries_mut()[idx] = y[idx].conj() / best;
            eta
        }
        // q = 1: conjugate sign vector, sup-norm 1
        PExponent::Finite(v) if v == 1.0 => {
            let mut eta = ComplexVector::zeros(n);
            for (i, z) in y.entries().iter().enumerate() {
                let m = z.norm();
                if m > 0.0 {
                    eta.entries_mut()[i] = z.conj() / m;
                }
            }
            eta
        }
        PExponent::Finite(v) => {
            let norm_q = vector_p_norm(y, q);
            let mut eta = ComplexVector::zeros(n);
            for (i, z) in y.entries().iter().enumerate() {
                let m = z.norm();
                if m > 0.0 {
                    let mag = (m / norm_q).powf(v - 1.0);
                    eta.entries_mut()[i] = (z.conj() / m) * mag;
                }
            }
            eta
        }
    }
}

/// Normalize onto the p-sphere; zero vectors are replaced by e_1.
pub fn normalize_p(x: &ComplexVector, p: PExponent) -> ComplexVector {
    let nrm = vector_p_norm(x, p);
    if nrm == 0.0 {
        return ComplexVector::basis(x.dim(), 0);
    }
    x.scale(Complex64::new(1.0 / nrm, 0.0))
}

/// Uniform-in-angle random point on the complex p-sphere.
pub fn random_p_sphere<R: Rng>(rng: &mut R, dim: usize, p: PExponent) -> ComplexVector {
    let raw: Vec<Complex64> = (0..dim)
        .map(|_| {
            // Box-Muller pairs; direction is all that matters here
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            Complex64::new(r * u2.cos(), r * u2.sin())
        })
        .collect();
    normalize_p(&ComplexVector::from(raw), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::PExponent;

    fn v(entries: &[(f64, f64)]) -> ComplexVector {
        ComplexVector::from(
            entries
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn pythagorean() {
        let x = ComplexVector::from_real(&[3.0, 4.0]).unwrap();
        assert!((vector_p_norm(&x, PExponent::TWO) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn one_norm_sums_moduli() {
        let x = v(&[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0)]);
        assert!((vector_p_norm(&x, PExponent::ONE) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_is_max_modulus() {
        let x = ComplexVector::from_real(&[1.0, -2.0, 0.5]).unwrap();
        assert!((vector_p_norm(&x, PExponent::Infinity) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pairing_examples() {
        let e1 = ComplexVector::basis(2, 0);
        let x = ComplexVector::from_real(&[5.0, 7.0]).unwrap();
        assert_eq!(holder_pairing(&e1, &x).unwrap(), Complex64::new(5.0, 0.0));

        let eta = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        let xi = ComplexVector::from_real(&[1.0, -1.0]).unwrap();
        assert_eq!(holder_pairing(&eta, &xi).unwrap(), Complex64::ZERO);

        // (i, 0) paired with (i, 3): i*i = -1, no conjugation
        let eta = v(&[(0.0, 1.0), (0.0, 0.0)]);
        let xi = v(&[(0.0, 1.0), (3.0, 0.0)]);
        assert_eq!(holder_pairing(&eta, &xi).unwrap(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn pairing_rejects_mismatch() {
        let a = ComplexVector::from_real(&[1.0]).unwrap();
        let b = ComplexVector::from_real(&[1.0, 2.0]).unwrap();
        assert!(holder_pairing(&a, &b).is_err());
    }

    #[test]
    fn duality_map_attains_norm() {
        let y = v(&[(1.0, 2.0), (-0.5, 0.0), (0.0, 0.0), (0.3, -0.7)]);
        for q in [
            PExponent::ONE,
            PExponent::Finite(1.5),
            PExponent::TWO,
            PExponent::Finite(3.0),
            PExponent::Infinity,
        ] {
            let eta = duality_map(&y, q);
            let qp = q.conjugate();
            assert!(
                (vector_p_norm(&eta, qp) - 1.0).abs() < 1e-12,
                "dual norm at q = {q}"
            );
            let pair = holder_pairing(&eta, &y).unwrap();
            let target = vector_p_norm(&y, q);
            assert!((pair.re - target).abs() < 1e-12, "attainment at q = {q}");
            assert!(pair.im.abs() < 1e-12);
        }
    }

    #[test]
    fn duality_map_of_zero_is_zero() {
        let z = ComplexVector::zeros(3);
        assert!(duality_map(&z, PExponent::TWO).is_zero());
    }
}
