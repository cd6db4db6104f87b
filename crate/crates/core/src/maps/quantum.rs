use std::f64::consts::TAU;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::ClassicalMapParams;
use crate::dft::{half_root_of_unity, transpose_square, DftPlan};
use crate::error::{check_dim, Result};
use crate::torus::{DensityMatrix, PureState, TorusSpace};

/// Quantized two-kick map `U = T(P) F V(Q)` with `V` diagonal in position and
/// `T` diagonal in momentum.
#[derive(Debug, Clone)]
pub struct KickedMap {
    space: TorusSpace,
    v_phase: Array1<C64>,
    t_phase: Array1<C64>,
    params: ClassicalMapParams,
    plan: DftPlan,
}

/// Quantization of the perturbed cat map.
///
/// Position kick `exp(2 pi i (a Q^2/(2N) + N k cos(2 pi Q/N)))`, momentum kick
/// `exp(2 pi i (-b P^2/(2N) - N k cos(2 pi P/N)))`. These are
/// `exp(-2 pi i N V(Q/N))` and `exp(2 pi i N T(P/N))` for the shear potentials
/// of [`super::classical_step`], so a change `dk` of the perturbation shifts
/// the kick phases by `(dk / hbar) cos`.
pub fn perturbed_cat_quantum(a: i64, b: i64, k: f64, space: TorusSpace) -> KickedMap {
    let n = space.dim();
    let nf = n as f64;
    let two_n = 2 * n as i64;
    let quad = |coef: i64, x: usize| {
        let x = x as i64;
        // coef * x^2 / (2N) turns into a multiple of pi / N.
        let m = (coef.rem_euclid(two_n) * ((x * x) % two_n)) % two_n;
        half_root_of_unity(m, n)
    };
    let v_phase = Array1::from_shape_fn(n, |q| {
        quad(a, q) * C64::from_polar(1.0, TAU * nf * k * (TAU * q as f64 / nf).cos())
    });
    let t_phase = Array1::from_shape_fn(n, |p| {
        quad(-b, p) * C64::from_polar(1.0, -TAU * nf * k * (TAU * p as f64 / nf).cos())
    });
    KickedMap {
        space,
        v_phase,
        t_phase,
        params: ClassicalMapParams { a, b, k },
        plan: DftPlan::new(n),
    }
}

impl KickedMap {
    pub fn space(&self) -> TorusSpace {
        self.space
    }

    pub fn params(&self) -> ClassicalMapParams {
        self.params
    }

    pub fn position_kick(&self) -> &Array1<C64> {
        &self.v_phase
    }

    pub fn momentum_kick(&self) -> &Array1<C64> {
        &self.t_phase
    }

    /// `U |psi>`.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        let mut out = state.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, state: &mut PureState) -> Result<()> {
        check_dim(self.space.dim(), state.space().dim())?;
        let scale = 1.0 / self.space.dim() as f64;
        let buf = state.amplitudes_mut().as_slice_mut().expect("contiguous");
        buf.iter_mut().zip(self.v_phase.iter()).for_each(|(z, v)| *z *= v);
        self.plan.forward(buf);
        buf.iter_mut().zip(self.t_phase.iter()).for_each(|(z, t)| *z *= t);
        self.plan.inverse(buf);
        buf.iter_mut().for_each(|z| *z *= scale);
        Ok(())
    }

    /// `U^dag |psi>`.
    pub fn apply_inverse(&self, state: &PureState) -> Result<PureState> {
        check_dim(self.space.dim(), state.space().dim())?;
        let scale = 1.0 / self.space.dim() as f64;
        let mut out = state.clone();
        let buf = out.amplitudes_mut().as_slice_mut().expect("contiguous");
        self.plan.forward(buf);
        buf.iter_mut().zip(self.t_phase.iter()).for_each(|(z, t)| *z *= t.conj());
        self.plan.inverse(buf);
        buf.iter_mut()
            .zip(self.v_phase.iter())
            .for_each(|(z, v)| *z *= v.conj() * scale);
        Ok(out)
    }

    /// `U rho U^dag`.
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let mut out = rho.clone();
        self.conjugate_in_place(&mut out)?;
        Ok(out)
    }

    /// `U rho U^dag` through row transforms and two transposes, `O(N^2 log N)`.
    pub fn conjugate_in_place(&self, rho: &mut DensityMatrix) -> Result<()> {
        let n = self.space.dim();
        check_dim(n, rho.space().dim())?;
        let v = self.v_phase.as_slice().expect("contiguous");
        let t = self.t_phase.as_slice().expect("contiguous");
        let buf = rho.elements_mut().as_slice_mut().expect("standard layout");

        // V rho V^dag
        for (i, row) in buf.chunks_exact_mut(n).enumerate() {
            let vi = v[i];
            row.iter_mut().zip(v).for_each(|(z, vj)| *z *= vi * vj.conj());
        }
        // F (.) F^dag, left transposed: buf[p', p] = N sigma[p, p']
        self.plan.inverse(buf);
        transpose_square(buf, n);
        self.plan.forward(buf);
        // T (.) T^dag in the transposed layout
        for (r, row) in buf.chunks_exact_mut(n).enumerate() {
            let tr = t[r].conj();
            row.iter_mut().zip(t).for_each(|(z, tc)| *z *= tc * tr);
        }
        // F^dag (.) F, which also restores the row/column order
        self.plan.inverse(buf);
        transpose_square(buf, n);
        self.plan.forward(buf);

        let scale = 1.0 / (n as f64 * n as f64);
        buf.iter_mut().for_each(|z| *z *= scale);
        Ok(())
    }

    /// Dense unitary, built column by column from basis states.
    pub fn to_matrix(&self) -> Array2<C64> {
        let n = self.space.dim();
        let mut u = Array2::zeros((n, n));
        for q in 0..n {
            let col = self
                .apply(&PureState::basis(self.space, q).expect("label in range"))
                .expect("same space");
            u.column_mut(q).assign(col.amplitudes());
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{fourier_transform, purity, Direction};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dagger(m: &Array2<C64>) -> Array2<C64> {
        m.t().mapv(|z| z.conj())
    }

    fn max_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// `F^dag T F V` assembled from explicit DFT matrices.
    fn dense_reference(map: &KickedMap) -> Array2<C64> {
        let n = map.space().dim();
        let f = Array2::from_shape_fn((n, n), |(p, q)| {
            C64::from_polar(1.0 / (n as f64).sqrt(), -TAU * ((p * q) % n) as f64 / n as f64)
        });
        let v = Array2::from_diag(map.position_kick());
        let t = Array2::from_diag(map.momentum_kick());
        dagger(&f).dot(&t).dot(&f).dot(&v)
    }

    #[test]
    fn kicks_have_unit_modulus() {
        let map = perturbed_cat_quantum(2, 2, 0.001, TorusSpace::new(800).unwrap());
        for z in map.position_kick().iter().chain(map.momentum_kick().iter()) {
            assert!((z.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cat_is_unitary() {
        for n in [8, 16, 30] {
            let map = perturbed_cat_quantum(2, 2, 0.0, TorusSpace::new(n).unwrap());
            let u = map.to_matrix();
            let eye = Array2::eye(n).mapv(|x: f64| C64::new(x, 0.0));
            assert!(max_diff(&dagger(&u).dot(&u), &eye) < 1e-12);
        }
    }

    #[test]
    fn cat_spectrum_lies_on_unit_circle() {
        let n = 8;
        let u = perturbed_cat_quantum(2, 2, 0.0, TorusSpace::new(n).unwrap()).to_matrix();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let z = u[[i, j]];
            nalgebra::Complex::new(z.re, z.im)
        });
        let eig = nalgebra::linalg::Schur::new(m).eigenvalues().expect("complex Schur form is triangular");
        for z in eig.iter() {
            assert!((z.norm() - 1.0).abs() < 1e-10, "eigenvalue {z}");
        }
    }

    #[test]
    fn fast_application_matches_dense_reference() {
        let n = 32;
        let s = TorusSpace::new(n).unwrap();
        let map = perturbed_cat_quantum(2, 2, 0.01, s);
        let dense = dense_reference(&map);
        assert!(max_diff(&dense, &map.to_matrix()) < 1e-10);
        let psi = PureState::random(s, &mut ChaCha8Rng::seed_from_u64(1));
        let fast = map.apply(&psi).unwrap();
        let slow = dense.dot(psi.amplitudes());
        let err = fast.amplitudes().iter().zip(slow.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn momentum_kick_acts_in_momentum_basis() {
        // With a trivial position kick the map is diagonal in momentum.
        let n = 12;
        let s = TorusSpace::new(n).unwrap();
        let map = perturbed_cat_quantum(0, 1, 0.0, s);
        let psi = PureState::random(s, &mut ChaCha8Rng::seed_from_u64(3));
        let lhs = fourier_transform(&map.apply(&psi).unwrap(), Direction::PositionToMomentum);
        let mom = fourier_transform(&psi, Direction::PositionToMomentum);
        for p in 0..n {
            let expected = mom.amplitudes()[p] * map.momentum_kick()[p];
            assert!((lhs.amplitudes()[p] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugation_matches_dense_and_preserves_purity() {
        let n = 24;
        let s = TorusSpace::new(n).unwrap();
        let map = perturbed_cat_quantum(2, 2, 0.02, s);
        let rho = DensityMatrix::random(s, &mut ChaCha8Rng::seed_from_u64(6));
        let u = map.to_matrix();
        let expected = u.dot(rho.elements()).dot(&dagger(&u));
        let got = map.conjugate(&rho).unwrap();
        assert!(max_diff(got.elements(), &expected) < 1e-10);
        assert!((purity(&got) - purity(&rho)).abs() < 1e-10);
    }

    #[test]
    fn inverse_undoes_forward() {
        let s = TorusSpace::new(50).unwrap();
        let map = perturbed_cat_quantum(2, 2, 0.001, s);
        let psi = PureState::random(s, &mut ChaCha8Rng::seed_from_u64(2));
        let back = map.apply_inverse(&map.apply(&psi).unwrap()).unwrap();
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn large_dimension_preserves_norm() {
        let s = TorusSpace::new(800).unwrap();
        let map = perturbed_cat_quantum(2, 2, 0.001, s);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let psi = PureState::random(s, &mut rng);
            let out = map.apply(&psi).unwrap();
            assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let map = perturbed_cat_quantum(2, 2, 0.0, TorusSpace::new(8).unwrap());
        let psi = PureState::basis(TorusSpace::new(9).unwrap(), 0).unwrap();
        assert!(map.apply(&psi).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn every_map_preserves_norm(n in 2usize..=64, a in 1i64..4, b in 1i64..4, k in 0.0f64..0.05, seed in any::<u64>()) {
            let s = TorusSpace::new(n).unwrap();
            let map = perturbed_cat_quantum(a, b, k, s);
            let psi = PureState::random(s, &mut ChaCha8Rng::seed_from_u64(seed));
            let out = map.apply(&psi).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
