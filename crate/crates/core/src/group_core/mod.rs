//! H-type group algebra: structure maps, the group law, dilations, the
//! homogeneous norm, bi-radial profiles and numerical group convolution.

mod convolution;
mod profile;

pub use convolution::{convolve_biradial, convolve_biradial_split, haar_polar_integral, Centering};
pub use profile::{log_grid, BiRadial, BiRadialProfile, Decay, DecayKind};

use crate::error::{domain, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// An H-type group N = 𝔳 ⊕ 𝔷 with dim 𝔳 = 2n, dim 𝔷 = m, given by the maps J_k.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupParams {
    n: usize,
    m: usize,
    j: Vec<DMatrix<f64>>,
}

/// Serializable (n, m) summary of a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupShape {
    pub n: usize,
    pub m: usize,
}

impl GroupParams {
    /// Builds a group from user-supplied structure maps, checking skew-symmetry
    /// and J_iJ_j + J_jJ_i = −2δ_ij·Id.
    pub fn new(n: usize, j: Vec<DMatrix<f64>>) -> Result<Self> {
        if n == 0 || j.is_empty() {
            return domain("an H-type group needs n >= 1 and m >= 1");
        }
        let d = 2 * n;
        for (k, jk) in j.iter().enumerate() {
            if jk.nrows() != d || jk.ncols() != d {
                return domain(format!("J_{k} is not {d}x{d}"));
            }
        }
        let g = Self { n, m: j.len(), j };
        let defect = g.structure_defect();
        if defect > 1e-10 {
            return domain(format!("structure maps fail the H-type relations (defect {defect:e})"));
        }
        Ok(g)
    }

    /// ℍⁿ: J(x, y) = (y, −x) on each coordinate pair, so that the center term of
    /// the product is +½ Im v·v̄′.
    pub fn heisenberg(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("heisenberg group needs n >= 1");
        }
        let d = 2 * n;
        let mut j = DMatrix::zeros(d, d);
        for p in 0..n {
            j[(2 * p, 2 * p + 1)] = 1.0;
            j[(2 * p + 1, 2 * p)] = -1.0;
        }
        Self::new(n, vec![j])
    }

    /// Quaternionic-type group on ℝ^{4q}: J_k is left multiplication by the
    /// first `m` imaginary units (m ≤ 3) acting on each quaternion block.
    pub fn quaternionic(q: usize, m: usize) -> Result<Self> {
        if q == 0 || !(1..=3).contains(&m) {
            return domain("quaternionic group needs q >= 1 and 1 <= m <= 3");
        }
        // left multiplication by i, j, k on (a, b, c, d) = a + bi + cj + dk
        let units: [[f64; 16]; 3] = [
            [0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.],
            [0., 0., -1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., -1., 0., 0.],
            [0., 0., 0., -1., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., 0.],
        ];
        let d = 4 * q;
        let j = units[..m]
            .iter()
            .map(|u| {
                let block = DMatrix::from_row_slice(4, 4, u);
                let mut big = DMatrix::zeros(d, d);
                for b in 0..q {
                    big.view_mut((4 * b, 4 * b), (4, 4)).copy_from(&block);
                }
                big
            })
            .collect();
        Self::new(2 * q, j)
    }

    /// Heisenberg group for m = 1, quaternionic-type group for m ∈ {2, 3}
    /// (which needs n even).
    pub fn from_shape(n: usize, m: usize) -> Result<Self> {
        match m {
            1 => Self::heisenberg(n),
            2 | 3 if n % 2 == 0 => Self::quaternionic(n / 2, m),
            _ => domain(format!("no built-in H-type group with n = {n}, m = {m}")),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Homogeneous dimension Q = 2(n+m).
    pub fn q(&self) -> usize {
        2 * (self.n + self.m)
    }

    pub fn j_maps(&self) -> &[DMatrix<f64>] {
        &self.j
    }

    pub fn shape(&self) -> GroupShape {
        GroupShape { n: self.n, m: self.m }
    }

    /// Largest entry of Jᵢᵀ + Jᵢ and of JᵢJⱼ + JⱼJᵢ + 2δᵢⱼ Id.
    pub fn structure_defect(&self) -> f64 {
        let d = 2 * self.n;
        let id = DMatrix::<f64>::identity(d, d);
        let mut worst = 0.0f64;
        for (a, ja) in self.j.iter().enumerate() {
            worst = worst.max((ja.transpose() + ja).amax());
            for (b, jb) in self.j.iter().enumerate() {
                let mut s = ja * jb + jb * ja;
                if a == b {
                    s += &id * 2.0;
                }
                worst = worst.max(s.amax());
            }
        }
        worst
    }

    fn check(&self, x: &Point) {
        assert!(
            x.v.len() == 2 * self.n && x.z.len() == self.m,
            "point of shape ({}, {}) used in group with 2n = {}, m = {}",
            x.v.len(),
            x.z.len(),
            2 * self.n,
            self.m
        );
    }

    /// (⟨J_k v, v′⟩)_k
    pub fn bracket(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        self.j
            .iter()
            .map(|jk| {
                let mut acc = 0.0;
                for a in 0..v.len() {
                    let mut row = 0.0;
                    for b in 0..v.len() {
                        row += jk[(a, b)] * v[b];
                    }
                    acc += row * w[a];
                }
                acc
            })
            .collect()
    }

    /// x·y = (v + v′, z + z′ + ½(⟨J_k v, v′⟩)_k). Panics on shape mismatch.
    pub fn mul(&self, x: &Point, y: &Point) -> Point {
        self.check(x);
        self.check(y);
        let br = self.bracket(&x.v, &y.v);
        Point {
            v: x.v.iter().zip(&y.v).map(|(a, b)| a + b).collect(),
            z: x.z.iter().zip(&y.z).zip(&br).map(|((a, b), c)| a + b + 0.5 * c).collect(),
        }
    }

    pub fn inverse(&self, x: &Point) -> Point {
        self.check(x);
        Point { v: x.v.iter().map(|a| -a).collect(), z: x.z.iter().map(|a| -a).collect() }
    }

    pub fn identity(&self) -> Point {
        Point { v: vec![0.0; 2 * self.n], z: vec![0.0; self.m] }
    }

    /// (|v|⁴ + 16|z|²)^{1/4}
    pub fn norm(&self, x: &Point) -> f64 {
        self.check(x);
        koranyi(x.v_norm(), x.z_norm())
    }

    /// δ_r(v, z) = (r v, r² z)
    pub fn dilate(&self, r: f64, x: &Point) -> Point {
        self.check(x);
        assert!(r > 0.0, "dilation factor must be positive");
        Point { v: x.v.iter().map(|a| r * a).collect(), z: x.z.iter().map(|a| r * r * a).collect() }
    }

    /// Representative point (r e₁, ζ e₁) of the bi-radial class (r, ζ).
    pub fn biradial_point(&self, r: f64, zeta: f64) -> Point {
        let mut v = vec![0.0; 2 * self.n];
        let mut z = vec![0.0; self.m];
        v[0] = r;
        z[0] = zeta;
        Point { v, z }
    }
}

/// Homogeneous norm from |v| and |z|.
pub fn koranyi(r: f64, zeta: f64) -> f64 {
    let r2 = r * r;
    (r2 * r2 + 16.0 * zeta * zeta).sqrt().sqrt()
}

/// Element (v, z) of N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub v: Vec<f64>,
    pub z: Vec<f64>,
}

impl Point {
    pub fn new(v: Vec<f64>, z: Vec<f64>) -> Self {
        assert!(v.iter().chain(&z).all(|a| a.is_finite()), "point coordinates must be finite");
        Self { v, z }
    }

    pub fn v_norm(&self) -> f64 {
        self.v.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn z_norm(&self) -> f64 {
        self.z.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn is_identity(&self) -> bool {
        self.v.iter().chain(&self.z).all(|&a| a == 0.0)
    }
}

/// Free-function forms of the group operations.
pub fn heisenberg(n: usize) -> Result<GroupParams> {
    GroupParams::heisenberg(n)
}

pub fn group_mul(g: &GroupParams, x: &Point, y: &Point) -> Point {
    g.mul(x, y)
}

pub fn homogeneous_norm(g: &GroupParams, x: &Point) -> f64 {
    g.norm(x)
}

pub fn dilate(g: &GroupParams, r: f64, x: &Point) -> Point {
    g.dilate(r, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &Point, b: &Point, tol: f64) -> bool {
        a.v.iter().zip(&b.v).chain(a.z.iter().zip(&b.z)).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn heisenberg_examples() {
        let g = heisenberg(1).unwrap();
        assert_eq!(g.j_maps()[0], DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let p = g.mul(&Point::new(vec![1.0, 0.0], vec![0.0]), &Point::new(vec![0.0, 1.0], vec![0.0]));
        assert_eq!(p, Point::new(vec![1.0, 1.0], vec![-0.5]));
        let g2 = heisenberg(2).unwrap();
        assert_eq!(g2.q(), 6);
        assert!(g2.structure_defect() < 1e-14);
        assert!(heisenberg(0).is_err());
    }

    #[test]
    fn rejects_bad_structure() {
        let j = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]);
        assert!(GroupParams::new(1, vec![j]).is_err());
        let j = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        // two anticommuting complex structures do not exist on ℝ²
        assert!(GroupParams::new(1, vec![j.clone(), j]).is_err());
    }

    #[test]
    fn quaternionic_structure() {
        for m in 1..=3 {
            let g = GroupParams::quaternionic(2, m).unwrap();
            assert_eq!((g.n(), g.m(), g.q()), (4, m, 8 + 2 * m));
            assert!(g.structure_defect() < 1e-14);
        }
        assert!(GroupParams::from_shape(1, 2).is_err());
        assert_eq!(GroupParams::from_shape(2, 3).unwrap().m(), 3);
    }

    #[test]
    fn norm_examples() {
        let g = heisenberg(1).unwrap();
        assert_eq!(g.norm(&g.identity()), 0.0);
        assert!((g.norm(&Point::new(vec![0.6, 0.8], vec![0.0])) - 1.0).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn shape_mismatch_panics() {
        let g = heisenberg(1).unwrap();
        let _ = g.mul(&Point::new(vec![1.0], vec![0.0]), &g.identity());
    }

    fn pt() -> impl Strategy<Value = Point> {
        (prop::collection::vec(-3.0..3.0f64, 4), -3.0..3.0f64).prop_map(|(v, z)| Point::new(v, vec![z]))
    }

    proptest! {
        #[test]
        fn associativity(x in pt(), y in pt(), w in pt()) {
            let g = heisenberg(2).unwrap();
            let a = g.mul(&g.mul(&x, &y), &w);
            let b = g.mul(&x, &g.mul(&y, &w));
            prop_assert!(close(&a, &b, 1e-13));
        }

        #[test]
        fn inverse_and_identity(x in pt()) {
            let g = heisenberg(2).unwrap();
            prop_assert!(close(&g.mul(&x, &g.inverse(&x)), &g.identity(), 1e-15));
            prop_assert_eq!(g.mul(&x, &g.identity()), x);
        }

        #[test]
        fn dilation_laws(x in pt(), y in pt(), r in 0.2..4.0f64) {
            let g = heisenberg(2).unwrap();
            prop_assert!(close(&g.dilate(2.0, &g.dilate(3.0, &x)), &g.dilate(6.0, &x), 1e-12));
            prop_assert!(close(&g.dilate(1.0, &x), &x, 0.0));
            let a = g.dilate(r, &g.mul(&x, &y));
            let b = g.mul(&g.dilate(r, &x), &g.dilate(r, &y));
            prop_assert!(close(&a, &b, 1e-12));
            prop_assert!((g.norm(&g.dilate(2.5, &x)) - 2.5 * g.norm(&x)).abs() < 1e-12 * (1.0 + g.norm(&x)));
        }
    }
}
