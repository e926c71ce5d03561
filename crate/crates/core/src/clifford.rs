//! Real Clifford algebra `Cl_n` with the convention `e_i e_i = -1`, stored as
//! dense coefficient vectors over the `2^n` blade basis, together with the
//! complex gamma-matrix representation on the spinor space `Δ_n`.
//!
//! Blade `k` is the bitmask of the generators it contains: bit `i` set means
//! `e_{i+1}` is a factor, and factors are written in increasing index order.
//! Generator indices in this API are 0-based (`basis_vector(n, 0)` is `e_1`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest supported algebra dimension.
pub const MAX_DIM: usize = 8;

pub type CMatrix = DMatrix<Complex64>;

/// Sign and resulting blade of the product of two basis blades.
#[inline]
pub fn blade_product(a: usize, b: usize) -> (f64, usize) {
    // Count the transpositions needed to move every factor of `b` past the
    // higher-indexed factors of `a`.
    let mut swaps = 0u32;
    let mut shifted = a >> 1;
    while shifted != 0 {
        swaps += (shifted & b).count_ones();
        shifted >>= 1;
    }
    // Each shared generator squares to -1.
    swaps += (a & b).count_ones();
    let sign = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
    (sign, a ^ b)
}

#[inline]
pub fn blade_grade(blade: usize) -> usize {
    blade.count_ones() as usize
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "algebra dimension must lie in 1..={MAX_DIM}, got {n}"
        )))
    }
}

#[derive(Clone, PartialEq)]
pub struct Multivector {
    n: usize,
    coeffs: Vec<f64>,
}

impl Multivector {
    /// The zero multivector of `Cl_n`.
    ///
    /// Panics when `n` is outside `1..=MAX_DIM`; use [`Multivector::from_coeffs`]
    /// for validated construction.
    pub fn zero(n: usize) -> Self {
        check_dim(n).expect("invalid Clifford algebra dimension");
        Multivector {
            n,
            coeffs: vec![0.0; 1 << n],
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: coeffs.len(),
            });
        }
        Ok(Multivector { n, coeffs })
    }

    pub fn scalar(n: usize, s: f64) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[0] = s;
        m
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// The single basis blade with bitmask `blade`, scaled by `c`.
    pub fn blade(n: usize, blade: usize, c: f64) -> Self {
        let mut m = Self::zero(n);
        assert!(blade < m.coeffs.len(), "blade {blade} out of range for n = {n}");
        m.coeffs[blade] = c;
        m
    }

    /// Generator `e_{i+1}`.
    pub fn basis_vector(n: usize, i: usize) -> Self {
        assert!(i < n, "generator index {i} out of range for n = {n}");
        Self::blade(n, 1 << i, 1.0)
    }

    /// The bivector `e_{a+1} e_{b+1}` for `a != b`, in either order.
    pub fn bivector(n: usize, a: usize, b: usize) -> Self {
        Self::basis_vector(n, a) * Self::basis_vector(n, b)
    }

    /// Grade-1 element with the given components.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        check_dim(v.len())?;
        let mut m = Self::zero(v.len());
        for (i, &x) in v.iter().enumerate() {
            m.coeffs[1 << i] = x;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> f64 {
        self.coeffs[blade]
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Grade-1 components `(c_1, ..., c_n)`.
    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coeffs[1 << i]).collect()
    }

    pub fn clifford_product(&self, other: &Multivector) -> Result<Multivector> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut out = vec![0.0; self.coeffs.len()];
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                let (sign, c) = blade_product(a, b);
                out[c] += sign * ca * cb;
            }
        }
        Ok(Multivector {
            n: self.n,
            coeffs: out,
        })
    }

    /// Reversion: a grade-`k` blade picks up `(-1)^{k(k-1)/2}`.
    pub fn reverse(&self) -> Multivector {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(b, &c)| {
                let k = blade_grade(b);
                if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
                    c
                } else {
                    -c
                }
            })
            .collect();
        Multivector { n: self.n, coeffs }
    }

    pub fn grade_project(&self, k: usize) -> Result<Multivector> {
        if k > self.n {
            return Err(Error::InvalidArgument(format!(
                "grade {k} exceeds algebra dimension {}",
                self.n
            )));
        }
        Ok(self.filter_blades(|b| blade_grade(b) == k))
    }

    pub fn even_part(&self) -> Multivector {
        self.filter_blades(|b| blade_grade(b).is_multiple_of(2))
    }

    pub fn odd_part(&self) -> Multivector {
        self.filter_blades(|b| blade_grade(b) % 2 == 1)
    }

    fn filter_blades(&self, keep: impl Fn(usize) -> bool) -> Multivector {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(b, &c)| if keep(b) { c } else { 0.0 })
            .collect();
        Multivector { n: self.n, coeffs }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Largest coefficient magnitude outside grade `k`.
    pub fn max_abs_outside_grade(&self, k: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(b, _)| blade_grade(*b) != k)
            .fold(0.0, |m, (_, c)| m.max(c.abs()))
    }

    pub fn is_pure_grade(&self, k: usize, tol: f64) -> bool {
        self.max_abs_outside_grade(k) <= tol
    }

    pub fn scale(&self, s: f64) -> Multivector {
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Exponential by Taylor series with scaling and squaring.
    pub fn exp(&self) -> Multivector {
        let norm = self.norm();
        let mut halvings = 0;
        let mut scaled = norm;
        while scaled > 0.5 {
            scaled *= 0.5;
            halvings += 1;
        }
        let x = self.scale(0.5f64.powi(halvings));
        let mut term = Multivector::one(self.n);
        let mut sum = term.clone();
        for k in 1..=30 {
            term = (&term * &x).scale(1.0 / k as f64);
            sum = &sum + &term;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        for _ in 0..halvings {
            sum = &sum * &sum;
        }
        sum
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector(n={}; ", self.n)?;
        let mut first = true;
        for (b, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for i in 0..self.n {
                if b & (1 << i) != 0 {
                    write!(f, "·e{}", i + 1)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl<'a> Mul<&'a Multivector> for &'a Multivector {
    type Output = Multivector;

    /// Panics on dimension mismatch; see [`Multivector::clifford_product`].
    fn mul(self, rhs: &'a Multivector) -> Multivector {
        self.clifford_product(rhs).expect("Clifford product of mismatched algebras")
    }
}

impl Mul for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Multivector) -> Multivector {
        &self * &rhs
    }
}

impl<'a> Add<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn add(self, rhs: &'a Multivector) -> Multivector {
        assert_eq!(self.n, rhs.n, "sum of mismatched algebras");
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &'a Multivector) -> Multivector {
        assert_eq!(self.n, rhs.n, "difference of mismatched algebras");
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        &self - &rhs
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

/// Complex spinor representation of `Cl_n` on `Δ_n = C^{2^{⌊n/2⌋}}`.
///
/// With `k = ⌊n/2⌋` and Pauli matrices `σ1, σ2, σ3`, the Hermitian matrices
///
/// ```text
/// Γ_{2m}   = σ3^{⊗m} ⊗ σ1 ⊗ I^{⊗(k-m-1)}
/// Γ_{2m+1} = σ3^{⊗m} ⊗ σ2 ⊗ I^{⊗(k-m-1)}
/// ```
///
/// square to the identity and anticommute; the generators are `γ_j = i Γ_j`.
/// For even `n` the chirality is `σ3^{⊗k} = i^k γ_1⋯γ_n`. For odd `n` the
/// extra generator is `γ_n = i σ3^{⊗k}` (for `n = 1` this is the 1×1 matrix `i`).
#[derive(Clone, Debug)]
pub struct GammaRep {
    n: usize,
    dim_spinor: usize,
    generators: Vec<CMatrix>,
    chirality: Option<CMatrix>,
    blade_images: Vec<CMatrix>,
}

fn pauli() -> [CMatrix; 3] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors
        .iter()
        .fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

pub fn build_gamma_rep(n: usize) -> Result<GammaRep> {
    check_dim(n)?;
    let k = n / 2;
    let dim = 1usize << k;
    let [s1, s2, s3] = pauli();
    let id2 = CMatrix::identity(2, 2);
    let i = Complex64::new(0.0, 1.0);

    let mut generators = Vec::with_capacity(n);
    for m in 0..k {
        for s in [&s1, &s2] {
            let mut factors = vec![s3.clone(); m];
            factors.push(s.clone());
            factors.extend(std::iter::repeat_n(id2.clone(), k - m - 1));
            generators.push(kron_all(&factors) * i);
        }
    }
    let volume = kron_all(&vec![s3.clone(); k]);
    let chirality = if n.is_multiple_of(2) {
        Some(volume)
    } else {
        generators.push(volume * i);
        None
    };

    let mut blade_images: Vec<CMatrix> = Vec::with_capacity(1 << n);
    blade_images.push(CMatrix::identity(dim, dim));
    for blade in 1usize..(1 << n) {
        let top = usize::BITS as usize - 1 - blade.leading_zeros() as usize;
        let rest = blade & !(1 << top);
        blade_images.push(&blade_images[rest] * &generators[top]);
    }

    Ok(GammaRep {
        n,
        dim_spinor: dim,
        generators,
        chirality,
        blade_images,
    })
}

impl GammaRep {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn dim_spinor(&self) -> usize {
        self.dim_spinor
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    /// `γ_{i+1}`.
    pub fn gamma(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }

    pub fn chirality(&self) -> Option<&CMatrix> {
        self.chirality.as_ref()
    }

    /// Image of a basis blade, `γ_{i_1}⋯γ_{i_k}` in increasing index order.
    pub fn blade_image(&self, blade: usize) -> &CMatrix {
        &self.blade_images[blade]
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim_spinor, self.dim_spinor)
    }

    /// Extends the representation linearly from blades to all of `Cl_n`.
    pub fn apply_rep(&self, a: &Multivector) -> Result<CMatrix> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: a.dim(),
            });
        }
        let mut out = CMatrix::zeros(self.dim_spinor, self.dim_spinor);
        for (b, &c) in a.coeffs().iter().enumerate() {
            if c != 0.0 {
                out += self.blade_images[b].map(|z| z * c);
            }
        }
        Ok(out)
    }

    /// Largest entrywise deviation from `γ_iγ_j + γ_jγ_i = -2δ_ij Id`.
    pub fn clifford_relation_residual(&self) -> f64 {
        let id = self.identity();
        let mut worst: f64 = 0.0;
        for (a, ga) in self.generators.iter().enumerate() {
            for (b, gb) in self.generators.iter().enumerate() {
                let mut anti = ga * gb + gb * ga;
                if a == b {
                    anti += &id * Complex64::new(2.0, 0.0);
                }
                worst = worst.max(max_abs(&anti));
            }
        }
        worst
    }

    /// Dimension of the kernel of the real-linear map from even blades to
    /// matrices. Zero means the representation is faithful on `Cl_n^0`.
    pub fn even_kernel_dimension(&self) -> usize {
        let even: Vec<usize> = (0..1usize << self.n)
            .filter(|b| blade_grade(*b).is_multiple_of(2))
            .collect();
        let rows = 2 * self.dim_spinor * self.dim_spinor;
        let mut stacked = DMatrix::<f64>::zeros(rows, even.len());
        for (col, &b) in even.iter().enumerate() {
            for (r, z) in self.blade_images[b].iter().enumerate() {
                stacked[(2 * r, col)] = z.re;
                stacked[(2 * r + 1, col)] = z.im;
            }
        }
        let rank = stacked.svd(false, false).rank(1e-9);
        even.len() - rank
    }
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
