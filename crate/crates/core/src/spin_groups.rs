//! The groups `Spin(n)` and `Spin^T(n) = (Spin(n) × S¹ × S¹)/{±1}`, their
//! structure maps, the isomorphism with `Spin^c(n) × S¹`, the Lie algebra
//! maps, and the twisted spinor representation `κ^T`.
//!
//! Classes `[g, z₁, z₂]` are stored through a canonical representative: the
//! first blade coefficient of `g` whose magnitude exceeds
//! [`CANONICAL_THRESHOLD`] is made positive by flipping all three entries.
//! Two classes are then equal exactly when their stored triples agree.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::clifford::{blade_grade, max_abs, CMatrix, GammaRep, Multivector};
use crate::{Error, Result};

pub const CANONICAL_THRESHOLD: f64 = 1e-9;

const UNIT_TOL_VECTOR: f64 = 1e-12;
const UNIT_TOL_PHASE: f64 = 1e-12;
const SPIN_TOL: f64 = 1e-10;

/// Unit element of the even Clifford subalgebra acting on vectors by
/// conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinElement {
    g: Multivector,
}

impl SpinElement {
    /// Validates evenness, `g·reverse(g) = 1`, and that conjugation keeps
    /// vectors in grade 1.
    pub fn new(g: Multivector) -> Result<Self> {
        if g.odd_part().max_abs() > SPIN_TOL {
            return Err(Error::InvalidArgument(
                "spin element has odd-grade components".into(),
            ));
        }
        let n = g.dim();
        let unit = &(&g * &g.reverse()) - &Multivector::one(n);
        if unit.max_abs() > SPIN_TOL {
            return Err(Error::InvalidArgument(format!(
                "spin element is not unit: |g·rev(g) - 1| = {:e}",
                unit.max_abs()
            )));
        }
        let el = SpinElement { g };
        for i in 0..n {
            let image = el.conjugate(&Multivector::basis_vector(n, i));
            if image.max_abs_outside_grade(1) > SPIN_TOL {
                return Err(Error::InvalidArgument(
                    "conjugation does not preserve vectors".into(),
                ));
            }
        }
        Ok(el)
    }

    pub fn identity(n: usize) -> Self {
        SpinElement {
            g: Multivector::one(n),
        }
    }

    /// `exp(ξ)` for a pure bivector `ξ`.
    pub fn exp_bivector(xi: &Multivector) -> Result<Self> {
        if !xi.is_pure_grade(2, 0.0) {
            return Err(Error::InvalidArgument(
                "exponent must be a pure bivector".into(),
            ));
        }
        SpinElement::new(xi.exp())
    }

    pub fn multivector(&self) -> &Multivector {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn mul(&self, other: &SpinElement) -> Result<SpinElement> {
        Ok(SpinElement {
            g: self.g.clifford_product(&other.g)?,
        })
    }

    pub fn inverse(&self) -> SpinElement {
        SpinElement {
            g: self.g.reverse(),
        }
    }

    pub fn negate(&self) -> SpinElement {
        SpinElement { g: -&self.g }
    }

    /// `g v g⁻¹`.
    pub fn conjugate(&self, v: &Multivector) -> Multivector {
        &(&self.g * v) * &self.g.reverse()
    }

    /// The covering map `λ`: column `j` holds the components of `g e_j g⁻¹`.
    pub fn lambda_cover(&self) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let mut r = DMatrix::zeros(n, n);
        for j in 0..n {
            let image = self.conjugate(&Multivector::basis_vector(n, j));
            if image.max_abs_outside_grade(1) > SPIN_TOL {
                return Err(Error::Invariant(
                    "conjugation left grade 1 in lambda_cover".into(),
                ));
            }
            for (i, c) in image.vector_part().into_iter().enumerate() {
                r[(i, j)] = c;
            }
        }
        Ok(r)
    }

    fn canonical_sign(&self) -> f64 {
        self.g
            .coeffs()
            .iter()
            .find(|c| c.abs() > CANONICAL_THRESHOLD)
            .map_or(1.0, |c| c.signum())
    }
}

/// Product `v₁ v₂ ⋯ v_{2m}` of an even number of unit vectors in `ℝⁿ`.
pub fn spin_from_vectors(n: usize, vs: &[Vec<f64>]) -> Result<SpinElement> {
    if !vs.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "spin elements need an even number of vectors, got {}",
            vs.len()
        )));
    }
    let mut g = Multivector::one(n);
    for v in vs {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL_VECTOR {
            return Err(Error::InvalidArgument(format!(
                "vector is not unit: |v| = {norm}"
            )));
        }
        g = &g * &Multivector::from_vector(v)?;
    }
    SpinElement::new(g)
}

fn check_phase(z: Complex64) -> Result<()> {
    if (z.norm() - 1.0).abs() > UNIT_TOL_PHASE {
        Err(Error::InvalidArgument(format!(
            "phase {z} is not of unit modulus"
        )))
    } else {
        Ok(())
    }
}

/// Canonical representative of a class `[g, z₁, z₂]` in `Spin^T(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinTElement {
    g: SpinElement,
    z1: Complex64,
    z2: Complex64,
}

impl SpinTElement {
    pub fn new(g: SpinElement, z1: Complex64, z2: Complex64) -> Result<Self> {
        check_phase(z1)?;
        check_phase(z2)?;
        Ok(Self::canonical(g, z1, z2))
    }

    fn canonical(g: SpinElement, z1: Complex64, z2: Complex64) -> Self {
        if g.canonical_sign() < 0.0 {
            SpinTElement {
                g: g.negate(),
                z1: -z1,
                z2: -z2,
            }
        } else {
            SpinTElement { g, z1, z2 }
        }
    }

    pub fn identity(n: usize) -> Self {
        SpinTElement {
            g: SpinElement::identity(n),
            z1: Complex64::new(1.0, 0.0),
            z2: Complex64::new(1.0, 0.0),
        }
    }

    pub fn spin(&self) -> &SpinElement {
        &self.g
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    pub fn z2(&self) -> Complex64 {
        self.z2
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn mul(&self, other: &SpinTElement) -> Result<SpinTElement> {
        Ok(Self::canonical(
            self.g.mul(&other.g)?,
            self.z1 * other.z1,
            self.z2 * other.z2,
        ))
    }

    pub fn inverse(&self) -> SpinTElement {
        Self::canonical(self.g.inverse(), self.z1.conj(), self.z2.conj())
    }

    /// Largest componentwise deviation between canonical representatives.
    pub fn distance(&self, other: &SpinTElement) -> f64 {
        let dg = (self.g.multivector() - other.g.multivector()).max_abs();
        dg.max((self.z1 - other.z1).norm())
            .max((self.z2 - other.z2).norm())
    }

    pub fn approx_eq(&self, other: &SpinTElement, tol: f64) -> bool {
        self.dim() == other.dim() && self.distance(other) <= tol
    }

    /// `λ^T([g, z₁, z₂]) = λ(g)`.
    pub fn lambda_t(&self) -> Result<DMatrix<f64>> {
        self.g.lambda_cover()
    }

    /// `l([g, z₁, z₂]) = (z₁², z₁z₂)`.
    pub fn map_l(&self) -> (Complex64, Complex64) {
        (self.z1 * self.z1, self.z1 * self.z2)
    }

    /// `p = λ^T × l`.
    pub fn map_p(&self) -> Result<(DMatrix<f64>, Complex64, Complex64)> {
        let (a, b) = self.map_l();
        Ok((self.lambda_t()?, a, b))
    }

    /// When the class lies in the image of `i`, the spin element it comes from.
    pub fn as_spin(&self, tol: f64) -> Option<SpinElement> {
        let one = Complex64::new(1.0, 0.0);
        if (self.z1 - self.z2).norm() > tol {
            return None;
        }
        if (self.z1 - one).norm() <= tol {
            Some(self.g.clone())
        } else if (self.z1 + one).norm() <= tol {
            Some(self.g.negate())
        } else {
            None
        }
    }

    /// `κ^T[g, z₁, z₂] = z₁² z₂ κ(g)`.
    pub fn kappa_t(&self, rep: &GammaRep) -> Result<CMatrix> {
        let phase = self.z1 * self.z1 * self.z2;
        Ok(rep.apply_rep(self.g.multivector())? * phase)
    }

    /// `φ([g, z₁, z₂]) = ([g, z₁], z₁z₂)`.
    pub fn phi(&self) -> (SpinCElement, Complex64) {
        (
            SpinCElement::canonical(self.g.clone(), self.z1),
            self.z1 * self.z2,
        )
    }
}

/// `i(g) = [g, 1, 1]`.
pub fn incl_i(g: &SpinElement) -> SpinTElement {
    let one = Complex64::new(1.0, 0.0);
    SpinTElement::canonical(g.clone(), one, one)
}

/// `j(z₁, z₂) = [1, z₁, z₂]`.
pub fn incl_j(n: usize, z1: Complex64, z2: Complex64) -> Result<SpinTElement> {
    SpinTElement::new(SpinElement::identity(n), z1, z2)
}

/// Canonical representative of a class `[g, z]` in `Spin^c(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinCElement {
    g: SpinElement,
    z: Complex64,
}

impl SpinCElement {
    pub fn new(g: SpinElement, z: Complex64) -> Result<Self> {
        check_phase(z)?;
        Ok(Self::canonical(g, z))
    }

    fn canonical(g: SpinElement, z: Complex64) -> Self {
        if g.canonical_sign() < 0.0 {
            SpinCElement {
                g: g.negate(),
                z: -z,
            }
        } else {
            SpinCElement { g, z }
        }
    }

    pub fn spin(&self) -> &SpinElement {
        &self.g
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn mul(&self, other: &SpinCElement) -> Result<SpinCElement> {
        Ok(Self::canonical(self.g.mul(&other.g)?, self.z * other.z))
    }

    pub fn distance(&self, other: &SpinCElement) -> f64 {
        (self.g.multivector() - other.g.multivector())
            .max_abs()
            .max((self.z - other.z).norm())
    }
}

/// The isomorphism `Spin^T(n) → Spin^c(n) × S¹` applied to a representative.
pub fn phi_iso(
    g: &SpinElement,
    z1: Complex64,
    z2: Complex64,
) -> Result<(SpinCElement, Complex64)> {
    Ok(SpinTElement::new(g.clone(), z1, z2)?.phi())
}

/// Inverse of [`phi_iso`]: `([g, z₁], w) ↦ [g, z₁, w/z₁]`.
pub fn phi_inv(c: &SpinCElement, w: Complex64) -> Result<SpinTElement> {
    check_phase(w)?;
    SpinTElement::new(c.g.clone(), c.z, w / c.z)
}

/// Element `(ξ, λi, μi)` of `𝔰𝔭𝔦𝔫^T(n) = 𝔪₂ ⊕ iℝ ⊕ iℝ`, with `𝔪₂` the span of
/// the bivectors `e_αe_β`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinTLieElement {
    pub xi: Multivector,
    pub lam: f64,
    pub mu: f64,
}

impl SpinTLieElement {
    pub fn new(xi: Multivector, lam: f64, mu: f64) -> Result<Self> {
        if !xi.is_pure_grade(2, 0.0) {
            return Err(Error::InvalidArgument(
                "Lie algebra element must be a pure bivector".into(),
            ));
        }
        Ok(SpinTLieElement { xi, lam, mu })
    }

    /// `t ↦ [exp(tξ), e^{iλt}, e^{iμt}]`.
    pub fn one_parameter(&self, t: f64) -> Result<SpinTElement> {
        SpinTElement::new(
            SpinElement::exp_bivector(&self.xi.scale(t))?,
            Complex64::from_polar(1.0, self.lam * t),
            Complex64::from_polar(1.0, self.mu * t),
        )
    }
}

/// The `so(n)` basis matrix `E_{αβ}`: entry `(α, β)` is −1, `(β, α)` is +1.
pub fn so_basis(n: usize, alpha: usize, beta: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(n, n);
    e[(alpha, beta)] = -1.0;
    e[(beta, alpha)] = 1.0;
    e
}

/// `p_*(e_αe_β, λi, μi) = (2E_{αβ}, 2λi, (λ+μ)i)`, extended linearly.
pub fn lie_p_star(x: &SpinTLieElement) -> Result<(DMatrix<f64>, f64, f64)> {
    if !x.xi.is_pure_grade(2, 0.0) {
        return Err(Error::InvalidArgument(
            "p_* is only defined on bivectors".into(),
        ));
    }
    let n = x.xi.dim();
    let mut m = DMatrix::zeros(n, n);
    for (blade, &c) in x.xi.coeffs().iter().enumerate() {
        if c == 0.0 || blade_grade(blade) != 2 {
            continue;
        }
        let alpha = blade.trailing_zeros() as usize;
        let beta = (blade & !(1 << alpha)).trailing_zeros() as usize;
        m += so_basis(n, alpha, beta) * (2.0 * c);
    }
    Ok((m, 2.0 * x.lam, x.lam + x.mu))
}

/// `p_*⁻¹(E_{αβ}, λi, μi) = (½e_αe_β, ½λi, (μ−½λ)i)`, extended linearly over
/// antisymmetric matrices `Σ_{α<β} c_{αβ} E_{αβ}`.
pub fn lie_p_star_inv(e: &DMatrix<f64>, lam: f64, mu: f64) -> Result<SpinTLieElement> {
    let n = e.nrows();
    if e.ncols() != n {
        return Err(Error::InvalidArgument("so(n) element must be square".into()));
    }
    if (e + e.transpose()).amax() > 0.0 {
        return Err(Error::InvalidArgument(
            "so(n) element must be antisymmetric".into(),
        ));
    }
    let mut xi = Multivector::zero(n);
    for alpha in 0..n {
        for beta in alpha + 1..n {
            let c = e[(beta, alpha)];
            if c != 0.0 {
                xi = &xi + &Multivector::blade(n, (1 << alpha) | (1 << beta), 0.5 * c);
            }
        }
    }
    SpinTLieElement::new(xi, 0.5 * lam, mu - 0.5 * lam)
}

/// `κ^T_{*1}(ξ, λi, μi) = κ(ξ) + (2λ + μ)i Id`.
pub fn kappa_t_star1(x: &SpinTLieElement, rep: &GammaRep) -> Result<CMatrix> {
    let k = rep.apply_rep(&x.xi)?;
    Ok(k + rep.identity() * Complex64::new(0.0, 2.0 * x.lam + x.mu))
}

/// Product of `2m` Gaussian-normalized unit vectors, `m` uniform in `1..=3`.
pub fn random_spin<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SpinElement {
    let m = rng.random_range(1..=3);
    let vs: Vec<Vec<f64>> = (0..2 * m)
        .map(|_| loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-3 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect();
    spin_from_vectors(n, &vs).expect("normalized vectors form a spin element")
}

pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
}

pub fn random_spin_t<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SpinTElement {
    let g = random_spin(rng, n);
    let z1 = random_phase(rng);
    let z2 = random_phase(rng);
    SpinTElement::canonical(g, z1, z2)
}

/// Dimension of `{X : XM = MX for every M}` over the complex matrices.
///
/// Each constraint is vectorized column-major as `(I ⊗ M − Mᵀ ⊗ I) vec X = 0`;
/// the nullity of the stacked system is read off a singular value
/// decomposition with relative threshold `1e-9`.
pub fn commutant_dimension(mats: &[CMatrix]) -> usize {
    let Some(first) = mats.first() else {
        return 0;
    };
    let d = first.nrows();
    let id = CMatrix::identity(d, d);
    let block = d * d;
    let mut stacked = CMatrix::zeros(block * mats.len(), block);
    for (s, m) in mats.iter().enumerate() {
        let op = id.kronecker(m) - m.transpose().kronecker(&id);
        stacked.view_mut((s * block, 0), (block, block)).copy_from(&op);
    }
    let sv = stacked.svd(false, false).singular_values;
    let top = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let rank = sv.iter().filter(|&&s| s > 1e-9 * top.max(1.0)).count();
    block - rank
}

fn sampled_kappa_t(rep: &GammaRep, samples: usize, seed: u64) -> Result<Vec<CMatrix>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| random_spin_t(&mut rng, rep.dim()).kappa_t(rep))
        .collect()
}

const MIN_SAMPLES: usize = 10;

/// Commutant dimension of `κ^T` over sampled group elements; `1` means the
/// representation is irreducible. Requires odd `n`.
pub fn irreducibility_check(rep: &GammaRep, samples: usize, seed: u64) -> Result<usize> {
    if rep.dim().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "irreducibility check needs odd n; use chiral_block_commutants for even n".into(),
        ));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {samples}"
        )));
    }
    Ok(commutant_dimension(&sampled_kappa_t(rep, samples, seed)?))
}

/// Index sets of the `+1` and `−1` chirality eigenspaces. The chirality built
/// by [`crate::clifford::build_gamma_rep`] is diagonal.
pub fn chiral_indices(rep: &GammaRep) -> Result<(Vec<usize>, Vec<usize>)> {
    let chi = rep
        .chirality()
        .ok_or_else(|| Error::InvalidArgument("chirality exists only for even n".into()))?;
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for i in 0..chi.nrows() {
        if chi[(i, i)].re > 0.0 {
            plus.push(i);
        } else {
            minus.push(i);
        }
    }
    Ok((plus, minus))
}

fn restrict(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// Commutant dimensions of `κ^T` restricted to `Δ⁺` and `Δ⁻` (even `n`).
pub fn chiral_block_commutants(
    rep: &GammaRep,
    samples: usize,
    seed: u64,
) -> Result<(usize, usize)> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {samples}"
        )));
    }
    let (plus, minus) = chiral_indices(rep)?;
    let mats = sampled_kappa_t(rep, samples, seed)?;
    let p: Vec<CMatrix> = mats.iter().map(|m| restrict(m, &plus)).collect();
    let q: Vec<CMatrix> = mats.iter().map(|m| restrict(m, &minus)).collect();
    Ok((commutant_dimension(&p), commutant_dimension(&q)))
}

/// Largest `‖χ κ^T(a) − κ^T(a) χ‖` over sampled elements.
pub fn splitting_residual(rep: &GammaRep, samples: usize, seed: u64) -> Result<f64> {
    let chi = rep
        .chirality()
        .ok_or_else(|| Error::InvalidArgument("splitting check needs even n".into()))?;
    if samples == 0 {
        return Err(Error::InvalidArgument("splitting check needs samples".into()));
    }
    let mats = sampled_kappa_t(rep, samples, seed)?;
    Ok(mats
        .iter()
        .map(|m| max_abs(&(chi * m - m * chi)))
        .fold(0.0, f64::max))
}

/// Whether chirality commutes with every sampled `κ^T(a)` to `1e-10`.
pub fn splitting_check(rep: &GammaRep, samples: usize, seed: u64) -> Result<bool> {
    Ok(splitting_residual(rep, samples, seed)? < 1e-10)
}
