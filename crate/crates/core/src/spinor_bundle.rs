//! Spinor fields on a chart: the twisted covariant derivative, Dirac
//! operator, spinor Laplacian and spinor curvature, together with residuals
//! for the identities relating them.
//!
//! Fields are complex vectors whose components are evaluated as pairs of real
//! jets, so `Dψ` carries exact first derivatives and `D²ψ` is obtained by
//! applying the same first-order operator twice. The abelian connections are
//! stored as real coefficient forms `a`, `b` with `A = i·a`, `B = i·b`, and the
//! twist term is `(½A(X) + B(X))ψ`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::clifford::{build_gamma_rep, CMatrix, GammaRep};
use crate::expr::OneForm;
use crate::geometry::{orthonormal_frame, ChartGeometry, CurvatureData, FrameData, TwoForm};
use crate::jets::Jet;
use crate::{Error, Result};

/// A complex number whose real and imaginary parts are jets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CJet {
    pub re: Jet,
    pub im: Jet,
}

impl CJet {
    pub fn new(re: Jet, im: Jet) -> Self {
        CJet { re, im }
    }

    pub fn real(re: Jet) -> Self {
        CJet {
            re,
            im: Jet::constant(0.0),
        }
    }

    pub fn constant(z: Complex64) -> Self {
        CJet::new(Jet::constant(z.re), Jet::constant(z.im))
    }

    pub fn zero() -> Self {
        CJet::constant(Complex64::new(0.0, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn derivative(&self, k: usize) -> CJet {
        CJet::new(self.re.derivative(k), self.im.derivative(k))
    }

    pub fn directional(&self, v: &[Jet]) -> CJet {
        CJet::new(self.re.directional(v), self.im.directional(v))
    }

    /// Multiplication by `i·t` for a real jet `t`.
    pub fn mul_i(&self, t: Jet) -> CJet {
        CJet::new(-(self.im * t), self.re * t)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, o: CJet) -> CJet {
        CJet::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for CJet {
    fn add_assign(&mut self, o: CJet) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl Sub for CJet {
    type Output = CJet;
    fn sub(self, o: CJet) -> CJet {
        CJet::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for CJet {
    type Output = CJet;
    fn neg(self) -> CJet {
        CJet::new(-self.re, -self.im)
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, o: CJet) -> CJet {
        CJet::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Mul<Jet> for CJet {
    type Output = CJet;
    fn mul(self, t: Jet) -> CJet {
        CJet::new(self.re * t, self.im * t)
    }
}

impl Mul<Complex64> for CJet {
    type Output = CJet;
    fn mul(self, z: Complex64) -> CJet {
        CJet::new(self.re * z.re - self.im * z.im, self.re * z.im + self.im * z.re)
    }
}

/// Spinor with jet-valued components.
pub type SpinorJet = Vec<CJet>;

fn spinor_values(psi: &[CJet]) -> Vec<Complex64> {
    psi.iter().map(CJet::value).collect()
}

/// Euclidean norm of a complex vector.
pub fn cnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn cdiff(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn apply_matrix(m: &CMatrix, psi: &[CJet]) -> SpinorJet {
    (0..m.nrows())
        .map(|r| {
            let mut acc = CJet::zero();
            for (c, p) in psi.iter().enumerate() {
                let z = m[(r, c)];
                if z.re != 0.0 || z.im != 0.0 {
                    acc += *p * z;
                }
            }
            acc
        })
        .collect()
}

fn apply_values(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

fn add_into(acc: &mut [CJet], v: &[CJet]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += *b;
    }
}

/// A real scalar function on the chart, evaluated on coordinate jets.
pub trait ScalarField {
    fn eval(&self, x: &[Jet]) -> Jet;
}

/// A `Δ_n`-valued function on the chart, evaluated on coordinate jets.
pub trait SpinorField {
    fn dim_spinor(&self) -> usize;
    fn eval(&self, x: &[Jet]) -> SpinorJet;
}

/// Wraps a closure as a scalar field.
pub struct FnScalar<F>(pub F);

impl<F: Fn(&[Jet]) -> Jet> ScalarField for FnScalar<F> {
    fn eval(&self, x: &[Jet]) -> Jet {
        (self.0)(x)
    }
}

/// Wraps a closure as a spinor field of the given dimension.
pub struct FnSpinor<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[Jet]) -> SpinorJet> SpinorField for FnSpinor<F> {
    fn dim_spinor(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[Jet]) -> SpinorJet {
        (self.f)(x)
    }
}

/// A constant spinor.
#[derive(Clone, Debug)]
pub struct ConstantSpinor(pub Vec<Complex64>);

impl SpinorField for ConstantSpinor {
    fn dim_spinor(&self) -> usize {
        self.0.len()
    }
    fn eval(&self, _x: &[Jet]) -> SpinorJet {
        self.0.iter().map(|&z| CJet::constant(z)).collect()
    }
}

/// `f·ψ` for a scalar field `f` and spinor field `ψ`.
pub struct ScaledSpinor<'a> {
    pub f: &'a dyn ScalarField,
    pub psi: &'a dyn SpinorField,
}

impl SpinorField for ScaledSpinor<'_> {
    fn dim_spinor(&self) -> usize {
        self.psi.dim_spinor()
    }
    fn eval(&self, x: &[Jet]) -> SpinorJet {
        let f = self.f.eval(x);
        self.psi.eval(x).into_iter().map(|p| p * f).collect()
    }
}

/// `M·ψ` for a constant matrix `M`.
pub struct MatrixSpinor<'a> {
    pub m: &'a CMatrix,
    pub psi: &'a dyn SpinorField,
}

impl SpinorField for MatrixSpinor<'_> {
    fn dim_spinor(&self) -> usize {
        self.m.nrows()
    }
    fn eval(&self, x: &[Jet]) -> SpinorJet {
        apply_matrix(self.m, &self.psi.eval(x))
    }
}

/// `ψ + φ`.
pub struct SumSpinor<'a>(pub &'a dyn SpinorField, pub &'a dyn SpinorField);

impl SpinorField for SumSpinor<'_> {
    fn dim_spinor(&self) -> usize {
        self.0.dim_spinor()
    }
    fn eval(&self, x: &[Jet]) -> SpinorJet {
        let mut a = self.0.eval(x);
        add_into(&mut a, &self.1.eval(x));
        a
    }
}

#[derive(Clone, Debug)]
struct TrigTerm {
    freq: Vec<i32>,
    cos: Complex64,
    sin: Complex64,
}

/// Sum of `c·cos(k·x) + d·sin(k·x)` over integer frequency vectors `k`.
#[derive(Clone, Debug)]
pub struct TrigSeries {
    terms: Vec<TrigTerm>,
}

fn unit_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

impl TrigSeries {
    /// Random series in `n` variables with `terms` modes of frequency at most
    /// `max_freq` per axis and coefficients uniform in `[-1, 1] + i[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, terms: usize, max_freq: i32) -> Self {
        let terms = (0..terms)
            .map(|t| TrigTerm {
                freq: if t == 0 {
                    vec![0; n]
                } else {
                    (0..n).map(|_| rng.random_range(-max_freq..=max_freq)).collect()
                },
                cos: unit_complex(rng),
                sin: unit_complex(rng),
            })
            .collect();
        TrigSeries { terms }
    }

    fn eval(&self, x: &[Jet]) -> CJet {
        let mut acc = CJet::zero();
        for t in &self.terms {
            let phase: Jet = t.freq.iter().zip(x).map(|(&k, &xi)| xi * k as f64).sum();
            acc += CJet::real(phase.cos()) * CJet::constant(t.cos);
            acc += CJet::real(phase.sin()) * CJet::constant(t.sin);
        }
        acc
    }
}

/// Spinor field with an independent random trigonometric series per component.
#[derive(Clone, Debug)]
pub struct TrigSpinor {
    components: Vec<TrigSeries>,
}

impl TrigSpinor {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, dim_spinor: usize) -> Self {
        TrigSpinor {
            components: (0..dim_spinor).map(|_| TrigSeries::random(rng, n, 4, 2)).collect(),
        }
    }
}

impl SpinorField for TrigSpinor {
    fn dim_spinor(&self) -> usize {
        self.components.len()
    }
    fn eval(&self, x: &[Jet]) -> SpinorJet {
        self.components.iter().map(|c| c.eval(x)).collect()
    }
}

/// Real trigonometric scalar field.
#[derive(Clone, Debug)]
pub struct TrigScalar(TrigSeries);

impl TrigScalar {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        TrigScalar(TrigSeries::random(rng, n, 4, 2))
    }
}

impl ScalarField for TrigScalar {
    fn eval(&self, x: &[Jet]) -> Jet {
        self.0.eval(x).re
    }
}

/// Real trigonometric vector field, components in the coordinate basis.
#[derive(Clone, Debug)]
pub struct TrigVector(Vec<TrigSeries>);

impl TrigVector {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        TrigVector((0..n).map(|_| TrigSeries::random(rng, n, 3, 1)).collect())
    }

    pub fn components(&self, x: &[Jet]) -> Vec<Jet> {
        self.0.iter().map(|c| c.eval(x).re).collect()
    }
}

/// Random complex polynomial of total degree at most 3 per component.
#[derive(Clone, Debug)]
pub struct PolySpinor {
    components: Vec<Vec<(Vec<u32>, Complex64)>>,
}

impl PolySpinor {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, dim_spinor: usize) -> Self {
        let mut monomials = vec![vec![]];
        for _ in 0..n {
            monomials = monomials
                .into_iter()
                .flat_map(|m: Vec<u32>| {
                    (0..=3).map(move |e| {
                        let mut m = m.clone();
                        m.push(e);
                        m
                    })
                })
                .filter(|m| m.iter().sum::<u32>() <= 3)
                .collect();
        }
        let components = (0..dim_spinor)
            .map(|_| monomials.iter().map(|m| (m.clone(), unit_complex(rng))).collect())
            .collect();
        PolySpinor { components }
    }
}

impl SpinorField for PolySpinor {
    fn dim_spinor(&self) -> usize {
        self.components.len()
    }
    fn eval(&self, x: &[Jet]) -> SpinorJet {
        self.components
            .iter()
            .map(|terms| {
                let mut acc = CJet::zero();
                for (exps, c) in terms {
                    let mono = exps
                        .iter()
                        .zip(x)
                        .fold(Jet::constant(1.0), |m, (&e, &xi)| m * xi.powi(e as i32));
                    acc += CJet::real(mono) * *c;
                }
                acc
            })
            .collect()
    }
}

/// The pair of imaginary-valued 1-forms `(A, B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionPair {
    pub a: OneForm,
    pub b: OneForm,
}

impl ConnectionPair {
    pub fn new(a: OneForm, b: OneForm) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        Ok(ConnectionPair { a, b })
    }

    pub fn zero(n: usize) -> Self {
        ConnectionPair {
            a: OneForm::zero(n),
            b: OneForm::zero(n),
        }
    }

    pub fn parse(a: &str, b: &str, n: usize) -> Result<Self> {
        Self::new(OneForm::parse(a, n)?, OneForm::parse(b, n)?)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

/// A vector field for the operators below.
pub enum VectorField<'a> {
    /// The orthonormal frame vector `e_i`.
    Frame(usize),
    /// The coordinate vector `∂_k`.
    Coordinate(usize),
    /// Coordinate components as functions of the chart coordinates.
    Components(&'a dyn Fn(&[Jet]) -> Vec<Jet>),
}

/// Everything needed to evaluate spinor operators at one point.
pub struct SpinorGeometry {
    frame: FrameData,
    curvature: CurvatureData,
    rep: GammaRep,
    /// `γ_iγ_j` for `i < j`, with the index pair.
    bivectors: Vec<(usize, usize, CMatrix)>,
    a: Vec<Jet>,
    b: Vec<Jet>,
    da: TwoForm,
    db: TwoForm,
}

impl SpinorGeometry {
    pub fn at(chart: &ChartGeometry, conn: &ConnectionPair, x: &[f64]) -> Result<Self> {
        let rep = build_gamma_rep(chart.dim())?;
        Self::with_rep(chart, conn, rep, x)
    }

    pub fn with_rep(chart: &ChartGeometry, conn: &ConnectionPair, rep: GammaRep, x: &[f64]) -> Result<Self> {
        let n = chart.dim();
        if conn.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: conn.dim(),
            });
        }
        if rep.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rep.dim(),
            });
        }
        let frame = orthonormal_frame(chart, x)?;
        let a = conn.a.coefficients(frame.coords());
        let b = conn.b.coefficients(frame.coords());
        if a.iter().chain(&b).any(|c| !c.is_finite()) {
            return Err(Error::Evaluation(format!("non-finite connection form at {x:?}")));
        }
        let da = frame.exterior_derivative(&a);
        let db = frame.exterior_derivative(&b);
        let curvature = frame.curvature();
        let mut bivectors = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                bivectors.push((i, j, rep.gamma(i) * rep.gamma(j)));
            }
        }
        Ok(SpinorGeometry {
            frame,
            curvature,
            rep,
            bivectors,
            a,
            b,
            da,
            db,
        })
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn frame(&self) -> &FrameData {
        &self.frame
    }

    pub fn curvature(&self) -> &CurvatureData {
        &self.curvature
    }

    pub fn rep(&self) -> &GammaRep {
        &self.rep
    }

    pub fn da(&self) -> &TwoForm {
        &self.da
    }

    pub fn db(&self) -> &TwoForm {
        &self.db
    }

    /// Coordinate components of a vector field as jets.
    pub fn vector(&self, v: &VectorField<'_>) -> Vec<Jet> {
        let n = self.dim();
        match v {
            VectorField::Frame(i) => self.frame.frame_vector(*i).to_vec(),
            VectorField::Coordinate(k) => (0..n)
                .map(|a| Jet::constant(if a == *k { 1.0 } else { 0.0 }))
                .collect(),
            VectorField::Components(f) => f(self.frame.coords()),
        }
    }

    /// Frame components `e^k(X)` at the point.
    pub fn frame_components(&self, x: &[Jet]) -> Vec<f64> {
        (0..self.dim()).map(|k| self.frame.frame_component(x, k).value()).collect()
    }

    pub fn eval_field(&self, psi: &dyn SpinorField) -> Result<SpinorJet> {
        if psi.dim_spinor() != self.rep.dim_spinor() {
            return Err(Error::DimensionMismatch {
                expected: self.rep.dim_spinor(),
                got: psi.dim_spinor(),
            });
        }
        let v = psi.eval(self.frame.coords());
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Evaluation(format!(
                "non-finite spinor at {:?}",
                self.frame.point()
            )));
        }
        Ok(v)
    }

    /// `∇̃_Zψ = dψ(Z) + ½Σ_{i<j} ω_ij(Z)γ_iγ_jψ + i(½a(Z) + b(Z))ψ`; the result
    /// has one jet order less than `psi`.
    pub fn nabla(&self, z: &[Jet], psi: &[CJet]) -> SpinorJet {
        let n = self.dim();
        let mut out: SpinorJet = psi.iter().map(|p| p.directional(z)).collect();
        for (i, j, gij) in &self.bivectors {
            let w = self.frame.omega_along(z, *i, *j) * 0.5;
            let term = apply_matrix(gij, psi);
            for (o, t) in out.iter_mut().zip(term) {
                *o += t * w;
            }
        }
        let twist: Jet = (0..n).map(|m| (self.a[m] * 0.5 + self.b[m]) * z[m]).sum();
        for (o, p) in out.iter_mut().zip(psi) {
            *o += p.mul_i(twist);
        }
        out
    }

    /// `Σ_k γ_k·∇̃_{e_k}ψ`.
    pub fn dirac_jet(&self, psi: &[CJet]) -> SpinorJet {
        let mut out = vec![CJet::zero(); psi.len()];
        for k in 0..self.dim() {
            let dk = self.nabla(self.frame.frame_vector(k), psi);
            add_into(&mut out, &apply_matrix(self.rep.gamma(k), &dk));
        }
        out
    }

    /// `−Σ_i (∇̃_{e_i}∇̃_{e_i}ψ + div(e_i)∇̃_{e_i}ψ)`.
    pub fn laplacian_jet(&self, psi: &[CJet]) -> SpinorJet {
        let mut out = vec![CJet::zero(); psi.len()];
        for i in 0..self.dim() {
            let ei = self.frame.frame_vector(i);
            let first = self.nabla(ei, psi);
            let second = self.nabla(ei, &first);
            let div = self.frame.divergence(i);
            for ((o, s), f) in out.iter_mut().zip(second).zip(&first) {
                *o += -(s + *f * div);
            }
        }
        out
    }

    /// `∇̃_X∇̃_Yψ − ∇̃_Y∇̃_Xψ − ∇̃_{[X,Y]}ψ` with the bracket from jet derivatives.
    pub fn curvature_commutator(&self, x: &[Jet], y: &[Jet], psi: &[CJet]) -> Vec<Complex64> {
        let xy = self.nabla(x, &self.nabla(y, psi));
        let yx = self.nabla(y, &self.nabla(x, psi));
        let bracket: Vec<Jet> = (0..self.dim())
            .map(|m| y[m].directional(x) - x[m].directional(y))
            .collect();
        let lie = self.nabla(&bracket, psi);
        (0..psi.len())
            .map(|r| xy[r].value() - yx[r].value() - lie[r].value())
            .collect()
    }

    /// `½Σ_{i<j} Ω_ij(X,Y)γ_iγ_jψ + (½dA + dB)(X,Y)ψ` for frame components `x`, `y`.
    pub fn curvature_closed_form(&self, x: &[f64], y: &[f64], psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (i, j, gij) in &self.bivectors {
            let mut w = 0.0;
            for k in 0..n {
                for l in 0..n {
                    w += x[k] * y[l] * self.curvature.omega2(*i, *j, k, l);
                }
            }
            for (o, t) in out.iter_mut().zip(apply_values(gij, psi)) {
                *o += t * (0.5 * w);
            }
        }
        let mut f = 0.0;
        for k in 0..n {
            for l in 0..n {
                f += x[k] * y[l] * (0.5 * self.da.frame[(k, l)] + self.db.frame[(k, l)]);
            }
        }
        for (o, p) in out.iter_mut().zip(psi) {
            *o += p * Complex64::new(0.0, f);
        }
        out
    }

    /// Clifford action of a real 1-form given by frame components, times `c`.
    pub fn one_form_action(&self, beta: &[f64], c: Complex64, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (k, bk) in beta.iter().enumerate() {
            for (o, t) in out.iter_mut().zip(apply_values(self.rep.gamma(k), psi)) {
                *o += t * c * *bk;
            }
        }
        out
    }

    /// Clifford action `Σ_{k<l} F_kl γ_kγ_l` of a real 2-form, times `c`.
    pub fn two_form_action(&self, f: &DMatrix<f64>, c: Complex64, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (k, l, gkl) in &self.bivectors {
            let fkl = f[(*k, *l)];
            if fkl == 0.0 {
                continue;
            }
            for (o, t) in out.iter_mut().zip(apply_values(gkl, psi)) {
                *o += t * c * fkl;
            }
        }
        out
    }

    /// `(½dA + dB)·ψ`, with `dA = i·da` and `dB = i·db`.
    pub fn twist_curvature_action(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let f = &self.da.frame * 0.5 + &self.db.frame;
        self.two_form_action(&f, Complex64::new(0.0, 1.0), psi)
    }
}

fn resolve<'a>(sg: &SpinorGeometry, v: &VectorField<'a>) -> Result<Vec<Jet>> {
    let n = sg.dim();
    match v {
        VectorField::Frame(i) | VectorField::Coordinate(i) if *i >= n => Err(Error::InvalidArgument(
            format!("vector index {i} out of range for dimension {n}"),
        )),
        _ => {
            let z = sg.vector(v);
            if z.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: z.len(),
                });
            }
            Ok(z)
        }
    }
}

pub fn covariant_derivative(
    psi: &dyn SpinorField,
    conn: &ConnectionPair,
    chart: &ChartGeometry,
    v: &VectorField<'_>,
    x: &[f64],
) -> Result<Vec<Complex64>> {
    let sg = SpinorGeometry::at(chart, conn, x)?;
    let z = resolve(&sg, v)?;
    let p = sg.eval_field(psi)?;
    Ok(spinor_values(&sg.nabla(&z, &p)))
}

pub fn dirac(psi: &dyn SpinorField, conn: &ConnectionPair, chart: &ChartGeometry, x: &[f64]) -> Result<Vec<Complex64>> {
    let sg = SpinorGeometry::at(chart, conn, x)?;
    let p = sg.eval_field(psi)?;
    Ok(spinor_values(&sg.dirac_jet(&p)))
}

pub fn dirac_squared(
    psi: &dyn SpinorField,
    conn: &ConnectionPair,
    chart: &ChartGeometry,
    x: &[f64],
) -> Result<Vec<Complex64>> {
    let sg = SpinorGeometry::at(chart, conn, x)?;
    let p = sg.eval_field(psi)?;
    Ok(spinor_values(&sg.dirac_jet(&sg.dirac_jet(&p))))
}

pub fn laplacian(psi: &dyn SpinorField, conn: &ConnectionPair, chart: &ChartGeometry, x: &[f64]) -> Result<Vec<Complex64>> {
    let sg = SpinorGeometry::at(chart, conn, x)?;
    let p = sg.eval_field(psi)?;
    Ok(spinor_values(&sg.laplacian_jet(&p)))
}

/// Both evaluations of `R^𝕊(X,Y)ψ` at a point.
#[derive(Clone, Debug)]
pub struct SpinorCurvature {
    pub commutator: Vec<Complex64>,
    pub closed_form: Vec<Complex64>,
}

impl SpinorCurvature {
    pub fn discrepancy(&self) -> f64 {
        cnorm(&cdiff(&self.commutator, &self.closed_form))
    }
}

pub fn spinor_curvature(
    psi: &dyn SpinorField,
    conn: &ConnectionPair,
    chart: &ChartGeometry,
    xv: &VectorField<'_>,
    yv: &VectorField<'_>,
    x: &[f64],
) -> Result<SpinorCurvature> {
    let sg = SpinorGeometry::at(chart, conn, x)?;
    let (xj, yj) = (resolve(&sg, xv)?, resolve(&sg, yv)?);
    let p = sg.eval_field(psi)?;
    let commutator = sg.curvature_commutator(&xj, &yj, &p);
    let closed_form = sg.curvature_closed_form(
        &sg.frame_components(&xj),
        &sg.frame_components(&yj),
        &spinor_values(&p),
    );
    Ok(SpinorCurvature {
        commutator,
        closed_form,
    })
}

/// `‖Σ_α e_α·R^𝕊(X,e_α)ψ + ½Ric(X)·ψ − ½(X⌟dA)·ψ − (X⌟dB)·ψ‖`, with the
/// curvature taken from the commutator definition. Also returns the norm of
/// the larger side for relative reporting.
pub fn ricci_identity_residual(
    psi: &dyn SpinorField,
    conn: &ConnectionPair,
    chart: &ChartGeometry,
    xv: &VectorField<'_>,
    x: &[f64],
) -> Result<(f64, f64)> {
    let sg = SpinorGeometry::at(chart, conn, x)?;
    let xj = resolve(&sg, xv)?;
    let p = sg.eval_field(psi)?;
    Ok(sg.ricci_identity(&xj, &p))
}

impl SpinorGeometry {
    /// Residual and scale of the contracted curvature identity for `X`.
    pub fn ricci_identity(&self, xj: &[Jet], p: &[CJet]) -> (f64, f64) {
        let n = self.dim();
        let pv = spinor_values(p);
        let mut lhs = vec![Complex64::new(0.0, 0.0); pv.len()];
        for alpha in 0..n {
            let r = self.curvature_commutator(xj, self.frame.frame_vector(alpha), p);
            for (l, t) in lhs.iter_mut().zip(apply_values(self.rep.gamma(alpha), &r)) {
                *l += t;
            }
        }
        let xf = self.frame_components(xj);
        let ric: Vec<f64> = (0..n)
            .map(|l| (0..n).map(|k| xf[k] * self.curvature.ricci[(k, l)]).sum())
            .collect();
        let ia = self.da.interior(&xf);
        let ib = self.db.interior(&xf);
        let twist: Vec<f64> = ia.iter().zip(&ib).map(|(a, b)| 0.5 * a + b).collect();
        let ric_term = self.one_form_action(&ric, Complex64::new(-0.5, 0.0), &pv);
        let twist_term = self.one_form_action(&twist, Complex64::new(0.0, 1.0), &pv);
        let rhs: Vec<Complex64> = ric_term.iter().zip(&twist_term).map(|(a, b)| a + b).collect();
        let scale = cnorm(&lhs).max(cnorm(&ric_term)).max(cnorm(&twist_term));
        (cnorm(&cdiff(&lhs, &rhs)), scale)
    }

    /// The four terms of the Schrödinger–Lichnerowicz identity.
    pub fn sl_terms(&self, p: &[CJet]) -> SlTerms {
        let pv = spinor_values(p);
        let d2 = spinor_values(&self.dirac_jet(&self.dirac_jet(p)));
        let lap = spinor_values(&self.laplacian_jet(p));
        let s4 = pv.iter().map(|z| z * (self.curvature.scalar / 4.0)).collect();
        let twist = self.twist_curvature_action(&pv);
        SlTerms {
            dirac_squared: d2,
            laplacian: lap,
            scalar_term: s4,
            twist_term: twist,
        }
    }

    /// `D(fψ) − grad f·ψ − f·Dψ`.
    pub fn leibniz(&self, f: &Jet, p: &[CJet]) -> (f64, f64) {
        let fp: SpinorJet = p.iter().map(|c| *c * *f).collect();
        let lhs = spinor_values(&self.dirac_jet(&fp));
        let grad: Vec<f64> = (0..self.dim())
            .map(|k| f.directional(self.frame.frame_vector(k)).value())
            .collect();
        let pv = spinor_values(p);
        let g = self.one_form_action(&grad, Complex64::new(1.0, 0.0), &pv);
        let fd: Vec<Complex64> = spinor_values(&self.dirac_jet(p))
            .into_iter()
            .map(|z| z * f.value())
            .collect();
        let resid: Vec<Complex64> = (0..lhs.len()).map(|r| lhs[r] - g[r] - fd[r]).collect();
        let scale = cnorm(&lhs).max(cnorm(&g)).max(cnorm(&fd));
        (cnorm(&resid), scale)
    }

    /// `χ(Dψ) + D(χψ)` for even dimension; `None` when there is no chirality.
    pub fn chirality_anticommutator(&self, p: &[CJet]) -> Option<(f64, f64)> {
        let chi = self.rep.chirality()?;
        let a = spinor_values(&apply_matrix(chi, &self.dirac_jet(p)));
        let b = spinor_values(&self.dirac_jet(&apply_matrix(chi, p)));
        let sum: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        Some((cnorm(&sum), cnorm(&a).max(cnorm(&b))))
    }
}

/// Values of `D²ψ`, `Δψ`, `(s/4)ψ` and `(½dA + dB)·ψ` at a point.
#[derive(Clone, Debug)]
pub struct SlTerms {
    pub dirac_squared: Vec<Complex64>,
    pub laplacian: Vec<Complex64>,
    pub scalar_term: Vec<Complex64>,
    pub twist_term: Vec<Complex64>,
}

impl SlTerms {
    pub fn residual(&self) -> f64 {
        let r: Vec<Complex64> = (0..self.dirac_squared.len())
            .map(|i| self.dirac_squared[i] - self.laplacian[i] - self.scalar_term[i] - self.twist_term[i])
            .collect();
        cnorm(&r)
    }

    pub fn scale(&self) -> f64 {
        [
            &self.dirac_squared,
            &self.laplacian,
            &self.scalar_term,
            &self.twist_term,
        ]
        .iter()
        .map(|v| cnorm(v))
        .fold(0.0, f64::max)
    }
}

/// `(‖D²ψ − Δψ − (s/4)ψ − ½dA·ψ − dB·ψ‖, max term norm)`.
pub fn sl_residual(psi: &dyn SpinorField, conn: &ConnectionPair, chart: &ChartGeometry, x: &[f64]) -> Result<(f64, f64)> {
    let sg = SpinorGeometry::at(chart, conn, x)?;
    let p = sg.eval_field(psi)?;
    let terms = sg.sl_terms(&p);
    Ok((terms.residual(), terms.scale()))
}

/// `(‖D(fψ) − grad f·ψ − f·Dψ‖, max term norm)`.
pub fn leibniz_residual(
    f: &dyn ScalarField,
    psi: &dyn SpinorField,
    conn: &ConnectionPair,
    chart: &ChartGeometry,
    x: &[f64],
) -> Result<(f64, f64)> {
    let sg = SpinorGeometry::at(chart, conn, x)?;
    let p = sg.eval_field(psi)?;
    let fj = f.eval(sg.frame().coords());
    Ok(sg.leibniz(&fj, &p))
}
