//! Riemannian geometry on a single coordinate chart.
//!
//! Everything is evaluated pointwise in jet arithmetic: the metric as an
//! order-2 jet, the Gram–Schmidt frame and its dual coframe likewise, and the
//! connection coefficients `ω_ij(e_k) = g(∇_{e_k} e_i, e_j)` as order-1 jets so
//! the curvature can be assembled from their exact first derivatives.
//!
//! Conventions:
//! - `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}` and
//!   `R_klij = Ω_ij(e_k, e_l) = g(R(e_k,e_l)e_i, e_j)`.
//! - `Ric_kl = Σ_α R_{α k l α}`, `s = Σ_k Ric_kk`; the round sphere has `s > 0`.
//! - `div(e_i) = Σ_j g(∇_{e_j} e_i, e_j) = Σ_j ω_ij(e_j)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

use crate::expr::{Expr, OneForm};
use crate::jets::{Jet, Scalar, MAX_CHART_DIM};
use crate::{Error, Result};

/// The metric families available without a config file.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricKind {
    /// Euclidean `δ_ab`.
    Flat,
    /// Round sphere of radius `r`, spherical chart `(θ, φ)`.
    Sphere2 { radius: f64 },
    /// Round 3-sphere of radius `r`, hyperspherical chart `(χ, θ, φ)`.
    Sphere3 { radius: f64 },
    /// Conformally flat `λ² δ_ab` with `λ = 2/(1 + |x|²)`: the unit sphere in
    /// stereographic coordinates.
    ConformalDisk,
    /// Components given as expressions in the chart coordinates.
    User(Vec<Vec<Expr>>),
}

#[derive(Clone, Debug)]
pub struct ChartGeometry {
    name: String,
    n: usize,
    domain: Vec<(f64, f64)>,
    periodic: bool,
    kind: MetricKind,
}

const SPHERE_CLIP: f64 = 0.2;

fn check_chart_dim(n: usize) -> Result<()> {
    if (1..=MAX_CHART_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "chart dimension must lie in 1..={MAX_CHART_DIM}, got {n}"
        )))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

impl ChartGeometry {
    pub fn flat(n: usize) -> Result<Self> {
        check_chart_dim(n)?;
        Ok(ChartGeometry {
            name: format!("flat:n={n}"),
            n,
            domain: vec![(-2.0, 2.0); n],
            periodic: false,
            kind: MetricKind::Flat,
        })
    }

    /// Flat metric on the periodic box `[0, 2π)ⁿ`.
    pub fn torus(n: usize) -> Result<Self> {
        check_chart_dim(n)?;
        Ok(ChartGeometry {
            name: format!("torus:n={n}"),
            n,
            domain: vec![(0.0, 2.0 * PI); n],
            periodic: true,
            kind: MetricKind::Flat,
        })
    }

    pub fn sphere2(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(ChartGeometry {
            name: format!("s2:r={radius}"),
            n: 2,
            domain: vec![(SPHERE_CLIP, PI - SPHERE_CLIP), (-PI, PI)],
            periodic: false,
            kind: MetricKind::Sphere2 { radius },
        })
    }

    pub fn sphere3(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(ChartGeometry {
            name: format!("s3:r={radius}"),
            n: 3,
            domain: vec![
                (SPHERE_CLIP, PI - SPHERE_CLIP),
                (SPHERE_CLIP, PI - SPHERE_CLIP),
                (-PI, PI),
            ],
            periodic: false,
            kind: MetricKind::Sphere3 { radius },
        })
    }

    pub fn conformal_disk(n: usize) -> Result<Self> {
        check_chart_dim(n)?;
        Ok(ChartGeometry {
            name: format!("disk:n={n}"),
            n,
            domain: vec![(-1.0, 1.0); n],
            periodic: false,
            kind: MetricKind::ConformalDisk,
        })
    }

    /// A metric given by component expressions over a coordinate box.
    pub fn user(name: &str, domain: Vec<(f64, f64)>, components: Vec<Vec<Expr>>) -> Result<Self> {
        let n = domain.len();
        check_chart_dim(n)?;
        if components.len() != n || components.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "metric must be a {n}x{n} matrix of expressions"
            )));
        }
        for a in 0..n {
            for b in 0..a {
                if components[a][b].source() != components[b][a].source() {
                    return Err(Error::InvalidArgument(format!(
                        "metric components ({},{}) and ({},{}) differ",
                        a + 1,
                        b + 1,
                        b + 1,
                        a + 1
                    )));
                }
            }
        }
        if domain.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidArgument("empty coordinate interval".into()));
        }
        Ok(ChartGeometry {
            name: name.to_string(),
            n,
            domain,
            periodic: false,
            kind: MetricKind::User(components),
        })
    }

    /// Built-in chart from an identifier such as `s2:r=1`, `flat:n=3`,
    /// `torus:n=2`, `s3:r=2` or `disk:n=2`.
    pub fn from_id(id: &str) -> Result<Self> {
        let (family, params) = match id.split_once(':') {
            Some((f, p)) => (f.trim(), p.trim()),
            None => (id.trim(), ""),
        };
        let mut n: Option<usize> = None;
        let mut r: Option<f64> = None;
        for kv in params.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("malformed manifold parameter '{kv}'")))?;
            match k.trim() {
                "n" => {
                    n = Some(v.trim().parse().map_err(|_| {
                        Error::Config(format!("invalid dimension '{v}'"))
                    })?)
                }
                "r" => {
                    r = Some(v.trim().parse().map_err(|_| {
                        Error::Config(format!("invalid radius '{v}'"))
                    })?)
                }
                other => return Err(Error::Config(format!("unknown manifold parameter '{other}'"))),
            }
        }
        let chart = match family {
            "flat" => Self::flat(n.unwrap_or(2)),
            "torus" => Self::torus(n.unwrap_or(2)),
            "disk" => Self::conformal_disk(n.unwrap_or(2)),
            "s2" => Self::sphere2(r.unwrap_or(1.0)),
            "s3" => Self::sphere3(r.unwrap_or(1.0)),
            other => return Err(Error::Config(format!("unknown manifold '{other}'"))),
        };
        chart.map_err(|e| Error::Config(e.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    /// Closed-form scalar curvature, where the family has one.
    pub fn known_scalar_curvature(&self) -> Option<f64> {
        let n = self.n as f64;
        match self.kind {
            MetricKind::Flat => Some(0.0),
            MetricKind::Sphere2 { radius } => Some(2.0 / (radius * radius)),
            MetricKind::Sphere3 { radius } => Some(6.0 / (radius * radius)),
            MetricKind::ConformalDisk => Some(n * (n - 1.0)),
            MetricKind::User(_) => None,
        }
    }

    /// Metric components `g_ab(x)`.
    pub fn metric<S: Scalar>(&self, x: &[S]) -> Vec<Vec<S>> {
        let n = self.n;
        let zero = S::from_f64(0.0);
        let diag = |d: Vec<S>| -> Vec<Vec<S>> {
            (0..n)
                .map(|a| (0..n).map(|b| if a == b { d[a] } else { zero }).collect())
                .collect()
        };
        match &self.kind {
            MetricKind::Flat => diag(vec![S::from_f64(1.0); n]),
            MetricKind::Sphere2 { radius } => {
                let r2 = radius * radius;
                let s = x[0].sin();
                diag(vec![S::from_f64(r2), s * s * r2])
            }
            MetricKind::Sphere3 { radius } => {
                let r2 = radius * radius;
                let (s1, s2) = (x[0].sin(), x[1].sin());
                diag(vec![S::from_f64(r2), s1 * s1 * r2, s1 * s1 * s2 * s2 * r2])
            }
            MetricKind::ConformalDisk => {
                let r2 = x.iter().fold(zero, |acc, &xi| acc + xi * xi);
                let lam = S::from_f64(2.0) / (r2 + 1.0);
                diag(vec![lam * lam; n])
            }
            MetricKind::User(c) => c
                .iter()
                .map(|row| row.iter().map(|e| e.eval(x)).collect())
                .collect(),
        }
    }

    /// Maps `x` into the chart (wrapping periodic coordinates) or rejects it.
    pub fn normalize_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut out = x.to_vec();
        for (xi, &(lo, hi)) in out.iter_mut().zip(&self.domain) {
            if self.periodic {
                *xi = lo + (*xi - lo).rem_euclid(hi - lo);
            } else if !(*xi > lo && *xi < hi) {
                return Err(Error::OutOfDomain { point: x.to_vec() });
            }
        }
        Ok(out)
    }

    /// Uniform sample from the box, shrunk by `margin` (a fraction of each
    /// side) away from non-periodic boundaries.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, margin: f64) -> Vec<f64> {
        self.domain
            .iter()
            .map(|&(lo, hi)| {
                let pad = if self.periodic { 0.0 } else { margin * (hi - lo) };
                rng.random_range(lo + pad..hi - pad)
            })
            .collect()
    }
}

fn inner(g: &[Vec<Jet>], u: &[Jet], w: &[Jet]) -> Jet {
    let mut acc = Jet::constant(0.0);
    for (a, ua) in u.iter().enumerate() {
        for (b, wb) in w.iter().enumerate() {
            acc += *ua * g[a][b] * *wb;
        }
    }
    acc
}

/// Orthonormal frame, coframe and Levi-Civita coefficients at a point.
#[derive(Clone, Debug)]
pub struct FrameData {
    n: usize,
    point: Vec<f64>,
    coords: Vec<Jet>,
    metric: Vec<Vec<Jet>>,
    /// `frame[i][a]`: component `a` of `e_i` in the coordinate basis.
    frame: Vec<Vec<Jet>>,
    /// `coframe[i][a]`: component `a` of the dual covector `e^i`.
    coframe: Vec<Vec<Jet>>,
    /// `brackets[a][b][c] = g([e_a, e_b], e_c)`.
    brackets: Vec<Vec<Vec<Jet>>>,
    /// `omega[k][i][j] = ω_ij(e_k)`.
    omega: Vec<Vec<Vec<Jet>>>,
}

/// Gram–Schmidt on the coordinate basis in index order, evaluated with jets.
pub fn orthonormal_frame(chart: &ChartGeometry, x: &[f64]) -> Result<FrameData> {
    let point = chart.normalize_point(x)?;
    let n = chart.dim();
    let coords = Jet::seed(&point)?;
    let metric = chart.metric(&coords);

    let mut scale: f64 = 0.0;
    for row in &metric {
        for g in row {
            if !g.is_finite() {
                return Err(Error::Evaluation(format!("non-finite metric at {point:?}")));
            }
            scale = scale.max(g.value().abs());
        }
    }
    for a in 0..n {
        for b in 0..a {
            if (metric[a][b].value() - metric[b][a].value()).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::InvalidArgument(format!("metric is not symmetric at {point:?}")));
            }
        }
    }

    let mut frame: Vec<Vec<Jet>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: Vec<Jet> = (0..n)
            .map(|a| Jet::constant(if a == i { 1.0 } else { 0.0 }))
            .collect();
        for e in &frame {
            let proj = inner(&metric, &v, e);
            for (va, ea) in v.iter_mut().zip(e) {
                *va -= proj * *ea;
            }
        }
        let norm2 = inner(&metric, &v, &v);
        if !(norm2.value() > 1e-10 * scale.max(1.0)) {
            return Err(Error::NotPositiveDefinite { point });
        }
        let inv = norm2.sqrt().recip();
        frame.push(v.into_iter().map(|va| va * inv).collect());
    }

    let coframe: Vec<Vec<Jet>> = frame
        .iter()
        .map(|e| {
            (0..n)
                .map(|a| (0..n).map(|b| e[b] * metric[b][a]).sum())
                .collect()
        })
        .collect();

    // [e_a, e_b]^μ = e_a(e_b^μ) − e_b(e_a^μ)
    let mut brackets = vec![vec![vec![Jet::constant(0.0); n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let comm: Vec<Jet> = (0..n)
                .map(|mu| frame[b][mu].directional(&frame[a]) - frame[a][mu].directional(&frame[b]))
                .collect();
            for c in 0..n {
                brackets[a][b][c] = (0..n).map(|mu| coframe[c][mu] * comm[mu]).sum();
            }
        }
    }

    // Koszul formula in an orthonormal frame.
    let mut omega = vec![vec![vec![Jet::constant(0.0); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                omega[k][i][j] =
                    (brackets[k][i][j] - brackets[i][j][k] + brackets[j][k][i]) * 0.5;
            }
        }
    }

    Ok(FrameData {
        n,
        point,
        coords,
        metric,
        frame,
        coframe,
        brackets,
        omega,
    })
}

/// `ω_ij(e_k)` at `x`, indexed `[k][i][j]`.
pub fn levi_civita_omega(chart: &ChartGeometry, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let fd = orthonormal_frame(chart, x)?;
    Ok(fd
        .omega
        .iter()
        .map(|m| m.iter().map(|r| r.iter().map(Jet::value).collect()).collect())
        .collect())
}

pub fn div_frame(chart: &ChartGeometry, x: &[f64], i: usize) -> Result<f64> {
    let fd = orthonormal_frame(chart, x)?;
    if i >= fd.n {
        return Err(Error::InvalidArgument(format!("frame index {i} out of range")));
    }
    Ok(fd.divergence(i).value())
}

impl FrameData {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    /// Coordinate seeds at the point; field definitions evaluated on these
    /// carry exact first and second derivatives.
    pub fn coords(&self) -> &[Jet] {
        &self.coords
    }

    pub fn metric_jets(&self) -> &[Vec<Jet>] {
        &self.metric
    }

    /// Coordinate components of `e_i`.
    pub fn frame_vector(&self, i: usize) -> &[Jet] {
        &self.frame[i]
    }

    /// Coordinate components of the covector `e^i`.
    pub fn coframe_covector(&self, i: usize) -> &[Jet] {
        &self.coframe[i]
    }

    /// Frame as a matrix whose column `i` holds `e_i`.
    pub fn frame_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |a, i| self.frame[i][a].value())
    }

    pub fn metric_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |a, b| self.metric[a][b].value())
    }

    /// `ω_ij(e_k)` as an order-1 jet.
    pub fn omega(&self, k: usize, i: usize, j: usize) -> Jet {
        self.omega[k][i][j]
    }

    /// `ω_ij(X)` for a vector field with coordinate components `x`.
    pub fn omega_along(&self, x: &[Jet], i: usize, j: usize) -> Jet {
        (0..self.n)
            .map(|k| self.frame_component(x, k) * self.omega[k][i][j])
            .sum()
    }

    /// `g([e_a, e_b], e_c)`.
    pub fn bracket(&self, a: usize, b: usize, c: usize) -> Jet {
        self.brackets[a][b][c]
    }

    /// `e^k(X)`: frame component of a vector field given in coordinates.
    pub fn frame_component(&self, x: &[Jet], k: usize) -> Jet {
        self.coframe[k].iter().zip(x).map(|(t, v)| *t * *v).sum()
    }

    /// `div(e_i) = Σ_j ω_ij(e_j)`.
    pub fn divergence(&self, i: usize) -> Jet {
        (0..self.n).map(|j| self.omega[j][i][j]).sum()
    }

    /// Largest `|g(e_i, e_j) − δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let gij = inner(&self.metric, &self.frame[i], &self.frame[j]).value();
                worst = worst.max((gij - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// Largest `|ω_ij(e_k) + ω_ji(e_k)|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    worst = worst.max((self.omega[k][i][j].value() + self.omega[k][j][i].value()).abs());
                }
            }
        }
        worst
    }

    /// Largest coordinate component of `∇_{e_k}e_i − ∇_{e_i}e_k − [e_k, e_i]`,
    /// with the bracket taken directly from frame derivatives.
    pub fn torsion_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for mu in 0..n {
                    let lie = self.frame[i][mu].directional(&self.frame[k]).value()
                        - self.frame[k][mu].directional(&self.frame[i]).value();
                    let cov: f64 = (0..n)
                        .map(|j| {
                            (self.omega[k][i][j].value() - self.omega[i][k][j].value())
                                * self.frame[j][mu].value()
                        })
                        .sum();
                    worst = worst.max((cov - lie).abs());
                }
            }
        }
        worst
    }

    /// Curvature components in the orthonormal frame.
    pub fn curvature(&self) -> CurvatureData {
        let n = self.n;
        let mut r = vec![0.0; n * n * n * n];
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = self.omega[l][i][j].directional(&self.frame[k]).value()
                            - self.omega[k][i][j].directional(&self.frame[l]).value();
                        for m in 0..n {
                            v -= self.brackets[k][l][m].value() * self.omega[m][i][j].value();
                            v += self.omega[l][i][m].value() * self.omega[k][m][j].value()
                                - self.omega[k][i][m].value() * self.omega[l][m][j].value();
                        }
                        r[((k * n + l) * n + i) * n + j] = v;
                    }
                }
            }
        }
        let ricci = DMatrix::from_fn(n, n, |k, l| {
            (0..n).map(|a| r[((a * n + k) * n + l) * n + a]).sum()
        });
        let scalar = ricci.trace();
        CurvatureData {
            n,
            riemann: r,
            ricci,
            scalar,
        }
    }

    /// Exterior derivative of a 1-form with coefficients `α_a` (jets of order
    /// at least 1 evaluated on [`FrameData::coords`]).
    pub fn exterior_derivative(&self, alpha: &[Jet]) -> TwoForm {
        let n = self.n;
        let coord = DMatrix::from_fn(n, n, |k, l| alpha[l].partial(k) - alpha[k].partial(l));
        let frame = DMatrix::from_fn(n, n, |i, j| {
            let mut v = 0.0;
            for k in 0..n {
                for l in 0..n {
                    v += self.frame[i][k].value() * self.frame[j][l].value() * coord[(k, l)];
                }
            }
            v
        });
        TwoForm { coord, frame }
    }
}

/// A 2-form as antisymmetric component matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    /// `(dα)(∂_k, ∂_l)`.
    pub coord: DMatrix<f64>,
    /// `(dα)(e_i, e_j)`.
    pub frame: DMatrix<f64>,
}

impl TwoForm {
    pub fn zero(n: usize) -> Self {
        TwoForm {
            coord: DMatrix::zeros(n, n),
            frame: DMatrix::zeros(n, n),
        }
    }

    /// Frame components of `X⌟ω = ω(X, ·)` for `X` given in frame components.
    pub fn interior(&self, x_frame: &[f64]) -> Vec<f64> {
        let n = self.frame.nrows();
        (0..n)
            .map(|j| (0..n).map(|i| x_frame[i] * self.frame[(i, j)]).sum())
            .collect()
    }
}

/// `dα` for a connection form `i Σ a_k dx^k`, returned as the real
/// coefficients of `i·dα`.
pub fn exterior_derivative_1form(form: &OneForm, chart: &ChartGeometry, x: &[f64]) -> Result<TwoForm> {
    if form.dim() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            got: form.dim(),
        });
    }
    let fd = orthonormal_frame(chart, x)?;
    let coeffs = form.coefficients(fd.coords());
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Evaluation(format!("non-finite 1-form at {x:?}")));
    }
    Ok(fd.exterior_derivative(&coeffs))
}

/// Riemann, Ricci and scalar curvature in the orthonormal frame.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    n: usize,
    riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl CurvatureData {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `R_klij = g(R(e_k, e_l)e_i, e_j)`.
    pub fn r(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.riemann[((k * n + l) * n + i) * n + j]
    }

    /// `Ω_ij(e_k, e_l)`; identical to [`CurvatureData::r`] with `(k, l, i, j)`.
    pub fn omega2(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r(k, l, i, j)
    }

    pub fn max_abs(&self) -> f64 {
        self.riemann.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest violation of the antisymmetries, pair symmetry and the first
    /// Bianchi identity.
    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        let n = self.n;
        let mut out = SymmetryResiduals::default();
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let v = self.r(k, l, i, j);
                        out.antisym_kl = out.antisym_kl.max((v + self.r(l, k, i, j)).abs());
                        out.antisym_ij = out.antisym_ij.max((v + self.r(k, l, j, i)).abs());
                        out.pair = out.pair.max((v - self.r(i, j, k, l)).abs());
                        let cyc = v + self.r(l, i, k, j) + self.r(i, k, l, j);
                        out.bianchi = out.bianchi.max(cyc.abs());
                    }
                }
            }
        }
        out.ricci_symmetry = (&self.ricci - self.ricci.transpose()).amax();
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryResiduals {
    pub antisym_kl: f64,
    pub antisym_ij: f64,
    pub pair: f64,
    pub bianchi: f64,
    pub ricci_symmetry: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.antisym_kl
            .max(self.antisym_ij)
            .max(self.pair)
            .max(self.bianchi)
            .max(self.ricci_symmetry)
    }
}

pub fn curvature(chart: &ChartGeometry, x: &[f64]) -> Result<CurvatureData> {
    Ok(orthonormal_frame(chart, x)?.curvature())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn euclidean_frame_is_coordinate_basis() {
        let chart = ChartGeometry::flat(3).unwrap();
        let fd = orthonormal_frame(&chart, &[0.1, -0.3, 0.7]).unwrap();
        assert_eq!(fd.frame_matrix(), DMatrix::identity(3, 3));
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(fd.omega(k, i, j).value(), 0.0);
                }
            }
        }
    }

    #[test]
    fn sphere_frame_by_hand() {
        let chart = ChartGeometry::sphere2(1.0).unwrap();
        let theta = FRAC_PI_3;
        let fd = orthonormal_frame(&chart, &[theta, 0.4]).unwrap();
        let e = fd.frame_matrix();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 / theta.sin()]);
        assert!((e - expected).amax() < 1e-15);
    }

    #[test]
    fn conformal_frame_by_hand() {
        let chart = ChartGeometry::conformal_disk(2).unwrap();
        let x = [0.3, -0.5];
        let lam = 2.0 / (1.0 + 0.09 + 0.25);
        let fd = orthonormal_frame(&chart, &x).unwrap();
        let expected = DMatrix::identity(2, 2) / lam;
        assert!((fd.frame_matrix() - expected).amax() < 1e-15);
    }

    #[test]
    fn sphere_connection_and_divergence() {
        let chart = ChartGeometry::sphere2(1.0).unwrap();
        for theta in [std::f64::consts::FRAC_PI_4, FRAC_PI_3] {
            let w = levi_civita_omega(&chart, &[theta, 0.0]).unwrap();
            // ∇_{e2} e1 = cot θ e2
            assert!((w[1][0][1] - 1.0 / theta.tan()).abs() < 1e-14);
            assert!((w[1][1][0] + 1.0 / theta.tan()).abs() < 1e-14);
            assert!(w[0][0][1].abs() < 1e-14);
        }
        let d = div_frame(&chart, &[std::f64::consts::FRAC_PI_4, 0.0], 0).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        assert!(div_frame(&chart, &[1.0, 0.0], 1).unwrap().abs() < 1e-14);
    }

    #[test]
    fn flat_divergence_vanishes() {
        let chart = ChartGeometry::flat(2).unwrap();
        for i in 0..2 {
            assert_eq!(div_frame(&chart, &[0.2, 0.3], i).unwrap(), 0.0);
        }
    }

    #[test]
    fn frame_invariants_on_builtins() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for id in ["flat:n=2", "flat:n=4", "torus:n=2", "s2:r=1", "s3:r=2", "disk:n=2", "disk:n=3"] {
            let chart = ChartGeometry::from_id(id).unwrap();
            for _ in 0..20 {
                let x = chart.sample_point(&mut rng, 0.05);
                let fd = orthonormal_frame(&chart, &x).unwrap();
                assert!(fd.orthonormality_residual() < 1e-10, "{id}");
                assert_eq!(fd.antisymmetry_residual(), 0.0, "{id}");
                assert!(fd.torsion_residual() < 1e-8, "{id}");
                let curv = fd.curvature();
                assert!(curv.symmetry_residuals().max() < 1e-8, "{id}");
                assert!(fd.frame_matrix().determinant() > 0.0);
            }
        }
    }

    #[test]
    fn scalar_curvature_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for r in [0.5, 1.0, 2.0] {
            for chart in [ChartGeometry::sphere2(r).unwrap(), ChartGeometry::sphere3(r).unwrap()] {
                let n = chart.dim() as f64;
                for _ in 0..20 {
                    let x = chart.sample_point(&mut rng, 0.0);
                    let s = curvature(&chart, &x).unwrap().scalar;
                    assert!((s - n * (n - 1.0) / (r * r)).abs() < 1e-8, "{} {s}", chart.name());
                }
            }
        }
        let flat = ChartGeometry::torus(2).unwrap();
        let c = curvature(&flat, &[1.0, 2.0]).unwrap();
        assert_eq!(c.max_abs(), 0.0);
        assert_eq!(c.scalar, 0.0);
    }

    #[test]
    fn sphere_sectional_curvature_sign() {
        let chart = ChartGeometry::sphere2(1.0).unwrap();
        let c = curvature(&chart, &[1.1, 0.3]).unwrap();
        // K = g(R(e1,e2)e2, e1) = R_1221 = 1, hence Ω_12(e1,e2) = R_1212 = -1.
        assert!((c.r(0, 1, 1, 0) - 1.0).abs() < 1e-12);
        assert!((c.omega2(0, 1, 0, 1) + 1.0).abs() < 1e-12);
        assert!((c.ricci[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exterior_derivative_examples() {
        let chart = ChartGeometry::flat(2).unwrap();
        let a = OneForm::parse("i*x dy", 2).unwrap();
        let d = exterior_derivative_1form(&a, &chart, &[0.3, 0.4]).unwrap();
        assert_eq!(d.coord, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));

        let df = OneForm::parse("cos(x)cos(y) dx - sin(x)sin(y) dy", 2).unwrap();
        let d = exterior_derivative_1form(&df, &chart, &[0.3, -1.2]).unwrap();
        assert!(d.coord.amax() < 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = OneForm::parse("i(x^2 dy + y dx)", 2).unwrap();
        for _ in 0..10 {
            let p = chart.sample_point(&mut rng, 0.0);
            let d = exterior_derivative_1form(&b, &chart, &p).unwrap();
            assert!((d.coord[(0, 1)] - (2.0 * p[0] - 1.0)).abs() < 1e-14);
            assert!((d.coord[(1, 0)] + (2.0 * p[0] - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn d_squared_vanishes_via_jets() {
        let chart = ChartGeometry::sphere2(1.3).unwrap();
        let fd = orthonormal_frame(&chart, &[0.8, 0.1]).unwrap();
        let x = fd.coords();
        let f = x[0].sin() * x[1].cos() * (x[0] * x[1]).exp();
        let df: Vec<Jet> = (0..2).map(|k| f.derivative(k)).collect();
        let dd = fd.exterior_derivative(&df);
        assert!(dd.coord.amax() < 1e-12);
        assert!(dd.frame.amax() < 1e-12);
    }

    #[test]
    fn domain_policy() {
        let chart = ChartGeometry::sphere2(1.0).unwrap();
        assert!(matches!(
            orthonormal_frame(&chart, &[0.1, 0.0]),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(orthonormal_frame(&chart, &[1.0]).is_err());
        let torus = ChartGeometry::torus(2).unwrap();
        let fd = orthonormal_frame(&torus, &[7.0, -1.0]).unwrap();
        assert!((fd.point()[0] - (7.0 - 2.0 * PI)).abs() < 1e-15);
        assert!((fd.point()[1] - (2.0 * PI - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn identifiers_and_user_metrics() {
        assert_eq!(ChartGeometry::from_id("s3:r=2").unwrap().known_scalar_curvature(), Some(1.5));
        assert_eq!(ChartGeometry::from_id("flat:n=3").unwrap().dim(), 3);
        assert!(ChartGeometry::from_id("klein:n=2").is_err());
        assert!(ChartGeometry::from_id("s2:r=-1").is_err());
        assert!(ChartGeometry::from_id("flat:n=7").is_err());
        assert!(ChartGeometry::from_id("s2:q=1").is_err());

        let e = |s: &str| Expr::parse(s, 2).unwrap();
        let user = ChartGeometry::user(
            "round",
            vec![(0.2, 2.9), (-3.0, 3.0)],
            vec![vec![e("4"), e("0")], vec![e("0"), e("4 sin(x1)^2")]],
        )
        .unwrap();
        let s = curvature(&user, &[1.0, 0.5]).unwrap().scalar;
        assert!((s - 0.5).abs() < 1e-12);

        let asym = ChartGeometry::user(
            "bad",
            vec![(0.0, 1.0), (0.0, 1.0)],
            vec![vec![e("1"), e("x1")], vec![e("0"), e("1")]],
        );
        assert!(asym.is_err());
        let indefinite = ChartGeometry::user(
            "lorentz",
            vec![(0.0, 1.0), (0.0, 1.0)],
            vec![vec![e("-1"), e("0")], vec![e("0"), e("1")]],
        )
        .unwrap();
        assert!(matches!(
            orthonormal_frame(&indefinite, &[0.5, 0.5]),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
