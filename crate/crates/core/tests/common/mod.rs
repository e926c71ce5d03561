//! Independent oracles shared by the integration tests.
//!
//! None of these go through the library's blade tables, frame connection
//! coefficients or exterior derivative; they recompute the same quantities
//! from textbook coordinate formulas.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use spint::clifford::{CMatrix, GammaRep};
use spint::expr::OneForm;
use spint::geometry::{ChartGeometry, FrameData};
use spint::jets::Jet;

// ---------------------------------------------------------------------------
// Clifford algebra

/// Product of two basis blades given as increasing index lists, by bubble
/// sorting the concatenation and cancelling `e_i e_i = -1`.
pub fn blade_product_oracle(a: &[usize], b: &[usize]) -> (f64, Vec<usize>) {
    let mut word: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut sign = 1.0;
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < word.len() {
            if word[i] > word[i + 1] {
                word.swap(i, i + 1);
                sign = -sign;
                changed = true;
                i += 1;
            } else if word[i] == word[i + 1] {
                word.drain(i..i + 2);
                sign = -sign;
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            return (sign, word);
        }
    }
}

pub fn mask_to_indices(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn indices_to_mask(idx: &[usize]) -> usize {
    idx.iter().fold(0, |m, i| m | (1 << i))
}

/// Dense Clifford product of coefficient vectors indexed by blade bitmask.
pub fn clifford_product_oracle(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for (ma, ca) in a.iter().enumerate() {
        if *ca == 0.0 {
            continue;
        }
        for (mb, cb) in b.iter().enumerate() {
            if *cb == 0.0 {
                continue;
            }
            let (s, w) = blade_product_oracle(&mask_to_indices(ma), &mask_to_indices(mb));
            out[indices_to_mask(&w)] += s * ca * cb;
        }
    }
    out
}

/// Representation of a multivector built directly from generator products.
pub fn rep_oracle(rep: &GammaRep, coeffs: &[f64]) -> CMatrix {
    let d = rep.dim_spinor();
    let mut out = CMatrix::zeros(d, d);
    for (mask, c) in coeffs.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        let mut m = CMatrix::identity(d, d);
        for i in mask_to_indices(mask) {
            m *= rep.gamma(i);
        }
        out += m * Complex64::new(*c, 0.0);
    }
    out
}

/// `R_{v₁}⋯R_{v_k}` with `R_v = I − 2vvᵀ`.
pub fn reflection_product(vs: &[Vec<f64>]) -> DMatrix<f64> {
    let n = vs[0].len();
    let mut m = DMatrix::identity(n, n);
    for v in vs {
        let v = nalgebra::DVector::from_column_slice(v);
        m *= DMatrix::identity(n, n) - &v * v.transpose() * 2.0;
    }
    m
}

pub fn cmax(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Commutant dimension from the eigenvalues of the Hermitian Gram matrix
/// `Σ Lᴴ L`, `L = I ⊗ M − Mᵀ ⊗ I`.
pub fn commutant_dimension_oracle(mats: &[CMatrix]) -> usize {
    let d = mats[0].nrows();
    let id = CMatrix::identity(d, d);
    let mut gram = CMatrix::zeros(d * d, d * d);
    for m in mats {
        let l = id.kronecker(m) - m.transpose().kronecker(&id);
        gram += l.adjoint() * l;
    }
    let eig = gram.symmetric_eigen().eigenvalues;
    let top = eig.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    eig.iter().filter(|e| e.abs() <= 1e-9 * top.max(1.0)).count()
}

// ---------------------------------------------------------------------------
// Coordinate geometry

fn jet_inverse(m: &[Vec<Jet>]) -> Vec<Vec<Jet>> {
    let n = m.len();
    let mut a: Vec<Vec<Jet>> = m.to_vec();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| Jet::constant(if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    for c in 0..n {
        let p = a[c][c];
        for j in 0..n {
            a[c][j] = a[c][j] / p;
            inv[c][j] = inv[c][j] / p;
        }
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = a[r][c];
            for j in 0..n {
                a[r][j] = a[r][j] - f * a[c][j];
                inv[r][j] = inv[r][j] - f * inv[c][j];
            }
        }
    }
    inv
}

fn jet_det(m: &[Vec<Jet>]) -> Jet {
    let n = m.len();
    let mut a: Vec<Vec<Jet>> = m.to_vec();
    let mut det = Jet::constant(1.0);
    for c in 0..n {
        let p = a[c][c];
        det *= p;
        for r in c + 1..n {
            let f = a[r][c] / p;
            for j in c..n {
                a[r][j] = a[r][j] - f * a[c][j];
            }
        }
    }
    det
}

/// Levi-Civita data in coordinates, from Christoffel symbols.
pub struct CoordinateOracle {
    pub n: usize,
    pub coords: Vec<Jet>,
    pub g: Vec<Vec<Jet>>,
    pub ginv: Vec<Vec<Jet>>,
    /// `gamma[m][a][b] = Γ^m_ab`.
    pub gamma: Vec<Vec<Vec<Jet>>>,
    /// `riemann[m][a][b][c]`: `R(∂_a, ∂_b)∂_c = R^m_abc ∂_m`.
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    /// `Ric_bc = Σ_a R^a_abc`.
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

pub fn coordinate_oracle(chart: &ChartGeometry, x: &[f64]) -> CoordinateOracle {
    let n = chart.dim();
    let coords = Jet::seed(x).unwrap();
    let g = chart.metric(&coords);
    let ginv = jet_inverse(&g);
    let mut gamma = vec![vec![vec![Jet::constant(0.0); n]; n]; n];
    for m in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut acc = Jet::constant(0.0);
                for l in 0..n {
                    let t = g[b][l].derivative(a) + g[a][l].derivative(b) - g[a][b].derivative(l);
                    acc += ginv[m][l] * t;
                }
                gamma[m][a][b] = acc * 0.5;
            }
        }
    }
    let mut riemann = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for m in 0..n {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut v = gamma[m][b][c].partial(a) - gamma[m][a][c].partial(b);
                    for e in 0..n {
                        v += gamma[m][a][e].value() * gamma[e][b][c].value()
                            - gamma[m][b][e].value() * gamma[e][a][c].value();
                    }
                    riemann[m][a][b][c] = v;
                }
            }
        }
    }
    let ricci = DMatrix::from_fn(n, n, |b, c| (0..n).map(|a| riemann[a][a][b][c]).sum());
    let mut scalar = 0.0;
    for b in 0..n {
        for c in 0..n {
            scalar += ginv[b][c].value() * ricci[(b, c)];
        }
    }
    CoordinateOracle {
        n,
        coords,
        g,
        ginv,
        gamma,
        riemann,
        ricci,
        scalar,
    }
}

impl CoordinateOracle {
    pub fn metric_value(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |a, b| self.g[a][b].value())
    }

    /// `g(R(u, v)w, z)` for coordinate vectors.
    pub fn r4(&self, u: &[f64], v: &[f64], w: &[f64], z: &[f64]) -> f64 {
        let n = self.n;
        let mut out = 0.0;
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let r = self.riemann[m][a][b][c];
                        if r == 0.0 {
                            continue;
                        }
                        for d in 0..n {
                            out += u[a] * v[b] * w[c] * z[d] * self.g[m][d].value() * r;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn ricci_of(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut out = 0.0;
        for b in 0..self.n {
            for c in 0..self.n {
                out += u[b] * v[c] * self.ricci[(b, c)];
            }
        }
        out
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut out = 0.0;
        for a in 0..self.n {
            for b in 0..self.n {
                out += u[a] * self.g[a][b].value() * v[b];
            }
        }
        out
    }

    /// `g(∇_X Y, Z)` for jet vector fields `X`, `Y` and a value vector `Z`.
    pub fn covariant_inner(&self, x: &[Jet], y: &[Jet], z: &[f64]) -> f64 {
        let n = self.n;
        let nabla: Vec<f64> = (0..n)
            .map(|m| {
                let mut v = 0.0;
                for a in 0..n {
                    v += x[a].value() * y[m].partial(a);
                    for b in 0..n {
                        v += self.gamma[m][a][b].value() * x[a].value() * y[b].value();
                    }
                }
                v
            })
            .collect();
        self.inner(&nabla, z)
    }

    /// `(1/√det g) ∂_k(√det g X^k)`.
    pub fn divergence(&self, x: &[Jet]) -> f64 {
        let vol = jet_det(&self.g).sqrt();
        let mut acc = 0.0;
        for k in 0..self.n {
            acc += (vol * x[k]).partial(k);
        }
        acc / vol.value()
    }

    /// Coordinate components of the gradient of a scalar jet.
    pub fn gradient(&self, f: &Jet) -> Vec<f64> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.ginv[a][b].value() * f.partial(b)).sum())
            .collect()
    }
}

/// Frame vectors from the library as plain coordinate values, `[i][a]`.
pub fn frame_values(fd: &FrameData) -> Vec<Vec<f64>> {
    (0..fd.dim())
        .map(|i| fd.frame_vector(i).iter().map(Jet::value).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Exterior derivative by finite differences

/// `∂_k a_l − ∂_l a_k` from a fourth-order central-difference stencil.
pub fn exterior_derivative_fd(form: &OneForm, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let h = 1e-3;
    let coeff = |p: &[f64]| form.coefficients::<f64>(p);
    let mut partial = DMatrix::zeros(n, n); // [k][l] = ∂_k a_l
    for k in 0..n {
        let shifted = |t: f64| {
            let mut p = x.to_vec();
            p[k] += t;
            coeff(&p)
        };
        let (p1, m1, p2, m2) = (shifted(h), shifted(-h), shifted(2.0 * h), shifted(-2.0 * h));
        for l in 0..n {
            partial[(k, l)] = (8.0 * (p1[l] - m1[l]) - (p2[l] - m2[l])) / (12.0 * h);
        }
    }
    &partial - partial.transpose()
}

/// Frame components `F(e_i, e_j)` of a coordinate 2-form.
pub fn to_frame(f: &DMatrix<f64>, frame: &[Vec<f64>]) -> DMatrix<f64> {
    let n = frame.len();
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = 0.0;
        for k in 0..n {
            for l in 0..n {
                v += frame[i][k] * frame[j][l] * f[(k, l)];
            }
        }
        v
    })
}

// ---------------------------------------------------------------------------
// Spinor algebra on plain values

pub fn apply(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Complex64], c: Complex64) -> Vec<Complex64> {
    a.iter().map(|x| x * c).collect()
}

/// `Σ_k β_k γ_k v` for frame components `β`.
pub fn vector_action(rep: &GammaRep, beta: &[f64], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (k, b) in beta.iter().enumerate() {
        out = add(&out, &scale(&apply(rep.gamma(k), v), Complex64::new(*b, 0.0)));
    }
    out
}

/// `Σ_{k<l} F_kl γ_k γ_l v` for frame components `F`.
pub fn two_form_action(rep: &GammaRep, f: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let n = f.nrows();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for k in 0..n {
        for l in k + 1..n {
            let w = apply(rep.gamma(k), &apply(rep.gamma(l), v));
            out = add(&out, &scale(&w, Complex64::new(f[(k, l)], 0.0)));
        }
    }
    out
}

/// The built-in charts covered by the acceptance matrix.
pub fn builtin_ids() -> Vec<&'static str> {
    vec![
        "flat:n=2", "flat:n=3", "flat:n=4", "torus:n=2", "s2:r=0.5", "s2:r=1", "s2:r=2", "s3:r=0.5", "s3:r=1",
        "s3:r=2", "disk:n=2",
    ]
}

/// Two nontrivial connection pairs for an `n`-dimensional chart.
pub fn nontrivial_connections(n: usize) -> [(String, String); 2] {
    let last = n;
    [
        ("i*0.3*x1 dx2".to_string(), "i*0.1 dx1".to_string()),
        (
            format!("i sin(x1) x{last} dx1 + i cos(x1) dx{last}"),
            format!("i x1^2 dx{last} - i 0.5 x{last} dx1 + i exp(0.2 x1) dx1"),
        ),
    ]
}
