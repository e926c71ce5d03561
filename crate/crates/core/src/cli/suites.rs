//! The verification suites behind the `verify` subcommands.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{ConnectionRecord, ReportBuilder, VerificationReport};
use crate::clifford::{build_gamma_rep, max_abs, CMatrix, Multivector};
use crate::geometry::{orthonormal_frame, ChartGeometry};
use crate::spin_groups::{
    chiral_block_commutants, irreducibility_check, lie_p_star, lie_p_star_inv, phi_inv, random_spin,
    random_spin_t, so_basis, splitting_residual, kappa_t_star1, SpinElement, SpinTElement,
    SpinTLieElement,
};
use crate::spinor_bundle::{ConnectionPair, SpinorGeometry, TrigScalar, TrigSpinor, TrigVector, VectorField};
use crate::{Error, Result};

/// Sample counts and default tolerances.
pub mod defaults {
    pub const GROUP_SAMPLES: usize = 100;
    pub const COMMUTANT_SAMPLES: usize = 50;
    pub const POINTS: usize = 20;
    pub const EXACT: f64 = 1e-12;
    pub const SPIN: f64 = 1e-10;
    pub const DIFFERENTIAL: f64 = 1e-6;
    pub const DIFF_STEP: f64 = 1e-5;
    pub const FRAME: f64 = 1e-10;
    pub const TORSION: f64 = 1e-8;
    pub const CURVATURE: f64 = 1e-8;
    pub const FLAT: f64 = 1e-12;
    pub const LEIBNIZ: f64 = 1e-9;
    pub const RICCI_IDENTITY: f64 = 1e-8;
    pub const SPINOR_CURVATURE: f64 = 1e-8;
    pub const CHIRALITY: f64 = 1e-9;
    pub const SL_RELATIVE: f64 = 1e-7;
    pub const SL_FLAT_ABSOLUTE: f64 = 1e-10;
    /// Fraction of each non-periodic side kept clear of the chart boundary.
    pub const MARGIN: f64 = 0.02;
    pub const MAX_RESAMPLES_PER_POINT: usize = 10;
}

use defaults::*;

fn random_multivector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Multivector {
    let coeffs = (0..1usize << n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Multivector::from_coeffs(n, coeffs).expect("length matches")
}

fn random_lie<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SpinTLieElement {
    let mut xi = Multivector::zero(n);
    for a in 0..n {
        for b in a + 1..n {
            xi = &xi + &Multivector::blade(n, (1 << a) | (1 << b), rng.random_range(-1.0..=1.0));
        }
    }
    SpinTLieElement::new(xi, rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
        .expect("bivector")
}

fn so_distance(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (a.transpose() * a - DMatrix::identity(n, n))
        .amax()
        .max((a.determinant() - 1.0).abs())
}

/// Every algebraic check for `Spin^T(n)` and its representation.
pub fn run_group_suite(n: usize, seed: u64, overrides: &BTreeMap<String, f64>) -> Result<VerificationReport> {
    if !(2..=6).contains(&n) {
        return Err(Error::Config(format!("group suite supports 2 <= n <= 6, got {n}")));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rb = ReportBuilder::new(overrides.clone());
    let rep = build_gamma_rep(n)?;

    rb.record("clifford.relations", rep.clifford_relation_residual(), EXACT);
    for _ in 0..GROUP_SAMPLES {
        let a = random_multivector(&mut rng, n);
        let b = random_multivector(&mut rng, n);
        let lhs = rep.apply_rep(&(&a * &b))?;
        let rhs = rep.apply_rep(&a)? * rep.apply_rep(&b)?;
        rb.record("clifford.rep_homomorphism", max_abs(&(lhs - rhs)), EXACT);
    }

    for _ in 0..GROUP_SAMPLES {
        let g = random_spin(&mut rng, n);
        let l = g.lambda_cover()?;
        rb.record("spin.lambda_in_so", so_distance(&l), SPIN);
        rb.record("spin.lambda_even", (g.negate().lambda_cover()? - &l).amax(), SPIN);
        let h = random_spin(&mut rng, n);
        let lhs = g.mul(&h)?.lambda_cover()?;
        rb.record("spin.lambda_homomorphism", (lhs - l * h.lambda_cover()?).amax(), SPIN);
    }

    // Kernel of p: candidates with λ(g) = 1 and z₁ = z₂ = ±1, plus generic elements.
    let one = Complex64::new(1.0, 0.0);
    let mut kernel: Vec<SpinTElement> = Vec::new();
    let mut candidates = Vec::new();
    for g in [SpinElement::identity(n), SpinElement::identity(n).negate()] {
        for z1 in [one, -one, Complex64::i(), -Complex64::i()] {
            for z2 in [one, -one, Complex64::i(), -Complex64::i()] {
                candidates.push(SpinTElement::new(g.clone(), z1, z2)?);
            }
        }
    }
    for _ in 0..GROUP_SAMPLES {
        candidates.push(random_spin_t(&mut rng, n));
    }
    for a in candidates {
        let (r, w1, w2) = a.map_p()?;
        let trivial = (r - DMatrix::identity(n, n)).amax() < EXACT
            && (w1 - one).norm() < EXACT
            && (w2 - one).norm() < EXACT;
        if trivial && !kernel.iter().any(|k| k.approx_eq(&a, EXACT)) {
            kernel.push(a);
        }
    }
    let expected = [
        SpinTElement::identity(n),
        SpinTElement::new(SpinElement::identity(n), -one, -one)?,
    ];
    let matched = expected.iter().all(|e| kernel.iter().any(|k| k.approx_eq(e, EXACT)));
    let kernel_error = if matched { kernel.len() as f64 - 2.0 } else { f64::INFINITY };
    rb.record("spint.kernel_of_p", kernel_error, 0.0);
    rb.metric("spint.kernel_of_p.classes", kernel.len() as f64);

    for _ in 0..GROUP_SAMPLES {
        let a = random_spin_t(&mut rng, n);
        let b = random_spin_t(&mut rng, n);
        let ab = a.mul(&b)?;
        let (ca, wa) = a.phi();
        let (cb, wb) = b.phi();
        let (cab, wab) = ab.phi();
        let hom = cab.distance(&ca.mul(&cb)?).max((wab - wa * wb).norm());
        rb.record("spint.phi_homomorphism", hom, EXACT);

        let back = phi_inv(&ca, wa)?;
        rb.record("spint.phi_round_trip", back.distance(&a), EXACT);
        let (c2, w2) = phi_inv(&cab, wab)?.phi();
        rb.record("spint.phi_inverse_round_trip", c2.distance(&cab).max((w2 - wab).norm()), EXACT);

        let k = ab.kappa_t(&rep)? - a.kappa_t(&rep)? * b.kappa_t(&rep)?;
        rb.record("spint.kappa_homomorphism", max_abs(&k), EXACT);

        let (r, l1, l2) = ab.map_p()?;
        let (ra, a1, a2) = a.map_p()?;
        let (rbm, b1, b2) = b.map_p()?;
        let p_err = (r - ra * rbm).amax().max((l1 - a1 * b1).norm()).max((l2 - a2 * b2).norm());
        rb.record("spint.p_homomorphism", p_err, SPIN);
    }

    // p_* ∘ p_*⁻¹ on the full basis of so(n) ⊕ iℝ ⊕ iℝ.
    let mut basis = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            basis.push((so_basis(n, a, b), 0.0, 0.0));
        }
    }
    basis.push((DMatrix::zeros(n, n), 1.0, 0.0));
    basis.push((DMatrix::zeros(n, n), 0.0, 1.0));
    for (e, lam, mu) in &basis {
        let (e2, l2, m2) = lie_p_star(&lie_p_star_inv(e, *lam, *mu)?)?;
        let err = (e2 - e).amax().max((l2 - lam).abs()).max((m2 - mu).abs());
        rb.record("lie.p_star_round_trip", err, 0.0);
    }
    for _ in 0..GROUP_SAMPLES / 10 {
        let x = random_lie(&mut rng, n);
        let h = DIFF_STEP;
        let fwd = x.one_parameter(h)?;
        let bwd = x.one_parameter(-h)?;
        let (rf, af, bf) = fwd.map_p()?;
        let (rbk, ab, bb) = bwd.map_p()?;
        let (m, l, u) = lie_p_star(&x)?;
        let err = ((rf - rbk) / (2.0 * h) - m)
            .amax()
            .max(((af - ab) / (2.0 * h) - Complex64::new(0.0, l)).norm())
            .max(((bf - bb) / (2.0 * h) - Complex64::new(0.0, u)).norm());
        rb.record("lie.p_star_differential", err, DIFFERENTIAL);
        let dk: CMatrix = (fwd.kappa_t(&rep)? - bwd.kappa_t(&rep)?) / Complex64::new(2.0 * h, 0.0);
        rb.record("lie.kappa_star_differential", max_abs(&(dk - kappa_t_star1(&x, &rep)?)), DIFFERENTIAL);
    }

    let rep_seed = rng.random::<u64>();
    if n % 2 == 1 {
        let d = irreducibility_check(&rep, COMMUTANT_SAMPLES, rep_seed)?;
        rb.record("rep.irreducible", d as f64 - 1.0, 0.0);
        rb.metric("rep.commutant_dimension", d as f64);
    } else {
        rb.record("rep.chirality_commutes", splitting_residual(&rep, COMMUTANT_SAMPLES, rep_seed)?, SPIN);
        let (p, m) = chiral_block_commutants(&rep, COMMUTANT_SAMPLES, rep_seed)?;
        rb.record("rep.chiral_blocks_irreducible", (p as f64 - 1.0).abs().max((m as f64 - 1.0).abs()), 0.0);
        rb.metric("rep.commutant_dimension.plus", p as f64);
        rb.metric("rep.commutant_dimension.minus", m as f64);
        let chi = rep.chirality().expect("even n");
        let anti = (0..n).map(|i| max_abs(&(chi * rep.gamma(i) + rep.gamma(i) * chi))).fold(0.0, f64::max);
        rb.record("rep.generators_anticommute_with_chirality", anti, EXACT);
    }

    rb.metric("n", n as f64);
    Ok(rb.finish("group", seed, None, None, start.elapsed().as_secs_f64()))
}

fn is_recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::OutOfDomain { .. } | Error::NotPositiveDefinite { .. } | Error::Evaluation(_)
    )
}

/// Runs `body` at `points` sampled points, resampling (and logging) where
/// evaluation fails. Gives up after too many consecutive failures.
fn sweep<F>(chart: &ChartGeometry, rng: &mut ChaCha8Rng, points: usize, rb: &mut ReportBuilder, mut body: F) -> Result<()>
where
    F: FnMut(&[f64], &mut ChaCha8Rng, &mut ReportBuilder) -> Result<()>,
{
    for _ in 0..points {
        let mut attempts = 0;
        loop {
            let x = chart.sample_point(rng, MARGIN);
            let mut scratch = ReportBuilder::default();
            match body(&x, rng, &mut scratch) {
                Ok(()) => {
                    rb.merge(scratch);
                    break;
                }
                Err(e) if is_recoverable(&e) && attempts < MAX_RESAMPLES_PER_POINT => {
                    log::warn!("resampling after failure at {x:?}: {e}");
                    rb.resampled();
                    attempts += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

/// Frame, connection and curvature invariants of a chart.
pub fn run_geometry_suite(
    chart: &ChartGeometry,
    points: usize,
    seed: u64,
    overrides: &BTreeMap<String, f64>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rb = ReportBuilder::new(overrides.clone());
    let known = chart.known_scalar_curvature();
    let rep = build_gamma_rep(chart.dim())?;
    let mut s_sum = 0.0;
    let mut s_count = 0usize;
    sweep(chart, &mut rng, points, &mut rb, |x, _, rb| {
        let fd = orthonormal_frame(chart, x)?;
        let curv = fd.curvature();
        rb.record("frame.orthonormality", fd.orthonormality_residual(), FRAME);
        rb.record("connection.antisymmetry", fd.antisymmetry_residual(), 0.0);
        rb.record("connection.torsion_free", fd.torsion_residual(), TORSION);
        let sym = curv.symmetry_residuals();
        rb.record("curvature.antisymmetry", sym.antisym_kl.max(sym.antisym_ij), CURVATURE);
        rb.record("curvature.pair_symmetry", sym.pair, CURVATURE);
        rb.record("curvature.first_bianchi", sym.bianchi, CURVATURE);
        rb.record("curvature.ricci_symmetric", sym.ricci_symmetry, CURVATURE);
        rb.record("curvature.scalar_is_ricci_trace", (curv.scalar - curv.ricci.trace()).abs(), 0.0);
        if let Some(s) = known {
            rb.record("curvature.scalar_closed_form", curv.scalar - s, CURVATURE);
            if s == 0.0 {
                rb.record("curvature.flat_components", curv.max_abs(), FLAT);
            }
        }
        // Σ_i e_i·Ric(e_i) = −s in the spinor representation.
        let n = chart.dim();
        let mut m = rep.identity() * Complex64::new(curv.scalar, 0.0);
        for i in 0..n {
            for k in 0..n {
                m += rep.gamma(i) * rep.gamma(k) * Complex64::new(curv.ricci[(i, k)], 0.0);
            }
        }
        rb.record("curvature.clifford_ricci_contraction", max_abs(&m), CURVATURE);
        s_sum += curv.scalar;
        s_count += 1;
        Ok(())
    })?;
    if s_count > 0 {
        rb.metric("curvature.scalar_mean", s_sum / s_count as f64);
    }
    if let Some(s) = known {
        rb.metric("curvature.scalar_expected", s);
    }
    Ok(rb.finish(
        "geometry",
        seed,
        Some(chart.name().to_string()),
        None,
        start.elapsed().as_secs_f64(),
    ))
}

/// Schrödinger–Lichnerowicz, contracted curvature identity, spinor curvature
/// and Leibniz checks over random points and fields.
pub fn run_lichnerowicz_suite(
    chart: &ChartGeometry,
    conn: &ConnectionPair,
    points: usize,
    seed: u64,
    overrides: &BTreeMap<String, f64>,
) -> Result<VerificationReport> {
    if conn.dim() != chart.dim() {
        return Err(Error::Config(format!(
            "connection forms are {}-dimensional but the chart has dimension {}",
            conn.dim(),
            chart.dim()
        )));
    }
    let start = Instant::now();
    let n = chart.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rb = ReportBuilder::new(overrides.clone());
    let rep = build_gamma_rep(n)?;
    let ds = rep.dim_spinor();
    let flat_zero = chart.known_scalar_curvature() == Some(0.0) && conn.a.is_zero() && conn.b.is_zero();

    sweep(chart, &mut rng, points, &mut rb, |x, rng, rb| {
        let sg = SpinorGeometry::with_rep(chart, conn, rep.clone(), x)?;
        let psi = TrigSpinor::random(rng, n, ds);
        let f = TrigScalar::random(rng, n);
        let xv = TrigVector::random(rng, n);
        let yv = TrigVector::random(rng, n);
        let p = sg.eval_field(&psi)?;

        let terms = sg.sl_terms(&p);
        let (r, s) = (terms.residual(), terms.scale());
        rb.record("sl.relative", if s > 0.0 { r / s } else { r }, SL_RELATIVE);
        if flat_zero {
            rb.record("sl.flat_absolute", r, SL_FLAT_ABSOLUTE);
        }

        let fj = {
            use crate::spinor_bundle::ScalarField;
            f.eval(sg.frame().coords())
        };
        let (r, s) = sg.leibniz(&fj, &p);
        rb.record("leibniz.relative", if s > 0.0 { r / s } else { r }, LEIBNIZ);

        let xc = {
            let xf = |c: &[crate::jets::Jet]| xv.components(c);
            sg.vector(&VectorField::Components(&xf))
        };
        let yc = {
            let yf = |c: &[crate::jets::Jet]| yv.components(c);
            sg.vector(&VectorField::Components(&yf))
        };
        let (r, _) = sg.ricci_identity(&xc, &p);
        rb.record("ricci_identity", r, RICCI_IDENTITY);

        let comm = sg.curvature_commutator(&xc, &yc, &p);
        let pv: Vec<Complex64> = p.iter().map(|c| c.value()).collect();
        let closed = sg.curvature_closed_form(&sg.frame_components(&xc), &sg.frame_components(&yc), &pv);
        let diff: Vec<Complex64> = comm.iter().zip(&closed).map(|(a, b)| a - b).collect();
        rb.record("spinor_curvature.closed_form", crate::spinor_bundle::cnorm(&diff), SPINOR_CURVATURE);

        if let Some((r, s)) = sg.chirality_anticommutator(&p) {
            rb.record("dirac.chirality_swap", if s > 1.0 { r / s } else { r }, CHIRALITY);
        }
        Ok(())
    })?;

    Ok(rb.finish(
        "sl",
        seed,
        Some(chart.name().to_string()),
        Some(ConnectionRecord {
            a: conn.a.source().to_string(),
            b: conn.b.source().to_string(),
        }),
        start.elapsed().as_secs_f64(),
    ))
}
