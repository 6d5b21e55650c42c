//! Points of the base curve `C = {Q1 = Q2 = 0}` found plane by plane.
//!
//! A plane is parametrized as `x = u·A + v·B + M`. Restricting both quadrics
//! gives two conics in `(u, v)`; their resultant in `v` is a quartic in `u`
//! whose roots locate every point of `C` on the plane away from the line `AB`.

use rand::Rng;
use serde::Serialize;

use crate::config::{general_position, random_config, Config, ProjPoint};
use crate::field::{Field, PrimeField};
use crate::linalg;
use crate::poly::Poly;

use super::quadric::{quadric_span_rank, quadrics_through, QuadricForm, QuadricPencil};
use super::{CurveError, Point3};

/// Largest prime for which a full sweep of `C(F_p)` is attempted.
pub const MAX_SWEEP_PRIME: u64 = 100_000;

const SAMPLE_BUDGET: usize = 1000;

/// Coefficients of `Q(uA + vB + M)` as a quadratic in `v` over `F_p[u]`.
struct RestrictedConic {
    v2: u64,
    v1: Poly,
    v0: Poly,
}

fn restrict(f: &PrimeField, q: &QuadricForm, a: &[u64; 4], b: &[u64; 4], m: &[u64; 4]) -> RestrictedConic {
    RestrictedConic {
        v2: q.eval(f, b),
        v1: Poly::new(vec![q.polar(f, b, m), q.polar(f, a, b)]),
        v0: Poly::new(vec![q.eval(f, m), q.polar(f, a, m), q.eval(f, a)]),
    }
}

/// Resultant of `a2 v² + a1 v + a0` and `b2 v² + b1 v + b0` in `v`.
fn quadratic_resultant(f: &PrimeField, a: [&Poly; 3], b: [&Poly; 3]) -> Poly {
    let [a2, a1, a0] = a;
    let [b2, b1, b0] = b;
    let t1 = a2.mul(f, b0).sub(f, &a0.mul(f, b2));
    let t2 = a2.mul(f, b1).sub(f, &a1.mul(f, b2));
    let t3 = a1.mul(f, b0).sub(f, &a0.mul(f, b1));
    t1.mul(f, &t1).sub(f, &t2.mul(f, &t3))
}

fn combine(f: &PrimeField, terms: &[(u64, &[u64; 4])]) -> [u64; 4] {
    let mut out = [0u64; 4];
    for (s, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o = f.add(o, &f.mul(s, x));
        }
    }
    out
}

/// Every point of the base curve on the plane spanned by `a, b, m` that is
/// not on the line `ab`.
pub fn slice_points(
    f: &PrimeField,
    pencil: &QuadricPencil,
    a: &[u64; 4],
    b: &[u64; 4],
    m: &[u64; 4],
) -> Result<Vec<Point3>, CurveError> {
    let c1 = restrict(f, &pencil.q1, a, b, m);
    let c2 = restrict(f, &pencil.q2, a, b, m);
    if c1.v2 == 0 && c2.v2 == 0 {
        return Err(CurveError::DegenerateSlice);
    }
    let (c1v2, c2v2) = (Poly::constant(c1.v2), Poly::constant(c2.v2));
    let res = quadratic_resultant(f, [&c1v2, &c1.v1, &c1.v0], [&c2v2, &c2.v1, &c2.v0]);
    if res.is_zero() {
        return Err(CurveError::DegenerateSlice);
    }
    let mut points = Vec::new();
    for u in res.roots(f) {
        let g1 = Poly::new(vec![c1.v0.eval(f, u), c1.v1.eval(f, u), c1.v2]);
        let g2 = Poly::new(vec![c2.v0.eval(f, u), c2.v1.eval(f, u), c2.v2]);
        if g1.is_zero() && g2.is_zero() {
            return Err(CurveError::DegenerateSlice);
        }
        let common = g1.gcd(f, &g2);
        for v in common.roots(f) {
            let x = combine(f, &[(u, a), (v, b), (1, m)]);
            let point = ProjPoint::new(f, x)?;
            debug_assert!(pencil.contains(f, point.coords()));
            points.push(point);
        }
    }
    Ok(points)
}

fn random_vec<R: Rng + ?Sized>(f: &PrimeField, rng: &mut R) -> [u64; 4] {
    [(); 4].map(|_| f.random(rng))
}

fn independent(f: &PrimeField, vs: &[&[u64; 4]]) -> bool {
    let m: Vec<Vec<u64>> = vs.iter().map(|v| v.to_vec()).collect();
    linalg::rank(f, &m) == vs.len()
}

/// Whether the line spanned by `a, b` avoids the base curve entirely
/// (over the algebraic closure).
pub fn line_misses_curve(f: &PrimeField, pencil: &QuadricPencil, a: &[u64; 4], b: &[u64; 4]) -> bool {
    let binary = |q: &QuadricForm| {
        [Poly::constant(q.eval(f, a)), Poly::constant(q.polar(f, a, b)), Poly::constant(q.eval(f, b))]
    };
    let [a2, a1, a0] = binary(&pencil.q1);
    let [b2, b1, b0] = binary(&pencil.q2);
    !quadratic_resultant(f, [&a2, &a1, &a0], [&b2, &b1, &b0]).is_zero()
}

/// A random plane: three independent vectors.
fn random_plane<R: Rng + ?Sized>(f: &PrimeField, rng: &mut R) -> [[u64; 4]; 3] {
    loop {
        let (a, b, m) = (random_vec(f, rng), random_vec(f, rng), random_vec(f, rng));
        if independent(f, &[&a, &b, &m]) {
            return [a, b, m];
        }
    }
}

/// A point of the base curve from a random plane slice; rootless slices are
/// retried.
pub fn sample_curve_point<R: Rng + ?Sized>(
    f: &PrimeField,
    pencil: &QuadricPencil,
    rng: &mut R,
) -> Result<Point3, CurveError> {
    for _ in 0..SAMPLE_BUDGET {
        let [a, b, m] = random_plane(f, rng);
        let Ok(points) = slice_points(f, pencil, &a, &b, &m) else {
            continue;
        };
        if !points.is_empty() {
            let pick = rng.random_range(0..points.len());
            return Ok(points[pick].clone());
        }
    }
    Err(CurveError::RetryBudget { what: "curve point sampling", attempts: SAMPLE_BUDGET })
}

/// Four distinct rational points cut out by one plane, none of them in `avoid`.
pub fn hyperplane_section<R: Rng + ?Sized>(
    f: &PrimeField,
    pencil: &QuadricPencil,
    avoid: &[Point3],
    rng: &mut R,
) -> Result<Vec<Point3>, CurveError> {
    for _ in 0..SAMPLE_BUDGET * 10 {
        let [a, b, m] = random_plane(f, rng);
        if !line_misses_curve(f, pencil, &a, &b) {
            continue;
        }
        let Ok(points) = slice_points(f, pencil, &a, &b, &m) else {
            continue;
        };
        if points.len() == 4 && points.iter().all(|p| !avoid.contains(p)) {
            return Ok(points);
        }
    }
    Err(CurveError::RetryBudget { what: "split plane section", attempts: SAMPLE_BUDGET * 10 })
}

/// Visits every point of `C(F_p)` by sweeping the planes through a line
/// that misses the curve. Each point is visited exactly once.
pub fn sweep_curve<R: Rng + ?Sized>(
    f: &PrimeField,
    pencil: &QuadricPencil,
    rng: &mut R,
    mut visit: impl FnMut(&Point3),
) -> Result<(), CurveError> {
    let p = f.modulus();
    if p > MAX_SWEEP_PRIME {
        return Err(CurveError::PrimeTooLarge { p, max: MAX_SWEEP_PRIME });
    }
    let (a, b) = loop {
        let (a, b) = (random_vec(f, rng), random_vec(f, rng));
        if independent(f, &[&a, &b]) && line_misses_curve(f, pencil, &a, &b) {
            break (a, b);
        }
    };
    let (m0, m1) = loop {
        let (m0, m1) = (random_vec(f, rng), random_vec(f, rng));
        if independent(f, &[&a, &b, &m0, &m1]) {
            break (m0, m1);
        }
    };
    for lambda in 0..p {
        let m = combine(f, &[(1, &m0), (lambda, &m1)]);
        for point in slice_points(f, pencil, &a, &b, &m)? {
            visit(&point);
        }
    }
    for point in slice_points(f, pencil, &a, &b, &m1)? {
        visit(&point);
    }
    Ok(())
}

/// A configuration supported on the base curve of a pencil, with that pencil.
#[derive(Clone, Debug, PartialEq)]
pub struct VrConfig {
    pub config: Config<PrimeField>,
    pub pencil: QuadricPencil,
}

/// Eight random points in general position fix a pencil; the remaining
/// `r - 8` points are sampled on its base curve.
pub fn sample_vr_config<R: Rng + ?Sized>(f: &PrimeField, r: usize, rng: &mut R) -> Result<VrConfig, CurveError> {
    if r < 8 {
        return Err(CurveError::RankTooSmall { r, min: 8 });
    }
    for _ in 0..SAMPLE_BUDGET {
        let base = random_config(f, 8, rng)?;
        let basis = quadrics_through(f, &base.points);
        if basis.len() != 2 {
            continue;
        }
        let pencil = QuadricPencil::new(f, basis[0], basis[1])?;
        let mut points = base.points;
        for _ in 8..r {
            points.push(sample_curve_point(f, &pencil, rng)?);
        }
        let config = Config::new(*f, points);
        if general_position(&config) {
            return Ok(VrConfig { config, pencil });
        }
    }
    Err(CurveError::RetryBudget { what: "V_r configuration sampling", attempts: SAMPLE_BUDGET })
}

/// Outcome of one eighth-point search, kept for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EighthPointSearch {
    pub net_quadric: QuadricForm,
    pub candidates: usize,
}

/// The eighth base point of the net of quadrics through seven points of the
/// base curve: the residual zero on `C` of a net member outside the pencil.
pub fn eighth_base_point<R: Rng + ?Sized>(
    f: &PrimeField,
    seven: &[Point3],
    pencil: &QuadricPencil,
    rng: &mut R,
) -> Result<Point3, CurveError> {
    eighth_base_point_detailed(f, seven, pencil, rng).map(|(p, _)| p)
}

pub fn eighth_base_point_detailed<R: Rng + ?Sized>(
    f: &PrimeField,
    seven: &[Point3],
    pencil: &QuadricPencil,
    rng: &mut R,
) -> Result<(Point3, EighthPointSearch), CurveError> {
    if seven.len() != 7 {
        return Err(CurveError::NotGeneric(format!("need 7 points, got {}", seven.len())));
    }
    if f.modulus() > MAX_SWEEP_PRIME {
        return Err(CurveError::PrimeTooLarge { p: f.modulus(), max: MAX_SWEEP_PRIME });
    }
    if let Some(bad) = seven.iter().position(|p| !pencil.contains(f, p.coords())) {
        return Err(CurveError::NotOnCurve { index: bad });
    }
    let net = quadrics_through(f, seven);
    if net.len() != 3 {
        return Err(CurveError::NotGeneric(format!("net of quadrics has dimension {}", net.len())));
    }
    let q3 = loop {
        let coeffs = [f.random(rng), f.random(rng), f.random(rng)];
        let q = QuadricForm::combine(f, &[(coeffs[0], &net[0]), (coeffs[1], &net[1]), (coeffs[2], &net[2])]);
        if quadric_span_rank(f, &[pencil.q1, pencil.q2, q]) == 3 {
            break q;
        }
    };
    let mut found: Vec<Point3> = Vec::new();
    sweep_curve(f, pencil, rng, |x| {
        if q3.eval(f, x.coords()) == 0 && !seven.contains(x) && !found.contains(x) {
            found.push(x.clone());
        }
    })?;
    let search = EighthPointSearch { net_quadric: q3, candidates: found.len() };
    match found.len() {
        1 => Ok((found.pop().expect("one candidate"), search)),
        n => Err(CurveError::EighthPointCount { found: n }),
    }
}
