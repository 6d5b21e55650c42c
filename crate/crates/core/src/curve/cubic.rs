//! Plane cubic model of the base curve and its chord-tangent group law.
//!
//! Projecting `C` from one of its own points `c` onto a plane gives a plane
//! cubic `E ≅ C`. With origin `O`, `P ⊕ Q = O * (P * Q)`, where `X * Y` is the
//! third intersection of the line `XY` (the tangent when `X = Y`) with `E`.

use rand::Rng;
use serde::Serialize;

use crate::config::ProjPoint;
use crate::field::{Field, PrimeField};
use crate::linalg;

use super::quadric::QuadricPencil;
use super::slice::sample_curve_point;
use super::{CurveError, Point3};

/// Exponents of the ten cubic monomials in `(x, y, z)`.
pub const CUBIC_MONOMIALS: [[u32; 3]; 10] =
    [[3, 0, 0], [2, 1, 0], [2, 0, 1], [1, 2, 0], [1, 1, 1], [1, 0, 2], [0, 3, 0], [0, 2, 1], [0, 1, 2], [0, 0, 3]];

/// Number of projected points used to interpolate the cubic.
const INTERPOLATION_POINTS: usize = 24;

/// Default number of curve points screened for singularities.
pub const DEFAULT_SCREENING_POINTS: usize = 200;

/// A point of P² with its first nonzero coordinate equal to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlanePoint(pub [u64; 3]);

impl PlanePoint {
    pub fn new(f: &PrimeField, v: [u64; 3]) -> Result<Self, CurveError> {
        let lead = v.iter().find(|&&c| c != 0).ok_or(CurveError::ZeroVector)?;
        let inv = f.inv(lead)?;
        Ok(Self(v.map(|c| f.mul(&c, &inv))))
    }
}

fn pow(f: &PrimeField, x: u64, e: u32) -> u64 {
    (0..e).fold(1, |acc, _| f.mul(&acc, &x))
}

fn dot3(f: &PrimeField, a: &[u64; 3], b: &[u64; 3]) -> u64 {
    (0..3).fold(0, |acc, i| f.add(&acc, &f.mul(&a[i], &b[i])))
}

fn lin3(f: &PrimeField, s: u64, a: &[u64; 3], t: u64, b: &[u64; 3]) -> [u64; 3] {
    [0, 1, 2].map(|i| f.add(&f.mul(&s, &a[i]), &f.mul(&t, &b[i])))
}

/// A ternary cubic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TernaryCubic {
    pub coeffs: [u64; 10],
}

impl TernaryCubic {
    pub fn eval(&self, f: &PrimeField, x: &[u64; 3]) -> u64 {
        CUBIC_MONOMIALS.iter().zip(&self.coeffs).fold(0, |acc, (e, c)| {
            let m = f.mul(&pow(f, x[0], e[0]), &f.mul(&pow(f, x[1], e[1]), &pow(f, x[2], e[2])));
            f.add(&acc, &f.mul(c, &m))
        })
    }

    pub fn gradient(&self, f: &PrimeField, x: &[u64; 3]) -> [u64; 3] {
        let mut g = [0u64; 3];
        for (e, c) in CUBIC_MONOMIALS.iter().zip(&self.coeffs) {
            for k in 0..3 {
                if e[k] == 0 {
                    continue;
                }
                let mut term = f.mul(c, &f.from_i64(e[k] as i64));
                for j in 0..3 {
                    let exp = if j == k { e[j] - 1 } else { e[j] };
                    term = f.mul(&term, &pow(f, x[j], exp));
                }
                g[k] = f.add(&g[k], &term);
            }
        }
        g
    }

    fn monomial_row(f: &PrimeField, x: &[u64; 3]) -> Vec<u64> {
        CUBIC_MONOMIALS
            .iter()
            .map(|e| f.mul(&pow(f, x[0], e[0]), &f.mul(&pow(f, x[1], e[1]), &pow(f, x[2], e[2]))))
            .collect()
    }
}

/// The projection of the base curve from `center` onto a plane, the cubic it
/// lands on, and the origin of the group law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubicModel {
    #[serde(skip)]
    pub field: PrimeField,
    pub pencil: QuadricPencil,
    #[serde(serialize_with = "ser_point3")]
    pub center: Point3,
    /// Three linear forms vanishing at `center`.
    pub projection: [[u64; 4]; 3],
    pub cubic: TernaryCubic,
    pub origin: PlanePoint,
}

fn ser_point3<S: serde::Serializer>(p: &Point3, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(p.coords(), s)
}

/// Builds the cubic model by projecting from `center`, interpolating the
/// image through sampled points and screening for singular points.
pub fn project_to_cubic<R: Rng + ?Sized>(
    f: &PrimeField,
    pencil: &QuadricPencil,
    center: &Point3,
    rng: &mut R,
) -> Result<CubicModel, CurveError> {
    project_to_cubic_screened(f, pencil, center, DEFAULT_SCREENING_POINTS, rng)
}

pub fn project_to_cubic_screened<R: Rng + ?Sized>(
    f: &PrimeField,
    pencil: &QuadricPencil,
    center: &Point3,
    screening: usize,
    rng: &mut R,
) -> Result<CubicModel, CurveError> {
    if f.modulus() <= 3 {
        return Err(CurveError::NotGeneric("the cubic model needs p > 3".into()));
    }
    if !pencil.contains(f, center.coords()) {
        return Err(CurveError::NotOnCurve { index: 0 });
    }
    let forms = linalg::kernel(f, &vec![center.coords().to_vec()], 4);
    let projection = loop {
        let mix: Vec<Vec<u64>> = (0..3).map(|_| (0..3).map(|_| f.random(rng)).collect()).collect();
        if linalg::determinant(f, &mix) == 0 {
            continue;
        }
        let rows = linalg::mat_mul(f, &mix, &forms);
        break [0, 1, 2].map(|i| <[u64; 4]>::try_from(rows[i].clone()).expect("four columns"));
    };

    let mut samples = Vec::with_capacity(INTERPOLATION_POINTS);
    while samples.len() < INTERPOLATION_POINTS {
        let x = sample_curve_point(f, pencil, rng)?;
        if x != *center {
            samples.push(x);
        }
    }
    let image = |x: &Point3| project(f, &projection, x);
    let images = samples.iter().map(image).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<u64>> = images.iter().map(|y| TernaryCubic::monomial_row(f, &y.0)).collect();
    let kernel = linalg::kernel(f, &rows, 10);
    if kernel.len() != 1 {
        return Err(CurveError::RankDeficient { kernel_dim: kernel.len() });
    }
    let cubic = TernaryCubic { coeffs: kernel[0].clone().try_into().expect("ten coefficients") };
    let model = CubicModel { field: *f, pencil: *pencil, center: center.clone(), projection, cubic, origin: images[0] };

    for y in &images {
        model.check_smooth_at(y)?;
    }
    for _ in 0..screening {
        let x = sample_curve_point(f, pencil, rng)?;
        if x == *center {
            continue;
        }
        let y = model.forward(&x)?;
        if model.cubic.eval(f, &y.0) != 0 {
            return Err(CurveError::RankDeficient { kernel_dim: 1 });
        }
        model.check_smooth_at(&y)?;
    }
    model.check_smooth_at(&model.center_image()?)?;
    Ok(model)
}

fn project(f: &PrimeField, rows: &[[u64; 4]; 3], x: &Point3) -> Result<PlanePoint, CurveError> {
    let v = rows.map(|row| (0..4).fold(0, |acc, i| f.add(&acc, &f.mul(&row[i], &x.coords()[i]))));
    PlanePoint::new(f, v)
}

impl CubicModel {
    pub fn on_cubic(&self, y: &PlanePoint) -> bool {
        self.cubic.eval(&self.field, &y.0) == 0
    }

    fn check_smooth_at(&self, y: &PlanePoint) -> Result<(), CurveError> {
        if self.cubic.gradient(&self.field, &y.0) == [0, 0, 0] {
            return Err(CurveError::Singular { point: *y });
        }
        Ok(())
    }

    /// Image of a curve point other than the projection center.
    pub fn forward(&self, x: &Point3) -> Result<PlanePoint, CurveError> {
        if *x == self.center {
            return Err(CurveError::CenterNotInDomain);
        }
        if !self.pencil.contains(&self.field, x.coords()) {
            return Err(CurveError::NotOnCurve { index: 0 });
        }
        project(&self.field, &self.projection, x)
    }

    /// Image of the center itself: where its tangent line lands.
    pub fn center_image(&self) -> Result<PlanePoint, CurveError> {
        let f = &self.field;
        let c = self.center.coords();
        let rows = vec![self.pencil.q1.gradient(f, c).to_vec(), self.pencil.q2.gradient(f, c).to_vec()];
        let tangent = linalg::kernel(f, &rows, 4);
        if tangent.len() != 2 {
            return Err(CurveError::NotGeneric("base curve is singular at the projection center".into()));
        }
        for t in &tangent {
            let v: [u64; 4] = t.clone().try_into().expect("four entries");
            let point = ProjPoint::new(f, v)?;
            if point != self.center {
                return project(f, &self.projection, &point);
            }
        }
        unreachable!("a two-dimensional space has a vector off any line")
    }

    /// Inverse of [`forward`](Self::forward) (and of `center_image`): the
    /// second intersection of the line through the center with the curve.
    pub fn backward(&self, y: &PlanePoint) -> Result<Point3, CurveError> {
        let f = &self.field;
        let rows: Vec<Vec<u64>> = self.projection.iter().map(|r| r.to_vec()).collect();
        // any preimage w with projection(w) = y
        let mut aug: Vec<Vec<u64>> = rows
            .iter()
            .zip(&y.0)
            .map(|(r, &b)| {
                let mut r = r.clone();
                r.push(b);
                r
            })
            .collect();
        let pivots = linalg::rref(f, &mut aug);
        let mut w = [0u64; 4];
        for (row, &p) in pivots.iter().enumerate() {
            if p == 4 {
                return Err(CurveError::NotGeneric("projection is not surjective".into()));
            }
            w[p] = aug[row][4];
        }
        let c = self.center.coords();
        for q in self.pencil.forms() {
            let (a, b) = (q.eval(f, &w), q.polar(f, c, &w));
            if a == 0 && b == 0 {
                continue;
            }
            // Q(s c + t w) = t (s b + t a)
            let x: [u64; 4] = [0, 1, 2, 3].map(|i| f.sub(&f.mul(&a, &c[i]), &f.mul(&b, &w[i])));
            let point = ProjPoint::new(f, x)?;
            if !self.pencil.contains(f, point.coords()) {
                return Err(CurveError::NotOnCurve { index: 0 });
            }
            return Ok(point);
        }
        Err(CurveError::NotGeneric("fibre line lies on both quadrics".into()))
    }

    /// Third intersection of the line `PQ` (tangent if `P = Q`) with the cubic.
    pub fn third_point(&self, p: &PlanePoint, q: &PlanePoint) -> Result<PlanePoint, CurveError> {
        let f = &self.field;
        if p != q {
            // F(sP + tQ) = s t (a s + b t)
            let a = dot3(f, &self.cubic.gradient(f, &p.0), &q.0);
            let b = dot3(f, &self.cubic.gradient(f, &q.0), &p.0);
            if a == 0 && b == 0 {
                return Err(CurveError::Singular { point: *p });
            }
            return PlanePoint::new(f, lin3(f, b, &p.0, f.neg(&a), &q.0));
        }
        let g = self.cubic.gradient(f, &p.0);
        if g == [0, 0, 0] {
            return Err(CurveError::Singular { point: *p });
        }
        let basis = linalg::kernel(f, &vec![g.to_vec()], 3);
        let other = basis
            .iter()
            .map(|v| <[u64; 3]>::try_from(v.clone()).expect("three entries"))
            .find(|v| PlanePoint::new(f, *v).map(|pt| pt != *p).unwrap_or(false))
            .expect("tangent line has a second point");
        // F(sP + tQ') = t² (b s + c0 t)
        let b = dot3(f, &self.cubic.gradient(f, &other), &p.0);
        let c0 = self.cubic.eval(f, &other);
        if b == 0 && c0 == 0 {
            return Err(CurveError::Singular { point: *p });
        }
        PlanePoint::new(f, lin3(f, c0, &p.0, f.neg(&b), &other))
    }

    pub fn add(&self, p: &PlanePoint, q: &PlanePoint) -> Result<PlanePoint, CurveError> {
        let pq = self.third_point(p, q)?;
        self.third_point(&self.origin, &pq)
    }

    pub fn neg(&self, p: &PlanePoint) -> Result<PlanePoint, CurveError> {
        let oo = self.third_point(&self.origin, &self.origin)?;
        self.third_point(p, &oo)
    }

    pub fn sub(&self, p: &PlanePoint, q: &PlanePoint) -> Result<PlanePoint, CurveError> {
        self.add(p, &self.neg(q)?)
    }

    pub fn mul(&self, n: i64, p: &PlanePoint) -> Result<PlanePoint, CurveError> {
        let base = if n < 0 { self.neg(p)? } else { *p };
        let mut k = n.unsigned_abs();
        let mut acc = self.origin;
        let mut pow2 = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &pow2)?;
            }
            k >>= 1;
            if k > 0 {
                pow2 = self.add(&pow2, &pow2)?;
            }
        }
        Ok(acc)
    }

    /// Same model with a different origin for the group law.
    pub fn with_origin(&self, origin: PlanePoint) -> Result<Self, CurveError> {
        if !self.on_cubic(&origin) {
            return Err(CurveError::NotOnCurve { index: 0 });
        }
        Ok(Self { origin, ..self.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::slice::sample_vr_config;
    use crate::poly::Poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(p: u64, seed: u64) -> (CubicModel, ChaCha8Rng) {
        let f = PrimeField::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vr = sample_vr_config(&f, 8, &mut rng).unwrap();
        let center = sample_curve_point(&f, &vr.pencil, &mut rng).unwrap();
        (project_to_cubic(&f, &vr.pencil, &center, &mut rng).unwrap(), rng)
    }

    fn random_point(m: &CubicModel, rng: &mut ChaCha8Rng) -> PlanePoint {
        loop {
            let x = sample_curve_point(&m.field, &m.pencil, rng).unwrap();
            if x != m.center {
                return m.forward(&x).unwrap();
            }
        }
    }

    #[test]
    fn fresh_points_land_on_the_cubic() {
        let (m, mut rng) = model(1_000_000_007, 31);
        for _ in 0..30 {
            assert!(m.on_cubic(&random_point(&m, &mut rng)));
        }
        assert!(m.on_cubic(&m.center_image().unwrap()));
        assert_eq!(m.forward(&m.center.clone()), Err(CurveError::CenterNotInDomain));
    }

    #[test]
    fn backward_inverts_forward() {
        let (m, mut rng) = model(1_000_000_007, 32);
        for _ in 0..20 {
            let x = sample_curve_point(&m.field, &m.pencil, &mut rng).unwrap();
            if x == m.center {
                continue;
            }
            assert_eq!(m.backward(&m.forward(&x).unwrap()).unwrap(), x);
        }
        assert_eq!(m.backward(&m.center_image().unwrap()).unwrap(), m.center);
    }

    #[test]
    fn random_lines_meet_in_at_most_three_points() {
        let (m, mut rng) = model(10007, 33);
        let f = m.field;
        let mut full_splits = 0;
        for _ in 0..40 {
            let a = [f.random(&mut rng), f.random(&mut rng), f.random(&mut rng)];
            let b = [f.random(&mut rng), f.random(&mut rng), f.random(&mut rng)];
            // restrict to the affine chart t ↦ a + t b; values at 4 nodes determine the cubic
            let values: Vec<u64> = (0..4).map(|t| m.cubic.eval(&f, &lin3(&f, 1, &a, t, &b))).collect();
            let poly = interpolate(&f, &values);
            assert!(poly.degree().unwrap_or(0) <= 3);
            let roots = poly.roots(&f);
            assert!(roots.len() <= 3);
            if roots.len() == 3 {
                full_splits += 1;
            }
        }
        assert!(full_splits > 0);
    }

    fn interpolate(f: &PrimeField, values: &[u64]) -> Poly {
        let n = values.len();
        let m: Vec<Vec<u64>> = (0..n as u64).map(|t| (0..n as u32).map(|e| pow(f, t, e)).collect()).collect();
        Poly::new(linalg::solve(f, &m, values).unwrap())
    }

    #[test]
    fn group_law_axioms() {
        let (m, mut rng) = model(1_000_000_007, 34);
        let o = m.origin;
        for _ in 0..100 {
            let p = random_point(&m, &mut rng);
            let q = random_point(&m, &mut rng);
            let r = random_point(&m, &mut rng);
            assert_eq!(m.add(&p, &o).unwrap(), p);
            assert_eq!(m.add(&p, &m.neg(&p).unwrap()).unwrap(), o);
            assert_eq!(m.add(&p, &q).unwrap(), m.add(&q, &p).unwrap());
            let lhs = m.add(&m.add(&p, &q).unwrap(), &r).unwrap();
            let rhs = m.add(&p, &m.add(&q, &r).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert!(m.on_cubic(&lhs));
        }
    }

    #[test]
    fn scalar_multiples() {
        let (m, mut rng) = model(10007, 35);
        let p = random_point(&m, &mut rng);
        let mut acc = m.origin;
        for n in 0..12 {
            assert_eq!(m.mul(n, &p).unwrap(), acc);
            assert_eq!(m.mul(-n, &p).unwrap(), m.neg(&acc).unwrap());
            acc = m.add(&acc, &p).unwrap();
        }
    }
}
