//! Restriction of divisor classes of the blow-up to the base curve.
//!
//! A class `a·H + Σ d_i E_i` restricts to `a·(plane section) + Σ d_i [p_i]`.
//! Classes on the curve are stored as a degree together with the group-law
//! sum of their points on the cubic model, which determines the class up to
//! linear equivalence.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::field::PrimeField;
use crate::lattice::{LatticeError, LatticeVector};

use super::cubic::{project_to_cubic, CubicModel, PlanePoint};
use super::quadric::QuadricPencil;
use super::slice::hyperplane_section;
use super::{CurveError, Point3};

/// Largest box the injectivity scan will enumerate.
pub const MAX_SCAN_SIZE: u64 = 2_000_000_000;

/// A divisor class on the base curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PicClass {
    pub degree: i64,
    pub point: PlanePoint,
}

/// The restriction map for one configuration on one base curve.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictionMap {
    pub model: CubicModel,
    /// Group-law sum of a plane section.
    pub hyperplane: PlanePoint,
    /// Images of the configuration points on the cubic.
    pub points: Vec<PlanePoint>,
}

impl RestrictionMap {
    /// Projects from the first configuration point and measures the plane
    /// section class with a random split section.
    pub fn build<R: Rng + ?Sized>(
        config: &Config<PrimeField>,
        pencil: &QuadricPencil,
        rng: &mut R,
    ) -> Result<Self, CurveError> {
        let f = config.field;
        if config.points.is_empty() {
            return Err(CurveError::NotGeneric("empty configuration".into()));
        }
        if let Some(bad) = config.points.iter().position(|p| !pencil.contains(&f, p.coords())) {
            return Err(CurveError::NotOnCurve { index: bad });
        }
        let model = project_to_cubic(&f, pencil, &config.points[0], rng)?;
        Self::with_model(model, &config.points, rng)
    }

    pub fn with_model<R: Rng + ?Sized>(model: CubicModel, points: &[Point3], rng: &mut R) -> Result<Self, CurveError> {
        let section = hyperplane_section(&model.field, &model.pencil, &[], rng)?;
        let mut hyperplane = model.origin;
        for x in &section {
            hyperplane = model.add(&hyperplane, &point_image(&model, x)?)?;
        }
        // planes through the center cut out the center plus a line section
        let oo = model.third_point(&model.origin, &model.origin)?;
        let via_center = model.add(&model.center_image()?, &oo)?;
        if via_center != hyperplane {
            return Err(CurveError::SelfCheck("plane section class disagrees with the projection".into()));
        }
        let points = points.iter().map(|x| point_image(&model, x)).collect::<Result<_, _>>()?;
        Ok(Self { model, hyperplane, points })
    }

    pub fn rank(&self) -> usize {
        self.points.len()
    }

    pub fn zero(&self) -> PicClass {
        PicClass { degree: 0, point: self.model.origin }
    }

    pub fn is_trivial(&self, c: &PicClass) -> bool {
        c.degree == 0 && c.point == self.model.origin
    }

    pub fn hyperplane_class(&self) -> PicClass {
        PicClass { degree: 4, point: self.hyperplane }
    }

    pub fn point_class(&self, x: &Point3) -> Result<PicClass, CurveError> {
        Ok(PicClass { degree: 1, point: point_image(&self.model, x)? })
    }

    pub fn add(&self, a: &PicClass, b: &PicClass) -> Result<PicClass, CurveError> {
        Ok(PicClass { degree: a.degree + b.degree, point: self.model.add(&a.point, &b.point)? })
    }

    pub fn neg(&self, a: &PicClass) -> Result<PicClass, CurveError> {
        Ok(PicClass { degree: -a.degree, point: self.model.neg(&a.point)? })
    }

    pub fn sub(&self, a: &PicClass, b: &PicClass) -> Result<PicClass, CurveError> {
        self.add(a, &self.neg(b)?)
    }

    /// Class of the divisor `Σ x` of a list of curve points.
    pub fn sum_of_points(&self, xs: &[Point3]) -> Result<PicClass, CurveError> {
        xs.iter().try_fold(self.zero(), |acc, x| self.add(&acc, &self.point_class(x)?))
    }

    /// Restriction of the class with coordinates `(a, d_1, …, d_r)`.
    pub fn tr_class(&self, d: &LatticeVector) -> Result<PicClass, CurveError> {
        if d.rank() != self.rank() {
            return Err(LatticeError::RankMismatch { left: d.rank(), right: self.rank() }.into());
        }
        let coeffs = d.to_i64s().ok_or(CurveError::NotGeneric("coefficient exceeds i64".into()))?;
        let m = &self.model;
        let mut point = m.mul(coeffs[0], &self.hyperplane)?;
        let mut degree = 4 * coeffs[0];
        for (c, y) in coeffs[1..].iter().zip(&self.points) {
            point = m.add(&point, &m.mul(*c, y)?)?;
            degree += c;
        }
        Ok(PicClass { degree, point })
    }
}

fn point_image(model: &CubicModel, x: &Point3) -> Result<PlanePoint, CurveError> {
    if *x == model.center {
        model.center_image()
    } else {
        model.forward(x)
    }
}

/// A nonzero class in the box whose restriction is trivial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrViolation {
    pub divisor: Vec<i64>,
    pub odd_hyperplane_coefficient: bool,
}

/// Outcome of scanning every nonzero class with coordinates in `[-B, B]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrScan {
    pub r: usize,
    pub bound: u32,
    /// Nonzero classes in the box.
    pub checked: u64,
    /// Degree-zero classes, split by parity of the hyperplane coefficient.
    pub degree_zero_even: u64,
    pub degree_zero_odd: u64,
    pub violations: Vec<TrViolation>,
}

/// Restricts every nonzero class in the box and reports those that restrict
/// to the trivial class. Classes of nonzero degree can never be trivial, so
/// only degree-zero classes are evaluated.
pub fn tr_injectivity_test(map: &RestrictionMap, bound: u32) -> Result<TrScan, CurveError> {
    let r = map.rank();
    let width = 2 * bound as i64 + 1;
    let total = (width as u64)
        .checked_pow(r as u32 + 1)
        .filter(|&n| n <= MAX_SCAN_SIZE)
        .ok_or(CurveError::NotGeneric(format!("box of width {width} in rank {} is too large", r + 1)))?;
    let m = &map.model;
    let b = bound as i64;
    let generators: Vec<PlanePoint> = std::iter::once(map.hyperplane).chain(map.points.iter().copied()).collect();
    let tables: Vec<Vec<PlanePoint>> = generators
        .iter()
        .map(|g| (-b..=b).map(|c| m.mul(c, g)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;

    let decode = |mut n: u64| -> Vec<i64> {
        (0..=r)
            .map(|_| {
                let c = (n % width as u64) as i64 - b;
                n /= width as u64;
                c
            })
            .collect()
    };
    let hits: Vec<(bool, Option<Vec<i64>>)> = (0..total)
        .into_par_iter()
        .filter_map(|n| {
            let d = decode(n);
            let degree = 4 * d[0] + d[1..].iter().sum::<i64>();
            if degree != 0 || d.iter().all(|&c| c == 0) {
                return None;
            }
            let sum = d.iter().enumerate().try_fold(m.origin, |acc, (j, &c)| {
                if c == 0 {
                    Ok(acc)
                } else {
                    m.add(&acc, &tables[j][(c + b) as usize])
                }
            });
            Some(sum.map(|s| (d[0] % 2 != 0, (s == m.origin).then_some(d))))
        })
        .collect::<Result<_, _>>()?;

    let degree_zero = hits.len() as u64;
    let degree_zero_odd = hits.iter().filter(|(odd, _)| *odd).count() as u64;
    let violations = hits
        .into_iter()
        .filter_map(|(odd, v)| v.map(|divisor| TrViolation { divisor, odd_hyperplane_coefficient: odd }))
        .collect();
    Ok(TrScan {
        r,
        bound,
        checked: total - 1,
        degree_zero_even: degree_zero - degree_zero_odd,
        degree_zero_odd,
        violations,
    })
}

/// Replaces the fourth point by the point making `E_1 + E_2 - E_3 - E_4`
/// restrict trivially. Returns the new configuration and that class.
pub fn plant_collision(
    map: &RestrictionMap,
    config: &Config<PrimeField>,
) -> Result<(Config<PrimeField>, LatticeVector), CurveError> {
    let r = config.len();
    if r < 4 || map.rank() != r {
        return Err(CurveError::RankTooSmall { r, min: 4 });
    }
    let m = &map.model;
    let target = m.sub(&m.add(&map.points[0], &map.points[1])?, &map.points[2])?;
    let planted = m.backward(&target)?;
    if config.points.contains(&planted) {
        return Err(CurveError::NotGeneric("planted point coincides with a configuration point".into()));
    }
    let mut points = config.points.clone();
    points[3] = planted;
    let mut witness = vec![0i64; r + 1];
    witness[1] = 1;
    witness[2] = 1;
    witness[3] = -1;
    witness[4] = -1;
    Ok((Config::new(config.field, points), LatticeVector::from_i64s(&witness)))
}
