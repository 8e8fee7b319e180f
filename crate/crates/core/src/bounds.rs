//! Closed-form dilatation bounds, evaluated in the log domain.
//!
//! These are double-precision display values, not certified quantities.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::curve::SurfaceSig;
use crate::render::serialize_float;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

/// How the pushing curve sits in the fundamental group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerClass {
    Primitive,
    /// The square of a primitive element on `S_{0,4}` or `S_{1,2}`.
    #[serde(rename = "square_S04_S12")]
    SquareS04S12,
    /// A second, third or fourth power on `S_{1,1}`.
    #[serde(rename = "power234_S11")]
    Power234S11,
    Other,
}

impl FromStr for PowerClass {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primitive" => Ok(PowerClass::Primitive),
            "square_S04_S12" | "square" => Ok(PowerClass::SquareS04S12),
            "power234_S11" | "power234" => Ok(PowerClass::Power234S11),
            "other" => Ok(PowerClass::Other),
            _ => Err(BoundsError::BadParameters(format!(
                "unknown power class {s:?}"
            ))),
        }
    }
}

impl fmt::Display for PowerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerClass::Primitive => "primitive",
            PowerClass::SquareS04S12 => "square_S04_S12",
            PowerClass::Power234S11 => "power234_S11",
            PowerClass::Other => "other",
        })
    }
}

/// The weakest applicable class on a surface, for curves whose root is unknown.
pub fn conservative_power_class(surface: SurfaceSig) -> PowerClass {
    match (surface.genus, surface.punctures) {
        (0, 4) | (1, 2) => PowerClass::SquareS04S12,
        (1, 1) => PowerClass::Power234S11,
        _ => PowerClass::Other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub self_int: Option<u64>,
    pub surface: SurfaceSig,
    pub power_class: Option<PowerClass>,
    #[serde(serialize_with = "serialize_float")]
    pub log_lower: f64,
    pub log_upper: Option<LogValue>,
    /// The upper endpoint is a strict inequality.
    pub upper_strict: bool,
    #[serde(serialize_with = "serialize_float")]
    pub lower: f64,
    pub upper: Option<LogValue>,
    pub warnings: Vec<String>,
    pub extras: BTreeMap<String, LogValue>,
}

/// A float that serializes with fixed precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LogValue(#[serde(serialize_with = "serialize_float")] pub f64);

impl BoundsReport {
    fn new(
        surface: SurfaceSig,
        log_lower: f64,
        log_upper: Option<f64>,
        upper_strict: bool,
    ) -> Self {
        BoundsReport {
            self_int: None,
            surface,
            power_class: None,
            log_lower,
            log_upper: log_upper.map(LogValue),
            upper_strict,
            lower: log_lower.exp(),
            upper: log_upper.map(|u| LogValue(u.exp())),
            warnings: Vec::new(),
            extras: BTreeMap::new(),
        }
    }

    pub fn log_upper(&self) -> Option<f64> {
        self.log_upper.map(|v| v.0)
    }
}

fn require_kra(surface: SurfaceSig) -> Result<(), BoundsError> {
    if surface.satisfies_kra() {
        Ok(())
    } else {
        Err(BoundsError::HypothesisViolated(format!(
            "{surface} has 3g + n <= 3"
        )))
    }
}

/// Lower and upper bounds on the dilatation of pushing along a filling curve
/// with `i` self-intersections.
pub fn dilatation_bounds(
    i: u64,
    surface: SurfaceSig,
    class: PowerClass,
) -> Result<BoundsReport, BoundsError> {
    require_kra(surface)?;
    if i == 0 {
        return Err(BoundsError::HypothesisViolated(
            "a filling curve self-intersects".into(),
        ));
    }
    let x = i as f64;
    let (g, n) = (surface.genus, surface.punctures);
    let log_lower = match class {
        PowerClass::SquareS04S12 => {
            if !matches!((g, n), (0, 4) | (1, 2)) {
                return Err(BoundsError::HypothesisViolated(format!(
                    "square class needs S_{{0,4}} or S_{{1,2}}, not {surface}"
                )));
            }
            x.ln() / 5.0
        }
        PowerClass::Power234S11 => {
            if (g, n) != (1, 1) {
                return Err(BoundsError::HypothesisViolated(format!(
                    "power class needs S_{{1,1}}, not {surface}"
                )));
            }
            ((x + 1.0) / 2.0).ln() / 5.0
        }
        PowerClass::Primitive | PowerClass::Other => (x + 1.0).ln() / 5.0,
    };
    let log_upper = x * 9f64.ln();
    let mut report = BoundsReport::new(surface, log_lower, Some(log_upper), false);
    report.self_int = Some(i);
    report.power_class = Some(class);
    let floor = 2 * g as i64 + n as i64 - 2;
    let ok = if n == 0 {
        i as i64 > floor
    } else {
        i as i64 >= floor
    };
    if !ok {
        report.warnings.push(format!(
            "i = {i} is below the filling threshold 2g + n - 2 = {floor}{}",
            if n == 0 {
                " (strict on closed surfaces)"
            } else {
                ""
            }
        ));
    }
    Ok(report)
}

/// Bounds on the least dilatation over all point-pushing maps of a surface,
/// or over those with exactly `k` self-intersections.
pub fn least_dilatation_bounds(
    surface: SurfaceSig,
    k: Option<u64>,
) -> Result<BoundsReport, BoundsError> {
    require_kra(surface)?;
    let (g, n) = (surface.genus, surface.punctures);
    let ln11 = 11f64.ln();
    match k {
        None if n == 0 && g >= 2 => {
            let gf = g as f64;
            Ok(BoundsReport::new(
                surface,
                (2.0 * gf).ln() / 5.0,
                Some(gf * ln11),
                true,
            ))
        }
        None => {
            let lower = ((2 * g + n) as f64 - 1.0).ln() / 5.0;
            Ok(BoundsReport::new(surface, lower, None, false))
        }
        Some(k) => {
            if n != 0 || g < 3 {
                return Err(BoundsError::HypothesisViolated(format!(
                    "the stratified bound needs a closed surface of genus >= 3, not {surface}"
                )));
            }
            if k < 3 * g as u64 - 1 {
                return Err(BoundsError::HypothesisViolated(format!(
                    "k = {k} < 3g - 1 = {}",
                    3 * g - 1
                )));
            }
            let kf = k as f64;
            let mut r = BoundsReport::new(
                surface,
                (kf + 1.0).ln() / 5.0,
                Some(kf.ln() + g as f64 * ln11),
                true,
            );
            r.self_int = Some(k);
            Ok(r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    LowerCentral,
    Derived,
    LowerCentralPunctured,
}

impl FromStr for Series {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lower_central" => Ok(Series::LowerCentral),
            "derived" => Ok(Series::Derived),
            "lower_central_punctured" => Ok(Series::LowerCentralPunctured),
            _ => Err(BoundsError::BadParameters(format!("unknown series {s:?}"))),
        }
    }
}

/// Lower bounds for curves deep in the lower central or derived series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraicBound {
    pub series: Series,
    pub k: u64,
    /// Log of the sharp bound, clamped at 0.
    #[serde(serialize_with = "serialize_float")]
    pub log_bound: f64,
    /// Log of the simplified form `2^((k-4)/10)` for the derived series,
    /// clamped at 0; equal to `log_bound` otherwise.
    #[serde(serialize_with = "serialize_float")]
    pub log_simplified: f64,
    /// The raw bound is at most 1 and says nothing.
    pub vacuous: bool,
    /// `3g + n <= 5`: only the slightly weaker variants are proved.
    pub weak_surface: bool,
}

pub fn algebraic_lower_bounds(
    k: u64,
    series: Series,
    surface: SurfaceSig,
) -> Result<AlgebraicBound, BoundsError> {
    if k == 0 {
        return Err(BoundsError::BadParameters(
            "series terms start at k = 1".into(),
        ));
    }
    if !surface.satisfies_kra() {
        return Err(BoundsError::BadParameters(format!(
            "{surface} has 3g + n <= 3"
        )));
    }
    let (g, n) = (surface.genus as f64, surface.punctures);
    let kf = k as f64;
    let raw = match series {
        Series::LowerCentral => (kf.ln() / 8f64.ln()).ln() / 5.0,
        Series::Derived => {
            let e = (k as i64 + 1) / 2 - 2;
            (2f64.powi(e as i32) + 1.0).ln() / 5.0
        }
        Series::LowerCentralPunctured => {
            if n == 0 {
                return Err(BoundsError::BadParameters(
                    "this bound needs a puncture".into(),
                ));
            }
            (kf / (4.0 * g + n as f64 - 1.0)).ln() / 5.0
        }
    };
    let simplified = match series {
        Series::Derived => (kf - 4.0) / 10.0 * 2f64.ln(),
        _ => raw,
    };
    let vacuous = raw.is_nan() || raw < 0.0 || (series == Series::LowerCentral && k < 8);
    Ok(AlgebraicBound {
        series,
        k,
        log_bound: if raw.is_finite() { raw.max(0.0) } else { 0.0 },
        log_simplified: if simplified.is_finite() {
            simplified.max(0.0)
        } else {
            0.0
        },
        vacuous,
        weak_surface: 3 * surface.genus + n <= 5,
    })
}

/// Bounds for the `m`-th power of a primitive curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerCurveBounds {
    pub i_primitive: u64,
    pub m: u64,
    /// Upper bound on the self-intersection number of the power.
    pub intersection_bound: u64,
    #[serde(serialize_with = "serialize_float")]
    pub log_dilatation: f64,
    /// `log_lambda / sqrt(2 i)`.
    #[serde(serialize_with = "serialize_float")]
    pub c: f64,
    /// `c * sqrt(intersection_bound)`, a lower bound for `log_dilatation`.
    #[serde(serialize_with = "serialize_float")]
    pub log_guaranteed: f64,
}

pub fn power_curve_bounds(
    i_primitive: u64,
    m: u64,
    log_lambda: f64,
) -> Result<PowerCurveBounds, BoundsError> {
    if i_primitive == 0 || m == 0 {
        return Err(BoundsError::BadParameters(
            "self-intersection and power must be positive".into(),
        ));
    }
    let intersection_bound = m * m * i_primitive + m - 1;
    let c = log_lambda / (2.0 * i_primitive as f64).sqrt();
    Ok(PowerCurveBounds {
        i_primitive,
        m,
        intersection_bound,
        log_dilatation: m as f64 * log_lambda,
        c,
        log_guaranteed: c * (intersection_bound as f64).sqrt(),
    })
}
