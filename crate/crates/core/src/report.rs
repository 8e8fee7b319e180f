//! The full analysis pipeline for one curve.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::{conservative_power_class, dilatation_bounds, BoundsReport};
use crate::curve::{surface_and_filling, taut_obstruction, CurveDiagram, SurfaceSig};
use crate::incidence::incidence_matrix;
use crate::pretrack::{
    build_pretrack, carried_curve_weights, classify_regions, RegionCensus, TrackClass,
};
use crate::render::rational_to_f64;
use crate::spectral::{
    is_primitive, pf_enclosure, row_sum_bound, PfOptions, SpectralEnclosure, SpectralError,
};

pub const CERTIFIED_LABEL: &str = "certified dilatation enclosure";
pub const UNCERTIFIED_LABEL: &str = "PF eigenvalue of M only";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The enclosure brackets the PF eigenvalue of a matrix that need not
    /// carry the dilatation.
    Uncertified,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub name: String,
    pub surface: SurfaceSig,
    pub self_intersections: usize,
    pub filling: bool,
    pub kra_hypothesis: bool,
    pub euler_bound_holds: bool,
    /// Labels of unpunctured monogon and bigon faces.
    pub taut_warnings: Vec<String>,
    pub census: Option<RegionCensus>,
    pub track_class: Option<TrackClass>,
    pub carried_curve: Option<Vec<String>>,
    pub matrix_dim: Option<usize>,
    pub row_sum_bound: Option<String>,
    pub primitive: Option<bool>,
    pub enclosure: Option<SpectralEnclosure>,
    pub enclosure_label: Option<String>,
    pub bounds: Option<BoundsReport>,
    pub sandwich: Verdict,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    /// Process exit status: 1 only when a certified sandwich fails.
    pub fn exit_code(&self) -> i32 {
        if self.sandwich == Verdict::Fail {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "curve {}", self.name);
        let _ = writeln!(s, "  surface            {}", self.surface);
        let _ = writeln!(s, "  self-intersections {}", self.self_intersections);
        let _ = writeln!(s, "  filling            {}", self.filling);
        if !self.taut_warnings.is_empty() {
            let _ = writeln!(s, "  not taut near      {}", self.taut_warnings.join(", "));
        }
        if let Some(c) = &self.census {
            let _ = writeln!(
                s,
                "  regions            {} trigons, {} bigons, {} monogons, {} higher, {} punctured monogons",
                c.trigons, c.bigons, c.monogons, c.higher, c.punctured_monogons
            );
            let _ = writeln!(s, "  track class        {}", c.track_class);
            let _ = writeln!(s, "  euler index sum    {}", c.euler_sum);
        }
        if let Some(r) = &self.row_sum_bound {
            let _ = writeln!(s, "  row sum bound      {r}");
        }
        if let Some(e) = &self.enclosure {
            let label = self.enclosure_label.as_deref().unwrap_or("");
            let _ = writeln!(
                s,
                "  {label}: [{:.12}, {:.12}] after {} iterations",
                e.lo_float, e.hi_float, e.iterations
            );
        }
        if let Some(b) = &self.bounds {
            let upper = b
                .log_upper()
                .map_or("none".to_string(), |u| format!("{u:.6}"));
            let _ = writeln!(s, "  log bounds         [{:.6}, {upper}]", b.log_lower);
        }
        let _ = writeln!(s, "  sandwich           {:?}", self.sandwich);
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}

/// Run every stage that applies to the curve.
pub fn analyze(diagram: &CurveDiagram, opts: &PfOptions) -> AnalysisReport {
    let filling = surface_and_filling(diagram);
    let mut report = AnalysisReport {
        name: diagram.name().to_string(),
        surface: filling.surface,
        self_intersections: diagram.self_intersections(),
        filling: filling.filling,
        kra_hypothesis: filling.kra_hypothesis,
        euler_bound_holds: filling.euler_bound_holds,
        taut_warnings: taut_obstruction(diagram)
            .into_iter()
            .map(|f| f.label)
            .collect(),
        census: None,
        track_class: None,
        carried_curve: None,
        matrix_dim: None,
        row_sum_bound: None,
        primitive: None,
        enclosure: None,
        enclosure_label: None,
        bounds: None,
        sandwich: Verdict::NotApplicable,
        notes: Vec::new(),
    };
    if !filling.filling {
        report
            .notes
            .push("curve does not fill; no pretrack or matrix".into());
        return report;
    }
    if !filling.kra_hypothesis {
        report
            .notes
            .push(format!("{} violates 3g + n > 3", filling.surface));
        return report;
    }
    if !filling.euler_bound_holds {
        report
            .notes
            .push("self-intersection count is below the filling threshold".into());
    }

    let track = match build_pretrack(diagram) {
        Ok(t) => t,
        Err(e) => {
            report.notes.push(e.to_string());
            return report;
        }
    };
    let census = classify_regions(&track);
    let class = census.track_class;
    report.track_class = Some(class);
    report.census = Some(census);
    match carried_curve_weights(diagram) {
        Ok(w) => {
            report.carried_curve = Some(w.entries().iter().map(|x| x.to_string()).collect());
        }
        Err(e) => report.notes.push(format!("carried curve: {e}")),
    }

    let m = match incidence_matrix(diagram) {
        Ok(m) => m.matrix,
        Err(e) => {
            report.notes.push(e.to_string());
            return report;
        }
    };
    report.matrix_dim = Some(m.rows());
    report.row_sum_bound = Some(row_sum_bound(&m).to_string());
    let primitive = is_primitive(&m);
    report.primitive = Some(primitive);

    let bounds = match dilatation_bounds(
        diagram.self_intersections() as u64,
        filling.surface,
        conservative_power_class(filling.surface),
    ) {
        Ok(b) => Some(b),
        Err(e) => {
            report.notes.push(e.to_string());
            None
        }
    };

    let enclosure = match pf_enclosure(&m, opts) {
        Ok(e) => Some(e),
        Err(SpectralError::NonconvergenceBudget(e)) => {
            report.notes.push(format!(
                "iteration cap reached after {} steps",
                e.iterations
            ));
            Some(*e)
        }
        Err(e) => {
            report.notes.push(e.to_string());
            None
        }
    };
    let certified = class.is_certifying();
    report.sandwich = match (&enclosure, &bounds) {
        (Some(e), Some(b)) if certified => {
            let lower_ok = b.log_lower <= rational_to_f64(&e.lo).ln();
            let upper_ok = b
                .log_upper()
                .is_none_or(|u| rational_to_f64(&e.hi).ln() <= u);
            if lower_ok && upper_ok {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        }
        (Some(_), _) => Verdict::Uncertified,
        _ => Verdict::NotApplicable,
    };
    if enclosure.is_some() {
        report.enclosure_label = Some(
            if certified {
                CERTIFIED_LABEL
            } else {
                UNCERTIFIED_LABEL
            }
            .to_string(),
        );
    }
    report.enclosure = enclosure;
    report.bounds = bounds;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gamma0_diagram, winding_curve};

    #[test]
    fn gamma0_passes() {
        let r = analyze(&gamma0_diagram(), &PfOptions::default());
        assert_eq!(r.track_class, Some(TrackClass::TrainTrack));
        assert_eq!(r.row_sum_bound.as_deref(), Some("41"));
        assert_eq!(r.sandwich, Verdict::Pass);
        assert_eq!(r.enclosure_label.as_deref(), Some(CERTIFIED_LABEL));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn winding_curve_is_uncertified() {
        let r = analyze(&winding_curve(2).unwrap(), &PfOptions::default());
        assert_eq!(r.track_class, Some(TrackClass::PretrackOnly));
        assert_eq!(r.sandwich, Verdict::Uncertified);
        assert_eq!(r.enclosure_label.as_deref(), Some(UNCERTIFIED_LABEL));
    }

    #[test]
    fn json_is_deterministic() {
        let a = analyze(&gamma0_diagram(), &PfOptions::default()).to_json();
        let b = analyze(&gamma0_diagram(), &PfOptions::default()).to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["census"]["euler_sum"], "-3/1");
        assert_eq!(v["census"]["track_class"], "train_track");
    }
}
