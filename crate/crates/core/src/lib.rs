pub mod bounds;
pub mod curve;
pub mod families;
pub mod incidence;
pub mod matrix;
pub mod pretrack;
pub mod render;
pub mod report;
pub mod spectral;
pub mod verify;

pub use curve::{parse_curve, CurveDiagram, CurveError, Handedness, SurfaceSig};
pub use incidence::{incidence_matrix, IncidenceMatrix};
pub use matrix::Matrix;
pub use pretrack::{build_pretrack, classify_regions, TrackClass};
pub use report::{analyze, AnalysisReport, Verdict};
pub use spectral::{pf_enclosure, PfOptions, SpectralEnclosure};
