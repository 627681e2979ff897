//! Hall planes from first principles: the Hall quasifield over `F_q`, the
//! projective completion of its affine plane, three collineation subgroups,
//! and exhaustive searches for Pappus and Desargues configurations.

pub mod collineations;
pub mod constructions;
pub mod configs;
pub mod coordsys;
pub mod error;
pub mod field;
pub mod plane;

pub use collineations::{canonicalize_pair, Collineation, Mat2, PairCase};
pub use configs::{pappus_check, LinePair, Mode, PairSet, PointScope, Question, QuestionVerdict, SearchOptions, Sextuple};
pub use coordsys::{find_defining_quadratic, HallElement, HallSystem};
pub use error::{Error, FieldError, Result};
pub use field::PrimePowerField;
pub use plane::{build_plane, Coordinates, Line, LineClass, LineId, PlaneKind, PlaneTables, Point, PointId};
