//! Toolkit for the rigidity of self-similar function graphs: the graph of a
//! continuous function on a compact interval is the attractor of a finite
//! system of planar similitudes exactly when the function is affine.
//!
//! Every numeric routine is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which is what the file
//! formats and the command-line tool use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affine;
pub mod attractor;
pub mod cover;
pub mod direction;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod optim;
pub mod scalar;
pub mod similitude;
pub mod verifier;

pub use affine::{
    cantor_refine, certify_affine, converse_ifs, find_slope_subinterval, slope_invariance_check, AffineCertificate,
    AffineVerdict, CantorStage, SlopeWitness,
};
pub use attractor::{chaos_game, hausdorff_distance, hutchinson_step, iterate_attractor, PointSet};
pub use cover::{
    certify_lipschitz, depth_for_width, generate_intervals, minimal_subcover, CoverCertificate, LipschitzCertificate,
};
pub use direction::{
    admissible_rotations, contains_arc, invariance_check, phi_image, rotation_orbit_cover, ArcReport, DirectionSet,
    OrbitCover, RotationVerdict,
};
pub use error::{Error, Result};
pub use graph::{framing_rectangle, oscillation, sample, FunctionSpec, SampledGraph};
pub use geometry::{project_x, Interval, Point, Rectangle};
pub use scalar::Real;
pub use verifier::{
    fit_similitudes, rigidity_verdict, self_similarity_residual, FitOptions, FitResult, RigidityConfig, RigidityReport,
    RigidityVerdict, RotationRestriction,
};
pub use similitude::{
    classify_rotation, compose_word, moran_dimension, AxisSimilitude, Ifs, RotationClass, Similitude, Word,
};

pub type Point64 = Point<f64>;
pub type Interval64 = Interval<f64>;
pub type Rectangle64 = Rectangle<f64>;
pub type Similitude64 = Similitude<f64>;
pub type Ifs64 = Ifs<f64>;

pub type Point32 = Point<f32>;
pub type Similitude32 = Similitude<f32>;
pub type Ifs32 = Ifs<f32>;
pub type PointSet64 = PointSet<f64>;
pub type FunctionSpec64 = FunctionSpec<f64>;
pub type SampledGraph64 = SampledGraph<f64>;
pub type DirectionSet64 = DirectionSet<f64>;
