//! Relative pose of multi-camera systems from six point correspondences.
//!
//! The rotation is parametrized by a Cayley vector `q`. Every
//! correspondence gives one row of a 6×4 matrix `M(q)` with
//! `M(q) (t, 1)ᵀ = 0`, so the translation is hidden and the rotation is
//! found from the vanishing minors of `M(q)`. Translation follows from the
//! null space of `M` at each rotation root.
//!
//! * [`geometry`]: rotations, rig transforms, essential matrices, error metrics.
//! * [`poly`]: sparse multivariate polynomials.
//! * [`equations`]: `M(q)` and the rotation equations.
//! * [`solver`]: polynomial root finding and translation recovery.
//! * [`minimal`]: generic, inter-camera and intra-camera six-point solvers.
//! * [`ransac`]: robust estimation with angular scoring.
//! * [`synth`]: synthetic scenes and stability experiments.
//! * [`enumerate`]: enumeration of correspondence configurations.
//! * [`io`]: JSON problem and result files.
//! * [`cli`]: the `sixpt` command-line tool.

pub mod cli;
pub mod enumerate;
pub mod equations;
pub mod geometry;
pub mod io;
pub mod minimal;
pub mod poly;
pub mod ransac;
pub mod solver;
pub mod synth;

pub use enumerate::{DirectedMultigraph, MatchType};
pub use equations::{build_equations, EquationSystem, SixPointProblem};
pub use geometry::{CameraExtrinsic, CayleyVec, QuatVec, RayCorrespondence, RigPose};
pub use minimal::{solve, SolverKind};
pub use ransac::{run_ransac, RansacConfig, RansacResult};
pub use solver::{solve_system, SolutionSet, SolverConfig};
pub use synth::{SceneConfig, SyntheticInstance};
