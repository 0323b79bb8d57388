//! Mapping radii of finite metric spaces, Arens-Eells norms and polytope
//! parkability, computed in exact rational arithmetic where possible.

pub mod arens_eells;
pub mod euclid;
pub mod io;
pub mod lp;
pub mod metric;
pub mod park;
pub mod radius;
pub mod rational;

pub use arens_eells::{
    ae_norm, boundary, enumerate_acyclic_plans, plan_from_forest, AeError, SignedMeasure,
    TransportPlan,
};
pub use euclid::{euclidean_map_rad_search, meb_euclidean, EuclideanBall, SearchParams, SearchResult};
pub use io::{parse_input, Input, IoError, Kind};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus};
pub use metric::{
    builtin, builtin_space, discretize_graph, graph_metric, kuratowski_embedding, Builtin,
    EmbeddedPointSet, FiniteMetricSpace, MetricError, Norm, WeightedGraph,
};
pub use park::{
    center_of_symmetry, is_parkable, parkability_report, section_polytope, Hyperplane, ParkError,
    PolytopeH, PolytopeV,
};
pub use radius::{
    chebyshev_supnorm, enlargement_radius, map_corad_bruteforce, map_rad_bruteforce, map_rad_conv,
    map_rad_nmv, sextuple, ConvRadiusResult, NmvRadiusResult, RadiusError, Sextuple, Within,
};
pub use rational::{q, Rational};
