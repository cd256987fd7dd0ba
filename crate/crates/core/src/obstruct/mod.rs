//! Square-free cohomology of products of 2-spheres, Euler classes of sums of
//! line bundles, and obstruction certificates built from them.

mod bundle;
mod certificate;
mod ring;
mod tower;

pub use bundle::BundleExpr;
pub use certificate::{
    bott_projection, distance_lower_bound_cert, obstruction_certificate, pp_example, sphere_field, CertificateKind,
    ObstructionCertificate, PpExample,
};
pub use ring::{factorial, linear_power, parse_subset_key, subset_key, SquareFreeClass, MAX_VARIABLES};
pub use tower::{
    l_sequence, villadsen_tower, villadsen_tower_with, BlockFactor, KRule, StageCertificate, VilladsenTower,
    EXACT_VARIABLE_LIMIT, MAX_EXPONENT_BITS, MAX_TOWER_M,
};
