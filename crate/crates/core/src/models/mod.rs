//! Model catalog: native parameter sets, Lévy densities, cumulants, triplets
//! and the quasi-self-dual reparameterisations.

mod cumulant;
mod density;
mod params;
mod qsd_spec;

pub use cumulant::{levy_density, triplet_of};
pub(crate) use cumulant::gamma_fn;
pub use density::{LevyDensity, LevyTriplet};
pub use params::{
    BlackScholesParams, CgmyParams, Family, MeixnerParams, ModelParams, NigParams, VgParams, STRIP_MARGIN,
};
pub use qsd_spec::{qsd_to_native, MeixnerCase, QsdSpec, SymmetricBase, ALPHA_MARGIN};
