//! Random streams, integer noise samplers and their analytic tails.

mod rng;
mod samplers;
mod tails;

pub use rng::{label_hash, RngStream};
pub use samplers::{
    bernoulli_exp, sample_discrete_gaussian, sample_discrete_laplace, sample_polya, sample_skellam, DiscreteGaussian,
    DiscreteGaussianParams, DiscreteLaplace, DiscreteLaplaceParams, Polya, PolyaParams, Skellam, SkellamParams,
};
pub use tails::{
    discrete_gaussian_pmf, discrete_gaussian_tail_bound, discrete_laplace_pmf, discrete_laplace_tail, polya_pmf,
    skellam_pmf, skellam_tail_radius,
};
