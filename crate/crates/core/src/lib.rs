//! Single-item diffusion auctions on social networks.
//!
//! A seller with no global view of the network asks her neighbours to
//! invite theirs, growing the market invitation by invitation. The fair
//! diffusion mechanism allocates the item along the highest bidder's
//! chain of cut vertices and redistributes part of the price gap to the
//! buyers who jointly keep that chain connected. The crate ships the fair
//! mechanism, the strong-ancestor-only baseline and a neighbour-only
//! second-price auction, all over exact rational arithmetic, together
//! with a verifier that brute-forces their incentive properties at desk
//! scale.

#![forbid(unsafe_code)]

pub mod critical;
mod error;
pub mod exec;
pub mod fixture;
pub mod generator;
pub mod graph;
pub mod instance;
pub mod mechanisms;
pub mod money;
pub mod network;
pub mod verifier;

pub use error::{Error, Result};
pub use graph::{build_effective_graph, EffectiveGraph};
pub use mechanisms::{Mechanism, Outcome, TieBreak};
pub use money::{Bid, Money};
pub use network::{ActionProfile, Network, NodeId, Report};
