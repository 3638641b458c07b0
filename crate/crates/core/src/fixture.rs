//! The reference example network used throughout the test suite and the
//! CLI `fixture` subcommand.
//!
//! Fourteen buyers `a..n` hang off a seller `s`. The graph exercises every
//! structural case the mechanisms care about: a deep chain (`b-l-m-n`), a
//! two-connected middle block (`f,g,h,j,k` between `b` and `l`), and side
//! branches (`a`, `c`, `d-i`, `e`) that keep the residual markets
//! non-trivial.

use crate::network::{Network, NodeId};
use crate::money::int;

const VALUATIONS: [(&str, i64); 14] = [
    ("a", 1),
    ("b", 2),
    ("c", 3),
    ("d", 4),
    ("e", 8),
    ("f", 4),
    ("g", 6),
    ("h", 11),
    ("i", 7),
    ("j", 5),
    ("k", 10),
    ("l", 13),
    ("m", 14),
    ("n", 1),
];

const EDGES: [(&str, &str); 16] = [
    ("s", "a"),
    ("s", "b"),
    ("s", "c"),
    ("s", "d"),
    ("d", "i"),
    ("b", "e"),
    ("b", "f"),
    ("b", "g"),
    ("b", "h"),
    ("f", "j"),
    ("g", "j"),
    ("j", "l"),
    ("h", "k"),
    ("k", "l"),
    ("l", "m"),
    ("m", "n"),
];

/// Builds the reference network.
pub fn network() -> Network {
    let mut b = Network::builder();
    let mut ids = vec![NodeId::SELLER];
    for (label, v) in VALUATIONS {
        ids.push(b.buyer(label, int(v)));
    }
    let lookup = |label: &str| -> NodeId {
        if label == "s" {
            NodeId::SELLER
        } else {
            ids[(label.as_bytes()[0] - b'a') as usize + 1]
        }
    };
    for (x, y) in EDGES {
        b.edge(lookup(x), lookup(y));
    }
    b.build().expect("reference network is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let net = network();
        assert_eq!(net.buyer_count(), 14);
        assert_eq!(net.seller_neighbors().len(), 4);
        assert_eq!(net.valuation(net.node_by_label("m").unwrap()), &int(14));
        assert!(net.has_edge(
            net.node_by_label("k").unwrap(),
            net.node_by_label("l").unwrap()
        ));
    }
}
