//! Instance files: a JSON schema with rationals as strings, so nothing is
//! ever squeezed through a float.
//!
//! ```json
//! {
//!   "comment": "optional free text",
//!   "seller_neighbors": ["a", "b"],
//!   "buyers": [
//!     {"id": "a", "valuation": "1", "neighbors": ["s", "b"]},
//!     {"id": "b", "valuation": "22/3", "neighbors": ["s", "a"]}
//!   ]
//! }
//! ```
//!
//! The seller's id is the reserved string `"s"`. Every edge must be
//! listed by both endpoints; an asymmetric pair is a validation error
//! naming them. Buyer order in the file fixes the internal ids and with
//! them the deterministic tie-breaking order.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::{format_money, parse_money};
use crate::network::{Network, NodeId};

pub const SELLER_ID: &str = "s";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub seller_neighbors: Vec<String>,
    pub buyers: Vec<BuyerRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuyerRecord {
    pub id: String,
    /// `"p"` or `"p/q"`.
    pub valuation: String,
    pub neighbors: Vec<String>,
}

/// Loads and validates an instance file.
pub fn load_instance(path: &Path) -> Result<Network> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

/// Parses instance JSON; parse errors carry the line and column.
pub fn parse_instance(text: &str) -> Result<Network> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    instance_to_network(&file)
}

pub fn instance_to_network(file: &InstanceFile) -> Result<Network> {
    let mut builder = Network::builder();
    let mut ids: BTreeMap<&str, NodeId> = BTreeMap::new();
    ids.insert(SELLER_ID, NodeId::SELLER);
    for buyer in &file.buyers {
        if buyer.id == SELLER_ID {
            return Err(Error::InvalidInstance(format!(
                "buyer id {SELLER_ID:?} is reserved for the seller"
            )));
        }
        let valuation = parse_money(&buyer.valuation)?;
        if valuation.is_negative() {
            return Err(Error::NegativeValuation {
                buyer: buyer.id.clone(),
            });
        }
        let id = builder.buyer(&buyer.id, valuation);
        if ids.insert(&buyer.id, id).is_some() {
            return Err(Error::DuplicateId {
                id: buyer.id.clone(),
            });
        }
    }

    // directed adjacency as written, for the symmetry check
    let mut declared: std::collections::BTreeSet<(NodeId, NodeId)> = Default::default();
    for n in &file.seller_neighbors {
        let &to = ids.get(n.as_str()).ok_or_else(|| Error::UnknownNeighbor {
            id: SELLER_ID.into(),
            neighbor: n.clone(),
        })?;
        declared.insert((NodeId::SELLER, to));
    }
    for buyer in &file.buyers {
        let from = ids[buyer.id.as_str()];
        for n in &buyer.neighbors {
            let &to = ids.get(n.as_str()).ok_or_else(|| Error::UnknownNeighbor {
                id: buyer.id.clone(),
                neighbor: n.clone(),
            })?;
            if to == from {
                return Err(Error::InvalidInstance(format!(
                    "node {} lists itself as a neighbour",
                    buyer.id
                )));
            }
            declared.insert((from, to));
        }
    }

    let labels: BTreeMap<NodeId, &str> = ids.iter().map(|(l, i)| (*i, *l)).collect();
    for &(from, to) in &declared {
        if !declared.contains(&(to, from)) {
            return Err(Error::AsymmetricEdge {
                a: labels[&from].to_string(),
                b: labels[&to].to_string(),
            });
        }
        if from < to {
            builder.edge(from, to);
        }
    }
    builder.build()
}

/// Converts a network back into the file representation.
pub fn network_to_instance(net: &Network, comment: Option<String>) -> InstanceFile {
    InstanceFile {
        comment,
        seller_neighbors: net
            .seller_neighbors()
            .iter()
            .map(|&n| net.label(n).to_string())
            .collect(),
        buyers: net
            .buyers()
            .map(|b| BuyerRecord {
                id: net.label(b).to_string(),
                valuation: format_money(net.valuation(b)),
                neighbors: net
                    .neighbors(b)
                    .iter()
                    .map(|&n| net.label(n).to_string())
                    .collect(),
            })
            .collect(),
    }
}

/// Serialises an instance to pretty JSON with a trailing newline.
pub fn render_instance(file: &InstanceFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("instance files serialise");
    s.push('\n');
    s
}

pub fn save_instance(net: &Network, comment: Option<String>, path: &Path) -> Result<()> {
    std::fs::write(path, render_instance(&network_to_instance(net, comment)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    #[test]
    fn fixture_round_trips() {
        let net = fixture::network();
        let file = network_to_instance(&net, Some("round trip".into()));
        let text = render_instance(&file);
        let back = parse_instance(&text).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn asymmetric_edge_names_both_endpoints() {
        let text = r#"{
            "seller_neighbors": ["a"],
            "buyers": [
                {"id": "a", "valuation": "1", "neighbors": ["s", "b"]},
                {"id": "b", "valuation": "2", "neighbors": []}
            ]
        }"#;
        match parse_instance(text) {
            Err(Error::AsymmetricEdge { a, b }) => {
                assert_eq!((a.as_str(), b.as_str()), ("a", "b"));
            }
            other => panic!("expected asymmetric edge error, got {other:?}"),
        }
    }

    #[test]
    fn seller_list_must_be_mirrored() {
        let text = r#"{
            "seller_neighbors": ["a"],
            "buyers": [{"id": "a", "valuation": "1", "neighbors": []}]
        }"#;
        assert!(matches!(
            parse_instance(text),
            Err(Error::AsymmetricEdge { .. })
        ));
    }

    #[test]
    fn parse_errors_are_positional() {
        let text = "{\n  \"seller_neighbors\": [,]\n}";
        match parse_instance(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected positional parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_buyer_list_is_a_valid_network() {
        let text = r#"{"seller_neighbors": [], "buyers": []}"#;
        let net = parse_instance(text).unwrap();
        assert_eq!(net.buyer_count(), 0);
    }

    #[test]
    fn rejects_unknown_and_duplicate_and_reserved_ids() {
        let unknown = r#"{
            "seller_neighbors": ["ghost"],
            "buyers": [{"id": "a", "valuation": "1", "neighbors": ["s"]}]
        }"#;
        assert!(matches!(
            parse_instance(unknown),
            Err(Error::UnknownNeighbor { .. })
        ));

        let dup = r#"{
            "seller_neighbors": [],
            "buyers": [
                {"id": "a", "valuation": "1", "neighbors": []},
                {"id": "a", "valuation": "2", "neighbors": []}
            ]
        }"#;
        assert!(matches!(parse_instance(dup), Err(Error::DuplicateId { .. })));

        let reserved = r#"{
            "seller_neighbors": [],
            "buyers": [{"id": "s", "valuation": "1", "neighbors": []}]
        }"#;
        assert!(matches!(
            parse_instance(reserved),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn rejects_bad_valuations() {
        let bad = r#"{
            "seller_neighbors": [],
            "buyers": [{"id": "a", "valuation": "1/0", "neighbors": []}]
        }"#;
        assert!(matches!(parse_instance(bad), Err(Error::BadRational { .. })));

        let negative = r#"{
            "seller_neighbors": [],
            "buyers": [{"id": "a", "valuation": "-3", "neighbors": []}]
        }"#;
        assert!(matches!(
            parse_instance(negative),
            Err(Error::NegativeValuation { .. })
        ));
    }
}
