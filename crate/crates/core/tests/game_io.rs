//! Game documents: serialization round trips and parser fuzzing.

mod common;

use cheaptalk::game::{game_from_json, parse_game, Game, State};
use cheaptalk::rational::{one, zero};
use proptest::prelude::*;
use serde_json::{json, Value};

fn assert_invariants(g: &Game) {
    assert!(g.prior() > &zero() && g.prior() < &one());
    assert!(g.num_actions() >= 2);
    assert_ne!(g.state_labels()[0], g.state_labels()[1]);
    let labels = g.actions();
    for (i, a) in labels.iter().enumerate() {
        assert!(!labels[..i].contains(a), "duplicate label {a}");
    }
    let transparent = (0..g.num_actions())
        .all(|a| g.sender_utility(a, State::Theta1) == g.sender_utility(a, State::Theta2));
    assert_eq!(g.is_transparent(), transparent);
}

/// Scalars a fuzzed document may hold where a number is expected.
fn scalar() -> impl Strategy<Value = Value> {
    prop_oneof![
        (-20i64..20).prop_map(|n| json!(n)),
        (-5i64..5, -3i64..6).prop_map(|(p, q)| json!(format!("{p}/{q}"))),
        Just(json!("0.5")),
        Just(json!("x")),
        Just(json!(null)),
        Just(json!(1.25)),
    ]
}

fn row() -> impl Strategy<Value = Value> {
    proptest::collection::vec(scalar(), 0..4).prop_map(Value::Array)
}

fn document() -> impl Strategy<Value = Value> {
    let states = prop_oneof![
        Just(json!(["theta1", "theta2"])),
        Just(json!(["s", "s"])),
        Just(json!(["a", "b", "c"])),
        Just(json!([1, 2])),
        Just(json!("theta")),
    ];
    let actions = proptest::collection::vec(prop_oneof![Just("a"), Just("b"), Just("c"), Just("d")], 0..5)
        .prop_map(|v| json!(v));
    (
        states,
        scalar(),
        actions,
        proptest::collection::vec(row(), 0..5),
        proptest::collection::vec(row(), 0..5),
        any::<u8>(),
    )
        .prop_map(|(states, prior, actions, sender, receiver, drop)| {
            let mut doc = json!({
                "states": states,
                "prior": prior,
                "actions": actions,
                "sender_utility": sender,
                "receiver_utility": receiver,
            });
            // Occasionally remove one field to reach the schema errors.
            let keys = ["states", "prior", "actions", "sender_utility", "receiver_utility"];
            if let Some(key) = keys.get(drop as usize % 16) {
                doc.as_object_mut().unwrap().remove(*key);
            }
            doc
        })
}

proptest! {
    #[test]
    fn serialized_games_parse_back_identically(g in common::game_strategy(false)) {
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back = parse_game(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), text);
    }

    #[test]
    fn fuzzed_documents_parse_only_to_valid_games(doc in document()) {
        if let Ok(g) = game_from_json(&doc) {
            assert_invariants(&g);
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,80}") {
        if let Ok(g) = parse_game(&text) {
            assert_invariants(&g);
        }
    }
}

#[test]
fn decimal_and_fraction_literals_agree() {
    let a = parse_game(
        r#"{"states":["t1","t2"],"prior":0.25,"actions":["x","y"],
            "sender_utility":[[0.5,1],[2,"3/4"]],"receiver_utility":[[1,0],[0,1]]}"#,
    )
    .unwrap();
    let b = parse_game(
        r#"{"states":["t1","t2"],"prior":"1/4","actions":["x","y"],
            "sender_utility":[["1/2",1],[2,0.75]],"receiver_utility":[[1,0],[0,1]]}"#,
    )
    .unwrap();
    assert_eq!(a, b);
}
