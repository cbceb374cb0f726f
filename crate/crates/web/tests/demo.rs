use gzsi_web::{lexicalize_all, Demo};

#[test]
fn lexicalizes_with_every_template() {
    let v: serde_json::Value = serde_json::from_str(&lexicalize_all("book_hotel", false).unwrap()).unwrap();
    assert_eq!(v["d1"], "the user wants to book a hotel");
    assert_eq!(v["q1"], "does the user want to book a hotel");
    let caps: serde_json::Value = serde_json::from_str(&lexicalize_all("book_hotel", true).unwrap()).unwrap();
    assert_eq!(caps["q1"], "Does the user want to book a hotel?");
    assert!(lexicalize_all("__", false).is_err());
}

#[test]
fn demo_predicts_and_scores() {
    let demo = Demo::build(11).unwrap();
    assert_eq!(demo.unseen_intents().len(), 5);
    let v: serde_json::Value =
        serde_json::from_str(&demo.predict_json("please reserve a hotel room").unwrap()).unwrap();
    let ranked = v["ranked"].as_array().unwrap();
    assert_eq!(ranked.len(), 20);
    assert_eq!(v["intent"], ranked[0]["intent"]);
    let scores: Vec<f64> = ranked.iter().map(|r| r["score"].as_f64().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    let a: serde_json::Value =
        serde_json::from_str(&demo.acceptability_json("i want to book a hotel").unwrap()).unwrap();
    assert!(a["lp"].as_f64().unwrap() < 0.0);
    assert!(demo.predict_json("  ").is_err());
}
