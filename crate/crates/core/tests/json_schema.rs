use linkage_morse::catalog::{build_catalog, Catalog, CatalogJson};
use linkage_morse::config::{perturb_lengths, LengthVector, PerturbationSpec};
use serde_json::Value;

fn catalog_text(n: usize, lengths: &LengthVector) -> (Catalog, String) {
    let cat = build_catalog(n, lengths).unwrap();
    let text = linkage_morse::json::to_string_pretty(&cat.to_json()).unwrap();
    (cat, text)
}

#[test]
fn entries_have_the_documented_fields() {
    let (_, text) = catalog_text(5, &LengthVector::equilateral(5).unwrap());
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n"], 5);
    assert_eq!(v["lengths"].as_array().unwrap().len(), 5);
    for e in v["entries"].as_array().unwrap() {
        for key in [
            "signs",
            "omega",
            "theta",
            "radius",
            "S_value",
            "index_combinatorial",
            "index_numeric",
            "vertices",
            "xi",
        ] {
            assert!(e.get(key).is_some(), "missing {key}");
        }
        let signs = e["signs"].as_array().unwrap();
        assert_eq!(signs.len(), 5);
        assert!(signs.iter().all(|s| s == 1 || s == -1));
        assert!(e["omega"].is_i64());
        assert!(e["index_combinatorial"].as_u64().unwrap() % 2 == 0);
        assert!(e["index_numeric"].is_null() || e["index_numeric"].is_u64());
        let verts = e["vertices"].as_array().unwrap();
        assert_eq!(verts.len(), 5);
        assert!(verts.iter().all(|p| p.as_array().unwrap().len() == 3));
        assert_eq!(e["xi"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn file_round_trip_is_lossless() {
    let lengths = perturb_lengths(9, PerturbationSpec::new(0.01, 17).unwrap()).unwrap();
    let (cat, text) = catalog_text(9, &lengths);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c9.json");
    std::fs::write(&path, &text).unwrap();
    let json: CatalogJson = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let back = Catalog::from_json(&json).unwrap();

    // every real written to the file survives a second trip
    let again = back.to_json();
    for (a, b) in again.entries.iter().zip(&json.entries) {
        for (p, q) in a.vertices.iter().zip(&b.vertices) {
            for (x, y) in p.iter().zip(q) {
                assert!((x - y).abs() <= 1e-15, "{x} vs {y}");
            }
        }
        assert_eq!(a.xi, b.xi);
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.radius, b.radius);
        assert_eq!(a.s_value, b.s_value);
    }

    assert_eq!(back.lengths, cat.lengths);
    assert_eq!(back.len(), cat.len());
    for (a, b) in back.entries.iter().zip(&cat.entries) {
        assert_eq!(a.ctype, b.ctype);
        assert_eq!(a.index_combinatorial, b.index_combinatorial);
        assert_eq!(a.index_numeric, b.index_numeric);
        assert!((a.radius - b.radius).abs() <= 1e-15 * b.radius.max(1.0));
        assert!((a.s_value - b.s_value).abs() <= 1e-15);
        assert!((a.theta() - b.theta()).abs() <= 1e-15);
        for (u, v) in a.config.edges().iter().zip(b.config.edges()) {
            assert!((u - v).amax() <= 1e-13);
        }
        assert!((a.config.xi() - b.config.xi()).amax() <= 1e-15);
    }
}

#[test]
fn malformed_input_is_rejected() {
    let (_, text) = catalog_text(5, &LengthVector::equilateral(5).unwrap());
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["entries"][0]["omega"] = Value::from(7);
    let json: CatalogJson = serde_json::from_value(v).unwrap();
    assert!(Catalog::from_json(&json).is_err());

    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["lengths"] = serde_json::json!([1.0, 1.0, 1.0, 1.0]);
    assert!(serde_json::from_value::<CatalogJson>(v.clone())
        .map(|j| Catalog::from_json(&j).is_err())
        .unwrap_or(true));
}
