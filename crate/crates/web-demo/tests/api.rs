use serde_json::{json, Value};

use delayed_bandits_web::{bounds_json, delay_profile_json, simulate_json};

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn simulate_returns_one_curve_per_policy() {
    let config = json!({
        "name": "demo",
        "arms": 3,
        "means": {"kind": "explicit", "values": [0.5, 0.4, 0.3]},
        "delay": {"family": "geometric", "p": 0.05},
        "horizon": 1000,
        "replications": 4,
        "policies": ["ts", "se", "ducb1"],
        "seed": 9
    });
    let out = parse(simulate_json(&config.to_string()));
    let curves = out["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 3);
    for c in curves {
        let rounds = c["rounds"].as_array().unwrap();
        assert_eq!(rounds.len(), 200);
        assert_eq!(rounds.last().unwrap(), 1000);
        assert_eq!(c["mean"].as_array().unwrap().len(), 200);
    }
    // Same input, same output.
    assert_eq!(out, parse(simulate_json(&config.to_string())));
}

#[test]
fn simulate_rejects_bad_or_oversized_configs() {
    assert!(simulate_json("{").is_err());
    let huge = json!({
        "name": "x", "arms": 2,
        "means": {"kind": "explicit", "values": [0.5, 0.4]},
        "delay": {"family": "fixed", "delay": 0},
        "horizon": 100000000, "replications": 1, "policies": ["ts"], "seed": 1
    });
    assert!(simulate_json(&huge.to_string())
        .unwrap_err()
        .contains("limit"));
}

#[test]
fn delay_profile_reports_exact_and_empirical_quantiles() {
    let req = json!({
        "delay": {"family": "geometric", "p": 0.01},
        "arms": 1, "arm": 0, "samples": 200000, "bins": 40, "seed": 3
    });
    let out = parse(delay_profile_json(&req.to_string()));
    assert_eq!(out["lost"], 0);
    let counts: u64 = out["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(counts, 200000);
    let median = &out["quantiles"].as_array().unwrap()[9];
    assert_eq!(median["q"], 0.5);
    assert_eq!(median["exact"], 68.0);
    assert!((median["empirical"].as_f64().unwrap() - 68.0).abs() <= 2.0);
}

#[test]
fn delay_profile_of_lossy_and_queued_arms() {
    let lossy = json!({
        "delay": {"family": "packet_loss", "p": [0.3, 1.0]},
        "arms": 2, "arm": 0, "samples": 10000, "bins": 10, "seed": 1
    });
    let out = parse(delay_profile_json(&lossy.to_string()));
    let lost = out["lost"].as_u64().unwrap();
    assert!((6700..7300).contains(&lost), "{lost}");
    assert!(out["quantiles"].as_array().unwrap()[18]["exact"].is_null());

    let queue = json!({
        "delay": {"family": "queue", "service_rate": 2.0},
        "arms": 1, "arm": 0, "samples": 1000, "bins": 10, "seed": 1
    });
    let out = parse(delay_profile_json(&queue.to_string()));
    assert!(out["quantiles"][0]["exact"].is_null());
    assert!(out["quantiles"][0]["empirical"].is_number());

    let bad = json!({
        "delay": {"family": "fixed", "delay": 1},
        "arms": 1, "arm": 3, "samples": 10, "bins": 10, "seed": 1
    });
    assert!(delay_profile_json(&bad.to_string()).is_err());
}

#[test]
fn bounds_for_two_and_three_arms() {
    let two =
        json!({"means": [0.6, 0.4], "delay": {"family": "fixed", "delay": 40}, "horizon": 10000});
    let out = parse(bounds_json(&two.to_string()));
    let bounds = out["bounds"].as_array().unwrap();
    assert_eq!(bounds[0]["kind"], "ts_two_arm");
    assert_eq!(bounds[1]["kind"], "se");
    assert_eq!(bounds[0]["q_star"], json!([1.0, 1.0]));
    let l = 10000f64.ln();
    let want = 48.0 * l / 0.2 + 30.0 * (32.0 * l / 0.2 + 8.0 + 0.2) + 8.0;
    assert!((bounds[0]["value"].as_f64().unwrap() - want).abs() / want < 1e-9);

    let three = json!({"means": [0.5, 0.4, 0.3], "delay": {"family": "geometric", "p": 0.01}, "horizon": 10000});
    let out = parse(bounds_json(&three.to_string()));
    assert_eq!(out["optimal_arm"], 0);
    assert_eq!(out["bounds"][0]["kind"], "ts_multi_arm");

    let lost = json!({"means": [0.6, 0.4], "delay": {"family": "packet_loss", "p": [0.0, 0.0]}, "horizon": 100});
    let out = parse(bounds_json(&lost.to_string()));
    assert!(out["bounds"][0]["value"].is_null());

    assert!(bounds_json(
        &json!({"means": [0.5, 0.5], "delay": {"family": "fixed", "delay": 0}, "horizon": 100})
            .to_string()
    )
    .is_err());
}

#[test]
fn heavy_tails_are_clipped_into_the_last_bin() {
    let req = json!({
        "delay": {"family": "pareto", "alpha": [0.3]},
        "arms": 1, "arm": 0, "samples": 50000, "bins": 40, "seed": 5
    });
    let out = parse(delay_profile_json(&req.to_string()));
    assert_eq!(out["clipped"], true);
    let counts: u64 = out["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(counts, 50000);
}
