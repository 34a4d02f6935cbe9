//! JSON input formats for fans and bundles.
//!
//! A fan file is an object with `rank`, `rays` (integer vectors) and
//! `cones` (ray index lists).  A bundle file either gives `rank` and
//! `filtrations` — an object mapping ray indices to jump lists, where
//! each jump carries the vectors newly present at that value, entries
//! written as integers or `"p/q"` strings — or, for an invertible sheaf,
//! just `cartier`: one ambient weight vector per maximal cone, which is
//! expanded to jump data and cross-checked for consistency.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::algebra::rational::{parse_rat, Rat};
use crate::fan::Fan;
use crate::klyachko::{
    cartier_to_filtrations, FiltrationStep, KlyachkoData, KlyachkoError, RayFiltration,
};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("bad rational entry: {0}")]
    BadRational(String),
    #[error("filtration key {0:?} is not a ray index")]
    BadRayKey(String),
    #[error("ray {0} appears twice in the filtration table")]
    DuplicateRayKey(usize),
    #[error("ray {0} has no filtration")]
    MissingRay(usize),
    #[error("ray index {got} out of range, fan has {rays} rays")]
    RayOutOfRange { got: usize, rays: usize },
    #[error("exactly one of `filtrations` and `cartier` must be given")]
    WrongVariant,
    #[error("`rank` is required with `filtrations`")]
    MissingRank,
    #[error(transparent)]
    Data(#[from] KlyachkoError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanJson {
    rank: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
}

/// Parses a fan description; structural validation is the caller's job.
pub fn parse_fan_json(text: &str) -> Result<Fan, JsonError> {
    let f: FanJson = serde_json::from_str(text)?;
    Ok(Fan::from_parts(f.rank, f.rays, f.cones))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryJson {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    jump: i64,
    vectors: Vec<Vec<EntryJson>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleJson {
    rank: Option<usize>,
    filtrations: Option<BTreeMap<String, Vec<StepJson>>>,
    cartier: Option<Vec<Vec<i64>>>,
}

fn entry_to_rat(e: &EntryJson) -> Result<Rat, JsonError> {
    match e {
        EntryJson::Int(n) => Ok(crate::algebra::rational::rint(*n)),
        EntryJson::Text(s) => {
            parse_rat(s).map_err(|_| JsonError::BadRational(s.clone()))
        }
    }
}

/// Parses bundle data against a known fan (needed to expand the
/// per-cone shorthand and to check ray coverage).
pub fn parse_bundle_json(text: &str, fan: &Fan) -> Result<KlyachkoData, JsonError> {
    let b: BundleJson = serde_json::from_str(text)?;
    match (b.filtrations, b.cartier) {
        (Some(table), None) => {
            let rank = b.rank.ok_or(JsonError::MissingRank)?;
            let rays = fan.rays().len();
            let mut parsed: BTreeMap<usize, RayFiltration> = BTreeMap::new();
            for (key, steps) in table {
                let ray: usize =
                    key.trim().parse().map_err(|_| JsonError::BadRayKey(key.clone()))?;
                if ray >= rays {
                    return Err(JsonError::RayOutOfRange { got: ray, rays });
                }
                if parsed.contains_key(&ray) {
                    return Err(JsonError::DuplicateRayKey(ray));
                }
                let steps = steps
                    .into_iter()
                    .map(|s| {
                        let vectors = s
                            .vectors
                            .iter()
                            .map(|v| v.iter().map(entry_to_rat).collect())
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(FiltrationStep { jump: s.jump, vectors })
                    })
                    .collect::<Result<Vec<_>, JsonError>>()?;
                parsed.insert(ray, RayFiltration::new(steps));
            }
            for ray in 0..rays {
                if !parsed.contains_key(&ray) {
                    return Err(JsonError::MissingRay(ray));
                }
            }
            Ok(KlyachkoData { rank, filtrations: parsed.into_values().collect() })
        }
        (None, Some(weights)) => Ok(cartier_to_filtrations(fan, &weights)?),
        _ => Err(JsonError::WrongVariant),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{rfrac, rint};

    fn p2() -> Fan {
        crate::builtins::builtin_fan("p2").unwrap()
    }

    #[test]
    fn fan_round_trip() {
        let text = r#"{ "rank": 2,
                        "rays": [[1,0],[0,1],[-1,-1]],
                        "cones": [[0,1],[1,2],[2,0]] }"#;
        let fan = parse_fan_json(text).unwrap();
        assert_eq!(fan, p2());
        assert!(fan.validate().is_empty());
    }

    #[test]
    fn fan_rejects_unknown_fields() {
        let text = r#"{ "rank": 1, "rays": [[1],[-1]], "cones": [[0],[1]], "extra": 3 }"#;
        assert!(matches!(parse_fan_json(text), Err(JsonError::Syntax(_))));
    }

    #[test]
    fn filtration_table_with_fractions() {
        let text = r#"{
            "rank": 2,
            "filtrations": {
                "0": [ { "jump": 1, "vectors": [[1, 0]] },
                       { "jump": 0, "vectors": [["1/2", 1]] } ],
                "1": [ { "jump": 0, "vectors": [[1, 0], [0, 1]] } ],
                "2": [ { "jump": 0, "vectors": [[1, 0], [0, 1]] } ]
            }
        }"#;
        let data = parse_bundle_json(text, &p2()).unwrap();
        assert_eq!(data.rank, 2);
        assert_eq!(data.filtrations[0].steps()[0].jump, 0);
        assert_eq!(data.filtrations[0].steps()[0].vectors[0], vec![rfrac(1, 2), rint(1)]);
        data.validate(&p2()).unwrap();
    }

    #[test]
    fn cartier_shorthand_expands() {
        let text = r#"{ "cartier": [[0,0],[-1,0],[0,-1]] }"#;
        let data = parse_bundle_json(text, &p2()).unwrap();
        assert_eq!(data.rank, 1);
        let jumps: Vec<i64> = (0..3).map(|r| data.filtrations[r].jumps()[0]).collect();
        assert_eq!(jumps, vec![0, 0, 1]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let fan = p2();
        assert!(matches!(
            parse_bundle_json(r#"{ "rank": 1 }"#, &fan),
            Err(JsonError::WrongVariant)
        ));
        assert!(matches!(
            parse_bundle_json(
                r#"{ "cartier": [[0,0]], "rank": 1,
                     "filtrations": { "0": [] } }"#,
                &fan
            ),
            Err(JsonError::WrongVariant)
        ));
        let missing = r#"{ "rank": 1, "filtrations": { "0": [ { "jump": 0, "vectors": [[1]] } ] } }"#;
        assert!(matches!(parse_bundle_json(missing, &fan), Err(JsonError::MissingRay(1))));
        let bad_key = r#"{ "rank": 1, "filtrations": { "x": [] } }"#;
        assert!(matches!(parse_bundle_json(bad_key, &fan), Err(JsonError::BadRayKey(_))));
        let bad_rat = r#"{ "rank": 1, "filtrations": {
            "0": [ { "jump": 0, "vectors": [["1/0"]] } ],
            "1": [ { "jump": 0, "vectors": [[1]] } ],
            "2": [ { "jump": 0, "vectors": [[1]] } ] } }"#;
        assert!(matches!(parse_bundle_json(bad_rat, &fan), Err(JsonError::BadRational(_))));
        let out_of_range = r#"{ "rank": 1, "filtrations": { "9": [] } }"#;
        assert!(matches!(
            parse_bundle_json(out_of_range, &fan),
            Err(JsonError::RayOutOfRange { got: 9, rays: 3 })
        ));
        let inconsistent = r#"{ "cartier": [[0,0],[-1,0],[1,1]] }"#;
        assert!(matches!(parse_bundle_json(inconsistent, &fan), Err(JsonError::Data(_))));
    }
}
