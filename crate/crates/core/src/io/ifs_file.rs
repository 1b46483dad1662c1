//! `.ifs` documents: JSON objects of the form
//!
//! ```text
//! {
//!   "name": "converse pair for f(x) = x",
//!   "maps": [
//!     { "ratio": 0.5, "angle": "0",  "translation": [0, 0] },
//!     { "ratio": 0.5, "angle": "pi", "translation": [1, 0.5] }
//!   ]
//! }
//! ```
//!
//! Angles are radians or one of the literals `"0"` and `"pi"`. Unknown keys
//! are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::similitude::Ifs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum AngleSpec {
    Radians(f64),
    Literal(String),
}

impl AngleSpec {
    fn resolve(&self, index: usize) -> Result<f64> {
        match self {
            Self::Radians(v) => Ok(*v),
            Self::Literal(s) if s == "0" => Ok(0.0),
            Self::Literal(s) if s == "pi" => Ok(std::f64::consts::PI),
            Self::Literal(s) => Err(Error::InvalidArgument(format!(
                "map {index}: angle literal {s:?} is not \"0\" or \"pi\""
            ))),
        }
    }

    fn from_angle(a: f64) -> Self {
        if a == 0.0 {
            Self::Literal("0".into())
        } else if a == std::f64::consts::PI {
            Self::Literal("pi".into())
        } else {
            Self::Radians(a)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    ratio: f64,
    angle: AngleSpec,
    translation: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    maps: Vec<MapSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IfsMetadata {
    pub name: Option<String>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfsDocument {
    pub ifs: Ifs<f64>,
    pub metadata: IfsMetadata,
}

/// Parses a document, reporting syntax errors with line and column and
/// contraction violations with the (0-based) map index.
pub fn parse_ifs_document(text: &str) -> Result<IfsDocument> {
    let doc: DocumentSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let params = doc
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| Ok((m.ratio, m.angle.resolve(i)?, Point::new(m.translation[0], m.translation[1]))))
        .collect::<Result<Vec<_>>>()?;
    Ok(IfsDocument {
        ifs: Ifs::from_params(&params)?,
        metadata: IfsMetadata {
            name: doc.name,
            source: doc.source,
        },
    })
}

pub fn parse_ifs(text: &str) -> Result<Ifs<f64>> {
    parse_ifs_document(text).map(|d| d.ifs)
}

/// Pretty-printed document; parsing it back reproduces every field bit for bit.
pub fn serialize_ifs(ifs: &Ifs<f64>, metadata: &IfsMetadata) -> String {
    let doc = DocumentSpec {
        name: metadata.name.clone(),
        source: metadata.source.clone(),
        maps: ifs
            .maps()
            .iter()
            .map(|m| MapSpec {
                ratio: m.ratio(),
                angle: AngleSpec::from_angle(m.angle()),
                translation: [m.translation().x, m.translation().y],
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("finite values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const CONVERSE: &str = r#"{
        "name": "converse pair for f(x) = x",
        "maps": [
            { "ratio": 0.5, "angle": "0", "translation": [0, 0] },
            { "ratio": 0.5, "angle": 0, "translation": [0.5, 0.5] }
        ]
    }"#;

    #[test]
    fn converse_document() {
        let d = parse_ifs_document(CONVERSE).unwrap();
        let m = d.ifs.maps();
        assert_eq!(d.ifs.ratios(), vec![0.5, 0.5]);
        assert_eq!((m[0].angle(), m[1].angle()), (0.0, 0.0));
        assert_eq!(m[0].translation(), Point::new(0.0, 0.0));
        assert_eq!(m[1].translation(), Point::new(0.5, 0.5));
        assert_eq!(d.metadata.name.as_deref(), Some("converse pair for f(x) = x"));
    }

    #[test]
    fn pi_literal_is_exact() {
        let ifs = parse_ifs(r#"{"maps":[{"ratio":0.5,"angle":"pi","translation":[1,0]}]}"#).unwrap();
        assert_eq!(ifs.maps()[0].angle(), PI);
    }

    #[test]
    fn ratio_out_of_range_names_the_map() {
        let e = parse_ifs(
            r#"{"maps":[{"ratio":0.5,"angle":0,"translation":[0,0]},{"ratio":1.2,"angle":0,"translation":[0,0]}]}"#,
        )
        .unwrap_err();
        assert_eq!(e, Error::InvalidRatio { index: 1, ratio: 1.2 });
    }

    #[test]
    fn malformed_reports_position() {
        let e = parse_ifs("{\n  \"maps\": [\n    { \"ratio\": 0.5, }\n  ]\n}").unwrap_err();
        match e {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let top = parse_ifs(r#"{"maps":[],"colour":"red"}"#).unwrap_err();
        assert!(matches!(top, Error::Parse { .. }), "{top:?}");
        let inner = parse_ifs(r#"{"maps":[{"ratio":0.5,"angle":0,"translation":[0,0],"skew":1}]}"#).unwrap_err();
        assert!(matches!(inner, Error::Parse { .. }), "{inner:?}");
    }

    #[test]
    fn bad_literal_and_empty_maps() {
        assert!(matches!(
            parse_ifs(r#"{"maps":[{"ratio":0.5,"angle":"tau","translation":[0,0]}]}"#),
            Err(Error::InvalidArgument(_))
        ));
        assert_eq!(parse_ifs(r#"{"maps":[]}"#).unwrap_err(), Error::EmptyIfs);
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            maps in prop::collection::vec((1e-9..0.999_999f64, prop_oneof![Just(0.0), Just(PI), 0.0..std::f64::consts::TAU], -1e6..1e6f64, -1e-300..1e300f64), 1..6),
            name in prop::option::of("[a-z ]{0,12}"),
        ) {
            let params: Vec<_> = maps.iter().map(|&(r, a, x, y)| (r, a, Point::new(x, y))).collect();
            let ifs = Ifs::from_params(&params).unwrap();
            let meta = IfsMetadata { name, source: Some("generated".into()) };
            let text = serialize_ifs(&ifs, &meta);
            let back = parse_ifs_document(&text).unwrap();
            for (a, b) in ifs.maps().iter().zip(back.ifs.maps()) {
                prop_assert_eq!(a.ratio().to_bits(), b.ratio().to_bits());
                prop_assert_eq!(a.angle().to_bits(), b.angle().to_bits());
                prop_assert_eq!(a.translation().x.to_bits(), b.translation().x.to_bits());
                prop_assert_eq!(a.translation().y.to_bits(), b.translation().y.to_bits());
            }
            prop_assert_eq!(back.metadata, meta);
        }
    }
}
