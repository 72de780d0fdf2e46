//! Dataset files: CSV rows `x,y,color` or JSON `{"points":[{"x":"0","y":"0","c":"R"}]}`.

use serde::{Deserialize, Serialize};

use crate::geom::{Color, LabeledPoint};
use crate::rat::{parse_rat, rat_str};
use crate::Error;

#[derive(Serialize, Deserialize)]
struct JsonPoint {
    x: String,
    y: String,
    c: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct JsonDataset {
    points: Vec<JsonPoint>,
}

/// Parses CSV text. A header line starting with `x` is skipped, as are blank
/// lines and lines starting with `#`. Ids are assigned by row order.
pub fn parse_csv(text: &str) -> Result<Vec<LabeledPoint>, Error> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if out.is_empty() && line.to_ascii_lowercase().starts_with('x') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected x,y,color", lineno + 1)));
        }
        let x = parse_rat(cols[0])?;
        let y = parse_rat(cols[1])?;
        let color = Color::from_letter(cols[2])?;
        let id = out.len();
        out.push(LabeledPoint::new(x, y, color, id));
    }
    Ok(out)
}

pub fn parse_json(text: &str) -> Result<Vec<LabeledPoint>, Error> {
    let ds: JsonDataset = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    ds.points
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(LabeledPoint::new(parse_rat(&p.x)?, parse_rat(&p.y)?, Color::from_letter(&p.c)?, p.id.unwrap_or(i)))
        })
        .collect()
}

/// Picks the format from the first non-blank character.
pub fn parse_dataset(text: &str) -> Result<Vec<LabeledPoint>, Error> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

pub fn write_csv(pts: &[LabeledPoint]) -> String {
    let mut s = String::from("x,y,color\n");
    for p in pts {
        s.push_str(&format!("{},{},{}\n", rat_str(&p.point.x), rat_str(&p.point.y), p.color.letter()));
    }
    s
}

pub fn write_json(pts: &[LabeledPoint]) -> String {
    let ds = JsonDataset {
        points: pts
            .iter()
            .map(|p| JsonPoint {
                x: rat_str(&p.point.x),
                y: rat_str(&p.point.y),
                c: p.color.letter().to_string(),
                id: Some(p.id),
            })
            .collect(),
    };
    serde_json::to_string(&ds).expect("dataset serializes")
}
