use super::{Annotation, DataError};
use crate::geometry::{min_area_obb, Point, Polygon};
use crate::postprocess::Detection;

const HEADER_PREFIXES: [&str; 2] = ["imagesource:", "gsd:"];

fn parse_err(line: usize, message: impl Into<String>) -> DataError {
    DataError::Parse { line, message: message.into() }
}

fn parse_coords(tokens: &[&str], line: usize) -> Result<Vec<Point>, DataError> {
    let mut values = [0.0; 8];
    for (v, tok) in values.iter_mut().zip(tokens) {
        *v = tok
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| parse_err(line, format!("invalid coordinate {tok:?}")))?;
    }
    Ok(values.chunks(2).map(|c| Point::new(c[0], c[1])).collect())
}

/// Parses a DOTA annotation file.
///
/// Each object line is `x1 y1 x2 y2 x3 y3 x4 y4 category difficult`.
/// `imagesource:`/`gsd:` header lines and blank lines are skipped. Outlines
/// with zero area are rejected.
pub fn parse_dota(text: &str) -> Result<Vec<Annotation>, DataError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || HEADER_PREFIXES.iter().any(|p| line.starts_with(p)) {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 10 {
            return Err(parse_err(line_no, format!("expected 10 fields, found {}", tokens.len())));
        }
        let quad = Polygon::new(parse_coords(&tokens[..8], line_no)?)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        min_area_obb(&quad).map_err(|e| parse_err(line_no, e.to_string()))?;
        let difficult = match tokens[9] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(line_no, format!("difficult flag must be 0 or 1, got {other:?}"))),
        };
        out.push(Annotation { quad, category: tokens[8].to_string(), difficult });
    }
    Ok(out)
}

/// Renders annotations in the format read by [`parse_dota`].
pub fn format_annotations(annots: &[Annotation]) -> String {
    let mut s = String::new();
    for a in annots {
        for p in a.quad.vertices() {
            s.push_str(&format!("{:.4} {:.4} ", p.x, p.y));
        }
        s.push_str(&format!("{} {}\n", a.category, u8::from(a.difficult)));
    }
    s
}

/// `image_id score x1 y1 ... x4 y4` for one detection.
pub fn format_result_line(det: &Detection, image_id: &str) -> String {
    let mut s = format!("{image_id} {:.6}", det.score);
    for p in det.obb.corners().vertices() {
        s.push_str(&format!(" {:.4} {:.4}", p.x, p.y));
    }
    s
}

/// Groups detections into per-class result lines, one entry per class name
/// in order, including classes without detections.
pub fn write_results(
    dets: &[Detection],
    class_names: &[String],
    image_id: &str,
) -> Result<Vec<(String, Vec<String>)>, DataError> {
    let mut out: Vec<(String, Vec<String>)> =
        class_names.iter().map(|n| (n.clone(), Vec::new())).collect();
    for d in dets {
        let slot = out
            .get_mut(d.class_index)
            .ok_or(DataError::ClassOutOfRange { index: d.class_index, num_classes: class_names.len() })?;
        slot.1.push(format_result_line(d, image_id));
    }
    Ok(out)
}

/// One parsed line of a per-class result file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub image_id: String,
    pub detection: Detection,
}

/// Parses a per-class result file, tagging every detection with
/// `class_index`. Boxes are the minimum-area rectangles of the listed quads.
pub fn parse_results(text: &str, class_index: usize) -> Result<Vec<ResultRecord>, DataError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 10 {
            return Err(parse_err(line_no, format!("expected 10 fields, found {}", tokens.len())));
        }
        let score = tokens[1]
            .parse::<f64>()
            .ok()
            .filter(|s| (0.0..=1.0).contains(s))
            .ok_or_else(|| parse_err(line_no, format!("invalid score {:?}", tokens[1])))?;
        let quad = Polygon::new(parse_coords(&tokens[2..], line_no)?)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        let obb = min_area_obb(&quad).map_err(|e| parse_err(line_no, e.to_string()))?;
        out.push(ResultRecord {
            image_id: tokens[0].to_string(),
            detection: Detection::new(obb, class_index, score),
        });
    }
    Ok(out)
}
