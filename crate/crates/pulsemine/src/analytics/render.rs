//! Report rendering to CSV, JSON, and SVG.
//!
//! Output is a pure function of the report value: no clocks, no locale,
//! fixed float formatting. Rendering the same report twice must produce
//! identical bytes, which is what makes the files diffable.

use serde::Serialize;

use super::{
    AnalyticsError, AspectReport, DeltaReport, PolarityShare, Result, VolumeSeries,
};
use crate::docstore::format_timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Report {
    Volume(VolumeSeries),
    Shares(PolarityShare),
    Delta(DeltaReport),
    Aspects(AspectReport),
}

impl Report {
    pub fn kind(&self) -> &'static str {
        match self {
            Report::Volume(_) => "volume",
            Report::Shares(_) => "shares",
            Report::Delta(_) => "delta",
            Report::Aspects(_) => "aspects",
        }
    }
}

pub fn render_report(report: &Report, format: Format) -> Result<Vec<u8>> {
    let unsupported = || AnalyticsError::UnsupportedFormat {
        report: report.kind(),
        format: format.as_str(),
    };
    let bytes = match (report, format) {
        (Report::Volume(series), Format::Csv) => volume_csv(series),
        (Report::Volume(series), Format::Json) => volume_json(series),
        (Report::Volume(series), Format::Svg) => volume_svg(series),
        (Report::Shares(share), Format::Csv) => shares_csv(share),
        (Report::Shares(share), Format::Json) => shares_json(share),
        (Report::Shares(share), Format::Svg) => shares_svg(share),
        (Report::Delta(delta), Format::Json) => delta_json(delta),
        (Report::Aspects(aspects), Format::Csv) => aspects_csv(aspects),
        (Report::Aspects(aspects), Format::Json) => aspects_json(aspects),
        _ => return Err(unsupported()),
    };
    Ok(bytes)
}

fn volume_csv(series: &VolumeSeries) -> Vec<u8> {
    let mut out = String::from("bucket_start,count\n");
    for (start, count) in &series.points {
        out.push_str(&format!("{},{}\n", format_timestamp(*start), count));
    }
    out.into_bytes()
}

#[derive(Serialize)]
struct VolumePointJson {
    bucket_start: String,
    count: u64,
}

#[derive(Serialize)]
struct VolumeJson<'a> {
    entity_id: &'a str,
    bucket: &'static str,
    points: Vec<VolumePointJson>,
}

fn volume_json(series: &VolumeSeries) -> Vec<u8> {
    let value = VolumeJson {
        entity_id: &series.entity_id,
        bucket: series.bucket.as_str(),
        points: series
            .points
            .iter()
            .map(|(start, count)| VolumePointJson {
                bucket_start: format_timestamp(*start),
                count: *count,
            })
            .collect(),
    };
    to_json_bytes(&value)
}

fn shares_csv(share: &PolarityShare) -> Vec<u8> {
    let mut out =
        String::from("window_from,window_to,total,positive_pct,negative_pct,neutral_pct\n");
    out.push_str(&format!(
        "{},{},{},{:.3},{:.3},{:.3}\n",
        format_timestamp(share.from),
        format_timestamp(share.to),
        share.total,
        share.shares[0],
        share.shares[1],
        share.shares[2],
    ));
    out.into_bytes()
}

#[derive(Serialize)]
struct SharesJson {
    total: u64,
    positive_pct: f64,
    negative_pct: f64,
    neutral_pct: f64,
}

fn shares_json(share: &PolarityShare) -> Vec<u8> {
    let value = SharesJson {
        total: share.total,
        positive_pct: share.shares[0],
        negative_pct: share.shares[1],
        neutral_pct: share.shares[2],
    };
    to_json_bytes(&value)
}

#[derive(Serialize)]
struct TripleJson<T> {
    positive: T,
    negative: T,
    neutral: T,
}

#[derive(Serialize)]
struct DeltaJson {
    exact: TripleJson<f64>,
    rounded: TripleJson<i64>,
}

fn delta_json(delta: &DeltaReport) -> Vec<u8> {
    let value = DeltaJson {
        exact: TripleJson {
            positive: delta.exact[0],
            negative: delta.exact[1],
            neutral: delta.exact[2],
        },
        rounded: TripleJson {
            positive: delta.rounded[0],
            negative: delta.rounded[1],
            neutral: delta.rounded[2],
        },
    };
    to_json_bytes(&value)
}

fn aspects_csv(aspects: &AspectReport) -> Vec<u8> {
    let mut out = String::from("term,count,positive,negative,neutral\n");
    for (term, entry) in &aspects.entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(term),
            entry.count,
            entry.by_polarity[0],
            entry.by_polarity[1],
            entry.by_polarity[2],
        ));
    }
    out.into_bytes()
}

#[derive(Serialize)]
struct AspectTermJson<'a> {
    term: &'a str,
    count: u64,
    positive: u64,
    negative: u64,
    neutral: u64,
}

#[derive(Serialize)]
struct AspectsJson<'a> {
    terms: Vec<AspectTermJson<'a>>,
}

fn aspects_json(aspects: &AspectReport) -> Vec<u8> {
    let value = AspectsJson {
        terms: aspects
            .entries
            .iter()
            .map(|(term, entry)| AspectTermJson {
                term,
                count: entry.count,
                positive: entry.by_polarity[0],
                negative: entry.by_polarity[1],
                neutral: entry.by_polarity[2],
            })
            .collect(),
    };
    to_json_bytes(&value)
}

fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

/// Quotes a CSV field only when it would otherwise break the row.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// Shared chart geometry: 640x320 canvas, plot area x 60..620, y 20..280.
const CANVAS: &str = r##"<svg xmlns="http://www.w3.org/2000/svg" width="640" height="320" viewBox="0 0 640 320">
<rect width="640" height="320" fill="#ffffff"/>
"##;
const AXES: &str = r##"<line x1="60" y1="280" x2="620" y2="280" stroke="#444444" stroke-width="1"/>
<line x1="60" y1="20" x2="60" y2="280" stroke="#444444" stroke-width="1"/>
"##;

fn volume_svg(series: &VolumeSeries) -> Vec<u8> {
    let mut out = String::from(CANVAS);
    out.push_str(&format!(
        "<text x=\"320\" y=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{} volume per {}</text>\n",
        xml_escape(&series.entity_id),
        series.bucket.as_str(),
    ));
    out.push_str(AXES);
    let max = series.points.iter().map(|(_, c)| *c).max().unwrap_or(0);
    if max > 0 {
        let n = series.points.len();
        let x_at = |i: usize| {
            if n == 1 {
                340.0
            } else {
                60.0 + 560.0 * i as f64 / (n - 1) as f64
            }
        };
        let y_at = |count: u64| 280.0 - 260.0 * count as f64 / max as f64;
        let coords: Vec<String> = series
            .points
            .iter()
            .enumerate()
            .map(|(i, (_, count))| format!("{:.1},{:.1}", x_at(i), y_at(*count)))
            .collect();
        if n > 1 {
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{}\"/>\n",
                coords.join(" "),
            ));
        }
        for (i, (start, count)) in series.points.iter().enumerate() {
            out.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"#1f77b4\"/>\n",
                x_at(i),
                y_at(*count),
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                x_at(i),
                y_at(*count) - 8.0,
                count,
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"296\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n",
                x_at(i),
                format_timestamp(*start),
            ));
        }
        out.push_str(&format!(
            "<text x=\"56\" y=\"25\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{max}</text>\n",
        ));
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

fn shares_svg(share: &PolarityShare) -> Vec<u8> {
    let mut out = String::from(CANVAS);
    out.push_str(&format!(
        "<text x=\"320\" y=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">polarity shares {} to {} (n={})</text>\n",
        format_timestamp(share.from),
        format_timestamp(share.to),
        share.total,
    ));
    out.push_str(AXES);
    let labels = ["positive", "negative", "neutral"];
    let colors = ["#2e7d32", "#c62828", "#9e9e9e"];
    for c in 0..3 {
        let pct = share.shares[c];
        let height = 260.0 * pct / 100.0;
        let x = 100.0 + 170.0 * c as f64;
        let y = 280.0 - height;
        out.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"120\" height=\"{:.1}\" fill=\"{}\"/>\n",
            x, y, height, colors[c],
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{:.1}%</text>\n",
            x + 60.0,
            y - 6.0,
            pct,
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"296\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            x + 60.0,
            labels[c],
        ));
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::Bucket;
    use crate::docstore::parse_timestamp;

    fn sample_volume() -> VolumeSeries {
        VolumeSeries {
            entity_id: "uber".to_string(),
            bucket: Bucket::Day,
            points: vec![
                (parse_timestamp("2016-04-28T00:00:00Z").unwrap(), 247),
                (parse_timestamp("2016-04-30T00:00:00Z").unwrap(), 180),
            ],
        }
    }

    fn sample_shares() -> PolarityShare {
        PolarityShare {
            from: parse_timestamp("2016-04-28T00:00:00Z").unwrap(),
            to: parse_timestamp("2016-04-28T23:59:59Z").unwrap(),
            total: 4,
            shares: [50.0, 25.0, 25.0],
        }
    }

    #[test]
    fn volume_csv_schema() {
        let bytes = render_report(&Report::Volume(sample_volume()), Format::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text,
            "bucket_start,count\n2016-04-28T00:00:00Z,247\n2016-04-30T00:00:00Z,180\n"
        );
    }

    #[test]
    fn shares_csv_schema() {
        let bytes = render_report(&Report::Shares(sample_shares()), Format::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text,
            "window_from,window_to,total,positive_pct,negative_pct,neutral_pct\n\
             2016-04-28T00:00:00Z,2016-04-28T23:59:59Z,4,50.000,25.000,25.000\n"
        );
    }

    #[test]
    fn shares_json_schema() {
        let bytes = render_report(&Report::Shares(sample_shares()), Format::Json).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text,
            "{\"total\":4,\"positive_pct\":50.0,\"negative_pct\":25.0,\"neutral_pct\":25.0}\n"
        );
    }

    #[test]
    fn delta_json_schema() {
        let delta = DeltaReport {
            exact: [-2.5, 0.5, 2.0],
            rounded: [-3, 1, 2],
        };
        let bytes = render_report(&Report::Delta(delta), Format::Json).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text,
            "{\"exact\":{\"positive\":-2.5,\"negative\":0.5,\"neutral\":2.0},\
             \"rounded\":{\"positive\":-3,\"negative\":1,\"neutral\":2}}\n"
        );
    }

    #[test]
    fn aspects_render_both_ways() {
        let mut report = AspectReport::default();
        report.entries.insert(
            "preço".to_string(),
            crate::analytics::AspectEntry { count: 3, by_polarity: [2, 1, 0] },
        );
        let bytes = render_report(&Report::Aspects(report.clone()), Format::Csv).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "term,count,positive,negative,neutral\npreço,3,2,1,0\n"
        );
        let bytes = render_report(&Report::Aspects(report), Format::Json).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "{\"terms\":[{\"term\":\"preço\",\"count\":3,\"positive\":2,\"negative\":1,\"neutral\":0}]}\n"
        );
    }

    #[test]
    fn svg_outputs_are_wellformed_enough() {
        let volume = render_report(&Report::Volume(sample_volume()), Format::Svg).unwrap();
        let volume = String::from_utf8(volume).unwrap();
        assert!(volume.starts_with("<svg"));
        assert!(volume.trim_end().ends_with("</svg>"));
        assert!(volume.contains("<polyline"));
        assert_eq!(volume.matches("<circle").count(), 2);

        let shares = render_report(&Report::Shares(sample_shares()), Format::Svg).unwrap();
        let shares = String::from_utf8(shares).unwrap();
        assert_eq!(shares.matches("<rect").count(), 4); // background + 3 bars
        assert!(shares.contains("50.0%"));

        let empty = VolumeSeries {
            entity_id: "uber".to_string(),
            bucket: Bucket::Day,
            points: vec![],
        };
        let svg = render_report(&Report::Volume(empty), Format::Svg).unwrap();
        let svg = String::from_utf8(svg).unwrap();
        assert!(!svg.contains("<polyline"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let report = Report::Volume(sample_volume());
        for format in [Format::Csv, Format::Json, Format::Svg] {
            let a = render_report(&report, format).unwrap();
            let b = render_report(&report, format).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unsupported_combinations_error() {
        let delta = DeltaReport { exact: [0.0; 3], rounded: [0; 3] };
        for format in [Format::Csv, Format::Svg] {
            match render_report(&Report::Delta(delta.clone()), format) {
                Err(AnalyticsError::UnsupportedFormat { report, format: f }) => {
                    assert_eq!(report, "delta");
                    assert_eq!(f, format.as_str());
                }
                other => panic!("expected UnsupportedFormat, got {other:?}"),
            }
        }
        assert!(matches!(
            render_report(&Report::Aspects(AspectReport::default()), Format::Svg),
            Err(AnalyticsError::UnsupportedFormat { .. })
        ));
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(csv_field("preço"), "preço");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("a\"b"), "\"a\"\"b\"");
    }
}
