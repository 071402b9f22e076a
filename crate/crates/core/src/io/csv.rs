//! CSV exports. `#`-prefixed `key = value` metadata lines come first, then a
//! header row, then plain comma-separated numbers.

use std::fmt::Write as _;

use crate::analysis::{Axis, CorrelationMap, Histogram2d, ScanPoint, ScanResult};
use crate::error::{Error, Result};

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(format!("CSV: {e}"))
}

/// Metadata lines followed by a header row and `rows`.
fn render(
    meta: &[(&str, String)],
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w).expect("writing CSV to memory cannot fail");
    let body = w.into_inner().expect("flushed above");
    s.push_str(&String::from_utf8(body).expect("CSV of numbers is UTF-8"));
    s
}

/// Data rows after checking the header matches `header`.
fn records(text: &str, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = r.headers().map_err(csv_error)?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Format(format!(
            "expected CSV header {}, got {}",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.records()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_error)
}

const MAP_HEADER: [&str; 5] = ["e1_lo_ev", "e1_hi_ev", "dt_lo_ns", "dt_hi_ns", "counts"];
const SCAN_HEADER: [&str; 4] = [
    "detuning_mdeg",
    "rate_per_hour",
    "error_per_hour",
    "used_in_fit",
];

/// One row per map bin, E1 outer, Δt inner.
pub fn correlation_map_csv(map: &CorrelationMap) -> String {
    let h = &map.hist;
    let meta = [
        ("duration_s", format!("{:?}", map.duration_s)),
        ("mean_current", format!("{:?}", map.mean_current)),
        ("e1_edges_ev", join(&h.x.edges())),
        ("dt_edges_ns", join(&h.y.edges())),
        ("overflow", h.overflow.to_string()),
    ];
    let rows = (0..h.x.bins()).flat_map(|i| {
        (0..h.y.bins()).map(move |j| {
            vec![
                h.x.edge(i).to_string(),
                h.x.edge(i + 1).to_string(),
                h.y.edge(j).to_string(),
                h.y.edge(j + 1).to_string(),
                h.get(i, j).to_string(),
            ]
        })
    });
    render(&meta, &MAP_HEADER, rows)
}

fn metadata(text: &str) -> Vec<(&str, &str)> {
    text.lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim(), v.trim()))
        .collect()
}

fn meta<'a>(m: &[(&'a str, &'a str)], key: &str) -> Result<&'a str> {
    m.iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Format(format!("CSV metadata {key:?} missing")))
}

fn parse_f64(v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad number {v:?} in CSV")))
}

fn axis_from_edges(text: &str) -> Result<Axis> {
    let edges: Vec<f64> = text
        .split_whitespace()
        .map(parse_f64)
        .collect::<Result<_>>()?;
    if edges.len() < 2 {
        return Err(Error::Format("axis needs at least two edges".into()));
    }
    Axis::new(edges[0], edges[edges.len() - 1], edges.len() - 1)
}

pub fn parse_correlation_map_csv(text: &str) -> Result<CorrelationMap> {
    let m = metadata(text);
    let x = axis_from_edges(meta(&m, "e1_edges_ev")?)?;
    let y = axis_from_edges(meta(&m, "dt_edges_ns")?)?;
    let mut hist = Histogram2d::new(x, y);
    hist.overflow = meta(&m, "overflow")?
        .parse()
        .map_err(|_| Error::Format("bad overflow count".into()))?;
    for row in records(text, &MAP_HEADER)? {
        let (e, dt) = (parse_f64(&row[0])?, parse_f64(&row[2])?);
        let counts: u64 = row[4]
            .parse()
            .map_err(|_| Error::Format(format!("bad count in {row:?}")))?;
        // Look up by bin centre so edge rounding cannot shift a row.
        let (e_hi, dt_hi) = (parse_f64(&row[1])?, parse_f64(&row[3])?);
        let (Some(i), Some(j)) = (
            hist.x.index(0.5 * (e + e_hi)),
            hist.y.index(0.5 * (dt + dt_hi)),
        ) else {
            return Err(Error::Format(format!("row {row:?} is outside the axes")));
        };
        hist.set(i, j, counts);
    }
    Ok(CorrelationMap {
        hist,
        duration_s: parse_f64(meta(&m, "duration_s")?)?,
        mean_current: parse_f64(meta(&m, "mean_current")?)?,
    })
}

/// Scan points, with the fit in the metadata when there is one.
pub fn scan_csv(points: &[ScanPoint], fit: Option<&ScanResult>, fit_error: Option<&str>) -> String {
    let mut meta = Vec::new();
    if let Some(f) = fit {
        meta.push(("amplitude_per_hour", format!("{:?}", f.amplitude)));
        meta.push(("amplitude_error", format!("{:?}", f.amplitude_error)));
        meta.push(("exponent", format!("{:?}", f.exponent)));
        meta.push(("exponent_error", format!("{:?}", f.exponent_error)));
        if let Some(c) = f.chi2_per_dof {
            meta.push(("chi2_per_dof", format!("{c:?}")));
        }
        meta.push(("fixed_exponent", "-0.5".to_string()));
        meta.push((
            "fixed_amplitude_per_hour",
            format!("{:?}", f.fixed_amplitude),
        ));
        meta.push(("fixed_chi2_per_dof", format!("{:?}", f.fixed_chi2_per_dof)));
        meta.push(("fixed_p_value", format!("{:?}", f.fixed_p_value)));
    }
    if let Some(e) = fit_error {
        meta.push(("fit_error", e.replace('\n', " ")));
    }
    let rows = points.iter().map(|p| {
        let used = fit.is_some_and(|f| f.points.iter().any(|q| q == p));
        vec![
            format!("{:?}", p.detuning_mdeg),
            format!("{:?}", p.rate),
            format!("{:?}", p.error),
            used.to_string(),
        ]
    });
    render(&meta, &SCAN_HEADER, rows)
}

pub fn parse_scan_csv(text: &str) -> Result<Vec<ScanPoint>> {
    records(text, &SCAN_HEADER)?
        .iter()
        .map(|row| {
            Ok(ScanPoint {
                detuning_mdeg: parse_f64(&row[0])?,
                rate: parse_f64(&row[1])?,
                error: parse_f64(&row[2])?,
            })
        })
        .collect()
}
