use super::{ReportRow, RunReport};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "level,dofs,nodes,hmax,ls,eta,l2u,h1u,l2sigma,wbh2A,wbh2,rate_ls,rate_l2u,rate_h1u,rate_l2sigma,rate_wbh2A,rate_wbh2";

/// 17 significant digits, enough to round-trip any f64.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn row_line(r: &ReportRow) -> String {
    let e = &r.errors;
    let mut fields = vec![
        e.level.to_string(),
        e.dofs.to_string(),
        e.nodes.to_string(),
        num(e.h_max),
        num(e.ls),
        num(e.eta),
        num(e.l2_u),
        num(e.h1_u),
        num(e.l2_sigma),
        opt(e.wbh2_a),
        opt(e.wbh2),
    ];
    fields.extend(r.rates.iter().map(|&v| opt(v)));
    fields.join(",")
}

pub fn write_csv(report: &RunReport) -> String {
    let mut out = String::with_capacity(256 * (report.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&row_line(r));
        out.push('\n');
    }
    out
}

/// Reads back a file produced by [`write_csv`]: one vector of optional
/// values per row, in header order.
pub fn parse_csv(text: &str) -> Result<Vec<Vec<Option<f64>>>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Config("unexpected CSV header".into()));
    }
    let width = CSV_HEADER.split(',').count();
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            if cells.len() != width {
                return Err(Error::Config(format!("CSV row has {} fields", cells.len())));
            }
            cells
                .iter()
                .map(|c| match *c {
                    "" => Ok(None),
                    c => c.parse().map(Some).map_err(|_| Error::Config(format!("bad CSV number '{c}'"))),
                })
                .collect()
        })
        .collect()
}
