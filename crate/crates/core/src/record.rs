//! CSV serialization of sweep records.
//!
//! The column set and number formatting are part of the output contract:
//! reruns with the same config must produce byte-identical files, so all
//! floats go through one canonical 9-significant-digit formatter instead
//! of the default shortest-round-trip `Display`.

use crate::engine::SweepRecord;
use crate::error::{Error, Result};

/// Header line; column order is fixed.
pub const HEADER: &str = "snr_db,protocol,ber_relay,ber_relay_ci,ber_dest,ber_dest_ci,\
                          p_out,p_out_ci,analytic_ber,analytic_pout,asym_ber,asym_pout,\
                          frames,symbols_per_frame,seed";

const COLUMNS: usize = 15;

/// Format with 9 significant digits, choosing decimal or exponent form the
/// way `%g` does: decimal when the post-rounding exponent lies in -4..=8,
/// exponent form otherwise, trailing zeros trimmed in both.
pub fn fmt_g9(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form always has an e");
    let k: i32 = exp.parse().expect("exponent is a small integer");
    if (-4..=8).contains(&k) {
        let prec = (8 - k) as usize;
        let fixed = format!("{v:.prec$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{k}")
    }
}

/// One CSV line, no trailing newline.
pub fn format_record(r: &SweepRecord) -> String {
    [
        fmt_g9(r.snr_db),
        r.protocol.clone(),
        fmt_g9(r.ber_relay),
        fmt_g9(r.ber_relay_ci),
        fmt_g9(r.ber_dest),
        fmt_g9(r.ber_dest_ci),
        fmt_g9(r.p_out),
        fmt_g9(r.p_out_ci),
        fmt_g9(r.analytic_ber),
        fmt_g9(r.analytic_pout),
        fmt_g9(r.asym_ber),
        fmt_g9(r.asym_pout),
        r.frames.to_string(),
        r.symbols_per_frame.to_string(),
        r.seed.to_string(),
    ]
    .join(",")
}

/// Full file contents: header plus one line per record, trailing newline.
pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 + 128 * records.len());
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format_record(r));
        out.push('\n');
    }
    out
}

fn parse_f64(field: &str, name: &'static str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::invalid(name, format!("unparseable number {field:?}")))
}

fn parse_u64(field: &str, name: &'static str) -> Result<u64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::invalid(name, format!("unparseable count {field:?}")))
}

/// Parse a CSV produced by [`records_to_csv`]. The header must match the
/// current schema exactly; blank lines are ignored.
pub fn records_from_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        Some(h) => {
            return Err(Error::invalid(
                "header",
                format!("schema mismatch: got {h:?}"),
            ))
        }
        None => return Err(Error::EmptyInput("csv text")),
    }
    let mut records = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != COLUMNS {
            return Err(Error::invalid(
                "row",
                format!(
                    "expected {COLUMNS} columns, got {} in {line:?}",
                    fields.len()
                ),
            ));
        }
        records.push(SweepRecord {
            snr_db: parse_f64(fields[0], "snr_db")?,
            protocol: fields[1].trim().to_string(),
            ber_relay: parse_f64(fields[2], "ber_relay")?,
            ber_relay_ci: parse_f64(fields[3], "ber_relay_ci")?,
            ber_dest: parse_f64(fields[4], "ber_dest")?,
            ber_dest_ci: parse_f64(fields[5], "ber_dest_ci")?,
            p_out: parse_f64(fields[6], "p_out")?,
            p_out_ci: parse_f64(fields[7], "p_out_ci")?,
            analytic_ber: parse_f64(fields[8], "analytic_ber")?,
            analytic_pout: parse_f64(fields[9], "analytic_pout")?,
            asym_ber: parse_f64(fields[10], "asym_ber")?,
            asym_pout: parse_f64(fields[11], "asym_pout")?,
            frames: parse_u64(fields[12], "frames")?,
            symbols_per_frame: parse_u64(fields[13], "symbols_per_frame")?,
            seed: parse_u64(fields[14], "seed")?,
        });
    }
    Ok(records)
}
