//! Deterministic text output: 6-significant-digit number formatting and
//! the fixed per-sample CSV layout shared by every benchmark experiment.

use super::SampleRecord;

/// Column header of the per-sample CSV (fixed schema).
pub(crate) const CSV_HEADER: &str = "idx,seed,p,lambda1,c_re0,c_re1,c_re2,c_re3,\
c_im0,c_im1,c_im2,c_im3,f1,f2,f3,W,fidelity,C2,B1,B2,B3,cgm,\
cert_cmc,cert_fid,cert_combined,winner";

/// Formats with 6 significant digits, trimming trailing zeros; decimal
/// notation for moderate magnitudes, exponent notation otherwise.
pub(crate) fn fmt_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Magnitude from the rounded 6-digit mantissa so values like 0.9999997
    // format as "1" rather than "1.00000".
    let sci = format!("{x:.5e}");
    let (_, exp) = sci.split_once('e').expect("float e-notation");
    let mag: i32 = exp.parse().expect("float exponent");
    if (-5..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        trim_decimal(&format!("{x:.decimals$}"))
    } else {
        let (mantissa, _) = sci.split_once('e').expect("float e-notation");
        format!("{}e{}", trim_decimal(mantissa), mag)
    }
}

fn trim_decimal(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_g6).unwrap_or_default()
}

fn padded(values: &[f64], len: usize) -> Vec<String> {
    (0..len)
        .map(|i| values.get(i).copied().map(fmt_g6).unwrap_or_default())
        .collect()
}

/// Renders metadata lines (each prefixed `# `), the header row, and one
/// row per record. UTF-8, LF line endings, comma-separated; no field ever
/// contains a comma, quote, or newline, so no quoting is needed.
pub fn records_csv(metadata: &[String], records: &[SampleRecord]) -> String {
    let mut out = String::new();
    for line in metadata {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let coeff_cell = |re: bool, i: usize| -> String {
            r.coeffs
                .as_ref()
                .and_then(|c| c.get(i))
                .map(|pair| fmt_g6(if re { pair[0] } else { pair[1] }))
                .unwrap_or_default()
        };
        let mut cells: Vec<String> = vec![r.idx.to_string(), r.seed.to_string()];
        cells.push(opt(r.p));
        cells.push(opt(r.lambda1));
        for i in 0..4 {
            cells.push(coeff_cell(true, i));
        }
        for i in 0..4 {
            cells.push(coeff_cell(false, i));
        }
        cells.extend(padded(&r.f, 3));
        cells.push(opt(r.witness));
        cells.push(opt(r.fidelity));
        cells.push(opt(r.c2));
        cells.extend(padded(&r.entropy_bounds, 3));
        cells.push(opt(r.cgm));
        cells.push(r.cert_cmc.clone());
        cells.push(r.cert_fid.clone().unwrap_or_default());
        cells.push(r.cert_combined.clone());
        cells.push(r.winner.clone().unwrap_or_default());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_g6(0.0), "0");
        assert_eq!(fmt_g6(1.0), "1");
        assert_eq!(fmt_g6(-3.0), "-3");
        assert_eq!(fmt_g6(24.5), "24.5");
        assert_eq!(fmt_g6(17.0 / 26.0), "0.653846");
        assert_eq!(fmt_g6(2.0 + 1e-6), "2");
        assert_eq!(fmt_g6(1.234567), "1.23457");
        assert_eq!(fmt_g6(123456.7), "123457");
        assert_eq!(fmt_g6(1234567.0), "1.23457e6");
        assert_eq!(fmt_g6(0.000012345), "0.000012345");
        assert_eq!(fmt_g6(1.5e-7), "1.5e-7");
        assert_eq!(fmt_g6(-2.5e8), "-2.5e8");
        assert_eq!(fmt_g6(0.9999997), "1");
    }

    #[test]
    fn csv_layout_and_empty_cells() {
        let record = SampleRecord {
            idx: 3,
            seed: 42,
            p: Some(0.5),
            lambda1: None,
            coeffs: Some(vec![[0.5, 0.0], [0.5, -0.25], [0.5, 0.0], [0.5, 0.0]]),
            f: vec![2.0, 3.0, 4.0],
            witness: Some(1.5),
            fidelity: Some(0.75),
            c2: None,
            entropy_bounds: vec![1.0, 0.5, 0.25],
            cgm: Some(0.25),
            cert_cmc: "4-3-2".into(),
            cert_fid: None,
            cert_combined: "4-3-2".into(),
            winner: Some("cmc".into()),
        };
        let csv = records_csv(&["snvec bench fig2".into()], &[record]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# snvec bench fig2"));
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row = lines.next().unwrap();
        assert_eq!(
            row,
            "3,42,0.5,,0.5,0.5,0.5,0.5,0,-0.25,0,0,2,3,4,1.5,0.75,,1,0.5,0.25,0.25,4-3-2,,4-3-2,cmc"
        );
        assert_eq!(lines.next(), None);
        assert!(csv.ends_with('\n'));
        assert_eq!(CSV_HEADER.split(',').count(), row.split(',').count());
    }
}
