//! Tab-separated output and input helpers.

use std::io;

/// Renders `header` and `rows` as TSV. Fields containing tabs, quotes or
/// newlines are quoted.
pub fn render<I, R, S>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        let fields: Vec<String> = row.into_iter().map(|s| s.as_ref().to_string()).collect();
        w.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 input")
}

/// A record with its 1-based line number.
pub type Row = (usize, Vec<String>);

/// Parses TSV text with a header row, skipping blank lines and lines that
/// start with `#`.
pub fn parse(text: &str) -> io::Result<(Vec<String>, Vec<Row>)> {
    let filtered: String = text
        .lines()
        .map(|l| {
            if l.trim().is_empty() || l.starts_with('#') {
                ""
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let mut r = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .flexible(true)
        .quoting(false)
        .has_headers(true)
        .from_reader(filtered.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_comments() {
        let text = render(&["a", "b"], [["1", "x"], ["2", "y"]]);
        assert_eq!(text, "a\tb\n1\tx\n2\ty\n");
        let (h, rows) = parse(&format!("# note\n{text}\n")).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].0, 4);
        assert_eq!(rows[1].1, vec!["2", "y"]);
    }
}
