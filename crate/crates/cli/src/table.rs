//! CSV ingestion and export. Files carry one header row; the first column is
//! a time index and every further column is one variable.

use std::io::{Read, Write};

use infoflow::TimeSeriesPanel;

use crate::error::CliError;

/// A parsed CSV table: variable labels and column-major values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub labels: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn into_panel(self, dt: f64, path: &str) -> Result<TimeSeriesPanel, CliError> {
        TimeSeriesPanel::new(self.columns, dt, Some(self.labels)).map_err(|e| CliError::Input {
            path: path.to_string(),
            message: e.to_string(),
        })
    }
}

/// Reads a table, reporting the line and column of the first malformed cell.
/// `path` is only used in messages.
pub fn read_table<R: Read>(reader: R, path: &str) -> Result<Table, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let parse_err = |row: u64, column: usize, message: String| CliError::Parse {
        path: path.to_string(),
        row,
        column,
        message,
    };

    let header = rdr
        .headers()
        .map_err(|e| parse_err(1, 1, e.to_string()))?
        .clone();
    if header.len() < 2 {
        return Err(parse_err(
            1,
            1,
            "header needs a time column and at least one variable".into(),
        ));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut columns = vec![Vec::new(); labels.len()];

    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, 1, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                record.len().min(header.len()) + 1,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate().skip(1) {
            let value: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, j + 1, format!("not a number: `{cell}`")))?;
            if !value.is_finite() {
                return Err(parse_err(line, j + 1, format!("non-finite value `{cell}`")));
            }
            columns[j - 1].push(value);
        }
    }
    Ok(Table { labels, columns })
}

/// Writes a panel with a leading sample-index column.
pub fn write_panel<W: Write>(panel: &TimeSeriesPanel, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(panel.labels().iter().cloned());
    w.write_record(&header)?;
    for n in 0..panel.len() {
        let mut record = vec![n.to_string()];
        record.extend((0..panel.d()).map(|j| panel.row(j)[n].to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Table, CliError> {
        read_table(text.as_bytes(), "mem.csv")
    }

    fn location(err: CliError) -> (u64, usize) {
        match err {
            CliError::Parse { row, column, .. } => (row, column),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reads_labels_and_columns() {
        let t = parse("t,a,b\n0,1.5,2\n1,-3,4e-1\n").unwrap();
        assert_eq!(t.labels, vec!["a", "b"]);
        assert_eq!(t.columns, vec![vec![1.5, -3.0], vec![2.0, 0.4]]);
        assert_eq!(t.rows(), 2);
    }

    #[test]
    fn ragged_row_is_located() {
        let err = parse("t,a,b\n0,1,2\n1,3\n").unwrap_err();
        assert_eq!(location(err), (3, 3));
    }

    #[test]
    fn non_numeric_cell_is_located() {
        let err = parse("t,a,b\n0,1,2\n1,3,x\n").unwrap_err();
        assert_eq!(location(err), (3, 3));
    }

    #[test]
    fn nan_is_rejected() {
        let err = parse("t,a,b\n0,NaN,2\n").unwrap_err();
        assert_eq!(location(err), (2, 2));
    }

    #[test]
    fn panel_round_trip_is_exact() {
        let rows = vec![
            vec![0.1, 1.0 / 3.0, -2.5e-300, 7.0, 1e10],
            vec![1.0, 2.0, 3.0, 4.0, 6.0],
        ];
        let panel =
            TimeSeriesPanel::new(rows.clone(), 1.0, Some(vec!["p".into(), "q".into()])).unwrap();
        let mut buf = Vec::new();
        write_panel(&panel, &mut buf).unwrap();
        let t = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(t.columns, rows);
        assert_eq!(t.labels, vec!["p", "q"]);
    }
}
