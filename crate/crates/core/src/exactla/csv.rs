//! Plain-text matrix exchange: a `rows,cols` line followed by one line per row
//! of comma-separated `num/den` fractions.

use std::io::{Read, Write};

use super::field::{parse_rational, to_fraction_string, Rational, Rationals};
use super::matrix::RatMatrix;
use crate::error::{Error, Result};

pub fn write_matrix_csv<W: Write>(m: &RatMatrix, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record([m.rows().to_string(), m.cols().to_string()])
        .map_err(io)?;
    for row in m.row_iter() {
        w.write_record(row.iter().map(to_fraction_string))
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_to_csv_string(m: &RatMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix_csv(m, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn read_matrix_csv<R: Read>(input: R) -> Result<RatMatrix> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    if header.len() != 2 {
        return Err(Error::Parse(format!(
            "header must be `rows,cols`, got {} fields",
            header.len()
        )));
    }
    let dim = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad dimension `{s}`")))
    };
    let (rows, cols) = (dim(&header[0])?, dim(&header[1])?);
    let mut data: Vec<Rational> = Vec::with_capacity(rows * cols);
    for rec in records {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() == 1 && rec[0].trim().is_empty() && cols != 1 {
            continue;
        }
        if rec.len() != cols {
            return Err(Error::Shape(format!(
                "row with {} entries, expected {cols}",
                rec.len()
            )));
        }
        for field in rec.iter() {
            data.push(parse_rational(field)?);
        }
    }
    RatMatrix::new(&Rationals, rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::field::{rat, ratio};

    #[test]
    fn round_trip() {
        let m = RatMatrix::from_rows(
            &Rationals,
            3,
            vec![
                vec![ratio(1, 2), rat(0), rat(-7)],
                vec![ratio(-3, 4), rat(5), ratio(10, 3)],
            ],
        )
        .unwrap();
        let text = matrix_to_csv_string(&m);
        assert!(text.starts_with("2,3\n1/2,0/1,-7/1\n"));
        assert_eq!(read_matrix_csv(text.as_bytes()).unwrap(), m);
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(read_matrix_csv("2,2\n1,2\n3\n".as_bytes()).is_err());
        assert!(read_matrix_csv("2,2\n1,2\n".as_bytes()).is_err());
        assert!(read_matrix_csv("".as_bytes()).is_err());
    }
}
