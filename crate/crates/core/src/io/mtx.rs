//! Matrix Market coordinate files (`real`/`integer`, `symmetric`).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseSymMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses Matrix Market text. Entries of either triangle are mirrored;
/// duplicates are summed.
pub fn parse_matrix_market(text: &str) -> Result<SparseSymMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(hline, format!("bad header `{header}`")));
    }
    if fields[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!("storage `{}`", fields[2])));
    }
    match fields[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(Error::UnsupportedFormat(format!("field `{other}`"))),
    }
    if fields[4] != "symmetric" {
        return Err(Error::UnsupportedFormat(format!("symmetry `{}`", fields[4])));
    }

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = body.next().ok_or_else(|| parse_err(hline + 1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(sline, format!("size line: {e}")))?;
    if dims.len() != 3 {
        return Err(parse_err(sline, "size line needs `rows cols nnz`"));
    }
    let (nr, nc, nnz) = (dims[0], dims[1], dims[2]);
    if nr != nc {
        return Err(parse_err(sline, format!("symmetric matrix must be square, got {nr}x{nc}")));
    }

    let mut triplets = Vec::with_capacity(nnz);
    for (ln, l) in body {
        let mut it = l.split_whitespace();
        let mut next_idx = |what: &str| -> Result<usize> {
            let tok = it.next().ok_or_else(|| parse_err(ln, format!("missing {what}")))?;
            let v: usize = tok
                .parse()
                .map_err(|e| parse_err(ln, format!("{what} `{tok}`: {e}")))?;
            if v == 0 || v > nr {
                return Err(parse_err(ln, format!("{what} {v} outside 1..={nr}")));
            }
            Ok(v - 1)
        };
        let i = next_idx("row")?;
        let j = next_idx("column")?;
        let tok = it.next().ok_or_else(|| parse_err(ln, "missing value"))?;
        let v: f64 = tok
            .parse()
            .map_err(|e| parse_err(ln, format!("value `{tok}`: {e}")))?;
        if it.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
        triplets.push((i, j, v));
    }
    if triplets.len() != nnz {
        return Err(parse_err(
            sline,
            format!("header declares {nnz} entries, found {}", triplets.len()),
        ));
    }
    SparseSymMatrix::from_lower_triplets(nr, &triplets)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseSymMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text)
}

/// Writes the lower triangle in symmetric coordinate format.
pub fn write_matrix_market(a: &SparseSymMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut entries = Vec::new();
    for i in 0..a.n() {
        for p in a.row_ptr()[i]..a.row_ptr()[i + 1] {
            let j = a.col_idx()[p];
            if j <= i {
                entries.push((i, j, a.values()[p]));
            }
        }
    }
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real symmetric\n");
    out.push_str(&format!("{} {} {}\n", a.n(), a.n(), entries.len()));
    for (i, j, v) in entries {
        out.push_str(&format!("{} {} {:.16e}\n", i + 1, j + 1, v));
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_symmetric_file() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 3\n1 1 2.0\n2 1 1.0\n3 3 5.0\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.n(), 3);
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(0, 1), Some(1.0));
        assert_eq!(a.get(1, 0), Some(1.0));
        assert_eq!(a.get(2, 2), Some(5.0));
    }

    #[test]
    fn integer_field_is_widened() {
        let text = "%%MatrixMarket matrix coordinate integer symmetric\n2 2 2\n1 1 3\n2 1 -1\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.get(0, 0), Some(3.0));
        assert_eq!(a.get(0, 1), Some(-1.0));
    }

    #[test]
    fn unsupported_headers() {
        for h in [
            "%%MatrixMarket matrix coordinate complex symmetric",
            "%%MatrixMarket matrix coordinate real general",
            "%%MatrixMarket matrix coordinate real skew-symmetric",
            "%%MatrixMarket matrix coordinate complex hermitian",
            "%%MatrixMarket matrix coordinate pattern symmetric",
            "%%MatrixMarket matrix array real symmetric",
        ] {
            let text = format!("{h}\n1 1 1\n1 1 1.0\n");
            assert!(
                matches!(parse_matrix_market(&text), Err(Error::UnsupportedFormat(_))),
                "{h}"
            );
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n2 x 1.0\n";
        match parse_matrix_market(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n";
        assert!(matches!(parse_matrix_market(text), Err(Error::Parse { line: 3, .. })));
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n";
        assert!(matches!(parse_matrix_market(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn duplicates_summed() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 1.0\n1 1 2.5\n2 2 1.0\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.get(0, 0), Some(3.5));
    }
}
