//! Readers and writers for the word2vec binary and text formats.
//!
//! Binary layout: an ASCII header `"<vocab_size> <dim>\n"`, then one record
//! per token consisting of the token bytes, a single space, and `dim`
//! little-endian `f32` values. Line feeds directly before a token are
//! skipped, which covers writers that terminate each record with `\n`.

use std::collections::HashSet;
use std::io::{BufRead, ErrorKind, Write};

use super::{keep_token, EmbeddingError, EmbeddingModel, ModelBuilder, Result};

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let mut fields = line.split_whitespace();
    let (Some(n), Some(d), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(EmbeddingError::MalformedHeader(line.to_string()));
    };
    let n: usize = n
        .parse()
        .map_err(|_| EmbeddingError::MalformedHeader(line.to_string()))?;
    let d: usize = d
        .parse()
        .map_err(|_| EmbeddingError::MalformedHeader(line.to_string()))?;
    if d == 0 {
        return Err(EmbeddingError::ZeroDimension);
    }
    Ok((n, d))
}

fn skip_line_feeds<R: BufRead>(reader: &mut R) -> std::io::Result<()> {
    loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            return Ok(());
        }
        let n = buf.iter().take_while(|&&b| b == b'\n').count();
        let all = n == buf.len();
        reader.consume(n);
        if !all {
            return Ok(());
        }
    }
}

/// Reads a word2vec binary model.
pub fn read_binary<R: BufRead>(
    reader: &mut R,
    name: impl Into<String>,
    vocab_filter: Option<&HashSet<String>>,
) -> Result<EmbeddingModel> {
    let mut header = Vec::new();
    reader.read_until(b'\n', &mut header)?;
    if header.last() != Some(&b'\n') {
        return Err(EmbeddingError::MalformedHeader(
            String::from_utf8_lossy(&header).into_owned(),
        ));
    }
    let header = std::str::from_utf8(&header)
        .map_err(|_| EmbeddingError::MalformedHeader("header is not ASCII".into()))?;
    let (n, dim) = parse_header(header.trim_end_matches(['\n', '\r']))?;

    let mut builder = ModelBuilder::new(name.into(), dim, n);
    let mut token_buf = Vec::new();
    let mut payload = vec![0u8; dim * 4];
    let mut row = vec![0f32; dim];
    for record in 0..n {
        skip_line_feeds(reader)?;
        token_buf.clear();
        reader.read_until(b' ', &mut token_buf)?;
        if token_buf.pop() != Some(b' ') {
            return Err(EmbeddingError::Truncated {
                record,
                token: String::from_utf8_lossy(&token_buf).into_owned(),
                reason: "end of file inside token".into(),
            });
        }
        let token = match String::from_utf8(token_buf.clone()) {
            Ok(t) => t,
            Err(e) => {
                log::warn!("record {record}: token is not valid UTF-8, decoding lossily");
                String::from_utf8_lossy(e.as_bytes()).into_owned()
            }
        };
        if let Err(e) = reader.read_exact(&mut payload) {
            return Err(match e.kind() {
                ErrorKind::UnexpectedEof => EmbeddingError::Truncated {
                    record,
                    token,
                    reason: format!("fewer than {} payload bytes", dim * 4),
                },
                _ => e.into(),
            });
        }
        if !keep_token(vocab_filter, &token) {
            continue;
        }
        for (x, bytes) in row.iter_mut().zip(payload.chunks_exact(4)) {
            *x = f32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
        }
        builder.push(token, &row)?;
    }
    builder.finish()
}

/// Reads a word2vec text model; the `"<vocab_size> <dim>"` header line is optional.
pub fn read_text<R: BufRead>(
    reader: &mut R,
    name: impl Into<String>,
    vocab_filter: Option<&HashSet<String>>,
) -> Result<EmbeddingModel> {
    let mut builder: Option<ModelBuilder> = None;
    let name = name.into();
    let mut declared: Option<usize> = None;
    let mut dim = 0usize;
    let mut row = Vec::new();
    let mut records = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').filter(|f| !f.is_empty()).collect();
        if builder.is_none() {
            if fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok()) {
                let (n, d) = parse_header(line)?;
                declared = Some(n);
                dim = d;
                builder = Some(ModelBuilder::new(name.clone(), d, n));
                continue;
            }
            dim = fields.len().saturating_sub(1);
            if dim == 0 {
                return Err(EmbeddingError::MalformedLine {
                    line: lineno + 1,
                    reason: "no vector values".into(),
                });
            }
            builder = Some(ModelBuilder::new(name.clone(), dim, 1024));
        }
        if fields.len() != dim + 1 {
            return Err(EmbeddingError::MalformedLine {
                line: lineno + 1,
                reason: format!("expected {} values, found {}", dim, fields.len().saturating_sub(1)),
            });
        }
        records += 1;
        if !keep_token(vocab_filter, fields[0]) {
            continue;
        }
        row.clear();
        for f in &fields[1..] {
            let x: f32 = f.parse().map_err(|_| EmbeddingError::MalformedLine {
                line: lineno + 1,
                reason: format!("not a number: {f:?}"),
            })?;
            row.push(x);
        }
        builder
            .as_mut()
            .expect("builder initialised")
            .push(fields[0].to_string(), &row)?;
    }
    if let Some(n) = declared {
        if n != records {
            log::warn!("model {name}: header declares {n} tokens, file holds {records}");
        }
    }
    builder.ok_or(EmbeddingError::EmptyVocabulary)?.finish()
}

/// Writes a model in word2vec binary format, one `\n` after each record.
pub fn write_binary<W: Write>(model: &EmbeddingModel, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{} {}", model.len(), model.dim())?;
    for (i, token) in model.tokens().iter().enumerate() {
        w.write_all(token.as_bytes())?;
        w.write_all(b" ")?;
        for x in model.vector(i) {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes a model in word2vec text format with a header line.
pub fn write_text<W: Write>(model: &EmbeddingModel, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{} {}", model.len(), model.dim())?;
    for (i, token) in model.tokens().iter().enumerate() {
        w.write_all(token.as_bytes())?;
        for x in model.vector(i) {
            // `{:?}` prints the shortest representation that round-trips
            write!(w, " {x:?}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn minimal_binary_file() {
        let mut bytes = b"1 2\na ".to_vec();
        bytes.extend_from_slice(&1.0f32.to_le_bytes());
        bytes.extend_from_slice(&0.0f32.to_le_bytes());
        let m = read_binary(&mut Cursor::new(bytes), "min", None).unwrap();
        assert_eq!(m.tokens(), &["a".to_string()]);
        assert_eq!(m.dim(), 2);
        assert_eq!(m.vector(0), &[1.0, 0.0]);
    }

    #[test]
    fn malformed_header() {
        let err = read_binary(&mut Cursor::new(b"x 2\n".to_vec()), "m", None);
        assert!(matches!(err, Err(EmbeddingError::MalformedHeader(_))));
        let err = read_binary(&mut Cursor::new(b"1 2".to_vec()), "m", None);
        assert!(matches!(err, Err(EmbeddingError::MalformedHeader(_))));
    }

    #[test]
    fn truncated_payload() {
        let mut bytes = b"1 2\na ".to_vec();
        bytes.extend_from_slice(&1.0f32.to_le_bytes());
        let err = read_binary(&mut Cursor::new(bytes), "m", None);
        assert!(matches!(err, Err(EmbeddingError::Truncated { .. })));
    }

    #[test]
    fn non_finite_payload() {
        let mut bytes = b"1 1\na ".to_vec();
        bytes.extend_from_slice(&f32::INFINITY.to_le_bytes());
        let err = read_binary(&mut Cursor::new(bytes), "m", None);
        assert!(matches!(err, Err(EmbeddingError::NonFinite(_))));
    }

    #[test]
    fn filter_to_nothing_is_an_error() {
        let mut bytes = b"1 1\na ".to_vec();
        bytes.extend_from_slice(&1.0f32.to_le_bytes());
        let filter: HashSet<String> = ["b".to_string()].into();
        let err = read_binary(&mut Cursor::new(bytes), "m", Some(&filter));
        assert!(matches!(err, Err(EmbeddingError::EmptyVocabulary)));
    }

    #[test]
    fn filter_matches_case_insensitively() {
        let text = "3 1\nAlpha 1\nbeta 2\ngamma 3\n";
        let filter: HashSet<String> = ["alpha".to_string(), "gamma".to_string()].into();
        let m = read_text(&mut Cursor::new(text), "t", Some(&filter)).unwrap();
        assert_eq!(m.tokens(), &["Alpha".to_string(), "gamma".to_string()]);
    }

    #[test]
    fn text_without_header() {
        let m = read_text(&mut Cursor::new("a 1 0\nb 0 1\n"), "t", None).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.cosine("a", "b").unwrap(), 0.0);
    }

    #[test]
    fn text_wrong_arity() {
        let err = read_text(&mut Cursor::new("2 2\na 1 0\nb 1\n"), "t", None);
        assert!(matches!(err, Err(EmbeddingError::MalformedLine { line: 3, .. })));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let m = EmbeddingModel::from_rows(
            "r",
            3,
            vec!["x".into(), "y".into()],
            vec![0.1, -2.5e-8, 3.0, 1.0 / 3.0, 7.0, -0.0],
        )
        .unwrap();
        let mut out = Vec::new();
        write_text(&m, &mut out).unwrap();
        let back = read_text(&mut Cursor::new(out), "r", None).unwrap();
        for i in 0..2 {
            let a: Vec<u32> = m.vector(i).iter().map(|x| x.to_bits()).collect();
            let b: Vec<u32> = back.vector(i).iter().map(|x| x.to_bits()).collect();
            assert_eq!(a, b);
        }
    }
}
