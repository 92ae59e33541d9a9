//! Columnar text format for paths.
//!
//! ```text
//! # kind H d N T seed
//! t v_1 ... v_d
//! ```
//! Absent `H` or `seed` are written as `-`. Numbers use 17 significant digits.

use std::io::{BufRead, Write};

use super::{PathKind, SampledPath};
use crate::error::{Error, Result};

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_path<W: Write>(path: &SampledPath, mut out: W) -> std::io::Result<()> {
    let hurst = match path.kind() {
        PathKind::Fbm { hurst } => fmt17(hurst),
        _ => "-".to_string(),
    };
    let seed = path.seed().map_or_else(|| "-".to_string(), |s| s.to_string());
    writeln!(
        out,
        "# {} {} {} {} {} {}",
        path.kind().name(),
        hurst,
        path.dim(),
        path.n_steps(),
        fmt17(path.horizon()),
        seed
    )?;
    let mut line = String::new();
    for k in 0..=path.n_steps() {
        line.clear();
        line.push_str(&fmt17(path.time(k)));
        for v in path.point(k) {
            line.push(' ');
            line.push_str(&fmt17(*v));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| Error::Parse { line, reason: format!("bad number `{tok}`") })
}

pub fn read_path<R: BufRead>(input: R) -> Result<SampledPath> {
    let mut lines = input.lines().enumerate();
    let bad = |line: usize, reason: &str| Error::Parse { line, reason: reason.to_string() };
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty input"))?;
    let header = header.map_err(|e| bad(1, &e.to_string()))?;
    let toks: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
    if toks.len() != 6 {
        return Err(bad(1, "header must be `# kind H d N T seed`"));
    }
    let dim: usize = toks[2].parse().map_err(|_| bad(1, "bad dimension"))?;
    let n_steps: usize = toks[3].parse().map_err(|_| bad(1, "bad step count"))?;
    let horizon = parse_f64(toks[4], 1)?;
    let seed = if toks[5] == "-" { None } else { Some(toks[5].parse().map_err(|_| bad(1, "bad seed"))?) };
    let kind = match toks[0] {
        "fbm" => PathKind::Fbm { hurst: parse_f64(toks[1], 1)? },
        "brownian" => PathKind::Brownian,
        "linear" => PathKind::Linear,
        "custom" => PathKind::Custom,
        "sum" => PathKind::Sum,
        other => return Err(bad(1, &format!("unknown kind `{other}`"))),
    };
    let mut values = Vec::with_capacity((n_steps + 1) * dim);
    for (i, line) in lines {
        let line = line.map_err(|e| bad(i + 1, &e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != dim + 1 {
            return Err(bad(i + 1, "wrong column count"));
        }
        for t in &toks[1..] {
            values.push(parse_f64(t, i + 1)?);
        }
    }
    if values.len() != (n_steps + 1) * dim {
        return Err(Error::GridMismatch(format!(
            "header promises {} points, file has {}",
            n_steps + 1,
            values.len() / dim.max(1)
        )));
    }
    SampledPath::from_values(dim, horizon, values, kind, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::generate_fbm;

    #[test]
    fn round_trip_is_exact() {
        let p = generate_fbm(0.35, 2, 50, 1.5, 99).unwrap();
        let mut buf = Vec::new();
        write_path(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# fbm 3.4999999999999998e-1 2 50 1.5000000000000000e0 99"));
        let q = read_path(&buf[..]).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_truncated_body() {
        let text = "# linear - 1 4 1 -\n0 0\n0.25 0.25\n";
        assert!(read_path(text.as_bytes()).is_err());
    }
}
