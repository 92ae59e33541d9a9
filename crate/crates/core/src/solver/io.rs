//! CSV and binary layouts for solutions and measure summaries.

use std::io::{Read, Write};

use super::entropy::KineticMeasure;
use super::scheme::GridSolution;
use crate::error::{Error, Result};

/// Rows `t,x,u`, one per output time and cell.
pub fn write_solution_csv<W: Write>(sol: &GridSolution, mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,x,u")?;
    for (k, t) in sol.times.iter().enumerate() {
        for (j, u) in sol.slice(k).iter().enumerate() {
            writeln!(out, "{t:.16e},{:.16e},{u:.16e}", sol.x_center(j))?;
        }
    }
    Ok(())
}

/// `nx` and `n_times` as little-endian `u64`, then the row-major field as
/// little-endian `f64`.
pub fn write_solution_binary<W: Write>(sol: &GridSolution, mut out: W) -> std::io::Result<()> {
    out.write_all(&(sol.nx as u64).to_le_bytes())?;
    out.write_all(&(sol.n_times() as u64).to_le_bytes())?;
    for x in &sol.u {
        out.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

/// Reads the binary layout back as `(nx, n_times, field)`.
pub fn read_solution_binary<R: Read>(mut input: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|e| Error::Parse { line: 0, reason: e.to_string() })?;
    if bytes.len() < 16 {
        return Err(Error::Parse { line: 0, reason: "truncated header".into() });
    }
    let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let (nx, nt) = (word(0) as usize, word(8) as usize);
    let body = &bytes[16..];
    if nx.checked_mul(nt).and_then(|n| n.checked_mul(8)) != Some(body.len()) {
        return Err(Error::GridMismatch(format!("header {nx} x {nt} does not match {} payload bytes", body.len())));
    }
    let field = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((nx, nt, field))
}

/// Rows `t_lo,t_hi,v,mass` with mass summed over cells.
pub fn write_measure_csv<W: Write>(m: &KineticMeasure, mut out: W) -> std::io::Result<()> {
    writeln!(out, "t_lo,t_hi,v,mass")?;
    for b in 0..m.n_bins() {
        for (l, v) in m.v_levels.iter().enumerate() {
            writeln!(
                out,
                "{:.16e},{:.16e},{v:.16e},{:.16e}",
                m.t_edges[b],
                m.t_edges[b + 1],
                m.bin_level_mass(b, l)
            )?;
        }
    }
    Ok(())
}
