//! Flat CSV field files.
//!
//! ```text
//! n,box,m
//! 2,0:32|-16:16,257|257
//! value
//! <one value per node, row-major, axis 0 slowest>
//! ```

use std::io::{Read, Write};

use super::{Grid, TrialFunction};
use crate::error::{Error, Result};

pub fn write_csv<W: Write>(u: &TrialFunction, out: W) -> Result<()> {
    let g = u.grid();
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["n", "box", "m"])?;
    let boxes: Vec<String> = (0..g.n()).map(|a| format!("{}:{}", g.lower(a), g.lower(a) + g.extent()[a])).collect();
    let ms: Vec<String> = g.m().iter().map(|m| m.to_string()).collect();
    w.write_record([g.n().to_string(), boxes.join("|"), ms.join("|")])?;
    w.write_record(["value"])?;
    for v in u.values() {
        w.write_record([format!("{v:?}")])?;
    }
    w.flush()?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn read_csv<R: Read>(input: R) -> Result<TrialFunction> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = r.records();
    let mut next = || -> Result<csv::StringRecord> {
        records.next().ok_or_else(|| bad("unexpected end of file"))?.map_err(Error::from)
    };
    let head = next()?;
    if head.iter().map(str::trim).collect::<Vec<_>>() != ["n", "box", "m"] {
        return Err(bad("first row must be the header n,box,m"));
    }
    let meta = next()?;
    if meta.len() != 3 {
        return Err(bad("grid row needs three fields"));
    }
    let n: usize = meta[0].trim().parse().map_err(|_| bad("dimension is not an integer"))?;
    let mut bounds = Vec::new();
    for part in meta[1].split('|') {
        let (lo, hi) = part.split_once(':').ok_or_else(|| bad(format!("bad box interval {part:?}")))?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad(format!("bad bound {lo:?}")))?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad(format!("bad bound {hi:?}")))?;
        bounds.push((lo, hi));
    }
    let m: Vec<usize> = meta[2]
        .split('|')
        .map(|t| t.trim().parse().map_err(|_| bad(format!("bad node count {t:?}"))))
        .collect::<Result<_>>()?;
    if bounds.len() != n || m.len() != n {
        return Err(bad("box and node counts must list one entry per axis"));
    }
    if bounds[0].0 != 0.0 || bounds[1..].iter().any(|&(lo, hi)| lo != -hi || lo != bounds[1].0) {
        return Err(bad("box must be [0, L1] x [-L', L']^(n-1)"));
    }
    let half = if n > 1 { bounds[1].1 } else { 0.0 };
    let grid = Grid::new(bounds[0].1, half, &m)?;
    let vh = next()?;
    if vh.len() != 1 || vh[0].trim() != "value" {
        return Err(bad("expected the value header"));
    }
    let mut values = Vec::with_capacity(grid.len());
    for rec in records {
        let rec = rec?;
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        let v: f64 = rec[0].trim().parse().map_err(|_| bad(format!("bad value {:?}", &rec[0])))?;
        values.push(v);
    }
    TrialFunction::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::bubble;

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::with_resolution(2, 17).unwrap();
        let u = bubble(&g, &[8.0, 1.0], 1.5, 0.3).unwrap();
        let mut buf = Vec::new();
        write_csv(&u, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,box,m\n2,0:32|-16:16,17|17\nvalue\n"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(read_csv("x,y\n".as_bytes()).is_err());
        assert!(read_csv("n,box,m\n1,0:8,9\nvalue\n0\n1\n".as_bytes()).is_err());
        assert!(read_csv("n,box,m\n1,1:8,9\nvalue\n".as_bytes()).is_err());
        let ok = "n,box,m\n1,0:8,9\nvalue\n0\n1\n2\n3\n4\n3\n2\n1\n0\n";
        assert_eq!(read_csv(ok.as_bytes()).unwrap().values()[4], 4.0);
    }
}
