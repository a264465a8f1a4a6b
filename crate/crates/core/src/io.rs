//! CSV exchange formats. Floats are written with 17 significant digits.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::harness::GridRow;
use crate::ode::{PoleData, State, Trajectory};

pub const TRAJECTORY_HEADER: &str = "x,y,dy,H";
pub const POLES_HEADER: &str = "n,p,h";
pub const GRID_HEADER: &str = "x,y_num,y_asym,h_num,h_asym,masked";

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
        k => Error::InvalidInput(format!("{k:?}")),
    }
}

fn writer<W: Write>(w: W, header: &str) -> Result<csv::Writer<W>> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(header.split(',')).map_err(csv_err)?;
    Ok(out)
}

pub fn write_trajectory<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let mut out = writer(w, TRAJECTORY_HEADER)?;
    for s in &traj.samples {
        let st = &s.state;
        out.write_record([f(st.x), f(st.y), f(st.dy), f(s.hamiltonian)])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_poles<W: Write>(w: W, poles: &[PoleData]) -> Result<()> {
    let mut out = writer(w, POLES_HEADER)?;
    for (n, pd) in poles.iter().enumerate() {
        out.write_record([(n + 1).to_string(), f(pd.p), f(pd.h)])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_grid<W: Write>(w: W, grid: &[GridRow]) -> Result<()> {
    let mut out = writer(w, GRID_HEADER)?;
    for r in grid {
        let masked = u8::from(r.masked).to_string();
        out.write_record([f(r.x), f(r.y_num), f(r.y_asym), f(r.h_num), f(r.h_asym), masked])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn rows<R: Read>(r: R, header: &str) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let found: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if found.join(",") != header {
        return Err(Error::InvalidInput(format!(
            "expected header `{header}`, found `{}`",
            found.join(",")
        )));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let vals = rec
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidInput(format!("line {line}: {e}")))?;
        out.push(vals);
    }
    Ok(out)
}

/// Reads `x,y,dy,H` rows; the `H` column is ignored.
pub fn read_trajectory<R: Read>(r: R) -> Result<Vec<State>> {
    Ok(rows(r, TRAJECTORY_HEADER)?
        .into_iter()
        .map(|v| State::new(v[0], v[1], v[2]))
        .collect())
}

pub fn read_poles<R: Read>(r: R) -> Result<Vec<PoleData>> {
    Ok(rows(r, POLES_HEADER)?
        .into_iter()
        .map(|v| PoleData::new(v[1], v[2]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{integrate, IntegratorConfig, Start};

    #[test]
    fn trajectory_round_trip_is_exact() {
        let traj = integrate(
            Start::Point(State::new(0.0, 0.0, 0.0)),
            -3.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,y,dy,H\n"));
        let back = read_trajectory(&buf[..]).unwrap();
        assert_eq!(back.len(), traj.samples.len());
        for (a, b) in back.iter().zip(&traj.samples) {
            assert_eq!(*a, b.state);
        }
    }

    #[test]
    fn poles_round_trip() {
        let poles = vec![PoleData::new(-2.5, 0.1), PoleData::new(-4.6, 1.0 / 3.0)];
        let mut buf = Vec::new();
        write_poles(&mut buf, &poles).unwrap();
        assert_eq!(read_poles(&buf[..]).unwrap(), poles);
    }

    #[test]
    fn grid_layout() {
        let row = GridRow {
            x: -1.0,
            y_num: 0.5,
            y_asym: 0.25,
            h_num: 1.0,
            h_asym: 2.0,
            masked: true,
        };
        let mut buf = Vec::new();
        write_grid(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(GRID_HEADER));
        assert!(lines.next().unwrap().ends_with(",1"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_trajectory(&b"a,b\n1,2\n"[..]).is_err());
        assert!(read_trajectory(&b"x,y,dy,H\n1,2\n"[..]).is_err());
        assert!(read_trajectory(&b"x,y,dy,H\n1,2,z,4\n"[..]).is_err());
    }
}
