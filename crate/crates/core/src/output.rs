//! CSV and JSON artifacts. Floats carry 17 significant digits so that every
//! value reads back bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::integrator::Trajectory;
use crate::lattice::LatticeState;

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per sample: `t,re_0,im_0,…,re_{N−1},im_{N−1}` with columns indexed
/// by array position (site n sits at column ⌊N/2⌋ + n).
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut w: W) -> Result<()> {
    let sites = traj.states.first().map_or(0, |s| s.len());
    let mut header = String::from("t");
    for i in 0..sites {
        header.push_str(&format!(",re_{i},im_{i}"));
    }
    writeln!(w, "{header}")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let mut row = float(*t);
        for z in s.values() {
            row.push(',');
            row.push_str(&float(z.re));
            row.push(',');
            row.push_str(&float(z.im));
        }
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

/// Site profile `n,re,im,abs` of one state.
pub fn write_profile_csv<W: Write>(state: &LatticeState, mut w: W) -> Result<()> {
    writeln!(w, "n,re,im,abs")?;
    let lat = state.lattice();
    for (i, z) in state.values().iter().enumerate() {
        writeln!(w, "{},{},{},{}", lat.site_of(i), float(z.re), float(z.im), float(z.norm()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}
