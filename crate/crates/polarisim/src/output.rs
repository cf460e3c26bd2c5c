//! File formats and atomic writes.
//!
//! Every float is written as `{:.16e}` (17 significant digits) in CSV and
//! JSON alike, so identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use polarisim_core::analysis::Samples;
use polarisim_core::response::{Spectrum, TransferFunction};
use polarisim_core::timedomain::Trajectory;
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

pub const SPECTRUM_HEADER: &str = "wavenumber_cm1,value";
pub const TRANSFER_HEADER: &str = "wavenumber_cm1,re,im";
pub const TRAJECTORY_HEADER: &str =
    "t_internal,re_b,im_b,re_p1,im_p1,re_p3,im_p3,re_sin,im_sin,re_sout,im_sout";

/// Writes `x` in fixed scientific notation with 17 significant digits.
pub fn sci(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("writing to a String cannot fail");
}

fn csv_rows<const N: usize>(header: &str, rows: impl Iterator<Item = [f64; N]>) -> String {
    let mut out = String::with_capacity(64 * N);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        for (k, x) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            sci(&mut out, *x);
        }
        out.push('\n');
    }
    out
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    csv_rows(SPECTRUM_HEADER, s.iter().map(|(w, v)| [w, v]))
}

pub fn transfer_csv(t: &TransferFunction) -> String {
    csv_rows(TRANSFER_HEADER, t.iter().map(|(w, z)| [w, z.re, z.im]))
}

/// Rotating-frame trajectory, one row per time step.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    csv_rows(
        TRAJECTORY_HEADER,
        (0..traj.len()).map(|k| {
            let (b, p1, p3, si, so) = (
                traj.beta[k],
                traj.p1[k],
                traj.p3[k],
                traj.s_in[k],
                traj.s_out[k],
            );
            [
                traj.time(k),
                b.re,
                b.im,
                p1.re,
                p1.im,
                p3.re,
                p3.im,
                si.re,
                si.im,
                so.re,
                so.im,
            ]
        }),
    )
}

/// JSON formatter that prints floats like the CSV files.
struct Scientific;

impl serde_json::ser::Formatter for Scientific {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Scientific);
    value
        .serialize(&mut ser)
        .expect("output types always serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Reads `wavenumber_cm1,value` data. Lines starting with `#` are skipped, a
/// non-numeric first row is taken as a header, and frequencies must increase
/// strictly.
pub fn read_samples(path: &Path) -> Result<Samples> {
    let data_error = |message: String| CliError::Data {
        path: path.to_owned(),
        message,
    };
    let file = fs::File::open(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let (mut omega, mut values) = (Vec::new(), Vec::new());
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data_error(e.to_string()))?;
        if record.len() != 2 {
            return Err(data_error(format!(
                "row {} has {} columns, expected 2",
                index + 1,
                record.len()
            )));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(w), Ok(v)) => {
                omega.push(w);
                values.push(v);
            }
            _ if index == 0 => continue,
            _ => return Err(data_error(format!("row {} is not numeric", index + 1))),
        }
    }
    Samples::new(omega, values).map_err(|e| data_error(e.to_string()))
}

/// Output directory collecting the names of files written into it.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<OutputDir> {
        fs::create_dir_all(root).map_err(|source| CliError::Write {
            path: root.to_owned(),
            source,
        })?;
        Ok(OutputDir {
            root: root.to_owned(),
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let target = self.root.join(name);
        let error = |source| CliError::Write {
            path: target.clone(),
            source,
        };
        let mut tmp = NamedTempFile::new_in(&self.root).map_err(error)?;
        tmp.write_all(contents.as_bytes()).map_err(error)?;
        tmp.as_file().sync_all().map_err(error)?;
        tmp.persist(&target).map_err(|e| error(e.error))?;
        self.written.push(name.to_owned());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, &to_json(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use polarisim_core::SpectralGrid;

    #[test]
    fn seventeen_digits() {
        let mut s = String::new();
        sci(&mut s, 1983.0);
        assert_eq!(s, "1.9830000000000000e3");
        s.clear();
        sci(&mut s, -0.1);
        assert_eq!(s, "-1.0000000000000001e-1");
    }

    #[test]
    fn json_uses_scientific_floats() {
        #[derive(Serialize)]
        struct Row {
            x: f64,
            n: usize,
            missing: Option<f64>,
        }
        let json = to_json(&Row {
            x: 0.5,
            n: 3,
            missing: None,
        });
        assert_eq!(
            json,
            "{\"x\":5.0000000000000000e-1,\"n\":3,\"missing\":null}\n"
        );
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["x"], 0.5);
    }

    #[test]
    fn spectrum_layout() {
        let grid = SpectralGrid::new(1.0, 2.0, 1.0).unwrap();
        let s = Spectrum::new(grid, vec![0.25, 0.0]).unwrap();
        assert_eq!(
            spectrum_csv(&s),
            "wavenumber_cm1,value\n1.0000000000000000e0,2.5000000000000000e-1\n2.0000000000000000e0,0.0000000000000000e0\n"
        );
    }
}
