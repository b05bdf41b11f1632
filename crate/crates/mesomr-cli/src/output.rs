//! CSV output with full round-trip float precision.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

/// Prints one line to stdout, exiting quietly when the consumer has closed
/// the pipe (e.g. `mesomr scan ... | head`).
pub fn emit(line: std::fmt::Arguments) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match out.write_fmt(line).and_then(|_| out.write_all(b"\n")) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(CliError::Io(format!("stdout: {e}"))),
    }
}

/// `println!` through [`emit`].
macro_rules! outln {
    ($($arg:tt)*) => {
        crate::output::emit(format_args!($($arg)*))?
    };
}
pub(crate) use outln;

/// Formats a float with 17 significant digits, enough to reparse the exact
/// value; output is byte-stable across runs.
pub fn fmt_field(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        Ok(CsvWriter {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    pub fn header(&mut self, columns: &[&str]) -> Result<(), CliError> {
        let line = columns.join(",");
        writeln!(self.out, "{line}").map_err(|e| CliError::io(&self.path, e))
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), CliError> {
        let line = values
            .iter()
            .map(|&v| fmt_field(v))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(self.out, "{line}").map_err(|e| CliError::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush().map_err(|e| CliError::io(&self.path, e))
    }
}
