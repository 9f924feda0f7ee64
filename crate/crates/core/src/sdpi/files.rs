use crate::error::{Error, Result};
use crate::num_kernel::{Channel, Pmf};
use serde::{Deserialize, Serialize};

/// Channel input file: sizes, the column-major matrix (entry `y + x*n_out`
/// is P(y | x)) and the reference input pmf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub n_in: usize,
    pub n_out: usize,
    pub matrix: Vec<f64>,
    pub reference: Vec<f64>,
}

impl ChannelFile {
    pub fn into_parts(self) -> Result<(Pmf<f64>, Channel<f64>)> {
        if self.reference.len() != self.n_in {
            return Err(Error::Parameter(format!(
                "reference has {} entries, expected n_in = {}",
                self.reference.len(),
                self.n_in
            )));
        }
        if self.matrix.len() != self.n_in * self.n_out {
            return Err(Error::Parameter(format!(
                "matrix has {} entries, expected n_in * n_out = {}",
                self.matrix.len(),
                self.n_in * self.n_out
            )));
        }
        let channel = Channel::from_column_major(self.n_out, self.n_in, self.matrix)?;
        Ok((Pmf::new(self.reference)?, channel))
    }
}

/// Parses a TOML channel file.
pub fn parse_channel_file(text: &str) -> Result<(Pmf<f64>, Channel<f64>)> {
    let file: ChannelFile = toml::from_str(text).map_err(|e| {
        let position = match e.span() {
            Some(span) => {
                let before = &text[..span.start];
                let line = before.matches('\n').count() + 1;
                let col = span.start - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                format!("line {line}, column {col}")
            }
            None => "input".into(),
        };
        Error::Parse { position, message: e.message().to_string() }
    })?;
    file.into_parts()
}
