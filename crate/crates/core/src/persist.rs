//! Plain-text model and optimizer files.
//!
//! Model (`ffp v1`):
//!
//! ```text
//! ffp v1 <outputs> <inputs> <activation> <slope>
//! <bias[0]>
//! ...
//! <bias[outputs-1]>
//! <W[0,0]> <W[0,1]> ... <W[0,inputs-1]>
//! ...
//! ```
//!
//! Optimizer (`adam v1`):
//!
//! ```text
//! adam v1 <outputs> <inputs> <steps>
//! <m[0]>            one line per parameter: weights row-major, then biases
//! ...
//! <v[0]>            same layout for the second moments
//! ...
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::linalg::{Matrix, Vector};
use crate::model::{ActivationKind, PerceptronModel};
use crate::optim::AdamState;
use crate::{Error, Result};

pub const MODEL_MAGIC: &str = "ffp v1";
pub const ADAM_MAGIC: &str = "adam v1";

struct Num(f64);

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

pub fn write_model<W: Write>(model: &PerceptronModel, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(
        out,
        "{MODEL_MAGIC} {} {} {} {}",
        model.outputs(),
        model.inputs(),
        model.activation.name(),
        Num(model.activation.slope())
    )?;
    for b in model.bias.iter() {
        writeln!(out, "{}", Num(*b))?;
    }
    let mut line = String::new();
    for i in 0..model.outputs() {
        line.clear();
        for (j, w) in model.weights.row(i).iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&Num(*w).to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self {
            inner: r.lines(),
            line: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn number(&self, token: &str) -> Result<f64> {
        token
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(format!("expected a finite number, found '{token}'")))
    }

    fn count(&self, token: Option<&str>, what: &str) -> Result<usize> {
        token
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| self.err(format!("expected {what} in header")))
    }

    fn values(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n)
            .map(|_| {
                let l = self.next()?;
                self.number(l.trim())
            })
            .collect()
    }

    fn end(&mut self) -> Result<()> {
        match self.inner.next() {
            None => Ok(()),
            Some(Ok(l)) if l.trim().is_empty() && self.inner.next().is_none() => Ok(()),
            Some(_) => {
                self.line += 1;
                Err(self.err("unexpected trailing content"))
            }
        }
    }
}

fn header<'a>(
    lines: &Lines<impl BufRead>,
    text: &'a str,
    magic: &str,
) -> Result<std::str::SplitWhitespace<'a>> {
    let rest = text
        .strip_prefix(magic)
        .filter(|r| r.starts_with(' '))
        .ok_or_else(|| lines.err(format!("expected header starting with '{magic}'")))?;
    Ok(rest.split_whitespace())
}

pub fn read_model<R: BufRead>(input: R) -> Result<PerceptronModel> {
    let mut lines = Lines::new(input);
    let head = lines.next()?;
    let mut tok = header(&lines, &head, MODEL_MAGIC)?;
    let outputs = lines.count(tok.next(), "output count")?;
    let inputs = lines.count(tok.next(), "input count")?;
    let name = tok
        .next()
        .ok_or_else(|| lines.err("expected activation name in header"))?;
    let slope = lines.number(
        tok.next()
            .ok_or_else(|| lines.err("expected slope in header"))?,
    )?;
    if tok.next().is_some() {
        return Err(lines.err("too many header fields"));
    }
    let activation = ActivationKind::from_name(name, slope)?;
    if outputs == 0 || inputs == 0 {
        return Err(lines.err("outputs and inputs must be >= 1"));
    }

    let bias = lines.values(outputs)?;
    let mut weights = Vec::with_capacity(outputs * inputs);
    for _ in 0..outputs {
        let l = lines.next()?;
        let before = weights.len();
        for t in l.split_whitespace() {
            weights.push(lines.number(t)?);
        }
        if weights.len() - before != inputs {
            return Err(lines.err(format!(
                "expected {inputs} weights, found {}",
                weights.len() - before
            )));
        }
    }
    lines.end()?;
    PerceptronModel::new(
        Matrix::from_vec(outputs, inputs, weights)?,
        Vector::new(bias)?,
        activation,
    )
}

pub fn write_adam<W: Write>(state: &AdamState, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    let (outputs, inputs) = state.shape();
    writeln!(out, "{ADAM_MAGIC} {outputs} {inputs} {}", state.steps())?;
    for v in state.first_moments().iter().chain(state.second_moments()) {
        writeln!(out, "{}", Num(*v))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_adam<R: BufRead>(input: R) -> Result<AdamState> {
    let mut lines = Lines::new(input);
    let head = lines.next()?;
    let mut tok = header(&lines, &head, ADAM_MAGIC)?;
    let outputs = lines.count(tok.next(), "output count")?;
    let inputs = lines.count(tok.next(), "input count")?;
    let steps = tok
        .next()
        .and_then(|t| t.parse::<u64>().ok())
        .ok_or_else(|| lines.err("expected step count in header"))?;
    if tok.next().is_some() {
        return Err(lines.err("too many header fields"));
    }
    let n = outputs * inputs + outputs;
    let m = lines.values(n)?;
    let v = lines.values(n)?;
    if v.iter().any(|&x| x < 0.0) {
        return Err(lines.err("second moments must be non-negative"));
    }
    lines.end()?;
    Ok(AdamState::from_parts(outputs, inputs, m, v, steps))
}

pub fn save_model(model: &PerceptronModel, path: impl AsRef<Path>) -> Result<()> {
    write_model(model, File::create(path)?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<PerceptronModel> {
    read_model(BufReader::new(File::open(path)?))
}

pub fn save_adam(state: &AdamState, path: impl AsRef<Path>) -> Result<()> {
    write_adam(state, File::create(path)?)
}

pub fn load_adam(path: impl AsRef<Path>) -> Result<AdamState> {
    read_adam(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_model() -> PerceptronModel {
        PerceptronModel::new(
            Matrix::from_rows(&[vec![0.1, -2.5e-300, 3.0], vec![1.0 / 3.0, 0.0, -7.25]]).unwrap(),
            Vector::new(vec![f64::MIN_POSITIVE, -1e10]).unwrap(),
            ActivationKind::LeakyRelu { slope: 0.01 },
        )
        .unwrap()
    }

    #[test]
    fn model_text_layout() {
        let mut buf = Vec::new();
        write_model(&small_model(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "ffp v1 2 3 leaky 1.0000000000000000e-2");
        assert_eq!(lines.len(), 1 + 2 + 2);
        assert_eq!(lines[3].split(' ').count(), 3);
        assert_eq!(read_model(text.as_bytes()).unwrap(), small_model());
    }

    #[test]
    fn model_parse_errors_carry_line_numbers() {
        let bad = "ffp v1 1 2 relu 0\n0.5\n1.0\n";
        assert!(matches!(
            read_model(bad.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        let bad = "ffp v2 1 2 relu 0\n";
        assert!(matches!(
            read_model(bad.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        let bad = "ffp v1 1 1 relu 0\nnan\n1\n";
        assert!(matches!(
            read_model(bad.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        let bad = "ffp v1 1 1 relu 0\n1\n1\n1\n";
        assert!(matches!(
            read_model(bad.as_bytes()),
            Err(Error::Parse { line: 4, .. })
        ));
        let bad = "ffp v1 1 1 leaky 2\n1\n1\n";
        assert!(matches!(
            read_model(bad.as_bytes()),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn adam_round_trip() {
        let state =
            AdamState::from_parts(1, 2, vec![0.1, -0.2, 1e-9], vec![0.0, 4.0, 1.0 / 7.0], 17);
        let mut buf = Vec::new();
        write_adam(&state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("adam v1 1 2 17\n"));
        assert_eq!(text.lines().count(), 7);
        assert_eq!(read_adam(text.as_bytes()).unwrap(), state);
        let negative = "adam v1 1 1 0\n0\n0\n-1\n0\n";
        assert!(read_adam(negative.as_bytes()).is_err());
    }
}
