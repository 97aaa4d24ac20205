//! Plain-text instance files.
//!
//! ```text
//! m n lambda
//! y_1
//! ...
//! y_m
//! a_11 a_12 ... a_1n
//! ...
//! a_m1 a_m2 ... a_mn
//! truth k sigma snr_db        (optional)
//! x_1 x_2 ... x_n             (optional, planted signal)
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a save
//! followed by a load is bit exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::{GroundTruth, ProblemInstance};
use crate::{Error, Result};

pub fn save_instance(
    path: impl AsRef<Path>,
    inst: &ProblemInstance,
    truth: Option<&GroundTruth>,
) -> Result<()> {
    let (m, n) = (inst.m(), inst.n());
    let mut out = String::new();
    writeln!(out, "{m} {n} {}", inst.lambda()).unwrap();
    for v in inst.y() {
        writeln!(out, "{v}").unwrap();
    }
    for i in 0..m {
        let row: Vec<String> = (0..n).map(|j| inst.a()[(i, j)].to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    if let Some(t) = truth {
        let snr = t
            .snr_db
            .map(|s| s.to_string())
            .unwrap_or_else(|| "none".into());
        writeln!(out, "truth {} {} {snr}", t.support.len(), t.sigma).unwrap();
        let row: Vec<String> = t.x_dagger.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<(ProblemInstance, Option<GroundTruth>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line + 1,
        message,
    };

    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(0, "empty file, expected header `m n lambda`".into()))?;
    let header: Vec<&str> = header.split_whitespace().collect();
    if header.len() != 3 {
        return Err(err(
            hline,
            format!("header must be `m n lambda`, got {} fields", header.len()),
        ));
    }
    let m: usize = parse(header[0]).map_err(|e| err(hline, e))?;
    let n: usize = parse(header[1]).map_err(|e| err(hline, e))?;
    let lambda: f64 = parse(header[2]).map_err(|e| err(hline, e))?;

    let mut y = Vec::with_capacity(m);
    for i in 0..m {
        let (ln, l) = lines.next().ok_or_else(|| {
            err(
                hline + 1 + i,
                format!("truncated file: expected y entry {} of {m}", i + 1),
            )
        })?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 1 {
            return Err(err(
                ln,
                format!("expected a single y entry, got {} fields", fields.len()),
            ));
        }
        y.push(parse(fields[0]).map_err(|e| err(ln, e))?);
    }

    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        let (ln, l) = lines.next().ok_or_else(|| {
            err(
                hline + 1 + m + i,
                format!("truncated file: expected row {} of A ({m} rows)", i + 1),
            )
        })?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != n {
            return Err(err(
                ln,
                format!(
                    "row {} of A has {} entries, expected {n}",
                    i + 1,
                    fields.len()
                ),
            ));
        }
        for (j, f) in fields.iter().enumerate() {
            a[(i, j)] = parse(f).map_err(|e| err(ln, e))?;
        }
    }

    let truth = match lines.next() {
        None => None,
        Some((ln, l)) => {
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "truth" {
                return Err(err(
                    ln,
                    "trailing content: expected `truth k sigma snr_db`".into(),
                ));
            }
            let k: usize = parse(fields[1]).map_err(|e| err(ln, e))?;
            let sigma: f64 = parse(fields[2]).map_err(|e| err(ln, e))?;
            let snr_db = match fields[3] {
                "none" => None,
                s => Some(parse(s).map_err(|e| err(ln, e))?),
            };
            let (xl, xs) = lines
                .next()
                .ok_or_else(|| err(ln + 1, "truncated file: expected planted signal".into()))?;
            let x_dagger = xs
                .split_whitespace()
                .map(parse)
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| err(xl, e))?;
            if x_dagger.len() != n {
                return Err(err(
                    xl,
                    format!(
                        "planted signal has {} entries, expected {n}",
                        x_dagger.len()
                    ),
                ));
            }
            let support: Vec<usize> = (0..n).filter(|&j| x_dagger[j] != 0.0).collect();
            if support.len() != k {
                return Err(err(
                    xl,
                    format!("planted signal has {} nonzeros but k = {k}", support.len()),
                ));
            }
            if let Some((extra, _)) = lines.next() {
                return Err(err(extra, "unexpected trailing content".into()));
            }
            Some(GroundTruth {
                x_dagger,
                support,
                sigma,
                snr_db,
            })
        }
    };

    Ok((ProblemInstance::new(y, a, lambda)?, truth))
}

fn parse<T: FromStr>(s: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>()
        .map_err(|e| format!("cannot parse `{s}`: {e}"))
}
