//! Plain-text kernel files and the CSV/JSON exports.
//!
//! Floats are written with 17 significant digits so that every file reads
//! back bit-identically.

use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::grid::{QuadratureRule, TimeGrid};
use crate::interference::{DelayPoint, HomMetrics, OutputStatistics};
use crate::kernel::{kernel_from_matrix, MemoryKernel};
use crate::schmidt::SchmidtDecomposition;

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "nan".into())
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(fmt_f64).collect::<Vec<_>>().join(" ")
}

/// Kernel file: a header `n T_W rule`, the nodes, the weights, then `n` rows
/// of `n` matrix entries.
pub fn write_kernel(kernel: &MemoryKernel, out: &mut impl Write) -> Result<()> {
    let grid = kernel.grid();
    writeln!(out, "{} {} {}", grid.len(), fmt_f64(grid.write_time()), grid.rule())?;
    writeln!(out, "{}", join(grid.nodes().iter().copied()))?;
    writeln!(out, "{}", join(grid.weights().iter().copied()))?;
    for row in kernel.matrix().row_iter() {
        writeln!(out, "{}", join(row.iter().copied()))?;
    }
    Ok(())
}

pub fn read_kernel(input: impl BufRead) -> Result<MemoryKernel> {
    let mut tokens = Vec::new();
    for line in input.lines() {
        let line = line?;
        tokens.extend(line.split_whitespace().map(str::to_owned));
    }
    let mut it = tokens.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| Error::Parse(format!("kernel file ends before {what}")));
    let n: usize = next("n")?.parse().map_err(|e| Error::Parse(format!("bad point count: {e}")))?;
    let write_time = parse_f64(&next("T_W")?)?;
    let rule: QuadratureRule = next("rule")?.parse()?;
    let mut read = |count: usize, what: &str| -> Result<Vec<f64>> {
        (0..count).map(|_| parse_f64(&next(what)?)).collect()
    };
    let nodes = read(n, "nodes")?;
    let weights = read(n, "weights")?;
    let entries = read(n * n, "matrix")?;
    if it.next().is_some() {
        return Err(Error::Parse("trailing data after kernel matrix".into()));
    }
    let grid = Arc::new(TimeGrid::from_parts(rule, write_time, nodes, weights)?);
    kernel_from_matrix(grid, DMatrix::from_row_slice(n, n, &entries))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|e| Error::Parse(format!("bad number `{s}`: {e}")))
}

/// `index,lambda,sqrt_lambda`, one-based index.
pub fn write_spectrum_csv(dec: &SchmidtDecomposition, out: &mut impl Write) -> Result<()> {
    writeln!(out, "index,lambda,sqrt_lambda")?;
    for (i, l) in dec.eigenvalues().iter().enumerate() {
        writeln!(out, "{},{},{}", i + 1, fmt_f64(*l), fmt_f64(l.sqrt()))?;
    }
    Ok(())
}

/// `node,weight,psi_1..psi_K`.
pub fn write_modes_csv(dec: &SchmidtDecomposition, out: &mut impl Write) -> Result<()> {
    let k = dec.retained();
    let header: Vec<String> = (1..=k).map(|i| format!("psi_{i}")).collect();
    writeln!(out, "node,weight,{}", header.join(","))?;
    let grid = dec.grid();
    for (r, (t, w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
        let row: Vec<String> = (0..k).map(|c| fmt_f64(dec.modes()[(r, c)])).collect();
        writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(*w), row.join(","))?;
    }
    Ok(())
}

pub fn metrics_json(m: &HomMetrics) -> Value {
    let mut obj = Map::new();
    obj.insert("coincidence".into(), json!(m.coincidence));
    if let Some(b) = m.bunching_conditional {
        obj.insert("bunching_conditional".into(), json!(b));
    }
    if let Some(f) = m.noon_fidelity {
        obj.insert("noon_fidelity".into(), json!(f));
    }
    obj.insert("total_efficiency".into(), json!(m.total_efficiency));
    Value::Object(obj)
}

/// `{p00, p10, p01, p20, p11, p02, rho2: {re, im}, metrics, truncation_weight}`,
/// `rho2` row-major on `{|2,0⟩, |1,1⟩, |0,2⟩}`.
pub fn statistics_json(stats: &OutputStatistics, metrics: &HomMetrics) -> Value {
    let re: Vec<f64> = stats.rho2.iter().flatten().map(|z| z.re).collect();
    let im: Vec<f64> = stats.rho2.iter().flatten().map(|z| z.im).collect();
    json!({
        "p00": stats.p00,
        "p10": stats.p10,
        "p01": stats.p01,
        "p20": stats.p20,
        "p11": stats.p11,
        "p02": stats.p02,
        "rho2": { "re": re, "im": im },
        "metrics": metrics_json(metrics),
        "truncation_weight": stats.truncation_weight,
    })
}

pub const DIP_HEADER: &str = "delay,overlap_sq,window_truncation,p00,p10,p01,p20,p11,p02,\
coincidence,bunching_conditional,noon_fidelity,total_efficiency";

pub fn dip_row(p: &DelayPoint) -> String {
    let s = &p.statistics;
    let m = &p.metrics;
    let mut fields = vec![fmt_f64(p.delay), fmt_f64(p.overlap_sq), fmt_f64(p.window_truncation)];
    fields.extend(s.probabilities().iter().map(|&x| fmt_f64(x)));
    fields.push(fmt_f64(m.coincidence));
    fields.push(fmt_opt(m.bunching_conditional));
    fields.push(fmt_opt(m.noon_fidelity));
    fields.push(fmt_f64(m.total_efficiency));
    fields.join(",")
}

pub fn write_dip_csv(points: &[DelayPoint], out: &mut impl Write) -> Result<()> {
    writeln!(out, "{DIP_HEADER}")?;
    for p in points {
        writeln!(out, "{}", dip_row(p))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{kernel_fast_memory, kernel_ideal};
    use crate::schmidt::decompose;

    #[test]
    fn kernel_file_round_trip_is_exact() {
        let grid = Arc::new(TimeGrid::new(9, 1.3, QuadratureRule::GaussLegendre).unwrap());
        let k = kernel_fast_memory(grid, 0.7, 12).unwrap();
        let mut buf = Vec::new();
        write_kernel(&k, &mut buf).unwrap();
        let back = read_kernel(&buf[..]).unwrap();
        assert_eq!(back.matrix(), k.matrix());
        assert_eq!(back.grid().nodes(), k.grid().nodes());
        assert_eq!(back.grid().weights(), k.grid().weights());
        assert_eq!(back.grid().rule(), QuadratureRule::GaussLegendre);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("9 1.3000000000000000e0 gauss-legendre\n"));
        assert_eq!(text.lines().count(), 3 + 9);
    }

    #[test]
    fn truncated_kernel_file_is_rejected() {
        let grid = Arc::new(TimeGrid::new(3, 1.0, QuadratureRule::Trapezoid).unwrap());
        let mut buf = Vec::new();
        write_kernel(&kernel_ideal(grid), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(matches!(read_kernel(cut.as_bytes()), Err(Error::Parse(_))));
        assert!(read_kernel("3 1 simpson".as_bytes()).is_err());
    }

    #[test]
    fn spectrum_csv_layout() {
        let grid = Arc::new(TimeGrid::new(3, 1.0, QuadratureRule::Trapezoid).unwrap());
        let dec = decompose(&kernel_ideal(grid), 0.0).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&dec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,lambda,sqrt_lambda");
        assert_eq!(lines.len(), 4);
        let fields: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(fields[0], 1.0);
        assert!((fields[1] - 1.0).abs() < 1e-14);

        let mut buf = Vec::new();
        write_modes_csv(&dec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("node,weight,psi_1,psi_2,psi_3\n"));
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
