//! CSV schemas. Floats are written with 17 significant digits, which makes
//! output deterministic and lets every value parse back to the same `f64`.

use super::report::ComparisonRow;
use super::CliError;
use crate::asymptotics::AsymptoticRecord;
use crate::quasiclassical_map::Contour;
use crate::reference_solver::EigenEntry;
use crate::special_functions::ln_phi2;
use crate::wronskian_engine::WronskianSample;
use serde::{Deserialize, Serialize};

pub const EIGEN_HEADER: [&str; 4] = ["n", "mu", "err_est", "solver"];
pub const ASYMPTOTIC_HEADER: [&str; 4] = ["n", "mu0", "mu1", "variant"];
pub const WRONSKIAN_HEADER: [&str; 3] = ["lambda", "w_normalized", "variant"];
pub const CONTOUR_HEADER: [&str; 7] = ["x", "t_re", "t_im", "z_re", "z_im", "weight", "side"];
pub const COMPARISON_HEADER: [&str; 6] = ["n", "mu_ref", "err_est", "mu0", "mu1", "residual"];

/// `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_table<const K: usize>(header: [&str; K], rows: impl Iterator<Item = [String; K]>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Table(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Table(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Table(e.to_string()))
}

fn read_table<const K: usize>(header: [&str; K], text: &str) -> Result<Vec<[String; K]>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let got = r.headers().map_err(|e| CliError::Table(e.to_string()))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(CliError::Table(format!(
            "expected header {}, found {}",
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| CliError::Table(e.to_string()))?;
            if rec.len() != K {
                return Err(CliError::Table(format!("row has {} fields, expected {K}", rec.len())));
            }
            Ok(std::array::from_fn(|i| rec[i].to_string()))
        })
        .collect()
}

fn num<T: std::str::FromStr>(field: &str, s: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| CliError::Table(format!("{field} = '{s}': {e}")))
}

pub fn eigen_csv(entries: &[EigenEntry]) -> Result<String, CliError> {
    write_table(
        EIGEN_HEADER,
        entries
            .iter()
            .map(|e| [e.n.to_string(), fmt_f64(e.mu), fmt_f64(e.err_est), e.solver.name().to_string()]),
    )
}

pub fn read_eigen_csv(text: &str) -> Result<Vec<EigenEntry>, CliError> {
    read_table(EIGEN_HEADER, text)?
        .iter()
        .map(|r| {
            Ok(EigenEntry {
                n: num("n", &r[0])?,
                mu: num("mu", &r[1])?,
                err_est: num("err_est", &r[2])?,
                solver: r[3].parse().map_err(CliError::Table)?,
            })
        })
        .collect()
}

pub fn asymptotic_csv(records: &[AsymptoticRecord]) -> Result<String, CliError> {
    write_table(
        ASYMPTOTIC_HEADER,
        records
            .iter()
            .map(|r| [r.n.to_string(), fmt_f64(r.mu0), fmt_f64(r.mu1), r.mu1_variant.name().to_string()]),
    )
}

pub fn read_asymptotic_csv(text: &str) -> Result<Vec<AsymptoticRecord>, CliError> {
    read_table(ASYMPTOTIC_HEADER, text)?
        .iter()
        .map(|r| {
            Ok(AsymptoticRecord {
                n: num("n", &r[0])?,
                mu0: num("mu0", &r[1])?,
                mu1: num("mu1", &r[2])?,
                mu1_variant: r[3].parse().map_err(CliError::Table)?,
            })
        })
        .collect()
}

pub fn wronskian_csv(samples: &[WronskianSample]) -> Result<String, CliError> {
    write_table(
        WRONSKIAN_HEADER,
        samples
            .iter()
            .map(|s| [fmt_f64(s.lambda), fmt_f64(s.value), s.variant.name().to_string()]),
    )
}

/// Samples read back; the scale is `ln phi^2(lambda)` for every variant.
pub fn read_wronskian_csv(text: &str) -> Result<Vec<WronskianSample>, CliError> {
    read_table(WRONSKIAN_HEADER, text)?
        .iter()
        .map(|r| {
            let lambda: f64 = num("lambda", &r[0])?;
            Ok(WronskianSample {
                lambda,
                value: num("w_normalized", &r[1])?,
                ln_scale: ln_phi2(lambda),
                variant: r[2].parse().map_err(CliError::Table)?,
            })
        })
        .collect()
}

/// One contour node. `side` is `minus` before `z_*`, `star` at it and `plus` after.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourRow {
    pub x: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub weight: f64,
    pub side: String,
}

pub fn contour_rows(c: &Contour) -> Vec<ContourRow> {
    c.points
        .iter()
        .enumerate()
        .map(|(i, p)| ContourRow {
            x: p.point.x,
            t_re: p.point.t.re,
            t_im: p.point.t.im,
            z_re: p.point.z.re,
            z_im: p.point.z.im,
            weight: p.weight,
            side: match i.cmp(&c.star_index) {
                std::cmp::Ordering::Less => "minus",
                std::cmp::Ordering::Equal => "star",
                std::cmp::Ordering::Greater => "plus",
            }
            .to_string(),
        })
        .collect()
}

pub fn contour_csv(rows: &[ContourRow]) -> Result<String, CliError> {
    write_table(
        CONTOUR_HEADER,
        rows.iter().map(|r| {
            [
                fmt_f64(r.x),
                fmt_f64(r.t_re),
                fmt_f64(r.t_im),
                fmt_f64(r.z_re),
                fmt_f64(r.z_im),
                fmt_f64(r.weight),
                r.side.clone(),
            ]
        }),
    )
}

pub fn read_contour_csv(text: &str) -> Result<Vec<ContourRow>, CliError> {
    read_table(CONTOUR_HEADER, text)?
        .iter()
        .map(|r| {
            Ok(ContourRow {
                x: num("x", &r[0])?,
                t_re: num("t_re", &r[1])?,
                t_im: num("t_im", &r[2])?,
                z_re: num("z_re", &r[3])?,
                z_im: num("z_im", &r[4])?,
                weight: num("weight", &r[5])?,
                side: r[6].clone(),
            })
        })
        .collect()
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> Result<String, CliError> {
    write_table(
        COMPARISON_HEADER,
        rows.iter().map(|r| {
            [
                r.n.to_string(),
                fmt_f64(r.mu_ref),
                fmt_f64(r.err_est),
                fmt_f64(r.mu0),
                fmt_f64(r.mu1),
                fmt_f64(r.residual),
            ]
        }),
    )
}

pub fn read_comparison_csv(text: &str) -> Result<Vec<ComparisonRow>, CliError> {
    read_table(COMPARISON_HEADER, text)?
        .iter()
        .map(|r| {
            Ok(ComparisonRow {
                n: num("n", &r[0])?,
                mu_ref: num("mu_ref", &r[1])?,
                err_est: num("err_est", &r[2])?,
                mu0: num("mu0", &r[3])?,
                mu1: num("mu1", &r[4])?,
                residual: num("residual", &r[5])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference_solver::Solver;

    #[test]
    fn floats_keep_seventeen_digits_and_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17);
        }
    }

    #[test]
    fn eigen_table_round_trips() {
        let entries = vec![
            EigenEntry { n: 0, mu: 1.5, err_est: 1e-13, solver: Solver::Galerkin },
            EigenEntry { n: 1, mu: 3.500000000000001, err_est: 0.0, solver: Solver::WronskianAsym },
        ];
        let text = eigen_csv(&entries).unwrap();
        assert!(text.starts_with("n,mu,err_est,solver\n"));
        assert_eq!(read_eigen_csv(&text).unwrap(), entries);
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_eigen_csv("n,mu,solver\n0,1,galerkin\n").is_err());
        assert!(read_eigen_csv("n,mu,err_est,solver\n0,x,0,galerkin\n").is_err());
    }
}
