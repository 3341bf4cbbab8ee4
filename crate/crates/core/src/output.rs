//! CSV artifacts and the human-readable scaling report.
//!
//! Times are written in μs. Every float is written with 17 significant
//! digits so the files round-trip exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::ensemble::EnsembleSummary;
use crate::error::{Error, Result};
use crate::scaling::ScalingReport;

pub const TRACES_HEADER: &str =
    "time_us,fid_mean,fid_std,s_ent_mean,s_ent_std,s1_mean,s1_std,s2_mean,s2_std";
pub const INTENSITIES_HEADER: &str = "time_us,n,intensity_mean,intensity_std";
pub const FID_HEADER: &str = "time_us,fid_mean,fid_std,s_ent_mean,s_ent_std";
pub const ENTROPY_HEADER: &str = "time_us,s_ent_mean,s_ent_std,s1_mean,s1_std,s2_mean,s2_std";
pub const SCALING_HEADER: &str =
    "n_spins,realizations,alpha,beta,growth_r_squared,s2_saturation,s2_saturation_std,t_eq_us";

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn table(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn time_us(t: f64) -> String {
    fmt_f64(t * 1e6)
}

pub fn traces_csv(s: &EnsembleSummary) -> String {
    table(
        TRACES_HEADER,
        s.times.iter().enumerate().map(|(i, &t)| {
            let mut row = vec![time_us(t)];
            for stat in [&s.fid, &s.s_ent, &s.s1, &s.s2] {
                row.push(fmt_f64(stat.mean[i]));
                row.push(fmt_f64(stat.std[i]));
            }
            row
        }),
    )
}

pub fn intensities_csv(s: &EnsembleSummary) -> String {
    let n = s.n_spins as i64;
    table(
        INTENSITIES_HEADER,
        s.times.iter().zip(&s.intensity).flat_map(|(&t, stat)| {
            (-n..=n).map(move |order| {
                let idx = (order + n) as usize;
                vec![
                    time_us(t),
                    order.to_string(),
                    fmt_f64(stat.mean[idx]),
                    fmt_f64(stat.std[idx]),
                ]
            })
        }),
    )
}

pub fn fid_csv(s: &EnsembleSummary) -> String {
    table(
        FID_HEADER,
        s.times.iter().enumerate().map(|(i, &t)| {
            vec![
                time_us(t),
                fmt_f64(s.fid.mean[i]),
                fmt_f64(s.fid.std[i]),
                fmt_f64(s.s_ent.mean[i]),
                fmt_f64(s.s_ent.std[i]),
            ]
        }),
    )
}

pub fn entropy_csv(s: &EnsembleSummary) -> String {
    table(
        ENTROPY_HEADER,
        s.times.iter().enumerate().map(|(i, &t)| {
            let mut row = vec![time_us(t)];
            for stat in [&s.s_ent, &s.s1, &s.s2] {
                row.push(fmt_f64(stat.mean[i]));
                row.push(fmt_f64(stat.std[i]));
            }
            row
        }),
    )
}

/// Writes `traces.csv` and `intensities.csv` into `dir`.
pub fn emit_traces(s: &EnsembleSummary, dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write_file(dir, "traces.csv", &traces_csv(s))?,
        write_file(dir, "intensities.csv", &intensities_csv(s))?,
    ])
}

pub fn emit_fid(s: &EnsembleSummary, dir: &Path) -> Result<PathBuf> {
    write_file(dir, "fid.csv", &fid_csv(s))
}

pub fn emit_entropy(s: &EnsembleSummary, dir: &Path) -> Result<PathBuf> {
    write_file(dir, "entropy.csv", &entropy_csv(s))
}

pub fn emit_intensities(s: &EnsembleSummary, dir: &Path) -> Result<PathBuf> {
    write_file(dir, "intensities.csv", &intensities_csv(s))
}

/// A parsed numeric CSV: header names and rows of floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Parses a numeric CSV, requiring the exact `expected_header`.
pub fn parse_table(text: &str, expected_header: &str) -> Result<Table> {
    let bad = |msg: String| Error::Parse {
        path: PathBuf::from("<csv>"),
        msg,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    if header != expected_header {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let width = header.split(',').count();
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
            if row.len() != width {
                return Err(bad(format!("row {} has {} fields", i + 1, row.len())));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: header.split(',').map(String::from).collect(),
        rows,
    })
}

pub fn read_table(path: &Path, expected_header: &str) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text, expected_header).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::Parse {
            path: path.to_path_buf(),
            msg,
        },
        other => other,
    })
}

/// One row per bath size. The ln N fits are in `report.txt`.
pub fn scaling_csv(r: &ScalingReport) -> String {
    table(
        SCALING_HEADER,
        r.sizes.iter().map(|s| {
            vec![
                s.n_spins.to_string(),
                s.realizations.to_string(),
                fmt_f64(s.growth.intercept),
                fmt_f64(s.growth.slope),
                fmt_f64(s.growth.r_squared),
                fmt_f64(s.saturation.mean),
                fmt_f64(s.saturation.std),
                s.equilibration_time
                    .map(|t| fmt_f64(t * 1e6))
                    .unwrap_or_else(|| "nan".into()),
            ]
        }),
    )
}

pub fn format_report(r: &ScalingReport) -> String {
    let mut out = String::new();
    let o = &r.options;
    let _ = writeln!(
        out,
        "S2 growth fit window {} to {} μs, saturation window t > {} μs",
        o.fit_window_us.0, o.fit_window_us.1, o.saturation_t_min_us
    );
    let _ = writeln!(out, "{:>4} {:>6} {:>8} {:>8} {:>8} {:>10}", "N", "reals", "alpha", "beta", "S2_sat", "T_eq(us)");
    for s in &r.sizes {
        let teq = s
            .equilibration_time
            .map(|t| format!("{:.1}", t * 1e6))
            .unwrap_or_else(|| "n/a".into());
        let _ = writeln!(
            out,
            "{:>4} {:>6} {:>8.4} {:>8.4} {:>8.4} {:>10}",
            s.n_spins, s.realizations, s.growth.intercept, s.growth.slope, s.saturation.mean, teq
        );
    }
    let b = &r.beta_fit;
    let _ = writeln!(
        out,
        "beta  = {:.4} + {:.4} ln N   (R² = {:.4}, rms = {:.2e})",
        b.intercept, b.slope, b.r_squared, b.rms_residual
    );
    let s = &r.saturation_fit;
    let _ = writeln!(
        out,
        "S2bar = {:.4} + {:.4} ln N   (R² = {:.4}, rms = {:.2e})",
        s.intercept, s.slope, s.r_squared, s.rms_residual
    );
    match (r.t_eq_mean, r.t_eq_std) {
        (Some(m), Some(sd)) => {
            let _ = writeln!(
                out,
                "T_eq (N ≥ {}) = ({:.1} ± {:.1}) μs, relative spread {:.3}",
                o.t_eq_min_size,
                m * 1e6,
                sd * 1e6,
                sd / m
            );
        }
        _ => {
            let _ = writeln!(out, "T_eq (N ≥ {}) = n/a", o.t_eq_min_size);
        }
    }
    out
}

pub fn emit_scaling(r: &ScalingReport, dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write_file(dir, "scaling.csv", &scaling_csv(r))?,
        write_file(dir, "report.txt", &format_report(r))?,
    ])
}

/// Highest Hamming order shown in the intensity figure data.
pub const PLOT_MAX_ORDER: i64 = 6;

/// Per-figure data for the FID/entanglement, intensity/Rényi and scaling
/// figures. `examples` are individual realizations drawn as thin lines.
pub fn emit_plot_data(
    main: &EnsembleSummary,
    examples: &[EnsembleSummary],
    sizes: Option<(&BTreeMap<usize, EnsembleSummary>, &ScalingReport)>,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();

    let mut header = String::from("time_us,fid_mean,s_ent_mean");
    for i in 0..examples.len() {
        let _ = write!(header, ",fid_r{i},s_ent_r{i}");
    }
    let fid_ent = table(
        &header,
        main.times.iter().enumerate().map(|(i, &t)| {
            let mut row = vec![time_us(t), fmt_f64(main.fid.mean[i]), fmt_f64(main.s_ent.mean[i])];
            for e in examples {
                row.push(fmt_f64(e.fid.mean[i]));
                row.push(fmt_f64(e.s_ent.mean[i]));
            }
            row
        }),
    );
    paths.push(write_file(dir, "fid_entanglement.csv", &fid_ent)?);

    let max_order = PLOT_MAX_ORDER.min(main.n_spins as i64);
    let mut header = String::from("time_us");
    for n in 0..=max_order {
        let _ = write!(header, ",I_{n}");
    }
    let orders: Vec<Vec<f64>> = (0..=max_order).map(|n| main.order_series(n)).collect();
    let order_table = table(
        &header,
        main.times.iter().enumerate().map(|(i, &t)| {
            std::iter::once(time_us(t))
                .chain(orders.iter().map(|o| fmt_f64(o[i])))
                .collect()
        }),
    );
    paths.push(write_file(dir, "intensities_by_order.csv", &order_table)?);

    let renyi = table(
        "time_us,s1_mean,s1_std,s2_mean,s2_std",
        main.times.iter().enumerate().map(|(i, &t)| {
            vec![
                time_us(t),
                fmt_f64(main.s1.mean[i]),
                fmt_f64(main.s1.std[i]),
                fmt_f64(main.s2.mean[i]),
                fmt_f64(main.s2.std[i]),
            ]
        }),
    );
    paths.push(write_file(dir, "renyi_entropies.csv", &renyi)?);

    if let Some((by_size, report)) = sizes {
        let mut header = String::from("time_us");
        for n in by_size.keys() {
            let _ = write!(header, ",s2_N{n}");
        }
        let times = &by_size.values().next().map(|s| s.times.clone()).unwrap_or_default();
        let s2_table = table(
            &header,
            times.iter().enumerate().map(|(i, &t)| {
                std::iter::once(time_us(t))
                    .chain(by_size.values().map(|s| fmt_f64(s.s2.mean[i])))
                    .collect()
            }),
        );
        paths.push(write_file(dir, "s2_by_size.csv", &s2_table)?);

        let fits = table(
            "n_spins,beta,beta_fit,s2_saturation,s2_saturation_fit,t_eq_us",
            report.sizes.iter().map(|s| {
                let ln = (s.n_spins as f64).ln();
                vec![
                    s.n_spins.to_string(),
                    fmt_f64(s.growth.slope),
                    fmt_f64(report.beta_fit.predict(ln)),
                    fmt_f64(s.saturation.mean),
                    fmt_f64(report.saturation_fit.predict(ln)),
                    s.equilibration_time
                        .map(|t| fmt_f64(t * 1e6))
                        .unwrap_or_else(|| "nan".into()),
                ]
            }),
        );
        paths.push(write_file(dir, "scaling_fits.csv", &fits)?);
    }
    Ok(paths)
}
