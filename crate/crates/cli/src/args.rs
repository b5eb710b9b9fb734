use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hetlab",
    version,
    about = "Return-map laboratory for saddle-center heteroclinic connections"
)]
pub struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads; overrides HETLAB_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Tolerance override, repeatable.
    #[arg(long, global = true, value_name = "KEY=VALUE", value_parser = parse_kv)]
    pub tol: Vec<(String, String)>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Neg,
    Pos,
    Case2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a spec and report derived limits.
    Validate { spec: PathBuf },

    /// Crossings of the unstable trace with u = 0.
    #[command(group(ArgGroup::new("which").required(true).args(["level", "v0"])))]
    Census {
        spec: PathBuf,
        /// Energy level c.
        #[arg(long, allow_hyphen_values = true)]
        level: Option<f64>,
        /// The critical level c = 0 (case 1).
        #[arg(long)]
        v0: bool,
        #[arg(long)]
        tau_min: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
    },

    /// Homoclinic tangency sequences.
    Tangencies {
        spec: PathBuf,
        #[arg(long, value_enum)]
        side: Side,
        /// Number of levels (neg).
        #[arg(long)]
        count: Option<usize>,
        /// Diagonal preimage indices a..b (pos, case2).
        #[arg(long, value_parser = parse_int_range)]
        n_range: Option<(i32, i32)>,
        /// Scan start for neg; defaults to -c_max.
        #[arg(long, allow_hyphen_values = true)]
        c_start: Option<f64>,
        /// Level of the case-2 census.
        #[arg(long)]
        c: Option<f64>,
    },

    /// Heteroclinic web at a level c > 0.
    Web {
        spec: PathBuf,
        #[arg(long)]
        c: f64,
    },

    /// Saddle-center loop parameters mu_n.
    Loops {
        spec: PathBuf,
        #[arg(long, value_parser = parse_int_range)]
        n_range: (i32, i32),
        #[arg(long, default_value_t = 0.01)]
        mu_max: f64,
    },

    /// Fixed points of the strip maps over a window of levels.
    Elliptic {
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_float_range)]
        c_window: (f64, f64),
        #[arg(long, value_parser = parse_int_range)]
        k_range: (i32, i32),
    },
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn split_range(s: &str) -> Result<(&str, &str), String> {
    s.split_once("..")
        .ok_or_else(|| format!("expected a..b, got `{s}`"))
}

pub fn parse_int_range(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = split_range(s)?;
    let a: i32 = a.trim().parse().map_err(|_| format!("bad integer `{a}`"))?;
    let b: i32 = b.trim().parse().map_err(|_| format!("bad integer `{b}`"))?;
    if a > b {
        return Err(format!("range {a}..{b} is empty"));
    }
    Ok((a, b))
}

pub fn parse_float_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = split_range(s)?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(format!("range {a}..{b} is empty"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_int_range("3..8"), Ok((3, 8)));
        assert!(parse_int_range("8..3").is_err());
        assert_eq!(
            parse_float_range("-4.2e-3..-3.4e-3"),
            Ok((-4.2e-3, -3.4e-3))
        );
        assert_eq!(parse_float_range("-1e-3..-1e-3"), Ok((-1e-3, -1e-3)));
        assert!(parse_float_range("1..").is_err());
    }

    #[test]
    fn negative_values_parse() {
        let cli = Cli::try_parse_from([
            "hetlab",
            "elliptic",
            "s.json",
            "--c-window",
            "-4e-3..-3e-3",
            "--k-range",
            "3..8",
        ])
        .unwrap();
        match cli.command {
            Command::Elliptic {
                c_window, k_range, ..
            } => {
                assert_eq!(c_window, (-4e-3, -3e-3));
                assert_eq!(k_range, (3, 8));
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from(["hetlab", "census", "s.json", "--level", "-1e-4"]).unwrap();
        assert!(matches!(cli.command, Command::Census { level: Some(l), .. } if l == -1e-4));
    }

    #[test]
    fn census_needs_a_level() {
        assert!(Cli::try_parse_from(["hetlab", "census", "s.json"]).is_err());
        assert!(
            Cli::try_parse_from(["hetlab", "census", "s.json", "--v0", "--level", "1"]).is_err()
        );
    }

    #[test]
    fn tolerance_overrides() {
        let cli =
            Cli::try_parse_from(["hetlab", "validate", "s.json", "--tol", "det=1e-8"]).unwrap();
        assert_eq!(cli.tol, vec![("det".to_string(), "1e-8".to_string())]);
    }
}
