//! Result files: result.json, one CSV per table, curves/*.csv and a timing
//! sidecar. Only the sidecar changes between identical runs.

use std::fs;
use std::path::Path;

use hetlab_core::scenarios::{fmt_f64, ScanResult, Table};
use serde_json::json;

use crate::Failure;

fn io(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn write_table(path: &Path, t: &Table) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    w.write_record(&t.header).map_err(|e| io(path, e))?;
    for row in &t.rows {
        w.write_record(row).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

pub fn write_all(dir: &Path, r: &ScanResult) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let p = dir.join("result.json");
    fs::write(&p, r.to_json() + "\n").map_err(|e| io(&p, e))?;
    for (name, t) in &r.tables {
        write_table(&dir.join(format!("{name}.csv")), t)?;
    }
    if !r.curves.is_empty() {
        let cdir = dir.join("curves");
        fs::create_dir_all(&cdir).map_err(|e| io(&cdir, e))?;
        for (name, rows) in &r.curves {
            let mut t = Table::new(&["t", "x", "y", "dx", "dy"]);
            for row in rows {
                t.push(row.iter().map(|&x| fmt_f64(x)).collect());
            }
            write_table(&cdir.join(format!("{name}.csv")), &t)?;
        }
    }
    let p = dir.join("timing.json");
    let timing = json!({"scenario": r.scenario, "wall_time_s": r.wall_time_s});
    fs::write(
        &p,
        serde_json::to_string_pretty(&timing).expect("timing serializes") + "\n",
    )
    .map_err(|e| io(&p, e))
}
