//! Aggregation of run manifests into one summary document.

use crate::output::{ResultTable, RunManifest, MANIFEST_SCHEMA_VERSION};
use crate::CliError;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub struct LoadedRun {
    pub manifest: RunManifest,
    pub table: ResultTable,
}

pub fn load_run(path: &Path) -> Result<LoadedRun, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Computation(format!("manifest {}: {e}", path.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Computation(format!("manifest {}: {e}", path.display())))?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(CliError::Computation(format!(
            "manifest {}: schema version {} does not match supported version {}",
            path.display(),
            manifest.schema_version,
            MANIFEST_SCHEMA_VERSION
        )));
    }
    let primary = manifest
        .output_paths
        .first()
        .ok_or_else(|| CliError::Computation(format!("manifest {} lists no outputs", path.display())))?;
    let primary_path = PathBuf::from(primary);
    let body = std::fs::read_to_string(&primary_path)
        .map_err(|e| CliError::Computation(format!("result {}: {e}", primary_path.display())))?;
    let table = if primary.ends_with(".json") {
        let record: serde_json::Value = serde_json::from_str(&body)
            .map_err(|e| CliError::Computation(format!("result {primary}: {e}")))?;
        json_record_to_table(&manifest.subcommand, &record)
            .ok_or_else(|| CliError::Computation(format!("result {primary}: unrecognized layout")))?
    } else {
        ResultTable::from_csv(&manifest.subcommand, &body)
            .ok_or_else(|| CliError::Computation(format!("result {primary}: empty file")))?
    };
    Ok(LoadedRun { manifest, table })
}

fn json_record_to_table(kind: &str, record: &serde_json::Value) -> Option<ResultTable> {
    let header: Vec<String> = record
        .get("header")?
        .as_array()?
        .iter()
        .map(|v| v.as_str().map(str::to_string))
        .collect::<Option<_>>()?;
    let rows: Vec<Vec<String>> = record
        .get("rows")?
        .as_array()?
        .iter()
        .map(|row| {
            row.as_array()?
                .iter()
                .map(|v| v.as_str().map(str::to_string))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<_>>()?;
    Some(ResultTable {
        kind: kind.to_string(),
        header,
        rows,
    })
}

/// Group correlation-flavored rows by everything except the cutoff and
/// lay the chosen value out against ascending N.
fn decay_groups(
    runs: &[LoadedRun],
    subcommand: &str,
    value_col: &str,
) -> BTreeMap<String, Vec<(u64, String)>> {
    let mut groups: BTreeMap<String, Vec<(u64, String)>> = BTreeMap::new();
    for run in runs.iter().filter(|r| r.manifest.subcommand == subcommand) {
        let t = &run.table;
        let (Some(n_idx), Some(v_idx)) = (t.col("n"), t.col(value_col)) else {
            continue;
        };
        for row in &t.rows {
            let Ok(n) = row[n_idx].parse::<u64>() else {
                continue;
            };
            let key: Vec<String> = t
                .header
                .iter()
                .zip(row)
                .filter(|(h, _)| h.as_str() != "n" && h.as_str() != value_col)
                .map(|(h, v)| format!("{h}={v}"))
                .collect();
            groups
                .entry(key.join(" "))
                .or_default()
                .push((n, row[v_idx].clone()));
        }
    }
    for series in groups.values_mut() {
        series.sort();
        series.dedup();
    }
    groups
}

pub fn build_report(runs: &[LoadedRun]) -> (String, serde_json::Value) {
    let mut text = String::new();
    let mut json = serde_json::Map::new();
    json.insert("run_count".into(), serde_json::json!(runs.len()));
    text.push_str(&format!("runs aggregated: {}\n", runs.len()));

    for (subcommand, value_col, label) in [
        ("corr", "abs", "correlation decay |value| vs N"),
        ("tao-check", "residual", "dilation-identity residual vs N"),
        ("dynamics", "abs", "rotation average |value| vs N"),
    ] {
        let groups = decay_groups(runs, subcommand, value_col);
        if groups.is_empty() {
            continue;
        }
        text.push_str(&format!("\n## {label}\n"));
        let mut json_groups = serde_json::Map::new();
        for (key, series) in &groups {
            text.push_str(&format!("{key}\n"));
            for (n, v) in series {
                text.push_str(&format!("    N={n:<12} {v}\n"));
            }
            json_groups.insert(
                key.clone(),
                serde_json::json!(series
                    .iter()
                    .map(|(n, v)| serde_json::json!({"n": n, "value": v}))
                    .collect::<Vec<_>>()),
            );
        }
        json.insert(subcommand.replace('-', "_"), serde_json::Value::Object(json_groups));
    }

    // complexity ratio tables pass through
    let complexity_rows: Vec<&Vec<String>> = runs
        .iter()
        .filter(|r| r.manifest.subcommand == "complexity")
        .flat_map(|r| r.table.rows.iter())
        .collect();
    if !complexity_rows.is_empty() {
        text.push_str("\n## block complexity\n");
        text.push_str("    n  P(n)  P(n)/n  right_special  left_special\n");
        for row in &complexity_rows {
            text.push_str(&format!("    {}\n", row.join("  ")));
        }
        json.insert(
            "complexity".into(),
            serde_json::json!(complexity_rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()),
        );
    }

    // everything else: counts only
    let mut other: BTreeMap<String, usize> = BTreeMap::new();
    for run in runs {
        if !["corr", "tao-check", "dynamics", "complexity"].contains(&run.manifest.subcommand.as_str())
        {
            *other.entry(run.manifest.subcommand.clone()).or_default() += run.table.rows.len();
        }
    }
    if !other.is_empty() {
        text.push_str("\n## other runs\n");
        for (k, count) in &other {
            text.push_str(&format!("    {k}: {count} rows\n"));
        }
        json.insert("other".into(), serde_json::json!(other));
    }

    (text, serde_json::Value::Object(json))
}
