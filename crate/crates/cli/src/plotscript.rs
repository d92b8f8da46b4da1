//! Matplotlib scripts for trajectory CSVs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mqed::dynamics::Trajectory;

use crate::error::{CliError, CliResult};

/// Emitter count encoded in a trajectory header, if the header is exact.
pub fn emitter_count(header: &str) -> Option<usize> {
    let n = header
        .split(',')
        .filter(|c| c.starts_with("P_"))
        .count()
        .checked_sub(1)?;
    (n > 0 && header == Trajectory::csv_header(n)).then_some(n)
}

fn read_header(path: &Path) -> CliResult<usize> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let header = text.lines().next().unwrap_or("").trim_end();
    emitter_count(header).ok_or_else(|| CliError::UnrecognizedHeader {
        path: path.display().to_string(),
        header: header.to_string(),
    })
}

/// Legend label from file names such as `fig3-weak_maqd_rwa.csv`.
pub fn series_label(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let parts: Vec<&str> = stem.split('_').collect();
    let method = ["fqd", "maqd", "oracle"]
        .into_iter()
        .find(|m| parts.contains(m))
        .map(|m| {
            if m == "oracle" {
                "Oracle".to_string()
            } else {
                m.to_uppercase()
            }
        });
    let rwa = if parts.contains(&"norwa") {
        Some("w/o RWA")
    } else if parts.contains(&"rwa") {
        Some("w/ RWA")
    } else {
        None
    };
    match (method, rwa) {
        (Some(m), Some(r)) => format!("{m} {r}"),
        (Some(m), None) => m,
        _ => stem.to_string(),
    }
}

fn panel_titles(n: usize) -> Vec<String> {
    match n {
        1 => vec!["P_1".into()],
        2 => vec!["Donor".into(), "Acceptor".into(), "Total".into()],
        _ => (1..=n)
            .map(|i| format!("Emitter {i}"))
            .chain(std::iter::once("Total".to_string()))
            .collect(),
    }
}

fn py_str(s: &str) -> String {
    format!("{s:?}")
}

/// Script overlaying every CSV: one panel per emitter plus the total, or a
/// single panel for one emitter. The figure is saved next to `script_path`.
pub fn render(csvs: &[PathBuf], script_path: &Path) -> CliResult<String> {
    if csvs.is_empty() {
        return Err(CliError::Usage("no CSV files given".into()));
    }
    let mut n = None;
    for p in csvs {
        let k = read_header(p)?;
        if n.is_some_and(|m| m != k) {
            return Err(CliError::Usage(format!(
                "{} has {k} emitters, expected {}",
                p.display(),
                n.unwrap()
            )));
        }
        n = Some(k);
    }
    let n = n.unwrap();
    let mut columns: Vec<String> = (1..=n).map(|i| format!("P_{i}")).collect();
    if n > 1 {
        columns.push("P_total".into());
    }
    let titles = panel_titles(n);
    let png = script_path.with_extension("png");

    let mut s = String::new();
    s.push_str("import csv\n\nimport matplotlib\n\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n");
    s.push_str("SERIES = [\n");
    for p in csvs {
        let abs = std::path::absolute(p).unwrap_or_else(|_| p.clone());
        let _ = writeln!(
            s,
            "    ({}, {}),",
            py_str(&abs.display().to_string()),
            py_str(&series_label(p))
        );
    }
    s.push_str("]\n");
    let _ = writeln!(
        s,
        "COLUMNS = [{}]",
        columns
            .iter()
            .map(|c| py_str(c))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(
        s,
        "TITLES = [{}]",
        titles
            .iter()
            .map(|c| py_str(c))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(s, "OUTPUT = {}", py_str(&png.display().to_string()));
    s.push_str(
        r#"

def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


fig, axes = plt.subplots(1, len(COLUMNS), figsize=(4 * len(COLUMNS), 3.5), squeeze=False)
for path, label in SERIES:
    data = load(path)
    for ax, col in zip(axes[0], COLUMNS):
        ax.plot(data["t"], data[col], label=label)
for ax, title in zip(axes[0], TITLES):
    ax.set_title(title)
    ax.set_xlabel("t (hbar/eV)")
    ax.set_ylabel("population")
axes[0][0].legend()
fig.tight_layout()
fig.savefig(OUTPUT, dpi=150)
"#,
    );
    Ok(s)
}
