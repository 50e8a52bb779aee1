//! Shared fixtures for the CLI test targets.
#![allow(dead_code)]

use std::path::Path;

use grassmann_cli::ExperimentConfig;

/// Flat config text of a reduced Burgers case that runs in well under a
/// second. Keys set in `extra` replace the defaults.
pub fn small_case_text(out: &Path, extra: &str) -> String {
    let key = |line: &str| line.split('=').next().unwrap_or("").trim().to_string();
    let overridden: Vec<String> = extra.lines().map(key).collect();
    let base = format!(
        "case = small\n\
         grid = 64\n\
         final_time = 0.5\n\
         snapshots = 41\n\
         initial = random_fourier\n\
         amplitude = 0.5\n\
         fourier_modes = 6\n\
         sampling = (100, 120, 130, 160, 170, 200)\n\
         target = 110\n\
         modes = 6\n\
         output = {}\n",
        out.display()
    );
    let mut text: String = base
        .lines()
        .filter(|l| !overridden.contains(&key(l)))
        .map(|l| format!("{l}\n"))
        .collect();
    text.push_str(extra);
    text.push('\n');
    text
}

pub fn small_case(out: &Path, extra: &str) -> ExperimentConfig {
    ExperimentConfig::parse_flat(&small_case_text(out, extra))
        .and_then(|c| c.validated())
        .expect("fixture config is valid")
}
