//! Drive an experiment from a configuration string, as the binary does.

use stringbreak::cli::{run_command, RunConfig};

fn main() -> stringbreak::Result<()> {
    let dir = std::env::temp_dir().join("stringbreak-example");
    let mut cfg = RunConfig::parse("command=crossing\nell=7\ng=1.2\n")?;
    cfg.output = dir;
    let report = run_command(&cfg)?;
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    println!("{}", serde_json::to_string_pretty(&report.results)?);
    Ok(())
}
