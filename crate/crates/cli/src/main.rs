use std::io::Write;

use anyhow::Context;
use clap::Parser;
use ffp_cli::{run, Cli};

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("starting worker threads")?;
    let spec = cli.spec()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let summary = run(&spec, &mut out)?;
    for path in &summary.artifacts {
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
