use std::io::Write;

use clap::Parser;
use isotypy::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ISOTYPY_LOG", "warn")).format_timestamp(None).init();
    let (out, code) = run(Cli::parse());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    std::process::exit(code);
}
