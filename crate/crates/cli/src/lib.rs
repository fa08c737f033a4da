pub mod commands;
pub mod config;
pub mod render;
pub mod suites;

use config::{Cli, Command, RunConfig, UsageError};

/// Runs one parsed invocation: the rendered output and the exit code.
/// 0 when every check holds, 1 on a failed check or a runtime error,
/// 2 on misuse.
pub fn run(cli: &Cli) -> (String, i32) {
    let result = match &cli.command {
        Command::Zeta(a) => RunConfig::from_args(a, true).map_err(Into::into).and_then(|c| commands::zeta(&c).map(|o| (o, c))),
        Command::Lfun(a) => RunConfig::from_args(a, false).map_err(Into::into).and_then(|c| commands::lfun(&c).map(|o| (o, c))),
        Command::Verify { suite, args } => {
            RunConfig::from_args(args, false).map_err(Into::into).and_then(|c| suites::run(suite, &c).map(|o| (o, c)))
        }
    };
    match result {
        Ok((out, cfg)) => (out.render(cfg.format), if out.ok { 0 } else { 1 }),
        Err(e) if e.is::<UsageError>() => (format!("error: {e}\n"), 2),
        Err(e) => (format!("error: {e:#}\n"), 1),
    }
}
