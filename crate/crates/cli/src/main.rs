use clap::error::ErrorKind;
use clap::Parser;
use curveflow_cli::args::Cli;
use curveflow_cli::{run, CliError};
use std::io::Write;
use std::process::ExitCode;

fn fail(e: &CliError) -> ExitCode {
    let msg = e.to_string().replace('\n', " ");
    eprintln!("curveflow: error: {msg}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            return fail(&CliError::Config("no subcommand given; see --help".into()));
        }
        Err(e) => {
            // clap's report spans several lines; keep everything before the usage block
            let text = e.to_string();
            let msg: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect();
            return fail(&CliError::Config(msg.join(" ").trim_start_matches("error: ").to_string()));
        }
    };
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => match std::io::stdout().write_all(&out.bytes) {
            // a reader that stopped early (e.g. `| head`) is not an error
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return ExitCode::SUCCESS,
            r => r.map_err(|e| e.to_string()),
        },
    };
    if let Err(e) = written {
        return fail(&CliError::Io(e));
    }
    if out.success {
        ExitCode::SUCCESS
    } else {
        eprintln!("curveflow: error: verification failed");
        ExitCode::from(1)
    }
}
