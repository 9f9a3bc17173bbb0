use std::process::ExitCode;

use clap::Parser;

use modinv::cli::{run, Cli};
use modinv::report::error_document;
use modinv::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.into_config().and_then(|config| {
        let text = run(&config)?.render(config.format);
        match &config.output {
            Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            println!("{}", error_document(&err));
            eprintln!("modinv: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
