mod args;
mod commands;
mod protocols;

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{AnalyzeCmd, Cli, Command, Format, GatesCmd, ModelCmd, ProtocolCmd};
use commands::Output;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] anyonkit::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    fn is_broken_pipe(&self) -> bool {
        let kind = match self {
            CliError::Io(e) => Some(e.kind()),
            CliError::Json(e) => e.io_error_kind(),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e.kind()),
                _ => None,
            },
            _ => None,
        };
        kind == Some(io::ErrorKind::BrokenPipe)
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Lib(_) => "library",
            CliError::Io(_) => "io",
            CliError::Csv(_) | CliError::Json(_) => "output",
            CliError::Pool(_) => "threads",
        }
    }
}

fn dispatch(cli: &Cli) -> anyonkit::Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::Model(ModelCmd::Dump(a)) => commands::model_dump(a),
        Command::Model(ModelCmd::Verify(a)) => commands::model_verify(a, g.tol),
        Command::Gates(GatesCmd::Dump { encoding }) => commands::gates_dump(*encoding),
        Command::Protocol(ProtocolCmd::Run { args, seed, shots }) => commands::protocol_run(args, *seed, *shots),
        Command::Protocol(ProtocolCmd::Branches { args, max_branches }) => commands::protocol_branches(args, *max_branches),
        Command::Analyze(AnalyzeCmd::Closure { set, cap, elements }) => commands::closure(*set, *cap, *elements, g.tol),
        Command::Analyze(AnalyzeCmd::Density) => commands::density(),
        Command::Analyze(AnalyzeCmd::Walk { n, trials, seed }) => commands::walk(*n, *trials, *seed),
        Command::Analyze(AnalyzeCmd::Bqp { k }) => commands::bqp(k),
        Command::Synth(a) => commands::synth(a),
    }
}

fn write(cli: &Cli, out: &Output) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &cli.global.output {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    match cli.global.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &out.json)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(&out.csv.header)?;
            for row in &out.csv.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build()?;
    let out = pool.install(|| dispatch(cli))?;
    write(cli, &out)?;
    Ok(out.exit)
}

fn main() -> ExitCode {
    // clap prints usage and exits 2 on bad arguments
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            if cli.global.format == Format::Json {
                let msg = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
                eprintln!("{msg}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
    }
}
