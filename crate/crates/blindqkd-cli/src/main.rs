//! Command-line front end for the blindqkd simulator.
//!
//! Exit codes: 0 means the simulation completed (an aborted verdict is a
//! detection result, not an error), 1 means the configuration or output
//! path was rejected, 2 means an internal invariant was violated (the
//! offending round's event trace is printed for diagnosis).

mod config;
mod emit;

use blindqkd::harness::{run_session, ProtocolParams, SessionReport, SimError};
use clap::Parser;
use config::Cli;
use std::io::Write;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };

    if cli.degenerate_labeling() {
        eprintln!(
            "warning: delta = 0 gives the interceptor no readable tag; \
             the labeling attack degenerates to impersonation"
        );
    }

    let mut sessions: Vec<ProtocolParams> = Vec::new();
    for (scenario, seed) in cli.scenario_plan() {
        match cli.params_for(scenario, seed) {
            Ok(params) => sessions.push(params),
            Err(message) => {
                eprintln!("error: {message}");
                return 1;
            }
        }
    }

    // Sessions are independent; matrix runs execute concurrently and the
    // reports are reassembled in scenario order.
    let results: Vec<Result<SessionReport, SimError>> = if sessions.len() == 1 {
        vec![run_session(&sessions[0])]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = sessions
                .iter()
                .map(|params| scope.spawn(move || run_session(params)))
                .collect();
            handles
                .into_iter()
                .map(|handle| handle.join().expect("session thread panicked"))
                .collect()
        })
    };

    let mut reports = Vec::with_capacity(results.len());
    for result in results {
        match result {
            Ok(report) => reports.push(report),
            Err(err) => {
                eprintln!("error: {err}");
                return match err {
                    SimError::Config(_) => 1,
                    SimError::Invariant { trace, .. } => {
                        eprintln!("event trace:");
                        for event in &trace {
                            eprintln!("  {event:?}");
                        }
                        2
                    }
                };
            }
        }
    }

    let rendered = emit::render(&reports, cli.format, cli.matrix);
    match &cli.out {
        Some(path) => {
            if let Err(err) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {err}", path.display());
                return 1;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(rendered.as_bytes())
                .and_then(|()| stdout.flush())
                .is_err()
            {
                return 1;
            }
        }
    }
    0
}
