use std::io::Write;
use std::panic;
use std::process::ExitCode;

use twisted_hahn_cli::{error_json, run, Outcome};

fn main() -> ExitCode {
    let outcome = panic::catch_unwind(|| run(std::env::args_os(), &mut std::io::stdin().lock()))
        .unwrap_or_else(|payload| {
            let detail = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Outcome { code: 70, stdout: error_json("InternalError", &detail) }
        });
    let mut out = std::io::stdout().lock();
    if out.write_all(outcome.stdout.as_bytes()).and_then(|()| out.flush()).is_err() {
        return ExitCode::from(74);
    }
    ExitCode::from(outcome.code as u8)
}
