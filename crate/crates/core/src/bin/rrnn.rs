use std::process::ExitCode;

fn main() -> ExitCode {
    rrnn::cli::init_logging();
    let code = rrnn::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    ExitCode::from(code as u8)
}
