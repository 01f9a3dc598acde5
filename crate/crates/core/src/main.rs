use std::process::ExitCode;

fn main() -> anyhow::Result<ExitCode> {
    let code = cidan::cli::run(std::env::args_os())?;
    Ok(ExitCode::from(code.clamp(0, 255) as u8))
}
