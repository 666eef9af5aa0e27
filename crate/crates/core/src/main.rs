use std::process::ExitCode;

fn main() -> ExitCode {
    chi2corr::cli::main_entry()
}
