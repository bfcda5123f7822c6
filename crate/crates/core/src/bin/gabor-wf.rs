use std::process::ExitCode;

fn main() -> ExitCode {
    gabor_wf::cli::main()
}
