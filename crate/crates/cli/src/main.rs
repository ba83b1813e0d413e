fn main() {
    let outcome = rtrecon_cli::run_args(std::env::args_os());
    print!("{}", outcome.stdout);
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    std::process::exit(outcome.exit_code);
}
