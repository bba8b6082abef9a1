use deltawell::cli::{self, Parsed};

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cmd = match cli::parse_args(argv) {
        Ok(Parsed::Run(cmd)) => cmd,
        Ok(Parsed::Help(text)) => {
            println!("{text}");
            return 0;
        }
        Err(err) => {
            eprintln!("{err}");
            return 2;
        }
    };
    match cli::execute(&cmd) {
        Ok(data) => {
            if let Err(err) = cli::write_output(&cmd, &data) {
                eprintln!("failed to write output: {err}");
                return 1;
            }
            0
        }
        Err(err) => {
            eprintln!("{err}");
            cli::exit_code(&err)
        }
    }
}
