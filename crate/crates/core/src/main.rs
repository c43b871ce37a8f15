use std::io::{Read, Write};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let mut stdin = || {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    };
    let out = iel_core::cli::dispatch(&argv, &mut stdin);
    let mut stdout = std::io::stdout().lock();
    // a closed pipe on the reading side is not our failure
    let _ = writeln!(stdout, "{}", out.text).and_then(|_| stdout.flush());
    std::process::exit(out.code);
}
