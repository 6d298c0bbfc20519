use clap::Parser;
use qfact::cli::{run, JobRequest};

fn main() {
    let req = JobRequest::parse();
    let code = run(&req, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
