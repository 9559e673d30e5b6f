//! Runs the twelve acceptance criteria and prints one line for each.

use unitary_hermite::verify::{run_criterion, Suite};

fn main() {
    let suite = match std::env::var("UHERMITE_SUITE").as_deref() {
        Ok("fast") => Suite::Fast,
        _ => Suite::Full,
    };
    let mut failed = Vec::new();
    for id in 1..=12 {
        let r = run_criterion(id, suite);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
