use std::io::{stderr, stdout};
use std::process::exit;

fn main() {
    // PPLAB_THREADS caps the rayon worker count (results are identical at
    // any setting; this only trades latency for CPU). Unparsable values are
    // ignored and the default pool is used.
    if let Ok(value) = std::env::var("PPLAB_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
        }
    }
    exit(pplab_cli::run_cli(std::env::args_os(), &mut stdout(), &mut stderr()));
}
