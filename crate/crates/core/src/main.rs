fn main() {
    if let Some(n) = std::env::var("SDQC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    std::process::exit(sdqc_core::cli::main_with(std::env::args_os()));
}
