fn main() {
    // Restore default SIGPIPE handling so a downstream consumer closing the
    // pipe early (`cm-ramsey sweep | head`) kills the process quietly like
    // any other line-oriented tool instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(cm_ramsey::cli::run_from_args());
}
