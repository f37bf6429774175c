fn main() {
    eprintln!("trimbirk: not yet wired");
    std::process::exit(64);
}
