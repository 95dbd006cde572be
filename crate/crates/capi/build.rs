use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("badapprox.h");
    let mut config = cbindgen::Config::default();
    config.language = cbindgen::Language::C;
    config.header = Some("/* C interface to the badapprox construction kernels. */".into());
    config.include_guard = Some("BADAPPROX_H".into());
    config.cpp_compat = true;
    config.documentation = true;
    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&header);
        }
        Err(e) => {
            // Header generation is best-effort; the committed header stays
            // valid because the ABI surface only changes deliberately.
            println!("cargo:warning=cbindgen failed: {e}");
        }
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
}
