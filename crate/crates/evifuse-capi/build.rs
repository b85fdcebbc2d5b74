fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR");
    let crate_dir = std::path::Path::new(&crate_dir);
    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("read cbindgen.toml");
    let out_path = crate_dir.join("include").join("evifuse.h");
    std::fs::create_dir_all(out_path.parent().unwrap()).expect("create include dir");

    match cbindgen::Builder::new()
        .with_config(config)
        .with_crate(crate_dir)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&out_path);
        }
        // keep the previously generated header usable during syntax-error
        // iterations; the real build will regenerate it
        Err(cbindgen::Error::ParseSyntaxError { .. }) => {}
        Err(e) => panic!("cbindgen failed: {e}"),
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
