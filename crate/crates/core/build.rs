fn main() {
    // BLAS/LAPACK symbols (zgemm3m, zheevd, zgeqrf, zungqr) come from the
    // system OpenBLAS, which bundles LAPACK on Debian-family images.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
