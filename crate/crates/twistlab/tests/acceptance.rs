//! Acceptance suite: each criterion runs at its stated tolerance and prints
//! one pass/fail line.  `cargo test --test acceptance` (or `verify-all` via
//! the CLI) is the exit gate for the build.

use twistlab::cache::CacheDir;
use twistlab::verify;

fn cache() -> CacheDir {
    let dir =
        std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/twistlab-cache");
    CacheDir::new(dir)
}

fn run(id: &str) {
    let r = verify::run(&[id], &cache()).remove(0);
    println!("{}", r.line());
    assert!(r.pass, "{id}: {}", r.detail);
}

#[test]
fn a01_birch_stevens() {
    run("A1");
}

#[test]
fn a02_exponential_sum_identities() {
    run("A2");
}

#[test]
fn a03_mean_formula() {
    run("A3");
}

#[test]
fn a04_correlation_identity() {
    run("A4");
}

#[test]
fn a05_exact_zero() {
    run("A5");
}

#[test]
fn a06_root_number_angle_identity() {
    run("A6");
}

#[test]
fn a07_variance_slope() {
    run("A7");
}

#[test]
fn a08_first_moment() {
    run("A8");
}

#[test]
fn a09_second_moment() {
    run("A9");
}

#[test]
fn a10_voronoi_identity() {
    run("A10");
}

#[test]
fn a11_evans_statistics() {
    run("A11");
}

#[test]
fn a12_mollified_moments() {
    run("A12");
}

#[test]
fn a13_level_37_pair() {
    run("A13");
}

#[test]
fn a14_resonator() {
    run("A14");
}

#[test]
fn a15_rank_bounds() {
    run("A15");
}
