// RANSAC iteration counts, with and without accounting for the chance that
// a clean sample still gives an inaccurate model.

use sixpt::ransac::{ransac_iterations, ransac_iterations_stable};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p2s = [1.0, 0.99, 0.9, 0.81, 0.59];
    print!("outliers      N");
    for p2 in p2s {
        print!("  N(p2={p2:.2})");
    }
    println!();
    for k in 0..8 {
        let eps = k as f64 / 10.0;
        print!("{eps:>8.1} {:>6}", ransac_iterations(0.99, 6, eps));
        for p2 in p2s {
            print!(" {:>11}", ransac_iterations_stable(0.99, 6, eps, p2));
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
