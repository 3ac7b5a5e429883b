//! Values of the Faddeeva function and the complex erfc built on it.
//!
//!     cargo run --release --example faddeeva

use spinarrival::{erfc_complex, faddeeva_w, Complex};

fn main() {
    let points = [
        Complex::new(0.0, 0.0),
        Complex::new(0.0, 1.0),
        Complex::new(1.5, 0.5),
        Complex::new(-2.0, -0.3),
        Complex::from_polar(100.0, std::f64::consts::FRAC_PI_4),
    ];
    println!("{:>24} {:>44} {:>44}", "z", "w(z)", "erfc(z)");
    for z in points {
        println!("{:>24} {:>44} {:>44}", format!("{z:.4}"), format!("{:.15e}", faddeeva_w(z)), format!("{:.15e}", erfc_complex(z)));
    }

    // erfc of arguments whose exp(-z^2) factor would overflow on its own
    let z = Complex::new(-30.0, 30.0);
    println!("\nerfc({z}) = {:.6e}", erfc_complex(z));
    println!("erfc(40)    = {:.6e} (underflows to zero)", erfc_complex(Complex::new(40.0, 0.0)).re);
}
