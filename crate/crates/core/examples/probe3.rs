use diamond_core::report::GridSpec;
use diamond_core::three_relay::*;

fn main() {
    let g = GridSpec::new(9);
    for c0 in [0.0, 0.5] {
        for c in [0.0, 1.0, 3.0] {
            let caps = LinkCaps3::symmetric(c, c0);
            let lb = maximize_lower_bound3(&caps, 1.0, &g).unwrap();
            let ub = upper_bound3(&caps, 1.0, &g, UpperBound3Options::default()).unwrap();
            println!(
                "c0={c0} c={c}: lb={:.6} @({:?})  ub={:.6} @({:?}) binding_ub={} argmin_n={:?}",
                lb.value_bits, lb.argmax_params, ub.value_bits, ub.argmax_params, ub.binding_label, ub.argmin_n
            );
        }
    }
}
